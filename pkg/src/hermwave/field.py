"""Functions represented by Hermite-function coefficients in 1D or 2D."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .hermite import (
    BasisSpec,
    QuadratureRule,
    gauss_hermite,
    hermite_fun_eval,
    to_reference,
)
from .operators import default_nquad

__all__ = ["SpectralField", "as_basis", "evaluate", "evaluate_grid", "from_grid", "project", "to_grid"]


def as_basis(spec) -> tuple[BasisSpec, ...]:
    """Normalize a single :class:`BasisSpec` or a sequence of them to a tuple."""
    if isinstance(spec, BasisSpec):
        return (spec,)
    basis = tuple(spec)
    if not 1 <= len(basis) <= 2 or not all(isinstance(b, BasisSpec) for b in basis):
        raise ValueError("basis must be one BasisSpec or a pair of them")
    return basis


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficient tensor in the tensorized Hermite-function basis.

    ``coeffs`` has shape ``(N+1,)`` in 1D and ``(Nx+1, Ny+1)`` in 2D, with
    the x index first.  By Parseval, ``np.linalg.norm(coeffs)`` is the L2
    norm of the represented function.
    """

    basis: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        basis = as_basis(self.basis)
        coeffs = np.array(self.coeffs, dtype=float)
        shape = tuple(b.size for b in basis)
        if coeffs.shape != shape:
            raise ValueError(f"coefficient shape {coeffs.shape} does not match basis {shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dims(self) -> int:
        return len(self.basis)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __sub__(self, other: SpectralField) -> SpectralField:
        if self.basis != other.basis:
            raise ValueError("fields live in different bases")
        return SpectralField(self.basis, self.coeffs - other.coeffs)


def _rules(basis, rule) -> tuple[QuadratureRule, ...]:
    if rule is None:
        rules = tuple(gauss_hermite(default_nquad(b)) for b in basis)
    elif isinstance(rule, QuadratureRule):
        rules = (rule,) * len(basis)
    elif isinstance(rule, (int, np.integer)):
        rules = (gauss_hermite(int(rule)),) * len(basis)
    else:
        rules = tuple(gauss_hermite(r) if isinstance(r, (int, np.integer)) else r for r in rule)
    for b, r in zip(basis, rules):
        if r.size < b.size:
            raise ValueError(f"quadrature rule with {r.size} nodes is too small for N+1={b.size}")
    return rules


def _basis_values(spec: BasisSpec, x) -> np.ndarray:
    """Physical basis functions ``s^{-1/2} phi_j((x-c)/s)``, shape ``(N+1,) + x.shape``."""
    return hermite_fun_eval(spec.degree, to_reference(spec, x)) / np.sqrt(spec.scale)


def from_grid(spec, rule, values) -> SpectralField:
    """Project samples taken at the mapped nodes of ``rule`` onto the basis.

    Computes ``sqrt(s) * sum_k lambda_k g(x_k) phi_j(xi_k)`` per dimension,
    where ``lambda_k`` are the scaled weights.
    """
    basis = as_basis(spec)
    rules = _rules(basis, rule)
    vals = np.asarray(values, dtype=float)
    expected = tuple(r.size for r in rules)
    if vals.shape != expected:
        raise ValueError(f"grid values have shape {vals.shape}, expected {expected}")
    mats = [hermite_fun_eval(b.degree, r.nodes) * (r.scaled_weights * np.sqrt(b.scale))
            for b, r in zip(basis, rules)]
    if len(basis) == 1:
        coeffs = mats[0] @ vals
    else:
        coeffs = mats[0] @ vals @ mats[1].T
    return SpectralField(basis, coeffs)


def to_grid(field: SpectralField, rule=None) -> np.ndarray:
    """Values of ``field`` at the mapped quadrature nodes (tensor grid in 2D)."""
    rules = _rules(field.basis, rule)
    mats = [hermite_fun_eval(b.degree, r.nodes) / np.sqrt(b.scale) for b, r in zip(field.basis, rules)]
    if field.dims == 1:
        return mats[0].T @ field.coeffs
    return mats[0].T @ field.coeffs @ mats[1]


def node_grid(basis, rule=None):
    """Mapped physical node coordinates, as ``(x,)`` or an ``ij``-indexed ``(X, Y)``."""
    basis = as_basis(basis)
    rules = _rules(basis, rule)
    axes = [r.mapped(b) for b, r in zip(basis, rules)]
    if len(axes) == 1:
        return (axes[0],)
    return tuple(np.meshgrid(*axes, indexing="ij"))


def project(spec, g: Callable, nquad=None) -> SpectralField:
    """Quadrature L2 projection of ``g`` onto the Hermite-function basis.

    ``g`` takes one array per dimension and must decay fast enough for
    Gauss-Hermite quadrature against the basis to make sense.  ``nquad``
    defaults to ``2(N+1)`` per dimension.
    """
    basis = as_basis(spec)
    rules = _rules(basis, nquad)
    pts = node_grid(basis, rules)
    vals = np.broadcast_to(np.asarray(g(*pts), dtype=float), pts[0].shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        where = tuple(float(p[idx]) for p in pts)
        raise ValueError(f"function is not finite at quadrature node {where}")
    return from_grid(basis, rules, vals)


def evaluate(field: SpectralField, *points) -> np.ndarray:
    """Pointwise synthesis ``sum_j coeffs_j Phi_j`` at physical points.

    1D: ``evaluate(f, x)``.  2D: ``evaluate(f, x, y)`` with broadcastable
    arrays, evaluated point by point.
    """
    if len(points) != field.dims:
        raise ValueError(f"expected {field.dims} coordinate arrays, got {len(points)}")
    if field.dims == 1:
        P = _basis_values(field.basis[0], points[0])
        return np.tensordot(field.coeffs, P, axes=(0, 0))
    x, y = np.broadcast_arrays(*(np.asarray(p, dtype=float) for p in points))
    Px = _basis_values(field.basis[0], x.ravel())
    Py = _basis_values(field.basis[1], y.ravel())
    return np.einsum("ip,ij,jp->p", Px, field.coeffs, Py).reshape(x.shape)


def evaluate_grid(field: SpectralField, xs: Sequence[float], ys: Sequence[float]) -> np.ndarray:
    """2D values on the tensor grid ``xs x ys``; result indexed ``[i_x, i_y]``."""
    if field.dims != 2:
        raise ValueError("evaluate_grid needs a 2D field")
    Px = _basis_values(field.basis[0], np.asarray(xs, dtype=float))
    Py = _basis_values(field.basis[1], np.asarray(ys, dtype=float))
    return Px.T @ field.coeffs @ Py
