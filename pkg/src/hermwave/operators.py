"""Spectral matrices in the Hermite-function basis and their 2D tensor products.

1D matrices are stored dense.  A 2D operator is kept as a short sum of
Kronecker products and applied to a coefficient matrix ``C`` (x index first)
as ``sum_t A_t @ C @ B_t.T`` without forming the full matrix.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .hermite import (
    BasisSpec,
    derivative_matrix,
    from_reference,
    gauss_hermite,
    hermite_fun_eval,
)

__all__ = [
    "GeneralOperator2D",
    "Operator1D",
    "OperatorSum",
    "SeparableOperator",
    "apply",
    "apply_general_2d",
    "compose_2d",
    "default_nquad",
    "mass_matrix",
    "piecewise_nodes",
    "stiffness_matrix",
    "weighted_mass",
    "weighted_stiffness",
]

DIAGONAL, PENTADIAGONAL, FULL = 0, 2, -1


def default_nquad(spec: BasisSpec, factor: float = 2) -> int:
    return int(np.ceil(factor * (spec.degree + 1)))


@dataclass(frozen=True, eq=False)
class Operator1D:
    """Symmetric ``(N+1) x (N+1)`` matrix with a sparsity hint.

    ``bandwidth_hint`` is 0 for diagonal, 2 for the even-offset pentadiagonal
    pattern of the stiffness matrix, -1 for full.  The hint only selects the
    multiplication kernel.
    """

    matrix: np.ndarray
    bandwidth_hint: int = FULL
    _sparse: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.bandwidth_hint == PENTADIAGONAL:
            object.__setattr__(self, "_sparse", sp.csr_matrix(m))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: Operator1D) -> Operator1D:
        if other.size != self.size:
            raise ValueError(f"size mismatch: {self.size} vs {other.size}")
        hints = {self.bandwidth_hint, other.bandwidth_hint}
        hint = FULL if FULL in hints else max(hints)
        return Operator1D(self.matrix + other.matrix, hint)

    def __mul__(self, c: float) -> Operator1D:
        return Operator1D(float(c) * self.matrix, self.bandwidth_hint)

    __rmul__ = __mul__

    def __neg__(self) -> Operator1D:
        return self * -1.0

    def left(self, C: np.ndarray) -> np.ndarray:
        """``self.matrix @ C``."""
        if self.bandwidth_hint == DIAGONAL:
            d = np.diagonal(self.matrix)
            return d[:, None] * C if C.ndim == 2 else d * C
        if self._sparse is not None:
            return self._sparse @ C
        return self.matrix @ C

    def right(self, C: np.ndarray) -> np.ndarray:
        """``C @ self.matrix.T`` (the matrix is symmetric, so ``C @ matrix``)."""
        if self.bandwidth_hint == DIAGONAL:
            return C * np.diagonal(self.matrix)[None, :]
        if self._sparse is not None:
            return (self._sparse @ C.T).T
        return C @ self.matrix.T


def _check_spec(spec):
    if not isinstance(spec, BasisSpec):
        raise TypeError(f"expected BasisSpec, got {type(spec).__name__}")


def _symmetrize(m):
    return 0.5 * (m + m.T)


def mass_matrix(spec: BasisSpec) -> Operator1D:
    _check_spec(spec)
    return Operator1D(np.eye(spec.size), DIAGONAL)


# Composite Gauss-Legendre used across coefficient jumps: panel width in the
# reference coordinate, nodes per panel, and margin past the turning point.
PANEL_WIDTH, PANEL_NODES, TAIL_MARGIN = 0.25, 16, 12.0


def piecewise_nodes(spec: BasisSpec, degree: int, breakpoints: Sequence[float]):
    """Reference nodes and ``d xi`` weights for integrands smooth between ``breakpoints``.

    Products of Hermite functions up to ``degree`` are negligible beyond
    ``|xi| = sqrt(2 degree + 1) + TAIL_MARGIN``, so the line is truncated
    there, cut at the (physical) breakpoints and covered with Gauss-Legendre
    panels.  No node lands on a breakpoint.
    """
    X = np.sqrt(2.0 * degree + 1.0) + TAIL_MARGIN
    cuts = sorted((b - spec.center) / spec.scale for b in breakpoints)
    edges = [-X] + [c for c in cuts if -X < c < X] + [X]
    g, gw = np.polynomial.legendre.leggauss(PANEL_NODES)
    nodes, weights = [], []
    for a, b in zip(edges, edges[1:]):
        npan = max(1, int(np.ceil((b - a) / PANEL_WIDTH)))
        left = a + (b - a) * np.arange(npan) / npan
        h = (b - a) / npan
        nodes.append((left[:, None] + 0.5 * h * (g + 1.0)).ravel())
        weights.append(np.tile(0.5 * h * gw, npan))
    return np.concatenate(nodes), np.concatenate(weights)


def _weighted_gram(spec: BasisSpec, degree: int, w: Callable, nquad: int, breakpoints=()) -> np.ndarray:
    if breakpoints:
        xi, lam = piecewise_nodes(spec, degree, breakpoints)
    else:
        # sum_k lambda_k w(x_k) phi_i(xi_k) phi_j(xi_k), lambda_k = omega_k exp(xi_k^2)
        rule = gauss_hermite(nquad)
        xi, lam = rule.nodes, rule.scaled_weights
    x = from_reference(spec, xi)
    P = hermite_fun_eval(degree, xi)
    wk = np.broadcast_to(np.asarray(w(x), dtype=float), xi.shape)
    if not np.all(np.isfinite(wk)):
        k = int(np.flatnonzero(~np.isfinite(wk))[0])
        raise ValueError(f"coefficient is not finite at quadrature node x={x[k]!r}")
    return _symmetrize((P * (lam * wk)) @ P.T)


def _resolve_nquad(spec, nquad):
    if nquad is None:
        return default_nquad(spec)
    if nquad < spec.size:
        raise ValueError(f"nquad={nquad} is smaller than the basis size N+1={spec.size}")
    return int(nquad)


def weighted_mass(spec: BasisSpec, w: Callable, nquad: int | None = None,
                  breakpoints: Sequence[float] = ()) -> Operator1D:
    """Matrix of ``(w phi_j, phi_i)`` by Gauss-Hermite quadrature.

    ``w`` is a function of the physical coordinate.  ``nquad`` defaults to
    ``2(N+1)``; a rule smaller than ``N+1`` is rejected.  If ``w`` jumps,
    pass the jump locations as ``breakpoints``: the integral is then split
    there and done with :func:`piecewise_nodes` instead, which is exact to
    rounding for piecewise smooth ``w``.
    """
    _check_spec(spec)
    nquad = _resolve_nquad(spec, nquad)
    return Operator1D(_weighted_gram(spec, spec.degree, w, nquad, tuple(breakpoints)), FULL)


def stiffness_matrix(spec: BasisSpec) -> Operator1D:
    """Closed-form ``(phi_j', phi_i')`` in physical coordinates.

    Diagonal ``(2n+1)/2``, second off-diagonals ``-sqrt((n+1)(n+2))/2``,
    everything divided by ``scale**2``.
    """
    _check_spec(spec)
    N = spec.degree
    n = np.arange(N + 1)
    K = np.diag((2 * n + 1) / 2.0)
    if N >= 2:
        off = -np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) / 2.0
        K[n[:-2], n[:-2] + 2] = off
        K[n[:-2] + 2, n[:-2]] = off
    return Operator1D(K / spec.scale**2, PENTADIAGONAL)


def weighted_stiffness(spec: BasisSpec, w: Callable, nquad: int | None = None,
                       breakpoints: Sequence[float] = ()) -> Operator1D:
    """Matrix of ``(w phi_j', phi_i')``.

    Each derivative is expanded exactly in a degree ``N+1`` basis and the
    weighted Gram matrix is formed there, so the last row and column are not
    biased by truncation.  ``breakpoints`` as in :func:`weighted_mass`.
    """
    _check_spec(spec)
    nquad = _resolve_nquad(spec, nquad)
    D = derivative_matrix(spec.degree)
    G = _weighted_gram(spec, spec.degree + 1, w, nquad, tuple(breakpoints))
    return Operator1D(_symmetrize(D.T @ G @ D) / spec.scale**2, FULL)


class SeparableOperator:
    """``sum_t kron(A_t, B_t)`` in 2D, or ``sum_t A_t`` in 1D.

    ``terms`` is a sequence of 1-tuples (1D) or 2-tuples (2D) of
    :class:`Operator1D`.
    """

    def __init__(self, terms: Sequence[tuple], dims: int | None = None):
        terms = [tuple(t) for t in terms]
        if not terms:
            raise ValueError("at least one term is required")
        dims = dims or len(terms[0])
        if dims not in (1, 2):
            raise ValueError(f"only 1D and 2D operators are supported, got dims={dims}")
        shape = tuple(f.size for f in terms[0])
        for t in terms:
            if len(t) != dims:
                raise ValueError(f"every term needs {dims} factors, got {len(t)}")
            if tuple(f.size for f in t) != shape:
                raise ValueError(f"factor sizes {tuple(f.size for f in t)} do not match {shape}")
        self.terms = tuple(terms)
        self.dims = dims
        self.shape = shape

    def matvec(self, C: np.ndarray) -> np.ndarray:
        if C.shape != self.shape:
            raise ValueError(f"coefficient shape {C.shape} does not match operator {self.shape}")
        if self.dims == 1:
            out = self.terms[0][0].left(C)
            for (A,) in self.terms[1:]:
                out = out + A.left(C)
            return out
        out = None
        for A, B in self.terms:
            y = A.left(B.right(C))
            out = y if out is None else out + y
        return out

    def scaled(self, c: float) -> SeparableOperator:
        return SeparableOperator([(t[0] * c,) + t[1:] for t in self.terms], self.dims)

    def __add__(self, other: SeparableOperator) -> SeparableOperator:
        if self.dims == 2:
            return compose_2d(self.terms + other.terms)
        factors = [t[0] for t in self.terms + other.terms]
        total = factors[0]
        for f in factors[1:]:
            total = total + f
        return SeparableOperator([(total,)], dims=1)

    def to_dense(self) -> np.ndarray:
        """Materialize the full matrix (row-major flattening); small sizes only."""
        if self.dims == 1:
            return sum(t[0].matrix for t in self.terms)
        return sum(np.kron(A.matrix, B.matrix) for A, B in self.terms)


def _same(a: Operator1D, b: Operator1D) -> bool:
    return a is b or (a.bandwidth_hint == b.bandwidth_hint and np.array_equal(a.matrix, b.matrix))


def compose_2d(term_list) -> SeparableOperator:
    """Build ``sum_t kron(A_t, B_t)`` from ``(A_t, B_t)`` pairs.

    Terms sharing an identical x factor are merged by summing their y
    factors, which keeps the number of dense products per apply minimal.
    """
    merged: list[list] = []
    for A, B in term_list:
        for slot in merged:
            if _same(slot[0], A):
                slot[1] = slot[1] + B
                break
        else:
            merged.append([A, B])
    return SeparableOperator([tuple(m) for m in merged], dims=2)


class GeneralOperator2D:
    """Matrix-free ``(w Phi_j, Phi_i)`` or ``(w grad Phi_j, grad Phi_i)`` in 2D.

    The coefficient is sampled once on the tensor Gauss-Hermite grid; each
    apply transforms to the grid, multiplies pointwise and projects back,
    all by per-dimension matrix products.
    """

    def __init__(self, specs: Sequence[BasisSpec], w: Callable, mode: str = "mass",
                 nquad: Sequence[int] | int | None = None):
        if mode not in ("mass", "stiffness"):
            raise ValueError(f"mode must be 'mass' or 'stiffness', got {mode!r}")
        sx, sy = specs
        if nquad is None or np.isscalar(nquad):
            nquad = (nquad, nquad)
        qx, qy = (_resolve_nquad(s, q) for s, q in zip(specs, nquad))
        rx, ry = gauss_hermite(qx), gauss_hermite(qy)
        X, Y = np.meshgrid(rx.mapped(sx), ry.mapped(sy), indexing="ij")
        W = np.broadcast_to(np.asarray(w(X, Y), dtype=float), X.shape)
        if not np.all(np.isfinite(W)):
            i, j = np.argwhere(~np.isfinite(W))[0]
            raise ValueError(f"coefficient is not finite at quadrature node ({X[i, j]!r}, {Y[i, j]!r})")
        self.specs = (sx, sy)
        self.mode = mode
        self.shape = (sx.size, sy.size)
        self.weights_grid = W * np.outer(rx.scaled_weights, ry.scaled_weights)
        self.Px = hermite_fun_eval(sx.degree, rx.nodes)
        self.Py = hermite_fun_eval(sy.degree, ry.nodes)
        if mode == "stiffness":
            self.Qx = hermite_fun_eval(sx.degree + 1, rx.nodes)
            self.Qy = hermite_fun_eval(sy.degree + 1, ry.nodes)
            self.Dx = derivative_matrix(sx.degree) / sx.scale
            self.Dy = derivative_matrix(sy.degree) / sy.scale

    def matvec(self, C: np.ndarray) -> np.ndarray:
        if C.shape != self.shape:
            raise ValueError(f"coefficient shape {C.shape} does not match operator {self.shape}")
        Wg = self.weights_grid
        if self.mode == "mass":
            g = self.Px.T @ C @ self.Py
            return self.Px @ (Wg * g) @ self.Py.T
        gx = self.Qx.T @ (self.Dx @ C) @ self.Py
        gy = self.Px.T @ (C @ self.Dy.T) @ self.Qy
        return (self.Dx.T @ (self.Qx @ (Wg * gx) @ self.Py.T)
                + (self.Px @ (Wg * gy) @ self.Qy.T) @ self.Dy)


class OperatorSum:
    """``sum_k c_k op_k`` for operators exposing ``matvec``."""

    def __init__(self, parts):
        self.parts = [(float(c), op) for c, op in parts]
        self.shape = self.parts[0][1].shape

    def matvec(self, C):
        out = None
        for c, op in self.parts:
            y = op.matvec(C)
            y = y if c == 1.0 else c * y
            out = y if out is None else out + y
        return out


def apply(op, field):
    """Apply an operator to a :class:`~hermwave.field.SpectralField`."""
    from .field import SpectralField

    coeffs = op.matvec(np.asarray(field.coeffs))
    return SpectralField(field.basis, coeffs)


def apply_general_2d(specs, w: Callable, mode: str, field, nquad=None):
    """One-shot matrix-free apply of a non-separable coefficient operator."""
    return apply(GeneralOperator2D(specs, w, mode, nquad), field)
