"""Error norms, convergence rates and report rows for convergence studies."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .field import SpectralField, _rules, node_grid, to_grid
from .hermite import derivative_matrix, gauss_hermite
from .operators import default_nquad, stiffness_matrix

__all__ = [
    "ErrorReport",
    "display_grid",
    "fill_rates",
    "fit_rate",
    "h1_distance",
    "h1_error",
    "l2_error",
    "linf_error",
    "pairwise_rate",
]


@dataclass
class ErrorReport:
    """One row of a convergence table; rates are relative to the previous row."""

    N: int
    l2_error: float
    linf_error: float
    h1_error: float | None = None
    rate_l2: float | None = None
    rate_linf: float | None = None
    rate_h1: float | None = None


def _tensor_weights(field, rules):
    w = [r.scaled_weights * b.scale for b, r in zip(field.basis, rules)]
    return w[0] if len(w) == 1 else np.outer(w[0], w[1])


def l2_error(field: SpectralField, exact: Callable, rule=None) -> float:
    """Quadrature L2 distance between ``field`` and ``exact``.

    Uses mapped Gauss-Hermite nodes, ``2(N+1)`` per dimension by default.
    The integrand is squared error, so Gaussian-decaying errors are weighted
    correctly in the tails.
    """
    rules = _rules(field.basis, rule)
    pts = node_grid(field.basis, rules)
    err = to_grid(field, rules) - np.asarray(exact(*pts), dtype=float)
    return float(np.sqrt(np.sum(_tensor_weights(field, rules) * err * err)))


def display_grid(field: SpectralField, half_width: float = 10.0, n1d: int = 2001,
                 window=None, n2d: int = 201):
    """Default L-infinity grid.

    1D: ``n1d`` uniform points on ``c +- half_width*s``.  2D: ``n2d x n2d``
    points on ``window = (x0, x1, y0, y1)``, by default ``c +- half_width*s``
    per axis.
    """
    if field.dims == 1:
        b = field.basis[0]
        return (np.linspace(b.center - half_width * b.scale, b.center + half_width * b.scale, n1d),)
    if window is None:
        window = []
        for b in field.basis:
            window += [b.center - half_width * b.scale, b.center + half_width * b.scale]
    x0, x1, y0, y1 = window
    return tuple(np.meshgrid(np.linspace(x0, x1, n2d), np.linspace(y0, y1, n2d), indexing="ij"))


def linf_error(field: SpectralField, exact: Callable, grid=None) -> float:
    """Maximum pointwise error on ``grid`` (a tuple of coordinate arrays)."""
    from .field import evaluate

    grid = display_grid(field) if grid is None else tuple(grid)
    diff = evaluate(field, *grid) - np.asarray(exact(*grid), dtype=float)
    return float(np.max(np.abs(diff)))


def _gradient_on_grid(field: SpectralField, rules):
    """Physical partial derivatives of ``field`` at the mapped nodes."""
    from .hermite import hermite_fun_eval

    mats = [hermite_fun_eval(b.degree, r.nodes) / np.sqrt(b.scale) for b, r in zip(field.basis, rules)]
    dmats = [hermite_fun_eval(b.degree + 1, r.nodes) / np.sqrt(b.scale) for b, r in zip(field.basis, rules)]
    Ds = [derivative_matrix(b.degree) / b.scale for b in field.basis]
    C = field.coeffs
    if field.dims == 1:
        return [dmats[0].T @ (Ds[0] @ C)]
    gx = dmats[0].T @ (Ds[0] @ C) @ mats[1]
    gy = mats[0].T @ (C @ Ds[1].T) @ dmats[1]
    return [gx, gy]


def h1_distance(a: SpectralField, b: SpectralField) -> float:
    """Exact H1 distance between two fields on the same placement.

    The lower-degree field is zero-padded; the distance is
    ``sqrt(|d|^2 + d.K d)`` with ``K`` the stiffness Gram matrix.
    """
    if len(a.basis) != len(b.basis):
        raise ValueError("fields have different dimensions")
    for ba, bb in zip(a.basis, b.basis):
        if (ba.center, ba.scale) != (bb.center, bb.scale):
            raise ValueError("fields use different basis placements")
    big = a if a.coeffs.size >= b.coeffs.size else b
    shape = tuple(max(x, y) for x, y in zip(a.coeffs.shape, b.coeffs.shape))
    d = np.zeros(shape)
    d[tuple(slice(0, s) for s in a.coeffs.shape)] += a.coeffs
    d[tuple(slice(0, s) for s in b.coeffs.shape)] -= b.coeffs
    Ks = [stiffness_matrix(type(bb)(n - 1, bb.center, bb.scale)).matrix for bb, n in zip(big.basis, shape)]
    if d.ndim == 1:
        grad2 = d @ Ks[0] @ d
    else:
        grad2 = np.sum(d * (Ks[0] @ d)) + np.sum(d * (d @ Ks[1]))
    return float(np.sqrt(np.sum(d * d) + grad2))


def h1_error(field: SpectralField, exact, exact_deriv=None, rule=None) -> float:
    """H1 error against a function or a reference field.

    If ``exact`` is a :class:`SpectralField` the distance is computed exactly
    in coefficient space (see :func:`h1_distance`).  Otherwise ``exact_deriv``
    must return the gradient components (one callable per dimension, or a
    single callable in 1D) and the integral is done by quadrature.
    """
    if isinstance(exact, SpectralField):
        return h1_distance(field, exact)
    if exact_deriv is None:
        raise ValueError("exact_deriv is required when exact is a function")
    if callable(exact_deriv):
        exact_deriv = [exact_deriv]
    if rule is None:
        rule = tuple(gauss_hermite(default_nquad(b) + 2) for b in field.basis)
    rules = _rules(field.basis, rule)
    pts = node_grid(field.basis, rules)
    w = _tensor_weights(field, rules)
    total = l2_error(field, exact, rules) ** 2
    for g, dexact in zip(_gradient_on_grid(field, rules), exact_deriv):
        e = g - np.asarray(dexact(*pts), dtype=float)
        total += float(np.sum(w * e * e))
    return float(np.sqrt(total))


def pairwise_rate(n1: float, e1: float, n2: float, e2: float) -> float:
    """``log(e1/e2) / log(n2/n1)``."""
    return float(np.log(e1 / e2) / np.log(n2 / n1))


def fit_rate(points: Sequence[tuple]) -> float:
    """Least-squares ``r`` in ``error ~ N**(-r)`` over ``(N, error)`` pairs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (N, error) points")
    if np.any(pts[:, 1] <= 0) or np.any(pts[:, 0] <= 0):
        raise ValueError("N and errors must be positive")
    slope = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)[0]
    return float(-slope) + 0.0


def fill_rates(reports: list[ErrorReport]) -> list[ErrorReport]:
    """Set pairwise rates between consecutive rows in place; returns the list."""
    for prev, cur in zip(reports, reports[1:]):
        for name in ("l2", "linf", "h1"):
            e1, e2 = getattr(prev, f"{name}_error"), getattr(cur, f"{name}_error")
            if e1 is not None and e2 is not None and e1 > 0 and e2 > 0:
                setattr(cur, f"rate_{name}", pairwise_rate(prev.N, e1, cur.N, e2))
    return reports
