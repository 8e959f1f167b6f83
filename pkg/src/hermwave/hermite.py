"""Orthonormal Hermite polynomials, Hermite functions and Gauss-Hermite rules.

Conventions
-----------
``H_n`` are orthonormal against the weight ``exp(-x**2)``::

    H_0 = pi**(-1/4),  H_1 = sqrt(2) * pi**(-1/4) * x,
    H_{n+1} = x * sqrt(2/(n+1)) * H_n - sqrt(n/(n+1)) * H_{n-1}

and the Hermite functions ``phi_n = exp(-x**2/2) * H_n`` are orthonormal in
plain L2(R).  A :class:`BasisSpec` adds an affine map ``x = c + s*xi`` so the
physical basis is ``s**(-1/2) * phi_n((x - c)/s)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "BasisSpec",
    "QuadratureError",
    "QuadratureRule",
    "derivative_matrix",
    "from_reference",
    "gauss_hermite",
    "hermite_fun_deriv_coeffs",
    "hermite_fun_eval",
    "hermite_poly_eval",
    "to_reference",
]

PI_M14 = np.pi ** -0.25

# Newton polish of the Golub-Welsch nodes.
NODE_TOL = 1e-13
NODE_MAXITER = 100

# Rescale threshold for the log-scaled recurrence.
_BIG = 1e150


class QuadratureError(RuntimeError):
    """Raised when the Gauss-Hermite node iteration does not converge."""


@dataclass(frozen=True)
class BasisSpec:
    """Truncation degree and affine placement of a 1D Hermite-function basis.

    Parameters
    ----------
    degree : int
        Highest retained index ``N``; the basis has ``N + 1`` functions.
    center : float
        Physical coordinate mapped to the reference origin.
    scale : float
        Physical length of one reference unit, must be positive.
    """

    degree: int
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")
        if not np.isfinite(self.center):
            raise ValueError(f"center must be finite, got {self.center!r}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def size(self) -> int:
        return self.degree + 1


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for integrals against ``exp(-x**2)``.

    ``scaled_weights`` holds ``weights * exp(nodes**2)``, the weights to use
    when integrating a plain (unweighted) integrand such as a product of
    Hermite functions.  They are computed directly so they stay finite for
    large rules where ``weights`` underflow.
    """

    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("nodes", "weights", "scaled_weights"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))

    @property
    def size(self) -> int:
        return self.nodes.size

    def mapped(self, spec: BasisSpec) -> np.ndarray:
        """Nodes in physical coordinates for ``spec``."""
        return from_reference(spec, self.nodes)


def to_reference(spec: BasisSpec, x_phys):
    return (np.asarray(x_phys, dtype=float) - spec.center) / spec.scale


def from_reference(spec: BasisSpec, xi):
    return spec.center + spec.scale * np.asarray(xi, dtype=float)


def hermite_poly_eval(N: int, x) -> np.ndarray:
    """Orthonormal Hermite polynomials ``H_0..H_N`` at ``x``.

    Returns an array of shape ``(N + 1,) + np.shape(x)``.  Values grow like
    ``exp(x**2/2)``; for large ``|x|`` use :func:`hermite_fun_eval`.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = PI_M14
    if N >= 1:
        out[1] = np.sqrt(2.0) * x * PI_M14
    for n in range(1, N):
        out[n + 1] = x * np.sqrt(2.0 / (n + 1)) * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_fun_eval(N: int, x) -> np.ndarray:
    """Hermite functions ``phi_0..phi_N`` at ``x``, shape ``(N + 1,) + np.shape(x)``.

    The Gaussian factor is carried through the recurrence as a running
    log-scale, so nothing overflows and the tails underflow to zero cleanly.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    # p_n * exp(logscale) == phi_n
    logscale = -0.5 * x * x
    p_prev = np.full(x.shape, PI_M14)
    out[0] = p_prev * np.exp(logscale)
    if N == 0:
        return out
    p_cur = np.sqrt(2.0) * x * p_prev
    out[1] = p_cur * np.exp(logscale)
    for n in range(1, N):
        p_next = x * np.sqrt(2.0 / (n + 1)) * p_cur - np.sqrt(n / (n + 1)) * p_prev
        p_prev, p_cur = p_cur, p_next
        big = np.abs(p_cur) > _BIG
        if np.any(big):
            shrink = np.where(big, 1.0 / _BIG, 1.0)
            p_prev = p_prev * shrink
            p_cur = p_cur * shrink
            logscale = logscale + np.where(big, np.log(_BIG), 0.0)
        out[n + 1] = p_cur * np.exp(logscale)
    return out


def hermite_fun_deriv_coeffs(N: int) -> np.ndarray:
    """Pairs ``(a_n, b_n)`` with ``phi_n' = a_n phi_{n-1} + b_n phi_{n+1}``.

    Returns an ``(N + 1, 2)`` array.  The ``b_N`` term points outside a
    degree-``N`` basis; callers decide whether to keep it.
    """
    n = np.arange(N + 1, dtype=float)
    return np.column_stack([np.sqrt(n / 2.0), -np.sqrt((n + 1) / 2.0)])


def derivative_matrix(N: int) -> np.ndarray:
    """Map degree-``N`` coefficients to the degree-``N+1`` coefficients of the derivative.

    Shape ``(N + 2, N + 1)``; exact, nothing is truncated.
    """
    ab = hermite_fun_deriv_coeffs(N)
    D = np.zeros((N + 2, N + 1))
    j = np.arange(N + 1)
    D[j[1:] - 1, j[1:]] = ab[1:, 0]
    D[j + 1, j] = ab[:, 1]
    return D


def _last_two(n: int, x: np.ndarray):
    """``H_n`` and ``H_{n-1}`` at ``x``, both multiplied by one unknown per-point factor."""
    p_prev = np.ones_like(x)
    p_cur = np.sqrt(2.0) * x
    for k in range(1, n):
        p_next = x * np.sqrt(2.0 / (k + 1)) * p_cur - np.sqrt(k / (k + 1)) * p_prev
        p_prev, p_cur = p_cur, p_next
        m = np.maximum(np.abs(p_cur), np.abs(p_prev))
        s = np.where(m > _BIG, 1.0 / m, 1.0)
        p_prev, p_cur = p_prev * s, p_cur * s
    return p_cur, p_prev


@lru_cache(maxsize=64)
def gauss_hermite(n: int) -> QuadratureRule:
    """n-point Gauss-Hermite rule.

    Nodes come from the symmetric tridiagonal Jacobi matrix and are then
    polished by Newton's method on ``H_n``.  Weights use the Christoffel
    form ``w_k = 1 / (n * H_{n-1}(x_k)**2)``.

    Raises
    ------
    QuadratureError
        If the Newton polish exceeds ``NODE_MAXITER`` iterations.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"number of nodes must be a positive integer, got {n!r}")
    n = int(n)
    if n == 1:
        return QuadratureRule(np.zeros(1), np.full(1, np.sqrt(np.pi)), np.full(1, np.sqrt(np.pi)))

    off = np.sqrt(np.arange(1, n) / 2.0)
    x = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    x = np.sort(x)

    for _ in range(NODE_MAXITER):
        p_n, p_nm1 = _last_two(n, x)
        dx = p_n / (np.sqrt(2.0 * n) * p_nm1)
        x = x - dx
        if np.all(np.abs(dx) <= NODE_TOL * np.maximum(1.0, np.abs(x))):
            break
    else:
        raise QuadratureError(f"Gauss-Hermite nodes for n={n} did not converge in {NODE_MAXITER} iterations")

    x = 0.5 * (x - x[::-1])
    if n % 2:
        x[n // 2] = 0.0

    phi = hermite_fun_eval(n - 1, x)[n - 1]
    scaled = 1.0 / (n * phi * phi)
    scaled = 0.5 * (scaled + scaled[::-1])
    weights = scaled * np.exp(-x * x)
    return QuadratureRule(x, weights, scaled)
