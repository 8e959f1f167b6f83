"""Built-in test problems.

======  ==========================================================
EX1_I   1D, f = 0, exact exp(-x^2 - t)
EX1_II  1D, forced, exact exp(-x^2) sin t
EX2_I   2D analogue of EX1_I
EX2_II  2D analogue of EX1_II
EX3     1D, source x^mu exp(-x^2) cos t, zero data, reference run
EX4     2D homogeneous medium, Ricker source at (10, 10), f0 = 15
EX5     2D two-layer medium split at y = 16.5, Ricker at (15, 15), f0 = 20
======  ==========================================================
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .dvwe import AlongAxis, DvweProblem, SeparableSource
from .hermite import BasisSpec

__all__ = ["CATALOG", "Scenario", "get_scenario", "layered", "real_power", "ricker"]


def ricker(f0: float, t0: float) -> Callable:
    """``[1 - 2(pi f0 (t - t0))^2] exp(-(pi f0 (t - t0))^2)``; equals 1 at ``t0``."""

    def h(t):
        a = (np.pi * f0 * (np.asarray(t, dtype=float) - t0)) ** 2
        return (1.0 - 2.0 * a) * np.exp(-a)

    return h


def real_power(x, mu: float):
    """Real branch of ``x**mu`` for rational ``mu = p/3``: odd cube root raised to ``3*mu``."""
    p = 3.0 * mu
    if abs(p - round(p)) > 1e-12:
        return np.sign(x) * np.abs(x) ** mu
    return np.cbrt(x) ** int(round(p))


def layered(below: float, above: float, level: float) -> Callable:
    """Piecewise constant in one coordinate; the interface value belongs to ``below``."""

    def c(y):
        return np.where(np.asarray(y, dtype=float) <= level, below, above)

    return c


@dataclass(frozen=True)
class Scenario:
    """A catalog entry.

    ``build(basis, dt, T_final, nquad_factor, params)`` returns a
    :class:`DvweProblem`.  ``exact(*coords, t)`` and ``exact_grad`` are set
    for problems with a closed-form solution.
    """

    id: str
    dims: int
    kind: str
    description: str
    build: Callable
    defaults: dict = field(default_factory=dict)
    exact: Callable | None = None
    exact_grad: tuple | None = None


def _gauss(*xs):
    return np.exp(-sum(np.asarray(x, dtype=float) ** 2 for x in xs))


def _problem(basis, dt, T_final, nquad_factor, **kw):
    return DvweProblem(basis=basis, dt=dt, T_final=T_final, nquad_factor=nquad_factor, **kw)


def _ex1_i(basis, dt, T_final, nquad_factor, params):
    return _problem(basis, dt, T_final, nquad_factor, u0=_gauss, w0=lambda x: -_gauss(x))


def _ex1_ii(basis, dt, T_final, nquad_factor, params):
    src = SeparableSource([
        (lambda x: _gauss(x) * (1 - 4 * x**2), np.sin),
        (lambda x: _gauss(x) * (3 - 4 * x**2), np.cos),
    ])
    return _problem(basis, dt, T_final, nquad_factor, u0=None, w0=_gauss, source=src)


def _ex2_i(basis, dt, T_final, nquad_factor, params):
    return _problem(basis, dt, T_final, nquad_factor, u0=_gauss, w0=lambda x, y: -_gauss(x, y))


def _ex2_ii(basis, dt, T_final, nquad_factor, params):
    src = SeparableSource([
        (lambda x, y: _gauss(x, y) * (3 - 4 * x**2 - 4 * y**2), np.sin),
        (lambda x, y: _gauss(x, y) * (5 - 4 * x**2 - 4 * y**2), np.cos),
    ])
    return _problem(basis, dt, T_final, nquad_factor, u0=None, w0=_gauss, source=src)


def _ex3(basis, dt, T_final, nquad_factor, params):
    mu = float(params.get("mu", 1.0 / 3.0))
    src = SeparableSource([(lambda x: real_power(x, mu) * _gauss(x), np.cos)])
    return _problem(basis, dt, T_final, nquad_factor, source=src)


def _ex4(basis, dt, T_final, nquad_factor, params):
    x0, y0 = params.get("source", (10.0, 10.0))
    f0, t0 = params.get("f0", 15.0), params.get("t0", 0.05)
    src = SeparableSource([(lambda x, y: _gauss(x - x0, y - y0), ricker(f0, t0))])
    return _problem(basis, dt, T_final, nquad_factor, alpha=1.0, beta=0.01, gamma=20.0, source=src)


EX5_LEVEL = 16.5
EX5_BELOW = (1.0, 0.02, 15.6)
EX5_ABOVE = (2.5, 0.05, 20.4)


def _ex5(basis, dt, T_final, nquad_factor, params):
    x0, y0 = params.get("source", (15.0, 15.0))
    f0, t0 = params.get("f0", 20.0), params.get("t0", 0.05)
    coeffs = [AlongAxis(layered(lo, hi, EX5_LEVEL), axis=1, breakpoints=(EX5_LEVEL,)) for lo, hi in zip(EX5_BELOW, EX5_ABOVE)]
    src = SeparableSource([(lambda x, y: _gauss(x - x0, y - y0), ricker(f0, t0))])
    return _problem(basis, dt, T_final, nquad_factor, alpha=coeffs[0], beta=coeffs[1], gamma=coeffs[2], source=src)


_SMOOTH_N = list(range(10, 51, 5))

CATALOG: dict[str, Scenario] = {
    s.id: s
    for s in [
        Scenario(
            "EX1_I", 1, "convergence", "1D, f=0, u0=exp(-x^2), w0=-exp(-x^2); exact exp(-x^2-t)", _ex1_i,
            dict(N_list=_SMOOTH_N, dt=1e-4, T_final=1.0),
            exact=lambda x, t: np.exp(-x**2 - t),
            exact_grad=(lambda x, t: -2 * x * np.exp(-x**2 - t),),
        ),
        Scenario(
            "EX1_II", 1, "convergence", "1D, forced, u0=0, w0=exp(-x^2); exact exp(-x^2) sin t", _ex1_ii,
            dict(N_list=_SMOOTH_N, dt=1e-4, T_final=1.0),
            exact=lambda x, t: np.exp(-x**2) * np.sin(t),
            exact_grad=(lambda x, t: -2 * x * np.exp(-x**2) * np.sin(t),),
        ),
        Scenario(
            "EX2_I", 2, "convergence", "2D, f=0, u0=exp(-r^2), w0=-exp(-r^2); exact exp(-r^2-t)", _ex2_i,
            dict(N_list=_SMOOTH_N, dt=1e-4, T_final=0.5),
            exact=lambda x, y, t: np.exp(-x**2 - y**2 - t),
            exact_grad=(lambda x, y, t: -2 * x * np.exp(-x**2 - y**2 - t),
                        lambda x, y, t: -2 * y * np.exp(-x**2 - y**2 - t)),
        ),
        Scenario(
            "EX2_II", 2, "convergence", "2D, forced, u0=0, w0=exp(-r^2); exact exp(-r^2) sin t", _ex2_ii,
            dict(N_list=_SMOOTH_N, dt=1e-4, T_final=0.5),
            exact=lambda x, y, t: np.exp(-x**2 - y**2) * np.sin(t),
            exact_grad=(lambda x, y, t: -2 * x * np.exp(-x**2 - y**2) * np.sin(t),
                        lambda x, y, t: -2 * y * np.exp(-x**2 - y**2) * np.sin(t)),
        ),
        Scenario(
            "EX3", 1, "convergence", "1D, f=x^mu exp(-x^2) cos t, zero data; errors against a reference run", _ex3,
            dict(N_list=[32, 48, 64, 96, 128], dt=1e-4, T_final=0.5, reference_N=256, params={"mu": 1.0 / 3.0}),
        ),
        Scenario(
            "EX4", 2, "wavefield", "2D homogeneous medium (1, 0.01, 20), Ricker f0=15 at (10, 10)", _ex4,
            dict(N_list=[100, 200], dt=1e-4, T_final=0.5, center=[10.0, 10.0], window=[0.0, 20.0, 0.0, 20.0],
                 snapshots=[0.005, 0.1, 0.3, 0.5], cross_sections=[{"line": "diagonal"}]),
        ),
        Scenario(
            "EX5", 2, "wavefield", "2D layers split at y=16.5, Ricker f0=20 at (15, 15)", _ex5,
            dict(N_list=[150, 300], dt=1e-4, T_final=0.8, center=[15.0, 15.0], window=[0.0, 30.0, 0.0, 30.0],
                 nquad_factor=4.0, snapshots=[0.05, 0.15, 0.25, 0.4, 0.6, 0.8],
                 cross_sections=[{"line": "x", "value": 17.0}]),
        ),
    ]
}


def get_scenario(name: str) -> Scenario:
    try:
        return CATALOG[name.upper()]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(CATALOG)}") from None


def make_basis(dims: int, N: int, center, scale) -> tuple:
    center = np.broadcast_to(np.asarray(center, dtype=float), (dims,))
    scale = np.broadcast_to(np.asarray(scale, dtype=float), (dims,))
    return tuple(BasisSpec(N, float(c), float(s)) for c, s in zip(center, scale))
