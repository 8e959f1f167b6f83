"""Diffusive-viscous wave problems and their semi-discrete Galerkin systems.

The PDE is::

    u_tt + alpha u_t - d/dt div(beta grad u) - div(gamma^2 grad u) = f

on all of R^d (d = 1, 2).  In the orthonormal Hermite-function basis the
mass matrix is the identity, so the first-order system reads::

    U' = V
    V' = A U + B V + F(t),   A = -S_gamma,   B = -(M_alpha + S_beta)
"""

from __future__ import annotations

import numbers
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .field import as_basis, node_grid, project
from .hermite import gauss_hermite
from .operators import (
    GeneralOperator2D,
    OperatorSum,
    SeparableOperator,
    compose_2d,
    default_nquad,
    mass_matrix,
    stiffness_matrix,
    weighted_mass,
    weighted_stiffness,
)

__all__ = [
    "AlongAxis",
    "AssemblyError",
    "Constant",
    "DvweProblem",
    "General",
    "GeneralSource",
    "SemiDiscreteSystem",
    "SeparableSource",
    "assemble",
    "energy",
    "initial_state",
    "load_vector",
]


class AssemblyError(ValueError):
    """Raised when a problem cannot be turned into a semi-discrete system."""


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class AlongAxis:
    """Coefficient depending on one coordinate only (``axis`` 0 is x, 1 is y).

    ``breakpoints`` lists coordinates where ``func`` jumps; the Galerkin
    integrals are split there so the jump is integrated exactly.
    """

    func: Callable
    axis: int = 0
    breakpoints: tuple = ()


@dataclass(frozen=True)
class General:
    """Coefficient depending on all coordinates; ``func(x)`` or ``func(x, y)``."""

    func: Callable


def _as_coefficient(c):
    if isinstance(c, (Constant, AlongAxis, General)):
        return c
    if isinstance(c, numbers.Real):
        return Constant(float(c))
    raise TypeError(f"cannot interpret {c!r} as a coefficient")


@dataclass(frozen=True)
class SeparableSource:
    """``f(x, t) = sum_i g_i(x) h_i(t)``; each ``g_i`` is projected once."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((g, h) for g, h in self.terms))


@dataclass(frozen=True)
class GeneralSource:
    """``f(*coords, t)``, reprojected at every requested time."""

    func: Callable


@dataclass(frozen=True)
class DvweProblem:
    """A DVWE initial-value problem together with its discretization settings.

    Coefficients may be given as plain numbers (constants) or as
    :class:`Constant`, :class:`AlongAxis` or :class:`General` descriptors.
    ``nquad`` fixes the quadrature size per dimension; otherwise it is
    ``ceil(nquad_factor * (N+1))``.
    """

    basis: tuple
    alpha: object = 1.0
    beta: object = 1.0
    gamma: object = 1.0
    u0: Callable | None = None
    w0: Callable | None = None
    source: SeparableSource | GeneralSource | None = None
    T_final: float = 1.0
    dt: float = 1e-4
    nquad: int | None = None
    nquad_factor: float = 2.0
    coefficient_floor: float = 1e-12

    def __post_init__(self):
        basis = as_basis(self.basis)
        object.__setattr__(self, "basis", basis)
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, _as_coefficient(getattr(self, name)))
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (np.isfinite(self.T_final) and self.T_final >= 0):
            raise ValueError(f"T_final must be non-negative, got {self.T_final!r}")
        if self.coefficient_floor <= 0:
            raise ValueError("coefficient_floor must be positive")
        for name in ("alpha", "beta", "gamma"):
            c = getattr(self, name)
            if isinstance(c, AlongAxis) and c.axis >= len(basis):
                raise ValueError(f"{name} depends on axis {c.axis} but the problem is {len(basis)}D")

    @property
    def dims(self) -> int:
        return len(self.basis)

    @property
    def shape(self) -> tuple:
        return tuple(b.size for b in self.basis)

    def quadrature_sizes(self) -> tuple:
        if self.nquad is not None:
            return tuple(max(int(self.nquad), b.size) for b in self.basis)
        return tuple(default_nquad(b, self.nquad_factor) for b in self.basis)


@dataclass(frozen=True, eq=False)
class SemiDiscreteSystem:
    """``U' = V``, ``V' = A U + B V + F(t)`` with matrix-free ``A`` and ``B``.

    ``A`` and ``B`` expose ``matvec``; ``S_gamma`` is ``-A`` and is used for
    the discrete energy.  ``load`` returns the coefficient vector of the
    source at time ``t``.
    """

    A: object
    B: object
    load: Callable
    shape: tuple
    basis: tuple = ()
    S_gamma: object = None

    def stiffness_energy(self, U: np.ndarray) -> float:
        if self.S_gamma is not None:
            return float(np.vdot(U, self.S_gamma.matvec(U)))
        return -float(np.vdot(U, self.A.matvec(U)))


def _check_positive(name, coeff, problem):
    floor = problem.coefficient_floor
    if isinstance(coeff, Constant):
        if not coeff.value >= floor:
            raise AssemblyError(f"{name}={coeff.value!r} is below the floor {floor}")
        return
    nq = problem.quadrature_sizes()
    if isinstance(coeff, AlongAxis):
        b = problem.basis[coeff.axis]
        x = gauss_hermite(nq[coeff.axis]).mapped(b)
        vals = np.broadcast_to(np.asarray(coeff.func(x), dtype=float), x.shape)
        bad = ~(vals >= floor)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise AssemblyError(f"{name}={vals[k]!r} at quadrature node x{coeff.axis}={x[k]!r} is below the floor {floor}")
        return
    pts = node_grid(problem.basis, nq)
    vals = np.broadcast_to(np.asarray(coeff.func(*pts), dtype=float), pts[0].shape)
    bad = ~(vals >= floor)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        where = tuple(float(p[idx]) for p in pts)
        raise AssemblyError(f"{name}={vals[idx]!r} at quadrature node {where} is below the floor {floor}")


def _squared(coeff):
    if isinstance(coeff, Constant):
        return Constant(coeff.value**2)
    if isinstance(coeff, AlongAxis):
        f = coeff.func
        return AlongAxis(lambda x: np.asarray(f(x), dtype=float) ** 2, coeff.axis, coeff.breakpoints)
    f = coeff.func
    return General(lambda *x: np.asarray(f(*x), dtype=float) ** 2)


def _factors_1d(spec, coeff, mode, nquad):
    """Mass or stiffness Operator1D of ``coeff`` along one axis."""
    if isinstance(coeff, Constant):
        base = mass_matrix(spec) if mode == "mass" else stiffness_matrix(spec)
        return base * coeff.value
    if mode == "mass":
        return weighted_mass(spec, coeff.func, nquad, coeff.breakpoints)
    return weighted_stiffness(spec, coeff.func, nquad, coeff.breakpoints)


def _weighted_operator(problem: DvweProblem, coeff, mode: str):
    """Separable (or matrix-free) operator for ``(c Phi_j, Phi_i)`` / ``(c grad Phi_j, grad Phi_i)``."""
    nq = problem.quadrature_sizes()
    basis = problem.basis
    if problem.dims == 1:
        if isinstance(coeff, General):
            coeff = AlongAxis(coeff.func, 0)
        return SeparableOperator([(_factors_1d(basis[0], coeff, mode, nq[0]),)], dims=1)

    if isinstance(coeff, General):
        return GeneralOperator2D(basis, coeff.func, mode, nq)

    sx, sy = basis
    # Factor the coefficient into per-axis pieces; a constant rides on x.
    unit = Constant(1.0)
    if isinstance(coeff, Constant) or coeff.axis == 0:
        cx, cy = coeff, unit
    else:
        cx, cy = unit, AlongAxis(coeff.func, 0, coeff.breakpoints)
    if mode == "mass":
        return compose_2d([(_factors_1d(sx, cx, "mass", nq[0]), _factors_1d(sy, cy, "mass", nq[1]))])
    # grad.grad splits into d/dx d/dx and d/dy d/dy parts.
    return compose_2d([
        (_factors_1d(sx, cx, "stiffness", nq[0]), _factors_1d(sy, cy, "mass", nq[1])),
        (_factors_1d(sx, cx, "mass", nq[0]), _factors_1d(sy, cy, "stiffness", nq[1])),
    ])


def _combine(ops_with_signs):
    ops = [(c, op) for c, op in ops_with_signs]
    if all(isinstance(op, SeparableOperator) for _, op in ops):
        total = ops[0][1].scaled(ops[0][0])
        for c, op in ops[1:]:
            total = total + op.scaled(c)
        return total
    return OperatorSum(ops)


class _Load:
    """Callable ``t -> F(t)`` with the spatial projections done up front."""

    def __init__(self, problem: DvweProblem):
        self.shape = problem.shape
        self.problem = problem
        self.source = problem.source
        nq = problem.quadrature_sizes()
        self._nquad = nq
        self._zero = np.zeros(self.shape)
        self._zero.setflags(write=False)
        if isinstance(self.source, SeparableSource):
            self._spatial = [project(problem.basis, g, nq).coeffs for g, _ in self.source.terms]
            self._temporal = [h for _, h in self.source.terms]

    def __call__(self, t: float) -> np.ndarray:
        src = self.source
        if src is None:
            return self._zero
        if isinstance(src, SeparableSource):
            out = np.zeros(self.shape)
            for G, h in zip(self._spatial, self._temporal):
                ht = float(h(t))
                if not np.isfinite(ht):
                    raise ValueError(f"source time factor is not finite at t={t!r}")
                out += ht * G
            return out
        return project(self.problem.basis, lambda *x: src.func(*x, t), self._nquad).coeffs


def assemble(problem: DvweProblem) -> SemiDiscreteSystem:
    """Build ``A = -S_gamma`` and ``B = -(M_alpha + S_beta)`` for ``problem``.

    Constant coefficients use the closed-form stiffness matrix, coefficients
    along one axis become Kronecker terms, general 2D coefficients use the
    matrix-free quadrature path.  ``M`` is the identity, so nothing is
    inverted.

    Raises
    ------
    AssemblyError
        If a coefficient falls below ``problem.coefficient_floor`` at a
        quadrature node.
    """
    for name in ("alpha", "beta", "gamma"):
        _check_positive(name, getattr(problem, name), problem)
    S_gamma = _weighted_operator(problem, _squared(problem.gamma), "stiffness")
    M_alpha = _weighted_operator(problem, problem.alpha, "mass")
    S_beta = _weighted_operator(problem, problem.beta, "stiffness")
    A = _combine([(-1.0, S_gamma)])
    B = _combine([(-1.0, M_alpha), (-1.0, S_beta)])
    return SemiDiscreteSystem(A=A, B=B, load=_Load(problem), shape=problem.shape,
                              basis=problem.basis, S_gamma=S_gamma)


def load_vector(problem_or_system, t: float) -> np.ndarray:
    """Source coefficients ``F(t)`` (the mass matrix is the identity)."""
    if isinstance(problem_or_system, DvweProblem):
        return _Load(problem_or_system)(t)
    return problem_or_system.load(t)


def energy(system: SemiDiscreteSystem, state) -> float:
    """Discrete energy ``(|V|^2 + U . S_gamma U) / 2``."""
    U, V = np.asarray(state.U), np.asarray(state.V)
    if U.shape != system.shape or V.shape != system.shape:
        raise ValueError(f"state shape {U.shape}/{V.shape} does not match system {system.shape}")
    return 0.5 * (float(np.vdot(V, V)) + system.stiffness_energy(U))


def initial_state(problem: DvweProblem):
    """Projected initial data as a :class:`~hermwave.ssprk3.StateVector` at t = 0."""
    from .ssprk3 import StateVector

    nq = problem.quadrature_sizes()
    zero = np.zeros(problem.shape)
    U = project(problem.basis, problem.u0, nq).coeffs if problem.u0 is not None else zero
    V = project(problem.basis, problem.w0, nq).coeffs if problem.w0 is not None else zero
    return StateVector(U, V, 0.0)
