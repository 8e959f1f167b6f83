"""Three-stage SSP Runge-Kutta time stepping for ``U' = V, V' = A U + B V + F(t)``."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

__all__ = ["DivergenceError", "EnergyRecorder", "StateVector", "integrate", "stability_indicator", "step"]

log = logging.getLogger(__name__)

# dt * sqrt(|A|_1) above this draws a warning.
STABILITY_THRESHOLD = 1.5


class DivergenceError(FloatingPointError):
    """The state became non-finite, usually because ``dt`` is too large."""

    def __init__(self, step_index: int, t: float):
        super().__init__(f"non-finite state after step {step_index} (t={t:.6g}); reduce dt")
        self.step_index = step_index
        self.t = t


@dataclass(frozen=True, eq=False)
class StateVector:
    U: np.ndarray
    V: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if U.shape != V.shape:
            raise ValueError(f"U and V shapes differ: {U.shape} vs {V.shape}")
        if not math.isfinite(self.t):
            raise ValueError("state time must be finite")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "t", float(self.t))


def _rhs(system, U, V, t):
    return system.A.matvec(U) + system.B.matvec(V) + system.load(t)


def step(system, state: StateVector, dt: float, index: int = 0) -> StateVector:
    """Advance one SSP-RK3 step (Shu-Osher form).

    Source samples are taken at ``t``, ``t + dt`` and ``t + dt/2`` for the
    three stages, the only choice that keeps third order with time-dependent
    forcing.  The source enters every stage multiplied by ``dt``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    U, V, t = state.U, state.V, state.t

    # Overflow is reported as DivergenceError below, not as numpy warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        U1 = U + dt * V
        V1 = V + dt * _rhs(system, U, V, t)

        U2 = 0.75 * U + 0.25 * (U1 + dt * V1)
        V2 = 0.75 * V + 0.25 * (V1 + dt * _rhs(system, U1, V1, t + dt))

        U3 = U / 3.0 + (2.0 / 3.0) * (U2 + dt * V2)
        V3 = V / 3.0 + (2.0 / 3.0) * (V2 + dt * _rhs(system, U2, V2, t + 0.5 * dt))

    if not (np.isfinite(U3).all() and np.isfinite(V3).all()):
        raise DivergenceError(index, t + dt)
    return StateVector(U3, V3, t + dt)


def _one_norm(op) -> float | None:
    """Cheap upper bound of the induced 1-norm; ``None`` when unknown."""
    terms = getattr(op, "terms", None)
    if terms is None:
        parts = getattr(op, "parts", None)
        if parts is None:
            return None
        norms = [_one_norm(p) for _, p in parts]
        if any(n is None for n in norms):
            return None
        return sum(abs(c) * n for (c, _), n in zip(parts, norms))
    total = 0.0
    for factors in terms:
        prod = 1.0
        for f in factors:
            prod *= np.abs(f.matrix).sum(axis=0).max()
        total += prod
    return total


def stability_indicator(system, dt: float) -> float | None:
    """``dt * sqrt(|A|_1)``; large values mean the explicit step is near its limit."""
    n = _one_norm(system.A)
    return None if n is None else dt * math.sqrt(n)


def integrate(system, state0: StateVector, dt: float, T: float,
              observers: Iterable[Callable] = (), every: int = 1) -> StateVector:
    """March from ``state0.t`` to ``T`` with fixed steps of ``dt``.

    The last step is shortened so the final time is exactly ``T``.  Each
    observer is called as ``observer(state, step_index)`` on the initial
    state and then after every ``every``-th step and after the final step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    t0 = state0.t
    if T < t0:
        raise ValueError(f"T={T!r} lies before the initial time {t0!r}")
    observers = list(observers)
    ind = stability_indicator(system, dt)
    if ind is not None and ind > STABILITY_THRESHOLD:
        log.warning("dt*sqrt(|A|_1) = %.3g exceeds %.2g; the explicit step may be unstable", ind, STABILITY_THRESHOLD)

    nsteps = max(0, math.ceil((T - t0) / dt - 1e-9))
    state = state0
    for obs in observers:
        obs(state, 0)
    for k in range(1, nsteps + 1):
        h = (T - state.t) if k == nsteps else dt
        state = step(system, state, h, index=k)
        # pin the clock to t0 + k*dt so round-off does not accumulate
        state = StateVector(state.U, state.V, T if k == nsteps else t0 + k * dt)
        if observers and (k % every == 0 or k == nsteps):
            for obs in observers:
                obs(state, k)
    return state


class EnergyRecorder:
    """Observer collecting ``(t, energy)`` pairs."""

    def __init__(self, system):
        self.system = system
        self.times: list[float] = []
        self.values: list[float] = []

    def __call__(self, state: StateVector, index: int):
        from .dvwe import energy

        if self.times and self.times[-1] == state.t:
            return
        self.times.append(state.t)
        self.values.append(energy(self.system, state))
