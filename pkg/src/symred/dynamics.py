"""Full and reduced Hamiltonian flows, periodic orbits, actions, monodromy.

All orbit finding happens in the reduced half-line chart: full-space periodic
orbits on the zero momentum level come in group-orbit tubes and are never
isolated, so shooting in R^{2d} is pointless.  The reduced dynamics is the
even extension of (rdot, pdot) = (2p, -V0'(r)) to signed r, quotiented by the
antipodal identification (r, p) ~ (-r, -p); a seam crossing contributes a
factor -I to chart-linearized quantities.

Integrators are fixed-step Stoermer-Verlet (kick-drift-kick), which for this
separable catalog conserves the momentum map exactly and keeps a bounded
energy oscillation of order dt^2; the step is refined until the measured
drift meets the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepSizeError
from .groups import SO2_AXIAL
from .hamiltonians import HamiltonianModel
from .reduction import momentum_map_batch

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(160)


@dataclass(frozen=True)
class Trajectory:
    """Sampled integrator output with drift diagnostics."""

    times: np.ndarray
    points: np.ndarray          # (n_samples, state_dim)
    dt: float
    n_steps: int
    energy_drift: float
    momentum_drift: float | None = None
    action: float | None = None  # int p qdot dt accumulated along the run
    crossings: int | None = None

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]


def _verlet_full(ham: HamiltonianModel, z0: np.ndarray, t_end: float, n_steps: int,
                 n_samples: int):
    """Batched kick-drift-kick pass; z0 has shape (m, 2d)."""
    d = ham.config_dim
    x = np.array(z0[:, :d], dtype=float)
    xi = np.array(z0[:, d:], dtype=float)
    dt = t_end / n_steps
    stride = max(1, n_steps // n_samples)
    times, samples = [0.0], [np.hstack([x, xi])]
    action = np.zeros(x.shape[0])

    def grad_x(xv):
        if ham.group.kind == SO2_AXIAL:
            g = np.zeros_like(xv)
            s = xv[:, 0] ** 2 + xv[:, 1] ** 2
            g[:, :2] = 2.0 * ham.potential.w1(s)[:, None] * xv[:, :2]
            return g
        s = np.sum(xv * xv, axis=1)
        return 2.0 * ham.potential.w1(s)[:, None] * xv

    for k in range(n_steps):
        xi -= 0.5 * dt * grad_x(x)
        x += dt * 2.0 * xi
        action += dt * 2.0 * np.sum(xi * xi, axis=1)
        xi -= 0.5 * dt * grad_x(x)
        if (k + 1) % stride == 0 or k == n_steps - 1:
            times.append((k + 1) * dt)
            samples.append(np.hstack([x, xi]))
    return np.asarray(times), np.stack(samples, axis=0), action, dt


def integrate_full(ham: HamiltonianModel, z0: np.ndarray, t_end: float,
                   tol: float = 1e-8, max_steps: int = 4_000_000,
                   n_samples: int = 512, n_steps: int | None = None) -> Trajectory:
    """Integrate zdot = J grad H from z0 over [0, t_end]."""
    batch = integrate_full_batch(ham, np.asarray(z0, dtype=float)[None, :], t_end,
                                 tol=tol, max_steps=max_steps, n_samples=n_samples,
                                 n_steps=n_steps)
    return Trajectory(batch.times, batch.points[:, 0, :], batch.dt, batch.n_steps,
                      batch.energy_drift, batch.momentum_drift,
                      None if batch.action is None else float(batch.action[0]))


@dataclass(frozen=True)
class BatchTrajectory:
    times: np.ndarray
    points: np.ndarray          # (n_samples, m, 2d)
    dt: float
    n_steps: int
    energy_drift: float
    momentum_drift: float
    action: np.ndarray


def _energy_batch(ham: HamiltonianModel, pts: np.ndarray) -> np.ndarray:
    """Vectorized H over points of shape (..., 2d)."""
    d = ham.config_dim
    x, xi = pts[..., :d], pts[..., d:]
    if ham.group.kind == SO2_AXIAL:
        s = x[..., 0] ** 2 + x[..., 1] ** 2
    else:
        s = np.sum(x * x, axis=-1)
    return np.sum(xi * xi, axis=-1) + ham.potential.w(s)


def integrate_full_batch(ham: HamiltonianModel, z0: np.ndarray, t_end: float,
                         tol: float = 1e-8, max_steps: int = 4_000_000,
                         n_samples: int = 512, n_steps: int | None = None) -> BatchTrajectory:
    """Vectorized integrate_full over a batch of initial conditions.

    When ``n_steps`` is given the step count is fixed (no drift-driven
    refinement); the measured drift is still reported.
    """
    z0 = np.asarray(z0, dtype=float)
    if t_end == 0.0:
        zero = np.zeros(z0.shape[0])
        return BatchTrajectory(np.array([0.0]), z0[None, :, :], 0.0, 0, 0.0, 0.0, zero)
    h0 = _energy_batch(ham, z0)
    f0 = momentum_map_batch(ham.group, z0)
    n = n_steps if n_steps is not None else max(128, int(abs(t_end) / 0.01))
    while True:
        times, pts, action, dt = _verlet_full(ham, z0, t_end, n, n_samples)
        e_drift = float(np.max(np.abs(_energy_batch(ham, pts) - h0[None, :])))
        if e_drift <= tol or n_steps is not None:
            break
        if 2 * n > max_steps:
            raise StepSizeError(
                f"energy drift {e_drift:.2e} > tol {tol:.2e} at max steps {max_steps}"
            )
        n *= 2
    m_drift = float(np.max(np.abs(momentum_map_batch(ham.group, pts) - f0[None, :, :]),
                           initial=0.0))
    return BatchTrajectory(times, pts, dt, n, e_drift, m_drift, action)


def integrate_reduced(ham: HamiltonianModel, start, t_end: float, tol: float = 1e-8,
                      max_steps: int = 4_000_000, n_samples: int = 512,
                      n_steps: int | None = None) -> Trajectory:
    """Integrate the reduced chart flow from (r0, p0) (plus (x3, xi3) for the
    cylinder) with the antipodal continuation through the seam r = 0.

    Internally runs the even extension in a signed radial variable and maps
    samples back to the chart; ``crossings`` counts seam passages.
    """
    start = tuple(float(v) for v in start)
    axial = ham.group.kind == SO2_AXIAL
    if axial and len(start) != 4:
        raise ValueError("cylinder chart state is (r, p, x3, xi3)")
    if not axial and len(start) != 2:
        raise ValueError("chart state is (r, p)")
    if start[0] <= 0.0:
        raise ValueError("chart radius must be positive")
    if t_end == 0.0:
        return Trajectory(np.array([0.0]), np.array([start]), 0.0, 0, 0.0, crossings=0)

    pot = ham.potential
    e0 = ham.reduced_value(start[0], start[1], start[2:])
    n = n_steps if n_steps is not None else max(128, int(abs(t_end) / 0.01))
    while True:
        dt = t_end / n
        r, p = start[0], start[1]
        x3, xi3 = (start[2], start[3]) if axial else (0.0, 0.0)
        stride = max(1, n // n_samples)
        times, states = [0.0], [start]
        crossings = 0
        drift = 0.0
        for k in range(n):
            p -= 0.5 * dt * float(pot.deriv(r))
            r_new = r + dt * 2.0 * p
            if r_new == 0.0 or (r_new < 0.0) != (r < 0.0):
                crossings += 1
            r = r_new
            p -= 0.5 * dt * float(pot.deriv(r))
            if axial:
                x3 += dt * 2.0 * xi3
            if (k + 1) % stride == 0 or k == n - 1:
                rc, pc = (r, p) if r >= 0.0 else (-r, -p)
                state = (rc, pc, x3, xi3) if axial else (rc, pc)
                times.append((k + 1) * dt)
                states.append(state)
                drift = max(drift, abs(ham.reduced_value(rc, pc, state[2:]) - e0))
        if drift <= tol or n_steps is not None:
            return Trajectory(np.asarray(times), np.asarray(states), dt, n, drift,
                              crossings=crossings)
        if 2 * n > max_steps:
            raise StepSizeError(
                f"energy drift {drift:.2e} > tol {tol:.2e} at max steps {max_steps}"
            )
        n *= 2


def _orbit_quad(pot, e: float, r_lo: float, r_hi: float, integrand) -> float:
    """Integrate integrand(r) over [r_lo, r_hi] with r = r_t -/+ s^2
    substitutions at the endpoints where V0 = E (turning points)."""
    mid = 0.5 * (r_lo + r_hi)
    total = 0.0
    lo_is_turning = r_lo > 0.0
    pieces = []
    if lo_is_turning:
        pieces.append(("left", 0.0, math.sqrt(mid - r_lo)))
    else:
        pieces.append(("plain", r_lo, mid))
    pieces.append(("right", 0.0, math.sqrt(r_hi - mid)))
    for kind, a, b in pieces:
        x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        w = 0.5 * (b - a) * _GL_WEIGHTS
        if kind == "plain":
            vals = np.array([integrand(r) for r in x])
        elif kind == "left":
            vals = np.array([2.0 * s * integrand(r_lo + s * s) for s in x])
        else:
            vals = np.array([2.0 * s * integrand(r_hi - s * s) for s in x])
        total += float(w @ vals)
    return total


@dataclass(frozen=True)
class OrbitData:
    """Primitive reduced periodic orbit at a fixed energy."""

    energy: float
    period: float
    action: float
    interval: tuple          # radial component (r_lo, r_hi)
    crosses_seam: bool
    dT_dE: float
    monodromy: np.ndarray | None = None

    @property
    def nondegenerate(self) -> bool:
        """Generalized 1-eigenspace of the chart monodromy has dim <= 2,
        automatic for a two-dimensional reduced space."""
        if self.monodromy is None:
            return True
        m = self.monodromy - np.eye(2)
        return int(2 - np.linalg.matrix_rank(m @ m, tol=1e-10)) <= 2

    @property
    def isochronous(self) -> bool:
        return abs(self.dT_dE) < 1e-7 * max(1.0, self.period)


def period_action(ham: HamiltonianModel, energy: float, component: int = 0):
    """Primitive period and action of the reduced orbit at the given energy.

    T(E) = int dr / sqrt(E - V0) over the allowed radial component (out and
    back), S(E) = 2 int sqrt(E - V0) dr; a component touching r = 0 is the
    seam-crossing family, whose loop already runs 0 -> r_+ -> 0 once.
    """
    pot = ham.potential
    pot.check_window_noncritical(energy, energy)
    intervals = pot.allowed_intervals(energy)
    r_lo, r_hi = intervals[component]
    period = _orbit_quad(pot, energy, r_lo, r_hi,
                         lambda r: 1.0 / math.sqrt(max(energy - float(pot.value(r)), 1e-300)))
    action = 2.0 * _orbit_quad(pot, energy, r_lo, r_hi,
                               lambda r: math.sqrt(max(energy - float(pot.value(r)), 0.0)))
    return period, action


def _tangent_flow(pot, r0: float, p0: float, t_end: float, n_steps: int):
    """Even-extension Verlet together with its exact discrete tangent map."""
    dt = t_end / n_steps
    r, p = r0, p0
    m = np.eye(2)
    crossings = 0
    for _ in range(n_steps):
        # kick
        vpp = float(pot.second(r))
        p -= 0.5 * dt * float(pot.deriv(r))
        m = np.array([[1.0, 0.0], [-0.5 * dt * vpp, 1.0]]) @ m
        # drift
        r_new = r + dt * 2.0 * p
        if (r_new < 0.0) != (r < 0.0):
            crossings += 1
        r = r_new
        m = np.array([[1.0, dt * 2.0], [0.0, 1.0]]) @ m
        # kick
        vpp = float(pot.second(r))
        p -= 0.5 * dt * float(pot.deriv(r))
        m = np.array([[1.0, 0.0], [-0.5 * dt * vpp, 1.0]]) @ m
    return (r, p), m, crossings


def reduced_monodromy(ham: HamiltonianModel, energy: float, component: int = 0,
                      n_steps: int = 32768) -> np.ndarray:
    """Chart monodromy of the primitive reduced orbit: the even-extension
    tangent map over one period times (-I)^crossings for the identification."""
    pot = ham.potential
    period, _ = period_action(ham, energy, component)
    r_lo, r_hi = pot.allowed_intervals(energy)[component]
    (rT, pT), m, crossings = _tangent_flow(pot, r_hi, 0.0, period, n_steps)
    if crossings % 2 == 1:
        m = -m
    return m


def orbit_data(ham: HamiltonianModel, energy: float, component: int = 0,
               with_monodromy: bool = True, de: float = 1e-6) -> OrbitData:
    period, action = period_action(ham, energy, component)
    t_hi, _ = period_action(ham, energy + de, component)
    t_lo, _ = period_action(ham, energy - de, component)
    dt_de = (t_hi - t_lo) / (2.0 * de)
    interval = ham.potential.allowed_intervals(energy)[component]
    mono = reduced_monodromy(ham, energy, component) if with_monodromy else None
    return OrbitData(energy, period, action, interval, interval[0] == 0.0, dt_de, mono)


def is_nondegenerate(orbit: OrbitData, t0: float) -> bool:
    """Nondegeneracy of the orbit at a period t0 = k T: in the 2D reduced
    space the generalized 1-eigenspace never exceeds dimension 2."""
    k = t0 / orbit.period
    if abs(k - round(k)) > 1e-6 * max(1.0, abs(k)):
        raise ValueError(f"t0={t0} is not a multiple of the primitive period {orbit.period}")
    if orbit.monodromy is None:
        return True
    mk = np.linalg.matrix_power(orbit.monodromy, abs(int(round(k))))
    a = (mk - np.eye(2)) @ (mk - np.eye(2))
    return int(2 - np.linalg.matrix_rank(a, tol=1e-10)) <= 2


@dataclass(frozen=True)
class PeriodEntry:
    """One element of the reduced period set, tagged with its orbit."""

    time: float
    repetition: int
    action: float
    orbit: OrbitData


def reduced_period_set(ham: HamiltonianModel, energy: float, t_max: float,
                       with_monodromy: bool = False) -> list:
    """All periods {k T(E) : 0 < |k T| <= t_max} of reduced orbits at E,
    sorted by time, each carrying S(k T) = k S(T)."""
    entries = []
    n_components = len(ham.potential.allowed_intervals(energy))
    for c in range(n_components):
        orb = orbit_data(ham, energy, c, with_monodromy=with_monodromy)
        k = 1
        while k * orb.period <= t_max:
            for sign in (1, -1):
                entries.append(PeriodEntry(sign * k * orb.period, sign * k,
                                           sign * k * orb.action, orb))
            k += 1
    return sorted(entries, key=lambda e: e.time)
