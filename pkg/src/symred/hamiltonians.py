"""Invariant Hamiltonians H(x, xi) = |xi|^2 + V0(radius) and their catalog.

The radial potentials are even polynomials expressed through W(s) with
s = r^2, so that gradients and Hessians stay smooth through the origin:
V0(r) = W(r^2), grad_x V = 2 W'(|x|^2) x.

For the planar and spherical groups the potential radius is |x|; for the
cylinder catalog it is the planar radius |x'|, which keeps the Hamiltonian
invariant under the axial rotations (level sets are then noncompact in the
vertical direction, so the cylinder runs classical-only suites).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWindowError, NoTurningPointError
from .groups import CYCLIC, SO2, SO2_AXIAL, SO3, GroupModel


@dataclass(frozen=True)
class RadialPotential:
    """Even polynomial radial potential V0(r) = sum_k c_k r^(2k)."""

    pid: str
    w_coeffs: tuple  # coefficients of W(s) = sum w_k s^k, s = r^2
    params: dict = field(default_factory=dict)

    def w(self, s):
        return np.polynomial.polynomial.polyval(s, self.w_coeffs)

    def w1(self, s):
        der = np.polynomial.polynomial.polyder(self.w_coeffs)
        return np.polynomial.polynomial.polyval(s, der)

    def w2(self, s):
        der2 = np.polynomial.polynomial.polyder(self.w_coeffs, 2)
        return np.polynomial.polynomial.polyval(s, der2)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.w(r * r)

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * r * self.w1(r * r)

    def second(self, r):
        r = np.asarray(r, dtype=float)
        s = r * r
        return 2.0 * self.w1(s) + 4.0 * s * self.w2(s)

    def critical_values(self, r_max: float = 10.0, n_scan: int = 20001) -> np.ndarray:
        """Critical values of the reduced Hamiltonian p^2 + V0(r) on the
        half-line chart: V0 at interior zeros of V0' plus V0(0), the
        orbifold point of the antipodal identification."""
        r = np.linspace(0.0, r_max, n_scan)
        dv = self.deriv(r)
        crits = [self.value(0.0)]
        for i in range(1, n_scan - 1):
            if dv[i] == 0.0 or dv[i] * dv[i + 1] < 0.0:
                lo, hi = r[i], r[i + 1]
                for _ in range(80):  # bisection to ~1e-12 * r_max
                    mid = 0.5 * (lo + hi)
                    if self.deriv(lo) * self.deriv(mid) <= 0.0:
                        hi = mid
                    else:
                        lo = mid
                crits.append(float(self.value(0.5 * (lo + hi))))
        return np.unique(np.round(np.asarray(crits), 12))

    def check_window_noncritical(self, e_lo: float, e_hi: float, margin: float = 1e-6):
        crit = self.critical_values(max(10.0, 2.0 * self._radius_bound(e_hi)))
        inside = crit[(crit > e_lo - margin) & (crit < e_hi + margin)]
        if inside.size:
            raise DegenerateWindowError(
                f"window [{e_lo}, {e_hi}] touches critical value(s) {inside.tolist()} "
                f"of the reduced Hamiltonian"
            )

    def _radius_bound(self, energy: float) -> float:
        """A radius beyond which V0 > energy (catalog potentials are confining)."""
        r = 1.0
        for _ in range(200):
            if self.value(r) > energy:
                return r
            r *= 1.5
        raise ValueError(f"potential {self.pid} does not confine below E={energy}")

    def turning_radii(self, energy: float, n_scan: int = 4001) -> list:
        """All roots of V0(r) = energy on (0, r_bound], bisected to ~1e-12."""
        r_hi = self._radius_bound(energy + 1.0)
        # log-spaced fine near the origin plus a linear sweep
        grid = np.unique(np.concatenate([
            [0.0],
            np.geomspace(r_hi * 1e-8, r_hi, n_scan // 2),
            np.linspace(0.0, r_hi, n_scan // 2),
        ]))
        vals = self.value(grid) - energy
        roots = []
        for i in range(len(grid) - 1):
            if vals[i] == 0.0 and grid[i] > 0.0:
                roots.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0.0:
                lo, hi = grid[i], grid[i + 1]
                flo = vals[i]
                for _ in range(90):
                    mid = 0.5 * (lo + hi)
                    fm = float(self.value(mid)) - energy
                    if flo * fm <= 0.0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                roots.append(0.5 * (lo + hi))
        return sorted(set(roots))

    def allowed_intervals(self, energy: float) -> list:
        """Connected components of {r >= 0 : V0(r) < energy}.

        Each component is (r_lo, r_hi); r_lo == 0.0 marks an orbit family
        that crosses the chart seam (the antipodal identification at r = 0).
        Raises NoTurningPointError when the allowed set is empty.
        """
        roots = self.turning_radii(energy)
        edges = [0.0] + roots
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo > 1e-12 and float(self.value(0.5 * (lo + hi))) < energy:
                out.append((lo, hi))
        if not out:
            raise NoTurningPointError(
                f"no classically allowed radii below E={energy} for {self.pid}"
            )
        return out


def make_potential(pid: str, **params) -> RadialPotential:
    """Catalog: harmonic r^2, anharmonic r^2 + lam r^4, double_well (r^2 - a^2)^2."""
    if pid == "harmonic":
        return RadialPotential(pid, (0.0, 1.0))
    if pid == "anharmonic":
        lam = float(params.get("lam", 1.0))
        if lam <= 0:
            raise ValueError("anharmonic coupling lam must be positive")
        return RadialPotential(pid, (0.0, 1.0, lam), {"lam": lam})
    if pid == "double_well":
        a = float(params.get("a", 1.0))
        if a <= 0:
            raise ValueError("double well parameter a must be positive")
        # (s - a^2)^2 = a^4 - 2 a^2 s + s^2
        return RadialPotential(pid, (a ** 4, -2.0 * a * a, 1.0), {"a": a})
    raise ValueError(f"unknown potential id {pid!r}")


@dataclass(frozen=True)
class HamiltonianModel:
    """H(x, xi) = |xi|^2 + V0(radius(x)), invariant under the group action."""

    group: GroupModel
    potential: RadialPotential

    @property
    def config_dim(self) -> int:
        return self.group.config_dim

    def radius(self, x: np.ndarray) -> float:
        if self.group.kind == SO2_AXIAL:
            return float(np.linalg.norm(x[:2]))
        return float(np.linalg.norm(x))

    def value(self, z: np.ndarray) -> float:
        d = self.config_dim
        x, xi = z[:d], z[d:]
        return float(xi @ xi + self.potential.value(self.radius(x)))

    def grad(self, z: np.ndarray) -> np.ndarray:
        """Full phase-space gradient (grad_x V, 2 xi)."""
        d = self.config_dim
        x, xi = np.array(z[:d], dtype=float), z[d:]
        if self.group.kind == SO2_AXIAL:
            gx = np.zeros(d)
            gx[:2] = 2.0 * self.potential.w1(x[0] ** 2 + x[1] ** 2) * x[:2]
        else:
            gx = 2.0 * self.potential.w1(float(x @ x)) * x
        return np.concatenate([gx, 2.0 * np.asarray(xi, dtype=float)])

    def flow_rhs(self, z: np.ndarray) -> np.ndarray:
        """J grad H: xdot = 2 xi, xidot = -grad_x V."""
        d = self.config_dim
        g = self.grad(z)
        return np.concatenate([g[d:], -g[:d]])

    def reduced_value(self, r: float, p: float, extra=()) -> float:
        """Reduced Hamiltonian on the chart: p^2 + V0(r), plus the free
        vertical pair xi3^2 for the cylinder chart (extra = (x3, xi3))."""
        out = p * p + float(self.potential.value(r))
        if self.group.kind == SO2_AXIAL:
            if len(extra) != 2:
                raise ValueError("cylinder chart requires extra = (x3, xi3)")
            out += extra[1] ** 2
        return out


def make_hamiltonian(group: GroupModel, pid: str, **params) -> HamiltonianModel:
    if group.kind == CYCLIC and pid not in ("harmonic", "anharmonic", "double_well"):
        raise ValueError(f"unknown potential id {pid!r}")
    return HamiltonianModel(group, make_potential(pid, **params))
