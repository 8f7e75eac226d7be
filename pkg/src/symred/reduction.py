"""Momentum map, zero level set, reduced charts, volumes and Liouville mass.

The momentum map of the linear symplectic action is the vector of quadratic
first integrals F_A(z) = (1/2) <J M(A) z, z> over the orthonormal generator
basis; its zero level Omega_0 carries the G action, and the quotient chart
used throughout is the half-plane {(r, p) : r > 0} with the antipodal
identification (r, p) ~ (-r, -p) at the seam r = 0.  The Riemannian measure
the quotient inherits from the embedding is exactly dr dp in this chart; the
reduced-volume and Liouville functionals below compute it two independent
ways (chart quadrature, and embedded-surface/Monte-Carlo quadrature weighted
by the inverse orbit volume).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import StratumError, ToleranceError
from .groups import CYCLIC, SO2, SO2_AXIAL, SO3, GroupModel
from .hamiltonians import HamiltonianModel

OMEGA0_TOL = 1e-10  # membership tolerance on the (quadratic) residual


def j_matrix(d: int) -> np.ndarray:
    """Standard symplectic structure [[0, I], [-I, 0]] on R^{2d}."""
    j = np.zeros((2 * d, 2 * d))
    j[:d, d:] = np.eye(d)
    j[d:, :d] = -np.eye(d)
    return j


def symplectic_form(u: np.ndarray, v: np.ndarray) -> float:
    d = len(u) // 2
    return float(u[:d] @ v[d:] - u[d:] @ v[:d])


def m_of_a(a: np.ndarray) -> np.ndarray:
    """Infinitesimal symplectic action M(A) = diag(A, -A^T)."""
    d = a.shape[0]
    m = np.zeros((2 * d, 2 * d))
    m[:d, :d] = a
    m[d:, d:] = -a.T
    return m


def momentum_map(group: GroupModel, z: np.ndarray) -> np.ndarray:
    """Vector of first integrals F_{A_i}(z) = (1/2) <J M(A_i) z, z>."""
    z = np.asarray(z, dtype=float)
    d = group.config_dim
    x, xi = z[:d], z[d:]
    out = np.empty(group.lie_dim)
    for i, a in enumerate(group.generators):
        # J M(A) z = (-A^T xi, -A x) paired with z gives A xi . x - A x . xi
        out[i] = 0.5 * float((a @ xi) @ x - (a @ x) @ xi)
    return out


def momentum_map_batch(group: GroupModel, z: np.ndarray) -> np.ndarray:
    """Momentum map over a batch of phase points, shape (..., 2d) -> (..., p)."""
    z = np.asarray(z, dtype=float)
    d = group.config_dim
    x, xi = z[..., :d], z[..., d:]
    comps = []
    for a in group.generators:
        axi = np.einsum("ij,...j->...i", a, xi)
        ax = np.einsum("ij,...j->...i", a, x)
        comps.append(0.5 * (np.einsum("...i,...i->...", axi, x)
                            - np.einsum("...i,...i->...", ax, xi)))
    if not comps:
        return np.zeros(z.shape[:-1] + (0,))
    return np.stack(comps, axis=-1)


def momentum_jacobian(group: GroupModel, z: np.ndarray) -> np.ndarray:
    """Exact Jacobian of the momentum map; row i is J M(A_i) z (symmetric form)."""
    z = np.asarray(z, dtype=float)
    rows = [j_matrix(group.config_dim) @ m_of_a(a) @ z for a in group.generators]
    return np.asarray(rows).reshape(group.lie_dim, 2 * group.config_dim)


def omega0_residual(group: GroupModel, z: np.ndarray) -> float:
    """Euclidean norm of the momentum map; zero iff z is on Omega_0."""
    if group.lie_dim == 0:
        return 0.0
    return float(np.linalg.norm(momentum_map(group, z)))


def orbit_dimension_k0(group: GroupModel) -> int:
    """Common dimension of group orbits on the regular stratum of Omega_0."""
    return {SO2: 1, SO2_AXIAL: 1, SO3: 2, CYCLIC: 0}[group.kind]


def orbit_volume(group: GroupModel, z: np.ndarray) -> float:
    """Euclidean Riemannian volume of the orbit G(z) in R^{2d}.

    Circles (SO(2) kinds) have length 2 pi times the rotation speed of the
    acted-on components; SO(3) orbits of zero-momentum points are round
    spheres of radius |z|, with area 4 pi |z|^2.
    """
    z = np.asarray(z, dtype=float)
    d = group.config_dim
    x, xi = z[:d], z[d:]
    if group.kind == SO2:
        return 2.0 * math.pi * float(np.linalg.norm(z))
    if group.kind == SO2_AXIAL:
        speed = math.sqrt(x[0] ** 2 + x[1] ** 2 + xi[0] ** 2 + xi[1] ** 2)
        if speed == 0.0:
            raise StratumError("orbit degenerates to a point on the cylinder axis")
        return 2.0 * math.pi * speed
    if group.kind == SO3:
        if omega0_residual(group, z) > OMEGA0_TOL * max(1.0, float(z @ z)):
            raise ValueError("SO(3) orbit volume implemented on Omega_0 only")
        return 4.0 * math.pi * float(z @ z)
    raise ValueError(f"orbit volume undefined for finite group {group.kind}")


@dataclass(frozen=True)
class ChartPoint:
    """Reduced-chart coordinates: radial pair (r, p), plus the invariant
    vertical pair (x3, xi3) for the cylinder chart."""

    r: float
    p: float
    extra: tuple = ()


def to_reduced_chart(group: GroupModel, z: np.ndarray, tol: float = OMEGA0_TOL) -> ChartPoint:
    """Project a zero-momentum point to the chart: r = |x| (|x'| axial),
    p = (xi . x)/|x| signed along the common direction."""
    z = np.asarray(z, dtype=float)
    d = group.config_dim
    res = omega0_residual(group, z)
    if res >= tol * max(1.0, float(z @ z)):
        raise ToleranceError(
            f"momentum residual {res:.3e} >= tol; point is not on the zero level"
        )
    x, xi = z[:d], z[d:]
    if group.kind == SO2_AXIAL:
        xp, xip = x[:2], xi[:2]
        r = float(np.linalg.norm(xp))
        if r <= tol:
            raise StratumError("cylinder chart singular where x' = 0")
        return ChartPoint(r, float(xip @ xp) / r, (float(x[2]), float(xi[2])))
    if group.kind == CYCLIC:
        raise StratumError("finite groups have no half-plane chart (4D orbifold quotient)")
    r = float(np.linalg.norm(x))
    if r <= tol:
        raise StratumError("chart singular where x = 0 (identification seam)")
    return ChartPoint(r, float(xi @ x) / r)


def embed_chart(group: GroupModel, r: float, p: float, angles, extra=()) -> np.ndarray:
    """Embed chart coordinates plus orbit angles back into Omega_0.

    Angles: (theta,) on [0, 2pi) for the SO(2) kinds; (phi, theta) with
    phi in [0, 2pi), theta in [0, pi] for SO(3).
    """
    if group.kind == SO2:
        c, s = math.cos(angles[0]), math.sin(angles[0])
        return np.array([r * c, r * s, p * c, p * s])
    if group.kind == SO3:
        phi, th = angles
        v = np.array([math.sin(th) * math.cos(phi), math.sin(th) * math.sin(phi), math.cos(th)])
        return np.concatenate([r * v, p * v])
    if group.kind == SO2_AXIAL:
        c, s = math.cos(angles[0]), math.sin(angles[0])
        x3, xi3 = extra
        return np.array([r * c, r * s, x3, p * c, p * s, xi3])
    raise ValueError(f"no chart embedding for group kind {group.kind}")


def _angle_domain(group: GroupModel):
    if group.kind == SO3:
        return ((0.0, 2.0 * math.pi), (0.0, math.pi))
    return ((0.0, 2.0 * math.pi),)


def embedding_gram_root(group: GroupModel, r: float, p: float, angles) -> float:
    """sqrt(det(Dpsi^T Dpsi)) of the chart embedding, by finite differences.

    Deliberately numerical: the Monte Carlo volume route must not reuse the
    analytic cancellation between the embedding Jacobian and the orbit
    volume that makes the chart measure equal dr dp.
    """
    coords = np.array([r, p, *angles], dtype=float)

    def emb(c):
        return embed_chart(group, c[0], c[1], c[2:])

    cols = []
    for i in range(len(coords)):
        h = 1e-6 * max(1.0, abs(coords[i]))
        cp, cm = coords.copy(), coords.copy()
        cp[i] += h
        cm[i] -= h
        cols.append((emb(cp) - emb(cm)) / (2.0 * h))
    jac = np.column_stack(cols)
    gram = jac.T @ jac
    det = np.linalg.det(gram)
    return math.sqrt(max(det, 0.0))


@dataclass(frozen=True)
class MethodEstimate:
    value: float
    error: float
    method: str


@dataclass(frozen=True)
class ReducedVolumeResult:
    """Reduced phase-space volume of {H_red in [E1, E2]} by two routes."""

    chart: MethodEstimate
    monte_carlo: MethodEstimate | None = None

    @property
    def value(self) -> float:
        return self.chart.value

    def consistent(self, n_sigma: float = 3.0) -> bool:
        if self.monte_carlo is None:
            return True
        spread = math.hypot(self.chart.error, self.monte_carlo.error)
        return abs(self.chart.value - self.monte_carlo.value) <= n_sigma * max(spread, 1e-300)


def _require_volume_group(group: GroupModel):
    if group.kind == SO2_AXIAL:
        raise ValueError(
            "reduced volume is infinite for the cylinder catalog "
            "(level sets noncompact in the vertical direction)"
        )
    if group.kind == CYCLIC:
        raise ValueError("reduced volume via the half-plane chart needs a continuous group")


def chart_volume(ham: HamiltonianModel, e_lo: float, e_hi: float) -> MethodEstimate:
    """Area of {(r, p): r > 0, E1 <= p^2 + V0(r) <= E2} by 1D quadrature of
    the p-section length 2[sqrt((E2-V)+) - sqrt((E1-V)+)]."""
    _require_volume_group(ham.group)
    if e_hi < e_lo:
        raise ValueError("window must satisfy E1 <= E2")
    pot = ham.potential
    pot.check_window_noncritical(e_lo, e_hi)
    if e_hi == e_lo:
        return MethodEstimate(0.0, 0.0, "chart-quadrature")
    kinks = sorted(set(pot.turning_radii(e_lo) + pot.turning_radii(e_hi)))
    r_top = max(kinks) if kinks else 0.0
    if r_top == 0.0:
        return MethodEstimate(0.0, 0.0, "chart-quadrature")

    def section(r):
        v = float(pot.value(r))
        hi = math.sqrt(max(e_hi - v, 0.0))
        lo = math.sqrt(max(e_lo - v, 0.0))
        return 2.0 * (hi - lo)

    val, err = quad(section, 0.0, r_top, points=kinks, limit=400,
                    epsabs=1e-11, epsrel=1e-11)
    return MethodEstimate(float(val), float(max(err, 1e-14)), "chart-quadrature")


def monte_carlo_volume(ham: HamiltonianModel, e_lo: float, e_hi: float,
                       n_samples: int = 200_000,
                       rng: np.random.Generator | None = None) -> MethodEstimate:
    """Volume by sampling Omega_0 in chart-plus-angle coordinates and
    weighting with (embedding Gram root) / (orbit volume), per the
    fiber-integration identity over the quotient."""
    _require_volume_group(ham.group)
    pot = ham.potential
    pot.check_window_noncritical(e_lo, e_hi)
    if rng is None:
        rng = np.random.default_rng(0)
    group = ham.group
    r_top = max(pot.turning_radii(e_hi)) * 1.02
    v_min = float(np.min(pot.value(np.linspace(0.0, r_top, 2001))))
    p_top = math.sqrt(max(e_hi - v_min, 0.0)) * 1.02
    domains = [(1e-9, r_top), (-p_top, p_top), *_angle_domain(group)]
    widths = np.array([hi - lo for lo, hi in domains])
    box = float(np.prod(widths))
    lows = np.array([lo for lo, _ in domains])
    samples = lows + rng.random((n_samples, len(domains))) * widths
    weights = np.zeros(n_samples)
    for i, c in enumerate(samples):
        r, p = c[0], c[1]
        e = ham.reduced_value(r, p)
        if not (e_lo <= e <= e_hi):
            continue
        z = embed_chart(group, r, p, c[2:])
        weights[i] = embedding_gram_root(group, r, p, c[2:]) / orbit_volume(group, z)
    mean = float(np.mean(weights))
    sigma = float(np.std(weights, ddof=1) / math.sqrt(n_samples))
    return MethodEstimate(box * mean, box * sigma, "omega0-monte-carlo")


def reduced_volume(ham: HamiltonianModel, e_lo: float, e_hi: float,
                   with_monte_carlo: bool = False, n_samples: int = 200_000,
                   rng: np.random.Generator | None = None) -> ReducedVolumeResult:
    chart = chart_volume(ham, e_lo, e_hi)
    mc = monte_carlo_volume(ham, e_lo, e_hi, n_samples, rng) if with_monte_carlo else None
    return ReducedVolumeResult(chart, mc)


def _tangent_projector(group: GroupModel, z: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto T_z Omega_0 = ker DF(z), via SVD with a
    rank threshold (the Jacobian rank is k0 on the regular stratum)."""
    jac = momentum_jacobian(group, z)
    dim = 2 * group.config_dim
    if jac.size == 0:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(jac, full_matrices=True)
    scale = max(float(s[0]), 1e-30)
    keep = [i for i in range(dim) if i >= s.size or s[i] <= 1e-9 * scale]
    basis = vt[keep].T  # columns span ker DF(z)
    q, _ = np.linalg.qr(basis)
    return q @ q.T


def liouville_mass(ham: HamiltonianModel, energy: float, observable=None,
                   method: str = "surface", de: float = 5e-4) -> float:
    """Mass of the Liouville measure d(Sigma_E)/dH on the reduced shell,
    optionally against an observable u(r, p).

    method "volume-derivative": central difference of the chart volume.
    method "surface": quadrature over Sigma_E cap Omega_0 with weights
    1/(orbit volume * |tangential gradient of H|), the fiber-integration
    form of the Liouville measure; tangential projections come from the
    momentum-map Jacobian at embedded points, not from chart identities.
    """
    _require_volume_group(ham.group)
    pot = ham.potential
    pot.check_window_noncritical(energy, energy)
    group = ham.group
    u = observable if observable is not None else (lambda r, p: 1.0)

    if method == "volume-derivative":
        if observable is None:
            lo = chart_volume(ham, energy - de, energy).value
            hi = chart_volume(ham, energy, energy + de).value
            return (lo + hi) / (2.0 * de)
        # thin-window 2D quadrature of the observable
        def inner(r):
            v = float(pot.value(r))
            p_hi = math.sqrt(max(energy + de - v, 0.0))
            p_lo = math.sqrt(max(energy - de - v, 0.0))
            if p_hi <= p_lo:
                return 0.0
            val, _ = quad(lambda p: u(r, p) + u(r, -p), p_lo, p_hi,
                          epsabs=1e-11, epsrel=1e-9, limit=100)
            return val
        r_top = max(pot.turning_radii(energy + de))
        val, _ = quad(inner, 0.0, r_top, limit=400, epsabs=1e-10, epsrel=1e-9,
                      points=sorted(set(pot.turning_radii(energy - de)
                                        + pot.turning_radii(energy + de))))
        return val / (2.0 * de)

    if method != "surface":
        raise ValueError(f"unknown liouville method {method!r}")

    total = 0.0
    theta0 = (0.7,) if group.kind != SO3 else (0.7, 1.1)
    for r_lo, r_hi in pot.allowed_intervals(energy):
        for sign in (+1.0, -1.0):
            def integrand(r):
                v = float(pot.value(r))
                ekin = energy - v
                if ekin <= 0.0:
                    return 0.0
                p = sign * math.sqrt(ekin)
                z = embed_chart(group, r, p, theta0)
                grad = ham.grad(z)
                proj = _tangent_projector(group, z)
                gnorm = float(np.linalg.norm(proj @ grad))
                dpdr = -float(pot.deriv(r)) / (2.0 * p)
                dl = math.sqrt(1.0 + dpdr * dpdr)
                return u(r, p) * dl / gnorm

            # substitution r = r_t -/+ s^2 absorbs the turning singularities
            pieces = []
            mid = 0.5 * (r_lo + r_hi)
            if r_lo > 0.0:
                s_max = math.sqrt(mid - r_lo)
                pieces.append((lambda s, a=r_lo: integrand(a + s * s) * 2.0 * s, 0.0, s_max))
            else:
                pieces.append((integrand, r_lo, mid))
            s_max = math.sqrt(r_hi - mid)
            pieces.append((lambda s, b=r_hi: integrand(b - s * s) * 2.0 * s, 0.0, s_max))
            for f, a, b in pieces:
                val, _ = quad(f, a, b, limit=300, epsabs=1e-11, epsrel=1e-10)
                total += val
    return total
