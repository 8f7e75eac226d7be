"""Momentum map, chart, reduced volumes and Liouville functionals."""

import math

import numpy as np
import pytest

from symred.errors import DegenerateWindowError, StratumError, ToleranceError
from symred.groups import apply_symplectic, make_group
from symred.hamiltonians import make_hamiltonian
from symred.reduction import (
    chart_volume,
    embed_chart,
    liouville_mass,
    momentum_jacobian,
    momentum_map,
    monte_carlo_volume,
    omega0_residual,
    orbit_dimension_k0,
    orbit_volume,
    reduced_volume,
    to_reduced_chart,
)

SO2 = make_group("so2")
SO3 = make_group("so3")
AXIAL = make_group("so2_axial")
C5 = make_group("cyclic:5")


def test_momentum_map_pinned():
    z = np.array([1.0, 0.0, 0.0, 1.0])
    f = momentum_map(SO2, z)
    assert f.shape == (1,)
    assert f[0] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-14)
    assert np.allclose(momentum_map(SO2, np.zeros(4)), 0.0)
    # colinear (x, xi) lies on the zero level for SO(3)
    z3 = np.concatenate([[1.0, 2.0, -0.5], 3.0 * np.array([1.0, 2.0, -0.5])])
    assert np.allclose(momentum_map(SO3, z3), 0.0, atol=1e-14)


def test_omega0_residual_scaling_and_membership():
    z = np.array([1.0, 0.0, 0.0, 1.0])
    r1 = omega0_residual(SO2, z)
    assert r1 == pytest.approx(1.0 / math.sqrt(2.0))
    for lam in [0.5, 2.0, 3.7]:
        assert omega0_residual(SO2, lam * z) == pytest.approx(lam * lam * r1, rel=1e-12)
    on = embed_chart(SO2, 1.3, -0.4, (0.9,))
    assert omega0_residual(SO2, on) < 1e-14
    assert omega0_residual(C5, np.array([1.0, 2.0, 3.0, 4.0])) == 0.0


def test_momentum_map_norm_group_invariant():
    rng = np.random.default_rng(11)
    for group in [SO2, SO3, AXIAL]:
        z = rng.normal(size=2 * group.config_dim)
        base = omega0_residual(group, z)
        for _ in range(8):
            g = group.random_element(rng)
            assert omega0_residual(group, apply_symplectic(g, z)) == pytest.approx(
                base, rel=1e-10, abs=1e-12
            )


def test_chart_pinned_and_rotation_invariant():
    c = to_reduced_chart(SO2, np.array([2.0, 0.0, 3.0, 0.0]))
    assert (c.r, c.p) == (pytest.approx(2.0), pytest.approx(3.0))
    c2 = to_reduced_chart(SO2, np.array([0.0, 2.0, 0.0, -3.0]))
    assert (c2.r, c2.p) == (pytest.approx(2.0), pytest.approx(-3.0))


def test_chart_energy_match_random_samples():
    rng = np.random.default_rng(5)
    ham2 = make_hamiltonian(SO2, "anharmonic", lam=0.7)
    ham3 = make_hamiltonian(SO3, "harmonic")
    hamax = make_hamiltonian(AXIAL, "harmonic")
    for ham, group in [(ham2, SO2), (ham3, SO3), (hamax, AXIAL)]:
        n_angles = 2 if group.kind == "so3" else 1
        for _ in range(1000):
            r = rng.uniform(0.05, 2.0)
            p = rng.uniform(-2.0, 2.0)
            angles = tuple(rng.uniform(0.1, 3.0, size=n_angles))
            extra = (rng.uniform(-1, 1), rng.uniform(-1, 1)) if group.kind == "so2_axial" else ()
            z = embed_chart(group, r, p, angles, extra)
            c = to_reduced_chart(group, z)
            assert ham.reduced_value(c.r, c.p, c.extra) == pytest.approx(
                ham.value(z), abs=1e-12
            )


def test_chart_invariance_under_action():
    rng = np.random.default_rng(9)
    for group in [SO2, SO3]:
        for _ in range(50):
            r, p = rng.uniform(0.2, 2.0), rng.uniform(-1.5, 1.5)
            angles = (0.3,) if group.kind == "so2" else (0.3, 1.2)
            z = embed_chart(group, r, p, angles)
            g = group.random_element(rng)
            c = to_reduced_chart(group, apply_symplectic(g, z))
            assert c.r == pytest.approx(r, rel=1e-12)
            assert c.p == pytest.approx(p, rel=1e-12, abs=1e-12)


def test_chart_errors():
    with pytest.raises(ToleranceError):
        to_reduced_chart(SO2, np.array([1.0, 0.0, 0.0, 1.0]))  # off the zero level
    with pytest.raises(StratumError):
        to_reduced_chart(SO2, np.array([0.0, 0.0, 1.0, 0.0]))  # x = 0 seam
    with pytest.raises(StratumError):
        to_reduced_chart(AXIAL, np.array([0.0, 0.0, 1.0, 0.0, 0.0, 2.0]))


def test_orbit_dimension():
    assert orbit_dimension_k0(SO3) == 2
    assert orbit_dimension_k0(C5) == 0
    assert orbit_dimension_k0(SO2) == 1
    assert orbit_dimension_k0(AXIAL) == 1


def test_momentum_jacobian_rank_is_k0():
    rng = np.random.default_rng(2)
    for group in [SO2, SO3, AXIAL]:
        r, p = 1.1, 0.4
        angles = (0.8,) if group.kind != "so3" else (0.8, 0.9)
        extra = (0.2, -0.3) if group.kind == "so2_axial" else ()
        z = embed_chart(group, r, p, angles, extra)
        jac = momentum_jacobian(group, z)
        rank = np.linalg.matrix_rank(jac, tol=1e-9)
        assert rank == orbit_dimension_k0(group)


def test_orbit_volume():
    z = embed_chart(SO2, 0.6, 0.8, (0.3,))
    assert orbit_volume(SO2, z) == pytest.approx(2 * math.pi * 1.0, rel=1e-12)
    z3 = embed_chart(SO3, 0.6, 0.8, (0.2, 1.0))
    assert orbit_volume(SO3, z3) == pytest.approx(4 * math.pi * 1.0, rel=1e-12)


def test_reduced_volume_harmonic_pinned():
    ham = make_hamiltonian(SO2, "harmonic")
    res = chart_volume(ham, 1.0, 2.0)
    assert res.value == pytest.approx(math.pi / 2.0, abs=1e-9)
    assert chart_volume(ham, 1.5, 1.5).value == 0.0


def test_reduced_volume_monotone_additive():
    ham = make_hamiltonian(SO2, "anharmonic")
    v12 = chart_volume(ham, 1.0, 2.0).value
    v13 = chart_volume(ham, 1.0, 3.0).value
    v23 = chart_volume(ham, 2.0, 3.0).value
    assert v13 > v12 > 0
    assert v12 + v23 == pytest.approx(v13, abs=1e-8)


def test_monte_carlo_agrees_with_chart():
    ham = make_hamiltonian(SO2, "anharmonic")
    res = reduced_volume(ham, 1.0, 2.0, with_monte_carlo=True, n_samples=40_000,
                         rng=np.random.default_rng(42))
    assert res.monte_carlo is not None
    assert res.consistent(n_sigma=3.0)
    assert res.monte_carlo.error < 0.05 * res.chart.value


def test_monte_carlo_so3():
    ham = make_hamiltonian(SO3, "harmonic")
    res = reduced_volume(ham, 1.0, 2.0, with_monte_carlo=True, n_samples=40_000,
                         rng=np.random.default_rng(1))
    # SO(3) chart volume is the same half-annulus
    assert res.chart.value == pytest.approx(math.pi / 2.0, abs=1e-9)
    assert res.consistent(n_sigma=3.0)


def test_degenerate_window_raises():
    ham = make_hamiltonian(SO2, "double_well", a=1.0)
    with pytest.raises(DegenerateWindowError):
        chart_volume(ham, 0.9, 1.1)  # barrier critical value at E = 1
    hamh = make_hamiltonian(SO2, "harmonic")
    with pytest.raises(DegenerateWindowError):
        chart_volume(hamh, -0.5, 0.5)  # minimum critical value at E = 0


def test_liouville_mass_harmonic_pinned():
    ham = make_hamiltonian(SO2, "harmonic")
    for e in [0.7, 1.0, 1.9]:
        assert liouville_mass(ham, e, method="surface") == pytest.approx(
            math.pi / 2.0, rel=1e-8
        )
        assert liouville_mass(ham, e, method="volume-derivative") == pytest.approx(
            math.pi / 2.0, rel=1e-6
        )
    assert liouville_mass(ham, 1.0, observable=lambda r, p: 0.0) == pytest.approx(0.0, abs=1e-12)


def test_liouville_methods_agree_anharmonic():
    ham = make_hamiltonian(SO2, "anharmonic")
    a = liouville_mass(ham, 1.5, method="volume-derivative")
    b = liouville_mass(ham, 1.5, method="surface")
    assert a == pytest.approx(b, rel=1e-3)


def test_liouville_so3_surface():
    ham = make_hamiltonian(SO3, "harmonic")
    assert liouville_mass(ham, 1.2, method="surface") == pytest.approx(
        math.pi / 2.0, rel=1e-8
    )


def test_volume_rejects_cylinder_and_finite():
    with pytest.raises(ValueError):
        chart_volume(make_hamiltonian(AXIAL, "harmonic"), 1.0, 2.0)
    with pytest.raises(ValueError):
        chart_volume(make_hamiltonian(C5, "harmonic"), 1.0, 2.0)
