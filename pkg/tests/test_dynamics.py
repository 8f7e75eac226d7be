"""Flows, periodic orbit quadratures, monodromy, period sets."""

import math

import numpy as np
import pytest

from symred.errors import NoTurningPointError
from symred.groups import apply_symplectic, make_group
from symred.hamiltonians import make_hamiltonian
from symred.dynamics import (
    integrate_full,
    integrate_full_batch,
    integrate_reduced,
    is_nondegenerate,
    orbit_data,
    period_action,
    reduced_monodromy,
    reduced_period_set,
)
from symred.reduction import embed_chart, to_reduced_chart

SO2 = make_group("so2")
SO3 = make_group("so3")
AXIAL = make_group("so2_axial")

HARM = make_hamiltonian(SO2, "harmonic")
ANH = make_hamiltonian(SO2, "anharmonic")
DW = make_hamiltonian(SO2, "double_well", a=1.0)


def test_full_flow_harmonic_period():
    # xdot = 2 xi, xidot = -2x has full period pi
    z0 = np.array([1.0, 0.0, 0.0, 0.0])
    traj = integrate_full(HARM, z0, math.pi, tol=1e-10)
    assert np.allclose(traj.final, z0, atol=1e-8)
    # t = 0 is the identity
    assert np.allclose(integrate_full(HARM, z0, 0.0).final, z0)


def test_full_flow_equivariance():
    rng = np.random.default_rng(4)
    for ham, group in [(HARM, SO2), (make_hamiltonian(SO3, "anharmonic"), SO3)]:
        z0 = rng.normal(size=2 * group.config_dim)
        t = 0.9
        traj = integrate_full(ham, z0, t, tol=1e-10)
        for _ in range(5):
            g = group.random_element(rng)
            moved = integrate_full(ham, apply_symplectic(g, z0), t, tol=1e-10,
                                   n_steps=traj.n_steps)
            assert np.allclose(moved.final, apply_symplectic(g, traj.final), atol=1e-8)


def test_conservation_and_reversibility():
    rng = np.random.default_rng(12)
    z0 = rng.normal(size=(20, 4))
    batch = integrate_full_batch(ANH, z0, 3.0, tol=1e-9)
    assert batch.energy_drift < 1e-9
    # Verlet kicks are radial: the momentum map is conserved to rounding
    assert batch.momentum_drift < 1e-12
    back = integrate_full_batch(ANH, batch.points[-1], -3.0, tol=1e-9,
                                n_steps=batch.n_steps)
    assert np.max(np.abs(back.points[-1] - z0)) < 1e-7


def test_projection_intertwines_flows():
    rng = np.random.default_rng(6)
    for ham, group in [(ANH, SO2), (make_hamiltonian(SO3, "harmonic"), SO3)]:
        n_angles = 2 if group.kind == "so3" else 1
        for _ in range(10):
            r, p = rng.uniform(0.3, 1.2), rng.uniform(-1.0, 1.0)
            angles = tuple(rng.uniform(0.2, 2.8, size=n_angles))
            z0 = embed_chart(group, r, p, angles)
            t = 1.7
            full = integrate_full(ham, z0, t, tol=1e-10)
            red = integrate_reduced(ham, (r, p), t, tol=1e-10, n_steps=full.n_steps)
            chart = to_reduced_chart(group, full.final)
            assert abs(chart.r - red.final[0]) < 1e-7
            assert abs(chart.p - red.final[1]) < 1e-7


def test_reduced_primitive_period_harmonic():
    # reduced orbit closes after pi/2 (full period pi halved by identification)
    traj = integrate_reduced(HARM, (1.0, 0.0), math.pi / 2.0, tol=1e-10)
    assert abs(traj.final[0] - 1.0) < 1e-7
    assert abs(traj.final[1]) < 1e-6
    assert traj.crossings == 1
    assert np.allclose(integrate_reduced(HARM, (0.7, 0.2), 0.0).final, [0.7, 0.2])


def test_period_action_harmonic_pinned():
    # analytic: T = int_0^sqrt(E) dr/sqrt(E - r^2) = pi/2,
    #           S = 2 int_0^sqrt(E) sqrt(E - r^2) dr = pi E / 2
    for e in [0.5, 1.0, 2.3]:
        t, s = period_action(HARM, e)
        assert t == pytest.approx(math.pi / 2.0, rel=1e-10)
        assert s == pytest.approx(math.pi * e / 2.0, rel=1e-10)


def test_action_matches_trajectory_integral():
    # independent oracle: S = int_0^T p qdot dt along a full-space trajectory
    for ham, group, e in [(HARM, SO2, 1.0), (ANH, SO2, 1.5)]:
        t_period, s_quad = period_action(ham, e)
        r0 = ham.potential.allowed_intervals(e)[0][1]  # outer turning radius
        z0 = embed_chart(group, r0, 0.0, (0.4,))
        traj = integrate_full(ham, z0, t_period, tol=1e-12)
        assert traj.action == pytest.approx(s_quad, abs=1e-6)


def test_dS_dE_equals_T():
    de = 1e-5
    for e in np.linspace(1.0, 2.0, 7):
        t, _ = period_action(ANH, e)
        _, s_hi = period_action(ANH, e + de)
        _, s_lo = period_action(ANH, e - de)
        assert (s_hi - s_lo) / (2 * de) == pytest.approx(t, abs=1e-6)


def test_action_additivity_over_repetitions():
    entries = reduced_period_set(ANH, 1.5, t_max=5.0)
    assert entries, "expected at least the primitive period below t_max"
    for e in entries:
        assert e.action == pytest.approx(e.repetition * e.orbit.action, rel=1e-14)
        assert e.time == pytest.approx(e.repetition * e.orbit.period, rel=1e-14)


def test_monodromy_properties():
    for ham, e in [(HARM, 1.0), (ANH, 1.5), (DW, 0.5), (DW, 1.5)]:
        m = reduced_monodromy(ham, e)
        assert abs(np.linalg.det(m) - 1.0) < 1e-8
    # isochronous case: chart monodromy is the identity
    m_h = reduced_monodromy(HARM, 1.0)
    assert np.allclose(m_h, np.eye(2), atol=1e-6)
    # anharmonic: T'(E) != 0 makes the orbit parabolic-degenerate only along
    # the flow; the trace stays 2 but the matrix is not the identity
    m_a = reduced_monodromy(ANH, 1.5)
    assert not np.allclose(m_a, np.eye(2), atol=1e-4)
    # monodromy fixes the flow direction (2 p, -V0'(r)) at the base point
    r_hi = ANH.potential.allowed_intervals(1.5)[0][1]
    flow_dir = np.array([0.0, -float(ANH.potential.deriv(r_hi))])
    assert np.linalg.norm((m_a - np.eye(2)) @ flow_dir) < 1e-5 * np.linalg.norm(flow_dir)


def test_orbit_data_flags():
    orb_h = orbit_data(HARM, 1.0)
    assert orb_h.isochronous and orb_h.crosses_seam
    assert is_nondegenerate(orb_h, 3 * orb_h.period)
    orb_a = orbit_data(ANH, 1.5)
    assert not orb_a.isochronous
    assert orb_a.dT_dE < 0  # anharmonic orbits speed up with energy
    assert is_nondegenerate(orb_a, orb_a.period)
    with pytest.raises(ValueError):
        is_nondegenerate(orb_a, 1.37 * orb_a.period)


def test_double_well_components():
    below = orbit_data(DW, 0.5, with_monodromy=False)
    assert below.interval[0] > 0.0 and not below.crosses_seam
    above = orbit_data(DW, 1.5, with_monodromy=False)
    assert above.interval[0] == 0.0 and above.crosses_seam
    with pytest.raises(NoTurningPointError):
        period_action(DW, -0.5)


def test_reduced_period_set_harmonic():
    entries = reduced_period_set(HARM, 1.0, t_max=5.0)
    times = [e.time for e in entries]
    expected = [-3 * math.pi / 2, -math.pi, -math.pi / 2,
                math.pi / 2, math.pi, 3 * math.pi / 2]
    assert np.allclose(times, expected, atol=1e-10)
    assert reduced_period_set(HARM, 1.0, t_max=1.0) == []
    ks = [e.repetition for e in entries]
    assert ks == [-3, -2, -1, 1, 2, 3]


def test_axial_reduced_flow():
    ham = make_hamiltonian(AXIAL, "harmonic")
    # planar block is harmonic, vertical pair is free motion
    traj = integrate_reduced(ham, (1.0, 0.0, 0.0, 0.3), math.pi / 2.0, tol=1e-10)
    assert abs(traj.final[0] - 1.0) < 1e-7
    assert abs(traj.final[2] - 2.0 * 0.3 * math.pi / 2.0) < 1e-9
    assert abs(traj.final[3] - 0.3) < 1e-14
