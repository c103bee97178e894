import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qbattery import analytic
from qbattery.dicke import InitialState, ModelParams, b_coeff
from qbattery.dynamics import charge, run
from qbattery.errors import DomainError


def _scan_golden_oracle():
    """Independent route: dense scan of sin^2(x)/x, then golden section."""
    xs = np.linspace(1e-6, math.pi - 1e-6, 200_001)
    k = int(np.argmax(np.sin(xs) ** 2 / xs))
    a, b = xs[k - 1], xs[k + 1]
    f = lambda x: math.sin(x) ** 2 / x
    g = (math.sqrt(5) - 1) / 2
    while b - a > 1e-12:
        c, d = b - g * (b - a), a + g * (b - a)
        if f(c) >= f(d):
            b = d
        else:
            a = c
    x = (a + b) / 2
    return x, f(x)


def test_sinc_sq_max_matches_independent_oracles():
    x_star, c_star = analytic.sinc_sq_max()
    x_ref, c_ref = _scan_golden_oracle()
    assert x_star == pytest.approx(x_ref, abs=1e-7)
    assert c_star == pytest.approx(c_ref, abs=1e-13)
    mpmath.mp.dps = 30
    x_mp = mpmath.findroot(lambda x: mpmath.tan(x) - 2 * x, 1.16)
    assert x_star == pytest.approx(float(x_mp), abs=1e-12)
    assert c_star == pytest.approx(float(mpmath.sin(x_mp) ** 2 / x_mp), abs=1e-14)


def test_sinc_sq_max_values_and_stationarity():
    x, c = analytic.sinc_sq_max()
    assert x == pytest.approx(1.16556, abs=1e-5)
    assert c == pytest.approx(0.724611, abs=1e-6)
    assert abs(2 * math.sin(x) * math.cos(x) * x - math.sin(x) ** 2) < 1e-9
    assert analytic.rounded_peak_coefficient() == 0.72


RES = ModelParams(A=1, B=1, h=1, delta=0, N_B=1, N=10)


def test_amplitudes_initial():
    assert analytic.single_spin_amplitudes(RES, 5, 0.0) == (0j, 1 + 0j)


def test_amplitudes_full_transfer():
    t = math.pi / (2 * math.sqrt(30))
    up, down = analytic.single_spin_amplitudes(RES, 5, t)
    assert abs(up) == pytest.approx(1.0, abs=1e-15)
    assert abs(down) == pytest.approx(0.0, abs=1e-15)


def test_amplitudes_normalized():
    p = ModelParams(A=1, B=5, h=1, delta=5, N_B=1, N=10)
    up, down = analytic.single_spin_amplitudes(p, 5, 0.3)
    assert abs(up) ** 2 + abs(down) ** 2 == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 2),
       st.integers(1, 30).flatmap(lambda N: st.tuples(st.just(N), st.integers(1, N))),
       st.floats(0, 20))
def test_amplitudes_match_two_level_propagator(B, h, delta, A, Nn, t):
    N, n = Nn
    p = ModelParams(A=A, B=B, h=h, delta=delta, N_B=1, N=N)
    b = b_coeff(N, n)
    # basis |down, n>, |up, n-1>; diagonal from B S^z + h J^z + 2 delta S^z J^z
    jz0, jz1 = n - N / 2, n - 1 - N / 2
    H = np.array([
        [-B / 2 + h * jz0 - delta * jz0, math.sqrt(b) * A],
        [math.sqrt(b) * A, B / 2 + h * jz1 + delta * jz1],
    ])
    psi = expm(-1j * H * t) @ np.array([1.0, 0.0])
    up, down = analytic.single_spin_amplitudes(p, n, t)
    ref = np.array([down, up])
    phase = np.vdot(ref, psi)
    phase /= abs(phase)
    np.testing.assert_allclose(psi, phase * ref, atol=1e-10)


def test_single_spin_domain():
    with pytest.raises(DomainError):
        analytic.single_spin_amplitudes(ModelParams(N_B=2, N=4), 1, 0.1)
    with pytest.raises(DomainError):
        analytic.single_spin_energies(RES, 0, 0.1)
    with pytest.raises(DomainError):
        analytic.single_spin_summary(RES, 11)


def test_resonant_interaction_energy_vanishes():
    for t in np.linspace(0, 5, 21):
        assert analytic.single_spin_energies(RES, 5, t)[2] == 0.0
        assert analytic.single_spin_energies(RES, 3, t)[2] == 0.0


def test_ising_half_filling_interaction_energy_vanishes():
    p = ModelParams(A=1, B=1, h=1, delta=5, N_B=1, N=10)
    for t in np.linspace(0, 5, 21):
        assert analytic.single_spin_energies(p, 5, t)[2] == 0.0


params_1 = st.builds(
    ModelParams, A=st.floats(0.01, 2), B=st.floats(-10, 10), h=st.floats(-10, 10),
    delta=st.floats(-10, 10), N_B=st.just(1), N=st.integers(1, 30),
)


@settings(max_examples=60, deadline=None)
@given(params_1, st.floats(0, 1), st.floats(0, 20))
def test_single_spin_energy_identities(p, frac, t):
    n = max(1, round(frac * p.N))
    E_B, E_C, E_I = analytic.single_spin_energies(p, n, t)
    E0 = sum(analytic.single_spin_energies(p, n, 0.0))
    assert E_B + E_C + E_I == pytest.approx(E0, abs=1e-10 * (1 + abs(E0)))
    E_B0 = analytic.single_spin_energies(p, n, 0.0)[0]
    assert E_B - E_B0 == pytest.approx(analytic.single_spin_delta_energy(p, n, t), abs=1e-12)
    up, _ = analytic.single_spin_amplitudes(p, n, t)
    assert p.B * (abs(up) ** 2 - 0.5) == pytest.approx(E_B, abs=1e-12)


def test_single_spin_summary_resonant():
    x_star, c_star = analytic.sinc_sq_max()
    s = analytic.single_spin_summary(RES, 5)
    assert s.E_max == pytest.approx(1.0, abs=1e-15)
    assert s.t_at_Emax == pytest.approx(math.pi / (2 * math.sqrt(30)), rel=1e-15)
    assert analytic.tau_min(RES, 5) == pytest.approx(s.t_at_Emax, rel=1e-15)
    assert s.P_max == pytest.approx(c_star * math.sqrt(30), rel=1e-15)
    assert s.t_at_Pmax == pytest.approx(x_star / math.sqrt(30), rel=1e-15)


@pytest.mark.parametrize("B,h,delta,n", [(5, 1, 0, 5), (5, 1, 5, 5), (1, 1, 5, 2), (2, 3, -1, 7)])
def test_single_spin_summary_detuned_matches_brute_force(B, h, delta, n):
    p = ModelParams(A=1, B=B, h=h, delta=delta, N_B=1, N=10)
    s = analytic.single_spin_summary(p, n)
    omega = analytic.single_spin_rabi(p, n).omega_n
    ts = np.linspace(1e-9, 2 * math.pi / omega, 400_001)
    dE = np.array([analytic.single_spin_delta_energy(p, n, t) for t in ts[::100]])
    assert s.E_max == pytest.approx(dE.max(), rel=1e-6)
    amp = 4 * b_coeff(10, n) / omega**2 * B
    power = amp * np.sin(omega * ts / 2) ** 2 / ts
    assert s.P_max == pytest.approx(power.max(), rel=1e-9)
    assert s.t_at_Pmax == pytest.approx(ts[power.argmax()], abs=2 * (ts[1] - ts[0]))
    assert abs(s.E_max / B) < 1 or (B == h and delta * (2 * n - 1 - 10) == 0)


@pytest.mark.parametrize("N", [9, 10, 11, 30])
def test_fastest_full_transfer_at_maximal_b(N):
    p = ModelParams(A=1, B=1, h=1, delta=0, N_B=1, N=N)
    taus = {n: analytic.tau_min(p, n) for n in range(1, N + 1)}
    best = min(taus.values())
    argmin = {n for n, t in taus.items() if t == best}
    assert math.ceil((N + 1) / 2) in argmin


P_TC = ModelParams(A=1, B=1, h=1, delta=0, N_B=5, N=300)


def test_tc_energy_values():
    init = InitialState(0, 5)
    assert analytic.tc_energy(P_TC, init, 0.0) == 0.0
    t_peak = math.pi / (2 * math.sqrt(5 * 300))
    assert analytic.tc_energy(P_TC, init, t_peak) == pytest.approx(5.0, rel=1e-15)


@pytest.mark.xfail(strict=True, reason="bosonized first peak overshoots exact N_B=5 "
                   "dynamics by ~13%, outside the 5% band the example claims")
def test_tc_energy_against_exact_first_peak():
    init = InitialState(0, 5)
    series = run(P_TC, init)
    dE = series.dE_B
    k = next(i for i in range(1, dE.size - 1) if dE[i] >= dE[i - 1] and dE[i] > dE[i + 1])
    assert dE[k] == pytest.approx(5.0, rel=0.05)


def test_tc_first_peak_overestimates_exact_dynamics():
    init = InitialState(0, 5)
    series = run(P_TC, init)
    dE = series.dE_B
    k = next(i for i in range(1, dE.size - 1) if dE[i] >= dE[i - 1] and dE[i] > dE[i + 1])
    t_tc = math.pi / (2 * math.sqrt(5 * 300))
    assert dE[k] < analytic.tc_energy(P_TC, init, t_tc)
    # same order of magnitude and same time scale
    assert series.times[k] == pytest.approx(t_tc, rel=0.25)


def test_tc_witness():
    init = InitialState(1, 7)
    assert analytic.tc_f_witness(P_TC, init, 0.0) == -6
    rng = np.random.default_rng(0)
    for t in rng.uniform(0, 1, 50):
        occ = analytic.tc_battery_occupation(P_TC, init, t)
        assert P_TC.B * (occ - init.m) == pytest.approx(
            analytic.tc_energy(P_TC, init, t), abs=1e-12)
    init = InitialState(0, 300)
    period = math.pi / math.sqrt(5 * 300)
    ts = np.linspace(0, 3 * period, 301)
    F = np.array([analytic.tc_f_witness(P_TC, init, t) for t in ts])
    assert F.max() <= 300 and F.min() >= -300
    assert analytic.tc_f_witness(P_TC, init, period) == pytest.approx(-300, rel=1e-12)


def test_tc_pmax_values():
    x_star, c_star = analytic.sinc_sq_max()
    p = ModelParams(A=1, B=1, h=1, delta=0, N_B=10, N=100)
    P, t = analytic.tc_pmax(p, InitialState(0, 10))
    assert P == pytest.approx(c_star * 10 * 10**1.5, rel=1e-14)
    assert P == pytest.approx(229.1, abs=0.05)
    assert t == pytest.approx(x_star / math.sqrt(1000), rel=1e-15)
    q = ModelParams(A=1, B=1, h=1, delta=0, N_B=10, N=200)
    assert analytic.tc_pmax(q, InitialState(0, 10))[0] / P == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("N,beta", [(100, 7.2), (200, 10.1823), (300, 12.4708)])
def test_tc_beta_rounded_coefficient(N, beta):
    value = analytic.tc_beta(N, analytic.rounded_peak_coefficient())
    assert float(f"{value:.6g}") == pytest.approx(beta, abs=5e-5)


def test_tc_hp_error_shrinks_with_bath_size():
    errors = []
    for N in (50, 100, 200, 400):
        p = ModelParams(A=1, B=1, h=1, delta=0, N_B=4, N=N)
        init = InitialState(0, 4)
        exact = charge(p, init).P_max
        errors.append(abs(exact - analytic.tc_pmax(p, init)[0]) / analytic.tc_pmax(p, init)[0])
    assert all(b <= a for a, b in zip(errors, errors[1:]))


def test_single_bath_summary():
    x_star, c_star = analytic.sinc_sq_max()
    p = ModelParams(A=1, B=1, h=1, delta=0, N_B=9, N=1)
    P, t = analytic.single_bath_summary(p, 0)
    assert P == pytest.approx(c_star * 3, rel=1e-15)
    assert t == pytest.approx(x_star / 3, rel=1e-15)
    one = ModelParams(A=1, B=1, h=1, delta=0, N_B=1, N=1)
    assert analytic.single_bath_summary(one, 0)[0] == pytest.approx(
        analytic.single_spin_summary(one, 1).P_max, rel=1e-15)


def test_single_bath_matches_exact_dynamics():
    p = ModelParams(A=1, B=1, h=1, delta=0, N_B=25, N=1)
    P, _ = analytic.single_bath_summary(p, 0)
    assert P == pytest.approx(3.623, abs=1e-3)
    assert charge(p, InitialState(0, 1)).P_max == pytest.approx(P, abs=1e-8)


def test_single_bath_domain():
    with pytest.raises(DomainError):
        analytic.single_bath_summary(ModelParams(N_B=3, N=2), 0)
    with pytest.raises(DomainError):
        analytic.single_bath_summary(ModelParams(N_B=3, N=1), 3)
