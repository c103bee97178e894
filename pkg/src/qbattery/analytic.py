"""Closed-form results used as oracles for the exact dynamics.

Covers the single central spin (``N_B = 1``) Rabi solution, the
Tavis-Cummings limit reached by bosonizing both collective spins, the
single-bath-spin (``N = 1``) case, and the universal constants of
``max_x sin(x)^2 / x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._optimize import bisect_root
from .dicke import InitialState, ModelParams, _require_int, b_coeff
from .dynamics import ChargingSummary
from .errors import DomainError


@lru_cache(maxsize=None)
def sinc_sq_max():
    """Maximizer and maximum of ``sin(x)^2 / x`` on ``(0, pi)``.

    A dense scan brackets the peak; the first-order condition
    ``2 x cos x - sin x = 0`` is then solved by bisection inside the bracket.

    Returns
    -------
    (x_star, c_star) : tuple of float
        About ``(1.16556, 0.724611)``.
    """
    xs = np.linspace(0.0, math.pi, 4097)[1:-1]
    k = int(np.argmax(np.sin(xs) ** 2 / xs))
    lo, hi = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, xs.size - 1)])
    x = bisect_root(lambda x: 2.0 * x * math.cos(x) - math.sin(x), lo, hi)
    return x, math.sin(x) ** 2 / x


def rounded_peak_coefficient():
    """``c_star`` rounded to two digits, the coefficient quoted in the literature."""
    return round(sinc_sq_max()[1], 2)


@dataclass(frozen=True)
class SingleSpinRabi:
    delta_n: float
    omega_n: float
    b: float


def _check_single_spin(params, n):
    if params.N_B != 1:
        raise DomainError(f"single-spin formulas need N_B=1, got N_B={params.N_B}")
    n = _require_int("n", n)
    if not 1 <= n <= params.N:
        raise DomainError(f"n={n} outside [1, N={params.N}]")
    return n


def single_spin_rabi(params: ModelParams, n) -> SingleSpinRabi:
    """Detuning and generalized Rabi frequency of the ``N_B = 1`` two-level block."""
    n = _check_single_spin(params, n)
    b = b_coeff(params.N, n)
    delta_n = params.B - params.h + (2 * n - 1 - params.N) * params.delta
    omega_n = math.sqrt(delta_n**2 + 4.0 * b * params.A**2)
    return SingleSpinRabi(delta_n, omega_n, b)


def _transfer_fraction(rabi, A, t):
    # 4 b A^2 / Omega^2 * sin^2(Omega t / 2); zero when the block is degenerate
    if rabi.omega_n == 0.0:
        return 0.0
    return 4.0 * rabi.b * A**2 / rabi.omega_n**2 * math.sin(rabi.omega_n * t / 2) ** 2


def single_spin_amplitudes(params: ModelParams, n, t):
    """Amplitudes on ``|up, n-1>`` and ``|down, n>`` starting from ``|down, n>``.

    The global phase is dropped, so these match the exact state only up to a
    common phase factor.
    """
    r = single_spin_rabi(params, n)
    if r.omega_n == 0.0:
        return 0j, 1 + 0j
    s = math.sin(r.omega_n * t / 2)
    c = math.cos(r.omega_n * t / 2)
    p_up = -1j * (2.0 * math.sqrt(r.b) * params.A / r.omega_n) * s
    p_down = 1j * (r.delta_n / r.omega_n) * s + c
    return p_up, p_down


def single_spin_energies(params: ModelParams, n, t):
    """Battery, charger and interaction energies ``(E_B, E_C, E_I)`` at time ``t``."""
    r = single_spin_rabi(params, n)
    f = _transfer_fraction(r, params.A, t)
    E_B = params.B * (f - 0.5)
    E_C = params.h * ((n - params.N / 2) - f)
    E_I = params.delta * (params.N / 2 - n) - (params.B - params.h) * f
    return E_B, E_C, E_I


def single_spin_delta_energy(params: ModelParams, n, t):
    """Transferred battery energy ``B 4bA^2/Omega^2 sin^2(Omega t/2)``."""
    r = single_spin_rabi(params, n)
    return params.B * _transfer_fraction(r, params.A, t)


def single_spin_summary(params: ModelParams, n) -> ChargingSummary:
    """Exact ``E_max`` and ``P_max`` for ``N_B = 1``, initial ``|down, n>``.

    With ``x = Omega t / 2`` the power is
    ``B (4bA^2/Omega^2)(Omega/2) sin(x)^2 / x``, so the maximization over ``t``
    reduces to :func:`sinc_sq_max`.  At resonance this gives
    ``E_max = B`` at ``pi / (2 A sqrt(b))`` and ``P_max = c* B A sqrt(b)``.
    """
    r = single_spin_rabi(params, n)
    if r.omega_n == 0.0:
        return ChargingSummary(0.0, 0.0, 0.0, 0.0, 0.0, 0)
    amp = params.B * 4.0 * r.b * params.A**2 / r.omega_n**2
    period = 2.0 * math.pi / r.omega_n
    if amp <= 0.0:
        return ChargingSummary(0.0, 0.0, 0.0, 0.0, period, 0)
    x_star, c_star = sinc_sq_max()
    return ChargingSummary(
        E_max=amp,
        t_at_Emax=math.pi / r.omega_n,
        P_max=amp * c_star * r.omega_n / 2.0,
        t_at_Pmax=2.0 * x_star / r.omega_n,
        horizon=period,
        samples=0,
    )


def tau_min(params: ModelParams, n):
    """Resonant full-transfer time ``pi / (2 A sqrt(b(N, n)))``."""
    n = _check_single_spin(params, n)
    return math.pi / (2.0 * abs(params.A) * math.sqrt(b_coeff(params.N, n)))


def _tc_frequency(params):
    return params.A * math.sqrt(params.N_B * params.N)


def tc_energy(params: ModelParams, initial: InitialState, t):
    """Transferred energy ``B (n - m) sin^2(A sqrt(N_B N) t)`` in the bosonized limit."""
    return params.B * (initial.n - initial.m) * math.sin(_tc_frequency(params) * t) ** 2


def tc_f_witness(params: ModelParams, initial: InitialState, t):
    """``<b+b - a+a>(t) = (m - n) cos(2 A sqrt(N_B N) t)``."""
    return (initial.m - initial.n) * math.cos(2.0 * _tc_frequency(params) * t)


def tc_battery_occupation(params: ModelParams, initial: InitialState, t):
    """``<b+b>(t) = (N_tot + F(t)) / 2`` with the conserved ``N_tot = m + n``."""
    return (initial.m + initial.n + tc_f_witness(params, initial, t)) / 2.0


def tc_pmax(params: ModelParams, initial: InitialState):
    """Bosonized-limit maximum power and the time it occurs.

    ``P_max = c* B A sqrt(N_B N) (n - m)`` at ``t = x* / (A sqrt(N_B N))``.
    """
    x_star, c_star = sinc_sq_max()
    g = abs(_tc_frequency(params))
    if g == 0.0:
        return 0.0, 0.0
    return c_star * params.B * g * (initial.n - initial.m), x_star / g


def tc_beta(N, coefficient=None):
    """Prefactor ``beta(N) = c sqrt(N)`` of ``P_max = beta N_B^{3/2}`` (B = A = 1)."""
    if coefficient is None:
        coefficient = sinc_sq_max()[1]
    return coefficient * math.sqrt(N)


def single_bath_summary(params: ModelParams, m):
    """Maximum power for a single bath spin (``N = 1``), initial ``|m, up>``.

    The sector is two-dimensional and resonant, so
    ``P_max = c* B A sqrt(b(N_B, m+1))`` at ``t = x* / (A sqrt(b(N_B, m+1)))``.
    """
    if params.N != 1:
        raise DomainError(f"single-bath formulas need N=1, got N={params.N}")
    m = _require_int("m", m)
    if not 0 <= m <= params.N_B - 1:
        raise DomainError(f"m={m} outside [0, N_B-1={params.N_B - 1}]")
    x_star, c_star = sinc_sq_max()
    g = abs(params.A) * math.sqrt(b_coeff(params.N_B, m + 1))
    if g == 0.0:
        return 0.0, 0.0
    return c_star * params.B * g, x_star / g
