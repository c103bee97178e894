"""Unitary charging dynamics inside one excitation sector.

An initial product state ``|m, n>`` evolves under the time-independent
Hamiltonian of sector ``K = m + n``.  Expectation values are taken directly on
the pure state; ``tr[H_B rho_B]`` equals ``<psi|H_B|psi>``, so no partial trace
is formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._optimize import golden_max
from .dicke import ExcitationSector, InitialState, ModelParams, sector_of
from .errors import DomainError
from .hamiltonian import (
    EigenDecomposition,
    coupling_elements,
    sector_eigensystem,
)

DEFAULT_SAMPLES = 4001
HORIZON_PEAKS = 10
REFINE_SCALE = 1e-6
NORM_TOL = 1e-10
PEAK_SLACK = 1e-2
MAX_PEAKS = 8
TIE_RTOL = 1e-9


def _readonly(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


def _same_sector(a: ExcitationSector, b: ExcitationSector):
    return a.K == b.K and a.dim == b.dim and a.params == b.params


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    sector: ExcitationSector

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.sector.dim,):
            raise DomainError(
                f"expected {self.sector.dim} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def basis(cls, sector: ExcitationSector, m):
        amps = np.zeros(sector.dim, dtype=np.complex128)
        amps[sector.index_of(m)] = 1.0
        return cls(amps, sector)

    def norm(self):
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def product_state(params: ModelParams, initial: InitialState) -> StateVector:
    sector = sector_of(params, initial)
    return StateVector.basis(sector, initial.m)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled charging run.

    ``power[0]`` is 0, the ``t -> 0`` limit of ``dE_B / t``.  ``norm`` and the
    initial energies are kept for conservation checks; ``eig`` and ``initial``
    allow re-evaluation between grid points.
    """

    times: np.ndarray
    dE_B: np.ndarray
    E_C: np.ndarray
    E_I: np.ndarray
    power: np.ndarray
    norm: np.ndarray
    E_B0: float
    E_C0: float
    energy0: float
    params: ModelParams = field(repr=False)
    initial: StateVector = field(repr=False)
    eig: EigenDecomposition = field(repr=False)

    @property
    def E_B(self):
        return self.dE_B + self.E_B0

    @property
    def total_energy(self):
        return self.E_B + self.E_C + self.E_I

    def energy_drift(self):
        return float(np.max(np.abs(self.total_energy - self.energy0)))

    def norm_error(self):
        return float(np.max(np.abs(self.norm - 1.0)))


@dataclass(frozen=True)
class ChargingSummary:
    E_max: float
    t_at_Emax: float
    P_max: float
    t_at_Pmax: float
    horizon: float
    samples: int


def evolve(eig: EigenDecomposition, initial: StateVector, t) -> StateVector:
    """``exp(-i H t)`` applied spectrally: ``V exp(-i w t) V^T c``."""
    if not _same_sector(eig.sector, initial.sector):
        raise DomainError(
            f"state lives in sector K={initial.sector.K}, "
            f"propagator in K={eig.sector.K}"
        )
    if t == 0:
        return initial
    V = eig.eigenvectors
    coeffs = V.T @ initial.amplitudes
    psi = V @ (np.exp(-1j * eig.eigenvalues * t) * coeffs)
    return StateVector(psi, initial.sector)


def _observable_weights(params: ModelParams, sector: ExcitationSector):
    sz = sector.m_values() - params.N_B / 2
    jz = sector.n_values() - params.N / 2
    return np.column_stack(
        [params.B * sz, params.h * jz, 2.0 * params.delta * sz * jz]
    ).astype(np.float64)


def observables(state: StateVector, params: ModelParams):
    """Battery, charger and interaction energies ``(E_B, E_C, E_I)`` of a state."""
    c = state.amplitudes
    pop = c.real**2 + c.imag**2
    wb, wc, wi = _observable_weights(params, state.sector).T
    off = coupling_elements(params, state.sector)
    flip_flop = 2.0 * float(np.sum(off * (np.conj(c[:-1]) * c[1:]).real))
    return float(pop @ wb), float(pop @ wc), float(pop @ wi) + flip_flop


def _coupling_scale(params: ModelParams):
    A = abs(params.A) if params.A != 0.0 else 1.0
    return A * math.sqrt(params.N_B * params.N)


def default_horizon(params: ModelParams):
    """Ten bosonized-limit power peak times, ``10 x* / (A sqrt(N_B N))``."""
    from .analytic import sinc_sq_max

    return HORIZON_PEAKS * sinc_sq_max()[0] / _coupling_scale(params)


def default_refine(params: ModelParams):
    return REFINE_SCALE / _coupling_scale(params)


def _series_columns(eig, state, params, times, backend=None):
    coeffs = eig.eigenvectors.T @ state.amplitudes
    weights = _observable_weights(params, eig.sector)
    off = coupling_elements(params, eig.sector)
    out = kernels.sector_expectations(
        eig.eigenvalues, eig.eigenvectors, coeffs.real, coeffs.imag,
        times, weights, off, backend=backend,
    )
    E_B, E_C = out[:, 0], out[:, 1]
    E_I = out[:, 2] + out[:, 3]
    return E_B, E_C, E_I, out[:, 4]


def run(params: ModelParams, initial: InitialState, horizon=None,
        samples=DEFAULT_SAMPLES, backend=None) -> TimeSeries:
    """Evolve ``|m, n>`` on a uniform grid of ``samples`` points over ``[0, horizon]``."""
    if horizon is None:
        horizon = default_horizon(params)
    if not (horizon > 0 and math.isfinite(horizon)):
        raise DomainError(f"horizon must be positive and finite, got {horizon!r}")
    if int(samples) != samples or samples < 2:
        raise DomainError(f"samples must be an integer >= 2, got {samples!r}")
    samples = int(samples)

    state0 = product_state(params, initial)
    eig = sector_eigensystem(params, state0.sector, backend=backend)
    times = np.linspace(0.0, horizon, samples)
    E_B, E_C, E_I, norm = _series_columns(eig, state0, params, times, backend)

    # t = 0 row is the initial state itself
    E_B0, E_C0, E_I0 = observables(state0, params)
    E_B[0], E_C[0], E_I[0], norm[0] = E_B0, E_C0, E_I0, 1.0
    dE_B = E_B - E_B0
    power = np.zeros_like(dE_B)
    power[1:] = dE_B[1:] / times[1:]

    return TimeSeries(
        times=_readonly(times), dE_B=_readonly(dE_B), E_C=_readonly(E_C),
        E_I=_readonly(E_I), power=_readonly(power), norm=_readonly(norm),
        E_B0=E_B0, E_C0=E_C0, energy0=E_B0 + E_C0 + E_I0,
        params=params, initial=state0, eig=eig,
    )


def transferred_energy(series: TimeSeries, t, backend=None):
    """``dE_B`` at arbitrary times, recomputed from the stored eigen-decomposition."""
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    E_B = _series_columns(series.eig, series.initial, series.params, ts, backend)[0]
    dE = E_B - series.E_B0
    return dE if np.ndim(t) else float(dE[0])


def _refine_peak(values, times, f, tol):
    # Refine every local grid maximum close to the top, since equal peaks
    # (e.g. repeated full Rabi transfers) sample differently on the grid.
    # The earliest of the (numerically) tied refined maxima wins.
    top = float(np.max(values))
    if top <= 0.0:
        return 0.0, 0.0
    inner = (values[1:-1] >= values[:-2]) & (values[1:-1] >= values[2:])
    peaks = list(np.flatnonzero(inner) + 1)
    if values[-1] >= values[-2]:
        peaks.append(times.size - 1)
    slack = PEAK_SLACK * top
    peaks = [k for k in peaks if values[k] >= top - slack][:MAX_PEAKS]
    if not peaks:
        peaks = [int(np.argmax(values))]
    best_t, best_v = 0.0, 0.0
    for k in peaks:
        lo = times[k - 1]
        hi = times[min(k + 1, times.size - 1)]
        t, v = golden_max(f, lo, hi, tol, x0=times[k], f0=float(values[k]))
        if v > best_v + TIE_RTOL * max(1.0, abs(best_v)):
            best_t, best_v = t, v
    return best_t, best_v


def summarize(series: TimeSeries, refine=None) -> ChargingSummary:
    """``E_max`` and ``P_max`` with their times.

    The grid maximum of each quantity is refined by golden-section search over
    its neighbouring grid interval until the time bracket is below ``refine``.
    A run that never charges reports zeros at ``t = 0``.
    """
    if series.times.size == 0:
        raise DomainError("empty time series")
    if refine is None:
        refine = default_refine(series.params)

    def dE(t):
        return transferred_energy(series, t)

    def power(t):
        return dE(t) / t if t > 0 else 0.0

    t_E, E_max = _refine_peak(series.dE_B, series.times, dE, refine)
    t_P, P_max = _refine_peak(series.power, series.times, power, refine)
    return ChargingSummary(
        E_max=float(E_max), t_at_Emax=float(t_E),
        P_max=float(P_max), t_at_Pmax=float(t_P),
        horizon=float(series.times[-1]), samples=int(series.times.size),
    )


def charge(params: ModelParams, initial: InitialState, horizon=None,
           samples=DEFAULT_SAMPLES, refine=None, backend=None) -> ChargingSummary:
    """:func:`run` followed by :func:`summarize`."""
    return summarize(run(params, initial, horizon, samples, backend), refine)
