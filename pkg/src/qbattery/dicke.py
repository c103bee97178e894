"""Collective-spin bookkeeping in the Dicke basis.

A battery of ``N_B`` central spins and a bath of ``N`` spins are each kept in
their symmetric (maximal total spin) manifold.  Basis states are labelled by
occupation numbers ``|m, n>`` with ``m`` flipped battery spins and ``n``
flipped bath spins.  The flip-flop coupling only moves one excitation between
the two, so ``K = m + n`` is conserved and the Hilbert space splits into
independent excitation sectors.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _require_int(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return int(value)


def b_coeff(L, k):
    """Squared ladder matrix element ``k (L - k + 1)``.

    ``J- |k> = sqrt(b(L, k)) |k-1>`` and ``J+ |k> = sqrt(b(L, k+1)) |k+1>``
    for a collective spin built from ``L`` spin-1/2 particles.  The edge values
    ``k = 0`` and ``k = L + 1`` vanish.

    Parameters
    ----------
    L : int
        Number of spins in the collective spin.
    k : int
        Occupation label, ``0 <= k <= L + 1``.

    Returns
    -------
    float
    """
    L = _require_int("L", L)
    k = _require_int("k", k)
    if L < 0:
        raise DomainError(f"L must be non-negative, got {L}")
    if not 0 <= k <= L + 1:
        raise DomainError(f"k={k} outside [0, {L + 1}]")
    # exact integer product, converted once
    return float(k * (L - k + 1))


@dataclass(frozen=True)
class ModelParams:
    """Couplings and sizes of the battery/charger Hamiltonian.

    ``H = B S^z + h J^z + A (S+ J- + S- J+) + 2 delta S^z J^z``
    with ``S`` the battery collective spin (``N_B`` spins) and ``J`` the bath
    collective spin (``N`` spins).
    """

    A: float = 1.0
    B: float = 1.0
    h: float = 1.0
    delta: float = 0.0
    N_B: int = 1
    N: int = 1

    def __post_init__(self):
        for name in ("A", "B", "h", "delta"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("N_B", "N"):
            value = _require_int(name, getattr(self, name))
            if value < 1:
                raise DomainError(f"{name} must be >= 1, got {value}")
            object.__setattr__(self, name, value)

    @property
    def full_dim(self):
        return (self.N_B + 1) * (self.N + 1)


@dataclass(frozen=True)
class InitialState:
    """Product state ``|m>_B |n>_C`` with ``m`` battery and ``n`` bath excitations."""

    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "m", _require_int("m", self.m))
        object.__setattr__(self, "n", _require_int("n", self.n))

    def validate(self, params: ModelParams) -> "InitialState":
        if not 0 <= self.m <= params.N_B:
            raise DomainError(f"m={self.m} outside [0, N_B={params.N_B}]")
        if not 0 <= self.n <= params.N:
            raise DomainError(f"n={self.n} outside [0, N={params.N}]")
        return self

    @property
    def K(self):
        return self.m + self.n


@dataclass(frozen=True)
class ExcitationSector:
    """Basis ``|m, K - m>`` for ``m_min <= m <= m_max`` at fixed total excitation K.

    Basis index ``i`` corresponds to ``m = m_min + i``.
    """

    K: int
    m_min: int
    m_max: int
    dim: int
    params: ModelParams

    def m_values(self):
        return np.arange(self.m_min, self.m_max + 1)

    def n_values(self):
        return self.K - self.m_values()

    def index_of(self, m, n=None):
        if n is not None and m + n != self.K:
            raise DomainError(f"|{m}, {n}> is not in sector K={self.K}")
        if not self.m_min <= m <= self.m_max:
            raise DomainError(
                f"m={m} outside sector K={self.K} range [{self.m_min}, {self.m_max}]"
            )
        return m - self.m_min


def build_sector(params: ModelParams, K) -> ExcitationSector:
    """Excitation sector ``K`` of ``params``; valid for ``0 <= K <= N_B + N``."""
    K = _require_int("K", K)
    if not 0 <= K <= params.N_B + params.N:
        raise DomainError(f"K={K} outside [0, {params.N_B + params.N}]")
    m_min = max(0, K - params.N)
    m_max = min(params.N_B, K)
    return ExcitationSector(K, m_min, m_max, m_max - m_min + 1, params)


def sector_of(params: ModelParams, initial: InitialState) -> ExcitationSector:
    initial.validate(params)
    return build_sector(params, initial.K)


def optimal_bath_occupations(N):
    """Occupations ``n`` in ``[1, N]`` that maximize ``b(N, n)``.

    Two values for even ``N`` (``N/2`` and ``N/2 + 1``), one for odd ``N``.
    """
    N = _require_int("N", N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    lo, hi = (N + 1) // 2, (N + 2) // 2
    return (lo,) if lo == hi else (lo, hi)
