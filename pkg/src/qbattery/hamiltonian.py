"""Sector Hamiltonian blocks and their eigen-decomposition.

Within sector ``K`` the Hamiltonian is real symmetric tridiagonal in the basis
``|m, K - m>``: the diagonal holds the field and Ising energies and the
flip-flop term couples ``m`` to ``m + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dicke import ExcitationSector, ModelParams, _require_int, b_coeff
from .errors import DomainError
from . import kernels

MAX_QL_ITER = 50


def diagonal_energy(params: ModelParams, m, n) -> float:
    """Energy of the product state ``|m, n>`` under the diagonal terms.

    ``B (m - N_B/2) + h (n - N/2) + 2 delta (m - N_B/2)(n - N/2)``
    """
    m = _require_int("m", m)
    n = _require_int("n", n)
    if not 0 <= m <= params.N_B:
        raise DomainError(f"m={m} outside [0, {params.N_B}]")
    if not 0 <= n <= params.N:
        raise DomainError(f"n={n} outside [0, {params.N}]")
    sz = -params.N_B / 2 + m
    jz = -params.N / 2 + n
    return params.B * sz + params.h * jz + 2 * params.delta * sz * jz


def _readonly(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SectorHamiltonian:
    sector: ExcitationSector
    matrix: np.ndarray

    @property
    def diagonal(self):
        return np.diag(self.matrix).copy()

    @property
    def offdiagonal(self):
        return np.diag(self.matrix, 1).copy()


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sector: ExcitationSector


def coupling_elements(params: ModelParams, sector: ExcitationSector) -> np.ndarray:
    """Flip-flop matrix elements between ``|m, K-m>`` and ``|m+1, K-m-1>``."""
    ms = range(sector.m_min, sector.m_max)
    return np.array(
        [params.A * np.sqrt(b_coeff(params.N_B, m + 1) * b_coeff(params.N, sector.K - m))
         for m in ms],
        dtype=np.float64,
    )


def build_block(params: ModelParams, sector: ExcitationSector) -> SectorHamiltonian:
    if sector.params != params:
        raise DomainError("sector was built for different parameters")
    diag = np.array(
        [diagonal_energy(params, m, sector.K - m) for m in sector.m_values()],
        dtype=np.float64,
    )
    off = coupling_elements(params, sector)
    H = np.diag(diag)
    if off.size:
        idx = np.arange(off.size)
        H[idx, idx + 1] = off
        H[idx + 1, idx] = off
    return SectorHamiltonian(sector, _readonly(H))


def eigendecompose(block: SectorHamiltonian, backend=None) -> EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a sector block.

    Raises
    ------
    ConvergenceError
        If the QL iteration exceeds its per-eigenvalue cap.
    """
    w, z = kernels.tridiagonal_eigh(
        block.diagonal, block.offdiagonal, MAX_QL_ITER, backend=backend
    )
    return EigenDecomposition(_readonly(w), _readonly(z), block.sector)


def sector_eigensystem(params: ModelParams, sector: ExcitationSector, backend=None):
    return eigendecompose(build_block(params, sector), backend=backend)
