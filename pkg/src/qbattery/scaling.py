"""Parameter sweeps over ``(N_B, N)`` and log-log power-law fits of ``P_max``."""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dicke import InitialState, ModelParams
from .dynamics import DEFAULT_SAMPLES, charge
from .errors import ConvergenceError, DomainError

RULES = ("n=N", "n=NB", "explicit")


@dataclass(frozen=True)
class SweepRow:
    N_B: int
    N: int
    n0: int
    m0: int
    E_max: float
    P_max: float
    t_at_Pmax: float
    rule: str = "explicit"
    error: str = ""

    @property
    def ok(self):
        return not self.error


@dataclass(frozen=True)
class ScalingFit:
    alpha: float
    beta: float
    residual: float
    fit_range: tuple
    N: int
    rows_used: int
    excluded: int = 0


def initial_state(rule, N_B, N, m0=0, n0=None) -> InitialState:
    """Initial ``|m0, n0>`` for a sweep cell.

    ``n=N`` fully excites the bath, ``n=NB`` puts ``N_B`` excitations in it,
    ``explicit`` uses ``n0`` as given.
    """
    if rule == "n=N":
        return InitialState(m0, N)
    if rule == "n=NB":
        return InitialState(m0, N_B)
    if rule == "explicit":
        if n0 is None:
            raise DomainError("rule 'explicit' needs n0")
        return InitialState(m0, n0)
    raise DomainError(f"unknown initial rule {rule!r}; expected one of {RULES}")


def _sweep_cell(args):
    template, N_B, N, rule, m0, n0, horizon, samples, refine = args
    n_guess = {"n=N": N, "n=NB": N_B}.get(rule, n0 if n0 is not None else -1)
    try:
        params = dataclasses.replace(template, N_B=N_B, N=N)
        init = initial_state(rule, N_B, N, m0, n0).validate(params)
        s = charge(params, init, horizon=horizon, samples=samples, refine=refine)
    except (DomainError, ConvergenceError) as exc:
        nan = float("nan")
        return SweepRow(N_B, N, n_guess, m0, nan, nan, nan, rule, str(exc) or type(exc).__name__)
    return SweepRow(N_B, N, init.n, init.m, s.E_max, s.P_max, s.t_at_Pmax, rule)


def sweep(template: ModelParams, NB_list, N_list, rule="n=N", m0=0, n0=None,
          horizon=None, samples=DEFAULT_SAMPLES, refine=None, jobs=1):
    """One :class:`SweepRow` per ``(N_B, N)``, ordered with ``N`` outer.

    A cell that fails validation or diagonalization is returned with its
    ``error`` set and NaN values instead of aborting the sweep.  ``jobs > 1``
    evaluates cells in worker processes; row order is unaffected.
    """
    if rule not in RULES:
        raise DomainError(f"unknown initial rule {rule!r}; expected one of {RULES}")
    cells = [
        (template, int(nb), int(n), rule, m0, n0, horizon, samples, refine)
        for n in N_list for nb in NB_list
    ]
    if jobs is None or jobs == 0:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(cells) < 2:
        return [_sweep_cell(c) for c in cells]
    chunksize = max(1, len(cells) // (8 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_cell, cells, chunksize=chunksize))


def fit_power_law(rows, range=None, N=None, post_kink=False) -> ScalingFit:
    """Fit ``log P_max = alpha log N_B + log beta`` by ordinary least squares.

    Parameters
    ----------
    rows : iterable of SweepRow
    range : (lo, hi), optional
        Inclusive ``N_B`` window; all rows when omitted.
    N : int, optional
        Bath size to select; required when ``rows`` mix several ``N``.
    post_kink : bool
        Keep only rows with ``N_B > N`` (past the energy saturation).

    Raises
    ------
    DomainError
        Fewer than three usable rows, or a non-positive ``P_max``.
    """
    rows = list(rows)
    if N is None:
        Ns = {r.N for r in rows}
        if len(Ns) != 1:
            raise DomainError(f"rows cover several N values {sorted(Ns)}; pass N")
        N = Ns.pop()
    rows = [r for r in rows if r.N == N]
    if range is not None:
        lo, hi = range
        rows = [r for r in rows if lo <= r.N_B <= hi]
    if post_kink:
        rows = [r for r in rows if r.N_B > N]
    usable = [r for r in rows if r.ok]
    excluded = len(rows) - len(usable)
    if len(usable) < 3:
        raise DomainError(f"need at least 3 usable rows, got {len(usable)}")
    P = np.array([r.P_max for r in usable], dtype=np.float64)
    if not np.all(P > 0):
        raise DomainError("P_max must be positive for a log-log fit")
    x = np.log(np.array([r.N_B for r in usable], dtype=np.float64))
    y = np.log(P)
    alpha, intercept = np.polyfit(x, y, 1)
    resid = y - (alpha * x + intercept)
    nb = [r.N_B for r in usable]
    return ScalingFit(
        alpha=float(alpha),
        beta=float(math.exp(intercept)),
        residual=float(np.sqrt(np.mean(resid**2))),
        fit_range=(min(nb), max(nb)) if range is None else (range[0], range[1]),
        N=int(N),
        rows_used=len(usable),
        excluded=excluded,
    )
