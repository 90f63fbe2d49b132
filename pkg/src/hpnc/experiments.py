"""Finite-N sweeps and rank experiments.

The beam splitter is fed the Holstein-Primakoff image of the excited-state
mode of the N-particle system, so the two-mode picture of the ensemble and
the optical beam-splitter picture are the same computation here; no separate
N-particle beam-splitter routine exists.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from ._parallel import pmap
from .beam_splitter import (DEFAULT_SCHMIDT_THRESHOLD, BSParams, apply_bs,
                            embed_with_vacuum, schmidt_analysis)
from .criteria import mandel_violation
from .dicke import (atomic_coherent_state, dicke_mandel_violation, hp_embed,
                    spin_squeezing_xi2)
from .errors import InvalidSpec
from .fock import (SingleModeState, StateSpec, coherent_amplitudes,
                   quadrature_variance, state_from_spec)

X_AXIS, Y_AXIS, Z_AXIS = np.eye(3)


@dataclass(frozen=True)
class SweepRecord:
    N: int
    finite_n_value: float
    limit_value: float
    abs_error: float
    runtime_ms: float


@dataclass(frozen=True)
class RankRecord:
    r_input: int
    schmidt_rank: int
    acs_gram_rank: int
    min_singular_value_ratio: float


def _pure_state(spec: StateSpec, dim: int) -> SingleModeState:
    state = state_from_spec(spec, dim)
    if not isinstance(state, SingleModeState):
        raise InvalidSpec(f"{spec.kind} is a mixed state; sweeps need a pure state")
    return state


def _sweep(n_values: Iterable[int], finite: Callable[[int], float], limit: float
           ) -> list[SweepRecord]:
    def point(N: int) -> SweepRecord:
        start = time.perf_counter()
        value = finite(N)
        elapsed = 1e3 * (time.perf_counter() - start)
        return SweepRecord(N, value, limit, abs(value - limit), elapsed)

    return sorted(pmap(point, sorted(set(int(n) for n in n_values))), key=lambda r: r.N)


def sweep_hz_to_mandel(spec: StateSpec, n_values: Sequence[int], dim: int | None = None
                       ) -> list[SweepRecord]:
    """N-normalized spin Mandel margin of the embedded state vs the single-mode margin."""
    dim = min(n_values) + 1 if dim is None else dim
    state = _pure_state(spec, dim)
    limit = mandel_violation(state)
    return _sweep(n_values, lambda N: dicke_mandel_violation(hp_embed(state, N)), limit)


def sweep_xi2_to_squeezing(spec: StateSpec, n_values: Sequence[int], dim: int | None = None
                           ) -> list[SweepRecord]:
    """xi^2 in the fixed (x, y, z) frame vs twice the theta = 0 quadrature variance."""
    dim = min(n_values) + 1 if dim is None else dim
    state = _pure_state(spec, dim)
    limit = 2.0 * quadrature_variance(state, 0.0)
    return _sweep(
        n_values,
        lambda N: spin_squeezing_xi2(hp_embed(state, N), X_AXIS, Y_AXIS, Z_AXIS),
        limit,
    )


def acs_fidelity_sweep(alpha: complex, n_values: Sequence[int]) -> list[SweepRecord]:
    """|<alpha| ACS(N, alpha/sqrt(N))>|^2 with Dicke level k read as Fock level k."""
    alpha = complex(alpha)

    def fidelity(N: int) -> float:
        acs = atomic_coherent_state(N, alpha / math.sqrt(N))
        coh = coherent_amplitudes(alpha, N + 1)
        return float(abs(np.vdot(coh, acs.amplitudes)) ** 2)

    return _sweep(n_values, fidelity, 1.0)


def circle_cat_spec(r: int, radius: float) -> StateSpec:
    comps = [(1.0, radius * np.exp(2j * math.pi * j / r)) for j in range(r)]
    return StateSpec("cat", {"components": comps})


def _numerical_rank(sv: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero(sv > threshold))


def rank_equivalence(r: int, radius: float, params: BSParams, N: int, dim: int,
                     threshold: float = DEFAULT_SCHMIDT_THRESHOLD) -> RankRecord:
    """Schmidt rank of the BS output of an r-component cat vs the rank of its ACS family.

    Components sit at radius * exp(2 pi i j / r). The ACS family is
    |N/2, z_j> with z_j = alpha_j / sqrt(N); its rank is counted from the
    singular values of the (N+1) x r matrix of unit columns.
    """
    if r < 1 or N < r:
        raise InvalidSpec("need r >= 1 and N >= r")
    state = _pure_state(circle_cat_spec(r, radius), dim)
    schmidt = schmidt_analysis(apply_bs(embed_with_vacuum(state), params), threshold)
    alphas = [radius * np.exp(2j * math.pi * j / r) for j in range(r)]
    family = np.stack(
        [atomic_coherent_state(N, a / math.sqrt(N)).amplitudes for a in alphas], axis=1
    )
    gram_sv = np.linalg.svd(family, compute_uv=False)
    ratios = []
    for sv in (schmidt.singular_values, gram_sv):
        ratios.append(sv[r - 1] / sv[0] if sv.size >= r else 0.0)
    return RankRecord(r, schmidt.rank, _numerical_rank(gram_sv, threshold), float(min(ratios)))


def loglog_slope(records: Sequence[SweepRecord]) -> float:
    """Least-squares slope of log(abs_error) against log(N)."""
    n = np.array([rec.N for rec in records], dtype=float)
    err = np.array([rec.abs_error for rec in records], dtype=float)
    if np.any(err <= 0):
        return float("nan")
    return float(np.polyfit(np.log(n), np.log(err), 1)[0])


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.15g}"


def write_records(records, fh, timing: bool = False) -> None:
    """CSV with a header row. ``runtime_ms`` only appears when ``timing`` is set."""
    if not records:
        return
    names = [f.name for f in fields(records[0])]
    if not timing and "runtime_ms" in names:
        names.remove("runtime_ms")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(names)
    for rec in records:
        row = asdict(rec)
        writer.writerow([format_number(row[k]) for k in names])
