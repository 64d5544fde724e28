"""Approximate phase search driver and the textbook Grover baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .metrics import Histogram, kld_vs_uniform
from .oracles import marked_table
from .state import (
    PhaseTable,
    RegisterLayout,
    StateVector,
    apply_controlled_phase_oracle,
    apply_global_diffusion,
    apply_local_diffusion,
    apply_phase_oracle,
    init_uniform,
    marginal_work_distribution,
    sample,
)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Schedule:
    preprocessing_reps: int
    main_reps: int

    def __post_init__(self) -> None:
        if self.preprocessing_reps < 0 or self.main_reps < 0:
            raise ValueError(f"repetition counts must be >= 0, got {self}")


@dataclass(frozen=True)
class RunConfig:
    layout: RegisterLayout
    schedule: Schedule
    shots: int = 0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")


def default_schedule(n: int, m: int) -> Schedule:
    """``floor(pi/4 * sqrt(2**m))`` local rounds, ``round(sqrt(2**n))`` global rounds."""
    if m < 2:
        raise ValueError(f"approximate phase search needs m >= 2 ancillae, got {m}")
    return Schedule(
        preprocessing_reps=int(math.floor(math.pi / 4 * math.sqrt(2.0**m))),
        main_reps=round_half_up(math.sqrt(2.0**n)),
    )


def default_config(n: int, m: int | None = None, shots: int = 0, seed: int | None = None) -> RunConfig:
    m = n if m is None else m
    return RunConfig(RegisterLayout(n, m), default_schedule(n, m), shots, seed)


@dataclass
class RunResult:
    state: StateVector
    distribution: np.ndarray
    histogram: Histogram
    config: RunConfig
    # (step label, amplitudes) after every operator; only filled when tracing
    trace: list[tuple[str, np.ndarray]] | None = field(default=None, repr=False)

    def __iter__(self):
        return iter((self.state, self.distribution, self.histogram))

    @property
    def kld(self) -> float:
        return kld_vs_uniform(self.histogram.probabilities)


def _check_aps(config: RunConfig, table: PhaseTable) -> None:
    if config.layout.m_ancilla < 2:
        raise ValueError("approximate phase search needs m_ancilla >= 2")
    if len(table) != config.layout.n_states:
        raise ValueError(
            f"phase table has {len(table)} entries, expected {config.layout.n_states}"
        )


def _preprocess(state, table, reps, trace):
    for k in range(reps):
        state = apply_controlled_phase_oracle(state, table)
        if trace is not None:
            trace.append((f"pre{k}:oracle", state.amps.copy()))
        state = apply_local_diffusion(state)
        if trace is not None:
            trace.append((f"pre{k}:local", state.amps.copy()))
    return state


def run_aps(config: RunConfig, table: PhaseTable, trace: bool = False) -> RunResult:
    """Run the full search and measure the work register.

    Sequence: uniform start, ``preprocessing_reps`` rounds of controlled
    oracle + local diffusion, ``main_reps`` rounds of controlled oracle +
    global diffusion, then marginalise the ancillae and sample.
    """
    _check_aps(config, table)
    steps = [] if trace else None
    state = init_uniform(config.layout)
    state = _preprocess(state, table, config.schedule.preprocessing_reps, steps)
    for k in range(config.schedule.main_reps):
        state = apply_controlled_phase_oracle(state, table)
        if steps is not None:
            steps.append((f"main{k}:oracle", state.amps.copy()))
        state = apply_global_diffusion(state)
        if steps is not None:
            steps.append((f"main{k}:global", state.amps.copy()))
    dist = marginal_work_distribution(state)
    hist = sample(dist, config.shots, config.seed)
    return RunResult(state, dist, hist, config, steps)


def main_rep_candidates(n: int) -> list[int]:
    """``round(sqrt(2**n)) - 1``, ``+0`` and ``+1``, clamped at zero."""
    r = round_half_up(math.sqrt(2.0**n))
    return sorted({max(0, r - 1), r, r + 1})


def search_main_reps(
    config: RunConfig, table: PhaseTable, candidates: Iterable[int] | None = None
) -> RunResult:
    """Run once per candidate main-loop count and keep the highest-KLD result.

    Ties keep the smaller count.  ``candidates`` defaults to
    :func:`main_rep_candidates` for the work register size.
    """
    if candidates is None:
        candidates = main_rep_candidates(config.layout.n_work)
    best = None
    for reps in sorted(set(candidates)):
        cfg = replace(config, schedule=replace(config.schedule, main_reps=reps))
        result = run_aps(cfg, table)
        if best is None or result.kld > best.kld:
            best = result
    if best is None:
        raise ValueError("no candidate iteration counts given")
    return best


def preprocessing_amplitude_check(config: RunConfig, table: PhaseTable) -> float:
    """|amplitude| of ``(x*, all-ones ancilla)`` after the preprocessing loop only.

    ``x*`` is the first work state whose phase is pi.
    """
    _check_aps(config, table)
    hits = np.flatnonzero(np.isclose(table.phases, math.pi, rtol=0, atol=1e-12))
    if hits.size == 0:
        raise ValueError("phase table has no entry equal to pi")
    x_star = int(hits[0])
    state = _preprocess(init_uniform(config.layout), table, config.schedule.preprocessing_reps, None)
    return abs(state.amplitude(x_star, config.layout.block - 1))


def grover_success_probability(n: int, k: int, r: int) -> float:
    """Closed form ``sin**2((2r + 1) * asin(sqrt(k / 2**n)))``."""
    return math.sin((2 * r + 1) * math.asin(math.sqrt(k / 2.0**n))) ** 2


def run_grover_baseline(n: int, marked: Iterable[int], r: int) -> np.ndarray:
    """Exact work distribution after ``r`` plain Grover iterations (no ancillae)."""
    marked = sorted(set(int(x) for x in marked))
    if not marked:
        raise ValueError("at least one marked state is required")
    if marked[0] < 0 or marked[-1] >= (1 << n):
        raise ValueError(f"marked states must lie in [0, {(1 << n) - 1}]")
    if r < 0:
        raise ValueError(f"iteration count must be >= 0, got {r}")
    table = marked_table(n, marked)
    state = init_uniform(RegisterLayout(n, 0))
    for _ in range(r):
        state = apply_phase_oracle(state, table)
        state = apply_global_diffusion(state)
    return marginal_work_distribution(state)
