"""Lambda sweeps over a diagonal cost Hamiltonian.

Every grid value of lambda gets its own phase table (phase pi at cost
lambda) and its own search run; eigenvalues show up as local maxima of the
output KLD, with the matching eigenstate as the most probable outcome.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .engine import RunConfig, RunResult, round_half_up, run_aps
from .metrics import format_bits
from .oracles import DiagonalHamiltonian, build_phase_table

POLICIES = ("fixed", "degeneracy-adaptive")
SCAN_PHASE_MAPS = ("auto", "linear", "triangular")
DEFAULT_TOL = 1e-9
DEFAULT_STEP = 0.1
DEFAULT_MIN_PROMINENCE = 0.01


def count_degenerate(H: DiagonalHamiltonian, lam: float, tol: float = DEFAULT_TOL) -> int:
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    return int(np.count_nonzero(np.abs(H.diag - lam) <= tol))


def degeneracy(H: DiagonalHamiltonian, lam: float, tol: float = DEFAULT_TOL) -> int:
    """Basis states with eigenvalue within ``tol`` of ``lam``, floored at 1."""
    return max(count_degenerate(H, lam, tol), 1)


def iteration_candidates(N: int, k: int) -> list[int]:
    if k < 1 or N < k:
        raise ValueError(f"need N >= k >= 1, got N={N}, k={k}")
    r = round_half_up(math.sqrt(N / k))
    return sorted({max(0, r - 1), r, r + 1})


def lambda_grid(lam_min: float, lam_max: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if lam_max < lam_min:
        raise ValueError(f"empty range [{lam_min}, {lam_max}]")
    if lam_min <= 0 <= lam_max:
        raise ValueError(f"range [{lam_min}, {lam_max}] contains lambda = 0")
    count = int(math.floor((lam_max - lam_min) / step + 1e-9)) + 1
    # rounding keeps grid points such as 1.0 exact instead of 0.9999999999999999
    return np.round(lam_min + step * np.arange(count), 12)


@dataclass
class SweepConfig:
    lambda_min: float
    lambda_max: float
    step: float
    base: RunConfig
    policy: str = "degeneracy-adaptive"
    phase_map: str = "auto"
    tol: float = DEFAULT_TOL
    # "work": N = 2**n in sqrt(N/k); "joint": N = 2**(n+m)
    space: str = "work"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.phase_map not in SCAN_PHASE_MAPS:
            raise ValueError(f"phase map must be one of {SCAN_PHASE_MAPS}")
        if self.space not in ("work", "joint"):
            raise ValueError(f"space must be 'work' or 'joint', got {self.space!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        lambda_grid(self.lambda_min, self.lambda_max, self.step)

    def grid(self) -> np.ndarray:
        return lambda_grid(self.lambda_min, self.lambda_max, self.step)


def default_sweep(H: DiagonalHamiltonian, base: RunConfig, **kw) -> SweepConfig:
    """Step 0.1 over ``[0.5, max(diag) + 0.5]``."""
    top = max(float(H.diag.max()), 0.0)
    return SweepConfig(0.5, top + 0.5, DEFAULT_STEP, base, **kw)


def resolve_phase_map(H: DiagonalHamiltonian, sweep: SweepConfig) -> str:
    """Pick the concrete map for ``phase_map="auto"``.

    The linear map also puts phase pi on costs at 3, 5, ... times lambda;
    once some grid lambda can see such a cost, the triangular map is used.
    """
    if sweep.phase_map != "auto":
        return sweep.phase_map
    smallest = float(np.min(np.abs(sweep.grid())))
    reach = float(np.max(np.abs(H.diag)))
    return "triangular" if reach >= 3 * smallest - sweep.tol else "linear"


@dataclass
class SweepRecord:
    lam: float
    kld: float
    iterations: int
    top_state: str
    top_prob: float


@dataclass
class SweepResult:
    records: list[SweepRecord]
    metadata: dict = field(default_factory=dict)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.records])

    @property
    def klds(self) -> np.ndarray:
        return np.array([r.kld for r in self.records])

    def record_at(self, lam: float, atol: float = 1e-9) -> SweepRecord:
        for rec in self.records:
            if abs(rec.lam - lam) <= atol:
                return rec
        raise KeyError(lam)


def _scan_point(H, sweep, map_name, n_space, lam) -> SweepRecord:
    base = sweep.base
    table = build_phase_table(H.diag, "hamiltonian" if map_name == "linear" else map_name, lam)
    if sweep.policy == "fixed":
        candidates = [base.schedule.main_reps]
    else:
        candidates = iteration_candidates(n_space, degeneracy(H, lam, sweep.tol))
    best: RunResult | None = None
    best_reps = 0
    for reps in candidates:
        cfg = replace(base, schedule=replace(base.schedule, main_reps=reps))
        result = run_aps(cfg, table)
        if best is None or result.kld > best.kld:
            best, best_reps = result, reps
    x, p = best.histogram.top()
    return SweepRecord(float(lam), best.kld, best_reps, format_bits(x, H.n_work), p)


def scan_lambda(H: DiagonalHamiltonian, sweep: SweepConfig) -> SweepResult:
    layout = sweep.base.layout
    if H.n_work != layout.n_work:
        raise ValueError(
            f"Hamiltonian acts on {H.n_work} qubits, run layout has {layout.n_work}"
        )
    map_name = resolve_phase_map(H, sweep)
    n_space = layout.n_states if sweep.space == "work" else layout.dim
    grid = sweep.grid()

    def point(lam):
        return _scan_point(H, sweep, map_name, n_space, float(lam))

    if sweep.workers > 1:
        with ThreadPoolExecutor(max_workers=sweep.workers) as pool:
            records = list(pool.map(point, grid))
    else:
        records = [point(lam) for lam in grid]

    metadata = {
        "policy": sweep.policy,
        "phase_map": map_name,
        "phase_map_requested": sweep.phase_map,
        "space": sweep.space,
        "tol": sweep.tol,
        "lambda_min": sweep.lambda_min,
        "lambda_max": sweep.lambda_max,
        "step": sweep.step,
        "n_work": layout.n_work,
        "m_ancilla": layout.m_ancilla,
        "preprocessing_reps": sweep.base.schedule.preprocessing_reps,
        "main_reps": sweep.base.schedule.main_reps,
        "shots": sweep.base.shots,
        "seed": sweep.base.seed,
    }
    return SweepResult(records, metadata)


def find_peaks(result: SweepResult, min_prominence: float = DEFAULT_MIN_PROMINENCE) -> list[float]:
    """Interior lambdas whose KLD beats both neighbours by at least ``min_prominence``."""
    if len(result.records) < 3:
        raise ValueError("peak detection needs at least three sweep records")
    return [result.records[i].lam for i in peak_indices(result.klds, min_prominence)]


def peak_indices(values, min_prominence: float) -> list[int]:
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(1, v.size - 1):
        higher = max(v[i - 1], v[i + 1])
        if v[i] > v[i - 1] and v[i] > v[i + 1] and v[i] - higher >= min_prominence:
            out.append(i)
    return out


def peak_report(H: DiagonalHamiltonian, result: SweepResult, peaks, tol: float = DEFAULT_TOL) -> list[dict]:
    """``{lambda, top_state, degeneracy}`` per peak; degeneracy of the top state's eigenvalue."""
    rows = []
    for lam in peaks:
        rec = result.record_at(lam)
        cost = float(H.diag[int(rec.top_state, 2)])
        rows.append({
            "lambda": rec.lam,
            "top_state": rec.top_state,
            "degeneracy": count_degenerate(H, cost, tol),
        })
    return rows


# --- serialisation ---------------------------------------------------------

CSV_COLUMNS = ("lambda", "kld", "iterations", "top_state", "top_prob")


def write_sweep_csv(result: SweepResult, dest) -> None:
    """Write ``lambda,kld,iterations,top_state,top_prob`` rows to a path or open file."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_sweep_csv(result, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.records:
        writer.writerow([repr(r.lam), repr(r.kld), r.iterations, r.top_state, repr(r.top_prob)])


def read_sweep_csv(path: str | Path) -> SweepResult:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: expected columns {','.join(CSV_COLUMNS)}")
        records = [
            SweepRecord(float(r["lambda"]), float(r["kld"]), int(r["iterations"]),
                        r["top_state"], float(r["top_prob"]))
            for r in reader
        ]
    return SweepResult(records)


def sweep_to_doc(result: SweepResult, peaks: list[dict] | None = None) -> dict:
    doc = {
        "metadata": result.metadata,
        "records": [
            {"lambda": r.lam, "kld": r.kld, "iterations": r.iterations,
             "top_state": r.top_state, "top_prob": r.top_prob}
            for r in result.records
        ],
    }
    if peaks is not None:
        doc["peaks"] = peaks
    return doc


def sweep_from_doc(doc: dict) -> SweepResult:
    records = [
        SweepRecord(float(r["lambda"]), float(r["kld"]), int(r["iterations"]),
                    str(r["top_state"]), float(r["top_prob"]))
        for r in doc["records"]
    ]
    return SweepResult(records, dict(doc.get("metadata", {})))


def write_json(doc: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)

