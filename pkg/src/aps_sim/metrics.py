"""Histogram container and Kullback-Leibler divergence against uniform."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np


def format_bits(x: int, n: int) -> str:
    """Render work value ``x`` as an ``n``-character bitstring, MSB first."""
    return format(int(x), f"0{n}b")


@dataclass
class Histogram:
    """Measured distribution over the ``2**n_work`` work strings.

    ``counts`` holds raw shot counts for sampled runs, or the exact
    probabilities (with ``total == 1.0``) in exact mode.
    """

    n_work: int
    counts: np.ndarray
    total: float

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.shape != (1 << self.n_work,):
            raise ValueError(
                f"expected {1 << self.n_work} entries, got {self.counts.shape}"
            )
        if np.any(self.counts < 0):
            raise ValueError("histogram entries must be non-negative")

    @classmethod
    def exact(cls, dist: np.ndarray) -> "Histogram":
        dist = np.asarray(dist, dtype=float)
        n = int(round(math.log2(dist.size)))
        return cls(n, dist.copy(), 1.0)

    @property
    def probabilities(self) -> np.ndarray:
        if self.total <= 0:
            return np.zeros_like(self.counts)
        return self.counts / self.total

    def entries(self) -> dict[str, float]:
        p = self.probabilities
        return {format_bits(x, self.n_work): float(p[x]) for x in range(p.size)}

    def ranked(self) -> list[tuple[str, float]]:
        """(bitstring, probability) pairs by descending probability; ties by index."""
        p = self.probabilities
        order = np.argsort(-p, kind="stable")
        return [(format_bits(x, self.n_work), float(p[x])) for x in order]

    def top(self) -> tuple[int, float]:
        p = self.probabilities
        x = int(np.argmax(p))
        return x, float(p[x])


def kld(p: Iterable[float], q: Iterable[float]) -> float:
    """Natural-log KL divergence ``sum p log(p/q)``; zero-probability terms drop out."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] <= 0):
        raise ValueError("Q must be positive wherever P is positive")
    ps = p[support]
    return float(np.sum(ps * np.log(ps / q[support])))


def kld_vs_uniform(p: Iterable[float]) -> float:
    p = np.asarray(p, dtype=float)
    return kld(p, np.full(p.shape, 1.0 / p.size))


def write_histogram_csv(hist: Histogram, dest: Path | io.TextIOBase) -> None:
    """Write ``bitstring,probability`` rows sorted by descending probability."""
    rows = hist.ranked()
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            _write_rows(fh, rows)
    else:
        _write_rows(dest, rows)


def _write_rows(fh, rows: list[tuple[str, float]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["bitstring", "probability"])
    for bits, prob in rows:
        writer.writerow([bits, repr(prob)])


def read_histogram_csv(src: Path | str) -> Histogram:
    with open(src, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [(r["bitstring"], float(r["probability"])) for r in reader]
    if not rows:
        raise ValueError(f"{src}: no rows")
    n = len(rows[0][0])
    probs = np.zeros(1 << n)
    for bits, prob in rows:
        if len(bits) != n:
            raise ValueError(f"{src}: inconsistent bitstring width {bits!r}")
        probs[int(bits, 2)] = prob
    return Histogram(n, probs, 1.0)
