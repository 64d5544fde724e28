"""Dense statevector over a joint work + ancilla register.

Basis index convention: ``i = x * 2**m + a`` with ``x`` the work value and
``a`` the ancilla value, so every work value owns one contiguous block of
``2**m`` amplitudes.  All primitives return a new :class:`StateVector`; the
input is never mutated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .metrics import Histogram

TWO_PI = 2.0 * math.pi
DEFAULT_MAX_QUBITS = 26
MAX_QUBITS_ENV = "APS_SIM_MAX_QUBITS"


class DimensionError(ValueError):
    """Register would exceed the configured qubit cap."""


def max_qubits() -> int:
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DimensionError(f"{MAX_QUBITS_ENV}={raw!r} is not an integer") from exc
    if cap < 1:
        raise DimensionError(f"{MAX_QUBITS_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class RegisterLayout:
    n_work: int
    m_ancilla: int = 0
    cap: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n_work < 1:
            raise ValueError(f"n_work must be >= 1, got {self.n_work}")
        if self.m_ancilla < 0:
            raise ValueError(f"m_ancilla must be >= 0, got {self.m_ancilla}")
        cap = self.cap if self.cap is not None else max_qubits()
        if self.n_work + self.m_ancilla > cap:
            raise DimensionError(
                f"{self.n_work}+{self.m_ancilla} qubits exceeds the cap of {cap}"
            )

    @property
    def n_states(self) -> int:
        return 1 << self.n_work

    @property
    def block(self) -> int:
        return 1 << self.m_ancilla

    @property
    def dim(self) -> int:
        return 1 << (self.n_work + self.m_ancilla)

    def index(self, x: int, a: int) -> int:
        return x * self.block + a


@dataclass
class StateVector:
    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.layout.dim,):
            raise ValueError(
                f"expected {self.layout.dim} amplitudes, got shape {self.amps.shape}"
            )

    def blocks(self) -> np.ndarray:
        """View of the amplitudes as a ``(2**n, 2**m)`` array indexed ``[x, a]``."""
        return self.amps.reshape(self.layout.n_states, self.layout.block)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def amplitude(self, x: int, a: int) -> complex:
        return complex(self.amps[self.layout.index(x, a)])

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amps.copy())


@dataclass
class PhaseTable:
    """One phase per work basis state, stored reduced into ``[0, 2*pi)``."""

    phases: np.ndarray

    def __post_init__(self) -> None:
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 1:
            raise ValueError("phase table must be one-dimensional")
        n = phases.size.bit_length() - 1
        if phases.size == 0 or (1 << n) != phases.size:
            raise ValueError(f"phase table length {phases.size} is not a power of two")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phase table entries must be finite")
        self.phases = reduce_phase(phases)

    @property
    def n_work(self) -> int:
        return self.phases.size.bit_length() - 1

    def __len__(self) -> int:
        return self.phases.size

    def factors(self) -> np.ndarray:
        return np.exp(1j * self.phases)


def reduce_phase(phi):
    """Reduce phases into ``[0, 2*pi)``; guards the rounding case ``mod -> 2*pi``."""
    r = np.mod(phi, TWO_PI)
    r = np.where(r >= TWO_PI, 0.0, r)
    if np.ndim(r) == 0:
        return float(r)
    return r


def init_uniform(layout: RegisterLayout) -> StateVector:
    amps = np.full(layout.dim, 1.0 / math.sqrt(layout.dim), dtype=complex)
    return StateVector(layout, amps)


def _check_table(state: StateVector, table: PhaseTable) -> None:
    if len(table) != state.layout.n_states:
        raise ValueError(
            f"phase table has {len(table)} entries, register needs {state.layout.n_states}"
        )


def apply_phase_oracle(state: StateVector, table: PhaseTable) -> StateVector:
    """Multiply every amplitude ``(x, a)`` by ``exp(i*phi[x])``."""
    _check_table(state, table)
    out = state.copy()
    out.blocks()[...] *= table.factors()[:, None]
    return out


def apply_controlled_phase_oracle(state: StateVector, table: PhaseTable) -> StateVector:
    """Phase oracle acting only on the all-ones ancilla slice ``a = 2**m - 1``."""
    if state.layout.m_ancilla < 1:
        raise ValueError("controlled oracle needs m_ancilla >= 1; use apply_phase_oracle")
    _check_table(state, table)
    out = state.copy()
    out.blocks()[:, -1] *= table.factors()
    return out


def apply_local_diffusion(state: StateVector) -> StateVector:
    """Reflect each work block about its own mean, ``I (x) (2|+><+| - I)``."""
    if state.layout.m_ancilla < 2:
        raise ValueError("local diffusion needs at least two ancilla qubits")
    blocks = state.blocks()
    mean = blocks.mean(axis=1, keepdims=True)
    out = 2.0 * mean - blocks
    return StateVector(state.layout, out.reshape(-1))


def apply_global_diffusion(state: StateVector) -> StateVector:
    mean = state.amps.mean()
    return StateVector(state.layout, 2.0 * mean - state.amps)


def marginal_work_distribution(state: StateVector) -> np.ndarray:
    """Ancilla-traced probabilities ``P(x) = sum_a |amp(x, a)|**2``."""
    b = state.blocks()
    return (b.real**2 + b.imag**2).sum(axis=1)


def sample(dist, shots: int, seed: int | None = None) -> Histogram:
    """Multinomial measurement; ``shots == 0`` returns the exact distribution."""
    dist = np.asarray(dist, dtype=float)
    if np.any(dist < 0):
        raise ValueError("distribution has negative entries")
    if shots < 0:
        raise ValueError(f"shots must be >= 0, got {shots}")
    total = dist.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"distribution sums to {total}, expected 1")
    if shots == 0:
        return Histogram.exact(dist)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, dist / total)
    n = dist.size.bit_length() - 1
    return Histogram(n, counts, float(shots))
