"""Problem cost models and cost-to-phase maps.

Work strings are read most-significant bit first: for ``n`` work qubits,
bit ``l`` of the printed string ``y_0 y_1 ... y_{n-1}`` is
``(x >> (n - 1 - l)) & 1`` and selects element ``l`` (or vertex ``l``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .state import PhaseTable, reduce_phase


class InstanceError(ValueError):
    """Malformed or unsupported problem instance."""


def work_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` 0/1 matrix; column ``l`` is string position ``l`` (MSB first)."""
    x = np.arange(1 << n)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    return (x >> shifts) & 1


def bit_at(x: int, position: int, n: int) -> int:
    return (int(x) >> (n - 1 - position)) & 1


@dataclass(frozen=True)
class SubsetSumInstance:
    elements: tuple[float, ...]
    target: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(float(s) for s in self.elements))
        if len(self.elements) < 1:
            raise InstanceError("subset-sum needs at least one element")

    @property
    def n(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Graph:
    vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        if self.vertices < 1:
            raise InstanceError("graph needs at least one vertex")
        seen = set()
        norm = []
        for edge in self.edges:
            if len(edge) == 2:
                j, l, w = edge[0], edge[1], 1.0
            elif len(edge) == 3:
                j, l, w = edge
            else:
                raise InstanceError(f"edge {edge!r} must be [j, l] or [j, l, w]")
            j, l, w = int(j), int(l), float(w)
            if j == l:
                raise InstanceError(f"self-loop on vertex {j}")
            if not (0 <= j < self.vertices and 0 <= l < self.vertices):
                raise InstanceError(f"edge ({j}, {l}) references a missing vertex")
            if not w > 0:
                raise InstanceError(f"edge ({j}, {l}) weight must be positive, got {w}")
            key = (min(j, l), max(j, l))
            if key in seen:
                raise InstanceError(f"duplicate edge {key}")
            seen.add(key)
            norm.append((j, l, w))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


@dataclass
class DiagonalHamiltonian:
    diag: np.ndarray

    def __post_init__(self) -> None:
        self.diag = np.asarray(self.diag, dtype=float)
        size = self.diag.size
        if self.diag.ndim != 1 or size < 2 or size & (size - 1):
            raise InstanceError(f"diagonal length {size} is not a power of two >= 2")
        if not np.all(np.isfinite(self.diag)):
            raise InstanceError("diagonal entries must be finite")

    @property
    def n_work(self) -> int:
        return self.diag.size.bit_length() - 1


# --- costs -----------------------------------------------------------------


def subset_sum_cost(inst: SubsetSumInstance, x: int) -> float:
    n = inst.n
    if not 0 <= x < (1 << n):
        raise ValueError(f"work value {x} out of range for {n} bits")
    return float(sum(s for l, s in enumerate(inst.elements) if bit_at(x, l, n)))


def maxcut_cost(g: Graph, x: int, n_work: int | None = None) -> float:
    """Total weight of edges whose endpoints fall on opposite sides of the cut."""
    n = g.vertices if n_work is None else n_work
    if n != g.vertices:
        raise ValueError(f"register has {n} qubits but graph has {g.vertices} vertices")
    if not 0 <= x < (1 << n):
        raise ValueError(f"work value {x} out of range for {n} bits")
    return float(sum(w for j, l, w in g.edges if bit_at(x, j, n) != bit_at(x, l, n)))


def subset_sum_hamiltonian(inst: SubsetSumInstance) -> DiagonalHamiltonian:
    return DiagonalHamiltonian(work_bits(inst.n) @ np.asarray(inst.elements))


def maxcut_hamiltonian(g: Graph) -> DiagonalHamiltonian:
    bits = work_bits(g.vertices)
    diag = np.zeros(1 << g.vertices)
    for j, l, w in g.edges:
        diag += w * (bits[:, j] != bits[:, l])
    return DiagonalHamiltonian(diag)


# --- phase maps ------------------------------------------------------------


def linear_phase_map(cost: float, S: float) -> float:
    """``pi * cost / S`` reduced mod 2*pi; odd multiples of ``S`` also land on pi."""
    if S == 0:
        raise ValueError("target S must be non-zero")
    return reduce_phase(math.pi * cost / S)


def triangular_phase_map(cost: float, S: float) -> float:
    """Tent-shaped phase: pi at ``cost == S``, falling linearly to 0 at ``|cost - S| = |S|``.

    Unlike the linear map it never wraps, so costs at ``3S``, ``5S``, ...
    are not marked.
    """
    if S == 0:
        raise ValueError("target S must be non-zero")
    return math.pi * max(0.0, 1.0 - abs(cost - S) / abs(S))


def hamiltonian_phase_map(cost: float, lam: float) -> float:
    if lam == 0:
        raise ValueError("lambda must be non-zero")
    return reduce_phase(math.pi * cost / lam)


PhaseMap = Callable[[float, float], float]

PHASE_MAPS: dict[str, PhaseMap] = {
    "linear": linear_phase_map,
    "triangular": triangular_phase_map,
    "hamiltonian": hamiltonian_phase_map,
}


def _vectorised(name: str, costs: np.ndarray, param: float) -> np.ndarray:
    if param == 0:
        raise ValueError(f"{name} phase map parameter must be non-zero")
    if name in ("linear", "hamiltonian"):
        return np.pi * costs / param
    if name == "triangular":
        return np.pi * np.maximum(0.0, 1.0 - np.abs(costs - param) / abs(param))
    raise KeyError(name)


def build_phase_table(
    costs: Sequence[float], phase_map: str | PhaseMap = "linear", param: float = 1.0
) -> PhaseTable:
    """Apply ``phase_map(cost, param)`` to every cost.

    ``phase_map`` is either a key of :data:`PHASE_MAPS` (evaluated in one
    vectorised pass) or any callable with the same signature.
    """
    costs = np.asarray(costs, dtype=float)
    if isinstance(phase_map, str):
        if phase_map not in PHASE_MAPS:
            raise ValueError(f"unknown phase map {phase_map!r}")
        return PhaseTable(_vectorised(phase_map, costs, param))
    return PhaseTable(np.array([phase_map(float(c), param) for c in costs]))


def marked_table(n: int, marked) -> PhaseTable:
    """Binary Grover oracle: phase pi on ``marked``, 0 elsewhere."""
    phases = np.zeros(1 << n)
    phases[list(marked)] = math.pi
    return PhaseTable(phases)


# --- instance documents ----------------------------------------------------


def parse_instance(doc: dict):
    """Build an instance from its JSON document form.

    Returns a :class:`SubsetSumInstance`, :class:`Graph` or
    :class:`DiagonalHamiltonian` according to ``doc["type"]``.
    """
    if not isinstance(doc, dict) or "type" not in doc:
        raise InstanceError('instance document must be an object with a "type" key')
    kind = doc["type"]
    try:
        if kind == "subset-sum":
            inst = SubsetSumInstance(tuple(doc["elements"]), float(doc["target"]))
            if inst.target == 0:
                raise InstanceError("subset-sum target S must be non-zero")
            return inst
        if kind == "maxcut":
            return Graph(int(doc["vertices"]), tuple(tuple(e) for e in doc.get("edges", [])))
        if kind == "diagonal":
            return DiagonalHamiltonian(np.asarray(doc["diag"], dtype=float))
    except KeyError as exc:
        raise InstanceError(f"{kind} instance is missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"bad {kind} instance: {exc}") from None
    raise InstanceError(f"unknown instance type {kind!r}")


def load_instance(path: str | Path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: invalid JSON ({exc})") from None
    return parse_instance(doc)


def instance_to_doc(inst) -> dict:
    if isinstance(inst, SubsetSumInstance):
        return {"type": "subset-sum", "elements": list(inst.elements), "target": inst.target}
    if isinstance(inst, Graph):
        return {"type": "maxcut", "vertices": inst.vertices,
                "edges": [[j, l, w] for j, l, w in inst.edges]}
    if isinstance(inst, DiagonalHamiltonian):
        return {"type": "diagonal", "diag": inst.diag.tolist()}
    raise TypeError(f"not an instance: {type(inst).__name__}")


def hamiltonian_of(inst) -> DiagonalHamiltonian:
    if isinstance(inst, SubsetSumInstance):
        return subset_sum_hamiltonian(inst)
    if isinstance(inst, Graph):
        return maxcut_hamiltonian(inst)
    if isinstance(inst, DiagonalHamiltonian):
        return inst
    raise TypeError(f"not an instance: {type(inst).__name__}")

