"""Removable-set constants, uniqueness checks and sampling-set selection.

The removable constant of a node set is the operator norm of the shift
restricted to signals supported on the set, i.e. the largest singular value
of the corresponding column block.  Selection routines work on the leading
``k_omega`` eigenvectors (the band block) of a :class:`SpectralBasis`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .graphon import DEFAULT_QUADRATURE, DEFAULT_RESOLUTION, Graphon, as_step
from .graphon_signal import StepSignal
from .gsp import Graph, SpectralBasis
from .intervals import IntervalSet

RANK_RTOL = 1e-10
TIE_RTOL = 1e-12
BRUTE_FORCE_BUDGET = 10**6


@dataclass(frozen=True)
class SamplingSet:
    """Sorted, duplicate-free, 0-based node indices."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int] = ()):
        idx = sorted({int(i) for i in indices})
        if idx and idx[0] < 0:
            raise ValueError("node indices must be nonnegative")
        object.__setattr__(self, "indices", tuple(idx))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i: object) -> bool:
        return i in self.indices

    def check(self, n: int) -> "SamplingSet":
        if self.indices and self.indices[-1] >= n:
            raise ValueError(f"node index {self.indices[-1]} out of range for N={n}")
        return self

    def complement(self, n: int) -> "SamplingSet":
        self.check(n)
        members = set(self.indices)
        return SamplingSet(i for i in range(n) if i not in members)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)

    def to_json(self, one_based: bool = False) -> list[int]:
        return [i + 1 for i in self.indices] if one_based else list(self.indices)

    @classmethod
    def from_json(cls, data: Iterable[int], one_based: bool = False) -> "SamplingSet":
        return cls(int(i) - 1 for i in data) if one_based else cls(data)


@dataclass(frozen=True, eq=False)
class RemovableReport:
    """Removable constant of a set together with a maximizing unit-norm witness.

    For graphs the witness is an N-vector supported on the set; for graphons
    it is a :class:`StepSignal` supported on the interval set.
    """

    subset: SamplingSet | IntervalSet
    value: float
    witness: np.ndarray | StepSignal

    def to_json(self) -> dict:
        if isinstance(self.subset, SamplingSet):
            subset = self.subset.to_json()
            witness = np.asarray(self.witness).tolist()
        else:
            subset = self.subset.to_pairs()
            witness = {"breakpoints": self.witness.breakpoints.tolist(),
                       "values": self.witness.values.tolist()}
        return {"set": subset, "lambda": self.value, "witness": witness}


def _leading_right_singular(block: np.ndarray) -> tuple[float, np.ndarray]:
    _, s, vt = np.linalg.svd(block, full_matrices=False)
    v = vt[0]
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return float(s[0]), v


def lambda_graph(graph: Graph, subset: SamplingSet | Iterable[int]) -> RemovableReport:
    """Removable constant of a node set: sup of ||A x|| / ||x|| over x supported on it."""
    subset = subset if isinstance(subset, SamplingSet) else SamplingSet(subset)
    subset.check(graph.n)
    if not len(subset):
        raise ValueError("the removable constant of an empty set is undefined")
    cols = subset.as_array()
    value, v = _leading_right_singular(graph.adjacency[:, cols])
    witness = np.zeros(graph.n)
    witness[cols] = v
    return RemovableReport(subset, value, witness)


def lambda_graphon(w: Graphon, intervals: IntervalSet, resolution: int = DEFAULT_RESOLUTION,
                   quadrature: int = DEFAULT_QUADRATURE) -> RemovableReport:
    """Removable constant of an interval set for the graphon shift T_W.

    The partition is refined so every interval endpoint is a breakpoint;
    analytic kernels are first discretized at ``resolution`` cells.
    """
    if not intervals or intervals.measure() == 0:
        raise ValueError("the removable constant of an empty interval set is undefined")
    step = as_step(w, resolution, quadrature, extra_breakpoints=intervals.endpoints())
    bp = step.breakpoints
    mids = (bp[:-1] + bp[1:]) / 2
    inside = np.array([float(m) in intervals for m in mids])
    cols = np.flatnonzero(inside)
    value, v = _leading_right_singular(step.weighted_grid()[:, cols])
    cell_values = np.zeros(bp.size - 1)
    cell_values[cols] = v / np.sqrt(step.widths[cols])
    return RemovableReport(intervals, value, StepSignal(bp, cell_values))


def _sigma_min(block: np.ndarray) -> float:
    if block.shape[0] == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[-1])


def is_uniqueness_set(basis: SpectralBasis, subset: SamplingSet | Iterable[int], k_omega: int) -> bool:
    """True iff the band block restricted to the set has full column rank ``k_omega``."""
    subset = subset if isinstance(subset, SamplingSet) else SamplingSet(subset)
    subset.check(basis.n)
    if len(subset) < k_omega:
        return False
    s = np.linalg.svd(basis.band(k_omega)[subset.as_array()], compute_uv=False)
    if s[0] == 0:
        return False
    return int(np.sum(s > RANK_RTOL * s[0])) == k_omega


def greedy_select(basis: SpectralBasis, m: int, k_omega: int) -> SamplingSet:
    """Greedy E-optimal sampling set.

    Nodes are added one at a time, each time choosing the node that maximizes
    the smallest singular value of the row-restricted band block.  Scores
    within a relative 1e-12 of the best count as ties and go to the smallest
    index.
    """
    n = basis.n
    if m > n:
        raise ValueError(f"sample budget m={m} exceeds N={n}")
    if m < k_omega:
        raise ValueError(f"sample budget m={m} is below k_omega={k_omega}")
    band = np.ascontiguousarray(basis.band(k_omega))
    chosen: list[int] = []
    available = np.ones(n, dtype=bool)
    for _ in range(m):
        cands = np.flatnonzero(available)
        rows = band[chosen]
        blocks = np.concatenate(
            [np.broadcast_to(rows, (cands.size,) + rows.shape), band[cands][:, None, :]], axis=1)
        scores = np.linalg.svd(blocks, compute_uv=False)[:, -1]
        best = scores.max()
        pick = cands[np.flatnonzero(scores >= best - TIE_RTOL * max(1.0, best))[0]]
        chosen.append(int(pick))
        available[pick] = False
    return SamplingSet(chosen)


def brute_force_select(basis: SpectralBasis, m: int, k_omega: int) -> SamplingSet:
    """Exhaustive maximizer of the restricted band block's smallest singular value.

    Ties (within relative 1e-12) go to the lexicographically first subset.
    """
    n = basis.n
    if not 1 <= m <= n:
        raise ValueError(f"sample budget m={m} must be in [1, N={n}]")
    if math.comb(n, m) > BRUTE_FORCE_BUDGET:
        raise ValueError(f"C({n},{m}) = {math.comb(n, m)} subsets exceeds the budget of {BRUTE_FORCE_BUDGET}")
    band = basis.band(k_omega)
    best_score, best_set = -1.0, None
    combos = itertools.combinations(range(n), m)
    while True:
        chunk = np.array(list(itertools.islice(combos, 4096)), dtype=int)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, m)
        scores = np.linalg.svd(band[chunk], compute_uv=False)[:, -1]
        top = scores.max()
        i = int(np.flatnonzero(scores >= top - TIE_RTOL * max(1.0, top))[0])
        if scores[i] > best_score + TIE_RTOL * max(1.0, best_score):
            best_score, best_set = float(scores[i]), chunk[i]
    return SamplingSet(best_set)


def selection_score(basis: SpectralBasis, subset: SamplingSet | Iterable[int], k_omega: int) -> float:
    """Smallest singular value of the band block restricted to ``subset``."""
    subset = subset if isinstance(subset, SamplingSet) else SamplingSet(subset)
    return _sigma_min(basis.band(k_omega)[subset.as_array()])


def random_select(n: int, m: int, seed) -> SamplingSet:
    """Uniform random m-subset without replacement, deterministic per seed."""
    if not 0 <= m <= n:
        raise ValueError(f"sample budget m={m} must be in [0, N={n}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SamplingSet(rng.choice(n, size=m, replace=False))
