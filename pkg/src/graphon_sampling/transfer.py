"""Moving sampling sets between graphs of different sizes through [0, 1].

A node set on an N-node graph maps to the union of its cells in [0, 1].
Reading that union against a finer equipartition gives a sampling set on a
larger graph; the removable constants of the two sets are tied together by
the operator distance of the induced step graphons.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graphon import (DEFAULT_QUADRATURE, Graphon, as_step, discretize_gd1,
                      induce_graphon, operator_distance, operator_norm)
from .gsp import Graph
from .intervals import IntervalSet
from .sampling import SamplingSet, lambda_graph, lambda_graphon

FILL_RULES = ("overlap", "index", "random")
BOUND_ATOL = 1e-8
DEFAULT_REFERENCE_RESOLUTION = 1024


class TransferBudgetError(ValueError):
    """The source set does not touch enough cells to supply ``m`` nodes."""

    def __init__(self, requested: int, achievable: int):
        super().__init__(f"requested m={requested} but only {achievable} cells meet the source set")
        self.requested = requested
        self.achievable = achievable


def induce_interval_set(subset: SamplingSet | Sequence[int], n: int) -> IntervalSet:
    """Union of the cells [i/n, (i+1)/n) for the nodes in ``subset``; adjacent cells merge."""
    return IntervalSet.from_cells(subset, n)


def algorithm1_transfer(source: IntervalSet, n_target: int, m: int, fill_rule: str = "overlap",
                        seed=None) -> SamplingSet:
    """Sampling set of size ``m`` on an ``n_target``-node graph from a set in [0, 1].

    Cells of the target equipartition are scanned in index order.  Cells fully
    inside ``source`` are taken until ``m`` are collected; cells that meet
    ``source`` only partially are kept as candidates.  If the scan ends short,
    candidates are added according to ``fill_rule``:

    ``overlap``  largest fraction of the cell inside ``source`` first, ties by index
    ``index``    smallest index first
    ``random``   uniform without replacement, seeded by ``seed``
    """
    if fill_rule not in FILL_RULES:
        raise ValueError(f"unknown fill rule {fill_rule!r}; expected one of {FILL_RULES}")
    if not 0 <= m <= n_target:
        raise ValueError(f"m={m} must be in [0, {n_target}]")
    chosen: list[int] = []
    partial: list[tuple[int, Fraction]] = []
    if m > 0:
        for i in range(n_target):
            lo, hi = Fraction(i, n_target), Fraction(i + 1, n_target)
            if source.contains_interval(lo, hi):
                chosen.append(i)
                if len(chosen) == m:
                    break
            else:
                ov = source.overlap(lo, hi)
                if ov > 0:
                    partial.append((i, ov * n_target))
    missing = m - len(chosen)
    if missing > len(partial):
        raise TransferBudgetError(m, len(chosen) + len(partial))
    if missing > 0:
        if fill_rule == "overlap":
            fill = [i for i, _ in sorted(partial, key=lambda p: (-p[1], p[0]))[:missing]]
        elif fill_rule == "index":
            fill = [i for i, _ in partial[:missing]]
        else:
            rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
            pool = np.array([i for i, _ in partial])
            fill = rng.choice(pool, size=missing, replace=False).tolist()
        chosen.extend(fill)
    return SamplingSet(chosen)


@dataclass(frozen=True)
class BoundReport:
    """Lower/upper sandwich for a removable constant and the quantities behind it.

    ``lower``/``upper`` are θ1/θ2 in the two-graph form.  ``measured`` is the
    removable constant being bounded and ``reference`` the one the bounds are
    built from.  ``mismatch_measure`` is the measure of the symmetric
    difference of the two sets in [0, 1]; the bounds are only guaranteed when
    it is zero.
    """

    lower: float
    upper: float
    measured: float
    reference: float
    distance: float
    norm: float
    scale: float
    mismatch_measure: float
    swapped: "BoundReport | None" = None

    @property
    def theta1(self) -> float:
        return self.lower

    @property
    def theta2(self) -> float:
        return self.upper

    @property
    def hypothesis_holds(self) -> bool:
        return self.mismatch_measure == 0

    def contains(self, atol: float = BOUND_ATOL) -> bool:
        return self.lower - atol <= self.measured <= self.upper + atol

    def to_json(self) -> dict:
        out = asdict(self)
        out["hypothesis_holds"] = self.hypothesis_holds
        out["contains"] = self.contains()
        if self.swapped is not None:
            out["swapped"] = self.swapped.to_json()
        return out


def sandwich(reference: float, distance: float, norm: float, scale: float = 1.0,
             ratio: float = 1.0) -> tuple[float, float]:
    """``(max{0, ratio*ref - scale*d}, min{scale*norm, scale*d + ratio*ref})``."""
    lower = max(0.0, ratio * reference - scale * distance)
    upper = min(scale * norm, scale * distance + ratio * reference)
    return lower, upper


def theta_bounds(g1: Graph, g2: Graph, s2: SamplingSet, s1: SamplingSet | None = None,
                 fill_rule: str = "overlap") -> BoundReport:
    """Two-graph bounds on the removable constant of the complement of ``s1`` in ``g1``.

    With N1, N2 the node counts and d the operator distance of the induced
    graphons::

        θ1 = max{0, (N1/N2) Λ(s2ᶜ) - N1 d}
        θ2 = min{N1 ||T_W1||, N1 d + (N1/N2) Λ(s2ᶜ)}

    If ``s1`` is omitted it is transferred from ``s2`` with
    :func:`algorithm1_transfer` at budget ``round(|s2| N1 / N2)``.  The
    bounds assume both sets induce the same subset of [0, 1]; any mismatch
    is reported rather than raised.
    """
    n1, n2 = g1.n, g2.n
    s2.check(n2)
    image2 = induce_interval_set(s2, n2)
    if s1 is None:
        m1 = round(Fraction(len(s2) * n1, n2))
        s1 = algorithm1_transfer(image2, n1, m1, fill_rule)
    s1.check(n1)
    image1 = induce_interval_set(s1, n1)
    mismatch = float(image1.symmetric_difference_measure(image2))

    w1, w2 = induce_graphon(g1), induce_graphon(g2)
    d = operator_distance(w1, w2)
    norm1, norm2 = operator_norm(w1), operator_norm(w2)
    lam1 = lambda_graph(g1, s1.complement(n1)).value
    lam2 = lambda_graph(g2, s2.complement(n2)).value

    lo, hi = sandwich(lam2, d, norm1, scale=n1, ratio=n1 / n2)
    lo_s, hi_s = sandwich(lam1, d, norm2, scale=n2, ratio=n2 / n1)
    swapped = BoundReport(lo_s, hi_s, lam2, lam1, d, norm2, n2, mismatch)
    return BoundReport(lo, hi, lam1, lam2, d, norm1, n1, mismatch, swapped)


def _as_step_pair(w1: Graphon, w2: Graphon, resolution: int, quadrature: int):
    return as_step(w1, resolution, quadrature), as_step(w2, resolution, quadrature)


def sequence_bounds(w1: Graphon, w2: Graphon, s: IntervalSet,
                    resolution: int = DEFAULT_REFERENCE_RESOLUTION,
                    quadrature: int = DEFAULT_QUADRATURE) -> BoundReport:
    """Two-graphon sandwich for the removable constant of ``sᶜ`` under ``w1``.

    ``max{0, Λ2 - d} <= Λ1 <= min{||T_W1||, d + Λ2}`` with Λi the removable
    constant of the complement of ``s`` under ``wi`` and d the operator
    distance.  Analytic kernels are discretized at ``resolution``.  The
    orientation with the roles exchanged is in ``swapped``.
    """
    comp = s.complement()
    if comp.measure() == 0:
        raise ValueError("the complement of the sampling set has zero measure")
    st1, st2 = _as_step_pair(w1, w2, resolution, quadrature)
    d = operator_distance(st1, st2)
    lam1 = lambda_graphon(st1, comp).value
    lam2 = lambda_graphon(st2, comp).value
    norm1, norm2 = operator_norm(st1), operator_norm(st2)
    lo, hi = sandwich(lam2, d, norm1)
    lo_s, hi_s = sandwich(lam1, d, norm2)
    swapped = BoundReport(lo_s, hi_s, lam2, lam1, d, norm2, 1.0, 0.0)
    return BoundReport(lo, hi, lam1, lam2, d, norm1, 1.0, 0.0, swapped)


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    distance: float
    lam: float
    lam_ref: float
    aligned: bool

    @property
    def gap(self) -> float:
        return abs(self.lam - self.lam_ref)


def convergence_report(w: Graphon, sizes: Sequence[int], s: IntervalSet,
                       reference_resolution: int = DEFAULT_REFERENCE_RESOLUTION,
                       quadrature: int = DEFAULT_QUADRATURE) -> list[ConvergenceRecord]:
    """Removable constants of ``sᶜ`` along the GD1 sequence of ``w``.

    For each N: ``distance`` is the operator distance between the induced
    graphon of the GD1 graph and the reference step approximation of ``w``
    at ``reference_resolution``; ``lam`` and ``lam_ref`` are the removable
    constants of the complement of ``s`` for the two kernels.  ``aligned``
    says whether every endpoint of ``s`` is a cell boundary at that N; if not,
    the partition is refined at the endpoints.
    """
    comp = s.complement()
    if comp.measure() == 0:
        raise ValueError("the complement of the sampling set has zero measure")
    reference = as_step(w, reference_resolution, quadrature)
    lam_ref = lambda_graphon(reference, comp).value
    records = []
    for n in sizes:
        wn = induce_graphon(discretize_gd1(w, int(n), quadrature))
        aligned = all((Fraction(e) * n).denominator == 1 for e in s.endpoints())
        records.append(ConvergenceRecord(
            n=int(n),
            distance=operator_distance(wn, reference),
            lam=lambda_graphon(wn, comp).value,
            lam_ref=lam_ref,
            aligned=aligned,
        ))
    return records


def convergence_to_csv(records: Sequence[ConvergenceRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "d_N", "lambda_N", "lambda_ref", "aligned"])
    for r in records:
        writer.writerow([r.n, f"{r.distance:.17g}", f"{r.lam:.17g}", f"{r.lam_ref:.17g}", int(r.aligned)])
    return buf.getvalue()
