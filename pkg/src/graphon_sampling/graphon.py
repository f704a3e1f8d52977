"""Graphons: analytic kernels and step kernels on [0, 1]^2.

Step kernels carry a partition of [0, 1] into cells ``[a, b)`` (the last one
closed at 1) and a symmetric grid of cell values.  All spectral quantities of
a step kernel are computed exactly through the width-weighted grid
``B[i, j] = A[i, j] * sqrt(w_i * w_j)``, which is an isometric copy of the
integral operator on L2[0, 1].
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .gsp import Graph

DEFAULT_QUADRATURE = 8
DEFAULT_RESOLUTION = 512
BREAKPOINT_ATOL = 1e-12
_CHUNK_POINTS = 2_000_000


def _mean(u, v):
    return (u + v) / 2


def _quadratic_mean(u, v):
    return (u**2 + v**2) / 2


def _one_minus_max(u, v):
    return 1 - np.maximum(u, v)


def _min_one_minus_max(u, v):
    return np.minimum(u, v) * (1 - np.maximum(u, v))


def _abs_sin(u, v, freq=100.0):
    return np.abs(np.sin(freq * (u * v)))


def _sin_cos(u, v, freq=64.0):
    return np.abs(np.sin(freq * (u * v))) / 2 + np.abs(np.cos(freq * (u * v))) / 2


def _constant(u, v, c=0.5):
    return np.full(np.broadcast(u, v).shape, float(c))


def _product(u, v):
    return u * v


# id -> (kernel, default params, formula)
BUILTIN_GRAPHONS: dict[str, tuple[Callable, dict, str]] = {
    "mean": (_mean, {}, "(u+v)/2"),
    "quadratic_mean": (_quadratic_mean, {}, "(u^2+v^2)/2"),
    "one_minus_max": (_one_minus_max, {}, "1-max(u,v)"),
    "min_one_minus_max": (_min_one_minus_max, {}, "min(u,v)*(1-max(u,v))"),
    "abs_sin": (_abs_sin, {"freq": 100.0}, "|sin(freq*u*v)|"),
    "sin_cos": (_sin_cos, {"freq": 64.0}, "|sin(freq*u*v)|/2+|cos(freq*u*v)|/2"),
    "constant": (_constant, {"c": 0.5}, "c"),
    "product": (_product, {}, "u*v"),
}

# the seven experiment graphons, in the order they are listed for the figures
EXPERIMENT_GRAPHONS: dict[str, tuple[str, dict]] = {
    "W1": ("mean", {}),
    "W2": ("quadratic_mean", {}),
    "W3": ("one_minus_max", {}),
    "W4": ("min_one_minus_max", {}),
    "W5": ("abs_sin", {"freq": 100.0}),
    "W6": ("sin_cos", {"freq": 64.0}),
    "W7": ("sin_cos", {"freq": 10.0}),
}


def uniform_breakpoints(n: int) -> np.ndarray:
    # i / n is correctly rounded, so shared boundaries of nested partitions agree bitwise
    return np.arange(n + 1) / n


def merge_breakpoints(*parts) -> np.ndarray:
    """Sorted union of breakpoint arrays, collapsing points closer than 1e-12."""
    pts = np.sort(np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts] + [[0.0, 1.0]]))
    keep = np.concatenate([[True], np.diff(pts) > BREAKPOINT_ATOL])
    pts = pts[keep]
    pts[0], pts[-1] = 0.0, 1.0
    return pts


def _check_breakpoints(bp: np.ndarray) -> None:
    if bp.ndim != 1 or bp.size < 2:
        raise ValueError("a partition needs at least two breakpoints")
    if bp[0] != 0.0 or bp[-1] != 1.0:
        raise ValueError("breakpoints must start at 0 and end at 1")
    if np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")


def cell_index(breakpoints: np.ndarray, t) -> np.ndarray:
    """Index of the half-open cell containing each point; 1 falls in the last cell."""
    idx = np.searchsorted(breakpoints, t, side="right") - 1
    return np.clip(idx, 0, breakpoints.size - 2)


class AnalyticGraphon:
    """A builtin closed-form kernel with parameters."""

    kind = "analytic"

    def __init__(self, model: str, **params):
        if model not in BUILTIN_GRAPHONS:
            raise KeyError(f"unknown builtin graphon {model!r}; known: {sorted(BUILTIN_GRAPHONS)}")
        fn, defaults, self.formula = BUILTIN_GRAPHONS[model]
        unknown = set(params) - set(defaults)
        if unknown:
            raise TypeError(f"unexpected parameters for {model}: {sorted(unknown)}")
        self.model = model
        self.params = {**defaults, **{k: float(v) for k, v in params.items()}}
        self._fn = fn

    def __call__(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self._fn(u, v, **self.params)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"AnalyticGraphon({self.model!r}{', ' + args if args else ''})"

    def to_config(self) -> dict:
        return {"builtin": self.model, "params": dict(self.params)}


@dataclass(frozen=True, eq=False)
class StepGraphon:
    """Piecewise-constant symmetric kernel on a partition of [0, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray
    kind = "step"

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=float)
        _check_breakpoints(bp)
        n = bp.size - 1
        if vals.shape != (n, n):
            raise ValueError(f"value grid must be {n}x{n} for {n} cells, got {vals.shape}")
        if not np.array_equal(vals, vals.T):
            raise ValueError("value grid must be exactly symmetric")
        if np.any(vals < 0) or np.any(vals > 1):
            raise ValueError("graphon values must lie in [0, 1]")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def is_uniform(self) -> bool:
        return np.array_equal(self.breakpoints, uniform_breakpoints(self.n_cells))

    def __call__(self, u, v) -> np.ndarray:
        i = cell_index(self.breakpoints, np.asarray(u, dtype=float))
        j = cell_index(self.breakpoints, np.asarray(v, dtype=float))
        return self.values[i, j]

    def weighted_grid(self) -> np.ndarray:
        s = np.sqrt(self.widths)
        return self.values * np.outer(s, s)

    def refine(self, breakpoints) -> "StepGraphon":
        """Same kernel expressed on a finer partition (must contain all current breakpoints)."""
        bp = np.asarray(breakpoints, dtype=float)
        _check_breakpoints(bp)
        gaps = np.abs(self.breakpoints[:, None] - bp[None, :]).min(axis=1)
        if np.any(gaps > BREAKPOINT_ATOL):
            raise ValueError(f"new partition drops breakpoints {self.breakpoints[gaps > BREAKPOINT_ATOL].tolist()}")
        old = cell_index(self.breakpoints, (bp[:-1] + bp[1:]) / 2)
        return StepGraphon(bp, self.values[np.ix_(old, old)])

    def to_config(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}


Graphon = AnalyticGraphon | StepGraphon


def builtin(model: str, **params) -> AnalyticGraphon:
    """Construct a builtin graphon by id, or by experiment alias W1..W7."""
    if model in EXPERIMENT_GRAPHONS:
        base, defaults = EXPERIMENT_GRAPHONS[model]
        return AnalyticGraphon(base, **{**defaults, **params})
    return AnalyticGraphon(model, **params)


def constant_graphon(c: float) -> StepGraphon:
    return StepGraphon(np.array([0.0, 1.0]), np.array([[float(c)]]))


def evaluate(graphon: Graphon, u, v):
    """W(u, v) for points in [0, 1]; accepts scalars or broadcastable arrays."""
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    for name, t in (("u", u_arr), ("v", v_arr)):
        if np.any(~np.isfinite(t)) or np.any(t < 0) or np.any(t > 1):
            raise ValueError(f"{name} must lie in [0, 1]")
    out = graphon(u_arr, v_arr)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _cell_averages(kernel: Callable, breakpoints: np.ndarray, q: int) -> np.ndarray:
    """Midpoint-rule averages of ``kernel`` over every cell of a product partition.

    Each cell gets ``q x q`` points.  Only the upper triangle is kept and then
    mirrored, so the result is exactly symmetric.
    """
    n = breakpoints.size - 1
    offsets = (np.arange(q) + 0.5) / q
    pts = (breakpoints[:-1, None] + np.diff(breakpoints)[:, None] * offsets[None, :]).ravel()
    out = np.empty((n, n))
    rows_per_chunk = max(1, _CHUNK_POINTS // (pts.size * q))
    for r0 in range(0, n, rows_per_chunk):
        r1 = min(n, r0 + rows_per_chunk)
        vals = kernel(pts[r0 * q:r1 * q, None], pts[None, :])
        out[r0:r1] = vals.reshape(r1 - r0, q, n, q).mean(axis=(1, 3))
    upper = np.triu(out)
    return upper + np.triu(out, 1).T


def _overlap_matrix(fine: np.ndarray, coarse: np.ndarray) -> np.ndarray:
    """P[i, k] = |fine cell i ∩ coarse cell k|."""
    lo = np.maximum(fine[:-1, None], coarse[None, :-1])
    hi = np.minimum(fine[1:, None], coarse[None, 1:])
    return np.clip(hi - lo, 0.0, None)


def discretize_on(graphon: Graphon, breakpoints, quadrature: int = DEFAULT_QUADRATURE) -> np.ndarray:
    """Cell-average grid of ``graphon`` on an arbitrary partition.

    Step kernels are averaged exactly through cell overlaps; analytic kernels
    use the composite midpoint rule with ``quadrature`` points per axis per cell.
    """
    bp = np.asarray(breakpoints, dtype=float)
    _check_breakpoints(bp)
    if quadrature < 1:
        raise ValueError("quadrature must be a positive integer")
    if isinstance(graphon, StepGraphon):
        p = _overlap_matrix(bp, graphon.breakpoints)
        w = np.diff(bp)
        avg = (p @ graphon.values @ p.T) / np.outer(w, w)
        avg = np.triu(avg) + np.triu(avg, 1).T
        return np.clip(avg, 0.0, 1.0)
    return np.clip(_cell_averages(graphon, bp, quadrature), 0.0, 1.0)


def discretize_gd1(graphon: Graphon, n: int, quadrature: int = DEFAULT_QUADRATURE) -> Graph:
    """GD1: graph on ``n`` nodes whose edge (i, j) is the mean of W over cell I_i x I_j.

    >>> discretize_gd1(builtin("mean"), 2).adjacency
    array([[0.25, 0.5 ],
           [0.5 , 0.75]])
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if isinstance(graphon, StepGraphon) and graphon.n_cells == n and graphon.is_uniform:
        return Graph(graphon.values.copy())
    return Graph(discretize_on(graphon, uniform_breakpoints(n), quadrature))


def induce_graphon(graph: Graph) -> StepGraphon:
    """Step graphon W_G with value A(i, j) on I_i x I_j of the regular partition."""
    return StepGraphon(uniform_breakpoints(graph.n), graph.adjacency)


def as_step(graphon: Graphon, resolution: int = DEFAULT_RESOLUTION,
            quadrature: int = DEFAULT_QUADRATURE, extra_breakpoints=()) -> StepGraphon:
    """Step form of a graphon; analytic kernels are discretized at ``resolution``.

    ``extra_breakpoints`` are merged into the partition so that, e.g., the
    endpoints of an interval set fall on cell boundaries.
    """
    extra = np.asarray([float(x) for x in extra_breakpoints], dtype=float)
    if isinstance(graphon, StepGraphon):
        if extra.size == 0:
            return graphon
        return graphon.refine(merge_breakpoints(graphon.breakpoints, extra))
    bp = merge_breakpoints(uniform_breakpoints(resolution), extra)
    return StepGraphon(bp, discretize_on(graphon, bp, quadrature))


def _weighted_norm(values: np.ndarray, widths: np.ndarray) -> float:
    s = np.sqrt(widths)
    return float(np.linalg.norm(values * np.outer(s, s), 2))


def operator_norm(graphon: Graphon, resolution: int = DEFAULT_RESOLUTION,
                  quadrature: int = DEFAULT_QUADRATURE) -> float:
    """L2 operator norm of T_W.

    Exact for step kernels (``resolution`` is ignored); analytic kernels are
    approximated through their GD1 graph at ``resolution`` nodes.
    """
    if isinstance(graphon, StepGraphon):
        if graphon.is_uniform:
            return float(np.linalg.norm(graphon.values, 2)) / graphon.n_cells
        return _weighted_norm(graphon.values, graphon.widths)
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    a = discretize_gd1(graphon, resolution, quadrature).adjacency
    return float(np.linalg.norm(a, 2)) / resolution


def common_refinement(w1: StepGraphon, w2: StepGraphon) -> tuple[StepGraphon, StepGraphon]:
    bp = merge_breakpoints(w1.breakpoints, w2.breakpoints)
    return w1.refine(bp), w2.refine(bp)


def operator_distance(w1: StepGraphon, w2: StepGraphon) -> float:
    """Exact ``||T_W1 - T_W2||_2`` for two step kernels, via their common refinement."""
    if not (isinstance(w1, StepGraphon) and isinstance(w2, StepGraphon)):
        raise TypeError("operator_distance needs step graphons; discretize analytic ones first")
    r1, r2 = common_refinement(w1, w2)
    return _weighted_norm(r1.values - r2.values, r1.widths)


def graphon_from_config(cfg: Mapping) -> Graphon:
    """Build a graphon from ``{"builtin": id, "params": {...}}`` or
    ``{"breakpoints": [...], "values": [[...], ...]}``.

    A flat ``"values"`` list is read as a row-major grid.
    """
    if "builtin" in cfg:
        return builtin(cfg["builtin"], **dict(cfg.get("params") or {}))
    if "values" in cfg:
        vals = np.asarray(cfg["values"], dtype=float)
        if "breakpoints" in cfg:
            bp = np.asarray(cfg["breakpoints"], dtype=float)
        else:
            n = vals.shape[0] if vals.ndim == 2 else int(round(np.sqrt(vals.size)))
            bp = uniform_breakpoints(n)
        n = bp.size - 1
        return StepGraphon(bp, vals.reshape(n, n))
    raise ValueError("graphon config needs either 'builtin' or 'values'")


def graphon_to_config(graphon: Graphon) -> dict:
    return graphon.to_config()


def adjacency_to_csv(graph: Graph) -> str:
    """Full symmetric adjacency, one row per node, 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in graph.adjacency:
        writer.writerow([f"{x:.17g}" for x in row])
    return buf.getvalue()


def adjacency_from_csv(text: str) -> Graph:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return Graph(np.array([[float(x) for x in r] for r in rows]))
