"""Noisy-reconstruction experiments comparing sampling-set strategies.

For every graph size a GD1 graph is built from the configured graphon and
three kinds of sampling sets are compared on the same random bandlimited
signals:

``greedy``    greedy E-optimal set computed on the graph itself
``transfer``  greedy set of the smallest (source) graph, moved over with
              :func:`~graphon_sampling.transfer.algorithm1_transfer`
``random``    a fresh uniform random set per trial
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import zlib
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .graphon import DEFAULT_QUADRATURE, discretize_gd1, graphon_from_config
from .gsp import BANDWIDTH_MODELS, generate_bandlimited, k_omega_for, spectral_decompose
from .reconstruct import NoiseSpec, add_noise, mse, reconstruct_ls, take_samples
from .sampling import SamplingSet, greedy_select, random_select
from .transfer import FILL_RULES, TransferBudgetError, algorithm1_transfer, induce_interval_set

METHODS = ("greedy", "transfer", "random")
OUTPUT_ENV = "GRAPHON_SAMPLING_OUTPUT"

DESK_PRESET = {"sizes": [50, 100, 150, 200], "trials": 20}
PAPER_PRESETS = {
    "paper-small": {"sizes": [250, 500, 750, 1000], "trials": 50},
    "paper-large": {"sizes": [500, 1000, 1500, 2000], "trials": 50},
}


def sample_budget(rate: float, n: int) -> int:
    """``m = round(rate * n)``, half-to-even on the exact rational value of ``rate``."""
    return int(round(Fraction(str(rate)) * n))


def derive_seed(master: int, size: int, stream: str, trial: int) -> int:
    """Independent 63-bit seed for one (size, stream, trial) cell."""
    ss = np.random.SeedSequence([int(master), int(size), zlib.crc32(stream.encode()), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0]) >> 1


@dataclass(frozen=True)
class ExperimentConfig:
    graphon: Mapping = field(default_factory=lambda: {"builtin": "mean"})
    sizes: tuple[int, ...] = (50, 100, 150, 200)
    rate: float = 0.05
    bwm: str = "BWM2"
    trials: int = 50
    snr_db: float = 20.0
    methods: tuple[str, ...] = METHODS
    seed: int = 0
    source_size: int | None = None
    quadrature: int = DEFAULT_QUADRATURE
    fill_rule: str = "overlap"
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "bwm", self.bwm.upper())
        object.__setattr__(self, "snr_db", float(self.snr_db))
        self.validate()

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        g = self.graphon
        return str(g.get("builtin", "step"))

    @property
    def source(self) -> int:
        return self.source_size if self.source_size is not None else self.sizes[0]

    def validate(self) -> None:
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ValueError("sizes must be positive")
        if list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError("sizes must be strictly ascending")
        if not 0 < self.rate <= 1:
            raise ValueError("rate must be in (0, 1]")
        if sample_budget(self.rate, self.sizes[0]) < 1:
            raise ValueError("rate * min(sizes) must round to at least one sample")
        if self.bwm not in BANDWIDTH_MODELS:
            raise ValueError(f"bwm must be one of {BANDWIDTH_MODELS}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}")
        if "transfer" in self.methods and not 1 <= self.source <= self.sizes[0]:
            raise ValueError("source_size must be between 1 and the smallest size")
        if self.fill_rule not in FILL_RULES:
            raise ValueError(f"fill_rule must be one of {FILL_RULES}")

    def to_mapping(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["graphon"] = dict(self.graphon)
        out["sizes"] = list(self.sizes)
        out["methods"] = list(self.methods)
        out["snr_db"] = self.snr_db if math.isfinite(self.snr_db) else str(self.snr_db)
        return out

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown experiment config keys: {sorted(extra)}")
        kw = dict(data)
        if "snr_db" in kw:
            kw["snr_db"] = float(kw["snr_db"])
        return cls(**kw)

    def digest(self) -> str:
        blob = json.dumps(self.to_mapping(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class TrialRecord:
    graphon: str
    n: int
    method: str
    bwm: str
    trial: int
    seed: int
    mse: float
    signal_power: float
    rank_deficient: bool
    status: str = "ok"


@dataclass(frozen=True)
class CellSummary:
    n: int
    method: str
    mean: float
    std: float
    count: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list[TrialRecord]
    summary: list[CellSummary]
    sets: dict[tuple[int, str], list[int]]

    @property
    def complete(self) -> bool:
        return all(r.status == "ok" for r in self.trials)

    def cell(self, n: int, method: str) -> CellSummary:
        for c in self.summary:
            if c.n == n and c.method == method:
                return c
        raise KeyError((n, method))


def source_budget(rate: float, n_src: int, n: int) -> int:
    """Size of the source-graph set used for a target of ``n`` nodes.

    Each source node covers ``n / n_src`` target cells, so ``ceil(m_n * n_src / n)``
    source nodes are the fewest whose image holds ``m_n`` whole cells.  At
    ``n == n_src`` this is the target budget itself and the transfer is the
    identity.
    """
    need = math.ceil(Fraction(sample_budget(rate, n) * n_src, n))
    return max(1, min(n_src, need))


def _summarize(cfg: ExperimentConfig, records: list[TrialRecord]) -> list[CellSummary]:
    out = []
    for n in cfg.sizes:
        for method in cfg.methods:
            vals = np.array([r.mse for r in records if r.n == n and r.method == method and r.status == "ok"])
            mean = float(np.mean(vals)) if vals.size else math.nan
            std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
            out.append(CellSummary(n, method, mean, std, int(vals.size)))
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (size, method, trial) cell of ``cfg``.

    All methods at a given size see the same signals (paired trials).  A
    transfer budget that the source set cannot meet is recorded per trial
    with status ``"budget"`` instead of aborting the run.
    """
    w = graphon_from_config(cfg.graphon)
    master = cfg.seed

    source_sets: dict[int, SamplingSet] = {}
    if "transfer" in cfg.methods:
        b_src = spectral_decompose(discretize_gd1(w, cfg.source, cfg.quadrature))
        for n in cfg.sizes:
            m_src = source_budget(cfg.rate, cfg.source, n)
            if m_src not in source_sets:
                source_sets[m_src] = greedy_select(b_src, m_src, k_omega_for(cfg.bwm, m_src))

    records: list[TrialRecord] = []
    sets: dict[tuple[int, str], list[int]] = {}
    for n in cfg.sizes:
        graph = discretize_gd1(w, n, cfg.quadrature)
        basis = spectral_decompose(graph)
        m = sample_budget(cfg.rate, n)
        k = k_omega_for(cfg.bwm, m)

        fixed: dict[str, SamplingSet | None] = {}
        if "greedy" in cfg.methods:
            fixed["greedy"] = greedy_select(basis, m, k)
        if "transfer" in cfg.methods:
            src = source_sets[source_budget(cfg.rate, cfg.source, n)]
            sets[(n, "source")] = list(src)
            try:
                fixed["transfer"] = algorithm1_transfer(
                    induce_interval_set(src, cfg.source), n, m, cfg.fill_rule,
                    seed=derive_seed(master, n, "fill", 0))
            except TransferBudgetError:
                fixed["transfer"] = None
        for method, s in fixed.items():
            if s is not None:
                sets[(n, method)] = list(s)

        for t in range(cfg.trials):
            x = generate_bandlimited(basis, cfg.bwm, m, derive_seed(master, n, "signal", t))
            power = float(np.mean(x**2))
            for method in cfg.methods:
                seed = derive_seed(master, n, method, t)
                if method == "random":
                    s = random_select(n, m, derive_seed(master, n, "random-set", t))
                else:
                    s = fixed[method]
                if s is None:
                    records.append(TrialRecord(cfg.label, n, method, cfg.bwm, t, seed,
                                               math.nan, power, True, "budget"))
                    continue
                noisy = add_noise(take_samples(x, s), NoiseSpec(cfg.snr_db, seed))
                rec = reconstruct_ls(basis, k, s, noisy)
                records.append(TrialRecord(cfg.label, n, method, cfg.bwm, t, seed,
                                           mse(x, rec.signal), power, rec.rank_deficient))
    return ExperimentResult(cfg, records, _summarize(cfg, records), sets)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


TRIAL_COLUMNS = ["graphon", "N", "method", "bwm", "trial", "seed", "mse", "signal_power",
                 "rank_deficient", "status"]
SUMMARY_COLUMNS = ["N", "method", "mean_mse", "std_mse", "trials"]


def _trial_row(r: TrialRecord) -> dict:
    return {"graphon": r.graphon, "N": r.n, "method": r.method, "bwm": r.bwm, "trial": r.trial,
            "seed": r.seed, "mse": None if math.isnan(r.mse) else r.mse, "signal_power": r.signal_power,
            "rank_deficient": r.rank_deficient, "status": r.status}


def trials_csv(result: ExperimentResult) -> str:
    lines = [",".join(TRIAL_COLUMNS)]
    for r in result.trials:
        lines.append(",".join([r.graphon, str(r.n), r.method, r.bwm, str(r.trial), str(r.seed),
                               _fmt(r.mse), _fmt(r.signal_power), str(int(r.rank_deficient)), r.status]))
    return "\n".join(lines) + "\n"


def summary_csv(result: ExperimentResult) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for c in result.summary:
        lines.append(",".join([str(c.n), c.method, _fmt(c.mean), _fmt(c.std), str(c.count)]))
    return "\n".join(lines) + "\n"


def result_json(result: ExperimentResult) -> dict:
    return {
        "config": result.config.to_mapping(),
        "config_sha256": result.config.digest(),
        "paired_signals": True,
        "sets": [{"N": n, "method": m, "set": s} for (n, m), s in sorted(result.sets.items())],
        "summary": [{"N": c.n, "method": c.method, "mean_mse": c.mean, "std_mse": c.std,
                     "trials": c.count} for c in result.summary],
        "complete": result.complete,
    }


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "results"))


def emit(result: ExperimentResult, out_dir: str | os.PathLike | None = None,
         formats: Sequence[str] = ("csv", "json")) -> list[Path]:
    """Write per-trial rows, the size x method summary and a config echo.

    Output depends only on the config, so reruns are byte-identical.
    """
    out = Path(out_dir) if out_dir is not None else default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        for name, text in (("trials.csv", trials_csv(result)), ("summary.csv", summary_csv(result))):
            path = out / name
            path.write_text(text)
            written.append(path)
    if "json" in formats:
        doc = result_json(result)
        doc["trials"] = [_trial_row(r) for r in result.trials]
        path = out / "result.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        written.append(path)
    echo = out / "config.json"
    echo.write_text(json.dumps({**result.config.to_mapping(), "config_sha256": result.config.digest(),
                                "paired_signals": True}, indent=2, sort_keys=True) + "\n")
    written.append(echo)
    return written
