"""Command-line entry point: ``graphon-sampling <command> [options]``.

Every command accepts ``--config FILE`` (YAML or JSON); its keys supply
defaults for the command's options, and explicit flags win.  Node indices
are 0-based unless ``--one-based`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import experiment as ex
from .graphon import (DEFAULT_QUADRATURE, DEFAULT_RESOLUTION, adjacency_to_csv, discretize_gd1,
                      graphon_from_config, induce_graphon)
from .graphon_signal import graphon_spectrum
from .gsp import BANDWIDTH_MODELS, generate_bandlimited, k_omega_for, spectral_decompose
from .intervals import IntervalSet
from .reconstruct import NoiseSpec, add_noise, mse, reconstruct_ls, take_samples
from .sampling import (SamplingSet, brute_force_select, greedy_select, lambda_graph, lambda_graphon,
                       random_select, selection_score)
from .transfer import (FILL_RULES, algorithm1_transfer, convergence_report, convergence_to_csv,
                       induce_interval_set, theta_bounds)


def _load_mapping(text_or_path: str):
    p = Path(text_or_path)
    if p.suffix in (".yaml", ".yml", ".json") and p.exists():
        return yaml.safe_load(p.read_text())
    return yaml.safe_load(text_or_path)


def _graphon(spec):
    if isinstance(spec, str):
        loaded = _load_mapping(spec)
        spec = loaded if isinstance(loaded, dict) else {"builtin": spec}
    return graphon_from_config(spec)


def _int_list(spec) -> list[int]:
    if isinstance(spec, str):
        spec = yaml.safe_load(spec)
    if isinstance(spec, int):
        return [spec]
    return [int(i) for i in spec]


def _subset(spec, one_based: bool) -> SamplingSet:
    return SamplingSet.from_json(_int_list(spec), one_based)


def _intervals(spec) -> IntervalSet:
    if isinstance(spec, str):
        spec = yaml.safe_load(spec)
    return IntervalSet.from_pairs(spec)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: str | None) -> None:
    _write(json.dumps(obj, indent=2) + "\n", out)


def _k_omega(args, m: int) -> int:
    return args.k_omega if args.k_omega else k_omega_for(args.bwm, m)


def cmd_discretize(args) -> int:
    graph = discretize_gd1(_graphon(args.graphon), args.n, args.quadrature)
    _write(adjacency_to_csv(graph), args.out)
    return 0


def cmd_spectrum(args) -> int:
    graph = discretize_gd1(_graphon(args.graphon), args.n, args.quadrature)
    if args.graphon_side:
        lam = graphon_spectrum(induce_graphon(graph)).eigenvalues
    else:
        lam = spectral_decompose(graph).eigenvalues
    rows = ["index,eigenvalue"] + [f"{i + args.one_based},{x:.17g}" for i, x in enumerate(lam)]
    _write("\n".join(rows) + "\n", args.out)
    return 0


def cmd_lambda(args) -> int:
    w = _graphon(args.graphon)
    if args.intervals is not None:
        report = lambda_graphon(w, _intervals(args.intervals), args.resolution, args.quadrature)
        _dump(report.to_json(), args.out)
        return 0
    graph = discretize_gd1(w, args.n, args.quadrature)
    subset = _subset(args.set, args.one_based)
    if args.complement:
        subset = subset.complement(graph.n)
    report = lambda_graph(graph, subset).to_json()
    report["set"] = subset.to_json(args.one_based)
    _dump(report, args.out)
    return 0


def cmd_select(args) -> int:
    graph = discretize_gd1(_graphon(args.graphon), args.n, args.quadrature)
    basis = spectral_decompose(graph)
    m = args.m if args.m else ex.sample_budget(args.rate, graph.n)
    k = _k_omega(args, m)
    if args.method == "greedy":
        s = greedy_select(basis, m, k)
    elif args.method == "brute":
        s = brute_force_select(basis, m, k)
    else:
        s = random_select(graph.n, m, args.seed)
    _dump({"N": graph.n, "m": m, "k_omega": k, "method": args.method,
           "set": s.to_json(args.one_based), "sigma_min": selection_score(basis, s, k)}, args.out)
    return 0


def cmd_transfer(args) -> int:
    src = _subset(args.source_set, args.one_based)
    image = induce_interval_set(src, args.source_n)
    target = algorithm1_transfer(image, args.target_n, args.m, args.fill_rule, args.seed)
    out = {"source_intervals": image.to_pairs(), "N": args.target_n, "m": args.m,
           "set": target.to_json(args.one_based)}
    if args.graphon is not None:
        w = _graphon(args.graphon)
        g_small = discretize_gd1(w, args.source_n, args.quadrature)
        g_large = discretize_gd1(w, args.target_n, args.quadrature)
        out["bounds"] = theta_bounds(g_large, g_small, src, target).to_json()
    _dump(out, args.out)
    return 0


def cmd_reconstruct(args) -> int:
    graph = discretize_gd1(_graphon(args.graphon), args.n, args.quadrature)
    basis = spectral_decompose(graph)
    m = args.m if args.m else ex.sample_budget(args.rate, graph.n)
    k = _k_omega(args, m)
    x = generate_bandlimited(basis, args.bwm, m, args.seed)
    if args.set is not None:
        s = _subset(args.set, args.one_based)
    elif args.method == "random":
        s = random_select(graph.n, m, args.seed)
    else:
        s = greedy_select(basis, m, k)
    noisy = add_noise(take_samples(x, s), NoiseSpec(args.snr_db, args.seed))
    rec = reconstruct_ls(basis, k, s, noisy)
    _dump({"N": graph.n, "m": m, "k_omega": k, "set": s.to_json(args.one_based),
           "mse": mse(x, rec.signal), "rank_deficient": rec.rank_deficient,
           "signal": x.tolist(), "reconstruction": rec.signal.tolist()}, args.out)
    return 0


def cmd_experiment(args) -> int:
    data = dict(args.config_data.get("experiment", args.config_data)) if args.config_data else {}
    data.pop("preset", None)
    if args.preset == "desk":
        data = {**ex.DESK_PRESET, **data}
    elif args.preset in ex.PAPER_PRESETS:
        data = {**data, **ex.PAPER_PRESETS[args.preset]}
    for key in ("graphon", "bwm", "trials", "seed", "snr_db", "rate", "source_size", "fill_rule"):
        val = getattr(args, f"x_{key}", None)
        if val is not None:
            data[key] = val
    if isinstance(data.get("graphon"), str):
        loaded = _load_mapping(data["graphon"])
        data["graphon"] = loaded if isinstance(loaded, dict) else {"builtin": data["graphon"]}
    if args.x_sizes is not None:
        data["sizes"] = _int_list(args.x_sizes)
    if args.x_methods is not None:
        data["methods"] = [m.strip() for m in args.x_methods.split(",")]
    cfg = ex.ExperimentConfig.from_mapping(data)
    result = ex.run_experiment(cfg)
    paths = ex.emit(result, args.out_dir, args.formats.split(","))
    for c in result.summary:
        print(f"N={c.n:<6d} {c.method:<9s} mean MSE {c.mean:.6g} (std {c.std:.3g}, n={c.count})")
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0 if result.complete else 1


def cmd_convergence(args) -> int:
    w = _graphon(args.graphon)
    records = convergence_report(w, _int_list(args.sizes), _intervals(args.intervals),
                                 args.reference, args.quadrature)
    _write(convergence_to_csv(records), args.out)
    return 0


REQUIRED = {
    "discretize": ("n",), "spectrum": ("n",), "lambda": ("n",), "select": ("n",),
    "reconstruct": ("n",), "transfer": ("source_n", "target_n", "m"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphon-sampling",
                                     description="Graphon sampling theory: discretize, select, transfer, reconstruct.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="YAML/JSON file whose keys give option defaults")
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--one-based", action="store_true", help="read and write 1-based node labels")
        p.add_argument("--quadrature", type=int, default=DEFAULT_QUADRATURE)
        p.set_defaults(func=func)
        return p

    def graph_opts(p):
        p.add_argument("--graphon", default="mean", help="builtin id, W1..W7, inline mapping or file")
        p.add_argument("--n", type=int, default=None)

    def band_opts(p):
        p.add_argument("--m", type=int, default=0, help="sample budget (default: round(rate*N))")
        p.add_argument("--rate", type=float, default=0.05)
        p.add_argument("--bwm", default="BWM2", choices=BANDWIDTH_MODELS)
        p.add_argument("--k-omega", type=int, default=0, help="override the bandwidth model")
        p.add_argument("--seed", type=int, default=0)

    p = add("discretize", cmd_discretize, "GD1 adjacency as CSV")
    graph_opts(p)

    p = add("spectrum", cmd_spectrum, "ordered eigenvalues of the graph (or induced graphon)")
    graph_opts(p)
    p.add_argument("--graphon-side", action="store_true", help="report eigenvalues of T_W for the induced graphon")

    p = add("lambda", cmd_lambda, "removable constant of a node set or interval set")
    graph_opts(p)
    p.add_argument("--set", default="[0]", help="node indices, e.g. '[0, 3]'")
    p.add_argument("--complement", action="store_true", help="use the complement of --set")
    p.add_argument("--intervals", default=None, help="interval set '[[a, b], ...]' (graphon side)")
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    p = add("select", cmd_select, "choose a sampling set")
    graph_opts(p)
    band_opts(p)
    p.add_argument("--method", choices=("greedy", "brute", "random"), default="greedy")

    p = add("transfer", cmd_transfer, "move a sampling set to a larger graph")
    p.add_argument("--source-set", default="[0]")
    p.add_argument("--source-n", type=int, default=None)
    p.add_argument("--target-n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--fill-rule", choices=FILL_RULES, default="overlap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graphon", default=None, help="also report the two-graph bounds for GD1 graphs of this graphon")

    p = add("reconstruct", cmd_reconstruct, "sample, add noise and reconstruct one random signal")
    graph_opts(p)
    band_opts(p)
    p.add_argument("--method", choices=("greedy", "random"), default="greedy")
    p.add_argument("--set", default=None, help="explicit sampling set")
    p.add_argument("--snr-db", type=float, default=20.0)

    p = add("experiment", cmd_experiment, "run the noisy-reconstruction experiment")
    p.add_argument("--preset", choices=("desk",) + tuple(ex.PAPER_PRESETS), default="desk")
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${ex.OUTPUT_ENV} or ./results)")
    p.add_argument("--formats", default="csv,json")
    p.add_argument("--graphon", dest="x_graphon", default=None)
    p.add_argument("--sizes", dest="x_sizes", default=None)
    p.add_argument("--methods", dest="x_methods", default=None)
    p.add_argument("--bwm", dest="x_bwm", default=None, choices=BANDWIDTH_MODELS)
    p.add_argument("--trials", dest="x_trials", type=int, default=None)
    p.add_argument("--seed", dest="x_seed", type=int, default=None)
    p.add_argument("--snr-db", dest="x_snr_db", type=float, default=None)
    p.add_argument("--rate", dest="x_rate", type=float, default=None)
    p.add_argument("--source-size", dest="x_source_size", type=int, default=None)
    p.add_argument("--fill-rule", dest="x_fill_rule", default=None, choices=FILL_RULES)

    p = add("convergence", cmd_convergence, "removable constants along a GD1 sequence")
    p.add_argument("--graphon", default="mean")
    p.add_argument("--sizes", default="[8, 16, 32, 64, 128]")
    p.add_argument("--intervals", default="[[0.5, 1.0]]", help="sampling set in [0, 1]")
    p.add_argument("--reference", type=int, default=1024)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.config_data = None
    if args.config:
        data = _load_mapping(args.config) or {}
        if not isinstance(data, dict):
            parser.error("--config must hold a mapping")
        args.config_data = data
        if args.command != "experiment":
            # config keys act as defaults; explicit flags still win
            sub = parser._subparsers._group_actions[0].choices[args.command]
            sub.set_defaults(**{k.replace("-", "_"): v for k, v in data.items()})
            args = parser.parse_args(argv)
            args.config_data = data
    required = REQUIRED.get(args.command, ())
    if args.command == "lambda" and args.intervals is not None:
        required = ()
    for name in required:
        if getattr(args, name) is None:
            parser.error(f"--{name.replace('_', '-')} is required (flag or config key)")
    try:
        return args.func(args)
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
