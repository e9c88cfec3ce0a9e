"""Command-line entry point: ``likecent {generate,solve,simulate,fit,rerun}``.

Every command writes a JSON manifest next to its output recording the full
argument vector, so ``likecent rerun MANIFEST`` reproduces the run.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from likecent import __version__
from likecent.desirability import neighbor_desirability, product_formula_report
from likecent.errors import ConvergenceError, ExperimentError, LikecentError
from likecent.export import read_table, render, write_all
from likecent.fitting import fit_exponential, fit_power
from likecent.graph import BAParams, Graph, generate_ba, is_connected, read_edge_list, write_edge_list
from likecent.likedness import SolverConfig, normalize_unique, read_rates_csv, residual, solve
from likecent.markov import degree_stationary
from likecent.simulation import ExperimentConfig, run_experiment

log = logging.getLogger("likecent")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(path: Path, subcommand: str, argv: list[str], config: dict, seed, inputs, outputs) -> None:
    manifest = {
        "subcommand": subcommand,
        "argv": argv,
        "config": config,
        "master_seed": seed,
        "version": __version__,
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _load_graph(path: str) -> Graph:
    graph = read_edge_list(Path(path).read_text())
    if not is_connected(graph) or graph.n < 2:
        raise ExperimentError(f"{path}: graph must be connected with at least two vertices")
    return graph


def _solver_config(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_iter=args.max_iter, damping=args.damping)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args, argv) -> int:
    params = BAParams(m0=args.m0, t=args.t, m=args.m, seed=args.seed)
    graph = generate_ba(params)
    out = Path(args.output)
    out.write_text(write_edge_list(graph))
    config = {"m0": params.m0, "t": params.t, "m": params.m, "n": graph.n, "edges": graph.m}
    write_manifest(Path(f"{out}.manifest.json"), "generate", argv, config, params.seed, [], [out])
    log.info("wrote %s (%d vertices, %d edges)", out, graph.n, graph.m)
    return 0


def cmd_solve(args, argv) -> int:
    graph = _load_graph(args.graph)
    rates = read_rates_csv(Path(args.rates).read_text(), graph)
    try:
        L = solve(graph, rates, _solver_config(args))
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"final residual: {exc.residual:.6e}", file=sys.stderr)
        return 1
    p = degree_stationary(graph)
    unit = normalize_unique(L, p)
    nd = neighbor_desirability(graph, rates, unit)
    res = residual(graph, rates, L)
    result = {
        "n": graph.n,
        "likedness_raw": L.values.tolist(),
        "likedness": unit.values.tolist(),
        "desirability": nd.values.tolist(),
        "residuals": res.tolist(),
        "max_residual": float(np.max(np.abs(res))),
        "iterations": L.iterations,
    }
    report = product_formula_report(graph, rates, L, p, args.product_n or 0)
    result["drift"] = report.drift
    result["log_scale_gap"] = report.log_scale_gap
    if args.product_n is not None:
        result["product_formula"] = {
            "n": report.n,
            "products": report.products.tolist(),
            "ratio": report.ratio.tolist(),
            "cv": report.cv,
        }
    _emit(json.dumps(result, indent=1) + "\n", args.output)
    if args.output:
        config = {"tol": args.tol, "max_iter": args.max_iter, "damping": args.damping, "product_n": args.product_n}
        write_manifest(
            Path(f"{args.output}.manifest.json"), "solve", argv, config, None,
            [args.graph, args.rates], [args.output],
        )
    return 0


def cmd_simulate(args, argv) -> int:
    if args.graph:
        graph = _load_graph(args.graph)
        source = {"file": args.graph, "sha256": _sha256(Path(args.graph))}
    else:
        params = BAParams(m0=args.m0, t=args.t, m=args.m, seed=args.graph_seed)
        graph = generate_ba(params)
        source = {"ba": {"m0": params.m0, "t": params.t, "m": params.m, "seed": params.seed}}
    cfg = ExperimentConfig(
        graph=graph,
        ensemble_count=args.ensembles,
        rate_lambda=args.rate_lambda,
        master_seed=args.seed,
        solver=_solver_config(args),
        bins=args.bins,
        workers=args.workers,
    )
    dataset = run_experiment(cfg)
    config = cfg.describe()
    config["graph_sha256"] = hashlib.sha256(write_edge_list(graph).encode()).hexdigest()
    header = {"tool": f"likecent {__version__}", "master_seed": cfg.master_seed, "config": config}
    out_dir = Path(args.output)
    paths = write_all(out_dir, render(dataset, header))
    config = dict(config, graph_source=source, workers=cfg.workers)
    inputs = [args.graph] if args.graph else []
    write_manifest(out_dir / "manifest.json", "simulate", argv, config, cfg.master_seed, inputs, paths)
    log.info("%d ensembles accepted, %d failed; wrote %s", dataset.accepted, len(dataset.failures), out_dir)
    return 0


def cmd_fit(args, argv) -> int:
    names, cols = read_table(Path(args.csv).read_text())
    for col in (args.x, args.y) + ((args.weights,) if args.weights else ()):
        if col not in cols:
            raise LikecentError(f"column {col!r} not in {args.csv} (have {names})")
    xs, ys = cols[args.x], cols[args.y]
    ws = cols[args.weights] if args.weights else ["1"] * len(xs)
    pts, wts, dropped = [], [], 0
    for x, y, w in zip(xs, ys, ws):
        if not x or not y:
            continue  # absent bin
        x, y, w = float(x), float(y), float(w)
        if args.drop_nonpositive and (y <= 0 or (args.family == "power" and x <= 0)):
            dropped += 1
            continue
        pts.append((x, y))
        wts.append(w)
    fitter = fit_power if args.family == "power" else fit_exponential
    fit = fitter(np.array(pts).reshape(-1, 2), weights=np.array(wts) if args.weights else None)
    result = dict(fit.to_dict(), x=args.x, y=args.y, source=args.csv, dropped=dropped)
    if math.isnan(result["r_squared"]):
        result["r_squared"] = None
    _emit(json.dumps(result, indent=1) + "\n", args.output)
    if args.output:
        write_manifest(
            Path(f"{args.output}.manifest.json"), "fit", argv,
            {"family": args.family, "x": args.x, "y": args.y, "weights": args.weights},
            None, [args.csv], [args.output],
        )
    return 0


def cmd_rerun(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    return main(manifest["argv"])


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--damping", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="likecent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="grow a Barabási-Albert graph")
    g.add_argument("--m0", type=int, default=5)
    g.add_argument("--t", type=int, default=95)
    g.add_argument("--m", type=int, default=5)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="likedness and desirability for one rate matrix")
    s.add_argument("--graph", required=True)
    s.add_argument("--rates", required=True, help="CSV with header i,j,rate")
    s.add_argument("--product-n", type=int, default=None, help="check the random-walk product at this truncation")
    s.add_argument("-o", "--output")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    m = sub.add_parser("simulate", help="Monte Carlo rate ensembles on a fixed graph")
    m.add_argument("--graph", help="edge-list file; default grows a BA graph")
    m.add_argument("--m0", type=int, default=5)
    m.add_argument("--t", type=int, default=95)
    m.add_argument("--m", type=int, default=5)
    m.add_argument("--graph-seed", type=int, default=0)
    m.add_argument("--ensembles", type=int, default=1000)
    m.add_argument("--lambda", dest="rate_lambda", type=float, default=0.5, help="exponential rate parameter")
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--bins", type=int, default=30)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("-o", "--output", required=True, help="output directory")
    _add_solver_flags(m)
    m.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="power or exponential fit of two CSV columns")
    f.add_argument("--csv", required=True)
    f.add_argument("--x", required=True)
    f.add_argument("--y", required=True)
    f.add_argument("--family", choices=("power", "exponential"), default="power")
    f.add_argument("--weights", help="column holding per-point weights")
    f.add_argument("--drop-nonpositive", action="store_true", help="skip points outside the fit's domain")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("rerun", help="replay the command recorded in a manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_rerun)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args, argv)
    except (ConvergenceError, ExperimentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LikecentError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
