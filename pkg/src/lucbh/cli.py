"""Command-line front end.

    lucbh list-presets
    lucbh preset fig1 --trials 200 --seed 42 --emit-svg --out results/
    lucbh run --config my_sweep.json
    lucbh bounds instance.json
    lucbh impossibility --beta 0.5 --epsilon 0.1 --c 1 --delta 0.1

The output directory defaults to ``$BAI_OUT`` (or ``./results``).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from lucbh import __version__
from lucbh.algorithms import DEFAULT_BUDGET
from lucbh.core import Instance, load_instance
from lucbh.errors import ConfigError, LucbhError
from lucbh.harness import (
    LUCB_H,
    PRESET_NAMES,
    PURE_LUCB,
    SCHEMA_VERSION,
    ExperimentSpec,
    SweepResult,
    describe_preset,
    load_spec,
    preset,
    run_point,
)
from lucbh.harness import run_sweep
from lucbh.svg import render
from lucbh.theory import (
    BoundReport,
    bound_report,
    build_impossibility_pair,
    default_impossibility_t_s,
)

_OVERRIDABLE = ("trials", "seed", "budget", "log_base")


def _write_json(path: Path, doc: dict[str, Any]) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def _output_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out or os.environ.get("BAI_OUT") or "results")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _file_overrides(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def _apply_overrides(spec: ExperimentSpec, file_doc: dict[str, Any], args) -> ExperimentSpec:
    changes = {key: file_doc[key] for key in _OVERRIDABLE if key in file_doc}
    for key in _OVERRIDABLE:
        value = getattr(args, key, None)
        if value is not None:
            changes[key] = value
    try:
        return spec.with_overrides(**changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def write_outputs(result: SweepResult, out: Path, emit_svg: bool) -> list[Path]:
    name = result.spec.name
    paths = [out / f"{name}.csv", out / f"{name}.json"]
    paths[0].write_text(result.csv_text())
    _write_json(paths[1], result.to_dict())
    if emit_svg:
        paths.append(out / f"{name}.svg")
        paths[-1].write_text(render(result))
    return paths


def _print_result(result: SweepResult) -> None:
    spec = result.spec
    print(f"{spec.name}: {spec.trials} trials per point, seed {spec.seed}, log base {spec.log_base:g}")
    print(f"{'axis':>10} {'series':<24} {'mean_tau':>10} {'stderr':>8} {'error':>7}  pulls")
    for p in result.points:
        label = "pure LUCB" if p.algorithm == PURE_LUCB else f"LUCB-H {p.case}"
        pulls = " ".join(f"{x:.1f}" for x in p.stats.mean_pulls)
        print(
            f"{p.axis_value:>10g} {label:<24} {p.stats.mean_tau:>10.1f} "
            f"{p.stats.stderr_tau:>8.1f} {p.stats.error_rate:>7.4f}  {pulls}"
        )


def cmd_preset(args: argparse.Namespace) -> int:
    spec = preset(args.name, full_grid=args.full_grid)
    spec = _apply_overrides(spec, _file_overrides(args.config), args)
    result = run_sweep(spec, workers=args.workers)
    _print_result(result)
    for path in write_outputs(result, _output_dir(args), args.emit_svg):
        print(f"wrote {path}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    if not args.config:
        raise ConfigError("run needs --config PATH (an experiment spec JSON)")
    spec = _apply_overrides(load_spec(args.config), {}, args)
    result = run_sweep(spec, workers=args.workers)
    _print_result(result)
    for path in write_outputs(result, _output_dir(args), args.emit_svg):
        print(f"wrote {path}")
    return 0


def _cell(x: float | None) -> str:
    if x is None:
        return "UNDEFINED"
    return "inf" if math.isinf(x) else f"{x:.4f}"


def format_bounds(inst: Instance, report: BoundReport) -> str:
    lines = [
        f"k={inst.k} delta={inst.delta:g} best arm={inst.best_arm + 1} "
        f"gap case={report.gap_case or 'UNDEFINED'}",
        f"{'arm':>4} {'gap':>10} {'eta':>10} {'sav_u':>12} {'sav_l':>12} {'gap_term':>12}",
    ]
    for row in report.arms:
        lines.append(
            f"{row.arm + 1:>4} {row.gap:>10.4f} {_cell(row.eta):>10} {_cell(row.sav_u):>12} "
            f"{_cell(row.sav_l):>12} {_cell(row.gap_term):>12}"
        )
    lines += [
        f"upper bound total (32/gap^2 ln(k/delta) - sav_u): {report.upper_bound_total:.4f}",
        f"lower bound total (ln(1/(2.4 delta))/KL - sav_l): {report.lower_bound_total:.4f}",
        f"online-only reference sum gap^-2 ln(1/delta):     {report.lucb_reference:.4f}",
        f"batch reference sum (gap^-2 ln(1/delta) - T_S)+:  {report.batch_ts_reference:.4f}",
        "(unit-constant reference values, not calibrated predictions)",
    ]
    return "\n".join(lines)


def cmd_bounds(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    report = bound_report(inst)
    print(format_bounds(inst, report))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "software_version": __version__,
        "instance": inst.to_dict(),
        "bounds": report.to_dict(),
    }
    path = _output_dir(args) / f"{Path(args.instance).stem}_bounds.json"
    _write_json(path, doc)
    print(f"wrote {path}")
    return 0


def impossibility_report(
    beta: float,
    epsilon: float,
    c: float,
    delta: float,
    trials: int,
    seed: int = 0,
    t_s: int | None = None,
    v: float = 0.0,
    budget: int = DEFAULT_BUDGET,
    log_base: float = math.e,
    workers: int = 1,
) -> dict[str, Any]:
    """Run both policies on both impossibility instances and tabulate them."""
    count = default_impossibility_t_s(beta, epsilon, delta) if t_s is None else t_s
    pair = build_impossibility_pair(beta, epsilon, c, delta, count, (v, v))
    rows = []
    for label, inst in (("P", pair.instance_p), ("Q", pair.instance_q)):
        for algorithm in (PURE_LUCB, LUCB_H):
            stats = run_point(
                inst, algorithm, trials, seed, budget, log_base=log_base, workers=workers
            )
            rows.append(
                {
                    "instance": label,
                    "algorithm": algorithm,
                    "mean_tau": stats.mean_tau,
                    "stderr_tau": stats.stderr_tau,
                    "error_rate": stats.error_rate,
                    "truncated": stats.truncated,
                    "mean_pulls": list(stats.mean_pulls),
                }
            )
    return {
        "schema_version": SCHEMA_VERSION,
        "software_version": __version__,
        "seed": seed,
        "parameters": {
            "beta": beta, "epsilon": epsilon, "c": c, "delta": delta,
            "t_s": count, "v": v, "trials": trials, "log_base": log_base,
        },
        "instance_p": pair.instance_p.to_dict(),
        "instance_q": pair.instance_q.to_dict(),
        "results": rows,
    }


def cmd_impossibility(args: argparse.Namespace) -> int:
    report = impossibility_report(
        args.beta, args.epsilon, args.c, args.delta,
        trials=args.trials or 200,
        seed=args.seed or 0,
        t_s=args.t_s,
        v=args.v,
        budget=args.budget or DEFAULT_BUDGET,
        log_base=args.log_base or math.e,
        workers=args.workers,
    )
    params = report["parameters"]
    q_off = report["instance_q"]["mu_off"][1]
    print(
        f"beta={params['beta']:g} epsilon={params['epsilon']:g} C={params['c']:g} "
        f"delta={params['delta']:g} T_S={params['t_s']} V={params['v']:g}"
    )
    print(f"I_Q offline mean of arm 2: {q_off:.4f}")
    print(f"{'inst':>4} {'algorithm':<10} {'mean_tau':>10} {'stderr':>8} {'error':>7}")
    for row in report["results"]:
        print(
            f"{row['instance']:>4} {row['algorithm']:<10} {row['mean_tau']:>10.1f} "
            f"{row['stderr_tau']:>8.1f} {row['error_rate']:>7.4f}"
        )
    path = _output_dir(args) / "impossibility.json"
    _write_json(path, report)
    print(f"wrote {path}")
    return 0


def cmd_list_presets(args: argparse.Namespace) -> int:
    for name in PRESET_NAMES:
        print(f"{name:<6} {describe_preset(name)}")
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (default: $BAI_OUT or ./results)")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="trials per grid point")
    p.add_argument("--budget", type=int, help="sample cap per trial (default 10^7)")
    p.add_argument("--log-base", dest="log_base", type=float,
                   help="log base inside the confidence radius")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--config", help="JSON config; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lucbh", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="run one of the figure presets")
    p.add_argument("name", help="preset name (see list-presets)")
    p.add_argument("--emit-svg", action="store_true", help="also write an SVG chart")
    p.add_argument("--full-grid", action="store_true", help="use the full delta / T_S grid")
    _common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("run", help="run a sweep described by --config")
    p.add_argument("--emit-svg", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bounds", help="evaluate the bound calculators on an instance JSON")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("impossibility", help="simulate both policies on the I_P / I_Q pair")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--t-s", dest="t_s", type=int,
                   help="offline samples per arm (default: the sufficiency threshold)")
    p.add_argument("--v", type=float, default=0.0, help="bias bound given to LUCB-H")
    _common(p)
    p.set_defaults(func=cmd_impossibility)

    p = sub.add_parser("list-presets", help="list preset names")
    p.set_defaults(func=cmd_list_presets)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LucbhError, OSError, ValueError) as exc:
        print(f"lucbh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
