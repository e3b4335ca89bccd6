"""Command-line surface: config ingestion, dispatch, and result persistence.

Subcommands: analyze, check, simulate, oracle, experiment.  Machine mode
writes exactly one JSON document to stdout per command (``--pretty`` for the
human rendering).  Exit codes: 0 success, 1 config error, 2 analysis
indeterminacy (non-unique fixed point, roots listed), 3 assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import reinforce
from .analysis import check_conditions, predicted_clt
from .drift import SamplingMode
from .errors import ErwmxError, NonUniqueFixedPointError
from .experiment import ExperimentPlan, run_experiment
from .oracle import exact_distribution, write_pmf_csv
from .walk import COLLAPSED, LITERAL, KSchedule, ModelConfig, simulate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INDETERMINATE = 2
EXIT_ASSERT = 3


class SchemaError(ErwmxError):
    pass


def _require_keys(obj: dict, where: str, required: set[str], optional: set[str] = frozenset()):
    unknown = set(obj) - required - set(optional)
    if unknown:
        raise SchemaError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"missing keys in {where}: {sorted(missing)}")


def build_spec(fobj: dict) -> reinforce.ReinforcementSpec:
    if not isinstance(fobj, dict) or "type" not in fobj:
        raise SchemaError('model.f must be an object with a "type"')
    ftype = fobj["type"]
    ext = bool(fobj.get("extended_range", False))
    if ftype == "constant":
        _require_keys(fobj, "model.f", {"type", "c"}, {"extended_range"})
        return reinforce.constant(fobj["c"])
    if ftype == "linear":
        _require_keys(fobj, "model.f", {"type", "c"}, {"extended_range"})
        return reinforce.linear(fobj["c"], extended_range=ext)
    if ftype == "affine_decreasing":
        _require_keys(fobj, "model.f", {"type", "c"}, {"extended_range"})
        return reinforce.affine_decreasing(fobj["c"], extended_range=ext)
    if ftype == "exponential":
        _require_keys(fobj, "model.f", {"type", "c"}, {"extended_range"})
        return reinforce.exponential(fobj["c"], extended_range=ext)
    if ftype == "quadratic":
        _require_keys(fobj, "model.f", {"type"})
        return reinforce.quadratic()
    if ftype == "majority":
        _require_keys(fobj, "model.f", {"type"})
        return reinforce.majority()
    if ftype == "table":
        _require_keys(fobj, "model.f", {"type", "values", "k"})
        return reinforce.table(fobj["values"], fobj["k"])
    raise SchemaError(f"unknown reinforcement type {ftype!r}")


def build_schedule(kobj: dict) -> KSchedule:
    if not isinstance(kobj, dict) or "type" not in kobj:
        raise SchemaError('model.k must be an object with a "type"')
    ktype = kobj["type"]
    if ktype == "constant":
        _require_keys(kobj, "model.k", {"type", "value"})
        return KSchedule.constant(kobj["value"])
    if ktype == "power":
        _require_keys(kobj, "model.k", {"type", "c", "alpha"})
        return KSchedule.power(kobj["c"], kobj["alpha"])
    if ktype == "log":
        _require_keys(kobj, "model.k", {"type", "c"})
        return KSchedule.log(kobj["c"])
    if ktype == "table":
        _require_keys(kobj, "model.k", {"type", "values"})
        return KSchedule.table(kobj["values"])
    raise SchemaError(f"unknown schedule type {ktype!r}")


def build_model(config: dict) -> ModelConfig:
    _require_keys(config, "config", {"model"}, {"experiment", "output"})
    mobj = config["model"]
    _require_keys(mobj, "config.model", {"p", "q", "sampling", "k", "f"}, {"allow_half"})
    sampling = mobj["sampling"]
    if sampling not in ("with", "without"):
        raise SchemaError('model.sampling must be "with" or "without"')
    return ModelConfig(
        p=float(mobj["p"]),
        q=float(mobj["q"]),
        sampling_mode=SamplingMode(sampling),
        schedule=build_schedule(mobj["k"]),
        spec=build_spec(mobj["f"]),
        allow_half=bool(mobj.get("allow_half", False)),
    )


def _experiment_section(config: dict) -> dict:
    eobj = config.get("experiment")
    if eobj is None:
        raise SchemaError('config needs an "experiment" object for this command')
    _require_keys(
        eobj,
        "config.experiment",
        {"replicates", "horizon", "seed"},
        {"checkpoints", "alpha", "threads"},
    )
    return eobj


def _output_section(config: dict) -> dict:
    oobj = config.get("output", {})
    if oobj:
        _require_keys(oobj, "config.output", set(), {"dir", "formats"})
    return oobj


def _emit(doc: dict, pretty: bool, out: str | None) -> None:
    text = json.dumps(doc, indent=2 if pretty else None, sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def cmd_analyze(config: dict, args) -> int:
    model = build_model(config)
    try:
        report = predicted_clt(model)
    except NonUniqueFixedPointError as exc:
        _emit(
            {"error": "non-unique fixed point", "roots": exc.roots},
            args.pretty,
            args.out,
        )
        return EXIT_INDETERMINATE
    _emit(report.to_json_dict(), args.pretty, args.out)
    return EXIT_OK


def cmd_check(config: dict, args) -> int:
    model = build_model(config)
    report = check_conditions(model)
    _emit(report.to_json_dict(), args.pretty, args.out)
    return EXIT_OK


def cmd_simulate(config: dict, args) -> int:
    model = build_model(config)
    eobj = _experiment_section(config)
    horizon = args.horizon or int(eobj["horizon"])
    replicates = args.replicates or int(eobj["replicates"])
    seed = args.seed if args.seed is not None else int(eobj["seed"])
    mode = args.mode or COLLAPSED
    checkpoints = [int(c) for c in eobj.get("checkpoints", [])] or None
    if checkpoints is None:
        from .experiment import dyadic_checkpoints

        checkpoints = dyadic_checkpoints(horizon)
    out_path = args.out or "trajectories.csv"
    rows = 0
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "n", "s_n"])
        for r in range(1, replicates + 1):
            traj = simulate(model, horizon, seed, mode=mode, checkpoints=checkpoints, replicate_id=r)
            for n, s in traj.checkpoints():
                writer.writerow([r, n, s])
                rows += 1
    _emit(
        {
            "command": "simulate",
            "replicates": replicates,
            "horizon": horizon,
            "seed": seed,
            "mode": mode,
            "rows": rows,
            "path": str(out_path),
        },
        args.pretty,
        None,
    )
    return EXIT_OK


def cmd_oracle(config: dict, args) -> int:
    model = build_model(config)
    if args.n_max is None:
        raise SchemaError("oracle requires --n-max")
    pmfs = exact_distribution(model, args.n_max)
    out_path = args.out or "pmf.csv"
    write_pmf_csv(pmfs, out_path)
    final = pmfs[-1]
    _emit(
        {
            "command": "oracle",
            "n_max": args.n_max,
            "rows": sum(p.n + 1 for p in pmfs),
            "path": str(out_path),
            "mean_s_over_n": final.mean_s_over_n(),
            "var_s_over_n": final.var_s_over_n(),
        },
        args.pretty,
        None,
    )
    return EXIT_OK


def cmd_experiment(config: dict, args) -> int:
    model = build_model(config)
    eobj = _experiment_section(config)
    oobj = _output_section(config)
    horizon = args.horizon or int(eobj["horizon"])
    replicates = args.replicates or int(eobj["replicates"])
    seed = args.seed if args.seed is not None else int(eobj["seed"])
    checkpoints = tuple(int(c) for c in eobj["checkpoints"]) if "checkpoints" in eobj else None
    plan = ExperimentPlan(
        model=model,
        replicates=replicates,
        horizon=horizon,
        master_seed=seed,
        checkpoints=checkpoints,
        alpha=float(eobj.get("alpha", 0.01)),
        workers=int(eobj["threads"]) if "threads" in eobj else None,
        mode=args.mode or COLLAPSED,
    )
    result = run_experiment(plan)
    out_dir = Path(args.out or oobj.get("dir", "results"))
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = result.to_json_dict()
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    with open(out_dir / "checkpoints.jsonl", "w") as fh:
        for r in range(result.samples.shape[0]):
            for j, n in enumerate(result.checkpoint_ns):
                fh.write(
                    json.dumps(
                        {"replicate": r + 1, "n": int(n), "s": int(result.samples[r, j])},
                        sort_keys=True,
                    )
                    + "\n"
                )
    if "csv" in oobj.get("formats", []):
        with open(out_dir / "samples.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replicate", "n", "s", "w"])
            n_final = result.checkpoint_ns[-1]
            for r in range(result.samples.shape[0]):
                writer.writerow(
                    [r + 1, n_final, int(result.samples[r, -1]), repr(float(result.final_w[r]))]
                )
    _emit(summary, args.pretty, None)
    if args.assert_ and not result.all_pass():
        return EXIT_ASSERT
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erwmx",
        description="Elephant random walks with multiple extractions: "
        "analyze, check, simulate, oracle, experiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "check", "simulate", "oracle", "experiment"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", default=None, help="output file or directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--replicates", type=int, default=None)
        sp.add_argument("--mode", choices=[LITERAL, COLLAPSED], default=None)
        sp.add_argument("--n-max", type=int, default=None, dest="n_max")
        sp.add_argument("--assert", action="store_true", dest="assert_")
        sp.add_argument("--pretty", action="store_true")
    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "check": cmd_check,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": f"cannot read config: {exc}"}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](config, args)
    except ErwmxError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
