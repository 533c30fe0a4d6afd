"""``causal-gambit`` command line.

Exit codes: 0 success, 1 domain or validation error, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .beliefs import beliefs_to_json
from .config import ConfigError, ConfigReadError, default_model_path, figures_config_path, load_config
from .game import SIM_MODES, ExperimentResult, realize_outcome, run_experiment
from .inference import NullEventError, Query, interventional_query
from .model import CausalModel, ModelFormatError, ModelValidationError, parse_model, validate_model
from .rng import RngStream
from .svg import reward_curves_svg

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
REWARDS_HEADER = ("agent", "seed", "round", "reward")
SUMMARY_HEADER = ("agent", "round", "mean_reward", "cumulative_mean")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_DOMAIN):
        self.code = code
        super().__init__(message)


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_IO) from None


def _load_model(path) -> CausalModel:
    try:
        return parse_model(_read(path))
    except ModelFormatError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None
    except ModelValidationError as e:
        raise CliError(f"{path}: {e}", EXIT_DOMAIN) from None


def _assignments(model: CausalModel, items: list[str], flag: str) -> dict[int, int]:
    out: dict[int, int] = {}
    for item in items or []:
        name, sep, state = item.partition("=")
        if not sep:
            raise CliError(f"{flag} expects VAR=STATE, got {item!r}")
        if name not in model.names:
            raise CliError(f"{flag}: unknown variable {name!r}")
        var = model.index_of(name)
        if state not in model.variables[var].states:
            raise CliError(f"{flag}: variable {name!r} has no state {state!r}")
        out[var] = model.variables[var].states.index(state)
    return out


def cmd_validate(args) -> int:
    path = args.model or default_model_path()
    try:
        model = parse_model(_read(path), validate=False)
    except ModelFormatError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None
    report = validate_model(model)
    if report:
        for v in report:
            print(v)
        return EXIT_DOMAIN
    print("valid")
    return EXIT_OK


def cmd_query(args) -> int:
    model = _load_model(args.model or default_model_path())
    target = _assignments(model, [args.target], "--target")
    intervention = _assignments(model, args.do, "--do")
    evidence = _assignments(model, args.given, "--given")
    (var, value), = target.items()
    try:
        p = interventional_query(model, Query(var, value, intervention, evidence))
    except NullEventError as e:
        raise CliError(str(e)) from None
    print(f"{p:.6f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _load_model(args.model or default_model_path())
    intervention = _assignments(model, args.do, "--do")
    if args.n < 0:
        raise CliError("--n must be non-negative")
    try:
        rng = RngStream(args.seed)
    except ValueError as e:
        raise CliError(str(e)) from None
    lines = []
    for _ in range(args.n):
        x = realize_outcome(model, intervention, args.mode, rng)
        lines.append(",".join(model.variables[i].states[s] for i, s in enumerate(x)))
    if lines:
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _reward_text(r: float) -> str:
    return str(int(r)) if float(r).is_integer() else repr(float(r))


def write_rewards_csv(path: Path, result: ExperimentResult):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REWARDS_HEADER)
        for label in result.labels:
            for i, seed in enumerate(result.seeds):
                for t, r in enumerate(result.rewards[label][i]):
                    w.writerow((label, seed, t + 1, _reward_text(r)))


def write_summary_csv(path: Path, result: ExperimentResult):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for label in result.labels:
            for t, (m, c) in enumerate(zip(result.mean_reward(label), result.cumulative_mean(label))):
                w.writerow((label, t + 1, repr(float(m)), repr(float(c))))


def _default_jobs() -> int:
    raw = os.environ.get("CAUSAL_GAMBIT_JOBS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"CAUSAL_GAMBIT_JOBS must be an integer, got {raw!r}") from None


def cmd_experiment(args) -> int:
    path = args.config or figures_config_path()
    try:
        config = load_config(path)
    except ConfigReadError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None
    except ConfigError as e:
        raise CliError(f"{path}: {e}", EXIT_DOMAIN) from None
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        raise CliError("--jobs must be >= 1")
    out_dir = Path(args.out_dir) if args.out_dir else config.output_dir
    result = run_experiment(config, jobs=jobs)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        rewards_path = out_dir / (config.outputs["rewards"] or "rewards.csv")
        summary_path = out_dir / (config.outputs["summary"] or "summary.csv")
        write_rewards_csv(rewards_path, result)
        write_summary_csv(summary_path, result)
        written = [rewards_path, summary_path]
        plot = args.plot if args.plot is not None else None
        if plot is not None:
            plot_path = out_dir / (plot or config.outputs.get("plot") or "rewards.svg")
            series = {label: result.cumulative_mean(label) for label in result.labels}
            plot_path.write_text(reward_curves_svg(series, f"Average reward over {config.rounds} rounds",
                                                   "cumulative mean reward"), encoding="utf-8")
            written.append(plot_path)
        if args.dump_beliefs:
            snap = {label: {str(seed): json.loads(beliefs_to_json(b)) for seed, b in per_seed.items()}
                    for label, per_seed in result.beliefs.items()}
            dump_path = Path(args.dump_beliefs)
            dump_path.write_text(json.dumps(snap, indent=1) + "\n", encoding="utf-8")
            written.append(dump_path)
    except OSError as e:
        raise CliError(f"cannot write output: {e}", EXIT_IO) from None
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-gambit",
                                     description="Causal decision making against Nature on discrete models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model", nargs="?", help="model JSON (default: bundled test scenario)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("query", help="P(target | do(...), given)")
    p.add_argument("model", nargs="?", help="model JSON (default: bundled test scenario)")
    p.add_argument("--do", action="append", default=[], metavar="VAR=STATE")
    p.add_argument("--given", action="append", default=[], metavar="VAR=STATE",
                   help="observational evidence")
    p.add_argument("--target", required=True, metavar="VAR=STATE")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("simulate", help="draw outcomes from a model under an intervention")
    p.add_argument("model", nargs="?", help="model JSON (default: bundled test scenario)")
    p.add_argument("--do", action="append", default=[], metavar="VAR=STATE")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=SIM_MODES, default="sample")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a seeded agent comparison")
    p.add_argument("config", nargs="?", help="experiment config JSON (default: bundled figures.config)")
    p.add_argument("--out-dir", help="directory for CSV/SVG outputs")
    p.add_argument("--plot", nargs="?", const="", default=None, metavar="FILE",
                   help="also write an SVG of the cumulative mean curves")
    p.add_argument("--jobs", type=int, default=None, help="parallel episodes (default $CAUSAL_GAMBIT_JOBS or 1)")
    p.add_argument("--dump-beliefs", metavar="FILE", help="write final learner beliefs as JSON")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
