"""Command-line workbench: simulation, oracles, generators, analysis
tables, the adversary game, fuzzing, and SVG rendering.

Every command is deterministic given its flags and seed.  Exit codes:
0 success, 1 validation failure (bad flags, bad files, domain errors),
2 assertion failure (fuzz envelope breach, reference-table mismatch).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis
from .adversary import EXTRA_POLICIES, play, write_transcript
from .core import Instance, Schedule, Slice, objective, rational_str, to_rational
from .fuzz import fuzz
from .instances import (
    NestedParams,
    RANDOM_KINDS,
    ScenarioParams,
    gen_basic,
    gen_nested,
    gen_random,
    read_instance,
    write_instance,
)
from .oracle import (
    optimal_bruteforce,
    optimal_dp_timeindexed,
    structured_optimal,
)
from .render import render_gantt, render_profile
from .simulator import Policy, TieRule, simulate

_ENV_OUT_DIR = "WSRPT_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    assertion failures, so usage errors exit 1 like other validation."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument(
        "--exact",
        action="store_true",
        dest="exact",
        help="print objectives as exact rationals",
    )
    fmt.add_argument(
        "--float",
        action="store_false",
        dest="exact",
        help="print objectives as floats (default)",
    )
    common.add_argument("--out", default=None, help="output path")
    common.add_argument(
        "--config",
        default=None,
        help="key=value file supplying defaults for any flag",
    )
    common.set_defaults(exact=False)
    return common


def _load_config(path) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line is not key=value: {line!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_COERCE = {
    "seed": int,
    "trials": int,
    "n_max": int,
    "n": int,
    "workers": int,
    "exact": lambda s: s.lower() in ("1", "true", "yes"),
}


def _apply_config(args: argparse.Namespace) -> None:
    """Resolution order: explicit flag, then config entry, then default.

    Configurable flags parse with default None; whatever is still None
    after the config pass picks up the command's hard default.
    """
    if args.config is not None:
        for key, value in _load_config(args.config).items():
            if getattr(args, key, None) is None:
                coerce = _CONFIG_COERCE.get(key, str)
                setattr(args, key, coerce(value))
    for key, value in getattr(args, "hard_defaults", {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _out_path(args: argparse.Namespace, default_name: str | None = None):
    """--out as given, else the default name under $WSRPT_OUT_DIR or cwd."""
    if args.out is not None:
        return Path(args.out)
    if default_name is None:
        return None
    return Path(os.environ.get(_ENV_OUT_DIR, ".")) / default_name


def _show(value, exact: bool) -> str:
    if exact and isinstance(value, Fraction):
        return rational_str(value)
    return repr(float(value))


def _schedule_to_dict(schedule: Schedule, instance: Instance) -> dict:
    return {
        "objective": rational_str(objective(schedule, instance)),
        "slices": [
            {"job": s.job, "start": rational_str(s.start), "end": rational_str(s.end)}
            for s in schedule.slices
        ],
    }


def _schedule_from_dict(payload: dict) -> Schedule:
    return Schedule(
        tuple(
            Slice(int(s["job"]), Fraction(s["start"]), Fraction(s["end"]))
            for s in payload["slices"]
        )
    )


def _write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _write_schedule(schedule: Schedule, instance: Instance, path) -> None:
    """JSON slice list, or CSV (job,start,end) when the path says so."""
    if str(path).endswith(".csv"):
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["job", "start", "end"])
            for s in schedule.slices:
                writer.writerow([s.job, rational_str(s.start), rational_str(s.end)])
    else:
        _write_json(_schedule_to_dict(schedule, instance), path)


def _cmd_simulate(args) -> int:
    instance = read_instance(args.instance)
    tie = TieRule(args.tie)
    script = instance.tie_script if tie is TieRule.SCRIPTED else None
    schedule = simulate(instance, policy=Policy(args.policy), tie=tie, script=script)
    schedule.validate(instance)
    value = objective(schedule, instance)
    print(f"objective {_show(value, args.exact)}")
    out = _out_path(args)
    if out is not None:
        _write_schedule(schedule, instance, out)
        print(f"wrote {out}")
    return 0


def _cmd_optimal(args) -> int:
    instance = read_instance(args.instance)
    if args.method == "brute":
        result = optimal_bruteforce(instance)
    elif args.method == "dp":
        grid = None if args.grid is None else to_rational(args.grid)
        result = optimal_dp_timeindexed(instance, grid=grid)
    else:
        result = structured_optimal(instance)
    print(f"{result.method} objective {_show(result.objective, args.exact)}")
    out = _out_path(args)
    if out is not None:
        _write_schedule(result.schedule, instance, out)
        print(f"wrote {out}")
    return 0


def _cmd_gen(args) -> int:
    if args.family == "basic":
        params = ScenarioParams(
            y=to_rational(args.y),
            v=to_rational(args.v if args.v is not None else args.y),
            z=to_rational(args.z),
            delta=to_rational(args.delta),
        )
        instance = gen_basic(params)
    elif args.family == "nested":
        r_s = to_rational(args.r_s)
        if args.p_s is not None:
            p_s = to_rational(args.p_s)
        else:
            p_star, _ = analysis.optimize_nested(float(r_s))
            p_s = Fraction(p_star).limit_denominator(10**6)
        inner = ScenarioParams(
            y=to_rational(args.y),
            v=to_rational(args.v if args.v is not None else args.y),
            z=to_rational(args.z),
            delta=to_rational(args.delta),
        )
        outer = ScenarioParams(
            y=inner.y, v=inner.v, z=inner.z, delta=to_rational(args.delta)
        )
        instance = gen_nested(NestedParams(outer=outer, r_s=r_s, p_s=p_s, inner=inner))
    else:
        from random import Random

        seed = args.seed if args.seed is not None else 0
        instance = gen_random(Random(seed), args.n, args.kind)
    out = _out_path(args, "instance.json")
    write_instance(instance, out)
    print(f"wrote {out} ({len(instance.jobs)} jobs)")
    return 0


def _cmd_table1(args) -> int:
    rows = analysis.table1()
    out = _out_path(args, "table1.csv")
    metric_names = ("C", "C_star", "ratio", "W", "L")
    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["y", "v", "z", *metric_names, "W_over_L"]
            + [f"ref_{m}" for m in metric_names]
            + [f"delta_{m}" for m in metric_names]
        )
        for row in rows:
            m = row.metrics
            deltas = row.deltas()
            writer.writerow(
                [
                    f"{row.y:.4f}",
                    f"{row.v:.4f}",
                    f"{row.z:.4f}",
                    *(f"{getattr(m, name):.6f}" for name in metric_names),
                    f"{m.w_over_l:.6f}",
                    *(f"{row.reference[i]:.4f}" for i in (0, 1, 2, 3, 4)),
                    *(f"{deltas[name]:.2e}" for name in metric_names),
                ]
            )
    worst = max(row.max_delta() for row in rows)
    print(f"wrote {out} ({len(rows)} rows, max |delta| {worst:.2e})")
    if worst >= 1e-3:
        raise AssertionError(f"reference-table delta {worst:.2e} exceeds 1e-3")
    return 0


def _cmd_optimize(args) -> int:
    if args.target == "basic":
        y, v, ratio = analysis.optimize_basic()
        print(f"y {y:.6f}")
        print(f"v {v:.6f}")
        print(f"ratio {ratio:.6f}")
        payload = {"y": y, "v": v, "ratio": ratio}
    else:
        p2, value = analysis.optimize_lb()
        print(f"p2 {p2:.6f}")
        print(f"bound {value:.6f}")
        payload = {"p2": p2, "bound": value}
    out = _out_path(args)
    if out is not None:
        _write_json(payload, out)
        print(f"wrote {out}")
    return 0


def _cmd_curves(args) -> int:
    p2_values = [round(1.02 + 0.02 * i, 6) for i in range(250)]
    curves = analysis.lb_curves(p2_values)
    out = _out_path(args, "fig4.csv")
    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["p2", "finish_j1_first", "finish_j2_first"])
        for p2, a, b in zip(curves.p2, curves.finish_j1_first, curves.finish_j2_first):
            writer.writerow([f"{p2:.6f}", f"{a:.8f}", f"{b:.8f}"])
    print(f"wrote {out} ({len(p2_values)} points)")
    print(f"crossing p2 {curves.crossing_p2:.6f} value {curves.crossing_value:.6f}")
    return 0


def _cmd_adversary(args) -> int:
    transcript = play(
        args.policy,
        tie=TieRule(args.tie),
        delta=to_rational(args.delta),
        p1=to_rational(args.p1),
        p2=to_rational(args.p2),
    )
    print(f"branch {transcript.branch}")
    print(f"online {_show(transcript.online_objective, args.exact)}")
    print(f"optimal {_show(transcript.optimal_objective, args.exact)}")
    print(f"ratio {_show(transcript.ratio, args.exact)}")
    out = _out_path(args, "transcript.json")
    write_transcript(transcript, out)
    print(f"wrote {out}")
    return 0


def _cmd_fuzz(args) -> int:
    seed = args.seed if args.seed is not None else 0
    out_dir = args.out if args.out is not None else os.environ.get(_ENV_OUT_DIR, ".")
    report = fuzz(
        args.trials,
        n_max=args.n_max,
        seed=seed,
        out_dir=out_dir,
        workers=args.workers,
    )
    print(f"trials {report.trials} seed {report.seed}")
    for kind in RANDOM_KINDS:
        st = report.classes[kind]
        print(
            f"{kind:13s} trials {st.trials:6d} skipped {st.skipped:4d} "
            f"at-optimum {st.at_optimum:6d} worst {_show(st.worst_ratio, args.exact)}"
        )
    print(f"worst ratio {_show(report.worst_ratio, args.exact)}")
    if report.certificate_path:
        print(f"certificate {report.certificate_path}")
    return 0


def _cmd_render(args) -> int:
    instance = read_instance(args.instance)
    if args.schedule is not None:
        with open(args.schedule, encoding="utf-8") as f:
            schedule = _schedule_from_dict(json.load(f))
        schedule.validate(instance)
    else:
        tie = TieRule(args.tie)
        script = instance.tie_script if tie is TieRule.SCRIPTED else None
        schedule = simulate(
            instance, policy=Policy(args.policy), tie=tie, script=script
        )
    out = _out_path(args, f"{args.view}.svg")
    if args.view == "gantt":
        render_gantt(schedule, instance, out)
    else:
        render_profile(schedule, instance, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="wsrpt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a policy on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--policy", choices=[x.value for x in Policy])
    p.add_argument("--tie", choices=[x.value for x in TieRule])
    p.set_defaults(
        func=_cmd_simulate,
        hard_defaults={"policy": "wsrpt", "tie": "prefer-running"},
    )

    p = sub.add_parser("optimal", parents=[common], help="compute an optimal schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=["brute", "dp", "structured"])
    p.add_argument("--grid", default=None, help="time grid for --method dp")
    p.set_defaults(func=_cmd_optimal, hard_defaults={"method": "brute"})

    p = sub.add_parser("gen", parents=[common], help="generate an instance file")
    p.add_argument("family", choices=["basic", "nested", "random"])
    p.add_argument("--y")
    p.add_argument("--v")
    p.add_argument("--z")
    p.add_argument("--delta")
    p.add_argument("--r-s", dest="r_s")
    p.add_argument("--p-s", dest="p_s", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--kind", choices=list(RANDOM_KINDS))
    p.set_defaults(
        func=_cmd_gen,
        hard_defaults={
            "y": "0.8157",
            "z": "0",
            "delta": "1e-2",
            "r_s": "0.5307",
            "n": 6,
            "kind": "general",
        },
    )

    p = sub.add_parser("table1", parents=[common], help="reproduce the reference table")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("optimize", parents=[common], help="run an optimizer")
    p.add_argument("target", choices=["basic", "lb"])
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("curves", parents=[common], help="lower-bound curves CSV")
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("adversary", parents=[common], help="play the two-job game")
    p.add_argument(
        "--policy",
        choices=[x.value for x in Policy] + list(EXTRA_POLICIES),
    )
    p.add_argument(
        "--tie",
        choices=[x.value for x in TieRule if x is not TieRule.SCRIPTED],
    )
    p.add_argument("--delta")
    p.add_argument("--p1")
    p.add_argument("--p2")
    p.set_defaults(
        func=_cmd_adversary,
        hard_defaults={
            "policy": "wsrpt",
            "tie": "prefer-running",
            "delta": "1e-3",
            "p1": "1",
            "p2": "2.3364",
        },
    )

    p = sub.add_parser("fuzz", parents=[common], help="randomized envelope check")
    p.add_argument("--trials", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_fuzz, hard_defaults={"trials": 10000, "n_max": 7})

    p = sub.add_parser("render", parents=[common], help="render an SVG figure")
    p.add_argument("view", choices=["gantt", "profile"])
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", default=None, help="schedule JSON from simulate --out")
    p.add_argument("--policy", choices=[x.value for x in Policy])
    p.add_argument("--tie", choices=[x.value for x in TieRule])
    p.set_defaults(
        func=_cmd_render,
        hard_defaults={"policy": "wsrpt", "tie": "prefer-running"},
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
