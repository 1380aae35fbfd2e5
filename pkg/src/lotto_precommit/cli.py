"""Command-line surface.

Single-shot queries print machine-parsable key=value lines to stdout; sweeps
emit CSV (stdout, or a file via --out, optionally with a rendered figure next
to it).  Every command is a pure function of its flags, config file, and
seed.  Exit codes: 0 success, 1 failed verification, 2 domain or usage
errors (one-line message on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import LottoError
from .experiments import (
    Axis,
    Fig5Config,
    GGL_REGION_COLUMNS,
    GL_REGION_COLUMNS,
    MC_FIG5_COLUMNS,
    SweepConfig,
    fig5_rows_as_dicts,
    region_sweep_ggl,
    region_sweep_gl,
    run_fig5,
)
from .ggl import GGLInstance, find_zeros
from .ggl_precommit import (
    GGLPreCommit,
    Response,
    beats_second_best,
    beats_unique,
    optimal_precommit_ggl,
    response_A,
    uA_match,
    uA_withdraw,
    uB_ggl,
)
from .lotto import GLInstance, nominal_payoffs
from .oracle import run_verification_suite
from .precommit import (
    PreCommitment,
    best_response_A,
    min_beneficial_value,
    optimal_single_precommit,
)
from .tables import format_value, render_csv, write_csv

_REQUIRED = object()


class CLIError(Exception):
    pass


def _floats(raw: str) -> list[float]:
    return [float(part) for part in raw.split(",") if part != ""]


def _ints(raw: str) -> list[int]:
    return [int(part) for part in raw.split(",") if part != ""]


_OPTIONS = {
    "gl-payoff": {"xa": float, "xb": float, "v": _floats},
    "gl-precommit": {
        "xa": float,
        "xb": float,
        "v": _floats,
        "targets": (_ints, None),
        "p": (_floats, None),
        "battlefield": (int, None),
        "epsilon": (float, None),
    },
    "gl-region": {
        "xa-min": float,
        "xa-max": float,
        "xa-steps": (int, 200),
        "xb-min": float,
        "xb-max": float,
        "xb-steps": (int, 200),
        "vbar": float,
        "phi": (float, 1.0),
        "jobs": (int, 1),
    },
    "ggl-solve": {"alpha": float, "xa": float, "xb": float},
    "ggl-precommit": {
        "alpha": float,
        "xa": float,
        "xb": float,
        "battlefield": (int, None),
        "p": (float, None),
        "epsilon": (float, None),
    },
    "ggl-region": {
        "alpha": (float, None),
        "alpha-min": (float, None),
        "alpha-max": (float, None),
        "alpha-steps": (int, 200),
        "xa": (float, None),
        "xa-min": (float, None),
        "xa-max": (float, None),
        "xa-steps": (int, 200),
        "xb": (float, None),
        "xb-min": (float, None),
        "xb-max": (float, None),
        "xb-steps": (int, 200),
        "jobs": (int, 1),
    },
    "mc-fig5": {
        "samples": (int, 500),
        "seed": (int, 0),
        "xa": (float, 1.0),
        "xb": (float, 1.5),
        "phi": (float, 1.0),
        "battlefields": (int, 3),
        "jobs": (int, 1),
    },
    "verify": {"seed": (int, 2024)},
}

_OUTPUT_COMMANDS = {"gl-region", "ggl-region", "mc-fig5", "verify", "ggl-solve"}
_PLOT_COMMANDS = {"gl-region", "ggl-region", "mc-fig5"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lotto-precommit",
        description="General Lotto games with public resource pre-commitments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, options in _OPTIONS.items():
        p = sub.add_parser(command)
        for name in options:
            p.add_argument(f"--{name}", default=None)
        p.add_argument("--config", default=None)
        if command in _OUTPUT_COMMANDS:
            p.add_argument("--out", default=None)
        if command in _PLOT_COMMANDS:
            p.add_argument("--plot", action="store_true")
    return parser


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    config: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read config file {path}: {exc}")
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CLIError(f"config line {line_no} is not key=value: {line!r}")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


def _resolve(args: argparse.Namespace, command: str) -> dict:
    config = _load_config(args.config)
    resolved = {}
    for name, spec in _OPTIONS[command].items():
        converter, default = spec if isinstance(spec, tuple) else (spec, _REQUIRED)
        raw = getattr(args, name.replace("-", "_"))
        if raw is None:
            raw = config.get(name)
        if raw is None:
            if default is _REQUIRED:
                raise CLIError(f"missing required flag --{name}")
            resolved[name.replace("-", "_")] = default
            continue
        try:
            resolved[name.replace("-", "_")] = converter(raw)
        except (TypeError, ValueError):
            raise CLIError(f"invalid value for --{name}: {raw!r}")
    return resolved


def _emit(rows, columns, args, plot_fn=None) -> None:
    out = getattr(args, "out", None)
    if getattr(args, "plot", False) and out is None:
        raise CLIError("--plot requires --out to name the data file")
    if out is None:
        sys.stdout.write(render_csv(columns, rows))
        return
    write_csv(out, columns, rows)
    if getattr(args, "plot", False) and plot_fn is not None:
        plot_fn(rows, str(Path(out).with_suffix(".png")))


def _axis_or_fixed(opts: dict, name: str) -> tuple[Axis | None, float | None]:
    lo, hi, steps = opts.get(f"{name}_min"), opts.get(f"{name}_max"), opts.get(f"{name}_steps")
    fixed = opts.get(name)
    if lo is not None or hi is not None:
        if lo is None or hi is None:
            raise CLIError(f"--{name}-min and --{name}-max must be given together")
        if fixed is not None:
            raise CLIError(f"--{name} conflicts with --{name}-min/--{name}-max")
        return Axis(name, lo, hi, steps), None
    if fixed is not None:
        return None, fixed
    raise CLIError(f"parameter {name} must be fixed (--{name}) or swept (--{name}-min/max)")


def _cmd_gl_payoff(opts, args) -> int:
    game = GLInstance(opts["xa"], opts["xb"], tuple(opts["v"]))
    pay = nominal_payoffs(game)
    print(f"piA={format_value(pay.payoff_a)} piB={format_value(pay.payoff_b)}")
    return 0


def _cmd_gl_precommit(opts, args) -> int:
    game = GLInstance(opts["xa"], opts["xb"], tuple(opts["v"]))
    if opts["battlefield"] is not None:
        p, u_b, attained = optimal_single_precommit(game, opts["battlefield"], opts["epsilon"])
        threshold = min_beneficial_value(game.budget_a, game.budget_b, game.total_value)
        nominal = nominal_payoffs(game).payoff_b
        print(
            f"p={format_value(p)} uB={format_value(u_b)} "
            f"attained={format_value(attained)} nominal={format_value(nominal)} "
            f"threshold={format_value(threshold) or 'none'}"
        )
        return 0
    if opts["targets"] is None or opts["p"] is None:
        raise CLIError("provide --battlefield to optimize, or --targets with --p to evaluate")
    if len(opts["targets"]) != len(opts["p"]):
        raise CLIError("--targets and --p must have the same length")
    pc = PreCommitment(dict(zip(opts["targets"], opts["p"])))
    response, u_a = best_response_A(pc, game)
    matched = ",".join(str(b) for b in sorted(response.matched)) or "-"
    u_b = game.total_value - u_a
    print(
        f"matched={matched} spent={format_value(response.spent)} "
        f"uA={format_value(u_a)} uB={format_value(u_b)}"
    )
    return 0


def _cmd_gl_region(opts, args) -> int:
    config = SweepConfig(
        axes=(
            Axis("xa", opts["xa_min"], opts["xa_max"], opts["xa_steps"]),
            Axis("xb", opts["xb_min"], opts["xb_max"], opts["xb_steps"]),
        ),
        fixed={"vbar": opts["vbar"], "phi": opts["phi"]},
        jobs=opts["jobs"],
    )
    rows = region_sweep_gl(config)
    from .plots import plot_gl_region

    _emit(rows, GL_REGION_COLUMNS, args, plot_gl_region)
    return 0


def _cmd_ggl_solve(opts, args) -> int:
    game = GGLInstance(opts["xa"], opts["xb"], opts["alpha"])
    equilibria = find_zeros(game)
    rows = [
        {
            "alpha": opts["alpha"],
            "xa": opts["xa"],
            "xb": opts["xb"],
            "n_equilibria": equilibria.count,
            "sigma": sigma,
            "piA": payoff[0],
            "piB": payoff[1],
            "rank": rank,
        }
        for rank, (sigma, payoff) in enumerate(zip(equilibria.zeros, equilibria.payoffs), start=1)
    ]
    _emit(rows, ("alpha", "xa", "xb", "n_equilibria", "sigma", "piA", "piB", "rank"), args)
    return 0


def _cmd_ggl_precommit(opts, args) -> int:
    game = GGLInstance(opts["xa"], opts["xb"], opts["alpha"])
    if opts["p"] is not None:
        if opts["battlefield"] is None:
            raise CLIError("--p requires --battlefield")
        pc = GGLPreCommit(opts["battlefield"], opts["p"])
        response = response_A(pc, game)
        u_a = uA_match(pc, game) if response is Response.MATCH else uA_withdraw(pc, game)
        print(
            f"response={response.value} uA={format_value(u_a)} "
            f"uB={format_value(uB_ggl(pc, game))}"
        )
        return 0
    pc, u_b = optimal_precommit_ggl(game, opts["epsilon"])
    equilibria = find_zeros(game)
    report = beats_second_best(game) if equilibria.count == 3 else beats_unique(game)
    verdict = report.beats_second_best if equilibria.count == 3 else report.beats_unique
    pi_b = ",".join(format_value(p[1]) for p in equilibria.payoffs)
    print(f"best_b={pc.battlefield} best_p={format_value(pc.amount)} best_uB={format_value(u_b)}")
    print(f"n_equilibria={equilibria.count} piB={pi_b}")
    print(
        f"benchmark={format_value(report.benchmark)} beats={format_value(bool(verdict))} "
        f"basis={report.basis}"
    )
    return 0


def _cmd_ggl_region(opts, args) -> int:
    axes = []
    fixed = {}
    for name in ("alpha", "xa", "xb"):
        axis, value = _axis_or_fixed(opts, name)
        if axis is not None:
            axes.append(axis)
        else:
            fixed[name] = value
    config = SweepConfig(axes=tuple(axes), fixed=fixed, jobs=opts["jobs"])
    rows = region_sweep_ggl(config)
    from .plots import plot_ggl_region

    _emit(rows, GGL_REGION_COLUMNS, args, plot_ggl_region)
    return 0


def _cmd_mc_fig5(opts, args) -> int:
    config = Fig5Config(
        n_samples=opts["samples"],
        budget_a=opts["xa"],
        budget_b=opts["xb"],
        n_battlefields=opts["battlefields"],
        phi=opts["phi"],
        seed=opts["seed"],
        jobs=opts["jobs"],
    )
    rows = fig5_rows_as_dicts(run_fig5(config))
    from .plots import plot_fig5

    _emit(rows, MC_FIG5_COLUMNS, args, plot_fig5)
    return 0


def _cmd_verify(opts, args) -> int:
    reports = run_verification_suite(seed=opts["seed"])
    rows = [
        {
            "quantity": r.quantity,
            "closed_form": r.closed_form,
            "oracle": r.oracle,
            "gap": r.gap,
            "pass": r.passed,
        }
        for r in reports
    ]
    _emit(rows, ("quantity", "closed_form", "oracle", "gap", "pass"), args)
    return 0 if all(r.passed for r in reports) else 1


_HANDLERS = {
    "gl-payoff": _cmd_gl_payoff,
    "gl-precommit": _cmd_gl_precommit,
    "gl-region": _cmd_gl_region,
    "ggl-solve": _cmd_ggl_solve,
    "ggl-precommit": _cmd_ggl_precommit,
    "ggl-region": _cmd_ggl_region,
    "mc-fig5": _cmd_mc_fig5,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve(args, args.command)
        return _HANDLERS[args.command](opts, args)
    except (CLIError, LottoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
