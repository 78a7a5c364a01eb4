"""Command line: norming tables, path simulation, tail ratios and verification.

Every subcommand can also be driven by a ``key=value`` config (``maxscheme run
FILE``); see ``parse_config``.  CSV numbers are written with ``%.17g`` so they
round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import pdmp, scheme, verify
from .distributions import parse_model
from .errors import CompatibilityError, MaxSchemeError, ParseError
from .evt_limits import ExtremeType, parse_type
from .norming import NormingSequence
from .stats import compact_grid, tail_ratio
from .streams import THREADS_ENV

COMMANDS = ("norming", "simulate-scheme", "simulate-sde", "verify", "tail-ratio")
SUITE_CHOICES = ("all",) + tuple(verify.SUITES)


@dataclass(frozen=True)
class ExperimentConfig:
    command: str = "verify"
    model: Optional[str] = None
    type: Optional[str] = None
    n_max: Optional[int] = None
    n: Optional[int] = None
    horizon: Optional[float] = None
    paths: int = 10
    seed: int = 0
    record_at: tuple = ()
    x0: str = "stationary"
    x: tuple = ()
    csv: Optional[str] = None
    json: Optional[str] = None
    suite: tuple = ("all",)
    threads: Optional[int] = None
    warnings: tuple = field(default=(), compare=False)

    def limit_type(self) -> ExtremeType:
        if self.type is not None:
            return parse_type(self.type)
        if self.model is not None:
            return ExtremeType.for_doa(parse_model(self.model).doa)
        raise CompatibilityError("neither a model nor an extreme type was given")


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


_KEYS = {
    "command": str, "model": str, "type": str, "n_max": int, "n": int, "horizon": float,
    "paths": int, "seed": int, "record_at": str, "x0": str, "x": _floats, "csv": str,
    "json": str, "suite": lambda s: tuple(v for v in s.split(",") if v), "threads": int,
}


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check model/type compatibility and attach warnings; returns the checked config."""
    notes = []
    if cfg.command not in COMMANDS:
        raise ParseError(f"unknown command {cfg.command!r}; expected one of {', '.join(COMMANDS)}")
    etype = None
    try:
        if cfg.type is not None:
            etype = parse_type(cfg.type)
        if cfg.model is not None:
            implied = ExtremeType.for_doa(parse_model(cfg.model).doa)
            if etype is not None and etype != implied:
                raise CompatibilityError(f"model {cfg.model} is attracted to {implied.spec}, not {etype.spec}")
            etype = implied
    except CompatibilityError:
        raise
    except (ValueError, MaxSchemeError) as exc:
        raise ParseError(str(exc)) from exc
    if etype is not None and etype.kind == "frechet" and etype.alpha <= 2:
        msg = (f"Frechet index alpha = {etype.alpha:g} <= 2: the convergence theorem is stated for "
               "alpha > 2 (alpha > 1 suffices for the marginal statement); results are exploratory")
        warnings.warn(msg, UserWarning, stacklevel=2)
        notes.append(msg)
    unknown = [s for s in cfg.suite if s not in SUITE_CHOICES]
    if unknown:
        raise ParseError(f"unknown suite(s): {', '.join(unknown)}")
    return replace(cfg, warnings=tuple(notes))


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key=value`` tokens (whitespace or newline separated, ``#`` comments)."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for token in line.split():
            key, sep, raw = token.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or not raw:
                raise ParseError(f"line {lineno}: expected key=value, got {token!r}")
            if key not in _KEYS:
                raise ParseError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            try:
                values[key] = _KEYS[key](raw)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    return validate(ExperimentConfig(**values))


def _record_points(cfg: ExperimentConfig, as_int: bool):
    raw = cfg.record_at
    if isinstance(raw, str):
        raw = _ints(raw) if as_int else _floats(raw)
    return tuple(int(v) if as_int else float(v) for v in raw)


# -- output ----------------------------------------------------------------
def write_csv(path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _emit(cfg: ExperimentConfig, header, columns, out):
    if cfg.csv:
        write_csv(cfg.csv, header, columns)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(v) for v in row])


# -- commands --------------------------------------------------------------
def _need(cfg: ExperimentConfig, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ParseError(f"{cfg.command} needs {', '.join(missing)}")


def _norming(cfg, out) -> bool:
    _need(cfg, "model", "n_max")
    tab = NormingSequence(parse_model(cfg.model)).table(cfg.n_max)
    keys = ["n", "theta", "gamma", "a", "b", "rho", "beta"]
    _emit(cfg, keys, [tab[k] for k in keys], out)
    return True


def _simulate_scheme(cfg, out) -> bool:
    _need(cfg, "model", "n_max")
    model = parse_model(cfg.model)
    seq = NormingSequence(model)
    rec = _record_points(cfg, as_int=True) or (cfg.n_max,)
    x = scheme.simulate_paths(model, seq, cfg.n_max, cfg.paths, cfg.seed, rec, threads=cfg.threads)
    # one row per recorded index, one column per path
    header = ["n"] + [f"path{i}" for i in range(cfg.paths)]
    _emit(cfg, header, [np.asarray(rec)] + [x[i] for i in range(cfg.paths)], out)
    return True


def _simulate_sde(cfg, out) -> bool:
    _need(cfg, "type")
    etype = parse_type(cfg.type)
    times = _record_points(cfg, as_int=False)
    if cfg.horizon is not None:
        if any(t > cfg.horizon for t in times):
            raise ParseError("record times must not exceed the horizon")
        if not times or times[-1] < cfg.horizon:
            times = times + (float(cfg.horizon),)
    if not times:
        raise ParseError("simulate-sde needs --horizon or --record-at")
    x0 = cfg.x0 if cfg.x0 == "stationary" else float(cfg.x0)
    x = pdmp.simulate_paths(etype, x0, times, cfg.paths, cfg.seed, threads=cfg.threads)
    header = ["t"] + [f"path{i}" for i in range(cfg.paths)]
    t_col = np.concatenate([[0.0], times])
    _emit(cfg, header, [t_col] + [x[i] for i in range(cfg.paths)], out)
    return True


def _tail_ratio(cfg, out) -> bool:
    _need(cfg, "model", "n")
    model = parse_model(cfg.model)
    seq = NormingSequence(model)
    etype = seq.extreme_type
    grid = np.asarray(cfg.x, dtype=float) if cfg.x else compact_grid(etype)
    ratio = np.atleast_1d(tail_ratio(model, seq, cfg.n, grid))
    tau = np.atleast_1d(etype.tau(grid))
    _emit(cfg, ["x", "ratio", "tau", "gap"], [grid, ratio, tau, np.abs(ratio - tau)], out)
    print(f"sup gap at n={cfg.n}: {np.max(np.abs(ratio - tau)):.6g}", file=sys.stderr)
    return True


def _verify(cfg, out) -> bool:
    report = verify.run_suites(list(cfg.suite), cfg.seed, cfg.threads)
    text = verify.report_json(report)
    if cfg.json:
        Path(cfg.json).write_text(text)
    for name, suite in report["suites"].items():
        for c in suite["checks"]:
            mark = "PASS" if c["pass"] else "FAIL"
            print(f"{mark} [{name}] {c['name']}: {c['measured']:.6g} (threshold {c['threshold']:.6g})",
                  file=sys.stderr)
    if not cfg.json:
        out.write(text)
    return bool(report["pass"])


_RUNNERS = {
    "norming": _norming,
    "simulate-scheme": _simulate_scheme,
    "simulate-sde": _simulate_sde,
    "tail-ratio": _tail_ratio,
    "verify": _verify,
}


def run(cfg: ExperimentConfig, out=None) -> bool:
    """Execute a validated config; returns the overall pass flag (True for non-verify commands)."""
    cfg = validate(cfg)
    return _RUNNERS[cfg.command](cfg, out or sys.stdout)


# -- argparse --------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxscheme", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norming", help="table of n, theta, gamma, a, b, rho, beta")
    s.add_argument("--model", required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--csv")

    s = sub.add_parser("simulate-scheme", help="normalised maxima at recorded indices")
    s.add_argument("--model", required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--paths", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--record-at", type=_ints, default=())
    s.add_argument("--csv")

    s = sub.add_parser("simulate-sde", help="exact limit-process paths at recorded times")
    s.add_argument("--type", required=True)
    s.add_argument("--x0", default="stationary", help="a state in the support, or 'stationary'")
    s.add_argument("--horizon", type=float)
    s.add_argument("--paths", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--record-at", type=_floats, default=())
    s.add_argument("--csv")

    s = sub.add_parser("verify", help="run verification suites; exit 0 iff all pass")
    s.add_argument("--suite", action="append", choices=SUITE_CHOICES)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--json")

    s = sub.add_parser("tail-ratio", help="(1 - F(a_n x + b_n)) / (1 - F(theta_n)) against tau")
    s.add_argument("--model", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--x", type=_floats, default=(), help="comma-separated points (default: compact grid)")
    s.add_argument("--csv")

    s = sub.add_parser("run", help="execute a key=value config file")
    s.add_argument("config")
    for s in sub.choices.values():
        s.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads")
    return p


def _from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.command == "run":
        cfg = parse_config(Path(args.config).read_text())
        return replace(cfg, threads=args.threads) if args.threads is not None else cfg
    names = {f.name for f in fields(ExperimentConfig)}
    values = {k: v for k, v in vars(args).items() if k in names and v is not None}
    if args.command == "verify":
        values["suite"] = tuple(args.suite or ("all",))
    return ExperimentConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _from_args(args)
        ok = run(cfg)
    except (MaxSchemeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
