"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
precision problem.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import mpmath

from .construction import ConstructionParams, compute_Cd
from .experiments import (
    CSV_COLUMNS,
    estimate,
    estimate_to_dict,
    families_for,
    measure_family,
    best_approx_enum_n2,
    sigma_hat_n2,
    verify_lemmas,
)
from .numeric_core import InfeasiblePrecision, format_rational

COMMANDS = ("cd", "verify", "exponents", "oracle")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ConstructionParams | None
    N_range: tuple[int, ...] | None
    e_list: tuple[int, ...] | None
    out: Path | None
    fmt: str
    seed: int
    threads: int
    precision_bits: int | None


def shipped_config(name: str) -> Path:
    return Path(str(resources.files("subspace_approx") / "configs" / f"{name}.json"))


def load_params(source: str) -> ConstructionParams:
    """Load a params file, or a shipped config by name (``d1_q2``, ``d2_q1``, ``d1_q1``)."""
    path = Path(source)
    if not path.exists():
        path = shipped_config(source)
    if not path.exists():
        raise ConfigError(f"params file not found: {source}")
    try:
        return ConstructionParams.load(path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid params file {source}: {exc}") from exc


def parse_range(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad --n-range {text!r}; expected A..B") from exc
    if lo < 0 or hi < lo:
        raise ConfigError(f"bad --n-range {text!r}")
    return tuple(range(lo, hi + 1))


def parse_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError as exc:
        raise ConfigError(f"bad --e list {text!r}") from exc


def parse_corrupt(items: list[str]) -> tuple[tuple[tuple[int, int], int], ...]:
    out = []
    for item in items or []:
        try:
            j, k, v = (int(x) for x in item.split(":"))
        except ValueError as exc:
            raise ConfigError(f"bad --corrupt-digit {item!r}; expected J:K:VALUE") from exc
        out.append(((j, k), v))
    return tuple(sorted(out))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subspace-approx",
        description="Exact and certified experiments on subspaces with prescribed approximation exponents.",
    )
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="COMMAND", help=" | ".join(COMMANDS))
    p.add_argument("--command", choices=COMMANDS, help="alternative to the positional command")
    p.add_argument("--params", help="params JSON file or shipped config name")
    p.add_argument("--d", type=int, help="cd: dimension d")
    p.add_argument("--q", type=int, help="cd: q")
    p.add_argument("--tol", default="1e-6", help="cd: bisection tolerance (decimal or p/q)")
    p.add_argument("--e", help="comma-separated list of e")
    p.add_argument("--n-range", help="A..B (inclusive)")
    p.add_argument("--format", choices=("csv", "json"), help="report format")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--precision-bits", type=int, help="override the working precision")
    p.add_argument("--max-gap", default="0.15", help="exponents: largest accepted relative gap at the last N")
    p.add_argument("--qmax", type=int, default=10**4, help="oracle: largest denominator")
    p.add_argument("--margin", default="1/2", help="oracle: exponent margin above alpha")
    p.add_argument("--corrupt-digit", action="append", metavar="J:K:VALUE", help=argparse.SUPPRESS)
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_cd(d: int, q: int, tol: Fraction) -> int:
    if d is None or q is None or d < 1 or q < 1:
        raise ConfigError("cd needs --d >= 1 and --q >= 1")
    if tol <= 0:
        raise ConfigError("--tol must be positive")
    c = compute_Cd(d, q, tol)
    with mpmath.workprec(64):
        dec = mpmath.nstr(mpmath.mpf(c.numerator) / c.denominator, 12)
    print(f"C_d(d={d}, q={q}) <= {format_rational(c)}")
    print(f"approx {dec} (tol {format_rational(tol)}, upper bound 3d(d+4) = {3 * d * (d + 4)})")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    Ns = cfg.N_range or (0, 1, 2)
    rep = verify_lemmas(cfg.params, Ns, cfg.seed)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "passed", "detail"])
        for c in rep.checks:
            w.writerow([c.name, int(c.passed), c.detail])
        text = buf.getvalue()
    else:
        text = rep.to_json()
    _emit(text, cfg.out)
    for c in rep.failing():
        print(f"FAILED {c.name}: {c.detail}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def default_N_range(params: ConstructionParams) -> tuple[int, ...]:
    top = params.M - params.q - 1
    if top < 1:
        raise ConfigError(f"M={params.M} too small for any measurement (need M >= q + 2)")
    return tuple(range(1, top + 1))


def cmd_exponents(cfg: RunConfig, max_gap: Fraction) -> int:
    p = cfg.params
    Ns = cfg.N_range or default_N_range(p)
    es = cfg.e_list or tuple(range(1, p.q * p.d + 1))
    estimates = []
    for e in es:
        fams = families_for(e, p)
        if not fams:
            raise ConfigError(f"e={e} outside [1, {p.q * p.d}]")
        for fam in fams:
            rows = measure_family(p, fam, e, Ns, bits=cfg.precision_bits, threads=cfg.threads)
            estimates.append(estimate(p, fam, e, rows))
    estimates.sort(key=lambda est: (est.e, est.family))
    dicts = [estimate_to_dict(p, est) for est in estimates]
    if cfg.fmt == "json":
        text = json.dumps({"params": p.to_dict(), "N_range": list(Ns), "estimates": dicts}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for dct in dicts:
            for row in dct["rows"]:
                w.writerow(row)
        text = buf.getvalue()
    _emit(text, cfg.out)
    ok = True
    for est in estimates:
        if est.relative_gap >= max_gap.numerator / mpmath.mpf(max_gap.denominator):
            ok = False
            print(
                f"FAILED exponent family={est.family} e={est.e}: rel_gap {mpmath.nstr(est.relative_gap, 6)}",
                file=sys.stderr,
            )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(cfg: RunConfig, qmax: int, margin: Fraction) -> int:
    p = cfg.params
    sigma_hat, tail = sigma_hat_n2(p, qmax)
    table = best_approx_enum_n2(sigma_hat, qmax, tail_bound=tail, alpha=p.alpha)
    beats = table.beats(p.alpha + margin)
    with mpmath.workprec(64):
        recs = [
            {"b": b, "a": a, "error": mpmath.nstr(mpmath.mpf(err.numerator) / err.denominator, 10)}
            for b, a, err in table.records
        ]
    report = {
        "params": p.to_dict(),
        "qmax": qmax,
        "exponent_checked": format_rational(p.alpha + margin),
        "records": recs,
        "violations": beats,
    }
    _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    return EXIT_OK if not beats else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)  # reports carry integers with many thousands of digits
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command or args.command_pos
    if command is None:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return EXIT_CONFIG
    if args.command and args.command_pos and args.command != args.command_pos:
        print("error: conflicting commands", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if command == "cd":
            return cmd_cd(args.d, args.q, _fraction_arg(args.tol, "--tol"))
        default_cfg = {"verify": "d1_q2", "exponents": "d1_q2", "oracle": "d1_q1"}[command]
        params = load_params(args.params or default_cfg)
        overrides = parse_corrupt(args.corrupt_digit)
        if overrides:
            params = params.with_(digit_overrides=overrides)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = RunConfig(
            command=command,
            params=params,
            N_range=parse_range(args.n_range) if args.n_range else None,
            e_list=parse_list(args.e) if args.e else None,
            out=Path(args.out) if args.out else None,
            fmt=args.format or ("csv" if command == "exponents" else "json"),
            seed=args.seed,
            threads=args.threads,
            precision_bits=args.precision_bits,
        )
        if command == "verify":
            return cmd_verify(cfg)
        if command == "exponents":
            return cmd_exponents(cfg, _fraction_arg(args.max_gap, "--max-gap"))
        return cmd_oracle(cfg, args.qmax, _fraction_arg(args.margin, "--margin"))
    except (ConfigError, InfeasiblePrecision) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _fraction_arg(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad {flag} value {text!r}") from exc


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
