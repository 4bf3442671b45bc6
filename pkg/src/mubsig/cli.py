"""Command-line interface.

Subcommands:

* ``run``    execute one session and emit a report (json, text, or a
             per-round csv log),
* ``table``  print the exact outcome distribution for a basis choice,
             rows are the sender's choice and columns the receiver's
             pair outcome,
* ``verify`` run the built-in invariant suite for one dimension.

Exit codes: 0 success, 1 invariant failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bases import BasisId, Family, basis_alphabet
from .finite_field import is_prime
from .harness import HarnessConfig, analytic_outcome_distribution, run_trials
from .protocol import pair_outcome_labels
from .report import (
    build_document,
    canonical_json,
    config_from_document,
    render_text,
    round_log_csv,
)
from .verify import run_invariant_suite

__all__ = ["main"]

_USAGE_ERROR = 2
_CHECK_FAILURE = 1


class _CliError(Exception):
    """Usage or configuration problem; maps to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mubsig",
        description="Entangled-pair signaling with mutually unbiased bases: "
                    "sessions, reference tables, and invariant checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one session and write a report")
    run.add_argument("--dim", type=int, help="prime Hilbert-space dimension")
    run.add_argument("--protocol", choices=["original", "tomographic", "dualfamily"],
                     help="which signaling protocol to run")
    run.add_argument("--eve", choices=["off", "intercept", "dualfamily"],
                     help="eavesdropping strategy (default off)")
    run.add_argument("--rounds", type=int, help="number of rounds")
    run.add_argument("--seed", type=int, help="session seed (default 0)")
    run.add_argument("--pretest-fraction", type=float,
                     help="fraction of rounds spent on the tomography pre-test")
    run.add_argument("--posttest-fraction", type=float,
                     help="fraction of conclusive rounds revealed for checking")
    run.add_argument("--workers", type=int, default=1,
                     help="worker threads (never changes results)")
    run.add_argument("--format", choices=["json", "csv", "text"], default="json",
                     help="report format; csv is the flat per-round log")
    run.add_argument("--out", type=Path, help="write to this path instead of stdout")
    run.add_argument("--config", type=Path,
                     help="JSON config file (a report document also works); "
                          "explicit flags override its entries")
    run.add_argument("--include-tables", action="store_true",
                     help="embed the exact outcome tables in the report")

    table = sub.add_parser("table", help="print an exact outcome distribution")
    table.add_argument("--dim", type=int, required=True,
                       help="prime Hilbert-space dimension")
    table.add_argument("--basis",
                       help="basis label (comp, q<b>, hat-comp, hat-q<b>); "
                            "default: every plain basis")
    table.add_argument("--format", choices=["json", "csv", "text"], default="text")
    table.add_argument("--out", type=Path, help="write to this path instead of stdout")

    verify = sub.add_parser("verify", help="run the invariant suite")
    verify.add_argument("--dim", type=int, default=2,
                        help="prime Hilbert-space dimension (default 2)")
    verify.add_argument("--format", choices=["json", "text"], default="text")
    return parser


def _require_prime_dim(d: int | None) -> int:
    if d is None:
        raise _CliError("--dim is required (directly or via --config)")
    if not is_prime(d):
        raise _CliError(f"--dim must be prime, got {d}")
    return d


def _load_config_file(path: Path) -> dict:
    try:
        raw = path.read_text()
    except OSError as exc:
        raise _CliError(f"cannot read config file: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _CliError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise _CliError(f"config file {path} must hold a JSON object")
    return data


def _merge_run_config(args: argparse.Namespace) -> HarnessConfig:
    base: dict = {}
    if args.config is not None:
        data = _load_config_file(args.config)
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        base = {str(k).replace("-", "_"): v for k, v in data.items()}
    overrides = {
        "dim": args.dim,
        "protocol": args.protocol,
        "eve": args.eve,
        "rounds": args.rounds,
        "seed": args.seed,
        "pretest_fraction": args.pretest_fraction,
        "posttest_fraction": args.posttest_fraction,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    base.setdefault("eve", "off")
    base.setdefault("seed", 0)
    _require_prime_dim(base.get("dim"))
    try:
        return config_from_document(base)
    except (ValueError, TypeError) as exc:
        raise _CliError(str(exc)) from exc


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _merge_run_config(args)
    if args.workers < 1:
        raise _CliError("--workers must be >= 1")
    if args.format == "csv":
        report, records = run_trials(config, workers=args.workers,
                                     return_rounds=True)
        _emit(round_log_csv(records), args.out)
        return 0
    report = run_trials(config, workers=args.workers)
    document = build_document(config, report, include_tables=args.include_tables)
    if args.format == "json":
        _emit(canonical_json(document), args.out)
    else:
        _emit(render_text(document), args.out)
    return 0


def _table_rows(d: int, basis_arg: str | None) -> list[BasisId]:
    if basis_arg is None:
        return list(basis_alphabet(d, (Family.PLAIN,)))
    try:
        basis = BasisId.parse(basis_arg)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    if basis.quad is not None and basis.quad >= d:
        raise _CliError(f"basis {basis_arg!r} is out of range for --dim {d}")
    return [basis]


def _cmd_table(args: argparse.Namespace) -> int:
    d = _require_prime_dim(args.dim)
    rows = _table_rows(d, args.basis)
    labels = pair_outcome_labels(d)
    dists = {b: analytic_outcome_distribution(d, b) for b in rows}
    if args.format == "json":
        doc = {"dim": d,
               "rows": {b.text(): {f"{c},{r}": float(p)
                                   for (c, r), p in dists[b].as_mapping().items()}
                        for b in rows}}
        _emit(canonical_json(doc), args.out)
        return 0
    if args.format == "csv":
        lines = ["basis,c,r,probability"]
        for b in rows:
            for (c, r), p in dists[b].as_mapping().items():
                lines.append(f"{b.text()},{c},{r},{float(p)!r}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    width = max(8, max(len(b.text()) for b in rows) + 2)
    header = "".join(f"{f'({c},{r})':>9}" for c, r in labels)
    lines = [f"{'basis':<{width}}{header}"]
    for b in rows:
        cells = "".join(f"{p:>9.4f}" for p in dists[b].probabilities)
        lines.append(f"{b.text():<{width}}{cells}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    d = _require_prime_dim(args.dim)
    results = run_invariant_suite(d)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        doc = {"dim": d,
               "passed": not failed,
               "checks": [{"name": r.name, "passed": r.passed,
                           "assertions": r.assertions, "detail": r.detail}
                          for r in results]}
        sys.stdout.write(canonical_json(doc))
    else:
        for r in results:
            mark = "ok  " if r.passed else "FAIL"
            line = f"[{mark}] {r.name} ({r.assertions} assertions)"
            if not r.passed and r.detail:
                line += f": {r.detail}"
            print(line)
        total = sum(r.assertions for r in results)
        print(f"{len(results) - len(failed)}/{len(results)} checks passed, "
              f"{total} assertions, d={d}")
    return _CHECK_FAILURE if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "table":
            return _cmd_table(args)
        return _cmd_verify(args)
    except _CliError as exc:
        print(f"mubsig: error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except (ValueError, TypeError) as exc:
        print(f"mubsig: error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
