"""Report documents: canonical serialization of a session and its config.

A report document carries the artifact version, a config echo, and the
session results.  The config echo alone reproduces the run exactly, and
serialization is canonical (sorted keys, fixed layout, no volatile
fields), so re-running any report's config yields a byte-identical
document.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .harness import EveMode, HarnessConfig, Protocol, analytic_outcome_distribution
from .protocol import PretestRecord, RoundRecord, SessionReport

SCHEMA = "mubsig.report/1"

__all__ = [
    "SCHEMA",
    "build_document",
    "canonical_json",
    "config_from_document",
    "render_text",
    "round_log_csv",
]


def _config_echo(config: HarnessConfig) -> dict:
    dist = config.message_distribution
    if isinstance(dist, Mapping):
        dist = {str(k): float(v) for k, v in dist.items()}
    return {
        "dim": config.d,
        "protocol": config.protocol.value,
        "eve": config.eve.value,
        "rounds": config.rounds,
        "seed": config.seed,
        "pretest_fraction": config.pretest_fraction,
        "posttest_fraction": config.posttest_fraction,
        "message_distribution": dist,
    }


def _results(report: SessionReport) -> dict:
    return {
        "rounds": report.rounds,
        "sifted": report.sifted,
        "decode_accuracy": report.decode_accuracy,
        "inconclusive_rate": report.inconclusive_rate,
        "detection_rate": report.detection_rate,
        "eve_information_rate": report.eve_information_rate,
        "pretest_divergence": report.pretest_divergence,
        "seed": report.seed,
    }


def build_document(config: HarnessConfig, report: SessionReport, *,
                   include_tables: bool = False) -> dict:
    """Assemble the full report document for one finished session."""
    from . import __version__

    doc = {
        "schema": SCHEMA,
        "artifact": {"name": "mubsig", "version": __version__},
        "config": _config_echo(config),
        "results": _results(report),
    }
    if include_tables:
        tables = {}
        for basis in config.alphabet():
            dist = analytic_outcome_distribution(config.d, basis)
            tables[basis.text()] = {f"{c},{r}": float(p)
                                    for (c, r), p in dist.as_mapping().items()}
        doc["tables"] = tables
    return doc


def canonical_json(document: Mapping) -> str:
    """Serialize a document deterministically (sorted keys, 2-space indent)."""
    return json.dumps(document, sort_keys=True, indent=2,
                      ensure_ascii=True, allow_nan=False) + "\n"


def config_from_document(document: Mapping) -> HarnessConfig:
    """Rebuild a HarnessConfig from a config mapping or a full report.

    Accepts either the bare config echo (keys mirroring the CLI flags)
    or an entire report document, whose ``config`` section is used.
    Raises ValueError on unknown keys or malformed values.
    """
    if not isinstance(document, Mapping):
        raise ValueError("config document must be a mapping")
    if "config" in document and isinstance(document["config"], Mapping):
        document = document["config"]
    data = {str(k).replace("-", "_"): v for k, v in document.items()}
    known = {"dim", "protocol", "eve", "rounds", "seed",
             "pretest_fraction", "posttest_fraction", "message_distribution"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("dim", "protocol", "rounds"):
        if key not in data:
            raise ValueError(f"config is missing required key {key!r}")
    try:
        protocol = Protocol(data["protocol"])
    except ValueError:
        raise ValueError(f"unknown protocol {data['protocol']!r}") from None
    try:
        eve = EveMode(data.get("eve", "off"))
    except ValueError:
        raise ValueError(f"unknown eve mode {data['eve']!r}") from None
    def _number(key, kind):
        value = data.get(key)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"config key {key!r} must be a number")
        return kind(value)
    return HarnessConfig(
        d=_number("dim", int),
        protocol=protocol,
        rounds=_number("rounds", int),
        eve=eve,
        pretest_fraction=_number("pretest_fraction", float),
        posttest_fraction=_number("posttest_fraction", float),
        seed=_number("seed", int) if data.get("seed") is not None else 0,
        message_distribution=data.get("message_distribution", "uniform"),
    )


def render_text(document: Mapping) -> str:
    """Human-readable summary of a report document."""
    config = document["config"]
    results = document["results"]
    lines = [
        f"session  d={config['dim']} protocol={config['protocol']} "
        f"eve={config['eve']} seed={config['seed']}",
        f"rounds   total={results['rounds']} sifted={results['sifted']}",
        f"rates    decode_accuracy={results['decode_accuracy']:.6f} "
        f"inconclusive={results['inconclusive_rate']:.6f}",
        f"         detection={results['detection_rate']:.6f} "
        f"eve_information={results['eve_information_rate']:.6f}",
    ]
    if results.get("pretest_divergence") is not None:
        lines.append(f"pretest  tv_divergence={results['pretest_divergence']:.6f}")
    return "\n".join(lines) + "\n"


_CSV_COLUMNS = ("round", "phase", "bob_basis", "bob_outcome", "alice_basis",
                "alice_family", "alice_outcome_c", "alice_outcome_r",
                "alice_outcome_m", "decode", "eve_outcome_c", "eve_outcome_r",
                "eve_decode", "eve_forward_basis")


def round_log_csv(records: Sequence[PretestRecord | RoundRecord]) -> str:
    """Flat per-round CSV log, one row per round in session order."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for i, rec in enumerate(records):
        row = {"round": i}
        if isinstance(rec, PretestRecord):
            row.update(phase="pretest",
                       bob_basis=rec.bob_basis.text(),
                       bob_outcome=rec.bob_outcome,
                       alice_basis=rec.alice_basis.text(),
                       alice_outcome_m=rec.alice_outcome)
        else:
            c, r = rec.alice_outcome
            row.update(phase="signal",
                       bob_basis=rec.bob_basis.text(),
                       alice_family=rec.alice_prep_family.value,
                       alice_outcome_c=int(c),
                       alice_outcome_r=int(r),
                       decode=rec.alice_decode.text())
            if rec.eve_active:
                ec, er = rec.eve_outcome
                row.update(eve_outcome_c=int(ec), eve_outcome_r=int(er),
                           eve_decode=rec.eve_decode.text(),
                           eve_forward_basis=(rec.eve_forward_basis.text()
                                              if rec.eve_forward_basis else ""))
        writer.writerow([row.get(col, "") for col in _CSV_COLUMNS])
    return out.getvalue()
