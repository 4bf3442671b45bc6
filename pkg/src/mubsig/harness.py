"""Monte Carlo trial running, exact reference distributions, and the
statistics used to compare the two.

Everything here is deterministic given the configured seed: rounds are
sampled block-wise from streams derived purely from (seed, block index),
so reports are byte-for-byte reproducible at any degree of parallelism.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .bases import BasisId, Family, basis_alphabet
from .finite_field import PrimeDim
from .protocol import (
    PretestRecord,
    RoundRecord,
    SessionReport,
    _decode_codes,
    _INCONCLUSIVE_CODE,
    ideal_pretest_distribution,
    pair_outcome_labels,
    pair_outcome_probs,
    run_original_session,
    run_protocol1_session,
    run_protocol2_session,
)
from .quantum import _frozen
from .streams import derive_round_stream

__all__ = [
    "AnalyticDistribution",
    "ComparisonResult",
    "EveMode",
    "HarnessConfig",
    "Protocol",
    "analytic_outcome_distribution",
    "calibrate_tv_threshold",
    "compare_distributions",
    "derive_round_stream",
    "dual_family_detection_probability",
    "pretest_reference_distribution",
    "run_trials",
]


class Protocol(enum.Enum):
    ORIGINAL = "original"
    TOMOGRAPHIC = "tomographic"
    DUAL_FAMILY = "dualfamily"


class EveMode(enum.Enum):
    OFF = "off"
    INTERCEPT = "intercept"
    DUAL_FAMILY = "dualfamily"


_PROTOCOL_FAMILIES: dict[Protocol, tuple[Family, ...]] = {
    Protocol.ORIGINAL: (Family.PLAIN,),
    Protocol.TOMOGRAPHIC: (Family.PLAIN,),
    Protocol.DUAL_FAMILY: (Family.PLAIN, Family.HAT),
}


@dataclass(frozen=True)
class HarnessConfig:
    """Everything needed to reproduce one session exactly."""

    d: int
    protocol: Protocol
    rounds: int
    eve: EveMode = EveMode.OFF
    pretest_fraction: float | None = None
    posttest_fraction: float | None = None
    seed: int = 0
    message_distribution: str | Mapping[str, float] = "uniform"

    def __post_init__(self) -> None:
        PrimeDim(self.d)
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        if self.eve is EveMode.INTERCEPT and self.protocol is Protocol.DUAL_FAMILY:
            raise ValueError("the intercept-resend strategy targets the "
                             "single-family protocols")
        if self.eve is EveMode.DUAL_FAMILY and self.protocol is not Protocol.DUAL_FAMILY:
            raise ValueError("the dual-family attack targets the dual-family protocol")
        need_pre = self.protocol is Protocol.TOMOGRAPHIC
        need_post = self.protocol in (Protocol.TOMOGRAPHIC, Protocol.DUAL_FAMILY)
        for name, value, needed in (("pretest_fraction", self.pretest_fraction, need_pre),
                                    ("posttest_fraction", self.posttest_fraction, need_post)):
            if needed:
                if value is None or not 0.0 < value < 1.0:
                    raise ValueError(f"{name} must lie in (0, 1) for "
                                     f"protocol {self.protocol.value}")
            elif value is not None:
                raise ValueError(f"{name} does not apply to protocol "
                                 f"{self.protocol.value}")
        self.message_weights()  # validate eagerly

    def alphabet(self) -> tuple[BasisId, ...]:
        return basis_alphabet(self.d, _PROTOCOL_FAMILIES[self.protocol])

    def message_weights(self) -> np.ndarray | None:
        """Message weights aligned to :meth:`alphabet`, or None for uniform."""
        dist = self.message_distribution
        if isinstance(dist, str):
            if dist != "uniform":
                raise ValueError(f"unknown message distribution {dist!r}")
            return None
        alphabet = self.alphabet()
        known = {b.text(): i for i, b in enumerate(alphabet)}
        weights = np.zeros(len(alphabet))
        for label, w in dist.items():
            if label not in known:
                raise ValueError(f"message label {label!r} not in the "
                                 f"{self.protocol.value} alphabet")
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"message weight for {label!r} must be >= 0")
            weights[known[label]] = w
        if weights.sum() <= 0:
            raise ValueError("message weights must not all vanish")
        return weights


@dataclass(frozen=True)
class AnalyticDistribution:
    """A labelled exact probability vector."""

    labels: tuple
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = _frozen(np.asarray(self.probabilities, dtype=float).copy())
        object.__setattr__(self, "probabilities", probs)
        if len(self.labels) != probs.size:
            raise ValueError("labels and probabilities differ in length")
        if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")

    def as_mapping(self) -> dict:
        return dict(zip(self.labels, self.probabilities))


def analytic_outcome_distribution(d: int, bob_basis: BasisId) -> AnalyticDistribution:
    """Alice's exact outcome distribution for one matched-family round.

    Alice prepares the (0,0) pair of ``bob_basis.family``, Bob measures
    the travelling half in ``bob_basis``, and Alice measures the pair in
    her family's entangled basis.  Computed by full matrix algebra; this
    is the brute-force reference the Monte Carlo paths are checked
    against.
    """
    probs = pair_outcome_probs(d, bob_basis.family, bob_basis)
    return AnalyticDistribution(pair_outcome_labels(d), probs)


def pretest_reference_distribution(d: int) -> AnalyticDistribution:
    """The undisturbed pre-test joint distribution over (b, m, a, m')."""
    labels, probs = ideal_pretest_distribution(d)
    return AnalyticDistribution(labels, probs)


@dataclass(frozen=True)
class ComparisonResult:
    """Total-variation distance of empirical counts from a reference."""

    tv_distance: float
    threshold: float
    passed: bool


def compare_distributions(counts: np.ndarray | Mapping, reference: AnalyticDistribution,
                          threshold: float) -> ComparisonResult:
    """Compare empirical counts against an exact reference distribution.

    ``counts`` is either an array aligned to ``reference.labels`` or a
    mapping from label to count.  The statistic is the total-variation
    distance; it passes when it does not exceed ``threshold``.
    """
    if isinstance(counts, Mapping):
        unknown = set(counts) - set(reference.labels)
        if unknown:
            raise ValueError(f"counts carry labels outside the reference: "
                             f"{sorted(map(str, unknown))[:3]}")
        aligned = np.array([counts.get(label, 0) for label in reference.labels],
                           dtype=float)
    else:
        aligned = np.asarray(counts, dtype=float)
        if aligned.size != reference.probabilities.size:
            raise ValueError(f"expected {reference.probabilities.size} counts, "
                             f"got {aligned.size}")
    if aligned.min() < 0:
        raise ValueError("counts must be nonnegative")
    total = aligned.sum()
    if total <= 0:
        raise ValueError("counts must not be empty")
    tv = 0.5 * np.abs(aligned / total - reference.probabilities).sum()
    return ComparisonResult(float(tv), float(threshold), bool(tv <= threshold))


def calibrate_tv_threshold(reference: AnalyticDistribution, sample_size: int,
                           seed: int, *, runs: int = 4000, quantile: float = 0.999,
                           margin: float = 1.5) -> float:
    """Threshold for the pre-test statistic, calibrated by simulation.

    Draws ``runs`` undisturbed count vectors of ``sample_size`` rounds,
    takes the requested quantile of their total-variation distances, and
    inflates it by ``margin``.  The margin keeps the false-alarm rate
    negligible across many repetitions while staying far below the
    order-one divergence an interception produces.
    """
    if sample_size < 1 or runs < 1:
        raise ValueError("sample_size and runs must be >= 1")
    rng = derive_round_stream(seed, 0)
    draws = rng.multinomial(sample_size, reference.probabilities, size=runs)
    tvs = 0.5 * np.abs(draws / sample_size - reference.probabilities).sum(axis=1)
    return float(margin * np.quantile(tvs, quantile))


def dual_family_detection_probability(d: int, eve_family: Family = Family.PLAIN,
                                      message_weights: np.ndarray | None = None,
                                      ) -> float:
    """Exact P(checked decode names the wrong basis | round survived sifting).

    Closed-form summation over Alice's family, Bob's basis, the
    attacker's outcome, and Alice's outcome, with the attacker running
    her substitution attack in ``eve_family``.  This is the quantity the
    dual-family session's ``detection_rate`` estimates.
    """
    PrimeDim(d)
    alphabet = basis_alphabet(d, (Family.PLAIN, Family.HAT))
    weights = message_weights
    if weights is None:
        weights = np.full(len(alphabet), 1.0 / len(alphabet))
    else:
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
    codes = _decode_codes(d)
    eve_labels = [BasisId(eve_family, None)] + [BasisId(eve_family, b) for b in range(d)]
    p_kept = 0.0
    p_mismatch = 0.0
    for alice_family in (Family.PLAIN, Family.HAT):
        for w, bob in zip(weights, alphabet):
            if bob.family is not alice_family:
                continue
            base = 0.5 * w  # alice family choice is a fair coin
            bob_code = d if bob.quad is None else bob.quad
            eve_probs = pair_outcome_probs(d, eve_family, bob)
            for eve_idx, q in enumerate(eve_probs):
                if q == 0.0:
                    continue
                eve_code = codes[eve_idx]
                if eve_code == _INCONCLUSIVE_CODE:
                    continue  # pair goes back untouched: Alice reads (0,0), discarded
                row = 0 if eve_code == d else eve_code + 1
                alice_probs = pair_outcome_probs(d, alice_family, eve_labels[row])
                conclusive = codes != _INCONCLUSIVE_CODE
                kept_weight = base * q * alice_probs[conclusive].sum()
                wrong_weight = base * q * alice_probs[conclusive
                                                      & (codes != bob_code)].sum()
                p_kept += kept_weight
                p_mismatch += wrong_weight
    if p_kept <= 0.0:
        raise RuntimeError("attack left no sifted conclusive rounds")
    return p_mismatch / p_kept


def run_trials(config: HarnessConfig, *, workers: int = 1,
               return_rounds: bool = False,
               ) -> SessionReport | tuple[SessionReport,
                                          list[RoundRecord | PretestRecord]]:
    """Run one session described by ``config``.

    Deterministic given ``config.seed``; ``workers`` only spreads the
    fixed blocks over threads and cannot change any reported value.
    With ``return_rounds=True`` also returns the per-round records, in
    round order.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    weights = config.message_weights()
    eve = config.eve is not EveMode.OFF
    if config.protocol is Protocol.ORIGINAL:
        report, records = run_original_session(
            config.d, config.rounds, config.seed, eve=eve,
            message_weights=weights, workers=workers, collect=return_rounds)
    elif config.protocol is Protocol.TOMOGRAPHIC:
        report, records = run_protocol1_session(
            config.d, config.rounds, config.pretest_fraction,
            config.posttest_fraction, config.seed, eve=eve,
            message_weights=weights, workers=workers, collect=return_rounds)
    else:
        report, records = run_protocol2_session(
            config.d, config.rounds, config.posttest_fraction, config.seed,
            eve=eve, message_weights=weights, workers=workers,
            collect=return_rounds)
    if return_rounds:
        return report, records
    return report
