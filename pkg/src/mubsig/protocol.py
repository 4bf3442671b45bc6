"""Round and session dynamics of the measurement-choice signalling protocols.

Bob encodes a message in which basis he measures; Alice reads it back by
measuring her entangled pair and decoding the joint outcome:

* original protocol: Alice prepares the plain (0,0;0) pair, Bob measures
  the travelling half in one of the d+1 plain bases;
* pre/post-tested variant: some rounds are sacrificed for a public
  tomography test of the shared state, and a fraction of the decoded
  signals is checked against Bob's record afterwards;
* dual-family variant: Alice prepares the plain or hat (0,0;0) pair at
  random, Bob signals with one of the 2(d+1) bases of both families, and
  rounds where preparation and measurement families differ are discarded.

Convention: the first tensor factor of the pair is the half that travels
(Bob and any interceptor measure subsystem 1); Alice keeps the second.
This orientation is what makes every conclusive outcome decode to Bob's
basis, and the decode-soundness checks pin it down.

Interception strategies for the eavesdropper are included for both the
original protocol (substitute pair, resend after decoding) and the
dual-family variant (the same attack mounted in one fixed family).

Sessions sample rounds from exact outcome distributions that are
compiled once per configuration out of the dense quantum operations, so
a million rounds cost about as much as a million table lookups, and the
per-round statistics remain exactly those of the state-by-state
simulation (which is also available, one round at a time).
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, ClassVar, Sequence

import numpy as np

from .bases import (
    BasisId,
    Family,
    basis_alphabet,
    entangled_basis,
    entangled_ket,
    hat_entangled_ket,
    measurement_basis,
    pair_outcome_labels,
)
from .finite_field import FieldElement, PrimeDim
from .quantum import (
    DensityOperator,
    Ket,
    _frozen,
    born_probabilities,
    nonselective_measure,
    sample_outcome,
)
from .streams import derive_round_stream

# Rounds are processed in fixed-size blocks; each block draws from its own
# derived stream, so results do not depend on how blocks are scheduled.
BLOCK_ROUNDS = 1 << 15
_PRETEST_STREAM_BASE = 1 << 40

_INCONCLUSIVE = "inconclusive"
_COMPUTATIONAL = "computational"
_QUADRATIC = "quadratic"


@dataclass(frozen=True)
class DecodeResult:
    """Alice's reading of one joint outcome: a basis label or inconclusive."""

    kind: str
    quad: int | None = None

    _KINDS: ClassVar[frozenset[str]] = frozenset({_INCONCLUSIVE, _COMPUTATIONAL, _QUADRATIC})

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown decode kind {self.kind!r}")
        if (self.quad is not None) != (self.kind == _QUADRATIC):
            raise ValueError("quad label present iff kind is quadratic")

    @classmethod
    def inconclusive(cls) -> DecodeResult:
        return cls(_INCONCLUSIVE)

    @classmethod
    def computational(cls) -> DecodeResult:
        return cls(_COMPUTATIONAL)

    @classmethod
    def quadratic(cls, b: int) -> DecodeResult:
        return cls(_QUADRATIC, int(b))

    @property
    def is_conclusive(self) -> bool:
        return self.kind != _INCONCLUSIVE

    def matches_label(self, basis: BasisId) -> bool:
        """True when this decode names the basis label (family ignored)."""
        if self.kind == _INCONCLUSIVE:
            return False
        if self.kind == _COMPUTATIONAL:
            return basis.quad is None
        return basis.quad == self.quad

    def text(self) -> str:
        if self.kind == _INCONCLUSIVE:
            return "inconclusive"
        return "comp" if self.kind == _COMPUTATIONAL else f"q{self.quad}"


def decode(prep: tuple[FieldElement, FieldElement, FieldElement],
           outcome: tuple[FieldElement, FieldElement]) -> DecodeResult:
    """Decode Bob's basis from Alice's outcome (c', r') given prep (c, r, s).

    c' != c names the quadratic basis s - (r - r') / (c - c'); c' = c with
    r' != r names the computational basis; reproducing the preparation
    labels exactly is inconclusive.
    """
    c, r, s = prep
    cp, rp = outcome
    dims = {e.dim for e in (c, r, s, cp, rp)}
    if len(dims) != 1:
        raise ValueError("decode labels must share one dimension")
    if cp.value == c.value:
        if rp.value == r.value:
            return DecodeResult.inconclusive()
        return DecodeResult.computational()
    b = s - (r - rp) / (c - cp)
    return DecodeResult.quadratic(b.value)


@dataclass(frozen=True)
class EveRecord:
    """What the eavesdropper saw and did in one intercepted round."""

    outcome: tuple[int, int]
    decode: DecodeResult
    forward_basis: BasisId | None  # None: the stolen qudit went back unmeasured


@dataclass(frozen=True)
class RoundRecord:
    """One signalling round, as visible to an all-seeing supervisor."""

    bob_basis: BasisId
    alice_prep_family: Family
    alice_outcome: tuple[int, int]
    alice_decode: DecodeResult
    eve_active: bool
    eve_outcome: tuple[int, int] | None = None
    eve_decode: DecodeResult | None = None
    eve_forward_basis: BasisId | None = None

    def __post_init__(self) -> None:
        if not self.eve_active and (self.eve_outcome is not None
                                    or self.eve_decode is not None
                                    or self.eve_forward_basis is not None):
            raise ValueError("eve fields must be empty when eve is inactive")
        if self.eve_active and (self.eve_outcome is None or self.eve_decode is None):
            raise ValueError("active eve must record an outcome and a decode")

    @property
    def sifted(self) -> bool:
        return self.alice_prep_family is self.bob_basis.family


@dataclass(frozen=True)
class PretestRecord:
    """One public tomography round: announced (b, m) against Alice's (a, m')."""

    bob_basis: BasisId
    bob_outcome: int
    alice_basis: BasisId
    alice_outcome: int


@dataclass(frozen=True)
class SessionReport:
    """Aggregate statistics of one session.

    ``sifted`` counts the signal-carrying rounds (conclusive, and
    family-matched for the dual-family protocol).  ``inconclusive_rate``
    is taken over the rounds Alice actually decoded (signal rounds;
    family-matched ones for dual-family).  ``decode_accuracy`` is over
    sifted rounds, ``detection_rate`` over the checked subset, and
    ``eve_information_rate`` over all signal rounds.  Ratios over an
    empty denominator report 0.0.
    """

    rounds: int
    sifted: int
    decode_accuracy: float
    inconclusive_rate: float
    detection_rate: float
    eve_information_rate: float
    pretest_divergence: float | None
    seed: int


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


# ---------------------------------------------------------------------------
# Exact per-configuration outcome distributions.
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _prime(d: int) -> PrimeDim:
    return PrimeDim(d)


@functools.lru_cache(maxsize=None)
def _prep_ket(d: int, family: Family) -> Ket:
    if family is Family.HAT:
        return hat_entangled_ket(d, 0, 0)
    return entangled_ket(d, 0, 0, 0)


@functools.lru_cache(maxsize=None)
def pair_outcome_probs(d: int, own_family: Family, measured_basis: BasisId) -> np.ndarray:
    """Exact pair-outcome distribution after the travelling half is measured.

    The holder prepared the (0,0) pair of ``own_family``, the travelling
    half was measured nonselectively in ``measured_basis``, and the pair
    is then measured in the holder's own entangled basis.  Entries follow
    :func:`pair_outcome_labels` order.
    """
    prep = DensityOperator.from_ket(_prep_ket(d, own_family))
    rho = nonselective_measure(prep, 1, measurement_basis(d, measured_basis))
    return _frozen(born_probabilities(rho, entangled_basis(d, 0, own_family)))


def _decode_outcome(d: int, c: int, r: int) -> DecodeResult:
    dim = _prime(d)
    zero = dim.element(0)
    return decode((zero, zero, zero), (dim.element(c), dim.element(r)))


_INCONCLUSIVE_CODE = -1


def _code_of(d: int, result: DecodeResult) -> int:
    if result.kind == _INCONCLUSIVE:
        return _INCONCLUSIVE_CODE
    return d if result.kind == _COMPUTATIONAL else result.quad


def _result_of_code(d: int, code: int) -> DecodeResult:
    if code == _INCONCLUSIVE_CODE:
        return DecodeResult.inconclusive()
    return DecodeResult.computational() if code == d else DecodeResult.quadratic(code)


def _basis_code(d: int, basis: BasisId) -> int:
    return d if basis.quad is None else basis.quad


@functools.lru_cache(maxsize=None)
def _decode_codes(d: int) -> np.ndarray:
    codes = [_code_of(d, _decode_outcome(d, c, r)) for c, r in pair_outcome_labels(d)]
    return _frozen(np.array(codes, dtype=np.int64))


def _cum_rows(rows: Sequence[np.ndarray]) -> np.ndarray:
    return _frozen(np.cumsum(np.vstack(rows), axis=1))


@dataclass(frozen=True)
class _OriginalTables:
    alphabet: tuple[BasisId, ...]
    alice_cum: np.ndarray      # row per alphabet entry
    bob_code: np.ndarray
    decode_code: np.ndarray


@functools.lru_cache(maxsize=None)
def _original_tables(d: int) -> _OriginalTables:
    alphabet = basis_alphabet(d)
    probs = [pair_outcome_probs(d, Family.PLAIN, b) for b in alphabet]
    bob_code = _frozen(np.array([_basis_code(d, b) for b in alphabet], dtype=np.int64))
    return _OriginalTables(alphabet, _cum_rows(probs), bob_code, _decode_codes(d))


@dataclass(frozen=True)
class _DualTables:
    alphabet: tuple[BasisId, ...]          # plain bases then hat bases
    family_idx: np.ndarray                 # 0 plain, 1 hat, per alphabet entry
    bob_code: np.ndarray
    alice_cum: np.ndarray                  # row = family_idx * len(alphabet) + basis_idx
    eve_cum: np.ndarray                    # row per alphabet entry, fixed eve family
    alice_given_eve_cum: np.ndarray        # row = family_idx * (d+1) + label_row
    decode_code: np.ndarray
    eve_family: Family


def _label_rows(d: int, codes: np.ndarray) -> np.ndarray:
    """Alphabet position of a conclusive decode code within one family."""
    return np.where(codes == d, 0, codes + 1)


@functools.lru_cache(maxsize=None)
def _dual_tables(d: int, eve_family: Family) -> _DualTables:
    alphabet = basis_alphabet(d, (Family.PLAIN, Family.HAT))
    families = (Family.PLAIN, Family.HAT)
    family_idx = _frozen(np.array(
        [0 if b.family is Family.PLAIN else 1 for b in alphabet], dtype=np.int64))
    bob_code = _frozen(np.array([_basis_code(d, b) for b in alphabet], dtype=np.int64))
    alice_rows = [pair_outcome_probs(d, fam, b) for fam in families for b in alphabet]
    eve_rows = [pair_outcome_probs(d, eve_family, b) for b in alphabet]
    eve_labels = [BasisId(eve_family, None)] + [BasisId(eve_family, b) for b in range(d)]
    given_rows = [pair_outcome_probs(d, fam, eb) for fam in families for eb in eve_labels]
    return _DualTables(alphabet, family_idx, bob_code, _cum_rows(alice_rows),
                       _cum_rows(eve_rows), _cum_rows(given_rows),
                       _decode_codes(d), eve_family)


# ---------------------------------------------------------------------------
# Single-round operations (state-by-state quantum path).
# ---------------------------------------------------------------------------

def _measure_pair(d: int, family: Family, rho: DensityOperator,
                  rng: np.random.Generator) -> tuple[tuple[int, int], DecodeResult]:
    probs = born_probabilities(rho, entangled_basis(d, 0, family))
    idx = sample_outcome(probs, rng)
    c, r = pair_outcome_labels(d)[idx]
    return (c, r), _decode_outcome(d, c, r)


def _intercept_resend(d: int, bob_basis: BasisId, eve_family: Family,
                      rng: np.random.Generator) -> EveRecord:
    decoy = DensityOperator.from_ket(_prep_ket(d, eve_family))
    after_bob = nonselective_measure(decoy, 1, measurement_basis(d, bob_basis))
    outcome, result = _measure_pair(d, eve_family, after_bob, rng)
    forward = None
    if result.is_conclusive:
        label = None if result.kind == _COMPUTATIONAL else result.quad
        forward = BasisId(eve_family, label)
    return EveRecord(outcome, result, forward)


def eve_intercept_resend(d: int, bob_basis: BasisId,
                         rng: np.random.Generator) -> EveRecord:
    """The intercept-resend attack on the original protocol.

    Eve keeps the travelling qudit, feeds Bob half of her own plain
    (0,0;0) pair, measures her pair in the entangled basis once it
    returns, and — when conclusive — decodes b and measures the stolen
    qudit in that basis before forwarding it.
    """
    if bob_basis.family is not Family.PLAIN:
        raise ValueError("the original protocol signals with plain-family bases")
    return _intercept_resend(d, bob_basis, Family.PLAIN, rng)


def eve_dual_family_attack(d: int, bob_basis: BasisId, eve_family: Family,
                           rng: np.random.Generator) -> EveRecord:
    """The same substitution attack mounted against the dual-family protocol.

    Eve must commit to one family for her decoy pair and her decoding
    basis; when Bob happens to signal in the other family her held pair
    is no longer diagonal in her basis and her resend disturbs the
    sifted statistics.
    """
    return _intercept_resend(d, bob_basis, eve_family, rng)


def _alice_round(d: int, family: Family, forward_basis: BasisId | None,
                 rng: np.random.Generator) -> tuple[tuple[int, int], DecodeResult]:
    prep = DensityOperator.from_ket(_prep_ket(d, family))
    if forward_basis is None:
        rho = prep
    else:
        rho = nonselective_measure(prep, 1, measurement_basis(d, forward_basis))
    return _measure_pair(d, family, rho, rng)


def run_round_original(d: int, bob_basis: BasisId, rng: np.random.Generator,
                       *, eve: bool = False) -> RoundRecord:
    """One signalling round of the original protocol."""
    if bob_basis.family is not Family.PLAIN:
        raise ValueError("the original protocol signals with plain-family bases")
    if not eve:
        outcome, result = _alice_round(d, Family.PLAIN, bob_basis, rng)
        return RoundRecord(bob_basis, Family.PLAIN, outcome, result, eve_active=False)
    erec = eve_intercept_resend(d, bob_basis, rng)
    outcome, result = _alice_round(d, Family.PLAIN, erec.forward_basis, rng)
    return RoundRecord(bob_basis, Family.PLAIN, outcome, result, eve_active=True,
                       eve_outcome=erec.outcome, eve_decode=erec.decode,
                       eve_forward_basis=erec.forward_basis)


def run_protocol2_round(d: int, alice_family: Family, bob_basis: BasisId,
                        rng: np.random.Generator, *,
                        eve_family: Family | None = None) -> RoundRecord:
    """One round of the dual-family protocol (sifting left to the caller)."""
    if eve_family is None:
        outcome, result = _alice_round(d, alice_family, bob_basis, rng)
        return RoundRecord(bob_basis, alice_family, outcome, result, eve_active=False)
    erec = eve_dual_family_attack(d, bob_basis, eve_family, rng)
    outcome, result = _alice_round(d, alice_family, erec.forward_basis, rng)
    return RoundRecord(bob_basis, alice_family, outcome, result, eve_active=True,
                       eve_outcome=erec.outcome, eve_decode=erec.decode,
                       eve_forward_basis=erec.forward_basis)


# ---------------------------------------------------------------------------
# Public tomography test reference distributions.
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def ideal_pretest_distribution(d: int) -> tuple[tuple, np.ndarray]:
    """Joint distribution of (b, m, a, m') in an undisturbed pre-test round.

    Bob picks b uniformly over the d+1 plain bases and measures his half
    of the (0,0;0) pair; Alice picks a uniformly and measures hers.
    Returns (labels, probabilities) with labels (bob_basis, m, alice_basis, m')
    in row-major order.
    """
    psi = _prep_ket(d, Family.PLAIN).amplitudes.reshape(d, d)
    alphabet = basis_alphabet(d)
    n_bases = len(alphabet)
    labels = []
    probs = np.zeros((n_bases * d) ** 2)
    flat = 0
    for b in alphabet:
        ub = measurement_basis(d, b).matrix
        for m in range(d):
            conditional = ub[:, m].conj() @ psi   # unnormalized kept-half state
            for a in alphabet:
                ua = measurement_basis(d, a).matrix
                joint = np.abs(ua.conj().T @ conditional) ** 2 / n_bases ** 2
                for mp in range(d):
                    labels.append((b, m, a, mp))
                    probs[flat] = joint[mp]
                    flat += 1
    if abs(probs.sum() - 1.0) > 1e-12:
        raise RuntimeError("pre-test reference distribution does not normalize")
    return tuple(labels), _frozen(probs)


@functools.lru_cache(maxsize=None)
def _eve_pretest_probs(d: int) -> np.ndarray:
    """Pre-test joint distribution while the substitution attack is running.

    Bob measures half of Eve's decoy pair and Alice's own half is away in
    Eve's hands, so both reduced states are maximally mixed and the
    announced pairs decouple.
    """
    from .quantum import partial_trace

    decoy = DensityOperator.from_ket(_prep_ket(d, Family.PLAIN))
    bob_side = partial_trace(decoy, keep=1)
    alice_side = partial_trace(DensityOperator.from_ket(_prep_ket(d, Family.PLAIN)), keep=2)
    alphabet = basis_alphabet(d)
    n_bases = len(alphabet)
    probs = np.zeros((n_bases * d) ** 2)
    flat = 0
    for b in alphabet:
        pm = born_probabilities(bob_side, measurement_basis(d, b))
        for m in range(d):
            for a in alphabet:
                pa = born_probabilities(alice_side, measurement_basis(d, a))
                for mp in range(d):
                    probs[flat] = pm[m] * pa[mp] / n_bases ** 2
                    flat += 1
    return _frozen(probs)


# ---------------------------------------------------------------------------
# Sessions: block-wise exact-table sampling.
# ---------------------------------------------------------------------------

def _grouped_inverse_cdf(cum_rows: np.ndarray, rows: np.ndarray,
                         u: np.ndarray) -> np.ndarray:
    out = np.empty(u.size, dtype=np.int64)
    for rv in np.unique(rows):
        mask = rows == rv
        out[mask] = np.searchsorted(cum_rows[rv], u[mask], side="right")
    return np.minimum(out, cum_rows.shape[1] - 1)


def _sample_indexed(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.minimum(np.searchsorted(cum, u, side="right"), cum.size - 1)


def _message_cum(weights: np.ndarray | None, n: int) -> np.ndarray:
    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float)
        if w.size != n:
            raise ValueError(f"need {n} message weights, got {w.size}")
        if w.min() < 0 or w.sum() <= 0:
            raise ValueError("message weights must be nonnegative and sum > 0")
        w = w / w.sum()
    return np.cumsum(w)


def _run_blocks(worker: Callable[[np.random.Generator, int], tuple],
                total: int, seed: int, stream_base: int, workers: int) -> list[tuple]:
    jobs = []
    start, j = 0, 0
    while start < total:
        size = min(BLOCK_ROUNDS, total - start)
        jobs.append((j, size))
        start += size
        j += 1

    def call(job: tuple[int, int]) -> tuple:
        idx, size = job
        return worker(derive_round_stream(seed, stream_base + idx), size)

    if workers <= 1:
        return [call(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(call, jobs))


@dataclass
class _SignalTally:
    rounds: int = 0
    matched: int = 0          # family-matched rounds (all, for single-family runs)
    kept: int = 0             # matched and conclusive
    correct: int = 0
    checked: int = 0
    mismatches: int = 0
    eve_conclusive: int = 0
    eve_correct: int = 0

    def add(self, other: _SignalTally) -> None:
        for f in self.__dataclass_fields__:
            setattr(self, f, getattr(self, f) + getattr(other, f))


def _signal_block_original(tables: _OriginalTables, d: int, eve: bool,
                           msg_cum: np.ndarray, posttest_fraction: float | None,
                           collect: bool, stream: np.random.Generator,
                           n: int) -> tuple[_SignalTally, dict | None]:
    b_idx = _sample_indexed(msg_cum, stream.random(n))
    u_out = stream.random(n)
    eve_idx = None
    eve_code = None
    if eve:
        eve_idx = _grouped_inverse_cdf(tables.alice_cum, b_idx, u_out)
        eve_code = tables.decode_code[eve_idx]
        conclusive_e = eve_code != _INCONCLUSIVE_CODE
        u_alice = stream.random(n)
        out_idx = np.zeros(n, dtype=np.int64)   # untouched pair always reads (0,0)
        rows = _label_rows(d, eve_code)
        if conclusive_e.any():
            out_idx[conclusive_e] = _grouped_inverse_cdf(
                tables.alice_cum, rows[conclusive_e], u_alice[conclusive_e])
    else:
        out_idx = _grouped_inverse_cdf(tables.alice_cum, b_idx, u_out)
    dcode = tables.decode_code[out_idx]
    bob_code = tables.bob_code[b_idx]
    conclusive = dcode != _INCONCLUSIVE_CODE
    correct = conclusive & (dcode == bob_code)
    if posttest_fraction is None:
        checked = conclusive
    else:
        checked = conclusive & (stream.random(n) < posttest_fraction)
    mismatches = checked & ~correct
    tally = _SignalTally(
        rounds=n, matched=n, kept=int(conclusive.sum()), correct=int(correct.sum()),
        checked=int(checked.sum()), mismatches=int(mismatches.sum()),
        eve_conclusive=int(conclusive_e.sum()) if eve else 0,
        eve_correct=int((conclusive_e & (eve_code == bob_code)).sum()) if eve else 0,
    )
    arrays = None
    if collect:
        arrays = {"b_idx": b_idx, "out_idx": out_idx, "eve_idx": eve_idx}
    return tally, arrays


def _signal_block_dual(tables: _DualTables, d: int, eve: bool,
                       msg_cum: np.ndarray, posttest_fraction: float,
                       collect: bool, stream: np.random.Generator,
                       n: int) -> tuple[_SignalTally, dict | None]:
    n_bases = len(tables.alphabet)
    fam_idx = (stream.random(n) >= 0.5).astype(np.int64)   # 0 plain, 1 hat
    b_idx = _sample_indexed(msg_cum, stream.random(n))
    u_out = stream.random(n)
    eve_idx = None
    eve_code = None
    if eve:
        eve_idx = _grouped_inverse_cdf(tables.eve_cum, b_idx, u_out)
        eve_code = tables.decode_code[eve_idx]
        conclusive_e = eve_code != _INCONCLUSIVE_CODE
        u_alice = stream.random(n)
        out_idx = np.zeros(n, dtype=np.int64)
        rows = fam_idx * (d + 1) + _label_rows(d, eve_code)
        if conclusive_e.any():
            out_idx[conclusive_e] = _grouped_inverse_cdf(
                tables.alice_given_eve_cum, rows[conclusive_e], u_alice[conclusive_e])
    else:
        out_idx = _grouped_inverse_cdf(tables.alice_cum, fam_idx * n_bases + b_idx, u_out)
    dcode = tables.decode_code[out_idx]
    bob_code = tables.bob_code[b_idx]
    matched = tables.family_idx[b_idx] == fam_idx
    conclusive = dcode != _INCONCLUSIVE_CODE
    kept = matched & conclusive
    correct = kept & (dcode == bob_code)
    checked = kept & (stream.random(n) < posttest_fraction)
    mismatches = checked & ~correct
    eve_fam_idx = 0 if tables.eve_family is Family.PLAIN else 1
    tally = _SignalTally(
        rounds=n, matched=int(matched.sum()), kept=int(kept.sum()),
        correct=int(correct.sum()), checked=int(checked.sum()),
        mismatches=int(mismatches.sum()),
        eve_conclusive=int(conclusive_e.sum()) if eve else 0,
        eve_correct=int((conclusive_e & (eve_code == bob_code)
                         & (tables.family_idx[b_idx] == eve_fam_idx)).sum()) if eve else 0,
    )
    arrays = None
    if collect:
        arrays = {"fam_idx": fam_idx, "b_idx": b_idx, "out_idx": out_idx,
                  "eve_idx": eve_idx}
    return tally, arrays


def _records_original(d: int, tables: _OriginalTables, eve: bool,
                      blocks: list[dict]) -> list[RoundRecord]:
    labels = pair_outcome_labels(d)
    records: list[RoundRecord] = []
    for arrays in blocks:
        eve_idx = arrays["eve_idx"]
        for i, (bi, oi) in enumerate(zip(arrays["b_idx"], arrays["out_idx"])):
            outcome = labels[oi]
            result = _result_of_code(d, int(tables.decode_code[oi]))
            if not eve:
                records.append(RoundRecord(tables.alphabet[bi], Family.PLAIN,
                                           outcome, result, eve_active=False))
                continue
            e_out = labels[eve_idx[i]]
            e_res = _result_of_code(d, int(tables.decode_code[eve_idx[i]]))
            forward = None
            if e_res.is_conclusive:
                forward = BasisId(Family.PLAIN,
                                  None if e_res.kind == _COMPUTATIONAL else e_res.quad)
            records.append(RoundRecord(tables.alphabet[bi], Family.PLAIN,
                                       outcome, result, eve_active=True,
                                       eve_outcome=e_out, eve_decode=e_res,
                                       eve_forward_basis=forward))
    return records


def _records_dual(d: int, tables: _DualTables, eve: bool,
                  blocks: list[dict]) -> list[RoundRecord]:
    labels = pair_outcome_labels(d)
    families = (Family.PLAIN, Family.HAT)
    records: list[RoundRecord] = []
    for arrays in blocks:
        eve_idx = arrays["eve_idx"]
        for i, (fi, bi, oi) in enumerate(zip(arrays["fam_idx"], arrays["b_idx"],
                                             arrays["out_idx"])):
            outcome = labels[oi]
            result = _result_of_code(d, int(tables.decode_code[oi]))
            if not eve:
                records.append(RoundRecord(tables.alphabet[bi], families[fi],
                                           outcome, result, eve_active=False))
                continue
            e_out = labels[eve_idx[i]]
            e_res = _result_of_code(d, int(tables.decode_code[eve_idx[i]]))
            forward = None
            if e_res.is_conclusive:
                forward = BasisId(tables.eve_family,
                                  None if e_res.kind == _COMPUTATIONAL else e_res.quad)
            records.append(RoundRecord(tables.alphabet[bi], families[fi],
                                       outcome, result, eve_active=True,
                                       eve_outcome=e_out, eve_decode=e_res,
                                       eve_forward_basis=forward))
    return records


def run_original_session(d: int, rounds: int, seed: int, *, eve: bool = False,
                         message_weights: np.ndarray | None = None,
                         posttest_fraction: float | None = None,
                         workers: int = 1, collect: bool = False,
                         ) -> tuple[SessionReport, list[RoundRecord] | None]:
    """Run ``rounds`` rounds of the original protocol.

    With ``posttest_fraction=None`` every conclusive decode is checked
    against Bob's record (a supervisor's view; the protocol itself has
    no verification step).
    """
    _prime(d)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    tables = _original_tables(d)
    msg_cum = _message_cum(message_weights, len(tables.alphabet))
    worker = functools.partial(_signal_block_original, tables, d, eve, msg_cum,
                               posttest_fraction, collect)
    results = _run_blocks(worker, rounds, seed, 0, workers)
    tally = _SignalTally()
    for t, _ in results:
        tally.add(t)
    records = _records_original(d, tables, eve, [a for _, a in results]) if collect else None
    report = SessionReport(
        rounds=rounds, sifted=tally.kept,
        decode_accuracy=_ratio(tally.correct, tally.kept),
        inconclusive_rate=_ratio(tally.matched - tally.kept, tally.matched),
        detection_rate=_ratio(tally.mismatches, tally.checked),
        eve_information_rate=_ratio(tally.eve_correct, tally.rounds),
        pretest_divergence=None, seed=seed)
    return report, records


def _pretest_phase(d: int, n_pre: int, seed: int, eve: bool, workers: int,
                   collect: bool) -> tuple[float, list[PretestRecord] | None]:
    labels, ideal = ideal_pretest_distribution(d)
    sampling = _eve_pretest_probs(d) if eve else ideal
    cum = np.cumsum(sampling)

    def worker(stream: np.random.Generator, n: int) -> tuple:
        idx = _sample_indexed(cum, stream.random(n))
        counts = np.bincount(idx, minlength=ideal.size)
        return counts, (idx if collect else None)

    results = _run_blocks(worker, n_pre, seed, _PRETEST_STREAM_BASE, workers)
    counts = np.zeros(ideal.size, dtype=np.int64)
    for c, _ in results:
        counts += c
    divergence = 0.5 * np.abs(counts / n_pre - ideal).sum()
    records = None
    if collect:
        records = [PretestRecord(labels[i][0], labels[i][1], labels[i][2], labels[i][3])
                   for _, idx in results for i in idx]
    return float(divergence), records


def run_protocol1_session(d: int, rounds: int, pretest_fraction: float,
                          posttest_fraction: float, seed: int, *,
                          eve: bool = False,
                          message_weights: np.ndarray | None = None,
                          workers: int = 1, collect: bool = False,
                          ) -> tuple[SessionReport,
                                     list[PretestRecord | RoundRecord] | None]:
    """Run the pre/post-tested variant: tomography rounds, then signal rounds.

    ``pretest_divergence`` in the report is the total-variation distance
    between the announced pre-test frequencies and the exact undisturbed
    joint distribution; thresholding is the caller's business (see the
    trial harness).
    """
    _prime(d)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not 0.0 < pretest_fraction < 1.0 or not 0.0 < posttest_fraction < 1.0:
        raise ValueError("pretest and posttest fractions must lie in (0, 1)")
    n_pre = int(round(rounds * pretest_fraction))
    n_signal = rounds - n_pre
    if n_pre < 1 or n_signal < 1:
        raise ValueError(f"rounds={rounds} with pretest_fraction={pretest_fraction} "
                         "leaves an empty pre-test or signal phase")
    divergence, pre_records = _pretest_phase(d, n_pre, seed, eve, workers, collect)
    tables = _original_tables(d)
    msg_cum = _message_cum(message_weights, len(tables.alphabet))
    worker = functools.partial(_signal_block_original, tables, d, eve, msg_cum,
                               posttest_fraction, collect)
    results = _run_blocks(worker, n_signal, seed, 0, workers)
    tally = _SignalTally()
    for t, _ in results:
        tally.add(t)
    records = None
    if collect:
        records = list(pre_records)
        records.extend(_records_original(d, tables, eve, [a for _, a in results]))
    report = SessionReport(
        rounds=rounds, sifted=tally.kept,
        decode_accuracy=_ratio(tally.correct, tally.kept),
        inconclusive_rate=_ratio(tally.matched - tally.kept, tally.matched),
        detection_rate=_ratio(tally.mismatches, tally.checked),
        eve_information_rate=_ratio(tally.eve_correct, tally.rounds),
        pretest_divergence=divergence, seed=seed)
    return report, records


def run_protocol2_session(d: int, rounds: int, posttest_fraction: float,
                          seed: int, *, eve: bool = False,
                          eve_family: Family = Family.PLAIN,
                          message_weights: np.ndarray | None = None,
                          workers: int = 1, collect: bool = False,
                          ) -> tuple[SessionReport, list[RoundRecord] | None]:
    """Run the dual-family protocol with sifting on matching families."""
    _prime(d)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not 0.0 < posttest_fraction < 1.0:
        raise ValueError("posttest fraction must lie in (0, 1)")
    tables = _dual_tables(d, eve_family)
    msg_cum = _message_cum(message_weights, len(tables.alphabet))
    worker = functools.partial(_signal_block_dual, tables, d, eve, msg_cum,
                               posttest_fraction, collect)
    results = _run_blocks(worker, rounds, seed, 0, workers)
    tally = _SignalTally()
    for t, _ in results:
        tally.add(t)
    records = _records_dual(d, tables, eve, [a for _, a in results]) if collect else None
    report = SessionReport(
        rounds=rounds, sifted=tally.kept,
        decode_accuracy=_ratio(tally.correct, tally.kept),
        inconclusive_rate=_ratio(tally.matched - tally.kept, tally.matched),
        detection_rate=_ratio(tally.mismatches, tally.checked),
        eve_information_rate=_ratio(tally.eve_correct, tally.rounds),
        pretest_divergence=None, seed=seed)
    return report, records
