from mubsig.verify import CheckResult, run_invariant_suite

EXPECTED_NAMES = (
    "field-arithmetic",
    "root-of-unity",
    "single-basis-orthonormality",
    "mutual-unbiasedness",
    "entangled-basis",
    "pair-reduced-states",
    "hadamard-root",
    "measurement-backaction",
    "decode-soundness",
    "decode-completeness",
    "travelling-privacy",
    "cross-family-visibility",
    "analytic-distributions",
    "born-rule-consistency",
    "attack-bookkeeping",
    "dual-attack-detectability",
    "session-determinism",
    "stream-derivation",
)


def test_suite_covers_every_named_invariant():
    names = tuple(r.name for r in run_invariant_suite(2))
    assert names == EXPECTED_NAMES


def test_suite_passes_at_small_prime_dimensions():
    for d in (2, 3):
        results = run_invariant_suite(d)
        failures = [(r.name, r.detail) for r in results if not r.passed]
        assert failures == []
        assert all(isinstance(r, CheckResult) for r in results)


def test_every_check_actually_asserts_something():
    for r in run_invariant_suite(2):
        assert r.assertions >= 2, r.name
        assert r.detail == ""


def test_suite_is_stable_between_runs():
    first = run_invariant_suite(3)
    second = run_invariant_suite(3)
    assert [(r.name, r.passed, r.assertions) for r in first] == \
           [(r.name, r.passed, r.assertions) for r in second]
