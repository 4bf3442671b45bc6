"""Second countermeasure: Alice secretly prepares her pair in one of two
basis families per round.  The attacker must commit to a family for her
decoy; on mismatched rounds her resend disturbs the sifted statistics
by an exactly known fraction."""

from mubsig.bases import Family
from mubsig.harness import (
    EveMode,
    HarnessConfig,
    Protocol,
    dual_family_detection_probability,
    run_trials,
)

for d in (2, 3, 5):
    p = dual_family_detection_probability(d)
    print(f"d = {d}: exact P(checked round mismatches | attack) = {p:.6f}")
print()

# The prediction is family-symmetric: it does not matter which family
# the attacker picks.
for family in (Family.PLAIN, Family.HAT):
    print(f"attacker in the {family.value} family: "
          f"{dual_family_detection_probability(2, family):.6f}")
print()

d = 2
rounds = 200_000
for eve in (EveMode.OFF, EveMode.DUAL_FAMILY):
    report = run_trials(HarnessConfig(
        d=d, protocol=Protocol.DUAL_FAMILY, rounds=rounds,
        posttest_fraction=0.5, eve=eve, seed=321))
    print(f"eve = {eve.value}")
    print(f"  sifted rounds        {report.sifted}")
    print(f"  decode accuracy      {report.decode_accuracy:.6f}")
    print(f"  detection rate       {report.detection_rate:.6f}")
    print(f"  eve information rate {report.eve_information_rate:.6f}")
print()

exact = dual_family_detection_probability(d)
print(f"simulated detection rate sits on the exact {exact:.6f}; a handful")
print("of checked rounds is enough to expose the attack, at the price of")
print("half the rounds lost to family sifting.")
