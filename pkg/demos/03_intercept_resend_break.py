"""The intercept-resend break of the bare protocol: an eavesdropper who
plays Alice's own game against Bob reads almost every message and the
published statistics never change."""

from mubsig.harness import EveMode, HarnessConfig, Protocol, run_trials

d = 3
rounds = 200_000

for eve in (EveMode.OFF, EveMode.INTERCEPT):
    config = HarnessConfig(d=d, protocol=Protocol.ORIGINAL, rounds=rounds,
                           eve=eve, seed=2024)
    report = run_trials(config)
    print(f"eve = {eve.value}")
    print(f"  decode accuracy      {report.decode_accuracy:.6f}")
    print(f"  inconclusive rate    {report.inconclusive_rate:.6f}")
    print(f"  detection rate       {report.detection_rate:.6f}")
    print(f"  eve information rate {report.eve_information_rate:.6f}")
    print()

print("what the attacker does: swap her own decoy pair half to Bob,")
print("decode his basis from her pair exactly as Alice would, then")
print("measure Alice's stolen qudit in that basis and send it on.")
print()
print(f"she reads a 1 - 1/d = {1 - 1/d:.3f} fraction of the traffic;")
print("every conclusive decode Alice makes still names Bob's basis, so")
print("the detection rate is identically zero.  The only trace is the")
print(f"inconclusive rate rising from 1/d = {1/d:.3f} to "
      f"1/d + (d-1)/d^2 = {1/d + (d - 1)/d**2:.3f},")
print("which the bare protocol never checks.")
