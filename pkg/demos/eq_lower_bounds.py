"""Walk through both Equality lower-bound chains on small concrete protocols.

Run: python3 demos/eq_lower_bounds.py
"""

from __future__ import annotations

from qiclab import classical as cl
from qiclab import quantum as qp
from qiclab.functions import eq
from qiclab.replays import derive_eq_hqic_floor, derive_eq_ic_floor


def show(report):
    print(f"\n== {report.name}  ({'PASS' if report.passed else 'FAIL'})")
    for s in report.steps:
        flag = "ok" if s.holds(report.slack) else "--"
        print(f"  {flag}  {s.name:<60s} {s.lhs:10.5f}  vs {s.rhs:10.5f}")
    print("  witnesses:", {k: v for k, v in report.witnesses.items() if k != "g"})


# Classical: three protocols, all with worst-case error <= 1/3
for name, p in [
    ("Alice sends x, Bob answers", cl.send_inputs_protocol(2, 2, eq(2), bob_sends="answer")),
    ("both send inputs", cl.send_inputs_protocol(2, 2, eq(2), bob_sends="input")),
    ("two public parities", cl.hash_eq_protocol(2, reps=2)),
]:
    print(f"\n# {name}")
    show(derive_eq_ic_floor(p))

# One public parity is a coin flip on unequal inputs and is rejected up front
try:
    derive_eq_ic_floor(cl.hash_eq_protocol(2, reps=1))
except ValueError as e:
    print("\nrejected:", e)

# Quantum: copy x to Bob, Bob returns Eq on one qubit
for k in (1, 2):
    print(f"\n# quantum copy-and-answer, k={k}")
    show(derive_eq_hqic_floor(qp.copy_and_answer_protocol(eq(k))))
