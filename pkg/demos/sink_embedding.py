"""Embed a Sink o Xor protocol on 3 vertices into an Equality protocol on 2 bits.

Shows the SQIC drop promised by the Shearer-type bound, the error transfer,
and the full chain down to the QIC floor.

Run: python3 demos/sink_embedding.py
"""

from __future__ import annotations

import numpy as np

from qiclab import quantum as qp
from qiclab.embeddings import (
    embedded_acceptance,
    framed_sqic_terms,
    quantum_embed_averaged,
    quantum_embed_fixed_set,
    sink_embedding_spec,
)
from qiclab.functions import eq, sink_xor
from qiclab.replays import main_theorem_demo

m = 3
uniform = np.full((2, 2), 0.25)
p = qp.copy_and_answer_protocol(sink_xor(m))
spec = sink_embedding_spec(m)
print("index sets:", spec.sets, " Pr[edge in S]:", spec.marginals(), " k =", spec.k_bound)

tr = qp.run_rounds(p, np.full((8, 8), 1 / 64))
print(f"\nPi on 3+3 bits: QCC={qp.qcc(p)}  QIC={qp.qic(tr):.4f}  SQIC={qp.sqic(tr):.4f}")

pe = quantum_embed_averaged(p, spec, uniform)
tre = qp.run_rounds(pe, np.full((4, 4), 1 / 16))
print(f"Pi_E on 2+2 bits: {pe.a0}+{pe.b0} qubits, SQIC={qp.sqic(tre):.4f}  bound SQIC(Pi)/k={qp.sqic(tr) / spec.k_bound:.4f}")

for s in spec.sets:
    ps = quantum_embed_fixed_set(p, s, uniform)
    direct = qp.sqic(qp.run_rounds(ps, np.full((4, 4), 1 / 16)))
    print(f"  S={s}: SQIC(Pi_S)={direct:.4f}  from Pi's own state={sum(framed_sqic_terms(p, s, uniform)):.4f}")

acc_e = qp.acceptance_table(pe)
print("\nacceptance of Pi_E (rows x', cols y'):\n", np.round(acc_e, 3))
print("channel-route acceptance agrees:", np.allclose(acc_e, embedded_acceptance(spec, uniform, qp.acceptance_table(p))))
print("err(Pi_E) =", qp.quantum_worst_case_error(pe, eq(2)), " (additive term (m-1)/2^(m-2) = 1 at m=3)")

report = main_theorem_demo(p, m)
print(f"\nchain: {'PASS' if report.passed else 'FAIL'}")
for st in report.steps:
    print(f"  {st.name:<45s} {st.lhs:.6g} vs {st.rhs:.6g}{'' if st.guaranteed else '  (measured only)'}")
