"""Command-line entry point: ``qiclab verify|measure|embed|demo|replay``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import classical as cl
from . import quantum as qp
from .checks import ExperimentConfig, UnknownCheckError, check_ids, run_check
from .embeddings import quantum_embed_averaged
from .functions import function_from_name, sink_xor
from .io import FormatError, dump_json, load_distribution, load_protocol, load_spec, save_protocol
from .replays import PreconditionError, derive_eq_hqic_floor, derive_eq_ic_floor, main_theorem_demo

THREADS_ENV = "QICLAB_THREADS"

CLASSICAL_QUANTITIES = ("ic", "err", "cc")
QUANTUM_QUANTITIES = ("qic", "hqic", "sqic", "err", "qcc")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, n)


def _job(args):
    check_id, seed, samples = args
    return run_check(check_id, ExperimentConfig(seed=seed, samples=samples))


def run_checks(ids, seed: int, samples: int | None, threads: int = 1):
    jobs = [(c, seed, samples) for c in sorted(set(ids))]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            reports = list(ex.map(_job, jobs))
    else:
        reports = [_job(j) for j in jobs]
    return sorted(reports, key=lambda r: r.check_id)


def write_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["check_id", "seed", "sample", "lhs", "rhs", "violation"])
        for rep in reports:
            for d in rep.details:
                w.writerow([rep.check_id, rep.seed, d["sample"],
                            format(d["lhs"], ".17g"), format(d["rhs"], ".17g"), format(d["violation"], ".17g")])


def cmd_verify(a) -> int:
    ids = a.check or check_ids()
    try:
        reports = run_checks(ids, a.seed, a.samples, _threads())
    except UnknownCheckError as e:
        print(e.args[0], file=sys.stderr)
        return 2
    for r in reports:
        line = f"{r.check_id:<14} {'PASS' if r.passed else 'FAIL'}  samples={r.samples:<5} max_violation={r.max_violation:.3e}  slack={r.slack:.0e}"
        if a.timings:
            line += f"  {r.runtime_ms} ms"
        print(line)
    ok = all(r.passed for r in reports)
    print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    if a.json:
        dump_json({"seed": a.seed, "pass": ok, "reports": [r.to_dict(a.timings) for r in reports]}, a.json)
    if a.csv:
        write_csv(reports, a.csv)
    return 0 if ok else 1


def measure(p, mu, quantity: str) -> float:
    if isinstance(p, cl.ClassicalProtocol):
        if quantity not in CLASSICAL_QUANTITIES:
            raise ValueError(f"{quantity} is not defined for classical protocols (use {', '.join(CLASSICAL_QUANTITIES)})")
        if quantity == "ic":
            return cl.classical_ic(p, mu)
        if quantity == "cc":
            return float(cl.cc(p))
        return cl.worst_case_error(p, _function(p))
    if quantity not in QUANTUM_QUANTITIES:
        raise ValueError(f"{quantity} is not defined for quantum protocols (use {', '.join(QUANTUM_QUANTITIES)})")
    if quantity == "qcc":
        return float(qp.qcc(p))
    if quantity == "err":
        return qp.quantum_worst_case_error(p, _function(p))
    trace = qp.run_rounds(p, mu)
    return {"qic": qp.qic, "hqic": qp.hqic, "sqic": qp.sqic}[quantity](trace)


def _function(p):
    if not p.function:
        raise ValueError("protocol file has no 'function' field; err needs one")
    return function_from_name(p.function)


def _shape(p):
    if isinstance(p, cl.ClassicalProtocol):
        return (p.n_x, p.n_y)
    return (1 << p.x_bits, 1 << p.y_bits)


def cmd_measure(a) -> int:
    p = load_protocol(a.protocol)
    mu = load_distribution(a.dist, _shape(p))
    out = {}
    for q in a.quantity:
        out[q] = float(measure(p, mu, q))
        print(f"{q} = {out[q]:.12g}")
    if a.json:
        dump_json({"protocol": a.protocol, "dist": a.dist, "values": out}, a.json)
    return 0


def cmd_embed(a) -> int:
    p = load_protocol(a.protocol)
    spec = load_spec(a.spec)
    if isinstance(p, cl.ClassicalProtocol):
        if not a.spec.startswith("sink:"):
            raise ValueError("classical protocols embed only with sink:m")
        out = cl.classical_embed(p, int(a.spec.partition(":")[2]))
    else:
        mu = load_distribution(a.dist, (2, 2))
        out = quantum_embed_averaged(p, spec, mu)
    save_protocol(out, a.out)
    kind = "classical" if isinstance(out, cl.ClassicalProtocol) else "quantum"
    print(f"wrote {kind} protocol to {a.out}")
    return 0


def _print_chain(report) -> None:
    for s in report.steps:
        mark = "ok " if s.holds(report.slack) else ("FAIL" if s.guaranteed else "n/a")
        print(f"  [{mark}] {s.name}: {s.lhs:.6g} vs {s.rhs:.6g}")
    for k, v in report.values.items():
        if not isinstance(v, list):
            print(f"  {k} = {v}")
    if report.witnesses:
        print(f"  witnesses: {json.dumps(report.witnesses)}")
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'}")


def cmd_demo(a) -> int:
    if a.protocol:
        p = load_protocol(a.protocol)
    else:
        p = qp.copy_and_answer_protocol(sink_xor(a.m))
    report = main_theorem_demo(p, a.m)
    _print_chain(report)
    if a.json:
        dump_json(report.to_dict(), a.json)
    return 0 if report.passed else 1


def cmd_replay(a) -> int:
    p = load_protocol(a.protocol)
    if isinstance(p, cl.ClassicalProtocol):
        report = derive_eq_ic_floor(p)
    else:
        report = derive_eq_hqic_floor(p)
    _print_chain(report)
    if a.json:
        dump_json(report.to_dict(), a.json)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qiclab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run registered numerical checks")
    v.add_argument("--check", action="append", metavar="ID", help="check id (repeatable; default all)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=None, help="override each check's default sample count")
    v.add_argument("--json", metavar="PATH")
    v.add_argument("--csv", metavar="PATH")
    v.add_argument("--timings", action="store_true", help="include runtimes (makes JSON non-reproducible)")
    v.add_argument("--list", action="store_true", help="list check ids and exit")
    v.set_defaults(fn=cmd_verify)

    m = sub.add_parser("measure", help="information and communication costs of a protocol file")
    m.add_argument("--protocol", required=True)
    m.add_argument("--dist", default="uniform", help="'uniform' or a JSON matrix over (x, y)")
    m.add_argument("--quantity", action="append", required=True,
                   choices=sorted(set(CLASSICAL_QUANTITIES + QUANTUM_QUANTITIES)))
    m.add_argument("--json", metavar="PATH")
    m.set_defaults(fn=cmd_measure)

    e = sub.add_parser("embed", help="embed a protocol into a smaller problem")
    e.add_argument("--protocol", required=True)
    e.add_argument("--spec", required=True, help="'sink:m' or an embedding-spec JSON file")
    e.add_argument("--dist", default="uniform", help="per-coordinate 2x2 input distribution")
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_embed)

    d = sub.add_parser("demo", help="measure the Sink o Xor lower-bound chain")
    d.add_argument("--m", type=int, default=3)
    d.add_argument("--protocol", help="quantum protocol file (default: copy-and-answer)")
    d.add_argument("--json", metavar="PATH")
    d.set_defaults(fn=cmd_demo)

    r = sub.add_parser("replay", help="replay an Eq lower-bound chain on a protocol file")
    r.add_argument("--protocol", required=True)
    r.add_argument("--json", metavar="PATH")
    r.set_defaults(fn=cmd_replay)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    if a.cmd == "verify" and a.list:
        print("\n".join(check_ids()))
        return 0
    try:
        return a.fn(a)
    except (FormatError, PreconditionError, ValueError, qp.SimulationCapError, cl.EnumerationCapError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
