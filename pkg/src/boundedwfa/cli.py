"""Command line interface: ``boundedwfa {validate,gen,run,audit,bench}``.

Exit status is 0 on success, 1 on validation errors (including a failed
audit) and 2 when an exact oracle exceeds its capacity guard.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .harness.experiment import ALGORITHMS, compare_report, run_experiment
from .harness.generate import KINDS, GenSpec, generate
from .harness.instance_io import document_id, load_instance
from .harness.tracefile import read_trace
from .kserver import CapacityError, KServerInstance
from .phases import PhaseParams, audit_condition1

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY = 0, 1, 2


def _read(path):
    text = Path(path).read_text(encoding="utf-8")
    return text, load_instance(text)


def _params(args) -> PhaseParams:
    return PhaseParams(alpha=args.alpha, epsilon=args.epsilon, delta_lb=args.delta)


def _steps(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(s) for s in text.replace(",", " ").split()]


def _jsonable(summary: dict) -> dict:
    return {k: (None if isinstance(v, float) and v != v else v) for k, v in summary.items()}


def cmd_validate(args) -> int:
    _, inst = _read(args.file)
    if isinstance(inst, KServerInstance):
        print(f"ok: kserver, {inst.space.n} points, k={inst.k}, {len(inst)} requests, "
              f"diameter {inst.space.diameter:g}")
    else:
        print(f"ok: mts, {inst.n_states} states, {len(inst)} requests, "
              f"diameter {inst.space.diameter:g}")
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = args.seed
    if os.environ.get("BOUNDEDWFA_SEED"):
        seed = int(os.environ["BOUNDEDWFA_SEED"])
    spec = GenSpec(
        kind=args.kind, n=args.n, seed=seed, states=args.states, rows=args.rows, cols=args.cols,
        k=args.k, cost_min=args.cost_min, cost_max=args.cost_max, max_weight=args.max_weight,
        avoid_covered=args.avoid_covered, sweep_width=args.sweep_width,
        clusters=args.clusters, spread=args.spread,
    )
    text = json.dumps(generate(spec))
    if args.out and args.out != "-":
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_run(args) -> int:
    text, inst = _read(args.inp)
    meta = {"instance": document_id(json.loads(text)), "params": vars(_params(args))}
    _, summary = run_experiment(
        inst, args.alg, _params(args), sink=args.out,
        force_restart_at=_steps(args.force_restart_at), with_opt=not args.no_opt, meta=meta,
    )
    print(json.dumps(_jsonable(summary), indent=2))
    return EXIT_OK


def cmd_audit(args) -> int:
    _, inst = _read(args.inp)
    trace = read_trace(args.trace)
    if trace.algorithm == "opt":
        print("audit: opt traces have no phases to audit", file=sys.stderr)
        return EXIT_INVALID
    params = PhaseParams(
        alpha=trace.meta.get("alpha"), epsilon=trace.meta.get("epsilon", 1.0),
        delta_lb=trace.meta.get("delta"),
    )
    audit = audit_condition1(trace, inst, params)
    for p in audit.phases:
        status = "PASS" if p.condition1 else "FAIL"
        print(f"phase {p.index} steps {p.first_step}..{p.last_step} C={p.cost:g} "
              f"bound={p.bound:g} restarted={int(p.restarted)} Y={p.Y:g} {status}")
    print(f"total C={audit.total_cost:g} W={audit.W:g} "
          f"C<=(alpha+eps)W: {audit.competitive_ok} verdict: {audit.verdict}")
    return EXIT_OK if audit.verdict else EXIT_INVALID


def cmd_bench(args) -> int:
    text, inst = _read(args.inp)
    inst_id = document_id(json.loads(text))
    traces = []
    for alg in args.algs.split(","):
        alg = alg.strip()
        sink = None
        if args.traces_dir:
            Path(args.traces_dir).mkdir(parents=True, exist_ok=True)
            sink = Path(args.traces_dir) / f"{inst_id}-{alg}.csv"
        trace, summary = run_experiment(
            inst, alg, _params(args), sink=sink, with_opt=False, meta={"instance": inst_id}
        )
        traces.append(trace)
        print(f"{alg}: cost={summary['total_cost']:g} p99={summary['p99_ns']} "
              f"q1_p99={summary.get('q1_p99_ns')} q4_p99={summary.get('q4_p99_ns')}",
              file=sys.stderr)
    csv_text, _ = compare_report(traces)
    if args.out and args.out != "-":
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boundedwfa", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="check an instance document")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen", help="generate an instance document")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True, help="request count")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--states", type=int, default=4)
    g.add_argument("--rows", type=int, default=4)
    g.add_argument("--cols", type=int, default=4)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--cost-min", type=int, default=0)
    g.add_argument("--cost-max", type=int, default=10)
    g.add_argument("--max-weight", type=int, default=5)
    g.add_argument("--avoid-covered", action="store_true")
    g.add_argument("--sweep-width", type=int, default=0)
    g.add_argument("--clusters", type=int, default=3)
    g.add_argument("--spread", type=int, default=1)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    def phase_args(q):
        q.add_argument("--epsilon", type=float, default=1.0)
        q.add_argument("--alpha", type=float, default=None)
        q.add_argument("--delta", type=float, default=None)

    r = sub.add_parser("run", help="run one algorithm and write its trace")
    r.add_argument("--alg", choices=ALGORITHMS, required=True)
    phase_args(r)
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--force-restart-at", default=None,
                   help="debug: comma-separated steps at which to force a restart")
    r.add_argument("--no-opt", action="store_true", help="skip the offline optimum in the summary")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("audit", help="check the per-phase restart inequality on a bounded-history trace")
    a.add_argument("--trace", required=True)
    a.add_argument("--in", dest="inp", required=True)
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bench", help="time several algorithms on one instance")
    b.add_argument("--in", dest="inp", required=True)
    b.add_argument("--algs", default="wfa-full,wfa-bounded")
    b.add_argument("--out", default="-")
    b.add_argument("--traces-dir", default=None)
    phase_args(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
