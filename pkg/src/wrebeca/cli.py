"""Command-line front end.

    wrebeca explore [options] MODEL
    wrebeca check   --invariant SPEC [options] MODEL
    wrebeca compare [--relation strong|branching] A.aut B.aut
    wrebeca corpus  [NAME]

MODEL is a .wrebeca file; bundled corpus models can be named directly
(e.g. `wrebeca explore corpus/flooding3.wrebeca` or just `flooding3`).

Exit codes: 0 success / invariant holds / equivalent; 1 invariant
violated or not equivalent; 2 usage or configuration error; 3 parse
error; 4 ill-formed model; 5 exploration limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (ExplorationLimitExceeded, ModelRuntimeError, ParseError,
                     StaticTopologyRequired, WrebecaError)
from .explorer import (Limits, add_monitor_selfloops,
                       build_trace, explore_counter_abstraction,
                       explore_full, explore_tau_eliminated, parse_monitor)
from .export import read_aldebaran, write_aldebaran, write_states_sidecar, \
    write_trace
from .invariants import (InvariantConfigError, parse_invariant,
                         state_invariant_fn, step_invariant_fn)
from .parser import parse_constraint, parse_model
from .semantics import ModelRuntime
from .wellformed import check_well_formed

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_ILL_FORMED = 4
EXIT_LIMITS = 5


def corpus_dir():
    return Path(__file__).parent / "corpus"


def corpus_path(name):
    if not name.endswith(".wrebeca"):
        name += ".wrebeca"
    return corpus_dir() / name


def _resolve_model_path(arg):
    p = Path(arg)
    if p.exists():
        return p
    candidate = corpus_path(p.name)
    if candidate.exists():
        return candidate
    candidate = corpus_path(arg)
    if candidate.exists():
        return candidate
    raise FileNotFoundError(arg)


def _load_model(arg):
    path = _resolve_model_path(arg)
    model = parse_model(path.read_text())
    violations = check_well_formed(model)
    if violations:
        for v in violations:
            print(f"{path.name}:{v}", file=sys.stderr)
        raise _IllFormed()
    return model


class _IllFormed(WrebecaError):
    pass


def _read_constraint(text, model):
    if text is None:
        return None
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return parse_constraint(text.strip(), model)


def _limits(args):
    return Limits(max_states=args.max_states,
                  max_transitions=args.max_transitions,
                  step_budget=args.max_steps)


def _explore_for(args, model, rt, state_inv=None, step_inv=None):
    kwargs = dict(limits=_limits(args), workers=args.workers,
                  constraint=_read_constraint(args.constraint, model),
                  state_invariant=state_inv, step_invariant=step_inv)
    if args.mode == "full":
        return explore_full(rt, **kwargs)
    if args.mode == "counter":
        return explore_counter_abstraction(rt, **kwargs)
    return explore_tau_eliminated(rt, label_mode=args.label_mode, **kwargs)


def cmd_explore(args):
    model = _load_model(args.model)
    rt = ModelRuntime(model)
    lts = _explore_for(args, model, rt)
    if lts.stats.get("gamma0_replaced"):
        print("note: declared initial topology violates the constraint; "
              "using the first admissible one", file=sys.stderr)
    if args.monitor:
        monitors = [parse_monitor(m, rt) for m in args.monitor]
        lts = add_monitor_selfloops(lts, monitors, rt)
    print(lts.summary())
    if args.out:
        write_aldebaran(lts, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    if args.states_out:
        write_states_sidecar(lts, rt, args.states_out)
        print(f"wrote {args.states_out}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    model = _load_model(args.model)
    rt = ModelRuntime(model)
    specs = [parse_invariant(t, rt) for t in args.invariant]
    state_inv = state_invariant_fn(specs, rt)
    step_inv = step_invariant_fn(specs, rt)
    if state_inv is None and step_inv is None:
        print("no invariant given", file=sys.stderr)
        return EXIT_USAGE
    lts = _explore_for(args, model, rt, state_inv, step_inv)
    if lts.violation_index is None:
        print(f"invariant holds ({lts.summary()})")
        return EXIT_OK
    trace = build_trace(rt, lts, lts.violation_index)
    out = args.trace_out or (Path(args.model).stem + ".trace.txt")
    write_trace(trace, out)
    print(f"invariant violated after {len(trace) - 1} steps; "
          f"trace written to {out}")
    return EXIT_VIOLATION


def cmd_compare(args):
    a = read_aldebaran(args.lts_a)
    b = read_aldebaran(args.lts_b)
    if args.relation == "strong":
        from .equivalence import strong_bisim_equivalent
        result = strong_bisim_equivalent(a, b)
    else:
        from .equivalence import branching_bisim_equivalent
        result = branching_bisim_equivalent(a, b, tau=args.tau)
    verdict = "equivalent" if result.equivalent else "NOT equivalent"
    print(f"{args.relation} bisimulation: {verdict}")
    if not result.equivalent and result.distinguisher:
        print("distinguished by: " + " . ".join(result.distinguisher))
    return EXIT_OK if result.equivalent else EXIT_VIOLATION


def cmd_corpus(args):
    if args.name:
        path = corpus_path(args.name)
        if not path.exists():
            print(f"no bundled model {args.name!r}", file=sys.stderr)
            return EXIT_USAGE
        sys.stdout.write(path.read_text())
        return EXIT_OK
    for p in sorted(corpus_dir().glob("*.wrebeca")):
        print(p.stem)
    return EXIT_OK


def _add_common(sub):
    sub.add_argument("--mode", choices=("full", "counter", "tau-elim"),
                     default="full")
    sub.add_argument("--label-mode", choices=("enumerated", "merged"),
                     default="merged",
                     help="tau-elim label annotation style")
    sub.add_argument("--constraint", metavar="TEXT|@FILE",
                     help="override the model's constraint block")
    sub.add_argument("--max-states", type=int, default=5_000_000)
    sub.add_argument("--max-transitions", type=int, default=30_000_000)
    sub.add_argument("--max-steps", type=int, default=100_000,
                     help="per-handler interpreted statement budget")
    sub.add_argument("--workers", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="wrebeca",
        description="Explicit-state verification for wRebeca models of "
                    "mobile ad hoc networks")
    subs = ap.add_subparsers(dest="command", required=True)

    ex = subs.add_parser("explore", help="generate a state space")
    _add_common(ex)
    ex.add_argument("--monitor", action="append", default=[],
                    metavar="SPEC", help="add value self-loops, e.g. "
                    "'src_sn(node1.sn)' or 'info_{i}_dsn(dsn[0],dsn[3])@each'")
    ex.add_argument("--out", help="write the LTS in Aldebaran format")
    ex.add_argument("--states-out", help="write a state-table sidecar")
    ex.add_argument("model")
    ex.set_defaults(fn=cmd_explore)

    ck = subs.add_parser("check", help="check invariants on the fly")
    _add_common(ck)
    ck.add_argument("--invariant", action="append", default=[],
                    metavar="SPEC", required=True,
                    help="loop_freedom(nhop[,route_state],src,dst) | "
                    "predicate(EXPR) | step_monotone(VAR[,rebec=K])")
    ck.add_argument("--trace-out", help="counterexample trace path")
    ck.add_argument("model")
    ck.set_defaults(fn=cmd_check)

    cp = subs.add_parser("compare", help="bisimulation-compare two .aut "
                                         "files")
    cp.add_argument("--relation", choices=("strong", "branching"),
                    default="strong")
    cp.add_argument("--tau", default="tau", help="internal-action label")
    cp.add_argument("lts_a")
    cp.add_argument("lts_b")
    cp.set_defaults(fn=cmd_compare)

    co = subs.add_parser("corpus", help="list or print bundled models")
    co.add_argument("name", nargs="?")
    co.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as e:
        print(f"no such file: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except _IllFormed:
        print("model is not well-formed", file=sys.stderr)
        return EXIT_ILL_FORMED
    except InvariantConfigError as e:
        print(f"invariant configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StaticTopologyRequired as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ExplorationLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LIMITS
    except ModelRuntimeError as e:
        print(f"model runtime error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
