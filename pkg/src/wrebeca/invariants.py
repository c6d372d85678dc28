"""State predicates checked during exploration.

Loop freedom: the union of all stored next hops toward a destination,
over every rebec's routing table, must not contain a cycle.  Routes may
keep several alternative next hops while unconfirmed, so every stored
hop contributes an edge.  An optional route-state filter restricts the
graph to rows whose route state matches (used to look for loops among
confirmed routes only).

Predicates: boolean expressions over `rebecName.var[...]` references,
evaluated on a single global state.

Step monotonicity: a per-transition check that an int-valued variable
(or array cell) never decreases; wired into exploration so increase-
only claims can be verified without external tooling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import WrebecaError
from .lexer import tokenize
from .parser import _Parser
from .semantics import Environment, eval_expr
from .syntax import Index, Var


class InvariantConfigError(WrebecaError):
    """The invariant references something the model does not declare."""


@dataclass(frozen=True)
class LoopFreedomSpec:
    next_hop_array: str
    source: int
    dest: int
    route_state_array: Optional[str] = None
    valid_state: int = 1  # row filter value when route_state_array given


@dataclass(frozen=True)
class PredicateSpec:
    text: str
    refs: tuple  # ((rebec_id, expr AST), ...) conjunction


@dataclass(frozen=True)
class StepMonotoneSpec:
    var: str               # scalar name or name[index]
    rebec: Optional[int] = None  # None = every rebec declaring it


def _env_for(rt, state, rebec):
    cls = rt.rebec_class[rebec]
    return Environment([dict(zip(rt.svar_names[cls], state[rebec][0]))])


def next_hop_graph(rt, state, spec, dest):
    """Directed edges i -> k from every stored next hop toward dest."""
    edges = []
    for i in range(rt.n):
        cls = rt.rebec_class[i]
        idx = rt.svar_index[cls].get(spec.next_hop_array)
        if idx is None:
            raise InvariantConfigError(
                f"rebec {rt.names[i]} has no state array "
                f"{spec.next_hop_array!r} for the loop-freedom check")
        table = state[i][0][idx]
        if spec.route_state_array is not None:
            ridx = rt.svar_index[cls].get(spec.route_state_array)
            if ridx is None:
                raise InvariantConfigError(
                    f"rebec {rt.names[i]} has no state array "
                    f"{spec.route_state_array!r}")
            if state[i][0][ridx][dest] != spec.valid_state:
                continue
        row = table[dest]
        for hop in row:
            if hop != -1:
                edges.append((i, hop))
    return edges


def _acyclic(n, edges):
    succs = [[] for _ in range(n)]
    for a, b in edges:
        if not 0 <= b < n:
            continue
        succs[a].append(b)
    color = [0] * n  # 0 unvisited, 1 on stack, 2 done
    for start in range(n):
        if color[start]:
            continue
        stack = [(start, iter(succs[start]))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return False
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(succs[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return True


def eval_loop_freedom(rt, state, spec, dest=None):
    """True iff the stored next hops toward dest form an acyclic graph.

    With dest=None both configured endpoints (source and dest) are
    checked, mirroring the on-the-fly usage.
    """
    dests = [dest] if dest is not None else [spec.source, spec.dest]
    for d in dests:
        if not 0 <= d < rt.n:
            raise InvariantConfigError(f"node id {d} out of range")
        if not _acyclic(rt.n, next_hop_graph(rt, state, spec, d)):
            return False
    return True


def eval_predicate(rt, state, spec):
    for rebec, expr in spec.refs:
        env = _env_for(rt, state, rebec)
        if not eval_expr(expr, env, rebec):
            return False
    return True


def check_step_monotone(rt, pre_state, post_state, spec, rebec):
    """value(post) >= value(pre) for the watched variable of one rebec."""
    pre = _read_var(rt, pre_state, rebec, spec.var)
    post = _read_var(rt, post_state, rebec, spec.var)
    return post >= pre


def _read_var(rt, state, rebec, var_text):
    expr = _parse_var(var_text)
    env = _env_for(rt, state, rebec)
    return eval_expr(expr, env, rebec)


def _parse_var(text):
    p = _Parser(text)
    e = p.expression()
    p.expect("eof", "end of variable reference")
    if not isinstance(e, (Var, Index)):
        raise InvariantConfigError(f"{text!r} does not name a variable "
                                   f"or array cell")
    return e


# -- textual invariant specs ------------------------------------------------

def parse_invariant(text, rt):
    """One invariant spec from its command-line form.

    loop_freedom(NHOP_ARRAY[,ROUTE_STATE_ARRAY],SRC,DST)
    predicate(EXPR over rebec.var references)
    step_monotone(VAR[cell][,rebec=K])
    """
    text = text.strip()
    head, _, rest = text.partition("(")
    head = head.strip()
    if not rest.endswith(")"):
        raise InvariantConfigError(f"malformed invariant {text!r}")
    body = rest[:-1]
    if head == "loop_freedom":
        parts = [p.strip() for p in body.split(",")]
        if len(parts) == 3:
            arr, src, dst = parts
            spec = LoopFreedomSpec(arr, _node_id(src, rt), _node_id(dst, rt))
        elif len(parts) == 4:
            arr, rstate, src, dst = parts
            spec = LoopFreedomSpec(arr, _node_id(src, rt), _node_id(dst, rt),
                                   route_state_array=rstate)
        else:
            raise InvariantConfigError(
                "loop_freedom takes (next_hop_array[,route_state_array],"
                "source,dest)")
        _validate_loop_spec(spec, rt)
        return spec
    if head == "predicate":
        return parse_predicate(body, rt)
    if head == "step_monotone":
        parts = [p.strip() for p in body.split(",")]
        rebec = None
        if len(parts) == 2 and parts[1].startswith("rebec="):
            rebec = _node_id(parts[1][6:], rt)
        elif len(parts) != 1:
            raise InvariantConfigError(
                "step_monotone takes (var[,rebec=K])")
        spec = StepMonotoneSpec(parts[0], rebec)
        _parse_var(spec.var)
        return spec
    raise InvariantConfigError(f"unknown invariant kind {head!r}")


def _node_id(text, rt):
    text = text.strip()
    if text.isdigit():
        i = int(text)
    else:
        try:
            i = rt.names.index(text)
        except ValueError:
            raise InvariantConfigError(f"unknown rebec {text!r}") from None
    if not 0 <= i < rt.n:
        raise InvariantConfigError(f"node id {i} out of range")
    return i


def _validate_loop_spec(spec, rt):
    for i in range(rt.n):
        cls = rt.rebec_class[i]
        if spec.next_hop_array not in rt.svar_index[cls]:
            raise InvariantConfigError(
                f"rebec {rt.names[i]} declares no array "
                f"{spec.next_hop_array!r}")
        if (spec.route_state_array is not None
                and spec.route_state_array not in rt.svar_index[cls]):
            raise InvariantConfigError(
                f"rebec {rt.names[i]} declares no array "
                f"{spec.route_state_array!r}")


def parse_predicate(text, rt):
    """`name.var` references become per-rebec expressions.

    The expression is split on top-level && into conjuncts; each
    conjunct must reference exactly one rebec by name prefix.
    """
    conjuncts = _split_conjuncts(text)
    refs = []
    for part in conjuncts:
        rebec, expr_text = _strip_rebec_prefix(part, rt)
        expr = _parse_expr(expr_text)
        refs.append((rebec, expr))
    return PredicateSpec(text, tuple(refs))


def _split_conjuncts(text):
    parts = []
    depth = 0
    cur = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and text.startswith("&&", i):
            parts.append("".join(cur))
            cur = []
            i += 2
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _strip_rebec_prefix(text, rt):
    rebec = None

    def repl(name):
        nonlocal rebec
        if rebec is None:
            rebec = name
        elif rebec != name:
            raise InvariantConfigError(
                f"predicate conjunct {text!r} references several rebecs; "
                f"split it with &&")

    out = []
    i = 0
    while i < len(text):
        matched = False
        for name in rt.names:
            prefix = name + "."
            if text.startswith(prefix, i):
                before = text[i - 1] if i else " "
                if not (before.isalnum() or before == "_"):
                    repl(name)
                    i += len(prefix)
                    matched = True
                    break
        if not matched:
            out.append(text[i])
            i += 1
    if rebec is None:
        raise InvariantConfigError(
            f"predicate {text!r} references no rebec (use name.var)")
    return rt.names.index(rebec), "".join(out)


def _parse_expr(text):
    p = _Parser(text)
    e = p.expression()
    p.expect("eof", "end of predicate")
    return e


def state_invariant_fn(specs, rt):
    """Fold parsed state-level specs into one explorer hook."""
    loop_specs = [s for s in specs if isinstance(s, LoopFreedomSpec)]
    pred_specs = [s for s in specs if isinstance(s, PredicateSpec)]

    def check(rt_, state):
        for s in loop_specs:
            if not eval_loop_freedom(rt_, state, s):
                return False
        for s in pred_specs:
            if not eval_predicate(rt_, state, s):
                return False
        return True

    return check if (loop_specs or pred_specs) else None


def step_invariant_fn(specs, rt):
    mono = [s for s in specs if isinstance(s, StepMonotoneSpec)]
    if not mono:
        return None
    watched = []
    for s in mono:
        targets = [s.rebec] if s.rebec is not None else list(range(rt.n))
        for i in targets:
            cls = rt.rebec_class[i]
            name = s.var.split("[")[0].strip()
            if name not in rt.svar_index[cls]:
                if s.rebec is not None:
                    raise InvariantConfigError(
                        f"rebec {rt.names[i]} declares no variable {name!r}")
                continue
            watched.append((s, i))
    if not watched:
        raise InvariantConfigError("step_monotone watches no variable")

    def check(rt_, pre, post):
        for s, i in watched:
            if not check_step_monotone(rt_, pre, post, s, i):
                return False
        return True

    return check
