"""Reference interpreter for message-server execution.

States are immutable nested tuples.  A global state is one local state
per rebec, where a local state is (values, queue): `values` holds the
state variables in declaration order (booleans as Python bools, arrays
as nested tuples) and `queue` is the FIFO of pending messages, each a
tuple (msg_id, arg, ...).  Mobile-network exploration pairs this with a
topology; the pairing lives in GlobalState.

Execution of one message server is atomic: a handler runs to completion
with no interleaving, reading the current topology only to decide
message deliveries (its own row of the adjacency matrix).  The links a
handler actually consulted are recorded so the constraint-merged
labeling can tell which link statuses produced an outcome.

This tree-walking interpreter is the executable form of the semantic
contract; the generated-code engine in compiler.py must agree with it
(tests compare the two on whole state spaces).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ModelRuntimeError, StepBudgetExceeded
from .syntax import (
    Assign, Binary, Block, BoolLit, Break, Broadcast, If, Index, IntLit,
    Multicast, NewArray, SelfExpr, Unary, Unicast, Var, VarDeclStmt, While,
)

DEFAULT_STEP_BUDGET = 100_000

NORMAL = True    # handler/block finished all statements
BROKEN = False   # a break unwound to the enclosing loop


class Environment:
    """Stack of scopes, innermost last; the bottom scope holds the
    rebec's state variables and survives handler execution."""

    def __init__(self, scopes=None):
        self.scopes = scopes if scopes is not None else [{}]

    def push(self, scope=None):
        self.scopes.append(scope if scope is not None else {})

    def pop(self):
        return self.scopes.pop()

    def declare(self, name, value):
        self.scopes[-1][name] = value

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise KeyError(name)

    def assign(self, name, value):
        """Rebind in the nearest enclosing scope that declares the name."""
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        raise KeyError(name)

    def bound(self, name):
        return any(name in scope for scope in self.scopes)


def default_value(t):
    if t.dims == 0:
        return False if t.base == "boolean" else 0
    fill = False if t.base == "boolean" else 0
    if t.dims == 1:
        return tuple([fill] * t.lengths[0])
    return tuple(tuple([fill] * t.lengths[1]) for _ in range(t.lengths[0]))


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


class ModelRuntime:
    """Interned, execution-oriented view of a parsed model."""

    def __init__(self, model):
        self.model = model
        self.n = len(model.rebecs)
        self.names = model.rebec_names
        names = []
        for c in model.classes:
            for m in c.msgsrvs:
                if m.name not in names:
                    names.append(m.name)
        self.msg_names = tuple(names)
        self.msg_ids = {name: i for i, name in enumerate(names)}
        self.initial_id = self.msg_ids["initial"]
        self.class_index = {c.name: k for k, c in enumerate(model.classes)}
        self.rebec_class = tuple(self.class_index[r.class_name]
                                 for r in model.rebecs)
        self.svar_names = []   # per class: tuple of state variable names
        self.svar_index = []   # per class: name -> position
        self.defaults = []     # per class: default values tuple
        self.servers = []      # per class: msg_id -> MsgSrv
        for c in model.classes:
            self.svar_names.append(tuple(v.name for v in c.state_vars))
            self.svar_index.append({v.name: i
                                    for i, v in enumerate(c.state_vars)})
            self.defaults.append(tuple(default_value(v.type)
                                       for v in c.state_vars))
            self.servers.append({self.msg_ids[m.name]: m for m in c.msgsrvs})
        self._compiled = None

    def initial_state(self):
        locals_ = []
        for i, r in enumerate(self.model.rebecs):
            cls = self.rebec_class[i]
            msg = (self.initial_id,) + tuple(r.init_args)
            locals_.append((self.defaults[cls], (msg,)))
        return tuple(locals_)

    def label(self, msg, rebec=None):
        """Action label `name(v1,...,vk)`, optionally prefixed `r<i>.`"""
        name = self.msg_names[msg[0]]
        args = ",".join(_fmt_value(v) for v in msg[1:])
        text = f"{name}({args})"
        if rebec is not None:
            text = f"r{rebec}.{text}"
        return text

    def server_for(self, rebec, msg_id):
        return self.servers[self.rebec_class[rebec]].get(msg_id)

    def var_value(self, state, rebec, name):
        """Read a state variable out of a compact state."""
        idx = self.svar_index[self.rebec_class[rebec]].get(name)
        if idx is None:
            raise KeyError(f"rebec {self.names[rebec]} has no state "
                           f"variable {name!r}")
        return state[rebec][0][idx]

    def compiled(self):
        if self._compiled is None:
            from .compiler import compile_model
            self._compiled = compile_model(self)
        return self._compiled

    def dump_state(self, state, gamma=None):
        lines = []
        for i, (vals, queue) in enumerate(state):
            cls = self.rebec_class[i]
            env = ", ".join(f"{n}={_fmt_value(v)}"
                            for n, v in zip(self.svar_names[cls], vals))
            q = ", ".join(self.label(m) for m in queue)
            lines.append(f"{self.names[i]}: ({{{env}}}, <{q}>)")
        if gamma is not None:
            lines.append("topology:")
            lines.extend("  " + " ".join(str(b) for b in row)
                         for row in gamma.matrix())
        return "\n".join(lines)


def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ",".join(_fmt_value(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True)
class GlobalState:
    """A compact state plus (for the mobile semantics) its topology."""

    locals: tuple
    gamma: Optional[object] = None  # topology.Topology

    def queue(self, i):
        return self.locals[i][1]


class _ExecCtx:
    __slots__ = ("rt", "env", "queues", "gamma", "self_id",
                 "consulted", "steps", "budget")

    def __init__(self, rt, env, queues, gamma, self_id, budget):
        self.rt = rt
        self.env = env
        self.queues = queues
        self.gamma = gamma
        self.self_id = self_id
        self.consulted = set()
        self.steps = 0
        self.budget = budget

    def tick(self, node):
        self.steps += 1
        if self.steps > self.budget:
            raise StepBudgetExceeded(
                f"message server exceeded the {self.budget}-statement "
                f"budget (possible divergence)",
                rebec=self.self_id, line=node.loc[0], col=node.loc[1])


def eval_expr(e, env, self_id):
    """Value of an expression under an environment; self is the rebec id."""
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, SelfExpr):
        return self_id
    if isinstance(e, Var):
        try:
            return env.lookup(e.name)
        except KeyError:
            raise ModelRuntimeError(f"unbound variable {e.name!r}",
                                    rebec=self_id,
                                    line=e.loc[0], col=e.loc[1]) from None
    if isinstance(e, Index):
        try:
            arr = env.lookup(e.name)
        except KeyError:
            raise ModelRuntimeError(f"unbound variable {e.name!r}",
                                    rebec=self_id,
                                    line=e.loc[0], col=e.loc[1]) from None
        for idx_expr in e.indices:
            idx = eval_expr(idx_expr, env, self_id)
            if not isinstance(arr, (list, tuple)):
                raise ModelRuntimeError(f"{e.name!r} is not an array",
                                        rebec=self_id,
                                        line=e.loc[0], col=e.loc[1])
            if not isinstance(idx, int) or isinstance(idx, bool) \
                    or not 0 <= idx < len(arr):
                raise ModelRuntimeError(
                    f"index {idx!r} out of bounds for {e.name!r} "
                    f"(length {len(arr)})", rebec=self_id,
                    line=e.loc[0], col=e.loc[1])
            arr = arr[idx]
        return arr
    if isinstance(e, Unary):
        v = eval_expr(e.operand, env, self_id)
        if e.op == "!":
            _want_bool(v, e, self_id)
            return not v
        _want_int(v, e, self_id)
        return -v
    if isinstance(e, Binary):
        op = e.op
        if op == "&&":
            l = eval_expr(e.left, env, self_id)
            _want_bool(l, e, self_id)
            return l and _as_bool(eval_expr(e.right, env, self_id), e, self_id)
        if op == "||":
            l = eval_expr(e.left, env, self_id)
            _want_bool(l, e, self_id)
            return l or _as_bool(eval_expr(e.right, env, self_id), e, self_id)
        l = eval_expr(e.left, env, self_id)
        r = eval_expr(e.right, env, self_id)
        if op == "==":
            _same_kind(l, r, e, self_id)
            return l == r
        if op == "!=":
            _same_kind(l, r, e, self_id)
            return l != r
        if op in ("+", "-", "*"):
            _want_int(l, e, self_id)
            _want_int(r, e, self_id)
            return l + r if op == "+" else l - r if op == "-" else l * r
        _want_int(l, e, self_id)
        _want_int(r, e, self_id)
        if op == "<":
            return l < r
        if op == ">":
            return l > r
        if op == "<=":
            return l <= r
        return l >= r
    if isinstance(e, NewArray):
        fill = False if e.base == "boolean" else 0
        if len(e.lengths) == 1:
            return [fill] * e.lengths[0]
        return [[fill] * e.lengths[1] for _ in range(e.lengths[0])]
    raise TypeError(f"unknown expression {e!r}")


def _want_bool(v, node, self_id):
    if not isinstance(v, bool):
        raise ModelRuntimeError(f"expected a boolean, found {v!r}",
                                rebec=self_id,
                                line=node.loc[0], col=node.loc[1])


def _as_bool(v, node, self_id):
    _want_bool(v, node, self_id)
    return v


def _want_int(v, node, self_id):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ModelRuntimeError(f"expected an int, found {v!r}",
                                rebec=self_id,
                                line=node.loc[0], col=node.loc[1])


def _same_kind(l, r, node, self_id):
    if isinstance(l, bool) != isinstance(r, bool):
        raise ModelRuntimeError(f"cannot compare {l!r} with {r!r}",
                                rebec=self_id,
                                line=node.loc[0], col=node.loc[1])


def _exec_stmt(s, ctx):
    """Execute one statement; NORMAL means all of it ran, BROKEN means a
    break is unwinding to the nearest enclosing loop."""
    ctx.tick(s)
    if isinstance(s, VarDeclStmt):
        if s.init is None:
            value = _thaw(default_value(s.type))
        else:
            value = eval_expr(s.init, ctx.env, ctx.self_id)
        ctx.env.declare(s.name, value)
        return NORMAL
    if isinstance(s, Assign):
        value = eval_expr(s.expr, ctx.env, ctx.self_id)
        target = s.target
        if isinstance(target, Var):
            try:
                ctx.env.assign(target.name, value)
            except KeyError:
                raise ModelRuntimeError(
                    f"unbound variable {target.name!r}", rebec=ctx.self_id,
                    line=s.loc[0], col=s.loc[1]) from None
            return NORMAL
        arr = eval_expr(Index(target.name, target.indices[:-1],
                              loc=target.loc) if len(target.indices) > 1
                        else Var(target.name, loc=target.loc),
                        ctx.env, ctx.self_id)
        idx = eval_expr(target.indices[-1], ctx.env, ctx.self_id)
        if not isinstance(arr, list):
            raise ModelRuntimeError(f"{target.name!r} is not an assignable "
                                    f"array", rebec=ctx.self_id,
                                    line=s.loc[0], col=s.loc[1])
        if not isinstance(idx, int) or isinstance(idx, bool) \
                or not 0 <= idx < len(arr):
            raise ModelRuntimeError(
                f"index {idx!r} out of bounds for {target.name!r} "
                f"(length {len(arr)})", rebec=ctx.self_id,
                line=s.loc[0], col=s.loc[1])
        arr[idx] = value
        return NORMAL
    if isinstance(s, If):
        cond = eval_expr(s.cond, ctx.env, ctx.self_id)
        _want_bool(cond, s, ctx.self_id)
        if cond:
            return _exec_stmt(s.then, ctx)
        if s.els is not None:
            return _exec_stmt(s.els, ctx)
        return NORMAL
    if isinstance(s, While):
        while True:
            cond = eval_expr(s.cond, ctx.env, ctx.self_id)
            _want_bool(cond, s, ctx.self_id)
            if not cond:
                return NORMAL
            if _exec_stmt(s.body, ctx) is BROKEN:
                return NORMAL  # the break terminates the loop itself
            ctx.tick(s)
    if isinstance(s, Break):
        return BROKEN
    if isinstance(s, Block):
        ctx.env.push()
        result = _exec_seq(s.stmts, ctx)
        ctx.env.pop()
        return result
    if isinstance(s, (Broadcast, Multicast, Unicast)):
        return exec_comm(s, ctx)
    raise TypeError(f"unknown statement {s!r}")


def _exec_seq(stmts, ctx):
    for s in stmts:
        if _exec_stmt(s, ctx) is BROKEN:
            return BROKEN  # discard the remaining statements
    return NORMAL


def _message_value(rt, msg_name, args, ctx, node):
    msg_id = rt.msg_ids.get(msg_name)
    if msg_id is None:
        raise ModelRuntimeError(f"unknown message {msg_name!r}",
                                rebec=ctx.self_id,
                                line=node.loc[0], col=node.loc[1])
    values = tuple(_freeze(eval_expr(a, ctx.env, ctx.self_id)) for a in args)
    return (msg_id,) + values


def exec_comm(s, ctx):
    """Broadcast, multicast, or conditional unicast under ctx.gamma."""
    rt = ctx.rt
    me = ctx.self_id
    gamma = ctx.gamma
    if isinstance(s, Broadcast):
        msg = _message_value(rt, s.msg, s.args, ctx, s)
        for k in range(rt.n):
            if k == me:
                continue
            ctx.consulted.add(k)
            if gamma.connected(me, k):
                ctx.queues[k].append(msg)
        return NORMAL
    if isinstance(s, Multicast):
        rcvs = eval_expr(s.receivers, ctx.env, ctx.self_id)
        if not isinstance(rcvs, (list, tuple)) or len(rcvs) != rt.n:
            raise ModelRuntimeError(
                "multicast receiver set must be a boolean array with one "
                "slot per rebec", rebec=me, line=s.loc[0], col=s.loc[1])
        msg = _message_value(rt, s.msg, s.args, ctx, s)
        for k, wanted in enumerate(rcvs):
            if not wanted:
                continue
            if k != me:
                ctx.consulted.add(k)
            if gamma.connected(me, k):
                ctx.queues[k].append(msg)
        return NORMAL
    # unicast
    if isinstance(s.receiver, SelfExpr):
        j = me
    else:
        j = eval_expr(s.receiver, ctx.env, ctx.self_id)
        if isinstance(j, bool) or not isinstance(j, int) \
                or not 0 <= j < rt.n:
            raise ModelRuntimeError(f"unicast receiver {j!r} is not a "
                                    f"rebec identifier", rebec=me,
                                    line=s.loc[0], col=s.loc[1])
    msg = _message_value(rt, s.msg, s.args, ctx, s)
    if j != me:
        ctx.consulted.add(j)
    if gamma.connected(me, j):
        ctx.queues[j].append(msg)
        if s.succ is not None:
            return _exec_stmt(s.succ, ctx)
        return NORMAL
    if s.unsucc is not None:
        return _exec_stmt(s.unsucc, ctx)
    return NORMAL


def exec_block(stmts, env, queues, gamma, self_id, rt,
               budget=DEFAULT_STEP_BUDGET):
    """Run a statement sequence; returns (env, queues, completion).

    The inputs are not modified; the returned environment and queues are
    fresh copies reflecting the execution.
    """
    env2 = Environment([dict((k, _thaw(v)) for k, v in scope.items())
                        for scope in env.scopes])
    ctx = _ExecCtx(rt, env2, [list(q) for q in queues], gamma, self_id,
                   budget)
    completion = _exec_seq(tuple(stmts), ctx)
    return env2, ctx.queues, completion


def handle_message(rt, gstate, i, budget=DEFAULT_STEP_BUDGET,
                   with_rebec_prefix=False):
    """Process the head message of rebec i's queue atomically.

    Returns (new GlobalState, label, consulted links).  A message with
    no matching server in the rebec's class is removed and discarded.
    """
    state = gstate.locals
    gamma = gstate.gamma
    vals, queue = state[i]
    if not queue:
        raise ModelRuntimeError("queue is empty", rebec=i)
    msg = queue[0]
    label = rt.label(msg, rebec=i if with_rebec_prefix else None)
    srv = rt.server_for(i, msg[0])
    queues = [list(s[1]) for s in state]
    queues[i].pop(0)
    if srv is None:
        new_locals = tuple(
            (state[j][0], tuple(queues[j])) for j in range(rt.n))
        return GlobalState(new_locals, gamma), label, frozenset()

    cls = rt.rebec_class[i]
    bottom = {name: _thaw(v)
              for name, v in zip(rt.svar_names[cls], vals)}
    env = Environment([bottom])
    params = {}
    for p, v in zip(srv.params, msg[1:]):
        params[p.name] = _thaw(v)
    env.push(params)
    ctx = _ExecCtx(rt, env, queues, gamma, i, budget)
    _exec_seq(srv.body, ctx)
    env.pop()

    new_vals = tuple(_freeze(bottom[name]) for name in rt.svar_names[cls])
    new_locals = []
    for j in range(rt.n):
        v = new_vals if j == i else state[j][0]
        new_locals.append((v, tuple(ctx.queues[j])))
    return (GlobalState(tuple(new_locals), gamma), label,
            frozenset(ctx.consulted))


def mov(gstate, gamma2, constraint=None, name_to_id=None):
    """Replace the topology, leaving every local state untouched."""
    if constraint is not None:
        from .topology import satisfies
        if not satisfies(gamma2, constraint, name_to_id):
            raise ModelRuntimeError("target topology violates the "
                                    "network constraint")
    return GlobalState(gstate.locals, gamma2)
