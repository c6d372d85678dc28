"""Message-server compiler: AST bodies to Python functions.

State-space generation spends nearly all its time re-running handlers,
so each message server is translated once into a flat Python function
over the compact state representation.  Scoping is resolved at compile
time by alpha-renaming, so the generated code needs no runtime scope
stack; arrays are thawed to lists only when some statement writes to
them.  The semantics must match the tree-walking interpreter in
semantics.py exactly (the test suite compares whole state spaces built
with either engine).

Generated handler signature:

    fn(vals, args, self_id, row, out, nbrs, budget) -> (new_vals, consulted)

where `row` is the sender's adjacency bitmask (bit k set iff connected
to k, self bit included), `out` collects per-rebec appended messages,
`nbrs` maps a row mask to the neighbor tuple, and `consulted` is the
bitmask of links whose status the handler actually read.
"""

from __future__ import annotations

from .errors import ModelRuntimeError, StepBudgetExceeded
from .semantics import DEFAULT_STEP_BUDGET
from .syntax import (
    Assign, Binary, Block, BoolLit, Break, Broadcast, If, Index, IntLit,
    Multicast, NewArray, SelfExpr, Type, Unary, Unicast, Var, VarDeclStmt,
    While,
)
from .topology import neighbor_table

_BINOP = {"&&": "and", "||": "or", "==": "==", "!=": "!=", "<": "<",
          ">": ">", "<=": "<=", ">=": ">=", "+": "+", "-": "-", "*": "*"}


def _oob(idx, name, line, col, rebec):
    raise ModelRuntimeError(f"index {idx!r} out of bounds for {name!r}",
                            rebec=rebec, line=line, col=col)


def _budget_hit(rebec, line, col, budget):
    raise StepBudgetExceeded(
        f"message server exceeded the {budget}-statement budget "
        f"(possible divergence)", rebec=rebec, line=line, col=col)


def _bad_receiver(j, rebec, line, col):
    raise ModelRuntimeError(f"unicast receiver {j!r} is not a rebec "
                            f"identifier", rebec=rebec, line=line, col=col)


def _bad_multicast(rebec, line, col):
    raise ModelRuntimeError("multicast receiver set must be a boolean "
                            "array with one slot per rebec",
                            rebec=rebec, line=line, col=col)


class _FnGen:
    def __init__(self, rt, cls_idx, srv):
        self.rt = rt
        self.srv = srv
        self.lines = []
        self.depth = 1
        self.tmp = 0
        cls = rt.model.classes[cls_idx]
        self.svars = list(cls.state_vars)
        # scopes map a source name to (py_name, Type, container kind)
        # kind: "val" scalar, "tuple" frozen array, "list" thawed array
        self.scopes = [{}]
        self.mutated = set()  # py names of state/param arrays written to
        self.locnum = 0

    # -- emission helpers --

    def emit(self, text):
        self.lines.append("    " * self.depth + text)

    def fresh(self, hint="t"):
        self.tmp += 1
        return f"_{hint}{self.tmp}"

    def push_scope(self):
        self.scopes.append({})

    def pop_scope(self):
        self.scopes.pop()

    def bind(self, name, py, typ, kind):
        self.scopes[-1][name] = (py, typ, kind)

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise KeyError(name)

    # -- expression translation --

    def expr(self, e):
        """Returns (python code, Type)."""
        if isinstance(e, IntLit):
            return repr(e.value), Type("int")
        if isinstance(e, BoolLit):
            return ("True" if e.value else "False"), Type("boolean")
        if isinstance(e, SelfExpr):
            return "self_id", Type("int")
        if isinstance(e, Var):
            py, typ, kind = self.lookup(e.name)
            return py, typ
        if isinstance(e, Index):
            return self.indexed(e)
        if isinstance(e, Unary):
            code, _ = self.expr(e.operand)
            op = "not " if e.op == "!" else "-"
            return f"({op}{code})", Type("boolean" if e.op == "!" else "int")
        if isinstance(e, Binary):
            lc, lt = self.expr(e.left)
            rc, rt_ = self.expr(e.right)
            result = lt if e.op in ("+", "-", "*") else Type("boolean")
            return f"({lc} {_BINOP[e.op]} {rc})", result
        if isinstance(e, NewArray):
            fill = "False" if e.base == "boolean" else "0"
            if len(e.lengths) == 1:
                return f"[{fill}] * {e.lengths[0]}", Type(e.base, 1, e.lengths)
            return (f"[[{fill}] * {e.lengths[1]} "
                    f"for _ in range({e.lengths[0]})]",
                    Type(e.base, 2, e.lengths))
        raise TypeError(f"unknown expression {e!r}")

    def indexed(self, e, drop_last=False):
        """Bounds-checked read a[i] or a[i][j]; walrus keeps it inline."""
        py, typ, kind = self.lookup(e.name)
        indices = e.indices[:-1] if drop_last else e.indices
        code = py
        line, col = e.loc
        for level, idx in enumerate(indices):
            icode, _ = self.expr(idx)
            t = self.fresh("i")
            if level < len(typ.lengths):
                bound = str(typ.lengths[level])
            else:
                bound = f"len({code})"
            code = (f"{code}[{t} if 0 <= ({t} := {icode}) < {bound} "
                    f"else _oob({t}, {e.name!r}, {line}, {col}, self_id)]")
        rest = typ.dims - len(indices)
        return code, Type(typ.base, rest, typ.lengths[len(indices):])

    def freeze_code(self, code, typ, kind):
        """Freeze an array value for inclusion in a message."""
        if typ.dims == 0 or kind == "tuple":
            return code
        if typ.dims == 1:
            return f"tuple({code})"
        return f"tuple(map(tuple, {code}))"

    def message_code(self, msg, args, node):
        msg_id = self.rt.msg_ids.get(msg)
        if msg_id is None:
            raise ModelRuntimeError(f"unknown message {msg!r}",
                                    line=node.loc[0], col=node.loc[1])
        parts = [repr(msg_id)]
        for a in args:
            code, typ = self.expr(a)
            kind = "val"
            if isinstance(a, Var):
                _, _, kind = self.lookup(a.name)
            if typ.dims and kind != "tuple":
                code = self.freeze_code(code, typ, kind)
            parts.append(code)
        return "(" + ", ".join(parts) + ("," if len(parts) == 1 else "") + ")"

    # -- statement translation --

    def stmt_count(self, s):
        if isinstance(s, Block):
            return sum(self.stmt_count(x) for x in s.stmts)
        if isinstance(s, If):
            branches = max(self.stmt_count(s.then),
                           self.stmt_count(s.els) if s.els else 0)
            return 1 + branches
        if isinstance(s, While):
            return 1 + self.stmt_count(s.body)
        return 1

    def stmt(self, s):
        if isinstance(s, VarDeclStmt):
            py = self.fresh("v")
            if s.init is None:
                if s.type.dims == 0:
                    code = "False" if s.type.base == "boolean" else "0"
                else:
                    code, _ = self.expr(NewArray(s.type.base, s.type.lengths))
            else:
                code, _ = self.expr(s.init)
            kind = "list" if s.type.dims else "val"
            self.bind(s.name, py, s.type, kind)
            self.emit(f"{py} = {code}")
            return
        if isinstance(s, Assign):
            target = s.target
            value, _ = self.expr(s.expr)
            if isinstance(target, Var):
                py, typ, kind = self.lookup(target.name)
                self.emit(f"{py} = {value}")
                return
            py, typ, kind = self.lookup(target.name)
            if kind == "tuple":
                # first write to a frozen state/param array: thaw it
                self.mutated.add(py)
                kind = "list"
                for scope in self.scopes:
                    if target.name in scope and scope[target.name][0] == py:
                        scope[target.name] = (py, typ, "list")
            base_code, _ = self.indexed(target, drop_last=True) \
                if len(target.indices) > 1 else (py, None)
            icode, _ = self.expr(target.indices[-1])
            t = self.fresh("i")
            level = len(target.indices) - 1
            if level < len(typ.lengths):
                bound = str(typ.lengths[level])
            else:
                bound = f"len({base_code})"
            line, col = s.loc
            self.emit(f"{t} = {icode}")
            self.emit(f"if not 0 <= {t} < {bound}: "
                      f"_oob({t}, {target.name!r}, {line}, {col}, self_id)")
            self.emit(f"{base_code}[{t}] = {value}")
            return
        if isinstance(s, If):
            cond, _ = self.expr(s.cond)
            self.emit(f"if {cond}:")
            self.body(s.then)
            if s.els is not None:
                self.emit("else:")
                self.body(s.els)
            return
        if isinstance(s, While):
            cond, _ = self.expr(s.cond)
            line, col = s.loc
            cost = self.stmt_count(s.body) + 1
            self.emit(f"while {cond}:")
            self.depth += 1
            self.emit(f"_steps += {cost}")
            self.emit(f"if _steps > budget: "
                      f"_budget_hit(self_id, {line}, {col}, budget)")
            self.depth -= 1
            self.body(s.body, pushed=True)
            return
        if isinstance(s, Break):
            self.emit("break")
            return
        if isinstance(s, Block):
            self.push_scope()
            if not s.stmts:
                self.emit("pass")
            for x in s.stmts:
                self.stmt(x)
            self.pop_scope()
            return
        if isinstance(s, Broadcast):
            m = self.fresh("m")
            self.emit(f"{m} = {self.message_code(s.msg, s.args, s)}")
            self.emit("_consulted |= _others")
            self.emit(f"for _k in nbrs[row]: out[_k].append({m})")
            return
        if isinstance(s, Multicast):
            rcode, rtyp = self.expr(s.receivers)
            rc = self.fresh("rc")
            m = self.fresh("m")
            line, col = s.loc
            self.emit(f"{rc} = {rcode}")
            self.emit(f"if len({rc}) != {self.rt.n}: "
                      f"_bad_multicast(self_id, {line}, {col})")
            self.emit(f"{m} = {self.message_code(s.msg, s.args, s)}")
            self.emit(f"for _k in range({self.rt.n}):")
            self.depth += 1
            self.emit(f"if {rc}[_k]:")
            self.depth += 1
            self.emit("if _k != self_id: _consulted |= 1 << _k")
            self.emit(f"if row >> _k & 1: out[_k].append({m})")
            self.depth -= 2
            return
        if isinstance(s, Unicast):
            m = self.fresh("m")
            line, col = s.loc
            if isinstance(s.receiver, SelfExpr):
                self.emit(f"{m} = {self.message_code(s.msg, s.args, s)}")
                self.emit(f"out[self_id].append({m})")
                if s.succ is not None:
                    self.stmt(s.succ)
                return
            j = self.fresh("j")
            jcode, _ = self.expr(s.receiver)
            self.emit(f"{j} = {jcode}")
            self.emit(f"if not 0 <= {j} < {self.rt.n}: "
                      f"_bad_receiver({j}, self_id, {line}, {col})")
            self.emit(f"{m} = {self.message_code(s.msg, s.args, s)}")
            self.emit(f"if {j} != self_id: _consulted |= 1 << {j}")
            self.emit(f"if row >> {j} & 1:")
            self.depth += 1
            self.emit(f"out[{j}].append({m})")
            if s.succ is not None:
                self.stmt(s.succ)
            self.depth -= 1
            if s.unsucc is not None:
                self.emit("else:")
                self.body(s.unsucc)
            return
        raise TypeError(f"unknown statement {s!r}")

    def body(self, s, pushed=False):
        self.depth += 1
        if isinstance(s, Block):
            self.push_scope()
            if not s.stmts and not pushed:
                self.emit("pass")
            elif not s.stmts:
                self.emit("pass")
            for x in s.stmts:
                self.stmt(x)
            self.pop_scope()
        else:
            self.stmt(s)
        self.depth -= 1

    # -- assembly --

    def build(self, fname):
        body_lines = self.lines = []
        # bind statevars and parameters before translating the body
        sv_py = []
        for k, v in enumerate(self.svars):
            py = f"sv_{v.name}"
            sv_py.append(py)
            kind = "tuple" if v.type.dims else "val"
            self.bind(v.name, py, v.type, kind)
        self.push_scope()
        param_py = []
        for k, p in enumerate(self.srv.params):
            py = f"p_{p.name}"
            param_py.append(py)
            kind = "tuple" if p.type.dims else "val"
            self.bind(p.name, py, p.type, kind)
        self.push_scope()
        for s in self.srv.body:
            self.stmt(s)
        head = [f"def {fname}(vals, args, self_id, row, out, nbrs, "
                f"budget={DEFAULT_STEP_BUDGET}):",
                "    _consulted = 0",
                f"    _others = {(1 << self.rt.n) - 1} ^ (1 << self_id)",
                f"    _steps = {len(self.srv.body)}"]
        for k, (v, py) in enumerate(zip(self.svars, sv_py)):
            if py in self.mutated:
                if v.type.dims == 1:
                    head.append(f"    {py} = list(vals[{k}])")
                else:
                    head.append(f"    {py} = [list(_r) for _r in vals[{k}]]")
            else:
                head.append(f"    {py} = vals[{k}]")
        for k, (p, py) in enumerate(zip(self.srv.params, param_py)):
            if py in self.mutated:
                if p.type.dims == 1:
                    head.append(f"    {py} = list(args[{k}])")
                else:
                    head.append(f"    {py} = [list(_r) for _r in args[{k}]]")
            else:
                head.append(f"    {py} = args[{k}]")
        tail_vals = []
        for v, py in zip(self.svars, sv_py):
            if py in self.mutated:
                if v.type.dims == 1:
                    tail_vals.append(f"tuple({py})")
                else:
                    tail_vals.append(f"tuple(map(tuple, {py}))")
            else:
                tail_vals.append(py)
        if tail_vals:
            tup = ", ".join(tail_vals) + ("," if len(tail_vals) == 1 else "")
        else:
            tup = ""
        tail = [f"    return (({tup}), _consulted)"]
        if not body_lines:
            body_lines = ["    pass"]
        return "\n".join(head + body_lines + tail)


class CompiledModel:
    """Per-class dispatch tables of generated handler functions."""

    def __init__(self, rt):
        self.rt = rt
        self.n = rt.n
        self.neigh = neighbor_table(rt.n)
        self.others_mask = (1 << rt.n) - 1
        self.dispatch = []
        self.sources = {}
        namespace = {
            "_oob": _oob,
            "_budget_hit": _budget_hit,
            "_bad_receiver": _bad_receiver,
            "_bad_multicast": _bad_multicast,
        }
        for ci, cls in enumerate(rt.model.classes):
            table = {}
            for m in cls.msgsrvs:
                gen = _FnGen(rt, ci, m)
                fname = f"_w_{cls.name}_{m.name}"
                code = gen.build(fname)
                local_ns = dict(namespace)
                exec(compile(code, f"<msgsrv {cls.name}.{m.name}>", "exec"),
                     local_ns)
                table[rt.msg_ids[m.name]] = local_ns[fname]
                self.sources[(cls.name, m.name)] = code
            self.dispatch.append(table)
        self._label_cache = {}

    def label(self, msg):
        lab = self._label_cache.get(msg)
        if lab is None:
            lab = self.rt.label(msg)
            self._label_cache[msg] = lab
        return lab

    def fire(self, state, i, row, budget=DEFAULT_STEP_BUDGET):
        """Handle the head message of rebec i under adjacency row `row`.

        Returns (new_state, msg, consulted_bitmask).
        """
        vals, queue = state[i]
        msg = queue[0]
        fn = self.dispatch[self.rt.rebec_class[i]].get(msg[0])
        n = self.n
        out = [[] for _ in range(n)]
        if fn is None:
            new_vals, consulted = vals, 0
        else:
            new_vals, consulted = fn(vals, msg[1:], i, row, out,
                                     self.neigh[i], budget)
        new_state = list(state)
        for j in range(n):
            if j == i:
                q = queue[1:] + tuple(out[j]) if out[j] else queue[1:]
                new_state[j] = (new_vals, q)
            elif out[j]:
                sj = state[j]
                new_state[j] = (sj[0], sj[1] + tuple(out[j]))
        return tuple(new_state), msg, consulted


def compile_model(rt):
    return CompiledModel(rt)
