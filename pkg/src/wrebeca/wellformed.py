"""Static well-formedness checks over a parsed Model.

Violations are returned, not raised; an empty list means the model is
well-formed.  Every violation carries the source location it refers to.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    Assign, Binary, Block, BoolLit, Break, Broadcast, ConAnd, ConLink,
    If, Index, IntLit, Multicast, NewArray, SelfExpr, Type, Unary,
    Unicast, Var, VarDeclStmt, While,
)
from .topology import satisfies

INT = Type("int")
BOOL = Type("boolean")


@dataclass(frozen=True)
class Violation:
    message: str
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class _ClassChecker:
    def __init__(self, cls, signatures, out):
        self.cls = cls
        self.signatures = signatures  # msg name -> list of param type tuples
        self.out = out
        self.state_types = {}

    def report(self, node, message):
        line, col = getattr(node, "loc", (0, 0))
        self.out.append(Violation(message, line, col))

    def run(self):
        cls = self.cls
        for v in cls.state_vars:
            if v.name in self.state_types:
                self.report(v, f"duplicate state variable {v.name!r} "
                               f"in class {cls.name!r}")
            self.state_types[v.name] = v.type
        seen = set()
        for m in cls.msgsrvs:
            if m.name in seen:
                self.report(m, f"duplicate message server {m.name!r} "
                               f"in class {cls.name!r}")
            seen.add(m.name)
        if "initial" not in seen:
            self.report(cls, f"class {cls.name!r} has no initial "
                             f"message server")
        for m in cls.msgsrvs:
            self.check_msgsrv(m)

    def check_msgsrv(self, m):
        params = {}
        for p in m.params:
            if p.name in self.state_types:
                self.report(p, f"parameter {p.name!r} of {m.name!r} "
                               f"redeclares a state variable")
            if p.name in params:
                self.report(p, f"duplicate parameter {p.name!r} "
                               f"in {m.name!r}")
            params[p.name] = p.type
        scopes = [self.state_types, params]
        self.check_stmts(m.body, scopes, in_loop=False, srv=m)

    # -- scope walk --

    def lookup(self, scopes, name):
        for scope in reversed(scopes):
            if name in scope:
                return scope[name]
        return None

    def check_stmts(self, stmts, scopes, in_loop, srv):
        scopes.append({})
        for s in stmts:
            self.check_stmt(s, scopes, in_loop, srv)
        scopes.pop()

    def check_body(self, body, scopes, in_loop, srv):
        if isinstance(body, Block):
            self.check_stmts(body.stmts, scopes, in_loop, srv)
        else:
            self.check_stmt(body, scopes, in_loop, srv)

    def check_stmt(self, s, scopes, in_loop, srv):
        if isinstance(s, VarDeclStmt):
            if s.name in self.state_types:
                self.report(s, f"local {s.name!r} in {srv.name!r} "
                               f"redeclares a state variable")
            if s.name in scopes[-1]:
                self.report(s, f"variable {s.name!r} redeclared in the "
                               f"same scope")
            scopes[-1][s.name] = s.type
            if s.init is not None and not isinstance(s.init, NewArray):
                t = self.expr_type(s.init, scopes)
                if t is not None and t != s.type:
                    self.report(s, f"initializer of {s.name!r} has type "
                                   f"{t}, expected {s.type}")
        elif isinstance(s, Assign):
            self.check_assign(s, scopes)
        elif isinstance(s, If):
            self.require_bool(s.cond, scopes, "if condition")
            self.check_body(s.then, scopes, in_loop, srv)
            if s.els is not None:
                self.check_body(s.els, scopes, in_loop, srv)
        elif isinstance(s, While):
            self.require_bool(s.cond, scopes, "while condition")
            self.check_body(s.body, scopes, True, srv)
        elif isinstance(s, Break):
            if not in_loop:
                self.report(s, "break outside of a loop")
        elif isinstance(s, Block):
            self.check_stmts(s.stmts, scopes, in_loop, srv)
        elif isinstance(s, Broadcast):
            self.check_send(s, s.msg, s.args, scopes)
        elif isinstance(s, Multicast):
            t = self.expr_type(s.receivers, scopes)
            if t is not None and t != Type("boolean", 1, t.lengths):
                self.report(s, "multicast receiver set must be a boolean "
                               "array indexed by rebec identifier")
            self.check_send(s, s.msg, s.args, scopes)
        elif isinstance(s, Unicast):
            if not isinstance(s.receiver, SelfExpr):
                t = self.expr_type(s.receiver, scopes)
                if t is not None and t != INT:
                    self.report(s, "unicast receiver must be self or an "
                                   "int-valued expression")
            self.check_send(s, s.msg, s.args, scopes)
            if s.succ is not None:
                self.check_body(s.succ, scopes, in_loop, srv)
            if s.unsucc is not None:
                self.check_body(s.unsucc, scopes, in_loop, srv)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def check_assign(self, s, scopes):
        target = s.target
        if isinstance(target, Var):
            t = self.expr_type(target, scopes)
            if t is not None and t.dims:
                self.report(s, f"whole-array assignment to {target.name!r} "
                               f"is not supported; assign elements")
                return
        t = self.expr_type(target, scopes)
        et = self.expr_type(s.expr, scopes)
        if t is not None and et is not None and t.base != et.base:
            self.report(s, f"assignment of {et} value to {t} variable")

    def check_send(self, node, msg, args, scopes):
        if msg == "initial":
            self.report(node, "the initial message server is a constructor "
                              "and cannot be sent to")
            return
        sigs = self.signatures.get(msg)
        if sigs is None:
            self.report(node, f"message {msg!r} has no message server "
                              f"in any class")
            return
        arg_types = [self.expr_type(a, scopes) for a in args]
        for sig in sigs:
            if len(sig) != len(args):
                self.report(node, f"message {msg!r} sent with {len(args)} "
                                  f"arguments, server takes {len(sig)}")
                continue
            for i, (want, got) in enumerate(zip(sig, arg_types)):
                if got is None:
                    continue
                if want.base != got.base or want.dims != got.dims:
                    self.report(node, f"argument {i} of {msg!r} has type "
                                      f"{got}, server expects {want}")

    def require_bool(self, e, scopes, what):
        t = self.expr_type(e, scopes)
        if t is not None and t != BOOL:
            self.report(e, f"{what} must be boolean, found {t}")

    def expr_type(self, e, scopes):
        """Static type, or None if already reported as unresolvable."""
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, SelfExpr):
            return INT
        if isinstance(e, Var):
            t = self.lookup(scopes, e.name)
            if t is None:
                self.report(e, f"undeclared variable {e.name!r}")
            return t
        if isinstance(e, Index):
            t = self.lookup(scopes, e.name)
            if t is None:
                self.report(e, f"undeclared variable {e.name!r}")
                return None
            if t.dims < len(e.indices):
                self.report(e, f"{e.name!r} indexed with {len(e.indices)} "
                               f"subscripts but has {t.dims} dimension(s)")
                return None
            for i in e.indices:
                it = self.expr_type(i, scopes)
                if it is not None and it != INT:
                    self.report(i, "array subscript must be an int")
            rest = t.dims - len(e.indices)
            return Type(t.base, rest, t.lengths[len(e.indices):])
        if isinstance(e, Unary):
            t = self.expr_type(e.operand, scopes)
            want = BOOL if e.op == "!" else INT
            if t is not None and t != want:
                self.report(e, f"operand of {e.op} must be {want}, found {t}")
            return want
        if isinstance(e, Binary):
            lt = self.expr_type(e.left, scopes)
            rt = self.expr_type(e.right, scopes)
            if e.op in ("+", "-", "*"):
                for t in (lt, rt):
                    if t is not None and t != INT:
                        self.report(e, f"operand of {e.op} must be int, "
                                       f"found {t}")
                return INT
            if e.op in ("&&", "||"):
                for t in (lt, rt):
                    if t is not None and t != BOOL:
                        self.report(e, f"operand of {e.op} must be boolean, "
                                       f"found {t}")
                return BOOL
            if e.op in ("==", "!="):
                if lt is not None and rt is not None and lt.base != rt.base:
                    self.report(e, f"cannot compare {lt} with {rt}")
                return BOOL
            # relational
            for t in (lt, rt):
                if t is not None and t != INT:
                    self.report(e, f"operand of {e.op} must be int, found {t}")
            return BOOL
        if isinstance(e, NewArray):
            return Type(e.base, len(e.lengths), e.lengths)
        raise TypeError(f"unknown expression {e!r}")


def check_well_formed(model):
    """Run all checks; returns the list of violations (empty iff clean)."""
    out = []

    def report(node, message):
        line, col = getattr(node, "loc", (0, 0))
        out.append(Violation(message, line, col))

    class_names = set()
    for c in model.classes:
        if c.name in class_names:
            report(c, f"duplicate class name {c.name!r}")
        class_names.add(c.name)

    signatures = {}
    for c in model.classes:
        for m in c.msgsrvs:
            signatures.setdefault(m.name, []).append(
                tuple(p.type for p in m.params))

    for c in model.classes:
        _ClassChecker(c, signatures, out).run()

    rebec_names = set()
    ids = {r.name: i for i, r in enumerate(model.rebecs)}
    for i, r in enumerate(model.rebecs):
        if r.name in rebec_names:
            report(r, f"duplicate rebec name {r.name!r}")
        rebec_names.add(r.name)
        if r.class_name not in class_names:
            report(r, f"rebec {r.name!r} instantiates unknown class "
                      f"{r.class_name!r}")
            continue
        cls = model.class_of(r.class_name)
        init = cls.msgsrv("initial")
        if init is not None:
            if len(init.params) != len(r.init_args):
                report(r, f"rebec {r.name!r} passes {len(r.init_args)} "
                          f"initial arguments, expected {len(init.params)}")
            else:
                for k, (p, v) in enumerate(zip(init.params, r.init_args)):
                    want_bool = p.type == BOOL
                    if p.type.dims:
                        report(r, f"initial parameter {p.name!r} is an "
                                  f"array; arrays cannot be passed at "
                                  f"instantiation")
                    elif isinstance(v, bool) != want_bool:
                        report(r, f"initial argument {k} of {r.name!r} "
                                  f"should be {p.type}")
        # symmetry of known lists
        for known in r.knowns:
            j = ids[known]
            if r.name not in model.rebecs[j].knowns and j != i:
                report(r, f"asymmetric initial topology: {r.name!r} lists "
                          f"{known!r} but not vice versa")

    _check_constraint(model.constraint, ids, report)
    if not satisfies(model.initial_topology, model.constraint, ids):
        report(model.constraint, "initial topology violates constraint")
    return out


def _check_constraint(c, ids, report):
    if isinstance(c, ConLink):
        for name in (c.a, c.b):
            if name not in ids:
                report(c, f"unknown rebec {name!r} in constraint")
        if c.a == c.b:
            report(c, f"constraint links {c.a!r} to itself")
    elif isinstance(c, ConAnd):
        _check_constraint(c.left, ids, report)
        _check_constraint(c.right, ids, report)
