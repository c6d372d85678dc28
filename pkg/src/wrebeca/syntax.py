"""AST node definitions and the canonical pretty-printer.

Source locations are carried on every node but excluded from equality,
so two parses of equivalent text compare equal structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

INT = "int"
BOOL = "boolean"


@dataclass(frozen=True)
class Type:
    base: str          # "int" | "boolean"
    dims: int = 0      # 0 scalar, 1 vector, 2 matrix
    lengths: Tuple[int, ...] = ()  # known lengths; empty for bare array params

    def __str__(self):
        return self.base + "[]" * self.dims


def loc_field():
    return field(default=(0, 0), compare=False, repr=False)


# --- expressions ---------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    loc: tuple = loc_field()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    loc: tuple = loc_field()


@dataclass(frozen=True)
class SelfExpr:
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Var:
    name: str
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Index:
    name: str
    indices: tuple  # 1 or 2 expressions
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Unary:
    op: str  # "!" | "-"
    operand: object
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    loc: tuple = loc_field()


@dataclass(frozen=True)
class NewArray:
    base: str
    lengths: tuple
    loc: tuple = loc_field()


# --- statements ----------------------------------------------------------

@dataclass(frozen=True)
class VarDeclStmt:
    type: Type
    name: str
    init: Optional[object]  # expression or NewArray or None
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Assign:
    target: object  # Var or Index
    expr: object
    loc: tuple = loc_field()


@dataclass(frozen=True)
class If:
    cond: object
    then: object          # statement (possibly Block)
    els: Optional[object]
    loc: tuple = loc_field()


@dataclass(frozen=True)
class While:
    cond: object
    body: object
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Break:
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Block:
    stmts: tuple
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Broadcast:
    msg: str
    args: tuple
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Multicast:
    receivers: object  # expression naming a boolean array
    msg: str
    args: tuple
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Unicast:
    receiver: object  # SelfExpr or int-valued expression
    msg: str
    args: tuple
    succ: Optional[object]
    unsucc: Optional[object]
    loc: tuple = loc_field()


# --- constraints ---------------------------------------------------------

@dataclass(frozen=True)
class ConTrue:
    loc: tuple = loc_field()


@dataclass(frozen=True)
class ConLink:
    a: str
    b: str
    negated: bool
    loc: tuple = loc_field()


@dataclass(frozen=True)
class ConAnd:
    left: object
    right: object
    loc: tuple = loc_field()


# --- declarations --------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    type: Type
    name: str
    loc: tuple = loc_field()


@dataclass(frozen=True)
class MsgSrv:
    name: str
    params: tuple  # of VarDecl
    body: tuple    # of statements
    loc: tuple = loc_field()


@dataclass(frozen=True)
class ReactiveClass:
    name: str
    state_vars: tuple  # of VarDecl
    msgsrvs: tuple     # of MsgSrv
    loc: tuple = loc_field()

    def msgsrv(self, name):
        for m in self.msgsrvs:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class RebecDecl:
    class_name: str
    name: str
    knowns: tuple      # rebec names
    init_args: tuple   # literal values (int/bool)
    loc: tuple = loc_field()


@dataclass(frozen=True)
class Model:
    classes: tuple
    rebecs: tuple           # identifiers are their positions, 0-based
    constraint: object
    initial_topology: object  # topology.Topology

    def class_of(self, name):
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def rebec_names(self):
        return tuple(r.name for r in self.rebecs)

    def rebec_id(self, name):
        for i, r in enumerate(self.rebecs):
            if r.name == name:
                return i
        raise KeyError(name)

    def rebec_class(self, i):
        return self.class_of(self.rebecs[i].class_name)


# --- pretty printer ------------------------------------------------------

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, ">": 4, "<=": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6,
}


def format_expr(e, parent_prec=0):
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, SelfExpr):
        return "self"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return e.name + "".join(f"[{format_expr(i)}]" for i in e.indices)
    if isinstance(e, Unary):
        return e.op + format_expr(e.operand, 7)
    if isinstance(e, Binary):
        p = _PREC[e.op]
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({s})" if p < parent_prec else s
    if isinstance(e, NewArray):
        return f"new {e.base}" + "".join(f"[{k}]" for k in e.lengths)
    raise TypeError(f"not an expression: {e!r}")


def format_constraint(c):
    if isinstance(c, ConTrue):
        return "true"
    if isinstance(c, ConLink):
        bang = "!" if c.negated else ""
        return f"{bang}con({c.a},{c.b})"
    if isinstance(c, ConAnd):
        return f"and({format_constraint(c.left)},{format_constraint(c.right)})"
    raise TypeError(f"not a constraint: {c!r}")


def _fmt_decl(d):
    t = d.type
    text = f"{t.base}{'[]' * t.dims} {d.name}"
    if isinstance(d, VarDeclStmt) and d.init is not None:
        text += f" = {format_expr(d.init)}"
    return text + ";"


def _fmt_stmt(s, ind):
    pad = "    " * ind
    if isinstance(s, VarDeclStmt):
        return pad + _fmt_decl(s)
    if isinstance(s, Assign):
        return f"{pad}{format_expr(s.target)} = {format_expr(s.expr)};"
    if isinstance(s, If):
        out = f"{pad}if ({format_expr(s.cond)})\n" + _fmt_body(s.then, ind)
        if s.els is not None:
            out += f"\n{pad}else\n" + _fmt_body(s.els, ind)
        return out
    if isinstance(s, While):
        return f"{pad}while ({format_expr(s.cond)})\n" + _fmt_body(s.body, ind)
    if isinstance(s, Break):
        return pad + "break;"
    if isinstance(s, Block):
        inner = "\n".join(_fmt_stmt(x, ind + 1) for x in s.stmts)
        return f"{pad}{{\n{inner}\n{pad}}}" if s.stmts else f"{pad}{{\n{pad}}}"
    if isinstance(s, Broadcast):
        args = ", ".join(format_expr(a) for a in s.args)
        return f"{pad}{s.msg}({args});"
    if isinstance(s, Multicast):
        args = ", ".join(format_expr(a) for a in s.args)
        return f"{pad}multicast({format_expr(s.receivers)}, {s.msg}({args}));"
    if isinstance(s, Unicast):
        args = ", ".join(format_expr(a) for a in s.args)
        head = f"{pad}unicast({format_expr(s.receiver)}, {s.msg}({args}))"
        if s.succ is None and s.unsucc is None:
            return head + ";"
        out = head
        if s.succ is not None:
            out += f"\n{pad}succ:\n" + _fmt_body(s.succ, ind)
        if s.unsucc is not None:
            out += f"\n{pad}unsucc:\n" + _fmt_body(s.unsucc, ind)
        return out
    raise TypeError(f"not a statement: {s!r}")


def _fmt_body(s, ind):
    # Bodies of if/while/succ hang one level deeper unless already a block.
    if isinstance(s, Block):
        return _fmt_stmt(s, ind)
    return _fmt_stmt(s, ind + 1)


def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def format_model(model):
    """Render a model back to concrete syntax.

    Parsing the result yields an AST equal to the original (round-trip
    identity, locations aside).
    """
    parts = []
    for c in model.classes:
        lines = [f"reactiveclass {c.name}", "{", "    statevars", "    {"]
        for v in c.state_vars:
            init = ""
            if v.type.dims:
                init = " = " + format_expr(NewArray(v.type.base, v.type.lengths))
            lines.append(f"        {v.type.base}{'[]' * v.type.dims} {v.name}{init};")
        lines.append("    }")
        for m in c.msgsrvs:
            params = ", ".join(f"{p.type.base}{'[]' * p.type.dims} {p.name}"
                               for p in m.params)
            lines.append("")
            lines.append(f"    msgsrv {m.name}({params})")
            lines.append("    {")
            for s in m.body:
                lines.append(_fmt_stmt(s, 2))
            lines.append("    }")
        lines.append("}")
        parts.append("\n".join(lines))
    main = ["main", "{"]
    for r in model.rebecs:
        knowns = ",".join(r.knowns)
        args = ",".join(_fmt_value(a) for a in r.init_args)
        main.append(f"    {r.class_name} {r.name} ({knowns}):({args});")
    if not isinstance(model.constraint, ConTrue):
        main.append("")
        main.append("    constraint")
        main.append("    {")
        main.append("        " + format_constraint(model.constraint))
        main.append("    }")
    main.append("}")
    parts.append("\n".join(main))
    return "\n\n".join(parts) + "\n"
