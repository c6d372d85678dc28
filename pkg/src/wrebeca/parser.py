"""Recursive-descent parser producing a Model AST.

Rebec identifiers are the declaration positions in the main block,
starting at 0.  The initial topology is derived from the known-rebec
lists (union of both directions; symmetry itself is enforced by the
well-formedness checker, not here).  A missing constraint block means
the constraint `true`.
"""

from __future__ import annotations

from .errors import ParseError
from .lexer import tokenize
from .syntax import (
    Assign, Binary, Block, BoolLit, Break, Broadcast, ConAnd, ConLink,
    ConTrue, If, Index, IntLit, Model, MsgSrv, Multicast, NewArray,
    ReactiveClass, RebecDecl, SelfExpr, Type, Unary, Unicast, Var,
    VarDecl, VarDeclStmt, While,
)
from .topology import Topology

_CMP_OPS = {"==", "!=", "<", ">", "<=", ">="}


class _Parser:
    def __init__(self, source):
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token plumbing --

    def peek(self, ahead=0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind):
        return self.peek().kind == kind

    def accept(self, kind):
        if self.at(kind):
            return self.next()
        return None

    def expect(self, kind, what=None):
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise ParseError(f"expected {what or kind!r}, found {found!r}",
                             tok.line, tok.col)
        return self.next()

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    # -- model structure --

    def parse_model(self):
        classes = []
        while self.at("reactiveclass"):
            classes.append(self.reactive_class())
        if not classes:
            self.fail("expected a reactiveclass declaration")
        self.expect("main")
        self.expect("{")
        rebecs = []
        while self.peek().kind == "ident":
            rebecs.append(self.rebec_decl())
        if not rebecs:
            self.fail("main block declares no rebec instances")
        constraint = ConTrue()
        if self.at("constraint"):
            self.next()
            self.expect("{")
            constraint = self.constraint()
            self.expect("}")
        self.expect("}")
        self.expect("eof", "end of input")

        names = [r.name for r in rebecs]
        ids = {}
        for i, name in enumerate(names):
            ids.setdefault(name, i)
        edges = []
        for i, r in enumerate(rebecs):
            for known in r.knowns:
                if known not in ids:
                    raise ParseError(
                        f"unknown rebec {known!r} in known-rebec list of "
                        f"{r.name!r}", r.loc[0], r.loc[1])
                edges.append((i, ids[known]))
        self._check_constraint_names(constraint, ids)
        topo = Topology.from_edges(len(rebecs), edges)
        return Model(tuple(classes), tuple(rebecs), constraint, topo)

    def _check_constraint_names(self, c, ids):
        if isinstance(c, ConLink):
            for name in (c.a, c.b):
                if name not in ids:
                    raise ParseError(f"unknown rebec {name!r} in constraint",
                                     c.loc[0], c.loc[1])
        elif isinstance(c, ConAnd):
            self._check_constraint_names(c.left, ids)
            self._check_constraint_names(c.right, ids)

    def reactive_class(self):
        tok = self.expect("reactiveclass")
        name = self.expect("ident", "class name").text
        self.expect("{")
        self.expect("statevars")
        self.expect("{")
        state_vars = []
        while not self.at("}"):
            state_vars.extend(self.statevar_decl())
        self.expect("}")
        msgsrvs = []
        while self.at("msgsrv"):
            msgsrvs.append(self.msgsrv())
        self.expect("}")
        return ReactiveClass(name, tuple(state_vars), tuple(msgsrvs),
                             loc=(tok.line, tok.col))

    def statevar_decl(self):
        """One statevars line; arrays carry their length via `new`."""
        decls = []
        for stmt in self.var_decl_stmt():
            t = stmt.type
            if t.dims and not t.lengths:
                self.fail(f"state array {stmt.name!r} needs a "
                          f"`new {t.base}[...]` initializer")
            if not t.dims and stmt.init is not None:
                self.fail(f"state variable {stmt.name!r} cannot take an "
                          f"initializer; assign in the initial message server")
            decls.append(VarDecl(t, stmt.name, loc=stmt.loc))
        return decls

    def msgsrv(self):
        tok = self.expect("msgsrv")
        name = self.expect("ident", "message server name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptype = self.type_name()
                pname = self.expect("ident", "parameter name")
                params.append(VarDecl(ptype, pname.text,
                                      loc=(pname.line, pname.col)))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.braced_stmts()
        return MsgSrv(name, tuple(params), tuple(body), loc=(tok.line, tok.col))

    def rebec_decl(self):
        cls = self.expect("ident", "class name")
        name = self.expect("ident", "rebec name").text
        self.expect("(")
        knowns = []
        if not self.at(")"):
            while True:
                knowns.append(self.expect("ident", "rebec name").text)
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect(":")
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.literal_value())
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect(";")
        return RebecDecl(cls.text, name, tuple(knowns), tuple(args),
                         loc=(cls.line, cls.col))

    def literal_value(self):
        if self.accept("true"):
            return True
        if self.accept("false"):
            return False
        neg = bool(self.accept("-"))
        tok = self.expect("int", "literal value")
        v = int(tok.text)
        return -v if neg else v

    def constraint(self):
        tok = self.peek()
        if self.accept("true"):
            return ConTrue(loc=(tok.line, tok.col))
        if self.accept("and"):
            self.expect("(")
            left = self.constraint()
            self.expect(",")
            right = self.constraint()
            self.expect(")")
            return ConAnd(left, right, loc=(tok.line, tok.col))
        negated = bool(self.accept("!"))
        self.expect("con", "constraint form (true, con, !con, and)")
        self.expect("(")
        a = self.expect("ident", "rebec name").text
        self.expect(",")
        b = self.expect("ident", "rebec name").text
        self.expect(")")
        return ConLink(a, b, negated, loc=(tok.line, tok.col))

    # -- statements --

    def type_name(self):
        tok = self.peek()
        if tok.kind not in ("int", "boolean"):
            self.fail("expected a type name")
        self.next()
        dims = 0
        while self.at("[") and self.peek(1).kind == "]":
            self.next()
            self.next()
            dims += 1
        if dims > 2:
            self.fail("arrays are at most two-dimensional", tok)
        return Type(tok.kind, dims)

    def braced_stmts(self):
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.extend(self.statement())
        self.expect("}")
        return stmts

    def statement(self):
        """Parse one statement; declarations may expand to several nodes."""
        tok = self.peek()
        kind = tok.kind
        if kind == "{":
            stmts = self.braced_stmts()
            return [Block(tuple(stmts), loc=(tok.line, tok.col))]
        if kind in ("int", "boolean"):
            return self.var_decl_stmt()
        if kind == "if":
            return [self.if_stmt()]
        if kind == "while":
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            body = self.body_stmt()
            return [While(cond, body, loc=(tok.line, tok.col))]
        if kind == "for":
            return [self.for_stmt()]
        if kind == "break":
            self.next()
            self.expect(";")
            return [Break(loc=(tok.line, tok.col))]
        if kind == "unicast":
            return [self.unicast_stmt()]
        if kind == "multicast":
            self.next()
            self.expect("(")
            receivers = self.expression()
            self.expect(",")
            msg, args = self.message_call()
            self.expect(")")
            self.expect(";")
            return [Multicast(receivers, msg, args, loc=(tok.line, tok.col))]
        if kind == "ident":
            if self.peek(1).kind == "(":
                msg, args = self.message_call()
                self.expect(";")
                return [Broadcast(msg, args, loc=(tok.line, tok.col))]
            return [self.assign_like()]
        if kind == "self":
            self.fail("cannot assign to self")
        self.fail(f"unexpected token {tok.text!r} at statement start")

    def var_decl_stmt(self):
        t = self.type_name()
        first = self.peek()
        decls = []
        while True:
            name = self.expect("ident", "variable name").text
            init = None
            if self.accept("="):
                if self.at("new"):
                    init = self.new_array()
                else:
                    init = self.expression()
            decls.append(VarDeclStmt(self._decl_type(t, init), name, init,
                                     loc=(first.line, first.col)))
            if not self.accept(","):
                break
        self.expect(";")
        return decls

    def _decl_type(self, t, init):
        if isinstance(init, NewArray):
            if t.dims != len(init.lengths) or t.base != init.base:
                self.fail("array initializer does not match declared type")
            return Type(t.base, t.dims, init.lengths)
        return t

    def new_array(self):
        tok = self.expect("new")
        if self.peek().kind not in ("int", "boolean"):
            self.fail("expected element type after new")
        base = self.next().kind
        lengths = []
        while self.accept("["):
            size = self.expect("int", "array length")
            lengths.append(int(size.text))
            self.expect("]")
        if not 1 <= len(lengths) <= 2:
            self.fail("arrays are one- or two-dimensional", tok)
        return NewArray(base, tuple(lengths), loc=(tok.line, tok.col))

    def if_stmt(self):
        tok = self.expect("if")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.body_stmt()
        els = None
        if self.accept("else"):
            els = self.body_stmt()
        return If(cond, then, els, loc=(tok.line, tok.col))

    def for_stmt(self):
        """Sugar: for(init; cond; step) B  ==  { init; while (cond) { B step } }

        The loop variable stays confined to the loop, Java-style.
        """
        tok = self.expect("for")
        self.expect("(")
        if self.peek().kind in ("int", "boolean"):
            init = self.var_decl_stmt()  # consumes the first ';'
        else:
            init = [self.assign_like()]
        cond = self.expression()
        self.expect(";")
        step = self.assign_like(consume_semi=False)
        self.expect(")")
        body = self.body_stmt()
        loc = (tok.line, tok.col)
        inner = Block((body, step) if not isinstance(body, Block)
                      else tuple(body.stmts) + (step,), loc=loc)
        return Block(tuple(init) + (While(cond, inner, loc=loc),), loc=loc)

    def body_stmt(self):
        """A Block or a single statement, per the grammar's Block form."""
        stmts = self.statement()
        if len(stmts) == 1:
            return stmts[0]
        # a multi-declarator line used as a bare body
        return Block(tuple(stmts), loc=stmts[0].loc)

    def assign_like(self, consume_semi=True):
        tok = self.peek()
        target = self.lvalue()
        if self.accept("++"):
            stmt = Assign(target, Binary("+", target, IntLit(1)),
                          loc=(tok.line, tok.col))
        elif self.accept("--"):
            stmt = Assign(target, Binary("-", target, IntLit(1)),
                          loc=(tok.line, tok.col))
        else:
            self.expect("=", "assignment")
            stmt = Assign(target, self.expression(), loc=(tok.line, tok.col))
        if consume_semi:
            self.expect(";")
        return stmt

    def lvalue(self):
        tok = self.expect("ident", "variable name")
        if self.at("["):
            indices = []
            while self.accept("["):
                indices.append(self.expression())
                self.expect("]")
            if len(indices) > 2:
                self.fail("arrays are at most two-dimensional", tok)
            return Index(tok.text, tuple(indices), loc=(tok.line, tok.col))
        return Var(tok.text, loc=(tok.line, tok.col))

    def message_call(self):
        name = self.expect("ident", "message name").text
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.expression())
                if not self.accept(","):
                    break
        self.expect(")")
        return name, tuple(args)

    def unicast_stmt(self):
        tok = self.expect("unicast")
        self.expect("(")
        if self.at("self"):
            rtok = self.next()
            receiver = SelfExpr(loc=(rtok.line, rtok.col))
        else:
            receiver = self.expression()
        self.expect(",")
        msg, args = self.message_call()
        self.expect(")")
        succ = unsucc = None
        if self.at("succ"):
            self.next()
            self.expect(":")
            succ = self.body_stmt()
            if self.at("unsucc"):
                self.next()
                self.expect(":")
                unsucc = self.body_stmt()
        elif self.at("unsucc"):
            self.next()
            self.expect(":")
            unsucc = self.body_stmt()
        else:
            self.expect(";")
        return Unicast(receiver, msg, args, succ, unsucc,
                       loc=(tok.line, tok.col))

    # -- expressions, precedence climbing --

    def expression(self):
        return self.or_expr()

    def or_expr(self):
        e = self.and_expr()
        while self.at("||"):
            tok = self.next()
            e = Binary("||", e, self.and_expr(), loc=(tok.line, tok.col))
        return e

    def and_expr(self):
        e = self.equality()
        while self.at("&&"):
            tok = self.next()
            e = Binary("&&", e, self.equality(), loc=(tok.line, tok.col))
        return e

    def equality(self):
        e = self.relational()
        while self.peek().kind in ("==", "!="):
            tok = self.next()
            e = Binary(tok.kind, e, self.relational(), loc=(tok.line, tok.col))
        return e

    def relational(self):
        e = self.additive()
        while self.peek().kind in ("<", ">", "<=", ">="):
            tok = self.next()
            e = Binary(tok.kind, e, self.additive(), loc=(tok.line, tok.col))
        return e

    def additive(self):
        e = self.multiplicative()
        while self.peek().kind in ("+", "-"):
            tok = self.next()
            e = Binary(tok.kind, e, self.multiplicative(),
                       loc=(tok.line, tok.col))
        return e

    def multiplicative(self):
        e = self.unary()
        while self.at("*"):
            tok = self.next()
            e = Binary("*", e, self.unary(), loc=(tok.line, tok.col))
        return e

    def unary(self):
        tok = self.peek()
        if self.accept("!"):
            return Unary("!", self.unary(), loc=(tok.line, tok.col))
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, IntLit):
                return IntLit(-operand.value, loc=(tok.line, tok.col))
            return Unary("-", operand, loc=(tok.line, tok.col))
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntLit(int(tok.text), loc=(tok.line, tok.col))
        if tok.kind == "true":
            self.next()
            return BoolLit(True, loc=(tok.line, tok.col))
        if tok.kind == "false":
            self.next()
            return BoolLit(False, loc=(tok.line, tok.col))
        if tok.kind == "self":
            self.next()
            return SelfExpr(loc=(tok.line, tok.col))
        if tok.kind == "(":
            self.next()
            e = self.expression()
            self.expect(")")
            return e
        if tok.kind == "ident":
            self.next()
            if self.at("["):
                indices = []
                while self.accept("["):
                    indices.append(self.expression())
                    self.expect("]")
                if len(indices) > 2:
                    self.fail("arrays are at most two-dimensional", tok)
                return Index(tok.text, tuple(indices), loc=(tok.line, tok.col))
            return Var(tok.text, loc=(tok.line, tok.col))
        self.fail(f"unexpected token {tok.text or 'end of input'!r} "
                  f"in expression")


def parse_model(source):
    """Parse model text into a Model AST.

    Raises ParseError (with line and column) on syntax errors, unknown
    rebec names in known lists or constraints, and malformed constraints.
    """
    return _Parser(source).parse_model()


def parse_constraint(source, model=None):
    """Parse a bare constraint expression, e.g. for overriding a model's
    constraint block from the command line."""
    p = _Parser(source)
    c = p.constraint()
    p.expect("eof", "end of constraint")
    if model is not None:
        ids = {r.name: i for i, r in enumerate(model.rebecs)}
        p._check_constraint_names(c, ids)
    return c
