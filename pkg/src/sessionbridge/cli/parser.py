"""Recursive-descent parsers for the .vgr, .lfst and .lfsteff surface syntaxes.

One lexer serves all three grammars.  Names may carry a uid suffix (`x#3`)
and channel endpoints a polarity (`g#3^+`), so printed runtime terms parse
back to the same AST.  The imperative grammar only allows values in operand
positions; the parser let-binds any non-value operand to a fresh `_a#k`.
"""
from __future__ import annotations

import re

from ..env import Env
from ..errors import ParseError, RowClash
from ..names import ChanEnd, Name, Polarity, var
from ..vgr import syntax as V
from ..lfst import syntax as L

_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*|--[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:\#\d+)?(?:\^[+-])?)
  | (?P<int>\d+)
  | (?P<sym>\|\||->|-o|~>|\(\)|[(){}\[\],;:.=*/+?!<>@])
""", re.VERBOSE)

KEYWORDS = {
    "fun", "def", "val", "main", "let", "in", "fork", "new", "accept", "request", "send", "on",
    "receive", "close", "lam", "rec", "fix", "End", "Unit", "Int", "Chan", "nu",
}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def tokenize(src):
    src = _strip_block_comments(src)
    out, pos, line, start = [], 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "name" and text in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, text, line, pos - start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            start = pos + text.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


def _strip_block_comments(src):
    # (* ... *) comments are blanked out, keeping newlines so positions survive
    def blank(m):
        return re.sub(r"[^\n]", " ", m.group())
    return re.sub(r"\(\*.*?\*\)", blank, src, flags=re.S)


def _name_of(text):
    """-> Name or ChanEnd."""
    pol = None
    if text.endswith(("^+", "^-")):
        pol = Polarity.PLUS if text[-1] == "+" else Polarity.MINUS
        text = text[:-2]
    uid = 0
    if "#" in text:
        text, u = text.split("#")
        uid = int(u)
    n = var(text, uid)
    return ChanEnd(n, pol) if pol else n


class _Base:
    def __init__(self, src):
        self.toks = tokenize(src)
        self.i = 0
        uids = [int(t.text.split("#")[1].split("^")[0]) for t in self.toks
                if t.kind == "name" and "#" in t.text]
        self.counter = max(uids, default=0)

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text, kind=None):
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and (t.kind != "name" or text == "_")

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        self.i += 1

    def fail(self, msg):
        t = self.tok
        found = t.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", t.line, t.col)

    def ident(self, allow_end=False):
        t = self.tok
        if t.kind != "name":
            self.fail("expected a name")
        n = _name_of(t.text)
        if isinstance(n, ChanEnd) and not allow_end:
            self.fail("expected a plain name")
        self.i += 1
        return n

    def fresh(self, hint="_a"):
        self.counter += 1
        return var(hint, self.counter)

    def sep_list(self, item, close, sep=","):
        out = []
        if self.at(close):
            return out
        out.append(item())
        while self.accept(sep):
            out.append(item())
        return out

    # sessions are shared; payload parsing is grammar specific
    def session(self):
        if self.accept("End"):
            return self.S.End()
        for mark, ctor in (("?", self.S.In), ("!", self.S.Out)):
            if self.accept(mark):
                p = self.payload()
                self.expect(".")
                return ctor(p, self.session())
        if self.accept("("):
            s = self.session()
            self.expect(")")
            return s
        self.fail("expected a session type")

    def payload(self):
        if self.accept("("):
            t = self.type_()
            self.expect(")")
            return t
        return self.base_type()

    def done(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")

    # configurations
    def config(self):
        c = self.config_unit()
        while self.accept("||"):
            c = self.S.Par(c, self.config_unit())
        return c

    def config_unit(self):
        if self.accept("<"):
            e = self.expr()
            self.expect(">")
            return self.S.Thread(e)
        if self.at("(") and self.peek().text == "nu":
            self.i += 2
            n = self.ident()
            if self.accept(":"):
                if self.accept("["):
                    s = self.session()
                    self.expect("]")
                    self.expect(")")
                    return self.S.Nu(self.S.NuAP(n, s), self.config_unit())
                plus = None if self.accept("_") else self.session()
                self.expect(",")
                minus = None if self.accept("_") else self.session()
                self.expect(")")
                return self.S.Nu(self.S.NuChan(n, plus, minus), self.config_unit())
            self.expect(")")
            return self.S.Nu(self.S.NuChan(n, None, None), self.config_unit())
        if self.accept("("):
            c = self.config()
            self.expect(")")
            return c
        self.fail("expected a configuration")

    def program(self):
        vals, defs, main = [], [], None
        while self.tok.kind != "eof":
            if self.accept("val"):
                n = self.ident()
                self.expect(":")
                vals.append((n, self.type_()))
            elif self.accept("def"):
                n = self.ident()
                self.expect("=")
                defs.append((n, self.expr()))
            elif self.accept("fun"):
                n = self.ident()
                params = []
                while not self.at("="):
                    params.append(self.fun_param())
                if not params:
                    self.fail("a fun needs at least one parameter")
                self.expect("=")
                body = self.expr()
                for p in reversed(params):
                    body = self.wrap_lambda(p, body)
                defs.append((n, body))
            elif self.accept("main"):
                if main is not None:
                    self.fail("duplicate main")
                self.accept("=")
                main = self.config()
            else:
                self.fail("expected val, def, fun or main")
        return self.S.Program(tuple(vals), tuple(defs), main)


# ---------------------------------------------------------------- imperative


class VgrParser(_Base):
    S = V

    def env(self):
        self.expect("{")

        def entry():
            k = self.ident(allow_end=True)
            self.expect(":")
            return (k, self.session())
        items = self.sep_list(entry, "}")
        self.expect("}")
        return Env(items)

    def base_type(self):
        if self.accept("Unit"):
            return V.UnitT()
        if self.accept("Int"):
            return V.IntT()
        if self.accept("Chan"):
            return V.Chan(self.ident(allow_end=True))
        if self.accept("["):
            s = self.session()
            self.expect("]")
            return V.APType(s)
        if self.at("End") or self.at("?") or self.at("!"):
            return self.session()
        if self.accept("("):
            t = self.type_()
            if self.accept("*"):
                t = V.PairT(t, self.type_())
            self.expect(")")
            return t
        self.fail("expected a type")

    def type_(self):
        if self.at("{"):
            sig_in = self.env()
            self.expect(";")
            arg = self.base_type()
            self.expect("->")
            res = self.base_type()
            self.expect(";")
            return V.FunT(sig_in, arg, res, self.env())
        return self.base_type()

    # terms: `pre` collects (name, expr) bindings for non-value operands
    def value_operand(self, pre):
        e = self.postfix(pre)
        if V.is_value(e):
            return e
        x = self.fresh()
        pre.append((x, e))
        return V.Var(x)

    def wrap(self, pre, e):
        for x, b in reversed(pre):
            e = V.Let(x, b, e)
        return e

    def expr(self):
        if self.accept("let"):
            if self.accept("("):
                l = self.ident()
                self.expect(",")
                r = self.ident()
                self.expect(")")
                self.expect("=")
                pre = []
                v = self.value_operand(pre)
                self.expect("in")
                return self.wrap(pre, V.LetPair(l, r, v, self.expr()))
            x = self.ident()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return V.Let(x, bound, self.expr())
        if self.accept("fork"):
            child = self.simple()
            self.expect(";")
            return V.Fork(child, self.expr())
        if self.at("lam") or self.at("rec"):
            return self.simple()
        e = self.simple()
        if self.accept(";"):
            return V.Let(V.WILD, e, self.expr())
        return e

    def simple(self):
        """An expression without top-level `;`; operands are let-bound as needed."""
        pre = []
        e = self.op_expr(pre)
        return self.wrap(pre, e)

    def op_expr(self, pre):
        if self.accept("lam"):
            self.expect("(")
            sig = None if self.accept("_") else self.env()
            self.expect(";")
            x = self.ident()
            self.expect(":")
            t = None if self.accept("_") else self.type_()
            self.expect(")")
            self.expect(".")
            return V.Lam(sig, x, t, self.expr())
        if self.accept("rec"):
            self.expect("(")
            f = self.ident()
            self.expect(":")
            t = self.type_()
            self.expect(")")
            self.expect(".")
            return V.Rec(f, t, self.expr())
        if self.accept("new"):
            return V.New(self.session())
        for kw, ctor in (("accept", V.Accept), ("request", V.Request), ("receive", V.Receive),
                         ("close", V.Close)):
            if self.accept(kw):
                return ctor(self.value_operand(pre))
        if self.accept("send"):
            v = self.send_payload(pre)
            self.expect("on")
            return V.Send(v, self.value_operand(pre))
        e = self.app(pre)
        while self.at("+"):
            self.i += 1
            left = self._bind(pre, e)
            e = V.Add(left, self.value_operand(pre))
        return e

    def send_payload(self, pre):
        # `send x + y on u` sends the sum
        e = self.app(pre)
        while self.accept("+"):
            e = V.Add(self._bind(pre, e), self.value_operand(pre))
        return self._bind(pre, e)

    def _bind(self, pre, e):
        if V.is_value(e):
            return e
        x = self.fresh()
        pre.append((x, e))
        return V.Var(x)

    def app(self, pre):
        e = self.postfix(pre)
        while self._starts_atom():
            fn = self._bind(pre, e)
            e = V.App(fn, self.value_operand(pre))
        return e

    def _starts_atom(self):
        t = self.tok
        return t.kind in ("name", "int") or t.text in ("(", "()")

    def postfix(self, pre):
        return self.atom(pre)

    def atom(self, pre):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return V.IntV(int(t.text))
        if t.kind == "name":
            n = self.ident(allow_end=True)
            return V.ChanLit(n) if isinstance(n, ChanEnd) else V.Var(n)
        if self.accept("()"):
            return V.UNIT
        if self.accept("("):
            if self.accept(")"):
                return V.UNIT
            e = self.expr()
            if self.accept(","):
                inner = []
                a = self._bind(inner, e)
                b = self._bind(inner, self.expr())
                self.expect(")")
                pre.extend(inner)
                return V.PairV(a, b)
            self.expect(")")
            return e
        if self.at("["):
            self.i += 1
            self.expect("]")
            return V.HOLE
        self.fail("expected an expression")

    def fun_param(self):
        if self.tok.kind == "name":
            # bare parameter: annotations left for the checker to demand
            return (None, self.ident(), None)
        self.expect("(")
        sig = None if self.accept("_") else self.env()
        self.expect(";")
        x = self.ident()
        self.expect(":")
        t = None if self.accept("_") else self.type_()
        self.expect(")")
        return (sig, x, t)

    def wrap_lambda(self, p, body):
        sig, x, t = p
        return V.Lam(sig, x, t, body)


# ---------------------------------------------------------------- functional


class LfstParser(_Base):
    S = L

    def base_type(self):
        if self.accept("Unit"):
            return L.UnitT()
        if self.accept("Int"):
            return L.IntT()
        if self.accept("["):
            s = self.session()
            self.expect("]")
            return L.APType(s)
        if self.at("End") or self.at("?") or self.at("!"):
            return self.session()
        if self.at("{"):
            return L.Record(self.row())
        if self.accept("("):
            t = self.type_()
            if self.accept("*"):
                t = L.LinPair(t, self.type_())
            self.expect(")")
            return t
        self.fail("expected a type")

    def row(self):
        self.expect("{")

        def entry():
            k = self.ident(allow_end=True)
            self.expect(":")
            return (k, self.type_())
        items = self.sep_list(entry, "}")
        self.expect("}")
        return Env(items, clash=RowClash)

    def type_(self):
        t = self.base_type()
        if self.accept("->"):
            return L.FunU(t, self.type_())
        if self.accept("-o"):
            return L.FunL(t, self.type_())
        return t

    def label(self):
        return self.ident(allow_end=True)

    def expr(self):
        if self.accept("let"):
            if self.accept("("):
                l = self.ident()
                self.expect(",")
                r = self.ident()
                self.expect(")")
                self.expect("=")
                b = self.expr()
                self.expect("in")
                return L.LetPair(l, r, b, self.expr())
            x = self.ident()
            self.expect("=")
            b = self.expr()
            self.expect("in")
            return L.Let(x, b, self.expr())
        if self.at("lam"):
            return self.op_expr()
        e = self.op_expr()
        if self.accept(";"):
            return L.Let(L.WILD, e, self.expr())
        return e

    def lam_param(self):
        if self.accept("("):
            x = self.ident()
            self.expect(":")
            t = self.type_()
            self.expect(")")
            return x, t
        return self.ident(), None

    def op_expr(self):
        if self.accept("lam"):
            x, t = self.lam_param()
            self.expect(".")
            return L.Lam(x, t, self.expr())
        e = self.app()
        while True:
            if self.accept("+"):
                e = L.Add(e, self.app())
            elif self.accept("*"):
                e = L.Concat(e, self.app())
            elif self.accept("/"):
                if self.accept("{"):
                    labs = self.sep_list(self.label, "}")
                    self.expect("}")
                    e = L.SplitMany(e, tuple(labs))
                else:
                    e = L.Split(e, self.label())
            else:
                return e

    _PREFIX = {"fork": L.Fork, "receive": L.Receive, "accept": L.Accept, "request": L.Request,
               "fix": L.Fix}

    def app(self):
        for kw, ctor in self._PREFIX.items():
            if self.accept(kw):
                return ctor(self.postfix())
        if self.accept("send"):
            v = self.postfix()
            while self.accept("+"):
                v = L.Add(v, self.postfix())
            if self.accept("on"):
                return L.Send(v, self.postfix())
            if isinstance(v, L.Add):
                self.fail("expected 'on' after a sum payload")
            return L.Send(v, self.postfix())
        if self.accept("new"):
            return L.New(self.session())
        e = self.postfix()
        while self._starts_atom():
            e = L.App(e, self.postfix())
        return e

    def _starts_atom(self):
        t = self.tok
        return t.kind in ("name", "int") or t.text in ("(", "()", "{") or (t.text == "[" and self.peek().text == "]")

    def postfix(self):
        e = self.atom()
        while self.at(".") and self.peek().kind == "name":
            self.i += 1
            e = L.Split(e, self.label())
        return e

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return L.IntV(int(t.text))
        if t.kind == "name":
            n = self.ident(allow_end=True)
            return L.ChanLit(n) if isinstance(n, ChanEnd) else L.Var(n)
        if self.accept("()"):
            return L.UNIT
        if self.accept("("):
            if self.accept(")"):
                return L.UNIT
            e = self.expr()
            if self.accept(","):
                e = L.Pair(e, self.expr())
            self.expect(")")
            return e
        if self.accept("{"):
            def field():
                k = self.label()
                if not self.accept("="):
                    self.expect(":")
                return (k, self.expr())
            fields = self.sep_list(field, "}")
            self.expect("}")
            if len({k for k, _ in fields}) != len(fields):
                raise ParseError("duplicate record field", t.line, t.col)
            return L.RecordLit(tuple(fields))
        if self.at("["):
            self.i += 1
            self.expect("]")
            return L.HOLE
        self.fail("expected an expression")

    def fun_param(self):
        if self.accept("()"):
            return (L.WILD, L.UnitT())
        if self.at("("):
            return self.lam_param()
        return (self.ident(), None)

    def wrap_lambda(self, p, body):
        x, t = p
        return L.Lam(x, t, body)


class EffParser(LfstParser):
    """Functional terms whose annotations are identity-tagged, effectful types."""

    def base_type(self):
        from .. import lfst_eff as F
        t = self.tok
        if t.kind == "name" and self.peek().text == "@":
            tag = self.ident()
            self.i += 1
            return F.Tagged(tag, self.session())
        if self.at("{"):
            self.fail("records are not part of the effect calculus")
        return super().base_type()

    def effect(self):
        # `{a: S, ... ~> b: S, ...}`; both sides may be empty
        self.expect("{")

        def side(stop):
            items = []
            while not self.at(stop):
                k = self.ident()
                self.expect(":")
                items.append((k, self.session()))
                if not self.accept(","):
                    break
            return Env(items)
        sig_in = side("~>")
        self.expect("~>")
        sig_out = side("}")
        self.expect("}")
        return sig_in, sig_out

    def type_(self):
        from .. import lfst_eff as F
        t = self.base_type()
        for arrow, ctor in (("->", F.EFunU), ("-o", F.EFunL)):
            if self.accept(arrow):
                si, so = self.effect() if self.at("{") else (Env(), Env())
                return ctor(t, si, so, self.type_())
        return t


_PARSERS = {"vgr": VgrParser, "lfst": LfstParser, "lfst-eff": EffParser}


def parser_for(calculus, src):
    try:
        cls = _PARSERS[calculus]
    except KeyError:
        raise ValueError(f"unknown calculus {calculus!r}") from None
    return cls(src)


def _run(calculus, src, what):
    p = parser_for(calculus, src)
    out = getattr(p, what)()
    p.done()
    return out


def parse(source, calculus="vgr"):
    """Parse a whole program file."""
    return _run(calculus, source, "program")


def parse_expr(source, calculus="vgr"):
    return _run(calculus, source, "expr")


def parse_type(source, calculus="vgr"):
    return _run(calculus, source, "type_")


def parse_config(source, calculus="vgr"):
    return _run(calculus, source, "config")


def parse_env(source):
    return _run("vgr", source, "env")


def calculus_of(path):
    if str(path).endswith(".vgr"):
        return "vgr"
    if str(path).endswith((".lfsteff", ".eff")):
        return "lfst-eff"
    return "lfst"
