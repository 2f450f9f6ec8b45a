"""The ``.twc`` text format.

A file is a sequence of statements, one per line; a statement continues over
following lines while brackets are open.  ``#`` starts a comment.

    field Q
    idempotents 0
    basis e 0 0 -1 unit
    basis a 0 0 0
    bn 3: [a, a, a] -> 1*c
    tw X { module = [(0,0):2, (1,0):1], delta = [ (nu^0 * a * nu^0, [[0, 1], [0, 0]]) ] }
    mor f : X -> Y = [ (nu^0 * e * nu^0, [[1, 0]]) ]
    conflation xi = canonical(X, Y, gamma)

Hat basis elements are written ``nu^s * id * nu^-t``; a bare ``id`` means
``s = t = 0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .ad import AdCategory, AdMorphism, SModule
from .algebra import AlgebraError, BasisElem, SectionAlgebra
from .confl import ConflCategory
from .hat import HatAlgebra, HatBasis
from .scalars import Field, ScalarError, get_field
from .tri import TriCategory
from .tw import TwCategory, TwMorphism


class TwcParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<id>[A-Za-z_][\w'.]*)|(?P<arrow>->)|(?P<p>[\[\](){}:,=*+\-^]))")


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int, col0: int = 1) -> list[Tok]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise TwcParseError(f"unexpected character {text[bad]!r}", line, bad + col0)
        kind = m.lastgroup
        out.append(Tok(kind, m.group(kind), line, m.start(kind) + col0))
        pos = m.end()
    return out


def statements(src: str) -> list[list[Tok]]:
    """Group the token stream into statements, joining lines while brackets are open."""
    stmts, cur, depth = [], [], 0
    for n, raw in enumerate(src.splitlines(), 1):
        text = raw.split("#", 1)[0]
        toks = tokenize(text, n)
        for t in toks:
            if t.text in "([{" and t.kind == "p":
                depth += 1
            elif t.text in ")]}" and t.kind == "p":
                depth -= 1
                if depth < 0:
                    raise TwcParseError(f"unbalanced {t.text!r}", t.line, t.col)
        cur.extend(toks)
        if depth == 0 and cur:
            stmts.append(cur)
            cur = []
    if cur:
        raise TwcParseError("unclosed bracket at end of file", cur[0].line, cur[0].col)
    return stmts


class _Cursor:
    def __init__(self, toks: list[Tok]):
        self.toks, self.i = toks, 0

    def peek(self) -> Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str) -> TwcParseError:
        t = self.peek() or self.toks[-1]
        return TwcParseError(msg, t.line, t.col)

    def next(self) -> Tok:
        t = self.peek()
        if t is None:
            raise self.error("unexpected end of statement")
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if t is None or t.text != text:
            raise self.error(f"expected {text!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text:
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        t = self.next()
        if t.kind != "id":
            self.i -= 1
            raise self.error("expected a name")
        return t.text

    def label(self) -> str:
        t = self.next()
        if t.kind not in ("id", "num"):
            self.i -= 1
            raise self.error("expected a label")
        return t.text

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.next()
        if t.kind != "num" or "/" in t.text:
            self.i -= 1
            raise self.error("expected an integer")
        return -int(t.text) if neg else int(t.text)

    def scalar(self) -> Fraction:
        neg = self.accept("-")
        t = self.next()
        if t.kind != "num":
            self.i -= 1
            raise self.error("expected a number")
        v = Fraction(t.text)
        return -v if neg else v

    def done(self) -> None:
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")


@dataclass
class Workspace:
    field: Field
    algebra: SectionAlgebra
    objects: dict = dc_field(default_factory=dict)
    morphisms: dict = dc_field(default_factory=dict)
    conflations: dict = dc_field(default_factory=dict)
    conflation_args: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.hat = HatAlgebra(self.algebra)
        self.ad = AdCategory(self.hat)
        self.tw = TwCategory(self.ad)
        self.confl = ConflCategory(self.tw)
        self.tri = TriCategory(self.confl)


def build_stack(algebra: SectionAlgebra) -> Workspace:
    return Workspace(algebra.field, algebra)


# -- parsing -------------------------------------------------------------------------
def _hat_token(cur: _Cursor) -> HatBasis:
    s = t = 0
    if cur.peek() is not None and cur.peek().text == "nu":
        cur.next()
        cur.expect("^")
        s = cur.integer()
        cur.expect("*")
    base = cur.ident()
    if cur.accept("*"):
        if cur.ident() != "nu":
            cur.i -= 1
            raise cur.error("expected nu")
        cur.expect("^")
        t = -cur.integer()
    return HatBasis(base, s, t)


def _matrix(cur: _Cursor) -> list[list[Fraction]]:
    rows = []
    cur.expect("[")
    if not cur.accept("]"):
        while True:
            cur.expect("[")
            row = []
            if not cur.accept("]"):
                while True:
                    row.append(cur.scalar())
                    if cur.accept("]"):
                        break
                    cur.expect(",")
            rows.append(row)
            if cur.accept("]"):
                break
            cur.expect(",")
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise cur.error("ragged matrix literal")
    return rows


def _morphism_literal(cur: _Cursor, ws: Workspace, X: SModule, Y: SModule) -> AdMorphism:
    start = cur.peek()
    terms = []
    cur.expect("[")
    if not cur.accept("]"):
        while True:
            cur.expect("(")
            x = _hat_token(cur)
            cur.expect(",")
            m = _matrix(cur)
            cur.expect(")")
            terms.append((x, m))
            if cur.accept("]"):
                break
            cur.expect(",")
    F = ws.field
    acc: dict = {}
    try:
        for x, m in terms:
            if x.base not in ws.algebra.basis:
                raise TwcParseError(f"unknown basis id {x.base!r}", start.line, start.col)
            r, c = Y.dim(ws.hat.target(x)), X.dim(ws.hat.source(x))
            shape = (len(m), len(m[0]) if m else 0)
            if shape != (r, c) and not (not m and 0 in (r, c)):
                raise TwcParseError(f"matrix for {format_hat(x)} has shape {shape}, expected {(r, c)}", start.line, start.col)
            mat = F.matrix(m, (r, c)) if r and c else F.zeros(r, c)
            if mat.shape != (r, c):
                raise TwcParseError(f"matrix for {format_hat(x)} has shape {mat.shape}, expected {(r, c)}", start.line, start.col)
            acc[x] = F.madd(acc[x], mat) if x in acc else mat
        return ws.ad.morphism(X, Y, acc)
    except (ValueError, ScalarError) as exc:
        if isinstance(exc, TwcParseError):
            raise
        raise TwcParseError(str(exc), start.line, start.col) from None


def _module(cur: _Cursor) -> SModule:
    dims = {}
    cur.expect("[")
    if not cur.accept("]"):
        while True:
            cur.expect("(")
            s = cur.integer()
            cur.expect(",")
            i = cur.label()
            cur.expect(")")
            cur.expect(":")
            d = cur.integer()
            if d < 0:
                raise cur.error("negative dimension")
            dims[(s, i)] = dims.get((s, i), 0) + d
            if cur.accept("]"):
                break
            cur.expect(",")
    return SModule.of(dims)


def _combination(cur: _Cursor) -> dict:
    out: dict = {}
    if cur.peek() is not None and cur.peek().text == "0" and cur.i + 1 == len(cur.toks):
        cur.next()
        return out
    sign = Fraction(1)
    if cur.accept("-"):
        sign = Fraction(-1)
    while True:
        coeff = Fraction(1)
        if cur.peek() is not None and cur.peek().kind == "num":
            coeff = cur.scalar()
            cur.expect("*")
        bid = cur.ident()
        out[bid] = out.get(bid, Fraction(0)) + sign * coeff
        if cur.accept("+"):
            sign = Fraction(1)
        elif cur.accept("-"):
            sign = Fraction(-1)
        else:
            break
    return out


def parse(src: str, field: Field | None = None) -> Workspace:
    """Parse and fully validate a workspace; errors carry line and column."""
    stmts = statements(src)
    fld = field
    idems: list[str] | None = None
    basis: list[BasisElem] = []
    table: dict = {}
    rest: list[list[Tok]] = []
    for toks in stmts:
        cur = _Cursor(toks)
        kw = cur.next()
        if kw.text == "field":
            name = cur.next().text
            if cur.accept(":"):
                name += ":" + cur.next().text
            cur.done()
            try:
                f = get_field(name)
            except ScalarError as exc:
                raise TwcParseError(str(exc), kw.line, kw.col) from None
            fld = fld or f
        elif kw.text == "idempotents":
            idems = []
            while cur.peek() is not None:
                idems.append(cur.label())
        elif kw.text == "basis":
            bid = cur.ident()
            src_i, tgt_i = cur.label(), cur.label()
            deg = cur.integer()
            unit = cur.accept("unit")
            cur.done()
            basis.append(BasisElem(bid, src_i, tgt_i, deg, unit))
        elif kw.text == "bn":
            n = cur.integer()
            cur.expect(":")
            cur.expect("[")
            chain = []
            while True:
                chain.append(cur.ident())
                if cur.accept("]"):
                    break
                cur.expect(",")
            if len(chain) != n:
                raise TwcParseError(f"bn {n} entry has {len(chain)} factors", kw.line, kw.col)
            cur.expect("->")
            out = _combination(cur)
            cur.done()
            if tuple(chain) in table:
                raise TwcParseError(f"duplicate bn entry for {chain}", kw.line, kw.col)
            table[tuple(chain)] = out
        elif kw.text in ("tw", "mor", "conflation"):
            rest.append(toks)
        else:
            raise TwcParseError(f"unknown statement {kw.text!r}", kw.line, kw.col)
    if idems is None:
        raise TwcParseError("missing idempotents statement", 1, 1)
    fld = fld or get_field()
    try:
        alg = SectionAlgebra(idems, basis, table, fld)
    except AlgebraError as exc:
        line = stmts[0][0].line if stmts else 1
        for toks in stmts:
            if toks[0].text in ("basis", "bn") and any(t.text in str(exc) for t in toks[1:2]):
                line = toks[0].line
                break
        raise TwcParseError(str(exc), line, 1) from None
    ws = Workspace(fld, alg)
    for toks in rest:
        _entity(ws, _Cursor(toks))
    return ws


def _entity(ws: Workspace, cur: _Cursor) -> None:
    kw = cur.next()
    name = cur.ident()
    taken = set(ws.objects) | set(ws.morphisms) | set(ws.conflations)
    if name in taken:
        raise TwcParseError(f"name {name!r} already defined", kw.line, kw.col)
    try:
        if kw.text == "tw":
            cur.expect("{")
            cur.expect("module")
            cur.expect("=")
            mod = _module(cur)
            delta = None
            if cur.accept(","):
                cur.expect("delta")
                cur.expect("=")
                delta = _morphism_literal(cur, ws, mod, mod)
            cur.expect("}")
            cur.done()
            ws.objects[name] = ws.tw.validate(mod, delta)
        elif kw.text == "mor":
            cur.expect(":")
            X, Y = _lookup(ws.objects, cur), None
            cur.expect("->")
            Y = _lookup(ws.objects, cur)
            cur.expect("=")
            f = _morphism_literal(cur, ws, X.module, Y.module)
            cur.done()
            ws.morphisms[name] = TwMorphism(X, Y, f)
        else:
            cur.expect("=")
            if cur.ident() != "canonical":
                cur.i -= 1
                raise cur.error("only canonical(...) conflations can be declared")
            cur.expect("(")
            X = _lookup(ws.objects, cur)
            cur.expect(",")
            Y = _lookup(ws.objects, cur)
            cur.expect(",")
            g = _lookup(ws.morphisms, cur)
            cur.expect(")")
            cur.done()
            ws.conflations[name] = ws.confl.make_canonical(X, Y, g.under)
            ws.conflation_args[name] = (_name_of(ws.objects, X), _name_of(ws.objects, Y), _name_of(ws.morphisms, g))
    except TwcParseError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise TwcParseError(str(exc), kw.line, kw.col) from None


def _lookup(table: dict, cur: _Cursor):
    t = cur.peek()
    name = cur.ident()
    if name not in table:
        raise TwcParseError(f"unknown name {name!r}", t.line, t.col)
    return table[name]


def _name_of(table: dict, value) -> str:
    for k, v in table.items():
        if v is value:
            return k
    raise KeyError(value)


# -- printing ---------------------------------------------------------------------------
def format_hat(x: HatBasis) -> str:
    if x.s == 0 and x.t == 0:
        return f"nu^0 * {x.base} * nu^0"
    return f"nu^{x.s} * {x.base} * nu^{-x.t}"


def format_matrix(F: Field, m) -> str:
    return "[" + ", ".join("[" + ", ".join(F.to_str(v) for v in row) + "]" for row in m.tolist()) + "]"


def format_morphism(F: Field, f: AdMorphism) -> str:
    if not f.terms:
        return "[]"
    items = sorted(f.terms.items(), key=lambda kv: (kv[0].base, kv[0].s, kv[0].t))
    return "[ " + ", ".join(f"({format_hat(x)}, {format_matrix(F, m)})" for x, m in items) + " ]"


def format_module(M: SModule) -> str:
    return "[" + ", ".join(f"({s},{i}):{d}" for (s, i), d in M.items) + "]"


def _combo(F: Field, out: dict) -> str:
    if not out:
        return "0"
    parts = []
    for k in sorted(out):
        parts.append(f"{F.to_str(out[k])}*{k}")
    return " + ".join(parts)


def dump(ws: Workspace) -> str:
    F, alg = ws.field, ws.algebra
    lines = [f"field {F.spec}", "idempotents " + " ".join(alg.idems)]
    for b in alg.basis.values():
        lines.append(f"basis {b.id} {b.source} {b.target} {b.degree}" + (" unit" if b.is_unit else ""))
    for chain in sorted(alg.table, key=lambda c: (len(c), c)):
        lines.append(f"bn {len(chain)}: [{', '.join(chain)}] -> {_combo(F, alg.table[chain])}")
    for name, X in ws.objects.items():
        body = f"module = {format_module(X.module)}"
        if X.delta.terms:
            body += f", delta = {format_morphism(F, X.delta)}"
        lines.append(f"tw {name} {{ {body} }}")
    for name, f in ws.morphisms.items():
        X, Y = _name_of(ws.objects, f.source), _name_of(ws.objects, f.target)
        lines.append(f"mor {name} : {X} -> {Y} = {format_morphism(F, f.under)}")
    for name, (X, Y, g) in ws.conflation_args.items():
        lines.append(f"conflation {name} = canonical({X}, {Y}, {g})")
    return "\n".join(lines) + "\n"


def load(path, field: Field | None = None) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), field)


def same_workspace(a: Workspace, b: Workspace) -> bool:
    """Structural equality used by the round-trip tests."""
    if a.field != b.field or a.algebra.idems != b.algebra.idems or a.algebra.basis != b.algebra.basis:
        return False
    if a.algebra.table != b.algebra.table:
        return False
    if list(a.objects) != list(b.objects) or any(a.objects[k] != b.objects[k] for k in a.objects):
        return False
    for k in a.morphisms:
        if k not in b.morphisms or not a.tw.equal(a.morphisms[k], b.morphisms[k]):
            return False
    return a.conflation_args == b.conflation_args and set(a.morphisms) == set(b.morphisms)



BUILTIN = ("e1", "e2", "e3")


def builtin(name: str, field: Field | None = None) -> Workspace:
    """One of the bundled example workspaces by short name."""
    from importlib.resources import files

    key = name.lower()
    if key not in BUILTIN:
        raise KeyError(f"unknown example {name!r}")
    return parse(files("twcat.data").joinpath(f"{key}.twc").read_text(encoding="utf-8"), field)
