"""Command line front end.

Output is line oriented ``key=value`` records (or one JSON document with
``--json``).  Exit status: 0 when every check passes, 1 on a check failure,
2 on usage or input errors.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import suites
from .algebra import AlgebraError, Report
from .generate import Generator
from .scalars import FIELD_ENV_VAR, ScalarError, get_field
from .textio import (
    BUILTIN,
    TwcParseError,
    builtin,
    format_module,
    format_morphism,
    load,
)
from .tw import TwError

EXIT_FAIL = 1
EXIT_USAGE = 2


class Emitter:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.records: list[dict] = []
        self.failed = False

    def record(self, rec: str, /, **fields) -> None:
        self.records.append({"record": rec, **fields})

    def report(self, rep: Report, scope: str = "") -> None:
        name = f"{scope}/{rep.name}" if scope else rep.name
        status = "pass" if rep.ok else "fail"
        self.failed |= not rep.ok
        self.record("check", name=name, checked=rep.checked, failed=len(rep.failures), status=status)
        for note in rep.notes:
            self.record("note", name=name, text=str(note))
        for item in rep.failures:
            self.record("failure", name=name, detail=_detail(item))

    def flush(self) -> None:
        if self.as_json:
            summary = {"status": "fail" if self.failed else "pass", "records": self.records}
            click.echo(json.dumps(summary, indent=1, sort_keys=True))
            return
        for rec in self.records:
            click.echo(" ".join(f"{k}={_kv(v)}" for k, v in rec.items()))
        click.echo(f"status={'fail' if self.failed else 'pass'}")


def _detail(item) -> str:
    if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], int):
        return f"case {item[0]}: {item[1]}"
    return str(item)


def _kv(v) -> str:
    s = str(v)
    return json.dumps(s) if (not s or any(c in s for c in ' "=\t')) else s


def _field():
    if os.environ.get(FIELD_ENV_VAR):
        try:
            return get_field()
        except ScalarError as exc:
            raise click.UsageError(str(exc)) from None
    return None


def _workspace(path: str):
    try:
        if path.lower() in BUILTIN and not os.path.exists(path):
            return builtin(path, _field())
        return load(path, _field())
    except TwcParseError as exc:
        click.echo(f"error=parse location={_kv(f'{exc.line}:{exc.col}')} message={_kv(exc.msg)}")
        sys.exit(EXIT_USAGE)
    except (AlgebraError, ScalarError) as exc:
        click.echo(f"error=invalid message={_kv(str(exc))}")
        sys.exit(EXIT_USAGE)
    except OSError as exc:
        click.echo(f"error=io message={_kv(str(exc))}")
        sys.exit(EXIT_USAGE)


def _lookup(table: dict, name: str, what: str):
    if name not in table:
        click.echo(f"error=unknown {what}={_kv(name)}")
        sys.exit(EXIT_USAGE)
    return table[name]


def _done(out: Emitter) -> None:
    out.flush()
    sys.exit(EXIT_FAIL if out.failed else 0)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--json", "as_json", is_flag=True, help="Emit one JSON document instead of key=value lines.")
@click.pass_context
def cli(ctx, as_json):
    """Twisted complexes over finite b-algebras: checks, constructions and fuzzing.

    FILE arguments accept a path to a .twc file or one of the bundled names e1, e2, e3.
    """
    ctx.obj = Emitter(as_json)


# -- algebra and hat level ---------------------------------------------------------
@cli.command("check-algebra")
@click.argument("path", metavar="FILE")
@click.option("--mutants/--no-mutants", default=False, help="Also confirm every one-coefficient unit mutant fails.")
@click.pass_obj
def check_algebra(out: Emitter, path, mutants):
    """Unit rules and Stasheff identities up to two above the top arity."""
    ws = _workspace(path)
    for rep in ws.algebra.check_all():
        out.report(rep)
    for p in ws.algebra.load_problems:
        out.record("note", text=str(p))
    if mutants:
        out.report(suites.algebra_suite(ws)[-1])
    _done(out)


@cli.command("hat-check")
@click.argument("path", metavar="FILE")
@click.option("--window", default=1, show_default=True, type=click.IntRange(0, 3))
@click.pass_obj
def hat_check(out: Emitter, path, window):
    """Identities of the window-extended operations."""
    ws = _workspace(path)
    for rep in suites.hat_suite(ws, window):
        out.report(rep)
    _done(out)


@cli.command("tw-validate")
@click.argument("path", metavar="FILE")
@click.pass_obj
def tw_validate(out: Emitter, path):
    """Re-validate every twisted object and classify every named morphism."""
    ws = _workspace(path)
    tw = ws.tw
    rep = Report("objects")
    for name, X in ws.objects.items():
        rep.checked += 1
        try:
            tw.validate(X.module, X.delta)
            out.record("object", name=name, total=X.module.total, nilpotency=X.nil_index)
        except TwError as exc:
            rep.fail(f"{name}: {exc}")
    out.report(rep)
    for name, f in ws.morphisms.items():
        deg = sorted(ws.ad.degrees(f.under))
        kind = "cocycle" if tw.is_cocycle(f) else ("zero" if tw.is_zero(f) else "cochain")
        if kind == "cocycle" and tw.is_coboundary(f) is not None:
            kind = "coboundary"
        out.record("morphism", name=name, degrees=",".join(map(str, deg)) or "none", kind=kind)
    _done(out)


# -- conflations -------------------------------------------------------------------
@cli.group()
def confl():
    """Conflation constructions."""


def _emit_conflation(out: Emitter, ws, tag: str, xi) -> None:
    F = ws.field
    out.record(tag, kind=xi.kind, X=format_module(xi.X.module), Y=format_module(xi.Y.module))
    out.record(f"{tag}.E", module=format_module(xi.E.module), delta=format_morphism(F, xi.E.delta))
    if xi.gamma is not None:
        out.record(f"{tag}.gamma", value=format_morphism(F, xi.gamma))
    problems = ws.confl.verify(xi)
    rep = Report(f"{tag}.verify", 1, problems)
    out.report(rep)


@confl.command("make")
@click.argument("path", metavar="FILE")
@click.argument("x")
@click.argument("y")
@click.argument("gamma", required=False)
@click.pass_obj
def confl_make(out: Emitter, path, x, y, gamma):
    """Canonical conflation X -> E -> Y glued by the degree-0 map GAMMA : Y -> X."""
    ws = _workspace(path)
    X, Y = _lookup(ws.objects, x, "object"), _lookup(ws.objects, y, "object")
    g = _lookup(ws.morphisms, gamma, "morphism").under if gamma else None
    try:
        xi = ws.confl.make_canonical(X, Y, g)
    except TwError as exc:
        out.report(Report("make", 1, [str(exc)]))
        _done(out)
    _emit_conflation(out, ws, "conflation", xi)
    _done(out)


@confl.command("check")
@click.argument("path", metavar="FILE")
@click.argument("name", required=False)
@click.pass_obj
def confl_check(out: Emitter, path, name):
    """Verify named conflations (all of them by default)."""
    ws = _workspace(path)
    names = [name] if name else list(ws.conflations)
    for n in names:
        xi = _lookup(ws.conflations, n, "conflation")
        out.report(Report(n, 1, ws.confl.verify(xi)))
    _done(out)


@confl.command("push")
@click.argument("path", metavar="FILE")
@click.argument("name")
@click.argument("h")
@click.pass_obj
def confl_push(out: Emitter, path, name, h):
    """Pushout of a conflation along H : X -> X'."""
    ws = _workspace(path)
    xi, f = _lookup(ws.conflations, name, "conflation"), _lookup(ws.morphisms, h, "morphism")
    t, xp = ws.confl.pushout(xi, f)
    _emit_conflation(out, ws, "pushout", xp)
    ok = ws.confl.ladder_commutes(xi, xp, f, t, ws.tw.identity(xi.Y))
    out.report(Report("ladder", 1, [] if ok else ["pushout ladder does not commute"]))
    _done(out)


@confl.command("pull")
@click.argument("path", metavar="FILE")
@click.argument("name")
@click.argument("h")
@click.pass_obj
def confl_pull(out: Emitter, path, name, h):
    """Pullback of a conflation along H : Y' -> Y."""
    ws = _workspace(path)
    xi, f = _lookup(ws.conflations, name, "conflation"), _lookup(ws.morphisms, h, "morphism")
    t, xq = ws.confl.pullback(xi, f)
    _emit_conflation(out, ws, "pullback", xq)
    ok = ws.confl.ladder_commutes(xq, xi, ws.tw.identity(xi.X), t, f)
    out.report(Report("ladder", 1, [] if ok else ["pullback ladder does not commute"]))
    _done(out)


@confl.command("psi")
@click.argument("path", metavar="FILE")
@click.argument("h")
@click.option("--compare", default=None, help="A second map Y -> X[1]; report whether the conflations are equivalent.")
@click.pass_obj
def confl_psi(out: Emitter, path, h, compare):
    """The conflation classified by H : Y -> X[1]."""
    ws = _workspace(path)
    f = _lookup(ws.morphisms, h, "morphism")
    xi = ws.confl.psi(f)
    _emit_conflation(out, ws, "psi", xi)
    back = ws.confl.psi_inv(xi)
    out.report(Report("round-trip", 1, [] if ws.tw.equal(back, f) else ["psi_inv(psi(h)) != h"]))
    if compare:
        g = _lookup(ws.morphisms, compare, "morphism")
        eq = ws.confl.equivalent(xi, ws.confl.psi(g))
        cob = ws.tw.is_coboundary(ws.tw.sub(f, g)) is not None
        out.record("equivalent", value=str(eq is not None).lower(), coboundary=str(cob).lower())
        out.report(Report("classification", 1, [] if (eq is not None) == cob else ["equivalence disagrees with coboundary test"]))
    _done(out)


@confl.command("cone")
@click.argument("path", metavar="FILE")
@click.argument("f")
@click.pass_obj
def confl_cone(out: Emitter, path, f):
    """The cone conflation X -> J(X) (+) Y -> C(f)."""
    ws = _workspace(path)
    eta, eta_n = ws.confl.cone_conflation(_lookup(ws.morphisms, f, "morphism"))
    _emit_conflation(out, ws, "cone", eta)
    _emit_conflation(out, ws, "cone.canonical", eta_n)
    _done(out)


@confl.command("rotate")
@click.argument("path", metavar="FILE")
@click.argument("name")
@click.option("--left", is_flag=True, help="Rotate backwards instead.")
@click.pass_obj
def confl_rotate(out: Emitter, path, name, left):
    """The rotation conflation of a named canonical conflation."""
    ws = _workspace(path)
    xi = _lookup(ws.conflations, name, "conflation")
    eta, eta1 = (ws.confl.rotation_conflation_left if left else ws.confl.rotation_conflation)(xi)
    _emit_conflation(out, ws, "rotation", eta)
    _emit_conflation(out, ws, "rotation.canonical", eta1)
    _done(out)


# -- triangles -----------------------------------------------------------------------
@cli.group()
def tri():
    """Distinguished triangles."""


def _emit_triangle(out: Emitter, ws, tag: str, t) -> None:
    F = ws.field
    for key, m in zip("uvw", t.maps):
        out.record(f"{tag}.{key}", source=format_module(m.source.module), target=format_module(m.target.module), value=format_morphism(F, m.under))
    out.report(Report(f"{tag}.verify", 1, ws.tri.triangle_problems(t)))


@tri.command("cone")
@click.argument("path", metavar="FILE")
@click.argument("f")
@click.pass_obj
def tri_cone(out: Emitter, path, f):
    """X -> Y -> C(f) -> X[1] for a named cocycle F."""
    ws = _workspace(path)
    _emit_triangle(out, ws, "cone", ws.tri.cone_of(_lookup(ws.morphisms, f, "morphism")))
    _done(out)


@tri.command("rotate")
@click.argument("path", metavar="FILE")
@click.argument("name")
@click.option("--left", is_flag=True)
@click.pass_obj
def tri_rotate(out: Emitter, path, name, left):
    """Rotate the canonical triangle of a named conflation."""
    ws = _workspace(path)
    t = ws.tri.canonical_triangle(_lookup(ws.conflations, name, "conflation"))
    _emit_triangle(out, ws, "rotated", ws.tri.rotate_left(t) if left else ws.tri.rotate_right(t))
    _done(out)


@tri.command("tr3")
@click.argument("path", metavar="FILE")
@click.argument("source")
@click.argument("target")
@click.argument("theta1")
@click.argument("theta2")
@click.pass_obj
def tri_tr3(out: Emitter, path, source, target, theta1, theta2):
    """Complete (THETA1, THETA2) between canonical triangles of two conflations."""
    ws = _workspace(path)
    R = ws.tri
    t = R.canonical_triangle(_lookup(ws.conflations, source, "conflation"))
    t2 = R.canonical_triangle(_lookup(ws.conflations, target, "conflation"))
    a, b = _lookup(ws.morphisms, theta1, "morphism"), _lookup(ws.morphisms, theta2, "morphism")
    try:
        c = R.complete_tr3(a, b, t, t2)
    except TwError as exc:
        out.report(Report("tr3", 1, [str(exc)]))
        _done(out)
    out.record("theta3", value=format_morphism(ws.field, c.under))
    sq = R.sextuple_squares(t, t2, a, b, c)
    out.report(Report("tr3", 1, [k for k, ok in sq.items() if not ok]))
    _done(out)


@tri.command("octa")
@click.argument("path", metavar="FILE")
@click.argument("u")
@click.argument("v")
@click.pass_obj
def tri_octa(out: Emitter, path, u, v):
    """Octahedron for the composable pair U : X -> Y, V : Y -> Z."""
    ws = _workspace(path)
    R = ws.tri
    f, g = _lookup(ws.morphisms, u, "morphism"), _lookup(ws.morphisms, v, "morphism")
    try:
        o = R.octahedron(R.cone_of(f), R.cone_of(g), R.cone_of(R.comp(g, f)))
    except TwError as exc:
        out.report(Report("octahedron", 1, [str(exc)]))
        _done(out)
    _emit_triangle(out, ws, "octahedron", o.triangle)
    out.report(Report("octahedron.squares", len(o.squares), [k for k, ok in o.squares.items() if not ok]))
    _done(out)


@tri.command("axioms")
@click.argument("path", metavar="FILE")
@click.option("--cases", default=25, show_default=True, type=click.IntRange(0))
@click.option("--seed", default=0, show_default=True)
@click.option("--dims", default=3, show_default=True, type=click.IntRange(1, 8))
@click.option("--window", default=1, show_default=True, type=click.IntRange(0, 3))
@click.pass_obj
def tri_axioms(out: Emitter, path, cases, seed, dims, window):
    """TR1-TR4 on generated instances, plus the wrong-sign rotation probe."""
    ws = _workspace(path)
    for rep in suites.tri_suite(ws, Generator(ws, seed, dims, window), cases):
        out.report(rep)
    _done(out)


# -- sweeps --------------------------------------------------------------------------------
def _fuzz_into(out: Emitter, ws, tag: str, seed: int, cases: int, dims: int, window: int, tri_cases: int) -> None:
    for k, (name, fn) in enumerate(suites.SUITES.items()):
        out.report(fn(ws, Generator(ws, seed * 1009 + k, dims, window), cases), tag)
    if tri_cases:
        gen = Generator(ws, seed * 1009 + len(suites.SUITES), dims, window)
        for rep in suites.tri_suite(ws, gen, tri_cases):
            out.report(rep, tag)


@cli.command()
@click.option("--cases", default=100, show_default=True, type=click.IntRange(1))
@click.option("--tri-cases", default=25, show_default=True, type=click.IntRange(0))
@click.option("--window", default=3, show_default=True, type=click.IntRange(0, 3), help="Window of the exhaustive hat checks.")
@click.pass_obj
def selftest(out: Emitter, cases, tri_cases, window):
    """Every invariant suite on the bundled examples with fixed seeds."""
    for name in BUILTIN:
        ws = builtin(name, _field())
        for rep in suites.algebra_suite(ws):
            out.report(rep, name)
        for rep in suites.hat_suite(ws, window):
            out.report(rep, name)
        _fuzz_into(out, ws, name, 0, cases, 3, 1, tri_cases)
    _done(out)


@cli.command()
@click.option("--seed", default=0, show_default=True)
@click.option("--cases", default=100, show_default=True, type=click.IntRange(1))
@click.option("--dims", default=3, show_default=True, type=click.IntRange(1, 8))
@click.option("--window", default=1, show_default=True, type=click.IntRange(0, 3))
@click.option("--tri-cases", default=None, type=click.IntRange(0), help="Triangle instances (default: cases // 4).")
@click.option("--example", "examples", multiple=True, help="Restrict to these files or bundled names.")
@click.pass_obj
def fuzz(out: Emitter, seed, cases, dims, window, tri_cases, examples):
    """Seeded random sweeps of the identity suites."""
    tri_cases = cases // 4 if tri_cases is None else tri_cases
    for name in examples or BUILTIN:
        ws = _workspace(name)
        out.record("config", example=name, seed=seed, cases=cases, dims=dims, window=window, field=ws.field.spec)
        _fuzz_into(out, ws, name, seed, cases, dims, window, tri_cases)
    _done(out)


def main(argv=None) -> None:
    """Console entry point; construction errors on user input exit with status 2."""
    try:
        cli.main(args=argv, prog_name="twcat")
    except TwError as exc:
        click.echo(f"error=input message={_kv(str(exc))}")
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
