"""Command-line interface.

Subcommands: verify, check-lemma, generate, match, zcr, catalog, eval.
Reports are plain text followed by a machine-readable JSON block; expressions
in the JSON are rendered in the input grammar.  Exit codes: 0 success,
1 verification or match failure, 2 input error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional

from . import __version__
from .catalog import load_catalog
from .classify import ClassifyError, generate, lemma31_check, quantities
from .exprcore import ExprError
from .forms import (Triad, gaussian_curvature, metric_of, nondegenerate,
                    sample_assignment, structure_residuals)
from .manifest import (ManifestError, catalog_entry_manifest_text, load_manifest,
                       triad_manifest_text)
from .matching import match_family
from .parser import NameContext, render_expr
from .zcr import omega_sl2, omega_so, standard_su2_gauge, gauge_transform, zc_residual

OK, FAILED, INPUT_ERROR, INTERNAL_ERROR = 0, 1, 2, 3


class _Report:
    """Accumulates text lines plus a JSON payload, emitted together."""

    def __init__(self) -> None:
        self.lines: list[str] = []
        self.payload: dict = {}

    def say(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self) -> None:
        for line in self.lines:
            print(line)
        print("--- report (json) ---")
        print(json.dumps(self.payload, sort_keys=True, indent=2))


def _seed_of(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PSSKIT_SEED")
    return int(env) if env else 0


def _radical_header(rep: _Report, exprs, ctx: NameContext) -> None:
    seen = {}
    frontier = []
    for e in exprs:
        frontier.extend(e.params_used())
    while frontier:
        p = frontier.pop()
        if p.name in seen or p.square is None:
            continue
        seen[p.name] = p
        frontier.extend(p.square.params_used())
    for name in sorted(seen):
        p = seen[name]
        rep.say(f"radical {name}: {name}^2 = {render_expr(p.square, ctx)}")


def _read_manifest(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return load_manifest(fh.read())


def _verify_triad(rep: _Report, name: str, triad: Triad, ctx: NameContext, seed: int) -> bool:
    residuals = structure_residuals(triad)
    rtexts = [render_expr(r.c, ctx) for r in residuals]
    all_zero = all(r.is_zero() for r in residuals)
    nd, witness = nondegenerate(triad, seed=seed)
    rep.say(f"coframe: {name}")
    _radical_header(rep, triad.coeffs(), ctx)
    for i, text in enumerate(rtexts, start=1):
        rep.say(f"residual {i}: {text}")
    rep.say(f"nondegenerate: {'yes' if nd else 'no'}")
    k_text = None
    if all_zero:
        k = gaussian_curvature(triad)
        k_text = render_expr(k, ctx)
        rep.say(f"curvature K = {k_text}")
    verdict = all_zero and nd
    rep.say(f"verdict: {'VERIFIES' if verdict else 'DOES NOT VERIFY'}")
    rep.payload.update({
        "name": name,
        "residuals": rtexts,
        "nondegenerate": nd,
        "curvature": k_text,
        "verifies": verdict,
        "delta": triad.delta,
    })
    return verdict


def cmd_verify(args) -> int:
    m = _read_manifest(args.manifest)
    if m.triad is None:
        raise ManifestError("verify expects a triad manifest")
    rep = _Report()
    ok = _verify_triad(rep, m.name, m.triad, m.ctx, _seed_of(args))
    metric = metric_of(m.triad)
    rep.payload["metric"] = {
        "E": render_expr(metric.E, m.ctx),
        "F": render_expr(metric.F, m.ctx),
        "G": render_expr(metric.G2, m.ctx),
    }
    rep.emit()
    return OK if ok else FAILED


def cmd_check_lemma(args) -> int:
    m = _read_manifest(args.manifest)
    if m.triad is None:
        raise ManifestError("check-lemma expects a triad manifest")
    rep = _Report()
    report = lemma31_check(m.triad, seed=_seed_of(args))
    rep.say(f"existence conditions: {m.name}")
    for cond, ok in report.conditions.items():
        rep.say(f"  {cond}: {'pass' if ok else 'FAIL'}")
    if report.passed:
        qs = quantities(m.triad)
        rep.say(f"classification case: {qs.case}")
        rep.payload["case"] = qs.case
        rep.payload["Q"] = render_expr(qs.Q, m.ctx)
        rep.payload["L2"] = render_expr(qs.L2, m.ctx)
        rep.payload["gamma"] = render_expr(qs.gamma, m.ctx)
    rep.say(f"verdict: {'PASS' if report.passed else 'FAIL'}")
    rep.payload["conditions"] = dict(report.conditions)
    rep.payload["passed"] = report.passed
    rep.emit()
    return OK if report.passed else FAILED


def cmd_generate(args) -> int:
    m = _read_manifest(args.manifest)
    if m.family is None:
        raise ManifestError("generate expects a family manifest")
    fam = generate(m.family)
    rep = _Report()
    rep.say(f"family: {m.family.theorem}")
    _radical_header(rep, fam.triad.coeffs(), m.ctx)
    rep.say(f"equation rhs: {render_expr(fam.rhs, m.ctx)}")
    keys = ("f11", "f12", "f21", "f22", "f31", "f32")
    for key, c in zip(keys, fam.triad.coeffs()):
        rep.say(f"{key}: {render_expr(c, m.ctx)}")
    residuals = structure_residuals(fam.triad)
    sound = all(r.is_zero() for r in residuals)
    rep.say(f"structure residuals vanish: {'yes' if sound else 'NO'}")
    rep.say(f"classification case: {fam.quantities.case}")
    rep.payload.update({
        "theorem": m.family.theorem,
        "rhs": render_expr(fam.rhs, m.ctx),
        "coefficients": {k: render_expr(c, m.ctx) for k, c in zip(keys, fam.triad.coeffs())},
        "case": fam.quantities.case,
        "sound": sound,
        "extras": {k: render_expr(v, m.ctx) for k, v in sorted(fam.extras.items())},
    })
    if args.output:
        text = triad_manifest_text(m.name, fam.triad, m.ctx)
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.say(f"wrote {args.output}")
    rep.emit()
    return OK if sound else INTERNAL_ERROR


def cmd_match(args) -> int:
    m = _read_manifest(args.manifest)
    if m.lam is None or m.g is None:
        raise ManifestError("match expects an equation manifest in the cubic class")
    report = match_family(m.lam, m.g, degree=args.degree)
    rep = _Report()
    rep.say(f"equation: {m.name}")
    rep.say(f"cubic coefficient: {render_expr(m.lam, m.ctx)}")
    matched = []
    for r in report.results:
        rep.say(f"  {r.theorem}: {r.verdict} ({r.detail})")
        if r.matched:
            matched.append(r.theorem)
    if matched:
        rep.say(f"verdict: matched {', '.join(matched)}")
    else:
        rep.say("verdict: no family matched within ansatz")
    rep.payload.update({
        "name": m.name,
        "results": {r.theorem: {"verdict": r.verdict, "detail": r.detail}
                    for r in report.results},
        "matched": matched,
    })
    rep.emit()
    return OK if matched else FAILED


def cmd_zcr(args) -> int:
    m = _read_manifest(args.manifest)
    if m.triad is None:
        raise ManifestError("zcr expects a triad manifest")
    rep = _Report()
    if args.algebra in ("sl2r", "su2"):
        mat = omega_sl2(m.triad)
        if args.algebra == "su2":
            mat = gauge_transform(mat, standard_su2_gauge())
    else:
        want = "so21" if m.triad.delta == 1 else "so3"
        if args.algebra != want:
            raise ManifestError(
                f"algebra {args.algebra} needs delta = {1 if args.algebra == 'so21' else -1}")
        mat = omega_so(m.triad)
    res = zc_residual(mat, m.triad.eq)
    flat = all(c.is_zero() for row in res for c in row)
    rep.say(f"connection form: {args.algebra}, {mat.n}x{mat.n}")
    for i, row in enumerate(mat.entries):
        for j, w in enumerate(row):
            rep.say(f"  entry[{i}][{j}]: ({render_expr(w.cx, m.ctx)}) dx"
                    f" + ({render_expr(w.ct, m.ctx)}) dt")
    rep.say(f"curvature residual vanishes: {'yes' if flat else 'no'}")
    rep.payload.update({
        "algebra": args.algebra,
        "flat": flat,
        "residuals": [[render_expr(c.c, m.ctx) for c in row] for row in res],
    })
    rep.emit()
    return OK if flat else FAILED


def cmd_catalog(args) -> int:
    entries = load_catalog()
    rep = _Report()
    seed = _seed_of(args)
    results = {}
    all_ok = True
    for e in entries:
        if not args.run:
            kind = "coframe" if e.triad is not None else "equation only"
            rep.say(f"{e.name:12s} {kind:14s} {e.title}")
            continue
        verdicts = {}
        ok = True
        if e.triad is not None:
            residuals = structure_residuals(e.triad)
            zero = all(r.is_zero() for r in residuals)
            nd, _ = nondegenerate(e.triad, seed=seed)
            verdicts["verifies"] = zero and nd
            ok &= (zero and nd) == e.expected.verifies
            if zero:
                k = gaussian_curvature(e.triad)
                verdicts["curvature"] = render_expr(k, NameContext(e.var_names))
                ok &= k.equals(-e.expected.delta)
        if e.expected.lemma31 is not None:
            rep31 = lemma31_check(e.triad, seed=seed)
            verdicts["lemma"] = rep31.passed
            ok &= rep31.passed == e.expected.lemma31
            case = quantities(e.triad).case
            verdicts["case"] = case
            if e.expected.family:
                ok &= case == (e.expected.family if e.expected.family in
                               ("T32", "T33", "T34") else "T35")
        if e.expected.family is None and e.triad is None and e.g is not None:
            mrep = match_family(e.lam, e.g)
            verdicts["family_matches"] = [r.theorem for r in mrep.matches()]
            ok &= not mrep.matches()
        results[e.name] = verdicts
        all_ok &= ok
        rep.say(f"{'PASS' if ok else 'FAIL'} {e.name:12s} {e.title}")
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for e in entries:
            path = os.path.join(args.export, f"{e.name}.toml")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(catalog_entry_manifest_text(e))
        rep.say(f"exported {len(entries)} manifests to {args.export}")
    rep.payload["entries"] = results if args.run else [e.name for e in entries]
    if args.run:
        rep.say(f"catalog: {'all expected verdicts reproduced' if all_ok else 'MISMATCH'}")
        rep.payload["all_ok"] = all_ok
    rep.emit()
    return OK if (not args.run or all_ok) else FAILED


def cmd_eval(args) -> int:
    m = _read_manifest(args.manifest)
    if m.triad is None:
        raise ManifestError("eval expects a triad manifest")
    seed = _seed_of(args)
    rng = random.Random(seed)
    residuals = structure_residuals(m.triad)
    worst = 0.0
    exprs = list(m.triad.coeffs())
    for _ in range(args.samples):
        assignment = sample_assignment(exprs + [r.c for r in residuals], rng)
        for r in residuals:
            scale = max(1.0, r.c.magnitude_bound(assignment))
            worst = max(worst, abs(r.c.eval_at(assignment)) / scale)
    ok = worst <= 1e-9
    rep = _Report()
    rep.say(f"numeric cross-check: {m.name}")
    rep.say(f"samples: {args.samples}, seed: {seed}")
    rep.say(f"worst scaled residual: {worst:.3e}")
    rep.say(f"verdict: {'consistent with zero' if ok else 'NONZERO'}")
    rep.payload.update({"name": m.name, "samples": args.samples, "seed": seed,
                        "worst": worst, "ok": ok})
    rep.emit()
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="psskit",
        description="Verify, classify, and generate coframes for third-order "
                    "equations attached to surfaces of constant curvature.")
    ap.add_argument("--version", action="version", version=f"psskit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="sampling seed (default: PSSKIT_SEED or 0)")

    p = sub.add_parser("verify", help="check the structure equations for a coframe")
    p.add_argument("manifest")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-lemma", help="run the existence-condition checker")
    p.add_argument("manifest")
    common(p)
    p.set_defaults(func=cmd_check_lemma)

    p = sub.add_parser("generate", help="build a family instance from a spec")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", default=None, help="write the result as a triad manifest")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("match", help="match a bare equation against the families")
    p.add_argument("manifest")
    p.add_argument("--degree", type=int, default=4, help="polynomial ansatz degree")
    common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("zcr", help="matrix connection form and flatness residual")
    p.add_argument("manifest")
    p.add_argument("--algebra", choices=("sl2r", "su2", "so21", "so3"), default="sl2r")
    common(p)
    p.set_defaults(func=cmd_zcr)

    p = sub.add_parser("catalog", help="list or re-verify the built-in catalog")
    p.add_argument("--run", action="store_true", help="re-verify every entry")
    p.add_argument("--export", default=None, help="write entry manifests to a directory")
    common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("eval", help="numeric sampling cross-check of the residuals")
    p.add_argument("manifest")
    p.add_argument("--samples", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, FileNotFoundError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return INPUT_ERROR
    except ClassifyError as err:
        print(f"input error: {err}", file=sys.stderr)
        return INPUT_ERROR
    except ExprError as err:
        print(f"input error: {err}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as err:  # pragma: no cover - internal invariant breach
        print(f"internal error: {err!r}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
