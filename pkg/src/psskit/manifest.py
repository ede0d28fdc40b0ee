"""Flat key-value manifest files describing triads, families, and equations.

The format is a small TOML-style subset: ``key = value`` lines grouped under
``[section]`` headers, where values are integers, booleans, quoted strings, or
arrays of quoted strings.  Expression values are strings in the toolkit's
input grammar.  Unknown identifiers inside expressions are errors; every
parameter must be declared in its own ``[params.<name>]`` table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .classify import FamilySpec
from .exprcore import Expr, ExprError, Param, param, registry
from .forms import Triad, triad_from_coeffs
from .jetcalc import CH, EVOLUTION, XT, EquationSpec, VarRule, ch_eq, evolution_eq, xt_eq
from .parser import NameContext, parse_expr, render_expr

FORMAT_VERSION = 1
KINDS = ("triad", "family", "equation")


class ManifestError(ExprError):
    pass


Value = Union[int, bool, str, list]

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def parse_table_text(text: str) -> dict[str, dict[str, Value]]:
    """Parse the TOML-subset into {section: {key: value}}; '' is the root."""
    sections: dict[str, dict[str, Value]] = {"": {}}
    current = sections[""]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ManifestError(f"line {lineno}: malformed section header")
            name = line[1:-1].strip()
            if not all(_KEY_RE.match(p) for p in name.split(".")):
                raise ManifestError(f"line {lineno}: bad section name {name!r}")
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ManifestError(f"line {lineno}: expected key = value")
        key, _, rhs = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ManifestError(f"line {lineno}: bad key {key!r}")
        current[key] = _parse_value(rhs.strip(), lineno)
    return sections


def _parse_value(text: str, lineno: int) -> Value:
    if text == "true":
        return True
    if text == "false":
        return False
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        parts = [p.strip() for p in inner.split(",")]
        out = []
        for p in parts:
            if not (p.startswith('"') and p.endswith('"')):
                raise ManifestError(f"line {lineno}: arrays hold quoted strings only")
            out.append(p[1:-1])
        return out
    raise ManifestError(f"line {lineno}: cannot parse value {text!r}")


def _quote(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, list):
        return "[" + ", ".join(f'"{x}"' for x in v) + "]"
    raise ManifestError(f"cannot serialize {v!r}")


def dump_table_text(sections: dict[str, dict[str, Value]]) -> str:
    lines = []
    root = sections.get("", {})
    for k, v in root.items():
        lines.append(f"{k} = {_quote(v)}")
    for name in sections:
        if not name:
            continue
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        for k, v in sections[name].items():
            lines.append(f"{k} = {_quote(v)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------


@dataclass
class Manifest:
    kind: str
    name: str
    ctx: NameContext
    params: tuple[Param, ...]
    eq: Optional[EquationSpec] = None
    triad: Optional[Triad] = None
    family: Optional[FamilySpec] = None
    lam: Optional[Expr] = None
    g: Optional[Expr] = None


def _declare_params(sections: dict[str, dict[str, Value]], ctx: NameContext) -> tuple[Param, ...]:
    tables = {}
    for name, table in sections.items():
        if name.startswith("params."):
            tables[name.split(".", 1)[1]] = table
    declared: list[Param] = []
    # radical-free first, so squares can refer to them
    pending = dict(tables)
    for pname, table in list(pending.items()):
        if "square" not in table:
            declared.append(param(pname, nonzero=bool(table.get("nonzero", False)),
                                  positive=bool(table.get("positive", False))))
            del pending[pname]
    for pname, table in pending.items():
        square = parse_expr(str(table["square"]), ctx)
        if square.jet_vars():
            raise ManifestError(f"radical square for {pname!r} must be constant")
        declared.append(param(pname, positive=True, square=square))
    return tuple(declared)


def _build_equation(table: dict[str, Value], ctx: NameContext) -> EquationSpec:
    klass = table.get("class")
    if klass == CH:
        return ch_eq(parse_expr(str(table["rhs"]), ctx))
    if klass == XT:
        return xt_eq(parse_expr(str(table["rhs"]), ctx))
    if klass == EVOLUTION:
        rhss = []
        for vn in ctx.var_names:
            key = f"rhs_{vn}" if len(ctx.var_names) > 1 else "rhs"
            if key not in table:
                raise ManifestError(f"missing {key!r} in [equation]")
            rhss.append(parse_expr(str(table[key]), ctx))
        return evolution_eq(*rhss)
    raise ManifestError(f"unknown equation class {klass!r}")


def load_manifest(text: str) -> Manifest:
    sections = parse_table_text(text)
    root = sections.get("", {})
    if root.get("format") != FORMAT_VERSION:
        raise ManifestError(f"format = {FORMAT_VERSION} header is required")
    kind = root.get("kind")
    if kind not in KINDS:
        raise ManifestError(f"kind must be one of {KINDS}, got {kind!r}")
    names = sections.get("vars", {}).get("names", ["u"])
    if not isinstance(names, list) or not names:
        raise ManifestError("[vars] names must be a non-empty array")
    ctx = NameContext(tuple(names))
    params = _declare_params(sections, ctx)
    m = Manifest(kind=kind, name=str(root.get("name", "unnamed")), ctx=ctx, params=params)

    if "equation" in sections:
        m.eq = _build_equation(sections["equation"], ctx)

    if kind == "triad":
        if m.eq is None:
            raise ManifestError("a triad manifest needs an [equation] table")
        t = sections.get("triad")
        if t is None:
            raise ManifestError("missing [triad] table")
        delta = t.get("delta", 1)
        if delta not in (1, -1):
            raise ManifestError("delta must be 1 or -1")
        coeffs = []
        for key in ("f11", "f12", "f21", "f22", "f31", "f32"):
            if key not in t:
                raise ManifestError(f"missing {key!r} in [triad]")
            coeffs.append(parse_expr(str(t[key]), ctx))
        m.triad = triad_from_coeffs(*coeffs, delta, m.eq)
    elif kind == "family":
        t = sections.get("family")
        if t is None:
            raise ManifestError("missing [family] table")
        theorem = str(t.get("theorem", ""))
        fparams = {}
        slots = {}
        signs = {}
        for key, val in t.items():
            if key.startswith("param_"):
                fparams[key[6:]] = parse_expr(str(val), ctx)
            elif key.startswith("slot_"):
                slots[key[5:]] = parse_expr(str(val), ctx)
            elif key.startswith("sign_"):
                if val not in (1, -1):
                    raise ManifestError(f"{key} must be 1 or -1")
                signs[key[5:]] = int(val)
        m.family = FamilySpec(theorem, params=fparams, slots=slots, signs=signs,
                              delta=int(t.get("delta", 1)))
    elif kind == "equation":
        if m.eq is None:
            raise ManifestError("an equation manifest needs an [equation] table")
        if m.eq.rules[0].kind == CH:
            from .classify import split_cubic
            m.lam, m.g = split_cubic(m.eq.rules[0].rhs)
    return m


# --------------------------------------------------------------------------


def _param_tables(params) -> dict[str, dict[str, Value]]:
    out: dict[str, dict[str, Value]] = {}
    ordered = sorted(params, key=lambda p: (p.square is not None, p.name))
    for p in ordered:
        table: dict[str, Value] = {}
        if p.square is not None:
            table["square"] = render_expr(p.square)
        else:
            if p.nonzero and not p.positive:
                table["nonzero"] = True
            if p.positive:
                table["positive"] = True
        out[f"params.{p.name}"] = table
    return out


def _collect_params(exprs) -> set:
    seen = set()
    frontier = []
    for e in exprs:
        frontier.extend(e.params_used())
    while frontier:
        p = frontier.pop()
        if p in seen:
            continue
        seen.add(p)
        if p.square is not None:
            frontier.extend(p.square.params_used())
    return seen


def triad_manifest_text(name: str, triad: Triad, ctx: NameContext) -> str:
    eq = triad.eq
    sections: dict[str, dict[str, Value]] = {
        "": {"format": FORMAT_VERSION, "kind": "triad", "name": name},
        "vars": {"names": list(ctx.var_names)},
    }
    exprs = list(triad.coeffs()) + [r.rhs for r in eq.rules]
    sections.update(_param_tables(_collect_params(exprs)))
    eq_table: dict[str, Value] = {"class": eq.rules[0].kind}
    if len(eq.rules) == 1:
        eq_table["rhs"] = render_expr(eq.rules[0].rhs, ctx)
    else:
        for vn, rule in zip(ctx.var_names, eq.rules):
            eq_table[f"rhs_{vn}"] = render_expr(rule.rhs, ctx)
    sections["equation"] = eq_table
    keys = ("f11", "f12", "f21", "f22", "f31", "f32")
    triad_table: dict[str, Value] = {"delta": triad.delta}
    for key, c in zip(keys, triad.coeffs()):
        triad_table[key] = render_expr(c, ctx)
    sections["triad"] = triad_table
    return dump_table_text(sections)


def equation_manifest_text(name: str, eq: EquationSpec, ctx: NameContext) -> str:
    sections: dict[str, dict[str, Value]] = {
        "": {"format": FORMAT_VERSION, "kind": "equation", "name": name},
        "vars": {"names": list(ctx.var_names)},
    }
    sections.update(_param_tables(_collect_params([r.rhs for r in eq.rules])))
    eq_table: dict[str, Value] = {"class": eq.rules[0].kind}
    if len(eq.rules) == 1:
        eq_table["rhs"] = render_expr(eq.rules[0].rhs, ctx)
    else:
        for vn, rule in zip(ctx.var_names, eq.rules):
            eq_table[f"rhs_{vn}"] = render_expr(rule.rhs, ctx)
    sections["equation"] = eq_table
    return dump_table_text(sections)


def catalog_entry_manifest_text(entry) -> str:
    ctx = NameContext(entry.var_names)
    if entry.triad is not None:
        return triad_manifest_text(entry.name, entry.triad, ctx)
    return equation_manifest_text(entry.name, entry.eq, ctx)
