"""Solution records: text format, parser, serializer and materialization.

A catalog file is a sequence of ``key: value`` lines.  ``#`` starts a comment
line.  An expression value may continue onto following lines while its
parentheses are unbalanced or it ends with an operator.  Model blocks are
introduced by ``model NAME: KIND VARS...`` and consist of the indented lines
that follow.

Tower keys::

    tower: NAME                  base: VAR
    root NAME: EXPR              generator NAME with NAME^2 = EXPR (a polynomial in VAR)
    let NAME: EXPR               named element of the function field
    square NAME: EXPR            symbol usable only as NAME^(2k)
    t: EXPR                      the Belyi map
    degree: INT                  genus: INT
    note: TEXT
    model NAME: hyperelliptic VAR | plane P Q | plane-image P Q

Record keys::

    record: ID                   tower: NAME (or an inline tower)
    y: EXPR                      theta: A B C D (four rationals)
    theta-source: printed|derived  sibling: ID    derived-from: ID    note: TEXT
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from ..arith import RatFunc, UniPoly, squarefree_part
from ..field import FieldElement, TowerError, TowerMap, TowerPresentation
from ..pvi import DegenerateSolution, PviSolution, ThetaParams
from .grammar import (EvaluationError, Expr, ParseError, SquareOnly, evaluate, format_expression,
                      parse_expression)

CATALOG_MAX_DEPTH = 2


class SemanticError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Decl:
    kind: str  # root | let | square | map
    name: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    kind: str  # hyperelliptic | plane | plane-image
    variables: tuple[str, ...]
    decls: tuple[Decl, ...]
    equation: Expr | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class TowerSpec:
    name: str
    base: str
    decls: tuple[Decl, ...]
    t: Expr
    degree: int | None = None
    genus: int | None = None
    models: tuple[ModelSpec, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def generator_names(self) -> list[str]:
        return [d.name for d in self.decls if d.kind == "root"]

    def build(self) -> "BuiltTower":
        return _build_tower(self)


@dataclass
class BuiltTower:
    spec: TowerSpec
    tower: TowerPresentation
    env: dict
    t: FieldElement

    def evaluate(self, expr: Expr) -> FieldElement:
        value = evaluate(expr, self.env)
        if not isinstance(value, FieldElement):
            value = self.tower.base(RatFunc.const(value, self.tower.var))
        return value


@dataclass(frozen=True)
class SolutionRecord:
    id: str
    tower: TowerSpec
    y: Expr
    theta: ThetaParams
    theta_source: str = "printed"
    sibling: str | None = None
    derived_from: str | None = None
    notes: tuple[str, ...] = ()

    @property
    def t(self) -> Expr:
        return self.tower.t

    @property
    def expected_genus(self) -> int | None:
        return self.tower.genus

    @property
    def expected_degree(self) -> int | None:
        return self.tower.degree

    @property
    def models(self) -> tuple[ModelSpec, ...]:
        return self.tower.models

    @cached_property
    def built(self) -> BuiltTower:
        return self.tower.build()

    @cached_property
    def solution(self) -> PviSolution:
        bt = self.built
        y = bt.evaluate(self.y)
        return PviSolution(bt.tower, y, bt.t, self.theta, label=self.id)

    def model(self, name_or_kind: str) -> ModelSpec:
        for m in self.tower.models:
            if name_or_kind in (m.name, m.kind):
                return m
        raise KeyError(name_or_kind)


# ---------------------------------------------------------------- document layer

@dataclass
class _Entry:
    key: str
    arg: str | None
    value: str
    line: int
    positions: list[tuple[int, int]]
    children: list["_Entry"] = field(default_factory=list)


_EXPR_KEYS = {"root", "let", "square", "map", "t", "y", "equation"}


def _needs_continuation(text: str) -> bool:
    depth = text.count("(") - text.count(")")
    stripped = text.rstrip()
    return depth > 0 or (stripped.endswith(("+", "-", "*", "/", "^")) and bool(stripped))


def _split_key(head: str, line_no: int) -> tuple[str, str | None]:
    parts = head.split()
    if not parts:
        raise ParseError("missing key", line_no, 1)
    if len(parts) > 2:
        raise ParseError(f"malformed key {head!r}", line_no, 1)
    return parts[0], parts[1] if len(parts) == 2 else None


def _read_entries(text: str) -> list[_Entry]:
    lines = text.splitlines()
    entries: list[_Entry] = []
    i = 0
    while i < len(lines):
        raw = lines[i]
        line_no = i + 1
        i += 1
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        if ":" not in raw:
            raise ParseError("expected 'key: value'", line_no, indent + 1)
        colon = raw.index(":")
        key, arg = _split_key(raw[:colon], line_no)
        value_start = colon + 1
        while value_start < len(raw) and raw[value_start] == " ":
            value_start += 1
        value = raw[value_start:]
        positions = [(line_no, value_start + k + 1) for k in range(len(value))]
        if key in _EXPR_KEYS:
            while _needs_continuation(value) and i < len(lines):
                nxt = lines[i]
                line_no2 = i + 1
                i += 1
                value += " "
                positions.append((line_no2, 1))
                value += nxt
                positions.extend((line_no2, k + 1) for k in range(len(nxt)))
        positions.append((line_no, len(raw) + 1))
        entry = _Entry(key, arg, value.strip() if key not in _EXPR_KEYS else value, line_no, positions)
        if indent > 0:
            if not entries or entries[-1].key != "model":
                raise ParseError("indented line outside a model block", line_no, 1)
            entries[-1].children.append(entry)
        else:
            entries.append(entry)
    return entries


def _expr(entry: _Entry) -> Expr:
    offset = len(entry.value) - len(entry.value.lstrip())
    return parse_expression(entry.value, positions=entry.positions[offset:] or None) if offset else \
        parse_expression(entry.value, positions=entry.positions)


def _int(entry: _Entry) -> int:
    try:
        return int(entry.value)
    except ValueError:
        raise ParseError(f"{entry.key} must be an integer", entry.line, 1) from None


def _theta(entry: _Entry) -> ThetaParams:
    parts = entry.value.split()
    if len(parts) != 4:
        raise ParseError("theta needs four rationals", entry.line, 1)
    try:
        return ThetaParams(*(Fraction(p) for p in parts))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad theta {entry.value!r}", entry.line, 1) from None


def _parse_model(entry: _Entry) -> ModelSpec:
    parts = entry.value.split()
    if not entry.arg or not parts:
        raise ParseError("model needs a name and a kind", entry.line, 1)
    kind, variables = parts[0], tuple(parts[1:])
    if kind == "hyperelliptic" and len(variables) != 1:
        raise ParseError("hyperelliptic model takes one variable", entry.line, 1)
    if kind in ("plane", "plane-image") and len(variables) != 2:
        raise ParseError("plane model takes two variables", entry.line, 1)
    if kind not in ("hyperelliptic", "plane", "plane-image"):
        raise ParseError(f"unknown model kind {kind!r}", entry.line, 1)
    decls, equation, notes = [], None, []
    for child in entry.children:
        if child.key in ("root", "let", "square", "map"):
            if not child.arg:
                raise ParseError(f"{child.key} needs a name", child.line, 1)
            decls.append(Decl(child.key, child.arg, _expr(child), child.line))
        elif child.key == "equation":
            equation = _expr(child)
        elif child.key == "note":
            notes.append(child.value)
        else:
            raise ParseError(f"unknown model key {child.key!r}", child.line, 1)
    return ModelSpec(entry.arg, kind, variables, tuple(decls), equation, tuple(notes))


def _parse_tower_entries(entries: list[_Entry], name: str | None) -> TowerSpec | None:
    base, t, degree, genus = None, None, None, None
    decls, models, notes = [], [], []
    for e in entries:
        if e.key == "base":
            base = e.value
        elif e.key in ("root", "let", "square"):
            if not e.arg:
                raise ParseError(f"{e.key} needs a name", e.line, 1)
            decls.append(Decl(e.key, e.arg, _expr(e), e.line))
        elif e.key == "t":
            t = _expr(e)
        elif e.key == "degree":
            degree = _int(e)
        elif e.key == "genus":
            genus = _int(e)
        elif e.key == "model":
            models.append(_parse_model(e))
        elif e.key == "tower-note":
            notes.append(e.value)
    if base is None:
        return None
    if t is None:
        raise SemanticError(f"tower {name} has no t")
    return TowerSpec(name or "inline", base, tuple(decls), t, degree, genus, tuple(models), tuple(notes))


def parse_tower(text: str) -> TowerSpec:
    entries = _read_entries(text)
    name = next((e.value for e in entries if e.key == "tower"), None)
    for e in entries:
        if e.key not in ("tower", "base", "root", "let", "square", "t", "degree", "genus", "model",
                         "tower-note"):
            raise ParseError(f"unknown tower key {e.key!r}", e.line, 1)
    spec = _parse_tower_entries(entries, name)
    if spec is None:
        raise SemanticError("tower without base variable")
    spec.build()
    return spec


_RECORD_KEYS = {"record", "tower", "y", "theta", "theta-source", "sibling", "derived-from", "note"}
_TOWER_KEYS = {"base", "root", "let", "square", "t", "degree", "genus", "model", "tower-note"}


def parse_record(text: str, towers: Mapping[str, TowerSpec] | None = None,
                 validate: bool = True) -> SolutionRecord:
    """Parse a record; its tower is inline or looked up by name in ``towers``."""
    entries = _read_entries(text)
    for e in entries:
        if e.key not in _RECORD_KEYS | _TOWER_KEYS:
            raise ParseError(f"unknown key {e.key!r}", e.line, 1)
    fields: dict = {}
    notes = []
    tower_name = None
    for e in entries:
        if e.key == "record":
            fields["id"] = e.value
        elif e.key == "tower":
            tower_name = e.value
        elif e.key == "y":
            fields["y"] = _expr(e)
        elif e.key == "theta":
            fields["theta"] = _theta(e)
        elif e.key == "theta-source":
            if e.value not in ("printed", "derived"):
                raise ParseError("theta-source is 'printed' or 'derived'", e.line, 1)
            fields["theta_source"] = e.value
        elif e.key == "sibling":
            fields["sibling"] = e.value
        elif e.key == "derived-from":
            fields["derived_from"] = e.value
        elif e.key == "note":
            notes.append(e.value)
    for required in ("id", "y", "theta"):
        if required not in fields:
            raise SemanticError(f"record is missing {required!r}")
    tower = _parse_tower_entries([e for e in entries if e.key in _TOWER_KEYS], tower_name)
    if tower is None:
        if tower_name is None:
            raise SemanticError("record has neither an inline tower nor a tower reference")
        if towers is None or tower_name not in towers:
            raise SemanticError(f"unknown tower {tower_name!r}")
        tower = towers[tower_name]
    record = SolutionRecord(tower=tower, notes=tuple(notes), **fields)
    if validate:
        try:
            record.solution.check_nondegenerate()
        except EvaluationError as exc:
            raise SemanticError(str(exc)) from None
        except DegenerateSolution as exc:
            raise SemanticError(f"degenerate solution: {exc}") from None
    return record


# ---------------------------------------------------------------- materialization

def _base_env(spec: TowerSpec) -> dict:
    env: dict = {spec.base: RatFunc.gen(spec.base)}
    return env


def _as_field(value, tower: TowerPresentation) -> FieldElement:
    if isinstance(value, FieldElement):
        return value
    if isinstance(value, RatFunc):
        return tower.base(value)
    return tower.base(RatFunc.const(value, tower.var))


def _build_tower(spec: TowerSpec) -> BuiltTower:
    roots = [d for d in spec.decls if d.kind == "root"]
    if len(roots) > CATALOG_MAX_DEPTH:
        raise SemanticError(f"tower depth exceeded: {len(roots)} > {CATALOG_MAX_DEPTH}", roots[-1].line)
    base_env = _base_env(spec)
    radicands, scales = [], []
    for d in spec.decls:
        if d.kind == "root":
            try:
                value = evaluate(d.expr, base_env)
            except EvaluationError as exc:
                raise SemanticError(f"radicand of {d.name}: {exc}", d.line) from None
            value = value if isinstance(value, RatFunc) else RatFunc.const(value, spec.base)
            if not value.denominator.is_constant():
                raise SemanticError(f"radicand of {d.name} is not a polynomial", d.line)
            poly = value.numerator * (1 / value.denominator.leading_coefficient())
            if poly.is_zero() or poly.is_constant():
                raise SemanticError(f"radicand of {d.name} is constant", d.line)
            core, cof = squarefree_part(poly)
            if not cof.is_constant():
                raise SemanticError(f"radicand of {d.name} is not squarefree", d.line)
            radicands.append(core)
            scales.append(cof.leading_coefficient())
            base_env[d.name] = None  # generators are unavailable in the base field
        elif d.kind in ("let", "square"):
            try:
                value = evaluate(d.expr, base_env)
            except (EvaluationError, TypeError):
                continue
            base_env[d.name] = value if d.kind == "let" else SquareOnly(d.name, value)
    try:
        tower = TowerPresentation(spec.base, radicands, [d.name for d in roots])
    except TowerError as exc:
        raise SemanticError(str(exc)) from None
    env: dict = {spec.base: tower.variable()}
    gi = 0
    for d in spec.decls:
        try:
            if d.kind == "root":
                env[d.name] = tower.generator(gi) * scales[gi]
                gi += 1
            elif d.kind == "let":
                env[d.name] = _as_field(evaluate(d.expr, env), tower)
            elif d.kind == "square":
                env[d.name] = SquareOnly(d.name, _as_field(evaluate(d.expr, env), tower))
        except EvaluationError as exc:
            raise SemanticError(f"{d.name}: {exc}", d.line) from None
        except ZeroDivisionError:
            raise SemanticError(f"{d.name}: division by zero", d.line) from None
    try:
        t = _as_field(evaluate(spec.t, env), tower)
    except EvaluationError as exc:
        raise SemanticError(f"t: {exc}") from None
    return BuiltTower(spec, tower, env, t)


# ---------------------------------------------------------------- serializer

def _fmt_decl(d: Decl) -> str:
    return f"{d.kind} {d.name}: {format_expression(d.expr)}"


def serialize_tower(spec: TowerSpec, include_name: bool = True) -> str:
    out = []
    if include_name:
        out.append(f"tower: {spec.name}")
    out.append(f"base: {spec.base}")
    out.extend(_fmt_decl(d) for d in spec.decls)
    out.append(f"t: {format_expression(spec.t)}")
    if spec.degree is not None:
        out.append(f"degree: {spec.degree}")
    if spec.genus is not None:
        out.append(f"genus: {spec.genus}")
    out.extend(f"tower-note: {n}" for n in spec.notes)
    for m in spec.models:
        out.append(f"model {m.name}: {' '.join((m.kind,) + m.variables)}")
        out.extend("  " + _fmt_decl(d) for d in m.decls)
        if m.equation is not None:
            out.append(f"  equation: {format_expression(m.equation)}")
        out.extend(f"  note: {n}" for n in m.notes)
    return "\n".join(out) + "\n"


def _fmt_theta(theta: ThetaParams) -> str:
    return " ".join(str(x) for x in theta.as_tuple())


def serialize_record(record: SolutionRecord, inline_tower: bool = True) -> str:
    """Canonical text; with ``inline_tower`` the output parses without a tower table."""
    out = [f"record: {record.id}"]
    if inline_tower:
        out.append(f"tower: {record.tower.name}")
        out.append(serialize_tower(record.tower, include_name=False).rstrip("\n"))
    else:
        out.append(f"tower: {record.tower.name}")
    out.append(f"y: {format_expression(record.y)}")
    out.append(f"theta: {_fmt_theta(record.theta)}")
    out.append(f"theta-source: {record.theta_source}")
    if record.sibling:
        out.append(f"sibling: {record.sibling}")
    if record.derived_from:
        out.append(f"derived-from: {record.derived_from}")
    out.extend(f"note: {n}" for n in record.notes)
    return "\n".join(out) + "\n"


def record_to_dict(record: SolutionRecord) -> dict:
    """Structured export for downstream tooling."""
    return {
        "id": record.id,
        "tower": record.tower.name,
        "base": record.tower.base,
        "roots": {d.name: format_expression(d.expr) for d in record.tower.decls if d.kind == "root"},
        "y": format_expression(record.y),
        "t": format_expression(record.t),
        "theta": [str(x) for x in record.theta.as_tuple()],
        "theta_source": record.theta_source,
        "expected_genus": record.expected_genus,
        "expected_degree": record.expected_degree,
        "sibling": record.sibling,
        "derived_from": record.derived_from,
        "models": [m.name for m in record.tower.models],
    }


def build_tower_map(spec: ModelSpec, built: BuiltTower) -> TowerMap:
    """Materialize a hyperelliptic model as a homomorphism from the record's tower."""
    if spec.kind != "hyperelliptic":
        raise ValueError("not a hyperelliptic model")
    var = spec.variables[0]
    inner = TowerSpec(spec.name, var, tuple(d for d in spec.decls if d.kind != "map"),
                      t=parse_expression(var))
    dst = inner.build()
    env = dict(dst.env)
    images = {}
    for d in spec.decls:
        if d.kind == "map":
            images[d.name] = _as_field(evaluate(d.expr, env), dst.tower)
            env[d.name] = images[d.name]
    src = built.tower
    needed = [src.var] + list(src.names)
    missing = [n for n in needed if n not in images]
    if missing:
        raise SemanticError(f"model {spec.name} does not map {', '.join(missing)}")
    return TowerMap(src, dst.tower, images[src.var], [images[n] for n in src.names])
