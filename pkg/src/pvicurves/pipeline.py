"""Chains of folded quadratic transforms checked against catalog records."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .catalog.records import SolutionRecord, build_tower_map
from .curves.invariants import degree_of_map
from .field import TowerError
from .pvi import PviSolution, pvi_residual, theta_equivalent_up_to_signs
from .transforms import (SYMMETRIES, SeedForm, ShapeError, apply_mobius, folded_quadratic_transform,
                         recover_seed, same_up_to_sign_flips, to_seed_form)

SIBLING_PREFIX = "sibling:"

# theta-preserving relabellings tried after plain sign flips fail
RELABELLINGS = ("(t/y,t)", "((y-t)/(y-1),t)", "(1-y,1-t)", "(y(t-1)/(t-y),1-t)")

DEFAULT_CHAINS = (
    ("seed-10", "sol-45", "sol-51"),
    ("sibling:seed-10", "sol-44", "sol-50"),
    ("seed-15", "sol-47"),
    ("sibling:seed-15", "sol-48"),
    ("seed-18", "sol-49", "sol-52"),
)


class PipelineError(ValueError):
    """Bad chain: unknown id or a first element that is not in seed form."""


@dataclass
class Match:
    mask: int
    relabelling: str | None = None

    def to_dict(self) -> dict:
        return {"sign_flip_mask": self.mask, "relabelling": self.relabelling}


@dataclass
class PipelineStep:
    source: str
    target: str
    theta: str
    expected_theta: str
    theta_ok: bool
    residual_zero: bool
    degree_in: int
    degree_out: int
    match: Match | None
    via_model: str | None
    seconds: float

    @property
    def ok(self) -> bool:
        return self.theta_ok and self.residual_zero and self.match is not None \
            and self.degree_out == 2 * self.degree_in

    def to_dict(self) -> dict:
        return {
            "source": self.source, "target": self.target, "ok": self.ok,
            "theta": self.theta, "expected_theta": self.expected_theta,
            "residual_zero": self.residual_zero,
            "degree_in": self.degree_in, "degree_out": self.degree_out,
            "match": self.match.to_dict() if self.match else None,
            "via_model": self.via_model, "seconds": round(self.seconds, 3),
        }


@dataclass
class PipelineReport:
    chain: tuple[str, ...]
    steps: list[PipelineStep] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.steps) and all(s.ok for s in self.steps) and len(self.steps) == len(self.chain) - 1

    def to_dict(self) -> dict:
        return {"chain": list(self.chain), "ok": self.ok, "steps": [s.to_dict() for s in self.steps]}


def seed_form_of(record: SolutionRecord) -> tuple[SeedForm, str | None]:
    """Seed form of a record, going through a hyperelliptic model when the
    record's own tower has two radicands."""
    sol = record.solution
    if sol.tower.depth == 1:
        return to_seed_form(sol), None
    last: Exception | None = None
    for spec in record.models:
        if spec.kind != "hyperelliptic":
            continue
        fmap = build_tower_map(spec, record.built)
        image = PviSolution(fmap.dst, fmap(sol.y), fmap(sol.t), sol.theta, record.id)
        try:
            return to_seed_form(image), spec.name
        except ShapeError as exc:
            last = exc
    raise ShapeError(f"{record.id}: no seed form on the tower or its hyperelliptic models"
                     + (f" ({last})" if last else ""))


def match_solution(candidate: PviSolution, target: PviSolution, relabel: bool = True) -> Match | None:
    """Sign flips first; if none matches, a theta-preserving fractional-linear
    relabelling of the candidate followed by sign flips."""
    mask = same_up_to_sign_flips(candidate, target)
    if mask is not None:
        return Match(mask)
    if not relabel:
        return None
    for label in RELABELLINGS:
        sym = SYMMETRIES[label]
        if not theta_equivalent_up_to_signs(sym.theta(candidate.theta), target.theta):
            continue
        moved = apply_mobius(sym, candidate)
        mask = same_up_to_sign_flips(moved, target)
        if mask is not None:
            return Match(mask, label)
    return None


def _degree(sol: PviSolution) -> int:
    return degree_of_map(sol.tower, sol.t)


def run_pipeline(chain: Sequence[str], catalog: Mapping[str, SolutionRecord],
                 relabel: bool = True) -> PipelineReport:
    chain = tuple(chain)
    if len(chain) < 2:
        raise PipelineError("a chain needs at least two ids")
    for rid in chain:
        key = rid[len(SIBLING_PREFIX):] if rid.startswith(SIBLING_PREFIX) else rid
        if key not in catalog:
            raise PipelineError(f"unknown record {key!r}")
    first = chain[0]
    report = PipelineReport(chain)
    if first.startswith(SIBLING_PREFIX):
        parent = catalog[first[len(SIBLING_PREFIX):]]
        seed = recover_seed(catalog[chain[1]].solution, parent.solution)
        via = None
        if not pvi_residual(seed.solution(first)).is_zero:
            raise ShapeError(f"{first}: recovered seed does not solve PVI")
    else:
        rec = catalog[first]
        if rec.solution.tower.depth != 1:
            raise ShapeError(f"{first}: tower shape: a chain must start from a one-radicand seed")
        seed, via = seed_form_of(rec)
    degree_in = _degree(seed.solution())
    for src, dst in zip(chain, chain[1:]):
        t0 = time.perf_counter()
        target = catalog[dst]
        out = folded_quadratic_transform(seed).solution
        m = match_solution(out, target.solution, relabel)
        step = PipelineStep(
            source=src, target=dst, theta=str(out.theta), expected_theta=str(target.theta),
            theta_ok=out.theta == target.theta,
            residual_zero=pvi_residual(out).is_zero,
            degree_in=degree_in, degree_out=_degree(out), match=m, via_model=via,
            seconds=time.perf_counter() - t0)
        report.steps.append(step)
        if not step.ok:
            break
        degree_in = step.degree_out
        if dst != chain[-1]:
            try:
                seed, via = seed_form_of(target)
            except (ShapeError, TowerError) as exc:
                raise ShapeError(f"{dst}: cannot continue the chain: {exc}") from exc
    return report
