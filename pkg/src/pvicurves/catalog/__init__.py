"""Catalog of solution records shipped with the package."""
from __future__ import annotations

from pathlib import Path

from .grammar import EvaluationError, ParseError, format_expression, parse_expression
from .records import (SemanticError, SolutionRecord, TowerSpec, parse_record, parse_tower,
                      record_to_dict, serialize_record, serialize_tower)

DATA_DIR = Path(__file__).parent / "data"

RECORD_ORDER = ("seed-10", "sol-45", "sol-44", "sol-51", "sol-50", "seed-15", "sol-47", "sol-48",
                "seed-18", "sol-49", "sol-52")


def load_towers(directory: Path | str | None = None) -> dict[str, TowerSpec]:
    base = Path(directory) if directory is not None else DATA_DIR
    towers = {}
    for path in sorted((base / "towers").glob("*.tower")):
        spec = parse_tower(path.read_text(encoding="utf-8"))
        towers[spec.name] = spec
    return towers


def load_catalog(directory: Path | str | None = None, validate: bool = True) -> dict[str, SolutionRecord]:
    """All records keyed by id, in the canonical order where known."""
    base = Path(directory) if directory is not None else DATA_DIR
    towers = load_towers(base)
    records = {}
    for path in sorted((base / "records").glob("*.rec")):
        rec = parse_record(path.read_text(encoding="utf-8"), towers, validate=validate)
        records[rec.id] = rec
    order = {rid: i for i, rid in enumerate(RECORD_ORDER)}
    return dict(sorted(records.items(), key=lambda kv: (order.get(kv[0], len(order)), kv[0])))


__all__ = [
    "DATA_DIR", "RECORD_ORDER", "EvaluationError", "ParseError", "SemanticError", "SolutionRecord",
    "TowerSpec", "format_expression", "load_catalog", "load_towers", "parse_expression",
    "parse_record", "parse_tower", "record_to_dict", "serialize_record", "serialize_tower",
]
