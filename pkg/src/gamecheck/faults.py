"""Fault seeding over game description text.

Each operator edits the InteractionSet of a description and re-parses the
result, so every mutant is syntactically valid.  Fault ids embed the
operator and the source line they touch, which keeps bug deduplication
stable across runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .vgdl import parse_description

FAULTS_VERSION = 1

REMOVE_RULE = "RemoveRule"
SWAP_SPRITE_ORDER = "SwapSpriteOrder"
RENAME_SPRITE = "RenameSpriteInRule"
ADD_FALLACIOUS_RULE = "AddFallaciousRule"
OPERATORS = (REMOVE_RULE, SWAP_SPRITE_ORDER, RENAME_SPRITE, ADD_FALLACIOUS_RULE)


class FaultError(ValueError):
    pass


@dataclass(frozen=True)
class FaultSpec:
    op: str
    rule: str
    old: str | None = None  # RenameSpriteInRule only
    new: str | None = None
    witness: str | None = None  # frozen killing trajectory, if any
    witness_level: int = 0


def load_faults(data: dict) -> list[FaultSpec]:
    if data.get("version") != FAULTS_VERSION:
        raise FaultError(f"unsupported faults version {data.get('version')!r}")
    specs = []
    for row in data["faults"]:
        if row["op"] not in OPERATORS:
            raise FaultError(f"unknown operator {row['op']!r}")
        specs.append(
            FaultSpec(
                row["op"], row["rule"], row.get("old"), row.get("new"),
                row.get("witness"), row.get("witness_level", 0),
            )
        )
    return specs


def _rule_lines(lines) -> tuple[int, int]:
    """Return the (start, end) line index range of the InteractionSet body."""
    start = end = None
    for i, line in enumerate(lines):
        stripped = line.strip()
        if stripped == "InteractionSet":
            start = i + 1
        elif start is not None and stripped and not line[0].isspace():
            end = i
            break
    if start is None:
        raise FaultError("no InteractionSet section")
    return start, end if end is not None else len(lines)


def _locate(lines, rule: str) -> int:
    start, end = _rule_lines(lines)
    for i in range(start, end):
        if lines[i].strip() == rule:
            return i
    raise FaultError(f"rule not found: {rule!r}")


def fault_id(spec: FaultSpec, text: str) -> str:
    lines = text.splitlines()
    if spec.op == ADD_FALLACIOUS_RULE:
        return f"{spec.op}+{spec.rule}"
    line = _locate(lines, spec.rule)
    suffix = f":{spec.old}->{spec.new}" if spec.op == RENAME_SPRITE else ""
    return f"{spec.op}@L{line + 1}{suffix}"


def apply_fault(text: str, spec: FaultSpec) -> str:
    lines = text.splitlines()
    if spec.op == REMOVE_RULE:
        del lines[_locate(lines, spec.rule)]
    elif spec.op == SWAP_SPRITE_ORDER:
        i = _locate(lines, spec.rule)
        lhs, rhs = spec.rule.split(">", 1)
        tokens = lhs.split()
        if len(tokens) < 2:
            raise FaultError(f"rule has a single sprite: {spec.rule!r}")
        tokens[0], tokens[1] = tokens[1], tokens[0]
        indent = lines[i][: len(lines[i]) - len(lines[i].lstrip())]
        lines[i] = f"{indent}{' '.join(tokens)} >{rhs}"
    elif spec.op == RENAME_SPRITE:
        i = _locate(lines, spec.rule)
        lhs, rhs = spec.rule.split(">", 1)
        tokens = lhs.split()
        if spec.old not in tokens:
            raise FaultError(f"sprite {spec.old!r} not in rule {spec.rule!r}")
        tokens[tokens.index(spec.old)] = spec.new
        indent = lines[i][: len(lines[i]) - len(lines[i].lstrip())]
        lines[i] = f"{indent}{' '.join(tokens)} >{rhs}"
    elif spec.op == ADD_FALLACIOUS_RULE:
        start, end = _rule_lines(lines)
        indent = lines[start][: len(lines[start]) - len(lines[start].lstrip())]
        lines.insert(end, f"{indent}{spec.rule}")
    else:
        raise FaultError(f"unknown operator {spec.op!r}")
    mutated = "\n".join(lines) + "\n"
    parse_description(mutated)  # mutants must stay parseable
    return mutated


@dataclass(frozen=True)
class Mutant:
    fault_id: str
    spec: FaultSpec
    description: str


def seed_faults(text: str, specs) -> list[Mutant]:
    mutants = []
    seen = set()
    for spec in specs:
        fid = fault_id(spec, text)
        if fid in seen:
            raise FaultError(f"duplicate fault id {fid!r}")
        seen.add(fid)
        mutants.append(Mutant(fid, spec, apply_fault(text, spec)))
    return mutants


@dataclass(frozen=True)
class BugReport:
    fault_id: str
    constraint_id: str
    tick: int
    detail: str


def dedupe_bugs(reports) -> list[str]:
    """Collapse reports of the same seeded fault to one bug."""
    return sorted({r.fault_id for r in reports})


def detection_rate(found_fault_ids, total_faults: int) -> float:
    if total_faults == 0:
        return 0.0
    return len(set(found_fault_ids)) / total_faults
