"""Scenario files: TOML descriptions of a group, module, space and task list."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .errors import ScenarioParseError, ScenarioValidationError
from .exact_linalg import ZZ, IntMatrix, Ring, Zmod
from .groupcoh import FiniteGroup, GModule
from .gspace import SimplicialGComplex
from .swan import SwanScenario

KNOWN_TASKS = ("swan_pages", "compare", "group_cohomology", "borel", "bisubdiv_demo")


@dataclass
class Scenario:
    """Validated scenario: the Swan data plus task list and task options."""

    swan: SwanScenario
    tasks: List[str]
    borel_n_max: int
    ring_name: str
    options: Dict[str, dict] = field(default_factory=dict)
    label: str = "scenario"

    @property
    def group(self) -> FiniteGroup:
        return self.swan.group


def _matrix_from_spec(obj, ring: Ring, what: str) -> IntMatrix:
    """Matrices are encoded as {rows, cols, entries} with row-major entries."""
    if not isinstance(obj, dict) or not {"rows", "cols", "entries"} <= set(obj):
        raise ScenarioValidationError(f"{what}: matrices need rows/cols/entries fields")
    r, c, entries = obj["rows"], obj["cols"], obj["entries"]
    if not isinstance(entries, list) or len(entries) != r * c:
        raise ScenarioValidationError(
            f"{what}: expected {r}*{c} = {r * c} entries, got {len(entries)}")
    rows = [entries[i * c:(i + 1) * c] for i in range(r)]
    return IntMatrix(rows, ring=ring, shape=(r, c))


def parse_scenario_text(text: str, label: str = "scenario") -> Scenario:
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ScenarioParseError(f"TOML parse error: {exc}")
    return _build(doc, label)


def parse_scenario_file(path: str) -> Scenario:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}")
    return parse_scenario_text(data.decode("utf-8"), label=path)


def _build(doc: dict, label: str) -> Scenario:
    ring_name = doc.get("ring", "Z")
    if ring_name == "Z":
        ring = ZZ
    elif isinstance(ring_name, str) and ring_name.startswith("Z/"):
        try:
            ring = Zmod(int(ring_name[2:]))
        except ValueError as exc:
            raise ScenarioValidationError(f"bad ring {ring_name!r}: {exc}")
    else:
        raise ScenarioValidationError(f"ring must be 'Z' or 'Z/m', got {ring_name!r}")

    tasks = doc.get("tasks", [])
    if not isinstance(tasks, list) or any(t not in KNOWN_TASKS for t in tasks):
        bad = [t for t in tasks if t not in KNOWN_TASKS] if isinstance(tasks, list) else tasks
        raise ScenarioValidationError(f"unknown tasks {bad}; known: {KNOWN_TASKS}")

    gsec = doc.get("group")
    if not isinstance(gsec, dict):
        raise ScenarioValidationError("missing [group] section")
    try:
        if "cyclic" in gsec:
            group = FiniteGroup.cyclic(int(gsec["cyclic"]))
        elif "table" in gsec:
            group = FiniteGroup(gsec["table"])
        else:
            raise ScenarioValidationError("[group] needs 'cyclic = n' or 'table = [[...]]'")
    except ValueError as exc:
        raise ScenarioValidationError(f"invalid group: {exc}")

    msec = doc.get("module", {"rank": 1})
    rank = int(msec.get("rank", 1))
    generators = [int(g) for g in msec.get("generators", [])]
    if any(not (0 <= g < group.order) for g in generators):
        raise ScenarioValidationError("[module] generators must be group element indices")
    mats = [_matrix_from_spec(m, ring, "[module] action") for m in msec.get("actions", [])]
    if len(mats) != len(generators):
        raise ScenarioValidationError("[module] needs one action matrix per generator")
    for m in mats:
        if m.shape != (rank, rank):
            raise ScenarioValidationError(
                f"[module] action matrices must be {rank}x{rank}, got {m.shape}")
    relations = None
    if "relations" in msec:
        relations = _matrix_from_spec(msec["relations"], ZZ, "[module] relations")
        if relations.rows != rank:
            raise ScenarioValidationError("[module] relations need one row per generator")
    try:
        module = GModule.from_generator_actions(group, rank, generators, mats,
                                                relations=relations, ring=ring)
    except ValueError as exc:
        raise ScenarioValidationError(f"invalid module action: {exc}")

    ssec = doc.get("space")
    if not isinstance(ssec, dict):
        raise ScenarioValidationError("missing [space] section")
    nverts = int(ssec.get("vertices", 0))
    simplices = ssec.get("simplices", [])
    sgens = [int(g) for g in ssec.get("generators", [])]
    sperms = [list(map(int, p)) for p in ssec.get("actions", [])]
    if len(sgens) != len(sperms):
        raise ScenarioValidationError("[space] needs one vertex permutation per generator")
    grade = ssec.get("grade")
    try:
        space = SimplicialGComplex.from_generator_actions(
            nverts, simplices, group, sgens, sperms, vertex_grade=grade)
    except ValueError as exc:
        raise ScenarioValidationError(f"invalid space: {exc}")

    tsec = doc.get("truncation", {})
    p_max = int(tsec.get("p_max", 4))
    q_max = int(tsec.get("q_max", 4))
    borel_n_max = int(tsec.get("borel_n_max", 4))
    kind = doc.get("resolution", "bar")
    swan = SwanScenario(group, space, module, p_max, q_max, kind)

    options = {t: doc.get(t, {}) for t in KNOWN_TASKS if isinstance(doc.get(t, {}), dict)}
    return Scenario(swan=swan, tasks=list(tasks), borel_n_max=borel_n_max,
                    ring_name=str(ring_name), options=options, label=label)
