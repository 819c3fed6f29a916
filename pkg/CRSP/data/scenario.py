"""Scenario files: incoming ball, objective, and model overrides.

A scenario is a JSON document. Only `incoming` and `cost.target` are
required; every other section is merged over the defaults of its record.

    {
      "name": "case1",
      "seed": 7,
      "tolerance": 0.05,
      "incoming": {"pos": [-0.2, -0.4, 0.0],
                   "vel": [0.5, -5.0, 4.0],
                   "spin": [10.0, 10.0, 10.0]},
      "cost": {"target": [-0.3, 1.0],
               "terms": [{"kind": "landing_speed_bonus", "weight": 0.5}]},
      "physics": {"k_m": 0.01},
      "table": {},
      "workspace": {},
      "pso": {"swarm_size": 10, "iterations": 20}
    }
"""

# License: MIT

import json
import os
from typing import NamedTuple

from CRSP.data.data_class import (
    BallState,
    CostSpec,
    PhysicsParams,
    SecondaryTerm,
    TableGeometry,
    Workspace,
)
from CRSP.exceptions import ScenarioParseError, ValidationError
from CRSP.models.optim.pso import PsoConfig

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "scenarios")


class Scenario(NamedTuple):
    name: str
    incoming: BallState
    cost_spec: CostSpec
    physics: PhysicsParams = PhysicsParams()
    table: TableGeometry = TableGeometry()
    workspace: Workspace = Workspace()
    pso: PsoConfig = PsoConfig()
    seed: int = 0
    tolerance: float = 0.05
    description: str = ""


def bundled_scenarios():
    """Names of the scenarios shipped with the package."""
    return sorted(
        os.path.splitext(f)[0]
        for f in os.listdir(SCENARIO_DIR)
        if f.endswith(".json")
    )


def resolve_path(path):
    """Map a bundled scenario name to its file, leave real paths alone."""
    if os.path.exists(path):
        return path
    candidate = os.path.join(SCENARIO_DIR, f"{path}.json")
    if os.path.exists(candidate):
        return candidate
    return path


def _override(record, values, prefix):
    if values is None:
        return record
    if not isinstance(values, dict):
        raise ValidationError(prefix, "must be an object")
    unknown = set(values) - set(record._fields)
    if unknown:
        raise ValidationError(
            f"{prefix}.{sorted(unknown)[0]}", "unknown field"
        )
    merged = {}
    for key, value in values.items():
        default = getattr(record, key)
        if isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        elif isinstance(default, float) and isinstance(value, int):
            value = float(value)
        merged[key] = value
    return record._replace(**merged)


def _vector(values, field):
    if not isinstance(values, (list, tuple)) or len(values) != 3:
        raise ValidationError(field, "must be a list of three numbers")
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ValidationError(field, "must be a list of three numbers")


def scenario_from_dict(doc, name=None):
    """Build and validate a Scenario from its JSON document."""
    if not isinstance(doc, dict):
        raise ValidationError("scenario", "must be an object")
    if "incoming" not in doc:
        raise ValidationError("incoming", "missing")
    incoming_doc = doc["incoming"]
    if not isinstance(incoming_doc, dict):
        raise ValidationError("incoming", "must be an object")
    incoming = BallState.create(
        pos=_vector(incoming_doc.get("pos"), "incoming.pos"),
        vel=_vector(incoming_doc.get("vel"), "incoming.vel"),
        spin=_vector(incoming_doc.get("spin", [0, 0, 0]), "incoming.spin"),
        t=float(incoming_doc.get("t", 0.0)),
    )
    if not incoming.is_finite():
        raise ValidationError("incoming", "all values must be finite")
    if incoming.pos.z < 0:
        raise ValidationError("incoming.pos", "z must be >= 0")

    cost_doc = doc.get("cost")
    if not isinstance(cost_doc, dict) or "target" not in cost_doc:
        raise ValidationError("cost.target", "missing")
    terms = []
    for i, term in enumerate(cost_doc.get("terms", [])):
        if not isinstance(term, dict) or "kind" not in term:
            raise ValidationError(f"cost.terms[{i}]", "must have a kind")
        terms.append(
            SecondaryTerm(
                kind=term["kind"],
                weight=float(term.get("weight", 1.0)),
                weight2=float(term.get("weight2", 0.0)),
            )
        )
    target = cost_doc["target"]
    if not isinstance(target, (list, tuple)) or len(target) != 2:
        raise ValidationError("cost.target", "must be a list of two numbers")
    cost_spec = CostSpec(
        target=(float(target[0]), float(target[1])), terms=tuple(terms)
    ).validate("cost")

    physics = _override(PhysicsParams(), doc.get("physics"), "physics")
    physics.validate("physics")

    table_doc = dict(doc.get("table") or {})
    table_doc.setdefault("net_height", physics.net_height)
    table = _override(TableGeometry(), table_doc, "table").validate("table")
    workspace = _override(
        Workspace.from_table(table), doc.get("workspace"), "workspace"
    ).validate("workspace")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0 or seed >= 2**64:
        raise ValidationError("seed", "seed must be an integer in [0, 2^64)")
    pso = _override(PsoConfig(), doc.get("pso"), "pso")
    pso = pso._replace(seed=seed).validate("pso")

    tolerance = float(doc.get("tolerance", 0.05))
    if not tolerance > 0:
        raise ValidationError("tolerance", "tolerance must be > 0")

    return Scenario(
        name=str(doc.get("name", name or "scenario")),
        incoming=incoming,
        cost_spec=cost_spec,
        physics=physics,
        table=table,
        workspace=workspace,
        pso=pso,
        seed=seed,
        tolerance=tolerance,
        description=str(doc.get("description", "")),
    )


def load_scenario(path):
    """Load a scenario file, or a bundled scenario by name.

    Raises:
        ScenarioParseError: file missing or malformed, with line/column
        ValidationError: a value violates its constraint, with field path
    """
    path = resolve_path(path)
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as err:
        raise ScenarioParseError(path, str(err))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioParseError(path, err.msg, err.lineno, err.colno)
    name = os.path.splitext(os.path.basename(path))[0]
    return scenario_from_dict(doc, name=name)


def scenario_to_dict(scenario):
    """Canonical JSON document of a scenario, every field explicit."""
    incoming = scenario.incoming
    return {
        "name": scenario.name,
        "description": scenario.description,
        "seed": scenario.seed,
        "tolerance": scenario.tolerance,
        "incoming": {
            "t": incoming.t,
            "pos": list(incoming.pos),
            "vel": list(incoming.vel),
            "spin": list(incoming.spin),
        },
        "cost": {
            "target": list(scenario.cost_spec.target),
            "terms": [t._asdict() for t in scenario.cost_spec.terms],
        },
        "physics": scenario.physics._asdict(),
        "table": scenario.table._asdict(),
        "workspace": {
            k: list(v) for k, v in scenario.workspace._asdict().items()
        },
        "pso": {
            k: ([list(b) for b in v] if k == "bounds" and v is not None else v)
            for k, v in scenario.pso._asdict().items()
            if k != "seed"
        },
    }


def dump_scenario(scenario, path):
    with open(path, "w") as f:
        json.dump(scenario_to_dict(scenario), f, indent=4)
