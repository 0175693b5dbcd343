"""Scenario JSON reading, validation and writing.

A file holds either one scenario document or ``{"scenarios": [doc, ...]}``.
Validation collects every problem; loaders raise the first one, with the
full list attached as ``report``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema

from gridforecast import errors
from gridforecast.scenario import (FUTURE_LEN, HISTORY_LEN, MAP_CATEGORIES, MAX_AGENTS,
                                   TIMESTEP_S, AgentState, AgentTrack, AgentType, MapPolyline,
                                   Scenario)

_NUM = {"type": "number"}
_STATE = {
    "type": "object",
    "required": ["valid"],
    "properties": {
        "x": _NUM, "y": _NUM, "valid": {"type": "boolean"},
        "vx": _NUM, "vy": _NUM, "speed": _NUM, "width": _NUM, "length": _NUM,
        "yaw": _NUM, "velocity_yaw": _NUM, "agent_type": {"type": "integer"},
    },
}
SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["timestep_s", "history_len", "future_len", "tracks", "map", "targets"],
    "properties": {
        "scenario_id": {"type": "string"},
        "timestep_s": _NUM,
        "history_len": {"type": "integer"},
        "future_len": {"type": "integer"},
        "tracks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "states"],
                "properties": {
                    "id": {"type": "integer"},
                    "states": {"type": "array", "items": _STATE},
                    "future": {"type": "array", "items": _STATE},
                },
            },
        },
        "map": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["category", "points"],
                "properties": {
                    "category": {"type": "string"},
                    "points": {"type": "array",
                               "items": {"type": "array", "items": _NUM,
                                         "minItems": 2, "maxItems": 2}},
                },
            },
        },
        "targets": {"type": "array", "items": {"type": "integer"}},
    },
}
_validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)

SPEED_TOLERANCE = 1e-4


def _ptr(*parts) -> str:
    return "".join(f"/{p}" for p in parts)


def _check_state(st: dict, where: str, out: list) -> None:
    if not st["valid"]:
        return
    for key in ("x", "y"):
        if key not in st:
            out.append(errors.AgentStateError(f"valid state is missing {key!r}", where))
    if st.get("width", 0.0) < 0 or st.get("length", 0.0) < 0:
        out.append(errors.AgentStateError("negative agent extent", where))
    if "speed" in st:
        expect = math.hypot(st.get("vx", 0.0), st.get("vy", 0.0))
        if abs(st["speed"] - expect) > SPEED_TOLERANCE:
            out.append(errors.AgentStateError(
                f"speed {st['speed']} inconsistent with |(vx, vy)| = {expect:.6g}", where + "/speed"))
    if st.get("agent_type", 1) not in tuple(AgentType):
        out.append(errors.AgentStateError(f"unknown agent_type {st['agent_type']}",
                                          where + "/agent_type"))


def validate_scenario_dict(doc, prefix: str = "") -> list[errors.ScenarioError]:
    """All problems with a scenario document, in document order."""
    schema_errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if schema_errors:
        return [errors.ScenarioSchemaError(e.message, prefix + _ptr(*e.absolute_path))
                for e in schema_errors]
    out: list[errors.ScenarioError] = []
    if abs(doc["timestep_s"] - TIMESTEP_S) > 1e-9:
        out.append(errors.TimestepError(f"timestep_s must be {TIMESTEP_S}, got {doc['timestep_s']}",
                                        prefix + "/timestep_s"))
    if doc["history_len"] != HISTORY_LEN:
        out.append(errors.HistoryLengthError(
            f"history_len must be {HISTORY_LEN}, got {doc['history_len']}", prefix + "/history_len"))
    if doc["future_len"] < 0:
        out.append(errors.FutureLengthError("future_len must be >= 0", prefix + "/future_len"))
    tracks = doc["tracks"]
    if len(tracks) > MAX_AGENTS:
        out.append(errors.TooManyAgentsError(
            f"{len(tracks)} tracks exceed the maximum of {MAX_AGENTS}", prefix + "/tracks"))
    seen: set[int] = set()
    for i, tr in enumerate(tracks):
        where = prefix + _ptr("tracks", i)
        if tr["id"] in seen:
            out.append(errors.DuplicateTrackError(f"duplicate track id {tr['id']}", where + "/id"))
        seen.add(tr["id"])
        if len(tr["states"]) != HISTORY_LEN:
            out.append(errors.HistoryLengthError(
                f"{len(tr['states'])} history states, expected {HISTORY_LEN}", where + "/states"))
        future = tr.get("future", [])
        if future and len(future) != doc["future_len"]:
            out.append(errors.FutureLengthError(
                f"{len(future)} future states, expected {doc['future_len']}", where + "/future"))
        for j, st in enumerate(tr["states"]):
            _check_state(st, where + _ptr("states", j), out)
        for j, st in enumerate(future):
            _check_state(st, where + _ptr("future", j), out)
    for i, line in enumerate(doc["map"]):
        where = prefix + _ptr("map", i)
        if line["category"] not in MAP_CATEGORIES:
            out.append(errors.PolylineError(f"unknown category {line['category']!r}",
                                            where + "/category"))
        if len(line["points"]) < 2:
            out.append(errors.PolylineError("polyline needs at least 2 points", where + "/points"))
    for i, tid in enumerate(doc["targets"]):
        if tid not in seen:
            out.append(errors.UnknownTargetError(f"target {tid} is not a track id",
                                                 prefix + _ptr("targets", i)))
    return out


def _state(d: dict) -> AgentState:
    if not d["valid"]:
        return AgentState.invalid()
    return AgentState(
        float(d["x"]), float(d["y"]), True,
        float(d.get("vx", 0.0)), float(d.get("vy", 0.0)),
        float(d.get("speed", math.hypot(d.get("vx", 0.0), d.get("vy", 0.0)))),
        float(d.get("width", 0.0)), float(d.get("length", 0.0)),
        float(d.get("yaw", 0.0)), float(d.get("velocity_yaw", d.get("yaw", 0.0))),
        AgentType(d.get("agent_type", 1)),
    )


def scenario_from_dict(doc, prefix: str = "", default_id: str = "") -> Scenario:
    problems = validate_scenario_dict(doc, prefix)
    if problems:
        first = problems[0]
        first.report = problems
        raise first
    return Scenario(
        tracks=[AgentTrack(int(t["id"]), tuple(_state(s) for s in t["states"]),
                           tuple(_state(s) for s in t.get("future", [])))
                for t in doc["tracks"]],
        map=[MapPolyline(m["category"], m["points"]) for m in doc["map"]],
        targets=[int(t) for t in doc["targets"]],
        timestep_s=float(doc["timestep_s"]),
        history_len=int(doc["history_len"]),
        future_len=int(doc["future_len"]),
        scenario_id=str(doc.get("scenario_id", default_id)),
    )


def _parse(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise errors.ScenarioParseError(f"{source}: malformed JSON ({e.msg} at line {e.lineno})") from None


def scenarios_from_json(text: str, source: str = "<string>") -> list[Scenario]:
    doc = _parse(text, source)
    if isinstance(doc, dict) and "scenarios" in doc:
        if not isinstance(doc["scenarios"], list):
            raise errors.ScenarioSchemaError("'scenarios' must be a list", "/scenarios")
        return [scenario_from_dict(d, _ptr("scenarios", i), str(i))
                for i, d in enumerate(doc["scenarios"])]
    return [scenario_from_dict(doc, "", "0")]


def load_scenarios(path) -> list[Scenario]:
    return scenarios_from_json(Path(path).read_text(), str(path))


def load_scenario(path, index: int = 0) -> Scenario:
    scenarios = load_scenarios(path)
    if not 0 <= index < len(scenarios):
        raise errors.ScenarioSchemaError(f"scenario index {index} out of range ({len(scenarios)})")
    return scenarios[index]


def _state_dict(st: AgentState) -> dict:
    if not st.valid:
        return {"valid": False}
    return {
        "x": st.x, "y": st.y, "valid": True, "vx": st.vx, "vy": st.vy, "speed": st.speed,
        "width": st.width, "length": st.length, "yaw": st.yaw,
        "velocity_yaw": st.velocity_yaw, "agent_type": int(st.agent_type),
    }


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {
        "scenario_id": sc.scenario_id,
        "timestep_s": sc.timestep_s,
        "history_len": sc.history_len,
        "future_len": sc.future_len,
        "tracks": [],
        "map": [{"category": m.category, "points": m.points.tolist()} for m in sc.map],
        "targets": list(sc.targets),
    }
    for tr in sc.tracks:
        d = {"id": tr.id, "states": [_state_dict(s) for s in tr.states]}
        if tr.future:
            d["future"] = [_state_dict(s) for s in tr.future]
        doc["tracks"].append(d)
    return doc


def dumps_scenarios(scenarios: list[Scenario]) -> str:
    doc = {"scenarios": [scenario_to_dict(s) for s in scenarios]}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def save_scenarios(path, scenarios: list[Scenario]) -> None:
    Path(path).write_text(dumps_scenarios(scenarios))
