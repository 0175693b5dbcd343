"""Malformed scenario fixtures and the error class each must raise.

Each entry is ``(name, text, error class, JSON pointer of the first error)``.
All fixtures start from ``minimal_doc()``, which loads cleanly, and break
exactly one rule.
"""
import copy
import json

from gridforecast import errors


def state(x=0.0, y=0.0, **extra):
    d = {"x": x, "y": y, "valid": True, "vx": 0.0, "vy": 0.0, "speed": 0.0,
         "width": 2.0, "length": 4.5, "yaw": 0.0, "velocity_yaw": 0.0, "agent_type": 1}
    d.update(extra)
    return d


def minimal_doc():
    """One track, no polylines, one target."""
    return {"timestep_s": 0.1, "history_len": 11, "future_len": 80,
            "tracks": [{"id": 0, "states": [state() for _ in range(11)]}],
            "map": [], "targets": [0]}


def _broken(edit):
    doc = minimal_doc()
    edit(doc)
    return json.dumps(doc)


def _many_tracks(doc):
    doc["tracks"] = [{"id": i, "states": copy.deepcopy(doc["tracks"][0]["states"])}
                     for i in range(129)]


def _duplicate(doc):
    doc["tracks"].append(copy.deepcopy(doc["tracks"][0]))


MALFORMED = [
    ("truncated_json", json.dumps(minimal_doc())[:-7], errors.ScenarioParseError, ""),
    ("missing_tracks", _broken(lambda d: d.pop("tracks")), errors.ScenarioSchemaError, ""),
    ("history_len_10", _broken(lambda d: d.update(history_len=10)),
     errors.HistoryLengthError, "/history_len"),
    ("timestep_0.2", _broken(lambda d: d.update(timestep_s=0.2)),
     errors.TimestepError, "/timestep_s"),
    ("129_tracks", _broken(_many_tracks), errors.TooManyAgentsError, "/tracks"),
    ("duplicate_track_id", _broken(_duplicate), errors.DuplicateTrackError, "/tracks/1/id"),
    ("unknown_target", _broken(lambda d: d.update(targets=[5])),
     errors.UnknownTargetError, "/targets/0"),
    ("ten_history_states", _broken(lambda d: d["tracks"][0]["states"].pop()),
     errors.HistoryLengthError, "/tracks/0/states"),
    ("one_point_polyline", _broken(lambda d: d["map"].append(
        {"category": "lane_center", "points": [[0, 0]]})), errors.PolylineError, "/map/0/points"),
    ("inconsistent_speed", _broken(lambda d: d["tracks"][0]["states"].__setitem__(
        3, state(vx=3.0, vy=4.0, speed=7.0))), errors.AgentStateError, "/tracks/0/states/3/speed"),
]
