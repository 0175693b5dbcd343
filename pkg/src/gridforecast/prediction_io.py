"""Prediction file (JSON) reading and writing.

Format::

    {"predictions": [
        {"scenario_id": "0", "target_id": 3,
         "horizons": {"3": [{"x": .., "y": .., "confidence": .., "confidence_raw": ..}, ...],
                      "5": [...], "8": [...]}}]}
"""
from __future__ import annotations

import json
from pathlib import Path

from gridforecast.errors import PredictionFileError
from gridforecast.metrics import HORIZONS, MAX_PREDICTIONS, PredictionSet


def prediction_entry(target_id: int, scenario_id: str, samples_by_horizon: dict) -> dict:
    """File entry from ``{horizon: SampleSet}``."""
    return {
        "scenario_id": scenario_id,
        "target_id": target_id,
        "horizons": {f"{float(t):g}": s.to_dict()["samples"]
                     for t, s in sorted(samples_by_horizon.items())},
    }


def dumps_predictions(entries: list[dict]) -> str:
    return json.dumps({"predictions": entries}, separators=(",", ":")) + "\n"


def predictions_from_dict(doc, n: int | None = None, use_raw: bool = False) -> list[PredictionSet]:
    """Parse a prediction document.

    With ``n`` unset, more than six predictions per horizon is an error. With
    ``n`` set, only the first ``n`` predictions per horizon are kept (the
    file order is the greedy sampling order).
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("predictions"), list):
        raise PredictionFileError("expected an object with a 'predictions' list", "/predictions")
    cap = MAX_PREDICTIONS if n is None else int(n)
    conf_key = "confidence_raw" if use_raw else "confidence"
    out = []
    for i, entry in enumerate(doc["predictions"]):
        where = f"/predictions/{i}"
        try:
            horizons = {}
            for key, preds in entry["horizons"].items():
                t = float(key)
                if t not in HORIZONS:
                    raise PredictionFileError(f"unsupported horizon {key!r}", f"{where}/horizons/{key}")
                if n is None and len(preds) > cap:
                    raise PredictionFileError(f"{len(preds)} predictions exceed the limit of {cap}",
                                              f"{where}/horizons/{key}")
                horizons[t] = [(p["x"], p["y"], p.get(conf_key, p["confidence"]))
                               for p in preds[:cap]]
            out.append(PredictionSet(int(entry["target_id"]), horizons,
                                     str(entry.get("scenario_id", "")), max(cap, MAX_PREDICTIONS)))
        except PredictionFileError:
            raise
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise PredictionFileError(f"malformed prediction entry: {e}", where) from None
    return out


def load_predictions(path, n: int | None = None, use_raw: bool = False) -> list[PredictionSet]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise PredictionFileError(f"{path}: malformed JSON ({e.msg})") from None
    return predictions_from_dict(doc, n, use_raw)
