"""JSON import/export for windows and certificates, with deterministic number formatting."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError
from .geometry import Isometry2
from .recurrence import PatternF, WitnessCertificate
from .tiling import Prototile, TileSet, TilingWindow

SIG_DIGITS = 12


def _num(x: float) -> float | int:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite number in output")
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0  # + 0.0 folds -0.0 into 0.0


def _clean(obj: Any) -> Any:
    """Round every float to 12 significant digits; keep key order."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=1, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON from {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# windows

def tiles_to_records(ts: TileSet) -> list[dict]:
    return [{"proto": ts.prototiles[p].id, "rotation": a, "translation": [t[0], t[1]]}
            for p, a, t in zip(ts.proto_index.tolist(), ts.angles.tolist(), ts.translations.tolist())]


def window_to_dict(w: TilingWindow) -> dict:
    return {
        "prototiles": [{"id": p.id, "vertices": p.vertices.tolist()} for p in w.prototiles],
        "tiles": tiles_to_records(w),
        "radius": w.radius,
    }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _vec(v, what: str) -> list[float]:
    _require(isinstance(v, (list, tuple)) and len(v) == 2
             and all(isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c) for c in v),
             f"{what} must be a pair of finite numbers")
    return [float(v[0]), float(v[1])]


def prototiles_from_list(items) -> list[Prototile]:
    _require(isinstance(items, list) and items, "'prototiles' must be a nonempty list")
    out, seen = [], set()
    for it in items:
        _require(isinstance(it, dict) and isinstance(it.get("id"), str), "prototile needs a string 'id'")
        _require(it["id"] not in seen, f"duplicate prototile id {it['id']!r}")
        seen.add(it["id"])
        verts = it.get("vertices")
        _require(isinstance(verts, list) and len(verts) >= 3, f"prototile {it['id']!r} needs >= 3 vertices")
        try:
            out.append(Prototile(it["id"], np.array([_vec(v, "vertex") for v in verts])))
        except ValueError as exc:
            raise ConfigError(f"prototile {it['id']!r}: {exc}") from exc
    return out


def tiles_from_records(records, prototiles: list[Prototile]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _require(isinstance(records, list), "'tiles' must be a list")
    index = {p.id: i for i, p in enumerate(prototiles)}
    pidx, ang, tr = [], [], []
    for rec in records:
        _require(isinstance(rec, dict), "tile record must be an object")
        _require(rec.get("proto") in index, f"tile references unknown prototile {rec.get('proto')!r}")
        rot = rec.get("rotation")
        _require(isinstance(rot, (int, float)) and not isinstance(rot, bool) and math.isfinite(rot),
                 "tile 'rotation' must be a finite number")
        pidx.append(index[rec["proto"]])
        ang.append(float(rot))
        tr.append(_vec(rec.get("translation"), "tile 'translation'"))
    return (np.asarray(pidx, dtype=np.int64), np.asarray(ang, dtype=float),
            np.asarray(tr, dtype=float).reshape(-1, 2))


def window_from_dict(d: dict) -> TilingWindow:
    _require(isinstance(d, dict), "window file must hold a JSON object")
    for key in ("prototiles", "tiles", "radius"):
        _require(key in d, f"window is missing {key!r}")
    radius = d["radius"]
    _require(isinstance(radius, (int, float)) and not isinstance(radius, bool) and radius > 0,
             "'radius' must be a positive number")
    protos = prototiles_from_list(d["prototiles"])
    pidx, ang, tr = tiles_from_records(d["tiles"], protos)
    return TilingWindow(float(radius), protos, pidx, ang, tr)


def load_window(path) -> TilingWindow:
    return window_from_dict(read_json(path))


# ---------------------------------------------------------------------------
# certificates

def _iso_to_dict(s: Isometry2) -> dict:
    return {"rotation": s.angle, "translation": s.translation.tolist()}


def _iso_from_dict(d) -> Isometry2:
    _require(isinstance(d, dict), "isometry must be an object with 'rotation' and 'translation'")
    rot = d.get("rotation")
    _require(isinstance(rot, (int, float)) and not isinstance(rot, bool) and math.isfinite(rot),
             "isometry 'rotation' must be a finite number")
    return Isometry2.from_angle(float(rot), _vec(d.get("translation"), "isometry 'translation'"))


def certificate_to_dict(cert: WitnessCertificate) -> dict:
    if cert.variant == "thm1":
        corr = [np.asarray(c).tolist() for c in cert.corrections]
    elif cert.variant == "thm2":
        corr = [_iso_to_dict(s) for s in cert.corrections]
    else:
        corr = [[_iso_to_dict(s) for s in per] for per in cert.corrections]
    out = {
        "variant": cert.variant,
        "n": cert.n,
        "epsilon": cert.epsilon,
        "base": cert.base.tolist(),
        "patch": tiles_to_records(cert.patch),
        "corrections": corr,
    }
    if cert.pattern is not None:
        out["pattern"] = [list(u) for u in cert.pattern.vectors]
    return out


def certificate_from_dict(d: dict, prototiles: list[Prototile]) -> WitnessCertificate:
    _require(isinstance(d, dict), "certificate must be a JSON object")
    for key in ("variant", "n", "epsilon", "base", "patch", "corrections"):
        _require(key in d, f"certificate is missing {key!r}")
    variant = d["variant"]
    _require(variant in ("thm1", "thm2", "thm3"), f"unknown variant {variant!r}")
    n = d["n"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 1, "'n' must be a positive integer")
    eps = d["epsilon"]
    _require(isinstance(eps, (int, float)) and not isinstance(eps, bool) and eps > 0,
             "'epsilon' must be positive")
    base = _vec(d["base"], "'base'")
    pidx, ang, tr = tiles_from_records(d["patch"], prototiles)
    patch = TileSet(prototiles, pidx, ang, tr)
    raw = d["corrections"]
    _require(isinstance(raw, list), "'corrections' must be a list")
    try:
        if variant == "thm1":
            corr = [np.array(_vec(c, "correction")) for c in raw]
        elif variant == "thm2":
            corr = [_iso_from_dict(c) for c in raw]
        else:
            _require(all(isinstance(per, list) for per in raw), "thm3 corrections must be lists per vector")
            corr = [[_iso_from_dict(c) for c in per] for per in raw]
        pattern = PatternF([_vec(u, "pattern vector") for u in d["pattern"]]) if "pattern" in d else None
    except ValueError as exc:
        raise ConfigError(f"invalid certificate: {exc}") from exc
    return WitnessCertificate(variant, n, float(eps), np.array(base), patch, corr, pattern)
