import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tilerec import io as tio
from tilerec.errors import ConfigError
from tilerec.recurrence import PatternF, search_witness, thm1_to_thm2, thm2_to_thm3, verify_witness

from conftest import provider


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_twelve_significant_digits(x):
    y = json.loads(tio.dumps(x))
    assert y == float(f"{x:.12g}")
    if x != 0:
        assert abs(y - x) <= abs(x) * 1e-11


def test_negative_zero_folded():
    assert tio.dumps(-0.0) == "0.0\n"


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        tio.dumps(math.nan)


@pytest.mark.parametrize("kind", ["lattice", "penrose", "pinwheel"])
def test_window_roundtrip(kind):
    w = provider(kind).window(6.0)
    back = tio.window_from_dict(json.loads(tio.dumps(tio.window_to_dict(w))))
    assert back.radius == w.radius and len(back) == len(w)
    assert np.all(back.contains_polygons(w.polygons, 1e-9))


def test_window_field_names():
    d = tio.window_to_dict(provider("lattice").window(2.0))
    assert list(d) == ["prototiles", "tiles", "radius"]
    assert list(d["tiles"][0]) == ["proto", "rotation", "translation"]
    assert list(d["prototiles"][0]) == ["id", "vertices"]


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("radius"),
    lambda d: d.update(radius=-1),
    lambda d: d["tiles"][0].update(proto="missing"),
    lambda d: d["tiles"][0].update(translation=[1]),
    lambda d: d["tiles"][0].update(rotation="north"),
    lambda d: d["prototiles"][0].update(vertices=[[0, 0], [1, 0]]),
    lambda d: d["prototiles"][0].update(vertices=[[0, 0], [0, 1], [1, 1], [1, 0]]),
    lambda d: d["prototiles"].append(dict(d["prototiles"][0])),
])
def test_window_schema_violations(mutate):
    d = tio.window_to_dict(provider("lattice").window(2.0))
    mutate(d)
    with pytest.raises(ConfigError):
        tio.window_from_dict(d)


def test_certificate_roundtrip_all_variants():
    lat = provider("lattice")
    F = PatternF([(1, 0), (0, 1)])
    c1 = search_witness(lat, F, 0.2, "thm1", n_budget=3, r_search=20.0)
    for c in (c1, thm1_to_thm2(c1), thm2_to_thm3(thm1_to_thm2(c1))):
        d = json.loads(tio.dumps(tio.certificate_to_dict(c)))
        assert list(d)[:6] == ["variant", "n", "epsilon", "base", "patch", "corrections"]
        back = tio.certificate_from_dict(d, list(lat.prototiles))
        assert back.variant == c.variant and back.n == c.n
        assert verify_witness(lat, back.pattern, back)


def test_certificate_violations():
    lat = provider("lattice")
    c = search_witness(lat, PatternF([(1, 0)]), 0.2, "thm1", n_budget=2, r_search=20.0)
    base = tio.certificate_to_dict(c)
    for key, val in [("variant", "thm7"), ("n", 0), ("epsilon", -1), ("corrections", {}),
                     ("base", [1, 2, 3])]:
        d = dict(base)
        d[key] = val
        with pytest.raises(ConfigError):
            tio.certificate_from_dict(d, list(lat.prototiles))


def test_read_json_errors(tmp_path):
    with pytest.raises(ConfigError):
        tio.read_json(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        tio.read_json(bad)
