import xml.etree.ElementTree as ET

import pytest

from tilerec.complexity import classify_flc
from tilerec.recurrence import PatternF, search_witness
from tilerec.render import plot_class_counts, prototile_color, render_svg

from conftest import provider

NS = "{http://www.w3.org/2000/svg}"


def test_one_polygon_per_tile():
    w = provider("lattice").window(4.0)
    root = ET.fromstring(render_svg(w))
    tiles = root.find(f"{NS}g[@class='tiles']")
    assert len(tiles.findall(f"{NS}polygon")) == len(w)


def test_deterministic():
    w = provider("penrose").window(4.0)
    assert render_svg(w) == render_svg(w)


def test_colors_follow_prototile():
    w = provider("penrose").window(4.0)
    root = ET.fromstring(render_svg(w))
    seen = {}
    for poly in root.iter(f"{NS}polygon"):
        if "data-proto" in poly.attrib:
            assert seen.setdefault(poly.get("data-proto"), poly.get("fill")) == poly.get("fill")
    assert prototile_color(0, 4) != prototile_color(1, 4)


def test_certificate_overlay_counts():
    lat = provider("lattice")
    F = PatternF([(1, 0), (0, 1), (1, 1)])
    cert = search_witness(lat, F, 0.2, "thm1", n_budget=3, r_search=20.0)
    root = ET.fromstring(render_svg(lat.window(12.0), cert))
    groups = root.findall(f"{NS}g[@class='patch']")
    assert len(groups) == len(F) + 1
    assert all(len(g.findall(f"{NS}polygon")) == len(cert.patch) for g in groups)
    assert len(root.find(f"{NS}g[@class='pattern']").findall(f"{NS}line")) == len(F)


def test_overlay_needs_pattern():
    lat = provider("lattice")
    cert = search_witness(lat, PatternF([(1, 0)]), 0.2, "thm1", n_budget=2, r_search=20.0)
    object.__setattr__(cert, "pattern", None)
    with pytest.raises(ValueError):
        render_svg(lat.window(8.0), cert)


def test_flc_figure(tmp_path):
    rep = classify_flc(provider("lattice"), [3, 5, 7])
    out = tmp_path / "flc.png"
    plot_class_counts(rep, out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
