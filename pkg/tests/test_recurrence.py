import math

import numpy as np
import pytest

from tilerec.errors import BudgetExhausted, InsufficientWindow
from tilerec.geometry import Isometry2
from tilerec.ipsets import IPSetSpec, ip_contains
from tilerec.recurrence import (
    PatternF,
    WitnessCertificate,
    build_patch_index,
    dilation_sequence,
    search_witness,
    thm1_to_thm2,
    thm2_to_thm3,
    verify_witness,
    verify_witness_thm1,
    verify_witness_thm2,
    verify_witness_thm3,
)
from tilerec.tiling import TRANSLATION, patches_covering

from conftest import provider

F3 = PatternF([(1, 0), (0, 1), (1, 1)])


def lattice_cert(lattice, eps=0.5, n=2, corr=None, base=(0.0, 0.0)):
    w = lattice.window(12.0)
    patch = patches_covering(w, 1 / eps + 0.01, base)
    corr = [np.zeros(2)] * len(F3) if corr is None else corr
    return WitnessCertificate("thm1", n, eps, np.asarray(base), patch, corr, F3)


class TestPattern:
    def test_validation(self):
        with pytest.raises(ValueError):
            PatternF([])
        with pytest.raises(ValueError):
            PatternF([(1, 0), (1, 0)])
        with pytest.raises(ValueError):
            PatternF([(math.inf, 0)])

    def test_max_norm(self):
        assert F3.max_norm == pytest.approx(math.sqrt(2))


class TestVerify:
    def test_hand_built_lattice_certificate(self, lattice):
        assert verify_witness_thm1(lattice, F3, lattice_cert(lattice))

    def test_correction_at_epsilon_fails(self, lattice):
        bad = [np.array([0.5, 0.0]), np.zeros(2), np.zeros(2)]
        assert not verify_witness_thm1(lattice, F3, lattice_cert(lattice, corr=bad))

    def test_off_lattice_correction_fails(self, lattice):
        bad = [np.array([0.2, 0.0]), np.zeros(2), np.zeros(2)]
        assert not verify_witness_thm1(lattice, F3, lattice_cert(lattice, corr=bad))

    def test_support_too_small_fails(self, lattice):
        c = lattice_cert(lattice)
        small = WitnessCertificate("thm1", 2, 0.1, c.base, c.patch, c.corrections, F3)
        assert not verify_witness_thm1(lattice, F3, small)

    def test_foreign_patch_fails(self, lattice):
        c = lattice_cert(lattice)
        moved = c.patch.transformed(Isometry2.translate((0.5, 0.0)))
        bad = WitnessCertificate("thm1", 2, 0.5, np.array([0.5, 0.0]), moved, c.corrections, F3)
        assert not verify_witness_thm1(lattice, F3, bad)

    def test_wrong_variant_or_length(self, lattice):
        c = lattice_cert(lattice)
        assert not verify_witness_thm2(lattice, F3, c)
        short = WitnessCertificate("thm1", 2, 0.5, c.base, c.patch, c.corrections[:2], F3)
        assert not verify_witness_thm1(lattice, F3, short)

    def test_thm2_rotation_about_base(self, lattice):
        # a quarter turn about a cell center maps the lattice to itself but
        # is far from the identity, so it is no valid correction
        c = lattice_cert(lattice, base=(0.5, 0.5))
        quarter = Isometry2.from_angle(math.pi / 2)
        t2 = WitnessCertificate("thm2", 2, 0.5, c.base, c.patch, [quarter] * 3, F3)
        assert not verify_witness_thm2(lattice, F3, t2)
        ok = WitnessCertificate("thm2", 2, 0.5, c.base, c.patch, [Isometry2.identity()] * 3, F3)
        assert verify_witness_thm2(lattice, F3, ok)

    def test_certificate_validation(self, lattice):
        c = lattice_cert(lattice)
        with pytest.raises(ValueError):
            WitnessCertificate("thm4", 1, 0.5, c.base, c.patch, c.corrections)
        with pytest.raises(ValueError):
            WitnessCertificate("thm1", 0, 0.5, c.base, c.patch, c.corrections)
        with pytest.raises(ValueError):
            WitnessCertificate("thm1", 1, 0.0, c.base, c.patch, c.corrections)


class TestConversion:
    def test_chain(self, lattice):
        c1 = lattice_cert(lattice, corr=[np.zeros(2)] * 3)
        c2 = thm1_to_thm2(c1)
        c3 = thm2_to_thm3(c2)
        assert verify_witness_thm2(lattice, F3, c2)
        assert verify_witness_thm3(lattice, F3, c3)
        assert len(c3.corrections[0]) == len(c1.patch)

    def test_wrong_input_variant(self, lattice):
        with pytest.raises(ValueError):
            thm2_to_thm3(lattice_cert(lattice))


class TestPatchIndex:
    def test_lattice_anchors_on_integer_grid_collide(self, lattice):
        idx = build_patch_index(lattice.window(16.0), 1.0, 2.0, TRANSLATION)
        # every integer anchor sees the same protopatch
        assert len(idx.buckets) == 1 and len(idx) > 100

    def test_half_grid_gives_more_classes(self, lattice):
        idx = build_patch_index(lattice.window(16.0), 0.5, 2.0, TRANSLATION)
        assert len(idx.buckets) == 4

    def test_radius_limit(self, lattice):
        with pytest.raises(InsufficientWindow):
            build_patch_index(lattice.window(8.0), 1.0, 3.0)


class TestSearch:
    def test_lattice_thm1_n1(self, lattice):
        c = search_witness(lattice, F3, 0.1, "thm1", n_budget=5, r_search=30.0)
        assert c.n == 1
        assert all(np.linalg.norm(x) == 0 for x in c.corrections)
        assert verify_witness(lattice, F3, c)

    def test_ip_restricted(self, lattice):
        spec = IPSetSpec.geometric(3)
        c = search_witness(lattice, F3, 0.1, "thm1", n_budget=40, r_search=40.0, ip=spec)
        assert c.n == 3 and ip_contains(spec, c.n)

    def test_threads_do_not_change_result(self, lattice):
        a = search_witness(lattice, F3, 0.2, "thm2", n_budget=3, r_search=20.0, threads=1)
        b = search_witness(lattice, F3, 0.2, "thm2", n_budget=3, r_search=20.0, threads=4)
        assert a.n == b.n and np.array_equal(a.base, b.base)

    def test_zero_budget(self, lattice):
        with pytest.raises(BudgetExhausted):
            search_witness(lattice, F3, 0.1, n_budget=0, r_search=30.0)

    def test_window_too_small(self, lattice):
        with pytest.raises(InsufficientWindow):
            search_witness(lattice, F3, 0.1, n_budget=3, r_search=8.0)

    def test_shear_translation_variant_exhausts(self):
        # golden shear rows never realign, so no thm1 witness along (0,1)
        with pytest.raises(BudgetExhausted):
            search_witness(provider("shear"), PatternF([(0, 1)]), 0.3, "thm1", n_budget=6, r_search=30.0)

    def test_dilation_sequence(self):
        assert dilation_sequence(0, None) == []
        assert dilation_sequence(4, None) == [1, 2, 3, 4]
        assert dilation_sequence(30, IPSetSpec.geometric(3)) == [3, 9, 12, 27, 30]

    def test_bad_arguments(self, lattice):
        with pytest.raises(ValueError):
            search_witness(lattice, F3, 0.1, "thm9")
        with pytest.raises(ValueError):
            search_witness(lattice, F3, -1.0)
