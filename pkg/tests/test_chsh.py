import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliffbell.chsh import (
    TSIRELSON,
    CHSHSettings,
    chsh_random_search,
    chsh_sweep,
    chsh_value,
    correlation_matrix,
    f_squared_check,
    f_value,
    surrogate_assignments,
)
from cliffbell.ga_core import E1, E2, E3, I, ZERO, Orientation, UnitVector3, commutator, cross
from cliffbell.models import BellVector, SamplerConfig, christian_joint_exact

from .helpers import orientations, unit_vectors

settings4 = st.builds(CHSHSettings, unit_vectors, unit_vectors, unit_vectors, unit_vectors)
OPT = CHSHSettings.planar(0, 90, 45, -45)


class TestCHSHValue:
    def test_quantum_optimum(self):
        r = chsh_value("quantum", OPT)
        # four evaluations of -cos(delta): -cos45 - cos45 - cos45 + cos135
        expected = -3 * math.cos(math.radians(45)) + math.cos(math.radians(135))
        assert r.string_value == pytest.approx(expected, abs=1e-12)
        assert r.string_value == pytest.approx(-2 * math.sqrt(2), abs=1e-12)

    def test_bell_closed_form(self):
        r = chsh_value("bell", OPT)
        assert r.terms == pytest.approx((-0.5, -0.5, -0.5, 0.5), abs=1e-12)
        assert r.string_value == pytest.approx(-2.0, abs=1e-12)

    def test_christian_matches_quantum(self):
        assert chsh_value("christian", OPT).string_value == pytest.approx(chsh_value("quantum", OPT).string_value, abs=1e-12)

    @pytest.mark.parametrize("model", ["quantum", "christian"])
    def test_all_equal_settings(self, model):
        n = UnitVector3.normalized(1, 2, 2)
        assert chsh_value(model, CHSHSettings(n, n, n, n)).string_value == pytest.approx(-2.0, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(settings4, st.sampled_from(["quantum", "bell", "christian"]))
    def test_string_is_signed_sum(self, s, model):
        r = chsh_value(model, s)
        t = r.terms
        assert r.string_value == pytest.approx(t[0] + t[1] + t[2] - t[3], abs=1e-12)
        assert abs(r.string_value) <= TSIRELSON + 1e-12

    def test_bell_monte_carlo_stays_classical(self):
        cfg = SamplerConfig(8, 200_000)
        r = chsh_value("bell", OPT, cfg, "monte_carlo")
        assert abs(r.string_value) <= 2.0 + 1e-12
        assert abs(r.string_value + 2.0) < 5 * max(r.standard_error, 1 / math.sqrt(cfg.sample_count))
        assert r.mode == "monte_carlo"


class TestFValue:
    def test_equal_b_settings(self):
        a, b = UnitVector3.normalized(1, 0, 1), UnitVector3.normalized(0, 1, 1)
        for o in Orientation:
            F = f_value(o, CHSHSettings(a, UnitVector3(0, 0, 1), b, b))
            assert F.scalar_part == pytest.approx(-2 * a.dot(b), abs=1e-12)

    def test_surrogate_is_plus_minus_two(self):
        table = surrogate_assignments()
        assert len(table) == 16
        for _, F in table:
            assert F.grade(0).isclose(F)
            assert abs(F.scalar_part) == 2.0
            assert (F * F).scalar_part == 4.0

    @settings(max_examples=50, deadline=None)
    @given(settings4)
    def test_orientation_average_is_linear(self, s):
        avg = (f_value(Orientation.PLUS, s) + f_value(Orientation.MINUS, s)) * 0.5
        e = [christian_joint_exact(x, y).value for x, y in s.pairs()]
        assert avg.isclose(e[0] + e[1] + e[2] - e[3])

    @settings(max_examples=100, deadline=None)
    @given(orientations, settings4)
    def test_multivector_magnitude_bounded(self, o, s):
        assert f_value(o, s).norm() <= TSIRELSON + 1e-12

    def test_bell_vector_state(self):
        lam = UnitVector3.normalized(1, 1, 1)
        assert f_value(BellVector(lam), OPT).isclose(f_value(lam, OPT))


class TestFSquared:
    def test_surrogate_branch_exact(self, rng):
        for _ in range(200):
            lam, a, a2, b, b2 = (UnitVector3.normalized(*v) for v in rng.normal(size=(5, 3)))
            rep = f_squared_check(lam, CHSHSettings(a, a2, b, b2))
            assert rep.cross_commute
            assert rep.authoritative == "identity"
            assert rep.residual <= 1e-12
            assert rep.direct.isclose(4.0 + 0 * E1)
            assert rep.commutator_product.is_zero()

    def test_clifford_commutator_instance(self):
        c = commutator(I * E1, -(I * E2))
        assert c.isclose(2 * (I * E3))

    def test_clifford_outcomes_flag_noncommuting(self):
        rep = f_squared_check(Orientation.PLUS, OPT)
        assert not rep.cross_commute
        assert rep.authoritative == "direct"
        d = rep.to_dict()
        assert set(d["cross_commutator_norms"]) == {"[A_a,B_b]", "[A_a,B_b′]", "[A_a′,B_b]", "[A_a′,B_b′]"}

    def test_commutator_product_scalar_formula_and_bound(self, rng):
        worst = -np.inf
        for _ in range(1000):
            o = Orientation(int(rng.choice([1, -1])))
            a, a2, b, b2 = (UnitVector3.normalized(*v) for v in rng.normal(size=(4, 3)))
            rep = f_squared_check(o, CHSHSettings(a, a2, b, b2))
            expected = -4 * float(np.dot(cross(a, a2), cross(b2, b)))
            assert rep.commutator_product.scalar_part == pytest.approx(expected, abs=1e-12)
            assert abs(rep.commutator_product.scalar_part) <= 4 + 1e-12
            worst = max(worst, rep.identity_scalar)
        assert worst <= 8 + 1e-12

    def test_identity_holds_when_outcomes_commute_even_if_they_square_to_minus_one(self):
        # parallel settings make every bivector outcome commute
        n = UnitVector3(0, 0, 1)
        rep = f_squared_check(Orientation.MINUS, CHSHSettings(n, -n, n, n))
        assert rep.cross_commute
        assert rep.residual <= 1e-12


class TestSweep:
    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            chsh_sweep("quantum", resolution=4)

    def test_rejects_non_orthogonal_plane(self):
        with pytest.raises(ValueError):
            chsh_sweep("quantum", plane=(UnitVector3(1, 0, 0), UnitVector3.normalized(1, 1, 0)), resolution=8)

    def test_resolution_eight(self):
        for model, bound in [("quantum", TSIRELSON), ("bell", 2.0), ("christian", TSIRELSON)]:
            r = chsh_sweep(model, resolution=8)
            assert r.max_abs_S <= bound + 1e-12
            assert r.within_bound

    def test_argmax_row_is_consistent(self):
        r = chsh_sweep("quantum", resolution=16)
        s = CHSHSettings.planar(*r.argmax_settings_deg)
        assert abs(chsh_value("quantum", s).string_value) == pytest.approx(r.max_abs_S, abs=1e-12)
        assert r.csv_row()[0] == "quantum" and len(r.csv_row()) == 11
        assert set(r.summary()) == {"model", "max_abs_S", "argmax_settings_deg", "bound", "margin", "samples", "seed"}

    def test_other_plane(self):
        u, v = UnitVector3(0, 0, 1), UnitVector3(0, 1, 0)
        r = chsh_sweep("quantum", plane=(u, v), resolution=16)
        assert r.max_abs_S == pytest.approx(TSIRELSON, abs=1e-12)

    def test_mc_matrix_matches_pairwise_estimates(self):
        dirs = [UnitVector3.in_plane(UnitVector3(1, 0, 0), UnitVector3(0, 1, 0), math.radians(d)) for d in (0, 40, 100)]
        cfg = SamplerConfig(3, 70_000)
        M = correlation_matrix("bell", dirs, cfg, "monte_carlo")
        from cliffbell.models import estimate_joint

        for i, x in enumerate(dirs):
            for j, y in enumerate(dirs):
                assert M[i, j] == pytest.approx(estimate_joint("bell", x, y, cfg).scalar, abs=1e-12)
        Mc = correlation_matrix("christian", dirs, cfg, "monte_carlo")
        np.testing.assert_allclose(Mc, correlation_matrix("christian", dirs), atol=1e-12)

    def test_random_search_full_sphere(self):
        best, s = chsh_random_search("quantum", restarts=4, seed=1)
        assert best == pytest.approx(TSIRELSON, abs=1e-6)
        assert best <= TSIRELSON + 1e-12
        best_bell, _ = chsh_random_search("bell", restarts=4, seed=1)
        assert best_bell <= 2.0 + 1e-9
