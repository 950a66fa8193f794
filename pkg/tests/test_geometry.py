"""
Tests for orbit-space geometry in u-coordinates.
"""

import pytest
from sympy import QQ

from coxeter_saito.algebra import RatFn, RatFnMatrix, make_ring
from coxeter_saito.catalog import group_from_name
from coxeter_saito.geometry import (
    ass3_check,
    e_field,
    euler_field,
    flatness_check,
    hessian_metric,
    jacobian,
    orbit_geometry,
    torsion_check,
    vector_action,
)
from coxeter_saito.parser import load_group_spec
from coxeter_saito.utils import InputError


class TestCyclic:
    """Test Z_m, where everything is explicit."""

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_e_and_hessian(self, m):
        """Test e, H and S for Z_m."""
        g = group_from_name(f"Z{m}")
        ring = g.ring
        u = ring.gens[0]
        geo = orbit_geometry(g)
        assert geo.efield.e[0] == RatFn.new(ring.one, u ** (m - 1) * m)
        assert geo.hessian.Htilde[0, 0] == RatFn.from_poly(u ** (m - 2) * (m * (m - 1)))
        assert geo.hessian.Stilde[0][0, 0] == RatFn.new(ring.one * QQ(m - 2, 2), u)

    def test_euler_field(self):
        """Test E_deg and E = E_deg / d_1."""
        g = group_from_name("Z5")
        u = g.ring.gens[0]
        E = euler_field(g)
        assert E.E_deg[0] == RatFn.from_poly(u)
        assert E.E[0] == RatFn.from_poly(u * QQ(1, 5))
        assert E.weight == QQ(1, 5)

    def test_ass3(self):
        """Test nabla E = r id with r = d_n / (2 d_1)."""
        g = group_from_name("Z5")
        hm = hessian_metric(g)
        check = ass3_check(g, hm)
        assert check.passed
        assert check.detail == "r = 1/2"
        assert not ass3_check(g, hm, r=1).passed


class TestRankTwo:
    """Test rank-2 groups."""

    def test_b2_jacobian(self):
        """Test the B2 Jacobian and its inverse."""
        g = group_from_name("B2")
        u1, u2 = g.ring.gens
        jd = jacobian(g)
        assert jd.J[0, 0] == RatFn.from_poly(2 * u1 * u2 ** 2)
        assert jd.detJ == RatFn.from_poly(4 * u1 * u2 ** 3 - 4 * u1 ** 3 * u2)
        assert (jd.J @ jd.Jinv).equals(RatFnMatrix.identity(g.ring, 2))

    def test_g312_e_field(self):
        """Test e for G(3,1,2)."""
        g = group_from_name("G3_1_2")
        u1, u2 = g.ring.gens
        ef = e_field(g)
        assert ef.e[0] == RatFn.new(-g.ring.one, 3 * u1 ** 2 * (u1 ** 3 - u2 ** 3))
        assert ef.e[1] == RatFn.new(-g.ring.one, 3 * u2 ** 2 * (u2 ** 3 - u1 ** 3))
        assert not ef.detQ.is_zero()

    def test_e_differentiates_invariants(self):
        """Test e(x^a) = delta_a1."""
        g = group_from_name("I2_5")
        ef = e_field(g)
        assert vector_action(ef.e, RatFn.from_poly(g.invariants[0])) == 1
        assert vector_action(ef.e, RatFn.from_poly(g.invariants[1])).is_zero()

    def test_coxeter_levi_civita_vanishes(self):
        """Test that S vanishes when d_n = 2."""
        hm = hessian_metric(group_from_name("B2"))
        assert all(S.is_zero() for S in hm.Stilde)

    def test_shephard_levi_civita_flat(self):
        """Test torsion and curvature of S for G(3,1,2)."""
        hm = hessian_metric(group_from_name("G3_1_2"))
        assert torsion_check(hm.Stilde).passed
        assert flatness_check(hm.Stilde).passed


class TestErrors:
    """Test geometry preconditions."""

    def test_hessian_needs_cs(self):
        """Test that non-CS groups have no Hessian metric."""
        with pytest.raises(InputError, match="fails d_a"):
            hessian_metric(group_from_name("G3_3_3"))

    def test_tied_leading_degrees(self):
        """Test that e is undefined when d_1 = d_2."""
        g = load_group_spec({"rank": 2, "invariants": ["u1^2", "u2^2"]})
        with pytest.raises(InputError, match="d_1 > d_2"):
            e_field(g)

    def test_flatness_witness(self):
        """Test the curvature witness of a non-flat connection."""
        ring = make_ring(["u1", "u2"])
        u1, _ = ring.gens
        G1 = RatFnMatrix.zeros(ring, 2)
        G2 = RatFnMatrix.from_rows(ring, [[u1, 0], [0, 0]])
        check = flatness_check([G1, G2], "test")
        assert not check.passed
        assert check.detail.startswith("curvature (1,2,1,1)")

    def test_torsion_witness(self):
        """Test the torsion witness."""
        ring = make_ring(["u1", "u2"])
        G1 = RatFnMatrix.from_rows(ring, [[0, 1], [0, 0]])
        G2 = RatFnMatrix.zeros(ring, 2)
        assert not torsion_check([G1, G2]).passed


@pytest.mark.slow
class TestRankThree:
    """Rank-3 geometry."""

    @pytest.mark.parametrize("name", ["B3", "G3_1_3"])
    def test_levi_civita_flat(self, name):
        """Test that the Hessian Levi-Civita connection is flat."""
        g = group_from_name(name)
        hm = hessian_metric(g)
        assert flatness_check(hm.Stilde).passed
        assert ass3_check(g, hm).passed
