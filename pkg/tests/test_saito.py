"""
Tests for almost Saito and Saito structures and their duality.
"""

import pytest
from sympy import QQ

from coxeter_saito.algebra import RatFn, RatFnMatrix, make_ring
from coxeter_saito.catalog import group_from_name
from coxeter_saito.geometry import orbit_geometry
from coxeter_saito.saito import (
    AlmostSaitoData,
    FrameCalculus,
    MultTensor,
    SaitoData,
    build_axiom_structure,
    check_round_trip,
    cs_ass,
    dualize_ass_to_ss,
    dualize_ss_to_ass,
    natural_ass,
    run_axiom_sets,
    select_axiom_sets,
    theorem2_compare,
    verify_axioms,
)
from coxeter_saito.utils import InputError


@pytest.fixture(scope="module")
def z5_geometry():
    return orbit_geometry(group_from_name("Z5"))


@pytest.fixture(scope="module")
def g312_geometry():
    return orbit_geometry(group_from_name("G3_1_2"))


def failed(checks):
    return [check.id for check in checks if not check.passed]


def gm1n_products(ring, m, n):
    """Closed-form structure constants of the natural multiplication of G(m,1,n), M_i[k, j]."""
    u = ring.gens
    v = [gen ** m for gen in u]
    zero = RatFn.from_poly(ring.zero)
    matrices = []
    for i in range(n):
        rows = [[zero] * n for _ in range(n)]
        rows[i][i] = RatFn.new(ring.one * m, u[i])
        for l in range(n):
            if l == i:
                continue
            rows[i][i] = rows[i][i] + RatFn.new(m * u[i] ** (m - 1), v[i] - v[l])
            rows[l][i] = RatFn.new(-m * u[i] ** (m - 2) * u[l], v[i] - v[l])
            # d/du^i * d/du^l has components along d/du^i and d/du^l only
            rows[i][l] = RatFn.new(-m * u[l] ** (m - 1), v[i] - v[l])
            rows[l][l] = RatFn.new(-m * u[i] ** (m - 1), v[l] - v[i])
        matrices.append(RatFnMatrix.from_rows(ring, rows))
    return matrices


class TestFrameCalculus:
    """Test vector-field helpers."""

    def test_bracket_and_product(self):
        """Test the Lie bracket of u1 d/du2 and d/du1, and a product."""
        ring = make_ring(["u1", "u2"])
        u1, _ = ring.gens
        fc = FrameCalculus(ring, 2)
        X = (fc.zero, RatFn.from_poly(u1))
        assert fc.bracket(fc.basis(0), X) == (fc.zero, fc.one)
        M = [RatFnMatrix.identity(ring, 2), RatFnMatrix.zeros(ring, 2)]
        assert fc.product(M, fc.basis(0), fc.basis(1)) == fc.basis(1)


class TestNaturalStructure:
    """Test the natural almost Saito structure."""

    def test_cyclic_structure_constant(self, z5_geometry):
        """Test B = m/u and the parameter 1/d_1 for Z5."""
        ass = natural_ass(z5_geometry)
        ring = z5_geometry.group.ring
        u = ring.gens[0]
        assert ass.mult.matrices[0][0, 0] == RatFn.new(ring.one * 5, u)
        assert ass.r == QQ(1, 5)
        assert ass.connection[0].is_zero()

    def test_cyclic_axioms(self, z5_geometry):
        """Test every ASS axiom for Z5."""
        checks = verify_axioms(natural_ass(z5_geometry))
        assert failed(checks) == []
        ass3 = next(check for check in checks if check.id == "ass-natural:ASS3")
        assert ass3.detail == "r = 1/5"

    def test_gm1n_structure_constants(self, g312_geometry):
        """Test the closed-form natural structure constants of G(3,1,2)."""
        ring = g312_geometry.group.ring
        u1, u2 = ring.gens
        D = u1 ** 3 - u2 ** 3
        B = natural_ass(g312_geometry).mult.matrices
        # B_i[k, j] is the d/du^k component of d/du^i * d/du^j
        assert B[0][0, 0] == RatFn.new(3 * u1 ** 2, D) + RatFn.new(ring.one * 3, u1)
        assert B[0][1, 0] == RatFn.new(-3 * u1 * u2, D)
        assert B[0][0, 1] == RatFn.new(-3 * u2 ** 2, D)
        assert B[0][1, 1] == RatFn.new(3 * u1 ** 2, D)
        assert B[1][1, 1] == RatFn.new(-3 * u2 ** 2, D) + RatFn.new(ring.one * 3, u2)

    @pytest.mark.parametrize("name,m,n", [
        ("G3_1_2", 3, 2),
        ("G4_1_2", 4, 2),
        pytest.param("G3_1_3", 3, 3, marks=pytest.mark.slow),
    ])
    def test_gm1n_closed_form(self, name, m, n):
        """Test every natural structure constant and S against their closed forms."""
        g = group_from_name(name)
        geo = orbit_geometry(g)
        ring = g.ring
        u = ring.gens
        expected = gm1n_products(ring, m, n)
        B = natural_ass(geo).mult.matrices
        for i in range(n):
            assert B[i].equals(expected[i]), f"B_{i + 1}"
            S = geo.hessian.Stilde[i]
            assert S[i, i] == RatFn.new(ring.one * QQ(m - 2, 2), u[i])
            assert sum(1 for k in range(n) for j in range(n) if not S[k, j].is_zero()) == 1

    def test_gm1n_axioms(self, g312_geometry):
        """Test the natural ASS and SS for G(3,1,2)."""
        assert failed(verify_axioms(natural_ass(g312_geometry))) == []
        assert failed(verify_axioms(dualize_ass_to_ss(natural_ass(g312_geometry)))) == []


class TestCsStructure:
    """Test the Coxeter-Shephard almost Saito structure."""

    def test_cyclic(self, z5_geometry):
        """Test the CS structure of Z5 and its parameter d_n/(2 d_1)."""
        ass = cs_ass(z5_geometry)
        assert ass.r == QQ(1, 2)
        assert ass.label == "ass-cs"
        assert failed(verify_axioms(ass)) == []

    def test_gm1n(self, g312_geometry):
        """Test the CS structure of G(3,1,2)."""
        assert failed(verify_axioms(cs_ass(g312_geometry))) == []

    def test_needs_hessian(self):
        """Test that the CS structure needs the Hessian metric."""
        geo = orbit_geometry(group_from_name("Z5"), with_hessian=False)
        with pytest.raises(InputError, match="Hessian metric"):
            cs_ass(geo)


class TestDuality:
    """Test dualizing between almost Saito and Saito structures."""

    def test_cyclic_dual(self, z5_geometry):
        """Test C = 5 u^4 with unit e for Z5."""
        ring = z5_geometry.group.ring
        u = ring.gens[0]
        ss = dualize_ass_to_ss(natural_ass(z5_geometry))
        assert isinstance(ss, SaitoData)
        assert ss.label == "ss-natural"
        assert ss.mult.matrices[0][0, 0] == RatFn.from_poly(u ** 4 * 5)
        assert ss.mult.unit == z5_geometry.efield.e
        assert ss.euler == z5_geometry.euler.E

    def test_back_to_almost(self, z5_geometry):
        """Test that dualizing back restores the multiplication."""
        ass = natural_ass(z5_geometry)
        back = dualize_ss_to_ass(dualize_ass_to_ss(ass), ass.r)
        assert isinstance(back, AlmostSaitoData)
        assert back.mult.matrices[0].equals(ass.mult.matrices[0])
        assert back.connection[0].is_zero()

    @pytest.mark.parametrize("name", ["Z5", "B2", "G3_1_2"])
    def test_round_trip(self, name):
        """Test round trips for both structures."""
        geo = orbit_geometry(group_from_name(name))
        assert check_round_trip(natural_ass(geo)).passed
        assert check_round_trip(cs_ass(geo)).passed

    def test_round_trip_detects_wrong_parameter(self, z5_geometry):
        """Test that a wrong r breaks the connection round trip."""
        ass = natural_ass(z5_geometry)
        broken = AlmostSaitoData(
            connection=ass.connection,
            mult=MultTensor(matrices=ass.mult.matrices, unit=ass.mult.unit),
            e=ass.e,
            r=QQ(1, 3),
            label="broken",
        )
        check = check_round_trip(broken)
        assert not check.passed
        assert "connection differs" in check.detail


class TestCompare:
    """Test comparing the natural and CS structures."""

    def test_coxeter_equal(self):
        """Test that both structures agree when d_n = 2."""
        geo = orbit_geometry(group_from_name("B2"))
        result = theorem2_compare(geo.group, natural_ass(geo).mult, geo.hessian, cs_ass(geo).mult)
        assert result.multiplications_equal
        assert result.connections_equal
        assert result.ratio == 0

    def test_shephard_differs(self, g312_geometry):
        """Test G(3,1,2): same multiplication, connections differ at (1,1,1)."""
        geo = g312_geometry
        result = theorem2_compare(geo.group, natural_ass(geo).mult, geo.hessian, cs_ass(geo).mult)
        assert result.multiplications_equal
        assert result.multiplication_witness is None
        assert not result.connections_equal
        assert result.connection_witness == (1, 1, 1)
        assert result.ratio == QQ(1, 12)

    def test_cyclic_connections(self, z5_geometry):
        """Test S = (m - 2)/(2m) B for Z5, where the connections differ by that ratio."""
        geo = z5_geometry
        result = theorem2_compare(geo.group, natural_ass(geo).mult, geo.hessian)
        assert result.ratio == QQ(3, 10)
        assert result.connections_equal

    @pytest.mark.parametrize("name,ratio", [
        ("A2", QQ(0)),
        ("I2_5", QQ(0)),
        pytest.param("A3", QQ(0), marks=pytest.mark.slow),
        pytest.param("B3", QQ(0), marks=pytest.mark.slow),
        pytest.param("D4", QQ(0), marks=pytest.mark.slow),
    ])
    def test_coxeter_groups_agree(self, name, ratio):
        """Test that Coxeter groups have equal multiplications and connections."""
        geo = orbit_geometry(group_from_name(name))
        result = theorem2_compare(geo.group, natural_ass(geo).mult, geo.hessian, cs_ass(geo).mult)
        assert result.multiplications_equal
        assert result.connections_equal
        assert result.connection_witness is None
        assert result.ratio == ratio

    @pytest.mark.slow
    def test_shephard_rank_three_differs(self):
        """Test G(3,1,3): same multiplication, connections differ at (1,1,1)."""
        geo = orbit_geometry(group_from_name("G3_1_3"))
        result = theorem2_compare(geo.group, natural_ass(geo).mult, geo.hessian, cs_ass(geo).mult)
        assert result.multiplications_equal
        assert not result.connections_equal
        assert result.connection_witness == (1, 1, 1)
        assert result.ratio == QQ(1, 18)



class TestAxiomSets:
    """Test running named axiom sets."""

    def test_build_structure_labels(self, z5_geometry):
        """Test the structure built for each name."""
        assert build_axiom_structure(z5_geometry, "ss-cs").label == "ss-cs"
        assert build_axiom_structure(z5_geometry, "f-cs").label == "f-cs"
        af = build_axiom_structure(z5_geometry, "af-cs")
        assert af.charge == 0
        with pytest.raises(InputError, match="Invalid axiom set"):
            build_axiom_structure(z5_geometry, "bogus")

    @pytest.mark.parametrize("name", ["Z5", "B2"])
    def test_all_sets_pass(self, name):
        """Test every axiom set for a cyclic and a Coxeter group."""
        checks = run_axiom_sets(group_from_name(name))
        assert checks
        assert failed(checks) == []
        ids = {check.id for check in checks}
        assert "f-cs:f3" in ids
        assert "af-cs:parameter" in ids

    def test_natural_only_skips_hessian(self):
        """Test that natural axiom sets run without the Hessian metric."""
        checks = run_axiom_sets(group_from_name("G3_1_2"), "ass-natural,ss-natural")
        assert failed(checks) == []
        assert all(check.id.split(":")[0] in ("ass-natural", "ss-natural") for check in checks)

    @pytest.mark.parametrize("name", ["A2", "B2", "I2_5", pytest.param("B3", marks=pytest.mark.slow)])
    def test_almost_saito_axioms(self, name):
        """Test ASS1 to ASS4 of both structures for Coxeter groups."""
        checks = run_axiom_sets(group_from_name(name), "ass-natural,ass-cs")
        assert failed(checks) == []
        ids = {check.id for check in checks}
        for label in ("ass-natural", "ass-cs"):
            assert {f"{label}:ASS{k}" for k in range(1, 5)} <= ids

    def test_all_sets_outside_cs(self):
        """Test that 'all' keeps only the natural sets for G(3,3,3)."""
        g = group_from_name("G3_3_3")
        assert select_axiom_sets(g) == ["ass-natural", "ss-natural"]
        assert select_axiom_sets(g, "all") == ["ass-natural", "ss-natural"]
        assert select_axiom_sets(g, "ass-cs") == ["ass-cs"]
        assert "ass-cs" in select_axiom_sets(group_from_name("B2"))



@pytest.mark.slow
class TestRankThree:
    """Rank-3 structures."""

    @pytest.mark.parametrize("name", ["A3", "G3_1_3"])
    def test_structures(self, name):
        """Test the natural and CS almost Saito structures."""
        checks = run_axiom_sets(group_from_name(name), "ass-natural,ass-cs")
        assert failed(checks) == []

    def test_duality_group_outside_cs(self):
        """Test the natural structure of G(3,3,3), which has no Hessian metric."""
        checks = run_axiom_sets(group_from_name("G3_3_3"), "ass-natural")
        assert failed(checks) == []

    def test_duality_group_outside_cs_all_sets(self):
        """Test the default axiom sets of G(3,3,3), with ASS1 to ASS4 present."""
        checks = run_axiom_sets(group_from_name("G3_3_3"))
        assert failed(checks) == []
        ids = {check.id for check in checks}
        assert {f"ass-natural:ASS{k}" for k in range(1, 5)} <= ids
        assert not any(check.id.startswith(("ass-cs", "ss-cs", "af-cs", "f-cs")) for check in checks)
