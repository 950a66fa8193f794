"""
Tests for the G(m,1,n) closed forms and their oracles.
"""

import pytest

from coxeter_saito.algebra import RatFn, RatFnMatrix, make_ring
from coxeter_saito.appendix import (
    OracleEntry,
    appendix_checks,
    appendix_entries,
    appendix_report,
    check_elementary_recursion,
    closed_det,
    closed_du_dx,
    closed_e_field,
    closed_inverse_entry,
    closed_minor,
    elementary_matrix,
    elementary_matrix_checks,
    elementary_matrix_entries,
)
from coxeter_saito.utils import InputError


@pytest.fixture
def v3():
    return make_ring(["v1", "v2", "v3"])


class TestElementaryMatrix:
    """Test E(v) and its closed forms."""

    def test_size_two(self):
        """Test E(v) = [[1, 1], [v2, v1]]."""
        ring = make_ring(["v1", "v2"])
        v1, v2 = ring.gens
        E = elementary_matrix(2, ring)
        assert E.equals(RatFnMatrix.from_rows(ring, [[1, 1], [v2, v1]]))
        assert closed_det(2, ring) == v1 - v2

    def test_minors(self, v3):
        """Test two minors of the 3x3 matrix."""
        v1, v2, v3_ = v3.gens
        assert closed_minor(3, 2, 2, v3) == v2 * (v1 - v3_)
        assert closed_minor(3, 1, 3, v3) == v3_ ** 2 * (v1 - v2)

    def test_inverse_entries(self):
        """Test the first row of E(v)^-1 for n = 2."""
        ring = make_ring(["v1", "v2"])
        v1, v2 = ring.gens
        assert closed_inverse_entry(2, 1, 1, ring) == RatFn.new(v1, v1 - v2)
        assert closed_inverse_entry(2, 1, 2, ring) == RatFn.new(-ring.one, v1 - v2)

    def test_index_bounds(self):
        """Test rejecting indices outside 1..n."""
        with pytest.raises(InputError, match="alpha must be between 1 and 3"):
            closed_minor(3, 4, 1)
        with pytest.raises(InputError, match="n must be at least 1"):
            elementary_matrix(0)


class TestGm1nClosedForms:
    """Test du/dx and e for G(m,1,n)."""

    def test_du_dx(self):
        """Test the first row of du/dx for G(3,1,2)."""
        ring = make_ring(["u1", "u2"])
        u1, u2 = ring.gens
        assert closed_du_dx(3, 2, 1, 1, ring) == RatFn.new(-ring.one, 3 * u1 ** 2 * (u1 ** 3 - u2 ** 3))
        assert closed_du_dx(3, 2, 1, 2, ring) == RatFn.new(u1, 3 * (u1 ** 3 - u2 ** 3))

    @pytest.mark.parametrize("m", [3, 4])
    def test_e_field(self, m):
        """Test e^1 = -1/(m u1^(m-1) (u1^m - u2^m)) for n = 2."""
        ring = make_ring(["u1", "u2"])
        u1, u2 = ring.gens
        e = closed_e_field(m, 2, ring)
        assert e[0] == RatFn.new(-ring.one, m * u1 ** (m - 1) * (u1 ** m - u2 ** m))
        assert e[1] == RatFn.new(-ring.one, m * u2 ** (m - 1) * (u2 ** m - u1 ** m))

    def test_parameter_bounds(self):
        """Test rejecting m < 3 or n < 2."""
        with pytest.raises(InputError, match="m >= 3 and n >= 2"):
            closed_e_field(2, 2)
        with pytest.raises(InputError, match="m >= 3 and n >= 2"):
            appendix_entries(3, 1)


class TestOracles:
    """Test closed forms against their oracles."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_elementary_recursion(self, n):
        """Test the elementary symmetric recursion."""
        check = check_elementary_recursion(n)
        assert check.passed
        assert check.id == "appendix:elementary-recursion"

    @pytest.mark.parametrize("n", [1, 2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
    def test_elementary_matrix_alone(self, n):
        """Test det, every minor and the inverse of E(v) for sizes 1 to 5."""
        entries = elementary_matrix_entries(n)
        assert len(entries) == 1 + 3 * n * n
        assert all(entry.matches for entry in entries)
        checks = elementary_matrix_checks(n)
        assert [check.id for check in checks] == [
            "appendix:det",
            "appendix:minor",
            "appendix:inverse",
            "appendix:E-times-inverse",
            "appendix:elementary-recursion",
        ]
        assert all(check.passed for check in checks)

    def test_size_one(self):
        """Test that E(v) is [[1]] for n = 1."""
        entries = elementary_matrix_entries(1)
        assert [entry.to_dict()["closed"] for entry in entries] == ["1", "1", "1", "1"]

    def test_entry_mismatch(self):

        """Test that a wrong closed value is reported."""
        ring = make_ring(["v1"])
        entry = OracleEntry("det", "()", RatFn.constant(ring, 2), RatFn.constant(ring, 1))
        assert not entry.matches
        assert entry.to_dict() == {"quantity": "det", "index": "()", "closed": "2", "oracle": "1", "match": False}

    def test_g312(self):
        """Test every family for G(3,1,2)."""
        checks = appendix_checks(3, 2)
        assert [check.id for check in checks] == [
            "appendix:det",
            "appendix:minor",
            "appendix:inverse",
            "appendix:E-times-inverse",
            "appendix:du_dx",
            "appendix:e",
            "appendix:elementary-recursion",
        ]
        assert all(check.passed for check in checks)

    def test_report(self):
        """Test the report document."""
        report = appendix_report(3, 2)
        assert report.group == "G3_1_2"
        assert report.command == "appendix"
        assert report.all_passed
        # det, 4 minors, 4 inverse entries, 4 products, 4 du/dx entries and 2 e components
        assert len(report.data["entries"]) == 19
        assert all(entry["match"] for entry in report.data["entries"])


@pytest.mark.slow
class TestLargerCases:
    """Oracle suites beyond rank 2."""

    @pytest.mark.parametrize("m,n", [(3, 3), (4, 2), (4, 3)])
    def test_all_families(self, m, n):
        """Test every family."""
        assert all(check.passed for check in appendix_checks(m, n))
