"""
Unit tests for the expression parser and group-spec loading.
"""

import json

import pytest
from sympy import QQ

from coxeter_saito.algebra import RatFn, make_ring
from coxeter_saito.parser import (
    ExpressionParser,
    format_poly,
    format_ratfn,
    load_group_spec,
    parse_poly,
    tokenize,
)
from coxeter_saito.utils import DEFAULT_MAX_DEGREE, DegreeGuardError, ExpressionSyntaxError, InputError, set_max_degree


VARIABLES = ["u1", "u2"]


@pytest.fixture
def ring():
    return make_ring(VARIABLES)


class TestTokenize:
    """Test tokenizing."""

    def test_tokens_and_positions(self):
        """Test token kinds and 1-based columns."""
        tokens = tokenize("u1^3 + 2")
        assert [token.kind for token in tokens] == ["IDENT", "^", "INT", "+", "INT", "EOF"]
        assert tokens[0].column == 1
        assert tokens[3].column == 6

    def test_newlines(self):
        """Test line tracking across newlines."""
        tokens = tokenize("u1 +\n  u2")
        assert tokens[2].line == 2
        assert tokens[2].column == 3

    def test_bad_character(self):
        """Test rejecting characters outside the grammar."""
        with pytest.raises(ExpressionSyntaxError, match="Unexpected character '#'") as info:
            tokenize("u1 # u2")
        assert info.value.column == 4


class TestParsePoly:
    """Test recursive-descent parsing."""

    def test_precedence(self, ring):
        """Test operator precedence and unary minus."""
        u1, u2 = ring.gens
        assert parse_poly("u1 + u2*u1^2", VARIABLES) == u1 + u2 * u1 ** 2
        assert parse_poly("-u1^2", VARIABLES) == -(u1 ** 2)
        assert parse_poly("(u1 - u2)^2", VARIABLES) == u1 ** 2 - 2 * u1 * u2 + u2 ** 2
        assert parse_poly("u1 - u2 - u1", VARIABLES) == -u2

    def test_rational_coefficients(self, ring):
        """Test rational literals."""
        u1, _ = ring.gens
        assert parse_poly("3/4*u1", VARIABLES) == u1 * QQ(3, 4)
        assert parse_poly("0", VARIABLES) == ring.zero

    def test_errors(self):
        """Test syntax errors with positions."""
        with pytest.raises(ExpressionSyntaxError, match="Unknown variable 'x'"):
            parse_poly("u1 + x", VARIABLES)
        with pytest.raises(ExpressionSyntaxError, match="Empty expression"):
            parse_poly("   ", VARIABLES)
        with pytest.raises(ExpressionSyntaxError, match="Zero denominator"):
            parse_poly("1/0", VARIABLES)
        with pytest.raises(ExpressionSyntaxError, match="Exponent"):
            parse_poly("u1^u2", VARIABLES)
        with pytest.raises(ExpressionSyntaxError, match="Expected '\\)'"):
            parse_poly("(u1 + u2", VARIABLES)
        with pytest.raises(ExpressionSyntaxError, match="Unexpected"):
            parse_poly("u1 u2", VARIABLES)

    def test_error_column(self):
        """Test the reported column of an unknown variable."""
        with pytest.raises(ExpressionSyntaxError) as info:
            ExpressionParser(VARIABLES).parse("u1 * y2")
        assert info.value.line == 1
        assert info.value.column == 6

    def test_degree_guard(self):
        """Test that the degree guard stops huge powers."""
        set_max_degree(10)
        try:
            with pytest.raises(DegreeGuardError):
                parse_poly("u1^11", VARIABLES)
            with pytest.raises(DegreeGuardError):
                parse_poly("2^100000000", VARIABLES)
        finally:
            set_max_degree(DEFAULT_MAX_DEGREE)


class TestFormat:
    """Test canonical printing."""

    def test_format_poly(self, ring):
        """Test term order, signs and coefficients."""
        u1, u2 = ring.gens
        assert format_poly(ring.zero) == "0"
        assert format_poly(u1 ** 2 - 2 * u1 * u2 + 1) == "u1^2 - 2*u1*u2 + 1"
        assert format_poly(-u2 * QQ(1, 3)) == "-1/3*u2"

    def test_format_round_trip(self, ring):
        """Test that printing then parsing returns the same polynomial."""
        u1, u2 = ring.gens
        p = u1 ** 3 * QQ(-5, 7) + u2 ** 2 - u1 + 4
        assert parse_poly(format_poly(p), VARIABLES) == p

    def test_format_ratfn(self, ring):
        """Test num/den printing with parentheses."""
        u1, u2 = ring.gens
        assert format_ratfn(RatFn.new(u1, u2)) == "u1/u2"
        assert format_ratfn(RatFn.new(ring.one, u1 - u2)) == "1/(u1 - u2)"
        assert format_ratfn(RatFn.new(u1 + u2, u1 * u2)) == "(u1 + u2)/(u1*u2)"
        assert format_ratfn(RatFn.from_poly(u1 + 1)) == "u1 + 1"


class TestLoadGroupSpec:
    """Test group-spec loading."""

    def test_load_dict(self):
        """Test loading a spec from a dict."""
        g = load_group_spec({"rank": 2, "name": "b2", "invariants": ["u1^2*u2^2", "u1^2 + u2^2"]})
        assert g.name == "b2"
        assert g.degrees == (4, 2)
        assert g.family == "custom"
        assert g.variables == ("u1", "u2")

    def test_load_file(self, tmp_path):
        """Test loading a spec file."""
        path = tmp_path / "g312.json"
        path.write_text(json.dumps({
            "schema": 1,
            "name": "g312",
            "rank": 2,
            "variables": ["a", "b"],
            "invariants": ["a^3*b^3", "a^3 + b^3"],
            "degrees": [6, 3],
        }))
        g = load_group_spec(str(path))
        assert g.degrees == (6, 3)
        assert g.variables == ("a", "b")

    def test_load_inline_json(self):
        """Test loading inline JSON text."""
        g = load_group_spec('{"rank": 1, "invariants": ["u1^5"]}')
        assert g.degrees == (5,)

    def test_missing_file(self, tmp_path):
        """Test a missing spec file."""
        with pytest.raises(InputError, match="not found"):
            load_group_spec(str(tmp_path / "missing.json"))

    def test_invalid_specs(self):
        """Test spec validation errors."""
        with pytest.raises(InputError, match="Unknown group spec keys"):
            load_group_spec({"rank": 1, "invariants": ["u1"], "color": "red"})
        with pytest.raises(InputError, match="rank"):
            load_group_spec({"rank": 0, "invariants": []})
        with pytest.raises(InputError, match="Expected exactly 2 invariants"):
            load_group_spec({"rank": 2, "invariants": ["u1^2 + u2^2"]})
        with pytest.raises(InputError, match="not homogeneous"):
            load_group_spec({"rank": 2, "invariants": ["u1^2*u2^2", "u1^2 + u2"]})
        with pytest.raises(InputError, match="do not match"):
            load_group_spec({"rank": 2, "invariants": ["u1^2*u2^2", "u1^2 + u2^2"], "degrees": [2, 4]})
        with pytest.raises(InputError, match="descending"):
            load_group_spec({"rank": 2, "invariants": ["u1^2 + u2^2", "u1^2*u2^2"]})
        with pytest.raises(InputError, match="algebraically dependent"):
            load_group_spec({"rank": 2, "invariants": ["(u1^2 + u2^2)^2", "u1^2 + u2^2"]})
        with pytest.raises(InputError, match="degrees must be a list of positive integers"):
            load_group_spec({"rank": 1, "invariants": ["u1^5"], "degrees": 5})
        with pytest.raises(InputError, match="degrees must be a list of positive integers"):
            load_group_spec({"rank": 1, "invariants": ["u1^5"], "degrees": ["5"]})
        with pytest.raises(InputError, match="Expected 1 variable names"):
            load_group_spec({"rank": 1, "variables": 7, "invariants": ["u1^5"]})
        with pytest.raises(InputError, match="Expected 2 variable names"):
            load_group_spec({"rank": 2, "variables": "xy", "invariants": ["x^2*y^2", "x^2 + y^2"]})

    def test_invariant_syntax_error(self):
        """Test syntax errors name the invariant."""
        with pytest.raises(ExpressionSyntaxError, match="Invariant 2: Unknown variable 'v'"):
            load_group_spec({"rank": 2, "invariants": ["u1^2*u2^2", "u1^2 + v^2"]})
