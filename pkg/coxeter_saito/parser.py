"""
Parser module for polynomial expressions and group-spec files.

Grammar (whitespace insignificant, no implicit multiplication):

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | power
    power   := primary ('^' INT)?
    primary := INT ('/' INT)? | IDENT | '(' expr ')'
"""

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from sympy import QQ
from sympy.polys.rings import PolyElement

from .algebra import RatFn, make_ring, total_degree, weighted_degree
from .catalog import GroupSpec, validate_group_spec
from .utils import (
    REPORT_SCHEMA_VERSION,
    ExpressionSyntaxError,
    InputError,
    check_degree,
    default_variables,
)

logger = logging.getLogger(__name__)

_TOKEN_PATTERN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))", re.DOTALL)

_SYMBOLS = set("+-*/^()")

_SPEC_KEYS = {"schema", "name", "rank", "variables", "invariants", "degrees"}


@dataclass(frozen=True)
class Token:
    """A lexical token with its 1-based source position."""

    kind: str
    text: str
    line: int
    column: int


def tokenize(source: str) -> List[Token]:
    """
    Split an expression into INT, IDENT and symbol tokens.

    Raises:
        ExpressionSyntaxError: On a character outside the grammar
    """
    tokens: List[Token] = []
    line, line_start = 1, 0
    pos = 0

    while pos < len(source):
        # Track newlines inside the skipped whitespace
        while pos < len(source) and source[pos].isspace():
            if source[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1
        if pos >= len(source):
            break

        match = _TOKEN_PATTERN.match(source, pos)
        number, ident, symbol = match.groups()
        start = match.start(1) if number else match.start(2) if ident else match.start(3)
        column = start - line_start + 1
        if number:
            tokens.append(Token("INT", number, line, column))
        elif ident:
            tokens.append(Token("IDENT", ident, line, column))
        elif symbol in _SYMBOLS:
            tokens.append(Token(symbol, symbol, line, column))
        else:
            raise ExpressionSyntaxError(f"Unexpected character '{symbol}'", line, column)
        pos = match.end()

    column = pos - line_start + 1
    tokens.append(Token("EOF", "", line, column))
    return tokens


class ExpressionParser:
    """Recursive-descent parser producing polynomials over a fixed variable list."""

    def __init__(self, variables: Sequence[str]):
        """
        Initialize parser for a variable list.

        Args:
            variables: Declared variable names, in ring order
        """
        self.ring = make_ring(variables)
        self._names = {name: gen for name, gen in zip(variables, self.ring.gens)}
        self._tokens: List[Token] = []
        self._index = 0

    def parse(self, source: str) -> PolyElement:
        """
        Parse one expression.

        Args:
            source: Expression text

        Returns:
            The polynomial it denotes

        Raises:
            ExpressionSyntaxError: On any syntax error or unknown variable
        """
        self._tokens = tokenize(source)
        self._index = 0
        if self._peek().kind == "EOF":
            self._fail("Empty expression")
        result = self._expr()
        if self._peek().kind != "EOF":
            self._fail(f"Unexpected '{self._peek().text}'")
        return result

    def _peek(self) -> Token:
        return self._tokens[self._index]

    def _advance(self) -> Token:
        token = self._tokens[self._index]
        self._index += 1
        return token

    def _fail(self, message: str, token: Optional[Token] = None) -> None:
        token = token or self._peek()
        raise ExpressionSyntaxError(message, token.line, token.column)

    def _expect(self, kind: str, message: str) -> Token:
        if self._peek().kind != kind:
            found = self._peek().text or "end of input"
            self._fail(f"{message}, found '{found}'")
        return self._advance()

    def _expr(self) -> PolyElement:
        result = self._term()
        while self._peek().kind in ("+", "-"):
            op = self._advance().kind
            right = self._term()
            result = result + right if op == "+" else result - right
        return result

    def _term(self) -> PolyElement:
        result = self._unary()
        while self._peek().kind == "*":
            self._advance()
            result = result * self._unary()
            check_degree(total_degree(result), "parsed expression")
        return result

    def _unary(self) -> PolyElement:
        if self._peek().kind == "-":
            self._advance()
            return -self._unary()
        return self._power()

    def _power(self) -> PolyElement:
        base = self._primary()
        if self._peek().kind != "^":
            return base
        self._advance()
        token = self._peek()
        if token.kind != "INT":
            self._fail("Exponent must be a non-negative integer literal")
        self._advance()
        exponent = int(token.text)
        # constant bases count as degree 1 so the exponent itself stays bounded
        check_degree(max(total_degree(base), 1) * exponent, "parsed expression")
        return base ** exponent

    def _primary(self) -> PolyElement:
        token = self._peek()
        if token.kind == "INT":
            self._advance()
            numerator = int(token.text)
            if self._peek().kind == "/":
                self._advance()
                den_token = self._expect("INT", "Expected an integer denominator")
                denominator = int(den_token.text)
                if denominator == 0:
                    self._fail("Zero denominator in rational literal", den_token)
                return self.ring.ground_new(QQ(numerator, denominator))
            return self.ring.ground_new(numerator)
        if token.kind == "IDENT":
            self._advance()
            if token.text not in self._names:
                self._fail(f"Unknown variable '{token.text}'", token)
            return self._names[token.text]
        if token.kind == "(":
            self._advance()
            inner = self._expr()
            self._expect(")", "Expected ')'")
            return inner
        found = token.text or "end of input"
        self._fail(f"Expected a number, variable or '(', found '{found}'")


def parse_poly(source: str, variables: Sequence[str]) -> PolyElement:
    """
    Convenience function to parse a polynomial expression.

    Args:
        source: Expression text
        variables: Declared variable names

    Returns:
        Poly over QQ[variables]
    """
    return ExpressionParser(variables).parse(source)


def _format_coefficient(coeff) -> str:
    numerator, denominator = QQ.numer(coeff), QQ.denom(coeff)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def _format_monomial(names: Sequence[str], monom) -> str:
    factors = []
    for name, exponent in zip(names, monom):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return "*".join(factors)


def format_poly(p: PolyElement) -> str:
    """
    Canonical printer: grlex-descending terms, coefficients "a" or "a/b".

    parse_poly(format_poly(p), variables) == p for every p.
    """
    if not p:
        return "0"
    names = [str(symbol) for symbol in p.ring.symbols]
    pieces: List[str] = []
    for index, (monom, coeff) in enumerate(p.terms()):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        monomial = _format_monomial(names, monom)
        if not monomial:
            body = _format_coefficient(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{_format_coefficient(magnitude)}*{monomial}"
        if index == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def format_ratfn(f: RatFn) -> str:
    """Print a rational function as num/den, parenthesizing compound parts."""
    if f.den == f.ring.one:
        return format_poly(f.num)
    num = format_poly(f.num)
    den = format_poly(f.den)
    if len(f.num) > 1 or "/" in num:
        num = f"({num})"
    if len(f.den) > 1 or any(ch in den for ch in "*/-"):
        den = f"({den})"
    return f"{num}/{den}"


def format_value(value: Union[RatFn, PolyElement]) -> str:
    """Print either a RatFn or a Poly."""
    if isinstance(value, RatFn):
        return format_ratfn(value)
    return format_poly(value)


def _read_spec_source(source: Union[str, Path, Dict[str, Any]]) -> Dict[str, Any]:
    """Decode a group spec from a dict, an inline JSON string or a file path."""
    if isinstance(source, dict):
        return source
    text = str(source)
    try:
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            path = Path(text)
            if not path.exists():
                raise InputError(f"Group spec file not found: {text}")
            with open(path, "r") as f:
                data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"Invalid group spec JSON: {str(e)}") from e
    if not isinstance(data, dict):
        raise InputError("Group spec must be a JSON object")
    return data


def load_group_spec(source: Union[str, Path, Dict[str, Any]]) -> GroupSpec:
    """
    Load and validate a custom group spec.

    Args:
        source: File path, inline JSON text, or decoded dict with keys
            schema, name, rank, variables, invariants, degrees

    Returns:
        Validated GroupSpec (family "custom")

    Raises:
        InputError: On schema errors, syntax errors, non-homogeneous or
            dependent invariants, or degree mismatches
    """
    data = _read_spec_source(source)

    unknown = set(data) - _SPEC_KEYS
    if unknown:
        raise InputError(f"Unknown group spec keys: {sorted(unknown)}. Allowed keys: {sorted(_SPEC_KEYS)}")
    if data.get("schema", REPORT_SCHEMA_VERSION) != REPORT_SCHEMA_VERSION:
        raise InputError(f"Unsupported group spec schema: {data.get('schema')}")

    rank = data.get("rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise InputError(f"rank must be a positive integer, got {rank!r}")
    name = data.get("name", "custom")
    if not isinstance(name, str):
        raise InputError(f"name must be a string, got {name!r}")

    variables = data.get("variables") or default_variables(rank)
    if not isinstance(variables, list) or len(variables) != rank or not all(isinstance(v, str) for v in variables):
        raise InputError(f"Expected {rank} variable names, got {variables}")

    invariant_sources = data.get("invariants")
    if not isinstance(invariant_sources, list) or len(invariant_sources) != rank:
        raise InputError(f"Expected exactly {rank} invariants, got {invariant_sources!r}")

    parser = ExpressionParser(variables)
    invariants = []
    for index, text in enumerate(invariant_sources, start=1):
        if not isinstance(text, str):
            raise InputError(f"Invariant {index} must be a string, got {text!r}")
        try:
            invariants.append(parser.parse(text))
        except ExpressionSyntaxError as e:
            raise ExpressionSyntaxError(f"Invariant {index}: {e.message}", e.line, e.column) from e

    degrees = []
    for index, p in enumerate(invariants, start=1):
        degree = weighted_degree(p, [1] * rank)
        if degree is None or degree < 1:
            raise InputError(f"Invariant {index} is not homogeneous of positive degree: {format_poly(p)}")
        degrees.append(degree)

    declared = data.get("degrees")
    if declared is not None:
        if not isinstance(declared, list) or not all(
            isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in declared
        ):
            raise InputError(f"degrees must be a list of positive integers, got {declared!r}")
        if declared != degrees:
            raise InputError(f"Declared degrees {declared} do not match computed degrees {degrees}")

    spec = GroupSpec(
        name=name,
        rank=rank,
        variables=tuple(variables),
        invariants=tuple(invariants),
        degrees=tuple(degrees),
        family="custom",
    )
    validate_group_spec(spec)
    logger.info(f"Loaded group spec '{name}' of rank {rank} with degrees {tuple(degrees)}")
    return spec
