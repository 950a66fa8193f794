"""
Exact algebra on top of sympy's sparse polynomial rings.

Poly is sympy's PolyElement over QQ in graded lexicographic order. This
module adds rational functions compared by cross-multiplication, dense
matrices over them, inversion through DomainMatrix, and the homogeneous (Euler
operator) integration used to build flat coordinates.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from .utils import (
    IncompatibleError,
    InputError,
    NotDivisibleError,
    SingularMatrixError,
    VariableMismatchError,
    check_degree,
)

logger = logging.getLogger(__name__)

Poly = PolyElement
PolyGrid = List[List[PolyElement]]

_POLY_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def make_ring(variables: Sequence[str]) -> PolyRing:
    """
    Build the polynomial ring QQ[variables] with graded lexicographic order.

    Args:
        variables: Ordered variable names

    Returns:
        sympy PolyRing (rings with equal variable lists compare equal)

    Raises:
        InputError: If the list is empty or has duplicates
    """
    names = list(variables)
    if not names:
        raise InputError("At least one variable is required")
    if len(set(names)) != len(names):
        raise InputError(f"Duplicate variables: {names}")
    return PolyRing(tuple(names), QQ, grlex)


def variable_names(ring: PolyRing) -> List[str]:
    """Variable names of a ring, in declared order."""
    return [str(symbol) for symbol in ring.symbols]


def variable_index(ring: PolyRing, var: Union[int, str]) -> int:
    """
    Resolve a variable name or 0-based index.

    Raises:
        VariableMismatchError: If the variable is not in the ring
    """
    if isinstance(var, int):
        if 0 <= var < ring.ngens:
            return var
        raise VariableMismatchError(f"Variable index {var} out of range for {variable_names(ring)}")
    names = variable_names(ring)
    if var not in names:
        raise VariableMismatchError(f"Unknown variable '{var}'. Variables: {names}")
    return names.index(var)


def _require_same_ring(a: PolyElement, b: PolyElement) -> None:
    if a.ring != b.ring:
        raise VariableMismatchError(
            f"Variable lists differ: {variable_names(a.ring)} vs {variable_names(b.ring)}"
        )


def poly_arith(a: PolyElement, b: PolyElement, op: str) -> PolyElement:
    """
    Add, subtract or multiply two polynomials over the same variables.

    Args:
        a: Left operand
        b: Right operand
        op: One of "add", "sub", "mul"

    Returns:
        Exact result with no zero coefficients stored

    Raises:
        VariableMismatchError: If the variable lists differ
        ValueError: If op is unknown
    """
    if op not in _POLY_OPS:
        raise ValueError(f"Unknown polynomial operation '{op}'. Allowed: {list(_POLY_OPS)}")
    _require_same_ring(a, b)
    return _POLY_OPS[op](a, b)


def partial_derivative(p: PolyElement, var: Union[int, str]) -> PolyElement:
    """
    Formal partial derivative of p.

    Args:
        p: Polynomial
        var: Variable name or 0-based index

    Returns:
        dp/dvar
    """
    return p.diff(variable_index(p.ring, var))


def total_degree(p: PolyElement) -> int:
    """Total degree (0 for constants and for the zero polynomial)."""
    return max((sum(monom) for monom in p.itermonoms()), default=0)


def weighted_degree(p: PolyElement, weights: Sequence[int]) -> Optional[int]:
    """
    Weighted degree of a homogeneous polynomial.

    Args:
        p: Polynomial
        weights: One positive weight per variable

    Returns:
        The common weighted degree of all terms, or None when p is zero or
        not weighted-homogeneous
    """
    if len(weights) != p.ring.ngens:
        raise VariableMismatchError(f"Expected {p.ring.ngens} weights, got {len(weights)}")
    found = {sum(w * e for w, e in zip(weights, monom)) for monom in p.itermonoms()}
    if len(found) != 1:
        return None
    return found.pop()


def homogeneous_components(p: PolyElement, weights: Sequence[int]) -> Dict[int, PolyElement]:
    """Split p into weighted-homogeneous components keyed by degree."""
    parts: Dict[int, Dict[tuple, object]] = {}
    for monom, coeff in p.iterterms():
        degree = sum(w * e for w, e in zip(weights, monom))
        parts.setdefault(degree, {})[monom] = coeff
    return {degree: p.ring.from_dict(terms) for degree, terms in sorted(parts.items())}


def constant_term(p: PolyElement):
    """Coefficient of the constant monomial."""
    return p.get(p.ring.zero_monom, QQ.zero)


def exact_divide(num: PolyElement, den: PolyElement) -> PolyElement:
    """
    Exact polynomial division.

    Multivariate division with respect to grlex followed by a
    remainder-is-zero check.

    Args:
        num: Dividend
        den: Divisor

    Returns:
        q with num = q * den

    Raises:
        ZeroDivisionError: If den is the zero polynomial
        NotDivisibleError: If the remainder is nonzero
    """
    _require_same_ring(num, den)
    if not den:
        raise ZeroDivisionError("Division by the zero polynomial")
    quotient, remainder = num.div(den)
    if remainder:
        raise NotDivisibleError(f"{num} is not divisible by {den}")
    return quotient


def substitute(p: PolyElement, images: Sequence[PolyElement], target_ring: PolyRing) -> PolyElement:
    """
    Compose p with polynomials: replace variable i of p by images[i].

    Args:
        p: Polynomial to transform
        images: One polynomial of target_ring per variable of p
        target_ring: Ring of the result

    Returns:
        p(images) in target_ring
    """
    if len(images) != p.ring.ngens:
        raise VariableMismatchError(f"Expected {p.ring.ngens} images, got {len(images)}")
    powers: Dict[Tuple[int, int], PolyElement] = {}

    def power(i: int, e: int) -> PolyElement:
        key = (i, e)
        if key not in powers:
            powers[key] = images[i] ** e
        return powers[key]

    result = target_ring.zero
    for monom, coeff in p.iterterms():
        term = target_ring.ground_new(coeff)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


@dataclass(frozen=True, eq=False)
class RatFn:
    """Quotient num/den of polynomials over a common ring."""

    num: PolyElement
    den: PolyElement

    def __post_init__(self):
        _require_same_ring(self.num, self.den)
        if not self.den:
            raise ZeroDivisionError("Rational function with zero denominator")

    __hash__ = None

    @classmethod
    def new(cls, num: PolyElement, den: Optional[PolyElement] = None) -> "RatFn":
        """Build num/den with common factors cancelled and a positive leading denominator."""
        if den is None:
            den = num.ring.one
        _require_same_ring(num, den)
        if not den:
            raise ZeroDivisionError("Rational function with zero denominator")
        p, q = num.cancel(den)
        check_degree(max(total_degree(p), total_degree(q)), "rational function")
        return cls(p, q)

    @classmethod
    def from_poly(cls, p: PolyElement) -> "RatFn":
        return cls(p, p.ring.one)

    @classmethod
    def constant(cls, ring: PolyRing, value) -> "RatFn":
        return cls(ring.ground_new(value), ring.one)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def _coerce(self, other) -> "RatFn":
        if isinstance(other, RatFn):
            _require_same_ring(self.num, other.num)
            return other
        if isinstance(other, PolyElement):
            _require_same_ring(self.num, other)
            return RatFn(other, self.ring.one)
        return RatFn(self.ring.ground_new(other), self.ring.one)

    def __add__(self, other) -> "RatFn":
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RatFn.new(self.num + other.num, self.den)
        return RatFn.new(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.den)

    def __sub__(self, other) -> "RatFn":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFn":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFn":
        other = self._coerce(other)
        if not self.num or not other.num:
            return RatFn(self.ring.zero, self.ring.one)
        if other.num == other.den:
            return self
        if self.num == self.den:
            return other
        return RatFn.new(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFn":
        other = self._coerce(other)
        if not other.num:
            raise ZeroDivisionError("Division by the zero rational function")
        return RatFn.new(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFn":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "RatFn":
        if exponent < 0:
            return RatFn.constant(self.ring, 1) / (self ** (-exponent))
        return RatFn.new(self.num ** exponent, self.den ** exponent)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except (VariableMismatchError, TypeError, ValueError):
            return NotImplemented
        return not (self.num * other.den - other.num * self.den)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self) -> str:
        return f"RatFn({self.num}, {self.den})"

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self):
        """Value of a constant rational function as a QQ element."""
        if not self.is_constant():
            raise ValueError(f"{self!r} is not constant")
        return constant_term(self.num) / constant_term(self.den)

    def as_poly(self) -> PolyElement:
        """
        Certify that self is a polynomial.

        Raises:
            NotDivisibleError: If den does not divide num
        """
        return exact_divide(self.num, self.den)

    def diff(self, var: Union[int, str]) -> "RatFn":
        i = variable_index(self.ring, var)
        if not self.num:
            return self
        if self.den.is_ground:
            return RatFn.new(self.num.diff(i), self.den)
        return RatFn.new(self.num.diff(i) * self.den - self.num * self.den.diff(i), self.den ** 2)

    def pullback(self, images: Sequence[PolyElement], target_ring: PolyRing) -> "RatFn":
        """Substitute polynomials of target_ring for the variables."""
        den = substitute(self.den, images, target_ring)
        if not den:
            raise ZeroDivisionError("Denominator vanishes identically after substitution")
        return RatFn.new(substitute(self.num, images, target_ring), den)


RatLike = Union[RatFn, PolyElement, int]


def to_ratfn(ring: PolyRing, value: RatLike) -> RatFn:
    """Coerce a polynomial, a scalar or a RatFn into a RatFn over ring."""
    if isinstance(value, RatFn):
        _require_same_ring(value.num, ring.one)
        return value
    if isinstance(value, PolyElement):
        _require_same_ring(value, ring.one)
        return RatFn(value, ring.one)
    return RatFn(ring.ground_new(value), ring.one)


def ratfn_equal(a: RatFn, b: RatFn) -> bool:
    """
    Cross-multiplication equality of rational functions.

    Raises:
        VariableMismatchError: If the variable lists differ
    """
    _require_same_ring(a.num, b.num)
    return not (a.num * b.den - b.num * a.den)


@dataclass(frozen=True, eq=False)
class RatFnMatrix:
    """Dense rectangular matrix of rational functions (polynomial matrices included)."""

    ring: PolyRing
    entries: Tuple[Tuple[RatFn, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("Matrix must have at least one row and one column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("Matrix rows have different lengths")

    __hash__ = None

    @classmethod
    def from_rows(cls, ring: PolyRing, rows: Iterable[Iterable[RatLike]]) -> "RatFnMatrix":
        return cls(ring, tuple(tuple(to_ratfn(ring, value) for value in row) for row in rows))

    @classmethod
    def identity(cls, ring: PolyRing, n: int) -> "RatFnMatrix":
        return cls.from_rows(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ring: PolyRing, rows: int, cols: Optional[int] = None) -> "RatFnMatrix":
        cols = rows if cols is None else cols
        return cls.from_rows(ring, [[0] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, ring: PolyRing, values: Sequence[RatLike]) -> "RatFnMatrix":
        n = len(values)
        return cls.from_rows(ring, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            return self.entries[i][j]
        return self.entries[key]

    def column(self, j: int) -> List[RatFn]:
        return [row[j] for row in self.entries]

    def map(self, fn) -> "RatFnMatrix":
        return RatFnMatrix(self.ring, tuple(tuple(fn(value) for value in row) for row in self.entries))

    def _check_shape(self, other: "RatFnMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "RatFnMatrix") -> "RatFnMatrix":
        self._check_shape(other)
        return RatFnMatrix(self.ring, tuple(
            tuple(a + b for a, b in zip(row_a, row_b))
            for row_a, row_b in zip(self.entries, other.entries)
        ))

    def __sub__(self, other: "RatFnMatrix") -> "RatFnMatrix":
        self._check_shape(other)
        return RatFnMatrix(self.ring, tuple(
            tuple(a - b for a, b in zip(row_a, row_b))
            for row_a, row_b in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "RatFnMatrix":
        return self.map(lambda value: -value)

    def __matmul__(self, other: "RatFnMatrix") -> "RatFnMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        zero = RatFn(self.ring.zero, self.ring.one)
        product = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                total = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.num and b.num:
                        total = total + a * b
                row.append(total)
            product.append(tuple(row))
        return RatFnMatrix(self.ring, tuple(product))

    def scale(self, factor: RatLike) -> "RatFnMatrix":
        factor = to_ratfn(self.ring, factor)
        return self.map(lambda value: value * factor)

    def transpose(self) -> "RatFnMatrix":
        return RatFnMatrix(self.ring, tuple(zip(*self.entries)))

    def diff(self, var: Union[int, str]) -> "RatFnMatrix":
        return self.map(lambda value: value.diff(var))

    def commutator(self, other: "RatFnMatrix") -> "RatFnMatrix":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(value.is_zero() for row in self.entries for value in row)

    def first_difference(self, other: "RatFnMatrix") -> Optional[Tuple[int, int]]:
        """0-based (row, col) of the first entry that differs, or None."""
        self._check_shape(other)
        for i in range(self.rows):
            for j in range(self.cols):
                if not ratfn_equal(self.entries[i][j], other.entries[i][j]):
                    return i, j
        return None

    def equals(self, other: "RatFnMatrix") -> bool:
        return self.first_difference(other) is None

    def first_nonzero(self) -> Optional[Tuple[int, int]]:
        for i in range(self.rows):
            for j in range(self.cols):
                if not self.entries[i][j].is_zero():
                    return i, j
        return None

    def to_polys(self) -> PolyGrid:
        """
        Certify every entry is a polynomial.

        Raises:
            NotDivisibleError: If some entry is not polynomial
        """
        return [[value.as_poly() for value in row] for row in self.entries]

    def pullback(self, images: Sequence[PolyElement], target_ring: PolyRing) -> "RatFnMatrix":
        return RatFnMatrix(target_ring, tuple(
            tuple(value.pullback(images, target_ring) for value in row) for row in self.entries
        ))


def _lcm_all(polys: Sequence[PolyElement]) -> PolyElement:
    return reduce(lambda a, b: a.lcm(b), polys)


def _clear_row_denominators(M: RatFnMatrix) -> Tuple[PolyGrid, List[PolyElement]]:
    """Scale each row by the lcm of its denominators: P = diag(m) M."""
    rows: PolyGrid = []
    multipliers: List[PolyElement] = []
    for row in M.entries:
        m = _lcm_all([value.den for value in row])
        rows.append([exact_divide(value.num * m, value.den) for value in row])
        multipliers.append(m)
    return rows, multipliers


def _to_domain_matrix(rows: PolyGrid, ring: PolyRing) -> DomainMatrix:
    return DomainMatrix(rows, (len(rows), len(rows[0])), ring.to_domain())


def matrix_inverse(M: RatFnMatrix) -> RatFnMatrix:
    """
    Exact inverse through sympy's fraction-free solver over QQ[u].

    Rows are first cleared of denominators, P = diag(m) M, and
    DomainMatrix.inv_den gives P^-1 = N / den, so M^-1 = N diag(m) / den.

    Args:
        M: Square matrix of rational functions

    Returns:
        M^-1

    Raises:
        ValueError: If M is not square
        SingularMatrixError: If det M is identically zero
    """
    if not M.is_square():
        raise ValueError(f"Cannot invert a non-square matrix of shape {M.shape}")
    n = M.rows
    ring = M.ring
    rows, multipliers = _clear_row_denominators(M)
    try:
        inverse, den = _to_domain_matrix(rows, ring).inv_den()
    except DMNonInvertibleMatrixError as e:
        raise SingularMatrixError(f"Matrix of shape {M.shape} is singular") from e
    entries = inverse.to_list()
    return RatFnMatrix(ring, tuple(
        tuple(RatFn.new(entries[i][j] * multipliers[j], den) for j in range(n))
        for i in range(n)
    ))


def determinant(M: RatFnMatrix) -> RatFn:
    """Determinant through DomainMatrix.det (Bareiss over QQ[u]) after clearing row denominators."""
    if not M.is_square():
        raise ValueError(f"Determinant of a non-square matrix of shape {M.shape}")
    ring = M.ring
    rows, multipliers = _clear_row_denominators(M)
    det = _to_domain_matrix(rows, ring).det()
    scale = reduce(lambda a, b: a * b, multipliers, ring.one)
    return RatFn.new(det, scale)



def _minor_matrix(M: RatFnMatrix, row: int, col: int) -> RatFnMatrix:
    return RatFnMatrix(M.ring, tuple(
        tuple(value for j, value in enumerate(entries) if j != col)
        for i, entries in enumerate(M.entries) if i != row
    ))


def cofactor_determinant(M: RatFnMatrix) -> RatFn:
    """Determinant by Laplace expansion along the first row (oracle, small n only)."""
    if not M.is_square():
        raise ValueError(f"Determinant of a non-square matrix of shape {M.shape}")
    if M.rows == 1:
        return M[0, 0]
    total = RatFn(M.ring.zero, M.ring.one)
    for j in range(M.cols):
        entry = M[0, j]
        if entry.is_zero():
            continue
        term = entry * cofactor_determinant(_minor_matrix(M, 0, j))
        total = total - term if j % 2 else total + term
    return total


def minor(M: RatFnMatrix, row: int, col: int) -> RatFn:
    """Determinant of M with the given 0-based row and column deleted."""
    if M.rows == 1:
        return RatFn.constant(M.ring, 1)
    return cofactor_determinant(_minor_matrix(M, row, col))


def adjugate_inverse(M: RatFnMatrix) -> RatFnMatrix:
    """
    Inverse as adjugate over determinant (oracle, small n only).

    Raises:
        SingularMatrixError: If the cofactor determinant vanishes
    """
    det = cofactor_determinant(M)
    if det.is_zero():
        raise SingularMatrixError("Matrix is singular: cofactor determinant is zero")
    n = M.rows
    return RatFnMatrix(M.ring, tuple(
        tuple(
            (minor(M, j, i) if (i + j) % 2 == 0 else -minor(M, j, i)) / det
            for j in range(n)
        )
        for i in range(n)
    ))


def euler_integrate(
    components: Sequence[PolyElement],
    degrees: Sequence[int],
    target_degree: int,
) -> PolyElement:
    """
    Recover a homogeneous F from its partial derivatives.

    Uses F = (1/deg F) * sum_a d_a x^a dF/dx^a and re-differentiates the
    candidate to confirm it.

    Args:
        components: components[a] is the wanted dF/dx^a
        degrees: Weight d_a of each variable
        target_degree: Weighted degree of F

    Returns:
        F

    Raises:
        IncompatibleError: If a component has the wrong degree, the
            cross-derivatives differ, or the candidate fails verification
    """
    if target_degree <= 0:
        raise ValueError(f"target_degree must be positive, got {target_degree}")
    if not components:
        raise ValueError("At least one component is required")
    ring = components[0].ring
    n = len(degrees)
    if len(components) != n or ring.ngens != n:
        raise VariableMismatchError(
            f"Expected {ring.ngens} components and degrees, got {len(components)} and {n}"
        )

    for a, component in enumerate(components):
        _require_same_ring(component, ring.one)
        if component and weighted_degree(component, degrees) != target_degree - degrees[a]:
            raise IncompatibleError(
                f"Component {a + 1} is not homogeneous of degree {target_degree - degrees[a]}"
            )

    for a in range(n):
        for b in range(a + 1, n):
            if components[a].diff(b) != components[b].diff(a):
                raise IncompatibleError(f"Cross-derivatives differ for ({a + 1},{b + 1})")

    total = ring.zero
    for a, component in enumerate(components):
        if component:
            total = total + ring.gens[a] * component * degrees[a]
    candidate = total.mul_ground(QQ(1, target_degree))

    for a, component in enumerate(components):
        if candidate.diff(a) != component:
            raise IncompatibleError(f"Integrated candidate fails verification at component {a + 1}")
    return candidate


def unitriangular_inverse(X: PolyGrid) -> PolyGrid:
    """
    Inverse of an upper unitriangular polynomial matrix by back substitution.

    Raises:
        ValueError: If X is not upper unitriangular
    """
    n = len(X)
    ring = X[0][0].ring
    for i in range(n):
        if X[i][i] != ring.one or any(X[i][j] for j in range(i)):
            raise ValueError("Matrix is not upper unitriangular")
    Y = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    for j in range(n):
        for i in range(j - 1, -1, -1):
            total = ring.zero
            for k in range(i + 1, j + 1):
                if X[i][k] and Y[k][j]:
                    total = total + X[i][k] * Y[k][j]
            Y[i][j] = -total
    return Y


def solve_unitriangular_gauge(
    connection: Sequence[PolyGrid],
    degrees: Sequence[int],
) -> PolyGrid:
    """
    Solve d_a X + G_a X = 0 for upper unitriangular X, column by column.

    For a fixed column b, entries are found from row b-1 up to row 1; each
    step is one euler_integrate call on
    -sum_{c > r} G_a[r][c] X[c][b].

    Args:
        connection: connection[a][r][c], strictly upper triangular polynomials
        degrees: Strictly descending weights of the coordinates

    Returns:
        X as a grid of polynomials

    Raises:
        IncompatibleError: If some step fails to integrate
    """
    n = len(degrees)
    ring = connection[0][0][0].ring
    X = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]

    for b in range(n):
        for r in range(b - 1, -1, -1):
            target = degrees[r] - degrees[b]
            if target <= 0:
                raise IncompatibleError(
                    f"Degrees must be strictly descending, got d_{r + 1}={degrees[r]}, d_{b + 1}={degrees[b]}"
                )
            components = []
            for a in range(n):
                total = ring.zero
                for c in range(r + 1, b + 1):
                    if connection[a][r][c] and X[c][b]:
                        total = total + connection[a][r][c] * X[c][b]
                components.append(-total)
            X[r][b] = euler_integrate(components, degrees, target)
            logger.debug(f"Gauge entry ({r + 1},{b + 1}) = {X[r][b]}")
    return X


def _weighted_exponents(degrees: Sequence[int], target: int) -> List[Tuple[int, ...]]:
    """All exponent vectors a with sum a_i d_i = target, in a fixed order."""
    found: List[Tuple[int, ...]] = []

    def extend(prefix: List[int], remaining: int) -> None:
        i = len(prefix)
        if i == len(degrees):
            if remaining == 0:
                found.append(tuple(prefix))
            return
        for e in range(remaining // degrees[i], -1, -1):
            extend(prefix + [e], remaining - e * degrees[i])

    extend([], target)
    return found


def express_in_basis(
    p: PolyElement,
    basis: Sequence[PolyElement],
    degrees: Sequence[int],
    target_ring: PolyRing,
) -> PolyElement:
    """
    Rewrite p as a polynomial in homogeneous generators.

    Each homogeneous component of p is matched by undetermined coefficients
    against the products of generators of the same degree; the linear system
    is solved exactly over QQ.

    Args:
        p: Polynomial over the generators' ring
        basis: Homogeneous generators (weight 1 per variable of their ring)
        degrees: Degree of each generator
        target_ring: Ring with one variable per generator

    Returns:
        F in target_ring with F(basis) = p

    Raises:
        NotDivisibleError: If p is not in the subalgebra generated by basis
    """
    if target_ring.ngens != len(basis):
        raise VariableMismatchError(f"Expected {len(basis)} target variables, got {target_ring.ngens}")
    if not p:
        return target_ring.zero

    weights = [1] * p.ring.ngens
    result = target_ring.zero
    cache: Dict[Tuple[int, ...], PolyElement] = {}

    for degree, component in homogeneous_components(p, weights).items():
        exponents = _weighted_exponents(degrees, degree)
        if not exponents:
            raise NotDivisibleError(f"No product of generators has degree {degree}")

        images = []
        for exponent in exponents:
            if exponent not in cache:
                cache[exponent] = substitute(target_ring.term_new(exponent, QQ.one), basis, p.ring)
            images.append(cache[exponent])

        monoms = sorted(
            set(component.keys()).union(*(image.keys() for image in images)),
            reverse=True,
        )
        width = len(images) + 1
        rows = [
            [image.get(monom, QQ.zero) for image in images] + [component.get(monom, QQ.zero)]
            for monom in monoms
        ]
        reduced, pivots = DomainMatrix(rows, (len(rows), width), QQ).rref()
        if width - 1 in pivots:
            raise NotDivisibleError(f"Degree-{degree} part is not a polynomial in the generators")
        solved = reduced.to_Matrix()
        for row_index, col in enumerate(pivots):
            coeff = QQ.convert(solved[row_index, width - 1])
            if coeff:
                result = result + target_ring.term_new(exponents[col], coeff)

    return result
