"""
Shared utilities for coxeter-saito: constants, exceptions and the degree guard.
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1

DEFAULT_MAX_DEGREE = 200

# Commands accepted by the CLI
ALLOWED_COMMANDS = {
    "catalog": "Group data, classification and degree inequality table",
    "geometry": "Jacobian, e, Q, Hessian metric and Levi-Civita connection in u",
    "natural": "Natural almost Saito structure and its dual Saito structure",
    "cs": "Coxeter-Shephard almost Saito structure",
    "compare": "Compare the two multiplications and the two connections",
    "flat": "Flat coordinates t and s with the matrix invariants",
    "classify": "Decide whether the natural Saito structure admits a compatible metric",
    "verify": "Run axiom checkers",
    "appendix": "Closed forms for G(m,1,n) against brute-force oracles",
}

# Axiom sets accepted by --axioms
ALLOWED_AXIOM_SETS = {
    "ass-natural": "ASS1-ASS4 for the trivial connection and the natural multiplication",
    "ass-cs": "ASS1-ASS4 for the Hessian Levi-Civita connection",
    "ss-natural": "SS1-SS4 for the natural Saito structure",
    "ss-cs": "SS1-SS4 for the Coxeter-Shephard Saito structure",
    "af-cs": "af1-af3 for the Hessian metric",
    "f-cs": "f1-f3 for the Coxeter-Shephard Frobenius metric",
}

ALLOWED_FORMATS = ("json", "text")

ALLOWED_EXPECTATIONS = ("same", "differ")

_degree_guard: Dict[str, Optional[int]] = {"max_degree": DEFAULT_MAX_DEGREE}


class InputError(ValueError):
    """Malformed user input: expressions, spec files, group names, flags."""


class ExpressionSyntaxError(InputError):
    """Syntax error in a polynomial expression, with 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class DegreeGuardError(InputError):
    """An intermediate polynomial exceeded the configured total degree."""


class VariableMismatchError(ValueError):
    """Polynomials over different variable lists, or an unknown variable."""


class AlgebraError(ArithmeticError):
    """Base class for failures of an exact algebraic contract."""


class NotDivisibleError(AlgebraError):
    """Exact division left a nonzero remainder."""


class SingularMatrixError(AlgebraError):
    """Matrix determinant is identically zero."""


class IncompatibleError(AlgebraError):
    """Components of a would-be gradient fail the closedness condition."""


class ConsistencyError(AlgebraError):
    """Two independent computations of the same object disagree."""


def set_max_degree(max_degree: Optional[int]) -> None:
    """
    Set the process-wide total degree guard.

    Args:
        max_degree: Largest total degree allowed in numerators and
            denominators, or None to disable the guard

    Raises:
        InputError: If max_degree is not positive
    """
    if max_degree is not None and max_degree < 1:
        raise InputError(f"max_degree must be positive, got {max_degree}")
    _degree_guard["max_degree"] = max_degree
    logger.debug(f"Degree guard set to {max_degree}")


def get_max_degree() -> Optional[int]:
    """Return the current total degree guard (None when disabled)."""
    return _degree_guard["max_degree"]


def check_degree(total_degree: int, where: str = "polynomial") -> None:
    """
    Abort when a total degree exceeds the guard.

    Args:
        total_degree: Total degree of the object being built
        where: Short description used in the error message

    Raises:
        DegreeGuardError: If the guard is set and exceeded
    """
    limit = _degree_guard["max_degree"]
    if limit is not None and total_degree > limit:
        raise DegreeGuardError(
            f"{where} reached total degree {total_degree}, above --max-degree {limit}"
        )


def get_allowed_axiom_sets() -> Set[str]:
    """
    Get the set of axiom-set names accepted by --axioms.

    Returns:
        Set of axiom-set names
    """
    return set(ALLOWED_AXIOM_SETS.keys())


def parse_axiom_sets(spec: Optional[str]) -> List[str]:
    """
    Parse a comma separated --axioms value.

    Args:
        spec: Comma separated axiom-set names, "all", or None for all sets

    Returns:
        Axiom-set names in canonical order

    Raises:
        InputError: If any name is not allowed
    """
    if spec is None or spec.strip() in ("", "all"):
        return list(ALLOWED_AXIOM_SETS.keys())

    names = [name.strip() for name in spec.split(",") if name.strip()]
    invalid = [name for name in names if name not in ALLOWED_AXIOM_SETS]
    if invalid:
        raise InputError(
            f"Invalid axiom sets: {invalid}. "
            f"Allowed axiom sets: {list(ALLOWED_AXIOM_SETS.keys())}"
        )
    return [name for name in ALLOWED_AXIOM_SETS if name in names]


def elementary_symmetric(values: Sequence, k: int, one=1):
    """
    Elementary symmetric polynomial e_k of a sequence of ring elements.

    Args:
        values: Ring elements (polynomials, rationals, ...)
        k: Order, e_0 = one and e_k = 0 for k > len(values)
        one: Multiplicative identity of the ring

    Returns:
        Sum over all k-subsets of the product of their elements
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    total = one - one
    for subset in combinations(values, k):
        term = one
        for value in subset:
            term = term * value
        total = total + term
    return total


def default_variables(rank: int, prefix: str = "u") -> List[str]:
    """Variable names prefix1 ... prefixN."""
    return [f"{prefix}{i}" for i in range(1, rank + 1)]
