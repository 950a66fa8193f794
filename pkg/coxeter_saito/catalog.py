"""
Group catalog: built-in Coxeter and Shephard groups and their classification.
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from sympy.polys.rings import PolyElement, PolyRing

from .algebra import RatFnMatrix, determinant, make_ring, substitute, weighted_degree
from .utils import InputError, default_variables, elementary_symmetric

logger = logging.getLogger(__name__)

# Family tag -> (required parameters, lower bounds)
ALLOWED_FAMILIES = {
    "Zm": {"m": 2},
    "Gm1n": {"m": 3, "n": 2},
    "Gmmn": {"m": 3, "n": 3},
    "A": {"n": 2},
    "B": {"n": 2},
    "D": {"n": 4},
    "I2": {"m": 5},
}

# Catalog name patterns accepted on the command line
_NAME_PATTERNS = [
    (re.compile(r"^Zm:(\d+)$"), "Zm"),
    (re.compile(r"^Z(\d+)$"), "Zm"),
    (re.compile(r"^I2[:_](\d+)$"), "I2"),
    (re.compile(r"^G(\d+)_(\d+)_(\d+)$"), "G"),
    (re.compile(r"^A(\d+)$"), "A"),
    (re.compile(r"^B(\d+)$"), "B"),
    (re.compile(r"^D(\d+)$"), "D"),
]


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A reflection group presented by its basic invariants in u."""

    name: str
    rank: int
    variables: Tuple[str, ...]
    invariants: Tuple[PolyElement, ...]
    degrees: Tuple[int, ...]
    family: str = "custom"
    params: Tuple[Tuple[str, int], ...] = ()
    codegrees: Optional[Tuple[int, ...]] = None

    @property
    def ring(self) -> PolyRing:
        return self.invariants[0].ring

    def param(self, key: str) -> Optional[int]:
        return dict(self.params).get(key)


@dataclass(frozen=True)
class Generator:
    """
    One generator of the group action on u.

    kind "substitution" carries linear images of the variables; kind
    "congruence" stands for the diagonal action u_i -> zeta^w_i u_i with
    zeta a primitive modulus-th root of unity, which fixes a monomial iff
    its weighted exponent sum is divisible by modulus.
    """

    kind: str
    description: str
    images: Optional[Tuple[PolyElement, ...]] = None
    weights: Optional[Tuple[int, ...]] = None
    modulus: Optional[int] = None

    def fixes(self, p: PolyElement) -> bool:
        if self.kind == "substitution":
            return substitute(p, self.images, p.ring) == p
        return all(
            sum(w * e for w, e in zip(self.weights, monom)) % self.modulus == 0
            for monom in p.itermonoms()
        )


def _check_params(family: str, params: Dict[str, int]) -> None:
    if family not in ALLOWED_FAMILIES:
        raise InputError(f"Invalid family: {family}. Allowed families: {list(ALLOWED_FAMILIES.keys())}")
    bounds = ALLOWED_FAMILIES[family]
    missing = [key for key in bounds if params.get(key) is None]
    if missing:
        raise InputError(f"Family {family} requires parameters {missing}")
    for key, lower in bounds.items():
        value = params[key]
        if not isinstance(value, int) or value < lower:
            raise InputError(f"Parameter {key}={value} out of range for {family} (need {key} >= {lower})")


def _power_sums_basis(ring: PolyRing, m: int) -> List[PolyElement]:
    return [gen ** m for gen in ring.gens]


def _duality_codegrees(degrees: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(degrees[0] - d for d in degrees)


def make_group(family: str, m: Optional[int] = None, n: Optional[int] = None) -> GroupSpec:
    """
    Build a catalog group.

    Args:
        family: One of ALLOWED_FAMILIES
        m: Order parameter (Zm, Gm1n, Gmmn, I2)
        n: Rank parameter (Gm1n, Gmmn, A, B, D); A takes n for A_{n-1}

    Returns:
        Validated GroupSpec with codegrees d_1 - d_a

    Raises:
        InputError: If the family is unknown or a parameter is out of range
    """
    params = {key: value for key, value in (("m", m), ("n", n)) if value is not None}
    _check_params(family, params)

    if family == "Zm":
        ring = make_ring(default_variables(1))
        invariants = [ring.gens[0] ** m]
        name = f"Z{m}"
    elif family in ("Gm1n", "B"):
        order = 2 if family == "B" else m
        ring = make_ring(default_variables(n))
        powers = _power_sums_basis(ring, order)
        invariants = [elementary_symmetric(powers, n + 1 - a, ring.one) for a in range(1, n + 1)]
        name = f"B{n}" if family == "B" else f"G{m}_1_{n}"
    elif family in ("Gmmn", "D", "I2"):
        order = {"D": 2}.get(family, m)
        rank = {"I2": 2}.get(family, n)
        ring = make_ring(default_variables(rank))
        powers = _power_sums_basis(ring, order)
        candidates = [(order * k, elementary_symmetric(powers, k, ring.one)) for k in range(rank - 1, 0, -1)]
        product = ring.one
        for gen in ring.gens:
            product = product * gen
        candidates.append((rank, product))
        candidates.sort(key=lambda item: -item[0])
        invariants = [poly for _, poly in candidates]
        name = {"D": f"D{n}", "I2": f"I2_{m}"}.get(family, f"G{m}_{m}_{n}")
    else:
        ring = make_ring(default_variables(n - 1))
        roots = list(ring.gens) + [-sum(ring.gens, ring.zero)]
        invariants = [elementary_symmetric(roots, n + 1 - a, ring.one) for a in range(1, n)]
        name = f"A{n - 1}"

    degrees = tuple(weighted_degree(p, [1] * ring.ngens) for p in invariants)
    spec = GroupSpec(
        name=name,
        rank=ring.ngens,
        variables=tuple(str(symbol) for symbol in ring.symbols),
        invariants=tuple(invariants),
        degrees=degrees,
        family=family,
        params=tuple(sorted(params.items())),
        codegrees=_duality_codegrees(degrees),
    )
    validate_group_spec(spec)
    logger.info(f"Built group {name} of rank {spec.rank} with degrees {degrees}")
    return spec


def parse_group_name(name: str) -> Tuple[str, Dict[str, int]]:
    """
    Map a catalog name to (family, params).

    Args:
        name: e.g. "Zm:5", "Z5", "G3_1_2", "G3_3_3", "A2", "B3", "D4", "I2:5"

    Returns:
        Family tag and keyword parameters for make_group

    Raises:
        InputError: If the name matches no catalog pattern
    """
    text = name.strip()
    for pattern, family in _NAME_PATTERNS:
        match = pattern.match(text)
        if not match:
            continue
        values = [int(group) for group in match.groups()]
        if family in ("Zm", "I2"):
            return family, {"m": values[0]}
        if family == "A":
            return "A", {"n": values[0] + 1}
        if family in ("B", "D"):
            return family, {"n": values[0]}
        m, p, n = values
        if p == 1:
            return ("B", {"n": n}) if m == 2 else ("Gm1n", {"m": m, "n": n})
        if p == m:
            if m == 2:
                return "D", {"n": n}
            if n == 2:
                return "I2", {"m": m}
            return "Gmmn", {"m": m, "n": n}
        raise InputError(f"Unsupported group G({m},{p},{n}): only p = 1 and p = m are in the catalog")
    raise InputError(
        f"Invalid group name: {name}. Allowed forms: Zm:<m>, G<m>_1_<n>, G<m>_<m>_<n>, A<n>, B<n>, D<n>, I2:<m>"
    )


def group_from_name(name: str) -> GroupSpec:
    """Convenience wrapper: parse a catalog name and build the group."""
    family, params = parse_group_name(name)
    return make_group(family, **params)


def validate_group_spec(g: GroupSpec) -> None:
    """
    Check homogeneity, degree order and algebraic independence.

    Raises:
        InputError: On any violation
    """
    if len(g.invariants) != g.rank or len(g.degrees) != g.rank or len(g.variables) != g.rank:
        raise InputError(f"Group {g.name}: rank {g.rank} does not match the invariant data")

    weights = [1] * g.rank
    for index, (p, degree) in enumerate(zip(g.invariants, g.degrees), start=1):
        if weighted_degree(p, weights) != degree:
            raise InputError(f"Group {g.name}: invariant {index} is not homogeneous of degree {degree}")

    for a in range(g.rank - 1):
        if g.degrees[a] < g.degrees[a + 1]:
            raise InputError(f"Group {g.name}: degrees {g.degrees} must be listed in descending order")
        if g.degrees[a] == g.degrees[a + 1] and g.family == "custom":
            logger.warning(f"Group {g.name}: tied degrees {g.degrees}; flat coordinates will be rejected")

    ring = g.ring
    jacobian = RatFnMatrix.from_rows(ring, [[p.diff(i) for i in range(g.rank)] for p in g.invariants])
    if determinant(jacobian).is_zero():
        raise InputError(f"Group {g.name}: invariants are algebraically dependent (det J = 0)")


def degree_sums(g: GroupSpec) -> np.ndarray:
    """Matrix of d_a + d_b."""
    degrees = np.array(g.degrees, dtype=np.int64)
    return np.add.outer(degrees, degrees)


def classify(g: GroupSpec) -> Dict[str, Optional[bool]]:
    """
    Classification predicates.

    is_cs requires d_a + d_{n+1-a} = d_1 + d_n for every a and non-increasing
    degrees; distinct_degrees is reported on its own because D_4 ties.

    Returns:
        dict with is_duality (None when codegrees are unknown), is_cs,
        is_coxeter and distinct_degrees
    """
    degrees = np.array(g.degrees, dtype=np.int64)
    target = degrees[0] + degrees[-1]
    anti_diagonal = np.fliplr(degree_sums(g)).diagonal()
    non_increasing = bool(np.all(np.diff(degrees) <= 0))
    distinct = bool(np.all(np.diff(degrees) < 0))
    is_cs = bool(np.all(anti_diagonal == target)) and non_increasing

    is_duality: Optional[bool] = None
    if g.codegrees is not None:
        codegrees = np.array(g.codegrees, dtype=np.int64)
        is_duality = bool(np.all(degrees + codegrees == degrees[0]))

    return {
        "is_duality": is_duality,
        "is_cs": is_cs,
        "is_coxeter": is_cs and int(degrees[-1]) == 2,
        "distinct_degrees": distinct,
    }


def degree_inequality_table(g: GroupSpec) -> pd.DataFrame:
    """
    Compare d_a + d_b with d_1 + d_n for every pair.

    Returns:
        DataFrame with columns alpha, beta, sum, target, relation, expected,
        consistent; expected is the relation predicted by a + b vs n + 1
    """
    n = g.rank
    target = g.degrees[0] + g.degrees[-1]
    sums = degree_sums(g)
    rows = []
    for a in range(n):
        for b in range(n):
            value = int(sums[a, b])
            relation = ">" if value > target else "=" if value == target else "<"
            index_sum = a + b + 2
            expected = "<" if index_sum > n + 1 else "=" if index_sum == n + 1 else ">"
            rows.append({
                "alpha": a + 1,
                "beta": b + 1,
                "sum": value,
                "target": target,
                "relation": relation,
                "expected": expected,
                "consistent": relation == expected,
            })
    return pd.DataFrame(rows)


def _transpositions(ring: PolyRing, count: int) -> List[Generator]:
    generators = []
    for i in range(count - 1):
        images = list(ring.gens)
        images[i], images[i + 1] = ring.gens[i + 1], ring.gens[i]
        generators.append(Generator(
            kind="substitution",
            description=f"swap {ring.symbols[i]} <-> {ring.symbols[i + 1]}",
            images=tuple(images),
        ))
    return generators


def group_generators(g: GroupSpec) -> List[Generator]:
    """
    A generating set of the group action for catalog families.

    Custom groups return an empty list.
    """
    ring = g.ring
    n = g.rank
    if g.family == "custom":
        return []
    if g.family == "Zm":
        m = g.param("m")
        return [Generator("congruence", f"u1 -> zeta_{m} u1", weights=(1,), modulus=m)]
    if g.family in ("Gm1n", "B"):
        m = g.param("m") if g.family == "Gm1n" else 2
        weights = (1,) + (0,) * (n - 1)
        return _transpositions(ring, n) + [
            Generator("congruence", f"u1 -> zeta_{m} u1", weights=weights, modulus=m)
        ]
    if g.family in ("Gmmn", "D", "I2"):
        m = 2 if g.family == "D" else g.param("m")
        weights = (1, -1) + (0,) * (n - 2)
        return _transpositions(ring, n) + [
            Generator("congruence", f"(u1, u2) -> (zeta_{m} u1, zeta_{m}^-1 u2)", weights=weights, modulus=m)
        ]
    # A_{n}: permutations of u1..u_{n}, -sum, on the reduced coordinates
    images = list(ring.gens)
    images[-1] = -sum(ring.gens, ring.zero)
    return _transpositions(ring, n) + [
        Generator("substitution", f"swap {ring.symbols[-1]} <-> -(sum of u)", images=tuple(images))
    ]


def check_invariance(g: GroupSpec) -> Optional[str]:
    """
    Substitution test of every invariant against every generator.

    Returns:
        None when all invariants are fixed, otherwise a description of the
        first failure
    """
    for generator in group_generators(g):
        for index, p in enumerate(g.invariants, start=1):
            if not generator.fixes(p):
                return f"x^{index} is not fixed by {generator.description}"
    return None
