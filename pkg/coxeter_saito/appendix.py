"""
Closed forms for G(m,1,n) and their brute-force oracles.

The matrix E(v) has entries E[a][j] = e_(a-1)(v with v^j removed). Its
determinant, minors and inverse have product formulas; through
v^i = (u^i)^m they give du/dx and the vector field e = d/dx^1 of G(m,1,n)
without any matrix inversion. Every closed form is compared with an
independent computation: cofactor expansion, adjugate inverse or the
generic Jacobian route of the geometry module.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence

from sympy.polys.rings import PolyElement, PolyRing

from .algebra import RatFn, RatFnMatrix, adjugate_inverse, cofactor_determinant, make_ring, minor
from .catalog import make_group
from .geometry import e_field, jacobian
from .parser import format_value
from .report import Check, Report, index_key
from .utils import InputError, default_variables, elementary_symmetric

logger = logging.getLogger(__name__)


@dataclass
class OracleEntry:
    """One closed-form value next to its oracle value."""

    quantity: str
    index: str
    closed: RatFn
    oracle: RatFn

    @property
    def matches(self) -> bool:
        return self.closed == self.oracle

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "index": self.index,
            "closed": format_value(self.closed),
            "oracle": format_value(self.oracle),
            "match": self.matches,
        }


def _v_ring(n: int) -> PolyRing:
    return make_ring(default_variables(n, "v"))


def _check_index(name: str, value: int, n: int) -> None:
    if not 1 <= value <= n:
        raise InputError(f"{name} must be between 1 and {n}, got {value}")


def _difference_product(v: Sequence[PolyElement], one: PolyElement, skip: Optional[int] = None) -> PolyElement:
    """prod_{k<l} (v^k - v^l) over indices other than skip (0-based); empty product is one."""
    total = one
    for k, l in combinations(range(len(v)), 2):
        if skip not in (k, l):
            total = total * (v[k] - v[l])
    return total


def _row_product(v: Sequence[PolyElement], i: int, one: PolyElement) -> PolyElement:
    """prod_{l != i} (v^i - v^l)."""
    total = one
    for l, value in enumerate(v):
        if l != i:
            total = total * (v[i] - value)
    return total


def elementary_matrix(n: int, ring: Optional[PolyRing] = None) -> RatFnMatrix:
    """E(v) with E[a][j] = e_(a-1)(v^1, ..., v^n without v^j)."""
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    ring = ring or _v_ring(n)
    v = ring.gens
    rows = []
    for a in range(n):
        rows.append([
            elementary_symmetric([value for k, value in enumerate(v) if k != j], a, ring.one)
            for j in range(n)
        ])
    return RatFnMatrix.from_rows(ring, rows)


def closed_det(n: int, ring: Optional[PolyRing] = None) -> PolyElement:
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    ring = ring or _v_ring(n)
    return _difference_product(ring.gens, ring.one)


def closed_minor(n: int, alpha: int, j: int, ring: Optional[PolyRing] = None) -> PolyElement:
    """Determinant of E(v) without row alpha and column j (1-based)."""
    _check_index("alpha", alpha, n)
    _check_index("j", j, n)
    ring = ring or _v_ring(n)
    v = ring.gens
    return v[j - 1] ** (n - alpha) * _difference_product(v, ring.one, skip=j - 1)


def closed_inverse_entry(n: int, i: int, alpha: int, ring: Optional[PolyRing] = None) -> RatFn:
    """(i, alpha) entry of E(v)^-1, 1-based."""
    _check_index("i", i, n)
    _check_index("alpha", alpha, n)
    ring = ring or _v_ring(n)
    v = ring.gens
    sign = 1 if (alpha + 1) % 2 == 0 else -1
    return RatFn.new(v[i - 1] ** (n - alpha) * sign, _row_product(v, i - 1, ring.one))


def _require_gm1n(m: int, n: int) -> None:
    if m < 3 or n < 2:
        raise InputError(f"G(m,1,n) closed forms need m >= 3 and n >= 2, got m={m}, n={n}")


def closed_du_dx(m: int, n: int, i: int, alpha: int, ring: Optional[PolyRing] = None) -> RatFn:
    """
    du^i/dx^a for G(m,1,n) with x^a = e_(n+1-a)(u^m).

    (-1)^(n+a) (u^i)^(m(a-2)+1) / (m prod_{l != i} (v^i - v^l)), v = u^m.
    """
    _require_gm1n(m, n)
    _check_index("i", i, n)
    _check_index("alpha", alpha, n)
    ring = ring or make_ring(default_variables(n))
    u = ring.gens
    v = [gen ** m for gen in u]
    exponent = m * (alpha - 2) + 1
    sign = 1 if (n + alpha) % 2 == 0 else -1
    num = ring.one * sign
    den = _row_product(v, i - 1, ring.one) * m
    if exponent >= 0:
        num = num * u[i - 1] ** exponent
    else:
        den = den * u[i - 1] ** (-exponent)
    return RatFn.new(num, den)


def closed_e_field(m: int, n: int, ring: Optional[PolyRing] = None) -> List[RatFn]:
    """e = d/dx^1 for G(m,1,n) in u-coordinates."""
    _require_gm1n(m, n)
    ring = ring or make_ring(default_variables(n))
    u = ring.gens
    v = [gen ** m for gen in u]
    sign = 1 if (n + 1) % 2 == 0 else -1
    return [
        RatFn.new(ring.one * sign, u[k] ** (m - 1) * _row_product(v, k, ring.one) * m)
        for k in range(n)
    ]


def check_elementary_recursion(n: int) -> Check:
    """
    e_a(v without I) = v^l e_(a-1)(v without I, l) + e_a(v without I, l)
    for every index set I and every l outside it.
    """
    ring = _v_ring(n)
    v = ring.gens
    for size in range(n):
        for removed in combinations(range(n), size):
            kept = [k for k in range(n) if k not in removed]
            for l in kept:
                rest = [v[k] for k in kept if k != l]
                for a in range(1, len(kept) + 1):
                    lhs = elementary_symmetric([v[k] for k in kept], a, ring.one)
                    rhs = v[l] * elementary_symmetric(rest, a - 1, ring.one) + elementary_symmetric(rest, a, ring.one)
                    if lhs != rhs:
                        where = f"I = {[k + 1 for k in removed]}, l = {l + 1}, a = {a}"
                        return Check("appendix:elementary-recursion", False, f"fails at {where}")
    return Check("appendix:elementary-recursion", True, f"n = {n}")


def elementary_matrix_entries(n: int, ring: Optional[PolyRing] = None) -> List[OracleEntry]:
    """
    Closed forms of E(v) against cofactor and adjugate oracles.

    Covers the determinant, every minor, every inverse entry and the
    product of E(v) with the closed inverse. Works for any n >= 1.
    """
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    ring = ring or _v_ring(n)
    E = elementary_matrix(n, ring)
    entries = [OracleEntry("det", "()", RatFn.from_poly(closed_det(n, ring)), cofactor_determinant(E))]

    for a in range(n):
        for j in range(n):
            entries.append(OracleEntry(
                "minor", index_key(a, j), RatFn.from_poly(closed_minor(n, a + 1, j + 1, ring)), minor(E, a, j)
            ))

    oracle_inverse = adjugate_inverse(E)
    closed_inverse = RatFnMatrix.from_rows(
        ring, [[closed_inverse_entry(n, i + 1, a + 1, ring) for a in range(n)] for i in range(n)]
    )
    for i in range(n):
        for a in range(n):
            entries.append(OracleEntry("inverse", index_key(i, a), closed_inverse[i, a], oracle_inverse[i, a]))
    product = E @ closed_inverse
    for i in range(n):
        for a in range(n):
            expected = RatFn.constant(ring, 1 if i == a else 0)
            entries.append(OracleEntry("E-times-inverse", index_key(i, a), product[i, a], expected))
    return entries


def appendix_entries(m: int, n: int) -> List[OracleEntry]:
    """Closed forms against oracles for E(v) of size n and for G(m,1,n)."""
    _require_gm1n(m, n)
    entries = elementary_matrix_entries(n)

    g = make_group("Gm1n", m, n)
    Jinv = jacobian(g).Jinv
    for i in range(n):
        for a in range(n):
            entries.append(OracleEntry("du_dx", index_key(i, a), closed_du_dx(m, n, i + 1, a + 1, g.ring), Jinv[i, a]))

    e = e_field(g).e
    for k, value in enumerate(closed_e_field(m, n, g.ring)):
        entries.append(OracleEntry("e", index_key(k), value, e[k]))
    logger.debug(f"Computed {len(entries)} oracle entries for G({m},1,{n})")
    return entries


def _summarise(quantity: str, entries: Sequence[OracleEntry]) -> Check:
    selected = [entry for entry in entries if entry.quantity == quantity]
    bad = next((entry for entry in selected if not entry.matches), None)
    if bad is None:
        return Check(f"appendix:{quantity}", True, f"{len(selected)} entries match")
    return Check(
        f"appendix:{quantity}",
        False,
        f"{bad.index}: closed {format_value(bad.closed)}, oracle {format_value(bad.oracle)}",
    )


def _family_checks(n: int, entries: Sequence[OracleEntry]) -> List[Check]:
    quantities = list(dict.fromkeys(entry.quantity for entry in entries))
    return [_summarise(quantity, entries) for quantity in quantities] + [check_elementary_recursion(n)]


def appendix_checks(m: int, n: int, entries: Optional[List[OracleEntry]] = None) -> List[Check]:
    """One Check per closed-form family, plus the elementary recursion."""
    entries = entries if entries is not None else appendix_entries(m, n)
    return _family_checks(n, entries)


def elementary_matrix_checks(n: int) -> List[Check]:
    """Oracle checks for E(v) alone, for any n >= 1."""
    return _family_checks(n, elementary_matrix_entries(n))


def appendix_report(m: int, n: int) -> Report:
    entries = appendix_entries(m, n)
    report = Report(group=f"G{m}_1_{n}", command="appendix")
    report.extend(appendix_checks(m, n, entries))
    report.data = {"m": m, "n": n, "entries": [entry.to_dict() for entry in entries]}
    logger.info(f"Appendix oracle suite for G({m},1,{n}): {len(entries)} entries")
    return report
