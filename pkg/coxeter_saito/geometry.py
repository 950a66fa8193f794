"""
Orbit-space geometry in u-coordinates.

Matrix conventions used throughout the package: a connection or a
multiplication in a coordinate frame is a list of n matrices M_i with
M_i[k][j] the coefficient of d/du^k in nabla_{d/du^i} d/du^j (resp.
d/du^i * d/du^j).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from sympy import QQ

from .algebra import RatFn, RatFnMatrix, determinant, matrix_inverse, weighted_degree
from .catalog import GroupSpec, classify
from .report import Check, format_rational
from .parser import format_value
from .utils import ConsistencyError, InputError, SingularMatrixError

logger = logging.getLogger(__name__)

Vector = Tuple[RatFn, ...]


@dataclass(frozen=True, eq=False)
class JacobianData:
    J: RatFnMatrix
    Jinv: RatFnMatrix
    detJ: RatFn


@dataclass(frozen=True, eq=False)
class EFieldData:
    e: Vector
    Q: RatFnMatrix
    detQ: RatFn


@dataclass(frozen=True, eq=False)
class EulerField:
    E_deg: Vector
    E: Vector
    weight: object


@dataclass(frozen=True, eq=False)
class HessianMetric:
    Htilde: RatFnMatrix
    Hinv: RatFnMatrix
    Stilde: Tuple[RatFnMatrix, ...]
    detH: RatFn


@dataclass(frozen=True, eq=False)
class OrbitGeometry:
    """Everything the u-frame constructions need for one group."""

    group: GroupSpec
    jacobian: JacobianData
    efield: EFieldData
    euler: EulerField
    hessian: Optional[HessianMetric] = None


def jacobian(g: GroupSpec) -> JacobianData:
    """
    Jacobian J[a][i] = dx^a/du^i, its inverse and determinant.

    Raises:
        SingularMatrixError: If det J vanishes identically
        ConsistencyError: If an entry is not homogeneous of degree d_a - 1
            or J * Jinv differs from the identity
    """
    ring = g.ring
    n = g.rank
    rows = []
    for a, p in enumerate(g.invariants):
        row = []
        for i in range(n):
            entry = p.diff(i)
            if entry and weighted_degree(entry, [1] * n) != g.degrees[a] - 1:
                raise ConsistencyError(f"J[{a + 1}][{i + 1}] is not homogeneous of degree {g.degrees[a] - 1}")
            row.append(entry)
        rows.append(row)
    J = RatFnMatrix.from_rows(ring, rows)

    det = determinant(J)
    if det.is_zero():
        raise SingularMatrixError(f"Jacobian of {g.name} is singular")
    Jinv = matrix_inverse(J)
    if not (J @ Jinv).equals(RatFnMatrix.identity(ring, n)):
        raise ConsistencyError(f"J * Jinv is not the identity for {g.name}")
    logger.debug(f"Jacobian of {g.name}: det J = {format_value(det)}")
    return JacobianData(J=J, Jinv=Jinv, detJ=det)


def e_field(g: GroupSpec, jd: Optional[JacobianData] = None) -> EFieldData:
    """
    The vector field e = d/dx^1 in u-coordinates and Q^k_j = de^k/du^j.

    Raises:
        InputError: If d_1 = d_2, so that d/dx^1 depends on the choice of invariants
        SingularMatrixError: If det Q vanishes identically
    """
    if g.rank > 1 and g.degrees[0] == g.degrees[1]:
        raise InputError(f"Group {g.name}: e needs d_1 > d_2, got degrees {g.degrees}")
    jd = jd or jacobian(g)
    e = tuple(jd.Jinv.column(0))
    Q = RatFnMatrix(g.ring, tuple(
        tuple(e[k].diff(j) for j in range(g.rank)) for k in range(g.rank)
    ))
    detQ = determinant(Q)
    if detQ.is_zero():
        raise SingularMatrixError(f"det Q vanishes identically for {g.name}; not a duality group presentation")
    return EFieldData(e=e, Q=Q, detQ=detQ)


def vector_action(X: Sequence[RatFn], f: RatFn) -> RatFn:
    """Apply the vector field sum X^i d/du^i to f."""
    total = RatFn(f.ring.zero, f.ring.one)
    for i, component in enumerate(X):
        if not component.is_zero():
            derivative = f.diff(i)
            if not derivative.is_zero():
                total = total + component * derivative
    return total


def euler_field(g: GroupSpec) -> EulerField:
    """
    E_deg = sum u^i d/du^i and E = E_deg / d_1.

    Raises:
        ConsistencyError: If E_deg(x^a) != d_a x^a
    """
    ring = g.ring
    weight = QQ(1, g.degrees[0])
    E_deg = tuple(RatFn.from_poly(gen) for gen in ring.gens)
    E = tuple(component * weight for component in E_deg)
    for a, p in enumerate(g.invariants):
        if vector_action(E_deg, RatFn.from_poly(p)) != RatFn.from_poly(p * g.degrees[a]):
            raise ConsistencyError(f"E_deg(x^{a + 1}) != {g.degrees[a]} x^{a + 1}")
    return EulerField(E_deg=E_deg, E=E, weight=weight)


def hessian_metric(g: GroupSpec) -> HessianMetric:
    """
    Hessian metric of x^n and its Levi-Civita connection.

    S_ij^k = 1/2 sum_l H^{kl} d_i H_jl, stored as Stilde[i][k][j].

    Raises:
        InputError: If g is not a Coxeter or Shephard group
        SingularMatrixError: If det H vanishes identically
        ConsistencyError: If H is not symmetric, S is not symmetric in
            (i, j), or S is nonzero although d_n = 2
    """
    if not classify(g)["is_cs"]:
        raise InputError(f"Group {g.name} with degrees {g.degrees} fails d_a + d_(n+1-a) = d_1 + d_n")
    ring = g.ring
    n = g.rank
    top = g.invariants[-1]
    H = RatFnMatrix.from_rows(ring, [[top.diff(i).diff(j) for j in range(n)] for i in range(n)])
    if not H.equals(H.transpose()):
        raise ConsistencyError("Hessian matrix is not symmetric")

    detH = determinant(H)
    if detH.is_zero():
        raise SingularMatrixError(f"Hessian of x^{n} is degenerate for {g.name}")
    Hinv = matrix_inverse(H)

    half = QQ(1, 2)
    Stilde = tuple((Hinv @ H.diff(i)).scale(half) for i in range(n))

    torsion = torsion_check(Stilde)
    if not torsion.passed:
        raise ConsistencyError(f"Levi-Civita connection is not symmetric: {torsion.detail}")
    if g.degrees[-1] == 2 and not all(S.is_zero() for S in Stilde):
        raise ConsistencyError(f"Levi-Civita connection of {g.name} should vanish since d_n = 2")
    return HessianMetric(Htilde=H, Hinv=Hinv, Stilde=Stilde, detH=detH)


def orbit_geometry(g: GroupSpec, with_hessian: bool = True) -> OrbitGeometry:
    """Compute Jacobian, e, Euler field and (optionally) the Hessian metric."""
    jd = jacobian(g)
    ef = e_field(g, jd)
    euler = euler_field(g)
    hm = hessian_metric(g) if with_hessian else None
    logger.info(f"Computed orbit geometry of {g.name}")
    return OrbitGeometry(group=g, jacobian=jd, efield=ef, euler=euler, hessian=hm)


def curvature(connection: Sequence[RatFnMatrix], i: int, j: int) -> RatFnMatrix:
    """d_i G_j - d_j G_i + [G_i, G_j]."""
    return connection[j].diff(i) - connection[i].diff(j) + connection[i].commutator(connection[j])


def flatness_check(connection: Sequence[RatFnMatrix], check_id: str = "flatness") -> Check:
    """
    Full curvature test.

    Returns:
        Check whose detail names the first nonzero entry (i,j,k,l), 1-based
    """
    n = len(connection)
    for i in range(n):
        for j in range(i + 1, n):
            R = curvature(connection, i, j)
            witness = R.first_nonzero()
            if witness is not None:
                k, l = witness
                return Check(check_id, False, f"curvature ({i + 1},{j + 1},{k + 1},{l + 1}) = {format_value(R[k, l])}")
    return Check(check_id, True, "curvature vanishes")


def torsion_check(connection: Sequence[RatFnMatrix], check_id: str = "torsion") -> Check:
    """Symmetry of G_ij^k in (i, j)."""
    n = len(connection)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if connection[i][k, j] != connection[j][k, i]:
                    return Check(check_id, False, f"G_({i + 1},{j + 1})^{k + 1} != G_({j + 1},{i + 1})^{k + 1}")
    return Check(check_id, True, "symmetric in lower indices")


def ass3_check(g: GroupSpec, hm: HessianMetric, r=None, check_id: str = "ASS3") -> Check:
    """
    nabla_{d/du^i} E = r d/du^i for the Levi-Civita connection of the Hessian metric.

    Args:
        g: Group
        hm: Hessian metric data
        r: Parameter to test, d_n / (2 d_1) by default
    """
    r = QQ(g.degrees[-1], 2 * g.degrees[0]) if r is None else QQ.convert(r)
    E = euler_field(g).E
    n = g.rank
    for i in range(n):
        for k in range(n):
            value = E[k].diff(i)
            for j in range(n):
                value = value + hm.Stilde[i][k, j] * E[j]
            expected = r if i == k else 0
            if value != expected:
                return Check(check_id, False, f"(nabla_{i + 1} E)^{k + 1} = {format_value(value)}, expected {format_rational(expected)}")
    return Check(check_id, True, f"r = {format_rational(r)}")
