"""
Flat coordinates and the matrix invariants of the natural Saito structure.

Pipeline for a Coxeter or Shephard group with distinct degrees:

1. transport the natural Saito structure from the u-frame to the x-frame
   and certify that its Christoffel symbols and structure constants are
   polynomials in x;
2. solve d_a X + G_a X = 0 for an upper unitriangular X and integrate
   X^-1 dx to flat coordinates t;
3. build C_a, U, B_a, H, A, S_a and Y_a = 1/2 A^-1 d_a A in t;
4. solve the same gauge problem for Y_a to get the coordinates s that are
   flat for the Coxeter-Shephard connection.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing

from .algebra import (
    PolyGrid,
    RatFn,
    RatFnMatrix,
    determinant,
    euler_integrate,
    express_in_basis,
    make_ring,
    matrix_inverse,
    solve_unitriangular_gauge,
    substitute,
    unitriangular_inverse,
    weighted_degree,
)
from .catalog import GroupSpec, classify
from .geometry import OrbitGeometry, orbit_geometry
from .parser import format_value
from .report import Check, Report, format_rational, index_key, matrix_to_rows, polys_to_strings, tensor_to_dict
from .saito import (
    FrobeniusData,
    MultTensor,
    SaitoData,
    cs_ass,
    dualize_ass_to_ss,
    frobenius_checks,
    FrameCalculus,
    natural_ass,
    theorem2_compare,
)
from .utils import ConsistencyError, IncompatibleError, InputError, NotDivisibleError, default_variables

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class XFrameData:
    """Natural Saito structure in the x-frame, with polynomial entries."""

    ring: PolyRing
    connection: Tuple[RatFnMatrix, ...]
    mult: Tuple[RatFnMatrix, ...]


@dataclass(frozen=True, eq=False)
class FlatFrame:
    group: GroupSpec
    x_frame: XFrameData
    t_ring: PolyRing
    X: RatFnMatrix
    t_coords: Tuple[PolyElement, ...]
    inverse_change: Tuple[PolyElement, ...]
    t_of_u: Tuple[PolyElement, ...]
    C: Tuple[RatFnMatrix, ...]
    U: RatFnMatrix
    W: RatFnMatrix

    @property
    def degrees(self) -> Tuple[int, ...]:
        return self.group.degrees


@dataclass(frozen=True, eq=False)
class CsFrameData:
    frame: FlatFrame
    Uinv: RatFnMatrix
    B: Tuple[RatFnMatrix, ...]
    H: RatFnMatrix
    A: RatFnMatrix
    Ainv: RatFnMatrix
    S: Tuple[RatFnMatrix, ...]
    Upsilon: Tuple[RatFnMatrix, ...]


@dataclass(frozen=True, eq=False)
class SFrame:
    """Coordinates s flat for the Coxeter-Shephard connection."""

    X: RatFnMatrix
    s_ring: PolyRing
    s_coords: Tuple[PolyElement, ...]
    inverse_change: Tuple[PolyElement, ...]
    C: Tuple[RatFnMatrix, ...]


@dataclass(frozen=True, eq=False)
class ClassificationResult:
    admits_compatible_metric: bool
    charge: object
    metric_matrix: Optional[RatFnMatrix]
    witness: Optional[Tuple[int, int]]


def _transport(J: RatFnMatrix, Jinv: RatFnMatrix, matrices: Sequence[RatFnMatrix], with_derivative: bool) -> List[RatFnMatrix]:
    """
    Change frame from d/du to d/dy where J[c][k] = dy^c/du^k.

    For a connection (with_derivative) the inhomogeneous term d_i Jinv is added.
    """
    n = J.rows
    result = []
    for a in range(n):
        total = RatFnMatrix.zeros(J.ring, n)
        for i in range(n):
            weight = Jinv[i, a]
            if weight.is_zero():
                continue
            inner = matrices[i] @ Jinv
            if with_derivative:
                inner = inner + Jinv.diff(i)
            total = total + inner.scale(weight)
        result.append(J @ total)
    return result


def _rewrite_in_invariants(M: RatFnMatrix, g: GroupSpec, x_ring: PolyRing, what: str) -> RatFnMatrix:
    rows = []
    for r in range(M.rows):
        row = []
        for c in range(M.cols):
            try:
                p = M[r, c].as_poly()
                row.append(express_in_basis(p, g.invariants, g.degrees, x_ring))
            except NotDivisibleError as e:
                raise NotDivisibleError(f"{what} entry ({r + 1},{c + 1}) is not a polynomial in x: {str(e)}") from e
        rows.append(row)
    return RatFnMatrix.from_rows(x_ring, rows)


def natural_ss_x_frame(g: GroupSpec, geo: Optional[OrbitGeometry] = None) -> XFrameData:
    """
    Natural Saito structure in the x-frame.

    Raises:
        NotDivisibleError: If some Christoffel symbol or structure constant
            is not a polynomial in x
    """
    geo = geo or orbit_geometry(g, with_hessian=False)
    ss = dualize_ass_to_ss(natural_ass(geo))
    J, Jinv = geo.jacobian.J, geo.jacobian.Jinv
    x_ring = make_ring(default_variables(g.rank, "x"))

    connection_u = _transport(J, Jinv, ss.connection, with_derivative=True)
    mult_u = _transport(J, Jinv, ss.mult.matrices, with_derivative=False)
    connection = tuple(_rewrite_in_invariants(M, g, x_ring, f"Gamma_{a + 1}") for a, M in enumerate(connection_u))
    mult = tuple(_rewrite_in_invariants(M, g, x_ring, f"C_{a + 1}") for a, M in enumerate(mult_u))
    logger.info(f"Natural Saito structure of {g.name} is polynomial in x")
    return XFrameData(ring=x_ring, connection=connection, mult=mult)


def _require_strictly_upper(connection: Sequence[RatFnMatrix], what: str) -> None:
    for a, M in enumerate(connection):
        for r in range(M.rows):
            for c in range(r + 1):
                if not M[r, c].is_zero():
                    raise IncompatibleError(f"{what}_{a + 1} is not strictly upper triangular at ({r + 1},{c + 1})")


def gauge_residual(connection: Sequence[RatFnMatrix], X: RatFnMatrix) -> Optional[Tuple[int, int, int]]:
    """First (a, row, col), 1-based, where d_a X + G_a X is nonzero."""
    for a, G in enumerate(connection):
        witness = (X.diff(a) + G @ X).first_nonzero()
        if witness is not None:
            return a + 1, witness[0] + 1, witness[1] + 1
    return None


def _integrate_rows(Y: PolyGrid, degrees: Sequence[int]) -> List[PolyElement]:
    """y^a with dy^a = sum_b Y[a][b] dz^b."""
    return [euler_integrate(Y[a], degrees, degrees[a]) for a in range(len(degrees))]


def invert_triangular_change(coords: Sequence[PolyElement], target: PolyRing) -> List[PolyElement]:
    """
    Invert y^a = z^a + f_a(z^(a+1), ..., z^n).

    Args:
        coords: y as polynomials in z
        target: Ring whose generators are y

    Returns:
        z as polynomials in y

    Raises:
        ConsistencyError: If the change is not of the stated triangular form
    """
    source = coords[0].ring
    n = len(coords)
    result: List[PolyElement] = [target.zero] * n
    for a in range(n - 1, -1, -1):
        tail = coords[a] - source.gens[a]
        if any(tail.diff(b) for b in range(a + 1)):
            raise ConsistencyError(f"Coordinate change is not triangular at index {a + 1}")
        result[a] = target.gens[a] - substitute(tail, result, target)
    for a in range(n):
        if substitute(coords[a], result, target) != target.gens[a]:
            raise ConsistencyError(f"Inverse coordinate change fails at index {a + 1}")
    return result


def _frame_multiplication(X: RatFnMatrix, Xinv: RatFnMatrix, mult: Sequence[RatFnMatrix]) -> List[RatFnMatrix]:
    """C'_a = X^-1 (sum_m X[m][a] C_m) X for the frame d/dz_a = sum_m X[m][a] d/dy_m."""
    n = X.rows
    result = []
    for a in range(n):
        total = RatFnMatrix.zeros(X.ring, n)
        for m in range(n):
            if not X[m, a].is_zero():
                total = total + mult[m].scale(X[m, a])
        result.append(Xinv @ total @ X)
    return result


def find_flat_coordinates(g: GroupSpec, geo: Optional[OrbitGeometry] = None) -> FlatFrame:
    """
    Flat coordinates t of the natural Saito structure.

    Args:
        g: Coxeter or Shephard group with distinct degrees
        geo: Precomputed geometry

    Returns:
        FlatFrame with t^a = x^a + (polynomial in x^(a+1..n))

    Raises:
        InputError: If g is not CS or has tied degrees
        IncompatibleError: If the gauge equation cannot be integrated
        ConsistencyError: If the result fails verification
    """
    verdict = classify(g)
    if not verdict["is_cs"]:
        raise InputError(f"Group {g.name} is not a Coxeter or Shephard group")
    if not verdict["distinct_degrees"]:
        raise InputError(f"Group {g.name} has tied degrees {g.degrees}; flat coordinates need distinct degrees")

    geo = geo or orbit_geometry(g, with_hessian=False)
    xf = natural_ss_x_frame(g, geo)
    n = g.rank
    degrees = g.degrees
    _require_strictly_upper(xf.connection, "Gamma")

    X_grid = solve_unitriangular_gauge([M.to_polys() for M in xf.connection], degrees)
    X = RatFnMatrix.from_rows(xf.ring, X_grid)
    residual = gauge_residual(xf.connection, X)
    if residual is not None:
        raise ConsistencyError(f"Frame d/dt is not flat: residual at (a, row, col) = {residual}")

    Y = unitriangular_inverse(X_grid)
    t_coords = _integrate_rows(Y, degrees)
    t_ring = make_ring(default_variables(n, "t"))
    inverse_change = invert_triangular_change(t_coords, t_ring)

    Xinv = RatFnMatrix.from_rows(xf.ring, Y)
    C_x = _frame_multiplication(X, Xinv, xf.mult)
    C = tuple(M.pullback(inverse_change, t_ring) for M in C_x)

    weights = [QQ(d, degrees[0]) for d in degrees]
    W = RatFnMatrix.diagonal(t_ring, weights)
    U = RatFnMatrix.zeros(t_ring, n)
    for a in range(n):
        U = U + C[a].scale(t_ring.gens[a] * weights[a])

    t_of_u = tuple(substitute(t, list(g.invariants), g.ring) for t in t_coords)
    logger.info(f"Found flat coordinates for {g.name}: {polys_to_strings(t_coords)}")
    return FlatFrame(
        group=g,
        x_frame=xf,
        t_ring=t_ring,
        X=X,
        t_coords=tuple(t_coords),
        inverse_change=tuple(inverse_change),
        t_of_u=t_of_u,
        C=C,
        U=U,
        W=W,
    )


def _all_commute(check_id: str, first: Sequence[RatFnMatrix], second: Sequence[RatFnMatrix], label: str) -> Check:
    for a, M in enumerate(first):
        for b, N in enumerate(second):
            if not M.commutator(N).is_zero():
                return Check(check_id, False, f"[{label}] fails at ({a + 1},{b + 1})")
    return Check(check_id, True, "")


def _degree_check(check_id: str, matrices: Sequence[RatFnMatrix], degrees: Sequence[int], expected) -> Check:
    """Every nonzero entry M_a[c][b] is a polynomial of weighted degree expected(a, b, c)."""
    for a, M in enumerate(matrices):
        for c in range(M.rows):
            for b in range(M.cols):
                value = M[c, b]
                if value.is_zero():
                    continue
                if not value.is_polynomial():
                    return Check(check_id, False, f"entry {index_key(a, b, c)} is not polynomial")
                found = weighted_degree(value.as_poly(), degrees)
                if found != expected(a, b, c):
                    return Check(check_id, False, f"entry {index_key(a, b, c)} has degree {found}, expected {expected(a, b, c)}")
    return Check(check_id, True, "")


def _independent_of_first(check_id: str, matrices: Sequence[RatFnMatrix]) -> Check:
    for a, M in enumerate(matrices):
        if not M.diff(0).is_zero():
            return Check(check_id, False, f"matrix {a + 1} depends on the first coordinate")
    return Check(check_id, True, "")


def flat_frame_checks(ff: FlatFrame) -> List[Check]:
    """Identities satisfied by C_a, U and W in the flat frame."""
    n = ff.group.rank
    d = ff.degrees
    ring = ff.t_ring
    C, U, W = ff.C, ff.U, ff.W
    identity = RatFnMatrix.identity(ring, n)
    checks = []

    residual = gauge_residual(ff.x_frame.connection, ff.X)
    checks.append(Check("flat:nabla-flat", residual is None, "" if residual is None else f"residual at {residual}"))
    checks.append(Check("flat:C1-identity", C[0].equals(identity), ""))
    witness = next(
        ((a, b, c) for a in range(n) for b in range(n) for c in range(n) if C[a][c, b] != C[b][c, a]),
        None,
    )
    checks.append(Check("flat:C-symmetric", witness is None, "" if witness is None else f"fails at {index_key(*witness)}"))
    checks.append(_all_commute("flat:C-commute", C, C, "C_a, C_b"))
    checks.append(_all_commute("flat:U-commute", [U], C, "U, C_a"))

    witness = next(
        ((a, b) for a in range(n) for b in range(a + 1, n) if not C[b].diff(a).equals(C[a].diff(b))),
        None,
    )
    checks.append(Check("flat:dC-symmetric", witness is None, "" if witness is None else f"fails at ({witness[0] + 1},{witness[1] + 1})"))
    witness = next(
        (a for a in range(n) if not U.diff(a).equals(W @ C[a] - C[a] @ W + C[a])),
        None,
    )
    checks.append(Check("flat:dU", witness is None, "" if witness is None else f"fails at a = {witness + 1}"))

    checks.append(_independent_of_first("flat:C-independent-of-t1", C))
    shifted = U - identity.scale(ring.gens[0])
    checks.append(_independent_of_first("flat:U-minus-t1-independent-of-t1", [shifted]))
    checks.append(_degree_check("flat:degree-C", C, d, lambda a, b, c: d[0] + d[c] - d[a] - d[b]))

    det_u = determinant(U).as_poly()
    leading = {monom: coeff for monom, coeff in det_u.iterterms() if monom[0] == n}
    monic = leading == {(n,) + (0,) * (n - 1): QQ.one} and det_u.degree(0) == n
    checks.append(Check("flat:discriminant-monic", monic, f"det U = {format_value(det_u)}"))
    return checks


def _zero_matrices(ring: PolyRing, n: int) -> Tuple[RatFnMatrix, ...]:
    return tuple(RatFnMatrix.zeros(ring, n) for _ in range(n))


def _christoffel(H: RatFnMatrix, Hinv: RatFnMatrix) -> List[RatFnMatrix]:
    """S_a[c][b] = 1/2 sum_d H^{cd} (d_a H_db + d_b H_da - d_d H_ab)."""
    n = H.rows
    dH = [H.diff(a) for a in range(n)]
    result = []
    for a in range(n):
        T = RatFnMatrix(H.ring, tuple(
            tuple(dH[a][e, b] + dH[b][e, a] - dH[e][a, b] for b in range(n)) for e in range(n)
        ))
        result.append((Hinv @ T).scale(QQ(1, 2)))
    return result


def _levi_civita_from_A(
    H: RatFnMatrix,
    A: RatFnMatrix,
    Ainv: RatFnMatrix,
    B: Sequence[RatFnMatrix],
    W: RatFnMatrix,
) -> Tuple[RatFnMatrix, ...]:
    """
    S_a = 1/2 (A^-1 d_a A + M B_a) with M = -I - W + A^-1 W A, checked
    entrywise against the Christoffel symbols of H.

    Raises:
        ConsistencyError: If the two routes to some S_a disagree
    """
    n = H.rows
    M = -RatFnMatrix.identity(H.ring, n) - W + Ainv @ W @ A
    S = tuple((Ainv @ A.diff(a) + M @ B[a]).scale(QQ(1, 2)) for a in range(n))
    direct = _christoffel(H, matrix_inverse(H))
    for a in range(n):
        witness = S[a].first_difference(direct[a])
        if witness is not None:
            raise ConsistencyError(
                f"S_{a + 1} from A differs from the Christoffel symbols of H at ({witness[0] + 1},{witness[1] + 1})"
            )
    return S


def frame_matrices(ff: FlatFrame) -> CsFrameData:
    """
    B_a, H, A, S_a and the polynomial connection Y_a of the dual Saito structure.

    Raises:
        ConsistencyError: If any of the matrix identities fails, or the two
            routes to S_a disagree
    """
    g = ff.group
    n = g.rank
    d = g.degrees
    ring = ff.t_ring
    C, U, W = ff.C, ff.U, ff.W
    factor = QQ(d[-1] - 1, d[0])

    Uinv = matrix_inverse(U)
    B = tuple(Uinv @ M for M in C)
    H = RatFnMatrix.from_rows(ring, [[B[a][n - 1, b] * factor for b in range(n)] for a in range(n)])
    A = H @ U
    shortcut = RatFnMatrix.from_rows(ring, [[C[a][n - 1, b] * factor for b in range(n)] for a in range(n)])
    if not A.equals(shortcut):
        raise ConsistencyError("A = HU differs from (d_n - 1)/d_1 C^n")
    try:
        A.to_polys()
    except NotDivisibleError as e:
        raise ConsistencyError(f"A is not polynomial: {str(e)}") from e

    Ainv = matrix_inverse(A)
    S = _levi_civita_from_A(H, A, Ainv, B, W)

    Upsilon = tuple((Ainv @ A.diff(a)).scale(QQ(1, 2)) for a in range(n))
    cfd = CsFrameData(frame=ff, Uinv=Uinv, B=B, H=H, A=A, Ainv=Ainv, S=S, Upsilon=Upsilon)
    failures = [check for check in cs_frame_checks(cfd) if not check.passed]
    if failures:
        raise ConsistencyError(f"{failures[0].id} failed: {failures[0].detail}")
    logger.info(f"Matrix invariants of {g.name} verified")
    return cfd


def levi_civita_flat_frame(cfd: CsFrameData) -> Tuple[RatFnMatrix, ...]:
    """
    Levi-Civita connection of H in the t-frame, rebuilt from A and B.

    Raises:
        ConsistencyError: If it disagrees with the Christoffel symbols of H
            or with cfd.S
    """
    S = _levi_civita_from_A(cfd.H, cfd.A, cfd.Ainv, cfd.B, cfd.frame.W)
    for a, (rebuilt, stored) in enumerate(zip(S, cfd.S)):
        if not rebuilt.equals(stored):
            raise ConsistencyError(f"S_{a + 1} differs from the stored connection")
    return S


def cs_frame_checks(cfd: CsFrameData) -> List[Check]:
    """Identities among A, B, S and Y in the flat frame."""
    ff = cfd.frame
    n = ff.group.rank
    d = ff.degrees
    ring = ff.t_ring
    A, Ainv, B, C, U, W, S = cfd.A, cfd.Ainv, cfd.B, ff.C, ff.U, ff.W, cfd.S
    identity = RatFnMatrix.identity(ring, n)
    checks = []

    shape = None
    for a in range(n):
        for b in range(n):
            value = A[a, b]
            index_sum = a + b + 2
            if index_sum < n + 1 and not value.is_zero():
                shape = f"A({a + 1},{b + 1}) should vanish"
            elif index_sum == n + 1 and (value.is_zero() or not value.is_constant()):
                shape = f"A({a + 1},{b + 1}) should be a nonzero constant"
            elif index_sum > n + 1 and not value.diff(0).is_zero():
                shape = f"A({a + 1},{b + 1}) depends on t1"
            if shape:
                break
        if shape:
            break
    checks.append(Check("cs:A-shape", shape is None, shape or ""))
    checks.append(_degree_check("cs:A-degree", [A], d, lambda _, b, a: d[0] + d[-1] - d[a] - d[b]))

    try:
        Ainv.to_polys()
        checks.append(_independent_of_first("cs:Ainv-polynomial", [Ainv]))
    except NotDivisibleError:
        checks.append(Check("cs:Ainv-polynomial", False, "A^-1 is not polynomial"))

    conj = Ainv @ W @ A
    triangular = all(conj[r, c].is_zero() for r in range(n) for c in range(r))
    diagonal = all(conj[m, m] == QQ(d[n - 1 - m], d[0]) for m in range(n))
    checks.append(Check("cs:AinvWA-triangular", triangular and diagonal, ""))

    checks.append(Check("cs:A-symmetric", A.equals(A.transpose()), ""))
    witness = next((a for a in range(n) if not (A @ C[a]).equals(C[a].transpose() @ A)), None)
    checks.append(Check("cs:AC-symmetric", witness is None, "" if witness is None else f"fails at a = {witness + 1}"))
    witness = next((a for a in range(n) if not (A @ B[a]).equals(B[a].transpose() @ A)), None)
    checks.append(Check("cs:AB-symmetric", witness is None, "" if witness is None else f"fails at a = {witness + 1}"))
    checks.append(Check("cs:AU-symmetric", (A @ U).equals(U.transpose() @ A), ""))

    witness = next(
        ((a, b, c) for a in range(n) for b in range(n) for c in range(n) if B[a][c, b] != B[b][c, a]),
        None,
    )
    checks.append(Check("cs:B-symmetric", witness is None, "" if witness is None else f"fails at {index_key(*witness)}"))
    checks.append(_all_commute("cs:B-C-commute", B, C, "B_a, C_b"))
    checks.append(_all_commute("cs:B-B-commute", B, B, "B_a, B_b"))
    checks.append(_all_commute("cs:B-U-commute", B, [U], "B_a, U"))
    witness = next((b for b in range(n) if not B[b].diff(0).equals(-(B[b] @ cfd.Uinv))), None)
    checks.append(Check("cs:dB1", witness is None, "" if witness is None else f"fails at b = {witness + 1}"))

    M = -identity - W + Ainv @ W @ A
    s1_ok = (S[0].scale(2)).equals(M @ cfd.Uinv)
    diag_ok = all(M[m, m] == QQ(-2 * d[m] + d[-1], d[0]) for m in range(n))
    checks.append(Check("cs:S1", s1_ok and diag_ok, f"diagonal {[format_rational(QQ(-2 * d[m] + d[-1], d[0])) for m in range(n)]}"))

    witness = next(
        (a for a in range(n) if not cfd.Upsilon[a].equals(S[a] - S[0] @ C[a])),
        None,
    )
    checks.append(Check("cs:upsilon", witness is None, "" if witness is None else f"fails at a = {witness + 1}"))
    checks.append(_degree_check("cs:upsilon-degree", cfd.Upsilon, d, lambda a, b, c: d[c] - d[a] - d[b]))
    try:
        _require_strictly_upper(cfd.Upsilon, "Upsilon")
        checks.append(Check("cs:upsilon-triangular", True, ""))
    except IncompatibleError as e:
        checks.append(Check("cs:upsilon-triangular", False, str(e)))
    witness = next(
        ((a, b) for a in range(n) for b in range(a + 1, n)
         if not (cfd.Upsilon[b].diff(a) - cfd.Upsilon[a].diff(b) + cfd.Upsilon[a].commutator(cfd.Upsilon[b])).is_zero()),
        None,
    )
    checks.append(Check("cs:upsilon-flat", witness is None, "" if witness is None else f"fails at ({witness[0] + 1},{witness[1] + 1})"))

    S1inv = matrix_inverse(S[0])
    witness = next((a for a in range(n) if not (-(S1inv @ S[a].diff(0))).equals(B[a])), None)
    checks.append(Check("cs:Bcs-equals-B", witness is None, "" if witness is None else f"fails at a = {witness + 1}"))
    return checks


def cs_flat_coordinates(cfd: CsFrameData) -> SFrame:
    """
    Coordinates s flat for the Coxeter-Shephard Saito connection.

    Raises:
        IncompatibleError: If the gauge equation for Y cannot be integrated
        ConsistencyError: If the s-frame structure constants are not
            polynomials independent of s^1
    """
    ff = cfd.frame
    n = ff.group.rank
    d = ff.degrees
    ring = ff.t_ring
    X_grid = solve_unitriangular_gauge([M.to_polys() for M in cfd.Upsilon], d)
    X = RatFnMatrix.from_rows(ring, X_grid)
    residual = gauge_residual(cfd.Upsilon, X)
    if residual is not None:
        raise ConsistencyError(f"Frame d/ds is not flat: residual at {residual}")

    Y = unitriangular_inverse(X_grid)
    s_coords = _integrate_rows(Y, d)
    s_ring = make_ring(default_variables(n, "s"))
    inverse_change = invert_triangular_change(s_coords, s_ring)
    Xinv = RatFnMatrix.from_rows(ring, Y)
    C_s = tuple(M.pullback(inverse_change, s_ring) for M in _frame_multiplication(X, Xinv, ff.C))
    for a, M in enumerate(C_s):
        try:
            M.to_polys()
        except NotDivisibleError as e:
            raise ConsistencyError(f"s-frame structure constants C_{a + 1} are not polynomial") from e
        if not M.diff(0).is_zero():
            raise ConsistencyError(f"s-frame structure constants C_{a + 1} depend on s1")
    logger.info(f"Found Coxeter-Shephard flat coordinates: {polys_to_strings(s_coords)}")
    return SFrame(X=X, s_ring=s_ring, s_coords=tuple(s_coords), inverse_change=tuple(inverse_change), C=C_s)


def s_frame_checks(cfd: CsFrameData, sf: SFrame) -> List[Check]:
    d = cfd.frame.degrees
    n = len(d)
    residual = gauge_residual(cfd.Upsilon, sf.X)
    checks = [Check("s:cs-flat", residual is None, "" if residual is None else f"residual at {residual}")]
    unitriangular = all(
        sf.X[r, c] == (1 if r == c else 0) for r in range(n) for c in range(r + 1)
    )
    checks.append(Check("s:X-unitriangular", unitriangular, ""))
    checks.append(_degree_check(
        "s:X-degree", [sf.X], d, lambda _, b, c: d[c] - d[b]
    ))
    checks.append(_independent_of_first("s:C-independent-of-s1", sf.C))
    return checks


def _pullback_to_u(M: RatFnMatrix, ff: FlatFrame) -> RatFnMatrix:
    return M.pullback(list(ff.t_of_u), ff.group.ring)


def _dt_du(ff: FlatFrame) -> RatFnMatrix:
    ring = ff.group.ring
    n = ff.group.rank
    return RatFnMatrix.from_rows(ring, [[t.diff(i) for i in range(n)] for t in ff.t_of_u])


def check_trivial_connection(ff: FlatFrame, cfd: CsFrameData) -> List[Check]:
    """
    Compare (1 - d_c)/d_1 B_ab^c with -sum du^i/dt^a du^j/dt^b d2 t^c/du^i du^j,
    and H with the Hessian of t^n in the t-frame.
    """
    g = ff.group
    n = g.rank
    d = g.degrees
    dt_du = _dt_du(ff)
    du_dt = matrix_inverse(dt_du)
    checks = []

    witness = None
    for c in range(n):
        t = ff.t_of_u[c]
        hess = RatFnMatrix.from_rows(g.ring, [[t.diff(i).diff(j) for j in range(n)] for i in range(n)])
        omega = -(du_dt.transpose() @ hess @ du_dt)
        expected = RatFnMatrix.from_rows(
            ff.t_ring, [[cfd.B[a][c, b] * QQ(1 - d[c], d[0]) for b in range(n)] for a in range(n)]
        )
        diff = _pullback_to_u(expected, ff).first_difference(omega)
        if diff is not None:
            witness = (diff[0], diff[1], c)
            break
    checks.append(Check(
        "flat:trivial-connection",
        witness is None,
        "" if witness is None else f"fails at {index_key(*witness)}",
    ))

    t = ff.t_of_u[-1]
    hess = RatFnMatrix.from_rows(g.ring, [[t.diff(i).diff(j) for j in range(n)] for i in range(n)])
    h_direct = du_dt.transpose() @ hess @ du_dt
    h_equal = _pullback_to_u(cfd.H, ff).equals(h_direct)
    checks.append(Check("flat:H-hessian", h_equal, "" if h_equal else "H differs from the Hessian of t^n"))
    return checks


def check_diamond_pushforward(ff: FlatFrame, cfd: CsFrameData, cs: MultTensor) -> Check:
    """Push the u-frame multiplication of the Coxeter-Shephard ASS into t and compare with B."""
    dt_du = _dt_du(ff)
    du_dt = matrix_inverse(dt_du)
    pushed = _transport(dt_du, du_dt, cs.matrices, with_derivative=False)
    for a in range(ff.group.rank):
        witness = _pullback_to_u(cfd.B[a], ff).first_difference(pushed[a])
        if witness is not None:
            return Check("flat:diamond-pushforward", False, f"fails at {index_key(a, witness[1], witness[0])}")
    return Check("flat:diamond-pushforward", True, "")


def theorem3_classify(cfd: CsFrameData) -> ClassificationResult:
    """
    A compatible metric exists iff A is an anti-diagonal constant matrix.

    The witness is the first (row, col), 1-based and row-major, breaking that shape.
    """
    d = cfd.frame.degrees
    n = len(d)
    A = cfd.A
    charge = 1 - QQ(d[-1], d[0])
    witness = None
    for a in range(n):
        for b in range(n):
            value = A[a, b]
            on_anti_diagonal = a + b == n - 1
            if not value.is_constant() or (not on_anti_diagonal and not value.is_zero()):
                witness = (a + 1, b + 1)
                break
        if witness:
            break
    admits = witness is None
    return ClassificationResult(
        admits_compatible_metric=admits,
        charge=charge,
        metric_matrix=A if admits else None,
        witness=witness,
    )


def check_compatible_metric(cfd: CsFrameData, charge) -> List[Check]:
    """f1-f3 for the constant metric A on the natural Saito structure in t."""
    ff = cfd.frame
    n = ff.group.rank
    ring = ff.t_ring
    weights = [QQ(d, ff.degrees[0]) for d in ff.degrees]
    euler = tuple(RatFn.from_poly(ring.gens[a] * weights[a]) for a in range(n))
    unit = tuple(RatFn.constant(ring, 1 if a == 0 else 0) for a in range(n))
    ss = SaitoData(
        connection=_zero_matrices(ring, n),
        mult=MultTensor(matrices=ff.C, unit=unit),
        euler=euler,
        label="ss-t",
    )
    fs = FrobeniusData(saito=ss, metric=cfd.A, charge=charge, label="metric")
    return frobenius_checks(fs, FrameCalculus(ring, n))


def _require_flat_group(g: GroupSpec) -> None:
    verdict = classify(g)
    if not verdict["is_cs"] or not verdict["distinct_degrees"]:
        raise InputError(f"Group {g.name} needs distinct degrees satisfying d_a + d_(n+1-a) = d_1 + d_n")


def flat_report(g: GroupSpec) -> Report:
    """Flat coordinates t and s with every matrix identity."""
    _require_flat_group(g)
    geo = orbit_geometry(g, with_hessian=True)
    ff = find_flat_coordinates(g, geo)
    cfd = frame_matrices(ff)
    sf = cs_flat_coordinates(cfd)
    cs = cs_ass(geo).mult

    report = Report(group=g.name, command="flat")
    report.extend(flat_frame_checks(ff))
    report.extend(cs_frame_checks(cfd))
    report.extend(s_frame_checks(cfd, sf))
    report.extend(check_trivial_connection(ff, cfd))
    report.add(check_diamond_pushforward(ff, cfd, cs))

    s_in_x = [substitute(s, list(ff.t_coords), ff.x_frame.ring) for s in sf.s_coords]
    report.data = {
        "degrees": list(g.degrees),
        "t": polys_to_strings(ff.t_coords),
        "x_in_t": polys_to_strings(ff.inverse_change),
        "X_t": matrix_to_rows(ff.X),
        "C": tensor_to_dict(ff.C),
        "U": matrix_to_rows(ff.U),
        "det_U": format_value(determinant(ff.U)),
        "A": matrix_to_rows(cfd.A),
        "Upsilon": tensor_to_dict(cfd.Upsilon),
        "X_s": matrix_to_rows(sf.X),
        "s": polys_to_strings(sf.s_coords),
        "s_in_x": polys_to_strings(s_in_x),
        "C_s": tensor_to_dict(sf.C),
    }
    return report


def classify_report(g: GroupSpec) -> Report:
    """Compatible-metric classification, cross-checked against the connection comparison."""
    _require_flat_group(g)
    geo = orbit_geometry(g, with_hessian=True)
    ff = find_flat_coordinates(g, geo)
    cfd = frame_matrices(ff)
    result = theorem3_classify(cfd)

    natural = natural_ass(geo).mult
    comparison = theorem2_compare(g, natural, geo.hessian)

    report = Report(group=g.name, command="classify")
    report.add(Check(
        "classify:agrees-with-compare",
        result.admits_compatible_metric == comparison.connections_equal,
        f"admits = {result.admits_compatible_metric}, connections equal = {comparison.connections_equal}",
    ))
    if result.admits_compatible_metric:
        report.extend(check_compatible_metric(cfd, result.charge))

    data: Dict[str, object] = {
        "admits_compatible_metric": result.admits_compatible_metric,
        "charge": format_rational(result.charge),
        "A": matrix_to_rows(cfd.A),
        "witness": None if result.witness is None else list(result.witness),
        "metric": None,
    }
    if result.metric_matrix is not None:
        data["metric"] = {"matrix": matrix_to_rows(result.metric_matrix), "family": "c * A, c != 0"}
    report.data = data
    return report
