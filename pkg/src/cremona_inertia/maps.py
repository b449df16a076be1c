"""Rational self-maps of the plane as exact form triples.

A map ``(P1 : P2 : P3)`` is kept content-free and scaled so that the
graded-lex leading coefficient of its first nonzero component is 1; two maps
are then equal iff their components are identical.

Constructions here: the cubic involution centred at a point of a smooth cubic,
the degree-3 inertia maps ``(xG - F : yG : zG)`` attached to a conic ``G``,
and the pencil maps that fix the cubic on every line through a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .algebra import (
    Field,
    Form,
    PlanePoint,
    binary_gcd,
    binary_roots,
    check_same_field,
    common_zeros,
    cross,
    form_divexact,
    form_gcd,
    frame_at,
    mat_inv,
    mat_vec,
)
from .curve import CubicCurve, NearPoint
from .errors import (
    BasePointsNotRational,
    ComposedToZero,
    DegenerateConfiguration,
    DegreeMismatch,
    InputError,
    NonDivisible,
    NormalizationViolated,
    NotBirational,
    NotInInertia,
    VerificationFailure,
    WrongMultiplicity,
    ZeroMap,
)

SMALL_DEGREE_PATTERNS = {1: [], 2: [1, 1, 1], 3: [2, 1, 1, 1, 1]}


class RationalMap:
    """A content-free triple of forms of equal degree.

    ``content`` is the common factor removed at construction (1 if none).
    """

    __slots__ = ("components", "field", "content")

    def __init__(self, components: Sequence[Form]):
        comps = list(components)
        if len(comps) != 3:
            raise InputError("a plane map has three components")
        check_same_field(*comps)
        degs = {c.degree for c in comps}
        if len(degs) != 1:
            raise DegreeMismatch(f"components have degrees {sorted(degs)}")
        if all(c.is_zero() for c in comps):
            raise ZeroMap("all components are zero")
        K = comps[0].field
        g = form_gcd(comps)
        if g.degree > 0:
            comps = [form_divexact(c, g) if not c.is_zero() else Form.zero(K, c.degree - g.degree) for c in comps]
        lead = next(c for c in comps if not c.is_zero()).leading()[1]
        inv = K.inv(lead)
        self.components = tuple(c.scale(inv) for c in comps)
        self.field = K
        self.content = g

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @classmethod
    def identity(cls, K: Field) -> "RationalMap":
        return cls([Form.var(K, i) for i in range(3)])

    @classmethod
    def parse(cls, texts: Sequence[str], K: Field) -> "RationalMap":
        forms = [Form.parse(t, K) for t in texts]
        d = max(f.degree for f in forms)
        forms = [f if not f.is_zero() else Form.zero(K, d) for f in forms]
        return cls(forms)

    def __eq__(self, other):
        if not isinstance(other, RationalMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        return "(" + " : ".join(str(c) for c in self.components) + ")"

    __repr__ = __str__

    def __call__(self, pt: PlanePoint) -> Optional[PlanePoint]:
        """Image of a point, or None at a base point."""
        vals = [c.evaluate(pt) for c in self.components]
        if all(v == 0 for v in vals):
            return None
        return PlanePoint(vals, self.field)

    def to_json(self) -> dict:
        return {"degree": self.degree, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, obj, K: Field) -> "RationalMap":
        try:
            comps = [Form.from_json(c, K) for c in obj["components"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed map object: {exc}") from None
        phi = cls(comps)
        if "degree" in obj and int(obj["degree"]) != phi.degree and phi.content.degree == 0:
            raise InputError("declared degree does not match the components")
        return phi


def map_new(P1: Form, P2: Form, P3: Form) -> RationalMap:
    return RationalMap([P1, P2, P3])


def map_compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """``f o g``: the components of ``f`` evaluated at the components of ``g``."""
    check_same_field(f, g)
    comps = [c.substitute(list(g.components)) for c in f.components]
    if all(c.is_zero() for c in comps):
        raise ComposedToZero("the image of g lies in the zero set of every component of f")
    return RationalMap(comps)


def map_equal(f: RationalMap, g: RationalMap) -> bool:
    check_same_field(f, g)
    for i in range(3):
        for j in range(i + 1, 3):
            if not (f.components[i] * g.components[j] - f.components[j] * g.components[i]).is_zero():
                return False
    return True


def map_linear(M, K: Field) -> RationalMap:
    """The projectivity ``v -> M v``."""
    return RationalMap([Form.linear(K, row) for row in M])


def conjugate(phi: RationalMap, M) -> RationalMap:
    """``M o phi o M^-1`` for a 3x3 invertible matrix ``M``."""
    K = phi.field
    Minv = mat_inv(K, M)
    inner = [c.linear_change(Minv) for c in phi.components]
    comps = []
    for i in range(3):
        acc = Form.zero(K, phi.degree)
        for j in range(3):
            if M[i][j] != 0:
                acc = acc + inner[j].scale(M[i][j])
        comps.append(acc)
    return RationalMap(comps)


# --------------------------------------------------------------------------
# inertia predicates


def cross_products(phi: RationalMap):
    x, y, z = (Form.var(phi.field, i) for i in range(3))
    P1, P2, P3 = phi.components
    return (x * P2 - y * P1, x * P3 - z * P1, y * P3 - z * P2)


def fixes_curve(phi: RationalMap, C: CubicCurve) -> bool:
    """True iff ``F`` divides every cross product ``x_i P_j - x_j P_i``."""
    check_same_field(phi, C)
    try:
        degfix_quotients(phi, C)
    except NotInInertia:
        return False
    return True


def degfix_quotients(phi: RationalMap, C: CubicCurve):
    """The exact quotients of the three cross products by ``F``."""
    check_same_field(phi, C)
    out = []
    for cp in cross_products(phi):
        if cp.is_zero():
            out.append(Form.zero(phi.field, max(0, phi.degree - 2)))
            continue
        try:
            out.append(form_divexact(cp, C.F))
        except NonDivisible as exc:
            raise NotInInertia("a cross product is not divisible by F") from exc
    return tuple(out)


def preserves_curve(phi: RationalMap, C: CubicCurve) -> bool:
    check_same_field(phi, C)
    image = C.F.substitute(list(phi.components))
    try:
        form_divexact(image, C.F)
    except NonDivisible:
        return False
    return True


# --------------------------------------------------------------------------
# the cubic involution


def _linear_yz(K, coeffs_binary: Form) -> Form:
    """Embed a binary form in (s, t) as a ternary form in (y, z)."""
    return Form(K, coeffs_binary.degree, {(0,) + e: c for e, c in coeffs_binary.terms.items()}, 3)


def sigma(C: CubicCurve, p: PlanePoint, verify: bool = True) -> RationalMap:
    """The cubic involution centred at ``p``.

    In a frame with ``p = (1:0:0)`` and tangent ``y = 0`` the cubic reads
    ``x^2 y + x F2 + F3`` and, on the line through ``p`` with direction
    ``(y:z)``, the residual intersection is ``y u^2 + F2 u + F3 = 0``.  The
    Mobius involution fixing both roots gives
    ``(F2 x + 2 F3 : -y (2xy + F2) : -z (2xy + F2))``.
    """
    K = C.field
    M, F2b, F3b = C.normal_frame(p)
    x, y, z = (Form.var(K, i) for i in range(3))
    F2, F3 = _linear_yz(K, F2b), _linear_yz(K, F3b)
    polar = (x * y).scale(2) + F2
    local = RationalMap([x * F2 + F3.scale(2), -(y * polar), -(z * polar)])
    phi = conjugate(local, M)
    if verify:
        if phi.degree != 3:
            raise VerificationFailure(f"sigma has degree {phi.degree}, expected 3")
        if not fixes_curve(phi, C):
            raise VerificationFailure("sigma does not fix the curve")
        if map_compose(phi, phi) != RationalMap.identity(K):
            raise VerificationFailure("sigma is not an involution")
    return phi


def sigma_word(C: CubicCurve, letters: Sequence[PlanePoint]) -> RationalMap:
    """``sigma_{p_m} o ... o sigma_{p_1}`` for ``letters = (p_1, ..., p_m)``."""
    phi = RationalMap.identity(C.field)
    cache = {}
    for p in letters:
        if p not in cache:
            cache[p] = sigma(C, p, verify=False)
        phi = map_compose(cache[p], phi)
    return phi


# --------------------------------------------------------------------------
# base points


@dataclass(frozen=True)
class BasePointRecord:
    location: Union[PlanePoint, NearPoint]
    multiplicity: int

    def to_json(self):
        if isinstance(self.location, NearPoint):
            loc = {"kind": "near", **self.location.to_json()}
        else:
            loc = {"kind": "proper", "point": self.location.to_json()}
        return {"location": loc, "multiplicity": self.multiplicity}


def _local_terms(forms, q: PlanePoint, direction=None):
    K = q.field
    M = frame_at(K, q.coords, direction)
    return [f.linear_change(M) for f in forms], M


def point_multiplicity(forms: Sequence[Form], q: PlanePoint) -> int:
    """Multiplicity at ``q`` of the general member of the linear system."""
    return min(f.vanishing_order(q) for f in forms if not f.is_zero())


def near_multiplicity(forms: Sequence[Form], near: NearPoint) -> int:
    """Multiplicity at a first-neighbourhood point of the general member.

    Uses the blow-up chart ``v = u w`` with the direction along ``v = 0``.
    """
    K = near.field
    q = near.base
    direction = next(
        d
        for d in (cross(K, near.line, e) for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]))
        if any(d) and any(cross(K, d, q.coords))
    )
    local, _ = _local_terms([f for f in forms if not f.is_zero()], q, direction)
    e_min = min(f.degree - max(e[2] for e in f.terms) for f in local)
    best = None
    for f in local:
        for (i, j, _k), _c in f.terms.items():
            val = (i + j - e_min) + j
            best = val if best is None else min(best, val)
    return best


def _near_directions(forms: Sequence[Form], q: PlanePoint):
    """Directions at ``q`` shared by the tangent cones of the general member."""
    K = q.field
    local, M = _local_terms([f for f in forms if not f.is_zero()], q)
    orders = [f.degree - max(e[2] for e in f.terms) for f in local]
    e_min = min(orders)
    cones = []
    for f, o in zip(local, orders):
        if o != e_min:
            continue
        cones.append(Form(K, e_min, {e[:2]: c for e, c in f.terms.items() if e[0] + e[1] == e_min}, 2))
    g = binary_gcd(cones)
    if g.degree == 0:
        return [], None
    roots, residual = binary_roots(g)
    unresolved = None
    if residual.degree > 0:
        unresolved = str(residual)
    lines = []
    for (u, v), _m in roots:
        other = mat_vec(K, M, [u, v, 0])
        lines.append(cross(K, q.coords, other))
    return lines, unresolved


def proper_base_points(phi: RationalMap, strict: bool = True):
    """Base points of ``phi`` over the base field, with multiplicities.

    Proper base points come first in canonical order, each followed by the
    first-neighbourhood base points above it.  With ``strict`` a
    :class:`BasePointsNotRational` is raised when elimination certifies base
    points outside the base field.
    """
    forms = [c for c in phi.components if not c.is_zero()]
    if phi.degree == 0:
        return []
    pts, unresolved = common_zeros(forms)
    records = []
    for q in pts:
        records.append(BasePointRecord(q, point_multiplicity(forms, q)))
        lines, unres = _near_directions(forms, q)
        unresolved = unresolved or unres
        for line in lines:
            near = NearPoint(q, tuple(line))
            k = near_multiplicity(forms, near)
            if k > 0:
                records.append(BasePointRecord(near, k))
    if strict and unresolved is not None:
        raise BasePointsNotRational(f"base points outside the base field: factor {unresolved}", factor=unresolved)
    return records


@dataclass
class HomaloidalReport:
    degree: int
    records: list
    sum_k: int
    sum_k2: int
    deficit: tuple
    pattern: Optional[list] = None
    pattern_ok: Optional[bool] = None

    @property
    def complete(self) -> bool:
        return self.deficit == (0, 0)

    def to_json(self):
        return {
            "degree": self.degree,
            "base_points": [r.to_json() for r in self.records],
            "sum_k": self.sum_k,
            "sum_k2": self.sum_k2,
            "deficit": list(self.deficit),
            "pattern": self.pattern,
            "pattern_ok": self.pattern_ok,
        }


def homaloidal_check(phi: RationalMap, strict: bool = True) -> HomaloidalReport:
    records = proper_base_points(phi, strict=strict)
    d = phi.degree
    ks = [r.multiplicity for r in records]
    s1, s2 = sum(ks), sum(k * k for k in ks)
    report = HomaloidalReport(d, records, s1, s2, (3 * d - 3 - s1, d * d - 1 - s2))
    if d in SMALL_DEGREE_PATTERNS:
        report.pattern = sorted(ks, reverse=True)
        report.pattern_ok = report.pattern == SMALL_DEGREE_PATTERNS[d]
    return report


# --------------------------------------------------------------------------
# degree-3 inertia maps attached to a conic


def normalized_curve(C: CubicCurve, p1: PlanePoint):
    """``(C', M)`` with ``C'`` the curve in the frame where ``p1 = (1:0:0)``.

    ``C'`` has equation ``x^2 y + x F2 + F3``; a point ``q`` of ``C``
    corresponds to ``M^-1 q`` on ``C'``.
    """
    K = C.field
    M, F2b, F3b = C.normal_frame(p1)
    x, y = Form.var(K, 0), Form.var(K, 1)
    F = x * x * y + x * _linear_yz(K, F2b) + _linear_yz(K, F3b)
    return CubicCurve(F), M


def conic_through(C: CubicCurve, points: Sequence[PlanePoint]) -> Form:
    """The conic ``xy + G2(y,z)`` through three proper points (normalized frame)."""
    K = C.field
    rows, rhs = [], []
    for q in points:
        x0, y0, z0 = q.coords
        rows.append([K.mul(y0, y0), K.mul(y0, z0), K.mul(z0, z0)])
        rhs.append(K.neg(K.mul(x0, y0)))
    A = mat_inv(K, rows)
    a, b, c = mat_vec(K, A, rhs)
    return Form(K, 2, {(1, 1, 0): 1, (0, 2, 0): a, (0, 1, 1): b, (0, 0, 2): c})


def cubic4pts_map(F: Form, G: Form) -> RationalMap:
    """``(xG - F : yG : zG)`` after the birationality test on raw forms."""
    K = F.field
    if F.coefficient((3, 0, 0)) != 0 or F.coefficient((2, 0, 1)) != 0 or F.coefficient((2, 1, 0)) == 0:
        raise NormalizationViolated("F must read x^2 y + x F2(y,z) + F3(y,z)")
    if G.degree != 2 or G.coefficient((2, 0, 0)) != 0 or G.coefficient((1, 0, 1)) != 0 or G.coefficient((1, 1, 0)) == 0:
        raise NormalizationViolated("G must read x y + G2(y,z)")
    F = F.scale(K.inv(F.coefficient((2, 1, 0))))
    G = G.scale(K.inv(G.coefficient((1, 1, 0))))
    x, y, z = (Form.var(K, i) for i in range(3))
    F2 = Form(K, 2, {(0,) + e[1:]: c for e, c in F.terms.items() if e[0] == 1}, 3)
    F3 = Form(K, 3, {e: c for e, c in F.terms.items() if e[0] == 0}, 3)
    G2 = Form(K, 2, {e: c for e, c in G.terms.items() if e[0] == 0}, 3)
    det = (G2 - F2) * G2 + y * F3
    if det.is_zero():
        raise NotBirational("(G2 - F2) G2 + y F3 vanishes identically", determinant=det)
    return RationalMap([x * G - F, y * G, z * G])


def cubic4pts(C: CubicCurve, G: Form, points: Sequence = ()) -> RationalMap:
    """Degree-3 element of the inertia group built from the conic ``G``.

    ``C`` must be in normalized coordinates (``p1 = (1:0:0)``, tangent
    ``y = 0``).  Given ``points`` (``p2, p3, p4`` as proper or near points) are
    checked to be base points of the result.
    """
    K = C.field
    phi = cubic4pts_map(C.F, G)
    p1 = PlanePoint((1, 0, 0), K)
    if phi.degree != 3:
        raise VerificationFailure(f"cubic4pts produced degree {phi.degree}")
    if not fixes_curve(phi, C):
        raise VerificationFailure("cubic4pts output does not fix the curve")
    if point_multiplicity(phi.components, p1) != 2:
        raise VerificationFailure("p1 is not a double base point")
    for q in points:
        if isinstance(q, NearPoint):
            ok = near_multiplicity(phi.components, q) >= 1
        else:
            ok = all(c.evaluate(q) == 0 for c in phi.components)
        if not ok:
            raise VerificationFailure(f"{q} is not a base point")
    return phi


# --------------------------------------------------------------------------
# pencil maps


def pencil_map_forms(b: Form, c: Form, A: Form, B: Form) -> RationalMap:
    """The pencil map in the frame ``p = (1:0:0)`` from raw forms in ``(y, z)``.

    The cubic is ``x^2 y + x b + c`` and the auxiliary curve ``x A + B``.  On a
    smooth cubic the determinant never vanishes (the residual roots are not
    rational functions of the line); it can for reducible input.
    """
    K = b.field
    x, y, z = (Form.var(K, i) for i in range(3))
    det = y * (y * B * B - b * A * B + c * A * A)
    if det.is_zero():
        raise DegenerateConfiguration("the residual point of Cd is a fixed point on every line")
    line_pt = x * A + B
    X = x * (b * A - y * B) + c * A
    return RationalMap([X, -(y * y * line_pt), -(y * z * line_pt)])


def pencil_map(C: CubicCurve, p: PlanePoint, Cd: Form) -> RationalMap:
    """The map preserving lines through ``p``, fixing ``C`` and sending ``Cd`` to ``p``.

    ``Cd`` has degree ``d`` and multiplicity exactly ``d - 1`` at ``p``.  On
    the line with direction ``(y:z)`` the residual cubic points are the roots of
    ``a u^2 + b u + c`` and the residual point of ``Cd`` is ``tau0``; the map
    there is the Mobius matrix ``((a tau0 + b, c), (-a, a tau0))``.
    """
    K = C.field
    check_same_field(C, Cd)
    d = Cd.degree
    if Cd.is_zero() or d < 1:
        raise InputError("Cd must be a nonzero form of positive degree")
    if Cd.vanishing_order(p) != d - 1:
        raise WrongMultiplicity(f"Cd has multiplicity {Cd.vanishing_order(p)} at p, expected {d - 1}")
    M, F2b, F3b = C.normal_frame(p)
    b, c = _linear_yz(K, F2b), _linear_yz(K, F3b)
    local_Cd = Cd.linear_change(M)
    A = Form(K, d - 1, {(0,) + e[1:]: v for e, v in local_Cd.terms.items() if e[0] == 1}, 3)
    B = Form(K, d, {e: v for e, v in local_Cd.terms.items() if e[0] == 0}, 3)
    if any(e[0] > 1 for e in local_Cd.terms):
        raise WrongMultiplicity("Cd is not linear in x in the normalized frame")
    phi = conjugate(pencil_map_forms(b, c, A, B), M)
    if not fixes_curve(phi, C):
        raise VerificationFailure("pencil map does not fix the curve")
    return phi


# --------------------------------------------------------------------------
# base points of elements of Dec(C) lie on C


@dataclass
class DecompositionReport:
    base_points: list
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "base_points": [r.to_json() for r in self.base_points],
            "violations": [r.to_json() for r in self.violations],
            "ok": self.ok,
        }


def decomposition_candidate_check(phi: RationalMap, C: CubicCurve, strict: bool = True) -> DecompositionReport:
    if not preserves_curve(phi, C):
        raise InputError("the map does not preserve the curve")
    records = proper_base_points(phi, strict=strict)
    report = DecompositionReport(records)
    for r in records:
        if not C.contains(r.location):
            report.violations.append(r)
    return report
