"""Smooth plane cubics, their tangents and inflexions, and marked point sets.

The marked set collects the centres ``p`` of the cubic involutions to study
(the generators) together with all base points of those involutions, and
records the relation ``b > a`` ("``a`` is a base point of the involution
centred at ``b``").  For proper points this is the condition that ``b`` lies
on the tangent line of the cubic at ``a``.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

from .algebra import (
    Field,
    Form,
    PlanePoint,
    binary_gcd,
    binary_roots,
    canonical,
    common_zeros,
    cross,
    divides,
    dot,
    mat_det,
    mat_inv,
    mat_vec,
    monomials,
    projective_points,
    resultant_x,
)
from .errors import (
    DuplicateGenerator,
    GeneratorOffCurve,
    InputError,
    NotDegree3,
    PointNotOnCurve,
    QuarticNotSplit,
    Reducible,
    Singular,
    VerificationFailure,
)

CUBIC_MONOMIALS = monomials(3)


@dataclass(frozen=True)
class NearPoint:
    """A point in the first neighbourhood of ``base``.

    The direction is stored as the canonical coefficients of a line through
    ``base``; two records are equal iff they sit over the same point in the
    same direction.
    """

    base: PlanePoint
    line: tuple
    depth: int = 1

    def __post_init__(self):
        K = self.base.field
        object.__setattr__(self, "line", canonical(K, self.line))
        if dot(K, self.line, self.base.coords) != 0:
            raise InputError("direction line does not pass through the base point")

    @property
    def field(self):
        return self.base.field

    @property
    def key(self):
        return self.base.key + (1,) + tuple(self.line)

    def __str__(self):
        return f"near{self.base}[{':'.join(self.field.format_scalar(c) for c in self.line)}]"

    __repr__ = __str__

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "line": [self.field.format_scalar(c) for c in self.line],
        }

    @classmethod
    def from_json(cls, obj, K: Field):
        return cls(PlanePoint.from_json(obj["base"], K), tuple(K.parse_scalar(str(c)) for c in obj["line"]))


Location = Union[PlanePoint, NearPoint, str]


def location_key(loc: Location):
    if isinstance(loc, PlanePoint):
        return (0,) + loc.key + (0,)
    if isinstance(loc, NearPoint):
        return (0,) + loc.key
    return (1, loc)


@dataclass(frozen=True)
class OmegaPoint:
    """An element of the marked set: proper, infinitely near, or an abstract label."""

    id: int
    location: Location

    @property
    def kind(self) -> str:
        if isinstance(self.location, PlanePoint):
            return "proper"
        if isinstance(self.location, NearPoint):
            return "near"
        return "abstract"

    def to_json(self):
        out = {"id": self.id, "kind": self.kind}
        if self.kind == "proper":
            out["point"] = self.location.to_json()
        elif self.kind == "near":
            out.update(self.location.to_json())
        else:
            out["label"] = self.location
        return out


class CubicCurve:
    """A smooth, irreducible plane cubic ``F = 0``.

    Construction runs the full smoothness and irreducibility certification;
    :attr:`certificate` names the argument that succeeded.
    """

    def __init__(self, F: Form, _seed: int = 1729):
        if F.nvars != 3 or F.degree != 3 or F.is_zero():
            raise NotDegree3(f"expected a nonzero ternary cubic, got degree {F.degree}")
        self.F = F
        self.field = F.field
        self.certificate = self._certify(_seed)

    # certification ---------------------------------------------------------

    def _random_frame(self, rng, good):
        K = self.field
        for _ in range(200):
            T = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
            if mat_det(K, T) != 0 and good(T):
                return T
        raise InputError("could not find a generic change of coordinates")

    def linear_factor(self, seed: int = 7) -> Optional[Form]:
        """A linear factor of F over the base field, or None."""
        K, F = self.field, self.F
        rng = random.Random(seed)
        T = self._random_frame(rng, lambda T: F.evaluate([T[0][0], T[1][0], T[2][0]]) != 0)
        G = F.linear_change(T)
        # any linear factor of G has nonzero x-coefficient: x - b*y - c*z
        cy = [G.coefficient((i, 3 - i, 0)) for i in range(4)]
        cz = [G.coefficient((i, 0, 3 - i)) for i in range(4)]
        from .algebra import univariate_roots

        for b in univariate_roots(K, cy):
            for c in univariate_roots(K, cz):
                ell = Form.linear(K, [1, K.neg(b), K.neg(c)])
                if divides(ell, G):
                    return ell.linear_change(mat_inv(K, T)).monic()
        return None

    @cached_property
    def partials(self):
        return self.F.gradient()

    @cached_property
    def hessian(self) -> Form:
        H = [[self.partials[i].derive(j) for j in range(3)] for i in range(3)]
        return (
            H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1])
            - H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0])
            + H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0])
        )

    def _certify(self, seed):
        ell = self.linear_factor()
        if ell is not None:
            raise Reducible(f"F has the linear factor {ell}", factor=ell)
        zeros, _unresolved = common_zeros(self.partials)
        if zeros:
            raise Singular(f"F is singular at {zeros[0]}", witness=zeros[0])
        # no rational singular point and no rational line: the only singular
        # shape left is a triangle of conjugate lines, for which H ~ F
        H = self.hessian
        if H.is_zero() or (H.monic() == self.F.monic()):
            raise Singular("F splits into conjugate lines (Hessian proportional to F)", certificate="hessian")
        if self._elimination_certificate(seed):
            return "resultant"
        return "structure"

    def _elimination_certificate(self, seed) -> bool:
        """True iff pairwise resultants of the partials have no common root."""
        rng = random.Random(seed)
        for _ in range(5):
            T = self._random_frame(rng, lambda T: True)
            Fx, Fy, Fz = (f.linear_change(T) for f in self.partials)
            if Fx.coefficient((2, 0, 0)) == 0:
                continue
            r1, r2 = resultant_x(Fx, Fy), resultant_x(Fx, Fz)
            if r1.is_zero() or r2.is_zero():
                continue
            if binary_gcd([r1, r2]).degree == 0:
                return True
        return False

    # queries -----------------------------------------------------------------

    def contains(self, pt) -> bool:
        if isinstance(pt, NearPoint):
            return self.contains(pt.base) and self.tangent_coeffs(pt.base) == pt.line
        return self.F.evaluate(pt) == 0

    def _require(self, pt):
        if pt.field != self.field:
            raise InputError("point and curve over different fields")
        if not self.contains(pt):
            raise PointNotOnCurve(f"{pt} is not on the curve")

    def tangent_coeffs(self, a: PlanePoint) -> tuple:
        return canonical(self.field, [g.evaluate(a) for g in self.partials])

    def tangent_line(self, a: PlanePoint) -> Form:
        self._require(a)
        return Form.linear(self.field, self.tangent_coeffs(a))

    def contact_order(self, a: PlanePoint) -> int:
        """Order of contact of the tangent line at ``a`` with the curve."""
        self._require(a)
        K = self.field
        ell = self.tangent_coeffs(a)
        b = None
        for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
            cand = cross(K, ell, e)
            if any(cand) and any(cross(K, cand, a.coords)):
                b = cand
                break
        line = [Form.linear(K, [a.coords[i], b[i]]) for i in range(3)]
        restricted = self.F.substitute(line)
        if restricted.is_zero():
            return 10**9
        return min(e[1] for e in restricted.terms)

    def is_inflexion(self, a: PlanePoint) -> bool:
        return self.contact_order(a) >= 3

    def normal_frame(self, p: PlanePoint):
        """Frame moving ``p`` to ``(1:0:0)`` with tangent ``{y = 0}``.

        Returns ``(M, F2, F3)`` where ``F(M v) / c = x^2 y + x F2(y,z) + F3(y,z)``
        and ``F2, F3`` are binary forms in ``(s, t) = (y, z)``.
        """
        self._require(p)
        K = self.field
        ell = self.tangent_coeffs(p)
        on_line = None
        for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
            cand = cross(K, ell, e)
            if any(cand) and any(cross(K, cand, p.coords)):
                on_line = cand
                break
        off_line = next(e for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]) if dot(K, ell, e) != 0)
        M = [[p.coords[r], off_line[r], on_line[r]] for r in range(3)]
        G = self.F.linear_change(M)
        c = G.coefficient((2, 1, 0))
        G = G.scale(K.inv(c))
        assert G.coefficient((3, 0, 0)) == 0 and G.coefficient((2, 0, 1)) == 0
        F2 = Form(K, 2, {e[1:]: v for e, v in G.terms.items() if e[0] == 1}, 2)
        F3 = Form(K, 3, {e[1:]: v for e, v in G.terms.items() if e[0] == 0}, 2)
        return M, F2, F3

    def tangency_quartic(self, p: PlanePoint):
        """``(disc, M)``: the binary quartic whose roots are the tangent directions from ``p``."""
        M, F2, F3 = self.normal_frame(p)
        s = Form.var(self.field, 0, 2)
        disc = F2 * F2 - (s * F3).scale(4)
        return disc, M

    def tangency_points(self, p: PlanePoint) -> list:
        """The four base points of the involution centred at ``p`` other than ``p``.

        Proper tangency points come first in canonical order; for an inflexion
        the infinitely near point in the tangent direction is last.
        """
        pts, residual = self.rational_tangency_points(p)
        if residual.degree > 0:
            raise QuarticNotSplit(
                f"tangency quartic at {p} does not split into four roots over {self.field}: leftover {residual}",
                factor=residual,
            )
        return pts

    def rational_tangency_points(self, p: PlanePoint):
        """Tangency points over the base field and the unsplit part of the quartic."""
        disc, M = self.tangency_quartic(p)
        K = self.field
        roots, residual = binary_roots(disc)
        _, F2, _ = self.normal_frame(p)
        proper, near = [], []
        for (s, t), _m in roots:
            if s == 0:
                near.append(NearPoint(p, self.tangent_coeffs(p)))
                continue
            f2 = F2.evaluate([s, t])
            local = [K.neg(f2), K.mul(2, K.mul(s, s)), K.mul(2, K.mul(s, t))]
            q = PlanePoint(mat_vec(K, M, local), K)
            if not self.contains(q) or q == p:
                raise VerificationFailure(f"tangency point {q} failed its postcondition")
            proper.append(q)
        if len(proper) + len(near) + residual.degree != 4:
            raise VerificationFailure(f"tangency quartic at {p} has a repeated root")
        return sorted(proper) + near, residual

    def succ(self, b: PlanePoint, a: PlanePoint) -> bool:
        """``b > a``: ``a != b`` and ``b`` lies on the tangent line at ``a``."""
        self._require(a)
        self._require(b)
        if a == b:
            return False
        return dot(self.field, [g.evaluate(a) for g in self.partials], b.coords) == 0

    # serialization -------------------------------------------------------

    def to_json(self):
        return [self.field.format_scalar(self.F.coefficient(m)) for m in CUBIC_MONOMIALS]

    @classmethod
    def from_json(cls, obj, K: Field) -> "CubicCurve":
        if isinstance(obj, str):
            return cls(Form.parse(obj, K))
        if not isinstance(obj, list) or len(obj) != 10:
            raise InputError("a curve is a list of 10 coefficients in graded-lex order")
        return cls(Form(K, 3, {m: K.parse_scalar(str(c)) for m, c in zip(CUBIC_MONOMIALS, obj)}))

    def __str__(self):
        return f"CubicCurve({self.F} over {self.field})"

    __repr__ = __str__


def curve_new(F: Form) -> CubicCurve:
    return CubicCurve(F)


def tangent_line(C: CubicCurve, a: PlanePoint) -> Form:
    return C.tangent_line(a)


def is_inflexion(C: CubicCurve, a: PlanePoint) -> bool:
    return C.is_inflexion(a)


def tangency_quartic(C: CubicCurve, p: PlanePoint):
    return C.tangency_quartic(p)


def succ(C: CubicCurve, b: PlanePoint, a: PlanePoint) -> bool:
    return C.succ(b, a)


# --------------------------------------------------------------------------
# marked sets


@dataclass(frozen=True)
class MarkedPointSet:
    """Generators, the set of all their base points, and the relation ``b > a``.

    ``succ`` holds ordered pairs ``(b, a)`` of omega ids.  ``curve`` is None for
    an abstract configuration built from labels alone.
    """

    curve: Optional[CubicCurve]
    generators: tuple
    omega: tuple
    succ: frozenset
    mode: str = "exact"
    _succ_of: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        table = {o.id: [] for o in self.omega}
        for b, a in sorted(self.succ):
            table[b].append(a)
        object.__setattr__(self, "_succ_of", {k: tuple(v) for k, v in table.items()})
        self.validate()

    @property
    def ids(self):
        return [o.id for o in self.omega]

    def successors(self, b: int) -> tuple:
        return self._succ_of[b]

    def related(self, b: int, a: int) -> bool:
        return (b, a) in self.succ

    def predecessors(self, a: int) -> tuple:
        return tuple(sorted(b for b, x in self.succ if x == a))

    def point(self, i: int) -> OmegaPoint:
        return self.omega[i]

    def validate(self):
        ids = self.ids
        if ids != list(range(len(ids))):
            raise InputError("omega ids must be 0..n-1 in order")
        for g in self.generators:
            if g not in self._succ_of:
                raise InputError(f"generator id {g} is not in omega")
            if len(self._succ_of[g]) != 4:
                raise VerificationFailure(f"generator {g} has {len(self._succ_of[g])} successors, expected 4")
        for b, a in self.succ:
            if a == b:
                raise VerificationFailure(f"point {a} is related to itself")
        for b, succs in self._succ_of.items():
            for a1 in succs:
                for a2 in succs:
                    if a1 == a2:
                        continue
                    bad = [(a1, b), (a2, b), (a1, a2), (a2, a1)]
                    for pair in bad:
                        if pair in self.succ:
                            raise VerificationFailure(
                                f"{b} > {a1} and {b} > {a2} but also {pair[0]} > {pair[1]}"
                            )
        for g in self.generators:
            near = [a for a in self._succ_of[g] if self.omega[a].kind == "near"]
            if self.curve is not None:
                infl = self.curve.is_inflexion(self.omega[g].location)
                if infl != (len(near) == 1) or len(near) > 1:
                    raise VerificationFailure(f"generator {g}: inflexion status and near records disagree")

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "generators": list(self.generators),
            "omega": [o.to_json() for o in self.omega],
            "succ": [[b, list(self._succ_of[b])] for b in self.ids if self._succ_of[b]],
        }
        if self.curve is not None:
            out["field"] = self.curve.field.name
            out["curve"] = self.curve.to_json()
        return out

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def abstract(cls, n_generators: int, inflexion: Sequence[int] = ()) -> "MarkedPointSet":
        """Generic configuration: each generator has four private successors."""
        omega, succ, gens = [], set(), []
        for g in range(n_generators):
            gid = len(omega)
            gens.append(gid)
            omega.append(OmegaPoint(gid, f"p{g}"))
            labels = [f"p{g}.t{k}" for k in range(4 if g not in inflexion else 3)]
            if g in inflexion:
                labels.append(f"p{g}.near")
            for lab in labels:
                aid = len(omega)
                omega.append(OmegaPoint(aid, lab))
                succ.add((gid, aid))
        return cls(None, tuple(gens), tuple(omega), frozenset(succ), mode="abstract")

    @classmethod
    def from_relation(cls, labels: Sequence[str], generators: Sequence[int], pairs) -> "MarkedPointSet":
        """Abstract configuration from an explicit relation table."""
        omega = tuple(OmegaPoint(i, lab) for i, lab in enumerate(labels))
        return cls(None, tuple(generators), omega, frozenset(tuple(p) for p in pairs), mode="abstract")


def marked_set_build(C: CubicCurve, generators: Sequence[PlanePoint], formal: bool = False) -> MarkedPointSet:
    """Assemble the marked set of the given generators with the relation table.

    With ``formal`` a generator whose tangency quartic does not split gets
    formal labels for its missing base points, related only to that generator
    (generic position is assumed for them, not checked); the mode is then
    ``"hybrid"``.  Without it such a generator raises QuarticNotSplit.
    """
    gens = list(generators)
    if len(set(gens)) != len(gens):
        raise DuplicateGenerator("generators must be distinct")
    for g in gens:
        if g.field != C.field:
            raise InputError("generator and curve over different fields")
        if not C.contains(g):
            raise GeneratorOffCurve(f"generator {g} is not on the curve")
    base_pts, missing = {}, {}
    locations = set(gens)
    for k, g in enumerate(gens):
        if formal:
            pts, residual = C.rational_tangency_points(g)
            missing[g] = [f"g{k}.t{j}" for j in range(residual.degree)]
        else:
            pts = C.tangency_points(g)
        base_pts[g] = pts
        locations.update(pts)
    ordered = sorted(locations, key=location_key)
    ordered += [lab for g in gens for lab in missing.get(g, [])]
    index = {loc: i for i, loc in enumerate(ordered)}
    omega = tuple(OmegaPoint(i, loc) for i, loc in enumerate(ordered))
    succ_pairs = set()
    proper = [loc for loc in ordered if isinstance(loc, PlanePoint)]
    for b in proper:
        for a in proper:
            if C.succ(b, a):
                succ_pairs.add((index[b], index[a]))
    for g in gens:
        for a in base_pts[g]:
            if isinstance(a, NearPoint):
                succ_pairs.add((index[g], index[a]))
            elif (index[g], index[a]) not in succ_pairs:
                raise VerificationFailure(f"tangency point {a} of {g} fails the tangent test")
        for lab in missing.get(g, []):
            succ_pairs.add((index[g], index[lab]))
    mode = "hybrid" if any(missing.values()) else "exact"
    return MarkedPointSet(C, tuple(index[g] for g in gens), omega, frozenset(succ_pairs), mode=mode)


def curve_points(C: CubicCurve):
    """All points of ``C`` over a prime field, in the enumeration order."""
    if C.field.p is None:
        raise InputError("point enumeration needs a prime field")
    return [q for q in projective_points(C.field) if C.contains(q)]


def split_generators(C: CubicCurve, count: int, relation_free: bool = False,
                     inflexion: Optional[bool] = None, start: int = 0) -> list:
    """Greedily pick ``count`` points of ``C`` whose tangency quartics split.

    A candidate is kept only if the marked set of the points chosen so far
    still builds and validates.  ``relation_free`` also rejects candidates
    sharing a base point with, or lying in the base locus of, a chosen one.
    ``inflexion`` filters on the inflexion status when not None.
    """
    chosen: list = []
    for q in curve_points(C)[start:]:
        if inflexion is not None and C.is_inflexion(q) != inflexion:
            continue
        try:
            ms = marked_set_build(C, chosen + [q])
        except (QuarticNotSplit, VerificationFailure):
            continue
        if relation_free:
            gens = set(ms.generators)
            hits = [a for g in gens for a in ms.successors(g)]
            if len(hits) != len(set(hits)) or gens & set(hits):
                continue
        chosen.append(q)
        if len(chosen) == count:
            return chosen
    raise InputError(f"only {len(chosen)} suitable points found over {C.field.name}")
