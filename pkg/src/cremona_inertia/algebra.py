"""Exact scalar fields, homogeneous forms and the elimination tools built on them.

Scalars live in the rationals (``fractions.Fraction``) or in a prime field
(plain ``int`` residues in ``[0, p-1]``).  A :class:`Form` is a homogeneous
polynomial stored sparsely as ``{exponent tuple: coefficient}``; ternary forms
use variables ``x, y, z`` and binary forms ``s, t``.

Monomials are ordered graded-lexicographically with ``x > y > z``.  Since all
monomials of a form share one degree, this is plain lexicographic order on the
exponent tuples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from .errors import FieldMismatch, InputError, NonDivisible, SingularMatrix

VARS3 = "xyz"
VARS2 = "st"


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class Field:
    """The rationals (``p is None``) or the prime field of order ``p``.

    Primes 2, 3 and 5 are rejected so that every characteristic assumption of
    the construction (char not 2, 3 or 5) holds uniformly.
    """

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p < 7 or not sympy.isprime(self.p):
                raise InputError(f"prime field order must be a prime >= 7, got {self.p!r}")

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def parse(cls, spec: str) -> "Field":
        spec = spec.strip()
        if spec in ("Q", "QQ"):
            return cls(None)
        if spec.lower().startswith("fp:"):
            try:
                return cls(int(spec[3:]))
            except ValueError:
                raise InputError(f"bad field spec {spec!r}") from None
        raise InputError(f"bad field spec {spec!r}; expected Q or Fp:<p>")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"Fp:{self.p}"

    def __str__(self):
        return self.name

    # scalar arithmetic -------------------------------------------------

    def __call__(self, value):
        """Coerce an int, Fraction or decimal string into canonical form."""
        if isinstance(value, str):
            return self.parse_scalar(value)
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.p is None else pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self):
        if self.p is None:
            raise InputError("the rationals cannot be enumerated")
        return range(self.p)

    def random_element(self, rng: random.Random, nonzero: bool = False):
        while True:
            if self.p is None:
                v = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            else:
                v = rng.randrange(self.p)
            if not (nonzero and v == 0):
                return v

    def parse_scalar(self, text: str):
        text = text.strip()
        try:
            value = Fraction(text)
        except ValueError:
            raise InputError(f"bad scalar literal {text!r}") from None
        if self.p is not None and value.denominator % self.p == 0:
            raise InputError(f"{text!r} has no residue mod {self.p}")
        return self(value)

    def format_scalar(self, a) -> str:
        if self.p is None:
            a = Fraction(a)
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return str(int(a))


QQ = Field(None)


def check_same_field(*objs):
    fields = {o.field for o in objs}
    if len(fields) > 1:
        raise FieldMismatch(f"objects live over different fields: {sorted(map(str, fields))}")


# --------------------------------------------------------------------------
# dense univariate polynomials, coefficient lists low -> high
# (internal helpers for gcds, resultants and root finding)


def _utrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _uadd(K, a, b):
    n = max(len(a), len(b))
    out = [K.add(a[i] if i < len(a) else K.zero, b[i] if i < len(b) else K.zero) for i in range(n)]
    return _utrim(out)


def _usub(K, a, b):
    n = max(len(a), len(b))
    out = [K.sub(a[i] if i < len(a) else K.zero, b[i] if i < len(b) else K.zero) for i in range(n)]
    return _utrim(out)


def _umul(K, a, b):
    if not a or not b:
        return []
    out = [K.zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    if K.p is not None:
        out = [c % K.p for c in out]
    return _utrim(out)


def _uscale(K, a, c):
    return _utrim([K.mul(x, c) for x in a])


def _udivmod(K, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [K.zero] * max(len(a) - len(b) + 1, 0)
    inv_lc = K.inv(b[-1])
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = K.mul(a[-1], inv_lc)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = K.sub(a[shift + i], K.mul(c, bi))
        _utrim(a)
    return _utrim(q), a


def _udiv_exact(K, a, b):
    q, r = _udivmod(K, a, b)
    if r:
        raise ArithmeticError("inexact univariate division")
    return q


def _umonic(K, a):
    if not a:
        return a
    return _uscale(K, a, K.inv(a[-1]))


def _ugcd(K, a, b):
    a, b = _utrim(list(a)), _utrim(list(b))
    while b:
        a, b = b, _udivmod(K, a, b)[1]
    return _umonic(K, a)


def _ueval(K, a, x):
    acc = K.zero
    for c in reversed(a):
        acc = K.add(K.mul(acc, x), c)
    return acc


def _upowmod(K, base, e, mod):
    result = [K.one]
    base = _udivmod(K, base, mod)[1]
    while e:
        if e & 1:
            result = _udivmod(K, _umul(K, result, base), mod)[1]
        base = _udivmod(K, _umul(K, base, base), mod)[1]
        e >>= 1
    return result


def univariate_roots(K: Field, coeffs: Sequence) -> list:
    """Distinct roots in ``K`` of a nonzero univariate polynomial (low -> high)."""
    a = _utrim([K(c) for c in coeffs])
    if not a:
        raise InputError("roots of the zero polynomial")
    if len(a) == 1:
        return []
    if K.p is None:
        return sorted(_rational_roots(a))
    # keep only the split part: gcd with x^p - x
    xp = _upowmod(K, [K.zero, K.one], K.p, a)
    g = _ugcd(K, a, _usub(K, xp, [K.zero, K.one]))
    if len(g) <= 1:
        return []
    roots = []
    for v in K.elements():
        if _ueval(K, g, v) == 0:
            roots.append(v)
            if len(roots) == len(g) - 1:
                break
    return roots


def _to_sympy_poly(a, var):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(a)], var, domain="QQ")


def _rational_roots(a) -> list:
    t = sympy.Symbol("t")
    _, factors = _to_sympy_poly(a, t).factor_list()
    roots = []
    for fac, _mult in factors:
        if fac.degree() == 1:
            c1, c0 = fac.all_coeffs()
            r = -Fraction(int(c0.p), int(c0.q)) / Fraction(int(c1.p), int(c1.q))
            roots.append(r)
    return roots


def _nonlinear_rational_factors(a) -> list:
    t = sympy.Symbol("t")
    _, factors = _to_sympy_poly(a, t).factor_list()
    return [fac for fac, _ in factors if fac.degree() > 1]


# --------------------------------------------------------------------------
# homogeneous forms


def _monomial_str(exp, names):
    parts = []
    for e, v in zip(exp, names):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


class Form:
    """A homogeneous polynomial with exact coefficients.

    Instances are immutable by convention; every operation returns a new form.
    The zero form keeps its declared degree.
    """

    __slots__ = ("field", "degree", "terms", "nvars")

    def __init__(self, field: Field, degree: int, terms=None, nvars: int = 3, _clean: bool = True):
        self.field = field
        self.degree = int(degree)
        self.nvars = nvars
        if degree < 0:
            raise InputError("negative degree")
        if terms is None:
            terms = {}
        if _clean:
            clean = {}
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars or sum(exp) != degree or min(exp) < 0:
                    raise InputError(f"monomial {exp} does not fit a degree-{degree} form in {nvars} variables")
                c = field(c)
                if c != 0:
                    clean[exp] = field.add(clean.get(exp, field.zero), c)
                    if clean[exp] == 0:
                        del clean[exp]
            terms = clean
        self.terms = terms

    # constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field, degree, nvars=3):
        return cls(field, degree, {}, nvars, _clean=False)

    @classmethod
    def constant(cls, field, c, nvars=3):
        return cls(field, 0, {(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, field, i, nvars=3):
        exp = [0] * nvars
        exp[i] = 1
        return cls(field, 1, {tuple(exp): 1}, nvars)

    @classmethod
    def linear(cls, field, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(field, 1, terms, n)

    @classmethod
    def parse(cls, text: str, field: Field = QQ, variables: str = VARS3, degree: Optional[int] = None):
        """Parse ``"y^2*z - x^3 + x*z^2"`` style input."""
        syms = sympy.symbols(" ".join(variables))
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals={str(s): s for s in syms})
            poly = sympy.Poly(expr, *syms)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise InputError(f"cannot parse form {text!r}: {exc}") from None
        terms = {}
        degs = set()
        for exp, c in poly.terms():
            if c == 0:
                continue
            c = sympy.Rational(c)
            terms[exp] = Fraction(int(c.p), int(c.q))
            degs.add(sum(exp))
        if len(degs) > 1:
            raise InputError(f"{text!r} is not homogeneous")
        if degree is None:
            degree = degs.pop() if degs else 0
        return cls(field, degree, terms, len(variables))

    # basic protocol ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self.field, self.degree, self.nvars, self.terms) == (
            other.field,
            other.degree,
            other.nvars,
            other.terms,
        )

    def __hash__(self):
        return hash((self.field, self.degree, self.nvars, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        names = VARS3 if self.nvars == 3 else VARS2 if self.nvars == 2 else [f"x{i}" for i in range(self.nvars)]
        K = self.field
        out = []
        for exp, c in self.sorted_terms():
            if K.p is None and c < 0:
                sign, mag = "-", -c
            else:
                sign, mag = "+", c
            mono = _monomial_str(exp, names)
            cs = K.format_scalar(mag)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Form({self}, deg={self.degree}, {self.field})"

    # arithmetic ----------------------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch("forms over different fields")
        if self.nvars != other.nvars:
            raise InputError("forms in different numbers of variables")

    def _combine(self, other, sign):
        self._check(other)
        if self.degree != other.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return -other if sign < 0 else other
            raise InputError(f"cannot add forms of degrees {self.degree} and {other.degree}")
        K = self.field
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            v = K.add(terms.get(exp, K.zero), c if sign > 0 else K.neg(c))
            if v == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = v
        return Form(K, self.degree, terms, self.nvars, _clean=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        K = self.field
        return Form(K, self.degree, {e: K.neg(c) for e, c in self.terms.items()}, self.nvars, _clean=False)

    def scale(self, c):
        K = self.field
        c = K(c)
        if c == 0:
            return Form.zero(K, self.degree, self.nvars)
        return Form(K, self.degree, {e: K.mul(v, c) for e, v in self.terms.items()}, self.nvars, _clean=False)

    def __mul__(self, other):
        if not isinstance(other, Form):
            return self.scale(other)
        self._check(other)
        K = self.field
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        if K.p is not None:
            out = {e: c % K.p for e, c in out.items()}
        out = {e: c for e, c in out.items() if c != 0}
        return Form(K, self.degree + other.degree, out, self.nvars, _clean=False)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        result = Form.constant(self.field, 1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # structure -----------------------------------------------------------

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise InputError("zero form has no leading term")
        exp = max(self.terms)
        return exp, self.terms[exp]

    def monic(self) -> "Form":
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.leading()[1]))

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), self.field.zero)

    def evaluate(self, point) -> object:
        coords = point.coords if hasattr(point, "coords") else point
        if hasattr(point, "field") and point.field != self.field:
            raise FieldMismatch("form and point over different fields")
        K = self.field
        coords = [K(c) for c in coords]
        if len(coords) != self.nvars:
            raise InputError("point dimension does not match form")
        powers = [[K.one] for _ in coords]
        for i, c in enumerate(coords):
            for _ in range(self.degree):
                powers[i].append(K.mul(powers[i][-1], c))
        acc = 0
        for exp, c in self.terms.items():
            term = c
            for i, e in enumerate(exp):
                term = term * powers[i][e]
            acc = acc + term
        return K(acc)

    def derive(self, var: int) -> "Form":
        K = self.field
        if self.degree == 0:
            return Form.zero(K, 0, self.nvars)
        out = {}
        for exp, c in self.terms.items():
            if exp[var] == 0:
                continue
            e = list(exp)
            e[var] -= 1
            v = K.mul(c, K(exp[var]))
            if v != 0:
                out[tuple(e)] = v
        return Form(K, self.degree - 1, out, self.nvars, _clean=False)

    def gradient(self):
        return [self.derive(i) for i in range(self.nvars)]

    def substitute(self, forms: Sequence["Form"]) -> "Form":
        """Compose: ``self(forms[0], ..., forms[n-1])``."""
        if len(forms) != self.nvars:
            raise InputError("wrong number of substituted forms")
        K = self.field
        for f in forms:
            if f.field != K:
                raise FieldMismatch("substitution across fields")
        nv = forms[0].nvars
        deg_in = forms[0].degree
        if any(f.degree != deg_in or f.nvars != nv for f in forms):
            raise InputError("substituted forms must share degree and arity")
        cache = [{0: Form.constant(K, 1, nv), 1: f} for f in forms]

        def power(i, e):
            c = cache[i]
            if e not in c:
                c[e] = power(i, e - 1) * forms[i]
            return c[e]

        acc = {}
        for exp, c in self.terms.items():
            term = None
            for i, e in enumerate(exp):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            if term is None:
                term = Form.constant(K, 1, nv)
            for e2, c2 in term.terms.items():
                acc[e2] = acc.get(e2, 0) + c * c2
        if K.p is not None:
            acc = {e: v % K.p for e, v in acc.items()}
        acc = {e: v for e, v in acc.items() if v != 0}
        return Form(K, self.degree * deg_in, acc, nv, _clean=False)

    def linear_change(self, M) -> "Form":
        """``f(M v)``: substitute ``x_i -> sum_j M[i][j] x_j``."""
        M = [[self.field(c) for c in row] for row in M]
        if mat_det(self.field, M) == 0:
            raise SingularMatrix("linear change by a singular matrix")
        lins = [Form.linear(self.field, row) for row in M]
        if self.degree == 0:
            return self
        return self.substitute(lins)

    def vanishing_order(self, point) -> int:
        """Multiplicity of the zero set of a ternary form at a plane point."""
        if self.is_zero():
            return 10**9
        M = frame_at(self.field, point.coords)
        g = self.linear_change(M)
        # point is now (0:0:1); order = degree - max power of z
        return self.degree - max(e[2] for e in g.terms)

    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        K = self.field
        return {
            "degree": self.degree,
            "terms": [{"exp": list(e), "c": K.format_scalar(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field, nvars: int = 3) -> "Form":
        try:
            degree = int(obj["degree"])
            terms = {}
            for t in obj["terms"]:
                exp = tuple(int(e) for e in t["exp"])
                terms[exp] = field.add(terms.get(exp, field.zero), field.parse_scalar(str(t["c"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed form object: {exc}") from None
        return cls(field, degree, terms, nvars)


def monomials(degree: int, nvars: int = 3):
    """All exponent tuples of the given degree, graded-lex descending."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for i in range(degree, -1, -1):
        for rest in monomials(degree - i, nvars - 1):
            out.append((i,) + rest)
    return out


def form_eval(f: Form, pt) -> object:
    return f.evaluate(pt)


def form_derive(f: Form, var: int) -> Form:
    return f.derive(var)


def linear_change(f: Form, M) -> Form:
    return f.linear_change(M)


def form_divexact(num: Form, den: Form) -> Form:
    """Exact quotient ``num / den``; raises :class:`NonDivisible` with the remainder."""
    check_same_field(num, den)
    if den.is_zero():
        raise ZeroDivisionError("division by the zero form")
    K = num.field
    if num.is_zero():
        return Form.zero(K, max(num.degree - den.degree, 0), num.nvars)
    if num.degree < den.degree:
        raise NonDivisible(num)
    lexp, lc = den.leading()
    inv_lc = K.inv(lc)
    rem = dict(num.terms)
    quot = {}
    dterms = list(den.terms.items())
    while rem:
        e = max(rem)
        shift = tuple(a - b for a, b in zip(e, lexp))
        if min(shift) < 0:
            raise NonDivisible(Form(K, num.degree, rem, num.nvars, _clean=False))
        c = K.mul(rem[e], inv_lc)
        quot[shift] = c
        for de, dc in dterms:
            me = tuple(a + b for a, b in zip(de, shift))
            v = K.sub(rem.get(me, K.zero), K.mul(c, dc))
            if v == 0:
                rem.pop(me, None)
            else:
                rem[me] = v
    return Form(K, num.degree - den.degree, quot, num.nvars, _clean=False)


def divides(den: Form, num: Form) -> bool:
    try:
        form_divexact(num, den)
    except NonDivisible:
        return False
    return True


# --------------------------------------------------------------------------
# gcd of ternary forms via bivariate primitive PRS


def _bivariate(f: Form):
    """Dehomogenize at z=1 into K[y][x]: list over x-degree of y-polys."""
    K = f.field
    degx = max(e[0] for e in f.terms)
    rows = [[] for _ in range(degx + 1)]
    for (i, j, _k), c in f.terms.items():
        row = rows[i]
        while len(row) <= j:
            row.append(K.zero)
        row[j] = K.add(row[j], c)
    return [_utrim(r) for r in rows]


def _bcontent(K, A):
    g = []
    for c in A:
        if c:
            g = _ugcd(K, g, c)
            if len(g) == 1:
                break
    return g


def _bprimitive(K, A):
    cont = _bcontent(K, A)
    if not cont:
        return A
    A = [_udiv_exact(K, c, cont) if c else [] for c in A]
    # fix the scalar: leading coefficient of leading x-coefficient is 1
    lead = A[-1][-1]
    return [_uscale(K, c, K.inv(lead)) if c else [] for c in A]


def _bprem(K, A, B):
    """Pseudo-remainder of A by B in K[y][x]."""
    A = [list(c) for c in A]
    lcB = B[-1]
    db = len(B) - 1
    while len(A) - 1 >= db and any(A):
        da = len(A) - 1
        lcA = A[-1]
        A = [_umul(K, c, lcB) for c in A]
        for i, bc in enumerate(B):
            idx = i + da - db
            A[idx] = _usub(K, A[idx], _umul(K, lcA, bc))
        while A and not A[-1]:
            A.pop()
    return A


def _bgcd(K, A, B):
    contA, contB = _bcontent(K, A), _bcontent(K, B)
    c = _ugcd(K, contA, contB)
    a, b = _bprimitive(K, A), _bprimitive(K, B)
    if len(a) < len(b):
        a, b = b, a
    while b and any(b) and len(b) > 1:
        r = _bprem(K, a, b)
        a = b
        b = _bprimitive(K, r) if r else []
    if b and len(b) == 1:
        g = [[K.one]]
    else:
        g = a
    return [_umul(K, c, coef) for coef in g]


def _rehomogenize(K, G, zpow):
    terms = {}
    deg = 0
    for i, c in enumerate(G):
        for j, v in enumerate(c):
            if v != 0:
                deg = max(deg, i + j)
    for i, c in enumerate(G):
        for j, v in enumerate(c):
            if v != 0:
                terms[(i, j, deg - i - j + zpow)] = v
    return Form(K, deg + zpow, terms, 3, _clean=False)


def _zval(f: Form) -> int:
    return min(e[2] for e in f.terms)


def _strip_z(f: Form, k: int) -> Form:
    return Form(f.field, f.degree - k, {(e[0], e[1], e[2] - k): c for e, c in f.terms.items()}, 3, _clean=False)


def _gcd_pair(f: Form, g: Form) -> Form:
    K = f.field
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    zf, zg = _zval(f), _zval(g)
    zc = min(zf, zg)
    A = _bivariate(_strip_z(f, zf))
    B = _bivariate(_strip_z(g, zg))
    G = _bgcd(K, A, B)
    return _rehomogenize(K, G, zc).monic()


def form_gcd(forms: Sequence[Form]) -> Form:
    """Monic gcd (graded-lex leading coefficient 1) of ternary forms."""
    forms = list(forms)
    if not forms:
        raise InputError("gcd of an empty list")
    check_same_field(*forms)
    nonzero = [f for f in forms if not f.is_zero()]
    if not nonzero:
        raise InputError("gcd of zero forms only")
    if any(f.nvars != 3 for f in nonzero):
        nonzero = [_as_ternary(f) for f in nonzero]
    g = nonzero[0]
    for f in nonzero[1:]:
        if g.degree == 0:
            break
        g = _gcd_pair(g, f)
    return g.monic()


def _as_ternary(f: Form) -> Form:
    if f.nvars == 3:
        return f
    if f.nvars == 2:
        return Form(f.field, f.degree, {(0,) + e: c for e, c in f.terms.items()}, 3, _clean=False)
    raise InputError("gcd supports binary and ternary forms")


# --------------------------------------------------------------------------
# resultants


def _det_bareiss(K, M):
    n = len(M)
    M = [[list(c) for c in row] for row in M]
    sign = 1
    prev = [K.one]
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return []
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _usub(K, _umul(K, M[i][j], M[k][k]), _umul(K, M[i][k], M[k][j]))
                M[i][j] = _udiv_exact(K, num, prev) if num else []
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else _uscale(K, det, K.neg(K.one))


def resultant_x(f: Form, g: Form) -> Form:
    """Resultant in ``x`` of two ternary forms, as a binary form in ``(y, z)``.

    Formal degrees are used, so the result is homogeneous of degree
    ``deg f * deg g`` and vanishes at ``(y0:z0)`` iff ``f`` and ``g`` share a
    projective root on the line through ``(1:0:0)`` and ``(0:y0:z0)``.
    """
    check_same_field(f, g)
    K = f.field
    m, n = f.degree, g.degree

    def coeffs(h, d):
        cs = [[] for _ in range(d + 1)]
        for (i, j, _k), c in h.terms.items():
            row = cs[i]
            while len(row) <= j:
                row.append(K.zero)
            row[j] = c
        return [_utrim(c) for c in cs]

    a, b = coeffs(f, m), coeffs(g, n)
    size = m + n
    if size == 0:
        return Form.constant(K, 1, 2)
    S = [[[] for _ in range(size)] for _ in range(size)]
    for r in range(n):
        for i in range(m + 1):
            S[r][r + i] = a[m - i]
    for r in range(m):
        for i in range(n + 1):
            S[n + r][r + i] = b[n - i]
    det = _det_bareiss(K, S)
    deg = m * n
    return Form(K, deg, {(j, deg - j): c for j, c in enumerate(det) if c != 0}, 2, _clean=False)


# --------------------------------------------------------------------------
# binary forms: roots in P^1


def binary_roots(f: Form):
    """Roots of a nonzero binary form over its base field.

    Returns ``(roots, residual)`` where ``roots`` is a list of
    ``((s, t), multiplicity)`` with ``t == 1`` or ``(s, t) == (1, 0)``, and
    ``residual`` is the cofactor with no roots in the base field.
    """
    if f.nvars != 2:
        raise InputError("binary_roots expects a binary form")
    if f.is_zero():
        raise InputError("roots of the zero binary form")
    K = f.field
    roots = []
    # multiplicity of (1:0): power of t dividing f
    tval = min(e[1] for e in f.terms)
    if tval:
        roots.append(((K.one, K.zero), tval))
    # dehomogenize t = 1: polynomial in s
    poly = [K.zero] * (f.degree + 1)
    for (i, _j), c in f.terms.items():
        poly[i] = c
    poly = _utrim(poly)
    residual = list(poly)
    for r in univariate_roots(K, poly):
        mult = 0
        while True:
            q, rem = _udivmod(K, residual, [K.neg(r), K.one])
            if rem:
                break
            residual = q
            mult += 1
        roots.append(((r, K.one), mult))
    rdeg = len(residual) - 1
    res_form = Form(K, rdeg, {(i, rdeg - i): c for i, c in enumerate(residual) if c != 0}, 2, _clean=False)
    roots.sort(key=lambda rt: _scalar_key(K, rt[0]))
    return roots, res_form


def nonlinear_factors(f: Form) -> list:
    """Irreducible factors of degree > 1 of a binary form over Q (as sympy polys)."""
    if f.field.p is not None:
        raise InputError("nonlinear_factors is for rational forms")
    poly = [Fraction(0)] * (f.degree + 1)
    for (i, _j), c in f.terms.items():
        poly[i] = c
    poly = _utrim(poly)
    if len(poly) <= 2:
        return []
    return _nonlinear_rational_factors(poly)


def binary_gcd(forms: Sequence[Form]) -> Form:
    """Monic gcd of binary forms, returned as a binary form."""
    g = form_gcd([_as_ternary(f) for f in forms])
    return Form(g.field, g.degree, {e[1:]: c for e, c in g.terms.items()}, 2, _clean=False)


# --------------------------------------------------------------------------
# 3x3 matrices and projective points


def mat_det(K, M):
    (a, b, c), (d, e, f), (g, h, i) = M
    return K(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))


def mat_inv(K, M):
    M = [[K(c) for c in row] for row in M]
    det = mat_det(K, M)
    if det == 0:
        raise SingularMatrix("matrix is singular")
    (a, b, c), (d, e, f), (g, h, i) = M
    adj = [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]
    inv = K.inv(det)
    return [[K.mul(K(v), inv) for v in row] for row in adj]


def mat_mul(K, A, B):
    return [[K(sum(A[i][k] * B[k][j] for k in range(3))) for j in range(3)] for i in range(3)]


def mat_vec(K, M, v):
    return [K(sum(M[i][k] * v[k] for k in range(3))) for i in range(3)]


def identity_matrix(K):
    return [[K.one if i == j else K.zero for j in range(3)] for i in range(3)]


def cross(K, u, v):
    return [
        K(u[1] * v[2] - u[2] * v[1]),
        K(u[2] * v[0] - u[0] * v[2]),
        K(u[0] * v[1] - u[1] * v[0]),
    ]


def dot(K, u, v):
    return K(sum(a * b for a, b in zip(u, v)))


def _scalar_key(K, coords):
    return tuple(coords)


def canonical(K, coords):
    coords = [K(c) for c in coords]
    for c in coords:
        if c != 0:
            inv = K.inv(c)
            return tuple(K.mul(v, inv) for v in coords)
    raise InputError("the zero vector is not a projective point")


def frame_at(K, q, direction=None):
    """Matrix whose columns are ``(c1, c2, q)``, invertible.

    When ``direction`` (another point) is given, ``c1 = direction`` so that
    the line through ``q`` and ``direction`` becomes ``{y = 0}`` in local
    coordinates centred at ``q = (0:0:1)``.
    """
    q = [K(c) for c in q]
    basis = [[K.one, K.zero, K.zero], [K.zero, K.one, K.zero], [K.zero, K.zero, K.one]]
    cols = []
    if direction is not None:
        cols.append([K(c) for c in direction])
    for e in basis:
        if len(cols) == 2:
            break
        trial = cols + [e]
        if len(trial) == 1:
            if any(c != 0 for c in cross(K, e, q)):
                cols.append(e)
        else:
            M = [[trial[0][r], trial[1][r], q[r]] for r in range(3)]
            if mat_det(K, M) != 0:
                cols.append(e)
    M = [[cols[0][r], cols[1][r], q[r]] for r in range(3)]
    if mat_det(K, M) == 0:
        raise SingularMatrix("could not complete a projective frame")
    return M


@dataclass(frozen=True)
class PlanePoint:
    """A point of P^2 with first nonzero coordinate equal to 1."""

    coords: tuple
    field: Field

    def __init__(self, coords, field: Field = QQ):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", canonical(field, coords))

    @property
    def key(self):
        # points with more leading zeros sort first, then coordinatewise
        lead = next(i for i, c in enumerate(self.coords) if c != 0)
        return (-lead,) + tuple(self.coords)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return "(" + ":".join(self.field.format_scalar(c) for c in self.coords) + ")"

    __repr__ = __str__

    def to_json(self):
        return [self.field.format_scalar(c) for c in self.coords]

    @classmethod
    def from_json(cls, obj, field: Field):
        if not isinstance(obj, (list, tuple)) or len(obj) != 3:
            raise InputError(f"a point is a 3-element array, got {obj!r}")
        return cls([field.parse_scalar(str(c)) for c in obj], field)


def projective_points(K: Field):
    """All points of P^2(F_p) in canonical form."""
    for a in K.elements():
        for b in K.elements():
            yield PlanePoint((1, a, b), K)
    for b in K.elements():
        yield PlanePoint((0, 1, b), K)
    yield PlanePoint((0, 0, 1), K)


# --------------------------------------------------------------------------
# common zeros of ternary forms


def _x_polys_on_lines(f: Form):
    """Coefficients of f as a polynomial in x, each a univariate poly in y (z=1)."""
    K = f.field
    rows = {}
    for (i, j, _k), c in f.terms.items():
        row = rows.setdefault(i, [K.zero] * (f.degree + 1))
        row[j] = c
    return {i: _utrim(r) for i, r in rows.items()}


def _common_x_roots(K, polys):
    g = []
    for p in polys:
        if p:
            g = _ugcd(K, g, p)
            if len(g) == 1:
                return []
    if not g:
        return None  # identically zero on this line
    return univariate_roots(K, g)


def _restrict_to_line(f: Form, y0, z0):
    """Polynomial in x of f(x, y0, z0), low -> high."""
    K = f.field
    out = [K.zero] * (f.degree + 1)
    for (i, j, k), c in f.terms.items():
        out[i] = K.add(out[i], K.mul(c, K.mul(pow(y0, j) if K.p is None else pow(y0, j, K.p), pow(z0, k) if K.p is None else pow(z0, k, K.p))))
    return _utrim(out)


def common_zeros(forms: Sequence[Form], rng_seed: int = 20240601):
    """Common projective zeros in the base field of ternary forms.

    Returns ``(points, unresolved)``.  ``unresolved`` is ``None`` when the
    zeros were fully determined, otherwise a description of an irreducible
    elimination factor certifying common zeros outside the base field
    (rationals only).  The forms must have no common factor.
    """
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        raise InputError("common zeros of zero forms")
    check_same_field(*forms)
    K = forms[0].field
    if K.is_finite:
        return _common_zeros_fp(forms), None
    return _common_zeros_q(forms, rng_seed)


def _common_zeros_fp(forms):
    K = forms[0].field
    pts = set()
    tables = [_x_polys_on_lines(f) for f in forms]
    for y0 in K.elements():
        polys = []
        for f, tab in zip(forms, tables):
            deg = f.degree
            coeffs = [K.zero] * (deg + 1)
            for i, yp in tab.items():
                coeffs[i] = _ueval(K, yp, y0)
            polys.append(_utrim(coeffs))
        roots = _common_x_roots(K, polys)
        if roots is None:
            raise InputError("forms share a common factor (a whole line of zeros)")
        for x0 in roots:
            pts.add(PlanePoint((x0, y0, 1), K))
    polys = [_restrict_to_line(f, 1, 0) for f in forms]
    roots = _common_x_roots(K, polys)
    if roots is None:
        raise InputError("forms share a common factor (the line z = 0)")
    for x0 in roots:
        pts.add(PlanePoint((x0, 1, 0), K))
    if all(f.coefficient((f.degree, 0, 0)) == 0 for f in forms):
        pts.add(PlanePoint((1, 0, 0), K))
    return sorted(pts)


def _random_combo(K, forms, rng):
    """Random combination, lifting lower degrees by random linear factors.

    The lift adds zeros, but candidates are always re-tested on the original
    forms, so it only costs extra candidate lines.
    """
    top = max(f.degree for f in forms)
    acc = Form.zero(K, top)
    for k, f in enumerate(forms):
        g = f.scale(rng.randint(1, 7) if k == 0 else rng.randint(-7, 7))
        while g.degree < top:
            g = g * Form.linear(K, [rng.randint(-3, 3) for _ in range(3)])
        acc = acc + g
    return acc


def _common_zeros_q(forms, seed):
    K = forms[0].field
    rng = random.Random(seed)
    if len(forms) == 1:
        raise InputError("a single form has infinitely many zeros")
    for _attempt in range(12):
        T = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
        if mat_det(K, T) == 0:
            continue
        G = [f.linear_change(T) for f in forms]
        A, B, C = (_random_combo(K, G, rng) for _ in range(3))
        if A.coefficient((A.degree, 0, 0)) == 0:
            continue
        R = resultant_x(A, B)
        if R.is_zero():
            continue
        roots, _res = binary_roots(R)
        pts = set()
        for (y0, z0), _m in roots:
            polys = [_restrict_to_line(g, y0, z0) for g in G]
            xs = _common_x_roots(K, polys)
            if xs is None:
                raise InputError("forms share a common factor")
            for x0 in xs:
                pts.add(PlanePoint(mat_vec(K, T, [x0, y0, z0]), K))
        # certify what is left: zeros of all three combinations project to
        # common roots of the pairwise resultants
        R2 = resultant_x(A, C)
        if R2.is_zero():
            continue
        Rc = binary_gcd([R, R2])
        croots, residual = binary_roots(Rc)
        unresolved = None
        if residual.degree > 0:
            facs = nonlinear_factors(residual)
            if facs:
                unresolved = str(facs[0].as_expr())
        return sorted(pts), unresolved
    raise InputError("elimination failed: the forms appear to share a common factor")
