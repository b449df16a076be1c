from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cremona_inertia.algebra import (
    QQ,
    Field,
    Form,
    PlanePoint,
    binary_roots,
    common_zeros,
    form_divexact,
    form_gcd,
    frame_at,
    mat_det,
    mat_inv,
    mat_mul,
    monomials,
    projective_points,
    resultant_x,
    univariate_roots,
)
from cremona_inertia.errors import FieldMismatch, InputError, NonDivisible

from conftest import PRIMES, forms, points

fields = st.sampled_from([QQ] + [Field(p) for p in PRIMES])
prime_fields = st.sampled_from([Field(p) for p in PRIMES])


def X(K=QQ):
    return [Form.var(K, i) for i in range(3)]


# --------------------------------------------------------------------------
# fields


def test_field_parse_and_reject():
    assert Field.parse("Q") == QQ
    assert Field.parse("Fp:13").p == 13
    for bad in ("Fp:9", "Fp:5", "Fp:x", "R"):
        with pytest.raises(InputError):
            Field.parse(bad)


@given(prime_fields, st.integers(1, 10**6))
def test_prime_field_inverse(K, a):
    a = K(a)
    assume(a != 0)
    assert K.mul(a, K.inv(a)) == 1


def test_rational_scalars_roundtrip():
    assert QQ.parse_scalar("-3/4") == Fraction(-3, 4)
    assert QQ.format_scalar(Fraction(6, 3)) == "2"
    K = Field(7)
    assert K.parse_scalar("1/2") == 4
    with pytest.raises(InputError):
        K.parse_scalar("1/7")


# --------------------------------------------------------------------------
# forms


def test_worked_example_values():
    F = Form.parse("y^2*z - x^3 + x*z^2")
    assert F.evaluate([1, 1, 1]) == 1
    assert F.derive(0) == Form.parse("-3*x^2 + z^2")
    assert form_divexact(Form.parse("x^2*y*z"), Form.parse("x*z")) == Form.parse("x*y")
    x, y, z = X()
    assert form_gcd([x * y, x * z]) == x


def test_parse_rejects_inhomogeneous():
    with pytest.raises(InputError):
        Form.parse("x^2 + y")


@given(st.data())
def test_ring_identities(data):
    K = data.draw(fields)
    d = data.draw(st.integers(0, 2))
    f, g, h = (data.draw(forms(K=K, degree=d)) for _ in range(3))
    k = data.draw(forms(K=K))
    assert (f + g) * k == f * k + g * k
    assert (f * k) * h == f * (k * h)
    assert f - f == Form.zero(K, d)


@given(st.data())
def test_exact_division_recovers_factor(data):
    K = data.draw(fields)
    f = data.draw(forms(K=K))
    g = data.draw(forms(K=K))
    assert form_divexact(f * g, g) == f


def test_division_reports_remainder():
    x, y, z = X()
    with pytest.raises(NonDivisible) as info:
        form_divexact(x * x + y * z, x)
    assert not info.value.remainder.is_zero()


@given(st.data())
def test_gcd_contains_planted_factor(data):
    K = data.draw(fields)
    h = data.draw(forms(K=K, degree=data.draw(st.integers(1, 2))))
    f = data.draw(forms(K=K, degree=data.draw(st.integers(0, 2))))
    g = data.draw(forms(K=K, degree=data.draw(st.integers(0, 2))))
    G = form_gcd([f * h, g * h])
    form_divexact(G, h.monic())  # h divides the gcd
    form_divexact(f * h, G)
    form_divexact(g * h, G)


@given(st.data())
def test_euler_identity(data):
    K = data.draw(fields)
    f = data.draw(forms(K=K, degree=data.draw(st.integers(1, 3))))
    lhs = sum((v * f.derive(i) for i, v in enumerate(X(K))), Form.zero(K, f.degree))
    assert lhs == f.scale(K(f.degree))


@given(st.data())
def test_evaluation_is_a_homomorphism(data):
    K = data.draw(fields)
    f, g = data.draw(forms(K=K)), data.draw(forms(K=K))
    pt = data.draw(points(K))
    assert (f * g).evaluate(pt) == K.mul(f.evaluate(pt), g.evaluate(pt))


@given(st.data())
def test_linear_change_composes(data):
    K = data.draw(prime_fields)
    f = data.draw(forms(K=K, degree=2))
    M = [[K(data.draw(st.integers(-3, 3))) for _ in range(3)] for _ in range(3)]
    N = [[K(data.draw(st.integers(-3, 3))) for _ in range(3)] for _ in range(3)]
    assume(mat_det(K, M) != 0 and mat_det(K, N) != 0)
    assert f.linear_change(M).linear_change(N) == f.linear_change(mat_mul(K, M, N))


@given(st.data())
def test_substitute_matches_evaluation(data):
    K = data.draw(prime_fields)
    f = data.draw(forms(K=K, degree=2))
    G = [data.draw(forms(K=K, degree=1)) for _ in range(3)]
    pt = data.draw(points(K))
    vals = [g.evaluate(pt) for g in G]
    assert f.substitute(G).evaluate(pt) == f.evaluate(vals)


@given(st.data())
def test_json_roundtrip(data):
    K = data.draw(fields)
    f = data.draw(forms(K=K))
    assert Form.from_json(f.to_json(), K) == f


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        Form.var(QQ, 0) + Form.var(Field(7), 0)


def test_monomials_grlex():
    assert monomials(1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert len(monomials(3)) == 10


# --------------------------------------------------------------------------
# points and matrices


@given(st.data())
def test_point_canonical_under_scaling(data):
    K = data.draw(fields)
    pt = data.draw(points(K))
    c = K(data.draw(st.integers(1, 20)))
    assume(c != 0)
    assert PlanePoint([K.mul(c, v) for v in pt.coords], K) == pt


@given(st.data())
def test_frame_sends_last_column_to_point(data):
    K = data.draw(prime_fields)
    pt = data.draw(points(K))
    M = frame_at(K, pt.coords)
    assert mat_det(K, M) != 0
    assert PlanePoint([row[2] for row in M], K) == pt
    Minv = mat_inv(K, M)
    assert mat_mul(K, M, Minv) == [[K(int(i == j)) for j in range(3)] for i in range(3)]


def test_projective_point_count():
    K = Field(7)
    assert len(list(projective_points(K))) == 7 * 7 + 7 + 1


# --------------------------------------------------------------------------
# roots, resultants, common zeros


@given(prime_fields, st.lists(st.integers(0, 30), min_size=1, max_size=4))
def test_univariate_roots_fp_against_scan(K, roots):
    poly = [K.one]
    for r in roots:
        nxt = [K.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = K.add(nxt[i + 1], c)
            nxt[i] = K.sub(nxt[i], K.mul(c, K(r)))
        poly = nxt
    found = univariate_roots(K, poly)
    scan = [a for a in K.elements() if sum(K.mul(c, pow(a, i, K.p)) for i, c in enumerate(poly)) % K.p == 0]
    assert sorted(set(found)) == sorted(scan)


def test_binary_roots_split_and_residual():
    K = QQ
    f = Form.parse("(x - 2*y)*(x + y)*(x^2 + y^2)", K, variables="xy")
    roots, residual = binary_roots(f)
    assert sorted(r for (r, _t), _m in roots) == [-1, 2]
    assert residual.degree == 2


@given(st.data())
def test_resultant_vanishes_on_common_factor(data):
    K = data.draw(prime_fields)
    h = data.draw(forms(K=K, degree=1))
    assume(h.coefficient((1, 0, 0)) != 0)
    f = data.draw(forms(K=K, degree=1))
    g = data.draw(forms(K=K, degree=2))
    r = resultant_x(f * h, g * h)
    assert r.is_zero()


def test_resultant_of_coprime_pair():
    x, y, z = X()
    r = resultant_x(x * x - y * z, x - y)
    assert not r.is_zero() and r.degree == 2


def test_common_zeros_over_q():
    F = Form.parse("y^2*z - x^3 + x*z^2")
    x, y, z = X()
    zs, unresolved = common_zeros([F, x * y])
    assert [str(p) for p in zs] == ["(0:0:1)", "(0:1:0)", "(1:0:-1)", "(1:0:1)"]
    assert unresolved is None


@given(st.data())
def test_common_zeros_fp_against_enumeration(data):
    K = Field(data.draw(st.sampled_from([7, 11])))
    fs = [data.draw(forms(K=K, degree=data.draw(st.integers(1, 3)))) for _ in range(2)]
    assume(all(not f.is_zero() for f in fs))
    assume(form_gcd(fs).degree == 0)
    zs, _ = common_zeros(fs)
    brute = sorted(p for p in projective_points(K) if all(f.evaluate(p) == 0 for f in fs))
    assert sorted(zs) == brute
