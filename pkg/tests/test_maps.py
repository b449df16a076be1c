import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cremona_inertia.algebra import QQ, Form, PlanePoint, mat_det
from cremona_inertia.curve import NearPoint
from cremona_inertia.errors import (
    DegenerateConfiguration,
    NormalizationViolated,
    NotBirational,
    NotInInertia,
    WrongMultiplicity,
    ZeroMap,
)
from cremona_inertia.maps import (
    RationalMap,
    conic_through,
    conjugate,
    cubic4pts,
    cubic4pts_map,
    decomposition_candidate_check,
    degfix_quotients,
    fixes_curve,
    homaloidal_check,
    map_compose,
    map_equal,
    map_linear,
    normalized_curve,
    pencil_map,
    pencil_map_forms,
    preserves_curve,
    sigma,
    sigma_word,
)

from conftest import SPLIT_CONFIGS, WORKED, curve, points_of, split_config

SIGMA_O = ["x*y*z", "x^3 - x*z^2", "y*z^2"]


def test_sigma_worked(worked, O):
    s = sigma(worked, O)
    assert s == RationalMap.parse(SIGMA_O, QQ)
    twice = map_compose(s, s)
    assert twice == RationalMap.identity(QQ)
    assert twice.content == Form.parse("x*y^2*z^3*(x^2 - z^2)").monic()


def test_sigma_is_identity_on_the_curve():
    """Off its base points, sigma fixes every point of C (here over F_17)."""
    C = curve(WORKED, 17)
    K = C.field
    s = sigma(C, PlanePoint((0, 1, 0), K))
    moved = [p for p in points_of(WORKED, 17) if s(p) is not None and s(p) != p]
    assert moved == []


def test_normalization_and_equality():
    a = RationalMap.parse(["2*x", "2*y", "2*z"], QQ)
    assert a == RationalMap.identity(QQ)
    b = RationalMap.parse(["x*y", "y^2", "y*z"], QQ)
    assert b == a and b.content == Form.parse("y")
    with pytest.raises(ZeroMap):
        RationalMap.parse(["0", "0", "0"], QQ)


def _curve_points_strategy(equation, p):
    return st.sampled_from(points_of(equation, p))


@pytest.mark.parametrize("equation,p", SPLIT_CONFIGS[:2])
@given(data=st.data())
def test_sigma_properties(equation, p, data):
    C = curve(equation, p)
    pt = data.draw(_curve_points_strategy(equation, p))
    s = sigma(C, pt)  # degree 3, involution and fixes_curve are postconditions
    assert s.degree == 3
    quotients = degfix_quotients(s, C)
    assert all(q.degree == 1 for q in quotients)
    assert any(not q.is_zero() for q in quotients)


@pytest.mark.parametrize("equation,p", SPLIT_CONFIGS)
def test_sigma_homaloidal_pattern(equation, p):
    C, gens, _ = split_config(equation, p)
    for g in gens:
        rep = homaloidal_check(sigma(C, g))
        assert rep.pattern == [2, 1, 1, 1, 1]
        assert (rep.sum_k, rep.sum_k2) == (6, 8)
        assert rep.deficit == (0, 0)


def test_worked_base_points(worked, O):
    rep = homaloidal_check(sigma(worked, O))
    proper = [r for r in rep.records if isinstance(r.location, PlanePoint)]
    near = [r for r in rep.records if isinstance(r.location, NearPoint)]
    assert len(proper) == 4 and len(near) == 1
    assert near[0].location.base == O and near[0].location.line == (0, 0, 1)


def test_identity_cross_products_vanish(worked):
    assert all(q.is_zero() for q in degfix_quotients(RationalMap.identity(QQ), worked))


def test_not_in_inertia(worked):
    swap = RationalMap.parse(["y", "x", "z"], QQ)
    assert not fixes_curve(swap, worked)
    with pytest.raises(NotInInertia):
        degfix_quotients(swap, worked)


@settings(max_examples=15)
@given(st.data())
def test_composition_associative_and_degree_bound(data):
    C = curve(WORKED, 17)
    K = C.field
    pts = points_of(WORKED, 17)
    f, g = (sigma(C, data.draw(st.sampled_from(pts)), verify=False) for _ in range(2))
    M = [[data.draw(st.integers(0, 16)) for _ in range(3)] for _ in range(3)]
    assume(mat_det(K, M) != 0)
    h = map_linear(M, K)
    fg = map_compose(f, g)
    assert fg.degree <= f.degree * g.degree
    assert (fg.degree == f.degree * g.degree) == (fg.content.degree == 0)
    assert map_equal(map_compose(f, map_compose(g, h)), map_compose(fg, h))


def test_conjugate_by_identity(worked, O):
    s = sigma(worked, O)
    I = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert conjugate(s, I) == s


def test_two_sigma_degrees(worked, O, q):
    assert sigma_word(worked, [O, q]).degree == 7
    assert sigma_word(worked, [q, O]).degree == 7
    assert sigma_word(worked, [O, O]) == RationalMap.identity(QQ)


# --------------------------------------------------------------------------
# cubic4pts


def _cubic4pts_configs(equation, p, count=3):
    C = curve(equation, p)
    K = C.field
    p1 = C.tangency_points(split_config(equation, p)[1][0])[0]
    Cn, _ = normalized_curve(C, p1)
    pts = [a for a in points_of(equation, p)]
    pts = [PlanePoint(v, K) for v in _to_frame(C, p1, pts)]
    pts = [a for a in pts if a != PlanePoint((1, 0, 0), K) and Cn.contains(a)]
    out = []
    for i in range(len(pts)):
        tri = pts[i:i + 3]
        if len(tri) < 3:
            break
        try:
            G = conic_through(Cn, tri)
        except Exception:
            continue
        out.append((Cn, G, tri))
        if len(out) == count:
            break
    return out


def _to_frame(C, p1, pts):
    from cremona_inertia.algebra import mat_inv, mat_vec

    _, M = normalized_curve(C, p1)
    K = C.field
    Minv = mat_inv(K, M)
    return [mat_vec(K, Minv, a.coords) for a in pts]


@pytest.mark.parametrize("equation,p", SPLIT_CONFIGS[:2])
def test_cubic4pts_outputs(equation, p):
    configs = _cubic4pts_configs(equation, p)
    assert configs
    for Cn, G, tri in configs:
        phi = cubic4pts(Cn, G, tri)
        rep = homaloidal_check(phi)
        assert rep.pattern == [2, 1, 1, 1, 1]
        assert decomposition_candidate_check(phi, Cn).ok


def test_cubic4pts_degenerate_and_normalization():
    with pytest.raises(NotBirational):
        # reducible F = x(xy + yz) with G2 = F2 makes the determinant vanish
        cubic4pts_map(Form.parse("x^2*y + x*y*z"), Form.parse("x*y + y*z"))
    with pytest.raises(NormalizationViolated):
        cubic4pts_map(Form.parse("x^3 + y^3 + z^3"), Form.parse("x*y"))


# --------------------------------------------------------------------------
# pencil maps


def test_pencil_map_line(worked, O):
    phi = pencil_map(worked, O, Form.parse("x + y + 2*z"))
    assert phi.degree == 3
    assert fixes_curve(phi, worked)
    assert phi != sigma(worked, O)


def test_pencil_map_recovers_sigma(worked, O):
    Cn, _ = normalized_curve(worked, O)
    p = PlanePoint((1, 0, 0))
    F2 = Form(QQ, 2, {(0,) + e[1:]: c for e, c in Cn.F.terms.items() if e[0] == 1})
    Cd = Form.parse("2*x*y") + F2
    assert pencil_map(Cn, p, Cd) == sigma(Cn, p)


def test_pencil_map_errors(worked, O):
    with pytest.raises(WrongMultiplicity):
        pencil_map(worked, O, Form.parse("x^2 + y^2"))
    y = Form.var(QQ, 1)
    with pytest.raises(DegenerateConfiguration):
        # x^2 y - y^3 = y(x - y)(x + y) has rational residual roots on every line
        pencil_map_forms(Form.zero(QQ, 2), -(y * y * y), Form.parse("1"), y)


def test_decomposition_on_compositions():
    C, gens, _ = split_config(WORKED, 17)
    phi = sigma_word(C, [gens[0], gens[1]])
    assert preserves_curve(phi, C)
    assert decomposition_candidate_check(phi, C).ok
