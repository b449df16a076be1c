import functools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cremona_inertia.algebra import QQ, Field, Form, PlanePoint, monomials
from cremona_inertia.curve import CubicCurve, curve_points, marked_set_build, split_generators

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

WORKED = "y^2*z - x^3 + x*z^2"

# (equation, prime) pairs with three generators whose tangency quartics split
SPLIT_CONFIGS = [
    (WORKED, 17),
    ("y^2*z - x^3 - 2*z^3", 31),
    ("x^3 + y^3 + z^3", 31),
    ("y^2*z + x*y*z - x^3 + z^3", 61),
]


@functools.lru_cache(maxsize=None)
def curve(equation: str, p=None) -> CubicCurve:
    K = QQ if p is None else Field(p)
    return CubicCurve(Form.parse(equation, K))


@functools.lru_cache(maxsize=None)
def split_config(equation: str, p: int, count: int = 3):
    C = curve(equation, p)
    gens = split_generators(C, count)
    return C, gens, marked_set_build(C, gens)


@functools.lru_cache(maxsize=None)
def points_of(equation: str, p: int):
    return curve_points(curve(equation, p))


@pytest.fixture
def worked():
    return curve(WORKED)


@pytest.fixture
def O():
    return PlanePoint((0, 1, 0))


@pytest.fixture
def q():
    return PlanePoint((0, 0, 1))


PRIMES = [7, 11, 13, 31]


@st.composite
def forms(draw, K=None, degree=None, max_terms=4, nvars=3):
    """Random forms over a small prime field (or Q with small coefficients)."""
    if K is None:
        K = draw(st.sampled_from([QQ] + [Field(p) for p in PRIMES]))
    if degree is None:
        degree = draw(st.integers(0, 3))
    mons = monomials(degree, nvars)
    chosen = draw(st.lists(st.sampled_from(mons), min_size=1, max_size=max_terms, unique=True))
    coeffs = draw(st.lists(st.integers(-5, 5).filter(bool), min_size=len(chosen), max_size=len(chosen)))
    return Form(K, degree, {m: K(c) for m, c in zip(chosen, coeffs)}, nvars)


@st.composite
def points(draw, K):
    c = [K(draw(st.integers(-6, 6))) for _ in range(3)]
    if all(x == 0 for x in c):
        c[2] = K.one
    return PlanePoint(c, K)
