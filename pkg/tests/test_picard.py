import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cremona_inertia.curve import MarkedPointSet, marked_set_build
from cremona_inertia.errors import (
    NotAGenerator,
    NotInSuccRelation,
    RecursionMismatch,
    UnknownId,
    WordNotReduced,
)
from cremona_inertia.picard import (
    FAMILIES,
    DivisorClass,
    PicLattice,
    Word,
    all_values,
    apply_sigma,
    certify_free_product,
    check_assertions,
    count_reduced_words,
    delta,
    lambda_,
    lattice_new,
    overt_step,
    predicted_degree,
    reduced_words,
    sigma_action,
    word_evaluate,
)

from conftest import SPLIT_CONFIGS, split_config


def marked_sets():
    """A spread of configurations: abstract, with near records, exact over F_p."""
    out = [
        MarkedPointSet.abstract(1),
        MarkedPointSet.abstract(2, inflexion=(0,)),
        MarkedPointSet.abstract(3),
        MarkedPointSet.abstract(5, inflexion=(1, 3)),
    ]
    out += [split_config(eq, p)[2] for eq, p in SPLIT_CONFIGS]
    return out


CONFIGS = marked_sets()
config_ids = [f"{m.mode}-{len(m.generators)}g-{len(m.omega)}pts" for m in CONFIGS]


def random_class(rng, n, bound=30):
    return DivisorClass(rng.randint(-bound, bound), tuple(rng.randint(-bound, bound) for _ in range(n)))


def test_lattice_shapes():
    lat = lattice_new(MarkedPointSet.abstract(1))
    assert lat.size == 6
    assert lat.J == [[1 if i == j == 0 else (-1 if i == j else 0) for j in range(6)] for i in range(6)]
    assert lat.form(lat.K, lat.K) == 9 - 5
    empty = PicLattice(MarkedPointSet(None, (), (), frozenset(), mode="abstract"))
    assert empty.basis == ("L",) and empty.J == [[1]]


@pytest.mark.parametrize("ms", CONFIGS, ids=config_ids)
def test_action_invariants(ms):
    lat = PicLattice(ms)
    rng = random.Random(5)
    for p in lat.generators:
        act = sigma_action(lat, p)
        assert act.check(lat) == []
        for _ in range(50):
            D = random_class(rng, lat.n)
            assert act.apply(D) == apply_sigma(lat, D, p)
        L = lat.line()
        image = act.apply(L)
        assert act.apply(image) == L
        assert lat.form(image.vector(), image.vector()) == 1


def test_sigma_action_examples():
    lat = PicLattice(MarkedPointSet.abstract(1))
    image = apply_sigma(lat, lat.line(), 0)
    assert image == DivisorClass(3, (2, 1, 1, 1, 1))
    with pytest.raises(NotAGenerator):
        sigma_action(lat, 1)


def test_functional_examples():
    lat = PicLattice(MarkedPointSet.abstract(1))
    L = lat.line()
    assert all(delta(lat, L, a) == 2 for a in range(lat.n))
    assert all(lambda_(lat, L, 0, a) == 1 for a in lat.succ_of[0])
    S = apply_sigma(lat, L, 0)
    assert delta(lat, S, 0) == -2
    # direct value: m - m_p + m_a - (other successors) = 3 - 2 + 1 - 3
    assert lambda_(lat, S, 0, 1) == -1
    zero = DivisorClass(0, (0,) * lat.n)
    assert delta(lat, zero, 0) == 0 and lambda_(lat, zero, 0, 1) == 0
    with pytest.raises(UnknownId):
        delta(lat, L, 99)
    with pytest.raises(NotInSuccRelation):
        lambda_(lat, L, 1, 0)


def test_overt_step_on_L():
    ms = MarkedPointSet.abstract(2)
    lat = PicLattice(ms)
    D, tab = overt_step(lat, lat.line(), 0)
    assert tab.direct_deltas[0] == -2
    assert {tab.direct_deltas[a] for a in lat.succ_of[0]} == {4}
    others = [a for a in range(lat.n) if a != 0 and a not in lat.succ_of[0]]
    assert {tab.direct_deltas[a] for a in others} == {6}


@pytest.mark.parametrize("ms", CONFIGS, ids=config_ids)
def test_recursion_table_matches_direct(ms):
    lat = PicLattice(ms)
    rng = random.Random(11)
    for _ in range(1000):
        D = random_class(rng, lat.n)
        overt_step(lat, D, rng.choice(lat.generators))


def test_printed_table_coefficient_diverges():
    """With two generators some pair is unrelated to p; the printed 2*delta_p is off there."""
    lat = PicLattice(MarkedPointSet.abstract(2))
    with pytest.raises(RecursionMismatch) as info:
        overt_step(lat, lat.line(), 0, verbatim=True)
    kinds = {m[0] for m in info.value.details}
    assert kinds == {"lambda"}


@given(st.data())
def test_recursion_property(data):
    ms = data.draw(st.sampled_from(CONFIGS))
    lat = PicLattice(ms)
    D = DivisorClass(data.draw(st.integers(-50, 50)),
                     tuple(data.draw(st.integers(-50, 50)) for _ in range(lat.n)))
    D1, tab = overt_step(lat, D, data.draw(st.sampled_from(lat.generators)))
    assert tab.mismatches == []


def test_word_evaluate_examples():
    lat = PicLattice(MarkedPointSet.abstract(2))
    D, reports = word_evaluate(lat, [])
    assert D == lat.line() and len(reports) == 1 and reports[0].ok
    D, reports = word_evaluate(lat, [0])
    assert D.m == 3
    assert reports[-1].deltas[0] == -2
    assert set(reports[-1].results) == set(FAMILIES)
    with pytest.raises(WordNotReduced):
        Word((0, 0))
    with pytest.raises(NotAGenerator):
        word_evaluate(lat, [1])


def test_assertion_failure_is_reported():
    lat = PicLattice(MarkedPointSet.abstract(2))
    L = lat.line()
    deltas, lambdas = all_values(lat, L)
    rep = check_assertions(lat, deltas, lambdas, 0, L, 1)  # delta_0(L) = 2 is not negative
    assert not rep.ok and not rep.results["delta_p_negative"]


@pytest.mark.parametrize("ms", CONFIGS, ids=config_ids)
def test_degree_symmetry(ms):
    lat = PicLattice(ms)
    for w in reduced_words(lat.generators, 5):
        assert predicted_degree(lat, w) == predicted_degree(lat, w[::-1])


def test_predicted_degree_examples(worked, O, q):
    lat = PicLattice(MarkedPointSet.abstract(2))
    assert predicted_degree(lat, [0]) == 3
    assert predicted_degree(lat, [0, 5]) == 9
    hybrid = PicLattice(marked_set_build(worked, [O, q], formal=True))
    assert predicted_degree(hybrid, [1, 0]) == 7


def test_word_counts():
    for k in (2, 3, 4):
        for n in range(1, 6):
            got = sum(1 for w in reduced_words(range(k), n) if len(w) == n)
            assert got == count_reduced_words(k, n)


def test_certificate_small_cases():
    cert = certify_free_product(PicLattice(MarkedPointSet.abstract(1)), 1)
    assert cert.status == "certified" and cert.words_checked == 1 and cert.words_total == 1
    cert = certify_free_product(PicLattice(MarkedPointSet.abstract(3)), 10)
    assert cert.words_checked == 1536 and cert.words_total == 3069


def test_certificate_sharded_equals_serial():
    lat = PicLattice(MarkedPointSet.abstract(3, inflexion=(2,)))
    a = certify_free_product(lat, 8).dumps()
    b = certify_free_product(lat, 8, workers=3).dumps()
    assert a == b


@pytest.mark.slow
def test_certificate_five_abstract_generators():
    cert = certify_free_product(PicLattice(MarkedPointSet.abstract(5)), 8)
    assert cert.status == "certified"
    assert cert.words_checked == count_reduced_words(5, 8)


@pytest.mark.parametrize("ms", CONFIGS, ids=config_ids)
def test_certificates_on_all_configs(ms):
    lat = PicLattice(ms)
    cert = certify_free_product(lat, 6 if len(lat.generators) > 3 else 8)
    assert cert.status == "certified"
