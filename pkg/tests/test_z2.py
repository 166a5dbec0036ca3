import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from stablab.errors import ParseError
from stablab.z2 import (Nn2Sft, PeriodVector, TorusConfig, aperiodicity_probe, check_torus,
    format_nn2, iter_tori, locally_valid_square, parse_nn2, period_vector_graph, periodize, recode,
    search_torus, stabilizer_lattice, torus_lattices)

CHECKER = Nn2Sft.checkerboard()
FULL = Nn2Sft.full_shift('ab')
DEAD = Nn2Sft(('a',), {('a', 'a')}, {('a', 'a')})
# rows read abcabc..., each row is the one below moved right by one
DIAGONAL = Nn2Sft(('a', 'b', 'c'),
    {(x, y) for x in 'abc' for y in 'abc' if (x, y) not in {('a', 'b'), ('b', 'c'), ('c', 'a')}},
    {(x, y) for x in 'abc' for y in 'abc' if (x, y) not in {('b', 'a'), ('c', 'b'), ('a', 'c')}})


def torus(rows):
    ''' rows listed bottom first, as strings '''
    q, p = len(rows), len(rows[0])
    return TorusConfig(p, q, tuple(tuple(rows[j][i] for j in range(q)) for i in range(p)))


@st.composite
def nn2_sfts(draw, max_letters=3):
    n = draw(st.integers(1, max_letters))
    letters = 'abc'[:n]
    pairs = [(a, b) for a in letters for b in letters]
    h = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    v = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Nn2Sft(tuple(letters), {p for p, k in zip(pairs, h) if k}, {p for p, k in zip(pairs, v) if k})


def canonical_vectors(pmax=2, qmax=2):
    out = [PeriodVector(p, 0) for p in range(1, pmax + 1)]
    out += [PeriodVector(p, q) for q in range(1, qmax + 1) for p in range(-pmax, pmax + 1)]
    return out


# ------------------------------------------------------------------- tori

def test_check_torus_examples():
    assert check_torus(FULL, torus(['ab', 'ba'])) == []
    bad = check_torus(Nn2Sft(('a',), {('a', 'a')}), torus(['a']))
    assert [(v.i, v.j, v.direction, v.pair) for v in bad] == [(0, 0, 'h', ('a', 'a'))]
    assert check_torus(CHECKER, torus(['ab', 'ba'])) == []
    assert len(check_torus(CHECKER, torus(['aa', 'ba']))) == 4


def test_check_torus_rejects_bad_shapes():
    with pytest.raises(ValueError):
        TorusConfig(2, 2, (('a', 'b'),))
    with pytest.raises(ValueError):
        check_torus(CHECKER, torus(['az', 'ba']))


def test_search_examples():
    assert search_torus(CHECKER, 2, 2) == torus(['ab', 'ba'])
    assert search_torus(CHECKER, 1, 1) is None
    assert search_torus(CHECKER, 3, 3) is None
    assert search_torus(DIAGONAL, 3, 3) == torus(['abc', 'cab', 'bca'])


@settings(max_examples=40, deadline=None)
@given(nn2_sfts(2), st.integers(1, 3), st.integers(1, 3))
def test_torus_enumeration_matches_product_oracle(sft, p, q):
    mine = {tuple(sorted(((i, j), c.at(i, j)) for i in range(p) for j in range(q)))
            for c in iter_tori(sft, p, q)}
    brute = {tuple(sorted(x.items())) for x in oracles.brute_tori(sft.alphabet, sft.h_forbidden,
             sft.v_forbidden, p, q)}
    assert mine == brute
    first = search_torus(sft, p, q)
    assert (first is None) == (not brute)
    if first is not None:
        assert check_torus(sft, first) == []


def test_locally_valid_square():
    assert locally_valid_square(DEAD, 1) == (('a',),)
    assert locally_valid_square(DEAD, 2) is None
    assert locally_valid_square(CHECKER, 3) is not None


# ------------------------------------------------------------ stabilizers

def test_stabilizer_examples():
    assert stabilizer_lattice(torus(['a'])) == [[1, 0], [0, 1]]
    assert stabilizer_lattice(torus(['ab', 'ba'])) == [[2, 0], [1, 1]]
    assert stabilizer_lattice(torus(['ab'])) == [[2, 0], [0, 1]]


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_stabilizer_matches_shift_enumeration(p, q, data):
    letters = data.draw(st.lists(st.sampled_from('ab'), min_size=p * q, max_size=p * q))
    cfg = TorusConfig(p, q, tuple(tuple(letters[i * q:(i + 1) * q]) for i in range(p)))
    x = {(i, j): cfg.at(i, j) for i in range(p) for j in range(q)}
    brute = oracles.brute_stabilizer(x, p, q)
    basis = stabilizer_lattice(cfg)
    members = oracles.lattice_members(basis, 4)
    for a in range(-4, 5):
        for b in range(-4, 5):
            assert ((a, b) in members) == ((a % p, b % q) in brute)


# ------------------------------------------------------- vector strips

def test_vector_canonical_form():
    assert PeriodVector(-1, -1) == PeriodVector(1, 1)
    assert (PeriodVector(-2, 0).p, PeriodVector(-2, 0).q) == (2, 0)
    assert PeriodVector(3, -1) == PeriodVector(-3, 1)
    with pytest.raises(ValueError):
        PeriodVector(0, 0)


def test_vector_graph_examples():
    g = period_vector_graph(FULL, PeriodVector(1, 0))
    assert set(g.alphabet) == {'a', 'b'} and len(g.edges) == 4
    assert period_vector_graph(CHECKER, PeriodVector(1, 0)).is_empty()
    assert not period_vector_graph(CHECKER, PeriodVector(1, 1)).is_empty()


def test_periodize_examples():
    assert periodize(FULL, PeriodVector(1, 0)) == torus(['a'])
    w = periodize(CHECKER, PeriodVector(2, 0))
    assert w.p == 2 and w.q <= 4 and check_torus(CHECKER, w) == []
    assert periodize(CHECKER, PeriodVector(1, 0)) is None


@pytest.mark.parametrize('v, fixed', [((1, 1), True), ((-1, 1), True), ((2, 1), False), ((0, 1), False),
                                      ((0, 2), True), ((2, 2), True), ((1, 2), False), ((-2, 1), False)])
def test_checkerboard_vectors(v, fixed):
    w = periodize(CHECKER, PeriodVector(*v))
    assert (w is not None) == fixed
    if w is not None:
        assert stabilizer_lattice(w) == [[2, 0], [1, 1]]


@settings(max_examples=60, deadline=None)
@given(nn2_sfts())
def test_periodization_and_sound_reduction(sft):
    for v in canonical_vectors():
        g = period_vector_graph(sft, v)
        w = periodize(sft, v)
        assert (w is None) == g.is_empty()
        if w is not None:
            assert check_torus(sft, w) == []
            assert w.shifted(v.p, v.q) == w
        # any v-fixed torus found by brute force forces a non-empty graph
        if len(sft.alphabet) <= 2:
            for k, m in itertools.product(range(1, 3), repeat=2):
                p, q = k * v.width, max(v.q, 1) * m
                if any(oracles.fixed_by_vector(x, p, q, (v.p, v.q)) for x in
                       oracles.brute_tori(sft.alphabet, sft.h_forbidden, sft.v_forbidden, p, q)):
                    assert not g.is_empty()


@settings(max_examples=60, deadline=None)
@given(nn2_sfts(2), st.integers(1, 3))
def test_row_period_bound(sft, p):
    w = periodize(sft, PeriodVector(p, 0))
    if w is not None:
        assert w.p == p and w.q <= len(sft.alphabet) ** p


# ------------------------------------------------------------------ probe

def test_probe_examples():
    rep = aperiodicity_probe(CHECKER, 2)
    assert rep.name == 'PeriodicPointFound' and rep.witness == torus(['ab', 'ba'])
    rep = aperiodicity_probe(Nn2Sft(('a',)), 1)
    assert rep.name == 'PeriodicPointFound' and rep.witness == torus(['a'])
    assert aperiodicity_probe(DEAD, 1).name == 'EmptyWithinBound'


def test_probe_finds_vector_beyond_torus_bound():
    rep = aperiodicity_probe(DIAGONAL, 2)
    assert rep.name == 'VectorStabilizedFound'
    assert rep.vector == PeriodVector(1, 1)
    assert check_torus(DIAGONAL, rep.witness) == []
    assert rep.to_dict()['stabilizer'] == [[3, 0], [1, 1]]


def test_probe_unknown():
    # rows abab... and cdcd... stacked alternately: every stabilizer is 2Z x 2Z
    h_ok = {('a', 'b'), ('b', 'a'), ('c', 'd'), ('d', 'c')}
    v_ok = {('a', 'c'), ('c', 'a'), ('b', 'd'), ('d', 'b')}
    pairs = {(x, y) for x in 'abcd' for y in 'abcd'}
    sft = Nn2Sft(tuple('abcd'), pairs - h_ok, pairs - v_ok)
    assert aperiodicity_probe(sft, 1).name == 'Unknown'
    rep = aperiodicity_probe(sft, 2)
    assert rep.name == 'PeriodicPointFound'
    assert stabilizer_lattice(rep.witness) == [[2, 0], [0, 2]]


def test_probe_is_thread_independent():
    rng = random.Random(5)
    for _ in range(15):
        letters = 'abc'[:rng.randint(1, 3)]
        pairs = [(a, b) for a in letters for b in letters]
        sft = Nn2Sft(tuple(letters), {p for p in pairs if rng.random() < 0.4},
                     {p for p in pairs if rng.random() < 0.4})
        assert aperiodicity_probe(sft, 2, threads=1) == aperiodicity_probe(sft, 2, threads=4)


def test_probe_rejects_bad_bound():
    with pytest.raises(ValueError):
        aperiodicity_probe(CHECKER, 0)


# ------------------------------------------------------------- conjugacy

@settings(max_examples=40, deadline=None)
@given(nn2_sfts(), st.permutations('abc'))
def test_letter_permutation_keeps_stabilizers(sft, perm):
    mapping = dict(zip(sft.alphabet, [c for c in perm if c in sft.alphabet]))
    other = recode(sft, mapping)
    for p, q in [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)]:
        assert torus_lattices(sft, p, q) == torus_lattices(other, p, q)
    for v in canonical_vectors(1, 1):
        a, b = periodize(sft, v), periodize(other, v)
        assert (a is None) == (b is None)
        if a is not None:
            assert stabilizer_lattice(a) == stabilizer_lattice(b)


# ---------------------------------------------------------------- formats

def test_text_format_round_trip():
    text = 'alphabet: a b\nhforbid: a a\nhforbid: b b\nvforbid: a a\nvforbid: b b\n'
    assert parse_nn2(text) == CHECKER
    assert format_nn2(CHECKER) == text
    assert parse_nn2(format_nn2(DIAGONAL)) == DIAGONAL


@pytest.mark.parametrize('text, line', [
    ('hforbid: a a\n', 1), ('alphabet: a\nhforbid: a b\n', 2), ('alphabet: a\nvforbid: a\n', 2),
    ('alphabet: a\nforbid: a a\n', 2),
])
def test_text_format_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_nn2(text)
    assert exc.value.line == line


def test_witness_json():
    cfg = torus(['ab', 'ba', 'aa'])
    d = json.loads(cfg.to_json())
    assert d == {'p': 2, 'q': 3, 'rows': [['a', 'b'], ['b', 'a'], ['a', 'a']]}
    assert TorusConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ValueError):
        TorusConfig.from_dict({'p': 2, 'q': 1, 'rows': [['a']]})


def test_torus_kernel_matches_brute_force():
    from stablab.z2 import torus_kernel
    for sft in (CHECKER, FULL, DIAGONAL):
        for p, q in [(1, 1), (2, 2), (3, 3), (2, 3)]:
            tori = oracles.brute_tori(sft.alphabet, sft.h_forbidden, sft.v_forbidden, p, q)
            got = torus_kernel(sft, p, q)
            if not tori:
                assert got is None
                continue
            common = set.intersection(*(oracles.brute_stabilizer(x, p, q) for x in tori))
            members = {(a % p, b % q) for a, b in oracles.lattice_members(got, 3)}
            assert members == common
