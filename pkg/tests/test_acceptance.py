'''
Exit criteria. Each test prints one PASS/FAIL line; the lines are also
collected into a summary section at the end of the run.
'''
import itertools
import os
import random
import subprocess
import sys
import time

import pytest

import oracles
from conftest import VERDICTS
from stablab.abelian import (AbelianNnSft, PeriodicConfig, free_elements_check, free_extension,
    higher_power, iter_periodic, pull_back, push_forward, to_tileset_graph)
from stablab.corpus import QUOTIENT_UNIVERSES, random_abelian, random_essential_graph, \
    random_nn2, random_target, random_unrealizable
from stablab.errors import NotRealizable
from stablab.groups import FgAbelianGroup, SubgroupLattice, coset_transversal, quotient
from stablab.realizer import gamma_cycle, gamma_progression, realize
from stablab.semilinear import equal_sl, is_realizable_period_set
from stablab.z2 import PeriodVector, check_torus, period_vector_graph, periodize
from stablab.zshift import (count_periodic_points, has_aperiodic_point, least_period_exists, multiples,
    product, prune_essential, union)

pytestmark = pytest.mark.acceptance


def verdict(n, ok, detail, seconds=None, limit=None):
    timing = '' if seconds is None else f' [{seconds:.2f}s' + (f' / limit {limit}s]' if limit else ']')
    line = f'criterion {n}: {"PASS" if ok else "FAIL"} {detail}{timing}'
    print(line)
    VERDICTS.append(line)
    assert ok, line


def letters_edges(g):
    return list(g.alphabet), list(g.edges)


def test_criterion_1_gamma_families():
    t0 = time.perf_counter()
    bad = [p for p in range(1, 9) if multiples(gamma_cycle(p)).elements_upto(100) != [p]]
    for a, k in itertools.product(range(1, 4), range(1, 5)):
        expect = [0] + [a * (k + n) for n in range(101) if a * (k + n) <= 100]
        if multiples(gamma_progression(a, k)).elements_upto(100) != expect:
            bad.append((a, k))
    dt = time.perf_counter() - t0
    verdict(1, not bad and dt < 5, f'Gamma cycles p<=8 and progressions a<=3, k<=4 on [0,100]; bad={bad}', dt, 5)


def test_criterion_2_realizer_round_trip():
    rng = random.Random(2)
    t0 = time.perf_counter()
    bad = []
    for _ in range(200):
        target = random_target(rng)
        if not equal_sl(multiples(prune_essential(realize(target))), target):
            bad.append(str(target))
    dt = time.perf_counter() - t0
    verdict(2, not bad and dt < 30, f'200 random targets realized exactly; bad={bad[:3]}', dt, 30)


def test_criterion_3_refusals():
    rng = random.Random(3)
    bad = []
    for _ in range(100):
        target = random_unrealizable(rng)
        assert target.is_finite() == (0 in target.elements_upto(0))
        try:
            realize(target)
            bad.append(str(target))
        except NotRealizable:
            if is_realizable_period_set(target):
                bad.append(str(target))
    verdict(3, not bad, f'100 finite-with-0 or infinite-without-0 sets refused; accepted={bad[:3]}')


def test_criterion_4_least_periods_against_words():
    rng = random.Random(4)
    t0 = time.perf_counter()
    bad = []
    for _ in range(100):
        g = random_essential_graph(rng, 6)
        le = letters_edges(g)
        for p in range(1, 11):
            if least_period_exists(g, p) != oracles.has_primitive_walk(*le, p):
                bad.append((g.sorted_edges(), p))
        if has_aperiodic_point(g) != oracles.has_infinitely_many_periods(*le):
            bad.append((g.sorted_edges(), 'aperiodic'))
    dt = time.perf_counter() - t0
    verdict(4, not bad and dt < 60, f'100 graphs, p<=10 and aperiodic flag vs word enumeration; bad={bad[:2]}',
            dt, 60)


def test_criterion_5_union_and_product():
    rng = random.Random(5)
    bad = []
    for _ in range(50):
        g1, g2 = random_essential_graph(rng, 4), random_essential_graph(rng, 4)
        w1 = oracles.least_periods(*letters_edges(g1), 12)
        w2 = oracles.least_periods(*letters_edges(g2), 12)
        inf1 = oracles.has_infinitely_many_periods(*letters_edges(g1))
        inf2 = oracles.has_infinitely_many_periods(*letters_edges(g2))
        pairs = [(a, b) for a in g1.alphabet for b in g2.alphabet]
        pair_edges = [((a, b), (c, d)) for a, c in g1.edges for b, d in g2.edges]
        inf12 = oracles.has_infinitely_many_periods(pairs, pair_edges)
        w1 |= {0} if inf1 else set()
        w2 |= {0} if inf2 else set()
        lcms = oracles.pointwise_lcm(w1, w2, 12) - {0} | ({0} if inf12 else set())
        for g, expect in [(union(g1, g2), w1 | w2), (product(g1, g2), lcms)]:
            pg = prune_essential(g)
            got = set() if pg.is_empty() else set(multiples(pg).elements_upto(12))
            if got != expect:
                bad.append((g1.sorted_edges(), g2.sorted_edges()))
    verdict(5, not bad, f'50 graph pairs, union and product periods up to 12; bad={len(bad)}')


CANONICAL = sorted({(v.p, v.q) for p in range(-2, 3) for q in range(0, 3) if (p, q) != (0, 0)
                    for v in [PeriodVector(p, q)] if abs(v.p) <= 2 and v.q <= 2})


def _periodization_run():
    rng = random.Random(6)
    cases = []
    for _ in range(100):
        sft = random_nn2(rng, 3)
        for p, q in CANONICAL:
            v = PeriodVector(p, q)
            nonempty = not prune_essential(period_vector_graph(sft, v)).is_empty()
            cases.append((sft, v, nonempty, periodize(sft, v)))
    return cases


@pytest.fixture(scope='module')
def periodization():
    t0 = time.perf_counter()
    cases = _periodization_run()
    return cases, time.perf_counter() - t0


def test_criterion_6_periodization(periodization):
    cases, dt = periodization
    bad = []
    for sft, v, nonempty, w in cases:
        if nonempty and (w is None or check_torus(sft, w) or w.shifted(v.p, v.q) != w):
            bad.append((sft, v))
        if not nonempty and w is not None:
            bad.append((sft, v))
    hits = sum(1 for c in cases if c[2])
    verdict(6, not bad and dt < 300,
            f'{len(cases)} (sft, v) cases, {hits} non-empty, all witnesses valid; bad={len(bad)}', dt, 300)


def test_criterion_7_horizontal_witness_height(periodization):
    cases, _ = periodization
    checked, bad = 0, []
    for sft, v, nonempty, w in cases:
        if v.q == 0 and len(sft.alphabet) <= 2 and v.p <= 3 and w is not None:
            checked += 1
            if w.q > len(sft.alphabet) ** v.p:
                bad.append((sft, v, w.q))
    verdict(7, checked > 0 and not bad, f'{checked} witnesses for v=(p,0) have height <= |A|^p; bad={bad[:2]}')


def _pull_configs_match(x, g, n, lat):
    ''' pulled tori correspond to source tori, and stabilizers are preimages '''
    qmap = quotient(g, n)
    q = qmap.target
    y = pull_back(x, g, n)
    low = SubgroupLattice(q, tuple(qmap.project(b) for b in lat.basis))
    sources = list(iter_periodic(x, low))
    pulled = list(iter_periodic(y, lat))
    if len(sources) != len(pulled):
        return False
    for c in pulled:
        src = PeriodicConfig(low, tuple((t, c.at(qmap.section(t))) for t in coset_transversal(low)))
        if src.violations(x):
            return False
        stab = src.stabilizer()
        pre = SubgroupLattice(g, tuple(qmap.section(s) for s in stab.basis) + tuple(map(tuple, n)))
        if c.stabilizer() != pre:
            return False
    return True


def test_criterion_8_construction_round_trips():
    rng = random.Random(8)
    names = sorted(QUOTIENT_UNIVERSES)
    bad = []
    for k in range(100):
        q, g, n = QUOTIENT_UNIVERSES[names[k % 3]]
        x = random_abelian(rng, q)
        y = pull_back(x, g, n)
        if push_forward(y, n) != x or pull_back(push_forward(y, n), g, n) != y:
            bad.append(('round trip', x))
    # stabilizer transport on every torus up to 4 x 4
    z2 = FgAbelianGroup(2)
    tori = 0
    for n in ([(0, 2)], [(1, 1)], [(2, 0), (0, 2)]):
        for _ in range(6):
            x = random_abelian(rng, quotient(z2, n).target, 2)
            for p, qq in itertools.product(range(1, 5), repeat=2):
                tori += 1
                if not _pull_configs_match(x, z2, n, SubgroupLattice(z2, ((p, 0), (0, qq)))):
                    bad.append(('transport', x, p, qq))
    # higher-power counts
    z = FgAbelianGroup(1)
    powers = 0
    for _ in range(20):
        x = random_abelian(rng, z, 3)
        base = prune_essential(to_tileset_graph(x))
        for m in (2, 3):
            hp = prune_essential(to_tileset_graph(higher_power(x, SubgroupLattice(z, ((m,),)))))
            for nn in range(1, 12 // m + 1):
                powers += 1
                a = 0 if hp.is_empty() else count_periodic_points(hp, nn)[nn]
                b = 0 if base.is_empty() else count_periodic_points(base, nn * m)[nn * m]
                if a != b:
                    bad.append(('power', x, m, nn))
    verdict(8, not bad, f'100 pull/push round trips, {tori} tori for stabilizer transport, '
            f'{powers} higher-power counts; bad={bad[:2]}')


def test_criterion_9_free_elements():
    gamma2 = AbelianNnSft(FgAbelianGroup(1), ('0', '1'), (('0', '0', (1,)), ('1', '1', (1,))))
    ext = free_extension(gamma2, 2)
    bad = []
    for g, expect in [((1, 0), 'Free'), ((3, 0), 'Free'), ((0, 1), 'NotFree'), ((2, 0), 'NotFree'),
                      ((0, 2), 'NotFree')]:
        res = free_elements_check(gamma2, g)
        if res.verdict != expect:
            bad.append(g)
        if expect == 'NotFree' and (res.witness.violations(ext) or not res.witness.stabilizer().contains(g)):
            bad.append(('witness', g))
    for g in itertools.product(range(-4, 5), repeat=2):
        if (free_elements_check(gamma2, g).verdict == 'Free') != (g[1] == 0 and g[0] % 2 == 1):
            bad.append(('analytic', g))
    verdict(9, not bad, f'Gamma_2 free elements match {{(a,0): a odd}} on [-4,4]^2; bad={bad[:3]}')


def test_criterion_10_determinism(tmp_path):
    outs = []
    for hashseed in ('0', '12345'):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        path = tmp_path / f'report{hashseed}.json'
        subprocess.run([sys.executable, '-m', 'stablab.cli', 'corpus', '--seed', '7', '--out', str(path)],
                       check=True, env=env)
        outs.append(path.read_bytes())
    verdict(10, outs[0] == outs[1] and len(outs[0]) > 100,
            f'two corpus runs with --seed 7 are byte-identical ({len(outs[0])} bytes)')
