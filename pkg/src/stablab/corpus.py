"""Seeded random instances and the deterministic corpus report."""
from __future__ import annotations

import random
from typing import Any

from .abelian import (AbelianNnSft, format_abelian, pull_back, push_forward, to_tileset_graph)
from .errors import NotRealizable
from .graph import TilesetGraph
from .groups import FgAbelianGroup
from .realizer import realize
from .semilinear import SemilinearSet, equal_sl
from .z2 import Nn2Sft, PeriodVector, aperiodicity_probe, periodize, stabilizer_lattice
from .zshift import has_aperiodic_point, multiples, prune_essential

__all__ = [
    'random_graph', 'random_essential_graph', 'random_target', 'random_unrealizable',
    'random_nn2', 'random_abelian', 'QUOTIENT_UNIVERSES', 'corpus_report',
]

# (quotient group, ambient group, kernel generators) with the canonical section
QUOTIENT_UNIVERSES = {
    'Z^2': (FgAbelianGroup(2), FgAbelianGroup(3), [(0, 0, 1)]),
    'Z x Z/2': (FgAbelianGroup(1, (2,)), FgAbelianGroup(2), [(0, 2)]),
    'Z/3': (FgAbelianGroup(0, (3,)), FgAbelianGroup(1), [(3,)]),
}


def random_graph(rng: random.Random, max_vertices: int = 6, density: float | None = None) -> TilesetGraph:
    n = rng.randint(1, max_vertices)
    p = rng.uniform(0.15, 0.6) if density is None else density
    letters = [f'v{i}' for i in range(n)]
    return TilesetGraph(letters, [(a, b) for a in letters for b in letters if rng.random() < p])


def random_essential_graph(rng: random.Random, max_vertices: int = 6) -> TilesetGraph:
    ''' a random graph after pruning, retried until non-empty '''
    while True:
        g = prune_essential(random_graph(rng, max_vertices))
        if not g.is_empty():
            return g


def random_target(rng: random.Random) -> SemilinearSet:
    '''
    A realizable period set: up to 4 finite elements in [1, 9] and up to 2
    families ``a(N+k)`` with ``a <= 3, k <= 4`` (which bring 0 along).
    '''
    while True:
        finite = set(rng.sample(range(1, 10), rng.randint(0, 4)))
        fams = [(rng.randint(1, 3), rng.randint(1, 4)) for _ in range(rng.randint(0, 2))]
        if fams:
            finite.add(0)
        if finite or fams:
            return SemilinearSet.from_multiples(finite, fams)


def random_unrealizable(rng: random.Random) -> SemilinearSet:
    ''' a finite set containing 0, or an infinite one without 0 '''
    finite = set(rng.sample(range(1, 10), rng.randint(0, 3)))
    if rng.random() < 0.5:
        return SemilinearSet(finite | {0})
    a, k = rng.randint(1, 3), rng.randint(1, 4)
    return SemilinearSet(finite, [(a * k, a)])


def random_nn2(rng: random.Random, max_letters: int = 3, density: float | None = None) -> Nn2Sft:
    n = rng.randint(1, max_letters)
    p = rng.uniform(0.1, 0.5) if density is None else density
    letters = 'abc'[:n] if n <= 3 else [f'l{i}' for i in range(n)]
    pairs = [(a, b) for a in letters for b in letters]
    return Nn2Sft(tuple(letters), frozenset(x for x in pairs if rng.random() < p),
        frozenset(x for x in pairs if rng.random() < p))


def random_abelian(rng: random.Random, group: FgAbelianGroup, max_letters: int = 3,
                   density: float | None = None) -> AbelianNnSft:
    ''' random patterns along the canonical generators of ``group`` '''
    n = rng.randint(1, max_letters)
    p = rng.uniform(0.1, 0.5) if density is None else density
    letters = 'abc'[:n] if n <= 3 else [f'l{i}' for i in range(n)]
    pats = [(a, b, s) for s in group.generators() for a in letters for b in letters if rng.random() < p]
    return AbelianNnSft(group, tuple(letters), tuple(pats))


def corpus_report(seed: int, size: int = 10, bound: int = 2) -> dict[str, Any]:
    '''
    Run every module over a seeded corpus. The result only contains values
    derived from the inputs, so equal seeds give equal reports.
    '''
    rng = random.Random(seed)
    graphs = []
    for _ in range(size):
        g = random_essential_graph(rng)
        graphs.append({'edges': [list(e) for e in g.sorted_edges()],
            'multiples': str(multiples(g)), 'aperiodic': has_aperiodic_point(g)})
    targets = []
    for _ in range(size):
        t = random_target(rng)
        g = realize(t)
        targets.append({'target': str(t), 'vertices': len(g), 'verified': equal_sl(multiples(g), t)})
    refusals = []
    for _ in range(size):
        t = random_unrealizable(rng)
        try:
            realize(t)
            refusals.append({'target': str(t), 'refused': False})
        except NotRealizable:
            refusals.append({'target': str(t), 'refused': True})
    planar = []
    for _ in range(size):
        sft = random_nn2(rng)
        rep = aperiodicity_probe(sft, bound, threads=1)
        vecs = {}
        for v in (PeriodVector(1, 0), PeriodVector(0, 1), PeriodVector(1, 1), PeriodVector(-1, 1)):
            w = periodize(sft, v)
            vecs[str(v)] = None if w is None else stabilizer_lattice(w)
        planar.append({'h': sorted(map(list, sft.h_forbidden)), 'v': sorted(map(list, sft.v_forbidden)),
            'alphabet': list(sft.alphabet), 'probe': rep.to_dict(), 'periodize': vecs})
    quotients = []
    for name in sorted(QUOTIENT_UNIVERSES):
        q, g, n = QUOTIENT_UNIVERSES[name]
        x = random_abelian(rng, q)
        y = pull_back(x, g, n)
        entry = {'universe': name, 'sft': format_abelian(x), 'pulled': format_abelian(y),
            'round_trip': push_forward(y, n) == x}
        if g.rank == 1 and not g.torsion:
            entry['pulled_multiples'] = _multiples_or_empty(y)
        quotients.append(entry)
    return {'seed': seed, 'size': size, 'bound': bound, 'graphs': graphs, 'targets': targets,
        'refusals': refusals, 'planar': planar, 'quotients': quotients}


def _multiples_or_empty(x: AbelianNnSft) -> str:
    g = prune_essential(to_tileset_graph(x))
    return 'EMPTY' if g.is_empty() else str(multiples(g))
