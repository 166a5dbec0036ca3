"""Periods of nearest-neighbor Z-SFTs, read off their tileset graphs.

Periodic points live inside strongly connected components. A component that
is a single simple cycle of length ``c`` contributes the period ``c`` and
nothing else; any other component has points of every large enough period
divisible by its cycle-length gcd, and also has aperiodic points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import networkx as nx
import numpy as np

from .errors import BoundTooSmall, EmptySft, NotEssential
from .graph import TilesetGraph
from .semilinear import SemilinearSet

__all__ = [
    'PeriodCountTable', 'prune_essential', 'is_essential', 'has_aperiodic_point',
    'has_trivial_stabilizer', 'count_periodic_points', 'least_period_counts',
    'least_period_exists', 'multiples', 'multiples_bound', 'union', 'disjoint_union', 'product',
    'components',
]

_SAFE = 2 ** 62


@dataclass(frozen=True)
class PeriodCountTable:
    ''' ``counts[n]`` = number of points fixed by the n-th shift power, for 1 <= n <= bound '''
    counts: dict[int, int]
    bound: int

    def __getitem__(self, n: int) -> int:
        return self.counts[n]


def prune_essential(g: TilesetGraph) -> TilesetGraph:
    ''' drop letters with no predecessor or no successor until none are left '''
    alive = set(g.alphabet)
    edges = set(g.edges)
    while True:
        has_out = {a for a, b in edges}
        has_in = {b for a, b in edges}
        dead = alive - (has_out & has_in)
        if not dead:
            break
        alive -= dead
        edges = {(a, b) for a, b in edges if a in alive and b in alive}
    return g.induced(alive)


def is_essential(g: TilesetGraph) -> bool:
    out = {a for a, _ in g.edges}
    inn = {b for _, b in g.edges}
    return all(a in out and a in inn for a in g.alphabet)


def _require_essential(g: TilesetGraph) -> None:
    if not is_essential(g):
        raise NotEssential('graph is not essential; call prune_essential first')


def _nx(g: TilesetGraph) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(g.alphabet)
    d.add_edges_from(g.edges)
    return d


@dataclass(frozen=True)
class Component:
    ''' a strongly connected component carrying at least one cycle '''
    letters: tuple[str, ...]
    graph: TilesetGraph
    period: int          # gcd of cycle lengths
    simple: bool         # the component is one simple cycle


def _cycle_gcd(sub: TilesetGraph) -> int:
    # BFS levels: every edge u->v gives a multiple of the gcd via level[u]+1-level[v]
    root = sub.alphabet[0]
    level = {root: 0}
    frontier = [root]
    succ: dict[str, list[str]] = {a: [] for a in sub.alphabet}
    for a, b in sub.edges:
        succ[a].append(b)
    while frontier:
        nxt = []
        for u in frontier:
            for v in succ[u]:
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    return reduce(math.gcd, (abs(level[a] + 1 - level[b]) for a, b in sub.edges), 0)


def components(g: TilesetGraph) -> list[Component]:
    ''' the cyclic strongly connected components, in alphabet order of their first letter '''
    out = []
    order = {a: i for i, a in enumerate(g.alphabet)}
    for comp in nx.strongly_connected_components(_nx(g)):
        letters = tuple(sorted(comp, key=order.__getitem__))
        sub = g.induced(letters)
        if not sub.edges:
            continue
        simple = len(sub.edges) == len(letters)
        out.append(Component(letters, sub, _cycle_gcd(sub), simple))
    out.sort(key=lambda c: order[c.letters[0]])
    return out


def has_aperiodic_point(g: TilesetGraph) -> bool:
    '''
    True when some strongly connected component is not a single simple
    cycle. Equivalently: the SFT has an aperiodic point whose orbit stays in
    one component, and the set of periods is infinite.

    Walks that move from one component into another are aperiodic as well
    (``...aaabbb...``); those are reported by ``has_trivial_stabilizer``.
    '''
    _require_essential(g)
    if g.is_empty():
        raise EmptySft('empty tileset graph')
    return any(not c.simple for c in components(g))


def has_trivial_stabilizer(g: TilesetGraph) -> bool:
    ''' whether some configuration at all has trivial stabilizer '''
    _require_essential(g)
    if g.is_empty():
        raise EmptySft('empty tileset graph')
    comps = components(g)
    inside = {e for c in comps for e in c.graph.edges}
    return any(not c.simple for c in comps) or len(inside) < len(g.edges)


def _traces(m: np.ndarray, upto: int) -> list[int]:
    ''' [tr(m^1), ..., tr(m^upto)] in exact integer arithmetic '''
    out = []
    if m.size == 0:
        return [0] * upto
    a = m.astype(np.int64)
    colmax = int(a.sum(axis=0).max()) or 1
    power = a.copy()
    exact = False
    for n in range(1, upto + 1):
        if n > 1:
            if not exact and int(np.abs(power).max()) * colmax >= _SAFE:
                # switch to Python integers before int64 could wrap
                power = power.astype(object)
                a = a.astype(object)
                exact = True
            power = power @ a
        out.append(sum(int(x) for x in power.diagonal()))
    return out


def count_periodic_points(g: TilesetGraph, bound: int) -> PeriodCountTable:
    ''' closed walks of each length ``1..bound``; exact for any size '''
    _require_essential(g)
    if bound < 1:
        raise ValueError('bound must be positive')
    tr = _traces(g.adjacency(), bound)
    return PeriodCountTable({n: tr[n - 1] for n in range(1, bound + 1)}, bound)


def _mobius(n: int) -> int:
    res, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            res = -res
        k += 1
    return -res if n > 1 else res


def least_period_counts(table: PeriodCountTable) -> dict[int, int]:
    ''' number of points of least period exactly n, by inclusion-exclusion over divisors '''
    out = {}
    for n in range(1, table.bound + 1):
        out[n] = sum(_mobius(n // d) * table.counts[d] for d in range(1, n + 1) if n % d == 0)
    return out


def least_period_exists(g: TilesetGraph, p: int) -> bool:
    if p == 0:
        raise ValueError('p = 0 encodes aperiodic points; use has_aperiodic_point')
    if p < 0:
        raise ValueError('p must be positive')
    table = count_periodic_points(g, p)
    return least_period_counts(table)[p] > 0


def _first_return_lengths(sub: TilesetGraph, cap: int) -> dict[int, int]:
    ''' number of first-return walks at the first letter, by length, up to ``cap`` '''
    a = sub.adjacency().astype(object)
    rest = list(range(1, len(sub.alphabet)))
    out = {}
    if a[0, 0]:
        out[1] = int(a[0, 0])
    row = a[0, rest]
    inner = a[np.ix_(rest, rest)]
    col = a[rest, 0]
    vec = row
    for length in range(2, cap + 1):
        c = int(vec @ col) if len(rest) else 0
        if c:
            out[length] = c
        vec = vec @ inner if len(rest) else vec
    return out


def _frobenius(gens: list[int]) -> int:
    ''' largest integer not a nonnegative combination of ``gens`` (gcd 1); -1 if none '''
    g0 = min(gens)
    if g0 == 1:
        return -1
    reach = [True]
    run, n = 1, 0
    while run < g0:
        n += 1
        ok = any(n >= x and reach[n - x] for x in gens)
        reach.append(ok)
        run = run + 1 if ok else 0
    return n - g0


def _component_threshold(c: Component) -> int:
    '''
    Beyond the returned index, every multiple of the component period is a
    least period. Two distinct first-return walks w1, w2 at a letter,
    concatenated with any further return walks in sorted blocks, give a
    primitive cycle; the semigroup of return lengths fills in the rest.
    '''
    m = len(c.letters)
    cap = 2 * m + 2
    while True:
        counts = _first_return_lengths(c.graph, cap)
        lengths = sorted(counts)
        if sum(counts.values()) >= 2 and reduce(math.gcd, lengths, 0) == c.period:
            break
        cap *= 2
        if cap > 64 * (m + 1) ** 2:
            raise RuntimeError('failed to find return walks; component is not strongly connected?')
    l1 = lengths[0]
    l2 = l1 if counts[l1] >= 2 else lengths[1]
    frob = _frobenius([x // c.period for x in lengths])
    return l1 + l2 + c.period * (frob + 1)


def multiples_bound(g: TilesetGraph) -> int:
    '''
    Smallest ``bound`` accepted by ``multiples``: past the certified
    threshold the membership pattern is checked over one full period.
    '''
    comps = components(g)
    thresholds = [_component_threshold(c) for c in comps if not c.simple]
    simple = [len(c.letters) for c in comps if c.simple]
    t = max(thresholds + [x + 1 for x in simple], default=1)
    periods = [c.period for c in comps if not c.simple]
    return t + reduce(math.lcm, periods, 1)


def multiples(g: TilesetGraph, bound: int | None = None) -> SemilinearSet:
    '''
    The set of ``p`` such that some point has stabilizer exactly ``pZ``, with
    0 standing for aperiodic points inside one strongly connected component
    (see ``has_aperiodic_point``).

    Least periods below the certified threshold come from exact closed-walk
    counts; beyond it they are the multiples of the periods of non-simple
    components. The counts up to ``bound`` are checked against that tail.
    '''
    _require_essential(g)
    if g.is_empty():
        raise EmptySft('empty tileset graph')
    comps = components(g)
    required = multiples_bound(g)
    if bound is None:
        bound = required
    elif bound < required:
        raise BoundTooSmall(bound, required)
    periods = [c.period for c in comps if not c.simple]
    tail_period = reduce(math.lcm, periods, 1)
    threshold = required - tail_period

    lp: dict[int, int] = {n: 0 for n in range(1, bound + 1)}
    for c in comps:
        table = PeriodCountTable(dict(enumerate(_traces(c.graph.adjacency(), bound), 1)), bound)
        for n, k in least_period_counts(table).items():
            lp[n] += k
    for n in range(threshold, bound + 1):
        predicted = any(n % d == 0 for d in periods)
        if predicted != (lp[n] > 0):
            raise AssertionError(f'least-period tail check failed at n={n}')

    aperiodic = bool(periods)

    def pred(n: int) -> bool:
        if n == 0:
            return aperiodic
        if n < threshold:
            return lp[n] > 0
        return any(n % d == 0 for d in periods)

    return SemilinearSet.from_membership(pred, threshold, tail_period)


def disjoint_union(graphs: list[TilesetGraph]) -> TilesetGraph:
    ''' letters of the i-th graph (counting from 1) get the suffix ``@i`` '''
    alphabet, edges = [], []
    for i, g in enumerate(graphs, 1):
        tag = f'@{i}'
        alphabet += [a + tag for a in g.alphabet]
        edges += [(a + tag, b + tag) for a, b in g.edges]
    return TilesetGraph(alphabet, edges)


def union(g1: TilesetGraph, g2: TilesetGraph) -> TilesetGraph:
    return disjoint_union([g1, g2])


def product(g1: TilesetGraph, g2: TilesetGraph) -> TilesetGraph:
    ''' tensor product: a pair steps when both coordinates step '''
    for g in (g1, g2):
        _require_essential(g)
        if g.is_empty():
            raise EmptySft('product with an empty SFT')
    alphabet = [f'({a},{b})' for a in g1.alphabet for b in g2.alphabet]
    edges = [(f'({a},{b})', f'({c},{d})') for a, c in g1.edges for b, d in g2.edges]
    return TilesetGraph(alphabet, edges)
