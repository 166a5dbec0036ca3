"""Tileset graphs with a prescribed set of multiples."""
from __future__ import annotations

from .errors import NotRealizable
from .graph import TilesetGraph
from .semilinear import SemilinearSet, is_realizable_period_set
from .zshift import disjoint_union

__all__ = ['gamma_cycle', 'gamma_progression', 'realize']


def gamma_cycle(p: int) -> TilesetGraph:
    ''' the simple cycle ``c0 -> c1 -> ... -> c{p-1} -> c0``; its only period is ``p`` '''
    if p < 1:
        raise ValueError('cycle length must be at least 1')
    names = [f'c{i}' for i in range(p)]
    return TilesetGraph(names, [(names[i], names[(i + 1) % p]) for i in range(p)])


def gamma_progression(a: int, k: int) -> TilesetGraph:
    '''
    Graph whose multiples are ``{0} | {a(n+k) : n in N}``.

    A ``k``-cycle ``c0..c{k-1}`` in which each edge ``c{i} -> c{i+1}`` also has
    a detour ``c{i} -> t{i} -> c{i+1}`` oriented the same way; a lap then takes
    anywhere from ``k`` to ``2k`` steps. For ``a > 1`` every edge becomes a
    directed path of length ``a`` through letters ``s{e}.{j}``, where ``e``
    numbers the edges in construction order.
    '''
    if a < 1 or k < 1:
        raise ValueError('need a >= 1 and k >= 1')
    cycle = [f'c{i}' for i in range(k)]
    detour = [f't{i}' for i in range(k)]
    base = []
    for i in range(k):
        nxt = cycle[(i + 1) % k]
        base += [(cycle[i], nxt), (cycle[i], detour[i]), (detour[i], nxt)]
    alphabet = cycle + detour
    if a == 1:
        return TilesetGraph(alphabet, base)
    edges = []
    for e, (u, v) in enumerate(base):
        path = [u] + [f's{e}.{j}' for j in range(1, a)] + [v]
        alphabet += path[1:-1]
        edges += list(zip(path, path[1:]))
    return TilesetGraph(alphabet, edges)


def realize(target: SemilinearSet) -> TilesetGraph:
    '''
    A graph whose multiples equal ``target``: one cycle per nonzero finite
    element and one ``gamma_progression`` per family ``a(N+k)``, joined
    disjointly. Any infinite family brings 0 along with it.
    '''
    if not is_realizable_period_set(target):
        if target.is_finite():
            raise NotRealizable(f'{target}: a finite period set cannot contain 0 '
                                '(finitely many periods leave no room for an aperiodic point)')
        if 0 not in target:
            raise NotRealizable(f'{target}: an infinite period set must contain 0 '
                                '(infinitely many periods force an aperiodic point)')
        raise NotRealizable(f'{target}: the tail is not a union of families a(N+k); '
                            'periods of a component eventually fill a single multiple class')
    if not target.finite_part and target.is_finite():
        raise NotRealizable('the empty set is not the multiples of a non-empty SFT')
    finite, families = target.multiples_form()
    parts = [gamma_cycle(p) for p in sorted(finite) if p != 0]
    parts += [gamma_progression(a, k) for a, k in families]
    return disjoint_union(parts)
