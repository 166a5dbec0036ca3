"""Two-cell SFTs over finitely generated abelian groups, and the constructions
that move them between groups: free extension, higher power, pull-back along
a quotient map and push-forward through its section.

A pattern ``(a, b, s)`` forbids ``x(g) = a`` together with ``x(g + s) = b``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, PreconditionError
from .graph import TilesetGraph
from .groups import (FgAbelianGroup, SubgroupLattice, Vec, coset_transversal,
    parse_group, quotient)
from .z2 import Nn2Sft, PeriodVector, TorusConfig, aperiodicity_probe, locally_valid_square, periodize
from .zshift import count_periodic_points, prune_essential

__all__ = [
    'AbelianNnSft', 'PeriodicConfig', 'FreeCheck', 'parse_abelian', 'format_abelian',
    'free_extension', 'higher_power', 'pull_back', 'push_forward', 'fix_subshift',
    'normalize_modulo', 'free_elements_check', 'iter_periodic', 'to_tileset_graph',
    'from_tileset_graph', 'to_nn2', 'from_nn2',
]

Pattern = tuple[str, str, Vec]


def _normalize(group: FgAbelianGroup, alphabet: Sequence[str], patterns: Iterable) -> tuple[Pattern, ...]:
    '''
    Reduce offsets, orient each pattern so its offset is the positive one of
    ``s, -s`` (self-inverse offsets keep both letter orders), deduplicate and
    sort.
    '''
    order = {a: i for i, a in enumerate(alphabet)}
    out = set()
    for a, b, s in patterns:
        if a not in order or b not in order:
            raise ValueError(f'pattern ({a}, {b}, {s}) uses a letter outside the alphabet')
        s = group.reduce(s)
        if not any(s):
            raise ValueError(f'pattern ({a}, {b}) has zero offset')
        sign = group.orientation(s)
        if sign > 0:
            out.add((a, b, s))
        elif sign < 0:
            out.add((b, a, group.neg(s)))
        else:
            out.add((a, b, s))
            out.add((b, a, s))
    return tuple(sorted(out, key=lambda p: (p[2], order[p[0]], order[p[1]])))


@dataclass(frozen=True)
class AbelianNnSft:
    group: FgAbelianGroup
    alphabet: tuple[str, ...]
    forbidden: tuple[Pattern, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'alphabet', tuple(self.alphabet))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError('duplicate letters in alphabet')
        object.__setattr__(self, 'forbidden', _normalize(self.group, self.alphabet, self.forbidden))

    def offsets(self) -> list[Vec]:
        return sorted({s for _, _, s in self.forbidden})

    def forbids(self, a: str, b: str, s: Sequence[int]) -> bool:
        probe = _normalize(self.group, self.alphabet, [(a, b, s)])
        return all(p in set(self.forbidden) for p in probe)

    def with_patterns(self, extra: Iterable) -> 'AbelianNnSft':
        return AbelianNnSft(self.group, self.alphabet, self.forbidden + tuple(extra))


def _fmt_vec(v: Sequence[int]) -> str:
    return '(' + ','.join(map(str, v)) + ')'


def format_abelian(x: AbelianNnSft) -> str:
    lines = [f'group: {x.group}', 'alphabet: ' + ' '.join(x.alphabet)]
    lines += [f'forbid: {a} {b} {_fmt_vec(s)}' for a, b, s in x.forbidden]
    return '\n'.join(lines) + '\n'


def parse_abelian(text: str) -> AbelianNnSft:
    '''
    Parse::

        group: Z x Z/2
        alphabet: a b
        forbid: a b (1,0)
    '''
    group = alphabet = None
    pats = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(':')
        if not sep:
            raise ParseError(f'expected "key: value", got {raw.strip()!r}', lineno)
        key = key.strip().lower()
        if key == 'group':
            try:
                group, gens = parse_group(rest.strip())
            except ParseError as e:
                raise ParseError(str(e), lineno) from None
            if gens:
                raise ParseError('the sft group cannot be a quotient expression', lineno)
        elif key == 'alphabet':
            words = rest.split()
            if alphabet is not None or len(set(words)) != len(words):
                raise ParseError('alphabet declared twice or with duplicates', lineno)
            alphabet = words
        elif key == 'forbid':
            if group is None or alphabet is None:
                raise ParseError('forbid before group and alphabet', lineno)
            head, paren, tail = rest.partition('(')
            words = head.split()
            if len(words) != 2 or not paren or not tail.strip().endswith(')'):
                raise ParseError('expected "forbid: a b (s1,...,sn)"', lineno)
            try:
                s = tuple(int(t) for t in tail.strip()[:-1].split(','))
            except ValueError:
                raise ParseError('offset must be a tuple of integers', lineno) from None
            if len(s) != group.dim:
                raise ParseError(f'offset {s} does not live in {group}', lineno)
            for w in words:
                if w not in alphabet:
                    raise ParseError(f'unknown letter {w!r}', lineno)
            if not any(group.reduce(s)):
                raise ParseError('offset must be nonzero in the group', lineno)
            pats.append((words[0], words[1], s))
        else:
            raise ParseError(f'unknown declaration {key!r}', lineno)
    if group is None or alphabet is None:
        raise ParseError('missing group or alphabet declaration')
    return AbelianNnSft(group, tuple(alphabet), tuple(pats))


# ---------------------------------------------------------------- conversions

def from_tileset_graph(g: TilesetGraph) -> AbelianNnSft:
    ''' Z-SFT forbidding every non-edge at offset +1 '''
    pats = [(a, b, (1,)) for a in g.alphabet for b in g.alphabet if (a, b) not in g.edges]
    return AbelianNnSft(FgAbelianGroup(1), g.alphabet, tuple(pats))


def to_tileset_graph(x: AbelianNnSft) -> TilesetGraph:
    '''
    Tileset graph of a Z-SFT, not yet pruned. With offsets up to ``D > 1``
    the vertices are the allowed words of length ``D`` (labels joined by
    '.'), which preserves all periodic-point counts.
    '''
    return _word_graph(x)[0]


def _word_graph(x: AbelianNnSft) -> tuple[TilesetGraph, dict[str, str]]:
    ''' ``to_tileset_graph`` plus the first letter of every vertex '''
    if x.group != FgAbelianGroup(1):
        raise ValueError('tileset graphs exist for Z-SFTs only')
    span = max((s[0] for _, _, s in x.forbidden), default=1)
    bad = {(a, b, s[0]) for a, b, s in x.forbidden}

    def ok(word) -> bool:
        return not any((word[i], word[i + d], d) in bad
            for d in range(1, len(word)) for i in range(len(word) - d))

    if span == 1:
        return TilesetGraph(x.alphabet, [(a, b) for a in x.alphabet for b in x.alphabet
            if (a, b, 1) not in bad]), {a: a for a in x.alphabet}
    words = [w for w in itertools.product(x.alphabet, repeat=span) if ok(w)]
    label = {w: '.'.join(w) for w in words}
    by_prefix: dict = {}
    for w in words:
        by_prefix.setdefault(w[:-1], []).append(w)
    edges = [(label[w], label[u]) for w in words for u in by_prefix.get(w[1:], [])
        if ok(w + u[-1:])]
    return TilesetGraph([label[w] for w in words], edges), {label[w]: w[0] for w in words}


def to_nn2(x: AbelianNnSft) -> Nn2Sft:
    if x.group != FgAbelianGroup(2):
        raise ValueError('expected an sft over Z^2')
    h, v = set(), set()
    for a, b, s in x.forbidden:
        if s == (1, 0):
            h.add((a, b))
        elif s == (0, 1):
            v.add((a, b))
        else:
            raise ValueError(f'offset {s} is not a nearest-neighbor direction of Z^2')
    return Nn2Sft(x.alphabet, frozenset(h), frozenset(v))


def from_nn2(sft: Nn2Sft) -> AbelianNnSft:
    pats = [(a, b, (1, 0)) for a, b in sft.h_forbidden] + [(a, b, (0, 1)) for a, b in sft.v_forbidden]
    return AbelianNnSft(FgAbelianGroup(2), sft.alphabet, tuple(pats))


# ---------------------------------------------------------- periodic points

@dataclass(frozen=True)
class PeriodicConfig:
    ''' a configuration fixed by a finite-index ``lattice``, listed on its transversal '''
    lattice: SubgroupLattice
    values: tuple[tuple[Vec, str], ...]

    @property
    def group(self) -> FgAbelianGroup:
        return self.lattice.ambient

    def at(self, g: Sequence[int]) -> str:
        return dict(self.values)[self.lattice.residue(g)]

    def violations(self, x: AbelianNnSft) -> list[tuple[Vec, Pattern]]:
        table = dict(self.values)
        out = []
        for r, letter in self.values:
            for a, b, s in x.forbidden:
                if letter == a and table[self.lattice.residue(self.group.add(r, s))] == b:
                    out.append((r, (a, b, s)))
        return out

    def stabilizer(self) -> SubgroupLattice:
        table = dict(self.values)
        gens = list(self.lattice.basis)
        for t, _ in self.values:
            if all(table[self.lattice.residue(self.group.add(r, t))] == c for r, c in self.values):
                gens.append(t)
        return SubgroupLattice(self.group, tuple(gens))

    def to_torus(self) -> TorusConfig:
        ''' for Z^2 with a rectangular lattice ``pZ x qZ`` '''
        basis = self.lattice.basis
        if self.group != FgAbelianGroup(2) or basis[1][0] != 0:
            raise ValueError('not a rectangular torus over Z^2')
        p, q = basis[0][0], basis[1][1]
        return TorusConfig(p, q, tuple(tuple(self.at((i, j)) for j in range(q)) for i in range(p)))

    @classmethod
    def from_torus(cls, cfg: TorusConfig) -> 'PeriodicConfig':
        lat = SubgroupLattice(FgAbelianGroup(2), ((cfg.p, 0), (0, cfg.q)))
        return cls(lat, tuple(((i, j), cfg.at(i, j)) for i, j in coset_transversal(lat)))


def iter_periodic(x: AbelianNnSft, lattice: SubgroupLattice) -> Iterator[PeriodicConfig]:
    ''' every configuration of ``x`` fixed by ``lattice``, letters tried in alphabet order '''
    reps = coset_transversal(lattice)
    index = {r: k for k, r in enumerate(reps)}
    # constraints checked once both cells carry a letter
    checks: list[list[tuple[int, str, str, int]]] = [[] for _ in reps]
    for k, r in enumerate(reps):
        for a, b, s in x.forbidden:
            other = index[lattice.residue(x.group.add(r, s))]
            checks[max(k, other)].append((k, a, b, other))
    vals: list[str] = [''] * len(reps)

    def rec(k: int) -> Iterator[PeriodicConfig]:
        if k == len(reps):
            yield PeriodicConfig(lattice, tuple(zip(reps, vals)))
            return
        for c in x.alphabet:
            vals[k] = c
            if all(not (vals[i] == a and vals[j] == b) for i, a, b, j in checks[k]):
                yield from rec(k + 1)
        vals[k] = ''

    return rec(0)


# ------------------------------------------------------------ constructions

def fix_subshift(group: FgAbelianGroup, alphabet: Sequence[str], n_gens: Iterable[Sequence[int]]) -> AbelianNnSft:
    ''' configurations fixed by every generator: inequality pairs along each one '''
    pats = []
    for t in n_gens:
        t = group.reduce(t)
        if any(t):
            pats += [(a, b, t) for a in alphabet for b in alphabet if a != b]
    return AbelianNnSft(group, tuple(alphabet), tuple(pats))


def free_extension(x: AbelianNnSft, d: int) -> AbelianNnSft:
    ''' the same patterns read in ``Z^d``, the source sitting in the first coordinates '''
    if x.group.torsion:
        raise ValueError('free extension expects a source group Z^k')
    k = x.group.rank
    if d < k:
        raise ValueError(f'cannot extend from Z^{k} to Z^{d}')
    pad = (0,) * (d - k)
    return AbelianNnSft(FgAbelianGroup(d), x.alphabet, tuple((a, b, s + pad) for a, b, s in x.forbidden))


def _check_transversal(lattice: SubgroupLattice, reps: Sequence[Sequence[int]]) -> list[Vec]:
    if lattice.index() == math.inf:
        raise ValueError('lattice has infinite index')
    reps = [lattice.ambient.reduce(r) for r in reps]
    residues = {lattice.residue(r) for r in reps}
    if len(reps) != lattice.index() or len(residues) != len(reps):
        raise ValueError('reps is not a transversal of the lattice')
    return reps


def higher_power(x: AbelianNnSft, lattice: SubgroupLattice, reps: Sequence[Sequence[int]] | None = None) -> AbelianNnSft:
    '''
    Recode ``x`` over ``lattice`` with block letters ``(x(h + r))_{r in R}``,
    re-coordinatized so the result lives on the standard ``Z^d``.

    Each forbidden ``(a, b, s)`` and ``r`` in ``R`` give the cells ``r`` and
    ``r + s = h + r'``. With ``h != 0`` every pair of blocks showing ``a`` at
    ``r`` and ``b`` at ``r'`` is forbidden at the offset of ``h``. With
    ``h = 0`` both cells lie in one block, which is ruled out by forbidding
    it in front of every block along the first basis vector.
    '''
    group = x.group
    if group.torsion or lattice.ambient != group:
        raise ValueError('higher power needs Z^d and a sublattice of it')
    if reps is None:
        reps = coset_transversal(lattice)
    reps = _check_transversal(lattice, reps)
    blocks = list(itertools.product(x.alphabet, repeat=len(reps)))
    label = {u: '.'.join(u) for u in blocks}
    pos = {r: k for k, r in enumerate(reps)}
    home = {lattice.residue(r): r for r in reps}
    e1 = tuple(int(i == 0) for i in range(group.dim))
    pats = []
    for a, b, s in x.forbidden:
        for r in reps:
            t = group.add(r, s)
            rf = home[lattice.residue(t)]
            h = group.sub(t, rf)
            i, j = pos[r], pos[rf]
            left = [u for u in blocks if u[i] == a]
            if not any(h):
                pats += [(label[u], label[w], e1) for u in left if u[j] == b for w in blocks]
            else:
                c = lattice.coordinates(h)
                right = [w for w in blocks if w[j] == b]
                pats += [(label[u], label[w], c) for u in left for w in right]
    return AbelianNnSft(group, tuple(label[u] for u in blocks), tuple(pats))


def pull_back(x: AbelianNnSft, group: FgAbelianGroup, n_gens: Iterable[Sequence[int]],
              section=None) -> AbelianNnSft:
    '''
    Lift ``x`` from ``G/N`` to ``G``: inequality pairs along each generator of
    ``N`` plus every pattern of ``x`` moved to the offset ``rho(s)``.
    ``section`` defaults to the canonical one of ``quotient``.
    '''
    n_gens = [group.reduce(t) for t in n_gens]
    qmap = quotient(group, n_gens)
    if qmap.target != x.group:
        raise PreconditionError(f'source sft lives on {x.group}, but the quotient is {qmap.target}')
    rho = section or qmap.section
    pats = list(fix_subshift(group, x.alphabet, n_gens).forbidden)
    pats += [(a, b, rho(s)) for a, b, s in x.forbidden]
    return AbelianNnSft(group, x.alphabet, tuple(pats))


def push_forward(x: AbelianNnSft, n_gens: Iterable[Sequence[int]]) -> AbelianNnSft:
    '''
    Push an sft contained in ``Fix_A(N)`` down to ``G/N``: patterns whose
    offset lies in ``N`` are implied by the inequality pairs and dropped,
    every other ``(a, b, o)`` becomes ``(a, b, pi(o))``.
    '''
    group = x.group
    n_gens = [group.reduce(t) for t in n_gens]
    present = set(x.forbidden)
    for t in n_gens:
        if not any(t):
            continue
        for a in x.alphabet:
            for b in x.alphabet:
                if a != b and not set(_normalize(group, x.alphabet, [(a, b, t)])) <= present:
                    raise PreconditionError(
                        f'sft is not inside Fix_A(N): pattern ({a}, {b}, {_fmt_vec(t)}) is missing')
    qmap = quotient(group, n_gens)
    pats = []
    for a, b, o in x.forbidden:
        if qmap.kernel.contains(o):
            if a == b:
                raise PreconditionError(f'pattern ({a}, {a}, {_fmt_vec(o)}) removes a letter; '
                    'not expressible after the quotient')
            continue
        pats.append((a, b, qmap.project(o)))
    return AbelianNnSft(qmap.target, x.alphabet, tuple(pats))


def normalize_modulo(x: AbelianNnSft, n_gens: Iterable[Sequence[int]]) -> AbelianNnSft:
    ''' canonical pattern set of an sft inside ``Fix_A(N)``: every offset moved to its section representative '''
    n_gens = list(n_gens)
    return pull_back(push_forward(x, n_gens), x.group, n_gens)


# ----------------------------------------------------------- free elements

@dataclass(frozen=True)
class FreeCheck:
    verdict: str                         # 'Free', 'NotFree' or 'Unknown'
    bound: int
    witness: PeriodicConfig | None = None
    power: int | None = None             # the n with n*g free, when Free

    def to_dict(self) -> dict:
        d: dict = {'verdict': self.verdict, 'bound': self.bound}
        if self.power is not None:
            d['power'] = self.power
        if self.witness is not None:
            d['witness'] = {'lattice': [list(r) for r in self.witness.lattice.basis],
                'values': [[list(r), c] for r, c in self.witness.values]}
        return d


def _periodic_word(g: TilesetGraph, length: int | None = None) -> list[str] | None:
    ''' a closed walk of the given length, or the first simple cycle found '''
    g = prune_essential(g)
    if g.is_empty():
        return None
    if length is None:
        path, seen, a = [], {}, g.alphabet[0]
        while a not in seen:
            seen[a] = len(path)
            path.append(a)
            a = g.successors(a)[0]
        return path[seen[a]:]
    # walk backwards through reachability sets
    succ = {a: g.successors(a) for a in g.alphabet}
    for start in g.alphabet:
        reach = [{start}]
        for _ in range(length):
            reach.append({a for a in g.alphabet if any(b in reach[-1] for b in succ[a])})
        if start not in reach[length]:
            continue
        word, a = [start], start
        for k in range(length - 1, 0, -1):
            a = next(b for b in succ[a] if b in reach[k])
            word.append(a)
        return word
    return None


def _lift_witness(base: dict[Vec, str], base_periods: list[Vec], k: int, g: Vec) -> PeriodicConfig:
    '''
    ``y(z) = x(z' - floor(z_l / g_l) g')`` where ``z'`` and ``g'`` are the
    first ``k`` coordinates and ``l`` the first later coordinate with
    ``g_l != 0``; with no such ``l``, ``y`` ignores the later coordinates.
    ``x`` is given on a transversal of ``base_periods``.
    '''
    d = len(g)
    src = SubgroupLattice(FgAbelianGroup(k), tuple(base_periods))
    lead = next((l for l in range(k, d) if g[l]), None)
    periods = [tuple(p) + (0,) * (d - k) for p in base_periods]
    for l in range(k, d):
        if l != lead:
            periods.append(tuple(int(i == l) for i in range(d)))
    if lead is not None:
        gl = abs(g[lead])
        # smallest m with m * g' in the source lattice
        m = next(m for m in itertools.count(1) if src.contains([m * c for c in g[:k]]))
        periods.append(tuple(gl * m if i == lead else 0 for i in range(d)))
    lat = SubgroupLattice(FgAbelianGroup(d), tuple(periods))

    def y(z: Vec) -> str:
        head = list(z[:k])
        if lead is not None:
            f = z[lead] // g[lead]
            head = [c - f * gc for c, gc in zip(head, g[:k])]
        return base[src.residue(head)]

    return PeriodicConfig(lat, tuple((r, y(r)) for r in coset_transversal(lat)))


def free_elements_check(x: AbelianNnSft, g: Sequence[int], bound: int = 4) -> FreeCheck:
    '''
    Decide whether ``g`` in ``Z^d`` moves every configuration of the free
    extension of ``x`` (an sft over ``Z^k``, ``k`` in {1, 2}).

    ``g`` is free exactly when some power ``n g`` is a free element of the
    source, which needs ``g`` to lie in ``Z^k``; the first power is enough
    since stabilizers are subgroups. Otherwise a configuration fixed by ``g``
    is built from a periodic point of ``x``.
    '''
    k = x.group.rank
    g = tuple(g)
    if x.group.torsion or k not in (1, 2) or len(g) < k:
        raise ValueError('source must be Z or Z^2 inside Z^d')
    inside = not any(g[k:])
    if k == 1:
        graph, first = _word_graph(x)
        graph = prune_essential(graph)
        if graph.is_empty():
            return FreeCheck('Free', bound, power=1)
        n = abs(g[0])
        if inside and n and count_periodic_points(graph, n)[n] == 0:
            return FreeCheck('Free', bound, power=1)
        word = _periodic_word(graph, n if inside and n else None)
        letters = [first[w] for w in word]
        base = {(i,): c for i, c in enumerate(letters)}
        wit = _lift_witness(base, [(len(letters),)], 1, g)
    else:
        sft = to_nn2(x)
        if inside and any(g[:2]):
            v = PeriodVector(g[0], g[1])
            cfg = periodize(sft, v)
            if cfg is None:
                return FreeCheck('Free', bound, power=1)
        else:
            if locally_valid_square(sft, bound + 1) is None:
                return FreeCheck('Free', bound, power=1)
            rep = aperiodicity_probe(sft, bound, threads=1)
            if rep.witness is None:
                return FreeCheck('Unknown', bound)
            cfg = rep.witness
        base = {(i, j): cfg.at(i, j) for i in range(cfg.p) for j in range(cfg.q)}
        wit = _lift_witness(base, [(cfg.p, 0), (0, cfg.q)], 2, g)
    ext = free_extension(x, len(g))
    if wit.violations(ext) or not wit.stabilizer().contains(g):
        raise AssertionError('free-element witness failed validation')
    return FreeCheck('NotFree', bound, wit)
