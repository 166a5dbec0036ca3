"""Nearest-neighbor Z^2-SFTs: tori, vector-periodic strips and periodization.

A configuration ``x`` assigns a letter to every ``(i, j)``; ``i`` grows to the
right and ``j`` grows upward. A horizontal pair ``(a, b)`` means
``x(i, j) = a, x(i+1, j) = b``; a vertical pair means ``x(i, j) = a,
x(i, j+1) = b``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .errors import ParseError
from .graph import TilesetGraph
from .groups import hnf, reduce_mod
from .zshift import prune_essential

__all__ = [
    'Nn2Sft', 'TorusConfig', 'PeriodVector', 'Violation', 'ProbeReport', 'check_torus',
    'search_torus', 'iter_tori', 'locally_valid_square', 'period_vector_graph', 'periodize',
    'stabilizer_lattice', 'aperiodicity_probe', 'parse_nn2', 'format_nn2', 'recode',
    'torus_lattices', 'thread_count',
]

Cells = tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Nn2Sft:
    alphabet: tuple[str, ...]
    h_forbidden: frozenset[tuple[str, str]] = frozenset()
    v_forbidden: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'alphabet', tuple(self.alphabet))
        object.__setattr__(self, 'h_forbidden', frozenset(map(tuple, self.h_forbidden)))
        object.__setattr__(self, 'v_forbidden', frozenset(map(tuple, self.v_forbidden)))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError('duplicate letters in alphabet')
        known = set(self.alphabet)
        for a, b in self.h_forbidden | self.v_forbidden:
            if a not in known or b not in known:
                raise ValueError(f'pair ({a}, {b}) uses a letter outside the alphabet')

    @classmethod
    def full_shift(cls, alphabet: Iterable[str]) -> 'Nn2Sft':
        return cls(tuple(alphabet))

    @classmethod
    def checkerboard(cls, alphabet: Iterable[str] = ('a', 'b')) -> 'Nn2Sft':
        ''' equal neighbors forbidden in both directions '''
        alphabet = tuple(alphabet)
        same = {(a, a) for a in alphabet}
        return cls(alphabet, same, same)

    def h_ok(self, a: str, b: str) -> bool:
        return (a, b) not in self.h_forbidden

    def v_ok(self, a: str, b: str) -> bool:
        return (a, b) not in self.v_forbidden


@dataclass(frozen=True)
class TorusConfig:
    ''' ``x(i, j) = cells[i mod p][j mod q]`` '''
    p: int
    q: int
    cells: Cells

    def __post_init__(self):
        cells = tuple(tuple(col) for col in self.cells)
        object.__setattr__(self, 'cells', cells)
        if self.p < 1 or self.q < 1:
            raise ValueError('torus dimensions must be positive')
        if len(cells) != self.p or any(len(col) != self.q for col in cells):
            raise ValueError(f'cells do not form a {self.p}x{self.q} array')

    def at(self, i: int, j: int) -> str:
        return self.cells[i % self.p][j % self.q]

    def shifted(self, a: int, b: int) -> 'TorusConfig':
        ''' the configuration ``y(i, j) = x(i + a, j + b)`` '''
        return TorusConfig(self.p, self.q,
            tuple(tuple(self.at(i + a, j + b) for j in range(self.q)) for i in range(self.p)))

    def rows(self) -> list[list[str]]:
        ''' ``rows[j][i]``, bottom row first '''
        return [[self.cells[i][j] for i in range(self.p)] for j in range(self.q)]

    def to_dict(self) -> dict:
        return {'p': self.p, 'q': self.q, 'rows': self.rows()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> 'TorusConfig':
        p, q, rows = int(d['p']), int(d['q']), d['rows']
        if len(rows) != q or any(len(r) != p for r in rows):
            raise ValueError(f'rows do not form a {p}x{q} torus')
        return cls(p, q, tuple(tuple(rows[j][i] for j in range(q)) for i in range(p)))

    @classmethod
    def from_json(cls, text: str) -> 'TorusConfig':
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        return '\n'.join(' '.join(r) for r in reversed(self.rows()))


@dataclass(frozen=True)
class PeriodVector:
    ''' nonzero ``(p, q)`` normalized so that ``q > 0``, or ``q = 0 < p`` '''
    p: int
    q: int

    def __post_init__(self):
        if self.p == 0 and self.q == 0:
            raise ValueError('period vector must be nonzero')
        if self.q < 0 or (self.q == 0 and self.p < 0):
            object.__setattr__(self, 'p', -self.p)
            object.__setattr__(self, 'q', -self.q)

    @property
    def width(self) -> int:
        return max(abs(self.p), 1)

    def is_primitive(self) -> bool:
        return math.gcd(self.p, self.q) == 1

    def __str__(self) -> str:
        return f'({self.p},{self.q})'


class Violation(NamedTuple):
    i: int
    j: int
    direction: str      # 'h' or 'v'
    pair: tuple[str, str]


def check_torus(sft: Nn2Sft, cfg: TorusConfig) -> list[Violation]:
    if len(cfg.cells) != cfg.p or any(len(c) != cfg.q for c in cfg.cells):
        raise ValueError('cells do not match the torus dimensions')
    known = set(sft.alphabet)
    out = []
    for i in range(cfg.p):
        for j in range(cfg.q):
            a = cfg.at(i, j)
            if a not in known:
                raise ValueError(f'letter {a!r} at ({i},{j}) is not in the alphabet')
            right, up = cfg.at(i + 1, j), cfg.at(i, j + 1)
            if not sft.h_ok(a, right):
                out.append(Violation(i, j, 'h', (a, right)))
            if not sft.v_ok(a, up):
                out.append(Violation(i, j, 'v', (a, up)))
    return out


def _fill(sft: Nn2Sft, width: int, height: int, hwrap: bool, vwrap: bool) -> Iterator[Cells]:
    '''
    All locally valid ``width x height`` arrays, optionally wrapping around
    horizontally and/or vertically. Cells are filled row by row from the
    bottom, left to right, trying letters in alphabet order.
    '''
    alphabet = sft.alphabet
    h_next = {a: {b for b in alphabet if sft.h_ok(a, b)} for a in alphabet}
    h_prev = {b: {a for a in alphabet if sft.h_ok(a, b)} for b in alphabet}
    v_next = {a: {b for b in alphabet if sft.v_ok(a, b)} for a in alphabet}
    v_prev = {b: {a for a in alphabet if sft.v_ok(a, b)} for b in alphabet}
    grid = [[''] * height for _ in range(width)]
    order = [(i, j) for j in range(height) for i in range(width)]

    def candidates(i: int, j: int) -> list[str]:
        cand = alphabet
        if i > 0:
            s = h_next[grid[i - 1][j]]
            cand = [c for c in cand if c in s]
        if hwrap and i == width - 1:
            if width == 1:
                cand = [c for c in cand if sft.h_ok(c, c)]
            else:
                s = h_prev[grid[0][j]]
                cand = [c for c in cand if c in s]
        if j > 0:
            s = v_next[grid[i][j - 1]]
            cand = [c for c in cand if c in s]
        if vwrap and j == height - 1:
            if height == 1:
                cand = [c for c in cand if sft.v_ok(c, c)]
            else:
                s = v_prev[grid[i][0]]
                cand = [c for c in cand if c in s]
        return cand

    def rec(k: int) -> Iterator[Cells]:
        if k == len(order):
            yield tuple(tuple(col) for col in grid)
            return
        i, j = order[k]
        for c in candidates(i, j):
            grid[i][j] = c
            yield from rec(k + 1)
        grid[i][j] = ''

    if width < 1 or height < 1:
        raise ValueError('dimensions must be positive')
    if not alphabet:
        return iter(())
    return rec(0)


def iter_tori(sft: Nn2Sft, p: int, q: int) -> Iterator[TorusConfig]:
    ''' every valid ``p x q`` torus, in search order '''
    for cells in _fill(sft, p, q, True, True):
        yield TorusConfig(p, q, cells)


def search_torus(sft: Nn2Sft, p: int, q: int) -> TorusConfig | None:
    ''' first valid ``p x q`` torus in row-major, alphabet-order backtracking '''
    if p < 1 or q < 1:
        raise ValueError('torus dimensions must be positive')
    return next(iter_tori(sft, p, q), None)


def locally_valid_square(sft: Nn2Sft, n: int) -> Cells | None:
    ''' an ``n x n`` array with no forbidden pair inside it, if any '''
    return next(_fill(sft, n, n, False, False), None)


def _label(block: Cells) -> str:
    # rows bottom to top, separated by '/'; letters within a row by ','
    height = len(block[0])
    return '/'.join(','.join(col[r] for col in block) for r in range(height))


class _Strip:
    '''
    The 1-D system of blocks for a period vector, with edges given by a
    compatibility test between an outgoing key of the source block and an
    incoming key of the target block.
    '''

    def __init__(self, sft: Nn2Sft, v: PeriodVector):
        self.sft, self.v = sft, v
        p, q = v.p, v.q
        if q == 0:
            self.blocks = list(_fill(sft, p, 1, True, False))
        else:
            self.blocks = list(_fill(sft, v.width, q, False, p == 0))
        self._alive = self._prune()

    def key_out(self, b: Cells):
        p, q = self.v.p, self.v.q
        if q == 0:
            return tuple(col[0] for col in b)
        last = b[-1]
        if p > 0:
            return last, tuple(col[0] for col in b)
        if p < 0:
            return last, tuple(col[q - 1] for col in b)
        return last, ()

    def key_in(self, b: Cells):
        p, q = self.v.p, self.v.q
        if q == 0:
            return tuple(col[0] for col in b)
        first = b[0]
        if p > 0:
            return first, tuple(col[q - 1] for col in b)
        if p < 0:
            return first, tuple(col[0] for col in b)
        return first, ()

    def compatible(self, ko, ki) -> bool:
        sft = self.sft
        p, q = self.v.p, self.v.q
        if q == 0:
            # consecutive rows, bottom to top
            return all(sft.v_ok(a, b) for a, b in zip(ko, ki))
        (last, low), (first, high) = ko, ki
        if not all(sft.h_ok(a, b) for a, b in zip(last, first)):
            return False
        if p > 0:
            # next block's top row sits below this block's bottom row, shifted by p
            return all(sft.v_ok(a, b) for a, b in zip(high, low))
        if p < 0:
            # this block's top row sits below the next block's bottom row
            return all(sft.v_ok(a, b) for a, b in zip(low, high))
        return True

    def _prune(self) -> list[Cells]:
        alive = list(self.blocks)
        memo: dict = {}

        def ok(ko, ki):
            if (ko, ki) not in memo:
                memo[ko, ki] = self.compatible(ko, ki)
            return memo[ko, ki]

        while True:
            outs = {self.key_out(b) for b in alive}
            ins = {self.key_in(b) for b in alive}
            good_out = {ko for ko in outs if any(ok(ko, ki) for ki in ins)}
            good_in = {ki for ki in ins if any(ok(ko, ki) for ko in outs)}
            nxt = [b for b in alive if self.key_out(b) in good_out and self.key_in(b) in good_in]
            if len(nxt) == len(alive):
                return alive
            alive = nxt

    @property
    def alive(self) -> list[Cells]:
        return self._alive

    def successors(self, b: Cells) -> list[Cells]:
        ko = self.key_out(b)
        return [c for c in self._alive if self.compatible(ko, self.key_in(c))]

    def graph(self) -> TilesetGraph:
        labels = [_label(b) for b in self._alive]
        by_in: dict = {}
        for b, lab in zip(self._alive, labels):
            by_in.setdefault(self.key_in(b), []).append(lab)
        edges = []
        for b, lab in zip(self._alive, labels):
            ko = self.key_out(b)
            for ki, targets in by_in.items():
                if self.compatible(ko, ki):
                    edges += [(lab, t) for t in targets]
        return prune_essential(TilesetGraph(labels, edges))

    def cycle(self) -> list[Cells] | None:
        ''' a simple cycle found by following first successors from the first live block '''
        if not self._alive:
            return None
        seen: dict = {}
        path = []
        b = self._alive[0]
        while b not in seen:
            seen[b] = len(path)
            path.append(b)
            b = self.successors(b)[0]
        return path[seen[b]:]


def period_vector_graph(sft: Nn2Sft, v: PeriodVector) -> TilesetGraph:
    '''
    1-D tileset graph whose bi-infinite walks are the configurations fixed by
    the shift ``v``. For ``v = (p, 0)`` the vertices are rows of width ``p``
    valid as cyclic words. Otherwise they are ``max(|p|,1) x q`` blocks of the
    strip ``Z x [0, q)``; rows ``q`` and up are copies of the strip moved
    right by ``p``. Vertex labels list block rows bottom to top.
    '''
    return _Strip(sft, v).graph()


def periodize(sft: Nn2Sft, v: PeriodVector) -> TorusConfig | None:
    '''
    A doubly periodic configuration also fixed by ``v``, built from a cycle of
    the strip graph, or ``None`` when no configuration is fixed by ``v``.
    For ``v = (p, 0)`` the torus is ``p x L`` with ``L <= |A|^p``.
    '''
    strip = _Strip(sft, v)
    cyc = strip.cycle()
    if cyc is None:
        return None
    p, q = v.p, v.q
    if q == 0:
        cells = tuple(tuple(row[i][0] for row in cyc) for i in range(p))
        cfg = TorusConfig(p, len(cyc), cells)
    else:
        columns = [col for block in cyc for col in block]
        width = len(columns)
        m = 1 if p == 0 else width // math.gcd(width, abs(p))
        cells = tuple(
            tuple(columns[(i - t * p) % width][r] for t in range(m) for r in range(q))
            for i in range(width))
        cfg = TorusConfig(width, m * q, cells)
    if check_torus(sft, cfg) or cfg.shifted(v.p, v.q) != cfg:
        raise AssertionError('periodization produced an invalid torus')
    return cfg


def stabilizer_lattice(cfg: TorusConfig) -> list[list[int]]:
    '''
    Canonical basis ``[[d1, 0], [c, d2]]`` (``0 <= c < d1``) of the shifts
    fixing the torus.
    '''
    gens = [(cfg.p, 0), (0, cfg.q)]
    for a in range(cfg.p):
        for b in range(cfg.q):
            if (a or b) and cfg.shifted(a, b) == cfg:
                gens.append((a, b))
    return [list(r) for r in hnf(gens, 2)]


def torus_lattices(sft: Nn2Sft, p: int, q: int) -> set[tuple[tuple[int, ...], ...]]:
    ''' the set of stabilizer lattices of all valid ``p x q`` tori '''
    return {tuple(map(tuple, stabilizer_lattice(c))) for c in iter_tori(sft, p, q)}


def torus_kernel(sft: Nn2Sft, p: int, q: int) -> list[list[int]] | None:
    '''
    Intersection of the stabilizer lattices of all valid ``p x q`` tori, or
    ``None`` when there is no such torus.
    '''
    lattices = [[tuple(r) for r in b] for b in torus_lattices(sft, p, q)]
    if not lattices:
        return None
    keep = [(a, b) for a in range(p) for b in range(q)
            if all(not any(reduce_mod((a, b), lat)) for lat in lattices)]
    return [list(r) for r in hnf([(p, 0), (0, q)] + keep, 2)]


def recode(sft: Nn2Sft, mapping: dict[str, str]) -> Nn2Sft:
    ''' rename letters through a bijection '''
    if sorted(mapping) != sorted(sft.alphabet) or len(set(mapping.values())) != len(mapping):
        raise ValueError('mapping must be a bijection on the alphabet')
    f = mapping.__getitem__
    return Nn2Sft(tuple(f(a) for a in sft.alphabet),
        frozenset((f(a), f(b)) for a, b in sft.h_forbidden),
        frozenset((f(a), f(b)) for a, b in sft.v_forbidden))


@dataclass(frozen=True)
class ProbeReport:
    ''' outcome of ``aperiodicity_probe``: 'empty', 'periodic', 'vector' or 'unknown' '''
    kind: str
    bound: int
    witness: TorusConfig | None = None
    vector: PeriodVector | None = None
    lattice: list[list[int]] | None = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return {'empty': 'EmptyWithinBound', 'periodic': 'PeriodicPointFound',
            'vector': 'VectorStabilizedFound', 'unknown': 'Unknown'}[self.kind]

    def to_dict(self) -> dict:
        d: dict = {'result': self.name, 'bound': self.bound}
        if self.witness is not None:
            d['witness'] = self.witness.to_dict()
            d['stabilizer'] = stabilizer_lattice(self.witness)
        if self.vector is not None:
            d['vector'] = [self.vector.p, self.vector.q]
        return d


def thread_count() -> int:
    import os
    raw = os.environ.get('STABLAB_THREADS', '')
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _first_hit(fn, items: list, threads: int):
    ''' ``fn`` over ``items``; the earliest item with a non-None result wins '''
    if threads <= 1 or len(items) <= 1:
        for it in items:
            r = fn(it)
            if r is not None:
                return it, r
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for it, r in zip(items, pool.map(fn, items)):
            if r is not None:
                return it, r
    return None


def aperiodicity_probe(sft: Nn2Sft, bound: int, threads: int | None = None) -> ProbeReport:
    '''
    Bounded evidence about aperiodicity.

    * EmptyWithinBound: no locally valid ``(bound+1) x (bound+1)`` square.
    * PeriodicPointFound: some ``p x q`` torus with ``p, q <= bound``.
    * VectorStabilizedFound: some primitive ``v`` with ``|p|, q <= bound``
      fixes a configuration; the witness is its periodization.
    * Unknown otherwise.
    '''
    if bound < 1:
        raise ValueError('bound must be positive')
    threads = thread_count() if threads is None else max(1, threads)
    if locally_valid_square(sft, bound + 1) is None:
        return ProbeReport('empty', bound)
    sizes = sorted(((p, q) for p in range(1, bound + 1) for q in range(1, bound + 1)),
        key=lambda s: (s[0] * s[1], s))
    hit = _first_hit(lambda s: search_torus(sft, *s), sizes, threads)
    if hit:
        return ProbeReport('periodic', bound, hit[1])
    vectors = sorted({PeriodVector(p, q) for p in range(-bound, bound + 1) for q in range(bound + 1)
        if (p or q) and math.gcd(p, q) == 1}, key=lambda v: (abs(v.p) + v.q, v.q, v.p))
    hit = _first_hit(lambda v: periodize(sft, v), vectors, threads)
    if hit:
        v, cfg = hit
        return ProbeReport('vector', bound, cfg, v)
    return ProbeReport('unknown', bound)


def parse_nn2(text: str) -> Nn2Sft:
    '''
    Parse::

        alphabet: a b
        hforbid: a a
        vforbid: b b
    '''
    alphabet: list[str] | None = None
    h, v = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(':')
        if not sep:
            raise ParseError(f'expected "key: value", got {raw.strip()!r}', lineno)
        key = key.strip().lower()
        words = rest.split()
        if key == 'alphabet':
            if alphabet is not None:
                raise ParseError('alphabet declared twice', lineno)
            if len(set(words)) != len(words):
                raise ParseError('duplicate letters in alphabet', lineno)
            alphabet = words
        elif key in ('hforbid', 'vforbid'):
            if alphabet is None:
                raise ParseError(f'{key} before alphabet', lineno)
            if len(words) != 2:
                raise ParseError('a forbidden pair needs exactly two letters', lineno)
            for w in words:
                if w not in alphabet:
                    raise ParseError(f'unknown letter {w!r}', lineno)
            (h if key == 'hforbid' else v).append(tuple(words))
        else:
            raise ParseError(f'unknown declaration {key!r}', lineno)
    if alphabet is None:
        raise ParseError('missing alphabet declaration')
    return Nn2Sft(tuple(alphabet), frozenset(h), frozenset(v))


def format_nn2(sft: Nn2Sft) -> str:
    order = {a: i for i, a in enumerate(sft.alphabet)}
    key = lambda e: (order[e[0]], order[e[1]])
    lines = ['alphabet: ' + ' '.join(sft.alphabet)]
    lines += [f'hforbid: {a} {b}' for a, b in sorted(sft.h_forbidden, key=key)]
    lines += [f'vforbid: {a} {b}' for a, b in sorted(sft.v_forbidden, key=key)]
    return '\n'.join(lines) + '\n'
