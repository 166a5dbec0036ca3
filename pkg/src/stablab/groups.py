"""Finitely generated abelian groups, their subgroups and quotients.

Everything is done on integer row vectors. A group ``Z^r x Z/m1 x ... x Z/ms``
is the quotient of ``Z^(r+s)`` by the relation rows ``m_i e_(r+i)``, so a
subgroup is a lattice in ``Z^(r+s)`` containing those relations.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ParseError

__all__ = [
    'hnf', 'reduce_mod', 'smith', 'FgAbelianGroup', 'SubgroupLattice', 'QuotientMap',
    'quotient', 'coset_transversal', 'parse_group',
]

Vec = tuple[int, ...]


def hnf(rows: Iterable[Sequence[int]], dim: int) -> list[Vec]:
    '''
    Canonical basis of the lattice spanned by ``rows``, in lower echelon form:
    each basis row ends at its pivot (last nonzero entry, positive), pivots
    increase down the list, and entries of later rows in earlier pivot
    columns are reduced into ``[0, pivot)``.
    '''
    work = [list(r) for r in rows if any(r)]
    for r in work:
        if len(r) != dim:
            raise ValueError(f'expected vectors of length {dim}')
    basis: dict[int, list[int]] = {}
    for c in range(dim - 1, -1, -1):
        live = [r for r in work if r[c]]
        rest = [r for r in work if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[c] // piv[c]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[c] else rest).append(r)
            live = nxt
        if live:
            piv = live[0]
            if piv[c] < 0:
                piv = [-x for x in piv]
            basis[c] = piv
        work = [r for r in rest if any(r)]
    cols = sorted(basis)
    for c in cols:
        row = basis[c]
        for c2 in reversed([x for x in cols if x < c]):
            q = row[c2] // basis[c2][c2]
            if q:
                row = [x - q * y for x, y in zip(row, basis[c2])]
        basis[c] = row
    return [tuple(basis[c]) for c in cols]


def reduce_mod(v: Sequence[int], basis: list[Vec]) -> Vec:
    ''' canonical residue of ``v`` modulo an ``hnf`` basis (zero iff ``v`` is in the lattice) '''
    v = list(v)
    by_pivot = {_pivot(r): r for r in basis}
    for c in sorted(by_pivot, reverse=True):
        r = by_pivot[c]
        q = v[c] // r[c]
        if q:
            v = [x - q * y for x, y in zip(v, r)]
    return tuple(v)


def _pivot(r: Sequence[int]) -> int:
    return max(i for i, x in enumerate(r) if x)


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith(m: Sequence[Sequence[int]], ncols: int):
    '''
    Smith normal form ``U M V = D`` of a ``k x n`` integer matrix.

    Returns ``(diag, V, Vinv)`` where ``diag`` lists the nonzero invariant
    factors in divisibility order; ``U`` is not needed by callers.
    '''
    a = [list(r) for r in m]
    k, n = len(a), ncols
    v = _identity(n)
    vinv = _identity(n)

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def col_add(dst, src, q):
        # column dst += q * column src
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]
        vinv[src] = [x - q * y for x, y in zip(vinv[src], vinv[dst])]

    def col_neg(i):
        for r in a:
            r[i] = -r[i]
        for r in v:
            r[i] = -r[i]
        vinv[i] = [-x for x in vinv[i]]

    t = 0
    while t < min(k, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, k) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        if pj != t:
            col_swap(t, pj)
        while True:
            done = True
            for i in range(t + 1, k):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_add(j, t, -q)
                    if a[t][j]:
                        done = False
            if done:
                # divisibility against the remaining block
                bad = [(i, j) for i in range(t + 1, k) for j in range(t + 1, n) if a[i][j] % a[t][t]]
                if not bad:
                    break
                i, _ = bad[0]
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                continue
            # move the smallest entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, k) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, ci, cj = min(cand)
            if ci != t:
                a[t], a[ci] = a[ci], a[t]
            if cj != t:
                col_swap(t, cj)
        if a[t][t] < 0:
            col_neg(t)
        t += 1
    diag = [a[i][i] for i in range(t)]
    return diag, [tuple(r) for r in v], [tuple(r) for r in vinv]


def _matvec(x: Sequence[int], m: Sequence[Sequence[int]]) -> Vec:
    ''' row vector times matrix '''
    n = len(m[0]) if m else 0
    return tuple(sum(x[i] * m[i][j] for i in range(len(x))) for j in range(n))


@dataclass(frozen=True)
class FgAbelianGroup:
    ''' ``Z^rank x Z/t1 x ... x Z/ts`` with ``t1 | t2 | ... | ts``, each ``ti >= 2`` '''
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'torsion', tuple(self.torsion))
        if self.rank < 0 or any(t < 2 for t in self.torsion):
            raise ValueError('invalid invariant factors')
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError('invariant factors must divide each other')

    @property
    def dim(self) -> int:
        return self.rank + len(self.torsion)

    def reduce(self, v: Sequence[int]) -> Vec:
        if len(v) != self.dim:
            raise ValueError(f'element {tuple(v)} has wrong length for {self}')
        return tuple(v[:self.rank]) + tuple(x % t for x, t in zip(v[self.rank:], self.torsion))

    def zero(self) -> Vec:
        return (0,) * self.dim

    def add(self, u: Sequence[int], v: Sequence[int]) -> Vec:
        return self.reduce([x + y for x, y in zip(u, v)])

    def neg(self, v: Sequence[int]) -> Vec:
        return self.reduce([-x for x in v])

    def sub(self, u: Sequence[int], v: Sequence[int]) -> Vec:
        return self.reduce([x - y for x, y in zip(u, v)])

    def scale(self, k: int, v: Sequence[int]) -> Vec:
        return self.reduce([k * x for x in v])

    def generators(self) -> list[Vec]:
        ''' canonical generators, one per coordinate '''
        return [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]

    def relations(self) -> list[Vec]:
        out = []
        for i, t in enumerate(self.torsion):
            row = [0] * self.dim
            row[self.rank + i] = t
            out.append(tuple(row))
        return out

    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self) -> float:
        return math.prod(self.torsion) if self.rank == 0 else math.inf

    def elements(self, radius: int = 0) -> list[Vec]:
        ''' free coordinates in ``[-radius, radius]``, all torsion coordinates '''
        import itertools
        ranges = [range(-radius, radius + 1)] * self.rank + [range(t) for t in self.torsion]
        return [tuple(x) for x in itertools.product(*ranges)]

    def orientation(self, v: Sequence[int]) -> int:
        '''
        +1 or -1 choosing one of ``v, -v`` canonically, 0 when ``v == -v``.
        A free coordinate decides by sign, a torsion coordinate ``c`` by
        whether ``2c`` is below or above the modulus.
        '''
        v = self.reduce(v)
        for x in v[:self.rank]:
            if x:
                return 1 if x > 0 else -1
        for x, t in zip(v[self.rank:], self.torsion):
            if x and 2 * x != t:
                return 1 if 2 * x < t else -1
        return 0

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append('Z')
        elif self.rank > 1:
            parts.append(f'Z^{self.rank}')
        parts += [f'Z/{t}' for t in self.torsion]
        return ' x '.join(parts) if parts else '1'


@dataclass(frozen=True)
class SubgroupLattice:
    ambient: FgAbelianGroup
    generators: tuple[Vec, ...]

    def __post_init__(self):
        gens = tuple(self.ambient.reduce(g) for g in self.generators)
        object.__setattr__(self, 'generators', gens)

    @cached_property
    def basis(self) -> list[Vec]:
        ''' ``hnf`` of the generators together with the ambient relations '''
        return hnf(list(self.generators) + self.ambient.relations(), self.ambient.dim)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(reduce_mod(v, self.basis))

    def residue(self, v: Sequence[int]) -> Vec:
        return self.ambient.reduce(reduce_mod(v, self.basis))

    def index(self) -> float:
        if len(self.basis) < self.ambient.dim:
            return math.inf
        return math.prod(r[i] for i, r in enumerate(self.basis))

    def free_basis(self) -> list[Vec]:
        ''' for a subgroup of ``Z^d`` of full rank: the ``hnf`` rows as a basis '''
        if self.ambient.torsion:
            raise ValueError('free_basis needs a torsion-free ambient group')
        return self.basis

    def coordinates(self, v: Sequence[int]) -> Vec:
        ''' integer coefficients of ``v`` over ``free_basis`` (``v`` must lie in the lattice) '''
        basis = self.free_basis()
        v = list(v)
        coeff = [0] * len(basis)
        for idx in range(len(basis) - 1, -1, -1):
            r = basis[idx]
            c = _pivot(r)
            if v[c] % r[c]:
                raise ValueError(f'{tuple(v)} is not in the lattice')
            q = v[c] // r[c]
            coeff[idx] = q
            v = [x - q * y for x, y in zip(v, r)]
        if any(v):
            raise ValueError('vector is not in the lattice')
        return tuple(coeff)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgroupLattice):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(self.basis)))


def coset_transversal(lattice: SubgroupLattice) -> list[Vec]:
    '''
    Canonical representatives of ``ambient / lattice``: the box below the
    pivots of the normal form, so there are exactly ``index`` of them.
    '''
    import itertools
    if lattice.index() == math.inf:
        raise ValueError('subgroup has infinite index')
    diag = [r[i] for i, r in enumerate(lattice.basis)]
    return [lattice.ambient.reduce(x) for x in itertools.product(*(range(d) for d in diag))]


@dataclass(frozen=True)
class QuotientMap:
    '''
    The projection ``G -> G/N`` with ``G/N`` in invariant-factor form, and its
    canonical section: least nonnegative residues in the Smith coordinates.
    '''
    source: FgAbelianGroup
    kernel: SubgroupLattice
    target: FgAbelianGroup
    _v: tuple
    _vinv: tuple
    _diag: tuple

    def project(self, g: Sequence[int]) -> Vec:
        y = _matvec(list(self.source.reduce(g)), self._v)
        r = len(self._diag)
        free = y[r:]
        tors = [y[i] for i, d in enumerate(self._diag) if d > 1]
        return self.target.reduce(tuple(free) + tuple(tors))

    def section(self, q: Sequence[int]) -> Vec:
        q = self.target.reduce(q)
        r = len(self._diag)
        y = [0] * self.source.dim
        nfree = self.target.rank
        y[r:] = q[:nfree]
        tors = iter(q[nfree:])
        for i, d in enumerate(self._diag):
            if d > 1:
                y[i] = next(tors)
        return self.source.reduce(_matvec(y, self._vinv))

    def lifted_generators(self) -> list[Vec]:
        return [self.section(s) for s in self.target.generators()]


def _tidy_free_block(r: int, v, vinv):
    '''
    Reorder and re-sign the free Smith coordinates so that the lifted free
    generators come in order of their first nonzero entry, which is positive.
    '''
    n = len(v)
    free = list(range(r, n))
    lead = {i: next((k for k, x in enumerate(vinv[i]) if x), n) for i in free}
    order = sorted(free, key=lambda i: (lead[i], [-abs(x) for x in vinv[i]]))
    sign = {i: -1 if lead[i] < n and vinv[i][lead[i]] < 0 else 1 for i in free}
    new_vinv = list(vinv[:r]) + [tuple(sign[i] * x for x in vinv[i]) for i in order]
    cols = list(range(r)) + order
    new_v = [tuple(row[c] * (sign.get(c, 1) if c >= r else 1) for c in cols) for row in v]
    return new_v, new_vinv


def quotient(group: FgAbelianGroup, n_gens: Iterable[Sequence[int]]) -> QuotientMap:
    n_gens = [group.reduce(g) for g in n_gens]
    kernel = SubgroupLattice(group, tuple(n_gens))
    rows = list(n_gens) + group.relations()
    if rows:
        diag, v, vinv = smith(rows, group.dim)
    else:
        diag, v, vinv = [], _identity(group.dim), _identity(group.dim)
    target = FgAbelianGroup(group.dim - len(diag), tuple(d for d in diag if d > 1))
    v, vinv = _tidy_free_block(len(diag), v, vinv)
    return QuotientMap(group, kernel, target, tuple(map(tuple, v)), tuple(map(tuple, vinv)), tuple(diag))


_GROUP_FACTOR = re.compile(r'^Z(?:\^(\d+)|/(\d+))?$')
_VECTOR = re.compile(r'\(([^()]*)\)')


def parse_group(text: str) -> tuple[FgAbelianGroup, list[Vec]]:
    '''
    Parse ``Z^2``, ``Z x Z/2``, ``Z/3`` or a quotient ``Z^2 / <(0,2)>``.
    Returns the group and the (possibly empty) list of subgroup generators.
    Cyclic torsion factors must already come in divisibility order.
    '''
    body, slash, gens_text = text.partition('<')
    gens: list[Vec] = []
    if slash:
        body = body.rstrip()
        if not body.endswith('/'):
            raise ParseError(f'expected "G / <...>" in {text!r}')
        body = body[:-1]
        if not gens_text.rstrip().endswith('>'):
            raise ParseError(f'unterminated generator list in {text!r}')
        inner = gens_text.rstrip()[:-1]
        for m in _VECTOR.finditer(inner):
            try:
                gens.append(tuple(int(x) for x in m.group(1).split(',')))
            except ValueError:
                raise ParseError(f'bad vector ({m.group(1)})') from None
    rank, torsion = 0, []
    for factor in body.split('x'):
        f = factor.replace(' ', '')
        m = _GROUP_FACTOR.match(f)
        if not m:
            raise ParseError(f'cannot parse group factor {factor.strip()!r}')
        if m.group(2):
            torsion.append(int(m.group(2)))
        else:
            rank += int(m.group(1) or 1)
    try:
        group = FgAbelianGroup(rank, tuple(torsion))
    except ValueError as e:
        raise ParseError(str(e)) from None
    for g in gens:
        if len(g) != group.dim:
            raise ParseError(f'generator {g} does not live in {group}')
    return group, gens
