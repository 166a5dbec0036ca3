"""Eventually periodic subsets of N in a canonical progression form.

A set is stored as a finite part plus progressions ``(start, step)`` standing
for ``{start + n*step : n >= 0}``. Every constructor normalizes, so two sets
are equal as Python values exactly when they are equal as sets of naturals.

Text syntax, terms joined by ``+``::

    {2,3}       finite set ({} is empty)
    4(N+1)      {4(n+1) : n in N} = {4, 8, 12, ...}
    6N*         6N without 0, same as 6(N+1)
    3N          {0, 3, 6, ...}
    (4N+1)      {1, 5, 9, ...}
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable

from .errors import NotCertified, ParseError

__all__ = [
    'SemilinearSet', 'member', 'union_sl', 'lcm_combine', 'equal_sl',
    'is_realizable_period_set', 'parse_set', 'format_set',
]


def _lcm_all(xs: Iterable[int]) -> int:
    return reduce(math.lcm, xs, 1)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@dataclass(frozen=True)
class SemilinearSet:
    finite_part: frozenset[int]
    progressions: tuple[tuple[int, int], ...]

    def __init__(self, finite: Iterable[int] = (), progressions: Iterable[tuple[int, int]] = ()):
        finite = frozenset(int(x) for x in finite)
        progressions = tuple((int(s), int(a)) for s, a in progressions)
        if any(x < 0 for x in finite):
            raise ValueError('naturals only')
        for s, a in progressions:
            if s < 0 or a <= 0:
                raise ValueError(f'bad progression ({s}, {a}): need start >= 0 and step > 0')
        fin, progs = _normalize(finite, progressions)
        object.__setattr__(self, 'finite_part', fin)
        object.__setattr__(self, 'progressions', progs)

    def __contains__(self, p: int) -> bool:
        if p in self.finite_part:
            return True
        return any(p >= s and (p - s) % a == 0 for s, a in self.progressions)

    def is_finite(self) -> bool:
        return not self.progressions

    def threshold(self) -> int:
        ''' every element at or beyond this index follows the periodic pattern '''
        return max([s for s, _ in self.progressions] + [x + 1 for x in self.finite_part], default=0)

    def period(self) -> int:
        return _lcm_all(a for _, a in self.progressions)

    def elements_upto(self, bound: int) -> list[int]:
        return [n for n in range(bound + 1) if n in self]

    def __str__(self) -> str:
        return format_set(self)

    # -- conversions ---------------------------------------------------------

    @classmethod
    def from_membership(cls, pred: Callable[[int], bool], threshold: int, period: int) -> 'SemilinearSet':
        '''
        Build the set whose membership is ``pred`` on ``[0, threshold)`` and is
        ``period``-periodic from ``threshold`` on.
        '''
        finite = [n for n in range(threshold) if pred(n)]
        progs = [(n, period) for n in range(threshold, threshold + period) if pred(n)]
        return cls(finite, progs)

    @classmethod
    def from_multiples(cls, finite: Iterable[int], families: Iterable[tuple[int, int]]) -> 'SemilinearSet':
        ''' ``F`` together with ``{a(n+k) : n in N}`` for each pair ``(a, k)`` '''
        return cls(finite, [(a * k, a) for a, k in families])

    def multiples_form(self) -> tuple[frozenset[int], tuple[tuple[int, int], ...]]:
        '''
        Return ``(F, ((a, k), ...))`` with the set equal to
        ``F | union {a(n+k)}``, ``k >= 1``. Raises ``NotCertified`` when a
        progression does not run through multiples of its step.
        '''
        fams = []
        for s, a in self.progressions:
            if s % a:
                raise NotCertified(f'progression ({s}, {a}) is not of the form a(N+k)')
            fams.append((a, max(s // a, 1)))
        covered = SemilinearSet((), [(a * k, a) for a, k in fams])
        extra = [x for x in self.elements_upto(self.threshold()) if x not in covered]
        return frozenset(extra), tuple(fams)

    @classmethod
    def from_cofinite(cls, finite: Iterable[int], parts: Iterable[tuple[int, Iterable[int]]]) -> 'SemilinearSet':
        ''' ``F | union (k N minus F_i)`` for each pair ``(k, F_i)``; here ``kN`` includes 0 '''
        progs, fin = [], set(finite)
        for k, excluded in parts:
            excluded = set(excluded)
            top = max(excluded, default=-1) + 1
            first = -(-top // k) * k
            progs.append((first, k))
            fin.update(x for x in range(0, first, k) if x not in excluded)
        return cls(fin, progs)

    def cofinite_form(self) -> tuple[frozenset[int], tuple[tuple[int, frozenset[int]], ...]]:
        '''
        Return ``(F, ((k, F_k), ...))`` with the set equal to
        ``F | union (kN minus F_k)``. Raises ``NotCertified`` if some
        progression is not of that shape.
        '''
        parts = []
        for s, a in self.progressions:
            if s % a:
                raise NotCertified(f'progression ({s}, {a}) is not a cofinite part of a multiple set')
            parts.append((a, frozenset(range(0, s, a))))
        return self.finite_part, tuple(parts)


def _normalize(finite: frozenset[int], progressions: tuple[tuple[int, int], ...]):
    '''
    Canonical form: steps are scanned in increasing order; a residue class is
    kept as a progression when it is eventually contained in the set and not
    already eventually covered by a smaller step. Each progression starts as
    low as the set allows. The rest goes to the finite part.
    '''
    if not progressions:
        return finite, ()

    def raw(n: int) -> bool:
        return n in finite or any(n >= s and (n - s) % a == 0 for s, a in progressions)

    period = _lcm_all(a for _, a in progressions)
    t0 = max([s for s, _ in progressions] + [x + 1 for x in finite])
    eventual = {r for r in range(period) if raw(t0 + ((r - t0) % period))}

    chosen: list[tuple[int, int]] = []
    covered: set[int] = set()
    for a in _divisors(period):
        for c in range(a):
            cls_res = set(range(c, period, a))
            if not cls_res <= eventual or cls_res <= covered:
                continue
            s = t0 + ((c - t0) % a)
            while s - a >= 0 and raw(s - a):
                s -= a
            chosen.append((s, a))
            covered |= cls_res

    def in_progs(n: int) -> bool:
        return any(n >= s and (n - s) % a == 0 for s, a in chosen)

    fin = frozenset(x for x in range(t0) if raw(x) and not in_progs(x))
    return fin, tuple(sorted(chosen, key=lambda p: (p[1], p[0])))


# -- operations --------------------------------------------------------------

def member(s: SemilinearSet, p: int) -> bool:
    return p in s


def union_sl(s1: SemilinearSet, s2: SemilinearSet) -> SemilinearSet:
    return SemilinearSet(s1.finite_part | s2.finite_part, s1.progressions + s2.progressions)


def _lcm0(p: int, q: int) -> int:
    # pZ ∩ qZ = lcm(p, q)Z, and the trivial subgroup absorbs everything
    return 0 if p == 0 or q == 0 else math.lcm(p, q)


def lcm_combine(s1: SemilinearSet, s2: SemilinearSet) -> SemilinearSet:
    '''
    ``{lcm(p, q) : p in s1, q in s2}`` with ``lcm(0, q) = 0``.

    The result of two arbitrary progressions need not be eventually periodic
    (take residues 1 and 3 mod 4: the primes congruent to 3 mod 4 are
    missing). It is computed exactly when every pair of combined
    progressions runs through multiples of its step, which covers all
    realizable period sets; otherwise ``NotCertified`` is raised.
    '''
    fin: set[int] = set()
    progs: list[tuple[int, int]] = []
    for p in s1.finite_part:
        for q in s2.finite_part:
            fin.add(_lcm0(p, q))
    for src, other in ((s1, s2), (s2, s1)):
        for f in src.finite_part:
            for s, a in other.progressions:
                if f == 0:
                    fin.add(0)
                    continue
                fin_f, progs_f = _lcm_with_progression(f, s, a)
                fin |= fin_f
                progs += progs_f
    for s, a in s1.progressions:
        for t, b in s2.progressions:
            if s % a or t % b:
                raise NotCertified(
                    f'lcm of progressions ({s}, {a}) and ({t}, {b}) is not eventually periodic in general')
            step = math.lcm(a, b)
            top = max(s, t)
            first = -(-top // step) * step
            progs.append((first, step))
            # below the threshold, enumerate; lcm(p, q) >= max(p, q)
            for p in range(s, first + 1, a):
                for q in range(t, first + 1, b):
                    v = math.lcm(p, q) if p and q else 0
                    if v < first:
                        fin.add(v)
    return SemilinearSet(fin, progs)


def _lcm_with_progression(f: int, s: int, a: int) -> tuple[set[int], list[tuple[int, int]]]:
    fin: set[int] = set()
    progs = []
    for j in range(f):
        p = s + a * j
        if p == 0:
            fin.add(0)
            p += a * f
            # the remaining members of this class are p + a*f*m, m >= 0
        g = math.gcd(f, p)
        progs.append((f * p // g, a * f * f // g))
    return fin, progs


def equal_sl(s1: SemilinearSet, s2: SemilinearSet) -> bool:
    '''
    Pointwise equality, decided on ``[0, B]`` with ``B`` the largest start or
    finite element plus twice the lcm of all steps.
    '''
    starts = [s for s, _ in s1.progressions + s2.progressions]
    elems = list(s1.finite_part | s2.finite_part)
    bound = max(starts + elems, default=0) + 2 * _lcm_all(a for _, a in s1.progressions + s2.progressions)
    return all((n in s1) == (n in s2) for n in range(bound + 1))


def is_realizable_period_set(s: SemilinearSet) -> bool:
    '''
    Whether ``s`` is the set of multiples of some nearest-neighbor Z-SFT:
    either a finite set without 0, or an infinite set containing 0 whose
    progressions all run through multiples of their step, i.e. a finite
    set together with families ``{a(n+k) : n in N}``.

    Eventually every period of a strongly connected component with
    cycle-length gcd ``d`` is a multiple of ``d``, which is why a class
    like the odd numbers can never be the tail of a period set.
    '''
    if s.is_finite():
        return 0 not in s.finite_part
    if 0 not in s:
        return False
    return all(st % a == 0 for st, a in s.progressions)


# -- text syntax -------------------------------------------------------------

_TERM = re.compile(r'''
    \{(?P<fin>[^}]*)\}
  | (?P<a1>\d+)\s*\(\s*N\s*\+\s*(?P<k>\d+)\s*\)
  | (?P<a2>\d+)\s*N\s*\*
  | \(\s*(?P<a3>\d+)\s*N\s*\+\s*(?P<s>\d+)\s*\)
  | (?P<a4>\d+)\s*N
''', re.VERBOSE)


def parse_set(text: str) -> SemilinearSet:
    fin: set[int] = set()
    progs: list[tuple[int, int]] = []
    pos = 0
    text = text.strip()
    if not text:
        raise ParseError('empty set expression')
    expect_term = True
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if not expect_term:
            if text[pos] != '+':
                raise ParseError(f'expected "+" at column {pos + 1} in {text!r}')
            pos += 1
            expect_term = True
            continue
        m = _TERM.match(text, pos)
        if not m:
            raise ParseError(f'cannot parse term at column {pos + 1} in {text!r}')
        if m.group('fin') is not None:
            body = m.group('fin').strip()
            if body:
                try:
                    fin.update(int(x) for x in body.split(','))
                except ValueError:
                    raise ParseError(f'bad finite set {{{body}}}') from None
        elif m.group('a1') is not None:
            a, k = int(m.group('a1')), int(m.group('k'))
            progs.append((a * k, a))
        elif m.group('a2') is not None:
            a = int(m.group('a2'))
            progs.append((a, a))
        elif m.group('a3') is not None:
            progs.append((int(m.group('s')), int(m.group('a3'))))
        else:
            progs.append((0, int(m.group('a4'))))
        for (st, a) in progs:
            if a == 0:
                raise ParseError('progression step must be positive')
        pos = m.end()
        expect_term = False
    if expect_term:
        raise ParseError(f'dangling "+" in {text!r}')
    return SemilinearSet(fin, progs)


def format_set(s: SemilinearSet) -> str:
    terms = []
    if s.finite_part or not s.progressions:
        terms.append('{' + ','.join(str(x) for x in sorted(s.finite_part)) + '}')
    for st, a in s.progressions:
        if st == 0:
            terms.append(f'{a}N')
        elif st % a == 0:
            terms.append(f'{a}(N+{st // a})')
        else:
            terms.append(f'({a}N+{st})')
    return ' + '.join(terms)
