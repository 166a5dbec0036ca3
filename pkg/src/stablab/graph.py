"""Tileset graphs: the directed graphs behind nearest-neighbor Z-SFTs.

A letter ``a`` may be followed by ``b`` exactly when ``(a, b)`` is an edge, so
the configurations of the SFT are the bi-infinite walks on the graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ParseError

__all__ = ['TilesetGraph', 'parse_graph', 'format_graph', 'to_dot']


@dataclass(frozen=True)
class TilesetGraph:
    alphabet: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, alphabet: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        alphabet = tuple(alphabet)
        edges = frozenset((a, b) for a, b in edges)
        if len(set(alphabet)) != len(alphabet):
            raise ValueError('duplicate letters in alphabet')
        index = {a: i for i, a in enumerate(alphabet)}
        for a, b in edges:
            if a not in index or b not in index:
                raise ValueError(f'edge ({a}, {b}) uses a letter outside the alphabet')
        object.__setattr__(self, 'alphabet', alphabet)
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, '_index', index)

    def __len__(self) -> int:
        return len(self.alphabet)

    def is_empty(self) -> bool:
        return not self.alphabet

    def index(self, letter: str) -> int:
        return self._index[letter]

    def sorted_edges(self) -> list[tuple[str, str]]:
        ''' edges in alphabet order of (source, target) '''
        return sorted(self.edges, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    def successors(self, letter: str) -> list[str]:
        return [b for a, b in self.sorted_edges() if a == letter]

    def adjacency(self) -> np.ndarray:
        n = len(self.alphabet)
        m = np.zeros((n, n), dtype=np.int64)
        for a, b in self.edges:
            m[self._index[a], self._index[b]] = 1
        return m

    def induced(self, letters: Iterable[str]) -> 'TilesetGraph':
        ''' subgraph on ``letters``, keeping alphabet order '''
        keep = set(letters)
        alphabet = [a for a in self.alphabet if a in keep]
        return TilesetGraph(alphabet, [(a, b) for a, b in self.edges if a in keep and b in keep])

    def relabel(self, mapping) -> 'TilesetGraph':
        return TilesetGraph([mapping(a) for a in self.alphabet],
            [(mapping(a), mapping(b)) for a, b in self.edges])


def parse_graph(text: str) -> TilesetGraph:
    '''
    Parse the line format::

        alphabet: a b c
        edge: a b
        # comment

    The alphabet line must come before any edge.
    '''
    alphabet: list[str] | None = None
    edges = []
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
        elif key == 'edge':
            if alphabet is None:
                raise ParseError('edge before alphabet', lineno)
            if len(words) != 2:
                raise ParseError('an edge needs exactly two letters', lineno)
            for w in words:
                if w not in alphabet:
                    raise ParseError(f'unknown letter {w!r}', lineno)
            edges.append((words[0], words[1]))
        else:
            raise ParseError(f'unknown declaration {key!r}', lineno)
    if alphabet is None:
        raise ParseError('missing alphabet declaration')
    return TilesetGraph(alphabet, edges)


def format_graph(g: TilesetGraph) -> str:
    lines = ['alphabet: ' + ' '.join(g.alphabet)]
    lines += [f'edge: {a} {b}' for a, b in g.sorted_edges()]
    return '\n'.join(lines) + '\n'


def to_dot(g: TilesetGraph, name: str = 'tileset') -> str:
    lines = [f'digraph "{name}" {{']
    lines += [f'  "{a}";' for a in g.alphabet]
    lines += [f'  "{a}" -> "{b}";' for a, b in g.sorted_edges()]
    lines.append('}')
    return '\n'.join(lines) + '\n'
