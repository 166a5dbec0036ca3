"""Periods and stabilizers of subshifts of finite type on Z, Z^2 and
finitely generated abelian groups."""

__version__ = '0.1.0'

from .errors import (BoundTooSmall, EmptySft, NotCertified, NotEssential, NotRealizable, ParseError,
    PreconditionError, StablabError)
from .graph import TilesetGraph, format_graph, parse_graph, to_dot
from .realizer import gamma_cycle, gamma_progression, realize
from .semilinear import SemilinearSet, equal_sl, format_set, is_realizable_period_set, parse_set
from .zshift import (count_periodic_points, has_aperiodic_point, least_period_counts,
    least_period_exists, multiples, product, prune_essential, union)

__all__ = [
    'BoundTooSmall', 'EmptySft', 'NotCertified', 'NotEssential', 'NotRealizable', 'ParseError',
    'PreconditionError', 'StablabError', 'TilesetGraph', 'format_graph', 'parse_graph', 'to_dot',
    'gamma_cycle', 'gamma_progression', 'realize', 'SemilinearSet', 'equal_sl', 'format_set',
    'is_realizable_period_set', 'parse_set', 'count_periodic_points', 'has_aperiodic_point',
    'least_period_counts', 'least_period_exists', 'multiples', 'product', 'prune_essential', 'union',
]
