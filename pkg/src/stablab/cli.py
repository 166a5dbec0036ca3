"""Command-line front end: ``stablab <command> ...``.

Exit codes: 0 success or witness found, 1 usage or parse error, 2 not
realizable or no witness exists, 3 unknown at the given bound.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any

from . import __version__
from .abelian import (format_abelian, free_extension, higher_power, parse_abelian, pull_back,
    push_forward)
from .errors import NotRealizable, ParseError, PreconditionError, StablabError
from .graph import format_graph, parse_graph, to_dot
from .groups import SubgroupLattice, parse_group
from .realizer import realize
from .semilinear import equal_sl, parse_set
from .z2 import (PeriodVector, aperiodicity_probe, check_torus, parse_nn2, periodize, search_torus,
    stabilizer_lattice, torus_kernel)
from .zshift import has_aperiodic_point, has_trivial_stabilizer, multiples, prune_essential

OK, USAGE, ABSENT, UNKNOWN = 0, 1, 2, 3


class Report:
    ''' a run report: deterministic fields plus optional timing '''

    def __init__(self, command: str, text: str):
        self.data: dict[str, Any] = {
            'command': command,
            'input_sha256': hashlib.sha256(text.encode()).hexdigest(),
            'version': __version__,
            'results': {},
        }
        self.started = time.perf_counter()
        self.lines: list[str] = []

    def emit(self, args, code: int) -> int:
        if args.json:
            if args.timing:
                self.data['seconds'] = round(time.perf_counter() - self.started, 6)
            print(json.dumps(self.data, sort_keys=True, indent=2))
        else:
            for line in self.lines:
                print(line)
        return code


def _read(path: str) -> str:
    if path == '-':
        return sys.stdin.read()
    return Path(path).read_text()


def _pair(text: str) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected "p,q", got {text!r}') from None
    return p, q


def _vectors(text: str) -> list[tuple[int, ...]]:
    from .groups import _VECTOR
    out = [tuple(int(x) for x in m.group(1).split(',')) for m in _VECTOR.finditer(text)]
    if not out:
        raise argparse.ArgumentTypeError(f'expected vectors like "(2,0),(0,2)", got {text!r}')
    return out


def cmd_analyze(args) -> int:
    text = _read(args.path)
    g = parse_graph(text)
    rep = Report('analyze', text)
    pruned = prune_essential(g)
    if args.dot:
        print(to_dot(pruned), end='')
        return OK
    if pruned.is_empty():
        rep.data['results'] = {'multiples': 'EMPTY'}
        rep.lines.append('EMPTY')
        return rep.emit(args, OK)
    m = multiples(pruned)
    res = {'multiples': str(m), 'aperiodic_point': has_aperiodic_point(pruned),
        'trivial_stabilizer': has_trivial_stabilizer(pruned),
        'letters': len(pruned), 'edges': len(pruned.edges)}
    rep.data['results'] = res
    rep.lines += [f'M = {m}', f'aperiodic point: {"yes" if res["aperiodic_point"] else "no"}']
    return rep.emit(args, OK)


def cmd_realize(args) -> int:
    rep = Report('realize', args.expr)
    target = parse_set(args.expr)
    try:
        g = realize(target)
    except NotRealizable as e:
        rep.data['results'] = {'target': str(target), 'realizable': False, 'reason': str(e)}
        rep.lines.append(f'not realizable: {e}')
        return rep.emit(args, ABSENT)
    body = format_graph(g)
    res = {'target': str(target), 'realizable': True, 'letters': len(g), 'edges': len(g.edges)}
    if args.verify:
        res['verified'] = equal_sl(multiples(prune_essential(g), args.bound), target)
    if args.dot:
        Path(args.dot).write_text(to_dot(g, 'realized'))
        res['dot'] = args.dot
    if args.out:
        Path(args.out).write_text(body)
        res['out'] = args.out
    rep.data['results'] = res
    if not args.out:
        rep.lines.append(body.rstrip('\n'))
    if args.verify:
        rep.lines.append(f'# verified: {"yes" if res["verified"] else "NO"}')
    return rep.emit(args, OK if res.get('verified', True) else ABSENT)


def cmd_probe(args) -> int:
    text = _read(args.path)
    sft = parse_nn2(text)
    rep = Report('probe', text)
    out = aperiodicity_probe(sft, args.bound)
    rep.data['results'] = out.to_dict()
    rep.lines.append(out.name + (f' {out.vector}' if out.vector else ''))
    if out.witness is not None:
        rep.lines.append(out.witness.to_json())
    code = {'periodic': OK, 'vector': OK, 'empty': ABSENT, 'unknown': UNKNOWN}[out.kind]
    return rep.emit(args, code)


def _witness_report(rep: Report, args, cfg, sft, extra: dict | None = None) -> int:
    extra = extra or {}
    if cfg is None:
        rep.data['results'] = {'witness': None, **extra}
        rep.lines.append('absent')
        return rep.emit(args, ABSENT)
    if check_torus(sft, cfg):
        raise AssertionError('witness failed validation')
    rep.data['results'] = {'witness': cfg.to_dict(), 'stabilizer': stabilizer_lattice(cfg), **extra}
    rep.lines.append(cfg.to_json())
    return rep.emit(args, OK)


def cmd_periodize(args) -> int:
    text = _read(args.path)
    sft = parse_nn2(text)
    rep = Report('periodize', text)
    v = PeriodVector(*args.vector)
    rep.data['vector'] = [v.p, v.q]
    return _witness_report(rep, args, periodize(sft, v), sft)


def cmd_search(args) -> int:
    text = _read(args.path)
    sft = parse_nn2(text)
    rep = Report('search', text)
    p, q = args.torus
    if p < 1 or q < 1:
        raise StablabError('torus dimensions must be positive')
    extra = {'kernel': torus_kernel(sft, p, q)} if args.json else {}
    return _witness_report(rep, args, search_torus(sft, p, q), sft, extra)


def cmd_construct(args) -> int:
    text = _read(args.input)
    x = parse_abelian(text)
    rep = Report(f'construct {args.kind}', text)
    if args.kind == 'free-ext':
        if args.dim is None:
            raise StablabError('free-ext needs --dim')
        y = free_extension(x, args.dim)
    elif args.kind == 'higher-power':
        if args.lattice is None:
            raise StablabError('higher-power needs --lattice')
        lat = SubgroupLattice(x.group, tuple(args.lattice))
        y = higher_power(x, lat, args.reps)
    else:
        if args.group is None:
            raise StablabError(f'{args.kind} needs --group "G / <...>"')
        g, n_gens = parse_group(args.group)
        if args.kind == 'pull-back':
            y = pull_back(x, g, n_gens)
        else:
            if g != x.group:
                raise StablabError(f'input sft lives on {x.group}, not on {g}')
            y = push_forward(x, n_gens)
    body = format_abelian(y)
    rep.data['results'] = {'group': str(y.group), 'letters': len(y.alphabet), 'patterns': len(y.forbidden)}
    if args.out:
        Path(args.out).write_text(body)
        rep.data['results']['out'] = args.out
        rep.lines.append(f'wrote {args.out}')
    else:
        rep.lines.append(body.rstrip('\n'))
    return rep.emit(args, OK)


def cmd_corpus(args) -> int:
    from .corpus import corpus_report
    data = corpus_report(args.seed, args.size, args.bound)
    body = json.dumps(data, sort_keys=True, indent=2) + '\n'
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='stablab',
        description='Periods and stabilizers of nearest-neighbor subshifts of finite type.')
    ap.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='print a JSON run report')
    common.add_argument('--timing', action='store_true', help='include wall time in the JSON report')
    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', parents=[common], help='period set of a tileset-graph file')
    p.add_argument('path', help='graph file ("-" for stdin)')
    p.add_argument('--dot', action='store_true', help='print the pruned graph in DOT and stop')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('realize', parents=[common], help='build a graph with a given period set')
    p.add_argument('expr', help='set expression, e.g. "{2,3} + 3(N+2)"')
    p.add_argument('--out', help='write the graph here instead of stdout')
    p.add_argument('--dot', help='also write the graph in DOT format to this file')
    p.add_argument('--verify', dest='verify', action='store_true', default=True,
        help='recompute the period set of the result (default)')
    p.add_argument('--no-verify', dest='verify', action='store_false',
        help='skip the verification')
    p.add_argument('--bound', type=int, help='certification bound used by the verification')
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser('probe', parents=[common], help='bounded aperiodicity probe of a Z^2 sft')
    p.add_argument('path')
    p.add_argument('--bound', type=int, default=3)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser('periodize', parents=[common], help='doubly periodic point fixed by a vector')
    p.add_argument('path')
    p.add_argument('--vector', type=_pair, required=True, metavar='P,Q')
    p.set_defaults(func=cmd_periodize)

    p = sub.add_parser('search', parents=[common], help='valid torus of a given size')
    p.add_argument('path')
    p.add_argument('--torus', type=_pair, required=True, metavar='P,Q')
    p.set_defaults(func=cmd_search)

    p = sub.add_parser('construct', parents=[common], help='transform an sft between groups')
    p.add_argument('kind', choices=['free-ext', 'higher-power', 'pull-back', 'push-forward'])
    p.add_argument('--in', dest='input', required=True, help='input sft file')
    p.add_argument('--out', help='output file (default stdout)')
    p.add_argument('--group', help='quotient expression "G / <gens>" for pull-back and push-forward')
    p.add_argument('--dim', type=int, help='target rank for free-ext')
    p.add_argument('--lattice', type=_vectors, help='lattice generators for higher-power')
    p.add_argument('--reps', type=_vectors, help='coset representatives (default: canonical)')
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser('corpus', help='deterministic report over a seeded random corpus')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--size', type=int, default=10)
    p.add_argument('--bound', type=int, default=2)
    p.add_argument('--out')
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, PreconditionError, StablabError, ValueError, OSError) as e:
        print(f'stablab: error: {e}', file=sys.stderr)
        return USAGE


if __name__ == '__main__':
    sys.exit(main())
