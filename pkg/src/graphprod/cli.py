"""Command line interface.

Every subcommand reads group product specs (or marked graph JSON) from files
and words from arguments (``-`` or no argument reads standard input).  Output
is JSON with sorted keys; ``--pretty`` indents it.  Exit codes: 0 success,
1 domain error (JSON error object on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .blocks import block_decomposition, centralizer
from .errors import GraphProductError
from .logic import build_phi, check_phi, emit
from .marked_graph import (decide_elementary_equivalence, find_marked_embedding, load_graph_file,
                           marked_isomorphic)
from .oracle import ball_enumerate
from .witness import reduce_witnesses
from .words import cyclically_reduce, format_word, order_of, parse_word, vertex_aliases


def _graph(path):
    return load_graph_file(path)[0]


def _word_text(arg):
    if arg is None or arg == "-":
        return sys.stdin.read()
    return arg


def _word(graph, arg):
    return parse_word(_word_text(arg), graph, vertex_aliases(graph))


def _core_info(graph, word_arg):
    u = _word(graph, word_arg)
    dec = cyclically_reduce(u)
    return u, dec


def cmd_graph(args):
    g = _graph(args.spec)
    if args.dot:
        return g.to_dot()
    return g.to_json()


def cmd_normalize(args):
    g = _graph(args.spec)
    return {"word": format_word(_word(g, args.word))}


def cmd_order(args):
    g = _graph(args.spec)
    o = order_of(_word(g, args.word))
    return {"order": "infinite" if o is None else o}


def _blocks_json(graph, word_arg):
    u, dec = _core_info(graph, word_arg)
    bd = block_decomposition(dec.core)
    desc = centralizer(dec.core)
    idx = graph.index.__getitem__
    return desc, {
        "word": format_word(u),
        "core": format_word(dec.core),
        "conjugator": format_word(dec.conjugator),
        "blocks": [{"kind": b.kind, "word": format_word(b.element)} for b in bd.blocks],
        "link": sorted(desc.link_vertices, key=idx),
        "vertex_factors": sorted(desc.vertex_factors, key=idx),
    }


def cmd_blocks(args):
    return _blocks_json(_graph(args.spec), args.word)[1]


def cmd_centralizer(args):
    desc, out = _blocks_json(_graph(args.spec), args.word)
    out["cyclic_factors"] = [format_word(c) for c in desc.cyclic_factors]
    return out


def cmd_embed(args):
    mapping = find_marked_embedding(_graph(args.src), _graph(args.dst), induced=args.induced)
    return {"embeds": mapping is not None, "embedding": mapping, "induced": args.induced}


def cmd_iso(args):
    mapping = marked_isomorphic(_graph(args.a), _graph(args.b))
    return {"isomorphic": mapping is not None, "isomorphism": mapping}


def cmd_ee(args):
    return decide_elementary_equivalence(_graph(args.a), _graph(args.b)).to_json()


def cmd_phi_emit(args):
    phi = build_phi(_graph(args.spec))
    text = emit(phi, args.format)
    return text if text.endswith("\n") else text + "\n"


def cmd_phi_check(args):
    phi = build_phi(_graph(args.source))
    result = check_phi(phi, _graph(args.target), args.radius)
    return result.to_json()


def cmd_witness_reduce(args):
    source, target = _graph(args.source), _graph(args.target)
    aliases = vertex_aliases(target)
    words = args.words or [w for w in sys.stdin.read().splitlines() if w.strip()]
    a = [parse_word(w, target, aliases) for w in words]
    return reduce_witnesses(a, source, target).to_json()


def cmd_ball(args):
    ball = ball_enumerate(_graph(args.spec), args.radius)
    if args.count:
        return f"{len(ball)}\n"
    return "".join((format_word(u) or "1") + "\n" for u in ball)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphprod",
        description="Graph products of finite abelian groups: normal forms, centralisers, "
                    "marked graphs and elementary equivalence.")
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("graph", cmd_graph, "print the marked graph of a spec")
    p.add_argument("spec")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    for name, func, help_text in [
        ("normalize", cmd_normalize, "canonical form of a word"),
        ("order", cmd_order, "order of an element"),
        ("blocks", cmd_blocks, "block decomposition of the cyclic core"),
        ("centralizer", cmd_centralizer, "centraliser of the cyclic core"),
    ]:
        p = add(name, func, help_text)
        p.add_argument("spec")
        p.add_argument("word", nargs="?", help="word such as 'a b^2 c'; '-' reads stdin")
    p = add("embed", cmd_embed, "find a marked embedding src -> dst")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--induced", action="store_true", help="also preserve non-adjacency")
    for name, func, help_text in [
        ("iso", cmd_iso, "marked graph isomorphism"),
        ("ee", cmd_ee, "decide elementary equivalence"),
    ]:
        p = add(name, func, help_text)
        p.add_argument("a")
        p.add_argument("b")
    p = add("phi-emit", cmd_phi_emit, "print the sentence Phi_G")
    p.add_argument("spec")
    p.add_argument("--format", choices=["sexpr", "pretty"], default="sexpr")
    p = add("phi-check", cmd_phi_check, "check Phi_source in target")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--radius", type=int, default=3, help="conjugator ball radius (default: 3)")
    p = add("witness-reduce", cmd_witness_reduce, "reduce Phi witnesses to single syllables")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("words", nargs="*", help="one word per witness; stdin lines if omitted")
    p = add("ball", cmd_ball, "list the ball of a given radius")
    p.add_argument("spec")
    p.add_argument("--radius", type=int, default=2, help="syllable radius (default: 2)")
    p.add_argument("--count", action="store_true", help="print only the number of elements")
    return parser


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "radius", 0) < 0:
            raise GraphProductError("radius must be >= 0")
        result = args.func(args)
    except GraphProductError as exc:
        stdout.write(_dump({"error": exc.code, "message": str(exc)}, args.pretty))
        return 1
    except OSError as exc:
        stdout.write(_dump({"error": "io", "message": str(exc)}, args.pretty))
        return 1
    stdout.write(result if isinstance(result, str) else _dump(result, args.pretty))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
