"""Command line interface.

Exit status: 0 on success, 1 when a grammar or an input is rejected, 2 for
usage and I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from itertools import islice
from typing import Optional, Sequence, TextIO

from .analysis import analyse, conflicts, is_ll1
from .bench import measure, suite_input
from .grammar_io import FormatError, LoadedGrammar, emit_diagnostics, emit_tree, load_grammar, load_tokens, parse_tree
from .printing import MissingInverse, enumerate_sequences, pretty_print
from .simple import DEFAULT_DEPTH_LIMIT, DepthLimitExceeded, run_simple
from .syntax import Kind, Token
from .zippy import Parsed, TransformError, UnexpectedEnd, UnexpectedToken, focus

OK, REJECTED, USAGE = 0, 1, 2
SEED_ENV = "ZIPPARSE_SEED"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _kind_set(kinds) -> str:
    return "{" + ", ".join(k.name for k in sorted(kinds, key=lambda k: k.index)) + "}"


def _ordered(loaded: LoadedGrammar, kinds) -> str:
    rank = {k: i for i, k in enumerate(loaded.kinds)}
    return "{" + ", ".join(k.name for k in sorted(kinds, key=lambda k: rank.get(k, len(rank)))) + "}"


def _token(t: Token) -> str:
    return f"{t.kind.name} {json.dumps(t.value, ensure_ascii=False)}"


def _load(path: str) -> LoadedGrammar:
    try:
        return load_grammar(path)
    except OSError as e:
        raise _Fail(USAGE, f"cannot read grammar: {e}") from e
    except FormatError as e:
        raise _Fail(REJECTED, f"invalid grammar: {e}") from e


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    loaded = _load(args.grammar)
    result = analyse(loaded.env)
    out.write(emit_diagnostics(loaded, result))
    return OK if is_ll1(loaded.start) else REJECTED


def cmd_parse(args: argparse.Namespace, out: TextIO) -> int:
    loaded = _load(args.grammar)
    analyse(loaded.env)
    if not is_ll1(loaded.start):
        out.write("error: grammar is not LL(1)\n")
        out.write(emit_diagnostics(loaded))
        return REJECTED
    try:
        tokens = load_tokens(args.tokens, loaded.kinds)
    except OSError as e:
        raise _Fail(USAGE, f"cannot read tokens: {e}") from e
    except FormatError as e:
        raise _Fail(REJECTED, f"invalid tokens: {e}") from e
    try:
        if args.engine == "simple":
            result = run_simple(loaded.start, tokens, args.depth_limit)
        else:
            result = focus(loaded.start).parse(tokens)
    except DepthLimitExceeded as e:
        out.write(f"error: {e}\n")
        return REJECTED
    except TransformError as e:
        out.write(f"error: {e}\n")
        return REJECTED
    if isinstance(result, Parsed):
        out.write(emit_tree(result.value))
        return OK
    if isinstance(result, UnexpectedToken):
        out.write(f"error: unexpected token at index {result.position}: {_token(result.token)}\n")
    else:
        out.write(f"error: unexpected end of input after {len(tokens)} tokens\n")
    out.write(f"expected one of: {_ordered(loaded, result.expected)}\n")
    return REJECTED


def _line(kinds: Sequence[Kind]) -> str:
    return " ".join(k.name for k in kinds) if kinds else "<empty>"


def cmd_enumerate(args: argparse.Namespace, out: TextIO) -> int:
    loaded = _load(args.grammar)
    analyse(loaded.env)
    for ks in islice(enumerate_sequences(loaded.start, loaded.kinds, args.max_length), args.count):
        out.write(_line(ks) + "\n")
    return OK


def cmd_unparse(args: argparse.Namespace, out: TextIO) -> int:
    loaded = _load(args.grammar)
    try:
        with open(args.tree, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _Fail(USAGE, f"cannot read tree: {e}") from e
    try:
        tree = parse_tree(text, args.tree)
    except FormatError as e:
        raise _Fail(REJECTED, str(e)) from e
    stream = pretty_print(loaded.start, tree, args.max_length, loaded.env.samples, loaded.kinds)
    try:
        for ts in islice(stream, args.count):
            out.write((" ".join(str(t.value) for t in ts) if ts else "<empty>") + "\n")
    except MissingInverse as e:
        raise _Fail(REJECTED, str(e)) from e
    return OK


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of integers: {text!r}")
    if not sizes or any(n < 0 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be non-negative integers")
    return sizes


def cmd_bench(args: argparse.Namespace, out: TextIO) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise _Fail(USAGE, f"{SEED_ENV} must be an integer")
    engines = ["zippy", "simple"] if args.engine == "both" else [args.engine]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["suite", "size", "tokens", "engine", "run", "millis"])
    for size in args.sizes:
        s, tokens = suite_input(args.suite, size, seed)
        for engine in engines:
            m = measure(engine, s, tokens, args.reps, args.warmup, args.depth_limit)
            for i, ms in enumerate(m.millis, 1):
                writer.writerow([args.suite, size, m.tokens, engine, i, f"{ms:.3f}"])
            if m.millis:
                writer.writerow([args.suite, size, m.tokens, engine, "mean", f"{m.mean:.3f}"])
            if m.overflow is not None:
                writer.writerow([args.suite, size, m.tokens, engine, "overflow", ""])
            out.flush()
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zipparse", description="LL(1) parsing with derivatives and zippers.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="analyse a grammar file and print diagnostics")
    c.add_argument("grammar")
    c.set_defaults(run=cmd_check)

    c = sub.add_parser("parse", help="parse a token file and print the tree")
    c.add_argument("grammar")
    c.add_argument("tokens", help="one kind<TAB>lexeme per line")
    c.add_argument("--engine", choices=["zippy", "simple"], default="zippy")
    c.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT, help="recursion guard of the simple engine")
    c.set_defaults(run=cmd_parse)

    c = sub.add_parser("enumerate", help="print accepted kind sequences, shortest first")
    c.add_argument("grammar")
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--max-length", type=int, default=None, help="longest sequence to consider")
    c.set_defaults(run=cmd_enumerate)

    c = sub.add_parser("unparse", help="print token sequences that parse to a tree")
    c.add_argument("grammar")
    c.add_argument("tree", help="tree document as printed by parse")
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--max-length", type=int, default=64)
    c.set_defaults(run=cmd_unparse)

    c = sub.add_parser("bench", help="time both engines, CSV on stdout")
    c.add_argument("--suite", choices=["anbn", "json"], required=True)
    c.add_argument("--sizes", type=_sizes, default=[10_000, 20_000, 40_000], help="token counts, comma separated")
    c.add_argument("--engine", choices=["zippy", "simple", "both"], default="both")
    c.add_argument("--reps", type=int, default=5)
    c.add_argument("--warmup", type=int, default=1)
    c.add_argument("--seed", type=int, default=None, help=f"input seed (default ${SEED_ENV} or 0)")
    c.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT)
    c.set_defaults(run=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except _Fail as e:
        print(f"zipparse: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
