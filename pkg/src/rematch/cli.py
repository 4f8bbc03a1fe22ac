"""Command-line surface: compile patterns to machine documents, stream
input through them, render them, and cross-check them against the
brute-force semantics."""

from __future__ import annotations

import argparse
import itertools
import os
import random
import sys
import time
from typing import Sequence

from rematch.determinize import (
    Mealy,
    OutputBeforeInput,
    machine_output,
    subset_t,
    subset_tc,
)
from rematch.formats import DocumentError, load, save, to_dot
from rematch.fst import thompson
from rematch.minimize import min_comp, trim_sink
from rematch.regexp import (
    PatternSyntaxError,
    behaviour_of,
    complete_oracle,
    parse,
)
from rematch.runtime import Session, Stuck, UnknownSymbol, format_event, run_stream

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_STUCK = 2
EXIT_UNKNOWN_SYMBOL = 3
EXIT_USAGE = 64
EXIT_FILE = 66
EXIT_INTERNAL = 70

SEED_ENV = "REMATCH_SEED"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="rematch",
        description="Compile annotated regexps to Mealy machines that "
                    "report every match in a single pass.")
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compile", help="compile a pattern to a machine")
    comp.add_argument("-e", "--expr", required=True, help="pattern text")
    comp.add_argument("--mode", choices=("exact", "complete"), required=True,
                      help="exact instances only, or every match including "
                           "overlapping ones")
    comp.add_argument("--no-minimize", action="store_true",
                      help="keep the raw subset-construction machine")
    comp.add_argument("--trim-sink", action="store_true",
                      help="drop the absorbing no-output state, if any")
    comp.add_argument("-o", "--output", help="document file (default stdout)")

    run = sub.add_parser("run", help="stream input through a machine")
    run.add_argument("-m", "--machine", required=True, help="machine document")
    run.add_argument("input", nargs="?", default="-",
                     help="input file, or - for stdin")
    run.add_argument("--keep-newlines", action="store_true",
                     help="feed CR/LF bytes to the machine instead of "
                          "skipping them")

    dot = sub.add_parser("dot", help="render a machine document as Graphviz")
    dot.add_argument("-m", "--machine", required=True)

    oracle = sub.add_parser(
        "oracle-check",
        help="compare the compiled machines against brute-force semantics")
    oracle.add_argument("-e", "--expr", required=True)
    oracle.add_argument("--max-len", type=int, required=True,
                        help="exhaustively check all words up to this length")
    oracle.add_argument("--words", type=int, default=0,
                        help="additionally check this many random longer words")
    oracle.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default ${SEED_ENV} or 0)")

    bench = sub.add_parser("bench", help="measure streaming throughput")
    bench.add_argument("-m", "--machine", required=True)
    bench.add_argument("--bytes", type=int, required=True, dest="count",
                       help="number of pseudorandom symbols to stream")
    bench.add_argument("--seed", type=int, default=None,
                       help=f"random seed (default ${SEED_ENV} or 0)")
    return parser


def _seed_value(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def _load_mealy(path: str) -> Mealy:
    with open(path, "rb") as fh:
        machine = load(fh.read())
    if not isinstance(machine, Mealy):
        raise DocumentError("this command needs a mealy document", "$.kind")
    return machine


def _cmd_compile(args) -> int:
    expr = parse(args.expr)
    fst = thompson(expr)
    print(f"fst: {fst.state_count} states", file=sys.stderr)
    if args.mode == "exact":
        machine = subset_t(fst)
    else:
        machine = subset_tc(fst)
    print(f"{args.mode} machine: {machine.state_count} states",
          file=sys.stderr)
    if not args.no_minimize:
        machine = min_comp(machine)
        print(f"minimized: {machine.state_count} states", file=sys.stderr)
    if args.trim_sink:
        machine = trim_sink(machine)
        print(f"trimmed: {machine.state_count} states", file=sys.stderr)
    data = save(machine)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def _cmd_run(args) -> int:
    machine = _load_mealy(args.machine)
    if args.input == "-":
        source = sys.stdin.buffer
        close = False
    else:
        source = open(args.input, "rb")
        close = True
    try:
        for event in run_stream(machine, source,
                                skip_newlines=not args.keep_newlines):
            print(format_event(event))
    except Stuck as exc:
        print(f"stuck: {exc}", file=sys.stderr)
        return EXIT_STUCK
    except UnknownSymbol as exc:
        print(f"unknown symbol: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_SYMBOL
    finally:
        if close:
            source.close()
    return EXIT_OK


def _cmd_dot(args) -> int:
    with open(args.machine, "rb") as fh:
        machine = load(fh.read())
    sys.stdout.write(to_dot(machine))
    return EXIT_OK


def _machine_events(machine: Mealy, word: str) -> list[frozenset[str]]:
    session = Session(machine)
    emitted = []
    for ch in word:
        event = session.step(ch)
        emitted.append(event.outputs if event else frozenset())
    return emitted


def _cmd_oracle_check(args) -> int:
    expr = parse(args.expr)
    fst = thompson(expr)
    exact = subset_t(fst)
    want = behaviour_of(expr, args.max_len)
    got = machine_output(exact, args.max_len)
    if want != got:
        word = sorted(set(want) ^ set(got) | {
            w for w in want if got.get(w) != want[w]})[0]
        print(f"behaviour mismatch on {word!r}: "
              f"oracle {sorted(want.get(word, ()))} != "
              f"machine {sorted(got.get(word, ()))}")
        return EXIT_MISMATCH

    complete = min_comp(subset_tc(fst))
    sigma = complete.input_alphabet
    words = ["".join(p)
             for n in range(args.max_len + 1)
             for p in itertools.product(sigma, repeat=n)]
    if args.words and sigma:
        rng = random.Random(_seed_value(args.seed))
        for _ in range(args.words):
            length = rng.randint(args.max_len + 1, 3 * args.max_len + 1)
            words.append("".join(rng.choice(sigma) for _ in range(length)))
    for word in words:
        expected = complete_oracle(expr, word)
        actual = _machine_events(complete, word)
        if expected != actual:
            k = next(i for i, (a, b) in enumerate(zip(expected, actual))
                     if a != b)
            print(f"complete-matching mismatch on {word!r} at position "
                  f"{k + 1}: oracle {sorted(expected[k])} != "
                  f"machine {sorted(actual[k])}")
            return EXIT_MISMATCH
    print(f"ok: {len(want)} behaviour entries and {len(words)} streamed "
          f"words agree")
    return EXIT_OK


def _cmd_bench(args) -> int:
    machine = _load_mealy(args.machine)
    if not machine.input_alphabet:
        print("machine has an empty alphabet", file=sys.stderr)
        return EXIT_FILE
    rng = random.Random(_seed_value(args.seed))
    symbols = rng.choices(machine.input_alphabet, k=args.count)
    session = Session(machine)
    started = time.perf_counter()
    step = session.step
    try:
        for ch in symbols:
            step(ch)
    except Stuck as exc:
        print(f"stuck: {exc}", file=sys.stderr)
        return EXIT_STUCK
    elapsed = time.perf_counter() - started
    if session.lookup_count != args.count:
        print(f"lookup count {session.lookup_count} != symbols processed "
              f"{args.count}", file=sys.stderr)
        return EXIT_INTERNAL
    rate = args.count / elapsed if elapsed > 0 else float("inf")
    print(f"{args.count} symbols in {elapsed:.3f}s ({rate:,.0f} symbols/s), "
          f"lookups={session.lookup_count}")
    return EXIT_OK


_COMMANDS = {
    "compile": _cmd_compile,
    "run": _cmd_run,
    "dot": _cmd_dot,
    "oracle-check": _cmd_oracle_check,
    "bench": _cmd_bench,
}


def cli(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PatternSyntaxError as exc:
        print(f"pattern error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputBeforeInput as exc:
        print(f"cannot determinize: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        print(f"document error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
