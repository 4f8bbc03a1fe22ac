"""Pattern regexps: regular expressions whose atoms may carry an output annotation.

A pattern like ``a(b|c)+d<A>`` reads input characters and emits the output
symbol ``A`` whenever the closing ``d`` of a match is consumed.  This module
holds the AST, the parser for the concrete syntax, and the brute-force
semantics every machine in this package is tested against: structural
language enumeration, the word-to-output-set behaviour map, and the
all-suffixes matching reference.
"""

from __future__ import annotations

from dataclasses import dataclass

#: Characters that cannot appear as plain input atoms.
RESERVED = frozenset("()|*+?<>")

# A unified symbol is an input character plus an optional output name.
USym = tuple[str, "str | None"]
UWord = tuple[USym, ...]

#: Word -> non-empty set of output names emitted on the word's last symbol.
BehaviourTable = dict[str, frozenset[str]]


class PatternSyntaxError(ValueError):
    """Raised on malformed pattern text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


@dataclass(frozen=True)
class Expr:
    """Base class for pattern-regexp AST nodes."""


@dataclass(frozen=True)
class Epsilon(Expr):
    pass


@dataclass(frozen=True)
class Atom(Expr):
    char: str
    out: str | None = None


@dataclass(frozen=True)
class Concat(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Union(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Star(Expr):
    body: Expr


def plus(e: Expr) -> Expr:
    """One-or-more, desugared: ``e+  ==  e e*``."""
    return Concat(e, Star(e))


def opt(e: Expr) -> Expr:
    """Zero-or-one, desugared: ``e?  ==  () | e``."""
    return Union(Epsilon(), e)


class _Parser:
    # Grammar (whitespace between tokens ignored):
    #   expr  := alt EOF
    #   alt   := cat ('|' cat)*
    #   cat   := rep+
    #   rep   := atom ('*' | '+' | '?')*
    #   atom  := CHAR annot? | '(' alt? ')'
    #   annot := '<' IDENT '>'
    # '|' is union, postfix '+'/'*'/'?' are repetition, '()' is the empty
    # word, juxtaposition is concatenation; precedence: postfix > concat
    # > union.  Annotations attach to the immediately preceding input
    # atom only, so '(...)<A>' is rejected.

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Expr:
        node = self._alt()
        self._skip_ws()
        if self.pos < len(self.text):
            raise PatternSyntaxError(
                f"unexpected {self.text[self.pos]!r}", self.pos)
        return node

    def _peek(self) -> str | None:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _alt(self) -> Expr:
        branches = [self._cat()]
        while self._peek() == "|":
            self.pos += 1
            branches.append(self._cat())
        node = branches[-1]
        for b in reversed(branches[:-1]):
            node = Union(b, node)
        return node

    def _cat(self) -> Expr:
        parts = [self._rep()]
        while True:
            c = self._peek()
            if c is None or c in ")|":
                break
            parts.append(self._rep())
        node = parts[-1]
        for p in reversed(parts[:-1]):
            node = Concat(p, node)
        return node

    def _rep(self) -> Expr:
        node = self._atom()
        while True:
            c = self._peek()
            if c == "*":
                node = Star(node)
            elif c == "+":
                node = plus(node)
            elif c == "?":
                node = opt(node)
            else:
                return node
            self.pos += 1

    def _atom(self) -> Expr:
        c = self._peek()
        if c is None:
            raise PatternSyntaxError("empty alternative", self.pos)
        if c == "(":
            self.pos += 1
            if self._peek() == ")":
                self.pos += 1
                node: Expr = Epsilon()
            else:
                node = self._alt()
                if self._peek() != ")":
                    raise PatternSyntaxError("unbalanced '('", self.pos)
                self.pos += 1
            if self._peek() == "<":
                raise PatternSyntaxError(
                    "annotation must follow an input symbol, not a group",
                    self.pos)
            return node
        if c == "<":
            raise PatternSyntaxError(
                "annotation not preceded by an input symbol", self.pos)
        if c in RESERVED:
            raise PatternSyntaxError(f"reserved character {c!r}", self.pos)
        if not c.isprintable():
            raise PatternSyntaxError(f"unprintable character {c!r}", self.pos)
        self.pos += 1
        out = None
        if self._peek() == "<":
            out = self._annot()
        return Atom(c, out)

    def _annot(self) -> str:
        # Errors anywhere inside '<IDENT>' report the offset of the '<'.
        start = self.pos
        self.pos += 1
        name = ""
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == ">":
                break
            if c.isalnum() or c == "_":
                name += c
                self.pos += 1
            else:
                raise PatternSyntaxError("malformed annotation", start)
        else:
            raise PatternSyntaxError("malformed annotation", start)
        if not name or name[0].isdigit():
            raise PatternSyntaxError("malformed annotation", start)
        self.pos += 1
        return name


def parse(text: str) -> Expr:
    """Parse pattern text into an :class:`Expr`.

    Raises :class:`PatternSyntaxError` with the offending offset on
    unbalanced parentheses, reserved characters used as atoms, dangling
    or malformed annotations, and empty alternatives other than ``()``.
    """
    if not text.strip():
        raise PatternSyntaxError("empty pattern", 0)
    return _Parser(text).parse()


def input_alphabet(e: Expr) -> tuple[str, ...]:
    """The sorted set of input characters appearing in ``e``."""
    chars: set[str] = set()
    _walk_atoms(e, lambda a: chars.add(a.char))
    return tuple(sorted(chars))


def output_alphabet(e: Expr) -> tuple[str, ...]:
    """The sorted set of output names appearing in ``e``."""
    names: set[str] = set()
    _walk_atoms(e, lambda a: names.add(a.out) if a.out is not None else None)
    return tuple(sorted(names))


def _walk_atoms(e: Expr, visit) -> None:
    if isinstance(e, Atom):
        visit(e)
    elif isinstance(e, (Concat, Union)):
        _walk_atoms(e.left, visit)
        _walk_atoms(e.right, visit)
    elif isinstance(e, Star):
        _walk_atoms(e.body, visit)


def enumerate_language(e: Expr, max_len: int) -> set[UWord]:
    """All words of ``e``'s language with at most ``max_len`` symbols.

    Computed structurally on the AST (no automaton): stars are unrolled
    only while the words produced still fit the length budget, with
    fixpoint detection so bodies that only contribute the empty word
    terminate.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    return _lang(e, max_len)


def _lang(e: Expr, budget: int) -> set[UWord]:
    if isinstance(e, Epsilon):
        return {()}
    if isinstance(e, Atom):
        return {((e.char, e.out),)} if budget >= 1 else set()
    if isinstance(e, Union):
        return _lang(e.left, budget) | _lang(e.right, budget)
    if isinstance(e, Concat):
        words = set()
        for x in _lang(e.left, budget):
            for y in _lang(e.right, budget - len(x)):
                words.add(x + y)
        return words
    if isinstance(e, Star):
        words: set[UWord] = {()}
        frontier: set[UWord] = {()}
        while frontier:
            grown: set[UWord] = set()
            for x in frontier:
                for y in _lang(e.body, budget - len(x)):
                    if y:
                        w = x + y
                        if w not in words:
                            words.add(w)
                            grown.add(w)
            frontier = grown
        return words
    raise TypeError(f"not an Expr node: {e!r}")


def behaviour_of(e: Expr, max_len: int) -> BehaviourTable:
    """Map each input word (length <= max_len) to the outputs emitted on
    its last symbol, keeping only words that emit something.

    An entry for the empty word would require a language word whose last
    symbol reads no input; no parsable pattern produces one.
    """
    table: dict[str, set[str]] = {}
    for u in enumerate_language(e, max_len):
        if not u:
            continue
        out = u[-1][1]
        if out is not None:
            word = "".join(ch for ch, _ in u)
            table.setdefault(word, set()).add(out)
    return {w: frozenset(s) for w, s in table.items()}


# ---------------------------------------------------------------------------
# Per-word matching, used by the all-suffixes oracle.  For a fixed word w we
# compute, per AST node, a substring-match table: row i is a bitmask whose
# bit j says the node matches w[i:j].  A second family of rows records, per
# output name, the substrings some parse finishes with that output on the
# last symbol.  Everything is O(|ast| * |w|^2) with tiny constants.
# ---------------------------------------------------------------------------

_Rows = "list[int]"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _nullable(e: Expr) -> bool:
    if isinstance(e, (Epsilon, Star)):
        return True
    if isinstance(e, Atom):
        return False
    if isinstance(e, Concat):
        return _nullable(e.left) and _nullable(e.right)
    if isinstance(e, Union):
        return _nullable(e.left) or _nullable(e.right)
    raise TypeError(f"not an Expr node: {e!r}")


def _tables(e: Expr, w: str, cache: dict) -> tuple[list[int], dict[str, list[int]]]:
    hit = cache.get(id(e))
    if hit is not None:
        return hit
    n = len(w)
    out: dict[str, list[int]]
    if isinstance(e, Epsilon):
        acc = [1 << i for i in range(n + 1)]
        out = {}
    elif isinstance(e, Atom):
        acc = [0] * (n + 1)
        for i in range(n):
            if w[i] == e.char:
                acc[i] = 1 << (i + 1)
        out = {e.out: list(acc)} if e.out is not None else {}
    elif isinstance(e, Union):
        lacc, lout = _tables(e.left, w, cache)
        racc, rout = _tables(e.right, w, cache)
        acc = [lacc[i] | racc[i] for i in range(n + 1)]
        out = {g: list(rows) for g, rows in lout.items()}
        for g, rows in rout.items():
            if g in out:
                out[g] = [out[g][i] | rows[i] for i in range(n + 1)]
            else:
                out[g] = list(rows)
    elif isinstance(e, Concat):
        lacc, lout = _tables(e.left, w, cache)
        racc, rout = _tables(e.right, w, cache)
        acc = []
        for i in range(n + 1):
            ends = 0
            for k in _bits(lacc[i]):
                ends |= racc[k]
            acc.append(ends)
        out = {}
        for g, rows in rout.items():
            combined = []
            for i in range(n + 1):
                ends = 0
                for k in _bits(lacc[i]):
                    ends |= rows[k]
                combined.append(ends)
            out[g] = combined
        if _nullable(e.right):
            for g, rows in lout.items():
                cur = out.setdefault(g, [0] * (n + 1))
                for i in range(n + 1):
                    cur[i] |= rows[i]
    elif isinstance(e, Star):
        bacc, bout = _tables(e.body, w, cache)
        acc = [0] * (n + 1)
        for i in range(n, -1, -1):
            reach = 1 << i
            for k in _bits(bacc[i] & ~(1 << i)):
                reach |= acc[k]
            acc[i] = reach
        out = {}
        for g, rows in bout.items():
            combined = []
            for i in range(n + 1):
                ends = 0
                for k in _bits(acc[i]):
                    ends |= rows[k]
                combined.append(ends)
            out[g] = combined
    else:
        raise TypeError(f"not an Expr node: {e!r}")
    cache[id(e)] = (acc, out)
    return acc, out


def word_outputs(e: Expr, word: str) -> frozenset[str]:
    """Outputs emitted on the last symbol of ``word`` when it matches ``e``.

    Empty when the word does not match or every matching parse leaves the
    last symbol unannotated.
    """
    n = len(word)
    if n == 0:
        return frozenset()
    _, out = _tables(e, word, {})
    return frozenset(g for g, rows in out.items() if (rows[0] >> n) & 1)


def complete_oracle(e: Expr, word: str) -> list[frozenset[str]]:
    """Reference for complete matching: one output set per input position.

    Position k (1-based) holds every output emitted by a match of ``e``
    ending exactly at k, i.e. by some suffix of the k-prefix of ``word``.
    This is what a machine that reports all matches, overlapping ones
    included, must emit while streaming ``word``.
    """
    sigma = set(input_alphabet(e))
    for idx, ch in enumerate(word):
        if ch not in sigma:
            raise ValueError(
                f"symbol {ch!r} at position {idx + 1} is outside the "
                f"pattern alphabet {''.join(sorted(sigma))!r}")
    n = len(word)
    _, out = _tables(e, word, {})
    masks = {g: 0 for g in out}
    for g, rows in out.items():
        total = 0
        for row in rows:
            total |= row
        masks[g] = total
    return [frozenset(g for g, m in masks.items() if (m >> k) & 1)
            for k in range(1, n + 1)]
