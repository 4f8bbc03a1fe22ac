"""Stream input through a Mealy machine, one table lookup per symbol.

A session holds nothing but the machine, the current state and two
counters, so memory stays constant however long the stream runs.  Events
carry the 1-based position, the symbol read and the non-empty output set
emitted on reading it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterator

from rematch.determinize import Mealy


class UnknownSymbol(ValueError):
    """Input symbol outside the machine's alphabet; the session did not move."""

    def __init__(self, symbol: str, position: int):
        super().__init__(
            f"symbol {symbol!r} at position {position} is outside the "
            f"machine alphabet")
        self.symbol = symbol
        self.position = position


class Stuck(RuntimeError):
    """No transition for the symbol read: an exact-matching (partial)
    machine cannot consume arbitrary streams; the session did not move."""

    def __init__(self, state: int, symbol: str, position: int):
        super().__init__(
            f"no transition from state {state} on {symbol!r} at "
            f"position {position}")
        self.state = state
        self.symbol = symbol
        self.position = position


@dataclass(frozen=True)
class MatchEvent:
    position: int
    symbol: str
    outputs: frozenset[str]

    def __post_init__(self):
        if not self.outputs:
            raise ValueError("an event always carries at least one output")


def format_event(event: MatchEvent) -> str:
    """The one-per-line text form: position, symbol, sorted outputs."""
    return f"{event.position}\t{event.symbol}\t{','.join(sorted(event.outputs))}"


class Session:
    """A single run over one machine; machines may be shared between
    sessions, a session itself must not be."""

    __slots__ = ("machine", "current", "position", "lookup_count", "_alphabet")

    def __init__(self, machine: Mealy):
        self.machine = machine
        self.current = machine.initial
        self.position = 0
        self.lookup_count = 0
        self._alphabet = frozenset(machine.input_alphabet)

    def step(self, symbol: str) -> MatchEvent | None:
        """Consume one symbol with exactly one table lookup; returns an
        event when the transition taken emits something."""
        if symbol not in self._alphabet:
            raise UnknownSymbol(symbol, self.position + 1)
        entry = self.machine.table.get((self.current, symbol))
        if entry is None:
            raise Stuck(self.current, symbol, self.position + 1)
        self.lookup_count += 1
        self.current, outputs = entry
        self.position += 1
        if outputs:
            return MatchEvent(self.position, symbol, outputs)
        return None


def start(m: Mealy) -> Session:
    """Fresh session at the machine's initial state, position 0."""
    return Session(m)


def run_stream(m: Mealy, source: BinaryIO, *,
               skip_newlines: bool = True,
               chunk_size: int = 65536) -> Iterator[MatchEvent]:
    """Yield the events of streaming ``source`` through ``m``.

    One byte is one symbol; line breaks are skipped by default so plain
    text fixtures feed through unchanged.  Bytes are read once, in
    order, with no lookahead; memory use does not grow with the stream.
    """
    session = Session(m)
    skip = b"\r\n" if skip_newlines else b""
    while True:
        try:
            chunk = source.read(chunk_size)
        except OSError as exc:
            raise OSError(
                f"read failed after {session.position} symbols: {exc}"
            ) from exc
        if not chunk:
            return
        for byte in chunk:
            if byte in skip:
                continue
            event = session.step(chr(byte))
            if event is not None:
                yield event
