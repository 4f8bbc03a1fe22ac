"""Canonical JSON machine documents and Graphviz export.

Documents are byte-reproducible: fixed key order, sorted transition
lists, two-space indentation.  ``load(save(m))`` rebuilds the machine
with identical state numbering, and loading revalidates every structural
invariant.
"""

from __future__ import annotations

import json
from typing import Any

from rematch.determinize import Mealy, MealyTable
from rematch.fst import Fst

FORMAT_VERSION = 1

_EPS = "eps"


class DocumentError(ValueError):
    """Malformed machine document; ``path`` points at the offending node."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (at {path})")
        self.path = path


def save(m: Fst | Mealy) -> bytes:
    """Serialize to canonical JSON bytes; identical machines produce
    identical bytes."""
    if isinstance(m, Fst):
        doc = _fst_doc(m)
    elif isinstance(m, Mealy):
        doc = _mealy_doc(m)
    else:
        raise TypeError(f"cannot serialize {type(m).__name__}")
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _fst_doc(m: Fst) -> dict[str, Any]:
    rows = []
    for (src, ch), pairs in m.arcs.items():
        for out, dst in pairs:
            rows.append({
                "from": src,
                "input": _EPS if ch is None else ch,
                "outputs": [] if out is None else [out],
                "to": dst,
            })
    rows.sort(key=_row_key)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "fst",
        "input_alphabet": list(m.input_alphabet),
        "output_alphabet": list(m.output_alphabet),
        "states": m.state_count,
        "initial": sorted(m.initials),
        "finals": sorted(m.finals),
        "complete": False,
        "transitions": rows,
    }


def _mealy_doc(m: Mealy) -> dict[str, Any]:
    rows = [{
        "from": src,
        "input": ch,
        "outputs": sorted(outs),
        "to": dst,
    } for (src, ch), (dst, outs) in m.table.items()]
    rows.sort(key=_row_key)
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "kind": "mealy",
        "input_alphabet": list(m.input_alphabet),
        "output_alphabet": list(m.output_alphabet),
        "states": m.state_count,
        "initial": m.initial,
        "complete": m.is_complete,
        "transitions": rows,
    }
    if m.provenance is not None:
        doc["provenance"] = {
            str(state): sorted(subset)
            for state, subset in sorted(m.provenance.items())
        }
    return doc


def _row_key(row: dict[str, Any]) -> tuple:
    return row["from"], row["input"], row["to"], tuple(row["outputs"])


def load(data: bytes | str) -> Fst | Mealy:
    """Rebuild a machine from document bytes, revalidating determinism
    and alphabet coverage; errors carry the JSON path of the problem."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}", "$") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document must be an object", "$")
    version = _field(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version}",
                            "$.format_version")
    kind = _field(doc, "kind", str)
    if kind == "fst":
        return _load_fst(doc)
    if kind == "mealy":
        return _load_mealy(doc)
    raise DocumentError(f"unknown kind {kind!r}", "$.kind")


def _field(doc: dict, name: str, kind: type, path: str = "$") -> Any:
    if name not in doc:
        raise DocumentError(f"missing field {name!r}", f"{path}.{name}")
    value = doc[name]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise DocumentError(f"field {name!r} must be {kind.__name__}",
                            f"{path}.{name}")
    return value


def _char_list(doc: dict, name: str) -> list[str]:
    value = _field(doc, name, list)
    for i, item in enumerate(value):
        if not isinstance(item, str):
            raise DocumentError("alphabet entries must be strings",
                                f"$.{name}[{i}]")
    return value


def _rows(doc: dict) -> list[tuple[int, str, list[str], int, str]]:
    raw = _field(doc, "transitions", list)
    rows = []
    for i, row in enumerate(raw):
        path = f"$.transitions[{i}]"
        if not isinstance(row, dict):
            raise DocumentError("transition must be an object", path)
        src = _field(row, "from", int, path)
        ch = _field(row, "input", str, path)
        outs = _field(row, "outputs", list, path)
        dst = _field(row, "to", int, path)
        for j, out in enumerate(outs):
            if not isinstance(out, str):
                raise DocumentError("outputs must be strings",
                                    f"{path}.outputs[{j}]")
        rows.append((src, ch, outs, dst, path))
    return rows


def _load_fst(doc: dict) -> Fst:
    states = _field(doc, "states", int)
    initials = _field(doc, "initial", list)
    finals = _field(doc, "finals", list)
    arcs: dict[tuple[int, str | None], list[tuple[str | None, int]]] = {}
    for src, ch, outs, dst, path in _rows(doc):
        if len(outs) > 1:
            raise DocumentError("an fst transition emits at most one symbol",
                                f"{path}.outputs")
        key = (src, None if ch == _EPS else ch)
        arcs.setdefault(key, []).append((outs[0] if outs else None, dst))
    try:
        return Fst(
            state_count=states,
            input_alphabet=tuple(_char_list(doc, "input_alphabet")),
            output_alphabet=tuple(_char_list(doc, "output_alphabet")),
            arcs={key: tuple(pairs) for key, pairs in arcs.items()},
            initials=frozenset(initials),
            finals=frozenset(finals),
        )
    except ValueError as exc:
        raise DocumentError(str(exc), "$") from exc


def _load_mealy(doc: dict) -> Mealy:
    states = _field(doc, "states", int)
    initial = _field(doc, "initial", int)
    table: MealyTable = {}
    for src, ch, outs, dst, path in _rows(doc):
        if ch == _EPS:
            raise DocumentError("a mealy transition must read a symbol",
                                f"{path}.input")
        if (src, ch) in table:
            raise DocumentError(
                f"determinism violation: duplicate transition from state "
                f"{src} on {ch!r}", path)
        table[(src, ch)] = (dst, frozenset(outs))
    provenance = None
    if "provenance" in doc:
        raw = _field(doc, "provenance", dict)
        provenance = {}
        for key, subset in raw.items():
            path = f"$.provenance.{key}"
            if not key.isdigit():
                raise DocumentError("provenance keys are state numbers", path)
            if not isinstance(subset, list) or not all(
                    isinstance(s, int) for s in subset):
                raise DocumentError("provenance values are state lists", path)
            provenance[int(key)] = frozenset(subset)
    try:
        return Mealy(
            state_count=states,
            input_alphabet=tuple(_char_list(doc, "input_alphabet")),
            output_alphabet=tuple(_char_list(doc, "output_alphabet")),
            initial=initial,
            table=table,
            provenance=provenance,
        )
    except ValueError as exc:
        raise DocumentError(str(exc), "$") from exc


def to_dot(m: Fst | Mealy) -> str:
    """Graphviz rendering with a marker arrow into the initial state;
    output is stable across runs."""
    lines = ["digraph machine {", "  rankdir=LR;",
             '  __start [shape=point, label=""];']
    if isinstance(m, Fst):
        for s in range(m.state_count):
            shape = "doublecircle" if s in m.finals else "circle"
            lines.append(f'  {s} [shape={shape}, label="{s}"];')
        for i in sorted(m.initials):
            lines.append(f"  __start -> {i};")
        rows = []
        for (src, ch), pairs in m.arcs.items():
            for out, dst in pairs:
                sym = "ε" if ch is None else ch
                label = sym if out is None else f"{sym}/{out}"
                rows.append((src, sym, dst, label))
        for src, _, dst, label in sorted(rows):
            lines.append(f'  {src} -> {dst} [label="{label}"];')
    elif isinstance(m, Mealy):
        for s in range(m.state_count):
            lines.append(f'  {s} [shape=circle, label="{s}"];')
        lines.append(f"  __start -> {m.initial};")
        for (src, ch), (dst, outs) in sorted(m.table.items()):
            label = ch if not outs else f"{ch}/{{{','.join(sorted(outs))}}}"
            lines.append(f'  {src} -> {dst} [label="{label}"];')
    else:
        raise TypeError(f"cannot render {type(m).__name__}")
    lines.append("}")
    return "\n".join(lines) + "\n"
