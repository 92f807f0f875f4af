"""Channel spec files and the built-in named channels.

A spec file is line oriented; ``#`` starts a comment::

    name bsc-0.11
    sizes 2 2
    inputs a b          # optional symbol labels
    outputs a b         # optional
    0.89 0.11
    0.11 0.89

The matrix rows follow the header, one row per input symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import channel as chan
from ..errors import FblkitError, SpecParseError
from ..channel import SUM_TOL, Channel


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    channel: Channel
    input_labels: tuple = None
    output_labels: tuple = None


_NAMED = {
    "bsc": lambda a: chan.bsc(float(a)),
    "bec": lambda a: chan.bec(float(a)),
    "zchannel": lambda a: chan.z_channel(float(a)),
    "identity": lambda a: chan.identity(int(a)),
}
_NAMED_RE = re.compile(r"^(bsc|bec|zchannel|identity):(\S+)$")


def _tokens(line):
    """(column, token) pairs with 1-based columns, comments stripped."""
    body = line.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]


def _number(tok, lineno, col, kind=float):
    try:
        v = kind(tok)
    except ValueError:
        raise SpecParseError(f"expected a {kind.__name__}, got {tok!r}", lineno, col) from None
    return v


def parse_spec(text: str) -> ChannelSpec:
    lines = [(i + 1, _tokens(raw)) for i, raw in enumerate(text.splitlines())]
    lines = [(i, t) for i, t in lines if t]
    if not lines:
        raise SpecParseError("empty spec")
    it = iter(lines)

    lineno, toks = next(it)
    if toks[0][1] != "name" or len(toks) != 2:
        raise SpecParseError("first line must be 'name <identifier>'", lineno, toks[0][0])
    name = toks[1][1]

    try:
        lineno, toks = next(it)
    except StopIteration:
        raise SpecParseError("missing 'sizes <inputs> <outputs>' line", lineno) from None
    if toks[0][1] != "sizes" or len(toks) != 3:
        raise SpecParseError("expected 'sizes <inputs> <outputs>'", lineno, toks[0][0])
    nx = _number(toks[1][1], lineno, toks[1][0], int)
    ny = _number(toks[2][1], lineno, toks[2][0], int)
    if nx < 2 or ny < 2:
        raise SpecParseError("alphabet sizes must be at least 2", lineno, toks[1][0])

    labels = {"inputs": None, "outputs": None}
    rows = []
    for lineno, toks in it:
        head = toks[0][1]
        if head in labels:
            if rows:
                raise SpecParseError(f"'{head}' must precede the matrix rows", lineno, toks[0][0])
            want = nx if head == "inputs" else ny
            if len(toks) - 1 != want:
                raise SpecParseError(f"expected {want} {head} labels, got {len(toks) - 1}",
                                     lineno, toks[0][0])
            labels[head] = tuple(t for _, t in toks[1:])
            continue
        if len(rows) == nx:
            raise SpecParseError(f"more than {nx} matrix rows", lineno, toks[0][0])
        if len(toks) != ny:
            raise SpecParseError(f"row has {len(toks)} entries, expected {ny}", lineno, toks[0][0])
        row = [_number(t, lineno, c) for c, t in toks]
        for (c, _), v in zip(toks, row):
            if v < 0:
                raise SpecParseError(f"NegativeEntryError: entry {v!r} < 0", lineno, c)
        if abs(sum(row) - 1.0) > SUM_TOL:
            raise SpecParseError(f"RowSumError: row sums to {sum(row)!r}", lineno, toks[0][0])
        rows.append(row)
    if len(rows) != nx:
        raise SpecParseError(f"expected {nx} matrix rows, found {len(rows)}", lineno)
    try:
        ch = chan.make_channel(np.array(rows), name=name)
    except FblkitError as exc:
        raise SpecParseError(f"{type(exc).__name__}: {exc}") from exc
    return ChannelSpec(name, ch, labels["inputs"], labels["outputs"])


def format_spec(spec: ChannelSpec) -> str:
    """Serialise a spec; floats use repr so parsing returns the same matrix."""
    ch = spec.channel
    out = [f"name {spec.name}", f"sizes {ch.input_size} {ch.output_size}"]
    if spec.input_labels:
        out.append("inputs " + " ".join(spec.input_labels))
    if spec.output_labels:
        out.append("outputs " + " ".join(spec.output_labels))
    for row in ch.transition:
        out.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def named_spec(text: str) -> ChannelSpec:
    m = _NAMED_RE.match(text)
    if not m:
        raise SpecParseError(f"unknown named channel {text!r}")
    family, arg = m.groups()
    try:
        ch = _NAMED[family](arg)
    except ValueError as exc:
        raise SpecParseError(f"bad parameter for {family}: {arg!r}") from exc
    name = ch.name or text
    if family == "bec":
        return ChannelSpec(name, ch, ("0", "1"), ("0", "1", "e"))
    return ChannelSpec(name, ch)


def load_spec(arg: str) -> ChannelSpec:
    """Resolve a named channel (``bsc:0.11``) or read a spec file."""
    if _NAMED_RE.match(arg):
        return named_spec(arg)
    path = Path(arg)
    if not path.is_file():
        raise SpecParseError(f"no such spec file or named channel: {arg!r}")
    return parse_spec(path.read_text())
