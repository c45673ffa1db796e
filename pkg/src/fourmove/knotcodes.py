"""Gauss codes of alternating knot diagrams and their involutive presentations.

Convention: positions are 1-based, odd positions are overcrossings and
even positions undercrossings. Each crossing label names the arc that
passes over it, so the three labels centred on an undercrossing are
(downstream arc, overstrand, upstream arc).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Sequence

from .fpgroup import Presentation, Word


class GaussCodeError(ValueError):
    """Raised for a malformed or non-alternating Gauss code."""


@dataclass(frozen=True)
class GaussCode:
    crossings: int
    sequence: tuple[int, ...]

    def __post_init__(self):
        _validate(self.crossings, self.sequence)

    def __str__(self) -> str:
        return ",".join(map(str, self.sequence))

    @classmethod
    def from_sequence(cls, seq: Sequence[int]) -> "GaussCode":
        seq = tuple(int(x) for x in seq)
        if len(seq) % 2:
            raise GaussCodeError(f"odd sequence length {len(seq)}")
        return cls(len(seq) // 2, seq)


def _validate(n: int, seq: Sequence[int]) -> None:
    if n < 1:
        raise GaussCodeError("a Gauss code needs at least one crossing")
    if len(seq) != 2 * n:
        raise GaussCodeError(f"expected {2 * n} labels for {n} crossings, got {len(seq)}")
    where = defaultdict(list)
    for pos, label in enumerate(seq, start=1):
        if not 1 <= label <= n:
            raise GaussCodeError(f"label {label} at position {pos} outside 1..{n}")
        where[label].append(pos)
    for label in range(1, n + 1):
        pos = where.get(label, [])
        if len(pos) != 2:
            shown = ",".join(map(str, pos)) or "none"
            raise GaussCodeError(
                f"label {label} occurs {len(pos)} times (positions {shown}); expected 2")
        if pos[0] % 2 == pos[1] % 2:
            parity = "odd" if pos[0] % 2 else "even"
            raise GaussCodeError(
                f"label {label} at positions {pos[0]} and {pos[1]} (both {parity}) "
                f"violates alternation")


def parse_gauss_code(text: str) -> GaussCode:
    """Parse one line of comma-separated labels.

    >>> parse_gauss_code("1,2,3,1,2,3")
    GaussCode(crossings=3, sequence=(1, 2, 3, 1, 2, 3))
    """
    text = text.strip()
    if not text:
        raise GaussCodeError("empty Gauss code")
    labels = []
    for pos, tok in enumerate(text.split(","), start=1):
        tok = tok.strip()
        if not tok.isdigit():
            raise GaussCodeError(f"malformed integer {tok!r} at position {pos}")
        labels.append(int(tok))
    return GaussCode.from_sequence(labels)


def wirtinger_relators(gc: GaussCode) -> list[Word]:
    """One length-4 relator per crossing, read around each undercrossing.

    >>> wirtinger_relators(parse_gauss_code("1,2,3,1,2,3"))
    [(1, 2, 3, 2), (3, 1, 2, 1), (2, 3, 1, 3)]
    """
    s = gc.sequence
    n = gc.crossings
    rels = []
    for j in range(1, n):
        down, over, up = s[2 * j - 2], s[2 * j - 1], s[2 * j]
        rels.append((down, over, up, over))
    rels.append((s[2 * n - 2], s[2 * n - 1], s[0], s[2 * n - 1]))
    return rels


def knot_presentation(gc: GaussCode) -> Presentation:
    """Squares of all arcs plus the crossing relators (signs discarded)."""
    return Presentation.involutive_group(gc.crossings, wirtinger_relators(gc))


def read_census(lines) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, text)`` for non-blank lines of a census file."""
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if line:
            yield lineno, line
