"""Words, finite presentations and the fourth-power relator families.

A word is a tuple of nonzero integers: ``i`` stands for the generator
``g_i`` and ``-i`` for its inverse (generators are numbered from 1).
Presentations carry per-generator involution flags; an involutive
generator is always accompanied by its square among the relators.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import chain, product
from typing import Iterable, Iterator, Sequence

import numpy as np

Word = tuple[int, ...]


@dataclass(frozen=True)
class Presentation:
    """A finite presentation ``<g_1..g_n | relators>``."""

    ngens: int
    relators: tuple[Word, ...]
    involutive: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        if self.ngens < 0:
            raise ValueError("ngens must be non-negative")
        inv = tuple(bool(x) for x in self.involutive) or (False,) * self.ngens
        if len(inv) != self.ngens:
            raise ValueError(
                f"involutive has {len(inv)} flags for {self.ngens} generators")
        rels = tuple(tuple(int(x) for x in r) for r in self.relators)
        for idx, r in enumerate(rels):
            for x in r:
                if x == 0 or abs(x) > self.ngens:
                    raise ValueError(
                        f"relator {idx} uses letter {x} outside 1..{self.ngens}")
        object.__setattr__(self, "involutive", inv)
        object.__setattr__(self, "relators", rels)
        squares = {abs(r[0]) for r in rels if len(r) == 2 and r[0] == r[1]}
        for i, flag in enumerate(inv, start=1):
            if flag and i not in squares:
                raise ValueError(f"generator {i} is flagged involutive but "
                                 f"its square is not a relator")

    @classmethod
    def involutive_group(cls, ngens: int, relators: Iterable[Sequence[int]] = ()):
        """All generators involutive; squares are prepended automatically."""
        squares = [(i, i) for i in range(1, ngens + 1)]
        return cls(ngens, tuple(squares) + tuple(tuple(r) for r in relators),
                   (True,) * ngens)

    def with_relators(self, extra: Iterable[Word]) -> "Presentation":
        return Presentation(self.ngens, self.relators + tuple(extra), self.involutive)

    @property
    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)


def _normalize_letter(x: int, involutive: Sequence[bool]) -> int:
    return abs(x) if involutive[abs(x) - 1] else x


@lru_cache(maxsize=64)
def _letter_tables(involutive: tuple[bool, ...]) -> tuple[dict[int, int], dict[int, int]]:
    """Maps from a letter to its normalized form and to its normalized inverse."""
    norm, inv = {}, {}
    for g, flag in enumerate(involutive, 1):
        for x in (g, -g):
            norm[x] = g if flag else x
            inv[x] = g if flag else -x
    return norm, inv


def inverse(w: Sequence[int], p: Presentation | None = None) -> Word:
    """Formal inverse; involutive letters stay positive."""
    if p is None:
        return tuple(-x for x in reversed(w))
    inv = _letter_tables(tuple(p.involutive))[1]
    return tuple([inv[x] for x in reversed(w)])


def free_reduce(w: Sequence[int], p: Presentation) -> Word:
    """Cancel adjacent inverse pairs, and ``x x`` for involutive ``x``.

    Inverse letters of involutive generators are normalized to the
    positive letter before cancelling.

    >>> p = Presentation.involutive_group(2)
    >>> free_reduce((1, 1, 2), p)
    (2,)
    """
    norm, inv = _letter_tables(tuple(p.involutive))
    out: list[int] = []
    for x in w:
        x = norm[x]
        if out and out[-1] == inv[x]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w: Sequence[int], p: Presentation) -> Word:
    w = free_reduce(w, p)
    i, j = 0, len(w)
    inv = _letter_tables(tuple(p.involutive))[1]
    while j - i >= 2 and w[i] == inv[w[j - 1]]:
        i += 1
        j -= 1
    return w[i:j]


def letter_rank(x: int) -> int:
    # g1 < g1^-1 < g2 < g2^-1 < ...
    return 2 * (abs(x) - 1) + (x < 0)


def shortlex_key(w: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    return len(w), tuple(letter_rank(x) for x in w)


def relator_canonical_form(w: Sequence[int], p: Presentation) -> Word:
    """Shortlex-least rotation of ``w`` or of its inverse.

    Two relators with equal canonical forms are the same cyclic word up
    to inversion, hence define the same normal closure.
    """
    w = tuple(w)
    if not w:
        return w
    n = len(w)
    best = None
    for v in (w, inverse(w, p)):
        ranks = [2 * x - 2 if x > 0 else -2 * x - 1 for x in v]
        lo = min(ranks)
        doubled = ranks + ranks
        # rotations share a length, so only those opening with the least letter compete
        for i in range(n):
            if ranks[i] == lo:
                key = tuple(doubled[i:i + n])
                if best is None or key < best[0]:
                    best = (key, v[i:] + v[:i])
    return best[1]


def conjugator_words(n: int, k: int) -> Iterator[Word]:
    """Positive words of length <= k with no two adjacent equal letters.

    Yields in shortlex order, starting with the empty word.

    >>> list(conjugator_words(2, 2))
    [(), (1,), (2,), (1, 2), (2, 1)]
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    level: list[Word] = [()]
    yield ()
    for _ in range(k):
        nxt = []
        for w in level:
            for x in range(1, n + 1):
                if not w or w[-1] != x:
                    nxt.append(w + (x,))
        if not nxt:
            return
        yield from nxt
        level = nxt


def fourth_power_relator(a: int, w: Sequence[int], b: int) -> Word:
    """The word ``(a w b w^-1)^4`` over positive letters."""
    return (a, *w, b, *reversed(w)) * 4


def _add_deduplicated(p: Presentation, extra: Iterable[tuple[Word, int]]) -> Presentation:
    """Append ``extra`` relators, given with their period, skipping cyclic repeats."""
    seen = {relator_canonical_form(cyclic_reduce(r, p), p) for r in p.relators}
    rels = list(p.relators)
    for r, period in extra:
        if len(cyclic_reduce(r[:period] * 2, p)) == 2 * period:
            # u^m with u cyclically reduced: canonical form is canon(u)^m
            key = relator_canonical_form(r[:period], p) * (len(r) // period)
        else:
            r = cyclic_reduce(r, p)
            if not r:
                continue
            key = relator_canonical_form(r, p)
        if key not in seen:
            seen.add(key)
            rels.append(r)
    return Presentation(p.ngens, tuple(rels), p.involutive)


def _fourth_power_family(n: int, k: int, diagonal: bool) -> Iterator[tuple[Word, int]]:
    for w in conjugator_words(n, k):
        for a, b in product(range(1, n + 1), repeat=2):
            if a == b and (not w or not diagonal):
                continue
            yield fourth_power_relator(a, w, b), 2 * len(w) + 2


def build_Gk(base: Presentation, k: int, diagonal: bool = True) -> Presentation:
    """Layer the relators ``(a w b w^-1)^4`` with ``|w| <= k`` onto a knot base.

    Pairs with ``a == b`` are skipped for the empty conjugator (``a^8``
    follows from ``a^2``); with ``diagonal=False`` they are skipped for
    every conjugator.
    """
    if not all(base.involutive):
        raise ValueError("base presentation must be involutive")
    return _add_deduplicated(base, _fourth_power_family(base.ngens, k, diagonal))


def build_Gnk(n: int, k: int) -> Presentation:
    """``G_{n,k}``: n involutions with all ``(a_i w a_j w^-1)^4``, ``|w| <= k``.

    ``build_Gnk(2, 0)`` is the dihedral group of order 8.
    """
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    return _add_deduplicated(Presentation.involutive_group(n),
                             _fourth_power_family(n, k, True))


def exponent_matrix(p: Presentation) -> np.ndarray:
    letters = np.fromiter(chain.from_iterable(p.relators), dtype=np.int64)
    rows = np.repeat(np.arange(len(p.relators)), [len(r) for r in p.relators])
    m = np.zeros((len(p.relators), p.ngens), dtype=np.int64)
    np.add.at(m, (rows, np.abs(letters) - 1), np.sign(letters))
    return m


_INT64_SAFE = 1 << 30


class _Overflow(Exception):
    pass


def _snf_int64(a: np.ndarray) -> list[int]:
    """Vectorized elimination on a shrinking int64 block.

    Raises _Overflow once entries get large enough that a product could
    wrap, so the caller can redo the work over Python integers.
    """
    diag = []
    while a.size:
        a = a[np.any(a != 0, axis=1)]
        if not len(a):
            break
        nz = np.abs(a).astype(float)
        nz[nz == 0] = np.inf
        i, j = np.unravel_index(np.argmin(nz), nz.shape)
        a[[0, i]] = a[[i, 0]]
        a[:, [0, j]] = a[:, [j, 0]]
        while True:
            piv = a[0, 0]
            a[1:] -= (a[1:, 0] // piv)[:, None] * a[0]
            a[:, 1:] -= a[:, :1] * (a[0, 1:] // piv)[None, :]
            if np.abs(a).max() > _INT64_SAFE:
                raise _Overflow
            col, row = a[1:, 0], a[0, 1:]
            if not col.any() and not row.any():
                bad = np.nonzero(np.any(a[1:, 1:] % piv, axis=1))[0]
                if not len(bad):
                    break
                a[0] += a[bad[0] + 1]
                continue
            # move the smallest remaining entry of the row/column to the pivot
            big = np.iinfo(np.int64).max
            ci = np.argmin(np.where(col != 0, np.abs(col), big)) if len(col) else 0
            rj = np.argmin(np.where(row != 0, np.abs(row), big)) if len(row) else 0
            if len(col) and col[ci] and (not row.any() or abs(col[ci]) <= abs(row[rj])):
                a[[0, ci + 1]] = a[[ci + 1, 0]]
            else:
                a[:, [0, rj + 1]] = a[:, [rj + 1, 0]]
        diag.append(int(abs(a[0, 0])))
        a = a[1:, 1:]
    return diag


def smith_normal_form(rows: Sequence[Sequence[int]] | np.ndarray, ncols: int) -> list[int]:
    """Diagonal of the Smith normal form, as a divisibility chain.

    Zero rows and duplicate rows are dropped up front since neither
    changes the diagonal. Returns the nonzero diagonal entries (absolute
    values, ascending in divisibility).
    """
    if isinstance(rows, np.ndarray) and rows.dtype == np.int64 and rows.size:
        if np.abs(rows).max() <= _INT64_SAFE:
            try:
                return _snf_int64(rows.reshape(-1, ncols).copy())
            except _Overflow:
                pass
        rows = rows.tolist()
    uniq = {tuple(int(v) for v in r) for r in rows}
    if uniq and ncols and max(abs(v) for r in uniq for v in r) <= _INT64_SAFE:
        try:
            return _snf_int64(np.array(sorted(uniq), dtype=np.int64).reshape(len(uniq), ncols))
        except _Overflow:
            pass
    a = [list(r) for r in uniq if any(r)]
    diag = []
    col_start = 0
    while a and col_start < ncols:
        # pivot: smallest nonzero absolute entry
        best = None
        for i, r in enumerate(a):
            for j in range(col_start, ncols):
                v = r[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        a[0], a[pi] = a[pi], a[0]
        for r in a:
            r[col_start], r[pj] = r[pj], r[col_start]
        while True:
            piv = a[0][col_start]
            dirty = False
            # clear column
            for r in a[1:]:
                q = r[col_start] // piv
                if q:
                    for j in range(col_start, ncols):
                        r[j] -= q * a[0][j]
                if r[col_start]:
                    dirty = True
            # clear row
            for j in range(col_start + 1, ncols):
                q = a[0][j] // piv
                if q:
                    for r in a:
                        r[j] -= q * r[col_start]
                if a[0][j]:
                    dirty = True
            if not dirty:
                # pivot must divide the rest for the chain property
                bad = next(((i, j) for i, r in enumerate(a[1:], 1)
                            for j in range(col_start + 1, ncols)
                            if r[j] % piv), None)
                if bad is None:
                    break
                i = bad[0]
                for j in range(col_start, ncols):
                    a[0][j] += a[i][j]
                continue
            # move the smallest remaining entry of the row/column to the pivot
            cands = [(abs(r[col_start]), i, col_start)
                     for i, r in enumerate(a) if r[col_start]]
            cands += [(abs(a[0][j]), 0, j)
                      for j in range(col_start, ncols) if a[0][j]]
            _, i, j = min(cands)
            a[0], a[i] = a[i], a[0]
            for r in a:
                r[col_start], r[j] = r[j], r[col_start]
        diag.append(abs(a[0][col_start]))
        col_start += 1
        # elimination tends to make rows coincide; keep one of each
        rest = {tuple(r[col_start:]) for r in a[1:]}
        a = [[0] * col_start + list(r) for r in rest if any(r)]
    return diag


def abelianization_invariants(p: Presentation) -> list[int]:
    """Invariant factors of the abelianized group; ``0`` marks a free factor.

    >>> abelianization_invariants(Presentation.involutive_group(1))
    [2]
    >>> abelianization_invariants(Presentation(2, ()))
    [0, 0]
    """
    diag = smith_normal_form(exponent_matrix(p), p.ngens)
    torsion = [d for d in diag if d != 1]
    return torsion + [0] * (p.ngens - len(diag))


# Plain-text serialization: header line, then one relator per line.

_HEADER = re.compile(r"^\s*gens:\s*(\d+)\s*;\s*involutive:\s*([01]*)\s*$")
_LETTER = re.compile(r"^g(\d+)(\^-1)?$")


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "*".join(f"g{abs(x)}" + ("^-1" if x < 0 else "") for x in w)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in re.split(r"[\s*]+", text):
        m = _LETTER.match(tok)
        if not m:
            raise ValueError(f"bad letter {tok!r}")
        i = int(m.group(1))
        if i < 1:
            raise ValueError(f"bad generator index in {tok!r}")
        out.append(-i if m.group(2) else i)
    return tuple(out)


def format_presentation(p: Presentation) -> str:
    bits = "".join("1" if f else "0" for f in p.involutive)
    lines = [f"gens: {p.ngens}; involutive: {bits}"]
    lines += [format_word(r) for r in p.relators]
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty presentation file")
    m = _HEADER.match(lines[0])
    if not m:
        raise ValueError(f"bad header line {lines[0]!r}")
    n = int(m.group(1))
    bits = m.group(2)
    if bits and len(bits) != n:
        raise ValueError(f"involutive bitstring has {len(bits)} flags, expected {n}")
    flags = tuple(c == "1" for c in bits) if bits else (False,) * n
    rels = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            rels.append(parse_word(ln))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return Presentation(n, tuple(rels), flags)
