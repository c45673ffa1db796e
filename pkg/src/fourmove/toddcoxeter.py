"""Todd-Coxeter coset enumeration.

Two strategies are available: ``"hlt"`` (relator-based definitions with a
lookahead pass when the table fills up) and ``"felsch"`` (fill the first
hole, then close all deductions). Coset 0 is the subgroup coset; cosets
are numbered in order of definition and renumbered compactly after every
lookahead and at the end.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _tc_kernels as K
from .fpgroup import Presentation, Word

DEFAULT_MAX_COSETS = 10_000_000
_INITIAL_ROWS = 1024
_STACK_ROWS = 1 << 16
# a lookahead that frees less than this fraction of the table means overflow
_MIN_RECOVERY = 0.01


@dataclass(frozen=True)
class TcLimits:
    max_cosets: int = DEFAULT_MAX_COSETS
    max_seconds: float | None = None

    def __post_init__(self):
        if self.max_cosets < 1:
            raise ValueError("max_cosets must be >= 1")

    @classmethod
    def from_env(cls, **overrides) -> "TcLimits":
        env = os.environ.get("FOURMOVE_MAX_COSETS")
        kw = {"max_cosets": int(env)} if env else {}
        kw.update(overrides)
        return cls(**kw)


class _Columns:
    """Maps signed letters to table columns."""

    def __init__(self, p: Presentation):
        self.col = {}
        inv = []
        for i in range(1, p.ngens + 1):
            c = len(inv)
            if p.involutive[i - 1]:
                self.col[i] = self.col[-i] = c
                inv.append(c)
            else:
                self.col[i], self.col[-i] = c, c + 1
                inv += [c + 1, c]
        self.inv = np.asarray(inv, dtype=np.int64)
        self.ncols = len(inv)
        self.letters = [None] * self.ncols
        for x, c in sorted(self.col.items(), key=lambda t: -t[0]):
            self.letters[c] = x

    def encode(self, w: Sequence[int]) -> list[int]:
        return [self.col[x] for x in w]


def _flatten(words: Sequence[Sequence[int]]):
    offs = np.zeros(len(words) + 1, dtype=np.int64)
    for i, w in enumerate(words):
        offs[i + 1] = offs[i] + len(w)
    flat = np.fromiter((x for w in words for x in w), dtype=np.int64, count=int(offs[-1]))
    return flat, offs


@dataclass
class CosetTable:
    """A complete coset table: ``action[c, col]`` is the image of coset c.

    ``columns`` maps each signed generator letter to its column; an
    involutive generator's letters share one column.
    """

    action: np.ndarray
    columns: dict[int, int]

    @property
    def ncosets(self) -> int:
        return self.action.shape[0]

    def apply(self, coset: int, w: Sequence[int]) -> int:
        for x in w:
            coset = int(self.action[coset, self.columns[x]])
        return coset

    def trace_all(self, w: Sequence[int]) -> np.ndarray:
        """Image of every coset under ``w`` (vectorized)."""
        cur = np.arange(self.ncosets)
        for x in w:
            cur = self.action[cur, self.columns[x]]
        return cur


@dataclass
class Enumeration:
    """Outcome of an enumeration: ``status`` is "index", "overflow" or "timeout"."""

    status: str
    index: int | None = None
    table: CosetTable | None = None
    stats: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.status == "index"

    def __str__(self) -> str:
        if self.status == "index":
            return f"INDEX = {self.index}"
        return self.status.upper()


def _relator_conjugates(words: Sequence[Sequence[int]], inv: np.ndarray, ncols: int):
    """All rotations of all relators and their inverses, grouped by first column."""
    by_col: list[list[tuple]] = [[] for _ in range(ncols)]
    seen = set()
    for w in words:
        winv = [int(inv[x]) for x in reversed(w)]
        for v in (list(w), winv):
            for i in range(len(v)):
                rot = tuple(v[i:] + v[:i])
                if rot not in seen:
                    seen.add(rot)
                    by_col[rot[0]].append(rot)
    flat_words = [w for col in by_col for w in col]
    cbycol = np.zeros(ncols + 1, dtype=np.int64)
    for x in range(ncols):
        cbycol[x + 1] = cbycol[x] + len(by_col[x])
    cwords, coffs = _flatten(flat_words)
    return cwords, coffs, cbycol


def enumerate_cosets(p: Presentation, subgroup: Sequence[Word] = (),
                     limits: TcLimits | None = None, strategy: str = "hlt",
                     chunk: int = 4096) -> Enumeration:
    """Enumerate the cosets of ``<subgroup>`` in the group presented by ``p``.

    When the result has status "index" the table is complete and the index
    is exact. "overflow" means the live coset count hit
    ``limits.max_cosets`` and a lookahead could not free enough room.
    """
    limits = limits or TcLimits()
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    for w in subgroup:
        for x in w:
            if x == 0 or abs(x) > p.ngens:
                raise ValueError(f"subgroup letter {x} outside 1..{p.ngens}")
    cols = _Columns(p)
    inv = cols.inv
    ncols = cols.ncols
    if ncols == 0:
        table = CosetTable(np.zeros((1, 0), dtype=np.int64), {})
        return Enumeration("index", 1, table, {"defined": 1, "peak": 1})

    # squares of involutive generators hold automatically in a single column
    rel_words = [cols.encode(r) for r in p.relators
                 if not (len(r) == 2 and r[0] == r[1] and p.involutive[abs(r[0]) - 1])]
    rel_words = [w for w in rel_words if w]
    rels, roffs = _flatten(rel_words)
    sub, soffs = _flatten([cols.encode(w) for w in subgroup if w])
    if strategy == "felsch":
        cwords, coffs, cbycol = _relator_conjugates(rel_words, inv, ncols)

    cap = min(_INITIAL_ROWS, limits.max_cosets)
    table = np.full((cap, ncols), -1, dtype=np.int32)
    parent = np.arange(cap, dtype=np.int32)
    queue = np.zeros(cap, dtype=np.int32)
    stack = np.zeros((_STACK_ROWS, 2), dtype=np.int64)
    st = np.zeros(8, dtype=np.int64)
    st[0] = st[1] = st[5] = st[6] = 1
    deadline = None if limits.max_seconds is None else time.monotonic() + limits.max_seconds
    lookaheads = 0

    def make_room() -> bool:
        nonlocal table, parent, queue, cap, lookaheads
        if cap < limits.max_cosets:
            new_cap = min(2 * cap, limits.max_cosets)
            grown = np.full((new_cap, ncols), -1, dtype=np.int32)
            grown[:cap] = table
            table = grown
            parent = np.concatenate([parent, np.arange(cap, new_cap, dtype=np.int32)])
            queue = np.zeros(new_cap, dtype=np.int32)
            cap = new_cap
            return True
        if strategy == "hlt":
            lookaheads += 1
            K.lookahead(table, parent, queue, inv, stack, st, rels, roffs)
        K.compact(table, parent, st)
        free = cap - int(st[0])
        return free >= max(1, int(_MIN_RECOVERY * cap))

    def stats() -> dict:
        return {"defined": int(st[5]), "peak": int(st[6]),
                "lookaheads": lookaheads, "strategy": strategy}

    # subgroup generators first
    while True:
        res = K.scan_words(table, parent, queue, inv, stack, st, 0, sub, soffs, True)
        if res != K.NEED_SPACE:
            break
        if not make_room():
            return Enumeration("overflow", stats=stats())
    st[3] = 0 if strategy == "hlt" else st[3]

    while True:
        if strategy == "hlt":
            res = K.hlt(table, parent, queue, inv, stack, st, rels, roffs, chunk)
        else:
            res = K.felsch(table, parent, queue, inv, stack, st, cwords, coffs,
                           cbycol, chunk)
        if res == K.DONE:
            break
        if res == K.NEED_SPACE and not make_room():
            return Enumeration("overflow", stats=stats())
        if deadline is not None and time.monotonic() > deadline:
            return Enumeration("timeout", stats=stats())

    K.compact(table, parent, st)
    n = int(st[0])
    action = table[:n].copy()
    ct = CosetTable(action, dict(cols.col))
    bad = check_table(ct, p, subgroup)
    if bad:
        raise RuntimeError(f"coset table failed verification: {bad}")
    return Enumeration("index", n, ct, stats())


def order(p: Presentation, limits: TcLimits | None = None,
          strategy: str = "hlt") -> Enumeration:
    """Order of the presented group: enumerate cosets of the trivial subgroup."""
    return enumerate_cosets(p, (), limits, strategy)


def check_table(ct: CosetTable, p: Presentation, subgroup: Sequence[Word] = ()) -> list[str]:
    """Post-hoc validation of a complete table; returns a list of problems."""
    problems = []
    a = ct.action
    n = ct.ncosets
    if n and (a.min() < 0 or a.max() >= n):
        problems.append("table is not total")
        return problems
    ident = np.arange(n)
    for x, c in ct.columns.items():
        back = ct.columns[-x]
        if not np.array_equal(a[a[:, c], back], ident):
            problems.append(f"columns for letter {x} are not mutually inverse")
    for i, r in enumerate(p.relators):
        if not np.array_equal(ct.trace_all(r), ident):
            problems.append(f"relator {i} does not close at every coset")
    for i, w in enumerate(subgroup):
        if n and ct.apply(0, w) != 0:
            problems.append(f"subgroup generator {i} does not fix coset 0")
    return problems
