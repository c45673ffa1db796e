"""Shortlex Knuth-Bendix completion for finitely presented groups.

Words are encoded internally as ``bytes``: each signed letter becomes one
byte valued by its rank in the ordering, so that byte-string comparison is
the lexicographic part of shortlex. The default
ranking is ``g1 < g1^-1 < g2 < g2^-1 < ...``.
"""
from __future__ import annotations

import heapq
import os
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from ._kb_kernels import reduce_many, reduce_word
from .fpgroup import Presentation, Word

@dataclass(frozen=True)
class ShortlexOrder:
    """Shortlex order given by a ranking of the signed letters (lowest first)."""

    ranking: tuple[int, ...]

    @classmethod
    def default(cls, ngens: int) -> "ShortlexOrder":
        return cls(tuple(x for i in range(1, ngens + 1) for x in (i, -i)))

    def __post_init__(self):
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError("ranking repeats a letter")
        n = len(self.ranking) // 2
        if sorted(abs(x) for x in self.ranking) != sorted(list(range(1, n + 1)) * 2):
            raise ValueError("ranking must list every generator and its inverse once")

    def key(self, w: Sequence[int]):
        pos = {x: i for i, x in enumerate(self.ranking)}
        return len(w), tuple(pos[x] for x in w)

    def less(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return self.key(u) < self.key(v)


@dataclass(frozen=True)
class KbLimits:
    max_rules: int = 200_000
    max_seconds: float | None = 300.0
    max_rule_length: int | None = None
    # consecutive new rules without an interreduction deletion
    no_progress: int | None = 10_000

    def __post_init__(self):
        if self.max_rules < 1:
            raise ValueError("max_rules must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "KbLimits":
        env = os.environ.get("FOURMOVE_KB_SECONDS")
        kw = {"max_seconds": float(env)} if env else {}
        kw.update(overrides)
        return cls(**kw)


class _Codec:
    """Signed letters <-> one byte per letter, valued by rank in the ordering."""

    def __init__(self, p: Presentation, order: ShortlexOrder):
        if len(order.ranking) > 256:
            raise ValueError("at most 128 generators are supported")
        self.involutive = p.involutive
        self.nletters = len(order.ranking)
        self.code = {x: i for i, x in enumerate(order.ranking)}
        self.letter = dict(enumerate(order.ranking))

    def encode(self, w: Iterable[int]) -> bytes:
        return bytes(self.code[x] for x in w)

    def decode(self, s: bytes) -> Word:
        return tuple(self.letter[c] for c in s)


class _Index:
    """Rules plus the indexes used for rewriting and overlap search.

    Rewriting uses a trie of reversed left-hand sides held in numpy arrays
    so the inner loop runs compiled. Removing a rule only unmarks its trie
    node; the trie is rebuilt once dead nodes outnumber live ones.
    """

    def __init__(self, nletters: int):
        self.nletters = nletters
        self.rules: dict[bytes, bytes] = {}
        self.pre = defaultdict(set)   # proper prefix -> lhs
        self.suf = defaultdict(set)   # proper suffix -> lhs
        self.by_len = defaultdict(set)
        self._reset_arrays(256, 256, 4096)

    def _reset_arrays(self, nodes: int, ids: int, buf: int) -> None:
        self.child = np.full((nodes, self.nletters), -1, dtype=np.int32)
        self.term = np.full(nodes, -1, dtype=np.int32)
        self.nnodes = 1
        self.ids: dict[bytes, int] = {}
        self.node_of: dict[bytes, int] = {}
        self.lhs_of: list[bytes | None] = []
        self.rhs_off = np.zeros(ids, dtype=np.int64)
        self.rhs_len = np.zeros(ids, dtype=np.int64)
        self.rhs_buf = np.zeros(buf, dtype=np.uint8)
        self.buf_used = 0
        self.dead_nodes = 0

    def _store_rhs(self, rid: int, rhs: bytes) -> None:
        need = self.buf_used + len(rhs)
        if need > self.rhs_buf.shape[0]:
            grown = np.zeros(max(2 * self.rhs_buf.shape[0], need), dtype=np.uint8)
            grown[:self.buf_used] = self.rhs_buf[:self.buf_used]
            self.rhs_buf = grown
        self.rhs_buf[self.buf_used:need] = np.frombuffer(rhs, dtype=np.uint8)
        self.rhs_off[rid] = self.buf_used
        self.rhs_len[rid] = len(rhs)
        self.buf_used = need

    def _insert(self, lhs: bytes, rhs: bytes) -> None:
        rid = len(self.lhs_of)
        if rid >= self.rhs_off.shape[0]:
            self.rhs_off = np.concatenate([self.rhs_off, np.zeros_like(self.rhs_off)])
            self.rhs_len = np.concatenate([self.rhs_len, np.zeros_like(self.rhs_len)])
        self.lhs_of.append(lhs)
        self.ids[lhs] = rid
        self._store_rhs(rid, rhs)
        node = 0
        child = self.child
        for c in reversed(lhs):
            nxt = child[node, c]
            if nxt < 0:
                if self.nnodes >= child.shape[0]:
                    grown = np.full((2 * child.shape[0], self.nletters), -1, dtype=np.int32)
                    grown[:child.shape[0]] = child
                    self.child = child = grown
                    self.term = np.concatenate([self.term, np.full_like(self.term, -1)])
                nxt = self.nnodes
                self.nnodes += 1
                child[node, c] = nxt
            node = nxt
        self.term[node] = rid
        self.node_of[lhs] = node

    def _rebuild(self) -> None:
        self._reset_arrays(max(256, 2 * self.nnodes - 2 * self.dead_nodes),
                           max(256, 2 * len(self.rules)), max(4096, 2 * self.buf_used))
        for lhs, rhs in self.rules.items():
            self._insert(lhs, rhs)

    def add(self, lhs: bytes, rhs: bytes) -> None:
        self.rules[lhs] = rhs
        self._insert(lhs, rhs)
        for i in range(1, len(lhs)):
            self.pre[lhs[:i]].add(lhs)
            self.suf[lhs[i:]].add(lhs)
        self.by_len[len(lhs)].add(lhs)

    def set_rhs(self, lhs: bytes, rhs: bytes) -> None:
        self.rules[lhs] = rhs
        self._store_rhs(self.ids[lhs], rhs)

    def remove(self, lhs: bytes) -> bytes:
        rhs = self.rules.pop(lhs)
        rid = self.ids.pop(lhs)
        self.lhs_of[rid] = None
        self.term[self.node_of.pop(lhs)] = -1
        self.dead_nodes += len(lhs)
        for i in range(1, len(lhs)):
            for idx, key in ((self.pre, lhs[:i]), (self.suf, lhs[i:])):
                s = idx[key]
                s.discard(lhs)
                if not s:
                    del idx[key]
        self.by_len[len(lhs)].discard(lhs)
        if self.dead_nodes > self.nnodes:
            self._rebuild()
        return rhs

    def reduce(self, s: bytes, skip: bytes | None = None) -> bytes:
        if not s:
            return s
        sid = -1 if skip is None else self.ids.get(skip, -1)
        out = reduce_word(np.frombuffer(s, dtype=np.uint8), self.child, self.term,
                          self.rhs_buf, self.rhs_off, self.rhs_len, sid)
        return out.tobytes()

    def reduce_all(self, words: Sequence[bytes]) -> list[bytes]:
        if not words:
            return []
        offs = np.zeros(len(words) + 1, dtype=np.int64)
        np.cumsum([len(w) for w in words], out=offs[1:])
        flat = np.frombuffer(b"".join(words), dtype=np.uint8)
        if not flat.size:
            return [b""] * len(words)
        out, out_offs = reduce_many(flat, offs, self.child, self.term,
                                    self.rhs_buf, self.rhs_off, self.rhs_len)
        data = out.tobytes()
        bounds = out_offs.tolist()
        return [data[bounds[i]:bounds[i + 1]] for i in range(len(words))]

    def reduce_traced(self, s: bytes, trace: list) -> bytes:
        """Same as :meth:`reduce`, recording ``(position, lhs, rhs)`` steps."""
        child, term = self.child, self.term
        out: list[int] = []
        todo = list(reversed(s))
        while todo:
            out.append(todo.pop())
            node = 0
            i = len(out) - 1
            while i >= 0:
                node = child[node, out[i]]
                if node < 0:
                    break
                rid = term[node]
                if rid >= 0:
                    lhs = self.lhs_of[rid]
                    rhs = self.rules[lhs]
                    trace.append((len(out) - len(lhs), lhs, rhs))
                    del out[i:]
                    todo.extend(reversed(rhs))
                    break
                i -= 1
        return bytes(out)


@dataclass
class RewriteSystem:
    """A set of shortlex-decreasing rules over signed generator letters."""

    ngens: int
    order: ShortlexOrder
    rules: list[tuple[Word, Word]]
    confluent: bool
    involutive: tuple[bool, ...] = ()
    _index: _Index = field(default=None, repr=False, compare=False)
    _codec: _Codec = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.involutive:
            self.involutive = (False,) * self.ngens
        if self._codec is None:
            self._codec = _Codec(Presentation(self.ngens, (), ()), self.order)
        if self._index is None:
            self._index = _Index(2 * self.ngens)
            for lhs, rhs in self.rules:
                self._index.add(self._codec.encode(lhs), self._codec.encode(rhs))

    def __len__(self) -> int:
        return len(self.rules)

    def reduce(self, w: Sequence[int]) -> Word:
        return self._codec.decode(self._index.reduce(self._codec.encode(w)))

    def reduce_with_trace(self, w: Sequence[int]):
        """Reduce ``w`` and return ``(normal_form, steps)``.

        Each step is ``(position, lhs, rhs)``: the subword ``lhs`` starting
        at ``position`` of the current word was replaced by ``rhs``.
        """
        steps: list = []
        s = self._index.reduce_traced(self._codec.encode(w), steps)
        dec = self._codec.decode
        return dec(s), [(pos, dec(l), dec(r)) for pos, l, r in steps]

    def count_irreducible(self):
        """Number of irreducible words, or ``None`` when there are infinitely many."""
        return count_irreducible(self)


@dataclass
class Completion:
    """Outcome of :func:`complete`.

    ``status`` is "confluent" or the reason the run stopped: "timeout",
    "max_rules", "no_progress", "max_rule_length" or "stopped" (the
    ``stop_when`` callback fired).
    """

    status: str
    system: RewriteSystem
    stats: dict = field(default_factory=dict)

    @property
    def confluent(self) -> bool:
        return self.status == "confluent"


def initial_equations(p: Presentation, codec: _Codec) -> list[tuple[bytes, bytes]]:
    eqs = []
    for i in range(1, p.ngens + 1):
        if p.involutive[i - 1]:
            eqs.append((codec.encode((-i,)), codec.encode((i,))))
            eqs.append((codec.encode((i, i)), b""))
        else:
            eqs.append((codec.encode((i, -i)), b""))
            eqs.append((codec.encode((-i, i)), b""))
    for r in p.relators:
        r = [abs(x) if p.involutive[abs(x) - 1] else x for x in r]
        if not r:
            continue
        # r = u v  <=>  u = v^-1; split near the middle
        h = (len(r) + 1) // 2
        u = r[:h]
        v_inv = [abs(x) if p.involutive[abs(x) - 1] else -x for x in reversed(r[h:])]
        eqs.append((codec.encode(u), codec.encode(v_inv)))
    return eqs


# above this many rules, interreduction is deferred to batched sweeps
_EAGER_LIMIT = 4000


class _Completer:
    def __init__(self, p: Presentation, order: ShortlexOrder, limits: KbLimits,
                 stop_when: Callable | None):
        self.p = p
        self.order = order
        self.limits = limits
        self.codec = _Codec(p, order)
        self.idx = _Index(self.codec.nletters)
        self.heap: list = []
        self.processed: set[bytes] = set()
        self.stop_when = stop_when
        self.since_deletion = 0
        self.dropped = False
        self.n_added = 0
        self.n_deleted = 0
        self.n_pairs = 0
        self.unswept = 0
        self.deadline = (None if limits.max_seconds is None
                         else time.monotonic() + limits.max_seconds)

    # -- rules ----------------------------------------------------------
    def add_equations(self, eqs: list[tuple[bytes, bytes]]) -> None:
        idx = self.idx
        pending = list(eqs)
        while pending:
            u, v = pending.pop()
            u = idx.reduce(u)
            v = idx.reduce(v)
            if u == v:
                continue
            if (len(u), u) < (len(v), v):
                u, v = v, u
            if self.limits.max_rule_length is not None and len(u) > self.limits.max_rule_length:
                self.dropped = True
                continue
            # interreduce: longer lhs containing u are now redundant. A linear
            # scan per rule is quadratic overall, so large systems wait for tidy()
            if len(idx.rules) < _EAGER_LIMIT:
                victims = [lhs for n, group in idx.by_len.items() if n > len(u)
                           for lhs in group if u in lhs]
            else:
                victims = []
                self.unswept += 1
            idx.add(u, v)
            heapq.heappush(self.heap, (len(u), u))
            self.n_added += 1
            self.since_deletion += 1
            for lhs in victims:
                rhs = idx.remove(lhs)
                self.processed.discard(lhs)
                pending.append((lhs, rhs))
                self.n_deleted += 1
                self.since_deletion = 0

    def overlaps(self, lhs: bytes):
        """Critical pairs of ``lhs`` with itself and every processed rule."""
        idx = self.idx
        rules = idx.rules
        rhs = rules[lhs]
        out = []
        n = len(lhs)
        for i in range(1, n):
            s = lhs[i:]
            for other in idx.pre.get(s, ()):
                if other in self.processed or other == lhs:
                    tail = other[n - i:]
                    out.append((lhs + tail, rhs + tail, lhs[:i] + rules[other]))
            s = lhs[:i]
            for other in idx.suf.get(s, ()):
                if other in self.processed and other != lhs:
                    head = other[:len(other) - i]
                    out.append((head + lhs, rules[other] + lhs[i:], head + rhs))
        out.sort(key=lambda t: (len(t[0]), t[0]))
        return out

    def tidy(self) -> None:
        """Full interreduction: drop reducible lhs, normalize every rhs."""
        idx = self.idx
        self.unswept = 0
        while True:
            lhss = list(idx.rules)
            # another lhs inside ``lhs`` must lie in its longest proper prefix or suffix
            red = idx.reduce_all([l[:-1] for l in lhss] + [l[1:] for l in lhss])
            m = len(lhss)
            victims = [l for j, l in enumerate(lhss)
                       if red[j] != l[:-1] or red[m + j] != l[1:]]
            if not victims:
                break
            eqs = []
            for lhs in victims:
                eqs.append((lhs, idx.remove(lhs)))
                self.processed.discard(lhs)
                self.n_deleted += 1
                self.since_deletion = 0
            self.add_equations(eqs)
        lhss = list(idx.rules)
        for lhs, new in zip(lhss, idx.reduce_all([idx.rules[l] for l in lhss])):
            if new != idx.rules[lhs]:
                idx.set_rhs(lhs, new)

    def unresolved_pairs(self) -> list[tuple[bytes, bytes]]:
        """Exhaustive critical-pair check over the current rule set."""
        idx = self.idx
        sides = []
        for lhs, rhs in idx.rules.items():
            n = len(lhs)
            for i in range(1, n):
                for other in idx.pre.get(lhs[i:], ()):
                    tail = other[n - i:]
                    sides.append(rhs + tail)
                    sides.append(lhs[:i] + idx.rules[other])
        red = idx.reduce_all(sides)
        return [(red[j], red[j + 1]) for j in range(0, len(red), 2) if red[j] != red[j + 1]]

    # -- driver ----------------------------------------------------------
    def sweep_every(self) -> int:
        n = max(1000, len(self.idx.rules) // 8)
        if self.limits.no_progress is not None:
            # sweep often enough that deferred deletions still reset the count
            n = min(n, max(1, self.limits.no_progress // 4))
        return n

    def limit_hit(self) -> str | None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            return "timeout"
        if len(self.idx.rules) > self.limits.max_rules:
            return "max_rules"
        if self.limits.no_progress is not None and self.since_deletion > self.limits.no_progress:
            return "no_progress"
        return None

    def run(self) -> str:
        self.add_equations(initial_equations(self.p, self.codec))
        if self.unswept:
            self.tidy()
        while True:
            while self.heap:
                _, lhs = heapq.heappop(self.heap)
                if lhs not in self.idx.rules or lhs in self.processed:
                    continue
                self.processed.add(lhs)
                pairs = self.overlaps(lhs)
                self.n_pairs += len(pairs)
                sides = self.idx.reduce_all([x for _, a, b in pairs for x in (a, b)])
                for j in range(0, len(sides), 2):
                    if sides[j] != sides[j + 1]:
                        self.add_equations([(sides[j], sides[j + 1])])
                        if lhs not in self.idx.rules:
                            break
                if self.unswept >= self.sweep_every():
                    self.tidy()
                reason = self.limit_hit()
                if reason:
                    return reason
                if self.stop_when is not None and self.stop_when(self):
                    return "stopped"
            self.tidy()
            if self.heap and any(l in self.idx.rules and l not in self.processed
                                 for _, l in self.heap):
                continue
            if self.dropped:
                return "max_rule_length"
            bad = self.unresolved_pairs()
            if not bad:
                return "confluent"
            self.add_equations(bad)

    def system(self, confluent: bool) -> RewriteSystem:
        dec = self.codec.decode
        rules = sorted(self.idx.rules.items(), key=lambda t: (len(t[0]), t[0]))
        rs = RewriteSystem(self.p.ngens, self.order,
                           [(dec(l), dec(r)) for l, r in rules], confluent,
                           self.p.involutive, _index=self.idx, _codec=self.codec)
        return rs


def complete(p: Presentation, order: ShortlexOrder | None = None,
             limits: KbLimits | None = None,
             stop_when: Callable | None = None) -> Completion:
    """Run Knuth-Bendix completion on ``p``.

    Rules are processed shortest-lhs first; each rule's critical pairs with
    itself and all earlier rules are resolved in shortlex order of the
    overlap word, and every new rule immediately deletes the rules whose
    lhs it divides. A run only reports "confluent" after an exhaustive
    critical-pair check of the final, fully interreduced system.
    """
    order = order or ShortlexOrder.default(p.ngens)
    if len(order.ranking) != 2 * p.ngens:
        raise ValueError("ordering does not match the number of generators")
    limits = limits or KbLimits()
    c = _Completer(p, order, limits, stop_when)
    t0 = time.monotonic()
    status = c.run()
    if status != "confluent":
        # make the partial system internally consistent for callers
        for lhs in list(c.idx.rules):
            rhs = c.idx.rules[lhs]
            c.idx.set_rhs(lhs, c.idx.reduce(rhs))
    stats = {"rules": len(c.idx.rules), "added": c.n_added, "deleted": c.n_deleted,
             "pairs": c.n_pairs, "seconds": time.monotonic() - t0}
    return Completion(status, c.system(status == "confluent"), stats)


def reduce(rs: RewriteSystem, w: Sequence[int]) -> Word:
    return rs.reduce(w)


def count_irreducible(rs: RewriteSystem):
    """Count words containing no lhs, via the Aho-Corasick automaton of the lhs.

    Returns the count, or ``None`` if the automaton of irreducible words has
    a reachable cycle (infinitely many irreducible words).
    """
    lhss = [rs._codec.encode(l) for l, _ in rs.rules]
    alphabet = range(rs._codec.nletters)
    # trie
    goto: list[dict] = [{}]
    dead = [False]
    for s in lhss:
        node = 0
        for c in s:
            nxt = goto[node].get(c)
            if nxt is None:
                nxt = len(goto)
                goto.append({})
                dead.append(False)
                goto[node][c] = nxt
            node = nxt
        dead[node] = True
    # failure links, BFS
    fail = [0] * len(goto)
    order = []
    queue = [0]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        order.append(u)
        for c, v in goto[u].items():
            if u == 0:
                fail[v] = 0
            else:
                f = fail[u]
                while f and c not in goto[f]:
                    f = fail[f]
                fail[v] = goto[f].get(c, 0) if goto[f].get(c, 0) != v else 0
            dead[v] = dead[v] or dead[fail[v]]
            queue.append(v)

    def step(u: int, c: int) -> int:
        while u and c not in goto[u]:
            u = fail[u]
        return goto[u].get(c, 0)

    # live transition graph; iterative DFS for cycle detection + path counts
    n = len(goto)
    trans: list[list[int] | None] = [None] * n
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * n
    count = [0] * n
    stack = [(0, 0)]
    colour[0] = GREY
    trans[0] = [v for v in (step(0, c) for c in alphabet) if not dead[v]]
    while stack:
        u, i = stack[-1]
        succ = trans[u]
        if i < len(succ):
            stack[-1] = (u, i + 1)
            v = succ[i]
            if colour[v] == GREY:
                return None
            if colour[v] == WHITE:
                colour[v] = GREY
                trans[v] = [x for x in (step(v, c) for c in alphabet) if not dead[x]]
                stack.append((v, 0))
        else:
            count[u] = 1 + sum(count[v] for v in succ)
            colour[u] = BLACK
            stack.pop()
    return count[0]


def is_consequence(p: Presentation, w: Sequence[int], order: ShortlexOrder | None = None,
                   limits: KbLimits | None = None, check_every: int = 1):
    """Decide whether ``w`` is trivial in the group presented by ``p``.

    Returns ``(verdict, trace, completion)`` where ``verdict`` is True, False
    or None (undecided within limits). True is reported as soon as the
    current, possibly incomplete, system rewrites ``w`` to the empty word;
    every rule is a consequence of the relators, so this is sound at any
    time. False needs a confluent system.
    """
    order = order or ShortlexOrder.default(p.ngens)
    probe = [0]

    def hit(c: _Completer) -> bool:
        probe[0] += 1
        if probe[0] % check_every:
            return False
        return c.idx.reduce(c.codec.encode(w)) == b""

    comp = complete(p, order, limits, stop_when=hit)
    nf, trace = comp.system.reduce_with_trace(w)
    if not nf:
        return True, trace, comp
    if comp.confluent:
        return False, trace, comp
    return None, trace, comp
