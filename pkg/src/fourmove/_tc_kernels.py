"""Numba kernels for coset enumeration.

Table layout: ``table[coset, column]`` with -1 for undefined entries.
Involutive generators own one self-inverse column, the others two.
``p`` is the union-find parent array (``p[c] == c`` for live cosets).

Scalar state lives in the int64 array ``st``:

    st[0] cosets allocated (next new coset number)
    st[1] live cosets
    st[2] resume pointer (HLT: coset being processed, Felsch: fill pointer)
    st[3] deduction stack top
    st[4] deduction stack overflowed (0/1)
    st[5] total cosets defined
    st[6] peak live cosets

Kernels return DONE, PAUSED or NEED_SPACE. NEED_SPACE is only ever raised
before a definition, with no coincidence processing in flight, so the
caller can grow or compact the table and simply call again.
"""
import numpy as np
from numba import njit

DONE = 0
PAUSED = 1
NEED_SPACE = 2


@njit(cache=True, inline="always")
def _rep(p, c):
    r = c
    while p[r] != r:
        r = p[r]
    while p[c] != r:
        nxt = p[c]
        p[c] = r
        c = nxt
    return r


@njit(cache=True, inline="always")
def _push(stack, st, c, x):
    top = st[3]
    if top < stack.shape[0]:
        stack[top, 0] = c
        stack[top, 1] = x
        st[3] = top + 1
    else:
        st[4] = 1


@njit(cache=True, inline="always")
def _merge(p, queue, qt, a, b, st):
    ra = _rep(p, a)
    rb = _rep(p, b)
    if ra == rb:
        return qt
    if ra > rb:
        ra, rb = rb, ra
    p[rb] = ra
    queue[qt] = rb
    st[1] -= 1
    return qt + 1


@njit(cache=True)
def _coincidence(table, p, queue, inv, stack, st, a, b):
    ncols = table.shape[1]
    qt = _merge(p, queue, 0, a, b, st)
    qh = 0
    while qh < qt:
        g = queue[qh]
        qh += 1
        for x in range(ncols):
            d = table[g, x]
            if d < 0:
                continue
            xi = inv[x]
            table[g, x] = -1
            if table[d, xi] == g:
                table[d, xi] = -1
            mu = _rep(p, g)
            nu = _rep(p, d)
            if table[mu, x] >= 0:
                qt = _merge(p, queue, qt, nu, table[mu, x], st)
            elif table[nu, xi] >= 0:
                qt = _merge(p, queue, qt, mu, table[nu, xi], st)
            else:
                table[mu, x] = nu
                table[nu, xi] = mu
                _push(stack, st, mu, x)


@njit(cache=True, inline="always")
def _define(table, p, inv, stack, st, c, x):
    d = st[0]
    st[0] = d + 1
    st[1] += 1
    st[5] += 1
    if st[1] > st[6]:
        st[6] = st[1]
    p[d] = d
    table[c, x] = d
    table[d, inv[x]] = c
    _push(stack, st, c, x)
    return d


@njit(cache=True, inline="always")
def _trace(table, inv, alpha, word, lo, hi):
    """Trace ``word[lo:hi]`` forwards from ``alpha`` and backwards to it.

    Returns ``(i, j, f, b)``: the forward scan reached ``f`` before
    ``word[i]``, the backward scan reached ``b`` after ``word[j]``.
    ``i > j`` means the relator closed (consistently iff ``f == b``),
    ``i == j`` means one entry is deducible, ``i < j`` leaves a gap.
    """
    i = lo
    j = hi - 1
    f = alpha
    b = alpha
    while i <= j and table[f, word[i]] >= 0:
        f = table[f, word[i]]
        i += 1
    while j >= i and table[b, inv[word[j]]] >= 0:
        b = table[b, inv[word[j]]]
        j -= 1
    return i, j, f, b


@njit(cache=True)
def _resolve(table, p, queue, inv, stack, st, word, i, j, f, b):
    """Act on a trace that closed inconsistently or left a single gap."""
    if i > j:
        _coincidence(table, p, queue, inv, stack, st, f, b)
    else:
        x = word[i]
        table[f, x] = b
        table[b, inv[x]] = f
        _push(stack, st, f, x)


@njit(cache=True)
def _fill(table, p, queue, inv, stack, st, word, i, j, f, b):
    """Define cosets to close the gap ``word[i..j]`` between ``f`` and ``b``."""
    cap = table.shape[0]
    while True:
        if st[0] >= cap:
            return NEED_SPACE
        f = _define(table, p, inv, stack, st, f, word[i])
        i += 1
        while i <= j and table[f, word[i]] >= 0:
            f = table[f, word[i]]
            i += 1
        while j >= i and table[b, inv[word[j]]] >= 0:
            b = table[b, inv[word[j]]]
            j -= 1
        if i > j:
            if f != b:
                _coincidence(table, p, queue, inv, stack, st, f, b)
            return DONE
        if i == j:
            _resolve(table, p, queue, inv, stack, st, word, i, j, f, b)
            return DONE


# The scanning loops below call _trace directly and only drop into the
# heavier helpers on the rare interesting outcomes. Passing all the table
# arrays through a call for every scan made lookahead about ten times slower.


@njit(cache=True)
def scan_words(table, p, queue, inv, stack, st, alpha, words, offs, fill):
    """Scan every word from coset ``alpha`` (used for subgroup generators)."""
    for r in range(offs.shape[0] - 1):
        if p[alpha] != alpha:
            return DONE
        i, j, f, b = _trace(table, inv, alpha, words, offs[r], offs[r + 1])
        if i > j and f == b:
            continue
        if i >= j:
            _resolve(table, p, queue, inv, stack, st, words, i, j, f, b)
        elif fill:
            if _fill(table, p, queue, inv, stack, st, words, i, j, f, b) == NEED_SPACE:
                return NEED_SPACE
    return DONE


@njit(cache=True)
def hlt(table, p, queue, inv, stack, st, rels, offs, max_steps):
    """HLT: process cosets in order, scanning and filling every relator."""
    ncols = table.shape[1]
    cap = table.shape[0]
    nrel = offs.shape[0] - 1
    alpha = st[2]
    steps = 0
    while alpha < st[0]:
        if p[alpha] == alpha:
            for r in range(nrel):
                i, j, f, b = _trace(table, inv, alpha, rels, offs[r], offs[r + 1])
                if i > j and f == b:
                    continue
                st[3] = 0
                if i >= j:
                    _resolve(table, p, queue, inv, stack, st, rels, i, j, f, b)
                elif _fill(table, p, queue, inv, stack, st, rels, i, j, f, b) == NEED_SPACE:
                    st[2] = alpha
                    return NEED_SPACE
                if p[alpha] != alpha:
                    break
            if p[alpha] == alpha:
                for x in range(ncols):
                    if table[alpha, x] < 0:
                        if st[0] >= cap:
                            st[2] = alpha
                            return NEED_SPACE
                        _define(table, p, inv, stack, st, alpha, x)
        alpha += 1
        steps += 1
        if steps >= max_steps:
            st[2] = alpha
            return PAUSED
    st[2] = alpha
    st[3] = 0
    return DONE


@njit(cache=True)
def lookahead(table, p, queue, inv, stack, st, rels, offs):
    """Scan every live coset under every relator without defining."""
    nrel = offs.shape[0] - 1
    for alpha in range(st[0]):
        if p[alpha] != alpha:
            continue
        for r in range(nrel):
            i, j, f, b = _trace(table, inv, alpha, rels, offs[r], offs[r + 1])
            if i < j or (i > j and f == b):
                continue
            st[3] = 0
            _resolve(table, p, queue, inv, stack, st, rels, i, j, f, b)
            if p[alpha] != alpha:
                break
    st[3] = 0
    st[4] = 0


@njit(cache=True)
def _process_deductions(table, p, queue, inv, stack, st, cwords, coffs, cbycol):
    while True:
        while st[3] > 0:
            st[3] -= 1
            c = stack[st[3], 0]
            x = stack[st[3], 1]
            if p[c] != c:
                continue
            for r in range(cbycol[x], cbycol[x + 1]):
                i, j, f, b = _trace(table, inv, c, cwords, coffs[r], coffs[r + 1])
                if i < j or (i > j and f == b):
                    continue
                _resolve(table, p, queue, inv, stack, st, cwords, i, j, f, b)
                if p[c] != c:
                    break
        if st[4] == 0:
            return
        # stack overflowed: fall back to full passes until nothing changes
        st[4] = 0
        st[3] = 0
        changed = True
        while changed:
            before_live = st[1]
            before_defs = _count_defined(table, p, st[0])
            for alpha in range(st[0]):
                if p[alpha] != alpha:
                    continue
                for r in range(coffs.shape[0] - 1):
                    i, j, f, b = _trace(table, inv, alpha, cwords, coffs[r], coffs[r + 1])
                    if i < j or (i > j and f == b):
                        continue
                    _resolve(table, p, queue, inv, stack, st, cwords, i, j, f, b)
                    st[3] = 0
                    if p[alpha] != alpha:
                        break
            st[4] = 0
            changed = st[1] != before_live or \
                _count_defined(table, p, st[0]) != before_defs


@njit(cache=True)
def _count_defined(table, p, n):
    total = 0
    for c in range(n):
        if p[c] == c:
            for x in range(table.shape[1]):
                if table[c, x] >= 0:
                    total += 1
    return total


@njit(cache=True)
def felsch(table, p, queue, inv, stack, st, cwords, coffs, cbycol, max_steps):
    """Felsch: fill the first hole, then close all consequences of it."""
    ncols = table.shape[1]
    cap = table.shape[0]
    steps = 0
    while True:
        _process_deductions(table, p, queue, inv, stack, st, cwords, coffs, cbycol)
        alpha = st[2]
        hole = -1
        while alpha < st[0]:
            if p[alpha] == alpha:
                for x in range(ncols):
                    if table[alpha, x] < 0:
                        hole = x
                        break
                if hole >= 0:
                    break
            alpha += 1
        st[2] = alpha
        if hole < 0:
            return DONE
        if st[0] >= cap:
            return NEED_SPACE
        _define(table, p, inv, stack, st, alpha, hole)
        steps += 1
        if steps >= max_steps:
            _process_deductions(table, p, queue, inv, stack, st, cwords, coffs, cbycol)
            return PAUSED


@njit(cache=True)
def compact(table, p, st):
    """Renumber live cosets 0..nlive-1 in order; remaps the resume pointer."""
    n = st[0]
    ptr = st[2]
    newidx = np.full(n, -1, dtype=np.int64)
    k = 0
    newptr = -1
    for c in range(n):
        if c == ptr:
            newptr = k
        if p[c] == c:
            newidx[c] = k
            k += 1
    if newptr < 0:
        newptr = k
    ncols = table.shape[1]
    for c in range(n):
        if p[c] != c:
            continue
        nc = newidx[c]
        for x in range(ncols):
            t = table[c, x]
            if t >= 0:
                table[nc, x] = newidx[_rep(p, t)]
            else:
                table[nc, x] = -1
    for c in range(k, n):
        for x in range(ncols):
            table[c, x] = -1
    for c in range(n):
        p[c] = c
    st[0] = k
    st[1] = k
    st[2] = newptr
