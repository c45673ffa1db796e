"""Numba kernel for rewriting with a reversed-lhs trie stored in arrays.

``child[node, letter]`` is the next trie node (-1 if absent) when reading a
left-hand side backwards; ``term[node]`` is the rule id ending there, or -1.
Right-hand sides live in ``rhs_buf[rhs_off[r]:rhs_off[r] + rhs_len[r]]``.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def reduce_word(word, child, term, rhs_buf, rhs_off, rhs_len, skip):
    """Normal form of ``word``; rule id ``skip`` is ignored (-1 for none).

    Shortlex rules never lengthen a word, so the output and pending-letter
    stacks both fit in ``len(word)`` slots.
    """
    n = word.shape[0]
    out = np.empty(n, np.uint8)
    todo = np.empty(n, np.uint8)
    for i in range(n):
        todo[i] = word[n - 1 - i]
    nt = n
    no = 0
    while nt > 0:
        nt -= 1
        out[no] = todo[nt]
        no += 1
        node = 0
        i = no - 1
        while i >= 0:
            node = child[node, out[i]]
            if node < 0:
                break
            r = term[node]
            if r >= 0 and r != skip:
                no = i
                off = rhs_off[r]
                for k in range(rhs_len[r] - 1, -1, -1):
                    todo[nt] = rhs_buf[off + k]
                    nt += 1
                break
            i -= 1
    return out[:no].copy()


@njit(cache=True)
def reduce_many(flat, offs, child, term, rhs_buf, rhs_off, rhs_len):
    """Reduce every word ``flat[offs[i]:offs[i + 1]]``; same layout out."""
    nw = offs.shape[0] - 1
    out = np.empty(flat.shape[0], np.uint8)
    out_offs = np.zeros(nw + 1, np.int64)
    todo = np.empty(flat.shape[0], np.uint8)
    pos = 0
    for w in range(nw):
        lo = offs[w]
        hi = offs[w + 1]
        nt = 0
        for i in range(hi - 1, lo - 1, -1):
            todo[nt] = flat[i]
            nt += 1
        base = pos
        while nt > 0:
            nt -= 1
            out[pos] = todo[nt]
            pos += 1
            node = 0
            i = pos - 1
            while i >= base:
                node = child[node, out[i]]
                if node < 0:
                    break
                r = term[node]
                if r >= 0:
                    pos = i
                    off = rhs_off[r]
                    for k in range(rhs_len[r] - 1, -1, -1):
                        todo[nt] = rhs_buf[off + k]
                        nt += 1
                    break
                i -= 1
        out_offs[w + 1] = pos
    return out[:pos].copy(), out_offs
