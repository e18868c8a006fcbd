"""Compiled bitboard search for boards of at most 64 cells.

Branching always covers the lowest-index open cell: every placement that can
cover it has it as its own lowest cell, so candidates are bucketed by that
anchor cell up front.  Piece types carry remaining-use counters, which keeps
identical pieces from being permuted.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)

SOLVED = 1
UNSOLVABLE = 0
CAP_EXCEEDED = -1


@njit(cache=True)
def popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True)
def lowest_index(x):
    return popcount((x & (~x + _ONE)) - _ONE)


@njit(cache=True)
def _regions_ok(filled, full, ncols, not_first, not_last, orders, rem):
    # every open component must have an area that the remaining pieces can sum to
    reach = _ONE
    for t in range(orders.shape[0]):
        o = np.uint64(orders[t])
        for _ in range(rem[t]):
            reach |= reach << o
    open_ = full & ~filled
    sh = np.uint64(ncols)
    while open_ != _ZERO:
        comp = open_ & (~open_ + _ONE)
        while True:
            grow = comp | ((comp & not_last) << _ONE) | ((comp & not_first) >> _ONE)
            grow |= (comp << sh) | (comp >> sh)
            grow &= open_
            if grow == comp:
                break
            comp = grow
        s = popcount(comp)
        if s >= 64 or ((reach >> np.uint64(s)) & _ONE) == _ZERO:
            return False
        open_ &= ~comp
    return True


@njit(cache=True)
def search(blocked, full, ncols, not_first, not_last, anc_start, anc_type, anc_mask,
           orders, mult, node_cap, prune, choices):
    """Depth-first search from ``blocked``; fills ``choices`` with the chosen
    candidate indices on success.  Returns ``(status, nodes, depth)``."""
    rem = mult.copy()
    maxd = choices.shape[0] + 1
    fills = np.empty(maxd, np.uint64)
    pos = np.empty(maxd, np.int64)
    ends = np.empty(maxd, np.int64)
    if blocked == full:
        return SOLVED, 0, 0
    fills[0] = blocked
    a = lowest_index(~blocked & full)
    pos[0] = anc_start[a]
    ends[0] = anc_start[a + 1]
    d = 0
    nodes = 0
    while d >= 0:
        f = fills[d]
        i = pos[d]
        e = ends[d]
        advanced = False
        while i < e:
            t = anc_type[i]
            pm = anc_mask[i]
            i += 1
            if rem[t] == 0 or (pm & f) != _ZERO:
                continue
            nf = f | pm
            rem[t] -= 1
            nodes += 1
            if nf == full:
                choices[d] = i - 1
                return SOLVED, nodes, d + 1
            if node_cap > 0 and nodes > node_cap:
                return CAP_EXCEEDED, nodes, d
            if not prune or _regions_ok(nf, full, ncols, not_first, not_last, orders, rem):
                choices[d] = i - 1
                pos[d] = i
                d += 1
                fills[d] = nf
                a = lowest_index(~nf & full)
                pos[d] = anc_start[a]
                ends[d] = anc_start[a + 1]
                advanced = True
                break
            rem[t] += 1
        if not advanced:
            d -= 1
            if d >= 0:
                rem[anc_type[choices[d]]] += 1
    return UNSOLVABLE, nodes, 0


@njit(cache=True)
def search_batch(blocked_masks, full, ncols, not_first, not_last, anc_start, anc_type,
                 anc_mask, orders, mult, node_cap, prune, depth):
    """Status of every board in ``blocked_masks``; stops at the first cap hit."""
    out = np.empty(blocked_masks.shape[0], np.int8)
    choices = np.empty(depth, np.int64)
    nodes = 0
    for k in range(blocked_masks.shape[0]):
        status, used, _ = search(blocked_masks[k], full, ncols, not_first, not_last,
                                 anc_start, anc_type, anc_mask, orders, mult,
                                 node_cap, prune, choices)
        nodes += used
        out[k] = status
        if status == CAP_EXCEEDED:
            return out[: k + 1], nodes
    return out, nodes
