"""Vectorised uint64 bit-mask helpers for boards with at most 64 cells.

Bit ``row * cols + col`` of a mask is set when that cell is blocked.  A
*canonical key* stores cell ``idx`` at bit ``N - 1 - idx`` instead; with that
layout the lexicographically least blocked-index tuple of an orbit is the
numerically largest key, so canonicalisation is a max over the group.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .grid_core import (
    DEFAULT_BRUTE_FORCE_CAP,
    Symmetry,
    check_enumeration_cap,
    symmetry_group_of,
)

MAX_CELLS = 64
U64 = np.uint64


def _check_cells(m: int, n: int) -> int:
    N = m * n
    if N > MAX_CELLS:
        raise ValueError(f"{m}x{n} board has more than {MAX_CELLS} cells")
    return N


def cell_targets(g: Symmetry, m: int, n: int) -> np.ndarray:
    """``targets[idx]`` is the row-major index of the image of cell ``idx``."""
    out = np.empty(m * n, dtype=np.int64)
    for i in range(m):
        for j in range(n):
            a, b = g.map_cell((i, j), m, n)
            out[i * n + j] = a * n + b
    return out


def _byte_tables(targets: tuple[int, ...]) -> np.ndarray:
    N = len(targets)
    nbytes = (N + 7) // 8
    tables = np.zeros((nbytes, 256), dtype=U64)
    for byte in range(nbytes):
        for value in range(256):
            acc = 0
            for bit in range(8):
                src = byte * 8 + bit
                if src < N and value >> bit & 1:
                    acc |= 1 << targets[src]
            tables[byte, value] = acc
    return tables


@lru_cache(maxsize=256)
def _cached_tables(targets: tuple[int, ...]) -> np.ndarray:
    return _byte_tables(targets)


def permute_bits(masks: np.ndarray, targets) -> np.ndarray:
    """Move bit ``i`` of every mask to bit ``targets[i]``."""
    tables = _cached_tables(tuple(int(t) for t in targets))
    masks = np.asarray(masks, dtype=U64)
    out = np.zeros_like(masks)
    for byte in range(tables.shape[0]):
        idx = (masks >> U64(8 * byte)) & U64(0xFF)
        out |= tables[byte][idx]
    return out


def apply_symmetry_masks(g: Symmetry, masks: np.ndarray, m: int, n: int) -> np.ndarray:
    _check_cells(m, n)
    return permute_bits(masks, cell_targets(g, m, n))


def canonical_keys(masks: np.ndarray, m: int, n: int) -> np.ndarray:
    """Canonical key of each mask (max over the symmetry group)."""
    N = _check_cells(m, n)
    best = None
    for g in symmetry_group_of(m, n):
        key = permute_bits(masks, N - 1 - cell_targets(g, m, n))
        best = key if best is None else np.maximum(best, key)
    return best


def keys_to_masks(keys: np.ndarray, m: int, n: int) -> np.ndarray:
    N = _check_cells(m, n)
    return permute_bits(keys, N - 1 - np.arange(N))


def combination_masks(N: int, r: int) -> np.ndarray:
    """All ``N``-bit masks with exactly ``r`` bits set (unspecified order)."""
    if r < 0 or r > N:
        return np.zeros(0, dtype=U64)
    rows = {0: np.zeros(1, dtype=U64)}
    for i in range(N):
        bit = U64(1) << U64(i)
        # after bit i, a j-subset can still reach r only if j >= r - (N - i - 1)
        lo = max(0, r - (N - i - 1))
        nxt = {}
        for j in range(lo, min(i + 1, r) + 1):
            parts = []
            if j in rows:
                parts.append(rows[j])
            if j - 1 in rows:
                parts.append(rows[j - 1] | bit)
            if parts:
                nxt[j] = parts[0] if len(parts) == 1 else np.concatenate(parts)
        rows = nxt
    return rows.get(r, np.zeros(0, dtype=U64))


def brute_force_canonical_keys(
    m: int, n: int, r: int, cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> np.ndarray:
    """Sorted unique canonical keys over every board of the family."""
    N = _check_cells(m, n)
    check_enumeration_cap(m, n, r, cap)
    return np.unique(canonical_keys(combination_masks(N, r), m, n))


def subset_masks(cells: list[int], k: int) -> np.ndarray:
    """Masks of the ``k``-subsets of ``cells`` in ``itertools.combinations`` order."""
    combos = list(itertools.combinations(cells, k))
    out = np.zeros(len(combos), dtype=U64)
    for pos in range(k):
        col = np.fromiter((c[pos] for c in combos), dtype=np.int64, count=len(combos))
        out |= U64(1) << col.astype(U64)
    return out


def product_masks(parts: list[np.ndarray]) -> np.ndarray:
    """OR-combine choices from each part; the first part varies slowest."""
    out = np.zeros(1, dtype=U64)
    for part in parts:
        out = (out[:, None] | part[None, :]).ravel()
    return out


def popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(masks, dtype=U64))
