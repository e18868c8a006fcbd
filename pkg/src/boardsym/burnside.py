"""Orbit counting: generic fixed-set counts, closed forms, and reduction ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .grid_core import DimensionError, Symmetry, symmetry_group_of
from .partitions import Case, case_of, reduced_size

DEFAULT_SWEEP_CAP = 484


def binom(a, b) -> int:
    """``C(a, b)``, zero when ``b`` is fractional, negative or exceeds ``a``."""
    if isinstance(b, Fraction):
        if b.denominator != 1:
            return 0
        b = b.numerator
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def _half(x: int) -> Fraction:
    return Fraction(x, 2)


def cycle_lengths(g: Symmetry, m: int, n: int) -> list[int]:
    """Lengths of the cycles ``g`` induces on the cells."""
    if g.needs_square and m != n:
        raise DimensionError(f"{g} needs a square board, got {m}x{n}")
    seen = set()
    out = []
    for i in range(m):
        for j in range(n):
            if (i, j) in seen:
                continue
            length = 0
            cell = (i, j)
            while cell not in seen:
                seen.add(cell)
                length += 1
                cell = g.map_cell(cell, m, n)
            out.append(length)
    return out


def fixed_count(g: Symmetry, m: int, n: int, r: int) -> int:
    """Boards with ``r`` blocked cells left unchanged by ``g``.

    A fixed board is a union of whole cycles, so this is the coefficient of
    ``x**r`` in the product of ``(1 + x**len)`` over the cycles.
    """
    poly = [1] + [0] * r
    for length in cycle_lengths(g, m, n):
        for s in range(r, length - 1, -1):
            poly[s] += poly[s - length]
    return poly[r] if r >= 0 else 0


def orbit_count(m: int, n: int, r: int) -> int:
    if not 0 <= r <= m * n:
        return 0
    G = symmetry_group_of(m, n)
    total = sum(fixed_count(g, m, n, r) for g in G)
    if total % G.order:
        raise ArithmeticError(f"Burnside sum {total} not divisible by |G|={G.order}")
    return total // G.order


def orbit_count_closed_form(m: int, n: int, r: int) -> int:
    if not 0 <= r <= m * n:
        return 0
    case = case_of(m, n)
    if m == 1 and n == 1:
        return binom(1, r)
    if case is Case.SQUARE_EVEN:
        k = m // 2
        diag = sum(binom(2 * k, t) * binom(k * (2 * k - 1), _half(r - t)) for t in range(r + 1))
        total = (
            binom(4 * k * k, r)
            + 2 * binom(k * k, Fraction(r, 4))
            + 3 * binom(2 * k * k, _half(r))
            + 2 * diag
        )
        denom = 8
    elif case is Case.SQUARE_ODD:
        k = m // 2
        mirror = sum(
            binom(2 * k + 1, t) * binom(k * (2 * k + 1), _half(r - t)) for t in range(r + 1)
        )
        total = (
            binom((2 * k + 1) ** 2, r)
            + 2 * binom(k * (k + 1), Fraction(r, 4))
            + 2 * binom(k * (k + 1), Fraction(r - 1, 4))
            + binom(2 * k * (k + 1), r // 2)
            + 4 * mirror
        )
        denom = 8
    elif case is Case.RECT_EVEN:
        k, l = m // 2, n // 2
        total = binom(4 * k * l, r) + 3 * binom(2 * k * l, _half(r))
        denom = 4
    elif case is Case.RECT_ODD:
        k, l = m // 2, n // 2
        total = (
            binom((2 * k + 1) * (2 * l + 1), r)
            + binom(2 * k * l + k + l, r // 2)
            + sum(binom(2 * k + 1, t) * binom(2 * k * l + l, _half(r - t)) for t in range(r + 1))
            + sum(binom(2 * l + 1, t) * binom(2 * k * l + k, _half(r - t)) for t in range(r + 1))
        )
        denom = 4
    elif case is Case.RECT_MIXED:
        even, odd = (m, n) if m % 2 == 0 else (n, m)
        k, l = even // 2, odd // 2
        total = (
            binom(2 * k * (2 * l + 1), r)
            + 2 * binom(k * (2 * l + 1), _half(r))
            + sum(binom(2 * k, t) * binom(2 * k * l, _half(r - t)) for t in range(r + 1))
        )
        denom = 4
    else:
        length = max(m, n)
        k = length // 2
        if case is Case.SINGLE_ROW_EVEN:
            total = binom(2 * k, r) + binom(k, _half(r))
        else:
            total = binom(2 * k + 1, r) + binom(k, r // 2)
        denom = 2
    if total % denom:
        raise ArithmeticError(f"closed form sum {total} not divisible by {denom}")
    return total // denom


# -- reduction ratio ----------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    m: int
    n: int
    r: int
    reduced_size: int
    orbit_count: int
    ratio: Fraction = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ratio", Fraction(self.reduced_size, self.orbit_count))

    @property
    def decimal(self) -> str:
        return f"{float(self.ratio):.4f}"

    @property
    def is_canonical(self) -> bool:
        return self.reduced_size == self.orbit_count


def ratio(m: int, n: int, r: int, check_complement: bool = True) -> RatioReport:
    if not 0 <= r <= m * n:
        raise ValueError(f"r={r} outside 0..{m * n}")
    rep = RatioReport(m, n, r, reduced_size(m, n, r), orbit_count_closed_form(m, n, r))
    if check_complement and r != m * n - r:
        mirror = ratio(m, n, m * n - r, check_complement=False)
        if mirror.ratio != rep.ratio:
            raise ArithmeticError(f"R({m},{n};{r}) != R({m},{n};{m * n - r})")
    return rep


@dataclass
class SweepCheck:
    name: str
    passed: bool
    detail: str = ""
    asserted: bool = True  # False for cases reported without a claim attached

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.asserted:
            status = "INFO " + ("holds" if self.passed else "fails")
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class SweepResult:
    m: int
    n: int
    reports: list[RatioReport]
    checks: list[SweepCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def by_r(self) -> dict[int, RatioReport]:
        return {rep.r: rep for rep in self.reports}


def _strictly_decreasing(values: list[Fraction]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def ratio_sweep(
    m: int, n: int, r_max: int | None = None, cap: int = DEFAULT_SWEEP_CAP
) -> SweepResult:
    """Ratios for ``1 <= r <= ceil(mn/2)`` plus the monotonicity checks that apply.

    Even squares: each residue class of ``r`` mod 4 decreases and no ratio
    exceeds the one at ``r = 2`` (asserted for side >= 8).  Even non-square
    rectangles: ratios at even ``r`` decrease, odd ``r`` give exactly 1, and
    nothing exceeds ``r = 2`` (asserted except for 2x4 and 2x6).
    """
    if m * n > cap:
        raise ValueError(f"{m}x{n} exceeds sweep cap of {cap} cells")
    top = math.ceil(m * n / 2) if r_max is None else min(r_max, m * n)
    reports = [ratio(m, n, r, check_complement=False) for r in range(1, top + 1)]
    by_r = {rep.r: rep.ratio for rep in reports}
    checks: list[SweepCheck] = []
    even = m % 2 == 0 and n % 2 == 0
    peak_r = max(by_r, key=lambda r: (by_r[r], -r)) if by_r else None
    if peak_r is not None:
        checks.append(
            SweepCheck("max", True, f"max at r={peak_r} ({float(by_r[peak_r]):.4f})", asserted=False)
        )
    if even and m == n:
        asserted = n >= 8
        for s in range(4):
            seq = [by_r[r] for r in sorted(by_r) if r % 4 == s]
            ok = _strictly_decreasing(seq)
            checks.append(
                SweepCheck(f"residue {s} mod 4 decreasing", ok, _fmt(seq), asserted=asserted)
            )
        if 2 in by_r:
            ok = all(v <= by_r[2] for v in by_r.values())
            checks.append(SweepCheck("bounded by R(r=2)", ok, asserted=asserted))
    elif even:
        asserted = (min(m, n), max(m, n)) not in {(2, 4), (2, 6)}
        seq = [by_r[r] for r in sorted(by_r) if r % 2 == 0]
        checks.append(
            SweepCheck("even r decreasing", _strictly_decreasing(seq), _fmt(seq), asserted=asserted)
        )
        odd_ok = all(by_r[r] == 1 for r in by_r if r % 2 == 1)
        checks.append(SweepCheck("odd r canonical", odd_ok))
        if 2 in by_r:
            ok = all(v <= by_r[2] for v in by_r.values())
            checks.append(SweepCheck("bounded by R(r=2)", ok, asserted=asserted))
    return SweepResult(m, n, reports, checks)


def _fmt(values: list[Fraction]) -> str:
    shown = ", ".join(f"{float(v):.4f}" for v in values[:6])
    return f"[{shown}{', ...' if len(values) > 6 else ''}]"
