"""Queries over a piecewise-constant tariff.

Every query walks the interval list, never individual slots, except where the
answer itself is a per-slot sequence (``WindowCost`` breakpoints), whose length
is bounded by the number of requested slots per interval.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import InsufficientCapacity, ReservationProfile, TariffFunction

__all__ = [
    "SlotSelection",
    "WindowCost",
    "cost_at",
    "cheapest_slots",
    "cheapest_cost_monotone",
    "split_point_candidates",
    "threshold_reserve",
    "threshold_reserve_backward",
    "first_finite_slots_cost",
]


@dataclass(frozen=True)
class SlotSelection:
    """A set of slots stored as per-interval contiguous runs ``(start, count)``."""

    runs: tuple[tuple[int, int], ...]
    counts: tuple[int, ...]
    total_cost: Fraction

    @property
    def size(self) -> int:
        return sum(c for _, c in self.runs)

    @property
    def last_slot(self) -> int | None:
        if not self.runs:
            return None
        return max(s + c - 1 for s, c in self.runs)

    @property
    def first_slot(self) -> int | None:
        if not self.runs:
            return None
        return min(s for s, _ in self.runs)

    @property
    def completion(self) -> int | None:
        last = self.last_slot
        return None if last is None else last + 1

    @property
    def profile(self) -> ReservationProfile:
        return ReservationProfile(self.counts)

    def slots(self) -> list[int]:
        out = []
        for s, c in sorted(self.runs):
            out.extend(range(s, s + c))
        return out


def _selection(tariff: TariffFunction, runs: Sequence[tuple[int, int, int]]) -> SlotSelection:
    """Build from ``(interval_index, start, count)`` triples."""
    counts = [0] * tariff.K
    total = Fraction(0)
    out = []
    for k, s, c in runs:
        if c <= 0:
            continue
        counts[k] += c
        total += c * tariff.intervals[k].cost
        out.append((s, c))
    return SlotSelection(tuple(sorted(out)), tuple(counts), total)


def cost_at(tariff: TariffFunction, t: int):
    """Cost of slot ``[t, t+1)``; raises ``IndexError`` outside the horizon."""
    return tariff.intervals[tariff.interval_index(t)].cost


def _window_pieces(tariff: TariffFunction, t1: int, t2: int):
    for k, iv in enumerate(tariff.intervals):
        lo, hi = max(iv.start, t1), min(iv.end, t2)
        if lo < hi and iv.finite:
            yield k, iv.cost, lo, hi - lo


def cheapest_slots(tariff: TariffFunction, p: int, window: tuple[int, int]) -> SlotSelection:
    """Select the ``p`` cheapest finite slots in ``[t1, t2)``.

    Ties go to earlier slots; inside an interval the earliest slots of the
    clipped interval are taken.
    """
    t1, t2 = window
    if not 0 <= t1 <= t2 <= tariff.horizon:
        raise ValueError(f"window [{t1}, {t2}) outside horizon [0, {tariff.horizon}]")
    if p < 0:
        raise ValueError("p must be nonnegative")
    pieces = sorted(_window_pieces(tariff, t1, t2), key=lambda x: (x[1], x[2]))
    left = p
    runs = []
    for k, _, lo, length in pieces:
        if left == 0:
            break
        take = min(left, length)
        runs.append((k, lo, take))
        left -= take
    if left:
        raise InsufficientCapacity(f"only {p - left} finite slots in [{t1}, {t2}), need {p}")
    return _selection(tariff, runs)


def first_finite_slots_cost(tariff: TariffFunction, p: int, start: int = 0) -> Fraction:
    """Total cost of the first ``p`` finite-cost slots at or after ``start``."""
    left = p
    total = Fraction(0)
    for iv in tariff.intervals:
        if left == 0:
            break
        lo = max(iv.start, start)
        if lo >= iv.end or not iv.finite:
            continue
        take = min(left, iv.end - lo)
        total += take * iv.cost
        left -= take
    if left:
        raise InsufficientCapacity(f"fewer than {p} finite slots after {start}")
    return total


class WindowCost:
    """``t2 -> E(p, [t1, t2))`` as a non-increasing step function.

    ``breakpoints`` lists ``(t2, cost)`` at every strict decrease, starting at the
    first ``t2`` with enough finite capacity.
    """

    def __init__(self, tariff: TariffFunction, p: int, t1: int):
        if not 0 <= t1 <= tariff.horizon:
            raise ValueError(f"t1={t1} outside horizon")
        self.tariff = tariff
        self.p = p
        self.t1 = t1
        self.breakpoints = _breakpoints(tariff, p, t1)
        self._ts = [t for t, _ in self.breakpoints]

    def __call__(self, t2: int) -> Fraction:
        if t2 > self.tariff.horizon or t2 < self.t1:
            raise ValueError(f"t2={t2} outside [{self.t1}, {self.tariff.horizon}]")
        i = bisect.bisect_right(self._ts, t2) - 1
        if i < 0:
            raise InsufficientCapacity(f"fewer than {self.p} finite slots in [{self.t1}, {t2})")
        return self.breakpoints[i][1]

    def earliest_within(self, budget, lower: int | None = None) -> int | None:
        """Least ``t2 >= lower`` with ``E(p, [t1, t2)) <= budget``; ``None`` if none exists."""
        lower = self.t1 if lower is None else max(lower, self.t1)
        if lower > self.tariff.horizon:
            return None
        # costs are strictly decreasing along the breakpoints
        lo, hi = 0, len(self.breakpoints)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.breakpoints[mid][1] <= budget:
                hi = mid
            else:
                lo = mid + 1
        if lo == len(self.breakpoints):
            return None
        return max(lower, self.breakpoints[lo][0])


def _breakpoints(tariff: TariffFunction, p: int, t1: int) -> list[tuple[int, Fraction]]:
    if p == 0:
        return [(t1, Fraction(0))]
    buckets: list[list] = []  # [cost, count], ascending by cost
    n_sel = 0
    total = Fraction(0)
    out: list[tuple[int, Fraction]] = []

    def add(cost, count):
        for b in buckets:
            if b[0] == cost:
                b[1] += count
                return
        bisect.insort(buckets, [cost, count])

    for iv in tariff.intervals:
        lo = max(iv.start, t1)
        if lo >= iv.end or not iv.finite:
            continue
        e = iv.cost
        length = iv.end - lo
        used = 0
        if n_sel < p:
            used = min(length, p - n_sel)
            add(e, used)
            n_sel += used
            total += used * e
            if n_sel == p:
                out.append((lo + used, total))
        while used < length and n_sel == p and buckets[-1][0] > e:
            top = buckets[-1]
            total -= top[0] - e
            top[1] -= 1
            if top[1] == 0:
                buckets.pop()
            add(e, 1)
            used += 1
            out.append((lo + used, total))
    return out


def cheapest_cost_monotone(tariff: TariffFunction, p: int, t1: int) -> WindowCost:
    return WindowCost(tariff, p, t1)


def split_point_candidates(tariff: TariffFunction) -> list[int]:
    """``{s_k, s_k + 1 : k} | {d_K}`` clipped to ``[0, d_K]``, sorted and unique."""
    horizon = tariff.horizon
    pts = {horizon}
    for iv in tariff.intervals:
        pts.add(iv.start)
        pts.add(min(iv.start + 1, horizon))
    return sorted(t for t in pts if 0 <= t <= horizon)


def threshold_reserve(
    tariff: TariffFunction, from_t: int, p: int, bound, end: int | None = None
) -> SlotSelection:
    """Scan forward from ``from_t`` taking every slot with cost <= ``bound`` until ``p`` are taken.

    ``end`` (default: horizon) caps the scan. The selection's ``completion`` is the
    position right after the last taken slot.
    """
    end = tariff.horizon if end is None else end
    if not 0 <= from_t <= tariff.horizon:
        raise ValueError(f"from_t={from_t} outside horizon")
    left = p
    runs = []
    if from_t < end:
        k0 = tariff.interval_index(from_t)
        for k in range(k0, tariff.K):
            if left == 0:
                break
            iv = tariff.intervals[k]
            lo, hi = max(iv.start, from_t), min(iv.end, end)
            if lo >= hi:
                break
            if iv.finite and iv.cost <= bound:
                take = min(left, hi - lo)
                runs.append((k, lo, take))
                left -= take
    if left:
        raise InsufficientCapacity(
            f"only {p - left} slots with cost <= {bound} in [{from_t}, {end})"
        )
    return _selection(tariff, runs)


def threshold_reserve_backward(
    tariff: TariffFunction, before_t: int, p: int, bound, start: int = 0
) -> SlotSelection:
    """Mirror of :func:`threshold_reserve` scanning slots ``before_t - 1`` downwards."""
    if not 0 <= before_t <= tariff.horizon:
        raise ValueError(f"before_t={before_t} outside horizon")
    left = p
    runs = []
    if before_t > start:
        k0 = tariff.interval_index(before_t - 1)
        for k in range(k0, -1, -1):
            if left == 0:
                break
            iv = tariff.intervals[k]
            lo, hi = max(iv.start, start), min(iv.end, before_t)
            if lo >= hi:
                break
            if iv.finite and iv.cost <= bound:
                take = min(left, hi - lo)
                runs.append((k, hi - take, take))
                left -= take
    if left:
        raise InsufficientCapacity(
            f"only {p - left} slots with cost <= {bound} in [{start}, {before_t})"
        )
    return _selection(tariff, runs)


def finite_costs_in(tariff: TariffFunction, t1: int, t2: int) -> list:
    """Distinct finite costs of intervals intersecting ``[t1, t2)``, ascending."""
    return sorted({iv.cost for _, iv in _intersecting(tariff, t1, t2) if iv.finite})


def _intersecting(tariff: TariffFunction, t1: int, t2: int):
    for k, iv in enumerate(tariff.intervals):
        if iv.start < t2 and iv.end > t1:
            yield k, iv



def trim_trailing_infinite(tariff: TariffFunction) -> tuple[TariffFunction, int]:
    """Drop trailing infinite-cost intervals (no slot there can ever be used).

    Returns the trimmed tariff and how many intervals were removed; at least one
    interval is always kept.
    """
    ivs = list(tariff.intervals)
    dropped = 0
    while len(ivs) > 1 and not ivs[-1].finite:
        ivs.pop()
        dropped += 1
    if not dropped:
        return tariff, 0
    return TariffFunction(tuple(ivs)), dropped
