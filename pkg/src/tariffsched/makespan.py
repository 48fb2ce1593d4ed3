"""Preemptive makespan plus tariff cost on unrelated machines.

Pipeline: relaxed LP (no tariff) for the optimal makespan ``Z``, then a choice of
``ceil(Z)`` utilized slots minimizing effective makespan plus tariff, then a
preemptive timetable inside those slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import (
    Instance,
    InsufficientCapacity,
    ReservationProfile,
    Schedule,
    Segment,
    TariffFunction,
    is_inf,
)
from .simplex import linprog_exact
from .tariff import SlotSelection, cheapest_slots, trim_trailing_infinite

OBJECTIVE = "makespan"


@dataclass(frozen=True)
class LpLoads:
    """Relaxed optimum: ``loads[i][j]`` is time job ``jobs[j]`` spends on machine ``i``."""

    Z: Fraction
    loads: tuple[tuple[Fraction, ...], ...]
    job_ids: tuple[int, ...]

    @property
    def machines(self) -> int:
        return len(self.loads)


@dataclass(frozen=True)
class CStarCandidate:
    k: int
    C_star: int
    profile: ReservationProfile
    makespan: Fraction
    tariff_cost: Fraction

    @property
    def total(self) -> Fraction:
        return self.makespan + self.tariff_cost


@dataclass(frozen=True)
class JobPlacement:
    selection: SlotSelection
    completion: int
    cost: Fraction


def effective_makespan(last_slot_end: int, Z: Fraction) -> Fraction:
    """Makespan when the final utilized slot ends at ``last_slot_end``.

    A fractional ``Z`` leaves the last slot only partly used.
    """
    frac = Z - math.floor(Z)
    if frac:
        return Fraction(last_slot_end - 1) + frac
    return Fraction(last_slot_end)


def solve_relaxed(instance: Instance) -> LpLoads:
    m = instance.machines
    jobs = instance.jobs
    var = {}
    for i in range(m):
        for j, job in enumerate(jobs):
            if not is_inf(job.processing_on(i)):
                var[i, j] = len(var)
    n_var = len(var) + 1
    c_idx = n_var - 1
    c = [0] * n_var
    c[c_idx] = 1
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for j, job in enumerate(jobs):
        row = [Fraction(0)] * n_var
        for i in range(m):
            if (i, j) in var:
                row[var[i, j]] = Fraction(1, int(job.processing_on(i)))
        A_eq.append(row)
        b_eq.append(1)
        row = [0] * n_var
        for i in range(m):
            if (i, j) in var:
                row[var[i, j]] = 1
        row[c_idx] = -1
        A_ub.append(row)
        b_ub.append(0)
    for i in range(m):
        row = [0] * n_var
        for j in range(len(jobs)):
            if (i, j) in var:
                row[var[i, j]] = 1
        row[c_idx] = -1
        A_ub.append(row)
        b_ub.append(0)
    res = linprog_exact(c, A_ub, b_ub, A_eq, b_eq)
    loads = tuple(
        tuple(res.x[var[i, j]] if (i, j) in var else Fraction(0) for j in range(len(jobs)))
        for i in range(m)
    )
    return LpLoads(res.x[c_idx], loads, tuple(j.id for j in jobs))


def choose_reservation(Z: Fraction, tariff: TariffFunction) -> CStarCandidate:
    """Best slot set of size ``ceil(Z)`` over every candidate completion interval.

    For each interval I_k, takes as many of the ``ceil(Z)`` slots as possible from
    the cheapest finite slots before ``s_k``, puts the rest at the start of I_k, and
    keeps trading the most expensive utilized slot for the next slot of I_k while
    that slot costs more than ``e_k + 1``.
    """
    need = math.ceil(Z)
    best: CStarCandidate | None = None
    for k, iv in enumerate(tariff.intervals):
        if not iv.finite:
            continue
        before = sum(h.length for h in tariff.intervals[:k] if h.finite)
        r = max(0, need - before)
        if r > iv.length:
            continue
        try:
            base = cheapest_slots(tariff, need - r, (0, iv.start))
        except InsufficientCapacity:
            continue
        counts = list(base.counts)
        length = iv.length
        while r < length:
            used = [h for h in range(k) if counts[h]]
            if not used:
                break
            ell = max(used, key=lambda h: (tariff.intervals[h].cost, h))
            if not tariff.intervals[ell].cost > iv.cost + 1:
                break
            move = min(counts[ell], length - r)
            counts[ell] -= move
            r += move
        counts[k] += r
        profile = ReservationProfile(tuple(counts))
        slots = profile.slots(tariff)
        c_star = slots[-1] + 1
        cand = CStarCandidate(k, c_star, profile, effective_makespan(c_star, Z), profile.cost(tariff))
        if best is None or (cand.total, cand.C_star, cand.k) < (best.total, best.C_star, best.k):
            best = cand
    if best is None:
        raise InsufficientCapacity(f"no feasible set of {need} finite slots")
    return best


def _perfect_matching(mat: Sequence[Sequence[Fraction]]) -> list[int]:
    """Kuhn's augmenting paths on the positive support; rows try larger entries first."""
    size = len(mat)
    match_col = [-1] * size
    order = [sorted((j for j in range(size) if mat[i][j] > 0), key=lambda j: (-mat[i][j], j)) for i in range(size)]

    def augment(i, seen):
        for j in order[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_col[j] < 0 or augment(match_col[j], seen):
                match_col[j] = i
                return True
        return False

    for i in range(size):
        if not augment(i, set()):
            raise ValueError("loads admit no perfect matching; they are inconsistent")
    row_to_col = [-1] * size
    for j, i in enumerate(match_col):
        row_to_col[i] = j
    return row_to_col


def decompose(loads: LpLoads) -> list[tuple[Fraction, list[tuple[int, int]]]]:
    """Split the load matrix into ``(duration, [(machine, job_index), ...])`` steps.

    The m x n matrix is padded to a square matrix with every line summing to ``Z``
    and peeled one perfect matching at a time.
    """
    m, n = loads.machines, len(loads.job_ids)
    Z = loads.Z
    size = m + n
    mat = [[Fraction(0)] * size for _ in range(size)]
    for i in range(m):
        for j in range(n):
            mat[i][j] = loads.loads[i][j]
            mat[m + j][n + i] = loads.loads[i][j]
    for i in range(m):
        slack = Z - sum(loads.loads[i])
        if slack < 0:
            raise ValueError(f"machine {i} load exceeds Z")
        mat[i][n + i] = slack
    for j in range(n):
        slack = Z - sum(loads.loads[i][j] for i in range(m))
        if slack < 0:
            raise ValueError(f"job {loads.job_ids[j]} load exceeds Z")
        mat[m + j][j] = slack
    steps = []
    remaining = Z
    while remaining > 0:
        perm = _perfect_matching(mat)
        delta = min(mat[i][perm[i]] for i in range(size))
        for i in range(size):
            mat[i][perm[i]] -= delta
        remaining -= delta
        pairs = [(i, perm[i]) for i in range(m) if perm[i] < n]
        steps.append((delta, pairs))
    return steps


def _virtual_to_real(v0: Fraction, v1: Fraction, slots: Sequence[int]) -> list[tuple[Fraction, Fraction]]:
    out = []
    q = math.floor(v0)
    while q < v1:
        a = max(v0, Fraction(q))
        b = min(v1, Fraction(q + 1))
        if b > a:
            base = slots[q]
            out.append((base + (a - q), base + (b - q)))
        q += 1
    return out


def build_timetable(loads: LpLoads, profile: ReservationProfile, tariff: TariffFunction) -> Schedule:
    slots = profile.slots(tariff)
    if len(slots) < math.ceil(loads.Z):
        raise ValueError(f"profile holds {len(slots)} slots, Z={loads.Z} needs {math.ceil(loads.Z)}")
    pieces: dict[tuple[int, int], list[tuple[Fraction, Fraction]]] = {}
    v = Fraction(0)
    for delta, pairs in decompose(loads):
        for i, j in pairs:
            pieces.setdefault((loads.job_ids[j], i), []).extend(_virtual_to_real(v, v + delta, slots))
        v += delta
    segments = []
    for (jid, i), spans in pieces.items():
        spans.sort()
        cur = None
        for a, b in spans:
            if cur is not None and cur[1] == a:
                cur = (cur[0], b)
            else:
                if cur is not None:
                    segments.append(Segment(jid, i, cur[0], cur[1]))
                cur = (a, b)
        if cur is not None:
            segments.append(Segment(jid, i, cur[0], cur[1]))
    segments.sort(key=lambda s: (s.start, s.machine, s.job))
    completion = {jid: Fraction(0) for jid in loads.job_ids}
    for s in segments:
        completion[s.job] = max(completion[s.job], s.end)
    cmax = max(completion.values(), default=Fraction(0))
    return Schedule(OBJECTIVE, segments, completion, profile, cmax, profile.cost(tariff))


def solve_detailed(instance: Instance) -> tuple[Schedule, LpLoads, CStarCandidate]:
    loads = solve_relaxed(instance)
    tariff, dropped = trim_trailing_infinite(instance.tariff)
    cand = choose_reservation(loads.Z, tariff)
    if dropped:
        profile = ReservationProfile(cand.profile.counts + (0,) * dropped)
        cand = CStarCandidate(cand.k, cand.C_star, profile, cand.makespan, cand.tariff_cost)
    return build_timetable(loads, cand.profile, instance.tariff), loads, cand


def solve(instance: Instance) -> Schedule:
    return solve_detailed(instance)[0]


def single_job_slot_selection(
    p: int, window: tuple[int, int], w: Fraction, tariff: TariffFunction
) -> JobPlacement:
    """Minimize ``w * C + tariff`` over ``p`` slots of ``window``; ``C`` ends the last slot.

    For each completion interval the number ``m`` of slots taken there (a prefix of
    the clipped interval) trades convexly against the retained earlier slots, so
    ``m`` is found by binary search on the sign of the marginal cost.
    """
    t1, t2 = window
    best: JobPlacement | None = None
    for iv in tariff.intervals:
        lo, hi = max(iv.start, t1), min(iv.end, t2)
        if lo >= hi or not iv.finite:
            continue
        cap_before = sum(
            min(o.end, lo) - max(o.start, t1)
            for o in tariff.intervals
            if o.finite and max(o.start, t1) < min(o.end, lo)
        )
        m_lo, m_hi = max(1, p - cap_before), min(hi - lo, p)
        if m_lo > m_hi:
            continue

        def cost(m):
            return w * (lo + m) + m * iv.cost + cheapest_slots(tariff, p - m, (t1, lo)).total_cost

        a, b = m_lo, m_hi
        while a < b:
            mid = (a + b) // 2
            if cost(mid + 1) - cost(mid) >= 0:
                b = mid
            else:
                a = mid + 1
        rest = cheapest_slots(tariff, p - a, (t1, lo))
        k = tariff.interval_index(lo)
        counts = list(rest.counts)
        counts[k] += a
        sel = SlotSelection(tuple(sorted(rest.runs + ((lo, a),))), tuple(counts), rest.total_cost + a * iv.cost)
        place = JobPlacement(sel, lo + a, w * (lo + a) + sel.total_cost)
        if best is None or (place.cost, place.completion) < (best.cost, best.completion):
            best = place
    if best is None:
        raise InsufficientCapacity(f"fewer than {p} finite slots in [{t1}, {t2})")
    return best
