"""Optimal slot reservation for a fixed job sequence on one machine.

The schedule is cut at split points (times from ``{s_k, s_k + 1, d_K}`` that no
job straddles). Each region between two split points is solved by guessing the
pivot job and its most expensive tariff, after which every job's slots follow
from a cost threshold. A DP over (jobs done, split point) glues regions together.
With the order fixed to SPT this solves ``sum C_j + E`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .instance import (
    Instance,
    InsufficientCapacity,
    Job,
    ReservationProfile,
    Schedule,
    TariffFunction,
    canonical_profile,
    schedule_in_profile,
)
from .makespan import single_job_slot_selection
from .tariff import (
    finite_costs_in,
    split_point_candidates,
    threshold_reserve,
    trim_trailing_infinite,
    threshold_reserve_backward,
)


@dataclass(frozen=True)
class Region:
    start: int
    end: int
    jobs: tuple[Job, ...]

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"empty region [{self.start}, {self.end})")
        object.__setattr__(self, "jobs", tuple(self.jobs))


@dataclass(frozen=True)
class RegionSolution:
    cost: Fraction
    job_slots: tuple[tuple[int, ...], ...]
    completion_times: dict = field(hash=False)
    counts: tuple[int, ...] = ()

    @property
    def slot_sum(self) -> int:
        return sum(sum(s) for s in self.job_slots)


@dataclass
class SeqDpState:
    j: int
    t: int
    value: Fraction | None
    backlink: tuple[int, int] | None = None


def spt_order(jobs: Sequence[Job]) -> list[int]:
    return [j.id for j in sorted(jobs, key=lambda j: (j.p, j.id))]


def _slot_cost(tariff: TariffFunction, slots) -> Fraction:
    total = Fraction(0)
    for t in slots:
        total += tariff.intervals[tariff.interval_index(t)].cost
    return total


def _forward(tariff, jobs, bounds, cur, end):
    out = []
    for job, bound in zip(jobs, bounds):
        sel = threshold_reserve(tariff, cur, job.p, bound, end=end)
        out.append(tuple(sel.slots()))
        cur = sel.completion
    return out, cur


def _candidate(tariff, jobs, x, e_max, a, b, case):
    w = [j.w for j in jobs]
    before = [e_max + sum(w[i:x], Fraction(0)) for i in range(x)]
    after = [e_max - sum(w[x:i], Fraction(0)) for i in range(x + 1, len(jobs))]
    try:
        head, cur = _forward(tariff, jobs[:x], before, a, b)
        if case == 1:
            tail, _ = _forward(tariff, jobs[x:], [e_max] + after, cur, b)
            return head + tail
        back = []
        end = b
        for job, bound in zip(reversed(jobs[x + 1 :]), reversed(after)):
            sel = threshold_reserve_backward(tariff, end, job.p, bound, start=cur)
            back.append(tuple(sel.slots()))
            end = sel.first_slot
        if end <= cur:
            return None
        place = single_job_slot_selection(jobs[x].p, (cur, end), jobs[x].w, tariff)
        return head + [tuple(place.selection.slots())] + back[::-1]
    except InsufficientCapacity:
        return None


def _admissible(job_slots, interior) -> bool:
    starts = [s[0] for s in job_slots]
    ends = [s[-1] + 1 for s in job_slots]
    if any(c in interior for c in ends):
        return False
    first, last = starts[0], ends[-1]
    for q in interior:
        if first < q < last and not any(s < q < c for s, c in zip(starts, ends)):
            return False
    return True


def region_schedule(
    region: Region, tariff: TariffFunction, candidates: Sequence[int] | None = None
) -> RegionSolution | None:
    """Cheapest placement of the region's jobs, in order, with no interior split point.

    Returns ``None`` when no admissible placement exists. Leading and trailing idle
    time inside the region is allowed; a completion on an interior candidate point,
    or an interior candidate point between the first start and last completion that
    no job straddles, rejects the placement.
    """
    a, b = region.start, region.end
    jobs = region.jobs
    if not jobs:
        return RegionSolution(Fraction(0), (), {}, (0,) * tariff.K)
    if candidates is None:
        candidates = split_point_candidates(tariff)
    interior = {q for q in candidates if a < q < b}
    best = None
    for x in range(len(jobs)):
        for e_max in finite_costs_in(tariff, a, b):
            for case in (1, 2):
                job_slots = _candidate(tariff, jobs, x, e_max, a, b, case)
                if job_slots is None or not _admissible(job_slots, interior):
                    continue
                cost = Fraction(0)
                for job, sl in zip(jobs, job_slots):
                    cost += job.w * (sl[-1] + 1) + _slot_cost(tariff, sl)
                key = (cost, sum(sum(s) for s in job_slots))
                if best is None or key < best[0]:
                    best = (key, job_slots)
    if best is None:
        return None
    job_slots = tuple(best[1])
    completion = {job.id: Fraction(sl[-1] + 1) for job, sl in zip(jobs, job_slots)}
    counts = ReservationProfile.from_slots([t for sl in job_slots for t in sl], tariff).counts
    return RegionSolution(best[0][0], job_slots, completion, counts)


def dp_points(tariff: TariffFunction) -> list[int]:
    """Split candidates that can matter: a point right after an infinite slot is
    equivalent to the start of that infinite run and is dropped."""
    out = []
    for t in split_point_candidates(tariff):
        if t > 0 and not tariff.intervals[tariff.interval_index(t - 1)].finite:
            continue
        out.append(t)
    return out


def _capacity(tariff: TariffFunction, a: int, b: int) -> int:
    return sum(
        min(iv.end, b) - max(iv.start, a)
        for iv in tariff.intervals
        if iv.finite and max(iv.start, a) < min(iv.end, b)
    )


def reservation_table(sequence: Sequence[int], instance: Instance):
    """Fill the ``Z(j, t)`` table; returns ``(points, states, regions)``.

    ``states[j][i]`` is a :class:`SeqDpState` for ``t = points[i]``; ``regions`` maps
    ``(j', j, i', i)`` to the region solution used on that link.
    """
    tariff = instance.tariff
    jobs = [instance.job(jid) for jid in sequence]
    n = len(jobs)
    pts = dp_points(tariff)
    cands = split_point_candidates(tariff)
    prefix_p = [0]
    for job in jobs:
        prefix_p.append(prefix_p[-1] + job.p)
    key: list[list] = [[None] * len(pts) for _ in range(n + 1)]
    states = [[SeqDpState(j, t, None) for t in pts] for j in range(n + 1)]
    for i, t in enumerate(pts):
        key[0][i] = (Fraction(0), 0)
        states[0][i].value = Fraction(0)
    regions: dict = {}
    for i in range(1, len(pts)):
        t = pts[i]
        for j in range(1, n + 1):
            best = None
            for ip in range(i):
                tp = pts[ip]
                cap = _capacity(tariff, tp, t)
                for jp in range(j + 1):
                    base = key[jp][ip]
                    if base is None:
                        continue
                    if jp == j:
                        cand = base
                    else:
                        if prefix_p[j] - prefix_p[jp] > cap:
                            continue
                        rk = (jp, j, ip, i)
                        if rk not in regions:
                            regions[rk] = region_schedule(Region(tp, t, tuple(jobs[jp:j])), tariff, cands)
                        sol = regions[rk]
                        if sol is None:
                            continue
                        cand = (base[0] + sol.cost, base[1] + sol.slot_sum)
                    if best is None or cand < best[0]:
                        best = (cand, (jp, ip))
            if best is not None:
                key[j][i] = best[0]
                states[j][i].value = best[0][0]
                states[j][i].backlink = best[1]
    return pts, states, regions


def optimal_reservation(sequence: Sequence[int], instance: Instance, objective: str = "wsumcj") -> Schedule:
    """Minimum ``sum w_j C_j + E`` schedule that processes jobs in ``sequence`` order."""
    if instance.machines != 1:
        raise ValueError("sequence DP needs a single-machine instance")
    ids = sorted(j.id for j in instance.jobs)
    if sorted(sequence) != ids:
        raise ValueError(f"sequence {list(sequence)} is not a permutation of job ids {ids}")
    n = len(sequence)
    if n == 0:
        empty = ReservationProfile((0,) * instance.tariff.K)
        return schedule_in_profile([], empty, instance, objective)
    # trailing infinite intervals are dead weight; solving without them keeps the
    # work independent of how far the horizon extends
    tariff, dropped = trim_trailing_infinite(instance.tariff)
    pts, states, regions = reservation_table(sequence, instance.with_tariff(tariff))
    finals = [(states[n][i].value, i) for i in range(len(pts)) if states[n][i].value is not None]
    if not finals:
        raise InsufficientCapacity("no feasible reservation for the sequence")
    value, i = min(finals)
    slots: list[int] = []
    j = n
    while j > 0:
        jp, ip = states[j][i].backlink
        if jp != j:
            slots.extend(t for sl in regions[jp, j, ip, i].job_slots for t in sl)
        j, i = jp, ip
    profile = canonical_profile(slots, tariff)
    profile = ReservationProfile(profile.counts + (0,) * dropped)
    sched = schedule_in_profile(sequence, profile, instance, objective)
    if sched.total_cost > value:  # pragma: no cover - prefix shifting never costs more
        raise AssertionError("canonical schedule is worse than the DP value")
    return sched


def solve_unweighted(instance: Instance) -> Schedule:
    """Optimal ``sum C_j + E``: SPT order plus the optimal reservation for it."""
    unit = instance.with_unit_weights()
    return optimal_reservation(spt_order(unit.jobs), unit, objective="sumcj")
