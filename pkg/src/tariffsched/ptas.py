"""Approximation scheme for ``sum w_j C_j + E`` on one machine.

Jobs are described by their completion weights (the remaining weight at the
moment they finish) rather than their completion times. The weight axis is cut
into geometric intervals ``[(1+eps)^(u-1), (1+eps)^u)`` and a DP walks them from
the top, deciding which jobs finish in each one. A state ``[J_u, b, avg]`` stores
the earliest time ``t`` at which the jobs outside ``J_u`` can be done with tariff
spend at most ``b`` and average remaining weight at most ``avg``; ``b`` and ``avg``
live on geometric grids. Zero-weight jobs are appended after the last weighted job.

The job-set families are enumerated in full, so the number of positive-weight
jobs is capped (12 by default, 16 at most).
"""

from __future__ import annotations

import bisect
import math
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
from .tariff import WindowCost, cheapest_slots, first_finite_slots_cost, trim_trailing_infinite

OBJECTIVE = "wsumcj"
DEFAULT_MAX_WEIGHTED_JOBS = 12
HARD_MAX_WEIGHTED_JOBS = 16


class EnumerationLimitExceeded(ValueError):
    """Too many positive-weight jobs for full job-set enumeration."""


@dataclass(frozen=True)
class WeightSchedule:
    completion_weights: dict

    def starting_weight(self, job: Job) -> Fraction:
        return self.completion_weights[job.id] - job.w

    def order(self) -> list[int]:
        """Time order: decreasing completion weight, ties by id."""
        return sorted(self.completion_weights, key=lambda j: (-self.completion_weights[j], j))


@dataclass
class PtasState:
    u: int
    jobset: frozenset
    b: Fraction
    avg: Fraction
    t: int
    backlink: "PtasState | None" = field(default=None, repr=False)
    b_index: int = 0
    avg_index: int = 0


_TOL = 1e-9


def _near(x: float, y: float) -> bool:
    return abs(x - y) <= _TOL * (1.0 + abs(x) + abs(y))


def _le(fa: float, fb: float, exact) -> bool:
    """``a <= b`` decided on floats unless they are too close to call."""
    if _near(fa, fb):
        return exact()
    return fa < fb


def _round_up_index(grid: Sequence[Fraction], approx: Sequence[float], xf: float, exact) -> int | None:
    """Index of the least grid member >= x, where ``xf`` approximates x = ``exact()``."""
    i = bisect.bisect_left(approx, xf)
    if (i > 0 and _near(approx[i - 1], xf)) or (i < len(approx) and _near(approx[i], xf)):
        i = bisect.bisect_left(grid, exact())
    return i if i < len(grid) else None


@dataclass(frozen=True)
class Grids:
    nu: int
    B: tuple[Fraction, ...]
    AVG: tuple[Fraction, ...]
    eta1: Fraction
    eta2: Fraction
    E_max: Fraction

    def __post_init__(self):
        object.__setattr__(self, "B_f", tuple(float(v) for v in self.B))
        object.__setattr__(self, "AVG_f", tuple(float(v) for v in self.AVG))

    def round_b(self, x: Fraction) -> Fraction | None:
        """Least member of ``B`` that is at least ``x``; ``None`` above the grid."""
        i = _round_up_index(self.B, self.B_f, float(x), lambda: x)
        return None if i is None else self.B[i]

    def round_avg(self, x: Fraction) -> Fraction | None:
        i = _round_up_index(self.AVG, self.AVG_f, float(x), lambda: x)
        return None if i is None else self.AVG[i]


@dataclass(frozen=True)
class PtasResult:
    schedule: Schedule
    dp_value: Fraction
    scale: int
    grids: Grids
    states: int


def _scale(instance: Instance) -> int:
    dens = [j.w.denominator for j in instance.jobs]
    dens += [iv.cost.denominator for iv in instance.tariff.intervals if iv.finite]
    return math.lcm(1, *dens)


def scale_instance(instance: Instance) -> tuple[Instance, int]:
    """Multiply weights and finite tariffs by a common factor so both are integers."""
    s = _scale(instance)
    jobs = [Job(j.id, j.p, j.w * s, j.p_per_machine) for j in instance.jobs]
    tariff = TariffFunction.from_triples(
        [(iv.start, iv.end, iv.cost * s if iv.finite else iv.cost) for iv in instance.tariff.intervals]
    )
    return Instance(jobs, tariff, instance.machines), s


def round_up_power(x: Fraction, base: Fraction) -> Fraction:
    """Smallest ``base**i`` (``i >= 0``) that is at least ``x``; ``x`` must be >= 1."""
    i = max(0, math.floor(math.log(x) / math.log(base)) - 1) if x > 1 else 0
    v = base**i
    while v < x:
        v *= base
        i += 1
    while i > 0 and v / base >= x:
        v /= base
        i -= 1
    return v


def round_weights(instance: Instance, eps) -> Instance:
    """Round every positive weight up to an integer power of ``1 + eps``.

    Weights must already be integers (see :func:`scale_instance`).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    base = 1 + eps
    jobs = [Job(j.id, j.p, round_up_power(j.w, base) if j.w > 0 else Fraction(0), j.p_per_machine) for j in instance.jobs]
    return Instance(jobs, instance.tariff, instance.machines)


def _ceil_log(x: Fraction, base: Fraction) -> int:
    """Least integer ``i >= 0`` with ``base**i >= x``."""
    if x <= 1:
        return 0
    i = max(0, math.ceil(math.log(x) / math.log(base)) - 2)
    v = base**i
    while v < x:
        v *= base
        i += 1
    return i


def choose_eta(eps: Fraction, nu: int) -> Fraction:
    """Rational step with ``(1 + eta)**nu <= 1 + eps``."""
    if nu <= 1:
        return eps / 2
    eta = eps / (2 * nu)
    # 2^(1/(nu-1)) - 1 is irrational; take a rational value below it
    root = Fraction(math.expm1(math.log(2) / (nu - 1))).limit_denominator(10**6)
    while (1 + root) ** (nu - 1) > 2:
        root *= Fraction(999, 1000)
    return min(eta, root)


def _grid(step: Fraction, top: int) -> tuple[Fraction, ...]:
    out = [Fraction(0), Fraction(1)]
    v = Fraction(1)
    for _ in range(top):
        v *= 1 + step
        out.append(v)
    return tuple(out)


def build_grids(instance: Instance, eps) -> Grids:
    """Geometric grids for budgets and average costs on a rounded, integer instance."""
    eps = Fraction(eps)
    weighted = [j for j in instance.jobs if j.w > 0]
    total_w = sum((j.w for j in weighted), Fraction(0))
    nu = max(1, _ceil_log(total_w, 1 + eps))
    eta = choose_eta(eps, nu)
    p_all = sum(j.p for j in instance.jobs)
    e_max = first_finite_slots_cost(instance.tariff, p_all)
    # nu extra steps absorb the round-ups accumulated along a chain of nu links
    omega1 = _ceil_log(e_max, 1 + eta) + nu
    omega2 = _ceil_log((1 + eps) ** nu, 1 + eta) + nu
    return Grids(nu, _grid(eta, omega1), _grid(eta, omega2), eta, eta, e_max)


def t_lower_bound(t1: int, avg1: Fraction, avg2: Fraction, c: Fraction) -> int | None:
    """Least ``t >= 0`` from which ``avg2 * t >= c * t + t1 * (avg1 - c)`` holds for good."""
    resid = t1 * (avg1 - c)
    slope = avg2 - c
    if slope < 0:
        return None
    if slope == 0:
        return 0 if resid <= 0 else None
    return max(0, math.ceil(resid / slope))


def transition(
    z1: PtasState,
    jobset2: frozenset,
    b2: Fraction,
    avg2: Fraction,
    c: Fraction,
    window_cost: WindowCost,
) -> int | None:
    """Earliest end of the block ``z1.jobset - jobset2`` for target state ``[jobset2, b2, avg2]``.

    ``c`` is the snapped remaining weight charged while the block runs and
    ``window_cost`` evaluates ``E(p(block), [t(z1), .))``.
    """
    if not jobset2 <= z1.jobset or b2 < z1.b:
        return None
    t_lb = t_lower_bound(z1.t, z1.avg, avg2, c)
    if t_lb is None:
        return None
    return window_cost.earliest_within(b2 - z1.b, max(z1.t, t_lb))


def _pareto_insert(front: list, st: PtasState, c_next: Fraction, grids: Grids) -> bool:
    """Keep states not dominated on (b, avg*t - c_next*t, t); ``c_next`` is the next charge.

    Future costs only depend on a state through these three numbers, each
    monotonically, so a dominated state can never lead to a better end value.
    """
    cf = float(c_next)
    kf = (grids.AVG_f[st.avg_index] - cf) * st.t
    entry = [st, kf, None]

    def key(e):
        if e[2] is None:
            e[2] = (e[0].avg - c_next) * e[0].t
        return e[2]

    keep = []
    for o in front:
        os_ = o[0]
        if (
            os_.t <= st.t
            and os_.b_index <= st.b_index
            and _le(o[1], kf, lambda: key(o) <= key(entry))
        ):
            return False
        if not (
            st.t <= os_.t
            and st.b_index <= os_.b_index
            and _le(kf, o[1], lambda: key(entry) <= key(o))
        ):
            keep.append(o)
    keep.append(entry)
    front[:] = keep
    return True


def _fast_transition(z1: PtasState, bi2: int, ai2: int, c: Fraction, cf: float, wc: WindowCost, wcf, grids: Grids):
    """Index-based :func:`transition` that only falls back to exact rationals near ties."""
    avg2, avg2f = grids.AVG[ai2], grids.AVG_f[ai2]
    avg1f = grids.AVG_f[z1.avg_index]
    slope_f = avg2f - cf
    if _near(avg2f, cf):
        t_lb = t_lower_bound(z1.t, z1.avg, avg2, c)
    elif slope_f < 0:
        return None
    else:
        qf = z1.t * (avg1f - cf) / slope_f
        if _near(qf, round(qf)):
            t_lb = t_lower_bound(z1.t, z1.avg, avg2, c)
        else:
            t_lb = max(0, math.ceil(qf))
    if t_lb is None:
        return None
    lower = max(z1.t, t_lb)
    if lower > wc.tariff.horizon:
        return None
    budget_f = grids.B_f[bi2] - grids.B_f[z1.b_index]
    bps = wc.breakpoints
    lo, hi = 0, len(bps)
    while lo < hi:
        mid = (lo + hi) // 2
        if _le(wcf[mid], budget_f, lambda: bps[mid][1] <= grids.B[bi2] - z1.b):
            hi = mid
        else:
            lo = mid + 1
    if lo == len(bps):
        return None
    return max(lower, bps[lo][0])


def _subsets_within(items: Sequence[int], weights: dict, cap: Fraction):
    """All subsets of ``items`` (as frozensets) whose weight sum is at most ``cap``."""
    out = [(frozenset(), Fraction(0))]
    for j in items:
        out += [(s | {j}, w + weights[j]) for s, w in out if w + weights[j] <= cap]
    return [s for s, _ in out]


def _weighted_limit(instance: Instance, max_weighted_jobs: int) -> None:
    if max_weighted_jobs > HARD_MAX_WEIGHTED_JOBS:
        raise EnumerationLimitExceeded(
            f"max_weighted_jobs={max_weighted_jobs} exceeds the hard limit {HARD_MAX_WEIGHTED_JOBS}"
        )
    k = sum(1 for j in instance.jobs if j.w > 0)
    if k > max_weighted_jobs:
        raise EnumerationLimitExceeded(
            f"{k} positive-weight jobs exceed the enumeration limit {max_weighted_jobs}"
        )


def run_detailed(instance: Instance, eps, max_weighted_jobs: int = DEFAULT_MAX_WEIGHTED_JOBS) -> PtasResult:
    if instance.machines != 1:
        raise ValueError("the approximation scheme needs a single-machine instance")
    _weighted_limit(instance, max_weighted_jobs)
    eps = Fraction(eps)
    trimmed, _ = trim_trailing_infinite(instance.tariff)
    scaled, scale = scale_instance(instance.with_tariff(trimmed))
    rounded = round_weights(scaled, eps)
    tariff = rounded.tariff
    base = 1 + eps
    grids = build_grids(rounded, eps)
    weights = {j.id: j.w for j in rounded.jobs if j.w > 0}
    ptime = {j.id: j.p for j in rounded.jobs}
    zero_jobs = [j.id for j in rounded.jobs if j.w == 0]
    p_zero = sum(ptime[j] for j in zero_jobs)
    if sum(ptime.values()) > tariff.finite_capacity:
        raise InsufficientCapacity(f"fewer than {sum(ptime.values())} finite slots")

    nu = grids.nu
    powers = [base**u for u in range(nu + 1)]
    start = PtasState(nu, frozenset(weights), grids.B[0], grids.AVG[0], 0)
    layer: dict[frozenset, list[PtasState]] = {start.jobset: [start]}
    windows: dict[tuple[int, int], tuple[WindowCost, list[float]]] = {}
    B, AVG, B_f, AVG_f = grids.B, grids.AVG, grids.B_f, grids.AVG_f
    n_states = 1
    for u in range(nu - 1, -1, -1):
        c = powers[u + 1]
        cf = float(c)
        c_next = powers[u] if u > 0 else Fraction(0)
        nxt: dict[frozenset, list] = {}
        for jobset, front in layer.items():
            if u == 0:
                targets = [frozenset()]
            else:
                targets = _subsets_within(sorted(jobset), weights, powers[u])
            for target in targets:
                block_p = sum(ptime[j] for j in jobset - target)
                for z1 in front:
                    if block_p == 0:
                        # nothing completes in this weight interval: carry the state
                        moves = [(z1.b_index, z1.avg_index, z1.t)]
                    else:
                        key = (block_p, z1.t)
                        if key not in windows:
                            wc = WindowCost(tariff, block_p, z1.t)
                            windows[key] = (wc, [float(v) for _, v in wc.breakpoints])
                        wc, wcf = windows[key]
                        moves = []
                        for (t, cost), cost_f in zip(wc.breakpoints, wcf):
                            t = max(t, z1.t)
                            bi = _round_up_index(B, B_f, B_f[z1.b_index] + cost_f, lambda: z1.b + cost)
                            avg_f = (AVG_f[z1.avg_index] * z1.t + cf * (t - z1.t)) / t
                            ai = _round_up_index(
                                AVG, AVG_f, avg_f, lambda: (z1.avg * z1.t + c * (t - z1.t)) / t
                            )
                            if bi is None or ai is None:
                                continue
                            t2 = _fast_transition(z1, bi, ai, c, cf, wc, wcf, grids)
                            if t2 is None:  # pragma: no cover - the pushed candidate is feasible
                                continue
                            moves.append((bi, ai, t2))
                    for bi, ai, t2 in moves:
                        st = PtasState(u, target, B[bi], AVG[ai], t2, z1, bi, ai)
                        if _pareto_insert(nxt.setdefault(target, []), st, c_next, grids):
                            n_states += 1
        layer = {k: [e[0] for e in v] for k, v in nxt.items()}

    best = None
    for st in layer.get(frozenset(), []):
        try:
            tail = cheapest_slots(tariff, p_zero, (st.t, tariff.horizon)).total_cost
        except InsufficientCapacity:
            continue
        score = st.b + st.avg * st.t + tail
        if best is None or (score, st.t) < (best[0], best[1].t):
            best = (score, st)
    if best is None:
        raise InsufficientCapacity("no state leaves room for the zero-weight jobs")
    score, final = best
    schedule = _realize(final, rounded, instance, ptime, zero_jobs, p_zero)
    return PtasResult(schedule, score / scale, scale, grids, n_states)


def _realize(final: PtasState, rounded: Instance, original: Instance, ptime, zero_jobs, p_zero) -> Schedule:
    tariff = rounded.tariff
    chain = []
    st = final
    while st.backlink is not None:
        chain.append((st.backlink, st))
        st = st.backlink
    chain.reverse()
    orig_w = {j.id: j.w for j in original.jobs}
    order: list[int] = []
    slots: list[int] = []
    for z1, z2 in chain:
        block = sorted(z1.jobset - z2.jobset, key=lambda j: (-Fraction(orig_w[j]) / ptime[j], j))
        if not block:
            continue
        p = sum(ptime[j] for j in block)
        slots.extend(cheapest_slots(tariff, p, (z1.t, z2.t)).slots())
        order.extend(block)
    if p_zero:
        slots.extend(cheapest_slots(tariff, p_zero, (final.t, tariff.horizon)).slots())
        order.extend(sorted(zero_jobs))
    by_id = {j.id: j for j in original.jobs}
    remaining = sum((by_id[j].w for j in order), Fraction(0))
    cw = {}
    for j in order:
        cw[j] = remaining
        remaining -= by_id[j].w
    profile = canonical_profile(slots, original.tariff)
    return weight_to_time(WeightSchedule(cw), profile, original)


def run(instance: Instance, eps, max_weighted_jobs: int = DEFAULT_MAX_WEIGHTED_JOBS) -> Schedule:
    """Schedule within ``1 + O(eps)`` of the optimum of ``sum w_j C_j + E``."""
    return run_detailed(instance, eps, max_weighted_jobs).schedule


def weight_to_time(ws: WeightSchedule, profile: ReservationProfile, instance: Instance) -> Schedule:
    """Process jobs by decreasing completion weight, back to back in the profile's slots."""
    if profile.capacity < instance.total_processing():
        raise InsufficientCapacity(
            f"profile holds {profile.capacity} slots, jobs need {instance.total_processing()}"
        )
    return schedule_in_profile(ws.order(), profile, instance, OBJECTIVE)


def weight_schedule_cost(ws: WeightSchedule, completion_times: dict) -> Fraction:
    """``sum (C_j^w - C_next^w) * C_j`` over jobs in decreasing completion weight.

    Idle weight below a job is charged at that job's completion time, so gaps
    never make this smaller than ``sum w_j C_j``.
    """
    order = ws.order()
    total = Fraction(0)
    for k, j in enumerate(order):
        below = ws.completion_weights[order[k + 1]] if k + 1 < len(order) else Fraction(0)
        total += (ws.completion_weights[j] - below) * completion_times[j]
    return total
