"""Brute-force ground truth on tiny instances.

Deliberately naive: min-sum objectives enumerate every per-interval count vector
(and every job order where the order is free); the makespan objective enumerates
every slot subset of the required size. Nothing here calls the solvers except the
relaxed LP value ``Z``, which both sides share by definition.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._kernels import best_profile_sequence
from .instance import (
    Instance,
    InsufficientCapacity,
    ReservationProfile,
    Schedule,
    TariffFunction,
    schedule_in_profile,
)
from .makespan import effective_makespan, solve_relaxed


class BudgetExceeded(Exception):
    """The enumeration would exceed its configured budget."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_profiles: int = 10**7
    max_permutations: int = math.factorial(8)

    @classmethod
    def from_env(cls) -> "EnumerationBudget":
        """``TARIFFSCHED_BUDGET=N`` or ``N,M`` overrides profile (and permutation) caps."""
        raw = os.environ.get("TARIFFSCHED_BUDGET")
        if not raw:
            return cls()
        parts = [int(x) for x in raw.split(",")]
        if len(parts) == 1:
            return cls(max_profiles=parts[0])
        return cls(max_profiles=parts[0], max_permutations=parts[1])


@dataclass(frozen=True)
class OracleResult:
    total: Fraction
    witness: Schedule


@dataclass(frozen=True)
class MakespanOracleResult:
    total: Fraction
    slots: tuple[int, ...]
    Z: Fraction


def evaluate_minsum(sequence: Sequence[int], profile: ReservationProfile, instance: Instance) -> Fraction:
    """``sum w_j C_j + E`` when ``sequence`` runs back-to-back in the profile's slots."""
    tariff = instance.tariff
    slots = []
    tcost = Fraction(0)
    for iv, c in zip(tariff.intervals, profile.counts):
        if c:
            if not iv.finite:
                raise InsufficientCapacity("profile uses an infinite-cost interval")
            slots.extend(range(iv.start, iv.start + c))
            tcost += c * iv.cost
    by_id = {j.id: j for j in instance.jobs}
    pos = 0
    sched = Fraction(0)
    for jid in sequence:
        job = by_id[jid]
        pos += job.p
        if pos > len(slots):
            raise InsufficientCapacity(f"profile capacity {len(slots)} too small")
        sched += job.w * (slots[pos - 1] + 1)
    return sched + tcost


def enumerate_profiles(tariff: TariffFunction, total: int) -> list[tuple[int, ...]]:
    """All count vectors summing to ``total``, lexicographic order, finite intervals only."""
    caps = [iv.length if iv.finite else 0 for iv in tariff.intervals]
    suffix = [0] * (len(caps) + 1)
    for k in range(len(caps) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + caps[k]
    out: list[tuple[int, ...]] = []

    def rec(k, left, acc):
        if k == len(caps):
            if left == 0:
                out.append(tuple(acc))
            return
        for c in range(0, min(caps[k], left) + 1):
            if left - c <= suffix[k + 1]:
                acc.append(c)
                rec(k + 1, left - c, acc)
                acc.pop()

    rec(0, total, [])
    return out


def _count_profiles(tariff: TariffFunction, total: int) -> int:
    # polynomial coefficient count, cheap enough to check the budget up front
    ways = [1] + [0] * total
    for iv in tariff.intervals:
        cap = iv.length if iv.finite else 0
        nxt = [0] * (total + 1)
        for s, v in enumerate(ways):
            if v:
                for c in range(0, min(cap, total - s) + 1):
                    nxt[s + c] += v
        ways = nxt
    return ways[total]


def _scale(instance: Instance) -> int:
    dens = [j.w.denominator for j in instance.jobs]
    dens += [iv.cost.denominator for iv in instance.tariff.intervals if iv.finite]
    return math.lcm(1, *dens)


def _minsum_search(instance: Instance, sequences: list[tuple[int, ...]], budget: EnumerationBudget, objective: str) -> OracleResult:
    tariff = instance.tariff
    jobs = instance.jobs
    if not jobs:
        empty = ReservationProfile((0,) * tariff.K)
        return OracleResult(Fraction(0), schedule_in_profile([], empty, instance, objective))
    total_p = sum(j.p for j in jobs)
    n_prof = _count_profiles(tariff, total_p)
    if n_prof == 0:
        raise InsufficientCapacity(f"fewer than {total_p} finite slots")
    if n_prof > budget.max_profiles:
        raise BudgetExceeded(f"{n_prof} profiles exceed budget {budget.max_profiles}")
    if len(sequences) > budget.max_permutations:
        raise BudgetExceeded(f"{len(sequences)} sequences exceed budget {budget.max_permutations}")
    profiles = enumerate_profiles(tariff, total_p)
    scale = _scale(instance)
    ends = np.empty((len(profiles), total_p), dtype=np.int64)
    tcost = np.empty(len(profiles), dtype=np.int64)
    for a, counts in enumerate(profiles):
        row = []
        cost = Fraction(0)
        for iv, c in zip(tariff.intervals, counts):
            row.extend(range(iv.start + 1, iv.start + c + 1))
            if c:
                cost += c * iv.cost
        ends[a] = row
        tcost[a] = int(cost * scale)
    index = {j.id: i for i, j in enumerate(jobs)}
    perms = np.array([[index[jid] for jid in seq] for seq in sequences], dtype=np.int64)
    p = np.array([j.p for j in jobs], dtype=np.int64)
    w = np.array([int(j.w * scale) for j in jobs], dtype=np.int64)
    val, a, b = best_profile_sequence(ends, tcost, perms, p, w)
    profile = ReservationProfile(profiles[a])
    witness = schedule_in_profile(sequences[b], profile, instance, objective)
    total = Fraction(val, scale)
    if witness.total_cost != total:  # pragma: no cover - guards the integer scaling
        raise AssertionError(f"kernel value {total} != witness {witness.total_cost}")
    return OracleResult(total, witness)


def opt_fixed_sequence(instance: Instance, sequence: Sequence[int], budget: EnumerationBudget | None = None) -> OracleResult:
    budget = budget or EnumerationBudget.from_env()
    return _minsum_search(instance, [tuple(sequence)], budget, "wsumcj")


def opt_unweighted(instance: Instance, budget: EnumerationBudget | None = None) -> OracleResult:
    """Optimum of ``sum C_j + E``; the order is fixed to shortest-processing-time first."""
    budget = budget or EnumerationBudget.from_env()
    unit = instance.with_unit_weights()
    order = tuple(j.id for j in sorted(unit.jobs, key=lambda j: (j.p, j.id)))
    return _minsum_search(unit, [order], budget, "sumcj")


def opt_weighted(instance: Instance, budget: EnumerationBudget | None = None) -> OracleResult:
    budget = budget or EnumerationBudget.from_env()
    n = instance.n
    if math.factorial(n) > budget.max_permutations:
        raise BudgetExceeded(f"{n}! sequences exceed budget {budget.max_permutations}")
    ids = [j.id for j in instance.jobs]
    return _minsum_search(instance, list(itertools.permutations(ids)), budget, "wsumcj")


def opt_makespan(instance: Instance, budget: EnumerationBudget | None = None) -> MakespanOracleResult:
    """Enumerate every ``ceil(Z)``-subset of finite slots."""
    budget = budget or EnumerationBudget.from_env()
    Z = solve_relaxed(instance).Z
    need = math.ceil(Z)
    if need == 0:
        return MakespanOracleResult(Fraction(0), (), Z)
    tariff = instance.tariff
    finite = [t for iv in tariff.intervals if iv.finite for t in range(iv.start, iv.end)]
    if len(finite) < need:
        raise InsufficientCapacity(f"fewer than {need} finite slots")
    if math.comb(len(finite), need) > budget.max_profiles:
        raise BudgetExceeded(f"C({len(finite)}, {need}) subsets exceed budget {budget.max_profiles}")
    cost = {}
    for iv in tariff.intervals:
        if iv.finite:
            for t in range(iv.start, iv.end):
                cost[t] = iv.cost
    best = None
    for subset in itertools.combinations(finite, need):
        total = sum((cost[t] for t in subset), Fraction(0)) + effective_makespan(subset[-1] + 1, Z)
        if best is None or total < best[0]:
            best = (total, subset)
    return MakespanOracleResult(best[0], best[1], Z)
