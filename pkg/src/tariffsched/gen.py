"""Seeded random instances for tests, acceptance runs and the ``gen`` command."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .instance import INF, Instance, Job, TariffFunction


@dataclass(frozen=True)
class GenParams:
    n_max: int = 6
    n_min: int = 1
    K_max: int = 4
    horizon_max: int = 12
    cost_max: int = 5
    w_max: int = 5
    machines: int = 1
    zero_weight_prob: float = 0.0
    unit_weights: bool = False


def random_tariff(rng: random.Random, K: int, horizon: int, cost_max: int) -> TariffFunction:
    """``K`` contiguous intervals over ``[0, horizon)`` with integer costs in ``[0, cost_max]``."""
    K = max(1, min(K, horizon))
    cuts = sorted(rng.sample(range(1, horizon), K - 1))
    bounds = [0] + cuts + [horizon]
    return TariffFunction.from_triples(
        [(bounds[k], bounds[k + 1], rng.randint(0, cost_max)) for k in range(K)]
    )


def random_instance(seed: int, params: GenParams = GenParams()) -> Instance:
    """Feasible instance drawn from ``random.Random(seed)``.

    Horizon is at least the total processing time so every job fits.
    """
    rng = random.Random(seed)
    n = rng.randint(params.n_min, params.n_max)
    m = params.machines
    jobs = []
    for j in range(1, n + 1):
        if m == 1:
            p = rng.randint(1, 3)
            per = None
        else:
            per = tuple(rng.randint(1, 3) for _ in range(m))
            p = min(per)
        if params.unit_weights:
            w = Fraction(1)
        elif rng.random() < params.zero_weight_prob:
            w = Fraction(0)
        else:
            w = Fraction(rng.randint(1, params.w_max))
        jobs.append(Job(j, p, w, per))
    total = sum(j.p for j in jobs)
    if m == 1:
        lo = total
        if lo > params.horizon_max:
            # shrink jobs until they fit the horizon cap
            while sum(j.p for j in jobs) > params.horizon_max:
                k = max(range(len(jobs)), key=lambda i: jobs[i].p)
                if jobs[k].p == 1:
                    jobs.pop()
                else:
                    jobs[k] = Job(jobs[k].id, jobs[k].p - 1, jobs[k].w)
            lo = sum(j.p for j in jobs)
    else:
        # Z never exceeds the sum of each job's fastest processing time
        lo = min(sum(j.p for j in jobs), params.horizon_max)
    horizon = rng.randint(max(lo, 1), max(lo, params.horizon_max))
    K = rng.randint(1, params.K_max)
    tariff = random_tariff(rng, K, horizon, params.cost_max)
    return Instance(jobs, tariff, machines=m)


def pad_horizon(instance: Instance) -> Instance:
    """Double the horizon by appending one infinite-cost interval."""
    t = instance.tariff
    triples = [(iv.start, iv.end, iv.cost) for iv in t.intervals]
    triples.append((t.horizon, 2 * t.horizon, INF))
    return instance.with_tariff(TariffFunction.from_triples(triples))


def generate(
    n: int,
    k: int,
    dmax: int,
    emax: int,
    machines: int = 1,
    weighted: bool = True,
    seed: int = 0,
    pmax: int = 3,
) -> Instance:
    """Exactly ``n`` jobs and ``k`` intervals; lengths uniform in ``[1, dmax]``,
    costs uniform in ``[0, emax]``. The last interval is stretched if the jobs
    would not fit otherwise."""
    if n < 0 or k < 1 or dmax < 1 or emax < 0 or machines < 1 or pmax < 1:
        raise ValueError(f"contradictory bounds: n={n} k={k} dmax={dmax} emax={emax} machines={machines}")
    rng = random.Random(seed)
    jobs = []
    for j in range(1, n + 1):
        w = Fraction(rng.randint(1, 5)) if weighted else Fraction(1)
        if machines == 1:
            jobs.append(Job(j, rng.randint(1, pmax), w))
        else:
            per = tuple(rng.randint(1, pmax) for _ in range(machines))
            jobs.append(Job(j, min(per), w, per))
    triples = []
    t = 0
    for _ in range(k):
        length = rng.randint(1, dmax)
        triples.append([t, t + length, rng.randint(0, emax)])
        t += length
    need = sum(j.p for j in jobs)
    if t < need:
        triples[-1][1] += need - t
    return Instance(jobs, TariffFunction.from_triples([tuple(x) for x in triples]), machines=machines)
