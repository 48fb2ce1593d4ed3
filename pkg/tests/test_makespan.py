import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from tariffsched import makespan, oracle
from tariffsched.audit import audit_makespan
from tariffsched.gen import GenParams, random_instance
from tariffsched.instance import INF, Instance, Job, ReservationProfile, TariffFunction
from tariffsched.simplex import LPInfeasible, LPUnbounded, linprog_exact
from tariffsched.tariff import cost_at

T = TariffFunction.from_triples
F = Fraction
THREE = T([(0, 2, 1), (2, 4, 0), (4, 6, 1)])


def machines(p_rows):
    """Jobs from per-job processing-time tuples."""
    return [Job(j + 1, min(row), F(0), tuple(row)) for j, row in enumerate(p_rows)]


def test_relaxed_examples():
    assert makespan.solve_relaxed(Instance([Job(1, 3)], THREE)).Z == 3
    two = Instance(machines([(2, 2), (2, 2)]), T([(0, 4, 0)]), machines=2)
    assert makespan.solve_relaxed(two).Z == 2
    one = Instance(machines([(2, 2)]), T([(0, 4, 0)]), machines=2)
    res = makespan.solve_relaxed(one)
    assert res.Z == 2
    assert sum(res.loads[i][0] / 2 for i in range(2)) == 1


def test_relaxed_respects_infinite_machine():
    inst = Instance(machines([(INF, 3), (2, INF)]), T([(0, 6, 0)]), machines=2)
    res = makespan.solve_relaxed(inst)
    assert res.Z == 3 and res.loads[0][0] == 0 and res.loads[1][1] == 0


@pytest.mark.parametrize("seed", range(30))
def test_relaxed_matches_scipy(seed):
    inst = random_instance(seed, GenParams(n_max=4, machines=1 + seed % 3))
    m, n = inst.machines, inst.n
    nv = m * n + 1
    c = np.zeros(nv)
    c[-1] = 1
    a_eq = np.zeros((n, nv))
    a_ub = np.zeros((n + m, nv))
    for j, job in enumerate(inst.jobs):
        for i in range(m):
            a_eq[j, i * n + j] = 1 / job.processing_on(i)
            a_ub[j, i * n + j] = 1
            a_ub[n + i, i * n + j] = 1
        a_ub[j, -1] = -1
    for i in range(m):
        a_ub[n + i, -1] = -1
    ref = linprog(c, A_ub=a_ub, b_ub=np.zeros(n + m), A_eq=a_eq, b_eq=np.ones(n), method="highs")
    assert abs(float(makespan.solve_relaxed(inst).Z) - ref.fun) < 1e-7


def test_simplex_edge_cases():
    res = linprog_exact([1, 1], A_ub=[[-1, -1]], b_ub=[-2])
    assert res.objective == 2
    with pytest.raises(LPInfeasible):
        linprog_exact([1], A_eq=[[1]], b_eq=[-1])
    with pytest.raises(LPUnbounded):
        linprog_exact([-1], A_ub=[[-1]], b_ub=[0])


def test_choose_reservation_examples():
    cand = makespan.choose_reservation(F(3), THREE)
    assert cand.total == 5 and cand.C_star == 3 and cand.tariff_cost == 2
    zero = makespan.choose_reservation(F(5, 2), T([(0, 8, 0)]))
    assert zero.C_star == 3 and zero.tariff_cost == 0 and zero.total == F(5, 2)
    tie = makespan.choose_reservation(F(1), T([(0, 2, 2), (2, 4, 0)]))
    assert tie.total == 3 and tie.C_star == 1


@pytest.mark.parametrize("seed", range(300))
def test_choose_reservation_matches_subset_enumeration(seed):
    rng = random.Random(seed)
    t, triples = 0, []
    for _ in range(rng.randint(1, 4)):
        length = rng.randint(1, 4)
        triples.append((t, t + length, INF if rng.random() < 0.1 else rng.randint(0, 6)))
        t += length
    tariff = T(triples)
    finite = [s for s in range(t) if cost_at(tariff, s) != INF]
    if not finite:
        return
    Z = F(rng.randint(1, 2 * len(finite)), 2)
    need = -(-Z.numerator // Z.denominator)
    if need > len(finite):
        return
    best = min(sum(cost_at(tariff, s) for s in sub) + makespan.effective_makespan(sub[-1] + 1, Z)
               for sub in itertools.combinations(finite, need))
    assert makespan.choose_reservation(Z, tariff).total == best


def test_timetable_examples():
    inst = Instance([Job(1, 3)], THREE)
    loads = makespan.solve_relaxed(inst)
    sched = makespan.build_timetable(loads, ReservationProfile((2, 1, 0)), THREE)
    assert [(s.start, s.end) for s in sched.segments] == [(0, 3)]
    diag = makespan.LpLoads(F(1), ((F(1), F(0)), (F(0), F(1))), (1, 2))
    sched = makespan.build_timetable(diag, ReservationProfile((0, 1)), T([(0, 2, 2), (2, 4, 0)]))
    assert sorted((s.job, s.machine, s.start, s.end) for s in sched.segments) == [(1, 0, 2, 3), (2, 1, 2, 3)]


@pytest.mark.parametrize("seed", range(40))
def test_timetable_resums_loads(seed):
    inst = random_instance(3000 + seed, GenParams(n_max=4, machines=1 + seed % 3))
    sched, loads, cand = makespan.solve_detailed(inst)
    spent = {}
    for s in sched.segments:
        key = (s.machine, s.job)
        spent[key] = spent.get(key, 0) + (s.end - s.start)
    for i in range(loads.machines):
        for j, jid in enumerate(loads.job_ids):
            assert spent.get((i, jid), 0) == loads.loads[i][j]
    assert sched.scheduling_cost <= cand.makespan
    assert audit_makespan(sched, inst).ok


def test_decompose_durations_sum_to_z():
    loads = makespan.LpLoads(F(3), ((F(1), F(2)), (F(2), F(1))), (1, 2))
    steps = makespan.decompose(loads)
    assert sum(d for d, _ in steps) == 3


def test_solve_examples():
    assert makespan.solve(Instance([Job(1, 3)], THREE)).total_cost == 5
    sched = makespan.solve(Instance([Job(1, 4)], T([(0, 5, 0)])))
    assert sched.scheduling_cost == 4 and sched.tariff_cost == 0 and sched.total_cost == 4


@pytest.mark.parametrize("seed", range(40))
def test_solve_matches_oracle(seed):
    inst = random_instance(4000 + seed, GenParams(n_max=4, machines=1 + seed % 3))
    assert makespan.solve(inst).total_cost == oracle.opt_makespan(inst).total


def test_single_job_examples():
    place = makespan.single_job_slot_selection(1, (0, 2), F(1), T([(0, 1, 3), (1, 2, 0)]))
    assert place.selection.slots() == [1] and place.completion == 2 and place.cost == 2
    tariff = T([(0, 3, 4), (3, 5, 1), (5, 8, 2)])
    zero = makespan.single_job_slot_selection(3, (0, 8), F(0), tariff)
    assert zero.cost == 4
    flat = makespan.single_job_slot_selection(3, (2, 9), F(1), T([(0, 10, 2)]))
    assert flat.selection.slots() == [2, 3, 4]


@pytest.mark.parametrize("seed", range(60))
def test_single_job_matches_enumeration(seed):
    rng = random.Random(seed)
    t, triples = 0, []
    for _ in range(rng.randint(1, 4)):
        length = rng.randint(1, 4)
        triples.append((t, t + length, INF if rng.random() < 0.1 else F(rng.randint(0, 8), rng.randint(1, 2))))
        t += length
    tariff = T(triples)
    t1 = rng.randint(0, t - 1)
    t2 = rng.randint(t1 + 1, min(t, t1 + 14))
    p = rng.randint(1, 4)
    w = F(rng.randint(0, 5), rng.randint(1, 3))
    finite = [s for s in range(t1, t2) if cost_at(tariff, s) != INF]
    if len(finite) < p:
        return
    best = min(w * (sub[-1] + 1) + sum(cost_at(tariff, s) for s in sub) for sub in itertools.combinations(finite, p))
    assert makespan.single_job_slot_selection(p, (t1, t2), w, tariff).cost == best
