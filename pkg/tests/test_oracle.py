import itertools
import math
from fractions import Fraction

import pytest

from tariffsched import oracle
from tariffsched.gen import GenParams, pad_horizon, random_instance
from tariffsched.instance import Instance, InsufficientCapacity, Job, ReservationProfile, TariffFunction

T = TariffFunction.from_triples
TWO = T([(0, 2, 5), (2, 4, 0)])
F = Fraction


def unit_pair():
    return Instance([Job(1, 1, F(1)), Job(2, 1, F(1))], TWO)


def test_evaluate_minsum_examples():
    inst = unit_pair()
    assert oracle.evaluate_minsum([1, 2], ReservationProfile((0, 2)), inst) == 7
    assert oracle.evaluate_minsum([1, 2], ReservationProfile((2, 0)), inst) == 1 + 2 + 10
    empty = Instance([], TWO)
    assert oracle.evaluate_minsum([], ReservationProfile((0, 0)), empty) == 0
    with pytest.raises(InsufficientCapacity):
        oracle.evaluate_minsum([1, 2], ReservationProfile((1, 0)), inst)


def test_opt_examples():
    assert oracle.opt_weighted(unit_pair()).total == 7
    single = Instance([Job(1, 1)], T([(0, 1, 3), (1, 2, 0)]))
    res = oracle.opt_unweighted(single)
    assert res.total == 2 and res.witness.completion_times == {1: 2}


def test_opt_makespan_example():
    inst = Instance([Job(1, 3)], T([(0, 2, 1), (2, 4, 0), (4, 6, 1)]))
    res = oracle.opt_makespan(inst)
    assert res.total == 5 and res.Z == 3


def test_opt_makespan_zero_tariff_uses_fraction():
    jobs = [Job(i, 3, p_per_machine=(3, 3)) for i in (1, 2, 3)]
    inst = Instance(jobs, T([(0, 6, 0)]), machines=2)
    res = oracle.opt_makespan(inst)
    assert res.Z == F(9, 2)
    assert res.total == F(9, 2) and res.slots == (0, 1, 2, 3, 4)


def test_opt_makespan_empty():
    assert oracle.opt_makespan(Instance([], TWO)).total == 0


def test_enumerate_profiles_sums_and_caps():
    profiles = oracle.enumerate_profiles(T([(0, 2, 1), (2, 3, "inf"), (3, 6, 0)]), 3)
    assert profiles == sorted(profiles)
    assert all(sum(p) == 3 and p[1] == 0 and p[0] <= 2 and p[2] <= 3 for p in profiles)
    assert len(profiles) == oracle._count_profiles(T([(0, 2, 1), (2, 3, "inf"), (3, 6, 0)]), 3) == 3


@pytest.mark.parametrize("seed", range(25))
def test_reverse_spt_never_beats_opt_weighted(seed):
    inst = random_instance(seed, GenParams(n_max=5))
    rev = [j.id for j in sorted(inst.jobs, key=lambda j: (-j.p, -j.id))]
    assert oracle.opt_fixed_sequence(inst, rev).total >= oracle.opt_weighted(inst).total


@pytest.mark.parametrize("seed", range(25))
def test_opt_unweighted_below_any_spt_profile(seed):
    inst = random_instance(seed, GenParams(n_max=4)).with_unit_weights()
    spt = [j.id for j in sorted(inst.jobs, key=lambda j: (j.p, j.id))]
    best = oracle.opt_unweighted(inst).total
    for counts in oracle.enumerate_profiles(inst.tariff, inst.total_processing()):
        assert best <= oracle.evaluate_minsum(spt, ReservationProfile(counts), inst)


def _split(tariff, k):
    out = []
    for i, iv in enumerate(tariff.intervals):
        if i == k and iv.length >= 2:
            mid = iv.start + iv.length // 2
            out += [(iv.start, mid, iv.cost), (mid, iv.end, iv.cost)]
        else:
            out.append((iv.start, iv.end, iv.cost))
    return T(out)


@pytest.mark.parametrize("seed", range(20))
def test_oracle_invariant_under_interval_splitting(seed):
    inst = random_instance(seed, GenParams(n_max=4))
    split = inst.with_tariff(_split(inst.tariff, seed % inst.tariff.K))
    assert oracle.opt_weighted(inst).total == oracle.opt_weighted(split).total
    assert oracle.opt_unweighted(inst).total == oracle.opt_unweighted(split).total


@pytest.mark.parametrize("seed", range(15))
def test_prefix_dominance(seed):
    # moving one utilized slot into a cheaper-or-equal earlier interval never hurts
    inst = random_instance(seed, GenParams(n_max=3))
    tariff = inst.tariff
    seq = [j.id for j in inst.jobs]
    for counts in oracle.enumerate_profiles(tariff, inst.total_processing()):
        base = oracle.evaluate_minsum(seq, ReservationProfile(counts), inst)
        for a, b in itertools.permutations(range(tariff.K), 2):
            ia, ib = tariff.intervals[a], tariff.intervals[b]
            if a < b and counts[b] and counts[a] < ia.length and ia.cost <= ib.cost:
                moved = list(counts)
                moved[a] += 1
                moved[b] -= 1
                assert oracle.evaluate_minsum(seq, ReservationProfile(tuple(moved)), inst) <= base


@pytest.mark.parametrize("seed", range(10))
def test_infinite_padding_keeps_makespan_optimum(seed):
    inst = random_instance(seed, GenParams(n_max=3, machines=2))
    assert oracle.opt_makespan(inst).total == oracle.opt_makespan(pad_horizon(inst)).total


def test_budget_exceeded_is_explicit():
    inst = Instance([Job(i, 1, F(1)) for i in range(1, 5)], T([(0, 4, 0), (4, 8, 1)]))
    with pytest.raises(oracle.BudgetExceeded):
        oracle.opt_weighted(inst, oracle.EnumerationBudget(max_permutations=6))
    with pytest.raises(oracle.BudgetExceeded):
        oracle.opt_unweighted(inst, oracle.EnumerationBudget(max_profiles=2))
    with pytest.raises(oracle.BudgetExceeded):
        oracle.opt_makespan(inst, oracle.EnumerationBudget(max_profiles=10))


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("TARIFFSCHED_BUDGET", "123")
    assert oracle.EnumerationBudget.from_env() == oracle.EnumerationBudget(123, math.factorial(8))
    monkeypatch.setenv("TARIFFSCHED_BUDGET", "5,7")
    assert oracle.EnumerationBudget.from_env() == oracle.EnumerationBudget(5, 7)
    monkeypatch.delenv("TARIFFSCHED_BUDGET")
    assert oracle.EnumerationBudget.from_env() == oracle.EnumerationBudget()


def test_witness_is_consistent():
    res = oracle.opt_weighted(unit_pair())
    assert res.witness.total_cost == res.total
    assert res.witness.profile.counts == (0, 2)
