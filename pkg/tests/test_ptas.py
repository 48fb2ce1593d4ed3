import random
from fractions import Fraction

import pytest

from tariffsched import oracle, ptas
from tariffsched.gen import GenParams, random_instance
from tariffsched.instance import Instance, Job, ReservationProfile, TariffFunction
from tariffsched.tariff import WindowCost

T = TariffFunction.from_triples
F = Fraction


def one_machine(ws, tariff=None):
    return Instance([Job(k + 1, 1, F(w)) for k, w in enumerate(ws)], tariff or T([(0, 8, 1)]))


def test_round_weights_examples():
    out = ptas.round_weights(one_machine([3, 0, 8, 1]), 1)
    assert [j.w for j in out.jobs] == [4, 0, 8, 1]
    with pytest.raises(ValueError):
        ptas.round_weights(one_machine([1]), 0)


@pytest.mark.parametrize("eps", [F(1, 2), F(1, 5), F(1, 10), F(1)])
def test_round_weights_lands_on_next_power(eps):
    rng = random.Random(int(1 / eps))
    for _ in range(50):
        w = rng.randint(1, 200)
        (job,) = ptas.round_weights(one_machine([w]), eps).jobs
        i = 0
        while (1 + eps) ** i < w:
            i += 1
        assert job.w == (1 + eps) ** i


def test_scale_instance_makes_integers():
    inst = Instance([Job(1, 1, F(1, 3)), Job(2, 2, F(1, 2))], T([(0, 2, F(3, 4)), (2, 6, 0)]))
    scaled, s = ptas.scale_instance(inst)
    assert s == 12
    assert all(j.w.denominator == 1 for j in scaled.jobs)
    assert all(iv.cost.denominator == 1 for iv in scaled.tariff.intervals)


def test_grid_examples():
    g = ptas.build_grids(one_machine([1, 1, 2], T([(0, 2, 5), (2, 4, 0)])), 1)
    assert g.nu == 2
    # the cost of the first p(J)=3 finite slots: 5 + 5 + 0
    assert g.E_max == 10
    assert g.B[-1] >= g.E_max and g.AVG[-1] >= 2**g.nu
    for grid, eta in ((g.B, g.eta1), (g.AVG, g.eta2)):
        assert grid[:2] == (0, 1)
        assert all(b / a == 1 + eta for a, b in zip(grid[1:], grid[2:]))


@pytest.mark.parametrize("eps", [F(1), F(1, 2), F(1, 5), F(1, 10), F(1, 50)])
@pytest.mark.parametrize("nu", range(1, 12))
def test_eta_is_sound(eps, nu):
    eta = ptas.choose_eta(eps, nu)
    assert 0 < eta <= eps / 2
    assert (1 + eta) ** nu <= 1 + eps


def test_round_up_on_grid():
    g = ptas.build_grids(one_machine([1, 1], T([(0, 4, 3)])), F(1, 2))
    assert g.round_b(F(0)) == 0
    assert g.round_b(F(1, 2)) == 1
    assert g.round_b(g.B[3]) == g.B[3]
    assert g.round_b(g.B[3] + F(1, 10**9)) == g.B[4]
    assert g.round_b(g.B[-1] + 1) is None


def test_t_lower_bound():
    assert ptas.t_lower_bound(0, F(0), F(2), F(2)) == 0
    assert ptas.t_lower_bound(0, F(0), F(5), F(2)) == 0
    assert ptas.t_lower_bound(4, F(1), F(1), F(2)) is None
    # 3t >= 2t + 4*(5-2)  ->  t >= 12
    assert ptas.t_lower_bound(4, F(5), F(3), F(2)) == 12


def test_transition_examples():
    tariff = T([(0, 2, 5), (2, 4, 0)])
    z1 = ptas.PtasState(2, frozenset({1, 2}), F(0), F(0), 0)
    wc = WindowCost(tariff, 1, 0)
    assert ptas.transition(z1, frozenset({2}), F(0), F(4), F(2), wc) == 3
    assert ptas.transition(z1, frozenset({2}), F(5), F(4), F(2), wc) == 1
    # avg below the charge: no positive time point can satisfy the average
    assert ptas.transition(z1, frozenset({2}), F(0), F(1), F(2), wc) is None
    wc2 = WindowCost(tariff, 3, 0)
    assert ptas.transition(z1, frozenset(), F(4), F(4), F(2), wc2) is None
    assert ptas.transition(z1, frozenset({3}), F(5), F(4), F(2), wc) is None
    late = ptas.PtasState(2, frozenset({1, 2}), F(1), F(2), 3)
    assert ptas.transition(late, frozenset({1, 2}), F(1), F(2), F(2), WindowCost(tariff, 0, 3)) == 3


@pytest.mark.parametrize("seed", range(25))
def test_fast_transition_agrees(seed):
    rng = random.Random(seed)
    inst = random_instance(seed, GenParams(n_max=5))
    scaled, _ = ptas.scale_instance(inst)
    eps = rng.choice([F(1, 2), F(1, 5)])
    rounded = ptas.round_weights(scaled, eps)
    g = ptas.build_grids(rounded, eps)
    tariff = rounded.tariff
    for _ in range(40):
        t1 = rng.randint(0, tariff.horizon)
        bi1, ai1 = rng.randrange(len(g.B)), rng.randrange(len(g.AVG))
        z1 = ptas.PtasState(1, frozenset({1}), g.B[bi1], g.AVG[ai1], t1, None, bi1, ai1)
        p = rng.randint(0, 3)
        wc = WindowCost(tariff, p, t1)
        wcf = [float(v) for _, v in wc.breakpoints]
        bi2, ai2 = rng.randrange(len(g.B)), rng.randrange(len(g.AVG))
        c = (1 + eps) ** rng.randint(0, g.nu)
        want = ptas.transition(z1, frozenset(), g.B[bi2], g.AVG[ai2], c, wc)
        if g.B[bi2] < z1.b:
            assert want is None
            continue
        assert ptas._fast_transition(z1, bi2, ai2, c, float(c), wc, wcf, g) == want


def test_run_examples():
    single = Instance([Job(1, 1, F(1))], T([(0, 1, 0)]))
    for eps in (F(1), F(1, 2), F(1, 5)):
        assert ptas.run(single, eps).total_cost == 1
    pair = one_machine([1, 1], T([(0, 2, 5), (2, 4, 0)]))
    assert oracle.opt_weighted(pair).total == 7
    total = ptas.run(pair, F(1, 2)).total_cost
    assert 7 <= total <= F(7) * (1 + 5 * F(1, 2))


def test_run_zero_weight_jobs_go_last():
    inst = Instance([Job(1, 2, F(0)), Job(2, 1, F(3))], T([(0, 2, 1), (2, 6, 0)]))
    sched = ptas.run(inst, F(1, 2))
    assert sched.completion_times[2] < sched.completion_times[1]
    assert sched.total_cost == oracle.opt_weighted(inst).total


def test_run_all_zero_weights():
    inst = Instance([Job(1, 2, F(0)), Job(2, 1, F(0))], T([(0, 2, 3), (2, 4, 1), (4, 6, 2)]))
    # three slots at 1, 1 and 2
    assert ptas.run(inst, F(1, 2)).total_cost == 4 == oracle.opt_weighted(inst).total


@pytest.mark.parametrize("seed", range(40))
def test_run_brackets_oracle(seed):
    inst = random_instance(500 + seed, GenParams(n_max=5, zero_weight_prob=0.2))
    opt = oracle.opt_weighted(inst).total
    res = ptas.run_detailed(inst, F(1, 2))
    assert opt <= res.schedule.total_cost <= (1 + 5 * F(1, 2)) * opt
    assert res.dp_value >= res.schedule.total_cost
    work = {j.id: 0 for j in inst.jobs}
    for seg in res.schedule.segments:
        work[seg.job] += seg.end - seg.start
    assert all(work[j.id] == j.p for j in inst.jobs)


def test_enumeration_limit():
    inst = one_machine([1] * 5, T([(0, 10, 0)]))
    with pytest.raises(ptas.EnumerationLimitExceeded, match="4"):
        ptas.run(inst, F(1, 2), max_weighted_jobs=4)
    big = Instance([Job(k, 1, F(1)) for k in range(1, 18)], T([(0, 20, 0)]))
    with pytest.raises(ptas.EnumerationLimitExceeded, match="16"):
        ptas.run(big, F(1, 2), max_weighted_jobs=40)


def test_multi_machine_refused():
    inst = Instance([Job(1, 1, F(1), (1, 1))], T([(0, 2, 0)]), machines=2)
    with pytest.raises(ValueError):
        ptas.run(inst, F(1, 2))


def test_weight_to_time_examples():
    inst = Instance([Job(1, 2, F(2)), Job(2, 1, F(1))], T([(0, 3, 0)]))
    ws = ptas.WeightSchedule({1: F(3), 2: F(1)})
    sched = ptas.weight_to_time(ws, ReservationProfile((3,)), inst)
    assert [(s.job, s.start, s.end) for s in sched.segments] == [(1, 0, 2), (2, 2, 3)]
    assert ws.starting_weight(inst.job(1)) == 1
    single = Instance([Job(1, 2, F(1))], T([(0, 1, 9), (1, 5, 0)]))
    sched = ptas.weight_to_time(ptas.WeightSchedule({1: F(1)}), ReservationProfile((0, 2)), single)
    assert [(s.start, s.end) for s in sched.segments] == [(1, 3)]


def test_weight_to_time_capacity():
    inst = Instance([Job(1, 3, F(1))], T([(0, 4, 0)]))
    with pytest.raises(Exception, match="slots"):
        ptas.weight_to_time(ptas.WeightSchedule({1: F(1)}), ReservationProfile((2,)), inst)


@pytest.mark.parametrize("seed", range(30))
def test_idle_weight_never_helps(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    jobs = [Job(k + 1, rng.randint(1, 3), F(rng.randint(1, 5))) for k in range(n)]
    total_p = sum(j.p for j in jobs)
    inst = Instance(jobs, T([(0, total_p + 3, 0)]))
    order = [j.id for j in jobs]
    rng.shuffle(order)
    gapless, idle = {}, {}
    acc = acc_idle = F(0)
    for jid in reversed(order):
        acc += inst.job(jid).w
        acc_idle += inst.job(jid).w + rng.randint(0, 3)
        gapless[jid], idle[jid] = acc, acc_idle
    prof = ReservationProfile((total_p,))
    a = ptas.weight_to_time(ptas.WeightSchedule(gapless), prof, inst)
    b = ptas.weight_to_time(ptas.WeightSchedule(idle), prof, inst)
    cost_a = ptas.weight_schedule_cost(ptas.WeightSchedule(gapless), a.completion_times)
    cost_b = ptas.weight_schedule_cost(ptas.WeightSchedule(idle), b.completion_times)
    assert cost_a == a.scheduling_cost
    assert cost_b >= cost_a
