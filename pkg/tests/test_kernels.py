import itertools

import numpy as np
import pytest

from tariffsched import _kernels, oracle
from tariffsched.gen import GenParams, random_instance


def brute(ends, tcost, perms, p, w):
    best = None
    for a in range(len(ends)):
        for b, perm in enumerate(perms):
            cum, val = 0, int(tcost[a])
            for j in perm:
                cum += p[j]
                val += w[j] * ends[a][cum - 1]
            if best is None or val < best[0]:
                best = (val, a, b)
    return best


def random_inputs(rng, n, profiles, slots_extra=3):
    p = rng.integers(1, 3, size=n)
    total = int(p.sum())
    ends = np.array([np.sort(rng.choice(np.arange(1, total + slots_extra + 1), total, replace=False)) for _ in range(profiles)])
    tcost = rng.integers(0, 20, size=profiles)
    perms = np.array(list(itertools.permutations(range(n))))
    w = rng.integers(0, 6, size=n)
    return ends, tcost, perms, p, w


@pytest.mark.parametrize("seed", range(20))
def test_backends_agree_with_brute_force(seed):
    rng = np.random.default_rng(seed)
    data = random_inputs(rng, n=1 + seed % 4, profiles=1 + seed % 5)
    want = brute(*data)
    assert _kernels.best_profile_sequence(*data, use_numba=False) == want
    if _kernels.numba_enabled():
        assert _kernels.best_profile_sequence(*data, use_numba=True) == want


def test_ties_keep_lowest_indices():
    ends = np.array([[1, 2], [1, 2]])
    tcost = np.array([0, 0])
    perms = np.array([[0, 1], [1, 0]])
    p = np.array([1, 1])
    w = np.array([1, 1])
    assert _kernels.best_profile_sequence(ends, tcost, perms, p, w, use_numba=False) == (3, 0, 0)
    if _kernels.numba_enabled():
        assert _kernels.best_profile_sequence(ends, tcost, perms, p, w, use_numba=True) == (3, 0, 0)


@pytest.mark.parametrize("value,expected", [("0", False), ("off", False), ("false", False), ("1", True), ("", True)])
def test_env_flag(monkeypatch, value, expected):
    monkeypatch.setenv("TARIFFSCHED_NUMBA", value)
    assert _kernels.numba_enabled() is (expected and _kernels.numba is not None)


@pytest.mark.parametrize("seed", range(10))
def test_oracle_same_under_both_backends(monkeypatch, seed):
    inst = random_instance(900 + seed, GenParams(n_max=5))
    monkeypatch.setenv("TARIFFSCHED_NUMBA", "0")
    slow = oracle.opt_weighted(inst).total
    monkeypatch.setenv("TARIFFSCHED_NUMBA", "1")
    assert oracle.opt_weighted(inst).total == slow
