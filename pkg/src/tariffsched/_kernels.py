"""Integer kernels for exhaustive min-sum enumeration.

Two interchangeable backends evaluate every (profile, sequence) pair:
a numba ``@njit`` loop and a vectorized numpy path. ``TARIFFSCHED_NUMBA=0``
forces the numpy path; it is also used when numba is not importable.
All inputs are pre-scaled to int64 so both paths are exact.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def numba_enabled() -> bool:
    flag = os.environ.get("TARIFFSCHED_NUMBA", "1").strip().lower()
    return numba is not None and flag not in ("0", "false", "no", "off")


def _best_pair_numpy(ends, tcost, perms, p, w):
    n_prof = ends.shape[0]
    cum = np.cumsum(p[perms], axis=1) - 1
    wp = w[perms]
    best_val = np.iinfo(np.int64).max
    best_prof = -1
    best_perm = -1
    for a in range(n_prof):
        vals = (ends[a][cum] * wp).sum(axis=1) + tcost[a]
        b = int(np.argmin(vals))
        if vals[b] < best_val:
            best_val = int(vals[b])
            best_prof = a
            best_perm = b
    return best_val, best_prof, best_perm


if numba is not None:

    @numba.njit(cache=True)
    def _best_pair_numba(ends, tcost, perms, p, w):  # pragma: no cover - compiled
        n_prof = ends.shape[0]
        n_perm, n = perms.shape
        best_val = np.iinfo(np.int64).max
        best_prof = -1
        best_perm = -1
        for a in range(n_prof):
            base = tcost[a]
            if base >= best_val:
                continue
            for b in range(n_perm):
                pos = -1
                val = base
                for i in range(n):
                    j = perms[b, i]
                    pos += p[j]
                    val += w[j] * ends[a, pos]
                    if val >= best_val:
                        break
                if val < best_val:
                    best_val = val
                    best_prof = a
                    best_perm = b
        return best_val, best_prof, best_perm

else:  # pragma: no cover
    _best_pair_numba = None


def best_profile_sequence(ends, tcost, perms, p, w, use_numba: bool | None = None):
    """Minimize ``tcost[a] + sum_i w[perm_i] * ends[a, cum_p_i - 1]`` over all pairs.

    Args:
        ends: (profiles, slots) int64, end time of each utilized slot in order.
        tcost: (profiles,) int64 scaled tariff cost of each profile.
        perms: (sequences, n) int64 job-index permutations.
        p, w: (n,) int64 processing times and scaled weights.

    Returns:
        ``(value, profile_index, sequence_index)``; ties keep the lowest indices.
    """
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    tcost = np.ascontiguousarray(tcost, dtype=np.int64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    p = np.ascontiguousarray(p, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.int64)
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba and _best_pair_numba is not None:
        val, a, b = _best_pair_numba(ends, tcost, perms, p, w)
        return int(val), int(a), int(b)
    return _best_pair_numpy(ends, tcost, perms, p, w)
