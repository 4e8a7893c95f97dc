"""Compiled inner loops.

Everything here is plain Python that numba can JIT-compile; when numba is not
importable the functions still run, only slower.  The RNG mirrors
``rng.Xoshiro256StarStar`` exactly (verified bit for bit in the test suite),
so replicate ``r`` of any kernel is reproducible from ``seed ^ r`` alone.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    prange = range

U64 = np.uint64

_SM_GAMMA = U64(0x9E3779B97F4A7C15)
_SM_MIX1 = U64(0xBF58476D1CE4E5B9)
_SM_MIX2 = U64(0x94D049BB133111EB)
_FIVE = U64(5)
_NINE = U64(9)
_R7 = U64(7)
_R45 = U64(45)
_S11 = U64(11)
_S17 = U64(17)
_S27 = U64(27)
_S30 = U64(30)
_S31 = U64(31)
_S64 = U64(64)
_INV53 = 1.0 / 9007199254740992.0


def set_threads(n: int) -> None:
    """Cap worker threads used by parallel kernels (no-op without numba)."""
    if HAVE_NUMBA and n >= 1:
        import numba

        numba.set_num_threads(n)


def py_version(fn):
    """Uncompiled version of a kernel (for cross-checking the JIT output)."""
    return getattr(fn, "py_func", fn)


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (_S64 - k))


@njit(cache=True)
def _init_state(seed):
    s = np.empty(4, dtype=np.uint64)
    x = seed
    for i in range(4):
        x = x + _SM_GAMMA
        z = x
        z = (z ^ (z >> _S30)) * _SM_MIX1
        z = (z ^ (z >> _S27)) * _SM_MIX2
        s[i] = z ^ (z >> _S31)
    return s


@njit(cache=True, inline="always")
def _next_u64(s):
    result = _rotl(s[1] * _FIVE, _R7) * _NINE
    t = s[1] << _S17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], _R45)
    return result


@njit(cache=True, inline="always")
def _uniform53(s):
    u = float(_next_u64(s) >> _S11) * _INV53
    if u == 0.0:
        u = _INV53
    return u


@njit(cache=True)
def stream_u64(seed, count):
    """First ``count`` raw outputs of the stream (test hook)."""
    out = np.empty(count, dtype=np.uint64)
    s = _init_state(seed)
    for i in range(count):
        out[i] = _next_u64(s)
    return out


@njit(cache=True, inline="always")
def _fill_permutation(s, n, perm):
    # Fisher-Yates, downward; same draw order as simulate.random_permutation.
    for i in range(n):
        perm[i] = i + 1
    for i in range(n - 1, 0, -1):
        j = int(_next_u64(s) % U64(i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp


@njit(cache=True)
def fill_table(values, prefix, kstar, n_max):
    """In-place optimal-value recursion.

    ``values[n]`` is the optimal expected selection length at horizon n,
    ``prefix`` its Kahan-compensated running sum, and ``kstar[n]`` the
    smallest maximizing first-step rank threshold used to produce
    ``values[n]``.  The maximizer pointer moves monotonically in practice,
    and the bidirectional adjustment below stays correct even if it did not.
    """
    values[0] = 0.0
    prefix[0] = 0.0
    comp = 0.0
    if n_max >= 1:
        values[1] = 1.0
        y = 1.0 - comp
        t = prefix[0] + y
        comp = (t - prefix[0]) - y
        prefix[1] = t
    k = 1
    for n in range(1, n_max):
        sn = values[n]
        # smallest k in [1, n] with s(n) - s(n-k) >= 1
        while k < n and not (sn - values[n - k] >= 1.0):
            k += 1
        while k > 1 and sn - values[n - k + 1] >= 1.0:
            k -= 1
        h = k + (n - k + 1) * sn + (prefix[n] - prefix[n - k])
        snext = h / (n + 1)
        values[n + 1] = snext
        kstar[n + 1] = k
        y = snext - comp
        t = prefix[n] + y
        comp = (t - prefix[n]) - y
        prefix[n + 1] = t


@njit(cache=True, inline="always")
def _policy_walk(perm, tree, n, sv):
    """Run the optimal permutation policy over one permutation.

    ``tree`` is a zeroed length-(n+1) Fenwick scratch array marking seen
    values; returns the number of accepted elements.
    """
    a = 0
    u = n
    count = 0
    for pos in range(n):
        x = perm[pos]
        if x > a:
            seen_le = 0
            i = x
            while i > 0:
                seen_le += tree[i]
                i -= i & (-i)
            u_above = (n - x) - (pos - seen_le)
            if 1.0 + sv[u_above] >= sv[u - 1]:
                a = x
                u = u_above
                count += 1
            else:
                u -= 1
        i = x
        while i <= n:
            tree[i] += 1
            i += i & (-i)
    return count


@njit(cache=True, parallel=True)
def policy_lengths(n, reps, seed, sv):
    """Selection lengths of the optimal policy over seeded replicates."""
    lengths = np.empty(reps, dtype=np.int64)
    for r in prange(reps):
        s = _init_state(seed ^ U64(r))
        perm = np.empty(n, dtype=np.int64)
        _fill_permutation(s, n, perm)
        tree = np.zeros(n + 1, dtype=np.int32)
        lengths[r] = _policy_walk(perm, tree, n, sv)
    return lengths


@njit(cache=True, inline="always")
def _interp_row(row, grid_size, w):
    """Linear interpolation of a value row at window length w in [0, 1]."""
    p = w * grid_size
    i = int(p)
    if i >= grid_size:
        return row[grid_size]
    if p < 0.0:
        return row[0]
    return row[i] + (p - i) * (row[i + 1] - row[i])


@njit(cache=True, parallel=True)
def aprime_lengths(n, reps, seed, rows, grid_size):
    """Lengths from the randomized reduction driven by the i.i.d. policy.

    ``rows`` holds the benchmark value rows for 0..n-1 remaining
    observations.  Each replicate embeds its permutation into uniform order
    statistics built from exponential spacings, then accepts exactly when
    the i.i.d. policy accepts the embedded value.
    """
    lengths = np.empty(reps, dtype=np.int64)
    for r in prange(reps):
        s = _init_state(seed ^ U64(r))
        perm = np.empty(n, dtype=np.int64)
        _fill_permutation(s, n, perm)
        e_last = 0.0
        y = np.empty(n, dtype=np.float64)
        acc = 0.0
        for i in range(n):
            acc += -np.log(_uniform53(s))
            y[i] = acc
        e_last = -np.log(_uniform53(s))
        total = acc + e_last
        for i in range(n):
            y[i] /= total
        a = 0.0
        count = 0
        for i in range(n):
            x = y[perm[i] - 1]
            if x > a:
                m = n - i  # observations remaining, current one included
                row = rows[m - 1]
                v_accept = _interp_row(row, grid_size, 1.0 - x)
                v_reject = _interp_row(row, grid_size, 1.0 - a)
                if 1.0 + v_accept >= v_reject:
                    a = x
                    count += 1
        lengths[r] = count
    return lengths


@njit(cache=True, inline="always")
def _patience_length(perm, tails, n):
    size = 0
    for i in range(n):
        x = perm[i]
        lo = 0
        hi = size
        while lo < hi:
            mid = (lo + hi) >> 1
            if tails[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = x
        if lo == size:
            size += 1
    return size


@njit(cache=True, parallel=True)
def lis_lengths(n, reps, seed):
    """Longest-increasing-subsequence lengths (patience sorting) per replicate."""
    lengths = np.empty(reps, dtype=np.int64)
    for r in prange(reps):
        s = _init_state(seed ^ U64(r))
        perm = np.empty(n, dtype=np.int64)
        _fill_permutation(s, n, perm)
        tails = np.empty(n, dtype=np.int64)
        lengths[r] = _patience_length(perm, tails, n)
    return lengths
