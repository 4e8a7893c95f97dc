"""Exact optimal values for online increasing-subsequence selection.

The central object is the value table s(0..n_max), where s(n) is the optimal
expected length of an increasing subsequence selected online from a uniform
random permutation of length n.  First-step analysis gives the recursion

    s(n+1) = (1/(n+1)) * sum_{k=1}^{n+1} max{ s(n), 1 + s(n+1-k) }

with s(0) = 0, s(1) = 1, and because s is strictly increasing this collapses
to maximizing the score

    H(n, k, g) = k + (n-k+1) g(n) + sum_{i=n-k+1}^{n} g(i)

over k in [1, n] with g = s.  The increment H(n,k+1,g) - H(n,k,g)
= 1 - g(n) + g(n-k) is nonincreasing in k, so the maximizer is found by a
two-pointer scan that costs O(1) amortized per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .errors import CapacityError, VerificationError

#: Exact arithmetic backing: arbitrary-precision rationals in lowest terms.
Rational = Fraction

Number = Union[float, Fraction]

FLOAT_MODE = "float64"
EXACT_MODE = "exact-rational"

#: Denominators grow roughly like lcm(1..n); this cap keeps exact builds fast.
EXACT_MODE_MAX = 2000

_FORMAT_VERSION = "1"


@dataclass
class ValueTable:
    """Optimal expected values s(0..n_max) with maximizer trace.

    values[n] is s(n); prefix_sums[n] = s(0) + ... + s(n); kstar[n] (for
    n >= 2) is the smallest maximizing k used when s(n) was produced from
    s(0..n-1).  In float mode the prefix sums are accumulated with Kahan
    compensation, since they grow like n^(3/2) and plain accumulation would
    shed digits over long builds.
    """

    n_max: int
    mode: str
    values: Sequence[Number]
    prefix_sums: Sequence[Number]
    kstar: np.ndarray

    def s(self, n: int) -> Number:
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 0..{self.n_max}")
        return self.values[n]

    def s_float(self, n: int) -> float:
        return float(self.s(n))

    def validate(self) -> None:
        """Check the structural invariants; raise VerificationError on failure."""
        v = self.values
        if float(v[0]) != 0.0:
            raise VerificationError("s(0) must be 0")
        if self.n_max >= 1 and float(v[1]) != 1.0:
            raise VerificationError("s(1) must be 1")
        for n in range(1, self.n_max):
            step = float(v[n + 1]) - float(v[n])
            if not 0.0 < step <= 1.0 + 1e-12:
                raise VerificationError(f"increment s({n + 1})-s({n}) = {step} outside (0, 1]")
        for n in range(self.n_max + 1):
            if float(v[n]) > n + 1e-9:
                raise VerificationError(f"s({n}) = {v[n]} exceeds n")
        for n in range(self.n_max + 1):
            gap = float(self.prefix_sums[n]) - (float(self.prefix_sums[n - 1]) if n else 0.0)
            tol = 0 if self.mode == EXACT_MODE else 4e-16 * (abs(float(self.prefix_sums[n])) + 1.0)
            if abs(gap - float(v[n])) > tol:
                raise VerificationError(f"prefix sum inconsistent at n={n}")
        for n in range(2, self.n_max + 1):
            if not 1 <= self.kstar[n] <= n - 1:
                raise VerificationError(f"kstar({n}) = {self.kstar[n]} outside [1, {n - 1}]")


def build_table(n_max: int, mode: str = FLOAT_MODE) -> ValueTable:
    """Compute s(0..n_max).

    Float mode runs the O(n_max) pointer recursion (JIT-compiled when numba
    is available).  Exact mode uses Fraction arithmetic and is capped at
    EXACT_MODE_MAX because denominators grow super-exponentially.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if mode == FLOAT_MODE:
        values = np.empty(n_max + 1)
        prefix = np.empty(n_max + 1)
        kstar = np.zeros(n_max + 1, dtype=np.int64)
        _kernels.fill_table(values, prefix, kstar, n_max)
        return ValueTable(n_max, FLOAT_MODE, values, prefix, kstar)
    if mode == EXACT_MODE:
        if n_max > EXACT_MODE_MAX:
            raise CapacityError(f"exact-rational mode capped at n_max={EXACT_MODE_MAX}")
        return _build_exact(n_max)
    raise ValueError(f"unknown mode {mode!r}")


def _build_exact(n_max: int) -> ValueTable:
    one = Fraction(1)
    values = [Fraction(0), one]
    prefix = [Fraction(0), one]
    kstar = np.zeros(n_max + 1, dtype=np.int64)
    k = 1
    for n in range(1, n_max):
        sn = values[n]
        while k < n and not (sn - values[n - k] >= 1):
            k += 1
        while k > 1 and sn - values[n - k + 1] >= 1:
            k -= 1
        h = k + (n - k + 1) * sn + (prefix[n] - prefix[n - k])
        snext = h / (n + 1)
        values.append(snext)
        prefix.append(prefix[n] + snext)
        kstar[n + 1] = k
    if n_max == 1:
        values = values[: n_max + 1]
        prefix = prefix[: n_max + 1]
    return ValueTable(n_max, EXACT_MODE, values, prefix, kstar)


def h_score(n: int, k: int, g) -> Number:
    """Score k + (n-k+1) g(n) + sum_{i=n-k+1}^{n} g(i).

    ``g`` may be a ValueTable (prefix sums are used) or any sequence defined
    on 0..n.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    if isinstance(g, ValueTable):
        if n > g.n_max:
            raise ValueError(f"table only covers n <= {g.n_max}")
        tail = g.prefix_sums[n] - g.prefix_sums[n - k]
        return k + (n - k + 1) * g.values[n] + tail
    tail = sum(g[i] for i in range(n - k + 1, n + 1))
    return k + (n - k + 1) * g[n] + tail


def step_inside(table: ValueTable, n: int) -> Number:
    """One step of the raw first-step recursion: the value s(n+1).

    Averages max{ s(n), 1 + s(j) } over j = n, n-1, ..., 0 (the rank of the
    first observation determines how many larger values remain).
    """
    if not 1 <= n <= table.n_max:
        raise ValueError(f"table must be valid through n={n}")
    if table.mode == FLOAT_MODE:
        v = np.asarray(table.values[: n + 1])
        return float(np.maximum(v[n], 1.0 + v).sum() / (n + 1))
    sn = table.values[n]
    total = sum(max(sn, 1 + table.values[j]) for j in range(n + 1))
    return total / (n + 1)


def step_outside(table: ValueTable, n: int, k_hint: int | None = None) -> tuple[Number, int]:
    """One step of the monotone-simplified recursion.

    Returns (s(n+1), kstar) where kstar is the smallest maximizing k of
    H(n, k, s).  The pointer starts from ``k_hint`` (default: the previous
    step's maximizer) and walks the sign change of the nonincreasing
    increment 1 - s(n) + s(n-k); cost is O(1) amortized when hints chain.
    """
    if not 1 <= n <= table.n_max:
        raise ValueError(f"table must be valid through n={n}")
    if k_hint is None:
        k_hint = int(table.kstar[n]) if n >= 2 else 1
    if not 1 <= k_hint <= n:
        raise ValueError(f"k_hint={k_hint} outside [1, {n}]")
    v = table.values
    sn = v[n]
    one = 1.0 if table.mode == FLOAT_MODE else Fraction(1)
    k = k_hint
    while k < n and not (sn - v[n - k] >= one):
        k += 1
    while k > 1 and sn - v[n - k + 1] >= one:
        k -= 1
    h = h_score(n, k, table)
    return h / (n + 1), k


def accept_decision(table: ValueTable, u: int, u_above: int) -> bool:
    """Optimal accept/reject rule for one observed candidate.

    ``u`` counts unseen values above the last accepted one; ``u_above``
    counts those above the candidate itself.  Accepting yields 1 plus a
    fresh problem over u_above values; rejecting leaves u - 1.  Ties accept.
    """
    if u < 1:
        raise ValueError("u must be >= 1")
    if not 0 <= u_above <= u - 1:
        raise ValueError(f"u_above={u_above} outside [0, {u - 1}]")
    if u - 1 > table.n_max:
        raise ValueError(f"table only covers n <= {table.n_max}")
    return 1 + table.values[u_above] >= table.values[u - 1]


# ---------------------------------------------------------------------------
# Table cache files
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_table_csv(table: ValueTable, path: str, compress: bool = False) -> None:
    """Write ``n,s,kstar`` rows; the comment line records mode and version.

    Values are printed with 17 significant digits, which round-trips float64
    exactly.  Exact-rational tables are stored as their float64 projection.
    """
    import gzip

    opener = gzip.open if compress else open
    with opener(path, "wt", encoding="utf-8", newline="") as fh:
        fh.write(f"# seqselect-table version={_FORMAT_VERSION} mode={table.mode} n_max={table.n_max}\n")
        fh.write("n,s,kstar\n")
        for n in range(table.n_max + 1):
            ks = str(int(table.kstar[n])) if n >= 2 else ""
            fh.write(f"{n},{_fmt(float(table.values[n]))},{ks}\n")


def load_table_csv(path: str) -> ValueTable:
    """Load a cached table, recompute prefix sums, and validate invariants.

    The reload is bit-identical to the float table that was saved: values
    round-trip through their 17-digit form and the prefix accumulation
    replays the same compensated summation the builder used.
    """
    import gzip

    opener = gzip.open if path.endswith(".gz") else open
    values_list: list[float] = []
    kstar_list: list[int] = []
    with opener(path, "rt", encoding="utf-8") as fh:
        header_seen = False
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                if line != "n,s,kstar":
                    raise VerificationError(f"unexpected table header {line!r}")
                header_seen = True
                continue
            n_str, s_str, k_str = line.split(",")
            n = int(n_str)
            if n != len(values_list):
                raise VerificationError(f"non-contiguous row n={n}")
            values_list.append(float(s_str))
            kstar_list.append(int(k_str) if k_str else 0)
    if len(values_list) < 2:
        raise VerificationError("table file too short")
    n_max = len(values_list) - 1
    values = np.asarray(values_list)
    kstar = np.asarray(kstar_list, dtype=np.int64)
    prefix = np.empty(n_max + 1)
    prefix[0] = values[0]
    comp = 0.0
    for n in range(1, n_max + 1):
        y = values[n] - comp
        t = prefix[n - 1] + y
        comp = (t - prefix[n - 1]) - y
        prefix[n] = t
    table = ValueTable(n_max, FLOAT_MODE, values, prefix, kstar)
    table.validate()
    return table


def crossover_index(table: ValueTable, use_sqrt2n_of=None) -> int | None:
    """Smallest n with s(n) > sqrt(2n), or None if none exists in the table.

    In exact mode the comparison is done on squares, avoiding square roots
    entirely.
    """
    if table.mode == EXACT_MODE:
        for n in range(1, table.n_max + 1):
            if table.values[n] * table.values[n] > 2 * n:
                return n
        return None
    v = np.asarray(table.values[1:], dtype=float)
    sq = np.sqrt(2.0 * np.arange(1, table.n_max + 1, dtype=float))
    hits = np.nonzero(v > sq)[0]
    return int(hits[0]) + 1 if hits.size else None


def sqrt2n(n: int) -> float:
    return math.sqrt(2.0 * n)
