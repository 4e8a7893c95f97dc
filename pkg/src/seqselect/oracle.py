"""Brute-force expectimax oracle for small horizons.

Computes the optimal expected selection length by direct expectimax over the
full observation tree: the state is the set of not-yet-observed values plus
the last accepted value, the next observation is uniform over the unseen
set, and the decision takes the better of accepting and rejecting.  Exact
rational arithmetic throughout.  This deliberately does NOT use the
one-integer state reduction behind the fast recursion, so it serves as an
independent check of the value table.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError

#: Memoizing on (unseen set, last accepted) makes horizon 8 cheap; beyond
#: that the state space grows too fast to be worth it.
ORACLE_MAX = 8


@lru_cache(maxsize=None)
def _value(unseen: tuple[int, ...], last: int) -> Fraction:
    if not unseen:
        return Fraction(0)
    total = Fraction(0)
    for idx, x in enumerate(unseen):
        rest = unseen[:idx] + unseen[idx + 1:]
        if x < last:
            total += _value(rest, last)
        else:
            reject = _value(rest, last)
            accept = 1 + _value(rest, x)
            total += max(reject, accept)
    return total / len(unseen)


def brute_force_oracle(n: int) -> Fraction:
    """Exact optimal expected selection length at horizon n (n <= 8)."""
    if not 1 <= n <= ORACLE_MAX:
        raise CapacityError(f"oracle horizon must be in [1, {ORACLE_MAX}], got {n}")
    return _value(tuple(range(1, n + 1)), 0)
