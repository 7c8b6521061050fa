"""Approximate rank determination by binary search over the threshold test.

The search maintains an integer interval [a, b] that contains the rank up
to the usual delta band, probes the midpoint with a threshold test whose
failure budget is epsilon split evenly over the ceil(log2 n) levels, and
halves the interval accordingly.  A failed midpoint test moves the lower
bound to m + 1 (not m) so the search always terminates; the band around
m still covers m + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidParameterError
from .oracle import CountingOracle, GroupTestOracle, QueryLedger
from .ranktest import rank_at_most


@dataclass(frozen=True)
class RankEstimate:
    rank: int
    calls: int  # threshold tests performed, at most ceil(log2 n)
    ledger: QueryLedger


def binary_rank_search(n: int, rank_is_at_most: Callable[[int], bool]) -> tuple[int, int]:
    """Pure integer search driven by a midpoint decision callback.

    Returns (rank, number of callback invocations).  Output is a
    deterministic function of the answer sequence.
    """
    a, b = 1, n
    calls = 0
    while a < b:
        m = (a + b) // 2
        if rank_is_at_most(m):
            b = m
        else:
            a = m + 1
        calls += 1
    return a, calls


def approximate_rank(oracle: GroupTestOracle, x: int, delta: float, epsilon: float,
                     rng: np.random.Generator) -> RankEstimate:
    """Estimate rank(x) to within delta * min(r, n - r) with probability
    at least 1 - epsilon.

    Uses at most ceil(log2 n) threshold tests, each budgeted
    epsilon / ceil(log2 n).
    """
    n = oracle.size
    if not 0 <= x < n:
        raise InvalidParameterError(f"element id {x} outside universe of size {n}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0,1), got {delta}")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0,1), got {epsilon}")
    counting = CountingOracle(oracle)
    if n == 1:
        return RankEstimate(rank=1, calls=0, ledger=counting.ledger)
    levels = (n - 1).bit_length()  # ceil(log2 n) for n >= 2
    per_call_epsilon = epsilon / levels

    def decide(m: int) -> bool:
        return rank_at_most(counting, x, m, delta, per_call_epsilon, rng).answer

    rank, calls = binary_rank_search(n, decide)
    return RankEstimate(rank=rank, calls=calls, ledger=counting.ledger)
