"""Approximate selection: repeated candidate sampling plus verification.

Each round draws a candidate whose rank lands in the target band with
probability at least delta^2/4, then screens it with two threshold
tests: accept x iff the evidence says rank(x) <= k + 3/4*delta*k and not
rank(x) <= k - 3/4*delta*k.  The round budget makes the overall return
probability at least 1/2, and the per-test failure budget makes a
returned element a delta-approximation of the k-th order statistic with
probability at least 1 - epsilon.  Coming back empty-handed is a
legitimate outcome, not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameterError
from .minfind import min_find_among
from .oracle import CountingOracle, GroupTestOracle, QueryLedger, reversed_view
from .ranktest import rank_at_most


@dataclass(frozen=True)
class SelectParams:
    """Round budget and the derived tolerances for the two screening tests."""

    k: int
    delta: float
    epsilon: float
    delta_upper: float   # tolerance for the test at k + 3/4*delta*k, > delta/8
    delta_lower: float   # tolerance for the test at k - 3/4*delta*k, > delta/4
    epsilon_round: float  # per-test failure budget
    max_rounds: int


@dataclass(frozen=True)
class SelectOutcome:
    found: bool
    element: Optional[int]
    rounds_used: int
    ledger: QueryLedger


def select_params(k: int, delta: float, epsilon: float) -> SelectParams:
    if k < 1:
        raise InvalidParameterError(f"target rank must be positive, got {k}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0,1), got {delta}")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0,1), got {epsilon}")
    max_rounds = math.ceil(32.0 / delta**2)
    # split the failure budget over every test plus the final acceptance
    epsilon_round = epsilon / (max_rounds + 1)
    delta_upper = (delta / 4.0) / (1.0 + 0.75 * delta)
    delta_lower = (delta / 4.0) / (1.0 - 0.75 * delta)
    assert delta_upper > delta / 8.0
    assert delta_lower > delta / 4.0
    return SelectParams(
        k=k,
        delta=delta,
        epsilon=epsilon,
        delta_upper=delta_upper,
        delta_lower=delta_lower,
        epsilon_round=epsilon_round,
        max_rounds=max_rounds,
    )


def draw_candidate(oracle: GroupTestOracle, n: int, k: int, delta: float,
                   rng: np.random.Generator) -> int:
    """Draw one element whose rank falls in (k - delta*k, k + delta*k]
    with probability at least delta^2/4.

    For small k this takes the minimum of ceil(n/k) uniform draws from
    the dummy-padded universe; otherwise a single uniform element already
    hits the band often enough.  Dummies are never returned: a sample
    consisting solely of dummies is redrawn.
    """
    if n < 1 or n > oracle.size:
        raise InvalidParameterError(f"universe size {n} invalid for oracle of size {oracle.size}")
    if not 1 <= k <= (n + 1) // 2:
        raise InvalidParameterError(f"target rank {k} outside 1..ceil(n/2) for n={n}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0,1), got {delta}")
    if k <= (1.0 - math.exp(-2.0 * delta)) * n / 2.0:
        n_eff = k * ((n + k - 1) // k)
        draws = n_eff // k
        while True:
            sample = rng.integers(0, n_eff, size=draws)
            reals = np.unique(sample[sample < n])
            if reals.size:
                break
        return min_find_among(oracle, reals, rng).element
    return int(rng.integers(0, n))


def approximate_select(oracle: GroupTestOracle, n: int, k: int, delta: float,
                       epsilon: float, rng: np.random.Generator) -> SelectOutcome:
    """Find an element x with |rank(x) - k| <= delta * min(k, n - k).

    Returns an element with probability at least 1/2; conditioned on
    returning one, it satisfies the band with probability at least
    1 - epsilon.  Targets above n/2 run under the reversed order with
    k replaced by n - k + 1.
    """
    if n < 1 or n > oracle.size:
        raise InvalidParameterError(f"universe size {n} invalid for oracle of size {oracle.size}")
    if not 1 <= k <= n:
        raise InvalidParameterError(f"target rank {k} outside 1..{n}")
    work = oracle
    if k > n / 2:
        work = reversed_view(oracle)
        k = n - k + 1
    params = select_params(k, delta, epsilon)
    counting = CountingOracle(work)
    upper_target = k + 0.75 * delta * k
    lower_target = k - 0.75 * delta * k
    for round_index in range(1, params.max_rounds + 1):
        x = draw_candidate(counting, n, k, delta / 2.0, rng)
        below_upper = rank_at_most(counting, x, upper_target, params.delta_upper,
                                   params.epsilon_round, rng)
        if not below_upper.answer:
            continue
        below_lower = rank_at_most(counting, x, lower_target, params.delta_lower,
                                   params.epsilon_round, rng)
        if not below_lower.answer:
            return SelectOutcome(found=True, element=x, rounds_used=round_index,
                                 ledger=counting.ledger)
    return SelectOutcome(found=False, element=None, rounds_used=params.max_rounds,
                         ledger=counting.ledger)
