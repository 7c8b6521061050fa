"""Monte Carlo threshold test: does an element's rank lie at or below r?

One trial draws a fixed-size uniform sample (with replacement) from the
universe, padded with maximal dummies so the sampling math is clean, and
asks a single right group test: is any sampled element below x?  The
per-trial positive probability

    1 - ((n_eff - rank(x)) / n_eff) ** sample_size

grows with the rank of x, so after a fixed number of independent trials
the positive count c separates ranks below r(1 - delta) from ranks above
r(1 + delta).  The decision threshold is the midpoint of the two
closed-form bounds p_low and p_high; the trial count is chosen so a
Hoeffding bound caps the error probability at epsilon whenever the true
rank is outside the band r +- delta * min(r, n - r).

Targets above n/2 are handled by running the test under the reversed
order, where the rank of x becomes n - rank(x) + 1, and negating the
answer; the reversed target sits half a step past n - r so that integer
targets keep an exact decision boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .oracle import CountingOracle, GroupTestOracle, QueryLedger, reversed_view


@dataclass(frozen=True)
class RankTestParams:
    """Derived quantities for one threshold-test configuration."""

    n_eff: int          # universe size after dummy padding
    r: float            # target rank, may be fractional
    delta: float
    epsilon: float
    sample_size: int    # ids drawn per trial, at least 2
    trials: int         # group tests per call, at least 1
    p_low: float        # positive-rate bound when rank <= r - delta*r
    p_high: float       # positive-rate bound when rank >= r + delta*r
    p_mid: float        # decision threshold (midpoint of the two bounds)


@dataclass(frozen=True)
class RankTestOutcome:
    answer: bool        # True means "rank(x) <= r"
    positives: int      # positive trials of the executed (possibly reversed) test
    params: RankTestParams
    ledger: QueryLedger


def derive_params(n: int, r: float, delta: float, epsilon: float) -> RankTestParams:
    """Compute padding, sample size, trial count and decision thresholds.

    Requires 0 < r <= n/2; callers handle larger targets via reversal.
    Fractional targets arise from selection and are allowed: the sample
    size rounds up, which only widens the separation between p_low and
    p_high.
    """
    if n < 1:
        raise InvalidParameterError(f"universe size must be positive, got {n}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0,1), got {delta}")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0,1), got {epsilon}")
    if not 0 < r <= n / 2:
        raise InvalidParameterError(f"target rank {r} outside (0, n/2] for n={n}")
    divisor = math.ceil(r)
    n_eff = divisor * ((n + divisor - 1) // divisor)
    sample_size = max(2, math.ceil(n_eff / r))
    p_low = 1.0 - ((n_eff - (r - delta * r)) / n_eff) ** sample_size
    p_high = 1.0 - ((n_eff - (r + delta * r)) / n_eff) ** sample_size
    trials = max(1, math.ceil(8.0 * math.e**2 * math.log(1.0 / epsilon) / delta**2))
    return RankTestParams(
        n_eff=n_eff,
        r=float(r),
        delta=delta,
        epsilon=epsilon,
        sample_size=sample_size,
        trials=trials,
        p_low=p_low,
        p_high=p_high,
        p_mid=0.5 * (p_low + p_high),
    )


def _run_trials(oracle: GroupTestOracle, x: int, r: float, delta: float,
                epsilon: float, rng: np.random.Generator) -> tuple[bool, int, RankTestParams]:
    params = derive_params(oracle.size, r, delta, epsilon)
    n = oracle.size
    samples = rng.integers(0, params.n_eff, size=(params.trials, params.sample_size))
    rows = samples.tolist()
    if params.n_eff > n:
        # sampled dummy ids can never lie below the real element x, so
        # dropping them up front leaves every trial's answer (and its
        # single group test) unchanged
        rows = [[v for v in row if v < n] for row in rows]
    right_test = oracle.right_test
    positives = 0
    for row in rows:
        if right_test(x, row):
            positives += 1
    return positives <= params.p_mid * params.trials, positives, params


def rank_at_most(oracle: GroupTestOracle, x: int, r: float, delta: float,
                 epsilon: float, rng: np.random.Generator) -> RankTestOutcome:
    """Decide whether rank(x) <= r, correct with probability 1 - epsilon
    whenever |rank(x) - r| >= delta * min(r, n - r).

    Inside that band either answer is acceptable.  Costs exactly
    ``params.trials`` group tests.
    """
    n = oracle.size
    if not 0 <= x < n:
        raise InvalidParameterError(f"element id {x} outside universe of size {n}")
    if not 0 < r < n:
        raise InvalidParameterError(f"target rank {r} outside (0, n) for n={n}")
    counting = CountingOracle(oracle)
    if r >= n / 2 + 0.5:
        # rank(x) <= r iff not (reversed rank(x) <= n - r + 1/2): the half
        # step centers the reversed target between the integer ranks on
        # either side of the decision boundary, which keeps the guarantee
        # band honest at the extremes (an integer target n - r would sit
        # exactly on a rank and bias the edge case)
        inner, positives, params = _run_trials(
            reversed_view(counting), x, n - r + 0.5, delta, epsilon, rng
        )
        answer = not inner
    else:
        # a target in (n/2, n/2 + 1/2) separates the same integer ranks
        # as n/2 itself, which the direct branch can test
        answer, positives, params = _run_trials(counting, x, min(r, n / 2),
                                                delta, epsilon, rng)
    return RankTestOutcome(answer=answer, positives=positives, params=params,
                           ledger=counting.ledger)
