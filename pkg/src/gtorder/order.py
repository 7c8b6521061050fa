"""Ground-truth total orders over integer element ids.

An instance assigns each id in 0..n-1 a distinct rank in 1..n.  The rank
array is the hidden truth that oracles answer about, and the brute-force
reference that tests use to verify algorithm output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class TotalOrderInstance:
    """A strict total order on ids 0..n-1, stored as a rank bijection."""

    n: int
    ranks: np.ndarray  # ranks[i] is the rank of element i, a permutation of 1..n

    def rank_of(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise InvalidParameterError(f"element id {x} outside universe of size {self.n}")
        return int(self.ranks[x])

    def element_with_rank(self, r: int) -> int:
        if not 1 <= r <= self.n:
            raise InvalidParameterError(f"rank {r} outside 1..{self.n}")
        return int(np.nonzero(self.ranks == r)[0][0])


def make_instance(n: int, seed: int) -> TotalOrderInstance:
    """Create a uniformly random total order on n elements.

    The order is a pure function of the seed: the same (n, seed) pair
    always yields the same instance.  Seeds are taken modulo 2**64, so
    any 64-bit integer (signed included) is usable.
    """
    if n < 1:
        raise InvalidParameterError(f"need at least one element, got n={n}")
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    ranks = rng.permutation(n) + 1
    return TotalOrderInstance(n=n, ranks=ranks)


def exact_rank(instance: TotalOrderInstance, x: int) -> int:
    """Rank of x, i.e. the number of elements y with y <= x (including x)."""
    return instance.rank_of(x)
