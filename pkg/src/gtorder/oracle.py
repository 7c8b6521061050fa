"""Group-test oracle interface and composable adapters.

A group test is a one-to-many order query against a hidden total order:

* left test   ``u <=_Q V``  is true iff some v in V satisfies u <= v,
* right test  ``V <=_Q u``  is true iff some v in V satisfies v <= u.

``<=`` is reflexive and the order is strict on ranks, so singleton tests
against u itself are always true.  An empty V answers false (an empty
existential).  Answers are noiseless functions of the hidden order.

Adapters compose around a base oracle:

* :class:`CountingOracle` records how many queries of each kind were made,
* :func:`reversed_view` swaps the direction of every test,
* :func:`padded_view` extends the universe with maximal dummy elements so
  a divisor divides the universe size.

All oracles are immutable after construction; only the counting adapter's
ledger mutates, which is why ledgers are per-run and never shared.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidParameterError
from .order import TotalOrderInstance

IdSet = Union[Sequence[int], np.ndarray, set, frozenset]

# Above this size the numpy fancy-index path beats a Python loop.
_VECTOR_THRESHOLD = 64


class GroupTestOracle(ABC):
    """Query interface over a universe of ids 0..size-1."""

    size: int

    @abstractmethod
    def left_test(self, u: int, V: IdSet) -> bool:
        """True iff some v in V satisfies u <= v."""

    @abstractmethod
    def right_test(self, u: int, V: IdSet) -> bool:
        """True iff some v in V satisfies v <= u."""


@dataclass(slots=True)
class QueryLedger:
    """Exact count of left/right group tests consumed by a run."""

    left_count: int = 0
    right_count: int = 0

    @property
    def total(self) -> int:
        return self.left_count + self.right_count


def _check_id(u: int, size: int) -> None:
    if not 0 <= u < size:
        raise InvalidParameterError(f"element id {u} outside universe of size {size}")


class InstanceOracle(GroupTestOracle):
    """Oracle backed by a concrete :class:`TotalOrderInstance`."""

    def __init__(self, instance: TotalOrderInstance):
        self._instance = instance
        self._ranks = instance.ranks
        self._rank_list = instance.ranks.tolist()
        self.size = instance.n

    @property
    def instance(self) -> TotalOrderInstance:
        return self._instance

    def right_test(self, u: int, V: IdSet) -> bool:
        rl = self._rank_list
        _check_id(u, self.size)
        ru = rl[u]
        if isinstance(V, np.ndarray) and V.size > _VECTOR_THRESHOLD:
            if int(V.min()) < 0 or int(V.max()) >= self.size:
                raise InvalidParameterError("element id in V outside universe")
            return bool((self._ranks[V] <= ru).any())
        ids = V.tolist() if isinstance(V, np.ndarray) else V
        if not len(ids):
            return False
        if min(ids) < 0 or max(ids) >= self.size:
            raise InvalidParameterError("element id in V outside universe")
        for v in ids:
            if rl[v] <= ru:
                return True
        return False

    def left_test(self, u: int, V: IdSet) -> bool:
        rl = self._rank_list
        _check_id(u, self.size)
        ru = rl[u]
        if isinstance(V, np.ndarray) and V.size > _VECTOR_THRESHOLD:
            if int(V.min()) < 0 or int(V.max()) >= self.size:
                raise InvalidParameterError("element id in V outside universe")
            return bool((self._ranks[V] >= ru).any())
        ids = V.tolist() if isinstance(V, np.ndarray) else V
        if not len(ids):
            return False
        if min(ids) < 0 or max(ids) >= self.size:
            raise InvalidParameterError("element id in V outside universe")
        for v in ids:
            if rl[v] >= ru:
                return True
        return False


class CountingOracle(GroupTestOracle):
    """Pass-through adapter that counts every query in a fresh ledger."""

    def __init__(self, inner: GroupTestOracle):
        self._inner = inner
        self.ledger = QueryLedger()
        self.size = inner.size

    def left_test(self, u: int, V: IdSet) -> bool:
        self.ledger.left_count += 1
        return self._inner.left_test(u, V)

    def right_test(self, u: int, V: IdSet) -> bool:
        self.ledger.right_count += 1
        return self._inner.right_test(u, V)


class _ReversedOracle(GroupTestOracle):
    """View of an oracle under the reversed order: left and right swap."""

    def __init__(self, inner: GroupTestOracle):
        self._inner = inner
        self.size = inner.size

    def left_test(self, u: int, V: IdSet) -> bool:
        return self._inner.right_test(u, V)

    def right_test(self, u: int, V: IdSet) -> bool:
        return self._inner.left_test(u, V)


def reversed_view(oracle: GroupTestOracle) -> GroupTestOracle:
    """Oracle for the reversed order; rank r becomes size - r + 1.

    Reversing twice unwraps back to the original oracle.
    """
    if isinstance(oracle, _ReversedOracle):
        return oracle._inner
    return _ReversedOracle(oracle)


class _PaddedOracle(GroupTestOracle):
    """Universe extended with dummy ids that sit above every real element.

    Dummies occupy ids n..size-1 and are mutually ordered by id, so the
    padded order stays total.  Queries that only involve real elements
    are forwarded to the inner oracle with dummies filtered out.
    """

    def __init__(self, inner: GroupTestOracle, size: int):
        self._inner = inner
        self._n_real = inner.size
        self.size = size

    def right_test(self, u: int, V: IdSet) -> bool:
        nr = self._n_real
        _check_id(u, self.size)
        ids = V.tolist() if isinstance(V, np.ndarray) else V
        if not len(ids):
            return False
        if min(ids) < 0 or max(ids) >= self.size:
            raise InvalidParameterError("element id in V outside universe")
        if u < nr:
            # dummies are above every real element, so they never satisfy v <= u
            reals = [v for v in ids if v < nr]
            return self._inner.right_test(u, reals) if reals else False
        # u is a dummy: all reals are below it, dummies compare by id
        for v in ids:
            if v < nr or v <= u:
                return True
        return False

    def left_test(self, u: int, V: IdSet) -> bool:
        nr = self._n_real
        _check_id(u, self.size)
        ids = V.tolist() if isinstance(V, np.ndarray) else V
        if not len(ids):
            return False
        if min(ids) < 0 or max(ids) >= self.size:
            raise InvalidParameterError("element id in V outside universe")
        if u < nr:
            reals = []
            for v in ids:
                if v >= nr:
                    return True  # every dummy is above every real u
                reals.append(v)
            return self._inner.left_test(u, reals)
        # u is a dummy: reals are strictly below it, dummies compare by id
        for v in ids:
            if v >= u:
                return True
        return False


def padded_view(oracle: GroupTestOracle, divisor: int) -> GroupTestOracle:
    """Extend the universe so that divisor divides its size.

    Adds at most divisor - 1 dummy elements ranked above all real ones
    (and mutually ordered by id).  If the size already divides evenly the
    oracle is returned unchanged.
    """
    if divisor < 1:
        raise InvalidParameterError(f"divisor must be positive, got {divisor}")
    n = oracle.size
    padded = divisor * ((n + divisor - 1) // divisor)
    if padded == n:
        return oracle
    return _PaddedOracle(oracle, padded)
