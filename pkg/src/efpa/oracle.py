"""Exhaustive ground truth over owner vectors, and normalisation helpers.

Owner vectors are enumerated lexicographically with resource 0 as the most
significant digit and, per resource, Unallocated before agents 0..n-1.  The
first ``m - L`` resources are walked depth-first (with measure-based
pruning); the last ``L`` resources are evaluated as one vectorised block.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .core import (
    Allocation,
    Answer,
    BudgetExceeded,
    Instance,
    Measure,
    Query,
    SolverResult,
    SolveStats,
    UsageError,
    classify_utilities,
    is_envy_free,
)
from .matching import EfmPartition, Matching, build_like_graph, is_envy_free_matching

DEFAULT_MAX_OWNER_VECTORS = 10**7
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class OracleBudget:
    max_owner_vectors: int = DEFAULT_MAX_OWNER_VECTORS
    max_elapsed: float = math.inf  # seconds

    def __post_init__(self):
        if self.max_owner_vectors <= 0 or not self.max_elapsed > 0:
            raise UsageError("budget limits must be positive")

    @classmethod
    def from_env(cls, default: int = DEFAULT_MAX_OWNER_VECTORS, **kw) -> "OracleBudget":
        raw = os.environ.get("EFPA_BUDGET")
        return cls(int(raw) if raw else default, **kw)


class Deadline:
    """Wall-clock guard shared by every bounded search."""

    def __init__(self, max_elapsed: float = math.inf):
        self.start = time.perf_counter()
        self.limit = max_elapsed

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check(self, nodes: int = 0) -> None:
        if self.elapsed() > self.limit:
            raise BudgetExceeded(
                f"time budget of {self.limit:g}s exceeded", reason="time", nodes_explored=nodes
            )


@lru_cache(maxsize=64)
def _suffix_codes(n: int, length: int) -> np.ndarray:
    """All (n+1)**length digit strings in lexicographic order; 0 = Unallocated."""
    base = n + 1
    k = base**length
    idx = np.arange(k, dtype=np.int64)
    codes = np.empty((k, length), dtype=np.int8 if base < 128 else np.int32)
    for j in range(length):
        codes[:, j] = (idx // base ** (length - 1 - j)) % base
    codes.setflags(write=False)
    return codes


@lru_cache(maxsize=64)
def _suffix_onehot(n: int, length: int) -> np.ndarray:
    codes = _suffix_codes(n, length)
    onehot = (codes[:, :, None] == np.arange(1, n + 1)[None, None, :]).astype(np.int64)
    onehot.setflags(write=False)
    return onehot


def _block_length(n: int, m: int) -> int:
    base = n + 1
    length = 0
    while length < m and base ** (length + 1) * max(n * n, 1) * 2 <= _BLOCK_ELEMENTS:
        length += 1
    return max(length, min(m, 1))


class _Bounds:
    """Sound upper bounds on the measure given the resources still unassigned."""

    def __init__(self, U: np.ndarray, measure: Measure, t: int):
        self.measure = measure
        self.t = t
        m = U.shape[1]
        self.m = m
        # suffix sums: rem_sum[:, d] = sum_{r >= d} U[:, r]
        rem = np.zeros((U.shape[0], m + 1), dtype=np.int64)
        if m:
            rem[:, :m] = np.cumsum(U[:, ::-1], axis=1)[:, ::-1]
        self.rem_sum = rem
        colmax = U.max(axis=0) if U.shape[0] and m else np.zeros(m, dtype=np.int64)
        rm = np.zeros(m + 1, dtype=np.int64)
        if m:
            rm[:m] = np.cumsum(colmax[::-1])[::-1]
        self.rem_max = rm

    def hopeless(self, depth: int, own: np.ndarray, counts: np.ndarray) -> bool:
        t = self.t
        left = self.m - depth
        if self.measure is Measure.SIZE:
            return int(counts.sum()) + left < t
        if self.measure is Measure.MCAR:
            return int(np.maximum(t - counts, 0).sum()) > left
        if self.measure is Measure.USW:
            return int(own.sum()) + int(self.rem_max[depth]) < t
        return bool(np.any(own + self.rem_sum[:, depth] < t))


def _block_measure(measure: Measure, own: np.ndarray, counts: np.ndarray) -> np.ndarray:
    if measure is Measure.USW:
        return own.sum(axis=1)
    if measure is Measure.ESW:
        return own.min(axis=1)
    if measure is Measure.SIZE:
        return counts.sum(axis=1)
    return counts.min(axis=1)


def oracle_solve(query: Query, budget: Optional[OracleBudget] = None) -> SolverResult:
    """Exhaustive decision with witness; raises BudgetExceeded when over budget."""
    budget = budget or OracleBudget()
    deadline = Deadline(budget.max_elapsed)
    inst = query.instance
    n, m = inst.n_agents, inst.m_resources
    total = (n + 1) ** m
    if total > budget.max_owner_vectors:
        raise BudgetExceeded(
            f"(n+1)^m = {n + 1}^{m} owner vectors exceeds budget {budget.max_owner_vectors}"
        )
    measure, t = query.measure, query.threshold
    U = inst.matrix
    L = _block_length(n, m)
    P = m - L
    onehot = _suffix_onehot(n, L)
    codes = _suffix_codes(n, L)
    U_suf = U[:, P:]
    V_suf = np.einsum("ar,krb->kab", U_suf, onehot)  # (K, n, n)
    C_suf = onehot.sum(axis=1)  # (K, n)
    diag = np.arange(n)
    bounds = _Bounds(U, measure, t)

    V_pre = np.zeros((n, n), dtype=np.int64)
    C_pre = np.zeros(n, dtype=np.int64)
    prefix: list[int] = []
    nodes = 0

    def evaluate_block() -> Optional[int]:
        nonlocal nodes
        V = V_suf + V_pre[None, :, :]
        own = V[:, diag, diag]
        ok = (V <= own[:, :, None]).all(axis=(1, 2))
        ok &= _block_measure(measure, own, C_suf + C_pre[None, :]) >= t
        hits = np.flatnonzero(ok)
        if hits.size:
            nodes += int(hits[0]) + 1
            return int(hits[0])
        nodes += V.shape[0]
        return None

    def dfs(depth: int) -> Optional[int]:
        own = V_pre[diag, diag]
        if bounds.hopeless(depth, own, C_pre):
            return None
        if depth == P:
            deadline.check(nodes)
            return evaluate_block()
        col = U[:, depth]
        for code in range(n + 1):
            if code:
                b = code - 1
                V_pre[:, b] += col
                C_pre[b] += 1
            prefix.append(code)
            hit = dfs(depth + 1)
            if hit is not None:
                return hit
            prefix.pop()
            if code:
                V_pre[:, b] -= col
                C_pre[b] -= 1
        return None

    hit = dfs(0)
    elapsed = deadline.elapsed()
    if hit is None:
        return SolverResult(Answer.NO, None, SolveStats("oracle", nodes, elapsed))
    digits = prefix + [int(c) for c in codes[hit]]
    witness = Allocation([None if c == 0 else c - 1 for c in digits])
    return SolverResult(Answer.YES, witness, SolveStats("oracle", nodes, elapsed))


def enumerate_envy_free(instance: Instance, max_owner_vectors: int = DEFAULT_MAX_OWNER_VECTORS) -> Iterator[Allocation]:
    """Every envy-free allocation, in the oracle's lexicographic order."""
    n, m = instance.n_agents, instance.m_resources
    if (n + 1) ** m > max_owner_vectors:
        raise BudgetExceeded(f"{n + 1}^{m} owner vectors exceeds budget {max_owner_vectors}")
    onehot = _suffix_onehot(n, m)
    codes = _suffix_codes(n, m)
    V = np.einsum("ar,krb->kab", instance.matrix, onehot)
    diag = np.arange(n)
    own = V[:, diag, diag]
    ok = (V <= own[:, :, None]).all(axis=(1, 2))
    for k in np.flatnonzero(ok):
        yield Allocation([None if c == 0 else int(c) - 1 for c in codes[k]])


def _require_binary(instance: Instance) -> None:
    if not classify_utilities(instance).is_binary:
        raise UsageError("binary utilities required")


def normalize_ef_allocation(instance: Instance, allocation: Allocation) -> Allocation:
    """Shrink an envy-free binary allocation to at most one liked resource per agent.

    Agents with positive bundle value keep their lowest-index liked resource;
    agents with zero value keep nothing.  The result is still envy-free.
    """
    _require_binary(instance)
    if not is_envy_free(instance, allocation):
        raise UsageError("allocation is not envy-free")
    owner: list[Optional[int]] = [None] * instance.m_resources
    for a, bundle in enumerate(allocation.bundles(instance.n_agents)):
        liked = [r for r in bundle if instance.utilities[a][r] == 1]
        if liked:
            owner[liked[0]] = a
    return Allocation(owner)


def induced_matching(instance: Instance, allocation: Allocation) -> Matching:
    """Matching induced by an allocation where each agent holds at most one liked resource."""
    pairs = []
    for a, bundle in enumerate(allocation.bundles(instance.n_agents)):
        if len(bundle) > 1 or (bundle and instance.utilities[a][bundle[0]] != 1):
            raise UsageError("allocation does not induce a matching")
        if bundle:
            pairs.append((a, bundle[0]))
    return Matching.from_pairs(instance.n_agents, instance.m_resources, pairs)


def check_ef_property(instance: Instance, allocation: Allocation, partition: EfmPartition) -> bool:
    """X_S agents hold zero value, and every allocated resource lies in Y_L."""
    _require_binary(instance)
    rows = instance.utilities
    for r, o in enumerate(allocation.owner):
        if o is None:
            continue
        if r not in partition.y_l:
            return False
        if o in partition.x_s and rows[o][r] > 0:
            return False
    return True


def normalized_is_efm(instance: Instance, allocation: Allocation) -> bool:
    norm = normalize_ef_allocation(instance, allocation)
    return is_envy_free(instance, norm) and is_envy_free_matching(
        build_like_graph(instance), induced_matching(instance, norm)
    )
