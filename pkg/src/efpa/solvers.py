"""Decision procedures with witnesses, dispatched by utility class and measure."""

from __future__ import annotations

import enum
import itertools
import logging
from typing import Iterable, Optional, Sequence

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
    first_envy,
    measure_value,
    verify,
)
from .matching import (
    LikeGraph,
    build_like_graph,
    efm_and_envy_free_matching,
    maximum_matching,
)
from .oracle import Deadline, OracleBudget, oracle_solve

logger = logging.getLogger(__name__)


class AlgorithmChoice(str, enum.Enum):
    AUTO = "auto"
    POLY = "poly"
    FPT = "fpt"
    ORACLE = "oracle"


def _result(answer: Answer, witness: Optional[Allocation], algorithm: str, nodes: int, deadline: Deadline) -> SolverResult:
    return SolverResult(answer, witness, SolveStats(algorithm, nodes, deadline.elapsed()))


def _require_binary(instance: Instance) -> None:
    if not classify_utilities(instance).is_binary:
        raise UsageError("this algorithm requires binary (0/1) utilities")


def _matching_plus_leftovers(instance: Instance, graph: LikeGraph) -> tuple[Allocation, int]:
    """EF matching on X_L, then each X_S agent takes a distinct unused Y_L resource.

    Returns the allocation and |Y_L|.  X_S agents like nothing in Y_L, so the
    result stays envy-free.
    """
    part, M = efm_and_envy_free_matching(graph)
    owner: list[Optional[int]] = [None] * instance.m_resources
    for x, y in M.pairs():
        owner[y] = x
    spare = [y for y in sorted(part.y_l) if owner[y] is None]
    for x, y in zip(sorted(part.x_s), spare):
        owner[y] = x
    return Allocation(owner), len(part.y_l)


def solve_binary_esw(instance: Instance, t: int) -> SolverResult:
    """Each agent needs t liked resources: match t copies of every agent."""
    _require_binary(instance)
    deadline = Deadline()
    n, m = instance.n_agents, instance.m_resources
    if t * n > m:
        return _result(Answer.NO, None, "poly-binary-esw", 0, deadline)
    liked = build_like_graph(instance).adjacency
    copies = LikeGraph(n * t, m, tuple(liked[c // t] for c in range(n * t)))
    M = maximum_matching(copies)
    if len(M) < n * t:
        return _result(Answer.NO, None, "poly-binary-esw", 0, deadline)
    owner: list[Optional[int]] = [None] * m
    for c, y in M.pairs():
        owner[y] = c // t
    return _result(Answer.YES, Allocation(owner), "poly-binary-esw", 0, deadline)


def _bucket(resources: Iterable[int], instance: Instance, agents: Sequence[int]) -> dict[tuple[int, ...], list[int]]:
    """Group resources by the set of ``agents`` that like them (key order = first resource)."""
    buckets: dict[tuple[int, ...], list[int]] = {}
    for r in sorted(resources):
        key = tuple(a for a in agents if instance.utilities[a][r] == 1)
        buckets.setdefault(key, []).append(r)
    return buckets


def _distributions(size: int, k: int) -> list[tuple[int, ...]]:
    """All ways to hand out at most ``size`` identical resources to ``k`` agents."""
    return [c for c in itertools.product(range(size + 1), repeat=k) if sum(c) <= size]


def _bucket_search(
    instance: Instance,
    agents: Sequence[int],
    buckets: dict[tuple[int, ...], list[int]],
    measure: Measure,
    t: int,
    deadline: Deadline,
) -> tuple[Optional[Allocation], int]:
    """Exact search over per-bucket counts.

    Resources in one bucket are valued identically by every agent, so an
    allocation is determined (up to envy and measure) by how many resources of
    each bucket each agent receives.  Agents outside ``agents`` get nothing.
    """
    k = len(agents)
    keys = list(buckets)
    members = [[a in key for a in agents] for key in keys]
    per_bucket = [_distributions(len(buckets[key]), k) for key in keys]
    nodes = 0
    for combo in itertools.product(*per_bucket):
        nodes += 1
        if nodes % 4096 == 0:
            deadline.check(nodes)
        # V[i][j]: agents[i]'s value for agents[j]'s bundle
        V = [[0] * k for _ in range(k)]
        counts = [0] * k
        for likes, dist in zip(members, combo):
            for j, c in enumerate(dist):
                if c:
                    counts[j] += c
                    for i in range(k):
                        if likes[i]:
                            V[i][j] += c
        if any(V[i][j] > V[i][i] for i in range(k) for j in range(k)):
            continue
        if measure is Measure.USW:
            value = sum(V[i][i] for i in range(k))
        else:
            value = sum(counts)
        if value < t:
            continue
        owner: list[Optional[int]] = [None] * instance.m_resources
        for key, dist in zip(keys, combo):
            pool = iter(buckets[key])
            for j, c in enumerate(dist):
                for _ in range(c):
                    owner[next(pool)] = agents[j]
        return Allocation(owner), nodes
    return None, nodes


def solve_binary_usw(instance: Instance, t: int, budget: Optional[OracleBudget] = None) -> SolverResult:
    """FPT in t; polynomial when t = 1."""
    _require_binary(instance)
    if t < 1:
        raise UsageError("solve_binary_usw expects t >= 1")
    deadline = Deadline(budget.max_elapsed if budget else float("inf"))
    graph = build_like_graph(instance)
    part, M = efm_and_envy_free_matching(graph)
    algo = "poly-binary-usw" if t == 1 else "fpt-binary-usw"
    if not part.x_l:
        return _result(Answer.NO, None, algo, 0, deadline)
    m = instance.m_resources
    if len(part.x_l) >= t:
        owner: list[Optional[int]] = [None] * m
        for x, y in M.pairs():
            owner[y] = x
        return _result(Answer.YES, Allocation(owner), algo, 0, deadline)

    x_l = sorted(part.x_l)
    # resources nobody likes cannot raise welfare
    relevant = [r for r in part.y_l if any(instance.utilities[a][r] for a in x_l)]
    buckets = _bucket(relevant, instance, x_l)
    for key, pool in buckets.items():
        if len(pool) > t * t:
            owner = [None] * m
            it = iter(pool)
            for a in x_l:
                for _ in range(t):
                    owner[next(it)] = a
            return _result(Answer.YES, Allocation(owner), "fpt-binary-usw:bucket", 0, deadline)
    witness, nodes = _bucket_search(instance, x_l, buckets, Measure.USW, t, deadline)
    if witness is None:
        return _result(Answer.NO, None, algo, nodes, deadline)
    return _result(Answer.YES, witness, algo, nodes, deadline)


def solve_binary_size(instance: Instance, t: int, budget: Optional[OracleBudget] = None) -> SolverResult:
    """FPT in t; polynomial when t = 1.  Zero-valued resources are kept: they count toward size."""
    _require_binary(instance)
    if t < 1:
        raise UsageError("solve_binary_size expects t >= 1")
    deadline = Deadline(budget.max_elapsed if budget else float("inf"))
    graph = build_like_graph(instance)
    algo = "poly-binary-size" if t == 1 else "fpt-binary-size"
    n = instance.n_agents
    alloc, n_yl = _matching_plus_leftovers(instance, graph)
    if n_yl < t:
        return _result(Answer.NO, None, algo, 0, deadline)
    if n > t:
        # size = min(n, |Y_L|) >= t
        return _result(Answer.YES, alloc, algo, 0, deadline)

    part, _ = efm_and_envy_free_matching(graph)
    agents = list(range(n))
    buckets = _bucket(part.y_l, instance, agents)
    quota = t * n
    for key, pool in buckets.items():
        if len(pool) >= quota:
            owner: list[Optional[int]] = [None] * instance.m_resources
            it = iter(pool)
            for a in agents:
                for _ in range(t):
                    owner[next(it)] = a
            return _result(Answer.YES, Allocation(owner), "fpt-binary-size:bucket", 0, deadline)
    # no bucket reaches the quota here, so truncation to `quota` is a no-op
    buckets = {key: pool[:quota] for key, pool in buckets.items()}
    witness, nodes = _bucket_search(instance, agents, buckets, Measure.SIZE, t, deadline)
    if witness is None:
        return _result(Answer.NO, None, algo, nodes, deadline)
    return _result(Answer.YES, witness, algo, nodes, deadline)


def solve_binary_mcar(instance: Instance, t: int, budget: Optional[OracleBudget] = None) -> SolverResult:
    """t = 1: YES iff every agent fits into Y_L.  t >= 2 is NP-hard; uses the oracle."""
    _require_binary(instance)
    if t >= 2:
        res = oracle_solve(Query(instance, Measure.MCAR, t), budget)
        return res
    deadline = Deadline()
    if t <= 0:
        return _result(Answer.YES, Allocation.empty(instance.m_resources), "trivial", 0, deadline)
    alloc, n_yl = _matching_plus_leftovers(instance, build_like_graph(instance))
    if instance.n_agents > n_yl:
        return _result(Answer.NO, None, "poly-binary-mcar", 0, deadline)
    return _result(Answer.YES, alloc, "poly-binary-mcar", 0, deadline)


def _shifted_binary(instance: Instance) -> Instance:
    return Instance([[x - 1 for x in row] for row in instance.utilities])


def _two_shape_search(instance: Instance, deadline: Deadline) -> tuple[Optional[Allocation], int]:
    """Allocations where each agent holds either one resource it values 2 or
    exactly two resources; first envy-free one in agent/resource index order."""
    n, m = instance.n_agents, instance.m_resources
    rows = instance.utilities
    owner: list[Optional[int]] = [None] * m
    nodes = 0

    def options(a: int) -> Iterable[tuple[int, ...]]:
        free = [r for r in range(m) if owner[r] is None]
        for r in free:
            if rows[a][r] == 2:
                yield (r,)
        yield from itertools.combinations(free, 2)

    def rec(a: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes % 4096 == 0:
            deadline.check(nodes)
        if a == n:
            return first_envy(instance, Allocation(owner)) is None
        if sum(o is None for o in owner) < n - a:
            return False
        for bundle in options(a):
            for r in bundle:
                owner[r] = a
            if rec(a + 1):
                return True
            for r in bundle:
                owner[r] = None
        return False

    if rec(0):
        return Allocation(owner), nodes
    return None, nodes


def solve_bivalued_t1(instance: Instance, budget: Optional[OracleBudget] = None) -> SolverResult:
    """Threshold-1 decision for {1,2} utilities; the answer is shared by all four measures."""
    if not instance.value_set() <= {1, 2}:
        raise UsageError("bivalued solver requires utilities in {1, 2}")
    deadline = Deadline(budget.max_elapsed if budget else float("inf"))
    shifted = _shifted_binary(instance)
    alloc, n_yl = _matching_plus_leftovers(shifted, build_like_graph(shifted))
    if instance.n_agents <= n_yl:
        return _result(Answer.YES, alloc, "bivalued-t1:one-each", 0, deadline)
    witness, nodes = _two_shape_search(instance, deadline)
    if witness is None:
        return _result(Answer.NO, None, "bivalued-t1", nodes, deadline)
    return _result(Answer.YES, witness, "bivalued-t1:one-or-two", nodes, deadline)


def _dispatch(query: Query, choice: AlgorithmChoice, budget: Optional[OracleBudget]) -> SolverResult:
    inst, measure, t = query.instance, query.measure, query.threshold
    cls = classify_utilities(inst)

    if choice is AlgorithmChoice.ORACLE:
        return oracle_solve(query, budget)
    if t == 0:
        deadline = Deadline()
        return _result(Answer.YES, Allocation.empty(inst.m_resources), "trivial", 0, deadline)

    if choice in (AlgorithmChoice.POLY, AlgorithmChoice.FPT):
        if not cls.is_binary:
            if choice is AlgorithmChoice.POLY and cls.is_bivalued and t == 1:
                return solve_bivalued_t1(inst, budget)
            raise UsageError(f"--algorithm {choice.value} requires binary utilities")
        if measure is Measure.ESW:
            return solve_binary_esw(inst, t)
        if measure is Measure.MCAR:
            if t > 1:
                raise UsageError("no polynomial or FPT algorithm is known for mcar with t >= 2")
            return solve_binary_mcar(inst, t)
        if choice is AlgorithmChoice.POLY and t > 1:
            raise UsageError(f"{measure.value} with t >= 2 is NP-hard; use fpt or oracle")
        solver = solve_binary_usw if measure is Measure.USW else solve_binary_size
        return solver(inst, t, budget)

    # auto
    if cls.is_binary:
        if measure is Measure.ESW:
            return solve_binary_esw(inst, t)
        if measure is Measure.USW:
            return solve_binary_usw(inst, t, budget)
        if measure is Measure.SIZE:
            return solve_binary_size(inst, t, budget)
        return solve_binary_mcar(inst, t, budget)
    if cls.is_bivalued and t == 1:
        return solve_bivalued_t1(inst, budget)
    return oracle_solve(query, budget)


def solve(query: Query, choice=AlgorithmChoice.AUTO, budget: Optional[OracleBudget] = None) -> SolverResult:
    """Decide the query; YES results carry a witness that has been re-verified."""
    choice = AlgorithmChoice(choice)
    result = _dispatch(query, choice, budget)
    if result.is_yes:
        problem = verify(query.instance, result.witness, query.measure, query.threshold)
        if problem is not None:
            raise AssertionError(f"{result.stats.algorithm_used} produced a bad witness: {problem}")
    logger.debug("solved %s t=%d via %s: %s", query.measure.value, query.threshold,
                 result.stats.algorithm_used, result.answer.value)
    return result


__all__ = [
    "AlgorithmChoice",
    "BudgetExceeded",
    "solve",
    "solve_binary_esw",
    "solve_binary_usw",
    "solve_binary_size",
    "solve_binary_mcar",
    "solve_bivalued_t1",
    "measure_value",
]
