"""Like-graphs of binary instances, maximum matchings and the EFM partition.

The EFM partition splits agents into X_S / X_L and resources into Y_S / Y_L
such that every envy-free matching lives inside G[X_L; Y_L].  It is found
from any maximum matching by a breadth-first search over alternating paths
starting at the unmatched agents.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Instance, UsageError, classify_utilities


@dataclass(frozen=True)
class LikeGraph:
    n_left: int
    m_right: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, n_left: int, m_right: int, adjacency: Sequence[Sequence[int]]) -> "LikeGraph":
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        if len(adj) != n_left:
            raise UsageError("adjacency must list every left vertex")
        for nbrs in adj:
            if nbrs and not (0 <= nbrs[0] and nbrs[-1] < m_right):
                raise UsageError("adjacency index out of range")
        return cls(n_left, m_right, adj)

    def edges(self) -> set[tuple[int, int]]:
        return {(x, y) for x, nbrs in enumerate(self.adjacency) for y in nbrs}

    def right_adjacency(self) -> list[list[int]]:
        radj: list[list[int]] = [[] for _ in range(self.m_right)]
        for x, nbrs in enumerate(self.adjacency):
            for y in nbrs:
                radj[y].append(x)
        return radj


@dataclass(frozen=True)
class Matching:
    pair_of_left: tuple[Optional[int], ...]
    pair_of_right: tuple[Optional[int], ...]

    @classmethod
    def from_pairs(cls, n_left: int, m_right: int, pairs) -> "Matching":
        left: list[Optional[int]] = [None] * n_left
        right: list[Optional[int]] = [None] * m_right
        for x, y in pairs:
            if left[x] is not None or right[y] is not None:
                raise UsageError(f"vertex matched twice in pair ({x}, {y})")
            left[x] = y
            right[y] = x
        return cls(tuple(left), tuple(right))

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x, y in enumerate(self.pair_of_left) if y is not None]

    def __len__(self) -> int:
        return sum(y is not None for y in self.pair_of_left)


@dataclass(frozen=True)
class EfmPartition:
    x_s: frozenset[int]
    x_l: frozenset[int]
    y_s: frozenset[int]
    y_l: frozenset[int]


def build_like_graph(instance: Instance) -> LikeGraph:
    if not classify_utilities(instance).is_binary:
        raise UsageError("like-graphs are defined for binary utilities only")
    adj = tuple(
        tuple(r for r, x in enumerate(row) if x == 1) for row in instance.utilities
    )
    return LikeGraph(instance.n_agents, instance.m_resources, adj)


def maximum_matching(graph: LikeGraph) -> Matching:
    """Hopcroft-Karp with lowest-index-first scanning, so output is reproducible."""
    n, m = graph.n_left, graph.m_right
    adj = graph.adjacency
    pair_l: list[int] = [-1] * n
    pair_r: list[int] = [-1] * m

    # greedy warm start
    for x in range(n):
        for y in adj[x]:
            if pair_r[y] < 0:
                pair_l[x] = y
                pair_r[y] = x
                break

    inf = n + 1
    dist = [inf] * n
    while True:
        # BFS layers from free left vertices
        q = deque()
        for x in range(n):
            if pair_l[x] < 0:
                dist[x] = 0
                q.append(x)
            else:
                dist[x] = inf
        found = inf
        while q:
            x = q.popleft()
            if dist[x] >= found:
                continue
            for y in adj[x]:
                x2 = pair_r[y]
                if x2 < 0:
                    if found == inf:
                        found = dist[x] + 1
                elif dist[x2] == inf:
                    dist[x2] = dist[x] + 1
                    q.append(x2)
        if found == inf:
            break

        # iterative layered DFS
        ptr = [0] * n
        for root in range(n):
            if pair_l[root] >= 0:
                continue
            stack = [root]
            path_y: list[int] = []
            while stack:
                x = stack[-1]
                advanced = False
                nbrs = adj[x]
                while ptr[x] < len(nbrs):
                    y = nbrs[ptr[x]]
                    ptr[x] += 1
                    x2 = pair_r[y]
                    if x2 < 0:
                        if dist[x] + 1 == found:
                            path_y.append(y)
                            for xx, yy in zip(stack, path_y):
                                pair_l[xx] = yy
                                pair_r[yy] = xx
                            stack = []
                            advanced = True
                            break
                    elif dist[x2] == dist[x] + 1:
                        path_y.append(y)
                        stack.append(x2)
                        advanced = True
                        break
                if not advanced:
                    dist[x] = inf
                    stack.pop()
                    if path_y:
                        path_y.pop()

    return Matching(
        tuple(None if y < 0 else y for y in pair_l),
        tuple(None if x < 0 else x for x in pair_r),
    )


def efm_partition(graph: LikeGraph, matching: Optional[Matching] = None) -> EfmPartition:
    """EFM partition via alternating-path BFS from agents left unmatched by a
    maximum matching.  ``matching`` may be supplied; it must be maximum."""
    if matching is None:
        matching = maximum_matching(graph)
    seen_x = [False] * graph.n_left
    seen_y = [False] * graph.m_right
    q = deque()
    for x, y in enumerate(matching.pair_of_left):
        if y is None:
            seen_x[x] = True
            q.append(x)
    while q:
        x = q.popleft()
        for y in graph.adjacency[x]:
            if seen_y[y]:
                continue
            seen_y[y] = True
            x2 = matching.pair_of_right[y]
            # an unmatched y here would be an augmenting path
            assert x2 is not None, "matching is not maximum"
            if not seen_x[x2]:
                seen_x[x2] = True
                q.append(x2)
    return EfmPartition(
        x_s=frozenset(x for x in range(graph.n_left) if seen_x[x]),
        x_l=frozenset(x for x in range(graph.n_left) if not seen_x[x]),
        y_s=frozenset(y for y in range(graph.m_right) if seen_y[y]),
        y_l=frozenset(y for y in range(graph.m_right) if not seen_y[y]),
    )


def _efm_with_matching(graph: LikeGraph) -> tuple[EfmPartition, Matching]:
    M = maximum_matching(graph)
    part = efm_partition(graph, M)
    pairs = [(x, M.pair_of_left[x]) for x in sorted(part.x_l)]
    return part, Matching.from_pairs(graph.n_left, graph.m_right, pairs)


def max_envy_free_matching(graph: LikeGraph) -> Matching:
    """An X_L-saturating matching inside G[X_L; Y_L].

    The maximum matching restricted to X_L already qualifies: every X_L agent
    is matched, and its partner cannot lie in Y_S (that would pull the agent
    into X_S during the BFS).
    """
    return _efm_with_matching(graph)[1]


def efm_and_envy_free_matching(graph: LikeGraph) -> tuple[EfmPartition, Matching]:
    return _efm_with_matching(graph)


def is_envy_free_matching(graph: LikeGraph, matching: Matching) -> bool:
    matched_y = {y for y, x in enumerate(matching.pair_of_right) if x is not None}
    for x, nbrs in enumerate(graph.adjacency):
        if matching.pair_of_left[x] is not None:
            continue
        if any(y in matched_y for y in nbrs):
            return False
    return True
