"""Instances, allocations, envy checks and the four efficiency measures."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

MAX_UTILITY = 2**31 - 1


class UsageError(ValueError):
    """Raised when inputs violate an operation's preconditions."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search hit its budget before reaching an answer.

    This is an *unknown* outcome and must not be read as NO.
    """

    def __init__(self, message: str, reason: str = "vectors", nodes_explored: int = 0):
        super().__init__(message)
        self.reason = reason
        self.nodes_explored = nodes_explored


class Measure(str, enum.Enum):
    USW = "usw"
    ESW = "esw"
    SIZE = "size"
    MCAR = "mcar"


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"


def _check_labels(labels, expected: int, axis: str):
    if labels is None:
        return None
    labels = tuple(str(x) for x in labels)
    if len(labels) != expected:
        raise UsageError(f"{axis} labels: expected {expected}, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise UsageError(f"{axis} labels must be unique")
    return labels


@dataclass(frozen=True)
class Instance:
    """An n x m matrix of non-negative integer utilities.

    ``utilities[a][r]`` is the value agent ``a`` has for resource ``r``.
    """

    utilities: tuple[tuple[int, ...], ...]
    agent_labels: Optional[tuple[str, ...]] = None
    resource_labels: Optional[tuple[str, ...]] = None
    m_resources: int = field(default=-1)

    def __init__(self, utilities, agent_labels=None, resource_labels=None, m_resources=None):
        rows = tuple(tuple(int(x) for x in row) for row in utilities)
        if not rows:
            raise UsageError("an instance needs at least one agent")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise UsageError("utility matrix is not rectangular")
        m = widths.pop()
        if m_resources is not None and m_resources != m:
            raise UsageError(f"expected {m_resources} resources per row, got {m}")
        for row in rows:
            for x in row:
                if x < 0:
                    raise UsageError("utilities must be non-negative")
                if x > MAX_UTILITY:
                    raise UsageError(f"utility {x} exceeds the cap {MAX_UTILITY}")
        object.__setattr__(self, "utilities", rows)
        object.__setattr__(self, "m_resources", m)
        object.__setattr__(self, "agent_labels", _check_labels(agent_labels, len(rows), "agent"))
        object.__setattr__(self, "resource_labels", _check_labels(resource_labels, m, "resource"))

    @property
    def n_agents(self) -> int:
        return len(self.utilities)

    @cached_property
    def matrix(self) -> np.ndarray:
        arr = np.array(self.utilities, dtype=np.int64).reshape(self.n_agents, self.m_resources)
        arr.setflags(write=False)
        return arr

    def value_set(self) -> set[int]:
        return {x for row in self.utilities for x in row}

    def __repr__(self):
        return f"Instance({[list(r) for r in self.utilities]})"


@dataclass(frozen=True)
class UtilityClass:
    """Value-set class of an instance; ``identical`` is reported separately."""

    tag: str  # "binary" | "bivalued" | "ternary" | "general"
    v: Optional[int] = None
    u: Optional[int] = None
    identical: bool = False

    BINARY = "binary"
    BIVALUED = "bivalued"
    TERNARY = "ternary"
    GENERAL = "general"

    @property
    def is_binary(self) -> bool:
        return self.tag == self.BINARY

    @property
    def is_bivalued(self) -> bool:
        return self.tag == self.BIVALUED


@dataclass(frozen=True)
class Allocation:
    """Owner-indexed allocation: ``owner[r]`` is an agent index or None."""

    owner: tuple[Optional[int], ...]

    def __init__(self, owner: Sequence[Optional[int]]):
        object.__setattr__(self, "owner", tuple(None if o is None else int(o) for o in owner))

    @classmethod
    def empty(cls, m: int) -> "Allocation":
        return cls([None] * m)

    @classmethod
    def from_bundles(cls, m: int, bundles: dict[int, Sequence[int]]) -> "Allocation":
        owner: list[Optional[int]] = [None] * m
        for agent, resources in bundles.items():
            for r in resources:
                if owner[r] is not None:
                    raise UsageError(f"resource {r} assigned twice")
                owner[r] = agent
        return cls(owner)

    def bundle(self, agent: int) -> list[int]:
        return [r for r, o in enumerate(self.owner) if o == agent]

    def bundles(self, n: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(n)]
        for r, o in enumerate(self.owner):
            if o is not None:
                out[o].append(r)
        return out

    @property
    def size(self) -> int:
        return sum(o is not None for o in self.owner)


@dataclass(frozen=True)
class Query:
    instance: Instance
    measure: Measure
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        if self.threshold < 0:
            raise UsageError("threshold must be non-negative")


@dataclass(frozen=True)
class SolveStats:
    algorithm_used: str
    nodes_explored: int = 0
    elapsed: float = 0.0  # seconds


@dataclass(frozen=True)
class SolverResult:
    answer: Answer
    witness: Optional[Allocation]
    stats: SolveStats

    @property
    def is_yes(self) -> bool:
        return self.answer is Answer.YES


def check_allocation(instance: Instance, allocation: Allocation) -> None:
    if len(allocation.owner) != instance.m_resources:
        raise UsageError(
            f"allocation has {len(allocation.owner)} entries, instance has {instance.m_resources} resources"
        )
    n = instance.n_agents
    for r, o in enumerate(allocation.owner):
        if o is not None and not 0 <= o < n:
            raise UsageError(f"resource {r} owned by unknown agent {o}")


def bundle_utility(instance: Instance, agent: int, allocation: Allocation, target: int) -> int:
    """Value ``agent`` has for the bundle currently held by ``target``."""
    n = instance.n_agents
    if not (0 <= agent < n and 0 <= target < n):
        raise UsageError(f"agent index out of range (n={n})")
    check_allocation(instance, allocation)
    row = instance.utilities[agent]
    return sum(row[r] for r, o in enumerate(allocation.owner) if o == target)


def valuation_matrix(instance: Instance, allocation: Allocation) -> list[list[int]]:
    """``V[a][b]`` = utility agent ``a`` derives from agent ``b``'s bundle."""
    check_allocation(instance, allocation)
    n = instance.n_agents
    V = [[0] * n for _ in range(n)]
    for r, o in enumerate(allocation.owner):
        if o is None:
            continue
        for a in range(n):
            V[a][o] += instance.utilities[a][r]
    return V


def first_envy(instance: Instance, allocation: Allocation) -> Optional[tuple[int, int]]:
    """Lexicographically first (envious, envied) agent pair, or None."""
    V = valuation_matrix(instance, allocation)
    n = instance.n_agents
    for a in range(n):
        own = V[a][a]
        for b in range(n):
            if V[a][b] > own:
                return a, b
    return None


def is_envy_free(instance: Instance, allocation: Allocation) -> bool:
    return first_envy(instance, allocation) is None


def measure_value(instance: Instance, allocation: Allocation, measure) -> int:
    measure = Measure(measure)
    check_allocation(instance, allocation)
    n = instance.n_agents
    if measure in (Measure.USW, Measure.ESW):
        own = [0] * n
        for r, o in enumerate(allocation.owner):
            if o is not None:
                own[o] += instance.utilities[o][r]
        return sum(own) if measure is Measure.USW else min(own)
    counts = [0] * n
    for o in allocation.owner:
        if o is not None:
            counts[o] += 1
    return sum(counts) if measure is Measure.SIZE else min(counts)


def verify(instance: Instance, allocation: Allocation, measure, threshold: int) -> Optional[str]:
    """Return None if the allocation is envy-free and meets the threshold,
    otherwise a diagnostic naming the first violated constraint."""
    measure = Measure(measure)
    envy = first_envy(instance, allocation)
    if envy is not None:
        return f"agent {envy[0]} envies agent {envy[1]}"
    value = measure_value(instance, allocation, measure)
    if value < threshold:
        return f"{measure.value} {value} < threshold {threshold}"
    return None


def classify_utilities(instance: Instance) -> UtilityClass:
    """Most specific value-set class: binary > bivalued > ternary > general.

    Ternary requires exactly two distinct positive values; a single positive
    value alongside 0 (other than 1) is reported as general.
    """
    values = instance.value_set()
    rows = instance.utilities
    identical = all(row == rows[0] for row in rows)
    if values <= {0, 1}:
        return UtilityClass(UtilityClass.BINARY, 0, 1, identical)
    if values <= {1, 2}:
        return UtilityClass(UtilityClass.BIVALUED, 1, 2, identical)
    positive = sorted(values - {0})
    if len(positive) == 2:
        return UtilityClass(UtilityClass.TERNARY, positive[0], positive[1], identical)
    return UtilityClass(UtilityClass.GENERAL, None, None, identical)
