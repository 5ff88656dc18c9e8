"""Instance generators: stock families and hardness-reduction gadgets.

Each gadget maps a source instance (3-Partition or X3C) to an allocation
instance that is a YES-instance at threshold 1 exactly when the source is.
Resource order inside every gadget is fixed so output is byte-stable.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

import numpy as np

from .core import Instance, UsageError, UtilityClass, classify_utilities


@dataclass(frozen=True)
class ThreePartitionInput:
    numbers: tuple[int, ...]

    def __post_init__(self):
        nums = tuple(int(x) for x in self.numbers)
        object.__setattr__(self, "numbers", nums)
        if not nums or len(nums) % 3:
            raise UsageError("3-Partition needs a positive multiple of 3 numbers")
        if any(x <= 0 for x in nums):
            raise UsageError("3-Partition numbers must be positive")
        if sum(nums) % self.n:
            raise UsageError(f"sum {sum(nums)} is not divisible by n={self.n}")
        b = self.b
        if any(x >= b for x in nums):
            raise UsageError(f"every number must be < b = {b}")
        if any(4 * x <= b for x in nums):
            warnings.warn(f"some numbers are <= b/4 (b = {b}); not a strict 3-Partition input")

    @property
    def n(self) -> int:
        return len(self.numbers) // 3

    @property
    def b(self) -> int:
        return sum(self.numbers) // self.n


@dataclass(frozen=True)
class X3cInput:
    """Ground set {0, ..., ground_set_size-1} and a list of 3-element sets.

    Sets are kept as given (sorted triples); a triple may repeat an element,
    in which case it can never be part of an exact cover.
    """

    ground_set_size: int
    sets: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.ground_set_size <= 0 or self.ground_set_size % 3:
            raise UsageError("ground set size must be a positive multiple of 3")
        sets = tuple(tuple(sorted(int(x) for x in s)) for s in self.sets)
        for s in sets:
            if len(s) != 3:
                raise UsageError(f"set {s} does not have exactly 3 elements")
            if not all(0 <= x < self.ground_set_size for x in s):
                raise UsageError(f"set {s} has an element outside the ground set")
        if not sets:
            raise UsageError("X3C needs at least one set")
        object.__setattr__(self, "sets", sets)

    @property
    def n(self) -> int:
        return self.ground_set_size // 3

    @property
    def m(self) -> int:
        return len(self.sets)

    def padded(self, min_sets: int) -> "X3cInput":
        """Append copies of the first set until there are at least ``min_sets`` sets."""
        extra = max(0, min_sets - self.m)
        return X3cInput(self.ground_set_size, self.sets + (self.sets[0],) * extra)


def gen_folklore(n: int) -> Instance:
    """n agents, n+1 resources, every utility 1."""
    if n < 1:
        raise UsageError("need at least one agent")
    return Instance([[1] * (n + 1) for _ in range(n)])


def gen_identical_3partition(source: ThreePartitionInput) -> Instance:
    """3n+1 agents with one shared row: normal resources e_i + b, then 2n+1 specials at 4b."""
    n, b = source.n, source.b
    row = [e + b for e in source.numbers] + [4 * b] * (2 * n + 1)
    return Instance([row] * (3 * n + 1))


def gen_shadow_extension(instance: Instance, v: Optional[int] = None, u: Optional[int] = None) -> Instance:
    """Add two shadow agents and two shadow resources per original resource.

    Rows: original agents, then (a'_r, a''_r) for r = 0..m-1.
    Columns: original resources, then (r', r'') for r = 0..m-1.
    """
    if v is None or u is None:
        cls = classify_utilities(instance)
        if cls.tag != UtilityClass.TERNARY:
            raise UsageError("base instance is not ternary; pass v and u explicitly")
        v, u = cls.v, cls.u
    if not 0 < v < u:
        raise UsageError("need 0 < v < u")
    if not instance.value_set() <= {0, v, u}:
        raise UsageError(f"base utilities must lie in {{0, {v}, {u}}}")
    m = instance.m_resources
    rows = [list(row) + [v] * (2 * m) for row in instance.utilities]
    for r in range(m):
        shadow = [0] * m + [u] * (2 * m)
        shadow[r] = v
        rows.append(shadow)
        rows.append(list(shadow))
    return Instance(rows)


def _cover_block(source: X3cInput, value: int) -> list[list[int]]:
    """Cover-agent utilities over the normal/element resources."""
    return [[value if i in s else 0 for i in range(source.ground_set_size)] for s in source.sets]


def gen_x3c_kv(source: X3cInput, v: int, k: int) -> Instance:
    """Values {0, v, kv} with k >= 3.

    Resources: 3n normal, (k-3)n small, m-n dummy, 1 special.
    Agents: m cover agents, then the special agent.
    """
    if v <= 0 or k < 3:
        raise UsageError("need v > 0 and k >= 3")
    source = source.padded(source.n + 1)
    n, m = source.n, source.m
    u = k * v
    small, dummy = (k - 3) * n, m - n
    rows = [
        normal + [v] * small + [u] * dummy + [u]
        for normal in _cover_block(source, v)
    ]
    rows.append([0] * (3 * n + small + dummy) + [u])
    return Instance(rows)


def x3c_2v_observers(source: X3cInput) -> list[tuple[str, tuple[int, ...]]]:
    """Observer roster: ("rrd", (i, j, k)), ("rds", (i, j, k)), ("star", ())."""
    n, m = source.n, source.m
    n_dummy = 2 * (m - n)
    out: list[tuple[str, tuple[int, ...]]] = []
    for i, j in itertools.combinations(range(3 * n), 2):
        for k in range(n_dummy):
            out.append(("rrd", (i, j, k)))
    for i in range(3 * n):
        for j in range(n_dummy):
            for k in range(n):
                out.append(("rds", (i, j, k)))
    out.append(("star", ()))
    return out


def gen_x3c_2v(source: X3cInput, v: int) -> Instance:
    """Values {0, v, 2v}.

    Resources: 3n normal, n small, 2(m-n) dummy, 2|W| blank, 4 special.
    Agents: m cover agents, standard agents b, c, d, then the observers.
    Observers value blanks and specials at 2v.
    """
    if v <= 0:
        raise UsageError("need v > 0")
    source = source.padded(source.n + 1)
    n, m = source.n, source.m
    observers = x3c_2v_observers(source)
    n_norm, n_small, n_dummy, n_blank = 3 * n, n, 2 * (m - n), 2 * len(observers)
    small0 = n_norm
    dummy0 = small0 + n_small
    blank0 = dummy0 + n_dummy
    special0 = blank0 + n_blank
    width = special0 + 4
    w = 2 * v

    rows = []
    for normal in _cover_block(source, v):
        rows.append(normal + [v] * n_small + [w] * n_dummy + [0] * n_blank + [w] * 4)
    specials = {
        "b": [w, 0, w, 0],
        "c": [w, v, w, v],
        "d": [0, 0, w, 0],
    }
    for name in ("b", "c", "d"):
        rows.append([0] * special0 + specials[name])
    for kind, idx in observers:
        row = [0] * blank0 + [w] * n_blank + [w] * 4
        if kind == "rrd":
            i, j, k = idx
            row[i] = row[j] = row[dummy0 + k] = w
        elif kind == "rds":
            i, j, k = idx
            row[i] = row[dummy0 + j] = row[small0 + k] = w
        else:
            for r in range(small0, blank0):
                row[r] = w
        rows.append(row)
    assert all(len(r) == width for r in rows)
    return Instance(rows)


def kvc_constants(v: int, k: int, c: int) -> tuple[int, int, int]:
    """(u, k1, k2) with u = kv + c, k1 = k + 1 and k2 the least k' with k'v > 2u."""
    if not (k > 0 and 0 < c < v):
        raise UsageError("need k > 0 and 0 < c < v")
    u = k * v + c
    return u, k + 1, 2 * u // v + 1


def gen_x3c_kvc(source: X3cInput, v: int, k: int, c: int) -> Instance:
    """Values {0, v, kv + c} with 0 < c < v.

    Resources: 3n element, 3(m-n) dummy, s_b1, k1 b2-boosters, k2 b3-boosters,
    then the rrd and rdd guard pools (k2 per guard).
    Agents: m cover agents, boosters b1..b3, rrd guards, rdd guards.
    """
    u, k1, k2 = kvc_constants(v, k, c)
    source = source.padded(source.n + 1)
    n, m = source.n, source.m
    n_el, n_dummy = 3 * n, 3 * (m - n)
    rrd = [(p, q, d) for p, q in itertools.combinations(range(n_el), 2) for d in range(n_dummy)]
    rdd = [(r, d, e) for r in range(n_el) for d, e in itertools.combinations(range(n_dummy), 2)]
    dummy0 = n_el
    sb1 = dummy0 + n_dummy
    sb2 = sb1 + 1
    sb3 = sb2 + k1
    pool_rrd = sb3 + k2
    pool_rdd = pool_rrd + k2 * len(rrd)
    width = pool_rdd + k2 * len(rdd)

    def blank():
        return [0] * width

    rows = []
    for elements in _cover_block(source, u):
        row = blank()
        row[:n_el] = elements
        for r in range(dummy0, sb1):
            row[r] = u
        for r in range(sb3, sb3 + 3):
            row[r] = u
        rows.append(row)
    b1 = blank()
    b1[sb1] = u
    b2 = blank()
    b2[sb1] = u
    for r in range(sb2, sb3):
        b2[r] = v
    b3 = blank()
    b3[sb2] = b3[sb2 + 1] = u
    for r in range(sb3, pool_rrd):
        b3[r] = v
    rows += [b1, b2, b3]
    for guards, pool0, pool_end in ((rrd, pool_rrd, pool_rdd), (rdd, pool_rdd, width)):
        for g in guards:
            row = blank()
            if guards is rrd:
                p, q, d = g
                row[p] = row[q] = row[dummy0 + d] = u
            else:
                r, d, e = g
                row[r] = row[dummy0 + d] = row[dummy0 + e] = u
            for x in range(pool0, pool_end):
                row[x] = v
            row[sb3] = row[sb3 + 1] = u
            rows.append(row)
    return Instance(rows)


def kvc_agent_count(n: int, m: int) -> int:
    return m + 3 + comb(3 * n, 2) * 3 * (m - n) + comb(3 * (m - n), 2) * 3 * n


def gen_random(n: int, m: int, cls: UtilityClass, seed: int, max_value: int = 9) -> Instance:
    """Uniform draws from the class's value set; ``cls.identical`` repeats one row."""
    rng = np.random.default_rng(seed)
    if cls.tag == UtilityClass.BINARY:
        values = [0, 1]
    elif cls.tag == UtilityClass.BIVALUED:
        values = [1, 2]
    elif cls.tag == UtilityClass.TERNARY:
        if cls.v is None or cls.u is None or not 0 < cls.v < cls.u:
            raise UsageError("ternary class needs 0 < v < u")
        values = [0, cls.v, cls.u]
    else:
        values = list(range(max_value + 1))
    rows = n if not cls.identical else 1
    mat = rng.choice(np.array(values, dtype=np.int64), size=(rows, m))
    if cls.identical:
        mat = np.repeat(mat, n, axis=0)
    return Instance(mat.tolist())


def three_partition_brute_force(numbers: Sequence[int]) -> bool:
    """Tiny brute force: can the numbers be split into triples all summing to b?"""
    nums = list(numbers)
    n = len(nums) // 3
    if len(nums) % 3 or sum(nums) % n:
        return False
    b = sum(nums) // n

    def rec(rest: list[int]) -> bool:
        if not rest:
            return True
        first, tail = rest[0], rest[1:]
        for i, j in itertools.combinations(range(len(tail)), 2):
            if first + tail[i] + tail[j] == b:
                remaining = [x for k, x in enumerate(tail) if k not in (i, j)]
                if rec(remaining):
                    return True
        return False

    return rec(nums)


def x3c_brute_force(source: X3cInput) -> bool:
    """Tiny brute force: do n of the sets cover every element exactly once?"""
    target = list(range(source.ground_set_size))
    for combo in itertools.combinations(source.sets, source.n):
        if sorted(x for s in combo for x in s) == target:
            return True
    return False
