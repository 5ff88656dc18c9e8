import random

import pytest
from hypothesis import given, settings, strategies as st

from efpa.core import (
    MAX_UTILITY,
    Allocation,
    Instance,
    Measure,
    Query,
    UsageError,
    UtilityClass,
    bundle_utility,
    classify_utilities,
    first_envy,
    is_envy_free,
    measure_value,
    verify,
)
from efpa.generators import gen_folklore

from helpers import naive_envy_free, naive_measure


@st.composite
def instance_and_allocation(draw, max_n=4, max_m=6, max_value=5):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    rows = [[draw(st.integers(0, max_value)) for _ in range(m)] for _ in range(n)]
    owner = [draw(st.one_of(st.none(), st.integers(0, n - 1))) for _ in range(m)]
    return rows, owner


# -- construction ---------------------------------------------------------

def test_instance_rejects_bad_shapes():
    with pytest.raises(UsageError):
        Instance([])
    with pytest.raises(UsageError):
        Instance([[1, 2], [1]])
    with pytest.raises(UsageError):
        Instance([[-1]])
    with pytest.raises(UsageError):
        Instance([[MAX_UTILITY + 1]])
    with pytest.raises(UsageError):
        Instance([[1], [1]], agent_labels=["a", "a"])
    with pytest.raises(UsageError):
        Instance([[1]], resource_labels=["x", "y"])


def test_instance_with_zero_resources():
    inst = Instance([[], []])
    assert inst.n_agents == 2 and inst.m_resources == 0
    assert is_envy_free(inst, Allocation.empty(0))


def test_matrix_is_read_only():
    inst = Instance([[1, 2]])
    with pytest.raises(ValueError):
        inst.matrix[0, 0] = 5


def test_query_rejects_negative_threshold():
    with pytest.raises(UsageError):
        Query(Instance([[1]]), Measure.USW, -1)


def test_allocation_from_bundles_rejects_double_assignment():
    with pytest.raises(UsageError):
        Allocation.from_bundles(2, {0: [0], 1: [0]})
    assert Allocation.from_bundles(3, {1: [2], 0: [0]}).owner == (0, None, 1)


def test_allocation_out_of_range_owner():
    inst = Instance([[1, 1]])
    with pytest.raises(UsageError):
        is_envy_free(inst, Allocation([0, 1]))
    with pytest.raises(UsageError):
        is_envy_free(inst, Allocation([0]))


# -- bundle_utility --------------------------------------------------------

def test_bundle_utility_empty():
    inst = Instance([[4, 7], [1, 1]])
    assert bundle_utility(inst, 1, Allocation.empty(2), 0) == 0


def test_bundle_utility_additive():
    assert bundle_utility(Instance([[3, 5]]), 0, Allocation([0, 0]), 0) == 8


def test_bundle_utility_folklore_pair():
    inst = gen_folklore(2)
    assert bundle_utility(inst, 0, Allocation([1, 1, None]), 1) == 2


def test_bundle_utility_index_errors():
    inst = Instance([[1]])
    with pytest.raises(UsageError):
        bundle_utility(inst, 1, Allocation([0]), 0)
    with pytest.raises(UsageError):
        bundle_utility(inst, 0, Allocation([0]), -1)


# -- is_envy_free ----------------------------------------------------------

def test_empty_allocation_is_envy_free():
    assert is_envy_free(Instance([[5, 0], [3, 3]]), Allocation.empty(2))


def test_single_contested_resource_envy():
    inst = Instance([[1], [1]])
    assert not is_envy_free(inst, Allocation([0]))
    assert first_envy(inst, Allocation([0])) == (1, 0)


def test_folklore_complete_allocation_envy():
    inst = gen_folklore(2)
    assert not is_envy_free(inst, Allocation([0, 0, 1]))
    assert first_envy(inst, Allocation([0, 0, 1])) == (1, 0)


@settings(max_examples=300, deadline=None)
@given(instance_and_allocation())
def test_envy_free_matches_naive(case):
    rows, owner = case
    assert is_envy_free(Instance(rows), Allocation(owner)) == naive_envy_free(rows, owner)


@settings(max_examples=200, deadline=None)
@given(instance_and_allocation(), st.randoms(use_true_random=False))
def test_envy_free_agent_relabel_invariant(case, rnd):
    rows, owner = case
    n = len(rows)
    perm = list(range(n))
    rnd.shuffle(perm)  # agent a becomes perm[a]
    new_rows = [None] * n
    for a in range(n):
        new_rows[perm[a]] = rows[a]
    new_owner = [None if o is None else perm[o] for o in owner]
    assert is_envy_free(Instance(rows), Allocation(owner)) == is_envy_free(Instance(new_rows), Allocation(new_owner))


# -- measure_value ---------------------------------------------------------

def test_measures_of_empty_allocation():
    inst = Instance([[2, 3], [1, 0]])
    for measure in Measure:
        assert measure_value(inst, Allocation.empty(2), measure) == 0


def test_measures_diagonal():
    inst = Instance([[1, 0], [0, 1]])
    alloc = Allocation([0, 1])
    got = {ms.value: measure_value(inst, alloc, ms) for ms in Measure}
    assert got == {"usw": 2, "esw": 1, "size": 2, "mcar": 1}


def test_folklore_one_each_size():
    assert measure_value(gen_folklore(2), Allocation([0, 1, None]), "size") == 2


@settings(max_examples=300, deadline=None)
@given(instance_and_allocation())
def test_measures_match_naive_and_bounds(case):
    rows, owner = case
    inst, alloc = Instance(rows), Allocation(owner)
    vals = {ms.value: measure_value(inst, alloc, ms) for ms in Measure}
    for name, value in vals.items():
        assert value == naive_measure(rows, owner, name)
    n = len(rows)
    assert n * vals["mcar"] <= vals["size"]
    assert n * vals["esw"] <= vals["usw"]


@settings(max_examples=200, deadline=None)
@given(instance_and_allocation(), st.randoms(use_true_random=False))
def test_measures_resource_permutation_invariant(case, rnd):
    rows, owner = case
    m = len(owner)
    perm = list(range(m))
    rnd.shuffle(perm)
    rows2 = [[row[perm[j]] for j in range(m)] for row in rows]
    owner2 = [owner[perm[j]] for j in range(m)]
    for ms in Measure:
        assert measure_value(Instance(rows), Allocation(owner), ms) == measure_value(
            Instance(rows2), Allocation(owner2), ms)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(0, 6), st.integers(0, 2**32))
def test_empty_allocation_envy_free_random(n, m, seed):
    rng = random.Random(seed)
    inst = Instance([[rng.randint(0, 9) for _ in range(m)] for _ in range(n)])
    assert is_envy_free(inst, Allocation.empty(m))


# -- verify ----------------------------------------------------------------

def test_verify_messages():
    inst = gen_folklore(2)
    assert verify(inst, Allocation([0, 1, None]), Measure.SIZE, 2) is None
    assert verify(inst, Allocation([0, 0, 1]), Measure.SIZE, 3) == "agent 1 envies agent 0"
    msg = verify(inst, Allocation([0, 1, None]), Measure.SIZE, 3)
    assert msg is not None and "size 2 < threshold 3" in msg


# -- classify_utilities ----------------------------------------------------

@pytest.mark.parametrize("rows, tag, v, u", [
    ([[0, 1], [1, 1]], UtilityClass.BINARY, None, None),
    ([[0, 2], [6, 0]], UtilityClass.TERNARY, 2, 6),
    ([[0, 1, 2, 5]], UtilityClass.GENERAL, None, None),
    ([[1, 2], [2, 2]], UtilityClass.BIVALUED, None, None),
    ([[0, 3]], UtilityClass.GENERAL, None, None),
    ([[1, 3]], UtilityClass.TERNARY, 1, 3),
])
def test_classify(rows, tag, v, u):
    cls = classify_utilities(Instance(rows))
    assert cls.tag == tag
    if tag == UtilityClass.TERNARY:
        assert (cls.v, cls.u) == (v, u)


def test_classify_identical_flag():
    assert classify_utilities(Instance([[1, 0], [1, 0]])).identical
    assert not classify_utilities(Instance([[1, 0], [0, 1]])).identical
    assert classify_utilities(Instance([[1, 0], [1, 0]])).is_binary


@settings(max_examples=200, deadline=None)
@given(instance_and_allocation(max_value=7))
def test_classify_tag_matches_value_set(case):
    rows, _ = case
    cls = classify_utilities(Instance(rows))
    values = {x for row in rows for x in row}
    if cls.tag == UtilityClass.BINARY:
        assert values <= {0, 1}
    elif cls.tag == UtilityClass.BIVALUED:
        assert values <= {1, 2} and not values <= {0, 1}
    elif cls.tag == UtilityClass.TERNARY:
        assert values <= {0, cls.v, cls.u} and 0 < cls.v < cls.u
    assert cls.identical == all(row == rows[0] for row in rows)
