"""Independent brute-force references used as test oracles.

Nothing here calls into efpa's search code; these are deliberately naive.
"""

import itertools


def all_matrices(n, m, values):
    for flat in itertools.product(values, repeat=n * m):
        yield [list(flat[i * m:(i + 1) * m]) for i in range(n)]


def small_binary_matrices(max_n=3, max_m=4):
    for n in range(1, max_n + 1):
        for m in range(0, max_m + 1):
            yield from all_matrices(n, m, (0, 1))


def naive_envy_free(U, owner):
    n = len(U)
    vals = [[sum(U[a][r] for r, o in enumerate(owner) if o == b) for b in range(n)] for a in range(n)]
    return all(vals[a][b] <= vals[a][a] for a in range(n) for b in range(n))


def naive_measure(U, owner, measure):
    n = len(U)
    own = [sum(U[a][r] for r, o in enumerate(owner) if o == a) for a in range(n)]
    cnt = [sum(1 for o in owner if o == a) for a in range(n)]
    return {"usw": sum(own), "esw": min(own), "size": sum(cnt), "mcar": min(cnt)}[measure]


def naive_owner_vectors(n, m):
    """Lexicographic, Unallocated (None) first."""
    return itertools.product([None] + list(range(n)), repeat=m)


def naive_solve(U, measure, t):
    """First envy-free owner vector meeting the threshold, or None."""
    n, m = len(U), len(U[0]) if U else 0
    for owner in naive_owner_vectors(n, m):
        if naive_envy_free(U, owner) and naive_measure(U, owner, measure) >= t:
            return owner
    return None


def all_matchings(n, m, edges):
    """Every matching of a bipartite graph as a set of (x, y) pairs."""
    edges = sorted(edges)
    out = []

    def rec(i, used_x, used_y, chosen):
        if i == len(edges):
            out.append(frozenset(chosen))
            return
        rec(i + 1, used_x, used_y, chosen)
        x, y = edges[i]
        if x not in used_x and y not in used_y:
            rec(i + 1, used_x | {x}, used_y | {y}, chosen + [(x, y)])

    rec(0, frozenset(), frozenset(), [])
    return out


def naive_is_efm(adjacency, pairs):
    matched_x = {x for x, _ in pairs}
    matched_y = {y for _, y in pairs}
    return all(
        not (set(nbrs) & matched_y)
        for x, nbrs in enumerate(adjacency)
        if x not in matched_x
    )


def naive_matching_size(adjacency, left, right):
    """Simple augmenting-path matching restricted to the given vertex subsets."""
    right = set(right)
    match_of = {}

    def augment(x, seen):
        for y in adjacency[x]:
            if y in right and y not in seen:
                seen.add(y)
                if y not in match_of or augment(match_of[y], seen):
                    match_of[y] = x
                    return True
        return False

    return sum(augment(x, set()) for x in sorted(left))
