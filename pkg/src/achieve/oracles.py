"""Independent reference computations for the bundled corpus.

Nothing here touches the grounder or the engine.  Each function solves its
combinatorial problem directly so that engine results can be checked against it.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Sequence


def nqueens_solutions(n: int) -> list[frozenset[tuple[int, int]]]:
    """All placements of n non-attacking queens, as sets of (column, row) pairs."""
    out: list[frozenset[tuple[int, int]]] = []
    rows: list[int] = []

    def place(col: int) -> None:
        if col > n:
            out.append(frozenset((i + 1, r) for i, r in enumerate(rows)))
            return
        for r in range(1, n + 1):
            if all(r != r2 and abs(r - r2) != col - c2 for c2, r2 in enumerate(rows, 1)):
                rows.append(r)
                place(col + 1)
                rows.pop()

    if n >= 1:
        place(1)
    return out


def nqueens_count(n: int) -> int:
    return len(nqueens_solutions(n))


def is_non_attacking(placement: Iterable[tuple[int, int]]) -> bool:
    qs = list(placement)
    for (i, j), (ii, jj) in itertools.combinations(qs, 2):
        if i == ii or j == jj or abs(i - ii) == abs(j - jj):
            return False
    return True


def hamiltonian_cycles(vertices: Iterable[Hashable],
                       edges: Iterable[tuple]) -> set[frozenset[tuple]]:
    """Directed Hamiltonian cycles, each given by its edge set."""
    vs = sorted(set(vertices), key=repr)
    es = set(edges)
    if not vs:
        return set()
    first, rest = vs[0], vs[1:]
    cycles = set()
    for perm in itertools.permutations(rest):
        order = (first,) + perm
        cyc = frozenset(zip(order, order[1:] + order[:1]))
        if cyc <= es and len(cyc) == len(vs):
            cycles.add(cyc)
    return cycles


def ordered_binary_trees(k: int) -> list[frozenset[tuple[int, int]]]:
    """Edge sets of binary trees with leaves 0..k and internal vertices k+1..2k.

    Every internal vertex has two children smaller than itself, the root is 2k,
    and a larger internal vertex has a larger greatest child.
    """
    internal = list(range(k + 1, 2 * k + 1))
    root = 2 * k
    choices = [list(itertools.combinations(range(x), 2)) for x in internal]
    out = []
    for pick in itertools.product(*choices):
        parent: dict[int, int] = {}
        ok = True
        for x, pair in zip(internal, pick):
            for y in pair:
                if y in parent:
                    ok = False
                parent[y] = x
        if not ok or root in parent or len(parent) != 2 * k:
            continue
        maxima = [max(pair) for pair in pick]
        if any(a >= b for a, b in zip(maxima, maxima[1:])):
            continue
        out.append(frozenset((x, y) for x, pair in zip(internal, pick) for y in pair))
    return out


def covers_all_triples(rows: Sequence[Sequence[int]], s: int) -> bool:
    """Whether every ordering of three distinct symbols occurs as a subsequence of some row."""
    seen = set()
    for row in rows:
        seen.update(itertools.combinations(row, 3))
    return all(t in seen for t in itertools.permutations(range(1, s + 1), 3))


def sequence_covering_arrays(s: int, n: int) -> int:
    """Number of n-tuples of permutations of 1..s covering every 3-sequence."""
    perms = list(itertools.permutations(range(1, s + 1)))
    return sum(1 for rows in itertools.product(perms, repeat=n) if covers_all_triples(rows, s))


def borda(m: int, profiles: Sequence[tuple[Sequence[int], int]]) -> tuple[dict[int, int], set[int]]:
    """Borda scores and winners; position p of a ranking earns m - p points per voter."""
    scores = {c: 0 for c in range(1, m + 1)}
    for ranking, voters in profiles:
        for pos, c in enumerate(ranking, 1):
            scores[c] += (m - pos) * voters
    best = max(scores.values())
    return scores, {c for c, v in scores.items() if v == best}


BORDA_ELECTION = (3, (((1, 2, 3), 2), ((3, 2, 1), 1)))
GRAPHS = {
    "triangle": ("abc", [(x, y) for x in "abc" for y in "abc" if x != y]),
    "k4": ("abcd", [(x, y) for x in "abcd" for y in "abcd" if x != y]),
    "path3": ("abc", [("a", "b"), ("b", "c")]),
}


def _edges_json(cycles) -> list:
    return sorted(sorted(list(e) for e in c) for c in cycles)


def expected_results() -> dict:
    """Oracle answers for every corpus instance, in the layout of expected.json."""
    queens = {f"n{n}": {"models": nqueens_count(n)} for n in (4, 5, 6, 8)}
    ham = {}
    for name, (vs, es) in GRAPHS.items():
        cyc = hamiltonian_cycles(vs, es)
        ham[name] = {"models": len(cyc), "cycles": _edges_json(cyc)}
    obt = {f"k{k}": {"models": len(ordered_binary_trees(k))} for k in (1, 2, 3)}
    sca = {f"s3n{n}": {"models": sequence_covering_arrays(3, n)} for n in (2, 5, 6)}
    m, profiles = BORDA_ELECTION
    scores, winners = borda(m, profiles)
    return {
        "nqueens": queens,
        "queens8": {"none": {"models": nqueens_count(8)}},
        "hamiltonian": ham,
        "obt": obt,
        "sca": sca,
        "borda": {"election": {"models": 1, "winners": sorted(winners),
                               "scores": {str(c): v for c, v in sorted(scores.items())}}},
    }


if __name__ == "__main__":
    import json
    import sys

    json.dump(expected_results(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
