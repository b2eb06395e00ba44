"""Exact bipartite matching over rational weights.

Weights are scaled to integers and fed to a Kuhn-Munkres (Hungarian) solver
with potentials, so optima are exact. Among equally heavy matchings the
lexicographically smallest one (right node of left 0, then of left 1, ...)
is returned: a base-n "digit" per left node is appended below the weight's
least significant unit, which ranks ties without disturbing the optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .model import InvalidInputError, to_fraction


@dataclass(frozen=True)
class BipartiteGraph:
    """Weighted bipartite graph; ``edges`` maps (left, right) to a weight >= 0."""

    n_left: int
    n_right: int
    edges: dict

    def __post_init__(self):
        if self.n_left < 0 or self.n_right < 0:
            raise InvalidInputError("node counts must be non-negative")
        clean = {}
        for (l, r), w in dict(self.edges).items():
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise InvalidInputError(f"edge ({l}, {r}) out of range")
            w = to_fraction(w)
            if w < 0:
                raise InvalidInputError(f"edge ({l}, {r}) has negative weight {w}")
            clean[(l, r)] = w
        object.__setattr__(self, "edges", clean)

    @classmethod
    def from_edges(cls, n_left: int, n_right: int, edges: Iterable[tuple]) -> "BipartiteGraph":
        """Build from ``(left, right[, weight])`` tuples; weight defaults to 1."""
        table = {}
        for e in edges:
            l, r = e[0], e[1]
            w = e[2] if len(e) > 2 else 1
            if (l, r) in table:
                raise InvalidInputError(f"duplicate edge ({l}, {r})")
            table[(l, r)] = w
        return cls(n_left, n_right, table)

    @classmethod
    def complete(cls, weights: Sequence[Sequence]) -> "BipartiteGraph":
        n_right = len(weights[0]) if weights else 0
        return cls(
            len(weights),
            n_right,
            {(l, r): w for l, row in enumerate(weights) for r, w in enumerate(row)},
        )

    def neighbours(self, l: int) -> list[int]:
        return sorted(r for (a, r) in self.edges if a == l)

    def left_degrees(self) -> list[int]:
        deg = [0] * self.n_left
        for l, _ in self.edges:
            deg[l] += 1
        return deg

    def right_degrees(self) -> list[int]:
        deg = [0] * self.n_right
        for _, r in self.edges:
            deg[r] += 1
        return deg

    def without(self, matching: dict) -> "BipartiteGraph":
        """Copy with the matched edges deleted."""
        used = set(matching.items())
        return BipartiteGraph(
            self.n_left, self.n_right, {e: w for e, w in self.edges.items() if e not in used}
        )


def _hungarian_min(cost: list[list[int]]) -> list[int]:
    """Min-cost perfect assignment for a square integer matrix; returns row -> column."""
    n = len(cost)
    inf = math.inf
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[col] = row matched to col (1-based, 0 = free)
    way = [0] * (n + 1)
    for row in range(1, n + 1):
        p[0] = row
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            crow = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = crow[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    return assignment


def max_weight_perfect_matching(graph: BipartiteGraph) -> Optional[tuple[dict, Fraction]]:
    """Maximum-weight perfect matching, or None when no perfect matching exists.

    Missing edges are forbidden (not zero-weight). Returns ``(left -> right, weight)``.
    """
    n = graph.n_left
    if graph.n_right != n:
        raise InvalidInputError(
            f"perfect matching needs equal sides, got {graph.n_left} x {graph.n_right}"
        )
    if n == 0:
        return {}, Fraction(0)
    if not graph.edges:
        return None

    scale = 1
    for w in graph.edges.values():
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    shift = n**n  # exceeds any total of tie-break digits
    place = [n ** (n - 1 - l) for l in range(n)]
    keys = {
        (l, r): int(w * scale) * shift + (n - 1 - r) * place[l]
        for (l, r), w in graph.edges.items()
    }
    forbid = n * max(keys.values()) + 1
    cost = [[forbid] * n for _ in range(n)]
    for (l, r), k in keys.items():
        cost[l][r] = -k

    assignment = _hungarian_min(cost)
    if any((l, r) not in graph.edges for l, r in enumerate(assignment)):
        return None
    matching = dict(enumerate(assignment))
    total = sum((graph.edges[e] for e in matching.items()), Fraction(0))
    return matching, total


def max_weight_assignment(weights: Sequence[Sequence]) -> tuple[tuple[int, ...], Fraction]:
    """Permutation ``perm`` maximising ``sum(weights[i][perm[i]])`` and that sum.

    >>> max_weight_assignment([[1, 2], [3, 1]])
    ((1, 0), Fraction(5, 1))
    """
    n = len(weights)
    if any(len(row) != n for row in weights):
        raise InvalidInputError("assignment weights must form a square matrix")
    for row in weights:
        for w in row:
            if to_fraction(w) < 0:
                raise InvalidInputError("assignment weights must be non-negative")
    result = max_weight_perfect_matching(BipartiteGraph.complete(weights))
    assert result is not None
    matching, total = result
    return tuple(matching[i] for i in range(n)), total


def maximum_matching(graph: BipartiteGraph) -> dict:
    """Maximum-cardinality matching (left -> right) by augmenting paths."""
    adj = [graph.neighbours(l) for l in range(graph.n_left)]
    match_right: dict[int, int] = {}

    def augment(l: int, seen: set) -> bool:
        for r in adj[l]:
            if r in seen:
                continue
            seen.add(r)
            if r not in match_right or augment(match_right[r], seen):
                match_right[r] = l
                return True
        return False

    for l in range(graph.n_left):
        augment(l, set())
    return {l: r for r, l in match_right.items()}


def has_perfect_matching(graph: BipartiteGraph) -> bool:
    """True iff every left node can be matched to a distinct right node.

    With ``n_left <= n_right`` this is a matching of the smaller side into the
    larger; a left side larger than the right side can never be saturated.
    """
    if graph.n_left > graph.n_right:
        return False
    return len(maximum_matching(graph)) == graph.n_left
