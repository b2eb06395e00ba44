"""Envy graphs, bundle rotation along envy cycles, and topological orders."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .model import Allocation, Instance, validate


class EnvyKind(str, Enum):
    STANDARD = "standard"
    SOCIAL = "socially-aware"


class NoCycleError(ValueError):
    """Raised when cycle elimination is asked to act on an acyclic envy graph."""


@dataclass(frozen=True)
class EnvyGraph:
    n: int
    edges: frozenset
    kind: EnvyKind = EnvyKind.STANDARD

    def successors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == i)

    def sources(self) -> list[int]:
        """Agents nobody envies, ascending."""
        envied = {j for _, j in self.edges}
        return [i for i in range(self.n) if i not in envied]

    def to_adjacency(self) -> dict[str, list[int]]:
        return {str(i): self.successors(i) for i in range(self.n)}


def build(instance: Instance, allocation: Allocation, kind: Union[EnvyKind, str] = EnvyKind.STANDARD) -> EnvyGraph:
    """Edge i -> j iff i strictly prefers j's bundle (and, socially aware,
    would generate at least as much impact holding it as j does)."""
    kind = EnvyKind(kind)
    validate(instance, allocation)
    n = instance.n
    own = [sum((instance.v[i][g] for g in allocation[i]), 0) for i in range(n)]
    edges = set()
    for i in range(n):
        vi = instance.v[i]
        for j in range(n):
            if i == j:
                continue
            bj = allocation[j]
            if own[i] >= sum((vi[g] for g in bj), 0):
                continue
            if kind is EnvyKind.SOCIAL:
                if sum((instance.s[i][g] for g in bj), 0) < sum((instance.s[j][g] for g in bj), 0):
                    continue
            edges.add((i, j))
    return EnvyGraph(n, frozenset(edges), kind)


def find_cycle(graph: EnvyGraph) -> Optional[list[int]]:
    """First cycle met by a DFS from the lowest node, following lowest successors first.

    Returned as ``[c0, c1, ..., ck]`` with edges c0->c1->...->ck->c0.
    """
    succ = [graph.successors(i) for i in range(graph.n)]
    state = [0] * graph.n  # 0 new, 1 on stack, 2 done
    for root in range(graph.n):
        if state[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        state[root] = 1
        while path:
            nxt = next(iters[-1], None)
            if nxt is None:
                state[path.pop()] = 2
                iters.pop()
                continue
            if state[nxt] == 1:
                return path[path.index(nxt):]
            if state[nxt] == 0:
                state[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def cycle_elimination(instance: Instance, allocation: Allocation, graph: EnvyGraph) -> Allocation:
    """Rotate bundles along one envy cycle: each agent on it takes her successor's bundle."""
    cycle = find_cycle(graph)
    if cycle is None:
        raise NoCycleError("envy graph is acyclic")
    source = list(range(instance.n))
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        source[a] = b
    return allocation.permuted(source)


def acyclify(instance: Instance, allocation: Allocation, kind: Union[EnvyKind, str] = EnvyKind.STANDARD) -> Allocation:
    """Eliminate cycles until the envy graph of ``kind`` is acyclic.

    Terminates because every rotation strictly raises the rotated agents'
    own values while everyone else's stay put.
    """
    graph = build(instance, allocation, kind)
    while find_cycle(graph) is not None:
        allocation = cycle_elimination(instance, allocation, graph)
        graph = build(instance, allocation, kind)
    return allocation


def topological_order(graph: EnvyGraph) -> Optional[list[int]]:
    """Lexicographically smallest order in which every edge points forward, or None if cyclic."""
    indeg = [0] * graph.n
    for _, j in graph.edges:
        indeg[j] += 1
    heap = [i for i in range(graph.n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in graph.successors(i):
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    return order if len(order) == graph.n else None
