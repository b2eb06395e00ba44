"""Constructive allocation procedures.

Every function takes an :class:`~socialfair.model.Instance` and returns a
complete :class:`~socialfair.model.Allocation` of that instance. Whenever a
choice is not forced, the lowest index wins (good index before agent index
where both apply), so every run is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import envygraph
from .envygraph import EnvyKind
from .matching import BipartiteGraph, max_weight_assignment, max_weight_perfect_matching
from .model import (
    Allocation,
    Instance,
    InvalidInputError,
    NotApplicableError,
    common_good_order,
    is_identical,
    pad_with_dummies,
    strip_dummies,
    utilitarian_welfare,
    validate,
    valuation_ranking,
)


def _best(candidates: Iterable[int], score: Callable[[int], Fraction]) -> int:
    """Highest score; the first candidate wins ties (callers pass sorted candidates)."""
    best = None
    best_score = None
    for c in candidates:
        sc = score(c)
        if best is None or sc > best_score:
            best, best_score = c, sc
    if best is None:
        raise ValueError("no candidates")
    return best


def greedy_opt(instance: Instance) -> Allocation:
    """Welfare-optimal allocation: each good to its highest-impact agent."""
    owners = [_best(instance.agents, lambda i: instance.s[i][g]) for g in instance.goods]
    return Allocation.from_owners(owners, instance.n)


# --- picking sequences -------------------------------------------------------


def round_robin_sequence(order: Sequence[int], length: int) -> list[int]:
    return [order[t % len(order)] for t in range(length)]


def is_recursively_balanced(sequence: Sequence[int], n: int) -> bool:
    """Every prefix gives any two agents turn counts differing by at most one."""
    counts = [0] * n
    for a in sequence:
        if not 0 <= a < n:
            return False
        counts[a] += 1
        if max(counts) - min(counts) > 1:
            return False
    return True


def sequential_allocation(
    instance: Instance, sequence: Sequence[int], goods: Optional[Iterable[int]] = None,
    start: Optional[Allocation] = None,
) -> Allocation:
    """Agents pick in ``sequence`` order, each taking her favourite remaining good.

    ``goods`` restricts the pool (default: all goods not already in ``start``).
    """
    bundles = [set(b) for b in (start or Allocation.empty(instance.n))]
    taken = set().union(*bundles)
    pool = sorted(set(instance.goods if goods is None else goods) - taken)
    if len(sequence) != len(pool):
        raise InvalidInputError(f"picking sequence has {len(sequence)} entries for {len(pool)} goods")
    for a in sequence:
        if not 0 <= a < instance.n:
            raise InvalidInputError(f"picking sequence names agent {a} but n={instance.n}")
        g = _best(pool, lambda x: instance.v[a][x])
        pool.remove(g)
        bundles[a].add(g)
    return Allocation(tuple(frozenset(b) for b in bundles))


# --- envy-cycle elimination --------------------------------------------------


def envy_cycle_elimination_alloc(
    instance: Instance, good_order: Optional[Sequence[int]] = None,
    start: Optional[Allocation] = None,
) -> Allocation:
    """Give goods one by one to an unenvied agent, rotating away envy cycles first.

    With ``start`` the listed goods are added on top of an existing partial
    allocation (which should already be EF1 for the output to be EF1).
    """
    allocation = start or Allocation.empty(instance.n)
    validate(instance, allocation)
    if good_order is None:
        good_order = sorted(set(instance.goods) - allocation.allocated)
    if len(set(good_order)) != len(good_order) or set(good_order) & allocation.allocated:
        raise InvalidInputError("good order repeats a good or names an allocated one")
    for g in good_order:
        allocation = envygraph.acyclify(instance, allocation)
        source = envygraph.build(instance, allocation).sources()[0]
        allocation = allocation.with_good(source, g)
    return allocation


# --- ordered instances ------------------------------------------------------


def ordered_ef1_transform(instance: Instance, allocation: Allocation) -> Allocation:
    """Rebuild ``allocation`` so every agent holds one good of each block of n
    consecutive goods in the common ranking, keeping her best-impact good of
    each block she already had a share in."""
    order = common_good_order(instance)
    if order is None:
        raise NotApplicableError("instance valuations are not ordered")
    validate(instance, allocation, complete=True)
    n, m = instance.n, instance.m
    padded = pad_with_dummies(instance)
    order = order + list(range(m, padded.m))
    result: list[set[int]] = [set() for _ in range(n)]
    for start in range(0, padded.m, n):
        block = order[start:start + n]
        remaining = set(block)
        waiting = []
        for i in range(n):
            mine = sorted(g for g in block if g in allocation[i])
            if mine:
                g = _best(mine, lambda x: padded.s[i][x])
                result[i].add(g)
                remaining.discard(g)
            else:
                waiting.append(i)
        for i, g in zip(waiting, sorted(remaining)):
            result[i].add(g)
    return strip_dummies(Allocation(tuple(frozenset(b) for b in result)), m)


# --- identical valuations ---------------------------------------------------


def efx_identical(instance: Instance) -> Allocation:
    """Goods in decreasing common value, each to a currently poorest bundle."""
    if not is_identical(instance):
        raise NotApplicableError("valuations are not identical")
    v = instance.v[0]
    bundles: list[set[int]] = [set() for _ in range(instance.n)]
    worth = [Fraction(0)] * instance.n
    for g in sorted(instance.goods, key=lambda x: (-v[x], x)):
        i = min(instance.agents, key=lambda a: (worth[a], a))
        bundles[i].add(g)
        worth[i] += v[g]
    return Allocation(tuple(frozenset(b) for b in bundles))


def efx_identical_n_approx(instance: Instance) -> Allocation:
    """EFX bundles handed out by a maximum-impact agent/bundle assignment."""
    base = efx_identical(instance)
    weights = [[sum((instance.s[i][g] for g in b), Fraction(0)) for b in base] for i in instance.agents]
    perm, _ = max_weight_assignment(weights)
    return base.permuted(perm)


# --- general additive instances -----------------------------------------------


def _max_impact_pair(instance: Instance) -> Optional[tuple[int, int]]:
    best = None
    best_val = None
    for g in instance.goods:
        for i in instance.agents:
            if best is None or instance.s[i][g] > best_val:
                best, best_val = (g, i), instance.s[i][g]
    return best


def simple_ef1_approx(instance: Instance, pinned: Optional[tuple[int, int]] = None) -> Allocation:
    """Give the single highest-impact good to its agent, round-robin the rest with
    that agent picking last.

    ``pinned`` is an explicit ``(good, agent)`` pair to use instead of the argmax.
    """
    if pinned is None:
        pinned = _max_impact_pair(instance)
        if pinned is None:
            return Allocation.empty(instance.n)
    g_star, i_star = pinned
    if not 0 <= g_star < instance.m or not 0 <= i_star < instance.n:
        raise InvalidInputError(f"pinned pair {pinned} out of range")
    start = Allocation.empty(instance.n).with_good(i_star, g_star)
    order = [i for i in instance.agents if i != i_star] + [i_star]
    return sequential_allocation(instance, round_robin_sequence(order, instance.m - 1), start=start)


@dataclass(frozen=True)
class BlockPartition:
    """Per-agent groups of n goods taken from that agent's optimal bundle.

    ``blocks[i]`` are the full blocks (most impactful first), ``residual[i]``
    the fewer-than-n leftovers, and ``dummies[i]`` the number of zero-valued
    placeholder slots needed to give agent i at least n goods. Placeholders
    only matter for the top-n impact sums and are never materialised.
    """

    n: int
    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    residual: tuple[tuple[int, ...], ...]
    dummies: tuple[int, ...]

    def k(self, i: int) -> int:
        return len(self.blocks[i])

    def ranked(self, i: int) -> tuple[int, ...]:
        return tuple(g for b in self.blocks[i] for g in b) + self.residual[i]

    def top(self, i: int) -> tuple[int, ...]:
        """The (at most n) real goods among agent i's n most impactful slots."""
        return self.ranked(i)[: self.n]


def build_opt_blocks(instance: Instance, opt_allocation: Allocation) -> BlockPartition:
    validate(instance, opt_allocation, complete=True)
    n = instance.n
    blocks, residual, dummies = [], [], []
    for i in instance.agents:
        row = instance.s[i]
        ranked = sorted(opt_allocation[i], key=lambda g: (-row[g], g))
        k_i = len(ranked) // n
        blocks.append(tuple(tuple(ranked[t * n:(t + 1) * n]) for t in range(k_i)))
        residual.append(tuple(ranked[k_i * n:]))
        dummies.append(max(0, n - len(ranked)))
    return BlockPartition(n, tuple(blocks), tuple(residual), tuple(dummies))


def opt_split(instance: Instance, opt_allocation: Allocation) -> tuple[Fraction, Fraction]:
    """Impact of the n best goods of every optimal bundle, and of everything else."""
    parts = build_opt_blocks(instance, opt_allocation)
    top = sum((instance.s[i][g] for i in instance.agents for g in parts.top(i)), Fraction(0))
    return top, utilitarian_welfare(instance, opt_allocation) - top


def case2_algorithm(
    instance: Instance, opt_allocation: Allocation,
    on_round: Optional[Callable[[Allocation], None]] = None,
) -> Allocation:
    """Hand out each full block of every optimal bundle one good per agent, in
    topological envy order, then place the leftovers by envy-cycle elimination.

    ``on_round`` is called with the partial allocation after every block round.
    """
    parts = build_opt_blocks(instance, opt_allocation)
    allocation = Allocation.empty(instance.n)
    for i in instance.agents:
        for block in parts.blocks[i]:
            sigma = envygraph.topological_order(envygraph.build(instance, allocation))
            assert sigma is not None, "envy graph must be acyclic at round start"
            pool = sorted(block)
            for agent in sigma:
                g = _best(pool, lambda x: instance.v[agent][x])
                pool.remove(g)
                allocation = allocation.with_good(agent, g)
            allocation = envygraph.acyclify(instance, allocation)
            if on_round is not None:
                on_round(allocation)
    leftovers = sorted(g for r in parts.residual for g in r)
    return envy_cycle_elimination_alloc(instance, leftovers, start=allocation)


def ef1_n2_approx(instance: Instance, opt_allocation: Optional[Allocation] = None) -> Allocation:
    """EF1 allocation within a factor 2n^2 of optimal welfare."""
    opt = greedy_opt(instance) if opt_allocation is None else opt_allocation
    top, rest = opt_split(instance, opt)
    if top >= rest:
        pair = _max_impact_pair(instance)
        if pair is None:
            return Allocation.empty(instance.n)
        g_star = pair[0]
        return simple_ef1_approx(instance, pinned=(g_star, opt.owner(g_star)))
    return case2_algorithm(instance, opt)


def ef2_n_approx(instance: Instance, opt_allocation: Optional[Allocation] = None) -> Allocation:
    """EF2 allocation within a factor n of optimal welfare.

    Each agent keeps her most impactful optimal good; the rest of the optimum
    goes through :func:`case2_algorithm` on the reduced instance.
    """
    opt = greedy_opt(instance) if opt_allocation is None else opt_allocation
    validate(instance, opt, complete=True)
    reserved: dict[int, int] = {}
    for i in instance.agents:
        if opt[i]:
            reserved[i] = _best(sorted(opt[i]), lambda g: instance.s[i][g])
    kept = [g for g in instance.goods if g not in reserved.values()]
    sub = instance.restrict(kept)
    index = {g: t for t, g in enumerate(kept)}
    sub_opt = Allocation(tuple(frozenset(index[g] for g in b if g in index) for b in opt))
    partial = case2_algorithm(sub, sub_opt)
    bundles = [set(kept[t] for t in b) for b in partial]
    for i, g in reserved.items():
        bundles[i].add(g)
    return Allocation(tuple(frozenset(b) for b in bundles))


# --- epistemic EF1 ------------------------------------------------------------


def blocks_by_valuation(instance: Instance, agent: int) -> list[tuple[int, ...]]:
    """Agent's ranking of the (dummy-padded) goods cut into consecutive groups of n."""
    padded = pad_with_dummies(instance)
    ranked = valuation_ranking(padded, agent)
    n = instance.n
    return [tuple(ranked[t:t + n]) for t in range(0, padded.m, n)]


def epistemic_matching_approx(instance: Instance) -> Allocation:
    """Best-impact perfect matching between goods and per-agent block copies.

    Copy h of agent i may only take a good from i's h-th value block, so every
    agent ends up with one good from each of her blocks.
    """
    n, m = instance.n, instance.m
    padded = pad_with_dummies(instance)
    q = padded.m // n
    edges = {}
    for i in instance.agents:
        for h, block in enumerate(blocks_by_valuation(instance, i)):
            for g in block:
                edges[(i * q + h, g)] = padded.s[i][g]
    result = max_weight_perfect_matching(BipartiteGraph(n * q, padded.m, edges))
    assert result is not None, "an n-regular bipartite graph has a perfect matching"
    matching, _ = result
    owners = [0] * padded.m
    for left, g in matching.items():
        owners[g] = left // q
    return strip_dummies(Allocation.from_owners(owners, n), m)


# --- socially aware agents ----------------------------------------------------


def sef1_opt(instance: Instance) -> Allocation:
    """Welfare-optimal sEF1 allocation.

    Goods go in index order to a highest-impact agent; ties go to whoever comes
    first in a topological order of the (cycle-free) socially aware envy graph.
    """
    allocation = Allocation.empty(instance.n)
    for g in instance.goods:
        allocation = envygraph.acyclify(instance, allocation, EnvyKind.SOCIAL)
        sigma = envygraph.topological_order(envygraph.build(instance, allocation, EnvyKind.SOCIAL))
        top = max(instance.s[i][g] for i in instance.agents)
        winner = next(i for i in sigma if instance.s[i][g] == top)
        allocation = allocation.with_good(winner, g)
    return allocation


ALGORITHMS: dict[str, Callable[[Instance], Allocation]] = {
    "greedy-opt": greedy_opt,
    "ecel": envy_cycle_elimination_alloc,
    "seq": lambda inst: sequential_allocation(inst, round_robin_sequence(list(inst.agents), inst.m)),
    "ordered-ef1": lambda inst: ordered_ef1_transform(inst, greedy_opt(inst)),
    "efx-identical": efx_identical,
    "efx-identical-approx": efx_identical_n_approx,
    "simple-ef1": simple_ef1_approx,
    "ef1-n2": ef1_n2_approx,
    "ef2-n": ef2_n_approx,
    "epistemic-matching": epistemic_matching_approx,
    "sef1-opt": sef1_opt,
}


def run(name: str, instance: Instance) -> Allocation:
    try:
        alg = ALGORITHMS[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}"
        ) from None
    return alg(instance)
