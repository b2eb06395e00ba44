"""Instances, allocations and the welfare/share arithmetic shared by every other module.

All values are exact :class:`fractions.Fraction` numbers. Agents and goods are
0-based indices.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, str, Fraction]


class InvalidInputError(ValueError):
    """Raised when an instance or allocation is malformed or does not fit its instance."""


class NotApplicableError(InvalidInputError):
    """Raised when an algorithm is run outside its instance class (e.g. not ordered)."""


class ResourceLimitError(RuntimeError):
    """Raised when an exhaustive search would exceed its configured cap."""

    def __init__(self, message: str, required: int, cap: int):
        super().__init__(message)
        self.required = required
        self.cap = cap


def to_fraction(x) -> Fraction:
    """Parse an int, Fraction, or decimal / ``p/q`` string into an exact Fraction.

    Floats are accepted through their shortest repr so that ``0.1`` means 1/10.

    >>> to_fraction("0.25"), to_fraction(3), to_fraction("1/10")
    (Fraction(1, 4), Fraction(3, 1), Fraction(1, 10))
    """
    if isinstance(x, bool):
        raise InvalidInputError(f"boolean is not a number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvalidInputError(f"non-finite value: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse number {x!r}") from exc
    raise InvalidInputError(f"unsupported value type {type(x).__name__}: {x!r}")


def _matrix(rows, name: str) -> tuple[tuple[Fraction, ...], ...]:
    out = tuple(tuple(to_fraction(x) for x in row) for row in rows)
    for i, row in enumerate(out):
        for g, x in enumerate(row):
            if x < 0:
                raise InvalidInputError(f"{name}[{i}][{g}] = {x} is negative")
    return out


@dataclass(frozen=True)
class Instance:
    """A fair division instance with agent valuations ``v`` and social impacts ``s``.

    Both matrices are n x m. ``m`` only needs to be given explicitly when the
    instance has no goods and ``v`` is an empty list.
    """

    v: tuple[tuple[Fraction, ...], ...]
    s: tuple[tuple[Fraction, ...], ...]
    labels: Optional[tuple[str, ...]] = None
    n: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        v = _matrix(self.v, "v")
        s = _matrix(self.s, "s")
        n = len(v)
        if n < 1:
            raise InvalidInputError("an instance needs at least one agent")
        if len(s) != n:
            raise InvalidInputError(f"v has {n} rows but s has {len(s)}")
        m = len(v[0])
        for name, mat in (("v", v), ("s", s)):
            for i, row in enumerate(mat):
                if len(row) != m:
                    raise InvalidInputError(f"{name} row {i} has {len(row)} entries, expected {m}")
        labels = None if self.labels is None else tuple(str(x) for x in self.labels)
        if labels is not None and len(labels) != m:
            raise InvalidInputError(f"{len(labels)} labels for {m} goods")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @classmethod
    def empty(cls, n: int) -> "Instance":
        """An instance with ``n`` agents and no goods."""
        return cls(v=[[] for _ in range(n)], s=[[] for _ in range(n)])

    @property
    def agents(self) -> range:
        return range(self.n)

    @property
    def goods(self) -> range:
        return range(self.m)

    def restrict(self, goods: Sequence[int]) -> "Instance":
        """Sub-instance on the listed goods; new good ``t`` is old good ``goods[t]``."""
        for g in goods:
            _check_good(self, g)
        labels = None if self.labels is None else [self.labels[g] for g in goods]
        return Instance(
            v=[[row[g] for g in goods] for row in self.v],
            s=[[row[g] for g in goods] for row in self.s],
            labels=labels,
        )

    def with_zero_goods(self, count: int) -> "Instance":
        """Append ``count`` goods with zero value and zero impact for everybody."""
        if count == 0:
            return self
        zeros = (Fraction(0),) * count
        labels = None
        if self.labels is not None:
            labels = self.labels + tuple(f"dummy{t}" for t in range(count))
        return Instance(
            v=[row + zeros for row in self.v],
            s=[row + zeros for row in self.s],
            labels=labels,
        )


@dataclass(frozen=True)
class Allocation:
    """One bundle (a frozenset of good indices) per agent. May be partial."""

    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        bundles = tuple(frozenset(int(g) for g in b) for b in self.bundles)
        seen: set[int] = set()
        for i, b in enumerate(bundles):
            for g in b:
                if g < 0:
                    raise InvalidInputError(f"negative good index {g} in bundle {i}")
            overlap = seen & b
            if overlap:
                raise InvalidInputError(f"good {min(overlap)} appears in more than one bundle")
            seen |= b
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_owners(cls, owners: Sequence[int], n: int) -> "Allocation":
        """Build from ``owners[g]`` = agent receiving good g."""
        bundles: list[set[int]] = [set() for _ in range(n)]
        for g, i in enumerate(owners):
            bundles[i].add(g)
        return cls(tuple(frozenset(b) for b in bundles))

    def __len__(self) -> int:
        return len(self.bundles)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.bundles[i]

    def __iter__(self):
        return iter(self.bundles)

    @property
    def allocated(self) -> frozenset[int]:
        return frozenset().union(*self.bundles) if self.bundles else frozenset()

    def size(self) -> int:
        return sum(len(b) for b in self.bundles)

    def is_complete(self, m: int) -> bool:
        return self.size() == m and all(g < m for b in self.bundles for g in b)

    def owner(self, g: int) -> Optional[int]:
        for i, b in enumerate(self.bundles):
            if g in b:
                return i
        return None

    def with_good(self, agent: int, g: int) -> "Allocation":
        bundles = list(self.bundles)
        bundles[agent] = bundles[agent] | {g}
        return Allocation(tuple(bundles))

    def permuted(self, source: Sequence[int]) -> "Allocation":
        """Agent ``i`` receives the bundle previously held by ``source[i]``."""
        return Allocation(tuple(self.bundles[source[i]] for i in range(len(self.bundles))))

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


@dataclass(frozen=True)
class PoFResult:
    """Price of fairness of one instance under one fairness predicate.

    ``constrained_allocation`` is None when no allocation satisfies the
    predicate; the constrained value is then reported as 0.
    """

    opt_value: Fraction
    constrained_value: Fraction
    opt_allocation: Allocation
    constrained_allocation: Optional[Allocation]

    @property
    def infinite(self) -> bool:
        return self.constrained_value == 0 < self.opt_value

    @property
    def ratio(self) -> Optional[Fraction]:
        """opt / constrained, 1 when both are zero, None when infinite."""
        if self.infinite:
            return None
        if self.constrained_value == 0:
            return Fraction(1)
        return self.opt_value / self.constrained_value

    @property
    def feasible(self) -> bool:
        return self.constrained_allocation is not None


def _check_agent(instance: Instance, i: int) -> None:
    if not 0 <= i < instance.n:
        raise InvalidInputError(f"agent index {i} out of range for n={instance.n}")


def _check_good(instance: Instance, g: int) -> None:
    if not 0 <= g < instance.m:
        raise InvalidInputError(f"good index {g} out of range for m={instance.m}")


def validate(instance: Instance, allocation: Allocation, *, complete: bool = False) -> None:
    """Raise :class:`InvalidInputError` unless ``allocation`` fits ``instance``."""
    if len(allocation) != instance.n:
        raise InvalidInputError(
            f"allocation has {len(allocation)} bundles but the instance has {instance.n} agents"
        )
    for i, b in enumerate(allocation):
        for g in b:
            if g >= instance.m:
                raise InvalidInputError(f"bundle {i} holds good {g} but m={instance.m}")
    if complete and allocation.size() != instance.m:
        missing = sorted(set(instance.goods) - allocation.allocated)
        raise InvalidInputError(f"allocation is partial; unallocated goods {missing}")


def agent_value(instance: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    """v_agent(bundle), summed over singletons."""
    _check_agent(instance, agent)
    row = instance.v[agent]
    total = Fraction(0)
    for g in bundle:
        _check_good(instance, g)
        total += row[g]
    return total


def agent_impact(instance: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    """s_agent(bundle), summed over singletons."""
    _check_agent(instance, agent)
    row = instance.s[agent]
    total = Fraction(0)
    for g in bundle:
        _check_good(instance, g)
        total += row[g]
    return total


def utilitarian_welfare(instance: Instance, allocation: Allocation) -> Fraction:
    """Sum over agents of the social impact of their own bundle."""
    validate(instance, allocation)
    return sum(
        (sum((instance.s[i][g] for g in b), Fraction(0)) for i, b in enumerate(allocation)),
        Fraction(0),
    )


def optimal_welfare(instance: Instance) -> Fraction:
    """Unconstrained maximum welfare: every good at an agent with the largest impact."""
    return sum((max(instance.s[i][g] for i in instance.agents) for g in instance.goods), Fraction(0))


def proportional_share(instance: Instance, agent: int) -> Fraction:
    _check_agent(instance, agent)
    return sum(instance.v[agent], Fraction(0)) / instance.n


def common_good_order(instance: Instance) -> Optional[list[int]]:
    """A single good ranking that every agent weakly agrees with, or None.

    Goods are sorted by their full value column (agent 0 first) descending,
    then by index. If any common order exists this one is valid, because in an
    ordered instance every pair of goods is comparable for all agents at once.
    """
    order = sorted(instance.goods, key=lambda g: (tuple(-row[g] for row in instance.v), g))
    for row in instance.v:
        if any(row[a] < row[b] for a, b in zip(order, order[1:])):
            return None
    return order


def is_ordered(instance: Instance) -> bool:
    return common_good_order(instance) is not None


def is_identical(instance: Instance) -> bool:
    return all(row == instance.v[0] for row in instance.v)


def pad_with_dummies(instance: Instance) -> Instance:
    """Append zero goods so that n divides m. Original goods keep their indices."""
    n, m = instance.n, instance.m
    return instance.with_zero_goods(-m % n)


def strip_dummies(allocation: Allocation, original_m: int) -> Allocation:
    return Allocation(tuple(frozenset(g for g in b if g < original_m) for b in allocation))


def valuation_ranking(instance: Instance, agent: int) -> list[int]:
    """Goods sorted by the agent's value, best first, ties by index."""
    _check_agent(instance, agent)
    row = instance.v[agent]
    return sorted(instance.goods, key=lambda g: (-row[g], g))


# --- JSON documents ---------------------------------------------------------


def _number_out(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InvalidInputError("instance document must be a JSON object")
    try:
        v, s = doc["v"], doc["s"]
    except KeyError as exc:
        raise InvalidInputError(f"instance document is missing key {exc.args[0]!r}") from None
    if not isinstance(v, list) or not isinstance(s, list):
        raise InvalidInputError("'v' and 's' must be lists of rows")
    if any(not isinstance(row, list) for row in v + s):
        raise InvalidInputError("every row of 'v' and 's' must be a list")
    n = doc.get("n", len(v))
    m = doc.get("m")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f"'n' must be a positive integer, got {n!r}")
    if len(v) != n:
        raise InvalidInputError(f"'n' is {n} but 'v' has {len(v)} rows")
    if m is not None:
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            raise InvalidInputError(f"'m' must be a non-negative integer, got {m!r}")
        for name, mat in (("v", v), ("s", s)):
            for i, row in enumerate(mat):
                if len(row) != m:
                    raise InvalidInputError(f"'m' is {m} but {name} row {i} has {len(row)} entries")
    return Instance(v=v, s=s, labels=doc.get("labels"))


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        "n": instance.n,
        "m": instance.m,
        "v": [[_number_out(x) for x in row] for row in instance.v],
        "s": [[_number_out(x) for x in row] for row in instance.s],
    }
    if instance.labels is not None:
        doc["labels"] = list(instance.labels)
    return doc


def allocation_from_dict(doc: dict) -> Allocation:
    if not isinstance(doc, dict) or "bundles" not in doc:
        raise InvalidInputError("allocation document must be an object with a 'bundles' key")
    bundles = doc["bundles"]
    if not isinstance(bundles, list) or any(not isinstance(b, list) for b in bundles):
        raise InvalidInputError("'bundles' must be a list of lists of good indices")
    out = []
    for i, b in enumerate(bundles):
        if any(not isinstance(g, int) or isinstance(g, bool) for g in b):
            raise InvalidInputError(f"bundle {i} contains a non-integer good index")
        if len(set(b)) != len(b):
            raise InvalidInputError(f"bundle {i} lists a good twice")
        out.append(frozenset(b))
    return Allocation(tuple(out))


def allocation_to_dict(allocation: Allocation) -> dict:
    return {"bundles": allocation.as_lists()}


def load_instance(path: Union[str, Path]) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def load_allocation(path: Union[str, Path]) -> Allocation:
    return allocation_from_dict(json.loads(Path(path).read_text()))


def dump_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")


def dump_allocation(allocation: Allocation, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(allocation_to_dict(allocation)) + "\n")
