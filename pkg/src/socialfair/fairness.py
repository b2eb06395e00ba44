"""Fairness checkers.

Each checker returns a :class:`Check`, truthy when the notion holds. A failed
check carries the lexicographically first violation as its witness.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algorithms import blocks_by_valuation
from .matching import BipartiteGraph, has_perfect_matching
from .model import (
    Allocation,
    Instance,
    InvalidInputError,
    ResourceLimitError,
    proportional_share,
    validate,
)

EPISTEMIC_CAP = 2_000_000


@dataclass(frozen=True)
class Violation:
    agent: int
    other: Optional[int]
    reason: str

    def to_dict(self) -> dict:
        return {"agent": self.agent, "other": self.other, "reason": self.reason}


@dataclass(frozen=True)
class Check:
    holds: bool
    witness: Optional[Violation] = None
    certificates: Optional[tuple] = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.holds


OK = Check(True)


def _v(instance: Instance, i: int, bundle) -> Fraction:
    row = instance.v[i]
    return sum((row[g] for g in bundle), Fraction(0))


def _s(instance: Instance, i: int, bundle) -> Fraction:
    row = instance.s[i]
    return sum((row[g] for g in bundle), Fraction(0))


def _pairs(n: int):
    return ((i, j) for i in range(n) for j in range(n) if i != j)


def is_efk(instance: Instance, allocation: Allocation, k: int) -> Check:
    """Envy-free up to k goods: drop i's k favourite goods of A_j, then compare."""
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    validate(instance, allocation)
    own = [_v(instance, i, allocation[i]) for i in instance.agents]
    for i, j in _pairs(instance.n):
        bj = allocation[j]
        if len(bj) <= k:
            continue
        vals = sorted((instance.v[i][g] for g in bj), reverse=True)
        rest = sum(vals[k:], Fraction(0))
        if own[i] < rest:
            return Check(False, Violation(i, j, f"v_{i}(A_{i})={own[i]} < {rest} after removing {k} good(s) from A_{j}"))
    return OK


def is_ef(instance: Instance, allocation: Allocation) -> Check:
    return is_efk(instance, allocation, 0)


def is_ef1(instance: Instance, allocation: Allocation) -> Check:
    return is_efk(instance, allocation, 1)


def is_efx(instance: Instance, allocation: Allocation) -> Check:
    """Envy-free after removing any single good, including zero-valued ones."""
    validate(instance, allocation)
    own = [_v(instance, i, allocation[i]) for i in instance.agents]
    for i, j in _pairs(instance.n):
        bj = allocation[j]
        if not bj:
            continue
        row = instance.v[i]
        rest = _v(instance, i, bj) - min(row[g] for g in bj)
        if own[i] < rest:
            return Check(False, Violation(i, j, f"v_{i}(A_{i})={own[i]} < {rest} after removing agent {i}'s least valued good of A_{j}"))
    return OK


def is_prop(instance: Instance, allocation: Allocation) -> Check:
    validate(instance, allocation, complete=True)
    for i in instance.agents:
        share = proportional_share(instance, i)
        have = _v(instance, i, allocation[i])
        if have < share:
            return Check(False, Violation(i, None, f"v_{i}(A_{i})={have} < PS_{i}={share}"))
    return OK


def is_prop1(instance: Instance, allocation: Allocation) -> Check:
    """PROP up to one outside good; an agent holding every good is trivially fine."""
    validate(instance, allocation, complete=True)
    for i in instance.agents:
        share = proportional_share(instance, i)
        have = _v(instance, i, allocation[i])
        if have >= share:
            continue
        outside = [instance.v[i][g] for g in instance.goods if g not in allocation[i]]
        best = max(outside, default=Fraction(0))
        if have + best < share:
            return Check(False, Violation(i, None, f"v_{i}(A_{i})+{best} < PS_{i}={share}"))
    return OK


def is_sef(instance: Instance, allocation: Allocation) -> Check:
    validate(instance, allocation)
    own = [_v(instance, i, allocation[i]) for i in instance.agents]
    for i, j in _pairs(instance.n):
        bj = allocation[j]
        if own[i] < _v(instance, i, bj) and _s(instance, i, bj) >= _s(instance, j, bj):
            return Check(False, Violation(i, j, f"agent {i} sa-envies agent {j}"))
    return OK


def is_sef1(instance: Instance, allocation: Allocation) -> Check:
    validate(instance, allocation)
    own = [_v(instance, i, allocation[i]) for i in instance.agents]
    for i, j in _pairs(instance.n):
        bj = allocation[j]
        if not bj:
            continue
        row = instance.v[i]
        rest = _v(instance, i, bj) - max(row[g] for g in bj)
        if own[i] < rest and _s(instance, i, bj) >= _s(instance, j, bj):
            return Check(False, Violation(i, j, f"agent {i} sa-envies agent {j} beyond one good"))
    return OK


# --- epistemic EF1 -------------------------------------------------------------


def _epistemic_certificate(instance: Instance, allocation: Allocation, i: int) -> Optional[Allocation]:
    """Split the goods outside A_i among the other agents so i is EF1 toward all.

    From i's view bundle B is acceptable iff v_i(B) - max_{g in B} v_i(g) <= v_i(A_i).
    Goods are placed in decreasing v_i order, so the first good of each bundle
    is its maximum and costs nothing; later goods consume the budget v_i(A_i).
    Other agents are interchangeable, hence a new bundle is only ever opened
    at the next unused slot.
    """
    n = instance.n
    others = [a for a in instance.agents if a != i]
    budget = _v(instance, i, allocation[i])
    row = instance.v[i]
    rest = sorted((g for g in instance.goods if g not in allocation[i]), key=lambda g: (-row[g], g))
    if not rest:
        return allocation
    if not others:
        return None
    slots = len(others)
    loads: list[Optional[Fraction]] = [None] * slots  # None = not opened yet
    placement = [0] * len(rest)

    def place(t: int) -> bool:
        if t == len(rest):
            return True
        val = row[rest[t]]
        tried: set = set()
        for b in range(slots):
            load = loads[b]
            if load is None:
                loads[b] = Fraction(0)
                placement[t] = b
                if place(t + 1):
                    return True
                loads[b] = None
                return False
            if load in tried or load + val > budget:
                continue
            tried.add(load)
            loads[b] = load + val
            placement[t] = b
            if place(t + 1):
                return True
            loads[b] = load
        return False

    if not place(0):
        return None
    bundles = [set() for _ in range(n)]
    bundles[i] = set(allocation[i])
    for t, b in enumerate(placement):
        bundles[others[b]].add(rest[t])
    return Allocation(tuple(frozenset(b) for b in bundles))


def is_epistemic_ef1(instance: Instance, allocation: Allocation, cap: int = EPISTEMIC_CAP) -> Check:
    """Exact epistemic EF1 by searching, per agent, for a certificate allocation.

    Raises :class:`ResourceLimitError` when an agent's naive search space
    (n-1)^(goods outside her bundle) exceeds ``cap``.
    """
    validate(instance, allocation, complete=True)
    certificates = []
    for i in instance.agents:
        outside = instance.m - len(allocation[i])
        space = (instance.n - 1) ** outside
        if space > cap:
            raise ResourceLimitError(
                f"epistemic search for agent {i} spans (n-1)^{outside} = {space} assignments, cap is {cap}",
                space, cap,
            )
        cert = _epistemic_certificate(instance, allocation, i)
        if cert is None:
            return Check(False, Violation(i, None, f"no EF1 certificate exists for agent {i}"))
        certificates.append(cert)
    return Check(True, None, tuple(certificates))


def check_epistemic_sufficient(instance: Instance, allocation: Allocation) -> bool:
    """Every agent holds at least q = floor(m/n) goods and one good from each of
    her first q value blocks (a system of distinct representatives)."""
    validate(instance, allocation, complete=True)
    n, m = instance.n, instance.m
    q = m // n
    for i in instance.agents:
        bundle = sorted(allocation[i])
        if len(bundle) < q:
            return False
        blocks = blocks_by_valuation(instance, i)[:q]
        pos = {g: r for r, g in enumerate(bundle)}
        edges = [(h, pos[g]) for h, block in enumerate(blocks) for g in block if g in pos]
        if not has_perfect_matching(BipartiteGraph.from_edges(q, len(bundle), edges)):
            return False
    return True


# --- report ------------------------------------------------------------------

NOTIONS = ("ef", "ef1", "ef2", "efx", "prop", "prop1", "epistemic-ef1", "epistemic-sufficient", "sef", "sef1")
DIAGNOSTIC_NOTIONS = frozenset({"epistemic-sufficient"})


@dataclass(frozen=True)
class NotionResult:
    holds: Optional[bool]
    witness: Optional[Violation] = None
    skipped: Optional[str] = None

    def to_dict(self) -> dict:
        out: dict = {"holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.skipped is not None:
            out["skipped"] = self.skipped
        return out


@dataclass(frozen=True)
class FairnessReport:
    results: dict

    def __getitem__(self, notion: str) -> NotionResult:
        return self.results[notion]

    def flags(self) -> dict:
        return {k: r.holds for k, r in self.results.items()}

    def to_dict(self) -> dict:
        return {k: r.to_dict() for k, r in self.results.items()}


def full_report(instance: Instance, allocation: Allocation, epistemic_cap: int = EPISTEMIC_CAP) -> FairnessReport:
    validate(instance, allocation, complete=True)

    def wrap(c: Check) -> NotionResult:
        return NotionResult(c.holds, c.witness)

    res = {
        "ef": wrap(is_efk(instance, allocation, 0)),
        "ef1": wrap(is_efk(instance, allocation, 1)),
        "ef2": wrap(is_efk(instance, allocation, 2)),
        "efx": wrap(is_efx(instance, allocation)),
        "prop": wrap(is_prop(instance, allocation)),
        "prop1": wrap(is_prop1(instance, allocation)),
    }
    sufficient = check_epistemic_sufficient(instance, allocation)
    if sufficient:
        res["epistemic-ef1"] = NotionResult(True)
    else:
        try:
            res["epistemic-ef1"] = wrap(is_epistemic_ef1(instance, allocation, epistemic_cap))
        except ResourceLimitError as exc:
            res["epistemic-ef1"] = NotionResult(None, skipped=str(exc))
    res["epistemic-sufficient"] = NotionResult(sufficient)
    res["sef"] = wrap(is_sef(instance, allocation))
    res["sef1"] = wrap(is_sef1(instance, allocation))
    return FairnessReport({k: res[k] for k in NOTIONS})
