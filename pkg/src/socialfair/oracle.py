"""Brute-force ground truth: enumerate allocations, fairness-constrained optima,
price of fairness, lower-bound instance families and guarantee checks."""
from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from . import algorithms, fairness
from .model import (
    Allocation,
    Instance,
    InvalidInputError,
    NotApplicableError,
    PoFResult,
    ResourceLimitError,
    is_identical,
    is_ordered,
    optimal_welfare,
    utilitarian_welfare,
)

DEFAULT_ENUM_CAP = 10**7


def enum_cap(cap: Optional[int] = None) -> int:
    """Explicit cap, else ``FAIRDIV_ENUM_CAP`` from the environment, else 10^7."""
    if cap is not None:
        return cap
    env = os.environ.get("FAIRDIV_ENUM_CAP")
    return int(env) if env else DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class Predicate:
    name: str
    test: Callable[[Instance, Allocation], bool] = field(compare=False)

    def __call__(self, instance: Instance, allocation: Allocation) -> bool:
        return bool(self.test(instance, allocation))


def _always(instance, allocation) -> bool:
    return True


_FIXED = {
    "all": _always,
    "ef": fairness.is_ef,
    "ef1": fairness.is_ef1,
    "ef2": lambda inst, a: fairness.is_efk(inst, a, 2),
    "efx": fairness.is_efx,
    "prop": fairness.is_prop,
    "prop1": fairness.is_prop1,
    "epistemic-ef1": fairness.is_epistemic_ef1,
    "sef": fairness.is_sef,
    "sef1": fairness.is_sef1,
}
PREDICATE_NAMES = tuple(_FIXED) + ("efk:<k>",)


def predicate(name: str) -> Predicate:
    """Look up a predicate by name: all, ef, ef1, ef2, efk:<k>, efx, prop, prop1,
    epistemic-ef1, sef, sef1."""
    key = name.strip().lower()
    if key in _FIXED:
        return Predicate(key, _FIXED[key])
    if key.startswith("efk:"):
        try:
            k = int(key[4:])
        except ValueError:
            k = -1
        if k < 0:
            raise InvalidInputError(f"bad k in predicate {name!r}")
        return Predicate(key, lambda inst, a: fairness.is_efk(inst, a, k))
    raise InvalidInputError(f"unknown predicate {name!r}; choose from {', '.join(PREDICATE_NAMES)}")


ALL = predicate("all")


def enumerate_allocations(instance: Instance, cap: Optional[int] = None) -> Iterator[Allocation]:
    """Every complete allocation once, ordered lexicographically by the owner of good 0, 1, ..."""
    cap = enum_cap(cap)
    count = instance.n**instance.m
    if count > cap:
        raise ResourceLimitError(
            f"enumeration needs n^m = {instance.n}^{instance.m} = {count} allocations, cap is {cap}",
            count, cap,
        )
    for owners in itertools.product(range(instance.n), repeat=instance.m):
        yield Allocation.from_owners(owners, instance.n)


def max_sw_subject_to(
    instance: Instance, pred: Predicate = ALL, cap: Optional[int] = None
) -> tuple[Optional[Fraction], Optional[Allocation]]:
    """Best welfare over allocations satisfying ``pred`` and the first allocation
    (in enumeration order) achieving it; ``(None, None)`` if none qualifies."""
    best_val: Optional[Fraction] = None
    best: Optional[Allocation] = None
    for alloc in enumerate_allocations(instance, cap):
        sw = utilitarian_welfare(instance, alloc)
        if best_val is not None and sw <= best_val:
            continue
        if pred(instance, alloc):
            best_val, best = sw, alloc
    return best_val, best


def price_of_fairness(instance: Instance, pred: Predicate, cap: Optional[int] = None) -> PoFResult:
    opt_alloc = algorithms.greedy_opt(instance)
    value, witness = max_sw_subject_to(instance, pred, cap)
    return PoFResult(
        opt_value=utilitarian_welfare(instance, opt_alloc),
        constrained_value=Fraction(0) if value is None else value,
        opt_allocation=opt_alloc,
        constrained_allocation=witness,
    )


def gen_lowerbound_efk(n: int, k: int) -> Instance:
    """Unit values for everyone, unit impact for agent 0 only, and
    (n-k)*n + k - 1 goods: EFk then caps agent 0 at n-1 goods."""
    if not 1 <= k <= n - 1:
        raise InvalidInputError(f"need 1 <= k <= n-1, got n={n}, k={k}")
    h = n - k
    m = h * n + k - 1
    v = [[1] * m for _ in range(n)]
    s = [[1] * m] + [[0] * m for _ in range(n - 1)]
    return Instance(v=v, s=s)


def lowerbound_ratio(n: int, k: int) -> Fraction:
    h = n - k
    return Fraction(h * n + k - 1, h + k - 1)


def gen_random(
    n: int, m: int, seed: int, value_range: tuple[int, int] = (0, 9),
    impact_range: tuple[int, int] = (0, 9),
) -> Instance:
    """Integer matrices drawn uniformly from the inclusive ranges; same seed, same instance."""
    rng = random.Random(seed)
    v = [[rng.randint(*value_range) for _ in range(m)] for _ in range(n)]
    s = [[rng.randint(*impact_range) for _ in range(m)] for _ in range(n)]
    return Instance(v=v, s=s)


def gen_ordered(n: int, m: int, seed: int, value_range=(0, 9), impact_range=(0, 9)) -> Instance:
    """Random instance whose valuations all follow one hidden good ranking."""
    rng = random.Random(seed)
    perm = list(range(m))
    rng.shuffle(perm)
    v = []
    for _ in range(n):
        vals = sorted((rng.randint(*value_range) for _ in range(m)), reverse=True)
        row = [0] * m
        for rank, g in enumerate(perm):
            row[g] = vals[rank]
        v.append(row)
    s = [[rng.randint(*impact_range) for _ in range(m)] for _ in range(n)]
    return Instance(v=v, s=s)


def gen_identical(n: int, m: int, seed: int, value_range=(0, 9), impact_range=(0, 9)) -> Instance:
    rng = random.Random(seed)
    row = [rng.randint(*value_range) for _ in range(m)]
    s = [[rng.randint(*impact_range) for _ in range(m)] for _ in range(n)]
    return Instance(v=[list(row) for _ in range(n)], s=s)


# --- algorithm guarantees -----------------------------------------------------

# name -> (fairness notions, approximation factor as a function of (n, m), instance class)
_CONTRACTS = {
    "greedy-opt": ((), lambda n, m: 1, None),
    "ecel": (("ef1",), None, None),
    "seq": (("ef1",), None, None),
    "ordered-ef1": (("ef1",), lambda n, m: n, "ordered"),
    "efx-identical": (("efx",), None, "identical"),
    "efx-identical-approx": (("efx",), lambda n, m: n, "identical"),
    "simple-ef1": (("ef1",), lambda n, m: max(m, 1), None),
    "ef1-n2": (("ef1",), lambda n, m: 2 * n * n, None),
    "ef2-n": (("ef2",), lambda n, m: n, None),
    "epistemic-matching": (("epistemic-sufficient", "prop1"), lambda n, m: n, None),
    "sef1-opt": (("sef1",), lambda n, m: 1, None),
}

_CHECKS = {
    "ef1": fairness.is_ef1,
    "ef2": lambda inst, a: fairness.is_efk(inst, a, 2),
    "efx": fairness.is_efx,
    "prop1": fairness.is_prop1,
    "sef1": fairness.is_sef1,
    "epistemic-sufficient": fairness.check_epistemic_sufficient,
}


def applicable(name: str, instance: Instance) -> bool:
    cls = _CONTRACTS[name][2]
    if cls == "ordered":
        return is_ordered(instance)
    if cls == "identical":
        return is_identical(instance)
    return True


@dataclass(frozen=True)
class GuaranteeReport:
    algorithm: str
    allocation: Allocation
    welfare: Fraction
    opt: Fraction
    bound: Optional[int]
    fairness: dict

    @property
    def ratio(self) -> Optional[Fraction]:
        """opt / welfare (1 when both vanish, None when welfare is 0 < opt)."""
        if self.welfare == 0:
            return Fraction(1) if self.opt == 0 else None
        return self.opt / self.welfare

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.bound * self.welfare >= self.opt

    @property
    def passed(self) -> bool:
        return self.within_bound and all(self.fairness.values())


def verify_guarantee(instance: Instance, name: str) -> GuaranteeReport:
    """Run an algorithm and check its fairness notions and approximation factor
    against the welfare optimum."""
    if name not in _CONTRACTS:
        raise InvalidInputError(
            f"unknown algorithm {name!r}; choose from {', '.join(_CONTRACTS)}"
        )
    if not applicable(name, instance):
        raise NotApplicableError(f"{name} needs {_CONTRACTS[name][2]} valuations")
    notions, factor, _ = _CONTRACTS[name]
    alloc = algorithms.run(name, instance)
    return GuaranteeReport(
        algorithm=name,
        allocation=alloc,
        welfare=utilitarian_welfare(instance, alloc),
        opt=optimal_welfare(instance),
        bound=None if factor is None else factor(instance.n, instance.m),
        fairness={k: bool(_CHECKS[k](instance, alloc)) for k in notions},
    )
