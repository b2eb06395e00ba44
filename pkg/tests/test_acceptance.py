"""Acceptance suite: one pass/fail line per criterion, at the stated tolerances.

Every comparison is exact (Fraction arithmetic); runtimes are wall-clock.
"""
import random
import time
from fractions import Fraction

import pytest

import bruteforce as bf
from socialfair import algorithms as alg
from socialfair import fairness as F
from socialfair import oracle
from socialfair.matching import BipartiteGraph, max_weight_assignment, max_weight_perfect_matching
from socialfair.model import Allocation, agent_impact, optimal_welfare, utilitarian_welfare

from strategies import regular_graph


def _complete_random_allocation(rng, n, m):
    return Allocation.from_owners([rng.randrange(n) for _ in range(m)], n)


def test_criterion_1_lower_bounds(record_criterion):
    cases = [(2, 1, 2), (3, 1, 3), (3, 2, 2), (4, 3, 2)]
    start = time.perf_counter()
    got = {}
    for n, k, expected in cases:
        inst = oracle.gen_lowerbound_efk(n, k)
        h = n - k
        r = oracle.price_of_fairness(inst, oracle.predicate(f"efk:{k}"))
        got[(n, k)] = (r.ratio, Fraction(h * n + k - 1, h + k - 1), expected)
    elapsed = time.perf_counter() - start
    ok = all(ratio == formula == want for ratio, formula, want in got.values()) and elapsed < 5
    detail = ", ".join(f"({n},{k})={v[0]}" for (n, k), v in got.items()) + f"; {elapsed:.2f}s < 5s"
    record_criterion("1 lower-bound PoF for EFk", ok, detail)
    assert ok, got


def test_criterion_2_corollaries(record_criterion):
    inst = oracle.gen_lowerbound_efk(3, 1)
    start = time.perf_counter()
    ratios = {name: oracle.price_of_fairness(inst, oracle.predicate(name)).ratio
              for name in ("efx", "prop1", "epistemic-ef1")}
    elapsed = time.perf_counter() - start
    ok = all(r == 3 for r in ratios.values()) and elapsed < 30
    detail = ", ".join(f"{k}={v}" for k, v in ratios.items()) + f" (expected 3 each); {elapsed:.2f}s < 30s"
    record_criterion("2 lower-bound PoF for EFX / PROP1 / epistemic EF1", ok, detail)
    assert ok, ratios


def _sweep_instances(gen, count=200):
    for seed in range(count):
        n = 2 + seed % 2
        m = (seed // 2) % 9
        yield gen(n, m, seed)


def _contract(name):
    if name == "ef1-n2":
        def check(inst):
            a = alg.ef1_n2_approx(inst)
            return F.is_ef1(inst, a).holds and 2 * inst.n ** 2 * utilitarian_welfare(inst, a) >= optimal_welfare(inst)
        return oracle.gen_random, check
    if name == "ef2-n":
        def check(inst):
            a = alg.ef2_n_approx(inst)
            return F.is_efk(inst, a, 2).holds and inst.n * utilitarian_welfare(inst, a) >= optimal_welfare(inst)
        return oracle.gen_random, check
    if name == "epistemic-matching":
        def check(inst):
            a = alg.epistemic_matching_approx(inst)
            return (F.check_epistemic_sufficient(inst, a) and F.is_prop1(inst, a).holds
                    and inst.n * utilitarian_welfare(inst, a) >= optimal_welfare(inst))
        return oracle.gen_random, check
    if name == "sef1-opt":
        def check(inst):
            a = alg.sef1_opt(inst)
            return F.is_sef1(inst, a).holds and utilitarian_welfare(inst, a) == optimal_welfare(inst)
        return oracle.gen_random, check
    if name == "ordered-ef1":
        def check(inst):
            base = alg.greedy_opt(inst)
            a = alg.ordered_ef1_transform(inst, base)
            return F.is_ef1(inst, a).holds and all(
                inst.n * agent_impact(inst, i, a[i]) >= agent_impact(inst, i, base[i]) for i in inst.agents
            )
        return oracle.gen_ordered, check
    if name == "efx-identical-approx":
        def check(inst):
            a = alg.efx_identical_n_approx(inst)
            return F.is_efx(inst, a).holds and inst.n * utilitarian_welfare(inst, a) >= optimal_welfare(inst)
        return oracle.gen_identical, check
    raise KeyError(name)


@pytest.mark.parametrize("name", ["ef1-n2", "ef2-n", "epistemic-matching", "sef1-opt", "ordered-ef1",
                                  "efx-identical-approx"])
def test_criterion_3_algorithm_contracts(record_criterion, name):
    gen, check = _contract(name)
    failures = [(inst.n, inst.m, seed) for seed, inst in enumerate(_sweep_instances(gen)) if not check(inst)]
    ok = not failures
    record_criterion(f"3 contract {name}", ok, f"{200 - len(failures)}/200 instances pass")
    assert ok, failures[:5]


def test_criterion_4_checker_equivalence(record_criterion):
    mismatches = []
    pairs = 0
    corpus = []
    for seed in range(100):
        rng = random.Random(seed)
        hi = 9 if seed % 2 == 0 else 2  # small ranges produce many ties
        for n in (1, 2, 3):
            corpus.append(oracle.gen_random(n, rng.randint(0, 5), seed, (0, hi), (0, hi)))
    for inst in corpus:
        n, m, v, s = inst.n, inst.m, inst.v, inst.s
        for bundles in bf.all_allocations(n, m):
            pairs += 1
            a = Allocation(tuple(frozenset(b) for b in bundles))
            expected = {
                "ef": bf.efk(v, bundles, 0), "ef1": bf.efk(v, bundles, 1), "ef2": bf.efk(v, bundles, 2),
                "efx": bf.efx(v, bundles), "prop": bf.prop(v, bundles, m), "prop1": bf.prop1(v, bundles, m),
                "epistemic-ef1": bf.epistemic_ef1(v, bundles, m),
                "sef": bf.sef(v, s, bundles), "sef1": bf.sef1(v, s, bundles),
            }
            got = F.full_report(inst, a).flags()
            for name, want in expected.items():
                if got[name] != want:
                    mismatches.append((inst, name, bundles))
            if got["epistemic-sufficient"] and not got["epistemic-ef1"]:
                mismatches.append((inst, "sufficient-unsound", bundles))
    ok = not mismatches
    record_criterion("4 checkers equal definition-level enumeration", ok,
                     f"{pairs} allocations of {len(corpus)} instances from 100 seeds, {len(mismatches)} mismatches")
    assert ok, mismatches[:5]


def _epistemic_style_graph(rng, n, q):
    """Copies (i, h) joined to the h-th group of n goods in a random ranking for agent i."""
    m = n * q
    edges = {}
    for i in range(n):
        ranking = list(range(m))
        rng.shuffle(ranking)
        for h in range(q):
            for g in ranking[h * n:(h + 1) * n]:
                edges[(i * q + h, g)] = rng.randint(0, 9)
    return BipartiteGraph(n * q, m, edges)


def test_criterion_5_matching(record_criterion):
    rng = random.Random(2024)
    wrong = []
    for t in range(500):
        size = 1 + t % 6
        w = [[Fraction(rng.randint(0, 20), rng.randint(1, 4)) for _ in range(size)] for _ in range(size)]
        perm, total = max_weight_assignment(w)
        if total != bf.best_assignment(w) or sum(w[i][perm[i]] for i in range(size)) != total:
            wrong.append(w)
    absent = 0
    graphs = 0
    for n in range(1, 7):
        for _ in range(20):
            for g in (regular_graph(n, n, rng), _epistemic_style_graph(rng, n, rng.randint(1, 3))):
                assert set(g.left_degrees()) == {n} and set(g.right_degrees()) == {n}
                graphs += 1
                if max_weight_perfect_matching(g) is None:
                    absent += 1
    ok = not wrong and absent == 0
    record_criterion("5 matching exactness", ok,
                     f"{500 - len(wrong)}/500 assignments exact; {absent}/{graphs} regular graphs without a matching")
    assert ok


def test_criterion_6_implications(record_criterion):
    rng = random.Random(6)
    violations = []
    samples = 10**4
    for t in range(samples):
        n, m = rng.randint(1, 3), rng.randint(0, 6)
        hi = rng.choice((2, 9))
        inst = oracle.gen_random(n, m, rng.randrange(10**9), (0, hi), (0, hi))
        a = _complete_random_allocation(rng, n, m)
        f = F.full_report(inst, a).flags()
        for strong, weak in (("ef", "ef1"), ("ef1", "ef2"), ("efx", "ef1"), ("ef", "prop"), ("ef1", "prop1"),
                             ("epistemic-ef1", "prop1"), ("ef1", "sef1")):
            if f[strong] and not f[weak]:
                violations.append((t, strong, weak))
    ok = not violations
    record_criterion("6 implication chain", ok, f"{len(violations)} violations over {samples} pairs")
    assert ok, violations[:5]
