"""
How much welfare does envy-freeness cost?
=========================================

Every agent likes every good equally, but only agent 0 does any social good
with them. The welfare optimum hands agent 0 everything, which is as unfair
as it gets. Here we measure how much of that optimum survives once we insist
on EFk.
"""

from socialfair import oracle

# the instance: n agents, (n-k)*n + k - 1 unit goods, only agent 0 has impact
inst = oracle.gen_lowerbound_efk(3, 1)
print("values  ", [list(map(int, row)) for row in inst.v])
print("impacts ", [list(map(int, row)) for row in inst.s])

# exhaustive search over all 3^6 allocations
res = oracle.price_of_fairness(inst, oracle.predicate("ef1"))
print("\nunconstrained optimum:", res.opt_value, res.opt_allocation.as_lists())
print("best EF1 allocation:  ", res.constrained_value, res.constrained_allocation.as_lists())
print("price of EF1:         ", res.ratio)

# the same family for a few (n, k); the closed form is (hn + k - 1) / (h + k - 1)
print("\n n  k   m   PoF  formula")
for n, k in [(2, 1), (3, 1), (3, 2), (4, 3)]:
    inst = oracle.gen_lowerbound_efk(n, k)
    ratio = oracle.price_of_fairness(inst, oracle.predicate(f"efk:{k}")).ratio
    print(f"{n:2d} {k:2d} {inst.m:3d} {str(ratio):>5} {str(oracle.lowerbound_ratio(n, k)):>8}")

# other notions on the n=3, k=1 instance
inst = oracle.gen_lowerbound_efk(3, 1)
print()
for name in ("efx", "epistemic-ef1", "prop1"):
    print(f"price of {name:14s}", oracle.price_of_fairness(inst, oracle.predicate(name)).ratio)

# PROP1 is cheaper here: the proportional share is 2 unit goods, so one good
# plus any outside good already reaches it and agent 0 may keep four goods.
