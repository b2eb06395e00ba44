"""
Envy that society agrees with
=============================

Two agents want a single item. Agent 0 would put it to much better use.
Plain envy-freeness cannot be satisfied at all, but socially aware envy
only counts when the envious agent would do at least as much good with the
bundle as its owner.
"""
from fractions import Fraction

from socialfair import envygraph
from socialfair.algorithms import sef1_opt
from socialfair.fairness import is_ef, is_sef, is_sef1
from socialfair.model import Allocation, Instance, utilitarian_welfare

inst = Instance(v=[[1], [1]], s=[[1], [Fraction(1, 10)]])

for owner in (0, 1):
    alloc = Allocation.from_owners([owner], 2)
    print(f"item to agent {owner}: EF={bool(is_ef(inst, alloc))}  sEF={bool(is_sef(inst, alloc))}"
          f"  welfare={utilitarian_welfare(inst, alloc)}")

# sef1_opt always reaches the welfare optimum while staying sEF1
alloc = sef1_opt(inst)
print("sef1_opt:", alloc.as_lists())

# a bigger case: ties in impact are where the envy graph matters
inst = Instance(
    v=[[5, 1, 1, 3], [1, 5, 3, 1], [3, 3, 3, 3]],
    s=[[2, 2, 0, 1], [2, 2, 0, 1], [0, 0, 1, 1]],
)
alloc = sef1_opt(inst)
print("\nsef1_opt:", alloc.as_lists(), "welfare", utilitarian_welfare(inst, alloc), "sEF1", bool(is_sef1(inst, alloc)))

for kind in envygraph.EnvyKind:
    g = envygraph.build(inst, alloc, kind)
    print(f"{kind.value:15s} envy edges: {sorted(g.edges)}")
