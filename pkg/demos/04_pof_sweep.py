"""
Price of fairness on random instances
=====================================

The lower-bound family is built to be bad. On random small instances
the cost of fairness is usually modest; this sweep shows how modest.
"""
from collections import Counter

from socialfair import oracle

notions = ["ef1", "efx", "prop1", "epistemic-ef1", "sef1"]
seeds = range(40)

worst = {name: (1, None) for name in notions}
infeasible = Counter()
for seed in seeds:
    inst = oracle.gen_random(3, 5, seed)
    for name in notions:
        res = oracle.price_of_fairness(inst, oracle.predicate(name))
        if res.infinite:
            infeasible[name] += 1
            continue
        if res.ratio > worst[name][0]:
            worst[name] = (res.ratio, seed)

print(f"{len(seeds)} random instances, n=3, m=5, values and impacts in 0..9\n")
print(f"{'notion':15s}{'worst PoF':>10}  seed")
for name in notions:
    ratio, seed = worst[name]
    print(f"{name:15s}{str(ratio):>10}  {seed if seed is not None else '-'}")
if infeasible:
    print("\nno feasible allocation with positive welfare:", dict(infeasible))

# the same sweep is available from the shell:
#   fairdiv pof --gen random:3,5,0 --sweep 40 --predicate ef1 --format csv
