"""
A tour of the allocation algorithms
===================================

Each algorithm comes with a fairness guarantee and a welfare factor. We run
all of them on the same random instance and check both promises.
"""

from socialfair import ALGORITHMS, full_report, oracle
from socialfair.model import optimal_welfare, utilitarian_welfare

inst = oracle.gen_random(3, 8, seed=11)
opt = optimal_welfare(inst)
print("v =", [list(map(int, r)) for r in inst.v])
print("s =", [list(map(int, r)) for r in inst.s])
print("optimal welfare:", opt)

print(f"\n{'algorithm':22s}{'welfare':>8}{'ratio':>8}{'bound':>7}  fair?")
for name in ALGORITHMS:
    if not oracle.applicable(name, inst):
        continue
    r = oracle.verify_guarantee(inst, name)
    ratio = "-" if r.ratio is None else str(r.ratio)
    bound = "-" if r.bound is None else str(r.bound)
    notions = ", ".join(f"{k}={'yes' if ok else 'NO'}" for k, ok in r.fairness.items()) or "(none promised)"
    print(f"{name:22s}{str(r.welfare):>8}{ratio:>8}{bound:>7}  {notions}")

# the algorithms for identical or ordered valuations need their own inputs
same = oracle.gen_identical(3, 7, seed=2)
alloc = ALGORITHMS["efx-identical-approx"](same)
print("\nidentical valuations:", alloc.as_lists(),
      "welfare", utilitarian_welfare(same, alloc), "of", optimal_welfare(same))

ranked = oracle.gen_ordered(3, 7, seed=2)
alloc = ALGORITHMS["ordered-ef1"](ranked)
print("ordered valuations:  ", alloc.as_lists(),
      "welfare", utilitarian_welfare(ranked, alloc), "of", optimal_welfare(ranked))

# a full report lists every notion, with a witness pair for each failure
report = full_report(inst, ALGORITHMS["ef2-n"](inst))
for notion, res in report.results.items():
    extra = f"  ({res.witness.reason})" if res.witness else ""
    print(f"  {notion:22s}{res.holds}{extra}")
