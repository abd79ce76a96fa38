"""Which triplet query sets can a distance class shatter?

Run: python3 demos/shattering_walkthrough.py
"""

from contrastive_vc import HypothesisClass, QuerySet, bounds
from contrastive_vc.realizability import realize
from contrastive_vc.shattering import construct, is_shattered, verify_construction, vc_search

# four points on a line: c, r, p, t
c, r, p, t = 0, 1, 2, 3
line = HypothesisClass.lp(2, 1)

# two queries sharing the pair (p, t): every labeling fits on a line
pair = QuerySet(4, ((c, p, t), (r, p, t)))
print("S' shattered on the line:", is_shattered(pair, line).shattered)

# three queries around c: the cyclic labeling asks r < p < t < r
cyc = QuerySet(4, ((c, r, p), (c, p, t), (c, r, t)))
rep = is_shattered(cyc, line)
print("S shattered on the line:", rep.shattered, "refuted by", rep.refuter)
verdict = realize(cyc, rep.refuter, HypothesisClass.arbitrary())
print("  even an arbitrary distance fails:", verdict.status.value,
      "cycle", verdict.certificate.pairs)

# a non-cyclic labeling of the same set has an exact line witness
ok = realize(cyc, (0, 0, 0), line)
print("  labeling (0,0,0) on the line:", [str(x[0]) for x in ok.witness.points])

# lower-bound constructions: all labelings checked with exact arithmetic
for family, n, d, p_ in (("lp", 6, 3, 2), ("lp", 6, 3, 1), ("arbitrary", 6, None, None),
                         ("class", 9, None, None)):
    con = construct(family, n, d, p_)
    print(f"{family:9s} n={n}: {len(con.queries):2d} queries, "
          f"{verify_construction(con)} labelings verified")

# greedy search versus the counting upper bound
for n in (3, 4, 5):
    found = vc_search(n, HypothesisClass.arbitrary(), budget=2)
    print(f"arbitrary n={n}: shattered {found.size} queries, "
          f"lower {(n - 1) * (n - 2) // 2}, upper {bounds.vc_upper_crossover(bounds.ARBITRARY, n)}")
