"""Operators as carriers of scale: supports, chains, and partitions.

A sparse operator sees geometry twice over.  Its support is an entourage,
so products compose supports.  Its large entries are chain steps, so a
cover is bounded for the operator family when short chains cross every
element.  The demo ends with the partition-of-unity pipeline: merge the
columns onto selected points, read the result as an operator, and compare
the chain verdict with the metric one on a grid.
"""

import numpy as np

from scalekit import (Cover, OperatorMatrix, PartitionOfUnity, StarFamily,
                      compose, f_bounded, ls_from_algebra, operator_norm,
                      pou_improve, pou_to_operator, roe_comparison_tests,
                      support_entourage)
from scalekit.instances import bundled


def main():
    line, cat = bundled("line20")
    shift = cat.operators["shift"]
    fives = cat.covers["fives"]

    print("shift on the line 0..20: norm %.6f, %d support pairs" %
          (operator_norm(shift), len(support_entourage(shift).pairs)))
    sq = shift @ shift
    inside = support_entourage(sq).issubset(
        compose(support_entourage(shift), support_entourage(shift)))
    print("supp(shift^2) inside supp(shift) o supp(shift):", inside)
    print()

    fam = StarFamily(line, ("shift",), (shift,)).with_adjoints()
    for budget in (5, 3):
        rep = f_bounded(fives, fam, budget)
        if rep.status:
            print("fives blocks chained with %d points (budget %d)" %
                  (rep.witnesses[0]["n"], budget))
        else:
            print("budget %d fails: %s" % (budget,
                                           rep.counterexample["reason"]))
    capped = ls_from_algebra(fives, fam, degree=2, n_max=5)
    w = capped.witnesses[0]
    print("degree cap %d gives %d monomials, verdict %s" %
          (w["degree_cap"], w["monomials"], capped.status))
    print()

    space = line
    k = 5
    centers = np.arange(k) * 5
    w = np.maximum(0.0, 1.0 - np.abs(space.values()[:, None]
                                     - centers[None, :]) / 5.0)
    w /= w.sum(axis=1, keepdims=True)
    phi = PartitionOfUnity(space, w, tuple(int(c) for c in centers))
    psi, rep = pou_improve(phi, [int(c) for c in centers])
    print("tent partition over centers 0,5,10,15,20:")
    print("  merge keeps %d columns, coarsens %s, refines star %s" %
          (rep.witnesses[0]["merged"], rep.witnesses[0]["coarsens"],
           rep.witnesses[0]["refines_star"]))
    m = pou_to_operator(psi)
    print("  as an operator: norm %.4f, columns sum to one: %s" %
          (operator_norm(m), bool(np.allclose(m.dense().sum(axis=0), 1.0))))
    print()

    grid, gcat = bundled("grid6")
    for nm, cov in gcat.covers.items():
        rep = roe_comparison_tests(cov, r=1.0, n_max=2)
        w = rep.witnesses[0]
        print("%s on the 6x6 grid: chained at n=%d, diam %s <= bound %s, "
              "tally norm %s" % (nm, w["n"], w["max_diam"], w["bound"],
                                 w["norm"][:6]))


if __name__ == "__main__":
    main()
