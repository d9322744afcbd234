"""Function algebras deciding large-scale structure, and back.

Three acts on the truncated natural numbers (windows every ten points):

  1. the catalogue of constant-at-infinity functions induces a structure,
     and membership in it agrees cover by cover with the continuously
     controlled verdict;
  2. the pair cover (n^2, n^2 + 2n) is refuted by growing unit-height
     tents on a separated subsequence of its pairs;
  3. on an unfiltered line, a probe belongs to the algebra a family
     generates exactly when it is constant on the blocks the family
     cannot separate.
"""

import numpy as np

from scalekit import (FunctionFamily, LSQuery, ball_cover, ls_membership,
                      metric_ls_base, reflectivity_oracle,
                      stone_weierstrass_desk_test, theorem75_agreement)
from scalekit.catalogues import (constant_at_infinity_family, t75_catalogue,
                                 trunc_nat, trunc_nat_structure,
                                 wide_pairs_cover)
from scalekit.instances import bundled


def main():
    space = trunc_nat()
    b = trunc_nat_structure()
    fam = constant_at_infinity_family()
    eps = (1.0, 0.5, 0.25)

    cat = t75_catalogue()
    rep = theorem75_agreement([(nm, cov) for nm, cov, _ in cat], b, fam, eps)
    print("induced membership vs continuous control on 10 covers:")
    for row in rep.witnesses:
        mark = "in " if row["induced"] else "out"
        print("  %s %-13s induced=%s controlled=%s" %
              (mark, row["cover"], row["induced"], row["controlled"]))
    print("verdicts agree on every cover:", rep.status)
    print("note:", rep.notes[0])
    print()

    base = metric_ls_base(space, (1.0, 3.0))
    wide = wide_pairs_cover()
    oracle = reflectivity_oracle(wide, b, base, fam, eps)
    w = oracle.witnesses[0]
    print("pair cover {n^2, n^2+2n}: verdict %s via %s" %
          (w["verdict"], w["route"]))
    for p in w["picks"]:
        print("  tent of radius %d separating %s from %s" %
              (p["radius"], p["pair"][0], p["pair"][1]))
    print("membership recheck confirms the refutation:",
          oracle.counterexample["membership_confirms"])
    balls = reflectivity_oracle(ball_cover(space, 2.0), b, base, fam, eps)
    print("radius-2 balls instead:", balls.witnesses[0]["verdict"])
    print()

    line, cat20 = bundled("line20")
    gens = cat20.family(line, ("one", "parity"))
    for nm in ("parity", "step"):
        probe = cat20.functions[nm]
        rep = stone_weierstrass_desk_test(gens, probe, name=nm)
        print("probe %-6s in the algebra of {one, parity}: %s" %
              (nm, rep.status))
        if not rep.status:
            cx = rep.counterexample
            print("  blocked: d_F(%s, %s) = 0 but the probe gap is %s" %
                  (cx["pair"][0], cx["pair"][1], cx["probe_gap"]))


if __name__ == "__main__":
    main()
