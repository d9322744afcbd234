"""Stars, refinement, and the two radius ladders on a short integer line.

Walks the basic vocabulary: star of a set against a cover, when one cover
counts as smaller than another, and how ball covers along a radius ladder
form small-scale and large-scale bases.  Ends with the two exact numbers a
cover carries: its lebesgue number and its mesh.
"""

import numpy as np

from scalekit import (Cover, ball_cover, builder_line, check_ls_base,
                      check_ss_base, fmt_value, is_smaller, lebesgue_number,
                      mesh, metric_ls_base, metric_ss_base, refines, star_set,
                      star_family)


def show(space, subset):
    return "{%s}" % ", ".join(sorted((space.points[i] for i in subset),
                                     key=float))


def main():
    space = builder_line(20, 1.0)
    vals = space.values()
    thirds = Cover(space, tuple(
        frozenset(np.flatnonzero((vals >= lo) & (vals <= hi)).tolist())
        for lo, hi in ((0, 10), (5, 15), (10, 20))), name="thirds")

    print("carrier: integer line 0..20")
    print("cover 'thirds': [0,10], [5,15], [10,20]")
    probe = space.subset(["5"])
    print("st({5}, thirds) =", show(space, star_set(probe, thirds)))
    print()

    singles = Cover(space, tuple(frozenset({i}) for i in range(space.n)),
                    name="points")
    print("points <= thirds:", is_smaller(singles, thirds))
    print("thirds <= thirds:", is_smaller(thirds, thirds),
          " (its own stars spill over)")
    stars = star_family(thirds, thirds)
    print("st(thirds, thirds) refines thirds:", refines(stars, thirds))
    print()

    print("ball covers along the ladders")
    ss = metric_ss_base(space, (3.0, 1.0, 1.0 / 3.0))
    ls = metric_ls_base(space, (1.0, 3.0, 9.0, 27.0))
    print("  ss base (3, 1, 1/3):", check_ss_base(ss).status)
    print("  ls base (1, 3, 9, 27):", check_ls_base(ls).status)
    for r in (1.0, 3.0, 9.0):
        b = ball_cover(space, r)
        print("  st(B_%s, B_%s) refines B_%s:" %
              (fmt_value(r), fmt_value(r), fmt_value(3 * r)),
              refines(star_family(b, b), ball_cover(space, 3 * r)))
    print()

    print("exact cover numbers on 'thirds'")
    print("  lebesgue =", fmt_value(lebesgue_number(thirds)))
    print("  mesh     =", fmt_value(mesh(thirds)))
    print("a ball scale below the lebesgue number sits inside the cover;")
    print("a ball scale above the mesh absorbs it.")


if __name__ == "__main__":
    main()
