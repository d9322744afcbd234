"""Behaviour at infinity on a truncated half line.

The carrier is [0, 110] in eighth steps with bounded windows declared at
10, 20, ..., 100.  Everything past the top window stands in for "infinity".
The demo checks which subsets count as weakly bounded, then runs the slow
oscillation verdicts for a small catalogue of functions, and finally builds
a bump family that refutes slow oscillation for the unit-interval cover.
"""

from scalekit import (SOQuery, ball_cover, build_bump_refuter,
                      desk_weakly_bounded, is_slowly_oscillating)
from scalekit.catalogues import (halfline, halfline_structure,
                                 oscillation_family, unit_cover, value_index)


def main():
    space = halfline()
    b = halfline_structure()
    print("carrier: half line 0..110, windows at 10, 20, ..., 100")
    print()

    for label, values in (("[0, 7]", [v / 8.0 for v in range(57)]),
                          ("{0, 50, 104}", [0.0, 50.0, 104.0]),
                          ("[0, 30] + {108}", list(range(31)) + [108.0])):
        subset = frozenset(value_index(space, v) for v in values)
        ok, detail = desk_weakly_bounded(subset, b)
        print("weakly bounded %-16s %s (%s)" % (label, ok, detail["mode"]))
    print()

    base = (ball_cover(space, 1.0), ball_cover(space, 3.0))
    fam = oscillation_family()
    print("slow oscillation against balls of radius 1 and 3,")
    print("eps grid 1, 1/2, 1/4:")
    for nm in fam.names:
        q = SOQuery(fam.member(nm), base, (1.0, 0.5, 0.25), b, name=nm)
        rep = is_slowly_oscillating(q)
        mark = "yes" if rep.status else "no "
        where = rep.witnesses[-1]["witness"] if rep.status else \
            rep.counterexample["mode"]
        print("  %s %-10s (%s)" % (mark, nm, where))
    print()

    centers = [value_index(space, v) for v in (10.0, 30.0, 105.0)]
    bump = build_bump_refuter(space, centers, 1.0)
    q = SOQuery(bump, (unit_cover(),), (0.5,), b, name="bump")
    rep = is_slowly_oscillating(q)
    print("unit-height bumps at 10, 30, 105 against the unit cover:")
    print("  slowly oscillating:", rep.status)
    print("  refutation mode:", rep.counterexample["mode"])
    print("the last bump escapes every declared window, so no weakly")
    print("bounded witness can swallow its oscillation.")


if __name__ == "__main__":
    main()
