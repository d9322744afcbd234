"""Entourage calculus: relations over a space and the cover dictionary.

Entourages are finite sets of ordered point pairs.  Small-scale bases ask for
symmetric members with a half-step (G o G inside E and F), large-scale bases
ask for a member absorbing each composition.  The dictionary with covers sends
a scale to the union of its squares and an entourage to its slice cover.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import InstanceError, Space
from .reports import CheckReport, truncation_label
from .scales import Cover


class Entourage:
    """Relation on a space, stored extensionally as ordered index pairs."""

    def __init__(self, space: Space, pairs, name: str | None = None):
        self.space = space
        ps = set()
        for p in pairs:
            x, y = int(p[0]), int(p[1])
            if not (0 <= x < space.n and 0 <= y < space.n):
                raise InstanceError("entourage pair out of range: %r" % ((x, y),))
            ps.add((x, y))
        self.pairs: frozenset[tuple[int, int]] = frozenset(ps)
        self.name = name

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __eq__(self, other):
        if not isinstance(other, Entourage):
            return NotImplemented
        return self.space is other.space and self.pairs == other.pairs

    __hash__ = object.__hash__

    def contains_diagonal(self) -> bool:
        return all((i, i) in self.pairs for i in range(self.space.n))

    def is_symmetric(self) -> bool:
        return all((y, x) in self.pairs for (x, y) in self.pairs)

    def issubset(self, other: "Entourage") -> bool:
        return self.pairs <= other.pairs

    def union(self, other: "Entourage") -> "Entourage":
        return Entourage(self.space, self.pairs | other.pairs)

    def intersection(self, other: "Entourage") -> "Entourage":
        return Entourage(self.space, self.pairs & other.pairs)

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def __repr__(self):
        nm = self.name or "entourage"
        return "<%s: %d pairs>" % (nm, len(self.pairs))


def diagonal(space: Space) -> Entourage:
    return Entourage(space, [(i, i) for i in range(space.n)], name="diagonal")


def invert(e: Entourage) -> Entourage:
    return Entourage(e.space, [(y, x) for (x, y) in e.pairs])


def compose(e: Entourage, f: Entourage) -> Entourage:
    """e o f = {(x, z): (x, y) in e and (y, z) in f for some y}."""
    if e.space is not f.space:
        raise InstanceError("entourages live on different spaces")
    by_first: dict[int, list[int]] = {}
    for (y, z) in f.pairs:
        by_first.setdefault(y, []).append(z)
    out = set()
    for (x, y) in e.pairs:
        for z in by_first.get(y, ()):
            out.add((x, z))
    return Entourage(e.space, out)


def slice_at(e: Entourage, x: int) -> frozenset[int]:
    """E[x] = {y : (y, x) in E}: second coordinate fixed."""
    return frozenset(y for (y, x2) in e.pairs if x2 == x)


def entourage_of_scale(u: Cover) -> Entourage:
    """Union of U x U over the cover elements."""
    out = set()
    for el in u.elements:
        pts = sorted(el)
        for a in pts:
            for b in pts:
                out.add((a, b))
    return Entourage(u.space, out, name="of-scale")


def scale_of_entourage(e: Entourage) -> Cover:
    """Slice cover {E[x]}, one element per point in load order."""
    if not e.contains_diagonal():
        raise InstanceError("entourage misses the diagonal; slices would not cover")
    return Cover(e.space, [slice_at(e, x) for x in range(e.space.n)],
                 name="of-entourage")


def metric_entourage(space: Space, r: float, closed: bool = True) -> Entourage:
    """{(x, y): d(x, y) <= r} (or strict < r)."""
    if space.d is None:
        raise InstanceError("space carries no metric")
    mask = (space.d <= r) if closed else (space.d < r)
    pairs = [(int(a), int(b)) for a, b in np.argwhere(mask)]
    return Entourage(space, pairs, name="E_%s%s" % (r, "" if closed else "<"))


# -- base checks -------------------------------------------------------------

def check_uniform_axioms(base) -> CheckReport:
    """Small-scale entourage base: symmetric members, diagonal inside each,
    and for every pair a member whose square sits inside the intersection."""
    members = list(base)
    space = members[0].space
    for k, e in enumerate(members):
        if not e.contains_diagonal():
            return CheckReport("check_uniform_axioms", False,
                               counterexample={"member": k, "reason": "missing diagonal"},
                               truncation=truncation_label(space))
        if not e.is_symmetric():
            return CheckReport("check_uniform_axioms", False,
                               counterexample={"member": k, "reason": "not symmetric"},
                               truncation=truncation_label(space))
    witnesses = []
    for i, e in enumerate(members):
        for j in range(i, len(members)):
            f = members[j]
            target = e.intersection(f)
            found = None
            for k, g in enumerate(members):
                if compose(g, g).issubset(target):
                    found = k
                    break
            if found is None:
                return CheckReport(
                    "check_uniform_axioms", False,
                    counterexample={"pair": [i, j],
                                    "reason": "no member with G o G inside the intersection"},
                    truncation=truncation_label(space))
            witnesses.append({"pair": [i, j], "half_step": found})
    return CheckReport("check_uniform_axioms", True, witnesses=tuple(witnesses),
                       truncation=truncation_label(space))


def check_coarse_axioms(base) -> CheckReport:
    """Large-scale entourage base: diagonal inside each member, inverses and
    compositions absorbed by some member."""
    members = list(base)
    space = members[0].space
    for k, e in enumerate(members):
        if not e.contains_diagonal():
            return CheckReport("check_coarse_axioms", False,
                               counterexample={"member": k, "reason": "missing diagonal"},
                               truncation=truncation_label(space))
    witnesses = []
    for i, e in enumerate(members):
        inv = invert(e)
        found = None
        for k, g in enumerate(members):
            if inv.issubset(g):
                found = k
                break
        if found is None:
            return CheckReport("check_coarse_axioms", False,
                               counterexample={"member": i, "reason": "inverse not absorbed"},
                               truncation=truncation_label(space))
        witnesses.append({"inverse_of": i, "inside": found})
    for i, e in enumerate(members):
        for j, f in enumerate(members):
            comp = compose(e, f)
            found = None
            for k, g in enumerate(members):
                if comp.issubset(g):
                    found = k
                    break
            if found is None:
                return CheckReport(
                    "check_coarse_axioms", False,
                    counterexample={"pair": [i, j],
                                    "reason": "composition not absorbed"},
                    truncation=truncation_label(space))
            witnesses.append({"pair": [i, j], "absorbed_by": found})
    return CheckReport("check_coarse_axioms", True, witnesses=tuple(witnesses),
                       truncation=truncation_label(space))
