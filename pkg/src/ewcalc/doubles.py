"""Drinfeld doubles of small groups, used as an independent yardstick.

The double D(G) = k(G) >< kG has a completely explicit simple-module
census from group combinatorics: one simple per pair (conjugacy class,
irreducible character of the centralizer of a class representative), of
dimension |class| * dim(irrep).  We build D(G) as a bare algebra from
the group multiplication table and, separately, compute that census
without ever touching the algebra — the two routes check each other and
give the expected values for center computations elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import Algebra


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    elements: tuple
    mult: Callable
    # identity must be elements[0]

    def index(self, g) -> int:
        return self.elements.index(g)

    def inverse(self, g):
        for h in self.elements:
            if self.mult(g, h) == self.elements[0]:
                return h
        raise ValueError("no inverse found; not a group")

    def conjugacy_classes(self) -> list[list]:
        seen = set()
        classes = []
        for g in self.elements:
            if self.index(g) in seen:
                continue
            orbit = set()
            for h in self.elements:
                orbit.add(self.index(self.mult(self.mult(h, g), self.inverse(h))))
            seen |= orbit
            classes.append([self.elements[i] for i in sorted(orbit)])
        return classes

    def centralizer(self, g) -> list:
        return [h for h in self.elements
                if self.mult(h, g) == self.mult(g, h)]

    def is_abelian_subset(self, subset) -> bool:
        return all(self.mult(a, b) == self.mult(b, a)
                   for a in subset for b in subset)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(f"C{n}", tuple(range(n)), lambda a, b: (a + b) % n)


def symmetric_group_3() -> FiniteGroup:
    elements = ((0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0))
    return FiniteGroup("S3", elements,
                       lambda a, b: tuple(a[b[i]] for i in range(3)))


def _irrep_dims(G: FiniteGroup, subset) -> list[int]:
    """Irreducible dimensions of the subgroup on `subset` of G."""
    if G.is_abelian_subset(subset):
        return [1] * len(subset)
    if len(subset) == 6:
        # the only non-abelian group of order 6
        return [1, 1, 2]
    raise NotImplementedError(
        f"irreducible dimensions for a non-abelian subgroup of order {len(subset)}"
    )


def double_simple_dims(G: FiniteGroup) -> list[int]:
    """Simple-module dimensions of D(G), sorted, from pure character data."""
    dims = []
    for cls in G.conjugacy_classes():
        rep = cls[0]
        for d in _irrep_dims(G, G.centralizer(rep)):
            dims.append(len(cls) * d)
    dims.sort()
    order = len(G.elements)
    if sum(d * d for d in dims) != order * order:
        raise AssertionError("simple dimensions do not account for dim D(G)")
    return dims


def double_algebra(G: FiniteGroup, p: int) -> Algebra:
    """D(G) as an algebra: basis delta_g (x) h, index g * |G| + h.

    (delta_g (x) h)(delta_g' (x) h') = [g = h g' h^-1] delta_g (x) h h'.
    """
    order = len(G.elements)
    n = order * order
    c = np.zeros((n, n, n), dtype=np.int64)
    for gi, g in enumerate(G.elements):
        for hi, h in enumerate(G.elements):
            for gj, g2 in enumerate(G.elements):
                if g != G.mult(G.mult(h, g2), G.inverse(h)):
                    continue
                for hj, h2 in enumerate(G.elements):
                    k = gi * order + G.index(G.mult(h, h2))
                    c[gi * order + hi, gj * order + hj, k] = 1
    unit = np.zeros(n, dtype=np.int64)
    for gi in range(order):
        unit[gi * order + 0] = 1
    return Algebra(c, unit, p, name=f"D({G.name})")
