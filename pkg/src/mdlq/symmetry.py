"""Symmetry groups used to shrink the labeling assignment problem.

Each supported lattice carries a fixed finite matrix group acting on
coordinate vectors.  The group must satisfy six structural properties
(checked at construction): it contains -I, is orthogonal with respect to the
lattice Gram form, is closed with identity and inverses, preserves the
lattice, acts fixed-point free, and has order dividing the gcd of the shell
sizes.  When a sublattice is supplied the group must normalize it as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GroupPropertyViolation
from .lattices import Lattice
from .sublattices import SimilarSublattice, _imatmul, _imatvec, z8_gamma_matrices


def _idet(m) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    a = [[Fraction(int(x)) for x in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    assert det.denominator == 1
    return int(det)


def _mat_key(m):
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class SymmetryGroup:
    lattice: Lattice
    elements: tuple  # tuple of LxL integer matrices (tuples of tuples)

    @property
    def order(self) -> int:
        return len(self.elements)

    def apply(self, g, p):
        return _imatvec(g, p)

    def __repr__(self) -> str:
        return f"SymmetryGroup({self.lattice.name}, order={self.order})"


def _generators(lat: Lattice):
    name = lat.name
    if name == "Z1":
        return [((-1,),)]
    if name == "Z2":
        return [((0, -1), (1, 0)), ((-1, 0), (0, -1))]
    if name == "A2":
        # Rotation by pi/3: multiplication by 1 + w in the basis {1, w}.
        return [((1, -1), (1, 0))]
    if name == "Z4":
        return [
            ((0, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, -1, 0)),
            ((0, 0, -1, 0), (0, 0, 0, -1), (1, 0, 0, 0), (0, 1, 0, 0)),
            ((0, 0, 0, -1), (0, 0, 1, 0), (0, -1, 0, 0), (1, 0, 0, 0)),
            tuple(tuple(-1 if i == j else 0 for j in range(4)) for i in range(4)),
        ]
    if name == "Z8":
        g1, g8 = z8_gamma_matrices()
        return [_mat_key(g1.tolist()), _mat_key(g8.tolist())]
    raise ValueError(name)


def _closure(gens, dim):
    ident = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                p = _mat_key(_imatmul(m, g))
                if p not in elems:
                    elems.add(p)
                    nxt.append(p)
        frontier = nxt
        if len(elems) > 512:
            raise GroupPropertyViolation("closure", "generated group is unexpectedly large")
    return tuple(sorted(elems))


def check_group(group: SymmetryGroup, sub: SimilarSublattice | None = None) -> None:
    """Run the structural property checks; raise GroupPropertyViolation."""
    lat = group.lattice
    dim = lat.dim
    elems = set(group.elements)
    ident = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    neg = tuple(tuple(-x for x in row) for row in ident)
    if neg not in elems:
        raise GroupPropertyViolation("contains -I")
    gram = lat.gram2.tolist()
    for g in group.elements:
        gt = tuple(zip(*g))
        if _mat_key(_imatmul(_imatmul(gt, gram), g)) != _mat_key(gram):
            raise GroupPropertyViolation("orthogonal", f"element {g}")
    for a in group.elements:
        for b in group.elements:
            if _mat_key(_imatmul(a, b)) not in elems:
                raise GroupPropertyViolation("closure")
    if ident not in elems:
        raise GroupPropertyViolation("identity")
    # Finite + closed implies inverses, but check explicitly.
    for g in group.elements:
        if not any(_mat_key(_imatmul(g, h)) == ident for h in group.elements):
            raise GroupPropertyViolation("inverses", f"element {g}")
    for g in group.elements:
        if g == ident:
            continue
        gi = [[g[i][j] - (1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        if _idet(gi) == 0:
            raise GroupPropertyViolation("fixed-point free", f"element {g}")
    shells = lat.shells(16 if lat.dim <= 4 else 4).A
    sizes = [a for a in shells[1:] if a]
    if sizes and math.gcd(*sizes) % group.order != 0:
        raise GroupPropertyViolation(
            "order divides shell-size gcd", f"gcd={math.gcd(*sizes)}, order={group.order}"
        )
    if sub is not None:
        # Set preservation g * Lambda' == Lambda': every column of g*Gt must be
        # a sublattice point.  (The conjugate Gt^-1 g Gt is then an integer
        # isometry of the sublattice; it need not lie in the group itself.)
        gt_mat = sub.gtilde.tolist()
        for g in group.elements:
            gg = _imatmul(g, gt_mat)
            for col in range(lat.dim):
                if not sub.contains([gg[r][col] for r in range(lat.dim)]):
                    raise GroupPropertyViolation("preserves sublattice", f"element {g}")


def group_for(lat: Lattice, sub: SimilarSublattice | None = None) -> SymmetryGroup:
    """The standard group for a lattice, fully property-checked."""
    group = SymmetryGroup(lat, _closure(_generators(lat), lat.dim))
    check_group(group, sub)
    return group


def minus_identity_group(lat: Lattice) -> SymmetryGroup:
    """The fallback group {I, -I}, valid for every lattice."""
    dim = lat.dim
    ident = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    neg = tuple(tuple(-x for x in row) for row in ident)
    return SymmetryGroup(lat, tuple(sorted([ident, neg])))


def orbits(group: SymmetryGroup, items):
    """Partition points or undirected edges into orbits under the group.

    Edges are unordered endpoint pairs; the action applies the matrix to both
    endpoints.  Orbit representatives are lexicographically smallest; the
    returned list is sorted by representative.
    """
    items = list(items)
    if not items:
        return []
    is_edge = isinstance(items[0][0], tuple)

    def act(g, it):
        if is_edge:
            a = _imatvec(g, it[0])
            b = _imatvec(g, it[1])
            return (a, b) if a <= b else (b, a)
        return _imatvec(g, it)

    pending = set(items)
    out = []
    for it in sorted(items):
        if it not in pending:
            continue
        orb = {act(g, it) for g in group.elements}
        if not orb <= pending:
            raise GroupPropertyViolation("orbit closure", f"orbit of {it} leaves the item set")
        pending -= orb
        out.append(tuple(sorted(orb)))
    return out
