"""The labeling function: map each lattice point to an ordered pair of
sublattice points so that either component alone is a coarse description and
the pair determines the point exactly.

Construction pipeline (all exact integer / rational arithmetic):

1. ``base_edge_set``     -- the N shortest undirected sublattice edges with
                            one endpoint at the origin.
2. ``closest_edge_in_class`` -- relocate an edge class so its midpoint is as
                            close as possible to the point being labeled.
3. ``optimal_class_matching`` -- group-reduced exact min-cost assignment of
                            discrete-Voronoi cosets to edge classes.
4. color / direction rules -- turn the undirected label into a directed one
                            so the two channels stay balanced.

A finished ``Labeling`` stores one relocated edge per coset representative;
encode/decode extend it to the whole lattice through the shift property.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .assignment import min_cost_assignment
from .errors import (
    AsymmetricEdgeSet,
    InadmissibleIndex,
    MdlqError,
    NotALabel,
    PropertyCheckFailed,
    SizeMismatch,
    ZeroEdge,
)
from .lattices import Lattice
from .sublattices import SimilarSublattice, _imatvec
from .symmetry import SymmetryGroup, group_for, minus_identity_group


class DirectedEdge(NamedTuple):
    """Ordered label: ``first`` goes to channel 1, ``second`` to channel 2."""

    first: tuple
    second: tuple

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.second, self.first)


def _neg(v):
    return tuple(-x for x in v)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def canonical_edge(a, b):
    """Undirected edge as an ordered pair, smaller endpoint first."""
    return (a, b) if a <= b else (b, a)


def class_key(delta):
    """Canonical representative of the edge class with difference +-delta."""
    nd = _neg(delta)
    return delta if delta <= nd else nd


def edge_class_key(edge):
    return class_key(_sub(edge[1], edge[0]))


# ---------------------------------------------------------------------------
# color, direction and point-selection rules
# ---------------------------------------------------------------------------


def color(lat: Lattice, edge) -> int:
    """Parity bit of an edge; alternates along any line of shifted copies.

    For endpoints p, q and the first coordinate j with q_j != p_j the color
    is floor((p_j + q_j) / (2*|q_j - p_j|)) mod 2.  Orientation independent.
    """
    p, q = edge
    for j in range(lat.dim):
        d = abs(q[j] - p[j])
        if d:
            return ((p[j] + q[j]) // (2 * d)) % 2
    raise ZeroEdge("color is undefined for the zero-length edge")


def _orientation_sign(lat: Lattice, edge, lam) -> int:
    """Sign of <a - b, lam - mu> with the deterministic boundary rule.

    ``edge`` must already be in canonical endpoint order.  On the tie
    hyperplane the sign of the first nonzero coordinate of lam - mu decides;
    a zero vector (point at the midpoint) returns 0.
    """
    a, b = edge
    d = _sub(a, b)
    w2 = tuple(2 * x - y - z for x, y, z in zip(lam, a, b))
    s = lat.inner2(d, w2)
    if s:
        return 1 if s > 0 else -1
    for x in w2:
        if x:
            return 1 if x > 0 else -1
    return 0


def direct_edge(lat: Lattice, edge, lam, c: int | None = None) -> DirectedEdge:
    """Orient an undirected label for the point it labels.

    Color 0 sends the endpoint nearer to ``lam`` on channel 1, color 1 sends
    it on channel 2.  A point exactly at the midpoint gets the canonical
    orientation.
    """
    a, b = canonical_edge(*edge)
    if a == b:
        return DirectedEdge(a, b)
    if c is None:
        c = color(lat, (a, b))
    s = _orientation_sign(lat, (a, b), lam)
    if s == 0:
        return DirectedEdge(a, b)
    # s > 0 means lam is nearer to a.
    if (s > 0) == (c == 0):
        return DirectedEdge(a, b)
    return DirectedEdge(b, a)


def select_point(lat: Lattice, de: DirectedEdge, candidate, c: int | None = None):
    """Inverse of the direction rule: pick the labeled point from a candidate
    pair {candidate, 2*mu - candidate} consistent with the edge orientation."""
    de = DirectedEdge(*de)
    a, b = de
    if a == b:
        return candidate
    if c is None:
        c = color(lat, (a, b))
    mirror = _sub(_add(a, b), candidate)
    if direct_edge(lat, (a, b), candidate, c) == de:
        return candidate
    if direct_edge(lat, (a, b), mirror, c) == de:
        return mirror
    raise NotALabel(f"{de} labels neither {candidate} nor {mirror}")


# ---------------------------------------------------------------------------
# edge set and relocation
# ---------------------------------------------------------------------------


def ds_cost(lat: Lattice, lam, edge) -> Fraction:
    """Side distortion d_s(lam, edge) = (||lam-a||^2 + ||lam-b||^2)/2, exact."""
    a, b = edge
    return Fraction(lat.qshell(_sub(lam, a)) + lat.qshell(_sub(lam, b)), 2 * lat.dim)


def base_edge_set(sub: SimilarSublattice):
    """The N shortest undirected sublattice edges {0, p}.

    Returns ``(endpoints, shell_hist, kmax)``: the list of far endpoints in
    parent coordinates (the zero edge included as the origin), the histogram
    B_i of unnormalized parent-shell indices, and the largest shell index
    used.  Partial shells are completed with whole +- pairs, smallest
    canonical endpoint first; an odd number of leftover slots cannot keep the
    set negation-closed and raises AsymmetricEdgeSet.
    """
    lat = sub.lattice
    n = sub.index
    shells = lat.shells(8)
    while shells.S(len(shells.A) - 1) < n:
        shells = lat.shells(2 * len(shells.A))
    acc = 0
    kmax = 0
    for i, a in enumerate(shells.A):
        acc += a
        if acc >= n:
            kmax = i
            break
    prev = acc - shells.A[kmax]  # points in shells < kmax
    pts = lat.points_in_shell_ball(kmax)
    full = [u for u in pts if lat.qshell(u) < kmax]
    last = [u for u in pts if lat.qshell(u) == kmax]
    need = n - prev
    hist = {i: a for i, a in enumerate(shells.A[:kmax]) if a}
    if need == len(last):
        chosen = last
    else:
        if need % 2:
            raise AsymmetricEdgeSet(
                f"{need} slots remain in shell {kmax}; cannot keep +- pairs"
            )
        pairs = {}
        for u in last:
            pairs.setdefault(min(u, _neg(u)), u)
        order = sorted(pairs, key=lambda u: sub.from_sub_coords(u))
        chosen = []
        for u in order[: need // 2]:
            chosen.extend([u, _neg(u)])
    hist[kmax] = len(chosen)
    endpoints = sorted(sub.from_sub_coords(u) for u in full + chosen)
    return endpoints, hist, kmax


def closest_edge_in_class(sub: SimilarSublattice, lam, delta):
    """Relocate the class with difference ``delta`` closest to ``lam``.

    The optimal shift places the midpoint at the sublattice point nearest to
    lam - delta/2; the result does not depend on the sign of delta.
    """
    if not any(delta):
        vp, _ = sub.coset_reduce(lam)
        return (vp, vp)
    t2 = tuple(2 * x - d for x, d in zip(lam, delta))
    w = sub.nearest2(t2)
    return canonical_edge(w, _add(w, delta))


# ---------------------------------------------------------------------------
# group-reduced optimal matching
# ---------------------------------------------------------------------------


def _coset_orbits(sub: SimilarSublattice, group: SymmetryGroup, reps):
    """Orbits of the nonzero Voronoi representatives under the group action
    on cosets (apply the matrix, then reduce back into V0(0))."""
    remaining = set(reps)
    orbits = []
    for rep in sorted(reps):
        if rep not in remaining:
            continue
        orb = set()
        for g in group.elements:
            moved = _imatvec(g, rep)
            _, r = sub.coset_reduce(moved)
            orb.add(r)
        if len(orb) != group.order or not orb <= remaining:
            raise SizeMismatch(
                f"group orbit of {rep} has size {len(orb)}, expected {group.order}"
            )
        remaining -= orb
        orbits.append(rep)
    return orbits


def _class_orbits(group: SymmetryGroup, keys):
    """Orbits of canonical class keys; each orbit holds order/2 classes."""
    remaining = set(keys)
    out = []
    for k in sorted(keys):
        if k not in remaining:
            continue
        orb = {class_key(_imatvec(g, k)) for g in group.elements}
        if len(orb) != group.order // 2 or not orb <= remaining:
            raise SizeMismatch(
                f"class orbit of {k} has size {len(orb)}, expected {group.order // 2}"
            )
        remaining -= orb
        out.append(k)
    return out


def optimal_class_matching(sub: SimilarSublattice, base_endpoints, group: SymmetryGroup):
    """Minimum-cost pairing of coset orbits with edge-class orbits.

    The cost of matching the orbit of point p0 with the orbit of class k0 is
    ``order * min_g d_s(p0, alpha*(p0, [g k0]))`` -- the inner minimum ranges
    over the distinct classes of the orbit ("twists"), which preserves exact
    optimality of the reduced problem.  Returns anchor pairs
    ``{point_orbit_rep: class_key}`` and the exact total cost.
    """
    lat = sub.lattice
    reps = [r for r in sub.voronoi_reps if any(r)]
    keys = sorted({class_key(p) for p in base_endpoints if any(p)})
    if 2 * len(keys) != len(reps):
        raise SizeMismatch(f"{len(reps)} points vs {len(keys)} edge classes")
    porbs = _coset_orbits(sub, group, reps)
    corbs = _class_orbits(group, keys)
    if len(porbs) != len(corbs):
        raise SizeMismatch(f"{len(porbs)} point orbits vs {len(corbs)} class orbits")
    m = group.order
    cost = []
    best_key = []
    for p0 in porbs:
        row = []
        rowk = []
        for k0 in corbs:
            twists = sorted({class_key(_imatvec(g, k0)) for g in group.elements})
            best = None
            for k in twists:
                c = ds_cost(lat, p0, closest_edge_in_class(sub, p0, k))
                if best is None or c < best[0]:
                    best = (c, k)
            row.append(m * best[0])
            rowk.append(best[1])
        cost.append(row)
        best_key.append(rowk)
    cols, total = min_cost_assignment(cost)
    anchors = {porbs[i]: best_key[i][cols[i]] for i in range(len(porbs))}
    return anchors, total


# ---------------------------------------------------------------------------
# the labeling object
# ---------------------------------------------------------------------------


@dataclass
class Labeling:
    """A complete labeling design: per-coset relocated edges plus the exact
    machinery to encode and decode arbitrary lattice points."""

    sub: SimilarSublattice
    group: SymmetryGroup
    table: dict  # V0(0) representative -> relocated undirected edge
    base_endpoints: list
    shell_hist: dict
    kmax: int
    anchors: dict
    cost_total: Fraction
    class_table: dict = field(init=False)

    def __post_init__(self):
        self.class_table = {}
        for rep in sorted(self.table):
            edge = self.table[rep]
            key = edge_class_key(edge)
            self.class_table.setdefault(key, (rep, edge))

    # -- public accessors ------------------------------------------------------

    @property
    def lattice(self) -> Lattice:
        return self.sub.lattice

    @property
    def index(self) -> int:
        return self.sub.index

    def edge_for(self, rep):
        return self.table[rep]

    def edge_lengths_sq(self):
        """Normalized squared lengths l^2(e) over all N table rows, exact."""
        lat = self.lattice
        return [Fraction(lat.qshell(_sub(e[1], e[0])), lat.dim) for e in self.table.values()]

    def excess_sum(self) -> Fraction:
        """Sum of d_s(lam, e) over the discrete Voronoi set, exact."""
        return self.cost_total

    # -- encoding ----------------------------------------------------------------

    def alpha_u(self, lam):
        """Undirected label of an arbitrary lattice point (shift extension)."""
        lam = tuple(int(x) for x in lam)
        vp, rep = self.sub.coset_reduce(lam)
        a, b = self.table[rep]
        return canonical_edge(_add(a, vp), _add(b, vp))

    def encode(self, lam) -> DirectedEdge:
        """Directed label of a lattice point.

        The color is evaluated on the shifted edge, so orientation alternates
        along lines of equivalent edges exactly as the balance rule requires.
        """
        lam = tuple(int(x) for x in lam)
        edge = self.alpha_u(lam)
        if edge[0] == edge[1]:
            return DirectedEdge(edge[0], edge[1])
        return direct_edge(self.lattice, edge, lam)

    def decode_both(self, de) -> tuple:
        """Invert ``encode``: recover the lattice point from a directed label."""
        de = DirectedEdge(tuple(de[0]), tuple(de[1]))
        a, b = de
        if a == b:
            if not self.sub.contains(a):
                raise NotALabel(f"{a} is not a sublattice point")
            return a
        key = class_key(_sub(b, a))
        hit = self.class_table.get(key)
        if hit is None:
            raise NotALabel(f"edge class {key} is not part of this design")
        rep, base_edge = hit
        total = _add(a, b)
        base_total = _add(base_edge[0], base_edge[1])
        diff = _sub(total, base_total)
        if any(x % 2 for x in diff):
            raise NotALabel(f"{de} is not aligned with the design's edge set")
        shift = tuple(x // 2 for x in diff)
        if not self.sub.contains(shift):
            raise NotALabel(f"{de} is not a shift of a design edge")
        cand = _add(rep, shift)
        return select_point(self.lattice, de, cand)

    def decode_side(self, component, channel: int):
        """Single-channel reconstruction: the sublattice point itself."""
        if channel not in (1, 2):
            raise ValueError("channel must be 1 or 2")
        return tuple(component)

    # -- property verification ----------------------------------------------------

    def verify_properties(self, shift_samples: int = 8) -> None:
        """Check Properties 1-3 exactly; raise PropertyCheckFailed on violation."""
        lat = self.lattice
        sub = self.sub
        zero = (0,) * lat.dim

        # Property 3 (+ pairwise balance): each positive-length edge labels two
        # points summing to the edge-endpoint sum, with opposite orientations.
        for rep in sub.voronoi_reps:
            edge = self.table[rep]
            if edge[0] == edge[1]:
                if edge[0] != zero or rep != zero:
                    raise PropertyCheckFailed("zero-edge", f"rep {rep} -> {edge}")
                continue
            partner = _sub(_add(edge[0], edge[1]), rep)
            if self.alpha_u(partner) != edge:
                raise PropertyCheckFailed(
                    "midpoint-sum", f"edge {edge} labels {rep} but not {partner}"
                )
            de_a = self.encode(rep)
            de_b = self.encode(partner)
            if partner != rep and de_b != de_a.reversed():
                raise PropertyCheckFailed(
                    "orientation-pairing", f"{rep}:{de_a} vs {partner}:{de_b}"
                )

        # Property 1: exactly N points use each sublattice point per channel.
        # By the shift property it suffices to check the vertex at the origin.
        firsts = set()
        seconds = set()
        for p in self.base_endpoints:
            for de in (
                [DirectedEdge(zero, zero)]
                if p == zero
                else [DirectedEdge(zero, p), DirectedEdge(p, zero)]
            ):
                lam = self.decode_both(de)
                if self.encode(lam) != de:
                    raise PropertyCheckFailed("reuse", f"{de} decodes to {lam}, encode mismatch")
                if de.first == zero:
                    firsts.add(lam)
                if de.second == zero:
                    seconds.add(lam)
        if len(firsts) != self.index or len(seconds) != self.index:
            raise PropertyCheckFailed(
                "reuse", f"vertex 0 labels {len(firsts)}/{len(seconds)} points, expected N"
            )

        # Property 2: shift covariance on a deterministic sample.
        gens = [sub.from_sub_coords(u) for u in _unit_vectors(lat.dim)]
        reps = list(sub.voronoi_reps)
        for i in range(min(shift_samples, len(reps))):
            lam = reps[(i * 7919) % len(reps)]
            for s in gens:
                lhs = self.alpha_u(_add(lam, s))
                rhs = self.alpha_u(lam)
                if lhs != canonical_edge(_add(rhs[0], s), _add(rhs[1], s)):
                    raise PropertyCheckFailed("shift", f"lam={lam}, shift={s}")

    # -- serialization -------------------------------------------------------------

    def to_dict(self) -> dict:
        rows = [
            {"rep": list(rep), "edge": [list(e) for e in self.table[rep]]}
            for rep in sorted(self.table)
        ]
        return {
            "schema": 1,
            "lattice": self.lattice.name,
            "params": list(self.sub.params),
            "index": self.index,
            "group_order": self.group.order,
            "orbit_matching": [
                {"point": list(p), "class": list(k)} for p, k in sorted(self.anchors.items())
            ],
            "table": rows,
            "cost_summary": {
                "total": float(self.cost_total),
                "total_num": self.cost_total.numerator,
                "total_den": self.cost_total.denominator,
                "mean_excess": float(self.cost_total / self.index),
            },
        }


def _unit_vectors(dim):
    return [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]


def _expand_anchors(sub: SimilarSublattice, group: SymmetryGroup, anchors):
    """Equivariant extension of per-orbit anchor pairs to the full table."""
    lat = sub.lattice
    zero = (0,) * lat.dim
    table = {zero: (zero, zero)}
    cost = Fraction(0)
    for p0, k0 in anchors.items():
        for g in group.elements:
            moved = _imatvec(g, p0)
            _, rep = sub.coset_reduce(moved)
            if rep in table:
                raise SizeMismatch(f"orbit expansion revisits representative {rep}")
            key = class_key(_imatvec(g, k0))
            # alpha* commutes with the group action up to the coset shift, so
            # relocating for the reduced representative is exact.
            edge = closest_edge_in_class(sub, rep, key)
            table[rep] = edge
            cost += ds_cost(lat, rep, edge)
    return table, cost


def build_labeling(
    sub: SimilarSublattice,
    group: SymmetryGroup | None = None,
    anchors: dict | None = None,
    check: bool = True,
) -> Labeling:
    """Construct the labeling for a sublattice design.

    With no explicit ``anchors`` the optimal group-reduced matching is
    solved; the full symmetry group is tried first and the always-valid
    {I, -I} group is used when the requested index breaks an orbit
    (orbit sizes are index dependent).  Properties 1-3 are verified before
    returning unless ``check=False``.
    """
    if sub.index % 2 == 0:
        raise InadmissibleIndex(
            f"labeling requires an odd index (got N={sub.index}); even indices "
            "put points on coset boundaries and break the pairing structure"
        )
    endpoints, hist, kmax = base_edge_set(sub)
    lat = sub.lattice
    if sub.index > 1:
        # Negation closure of the edge set (positive-length classes in pairs).
        eps = set(endpoints)
        if any(_neg(p) not in eps for p in endpoints):
            raise AsymmetricEdgeSet("edge set is not negation closed")

    groups_to_try = []
    if group is not None:
        groups_to_try.append(group)
    else:
        try:
            groups_to_try.append(group_for(lat, sub))
        except (MdlqError, ValueError):
            pass
        groups_to_try.append(minus_identity_group(lat))

    last_err = None
    for g in groups_to_try:
        try:
            if anchors is None:
                found, _ = optimal_class_matching(sub, endpoints, g)
            else:
                found = {tuple(p): class_key(tuple(k)) for p, k in anchors.items()}
            table, cost = _expand_anchors(sub, g, found)
            if len(table) != sub.index:
                raise SizeMismatch(f"table has {len(table)} rows, expected {sub.index}")
            lab = Labeling(sub, g, table, endpoints, hist, kmax, found, cost)
            if check:
                lab.verify_properties()
            return lab
        except (SizeMismatch, PropertyCheckFailed) as err:
            last_err = err
            if anchors is not None:
                break
            continue
    raise last_err


def labeling_from_dict(data: dict) -> Labeling:
    """Rebuild a labeling from its serialized design file (and re-verify)."""
    from .sublattices import design_sublattice

    if data.get("schema") != 1:
        raise ValueError(f"unsupported design schema {data.get('schema')!r}")
    sub = design_sublattice(data["lattice"], index=data["index"], params=tuple(data["params"]))
    anchors = {tuple(r["point"]): tuple(r["class"]) for r in data["orbit_matching"]}
    group = None
    for g in (_try_group(sub), minus_identity_group(sub.lattice)):
        if g is not None and g.order == data["group_order"]:
            group = g
            break
    lab = build_labeling(sub, group=group, anchors=anchors)
    stored = {tuple(r["rep"]): tuple(tuple(x) for x in r["edge"]) for r in data["table"]}
    if stored != {k: tuple(v) for k, v in lab.table.items()}:
        raise PropertyCheckFailed("serialization", "stored table does not match rebuild")
    return lab


def _try_group(sub):
    try:
        return group_for(sub.lattice, sub)
    except (MdlqError, ValueError):
        return None


def brute_force_min_cost(sub: SimilarSublattice) -> Fraction:
    """Exhaustive optimum over all constrained bijections (small designs).

    Equivalent-point / equivalent-edge constraints reduce the search to
    bijections between the (N-1)/2 negation pairs of V0(0) and the (N-1)/2
    nonzero edge classes; each pairing costs 2 * d_s(p, [k]).
    """
    from itertools import permutations

    lat = sub.lattice
    endpoints, _, _ = base_edge_set(sub)
    reps = [r for r in sub.voronoi_reps if any(r)]
    pairs = sorted({max(r, _neg(r)) for r in reps})
    keys = sorted({class_key(p) for p in endpoints if any(p)})
    if len(pairs) != len(keys):
        raise SizeMismatch("pair/class counts differ")
    if len(pairs) > 8:
        raise ValueError("brute force limited to (N-1)/2 <= 8")
    cost = [
        [2 * ds_cost(lat, p, closest_edge_in_class(sub, p, k)) for k in keys] for p in pairs
    ]
    best = None
    for perm in permutations(range(len(keys))):
        c = sum(cost[i][perm[i]] for i in range(len(pairs)))
        if best is None or c < best:
            best = c
    return best
