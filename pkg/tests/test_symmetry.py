import pytest

from mdlq.errors import GroupPropertyViolation
from mdlq.labeling import base_edge_set, canonical_edge, ds_cost
from mdlq.lattices import get_lattice
from mdlq.sublattices import _imatvec, design_sublattice
from mdlq.symmetry import SymmetryGroup, check_group, group_for, minus_identity_group, orbits


def test_group_orders():
    expected = {"Z1": 2, "Z2": 4, "A2": 6, "Z4": 8, "Z8": 16}
    for name, order in expected.items():
        assert group_for(get_lattice(name)).order == order


def test_z2_group_elements(z2):
    g = group_for(z2)
    rot = ((0, -1), (1, 0))
    neg = ((-1, 0), (0, -1))
    assert rot in g.elements and neg in g.elements


def test_z1_group(z1):
    assert set(group_for(z1).elements) == {((1,),), ((-1,),)}


def test_a2_group_preserves_lattice(a2):
    g = group_for(a2)
    shell = set(a2.points_in_shell_ball(3))
    for m in g.elements:
        assert {_imatvec(m, p) for p in shell} == shell


@pytest.mark.parametrize(
    "name,n", [("Z1", 5), ("Z2", 13), ("A2", 31), ("Z4", 9), ("Z8", 81)]
)
def test_group_checks_with_sublattice(name, n):
    lat = get_lattice(name)
    sub = design_sublattice(name, n)
    group_for(lat, sub)  # raises on any property violation


def test_group_property_violation_reported(a2):
    ident = ((1, 0), (0, 1))
    bad = SymmetryGroup(a2, (ident,))  # missing -I
    with pytest.raises(GroupPropertyViolation, match="-I"):
        check_group(bad)
    shear = SymmetryGroup(a2, (ident, ((-1, 0), (0, -1)), ((1, 1), (0, 1))))
    with pytest.raises(GroupPropertyViolation):
        check_group(shear)


def test_minus_identity_group(a2):
    g = minus_identity_group(a2)
    assert g.order == 2
    check_group(g)


# -- orbits ---------------------------------------------------------------------


def test_orbit_a2_first_shell(a2):
    g = group_for(a2)
    shell = [p for p in a2.points_in_shell_ball(1) if p != (0, 0)]
    orbs = orbits(g, shell)
    assert len(orbs) == 1 and len(orbs[0]) == 6


def test_orbit_pm_pair(a2):
    g = minus_identity_group(a2)
    assert orbits(g, [(2, 1), (-2, -1)]) == [((-2, -1), (2, 1))]


def test_orbit_z2_rotation_cycle(z2):
    g = group_for(z2)
    orbs = orbits(g, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert len(orbs) == 1 and len(orbs[0]) == 4


def test_orbit_sizes_divide_group_order(a2):
    g = group_for(a2)
    pts = [p for p in a2.points_in_shell_ball(4) if p != (0, 0)]
    for orb in orbits(g, pts):
        assert g.order % len(orb) == 0
        assert len(orb) == g.order  # fixed-point free on nonzero points


def test_orbit_edges(a2):
    g = group_for(a2)
    sub = design_sublattice("A2", 7)
    endpoints, _, _ = base_edge_set(sub)
    edges = [canonical_edge((0, 0), p) for p in endpoints if any(p)]
    orbs = orbits(g, edges)
    assert sum(len(o) for o in orbs) == len(edges)


def test_distance_equivariance(a2):
    # d_s(g lam, g e) == d_s(lam, e) exactly; this licenses orbit reduction.
    g = group_for(a2)
    sub = design_sublattice("A2", 31, params=(5, -1))
    endpoints, _, _ = base_edge_set(sub)
    edges = [canonical_edge((0, 0), p) for p in endpoints if any(p)][:6]
    pts = list(sub.voronoi_reps)[:8]
    for m in g.elements:
        for lam in pts:
            for e in edges:
                ge = canonical_edge(_imatvec(m, e[0]), _imatvec(m, e[1]))
                assert ds_cost(a2, _imatvec(m, lam), ge) == ds_cost(a2, lam, e)
