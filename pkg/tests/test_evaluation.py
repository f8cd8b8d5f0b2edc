import math
from fractions import Fraction

import pytest

from mdlq.errors import InadmissibleIndex, NoRepresentation
from mdlq.evaluation import (
    admissible_asymptotic_indices,
    admissible_design_indices,
    analytic_rates,
    asymptotic_limit_check,
    bound_sandwich,
    design_report,
    edge_histogram,
    figure_data,
)
from mdlq.lattices import get_lattice, sphere_second_moment

from .conftest import design


# -- rates -----------------------------------------------------------------------


def test_rates_n1_equal(z1):
    r0, r = analytic_rates(z1, 1, 1.0, 0.0)
    assert r0 == r


def test_rates_formula(z1):
    r0, r = analytic_rates(z1, 4, 1.0, 0.0)
    assert r0 == pytest.approx(0.0, abs=1e-12)
    assert r == pytest.approx(-2.0, abs=1e-12)  # R = R0 - 2 bits at N = 4


def test_rates_doubling_law(a2):
    _, r1 = analytic_rates(a2, 16, 0.7, 1.3)
    _, r2 = analytic_rates(a2, 32, 0.7, 1.3)
    assert r1 - r2 == pytest.approx(0.5, abs=1e-12)  # (1/L) bit per doubling


# -- bound sandwich -------------------------------------------------------------


def test_sandwich_n1_degenerate():
    lab = design("A2", 1)
    s = bound_sandwich(lab, 1.0)
    assert s.lower_term == s.mid_term == s.upper_term == 0
    assert s.lower == s.mid == s.upper


def test_sandwich_z1_n3_hand_values():
    s = bound_sandwich(design("Z1", 3), 1.0)
    assert s.lower_term == Fraction(3, 2)  # edge lengths {0, 9, 9}: 18/12
    assert s.mid_term == Fraction(5, 3)
    assert s.upper_term == Fraction(21, 2)  # + (2 * 3/2)^2
    assert s.holds()


@pytest.mark.parametrize("name,n", [("A2", 31), ("Z2", 25), ("Z4", 9), ("Z8", 81)])
def test_sandwich_holds(name, n):
    for beta in (1.0, 0.25):
        s = bound_sandwich(design(name, n), beta)
        assert s.holds()
        assert s.lower <= s.mid <= s.upper


# -- edge histogram -------------------------------------------------------------


def test_edge_histogram_a2_31(lab31):
    h = edge_histogram(lab31)
    assert h["B"] == {0: 1, 1: 6, 3: 6, 4: 6, 7: 12}
    assert h["K"] == 7
    assert h["B_eq_A_below_K"] and h["B_le_A_at_K"]


def test_edge_histogram_n1():
    h = edge_histogram(design("Z2", 1))
    assert h["B"] == {0: 1}


def test_edge_histogram_z2_25():
    h = edge_histogram(design("Z2", 25))
    shells = get_lattice("Z2").shells(h["K"]).A
    for i in range(h["K"]):
        assert h["B"].get(i, 0) == shells[i]
    assert h["B"][h["K"]] <= shells[h["K"]]


# -- asymptotics -----------------------------------------------------------------


def test_admissible_asymptotic_indices(z1, a2):
    assert admissible_asymptotic_indices(z1, 15) == [3, 5, 7, 9, 11, 13, 15]
    ns = admissible_asymptotic_indices(a2, 100)
    assert 31 in ns and 7 in ns and 21 not in ns


def test_asymptotic_z1_limit(z1):
    rows = asymptotic_limit_check(z1, [3, 99, 9999], 0.5)
    ratios = [r["ratio"] for r in rows]
    target = 1.0 / 12.0
    assert abs(ratios[-1] - target) < 0.10 * target
    assert abs(ratios[-1] - target) < abs(ratios[0] - target)
    # Exact finite-size law  m(m+1)(2m+1)/(3 N^3)  for the integer lattice.
    for row in rows:
        m = (row["N"] - 1) // 2
        assert row["ratio"] == pytest.approx(m * (m + 1) * (2 * m + 1) / (3 * row["N"] ** 3), rel=1e-12)


def test_asymptotic_a2_limit(a2):
    ns = admissible_asymptotic_indices(a2, 1000)
    rows = asymptotic_limit_check(a2, [ns[0], ns[-1]], 0.5)
    target = sphere_second_moment(2)
    assert abs(rows[-1]["ratio"] - target) < 0.10 * target
    assert abs(rows[-1]["ratio"] - target) < abs(rows[0]["ratio"] - target)


def test_asymptotic_d0_identity(a2):
    for row in asymptotic_limit_check(a2, [31, 151], 0.3):
        assert row["d0_normalized"] == pytest.approx(a2.second_moment(), rel=1e-12)


def test_asymptotic_ratio_independent_of_a_and_h(z1):
    r1 = asymptotic_limit_check(z1, [99], 0.3, 0.0)[0]["ratio"]
    r2 = asymptotic_limit_check(z1, [99], 0.7, 2.5)[0]["ratio"]
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_asymptotic_rejects_bad_indices(a2, z1):
    with pytest.raises(InadmissibleIndex):
        asymptotic_limit_check(a2, [21], 0.5)  # does not fill shells
    with pytest.raises(NoRepresentation):
        asymptotic_limit_check(get_lattice("Z2"), [21], 0.5)  # not a sum of two squares
    with pytest.raises(InadmissibleIndex):
        asymptotic_limit_check(z1, [1], 0.5)  # too small for the rate map
    with pytest.raises(ValueError):
        asymptotic_limit_check(z1, [9], 1.5)


# -- figures ---------------------------------------------------------------------


def test_fig1_table():
    header, rows = figure_data("fig1")
    assert header[0] == "L"
    byname = {r[1]: r for r in rows}
    assert set(byname) == {"Z1", "Z2", "A2", "Z4", "Z8"}
    assert byname["Z1"][3] == 1.0 and byname["Z1"][5] == 1.0
    assert byname["A2"][2] == pytest.approx(0.0801875, abs=1e-6)
    # Monotone gain with dimension for the side-distortion ratio.
    assert byname["Z8"][5] < byname["Z2"][5] < 1.0


def test_fig9_constant_rate_and_hexagonal_gain():
    header, rows = figure_data(
        "fig9", a2_indices=[7, 13, 31, 49], z_indices=[3, 5, 7], nv_product=1.0
    )
    a2_rows = [r for r in rows if r[0] == "A2"]
    z_rows = [r for r in rows if r[0] == "Z"]
    lat_a2 = get_lattice("A2")
    for r in a2_rows:
        n, beta = r[2], r[3]
        assert n * beta**2 * lat_a2.fundamental_volume == pytest.approx(1.0, rel=1e-12)
        assert r[4] == pytest.approx(0.0, abs=1e-9)  # constant rate R = 0
    for r in z_rows:
        n, beta = r[2], r[3]
        assert (n * beta) ** 2 == pytest.approx(1.0, rel=1e-12)  # reported N * nu
    # At matched reported index the hexagonal design does at least as well.
    a2_by_n = {r[1]: r for r in a2_rows}
    z_by_n = {r[1]: r for r in z_rows}
    for n in set(a2_by_n) & set(z_by_n):
        assert a2_by_n[n][6] <= z_by_n[n][6] + 1e-12  # ds
        assert a2_by_n[n][5] <= z_by_n[n][5] + 1e-12  # d0


def test_fig10_table():
    header, rows = figure_data(
        "fig10", sweeps={"Z1": [3, 5], "Z2": [5], "Z4": [9], "Z8": [81]}
    )
    assert {r[0] for r in rows} == {"Z1", "Z2", "Z4", "Z8"}
    for r in rows:
        assert r[4] > 0  # excess positive for N > 1


def test_fig10_empty_sweep():
    header, rows = figure_data("fig10", sweeps={})
    assert rows == [] and header[0] == "lattice"


def test_figure_unknown_kind():
    with pytest.raises(ValueError):
        figure_data("fig2")


# -- design report ----------------------------------------------------------------


def test_design_report(lab31):
    rep = design_report(lab31, beta=1.0, h_bits=0.0)
    doc = rep.to_dict()
    assert doc["schema"] == 1
    assert doc["index"] == 31
    assert rep.lower <= rep.ds_analytic <= rep.upper
    assert rep.ds_analytic == pytest.approx(rep.d0_analytic + rep.excess, abs=1e-12)
    assert rep.r0 - rep.r == pytest.approx(math.log2(31) / 2, abs=1e-12)


def test_admissible_design_indices_small():
    # 9 = 3^2 + 0^2 gives the (rotated) 3Z^2 sublattice, a valid tie-free design.
    assert admissible_design_indices("Z2", 15, n_min=5) == [5, 9, 13]
