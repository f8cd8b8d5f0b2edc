"""Analytic rate/distortion evaluation, distortion bounds, and the
high-rate asymptotics sweeps.

The side-distortion sandwich is checked in exact rational arithmetic: with
d0 subtracted and beta^2 factored out, all three bound terms are rationals,
so the inequalities hold exactly or not at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InadmissibleIndex, MdlqError
from .labeling import Labeling, build_labeling
from .lattices import Lattice, fills_shells, get_lattice, sphere_second_moment
from .sublattices import design_sublattice, find_params


def analytic_rates(lat: Lattice, n: int, beta: float, h_bits: float):
    """(R0, R): the single-channel rate and the per-channel rate."""
    l = lat.dim
    r0 = h_bits - math.log2(beta**l * lat.fundamental_volume) / l
    return r0, r0 - math.log2(n) / l


@dataclass
class BoundSandwich:
    lower: float
    mid: float
    upper: float
    # beta^2 coefficients of the three terms above d0, exact.
    lower_term: Fraction
    mid_term: Fraction
    upper_term: Fraction

    def holds(self) -> bool:
        return self.lower_term <= self.mid_term <= self.upper_term


def bound_sandwich(labeling: Labeling, beta: float = 1.0) -> BoundSandwich:
    """Lower/middle/upper side-distortion values for a scaled design.

    lower = d0 + (1/4N) sum l^2(e) * beta^2, mid inserts the exact excess,
    upper adds (2 R(Lambda'))^2 with R the sublattice covering radius.
    """
    n = labeling.index
    lengths = labeling.edge_lengths_sq()
    sum_l2 = sum(lengths, Fraction(0))
    lower_term = sum_l2 / (4 * n)
    mid_term = labeling.excess_sum() / n
    # The covering-radius slack only enters through positive-length edges;
    # the N=1 design (zero edge only) has no side penalty at all.
    rstar_sq = 4 * labeling.sub.covering_radius_sq() if any(lengths) else Fraction(0)
    upper_term = lower_term + rstar_sq
    lat = labeling.lattice
    d0 = lat.second_moment() * (beta**lat.dim * lat.fundamental_volume) ** (2.0 / lat.dim)
    b2 = beta * beta
    return BoundSandwich(
        d0 + b2 * float(lower_term),
        d0 + b2 * float(mid_term),
        d0 + b2 * float(upper_term),
        lower_term,
        mid_term,
        upper_term,
    )


def edge_histogram(labeling: Labeling):
    """Histogram B_i of edge shell indices, with the theta-series checks.

    Each squared edge length is i * N^(2/L) / L for an integer shell index i;
    the construction promises B_i = A_i below the last shell and B_K <= A_K.
    """
    lat = labeling.lattice
    n = labeling.index
    hist: dict[int, int] = {}
    for l2 in labeling.edge_lengths_sq():
        i = l2 * lat.dim / labeling.sub.scale_sq
        if i.denominator != 1:
            raise MdlqError(f"edge length {l2} is not on the shell grid")
        hist[int(i)] = hist.get(int(i), 0) + 1
    kmax = max(hist)
    shells = lat.shells(kmax).A
    full_match = all(hist.get(i, 0) == shells[i] for i in range(kmax))
    last_ok = hist.get(kmax, 0) <= shells[kmax]
    return {"B": hist, "K": kmax, "B_eq_A_below_K": full_match, "B_le_A_at_K": last_ok, "N": n}


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------


def _shell_weight_sum(lat: Lattice, k: int) -> int:
    """Exact sum of i * A_i for i <= k (= sum of squared norms over a ball)."""
    if lat.dim == 1:
        m = math.isqrt(k)
        return m * (m + 1) * (2 * m + 1) // 3  # 2 * sum x^2
    shells = lat.shells(k).A
    return sum(i * ai for i, ai in enumerate(shells))


def _representable_set(lat: Lattice, n_max: int):
    """All indices <= n_max admitting a similar sublattice (one-pass sieve)."""
    name = lat.name
    if name == "Z1":
        return set(range(1, n_max + 1, 2))
    if name == "Z2":
        r = math.isqrt(n_max)
        vals = {
            a * a + b * b
            for a in range(r + 1)
            for b in range(r + 1)
            if 0 < a * a + b * b <= n_max and (a * a + b * b) % 2
        }
        return vals
    if name == "A2":
        r = math.isqrt(4 * n_max // 3) + 1
        vals = set()
        for a in range(-r, r + 1):
            for b in range(r + 1):
                v = a * a - a * b + b * b
                if 0 < v <= n_max:
                    vals.add(v)
        return vals
    if name == "Z4":
        return {s * s for s in range(1, math.isqrt(n_max) + 1, 2)}
    if name == "Z8":
        return {s**4 for s in range(1, int(n_max**0.25) + 2) if s**4 <= n_max}
    raise ValueError(name)


def admissible_asymptotic_indices(lat: Lattice, n_max: int):
    """Indices N <= n_max that are representable and fill shells exactly."""
    if lat.dim == 1:
        return list(range(3, n_max + 1, 2))
    max_norm = 64
    shells = lat.shells(max_norm)
    while shells.S(len(shells.A) - 1) < n_max:
        max_norm *= 2
        shells = lat.shells(max_norm)
    s_values = set()
    acc = 0
    for a in shells.A:
        acc += a
        if acc > n_max:
            break
        s_values.add(acc)
    rep = _representable_set(lat, n_max)
    return sorted(n for n in s_values & rep if n >= 3)


def asymptotic_limit_check(lat: Lattice, n_sequence, a: float, h_bits: float = 0.0):
    """Normalized side-distortion table along an index sweep.

    For each N: the rate solves N = 2^(L(aR+1)), the scale follows from the
    rate-targeted formula, d~ = (1/4N) sum l^2 beta^2 uses the exact shell
    sums, and the reported ratio d~ * 2^(2R(1-a)) / 2^(2h) tends to the
    sphere second moment G(S_L).
    """
    if not 0 < a < 1:
        raise ValueError("exponent a must lie in (0, 1)")
    l = lat.dim
    rows = []
    for n in n_sequence:
        find_params(lat, n)  # representability; raises otherwise
        k = fills_shells(lat, n)
        if k is None:
            raise InadmissibleIndex(f"N={n} does not fill shells exactly")
        if math.log2(n) / l <= 1.0:
            raise InadmissibleIndex(f"N={n} too small for the rate map N=2^(L(aR+1))")
        sum_i_ai = _shell_weight_sum(lat, k)
        rate = (math.log2(n) / l - 1.0) / a
        beta = 2.0 ** (h_bits - rate * (1.0 + a) - 1.0) / lat.fundamental_volume ** (1.0 / l)
        sum_l2 = sum_i_ai * n ** (2.0 / l) / l
        d_tilde = beta * beta * sum_l2 / (4.0 * n)
        ratio = d_tilde * 2.0 ** (2.0 * rate * (1.0 - a)) / 2.0 ** (2.0 * h_bits)
        d0 = lat.second_moment() * (beta**l * lat.fundamental_volume) ** (2.0 / l)
        d0_norm = d0 * 2.0 ** (2.0 * rate * (1.0 + a)) * 4.0 / 2.0 ** (2.0 * h_bits)
        rows.append(
            {
                "N": n,
                "K": k,
                "R": rate,
                "beta": beta,
                "d_tilde": d_tilde,
                "ratio": ratio,
                "sphere_G": sphere_second_moment(l),
                "d0_normalized": d0_norm,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# design sweeps and figure tables
# ---------------------------------------------------------------------------


def admissible_design_indices(lat_name: str, n_max: int, n_min: int = 3):
    """Indices for which a full labeling design builds and verifies."""
    lat = get_lattice(lat_name)
    out = []
    for n in range(n_min, n_max + 1):
        try:
            find_params(lat, n)
        except MdlqError:
            continue
        try:
            build_design(lat_name, n)
        except MdlqError:
            continue
        out.append(n)
    return out


_design_cache: dict = {}


def build_design(lat_name: str, n: int, params=None) -> Labeling:
    key = (lat_name, n, tuple(params) if params else None)
    if key not in _design_cache:
        sub = design_sublattice(lat_name, index=n, params=params)
        _design_cache[key] = build_labeling(sub)
    return _design_cache[key]


def figure_data(kind: str, **kwargs):
    """Data tables behind the summary figures; returns (header, rows).

    * ``fig1``: two-channel and side distortion ratios by dimension.
    * ``fig9``: (d0, ds) trade-off for the hexagonal lattice vs Z at a
      constant product N * nu (constant rate); the Z curve reports the
      squared index, as the comparison convention requires.
    * ``fig10``: labeling excess vs per-dimension index for Z^1..Z^8.
    """
    if kind == "fig1":
        header = ["L", "lattice", "G_lattice", "ratio_d0", "G_sphere", "ratio_ds"]
        g_z = get_lattice("Z1").second_moment()
        gs1 = sphere_second_moment(1)
        rows = []
        for name in ("Z1", "A2", "Z2", "Z4", "Z8"):
            lat = get_lattice(name)
            rows.append(
                [
                    lat.dim,
                    name,
                    lat.second_moment(),
                    lat.second_moment() / g_z,
                    sphere_second_moment(lat.dim),
                    sphere_second_moment(lat.dim) / gs1,
                ]
            )
        rows.sort(key=lambda r: (r[0], r[1]))
        return header, rows

    if kind == "fig9":
        header = ["curve", "N_reported", "N_actual", "beta", "R", "d0", "ds", "excess"]
        nv_product = float(kwargs.get("nv_product", 1.0))
        a2_ns = kwargs.get("a2_indices")
        if a2_ns is None:
            a2_ns = admissible_design_indices("A2", int(kwargs.get("n_max", 100)))
        z_ns = kwargs.get("z_indices")
        if z_ns is None:
            z_ns = [n for n in range(3, int(math.isqrt(int(kwargs.get("n_max", 100)))) + 1, 2)]
        rows = []
        for name, ns in (("A2", a2_ns), ("Z", z_ns)):
            lat = get_lattice("A2" if name == "A2" else "Z1")
            for n in ns:
                lab = build_design(lat.name, n)
                l = lat.dim
                # Constant N * nu(beta Lambda) along the curve = constant rate.
                target = nv_product if name == "A2" else math.sqrt(nv_product)
                beta = (target / (n * lat.fundamental_volume)) ** (1.0 / l)
                sand = bound_sandwich(lab, beta)
                if not sand.holds():
                    raise MdlqError(f"bound sandwich violated for {name} N={n}")
                _, rate = analytic_rates(lat, n, beta, 0.0)
                excess = beta * beta * float(lab.excess_sum()) / n
                d0 = sand.mid - excess
                rows.append(
                    [name, n * n if name == "Z" else n, n, beta, rate, d0, sand.mid, excess]
                )
        return header, rows

    if kind == "fig10":
        header = ["lattice", "L", "N", "N_per_dim", "excess", "lower", "upper"]
        sweeps = kwargs.get(
            "sweeps",
            {
                "Z1": list(range(3, 32, 2)),
                "Z2": [5, 13, 25, 41, 61],
                "Z4": [9, 25, 49],
                "Z8": [81],
            },
        )
        rows = []
        for name in sorted(sweeps):
            lat = get_lattice(name)
            for n in sweeps[name]:
                lab = build_design(name, n)
                sand = bound_sandwich(lab, 1.0)
                if not sand.holds():
                    raise MdlqError(f"bound sandwich violated for {name} N={n}")
                excess = float(lab.excess_sum()) / n
                rows.append(
                    [
                        name,
                        lat.dim,
                        n,
                        n ** (1.0 / lat.dim),
                        excess,
                        sand.lower - sand.mid + excess,
                        sand.upper - sand.mid + excess,
                    ]
                )
        return header, rows

    raise ValueError(f"unknown figure kind {kind!r}; expected fig1, fig9 or fig10")


@dataclass
class DesignReport:
    """Analytic summary of one (lattice, N, beta) design point."""

    lattice: str
    params: tuple
    index: int
    beta: float
    d0_analytic: float
    excess: float
    ds_analytic: float
    lower: float
    upper: float
    r0: float
    r: float
    edge_hist: dict

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "lattice": self.lattice,
            "params": list(self.params),
            "index": self.index,
            "beta": self.beta,
            "d0_analytic": self.d0_analytic,
            "excess": self.excess,
            "ds_analytic": self.ds_analytic,
            "lower": self.lower,
            "upper": self.upper,
            "R0": self.r0,
            "R": self.r,
            "edge_histogram": {str(k): v for k, v in sorted(self.edge_hist["B"].items())},
            "edge_hist_checks": {
                "B_eq_A_below_K": self.edge_hist["B_eq_A_below_K"],
                "B_le_A_at_K": self.edge_hist["B_le_A_at_K"],
            },
        }


def design_report(labeling: Labeling, beta: float = 1.0, h_bits: float = 0.0) -> DesignReport:
    sand = bound_sandwich(labeling, beta)
    if not sand.holds():
        raise MdlqError("bound sandwich violated")
    lat = labeling.lattice
    r0, r = analytic_rates(lat, labeling.index, beta, h_bits)
    excess = beta * beta * float(labeling.excess_sum()) / labeling.index
    return DesignReport(
        lattice=lat.name,
        params=tuple(labeling.sub.params),
        index=labeling.index,
        beta=beta,
        d0_analytic=sand.mid - excess,
        excess=excess,
        ds_analytic=sand.mid,
        lower=sand.lower,
        upper=sand.upper,
        r0=r0,
        r=r,
        edge_hist=edge_histogram(labeling),
    )
