"""Geometrically similar sublattices and coset arithmetic.

A similar sublattice of index N is generated (in parent-lattice coordinates)
by an integer matrix Gt whose columns span a scaled-rotated copy of the
parent.  The working certificate is

    Gt^T * Gram * Gt == c^2 * Gram      (exactly, in integers)

with c^2 = N^(2/L); this is the coordinate-frame version of "Gt/c is
orthogonal".  The index N equals |det Gt| and is recovered from the
certificate as c^L, so no floating point enters the construction.

Families (parameters follow the generator constructions for each lattice):

* Z1: params (n,), n odd; Gt = [[n]].
* Z2: params (a, b) with N = a^2 + b^2 odd; Gt = [[a, -b], [b, a]].
* A2: params (a, b) with N = a^2 - a*b + b^2; the sublattice is generated by
  u = a + b*w and w*u in the hexagonal basis {1, w}.
* Z4: params (a, b, c, d); s = a^2+b^2+c^2+d^2 must be odd, Gt is the
  quaternionic matrix of s, and N = s^2 (an odd perfect square).
* Z8: params (a, b, c, d); columns of Gt are the orbit of
  v = (a,0,b,0,c,0,d,0) under the order-16 matrix group, N = s^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InadmissibleIndex, NoRepresentation, NotSimilar
from .lattices import Lattice, get_lattice


def _imatvec(m, v):
    """Exact integer matrix-vector product (python ints, no overflow)."""
    return tuple(sum(int(m[i][j]) * int(v[j]) for j in range(len(v))) for i in range(len(m)))


def _imatmul(a, b):
    n = len(a)
    return [[sum(int(a[i][k]) * int(b[k][j]) for k in range(n)) for j in range(n)] for i in range(n)]


def z8_gamma_matrices():
    """Generators gamma_1 (order 8) and gamma_8 of the Z^8 symmetry group."""
    c = np.zeros((4, 4), dtype=np.int64)
    c[0, 1] = c[1, 2] = c[2, 3] = 1
    c[3, 0] = -1
    g1 = np.zeros((8, 8), dtype=np.int64)
    g1[:4, :4] = c
    g1[4:, 4:] = c
    g8 = np.zeros((8, 8), dtype=np.int64)
    g8[0, 4] = 1
    g8[1, 7] = -1
    g8[2, 6] = -1
    g8[3, 5] = -1
    g8[4, 0] = -1
    g8[5, 3] = 1
    g8[6, 2] = 1
    g8[7, 1] = 1
    return g1, g8


def _gtilde(lat: Lattice, params) -> np.ndarray:
    name = lat.name
    if name == "Z1":
        (n,) = params
        return np.array([[n]], dtype=np.int64)
    if name == "Z2":
        a, b = params
        return np.array([[a, -b], [b, a]], dtype=np.int64)
    if name == "A2":
        # Multiplication by u = a + b*w in the basis {1, w}, w^2 = -1 - w.
        a, b = params
        return np.array([[a, -b], [b, a - b]], dtype=np.int64)
    if name == "Z4":
        a, b, c, d = params
        return np.array(
            [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]], dtype=np.int64
        )
    if name == "Z8":
        a, b, c, d = params
        v = np.array([a, 0, b, 0, c, 0, d, 0], dtype=np.int64)
        g1, g8 = z8_gamma_matrices()
        cols = []
        m = np.eye(8, dtype=np.int64)
        for _ in range(4):
            cols.append(m @ v)
            m = g1 @ m
        m = g8.copy()
        for _ in range(4):
            cols.append(m @ v)
            m = m @ g1
        return np.stack(cols, axis=1)
    raise ValueError(f"unsupported lattice {name}")


def _check_params(lat: Lattice, params):
    name = lat.name
    if name == "Z1":
        if len(params) != 1:
            raise InadmissibleIndex("Z1 takes a single parameter n")
        if params[0] < 1 or params[0] % 2 == 0:
            raise InadmissibleIndex(f"Z1 index must be odd and positive, got {params[0]}")
    elif name in ("Z2", "A2"):
        if len(params) != 2:
            raise InadmissibleIndex(f"{name} takes parameters (a, b)")
        if name == "Z2":
            n = params[0] ** 2 + params[1] ** 2
            if n % 2 == 0:
                raise InadmissibleIndex(f"Z2 index must be odd, got {n}")
        if params[0] ** 2 - (params[0] * params[1] if name == "A2" else 0) + params[1] ** 2 < 1:
            raise InadmissibleIndex("index must be positive")
    elif name in ("Z4", "Z8"):
        if len(params) != 4:
            raise InadmissibleIndex(f"{name} takes parameters (a, b, c, d)")
        s = sum(p * p for p in params)
        if s < 1:
            raise InadmissibleIndex("index must be positive")
        if name == "Z4" and s % 2 == 0:
            raise InadmissibleIndex(f"Z4 requires an odd perfect-square index, got {s**2}")


@dataclass(frozen=True)
class SimilarSublattice:
    """A geometrically similar sublattice Gt * Z^L of the parent lattice."""

    lattice: Lattice
    params: tuple
    gtilde: np.ndarray
    index: int  # N, the number of cosets
    scale_sq: int  # c^2 = N^(2/L)

    def __repr__(self) -> str:
        return f"SimilarSublattice({self.lattice.name}, N={self.index}, params={self.params})"

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @cached_property
    def adjugate(self):
        """Integer matrix A with A @ Gt == N * I (exact inverse up to N)."""
        L = self.dim
        g = self.gtilde
        if L == 1:
            adj = [[1]]
        elif L == 2:
            adj = [[int(g[1, 1]), -int(g[0, 1])], [-int(g[1, 0]), int(g[0, 0])]]
        else:
            # Certificate gives Gt^-1 = Gt^T / c^2 for the cubic families.
            factor = self.index // self.scale_sq  # c^(L-2), an integer
            adj = [[factor * int(g[j, i]) for j in range(L)] for i in range(L)]
        prod = _imatmul(adj, g.tolist())
        if all(prod[i][i] == self.index for i in range(L)) and all(
            prod[i][j] == 0 for i in range(L) for j in range(L) if i != j
        ):
            return tuple(tuple(row) for row in adj)
        adj = [[-x for x in row] for row in adj]
        return tuple(tuple(row) for row in adj)

    # -- membership and coordinates ------------------------------------------

    def contains(self, v) -> bool:
        w = _imatvec(self.adjugate, v)
        return all(x % self.index == 0 for x in w)

    def from_sub_coords(self, u):
        return _imatvec(self.gtilde.tolist(), u)

    def to_sub_coords(self, v):
        w = _imatvec(self.adjugate, v)
        if any(x % self.index for x in w):
            raise ValueError(f"{v} is not a sublattice point")
        return tuple(x // self.index for x in w)

    def coset_key(self, v):
        """Complete invariant of the coset of v (tuple of residues mod N)."""
        return tuple(x % self.index for x in _imatvec(self.adjugate, v))

    # -- nearest sublattice point ---------------------------------------------

    def nearest2(self, t2):
        """Nearest sublattice point to the half-integer target t2/2.

        ``t2`` is a doubled parent-coordinate vector (integers), so the true
        target may sit on cell boundaries; all comparisons are exact and ties
        go to the candidate with lexicographically smallest parent coords.
        """
        L = self.dim
        n = self.index
        num = _imatvec(self.adjugate, t2)  # sub-coords * 2N
        den = 2 * n
        if self.lattice.name == "A2":
            f = tuple(x // den for x in num)
            cands = [(f[0] + i, f[1] + j) for i in (0, 1) for j in (0, 1)]
        else:
            base = []
            tied = []
            for i, x in enumerate(num):
                q, r = divmod(x, den)
                if 2 * r > den:
                    base.append(q + 1)
                elif 2 * r < den:
                    base.append(q)
                else:
                    base.append(q)
                    tied.append(i)
            if not tied:
                return self.from_sub_coords(base)
            cands = []
            for mask in range(1 << len(tied)):
                u = list(base)
                for b, i in enumerate(tied):
                    if mask >> b & 1:
                        u[i] += 1
                cands.append(tuple(u))
        best = None
        lat = self.lattice
        for u in cands:
            p = self.from_sub_coords(u)
            w = tuple(t2[i] - 2 * p[i] for i in range(L))
            key = (lat.qshell(w), p)
            if best is None or key < best:
                best = key
        return best[1]

    def coset_reduce(self, v):
        """Split v = v' + rep with v' the nearest sublattice point to v."""
        vp = self.nearest2(tuple(2 * x for x in v))
        rep = tuple(v[i] - vp[i] for i in range(self.dim))
        return vp, rep

    # -- discrete Voronoi set --------------------------------------------------

    @cached_property
    def voronoi_reps(self):
        """The N points of V0(0), lexicographically sorted.

        Every point of V0(0) lies within the covering radius of the
        sublattice, so an exact ball enumeration followed by the nearest-point
        filter is exhaustive.
        """
        lat = self.lattice
        bound = Fraction(self.scale_sq * lat.dim) * lat.covering_radius_sq()
        qmax = int(math.ceil(bound))
        pts = [p for p in lat.points_in_shell_ball(qmax) if self.nearest2(tuple(2 * x for x in p)) == (0,) * self.dim]
        if len(pts) != self.index:
            raise NotSimilar(
                f"discrete Voronoi set has {len(pts)} points, expected {self.index}"
            )
        return tuple(pts)

    def covering_radius_sq(self) -> Fraction:
        """Normalized squared covering radius of the sublattice (unit scale)."""
        return Fraction(self.scale_sq) * self.lattice.covering_radius_sq()


def build_sublattice(lat: Lattice, params) -> SimilarSublattice:
    """Construct and certify a similar sublattice from family parameters."""
    params = tuple(int(p) for p in params)
    _check_params(lat, params)
    gt = _gtilde(lat, params)
    L = lat.dim
    # Certify Gt^T Gram Gt == c^2 Gram in exact integers.
    gram2 = lat.gram2.tolist()
    m = _imatmul(_imatmul([[int(gt[j, i]) for j in range(L)] for i in range(L)], gram2), gt.tolist())
    c2, rem = divmod(m[0][0], gram2[0][0])
    if rem or c2 < 1:
        raise NotSimilar(f"certificate failed for params {params}")
    for i in range(L):
        for j in range(L):
            if m[i][j] != c2 * gram2[i][j]:
                raise NotSimilar(f"certificate failed for params {params}")
    n_sq = c2**L
    n = math.isqrt(n_sq)
    if n * n != n_sq:
        raise NotSimilar(f"scale {c2} does not yield an integer index in dimension {L}")
    return SimilarSublattice(lat, params, gt, n, c2)


def find_params(lat: Lattice, n: int):
    """Lexicographically smallest admissible parameters for index n.

    Nonnegative representations are preferred; the search box is the obvious
    coordinate bound for each quadratic form.
    """
    if n < 1:
        raise NoRepresentation(f"index must be positive, got {n}")
    name = lat.name
    if name == "Z1":
        if n % 2 == 0:
            raise NoRepresentation(f"Z1 index must be odd, got {n}")
        return (n,)
    if name == "Z2":
        if n % 2 == 0:
            raise NoRepresentation(f"Z2 index must be odd, got {n}")
        r = math.isqrt(n)
        cands = [(a, b) for a in range(r + 1) for b in range(r + 1) if a * a + b * b == n]
        if not cands:
            raise NoRepresentation(f"{n} is not a sum of two squares")
        return min(cands)
    if name == "A2":
        r = math.isqrt(4 * n // 3) + 1
        nonneg = [
            (a, b) for a in range(r + 1) for b in range(r + 1) if a * a - a * b + b * b == n
        ]
        if nonneg:
            return min(nonneg)
        cands = [
            (a, b)
            for a in range(-r, r + 1)
            for b in range(-r, r + 1)
            if a * a - a * b + b * b == n
        ]
        if not cands:
            raise NoRepresentation(f"{n} is not of the form a^2 - a*b + b^2")
        return min(cands)
    if name == "Z4":
        s = math.isqrt(n)
        if s * s != n or s % 2 == 0:
            raise NoRepresentation(f"Z4 index must be an odd perfect square, got {n}")
        return _four_squares(s)
    if name == "Z8":
        s = math.isqrt(math.isqrt(n))
        if s**4 != n:
            raise NoRepresentation(f"Z8 index must be a fourth power, got {n}")
        return _four_squares(s)
    raise NoRepresentation(f"unsupported lattice {name}")


def _four_squares(s: int):
    r = math.isqrt(s)
    for a in range(r + 1):
        for b in range(r + 1):
            for c in range(r + 1):
                rest = s - a * a - b * b - c * c
                if rest < 0:
                    break
                d = math.isqrt(rest)
                if d * d == rest:
                    return (a, b, c, d)
    raise NoRepresentation(f"no four-square representation of {s}")


def design_sublattice(lat_name: str, index: int | None = None, params=None) -> SimilarSublattice:
    """Convenience entry point: build from explicit params or search by index."""
    lat = get_lattice(lat_name)
    if params is None:
        if index is None:
            raise ValueError("either index or params is required")
        params = find_params(lat, index)
    sub = build_sublattice(lat, params)
    if index is not None and sub.index != index:
        raise InadmissibleIndex(
            f"params {tuple(params)} give index {sub.index}, requested {index}"
        )
    return sub
