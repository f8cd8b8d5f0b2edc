"""Exact integer-lattice geometry for Z, Z^2, Z^4, Z^8 and the hexagonal lattice.

Conventions used throughout the package:

* Points are integer coordinate vectors (tuples) in the lattice basis; the
  basis vectors are the *columns* of the generator matrix.
* All inner products and norms are dimension-normalized,
  ``<x,y> = (1/L) sum x_i y_i``.  To stay in exact integer arithmetic we work
  with the *unnormalized* squared length ``L*||u||^2``, which is an integer
  for every supported lattice (for the hexagonal lattice it is the binary
  quadratic form ``x^2 + y^2 - x*y``).
* Ties in nearest-point searches are broken toward the candidate whose
  integer coordinate vector is lexicographically smallest.  Lexicographic
  order is translation invariant, which makes the tie rule shift-equivariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import ResourceLimit

LATTICE_NAMES = ("Z1", "Z2", "Z4", "Z8", "A2")

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Lattice:
    """One of the five supported lattices at unit scale (minimal length 1)."""

    name: str
    dim: int
    # Columns are basis vectors.  Only used for embeddings; all combinatorial
    # work happens on integer coordinates.
    basis: np.ndarray
    # 2x the unnormalized Gram matrix, an exact integer matrix.
    gram2: np.ndarray
    fundamental_volume: float

    def __repr__(self) -> str:
        return f"Lattice({self.name})"

    # -- exact arithmetic on coordinate vectors -----------------------------

    def qshell(self, u) -> int:
        """Unnormalized squared length L*||u||^2 (an integer)."""
        g = self.gram2
        total = 0
        for i, ui in enumerate(u):
            if ui:
                row = g[i]
                total += ui * sum(int(row[j]) * u[j] for j in range(self.dim))
        assert total % 2 == 0
        return total // 2

    def inner2(self, u, v) -> int:
        """2x the unnormalized inner product of coordinate vectors (integer)."""
        g = self.gram2
        return sum(int(g[i][j]) * u[i] * v[j] for i in range(self.dim) for j in range(self.dim))

    def norm_sq(self, u) -> Fraction:
        """Normalized squared length ||u||^2 as an exact rational."""
        return Fraction(self.qshell(u), self.dim)

    def embed(self, u) -> np.ndarray:
        """Map lattice coordinates to a point of R^L."""
        return self.basis @ np.asarray(u, dtype=float)

    # -- nearest point -------------------------------------------------------

    def nearest_point(self, x) -> tuple:
        """Closest lattice point to the real vector ``x`` (embedded coords).

        Ties are broken toward the lexicographically smallest coordinate
        vector.  Exact for inputs whose lattice-frame coordinates are
        representable in floating point (e.g. midpoints of lattice points).
        """
        x = [float(c) for c in x]
        if self.name == "A2":
            y1 = x[0] + x[1] / _SQRT3
            y2 = 2.0 * x[1] / _SQRT3
            t = (y1, y2)
        else:
            t = x
        return self.nearest_point_frame(t)

    def nearest_point_frame(self, t) -> tuple:
        """Closest lattice point to ``t`` given in lattice-frame coordinates.

        Accepts floats or exact rationals; arithmetic stays exact for exact
        inputs so the tie rule is reliable on cell boundaries.
        """
        if self.name == "A2":
            f1, f2 = math.floor(t[0]), math.floor(t[1])
            cands = [(f1 + i, f2 + j) for i in (-1, 0, 1) for j in (-1, 0, 1)]
            best = None
            for u in cands:
                d1, d2 = u[0] - t[0], u[1] - t[1]
                dist = d1 * d1 + d2 * d2 - d1 * d2
                key = (dist, u)
                if best is None or key < best:
                    best = key
            return best[1]
        # Cubic lattices: separable, so per-coordinate rounding with
        # round-half-down realizes the lexicographic tie rule.
        out = []
        for c in t:
            fl = math.floor(c)
            fr = c - fl
            out.append(fl + 1 if 2 * fr > 1 else fl)
        return tuple(out)

    # -- theta shells ---------------------------------------------------------

    def shells(self, max_norm: int, cap: int = 20_000_000) -> "ThetaShells":
        """Exact shell counts A[i] = #{u : L*||u||^2 = i} for i <= max_norm."""
        if max_norm < 0:
            raise ValueError("max_norm must be >= 0")
        if self.name == "A2":
            # x^2 + y^2 - x*y >= (x^2 + y^2)/2, so |x|,|y| <= sqrt(2*max_norm)
            b = math.isqrt(2 * max_norm) + 1
            if (2 * b + 1) ** 2 > cap:
                raise ResourceLimit(f"shell enumeration over {(2*b+1)**2} points exceeds cap")
            counts = np.zeros(max_norm + 1, dtype=np.int64)
            xs = np.arange(-b, b + 1)
            gx, gy = np.meshgrid(xs, xs, indexing="ij")
            q = gx * gx + gy * gy - gx * gy
            sel = q <= max_norm
            np.add.at(counts, q[sel], 1)
        else:
            # Separable exact count: the L-fold coordinate enumeration
            # factorizes into an L-fold convolution of the 1-D counts.
            work = (self.dim - 1) * (max_norm + 1) ** 2 + max_norm + 1
            if work > cap:
                raise ResourceLimit("shell enumeration exceeds cap")
            base = np.zeros(max_norm + 1, dtype=np.int64)
            base[0] = 1
            for x in range(1, math.isqrt(max_norm) + 1):
                base[x * x] = 2
            counts = base
            for _ in range(self.dim - 1):
                counts = np.convolve(counts, base)[: max_norm + 1]
        return ThetaShells(tuple(int(c) for c in counts))

    def points_in_shell_ball(self, max_norm: int):
        """All coordinate vectors with L*||u||^2 <= max_norm, lex sorted."""
        pts = []
        if self.name == "A2":
            b = math.isqrt(2 * max_norm) + 1
            for x in range(-b, b + 1):
                for y in range(-b, b + 1):
                    if x * x + y * y - x * y <= max_norm:
                        pts.append((x, y))
        else:
            b = math.isqrt(max_norm)
            for u in product(range(-b, b + 1), repeat=self.dim):
                if sum(c * c for c in u) <= max_norm:
                    pts.append(u)
        pts.sort()
        return pts

    # -- second moments & radii ----------------------------------------------

    def second_moment(self) -> float:
        """Dimension-normalized second moment G of the Voronoi cell."""
        if self.name == "A2":
            return 5.0 / (36.0 * _SQRT3)
        return 1.0 / 12.0

    def covering_radius_sq(self) -> Fraction:
        """Squared covering radius in the normalized norm, exact."""
        if self.name == "A2":
            return Fraction(1, 6)
        return Fraction(1, 4)


@dataclass(frozen=True)
class ThetaShells:
    """Shell counts of a lattice; A[i] counts points at unnormalized norm i."""

    A: tuple

    def S(self, m: int) -> int:
        """Number of points in the first m shells (cumulative count)."""
        return sum(self.A[: m + 1])

    def __len__(self) -> int:
        return len(self.A)


def get_lattice(name: str) -> Lattice:
    """Look up a supported lattice by its canonical name."""
    key = name.upper() if name.lower() != "a2" else "A2"
    if key not in LATTICE_NAMES:
        raise ValueError(f"unknown lattice {name!r}; expected one of {LATTICE_NAMES}")
    if key == "A2":
        basis = np.array([[1.0, -0.5], [0.0, _SQRT3 / 2.0]])
        gram2 = np.array([[2, -1], [-1, 2]], dtype=np.int64)
        return Lattice("A2", 2, basis, gram2, _SQRT3 / 2.0)
    dim = int(key[1])
    return Lattice(key, dim, np.eye(dim), 2 * np.eye(dim, dtype=np.int64), 1.0)


def sphere_second_moment(dim: int) -> float:
    """Normalized second moment of an L-dimensional ball.

    Evaluates Gamma(L/2+1)^(2/L) / ((L+2)*pi); tends to 1/(2*pi*e) as the
    dimension grows.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp((2.0 / dim) * math.lgamma(dim / 2.0 + 1.0)) / ((dim + 2) * math.pi)


def fills_shells(lat: Lattice, n: int):
    """Return K if n equals the number of lattice points in the first K shells.

    Returns None when no such K exists; designs used in the asymptotic sweeps
    are restricted to indices with this property.
    """
    if n < 1:
        return None
    if lat.dim == 1:
        # S(m) = 2*floor(sqrt(m)) + 1: every odd n fills shells at K = m^2.
        if n % 2 == 0:
            return None
        return ((n - 1) // 2) ** 2
    # S(m) grows ~ ball volume; scan shells until the cumulative count passes n.
    max_norm = 8
    while True:
        sh = lat.shells(max_norm)
        total = 0
        for i, a in enumerate(sh.A):
            total += a
            if total == n and (i == len(sh.A) - 1 or True):
                return i
            if total > n:
                return None
        max_norm *= 2
