"""Exact lattice accuracy test for linear congruential generators.

Overlapping d-tuples of a full-period LCG fall on a shifted integer
lattice; the figure of merit nu_d is the length of the shortest nonzero
vector of the dual lattice

    { u in Z^d : u[0] + u[1]*a + ... + u[d-1]*a**(d-1) == 0 (mod m) }

which equals 1 over the widest spacing of the parallel hyperplane
families covering all tuples.  The basis used here is the classical
row set (m, 0, ..., 0), (-a, 1, 0, ...), (-a^2, 0, 1, ...), ... with
determinant +-m.

Everything is exact: the shortest vector is found by Lagrange reduction
for d = 2 and by LLL reduction (rational arithmetic) followed by a
bounded integer enumeration for d >= 3, and squared lengths are kept as
Python integers.  The acceptance rule nu_d >= 2**(30/d) for d = 2..6 is
evaluated in squared form, where both sides are exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .generators import LcgParams

__all__ = [
    "dual_lattice_basis",
    "shortest_vector",
    "spectral_accuracy",
    "spectral_accuracy_sq",
    "spectral_accept",
    "acceptance_threshold",
    "acceptance_threshold_sq",
    "SpectralReport",
    "PointCloud",
    "point_cloud",
    "plane_membership",
    "export_cloud_csv",
    "export_cloud_svg",
]

ACCEPT_DIMS = (2, 3, 4, 5, 6)
MAX_DIM = 8
CLOUD_POINT_CAP = 2**20


# ---------------------------------------------------------------------------
# basis and exact shortest vector

def dual_lattice_basis(params: LcgParams, d: int) -> list[list[int]]:
    """Rows generating the dual lattice of overlapping d-tuples."""
    if not 2 <= d <= MAX_DIM:
        raise ValueError(f"dimension must lie in [2, {MAX_DIM}]")
    m, a = params.modulus, params.multiplier
    rows = [[m] + [0] * (d - 1)]
    power = 1
    for i in range(1, d):
        power = (power * a) % m
        row = [0] * d
        row[0] = -power
        row[i] = 1
        rows.append(row)
    return rows


def _norm_sq(v) -> int:
    return sum(int(x) * int(x) for x in v)


def _dot(u, v) -> int:
    return sum(int(x) * int(y) for x, y in zip(u, v))


def _round_ratio(p: int, q: int) -> int:
    """Nearest integer to p/q for positive q, exact in integers."""
    if q < 0:
        p, q = -p, -q
    return (2 * p + q) // (2 * q)


def _lagrange_shortest(b1, b2) -> list[int]:
    """Exact shortest vector of a rank-2 lattice (Lagrange/Gauss reduction)."""
    u, v = list(b1), list(b2)
    if _norm_sq(v) < _norm_sq(u):
        u, v = v, u
    while True:
        # now |u| <= |v|; shorten v against u
        q = _round_ratio(_dot(u, v), _norm_sq(u))
        v = [x - q * y for x, y in zip(v, u)]
        if _norm_sq(v) >= _norm_sq(u):
            return u
        u, v = v, u


def _gso(basis):
    """Gram-Schmidt data (mu, squared norms) in exact rationals."""
    n = len(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar_sq = [Fraction(0)] * n
    bstar = [[Fraction(x) for x in row] for row in basis]
    for i in range(n):
        for j in range(i):
            if bstar_sq[j] == 0:
                raise ValueError("basis is singular")
            mu[i][j] = Fraction(
                sum(Fraction(basis[i][t]) * bstar[j][t] for t in range(len(basis[i])))
            ) / bstar_sq[j]
            for t in range(len(bstar[i])):
                bstar[i][t] -= mu[i][j] * bstar[j][t]
        bstar_sq[i] = sum(x * x for x in bstar[i])
    return mu, bstar_sq


_LLL_DELTA = Fraction(99, 100)


def _lll_reduce(basis):
    """LLL reduction with exact rational Gram-Schmidt (fine for d <= 8)."""
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    mu, bstar_sq = _gso(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q != 0:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, bstar_sq = _gso(b)
        if bstar_sq[k] >= (_LLL_DELTA - mu[k][k - 1] ** 2) * bstar_sq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bstar_sq = _gso(b)
            k = max(k - 1, 1)
    return b


def _enumerate_shortest(reduced) -> list[int]:
    """Exact shortest nonzero vector of an LLL-reduced integer basis.

    Depth-first integer enumeration with floating-point Gram-Schmidt
    bounds inflated by a generous relative slack; every candidate's
    squared norm is re-computed exactly in integers, so float error can
    only admit spurious boundary candidates, never verdicts.
    """
    n = len(reduced)
    mu, bstar_sq = _gso(reduced)
    muf = [[float(mu[i][j]) for j in range(n)] for i in range(n)]
    bf = [float(x) for x in bstar_sq]
    best_vec = min(reduced, key=_norm_sq)
    best_sq = _norm_sq(best_vec)
    slack = 1.0 + 1e-6
    x = [0] * n

    def exact_candidate():
        nonlocal best_vec, best_sq
        vec = [0] * len(reduced[0])
        for i in range(n):
            if x[i]:
                for t in range(len(vec)):
                    vec[t] += x[i] * reduced[i][t]
        sq = _norm_sq(vec)
        if 0 < sq < best_sq:
            best_sq = sq
            best_vec = vec

    def descend(level, partial):
        if level < 0:
            if any(x):
                exact_candidate()
            return
        center = -sum(muf[j][level] * x[j] for j in range(level + 1, n))
        budget = best_sq * slack - partial
        if budget < 0:
            return
        radius = math.sqrt(budget / bf[level]) if bf[level] > 0 else 0.0
        lo = math.ceil(center - radius - 1e-9)
        hi = math.floor(center + radius + 1e-9)
        for xi in range(lo, hi + 1):
            if level == n - 1 and xi < 0:
                continue  # the lattice is symmetric; search half the top level
            x[level] = xi
            offset = xi - center
            descend(level - 1, partial + bf[level] * offset * offset)
        x[level] = 0

    descend(n - 1, 0.0)
    return best_vec


def shortest_vector(basis) -> tuple[list[int], float]:
    """Shortest nonzero lattice vector and its Euclidean length."""
    rows = [list(map(int, row)) for row in basis]
    if len(rows) == 2:
        vec = _lagrange_shortest(rows[0], rows[1])
    else:
        vec = _enumerate_shortest(_lll_reduce(rows))
    return vec, math.sqrt(_norm_sq(vec))


def spectral_accuracy_sq(params: LcgParams, d: int) -> tuple[int, list[int]]:
    """Exact squared accuracy nu_d**2 and a vector achieving it.

    Independent of the increment and the seed: only modulus and
    multiplier enter the lattice.
    """
    basis = dual_lattice_basis(params, d)
    if d == 2:
        vec = _lagrange_shortest(basis[0], basis[1])
    else:
        vec = _enumerate_shortest(_lll_reduce(basis))
    return _norm_sq(vec), vec


def spectral_accuracy(params: LcgParams, d: int) -> float:
    """Accuracy nu_d as a float: sqrt of the exact squared norm."""
    sq, _ = spectral_accuracy_sq(params, d)
    return math.sqrt(sq)


# ---------------------------------------------------------------------------
# acceptance rule

def acceptance_threshold(d: int) -> float:
    """Required accuracy 2**(30/d) for dimensions 2..6."""
    if d not in ACCEPT_DIMS:
        raise ValueError("the acceptance rule covers dimensions 2..6 only")
    return 2.0 ** (30.0 / d)


def acceptance_threshold_sq(d: int) -> int:
    """The squared threshold 2**(60/d), exact (60/d is integral for d = 2..6)."""
    if d not in ACCEPT_DIMS:
        raise ValueError("the acceptance rule covers dimensions 2..6 only")
    return 2 ** (60 // d)


@dataclass
class SpectralReport:
    """Per-dimension accuracies of one multiplier/modulus pair."""

    descriptor: str
    modulus: int
    multiplier: int
    dims: tuple[int, ...]
    accuracy_sq: dict[int, int]
    shortest_vectors: dict[int, tuple[int, ...]]
    verdict: str

    @property
    def accuracies(self) -> dict[int, float]:
        return {d: math.sqrt(sq) for d, sq in self.accuracy_sq.items()}

    def passes(self, d: int) -> bool | None:
        """Exact threshold comparison for one dimension (None beyond the rule)."""
        if d not in ACCEPT_DIMS:
            return None
        return self.accuracy_sq[d] >= acceptance_threshold_sq(d)

    def to_dict(self) -> dict:
        dims = list(self.dims)
        return {
            "descriptor": self.descriptor,
            "modulus": self.modulus,
            "multiplier": self.multiplier,
            "dims": dims,
            "accuracy": {str(d): math.sqrt(self.accuracy_sq[d]) for d in dims},
            "accuracy_sq": {str(d): int(self.accuracy_sq[d]) for d in dims},
            "shortest_vector": {
                str(d): list(self.shortest_vectors[d]) for d in dims
            },
            "threshold": {
                str(d): acceptance_threshold(d) for d in dims if d in ACCEPT_DIMS
            },
            "threshold_sq": {
                str(d): acceptance_threshold_sq(d) for d in dims if d in ACCEPT_DIMS
            },
            "per_dim_pass": {
                str(d): self.passes(d) for d in dims if d in ACCEPT_DIMS
            },
            "verdict": self.verdict,
        }


def spectral_accept(params: LcgParams, d_max: int = 6) -> SpectralReport:
    """Evaluate nu_d for d = 2..d_max and apply the acceptance rule.

    The verdict is "accept" iff nu_d >= 2**(30/d) for every covered d in
    2..6, compared exactly in squared integer form.  Dimensions 7..8 are
    reported without thresholds.
    """
    if not 2 <= d_max <= MAX_DIM:
        raise ValueError(f"d_max must lie in [2, {MAX_DIM}]")
    dims = tuple(range(2, d_max + 1))
    acc_sq: dict[int, int] = {}
    vecs: dict[int, tuple[int, ...]] = {}
    for d in dims:
        sq, vec = spectral_accuracy_sq(params, d)
        acc_sq[d] = sq
        vecs[d] = tuple(vec)
    ruled = [d for d in dims if d in ACCEPT_DIMS]
    ok = all(acc_sq[d] >= acceptance_threshold_sq(d) for d in ruled)
    return SpectralReport(
        descriptor=f"lcg:m={params.modulus},a={params.multiplier}",
        modulus=params.modulus,
        multiplier=params.multiplier,
        dims=dims,
        accuracy_sq=acc_sq,
        shortest_vectors=vecs,
        verdict="accept" if ok else "reject",
    )


# ---------------------------------------------------------------------------
# point clouds

@dataclass
class PointCloud:
    """Overlapping d-tuples of a sample, as rows of an (n, d) array."""

    dimension: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError("points must be an (n, dimension) array")
        self.points = pts

    def __len__(self) -> int:
        return int(self.points.shape[0])


def point_cloud(sample, d: int, cap: int = CLOUD_POINT_CAP) -> PointCloud:
    """Overlapping d-tuples (x_i, ..., x_{i+d-1}) of the sample.

    A sample of n values yields n - d + 1 tuples.  Above ``cap`` tuples
    the cloud is thinned by stride sampling (every k-th tuple) to stay
    plottable; the stride is recorded nowhere else, so exact tuple
    counts matter only below the cap.
    """
    if d not in (2, 3):
        raise ValueError("point clouds support dimensions 2 and 3")
    values = np.asarray(getattr(sample, "values", sample), dtype=np.float64)
    if values.size < d:
        raise ValueError("sample shorter than the tuple dimension")
    pts = np.lib.stride_tricks.sliding_window_view(values, d)
    if pts.shape[0] > cap:
        stride = -(-pts.shape[0] // cap)
        pts = pts[::stride]
    return PointCloud(d, np.array(pts))


def plane_membership(cloud: PointCloud, dual_vector, slack: float = 1e-9) -> dict:
    """How well the cloud fits the plane family of a dual vector.

    For a dual vector u the quantity u . x of every tuple x should sit a
    fixed fractional offset away from an integer.  Returns the maximal
    deviation from the first tuple's offset (wrapped to [0, 1/2]), the
    number of distinct planes hit, and whether all points lie within
    ``slack`` of the family.
    """
    u = np.asarray(dual_vector, dtype=np.float64)
    if u.shape != (cloud.dimension,):
        raise ValueError("dual vector dimension mismatch")
    t = cloud.points @ u
    frac = t - np.floor(t)
    offset = float(frac[0])
    dev = np.abs(frac - offset)
    dev = np.minimum(dev, 1.0 - dev)
    max_dev = float(dev.max())
    plane_ids = np.unique(np.round(t - offset).astype(np.int64))
    return {
        "offset": offset,
        "max_deviation": max_dev,
        "n_planes": int(plane_ids.size),
        "within_slack": bool(max_dev <= slack),
    }


def export_cloud_csv(cloud: PointCloud, path) -> int:
    """Write the cloud as CSV with header x1,x2[,x3]; returns the row count."""
    from .generators import _atomic_write_text

    header = ",".join(f"x{i + 1}" for i in range(cloud.dimension))
    lines = [header]
    lines.extend(",".join(repr(float(v)) for v in row) for row in cloud.points)
    _atomic_write_text(path, "\n".join(lines) + "\n")
    return len(cloud)


SVG_SIZE = 800


def export_cloud_svg(cloud: PointCloud, path, max_points: int = 32768) -> int:
    """Scatter a 2-D cloud into an 800x800 SVG; returns the points drawn.

    Clouds larger than ``max_points`` are thinned by stride sampling so
    the file stays viewable.
    """
    if cloud.dimension != 2:
        raise ValueError("SVG export is 2-D only")
    from .generators import _atomic_write_text

    pts = cloud.points
    if pts.shape[0] > max_points:
        stride = -(-pts.shape[0] // max_points)
        pts = pts[::stride]
    s = SVG_SIZE
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" '
        f'viewBox="0 0 {s} {s}">',
        f'<rect width="{s}" height="{s}" fill="white"/>',
    ]
    for x, y in pts:
        cx = round(x * s, 2)
        cy = round(s - y * s, 2)
        parts.append(f'<circle cx="{cx}" cy="{cy}" r="1" fill="black"/>')
    parts.append("</svg>")
    _atomic_write_text(path, "\n".join(parts) + "\n")
    return int(pts.shape[0])
