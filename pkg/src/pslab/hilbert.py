"""Properly convex domains, the Hilbert metric, shadows and conicality.

Domains live in a fixed affine chart (coordinates in R^k).  The ellipsoid
case with the unit ball is the Klein model of hyperbolic k-space; shadow and
conicality computations are specialized to it and to the two shipped group
families with an explicit boundary identification ("so" and "sym2").
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from . import _kernels, matgroup
from .errors import (
    BoundaryPoint,
    NonSmoothBoundaryWarning,
    UnsupportedFamily,
)

BOUNDARY_TOLERANCE = 1e-10
# along-segment minimization budget for the generic (non-ball) path
SEG_SAMPLES = 512
SEG_REFINE = 40


@dataclass
class ConvexDomain:
    """Bounded convex domain in an affine chart.

    kind "ellipsoid": {x : (x - center)^T form (x - center) < 1} with form
    positive definite.  kind "polytope": convex hull of the vertex list.
    """

    kind: str
    basepoint: np.ndarray = None
    form: np.ndarray = None
    center: np.ndarray = None
    vertices: np.ndarray = None
    _facet_A: np.ndarray = field(default=None, repr=False)
    _facet_b: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "ellipsoid":
            self.form = np.asarray(self.form, dtype=float)
            k = self.form.shape[0]
            if self.center is None:
                self.center = np.zeros(k)
            self.center = np.asarray(self.center, dtype=float)
            eigs = np.linalg.eigvalsh((self.form + self.form.T) / 2.0)
            if eigs[0] <= 0.0:
                raise BoundaryPoint("ellipsoid form must be positive definite")
        elif self.kind == "polytope":
            self.vertices = np.asarray(self.vertices, dtype=float)
            hull = ConvexHull(self.vertices)
            # hull equations: A x + b <= 0 inside, rows unit-normalized
            self._facet_A = hull.equations[:, :-1]
            self._facet_b = hull.equations[:, -1]
        else:
            raise UnsupportedFamily(f"unknown domain kind {self.kind!r}")
        if self.basepoint is None:
            self.basepoint = (self.center.copy() if self.kind == "ellipsoid"
                              else self.vertices.mean(axis=0))
        self.basepoint = np.asarray(self.basepoint, dtype=float)
        if self.margin(self.basepoint) <= BOUNDARY_TOLERANCE:
            raise BoundaryPoint("basepoint not strictly interior")

    @classmethod
    def klein_ball(cls, dim=2, basepoint=None):
        return cls("ellipsoid", form=np.eye(dim), basepoint=basepoint)

    @classmethod
    def from_vertices(cls, vertices, basepoint=None):
        return cls("polytope", vertices=vertices, basepoint=basepoint)

    @property
    def dim(self):
        if self.kind == "ellipsoid":
            return self.form.shape[0]
        return self.vertices.shape[1]

    @property
    def is_unit_ball(self):
        return (self.kind == "ellipsoid"
                and np.allclose(self.form, np.eye(self.dim), atol=1e-12)
                and np.allclose(self.center, 0.0, atol=1e-12))

    def margin(self, x):
        """Positive inside, 0 on the boundary (gauge units, not distance)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "ellipsoid":
            u = x - self.center
            return 1.0 - float(u @ self.form @ u)
        return float(np.min(-(self._facet_A @ x + self._facet_b)))

    def chord(self, x, v):
        """Parameters (t_minus, t_plus) with x + t*v on the boundary, t_minus < 0 < t_plus."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "ellipsoid":
            u = x - self.center
            a = float(v @ self.form @ v)
            b = float(u @ self.form @ v)
            c = float(u @ self.form @ u) - 1.0
            disc = b * b - a * c
            if a <= 0.0 or disc <= 0.0:
                raise BoundaryPoint("chord through a non-interior point")
            sq = np.sqrt(disc)
            return (-b - sq) / a, (-b + sq) / a
        av = self._facet_A @ v
        ax = self._facet_A @ x + self._facet_b
        with np.errstate(divide="ignore"):
            ts = -ax / av
        t_plus = np.min(ts[av > 0.0])
        t_minus = np.max(ts[av < 0.0])
        return float(t_minus), float(t_plus)

    def boundary_point_toward(self, x, v):
        """The boundary point hit by the ray from x in direction v."""
        _, tp = self.chord(x, v)
        return np.asarray(x, dtype=float) + tp * np.asarray(v, dtype=float)


def _require_interior(dom, x):
    if dom.margin(x) <= BOUNDARY_TOLERANCE:
        raise BoundaryPoint(f"point {np.asarray(x)} not strictly interior")


def hilbert_distance(dom, x, y):
    """Hilbert metric: half-log cross-ratio of (w, x, y, z) along the chord."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _require_interior(dom, x)
    _require_interior(dom, y)
    v = y - x
    if np.linalg.norm(v) < 1e-15:
        return 0.0
    tm, tp = dom.chord(x, v)
    # w = x + tm*v, z = x + tp*v; distances reduce to parameter ratios
    return 0.5 * np.log(((1.0 - tm) * tp) / ((-tm) * (tp - 1.0)))


@dataclass
class BusemannValue:
    value: float
    error_bar: float
    samples: np.ndarray

    def __float__(self):
        return float(self.value)


def busemann_approx(dom, z, x, steps=26):
    """Busemann function b_z(x) = lim d(y, x) - d(y, b0) along y -> z on [b0, z).

    Approximated on the schedule y_k = b0 + (1 - 2^-k)(z - b0) with one
    Richardson extrapolation step (the truncation error is first order in the
    boundary gap for a smooth boundary point); error_bar is the spread of the
    extrapolated tail.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    _require_interior(dom, x)
    if dom.kind == "polytope":
        vdist = np.linalg.norm(dom.vertices - z, axis=1)
        if vdist.min() < 1e-6:
            warnings.warn("Busemann limit at a polytope vertex may be chart-dependent",
                          NonSmoothBoundaryWarning)
    b0 = dom.basepoint
    steps = int(min(max(steps, 8), 28))
    hs = []
    for k in range(3, steps):
        y = b0 + (1.0 - 2.0 ** (-k)) * (z - b0)
        hs.append(hilbert_distance(dom, y, x) - hilbert_distance(dom, y, b0))
    hs = np.array(hs)
    rich = 2.0 * hs[1:] - hs[:-1]
    tail = rich[-5:]
    return BusemannValue(float(tail[-1]), float(tail.max() - tail.min()), hs)


def seg_distance(dom, q, z, p):
    """min over the segment [q, z) of the Hilbert distance to p."""
    q = np.asarray(q, dtype=float)
    z = np.asarray(z, dtype=float)
    p = np.asarray(p, dtype=float)
    _require_interior(dom, q)
    _require_interior(dom, p)
    if dom.is_unit_ball:
        return float(_kernels.seg_point_distance(q, z, p))
    # dense sampling then local ternary refinement; robust when convexity of
    # the along-segment distance is not guaranteed (polytopes)
    ts = np.linspace(0.0, 1.0 - 1e-9, SEG_SAMPLES)
    vals = np.array([hilbert_distance(dom, q + t * (z - q), p) for t in ts])
    i = int(np.argmin(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, SEG_SAMPLES - 1)]
    for _ in range(SEG_REFINE):
        t1 = lo + (hi - lo) / 3.0
        t2 = hi - (hi - lo) / 3.0
        d1 = hilbert_distance(dom, q + t1 * (z - q), p)
        d2 = hilbert_distance(dom, q + t2 * (z - q), p)
        if d1 <= d2:
            hi = t2
        else:
            lo = t1
    tm = 0.5 * (lo + hi)
    return float(min(vals[i], hilbert_distance(dom, q + tm * (z - q), p)))


def shadow_contains(dom, b0, p, r, z):
    """Is z in the shadow from b0 of the r-ball at p (segment [b0,z) meets it)?"""
    if r <= 0.0:
        raise BoundaryPoint("shadow radius must be positive")
    # distances within TIE of r count as inside (fixed tie rule)
    return seg_distance(dom, b0, z, p) <= r + _kernels.TIE


# ---------------------------------------------------------------------------
# Klein-disk boundary identification for the shipped group families

# Bombieri coordinates (w0, w1, w2) of a binary quadratic to Minkowski
# coordinates (u1, u2, u3) with u1^2 + u2^2 - u3^2 the discriminant form;
# conjugation by this matrix carries symmetric_power_rep(g, 3) into SO(2,1).
C_MINKOWSKI = np.array([
    [0.0, np.sqrt(2.0), 0.0],
    [1.0, 0.0, -1.0],
    [1.0, 0.0, 1.0],
])
C_MINKOWSKI_INV = np.linalg.inv(C_MINKOWSKI)

FAMILIES = ("so", "sym2")


class KleinFamily:
    """Klein-disk realization of a presentation with an explicit boundary model.

    family "so": 2x2 generators acting on the hyperbolic plane; pushed through
    the symmetric square.  family "sym2": 3x3 generators already in the image
    of the symmetric square (Bombieri coordinates).
    """

    def __init__(self, P, family):
        if family not in FAMILIES:
            raise UnsupportedFamily(f"no boundary identification for {family!r}")
        if family == "so" and P.dimension != 2:
            raise UnsupportedFamily("family 'so' needs a 2x2 presentation")
        if family == "sym2" and P.dimension != 3:
            raise UnsupportedFamily("family 'sym2' needs a 3x3 presentation")
        self.P = P
        self.family = family
        self.domain = ConvexDomain.klein_ball(2)

    def minkowski_matrix(self, M):
        if self.family == "so":
            M = matgroup.symmetric_power_rep(M, 3)
        return C_MINKOWSKI @ M @ C_MINKOWSKI_INV

    def orbit_point(self, M):
        """Image of the basepoint (origin) under the group element."""
        w = self.minkowski_matrix(M) @ np.array([0.0, 0.0, 1.0])
        if w[2] < 0.0:
            w = -w
        return w[:2] / w[2]

    def orbit_points(self, elements):
        return np.array([self.orbit_point(e.matrix) for e in elements])

    def lifted_orbit(self, elements):
        """Unnormalized hyperboloid lifts of the orbit of the basepoint.

        Row w has w[2] = cosh d(b0, gamma b0); unlike the Klein chart this
        stays representable at any orbit depth.
        """
        out = np.empty((len(elements), 3))
        for i, e in enumerate(elements):
            w = self.minkowski_matrix(e.matrix) @ np.array([0.0, 0.0, 1.0])
            if w[2] < 0.0:
                w = -w
            out[i] = w
        return out

    def boundary_point(self, flag):
        """Unit-circle image of a limit flag's line."""
        v = flag.frame[:, 0]
        if self.family == "so":
            a, b = v
            u = np.array([2.0 * a * b, a * a - b * b, a * a + b * b])
        else:
            u = C_MINKOWSKI @ v
        if u[2] < 0.0:
            u = -u
        x = u[:2] / u[2]
        n = np.linalg.norm(x)
        if n <= 0.0:
            raise UnsupportedFamily("flag line does not meet the boundary model")
        return x / n

    def boundary_points(self, flags):
        return np.array([self.boundary_point(F) for F in flags])


def measure_boundary_image(fam, mu):
    """Atom boundary points and weights of an AtomicMeasure in the Klein disk."""
    zs = fam.boundary_points([atom[0] for atom in mu.atoms])
    ws = np.array([atom[1] for atom in mu.atoms])
    return zs, ws


class SortedBoundaryMeasure:
    """Atomic measure on the unit circle with prefix sums over sorted angles.

    Shadows from the basepoint are exact angular windows, so their masses
    reduce to two binary searches; this is the scalable counterpart of the
    pairwise membership kernels (which serve as the reference implementation).
    """

    def __init__(self, zs, ws):
        angles = np.arctan2(zs[:, 1], zs[:, 0])
        order = np.argsort(angles, kind="stable")
        self.angles = angles[order]
        self.weights = np.asarray(ws, dtype=float)[order]
        self.cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        self.total = float(self.cum[-1])

    def arc_mass(self, a_from, a_to):
        """Mass of the counterclockwise arc from a_from to a_to (radians)."""
        a_from = np.mod(np.asarray(a_from, dtype=float) + np.pi, 2 * np.pi) - np.pi
        a_to = np.mod(np.asarray(a_to, dtype=float) + np.pi, 2 * np.pi) - np.pi
        lo = self.cum[np.searchsorted(self.angles, a_from, side="left")]
        hi = self.cum[np.searchsorted(self.angles, a_to, side="right")]
        return np.where(a_from <= a_to, hi - lo, self.total - (lo - hi))

    def window_mass(self, centers, half_widths):
        return self.arc_mass(centers - half_widths, centers + half_widths)


def _window_half_width(sh, r):
    """Angular half-width of O_r(b0, point at sinh-distance sh); pi for full."""
    s = np.sinh(r + _kernels.TIE)
    return np.where(sh <= s, np.pi, np.arcsin(np.minimum(s / np.maximum(sh, s), 1.0)))


def shadow_masses(zs, ws, lifts, r):
    """mu-mass of the r-shadow from the basepoint of each lifted orbit point."""
    sbm = SortedBoundaryMeasure(zs, ws)
    sh = np.hypot(lifts[:, 0], lifts[:, 1])
    centers = np.arctan2(lifts[:, 1], lifts[:, 0])
    half = _window_half_width(sh, r)
    out = sbm.window_mass(centers, half)
    return np.where(half >= np.pi, sbm.total, out)


def shadow_masses_to_origin(zs, ws, lifts, r):
    """mu-mass of O_r(gamma b0, b0) per lifted orbit point.

    The geodesic from the orbit point toward z stays within r of the
    basepoint iff the angle delta between z and the orbit direction satisfies
    cos(delta) <= c_b, the smaller root of the tangency quadratic
    cosh^2(r) c^2 - 2 sinh^2(r) (ch/sh) c + sinh^2(r)(2 + 1/sh^2) - cosh^2(r),
    so each shadow is an exact arc around the antipodal direction.
    """
    sbm = SortedBoundaryMeasure(zs, ws)
    sh = np.hypot(lifts[:, 0], lifts[:, 1])
    ch = lifts[:, 2]
    sigma2 = np.sinh(r + _kernels.TIE) ** 2
    chr2 = 1.0 + sigma2
    full = ch <= np.cosh(r + _kernels.TIE)
    sh_safe = np.where(sh > 0.0, sh, 1.0)
    B = sigma2 * ch / sh_safe
    Cq = sigma2 * (2.0 + 1.0 / sh_safe**2) - chr2
    disc = np.maximum(B * B - chr2 * Cq, 0.0)
    c_b = np.clip((B - np.sqrt(disc)) / chr2, -1.0, 1.0)
    half = np.pi - np.arccos(c_b)
    centers = np.arctan2(lifts[:, 1], lifts[:, 0]) + np.pi
    out = sbm.window_mass(centers, half)
    return np.where(full, sbm.total, out)


def shadow_constants(P, mu, n, family, r_grid=None):
    """Empirical (R0, eps0): the smallest grid radius whose shadows from the
    orbit back to the basepoint all carry positive measure, and that minimal
    measure."""
    fam = KleinFamily(P, family)
    zs, ws = measure_boundary_image(fam, mu)
    elements = [e for e in matgroup.word_ball(P, n) if e.word]
    lifts = fam.lifted_orbit(elements)
    if r_grid is None:
        r_grid = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0]
    for r in r_grid:
        masses = shadow_masses_to_origin(zs, ws, lifts, r)
        eps0 = float(masses.min())
        if eps0 > 0.0:
            return float(r), eps0
    raise UnsupportedFamily("no grid radius gives uniformly positive shadow mass")


@dataclass
class ShadowRow:
    sphere: int
    count: int
    rho_min: float
    rho_max: float
    spread: float


@dataclass
class ShadowReport:
    r: float
    delta: float
    rows: list
    spread: float  # global max/min


def shadow_measure_check(P, mu, phi, delta, r, n, family, theta=None):
    """Shadow Lemma ratios rho(gamma) = mu(O_r(b0, gamma b0)) * e^{+delta phi(kappa_theta)}.

    Returns per-sphere min/max/spread of rho over the word ball of radius n;
    bounded spread across spheres is the empirical Shadow Lemma constant.
    """
    from . import cartan

    fam = KleinFamily(P, family)
    theta = cartan.validate_theta(theta or cartan.full_theta(P.dimension), P.dimension)
    zs, ws = measure_boundary_image(fam, mu)
    proj = cartan.projection_matrix(P.dimension, theta)
    rows = []
    lo_all, hi_all = np.inf, 0.0
    for sphere_index, sphere in enumerate(matgroup.word_spheres(P, n)):
        if sphere_index == 0:
            continue
        lifts = fam.lifted_orbit(sphere)
        masses = shadow_masses(zs, ws, lifts, r)
        kth = matgroup.batch_kappa(sphere, proj)
        rho = masses * np.exp(delta * phi(kth))
        pos = rho[masses > 0.0]
        if pos.size == 0:
            rows.append(ShadowRow(sphere_index, 0, np.nan, np.nan, np.nan))
            continue
        lo, hi = float(pos.min()), float(pos.max())
        lo_all, hi_all = min(lo_all, lo), max(hi_all, hi)
        rows.append(ShadowRow(sphere_index, int(pos.size), lo, hi, hi / lo))
    return ShadowReport(float(r), float(delta), rows,
                        float(hi_all / lo_all) if hi_all > 0.0 else np.nan)


def conicality_score(P, z, r, n, family):
    """Orbit points per word-sphere within Hilbert distance r of the ray [b0, z).

    A non-vanishing tail across spheres is the finite signature of z being an
    r-conical limit point.
    """
    fam = KleinFamily(P, family)
    z = np.asarray(z, dtype=float)
    z = z / np.linalg.norm(z)
    counts = []
    for sphere in matgroup.word_spheres(P, n)[1:]:
        lifts = fam.lifted_orbit(sphere)
        dists = _kernels.ray_distances_lifted(lifts, z)
        counts.append(int(np.count_nonzero(dists < r)))
    return counts
