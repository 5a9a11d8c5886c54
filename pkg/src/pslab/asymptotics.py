"""Closed-geodesic counting and box-counting dimension of sampled limit sets."""

from dataclasses import dataclass

import numpy as np

from . import _kernels, cartan, matgroup, patterson
from .errors import BadIndex, DegenerateScales, WindowEmpty

ZERO_LENGTH_TOLERANCE = 1e-9
SATURATION_FRACTION = 0.40


@dataclass
class CountRow:
    T: float
    count: int
    prediction: float
    ratio: float
    certified: bool


@dataclass
class CountTable:
    rows: list
    delta_hat: float
    t_certified: float
    primitive_only: bool
    unoriented: bool


def class_lengths(P, phi, n, theta=None, primitive_only=False):
    """phi(nu_theta) per conjugacy class representative, lengths <= n.

    Class length uses the Jordan projection (conjugation-invariant); kappa is
    not a class function.  Returns (lengths, words) in canonical class order.
    """
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    proj = cartan.projection_matrix(P.dimension, theta)
    f = phi.covector() @ proj
    reps = matgroup.conjugacy_classes(P, n, primitive_only)
    lengths = np.array([
        float(f @ cartan.jordan_spliced(
            e.matrix, P.word_matrix(matgroup.invert_word(e.word))))
        for e in reps
    ])
    return lengths, [e.word for e in reps]


def count_closed_geodesics(
    P, phi, t_max, n_max=10, theta=None, primitive_only=False, unoriented=False,
    delta_hat=None, t_values=None,
):
    """N(T) = #{conjugacy classes with 0 < phi(nu_theta) <= T} against e^{dT}/(dT).

    Classes come from cyclic words of length <= n_max.  A row at T is
    certified complete when T <= n_max * (minimal per-letter length growth
    observed); beyond that the enumeration may miss classes and the row is
    marked uncertified rather than dropped.
    """
    if t_max <= 0:
        raise BadIndex("t_max must be positive")
    lengths, words = class_lengths(P, phi, n_max, theta, primitive_only)
    pos = lengths > ZERO_LENGTH_TOLERANCE
    lengths = lengths[pos]
    if lengths.size == 0:
        raise WindowEmpty("no classes of positive length enumerated")
    word_lens = np.array([len(w) for w, keep in zip(words, pos) if keep])
    t_certified = float(n_max * np.min(lengths / word_lens))
    if delta_hat is None:
        delta_hat = patterson.critical_exponent(P, phi, max(n_max, 4), theta).delta_hat
    lengths = np.sort(lengths)
    if t_values is None:
        t_values = np.linspace(t_max / 24.0, t_max, 24)
    rows = []
    for T in t_values:
        count = int(np.searchsorted(lengths, T + ZERO_LENGTH_TOLERANCE, side="left"))
        if unoriented:
            count //= 2
        if delta_hat > 0 and T > 0:
            pred = float(np.exp(delta_hat * T) / (delta_hat * T))
            if unoriented:
                pred /= 2.0
        else:
            pred = np.nan
        ratio = count / pred if pred and np.isfinite(pred) else np.nan
        rows.append(CountRow(float(T), count, pred, float(ratio),
                             certified=T <= t_certified))
    return CountTable(rows, float(delta_hat), t_certified,
                      primitive_only, unoriented)


def count_log_slope(table):
    """Regression slope of log N(T) against T over deep certified rows.

    Restricts to the upper 60% of the certified T-range: early rows have
    single-digit counts and a lattice-like N(T) that biases the slope down.
    """
    pts = [(row.T, row.count) for row in table.rows
           if row.certified and row.count > 0]
    if len(pts) < 2:
        raise WindowEmpty("not enough certified rows with positive counts")
    t_hi = max(t for t, _ in pts)
    deep = [(t, c) for t, c in pts if t >= 0.4 * t_hi]
    if len(deep) >= 2:
        pts = deep
    x = np.array([t for t, _ in pts])
    y = np.log([c for _, c in pts])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


@dataclass
class BoxDimension:
    dimension: float
    residual: float
    scales: np.ndarray
    counts: np.ndarray


def _canonical_features(points, metric):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise BadIndex("points must be a 2-d array of coordinates")
    if metric == _kernels.METRIC_CHORDAL:
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        pts = pts / norms
        # antipode identification: fix the sign of the leading nonzero entry
        lead = pts[np.arange(len(pts)), np.argmax(np.abs(pts) > 1e-12, axis=1)]
        pts = pts * np.where(lead < 0.0, -1.0, 1.0)[:, None]
    # dedup + canonical order makes the greedy cover permutation-invariant
    return np.unique(np.round(pts, 12), axis=0)


def box_counting_dimension(points, scale_grid=None, metric="chordal"):
    """Slope of log(cover count) against log(1/scale) by greedy ball covering.

    ``metric`` is "chordal" (rows are projective directions, distance is the
    sine of the line angle) or "euclidean".  Points are deduplicated and
    canonically ordered first.  Raises DegenerateScales when the covering
    saturates at the sample size on more than 40% of the scales.
    """
    met = {"chordal": _kernels.METRIC_CHORDAL,
           "euclidean": _kernels.METRIC_EUCLIDEAN}.get(metric)
    if met is None:
        raise BadIndex(f"unknown metric {metric!r}")
    feats = _canonical_features(points, met)
    if scale_grid is None:
        scale_grid = np.geomspace(0.3, 0.003, 10)
    scale_grid = np.asarray(scale_grid, dtype=float)
    if scale_grid.size < 5:
        raise BadIndex("scale grid needs at least 5 scales")
    counts = np.array(
        [_kernels.greedy_cover_count(feats, eps, met) for eps in scale_grid]
    )
    n = len(feats)
    if n > 1:
        saturated = np.count_nonzero(counts >= n)
        if saturated / counts.size > SATURATION_FRACTION:
            raise DegenerateScales(
                f"cover saturates at the sample size on {saturated}/{counts.size} scales"
            )
    x = np.log(1.0 / scale_grid)
    y = np.log(counts)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return BoxDimension(float(coef[0]), resid, scale_grid, counts)


def hausdorff_vs_exponent_experiment(P, n_max, theta=None, scale_grid=None):
    """Pairs the alpha_1 exponent estimate with the sampled limit-set box dimension."""
    from . import flags

    theta = cartan.validate_theta(
        theta if theta is not None else {1, P.dimension - 1}, P.dimension
    )
    phi = cartan.Functional.alpha(1, P.dimension)
    est = patterson.critical_exponent(P, phi, n_max, theta)
    samples, skipped = flags.sample_limit_set(P, theta, n_max)
    if not samples:
        raise WindowEmpty("limit-set sample is empty")
    lines = np.array([F.frame[:, 0] for F, _ in samples])
    box = box_counting_dimension(lines, scale_grid, metric="chordal")
    return {
        "delta_hat": est.delta_hat,
        "delta_residual": est.residual,
        "box_dimension": box.dimension,
        "box_residual": box.residual,
        "sample_size": len(samples),
        "skipped": skipped,
        "scales": box.scales,
        "counts": box.counts,
    }
