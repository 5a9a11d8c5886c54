"""Poincare series, critical exponents and Patterson-Sullivan approximants."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import cartan, cocycle, flags, matgroup
from .errors import (
    InsufficientGap,
    NegativePhiOnCone,
    SubcriticalS,
    WindowEmpty,
)

# regression window trimming: boundary truncation bias dominates both ends
WINDOW_DROP_LOW = 0.20
WINDOW_DROP_HIGH = 0.10
NEGATIVE_CONE_FRACTION = 0.05


@dataclass
class ExponentEstimate:
    delta_hat: float
    method: str  # "sphere-regression" or "series-transition"
    window: tuple
    residual: float
    sample_count: int


@dataclass
class AtomicMeasure:
    """Finitely supported probability measure on flags (mu_s approximant)."""

    atoms: list  # (Flag, weight, word) triples
    s: float
    phi: cartan.Functional
    excluded: int = 0

    @property
    def weights(self):
        return np.array([w for _, w, _ in self.atoms])

    def total_mass(self):
        return float(self.weights.sum())


def _phi_values(P, phi, theta, spheres):
    """phi(kappa_theta(gamma)) per sphere, batched; sphere 0 is the identity."""
    proj = cartan.projection_matrix(P.dimension, theta)
    f = phi.covector() @ proj
    out = []
    for sphere in spheres:
        if not sphere:
            out.append(np.zeros(0))
            continue
        logs = matgroup.batch_kappa(sphere)
        out.append(logs @ f)
    return out


def _check_cone_positivity(P, phi, theta, values, fraction=NEGATIVE_CONE_FRACTION):
    flat = np.concatenate([v for v in values[1:]]) if len(values) > 1 else np.zeros(0)
    if flat.size == 0:
        return
    neg = np.count_nonzero(flat < -1e-9)
    if neg / flat.size > fraction:
        raise NegativePhiOnCone(
            f"phi negative on {neg}/{flat.size} of the sampled cone"
        )


def poincare_partial_sum(P, phi, theta, s, n, cone_fraction=NEGATIVE_CONE_FRACTION):
    """Partial phi-Poincare sum over the word ball of radius n.

    Returns (value, tail_slope): tail_slope is the mean log increment of the
    per-sphere sums over the outer half of the spheres; negative slope points
    at convergence, positive at divergence, at this s.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    theta = cartan.validate_theta(theta, P.dimension)
    spheres = matgroup.word_spheres(P, n)
    values = _phi_values(P, phi, theta, spheres)
    _check_cone_positivity(P, phi, theta, values, cone_fraction)
    per_sphere = np.array([np.exp(-s * v).sum() if v.size else 0.0 for v in values])
    total = float(per_sphere.sum())
    inc = per_sphere[1:]
    inc = inc[inc > 0]
    if inc.size >= 2:
        logs = np.log(inc)
        half = logs[inc.size // 2 :]
        tail_slope = float(np.mean(np.diff(half))) if half.size >= 2 else float(np.diff(logs)[-1])
    else:
        tail_slope = -math.inf
    return total, tail_slope


def _certified_rmax(values_by_sphere, n_max):
    """R up to which the word ball provably exhausts the phi-sublevel set.

    Uses the minimal observed per-letter displacement m = min phi/|word|;
    the ball of radius n_max then contains every element below n_max * m.
    """
    ratios = []
    for length, vals in enumerate(values_by_sphere):
        if length == 0 or vals.size == 0:
            continue
        ratios.append(vals.min() / length)
    if not ratios:
        raise WindowEmpty("no non-identity elements enumerated")
    return n_max * min(ratios)


def _sphere_regression(values_by_sphere, n_max):
    flat = np.concatenate([v for v in values_by_sphere[1:] if v.size])
    if flat.size == 0:
        raise WindowEmpty("no elements to regress on")
    r_max = _certified_rmax(values_by_sphere, n_max)
    flat = np.sort(flat)
    r_lo = max(flat[0], 0.0)
    span = r_max - r_lo
    if span <= 0:
        raise WindowEmpty(f"certified window degenerate (Rmax={r_max:g})")
    lo = r_lo + WINDOW_DROP_LOW * span
    hi = r_max - WINDOW_DROP_HIGH * span
    grid = np.linspace(lo, hi, 40)
    counts = np.searchsorted(flat, grid, side="right")
    keep = counts > 0
    if keep.sum() < 2:
        raise WindowEmpty("certified window contains too few orbit points")
    x = grid[keep]
    y = np.log(counts[keep])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return ExponentEstimate(
        delta_hat=max(float(coef[0]), 0.0),
        method="sphere-regression",
        window=(float(lo), float(hi)),
        residual=resid,
        sample_count=int(flat.size),
    )


def _series_transition(values_by_sphere, n_max):
    """Bisect s for the sign change of the per-sphere increment log-slope."""
    def tail_slope(s):
        per = np.array(
            [np.exp(-s * v).sum() if v.size else 0.0 for v in values_by_sphere[1:]]
        )
        per = per[per > 0]
        if per.size < 2:
            return -1.0
        logs = np.log(per)
        half = logs[per.size // 2 :]
        return float(np.mean(np.diff(half))) if half.size >= 2 else float(np.diff(logs)[-1])

    lo, hi = 0.0, 1.0
    while tail_slope(hi) > 0 and hi < 1e3:
        hi *= 2.0
    if tail_slope(lo) <= 0:
        delta = 0.0
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if tail_slope(mid) > 0:
                lo = mid
            else:
                hi = mid
        delta = 0.5 * (lo + hi)
    count = sum(v.size for v in values_by_sphere[1:])
    r_max = _certified_rmax(values_by_sphere, n_max)
    return ExponentEstimate(
        delta_hat=delta,
        method="series-transition",
        window=(0.0, float(r_max)),
        residual=abs(tail_slope(delta)),
        sample_count=int(count),
    )


def critical_exponent(P, phi, n_max, theta=None, method="sphere-regression"):
    """Estimate the phi-critical exponent from the word ball of radius n_max.

    ``method`` is "sphere-regression" (slope of log-counts against R over the
    certified-complete window), "series-transition" (bisect the divergence/
    convergence transition of the partial sums), or "both".
    """
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    spheres = matgroup.word_spheres(P, n_max)
    values = _phi_values(P, phi, theta, spheres)
    _check_cone_positivity(P, phi, theta, values)
    if method == "sphere-regression":
        return _sphere_regression(values, n_max)
    if method == "series-transition":
        return _series_transition(values, n_max)
    if method == "both":
        return _sphere_regression(values, n_max), _series_transition(values, n_max)
    raise ValueError(f"unknown method {method!r}")


MIN_S_MARGIN = 0.01


def patterson_measure(
    P, phi, s, n, theta=None, delta_hat=None, min_margin=MIN_S_MARGIN,
    gap_tolerance=flags.GAP_TOLERANCE,
):
    """Atomic mu_s approximant: atoms at U_theta(gamma), weights ~ e^{-s phi}.

    Requires s to sit above the critical exponent estimate when one is given
    (supercriticality keeps the normalization meaningful).
    """
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    if delta_hat is not None and s < delta_hat * (1.0 + min_margin):
        raise SubcriticalS(f"s={s:g} below delta*(1+margin)={delta_hat * (1 + min_margin):g}")
    spheres = matgroup.word_spheres(P, n)
    values = _phi_values(P, phi, theta, spheres)
    atoms = []
    excluded = 0
    raw = []
    for sphere, vals in zip(spheres, values):
        for e, t in zip(sphere, vals):
            try:
                F = flags.u_theta(e.matrix, theta, gap_tolerance)
            except InsufficientGap:
                excluded += 1
                continue
            atoms.append((F, e.word))
            raw.append(t)
    if not atoms:
        raise WindowEmpty("every enumerated element failed the gap test")
    raw = np.array(raw)
    w = np.exp(-s * (raw - raw.min()))
    w /= w.sum()
    return AtomicMeasure(
        atoms=[(F, float(wi), word) for (F, word), wi in zip(atoms, w)],
        s=float(s),
        phi=phi,
        excluded=excluded,
    )


def outer_sphere_restriction(mu, min_length=None):
    """Restriction of an atomic measure to its outermost word spheres.

    Keeps atoms with word length >= min_length (default: the maximum length
    present) and renormalizes.  The restricted approximant is depth
    self-similar: every shadow at probe depth is filled by atoms from a single
    sphere, so shadow-mass ratios carry no ball-truncation drift.
    """
    if min_length is None:
        min_length = max(len(word) for _, _, word in mu.atoms)
    kept = [(F, w, word) for F, w, word in mu.atoms if len(word) >= min_length]
    if not kept:
        raise WindowEmpty(f"no atoms at word length >= {min_length}")
    total = sum(w for _, w, _ in kept)
    return AtomicMeasure(
        atoms=[(F, w / total, word) for F, w, word in kept],
        s=mu.s,
        phi=mu.phi,
        excluded=mu.excluded,
    )


def quasi_invariance_residual(P, phi, alpha_word, s, n, theta=None):
    """Defect between weight-ratio exponents and the Iwasawa cocycle value.

    For gamma on each sphere, r(gamma) = |phi(kappa_theta(alpha^-1 gamma))
    - phi(kappa_theta(gamma)) - phi(B_theta(alpha^-1, U_theta(gamma)))|;
    vanishing residuals in the limit give the e^{-s phi(B)} density.
    Returns a list of per-sphere dicts with min/median/max.
    """
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    alpha_mat = P.word_matrix(tuple(alpha_word))
    alpha_inv = P.word_matrix(matgroup.invert_word(tuple(alpha_word)))
    proj = cartan.projection_matrix(P.dimension, theta)
    f = phi.covector() @ proj
    spheres = matgroup.word_spheres(P, n)
    stats = []
    for j, sphere in enumerate(spheres):
        if j == 0 or not sphere:
            continue
        # spliced batch kappa: the direct SVD of a deep product loses the
        # small singular values, which would swamp the residual
        shifted = [
            matgroup.GroupElement(alpha_inv @ e.matrix, e.word,
                                  inverse_matrix=e.inverse_matrix @ alpha_mat)
            for e in sphere
        ]
        base_vals = matgroup.batch_kappa(sphere) @ f
        shift_vals = matgroup.batch_kappa(shifted) @ f
        residuals = []
        for e, t0, t1 in zip(sphere, base_vals, shift_vals):
            try:
                F = flags.u_theta(e.matrix, theta)
            except InsufficientGap:
                continue
            b = cocycle.phi_iwasawa(phi, alpha_inv, F)
            residuals.append(abs(t1 - t0 - b))
        if residuals:
            arr = np.array(residuals)
            stats.append(
                {
                    "sphere": j,
                    "min": float(arr.min()),
                    "median": float(np.median(arr)),
                    "max": float(arr.max()),
                    "count": int(arr.size),
                }
            )
    return stats


def pair_density(phi, delta, F, G):
    """BMS pair density e^{-delta phi(G_theta(F, G))} on transverse pairs."""
    return float(math.exp(-delta * phi(cocycle.gromov_product(F, G))))


def subgroup_presentation(P, words):
    """Presentation generated by the matrices of the given words of P."""
    mats = [P.word_matrix(tuple(w)) for w in words]
    labels = [P.word_label(tuple(w)) for w in words]
    return matgroup.GroupPresentation(
        P.dimension, mats, labels=labels, assume_free=True,
        dedup_tolerance=P.dedup_tolerance,
    )


def entropy_drop_experiment(P, subgroup_words, phi, n_max, theta=None, sep_n=None):
    """Exponent estimates for Gamma and a subgroup, plus limit-set separation.

    Separation is the one-sided Hausdorff excess of the ambient limit-set
    sample over the subgroup sample in flag_distance (positive when the
    subgroup limit set is a proper subset).
    """
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    P0 = subgroup_presentation(P, subgroup_words)
    est = critical_exponent(P, phi, n_max, theta)
    est0 = critical_exponent(P0, phi, n_max, theta)
    sep_n = sep_n or min(n_max, 6)
    amb, _ = flags.sample_limit_set(P, theta, sep_n)
    sub, _ = flags.sample_limit_set(P0, theta, sep_n)
    separation = 0.0
    if amb and sub:
        separation = max(
            min(flags.flag_distance(F, G) for G, _ in sub) for F, _ in amb
        )
    return {
        "delta_ambient": est,
        "delta_subgroup": est0,
        "gap": est.delta_hat - est0.delta_hat,
        "limit_set_separation": float(separation),
    }


def concavity_experiment(P, phi1, phi2, lambdas, n_max, theta=None):
    """delta-hat across the segment between two normalized functionals.

    Both inputs are rescaled in-tool so their exponents are 1 (scaling phi by
    c scales delta by 1/c); concavity of the exponent then predicts values
    <= 1 along the segment.
    """
    theta = cartan.validate_theta(
        theta if theta is not None else cartan.full_theta(P.dimension), P.dimension
    )
    d1 = critical_exponent(P, phi1, n_max, theta).delta_hat
    d2 = critical_exponent(P, phi2, n_max, theta).delta_hat
    if d1 <= 0 or d2 <= 0:
        raise WindowEmpty("cannot normalize a vanishing exponent")
    n1, n2 = phi1 * d1, phi2 * d2
    rows = []
    for lam in lambdas:
        blend = lam * n1 + (1.0 - lam) * n2
        est = critical_exponent(P, blend, n_max, theta)
        rows.append({"lambda": float(lam), "delta_hat": est.delta_hat,
                     "residual": est.residual})
    return {"delta_phi1": d1, "delta_phi2": d2, "rows": rows}
