"""Cartan subspace of sl(d,R): roots, weights, projections, involutions.

Vectors in the Cartan subspace are plain length-d numpy arrays (natural-log
scale, zero-sum).  ``kappa`` and ``jordan`` return dominant vectors (weakly
decreasing entries).
"""

import numpy as np

from .errors import (
    AsymmetricTheta,
    DecompositionFailure,
    NonUnimodular,
    SingularSystem,
)

DET_TOLERANCE = 1e-6


def require_unimodular(A, tol=DET_TOLERANCE):
    """Return A as a float array after the unit-determinant check.

    Long word products make the determinant numerically ill-determined (its
    absolute error grows like eps * |A|^d), so the check widens with the
    matrix scale; actual renormalization happens in log-space downstream.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonUnimodular(None)
    if not np.isfinite(A).all():
        raise NonUnimodular(None)
    det = np.linalg.det(A)
    d = A.shape[0]
    scale = max(np.linalg.norm(A, "fro"), 1.0)
    allowance = max(tol, 64 * d * np.finfo(float).eps * scale**d)
    if not np.isfinite(det) or abs(det - 1.0) > allowance:
        raise NonUnimodular(det)
    return A


def kappa(A, tol=DET_TOLERANCE):
    """Cartan projection: log singular values, weakly decreasing, zero-sum.

    The zero-sum normalization subtracts the mean log singular value, which
    equals the spec'd |det|^(-1/d) rescaling but stays accurate when the
    determinant itself is dominated by round-off.
    """
    A = require_unimodular(A, tol)
    try:
        sigma = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    if sigma[-1] <= 0.0:
        raise DecompositionFailure("vanishing singular value")
    logs = np.log(sigma)
    return logs - logs.mean()


def jordan(A, tol=DET_TOLERANCE):
    """Jordan projection: sorted log moduli of (generalized) eigenvalues."""
    A = require_unimodular(A, tol)
    try:
        eigvals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    moduli = np.sort(np.abs(eigvals))[::-1]
    if moduli[-1] <= 0.0:
        raise DecompositionFailure("vanishing eigenvalue modulus")
    logs = np.log(moduli)
    return logs - logs.mean()


def jordan_spliced(A, A_inv, tol=DET_TOLERANCE):
    """Jordan projection of a long product, stabilized by its inverse product.

    Small eigenvalue moduli of an ill-conditioned product carry absolute error
    of order eps * |lambda_1|, so the bottom half of nu is taken from the
    inverse (negated and reversed), where those moduli are dominant; A_inv
    must be the forward product of the inverted word, not a matrix inverse.
    """
    A = require_unimodular(A, tol)
    A_inv = require_unimodular(A_inv, tol)
    try:
        mf = np.sort(np.abs(np.linalg.eigvals(A)))[::-1]
        mi = np.sort(np.abs(np.linalg.eigvals(A_inv)))[::-1]
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    logs_f = np.log(np.maximum(mf, 1e-300))
    logs_i = -np.log(np.maximum(mi, 1e-300))[::-1]
    d = A.shape[0]
    top = (d + 1) // 2
    out = logs_f.copy()
    out[top:] = logs_i[top:]
    if d % 2 == 1:
        mid = d // 2
        out[mid] = 0.5 * (logs_f[mid] + logs_i[mid])
    return out - out.mean()


def validate_theta(theta, d):
    """Canonicalize theta to a sorted tuple, checking symmetry k <-> d-k."""
    ts = tuple(sorted({int(k) for k in theta}))
    if not ts:
        raise AsymmetricTheta("theta must be non-empty")
    for k in ts:
        if not 1 <= k <= d - 1:
            raise AsymmetricTheta(f"index {k} outside 1..{d - 1}")
        if d - k not in ts:
            raise AsymmetricTheta(f"theta not symmetric: {k} in, {d - k} out")
    return ts


def full_theta(d):
    return tuple(range(1, d))


def _constraint_matrix(d, theta):
    # Rows: omega_k for k in theta, alpha_k = 0 for k outside theta, sum = 0.
    M = np.zeros((d, d))
    row = 0
    for k in theta:
        M[row, :k] = 1.0
        row += 1
    for k in range(1, d):
        if k not in theta:
            M[row, k - 1] = 1.0
            M[row, k] = -1.0
            row += 1
    M[row, :] = 1.0
    return M


def vector_from_omegas(d, theta, omega_values):
    """The unique zero-sum vector in a_theta with the given omega_k values."""
    theta = validate_theta(theta, d)
    M = _constraint_matrix(d, theta)
    rhs = np.zeros(d)
    rhs[: len(theta)] = np.asarray(omega_values, dtype=float)
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def project_theta(v, theta):
    """Project onto a_theta: preserves omega_k for k in theta, kills alpha_k off theta."""
    v = np.asarray(v, dtype=float)
    d = v.shape[0]
    theta = validate_theta(theta, d)
    omegas = [np.sum(v[:k]) for k in theta]
    return vector_from_omegas(d, theta, omegas)


def projection_matrix(d, theta):
    """Matrix of project_theta, for batch application."""
    theta = validate_theta(theta, d)
    M = _constraint_matrix(d, theta)
    R = np.zeros((d, d))
    for row, k in enumerate(theta):
        R[row, :k] = 1.0
    try:
        return np.linalg.solve(M, R)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def hat_iota(v):
    """The opposition involution on the Cartan subspace: reverse coordinates."""
    return np.asarray(v, dtype=float)[::-1].copy()


class Functional:
    """Linear functional on the Cartan subspace, stored as fundamental-weight
    coefficients: phi = sum_k c_k * omega_k.

    ``Functional.alpha(k, d)`` and ``Functional.omega(k, d)`` build the simple
    roots and fundamental weights; arbitrary combinations come from ``+`` and
    scalar ``*``.
    """

    def __init__(self, d, coefficients):
        self.d = int(d)
        coeffs = {}
        for k, c in dict(coefficients).items():
            k = int(k)
            if not 1 <= k <= self.d - 1:
                raise AsymmetricTheta(f"weight index {k} outside 1..{self.d - 1}")
            c = float(c)
            if c != 0.0:
                coeffs[k] = c
        self.coefficients = coeffs

    @classmethod
    def omega(cls, k, d):
        return cls(d, {k: 1.0})

    @classmethod
    def alpha(cls, k, d):
        # alpha_k = 2*omega_k - omega_{k-1} - omega_{k+1}, dropping omega_0
        # and omega_d (both vanish on zero-sum vectors).
        coeffs = {k: 2.0}
        if k - 1 >= 1:
            coeffs[k - 1] = -1.0
        if k + 1 <= d - 1:
            coeffs[k + 1] = -1.0
        return cls(d, coeffs)

    @property
    def support(self):
        return tuple(sorted(self.coefficients))

    def covector(self):
        """Gradient f with phi(v) = f . v (f_i = sum of c_k over k >= i)."""
        f = np.zeros(self.d)
        for k, c in self.coefficients.items():
            f[:k] += c
        return f

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        cs = np.cumsum(v, axis=-1)
        out = 0.0
        for k, c in self.coefficients.items():
            out = out + c * cs[..., k - 1]
        return out

    def __add__(self, other):
        if not isinstance(other, Functional) or other.d != self.d:
            return NotImplemented
        coeffs = dict(self.coefficients)
        for k, c in other.coefficients.items():
            coeffs[k] = coeffs.get(k, 0.0) + c
        return Functional(self.d, coeffs)

    def __mul__(self, scalar):
        return Functional(self.d, {k: c * scalar for k, c in self.coefficients.items()})

    __rmul__ = __mul__

    def __repr__(self):
        terms = " + ".join(f"{c:g}*w{k}" for k, c in sorted(self.coefficients.items()))
        return f"Functional(d={self.d}, {terms or '0'})"


def eval_functional(phi, v):
    return phi(v)


def iota_star(phi, theta=None):
    """The dual involution: c_k -> c_{d-k}, so iota(omega_k) = omega_{d-k}."""
    if theta is not None:
        theta = validate_theta(theta, phi.d)
        if any(k not in theta for k in phi.support):
            raise AsymmetricTheta("functional support not contained in theta")
    return Functional(phi.d, {phi.d - k: c for k, c in phi.coefficients.items()})
