"""Pilot covariance estimation, rank-one refinement, and the energy combiner.

The reader never sees the channel vectors directly. Everything downstream
works from the two symbol-conditioned sample covariances C0 (tag silent) and
C1 (tag reflecting), which converge to P_S h h^H + P_w I as the pilot length
grows. The refinement step projects a noisy estimate back onto that
rank-one-plus-identity structure, and the combiner maximizing the sample GRCD
is the extreme generalized eigenvector of the pencil (C1, C0).
"""
import numpy as np

from .errors import DefinitenessError, InvalidInputError, ShapeError
from .numerics import generalized_hermitian_eig, hermitian_eig
from .signal_model import grcd


def estimate_covariance(samples):
    """Sample covariance y y^H / L from an (M, L) block of reader samples."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise ShapeError(f"samples must be 2-D (antennas, length), got shape {samples.shape}")
    length = samples.shape[1]
    if length < 1:
        raise InvalidInputError("need at least one sample")
    return samples @ samples.conj().T / length


def ideal_covariances(comp, params):
    """Exact covariances P_S h h^H + P_w I under both tag symbols."""
    m = comp.h_a.shape[0]
    eye = np.eye(m)
    c0 = params.p_s * np.outer(comp.h_a, comp.h_a.conj()) + params.p_w * eye
    c1 = params.p_s * np.outer(comp.h_ai, comp.h_ai.conj()) + params.p_w * eye
    return c0, c1


def refine_covariance(cov, noise_power=None):
    """Project a covariance estimate onto rank-one signal plus isotropic noise.

    Keeps the dominant eigenpair and replaces the rest of the spectrum with a
    flat noise floor, estimated from the discarded eigenvalues unless an
    explicit noise power is given. The estimated floor needs at least two
    antennas; pass noise_power for the single-antenna case.
    """
    w, v = hermitian_eig(cov)
    m = w.shape[0]
    if noise_power is None:
        if m < 2:
            raise InvalidInputError("noise floor estimation needs at least two antennas")
        floor = float(np.mean(w[:-1]))
        floor = max(floor, 1e-30)
    else:
        if noise_power <= 0.0:
            raise InvalidInputError(f"noise power must be positive, got {noise_power}")
        floor = noise_power
    top = max(float(w[-1]) - floor, 0.0)
    vec = v[:, -1]
    return top * np.outer(vec, vec.conj()) + floor * np.eye(m)


def _fix_phase(g, tol=1e-12):
    # eigenvector sign/phase is arbitrary; rotate the first non-negligible
    # component onto the positive real axis so repeated runs agree exactly
    for x in g:
        if abs(x) > tol:
            return g * (np.conj(x) / abs(x))
    return g


def eigen_combiner(c0, c1):
    """Unit-norm combiner maximizing the sample GRCD of the pair (C0, C1).

    The candidates are the generalized eigenvectors of C1 v = lam C0 v; the
    winner is whichever extreme eigenvalue gives the larger of lam_max and
    1 / lam_min. A numerically indefinite C0 gets one diagonal-jitter retry.
    """
    c0 = np.asarray(c0)
    c1 = np.asarray(c1)
    try:
        w, v = generalized_hermitian_eig(c1, c0)
    except DefinitenessError:
        m = c0.shape[0]
        jitter = 1e-12 * float(np.trace(c0).real) / m
        bump = jitter * np.eye(m)
        w, v = generalized_hermitian_eig(c1 + bump, c0 + bump)
    inverse_value = np.inf if w[0] <= 0.0 else 1.0 / w[0]
    idx = 0 if inverse_value > w[-1] else w.shape[0] - 1
    g = v[:, idx]
    g = g / np.linalg.norm(g)
    return _fix_phase(g)


def sample_grcd(c0, c1, g):
    """GRCD of the quadratic forms g^H C_i g."""
    mu0 = float(np.real(np.vdot(g, c0 @ g)))
    mu1 = float(np.real(np.vdot(g, c1 @ g)))
    return grcd(mu0, mu1)
