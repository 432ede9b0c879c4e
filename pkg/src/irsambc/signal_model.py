"""Two-hypothesis received-signal model, symbol-energy statistics, and BER.

The reader sees y = h s + z where h is h_A (tag silent) or h_AI = h_A + h_I
(tag reflecting), s is the complex Gaussian ambient signal with power P_S and
z is white noise with power P_w per antenna. Averaged symbol energies after a
combiner g are Gaussian with mean mu_i and variance mu_i^2 / L, which makes
the energy-detection BER a function of the ratio Delta_G = max(mu1/mu0,
mu0/mu1) alone.
"""
from dataclasses import dataclass
from math import erfc, log, sqrt

import numpy as np

from .errors import InvalidInputError, ShapeError, StatisticsError


@dataclass
class SystemParameters:
    """Powers in linear milliwatts plus symbol lengths.

    p_s = 0 is allowed as a no-ambient diagnostic; the normal operating range
    is p_s > 0.
    """

    p_s: float = 100.0
    p_w: float = 10.0 ** (-95.0 / 10.0)
    alpha: float = 1.0
    l_t: int = 150
    l_d: int = 20

    def __post_init__(self):
        if self.p_s < 0.0:
            raise InvalidInputError(f"transmit power must be non-negative, got {self.p_s}")
        if self.p_w <= 0.0:
            raise InvalidInputError(f"noise power must be positive, got {self.p_w}")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidInputError(f"splitting coefficient must be in (0, 1], got {self.alpha}")
        if self.l_t < 2 or self.l_d < 2:
            raise InvalidInputError(f"symbol lengths must be >= 2, got {self.l_t}, {self.l_d}")

    @property
    def rho(self):
        """Transmit-to-noise power ratio P_S / P_w."""
        return self.p_s / self.p_w


@dataclass
class CompositeChannels:
    """Ambient component h_A and information component h_I at the reader."""

    h_a: np.ndarray
    h_i: np.ndarray

    @property
    def h_ai(self):
        return self.h_a + self.h_i


def check_reflection(theta, tol=1e-9):
    """Validate |theta_n| = 1 for all n."""
    theta = np.asarray(theta, dtype=complex)
    if theta.ndim != 1:
        raise ShapeError(f"reflection vector must be 1-D, got shape {theta.shape}")
    if np.any(np.abs(np.abs(theta) - 1.0) > tol):
        raise InvalidInputError("reflection coefficients must have unit modulus")
    return theta


def check_combiner(g, tol=1e-9):
    """Validate ||g||^2 = 1."""
    g = np.asarray(g, dtype=complex)
    if g.ndim != 1:
        raise ShapeError(f"combiner must be 1-D, got shape {g.shape}")
    if abs(float(np.vdot(g, g).real) - 1.0) > tol:
        raise InvalidInputError("combiner must have unit norm")
    return g


def tag_received_gain(ch, theta):
    """Scalar channel seen by the tag: h_TI^H diag(theta) h_SI + h_ST."""
    return complex(np.sum(np.conj(ch.h_ti) * theta * ch.h_si) + ch.h_st)


def composite_channels(ch, theta, alpha=1.0):
    """Composite reader-side channels for one reflection setting.

    theta = None means no IRS in the scene: the ambient component is the
    direct source-reader channel and the information component is the direct
    tag path scaled by alpha.
    """
    if theta is None:
        h_a = ch.h_sr.astype(complex)
        h_i = alpha * ch.h_st * ch.h_tr
    else:
        theta = np.asarray(theta, dtype=complex)
        if theta.shape != (ch.n,):
            raise ShapeError(f"theta must have shape ({ch.n},), got {theta.shape}")
        h_a = ch.h_ri @ (theta * ch.h_si) + ch.h_sr
        h_r = ch.h_ri @ (theta * ch.h_ti) + ch.h_tr
        h_i = alpha * tag_received_gain(ch, theta) * h_r
    return CompositeChannels(h_a=h_a, h_i=h_i)


def energy_statistics(comp, g, params, length):
    """Means and variances of the averaged symbol energy under both bits.

    Returns (mu0, mu1, var0, var1) with mu_i = P_S |g^H h_i|^2 + P_w and
    var_i = mu_i^2 / L.
    """
    if length < 2:
        raise InvalidInputError(f"symbol length must be >= 2, got {length}")
    mu0 = params.p_s * abs(np.vdot(g, comp.h_a)) ** 2 + params.p_w
    mu1 = params.p_s * abs(np.vdot(g, comp.h_ai)) ** 2 + params.p_w
    return mu0, mu1, mu0 * mu0 / length, mu1 * mu1 / length


def grcd(mu0, mu1):
    """Generalized relative channel difference max(mu1/mu0, mu0/mu1) >= 1."""
    if mu0 <= 0.0 or mu1 <= 0.0:
        raise StatisticsError(f"symbol energies must be positive, got ({mu0}, {mu1})")
    return max(mu1 / mu0, mu0 / mu1)


def true_grcd(comp, g, params):
    """Exact GRCD of a (combiner, reflection) operating point."""
    mu0, mu1, _, _ = energy_statistics(comp, g, params, 2)
    return grcd(mu0, mu1)


def _qfunc(x):
    return 0.5 * erfc(x / sqrt(2.0))


def ber_from_grcd(dg, length):
    """Energy-detection bit error rate as a function of the GRCD.

    p = (Q(sqrt(L) (dg r - 1)) + Q(sqrt(L) (1 - r))) / 2 with
    r = ln(dg) / (dg - 1); the natural logarithm comes from the underlying
    log-likelihood ratio. dg = 1 is the analytic limit p = 0.5; the function
    is strictly decreasing in dg above 1.
    """
    if dg < 1.0:
        raise InvalidInputError(f"GRCD must be >= 1, got {dg}")
    if length < 1:
        raise InvalidInputError(f"symbol length must be >= 1, got {length}")
    if dg == 1.0:
        return 0.5
    r = log(dg) / (dg - 1.0)
    root = sqrt(length)
    return 0.5 * (_qfunc(root * (dg * r - 1.0)) + _qfunc(root * (1.0 - r)))


def draw_received_samples(comp, params, bit, length, rng):
    """Raw M-dimensional reader samples y = h s + z for one symbol.

    bit selects h_A (0) or h_AI (1); s ~ CN(0, P_S) i.i.d. per sample and
    z ~ CN(0, P_w I). Returns an (M, L) array.
    """
    if bit not in (0, 1):
        raise InvalidInputError(f"bit must be 0 or 1, got {bit}")
    h = comp.h_a if bit == 0 else comp.h_ai
    m = h.shape[0]
    s = sqrt(params.p_s / 2.0) * (rng.standard_normal(length) + 1j * rng.standard_normal(length))
    z = sqrt(params.p_w / 2.0) * (
        rng.standard_normal((m, length)) + 1j * rng.standard_normal((m, length))
    )
    return h[:, None] * s[None, :] + z


def simulate_symbol_samples(comp, g, params, bit, length, rng):
    """Combined sample energies |g^H y|^2 plus the raw samples they came from."""
    y = draw_received_samples(comp, params, bit, length, rng)
    energies = np.abs(g.conj() @ y) ** 2
    return energies, y
