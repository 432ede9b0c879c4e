"""Node geometry, large-scale link budgets, and small-scale fading draws.

One ChannelRealization holds the six channel blocks of a single coherence
episode. Blocks touching the IRS fade Rician; the rest fade Rayleigh. The
large-scale gain of a link is

    reference * d^(-exponent) * (aperture factor on IRS links),

where the reference defaults to the free-space constant (lambda / 4 pi)^2 and
the aperture factor 4 pi models each effective reflector as a wavelength-sized
panel (capture term lambda^2 / 4 pi). Setting reference_gain = 1 and
reflector_aperture = False reduces the budget to the bare d^(-exponent).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InvalidInputError

SPEED_OF_LIGHT = 299792458.0

# Link name -> (from node, to node). The IRS-to-reader block is stored
# reader-side as an M x N matrix so it left-multiplies reflection vectors
# directly.
LINKS = {
    "st": ("source", "tag"),
    "si": ("source", "irs"),
    "sr": ("source", "reader"),
    "tr": ("tag", "reader"),
    "ti": ("tag", "irs"),
    "ir": ("irs", "reader"),
}

_IRS_LINKS = ("si", "ti", "ir")


def path_loss(distance, exponent):
    """Power path loss d^(-exponent). Distance must be positive."""
    if distance <= 0.0:
        raise GeometryError(f"link distance must be positive, got {distance}")
    return float(distance) ** (-float(exponent))


@dataclass
class NodeGeometry:
    """Planar positions of the four nodes plus the link-budget constants."""

    source: tuple = (-5.0, 0.0)
    tag: tuple = (0.0, 0.0)
    irs: tuple = (0.0, 5.0)
    reader: tuple = (5.0, 0.0)
    carrier_hz: float = 2.4e9
    path_loss_exponent: float = 2.5
    reference_gain: float | None = None
    reflector_aperture: bool = True

    def __post_init__(self):
        if self.carrier_hz <= 0.0:
            raise GeometryError(f"carrier frequency must be positive, got {self.carrier_hz}")
        names = ("source", "tag", "irs", "reader")
        pos = [np.asarray(getattr(self, n), dtype=float) for n in names]
        for p, n in zip(pos, names):
            if p.shape != (2,):
                raise GeometryError(f"{n} position must be a 2-vector, got shape {p.shape}")
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if float(np.linalg.norm(pos[i] - pos[j])) <= 0.0:
                    raise GeometryError(f"nodes {names[i]} and {names[j]} coincide")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_hz

    def position(self, node):
        return np.asarray(getattr(self, node), dtype=float)

    def link_distance(self, link):
        a, b = LINKS[link]
        return float(np.linalg.norm(self.position(a) - self.position(b)))

    def link_gain(self, link):
        """Large-scale power gain of one link, reference and aperture included."""
        ref = self.reference_gain
        if ref is None:
            ref = (self.wavelength / (4.0 * np.pi)) ** 2
        gain = ref * path_loss(self.link_distance(link), self.path_loss_exponent)
        if self.reflector_aperture and link in _IRS_LINKS:
            gain *= 4.0 * np.pi
        return gain


@dataclass
class ChannelRealization:
    """All six channel blocks of one coherence episode.

    h_ri is the IRS-to-reader block stored reader-side (M x N), so composite
    channels are plain products: h_ri @ (theta * h_si) and so on.
    """

    h_st: complex
    h_si: np.ndarray
    h_sr: np.ndarray
    h_tr: np.ndarray
    h_ti: np.ndarray
    h_ri: np.ndarray
    gains: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.h_sr.shape[0]

    @property
    def n(self):
        return self.h_si.shape[0]


def draw_rayleigh_block(rows, cols, gain, rng):
    """I.i.d. circularly-symmetric complex Gaussian entries, per-entry power = gain."""
    if gain <= 0.0:
        raise InvalidInputError(f"fading gain must be positive, got {gain}")
    scale = np.sqrt(gain / 2.0)
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


def draw_rician_block(rows, cols, gain, k, los_phases, rng):
    """Rician entries: sqrt(gain) * (sqrt(K/(K+1)) e^{j phi} + sqrt(1/(K+1)) w).

    los_phases broadcasts to (rows, cols); w ~ CN(0, 1). Per-entry mean power
    equals gain for every K >= 0, and K = 0 degenerates to Rayleigh.
    """
    if gain <= 0.0:
        raise InvalidInputError(f"fading gain must be positive, got {gain}")
    if k < 0.0:
        raise InvalidInputError(f"Rician factor must be non-negative, got {k}")
    los = np.sqrt(k / (k + 1.0)) * np.exp(1j * np.broadcast_to(los_phases, (rows, cols)))
    nlos = np.sqrt(1.0 / (2.0 * (k + 1.0))) * (
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    )
    return np.sqrt(gain) * (los + nlos)


def generate_realization(geometry, m, n, k_irs, rng):
    """Draw one ChannelRealization: Rician on IRS links, Rayleigh elsewhere.

    The LOS phase of a Rician block is deterministic per link (2 pi d / lambda)
    plus one uniform random common phase per block per episode; no array
    steering structure is assumed beyond that.
    """
    if m < 1 or n < 1:
        raise InvalidInputError(f"antenna/reflector counts must be >= 1, got M={m}, N={n}")
    gains = {link: geometry.link_gain(link) for link in LINKS}

    def los(link):
        d = geometry.link_distance(link)
        return 2.0 * np.pi * d / geometry.wavelength + rng.uniform(0.0, 2.0 * np.pi)

    h_si = draw_rician_block(1, n, gains["si"], k_irs, los("si"), rng)[0]
    h_ti = draw_rician_block(1, n, gains["ti"], k_irs, los("ti"), rng)[0]
    h_ri = draw_rician_block(m, n, gains["ir"], k_irs, los("ir"), rng)
    h_st = complex(draw_rayleigh_block(1, 1, gains["st"], rng)[0, 0])
    h_sr = draw_rayleigh_block(m, 1, gains["sr"], rng)[:, 0]
    h_tr = draw_rayleigh_block(m, 1, gains["tr"], rng)[:, 0]
    return ChannelRealization(h_st=h_st, h_si=h_si, h_sr=h_sr, h_tr=h_tr,
                              h_ti=h_ti, h_ri=h_ri, gains=gains)
