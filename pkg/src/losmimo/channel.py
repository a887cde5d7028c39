"""Line-of-sight channel matrices for single- and dual-polarized arrays.

Matrices follow the ``y = H x`` convention: row ``k`` is a receive antenna and
column ``m`` a transmit antenna. Dual-polarized matrices put the first
polarization on indices ``0..M-1`` and the second on ``M..2M-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .geometry import LinkGeometry, antenna_index, pair_distances

_DIRICHLET_EPS = 1e-12


@dataclass(frozen=True)
class XpdModel:
    """Cross-polar leakage between the two polarizations.

    ``kappa`` is the fraction of power ending up in the wrong polarization.
    Build from the per-element leakage with :meth:`from_leakage`.
    """

    kappa: float = 0.0
    leakage: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise DomainError(f"kappa must lie in [0, 1], got {self.kappa}")
        if self.leakage is not None:
            if not 0.0 <= self.leakage <= 1.0:
                raise DomainError(f"leakage must lie in [0, 1], got {self.leakage}")
            expected = 2.0 * (1.0 - self.leakage) * self.leakage
            if not math.isclose(self.kappa, expected, rel_tol=1e-12, abs_tol=1e-15):
                raise DomainError(
                    f"kappa={self.kappa} inconsistent with leakage={self.leakage} "
                    f"(expected {expected})"
                )

    @classmethod
    def from_leakage(cls, leakage):
        return cls(kappa=2.0 * (1.0 - leakage) * leakage, leakage=leakage)

    @property
    def coupling(self):
        """The 2x2 coupling matrix K."""
        a, b = math.sqrt(1.0 - self.kappa), math.sqrt(self.kappa)
        return np.array([[a, b], [b, a]])

    @property
    def mu1(self):
        return 1.0 + 2.0 * math.sqrt((1.0 - self.kappa) * self.kappa)

    @property
    def mu2(self):
        # max() guards the -0.0 / tiny negative at kappa = 0.5
        return max(0.0, 1.0 - 2.0 * math.sqrt((1.0 - self.kappa) * self.kappa))


class GainModel:
    """Antenna gains G^t, G^r entering the per-pair channel gain."""

    def pair_products(self, link):
        """(M, M) array of G^t*G^r indexed ``[m, k]``."""
        return np.full((link.n_antennas, link.n_antennas), self.far_product(link.wavelength))

    def far_product(self, wavelength):
        raise NotImplementedError


@dataclass(frozen=True)
class Isotropic(GainModel):
    def far_product(self, wavelength):
        return 1.0


@dataclass(frozen=True)
class FixedGain(GainModel):
    g_t: float = 1.0
    g_r: float = 1.0

    def __post_init__(self):
        if not (self.g_t > 0 and self.g_r > 0):
            raise DomainError(f"gains must be > 0, got g_t={self.g_t}, g_r={self.g_r}")

    def far_product(self, wavelength):
        return self.g_t * self.g_r


@dataclass(frozen=True)
class WavelengthPowerGain(GainModel):
    """G^t G^r = g0 / λ^rho, e.g. rho=1 for a directive receiver only.

    The 1/λ gain law is a modeling convention taken literally (λ in meters),
    not a dimensionally consistent aperture formula.
    """

    g0: float = 1.0
    rho: float = 2.0

    def __post_init__(self):
        if not self.g0 > 0:
            raise DomainError(f"g0 must be > 0, got {self.g0}")
        if not 0.0 < self.rho <= 2.0:
            raise DomainError(f"rho must lie in (0, 2], got {self.rho}")

    def far_product(self, wavelength):
        return self.g0 / wavelength**self.rho


@dataclass(frozen=True, eq=False)
class PerPairGain(GainModel):
    """Tabulated gains, both arrays indexed ``[m, k]``."""

    g_t: np.ndarray
    g_r: np.ndarray

    def __post_init__(self):
        g_t = np.asarray(self.g_t, dtype=float)
        g_r = np.asarray(self.g_r, dtype=float)
        if g_t.shape != g_r.shape or g_t.ndim != 2 or g_t.shape[0] != g_t.shape[1]:
            raise DomainError(f"gain tables must be equal square arrays, got {g_t.shape}, {g_r.shape}")
        if np.any(g_t <= 0) or np.any(g_r <= 0):
            raise DomainError("tabulated gains must be > 0")
        object.__setattr__(self, "g_t", g_t)
        object.__setattr__(self, "g_r", g_r)

    def pair_products(self, link):
        if self.g_t.shape[0] != link.n_antennas:
            raise DomainError(
                f"gain table covers {self.g_t.shape[0]} antennas, link has {link.n_antennas}"
            )
        return self.g_t * self.g_r

    def far_product(self, wavelength):
        raise DomainError("per-pair gains have no single far-field gain product")


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    entries: np.ndarray
    model: str
    polarization: str
    link: LinkGeometry
    gains: GainModel = field(default_factory=Isotropic)
    xpd: Optional[XpdModel] = None

    def __post_init__(self):
        if self.model not in ("exact", "fresnel"):
            raise DomainError(f"unknown channel model {self.model!r}")
        if self.polarization not in ("single", "dual"):
            raise DomainError(f"unknown polarization {self.polarization!r}")
        entries = np.asarray(self.entries, dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    def gram(self):
        h = self.entries
        return h.conj().T @ h

    def frobenius_sq(self):
        return float(np.sum(np.abs(self.entries) ** 2))


def _beta_table(link, gains):
    d_mk = pair_distances(link)
    return gains.pair_products(link) * (link.wavelength / (4.0 * math.pi * d_mk)) ** 2, d_mk


def channel_gain(link, gains, m, k):
    """β for transmit antenna ``m`` and receive antenna ``k`` (1-based)."""
    antenna_index(m, link.tx.m_h, link.tx.m_v)
    antenna_index(k, link.rx.m_h, link.rx.m_v)
    betas, _ = _beta_table(link, gains)
    return float(betas[m - 1, k - 1])


def channel_gains(link, gains):
    """(M, M) table of per-pair channel gains indexed ``[m, k]``."""
    return _beta_table(link, gains)[0]


def channel_gain_far(link, gains):
    """Common channel gain obtained by replacing every pair distance with d."""
    return gains.far_product(link.wavelength) * (link.wavelength / (4.0 * math.pi * link.distance)) ** 2


def exact_single_pol(link, gains=None):
    """Spherical-wavefront channel with per-pair path gains."""
    gains = gains or Isotropic()
    betas, d_mk = _beta_table(link, gains)
    h = np.sqrt(betas) * np.exp(-2j * math.pi * (d_mk - link.distance) / link.wavelength)
    return ChannelMatrix(h.T, "exact", "single", link, gains)


def fresnel_offsets(link):
    """(M, M) squared in-plane offsets δ indexed ``[m, k]``."""
    i, j = link.tx.indices()
    dx = i[:, None] * link.tx.spacing_h - i[None, :] * link.rx.spacing_h
    dy = j[:, None] * link.tx.spacing_v - j[None, :] * link.rx.spacing_v
    return dx**2 + dy**2


def fresnel_single_pol(link, gains=None):
    """Parabolic-wavefront channel with the common far-field gain."""
    gains = gains or Isotropic()
    beta = channel_gain_far(link, gains)
    delta = fresnel_offsets(link)
    h = math.sqrt(beta) * np.exp(-1j * math.pi * delta / (link.distance * link.wavelength))
    return ChannelMatrix(h.T, "fresnel", "single", link, gains)


def dual_pol(single, xpd):
    """Kronecker composition K ⊗ H of a single-polarized channel."""
    if single.polarization != "single":
        raise DomainError("dual_pol expects a single-polarized channel")
    entries = np.kron(xpd.coupling, single.entries)
    return ChannelMatrix(entries, single.model, "dual", single.link, single.gains, xpd)


def xpd_eigenpairs(xpd):
    """Eigenpairs of KᴴK, strongest first."""
    s = 1.0 / math.sqrt(2.0)
    return (xpd.mu1, np.array([s, s])), (xpd.mu2, np.array([-s, s]))


def _dirichlet_ratio(n, x):
    """|sin(n x) / sin(x)| with the removable singularity filled in."""
    den = math.sin(x)
    if abs(den) < _DIRICHLET_EPS:
        return float(n)
    return abs(math.sin(n * x) / den)


def gram_offdiag_magnitude(link, l, k, gains=None):
    """Closed-form |(HᴴH)_{l,k}| of the Fresnel channel for antennas ``l != k``.

    Each axis contributes a Dirichlet kernel evaluated at the index offset of
    the two antennas; an axis where the offset is zero contributes its count.
    """
    if l == k:
        raise DomainError("gram_offdiag_magnitude requires l != k")
    gains = gains or Isotropic()
    il, jl = antenna_index(l, link.tx.m_h, link.tx.m_v)
    ik, jk = antenna_index(k, link.tx.m_h, link.tx.m_v)
    scale = math.pi / (link.wavelength * link.distance)
    x_h = scale * (il - ik) * link.tx.spacing_h * link.rx.spacing_h
    x_v = scale * (jl - jk) * link.tx.spacing_v * link.rx.spacing_v
    beta = channel_gain_far(link, gains)
    return beta * _dirichlet_ratio(link.tx.m_h, x_h) * _dirichlet_ratio(link.tx.m_v, x_v)
