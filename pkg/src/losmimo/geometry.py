"""Uniform rectangular array layout and optimal-spacing formulas.

Antennas are numbered row by row starting at 1. Antenna ``m`` of an array
with ``m_h`` antennas per row sits in column ``i(m)`` and row ``j(m)``; the
transmit element is placed at ``(-i*h_t, -j*v_t, 0)`` and the receive element
at ``(-i*h_r, -j*v_r, d)``. All quantities are SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
SPEED_OF_LIGHT_APPROX = 3.0e8


def wavelength(frequency, c=SPEED_OF_LIGHT):
    """Wavelength in meters for a carrier frequency in Hz."""
    frequency = np.asarray(frequency, dtype=float)
    if np.any(frequency <= 0):
        raise DomainError(f"frequency must be positive, got {frequency}")
    out = c / frequency
    return float(out) if out.ndim == 0 else out


def _check_count(name, value):
    if int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class UraSpec:
    """Layout of one uniform rectangular array.

    ``element_width`` is the side W of a square element. A spacing is only
    required along an axis holding more than one antenna.
    """

    m_h: int
    m_v: int
    spacing_h: float = 0.0
    spacing_v: float = 0.0
    element_width: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "m_h", _check_count("m_h", self.m_h))
        object.__setattr__(self, "m_v", _check_count("m_v", self.m_v))
        if self.element_width < 0:
            raise DomainError(f"element_width must be >= 0, got {self.element_width}")
        if self.m_h > 1 and not self.spacing_h > 0:
            raise DomainError(f"spacing_h must be > 0 when m_h > 1, got {self.spacing_h}")
        if self.m_v > 1 and not self.spacing_v > 0:
            raise DomainError(f"spacing_v must be > 0 when m_v > 1, got {self.spacing_v}")

    @property
    def n_antennas(self):
        return self.m_h * self.m_v

    def indices(self):
        """Horizontal and vertical indices of antennas 1..M as two int arrays."""
        m = np.arange(self.n_antennas)
        return m % self.m_h, m // self.m_h

    def positions(self):
        """(M, 2) array of in-plane element coordinates."""
        i, j = self.indices()
        return np.column_stack((-i * self.spacing_h, -j * self.spacing_v))


@dataclass(frozen=True)
class LinkGeometry:
    """Two broadside-aligned arrays separated by ``distance``."""

    tx: UraSpec
    rx: UraSpec
    distance: float
    wavelength: float

    def __post_init__(self):
        if not self.distance > 0:
            raise DomainError(f"distance must be > 0, got {self.distance}")
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be > 0, got {self.wavelength}")
        if (self.tx.m_h, self.tx.m_v) != (self.rx.m_h, self.rx.m_v):
            raise DomainError(
                "tx and rx must share the same (m_h, m_v) layout, got "
                f"{(self.tx.m_h, self.tx.m_v)} and {(self.rx.m_h, self.rx.m_v)}"
            )

    @property
    def n_antennas(self):
        return self.tx.n_antennas

    @property
    def far_channel_gain_ok(self):
        # Diagnostic only: a common channel gain is a good model beyond 2*D.
        return self.distance >= 2 * max(array_diagonal(self.tx), array_diagonal(self.rx))

    @classmethod
    def optimal(cls, wavelength, distance, m_h, m_v, element_width=0.0, split=None):
        """Link whose spacings satisfy the orthogonality condition exactly."""
        split = split or SpacingSplit()
        h_t, h_r, v_t, v_r = split_optimal_spacing(wavelength, distance, m_h, m_v, split)
        tx = UraSpec(m_h, m_v, h_t, v_t, element_width)
        rx = UraSpec(m_h, m_v, h_r, v_r, element_width)
        return cls(tx, rx, distance, wavelength)

    @classmethod
    def uniform(cls, wavelength, distance, m_h, m_v, spacing, element_width=0.0):
        """Identical arrays with one common spacing on both axes."""
        ura = UraSpec(m_h, m_v, spacing, spacing, element_width)
        return cls(ura, ura, distance, wavelength)


@dataclass(frozen=True)
class SpacingSplit:
    """Exponents distributing the optimal spacing product between tx and rx.

    ``alpha`` acts on the horizontal axis and ``gamma_split`` on the
    vertical one; 0.5 gives identical arrays.
    """

    alpha: float = 0.5
    gamma_split: float = 0.5

    def __post_init__(self):
        for name in ("alpha", "gamma_split"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")


def antenna_index(m, m_h, m_v=None):
    """Return the (horizontal, vertical) index of 1-based antenna ``m``."""
    m_h = _check_count("m_h", m_h)
    upper = m_h * m_v if m_v is not None else None
    if int(m) != m or m < 1 or (upper is not None and m > upper):
        raise DomainError(f"antenna number {m!r} outside 1..{upper if upper else 'M'}")
    m = int(m)
    j = (m - 1) // m_h
    i = (m - 1) - m_h * j
    return i, j


def pair_distances(link):
    """(M, M) array of distances, indexed ``[m, k]`` with m on tx and k on rx."""
    i, j = link.tx.indices()
    dx = i[:, None] * link.tx.spacing_h - i[None, :] * link.rx.spacing_h
    dy = j[:, None] * link.tx.spacing_v - j[None, :] * link.rx.spacing_v
    return np.sqrt(link.distance**2 + dx**2 + dy**2)


def pair_distance(link, m, k):
    """Distance between transmit antenna ``m`` and receive antenna ``k`` (1-based)."""
    it, jt = antenna_index(m, link.tx.m_h, link.tx.m_v)
    ir, jr = antenna_index(k, link.rx.m_h, link.rx.m_v)
    dh = it * link.tx.spacing_h - ir * link.rx.spacing_h
    dv = jt * link.tx.spacing_v - jr * link.rx.spacing_v
    return math.sqrt(link.distance**2 + dh**2 + dv**2)


def array_diagonal(a):
    return math.hypot((a.m_h - 1) * a.spacing_h, (a.m_v - 1) * a.spacing_v)


def aperture_lengths(a):
    """Physical (horizontal, vertical) extent including the element width."""
    length_h = a.spacing_h * (a.m_h - 1) + a.element_width
    length_v = a.spacing_v * (a.m_v - 1) + a.element_width
    return length_h, length_v


def _check_link_inputs(wavelength, distance):
    if not wavelength > 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    if not distance > 0:
        raise DomainError(f"distance must be > 0, got {distance}")


def symmetric_optimal_spacing(wavelength, distance, m_h, m_v):
    """Spacing shared by both arrays that nulls every Gram off-diagonal."""
    _check_link_inputs(wavelength, distance)
    m_h = _check_count("m_h", m_h)
    m_v = _check_count("m_v", m_v)
    return math.sqrt(wavelength * distance / m_h), math.sqrt(wavelength * distance / m_v)


def split_optimal_spacing(wavelength, distance, m_h, m_v, split):
    """Return ``(h_t, h_r, v_t, v_r)`` with h_t*h_r = λd/m_h and v_t*v_r = λd/m_v."""
    _check_link_inputs(wavelength, distance)
    m_h = _check_count("m_h", m_h)
    m_v = _check_count("m_v", m_v)
    base_h = wavelength * distance / m_h
    base_v = wavelength * distance / m_v
    return (
        base_h**split.alpha,
        base_h ** (1.0 - split.alpha),
        base_v**split.gamma_split,
        base_v ** (1.0 - split.gamma_split),
    )


def fraunhofer_array_distance(distance, m_h, m_v):
    """Fraunhofer distance of an optimally spaced array, 2d(m_h + m_v)."""
    return 2.0 * distance * (_check_count("m_h", m_h) + _check_count("m_v", m_v))


def first_null_beamwidth(wavelength, m_h, h_r):
    ratio = wavelength / (m_h * h_r)
    if not 0.0 <= ratio <= 1.0:
        raise DomainError(f"arcsin argument lambda/(m_h*h_r) = {ratio} is outside [0, 1]")
    return 2.0 * math.asin(ratio)


def beam_footprint(distance, wavelength, m_h):
    """Physical beam width at the far array under optimal spacing."""
    _check_link_inputs(wavelength, distance)
    return 2.0 * math.sqrt(wavelength * distance / _check_count("m_h", m_h))
