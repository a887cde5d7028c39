"""Per-pair antenna gains from the aperture-gain integral.

A square receiving aperture lies in the ``z = 0`` plane and is illuminated by
a point source at height ``z̄``. Its normalized gain is

    |∫ E dA|² / (A_phy ∫ |E|² dA)

which is at most 1 by Cauchy-Schwarz and equals 1 for a uniform field.
Integrals use a tensor-product Gauss-Legendre rule.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channel import PerPairGain, XpdModel, exact_single_pol
from .eigencap import capacity, dual_spectrum, gram_eigenvalues, usa_capacity_bps, waterfill
from .errors import DomainError
from .geometry import SPEED_OF_LIGHT, LinkGeometry
from .scaling import GAIN_PRESETS, max_antennas_integer

log = logging.getLogger(__name__)

DIRECTIVE_AREA_PER_WAVELENGTH = 1.0 / (4.0 * math.pi)
MAX_PHASE_STEP = math.pi / 2
CONVENTIONS = ("normalized", "aperture_scaled")


class QuadratureAccuracyWarning(UserWarning):
    """The field phase changes too fast for the chosen quadrature order."""


@dataclass(frozen=True)
class ApertureElement:
    center: Tuple[float, float]
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise DomainError(f"element side must be > 0, got {self.side}")

    @property
    def area(self):
        return self.side**2


@dataclass(frozen=True)
class SourcePoint:
    position: Tuple[float, float, float]
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.position[2] > 0:
            raise DomainError(f"source height must be > 0, got {self.position[2]}")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre points per axis; doubled up to ``max_order`` when adaptive."""

    order: int = 16
    adaptive: bool = True
    max_order: int = 64

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise DomainError(f"quadrature order must be an integer >= 2, got {self.order!r}")

    def nodes(self, side, order=None):
        """Nodes and weights on ``[-side/2, side/2]``."""
        x, w = np.polynomial.legendre.leggauss(order or self.order)
        return 0.5 * side * x, 0.5 * side * w


def incident_field(x, y, src, wavelength):
    """Scalar field of ``src`` at in-plane points ``(x, y)``."""
    xs, ys, zs = src.position
    dx = np.asarray(x, dtype=float) - xs
    dy = np.asarray(y, dtype=float) - ys
    r = dx**2 + dy**2 + zs**2  # squared distance
    amplitude = src.amplitude / math.sqrt(4 * math.pi) * np.sqrt(zs * (dx**2 + zs**2)) / r**1.25
    return amplitude * np.exp(-2j * math.pi * np.sqrt(r) / wavelength)


def phase_step(side, offsets, wavelength, order):
    """Worst-case field phase change across one quadrature subinterval.

    ``offsets`` are source positions relative to the element center, shape (N, 3).
    """
    offsets = np.atleast_2d(offsets)
    rho = np.hypot(np.abs(offsets[:, 0]) + side / 2, np.abs(offsets[:, 1]) + side / 2)
    slope = 2 * math.pi / wavelength * rho / np.hypot(rho, offsets[:, 2])
    return slope * side / order


def _gains(side, offsets, wavelength, order, chunk=4096):
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = 0.5 * side * x, 0.5 * side * w
    px, py = (a.ravel() for a in np.meshgrid(x, x, indexing="ij"))
    pw = np.outer(w, w).ravel()
    out = np.empty(len(offsets))
    for start in range(0, len(offsets), chunk):
        off = offsets[start:start + chunk]
        dx = px[None, :] - off[:, :1]
        dy = py[None, :] - off[:, 1:2]
        zs = off[:, 2:3]
        r = dx**2 + dy**2 + zs**2
        field = np.sqrt(zs * (dx**2 + zs**2)) / r**1.25 * np.exp(-2j * math.pi * np.sqrt(r) / wavelength)
        coherent = np.abs(field @ pw) ** 2
        incoherent = (np.abs(field) ** 2) @ pw
        out[start:start + chunk] = coherent / (side**2 * incoherent)
    return out


def normalized_gains(side, offsets, wavelength, rule=None):
    """Vectorized normalized gain for sources at ``offsets`` from the element center."""
    rule = rule or QuadratureRule()
    offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
    if np.any(offsets[:, 2] <= 0):
        raise DomainError("source heights must be > 0")
    order = rule.order
    step = phase_step(side, offsets, wavelength, order).max()
    while rule.adaptive and step > MAX_PHASE_STEP and order * 2 <= rule.max_order:
        order *= 2
        step = phase_step(side, offsets, wavelength, order).max()
    if step > MAX_PHASE_STEP:
        warnings.warn(
            f"phase changes by {step:.3g} rad per quadrature subinterval at order {order}",
            QuadratureAccuracyWarning,
            stacklevel=2,
        )
    return _gains(side, offsets, wavelength, order)


def normalized_gain(element, src, wavelength, rule=None):
    offset = np.array(src.position, dtype=float) - [element.center[0], element.center[1], 0.0]
    return float(normalized_gains(element.side, offset[None, :], wavelength, rule)[0])


def _check_fit(name, ura, side):
    if (ura.m_h > 1 and side > ura.spacing_h) or (ura.m_v > 1 and side > ura.spacing_v):
        raise DomainError(
            f"{name} element side {side} m exceeds the spacing "
            f"({ura.spacing_h}, {ura.spacing_v}) m; elements would overlap"
        )


def realistic_pair_gains(link, side_t, side_r, convention="aperture_scaled", rule=None):
    """Gain tables ``[m, k]`` for every transmit/receive element pair.

    The receive gain of pair (m, k) treats transmit element ``m`` as the
    source; the transmit gain follows by reciprocity with the roles swapped.
    Identical relative offsets are integrated once.
    """
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    _check_fit("tx", link.tx, side_t)
    _check_fit("rx", link.rx, side_r)
    pt, pr = link.tx.positions(), link.rx.positions()
    rel = pt[:, None, :] - pr[None, :, :]  # [m, k] tx minus rx
    n = link.n_antennas
    rel = rel.reshape(-1, 2)

    def table(side, planar):
        offsets = np.column_stack((planar, np.full(len(planar), link.distance)))
        unique, inverse = np.unique(np.round(offsets, 12), axis=0, return_inverse=True)
        gains = normalized_gains(side, unique, link.wavelength, rule)[inverse.ravel()]
        if convention == "aperture_scaled":
            gains = gains * 4 * math.pi * side**2 / link.wavelength**2
        return gains.reshape(n, n)

    g_r = table(side_r, rel)
    g_t = table(side_t, -rel)
    return PerPairGain(g_t, g_r)


def element_side(wavelength, directive, area_per_wavelength=DIRECTIVE_AREA_PER_WAVELENGTH):
    """Side of a square element: area ∝ λ when directive, λ²/(4π) otherwise."""
    area = area_per_wavelength * wavelength if directive else wavelength**2 / (4 * math.pi)
    return math.sqrt(area)


@dataclass(frozen=True)
class RealisticPoint:
    frequency: float
    wavelength: float
    n_antennas: int
    bandwidth: float
    capacity_ideal_bps: float
    capacity_realistic_bps: float


def realistic_capacity(spec, frequency, design="directive_both", c=SPEED_OF_LIGHT, rule=None,
                       max_antennas=2500, area_per_wavelength=DIRECTIVE_AREA_PER_WAVELENGTH,
                       xpd: Optional[XpdModel] = None):
    """Exact-channel capacity with quadrature gains next to the ideal gain model.

    Returns ``None`` when the deployable count exceeds ``max_antennas``.
    """
    if design not in ("isotropic", "directive_rx", "directive_both"):
        raise DomainError(f"unknown antenna design {design!r}")
    xpd = xpd or XpdModel(0.0)
    wavelength = c / frequency
    m_int = max_antennas_integer(spec, wavelength)
    if m_int > max_antennas:
        log.info("skipping f=%g Hz: %d antennas exceed the cap of %d", frequency, m_int, max_antennas)
        return None
    per_side = math.isqrt(m_int)
    link = LinkGeometry.optimal(
        wavelength, spec.distance, per_side, per_side, spec.element_width_factor * wavelength
    )
    side_t = element_side(wavelength, design == "directive_both", area_per_wavelength)
    side_r = element_side(wavelength, design != "isotropic", area_per_wavelength)
    gains = realistic_pair_gains(link, side_t, side_r, "aperture_scaled", rule)

    bandwidth = spec.bandwidth_model(frequency)
    sigma2 = bandwidth  # N0 normalized to 1, so P equals P/N0
    power = spec.power_density_ratio
    spectrum = dual_spectrum(gram_eigenvalues(exact_single_pol(link, gains)), xpd)
    bits = capacity(spectrum, waterfill(spectrum, power, sigma2), sigma2).bits_per_use

    beta_ideal = GAIN_PRESETS[design].far_product(wavelength) * (
        wavelength / (4 * math.pi * spec.distance)
    ) ** 2
    ideal = usa_capacity_bps(m_int, power, beta_ideal, bandwidth)
    return RealisticPoint(frequency, wavelength, m_int, bandwidth, ideal, bandwidth * bits)
