"""Antenna count in a fixed aperture and capacity versus carrier frequency.

Both arrays are uniform square arrays of area ``A`` with element width
``W = w * wavelength`` and the symmetric optimal spacing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import GainModel, Isotropic, WavelengthPowerGain
from .eigencap import usa_capacity_bps
from .errors import DomainError
from .geometry import SPEED_OF_LIGHT

LOG2_E = 1.0 / math.log(2.0)
COUNT_MODES = ("exact", "approx", "integer")


@dataclass(frozen=True)
class ProportionalBandwidth:
    coef: float = 0.03

    def __post_init__(self):
        if not self.coef > 0:
            raise DomainError(f"bandwidth coefficient must be > 0, got {self.coef}")

    def __call__(self, frequency):
        return self.coef * frequency


@dataclass(frozen=True)
class FixedBandwidth:
    hz: float = 90e6

    def __post_init__(self):
        if not self.hz > 0:
            raise DomainError(f"bandwidth must be > 0, got {self.hz}")

    def __call__(self, frequency):
        return self.hz


GAIN_PRESETS = {
    "isotropic": Isotropic(),
    "directive_rx": WavelengthPowerGain(1.0, 1.0),
    "directive_both": WavelengthPowerGain(1.0, 2.0),
}


@dataclass(frozen=True)
class FixedAreaSpec:
    area: float
    distance: float
    element_width_factor: float = 0.5
    power_density_ratio: float = 10 ** 20.4
    bandwidth_model: object = field(default_factory=ProportionalBandwidth)
    gain_model: GainModel = field(default_factory=Isotropic)

    def __post_init__(self):
        if not self.area > 0:
            raise DomainError(f"area must be > 0, got {self.area}")
        if not self.distance > 0:
            raise DomainError(f"distance must be > 0, got {self.distance}")
        if self.element_width_factor < 0:
            raise DomainError(f"element_width_factor must be >= 0, got {self.element_width_factor}")
        if not self.power_density_ratio > 0:
            raise DomainError("power_density_ratio must be > 0")


@dataclass(frozen=True)
class FrequencyPoint:
    frequency: float
    wavelength: float
    m_real: float
    m_int: int
    m_used: float
    bandwidth: float
    capacity_bps: float


def _check_fits(spec, wavelength):
    if spec.element_width_factor * wavelength >= math.sqrt(spec.area):
        raise DomainError(
            f"element width {spec.element_width_factor * wavelength} m does not fit in an "
            f"aperture of side {math.sqrt(spec.area)} m (wavelength={wavelength})"
        )


def max_antennas_exact(spec, wavelength):
    """Real-valued antenna count filling the aperture exactly."""
    _check_fits(spec, wavelength)
    ld = wavelength * spec.distance
    k0 = 2.0 + (spec.element_width_factor * wavelength - math.sqrt(spec.area)) ** 2 / ld
    return ((k0 + math.sqrt(k0 * k0 - 4.0)) / 2.0) ** 2


def square_side(spec, wavelength, per_side):
    """Physical side of a square array with ``per_side`` antennas per row."""
    spacing = math.sqrt(wavelength * spec.distance / per_side)
    return spacing * (per_side - 1) + spec.element_width_factor * wavelength


def max_antennas_integer(spec, wavelength):
    """Largest deployable n*n count whose array side fits in sqrt(A)."""
    side = math.sqrt(spec.area)
    n = max(1, math.isqrt(int(max_antennas_exact(spec, wavelength))))
    while n > 1 and square_side(spec, wavelength, n) > side:
        n -= 1
    while square_side(spec, wavelength, n + 1) <= side:
        n += 1
    return n * n


def max_antennas_approx(wavelength, distance, area):
    """Small-wavelength approximation (A / (λd))²."""
    if not (wavelength > 0 and distance > 0 and area > 0):
        raise DomainError("wavelength, distance and area must be > 0")
    return (area / (wavelength * distance)) ** 2


def _point(spec, frequency, count, c):
    wavelength = c / frequency
    try:
        m_real = max_antennas_exact(spec, wavelength)
        m_int = max_antennas_integer(spec, wavelength)
    except DomainError as exc:
        raise DomainError(f"at f={frequency} Hz: {exc}") from exc
    m_used = {
        "exact": m_real,
        "integer": float(m_int),
        "approx": max_antennas_approx(wavelength, spec.distance, spec.area),
    }[count]
    bandwidth = spec.bandwidth_model(frequency)
    beta = spec.gain_model.far_product(wavelength) * (wavelength / (4 * math.pi * spec.distance)) ** 2
    cap = usa_capacity_bps(m_used, spec.power_density_ratio, beta, bandwidth)
    return FrequencyPoint(frequency, wavelength, m_real, m_int, m_used, bandwidth, cap)


def capacity_vs_frequency(spec, frequencies, count="exact", c=SPEED_OF_LIGHT, threads=1):
    """Perfect-XPD capacity of the fixed-area link at each carrier frequency."""
    if count not in COUNT_MODES:
        raise DomainError(f"count must be one of {COUNT_MODES}, got {count!r}")
    frequencies = [float(f) for f in frequencies]
    if not frequencies or any(f <= 0 for f in frequencies):
        raise DomainError("frequency grid must be nonempty and positive")
    if any(b <= a for a, b in zip(frequencies, frequencies[1:])):
        raise DomainError("frequency grid must be strictly ascending")
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda f: _point(spec, f, count, c), frequencies))
    return [_point(spec, f, count, c) for f in frequencies]


def asymptotic_capacity_limit(area, distance, power_density_ratio):
    """Limit of the isotropic-antenna capacity as the wavelength vanishes."""
    if not (area > 0 and distance > 0 and power_density_ratio > 0):
        raise DomainError("area, distance and power_density_ratio must be > 0")
    return (area / (4 * math.pi * distance**2)) ** 2 * power_density_ratio * LOG2_E


def growth_exponent(frequencies, capacities, window=None):
    """Least-squares slope of log C against log f, optionally within ``window``."""
    f = np.asarray(frequencies, dtype=float)
    cap = np.asarray(capacities, dtype=float)
    if f.shape != cap.shape:
        raise DomainError("frequency and capacity series differ in length")
    if window is not None:
        lo, hi = window
        keep = (f >= lo) & (f <= hi)
        f, cap = f[keep], cap[keep]
    if f.size < 2 or np.ptp(f) == 0:
        raise DomainError(f"need at least two distinct frequencies, got {f.size}")
    if np.any(f <= 0) or np.any(cap <= 0):
        raise DomainError("growth exponent needs positive frequencies and capacities")
    slope, _ = np.polyfit(np.log(f), np.log(cap), 1)
    return float(slope)
