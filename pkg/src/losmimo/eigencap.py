"""Gram spectra, water-filling and capacity.

Powers are in watts, noise variances in watts, capacities in bits per channel
use unless a bandwidth is supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError

CLAMP_RELATIVE = 1e-10
BISECTION_MAX_ITER = 200
BISECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSpectrum:
    """Nonnegative eigenvalues sorted in descending order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float).ravel())[::-1]
        if values.size == 0:
            raise DomainError("spectrum is empty")
        if not np.all(np.isfinite(values)):
            raise DomainError("spectrum contains non-finite values")
        if values[-1] < -CLAMP_RELATIVE * max(values[0], 0.0):
            raise DomainError(f"eigenvalue {values[-1]} is significantly negative")
        values = np.maximum(values, 0.0)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def total(self):
        return float(self.values.sum())


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    powers: np.ndarray
    total: float
    water_level: Optional[float] = None

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=float)
        powers.setflags(write=False)
        object.__setattr__(self, "powers", powers)


@dataclass(frozen=True, eq=False)
class CapacityResult:
    bits_per_use: float
    per_dimension_rates: np.ndarray
    allocation: PowerAllocation
    noise_variance: float
    bandwidth: Optional[float] = None
    noise_density: Optional[float] = None

    @property
    def bits_per_second(self):
        if self.bandwidth is None:
            return None
        return self.bandwidth * self.bits_per_use


def gram_eigenvalues(channel):
    """Eigenvalues of HᴴH for a :class:`~losmimo.channel.ChannelMatrix` or array."""
    h = getattr(channel, "entries", channel)
    h = np.asarray(h, dtype=complex)
    if not np.all(np.isfinite(h)):
        raise DomainError("channel matrix has non-finite entries")
    gram = h.conj().T @ h
    try:
        values = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"Hermitian eigendecomposition did not converge: {exc}",
            {"size": gram.shape[0], "frobenius_sq": float(np.sum(np.abs(h) ** 2))},
        ) from exc
    return EigenSpectrum(values)


def dual_spectrum(single, xpd):
    """Spectrum of (K ⊗ H)ᴴ(K ⊗ H) from the spectrum of HᴴH."""
    values = _as_values(single)
    return EigenSpectrum(np.concatenate((xpd.mu1 * values, xpd.mu2 * values)))


def _as_values(spectrum):
    if isinstance(spectrum, EigenSpectrum):
        return spectrum.values
    return EigenSpectrum(spectrum).values


def waterfill(spectrum, total_power, sigma2):
    """Water-filling over parallel channels with gains ``spectrum``.

    The water level is bracketed by bisection and then refined in closed form
    on the active set, so the powers sum to ``total_power`` to rounding.
    Returned powers follow the order of ``spectrum.values`` (descending).
    """
    values = _as_values(spectrum)
    if not total_power > 0:
        raise DomainError(f"total_power must be > 0, got {total_power}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be > 0, got {sigma2}")
    positive = values > 0
    if not positive.any():
        raise DomainError("water-filling needs at least one positive eigenvalue")

    floors = np.full(values.shape, np.inf)
    floors[positive] = sigma2 / values[positive]
    lo = floors[positive].min()
    hi = floors[positive].max() + total_power

    def poured(level):
        return np.maximum(level - floors, 0.0).sum()

    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if poured(mid) > total_power:
            hi = mid
        else:
            lo = mid
        if hi - lo <= BISECTION_TOL * total_power or not lo < mid < hi:
            break
    else:
        raise ConvergenceError(
            "water level bisection did not converge",
            {"iterations": BISECTION_MAX_ITER, "bracket": (lo, hi), "total_power": total_power},
        )

    # The bracket fixes the active set; the level itself is then exact.
    order = np.sort(floors[positive])
    cumulative = np.cumsum(order)
    n = max(1, int(np.count_nonzero(order < 0.5 * (lo + hi))))

    def level_for(count):
        return (total_power + cumulative[count - 1]) / count

    while n > 1 and level_for(n) <= order[n - 1]:
        n -= 1
    while n < order.size and level_for(n) > order[n]:
        n += 1
    level = level_for(n)
    powers = np.maximum(level - floors, 0.0)
    return PowerAllocation(powers, float(total_power), float(level))


def two_level_waterfill(mu1, mu2, beta, n_antennas, total_power, sigma2):
    """Closed-form allocation over M copies of μ1βM and M copies of μ2βM.

    Powers are returned as ``[q_1]*M + [q_2]*M``.
    """
    if mu1 <= 0:
        raise DomainError(f"mu1 must be > 0, got {mu1}")
    if not mu1 >= mu2 >= 0:
        raise DomainError(f"need mu1 >= mu2 >= 0, got mu1={mu1}, mu2={mu2}")
    m = n_antennas
    if total_power <= two_level_threshold(mu1, mu2, beta, sigma2):
        q1, q2 = total_power / m, 0.0
    else:
        q1 = total_power / (2 * m) + sigma2 / (2 * mu2 * beta * m) - sigma2 / (2 * mu1 * beta * m)
        q2 = total_power / (2 * m) + sigma2 / (2 * mu1 * beta * m) - sigma2 / (2 * mu2 * beta * m)
    powers = np.concatenate((np.full(m, q1), np.full(m, q2)))
    return PowerAllocation(powers, float(total_power))


def two_level_threshold(mu1, mu2, beta, sigma2):
    """Power above which both eigenvalue levels receive power."""
    if mu2 == 0:
        return math.inf
    return sigma2 / (mu2 * beta) - sigma2 / (mu1 * beta)


def capacity(spectrum, allocation, sigma2, bandwidth=None, noise_density=None):
    values = _as_values(spectrum)
    powers = allocation.powers
    if powers.shape != values.shape:
        raise DomainError(f"allocation has {powers.size} entries, spectrum has {values.size}")
    rates = np.log2(1.0 + powers * values / sigma2)
    return CapacityResult(float(rates.sum()), rates, allocation, sigma2, bandwidth, noise_density)


def equal_power_capacity(spectrum, total_power, sigma2):
    values = _as_values(spectrum)
    allocation = PowerAllocation(np.full(values.shape, total_power / values.size), total_power)
    return capacity(values, allocation, sigma2)


def channel_capacity(channel, total_power, sigma2):
    """Full pipeline: Gram eigenvalues, water-filling, capacity."""
    spectrum = gram_eigenvalues(channel)
    return capacity(spectrum, waterfill(spectrum, total_power, sigma2), sigma2)


def optimal_capacity_closed_form(mu1, mu2, beta, n_antennas, total_power, sigma2):
    """Capacity at the optimal spacing when both eigenvalue levels are active."""
    if mu2 <= 0:
        raise DomainError("closed form is undefined for mu2 = 0; use the water-filling path")
    threshold = two_level_threshold(mu1, mu2, beta, sigma2)
    if total_power <= threshold:
        raise DomainError(f"total_power={total_power} does not exceed the threshold {threshold}")
    snr = total_power * beta / (2.0 * sigma2)
    m = n_antennas
    return m * math.log2(1.0 + snr * mu1 + (mu1 - mu2) / (2.0 * mu2)) + m * math.log2(
        1.0 + snr * mu2 + (mu2 - mu1) / (2.0 * mu1)
    )


def jensen_equal_power_bound(factor_eigenvalues, mus, total_power, sigma2, n_antennas):
    """Upper bound on equal-power dual-polarized capacity for a given Frobenius norm."""
    factor = np.asarray(factor_eigenvalues, dtype=float)
    m = n_antennas
    mean = factor.sum() / m
    return float(sum(m * math.log2(1.0 + total_power * mu / (2 * m * sigma2) * mean) for mu in mus))


def dual_equal_power_capacity(factor_eigenvalues, mus, total_power, sigma2, n_antennas):
    """Equal-power capacity over the products μ_i·λ_m."""
    factor = np.asarray(factor_eigenvalues, dtype=float)
    m = n_antennas
    return float(
        sum(np.log2(1.0 + total_power * mu * factor / (2 * m * sigma2)).sum() for mu in mus)
    )


def capacity_bps(bits_per_use, bandwidth):
    """Bits per second for a capacity computed with σ² = B·N0."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    return bandwidth * bits_per_use


def usa_capacity_bps(n_antennas, power_over_n0, beta, bandwidth):
    """Perfect-XPD capacity 2BM·log2(1 + Pβ/(2B·N0)) in bits/s."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    snr = power_over_n0 * beta / (2.0 * bandwidth)
    return 2.0 * bandwidth * n_antennas * math.log1p(snr) / math.log(2.0)
