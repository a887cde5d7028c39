"""Array geometry optimization under the optimal-spacing constraint.

Every factorization ``M = m_h * m_v`` and split ``(alpha, gamma_split)``
gives the same capacity; these routines pick the one with the smallest total
aperture length (sum of array diagonals) or total aperture area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import DomainError

OBJECTIVES = ("length", "area")
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class GeometryProblem:
    n_antennas: int
    wavelength: float
    distance: float
    element_width: float = 0.0
    objective: str = "length"

    def __post_init__(self):
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 1:
            raise DomainError(f"n_antennas must be a positive integer, got {self.n_antennas!r}")
        if not (self.wavelength > 0 and self.distance > 0):
            raise DomainError("wavelength and distance must be > 0")
        if self.element_width < 0:
            raise DomainError(f"element_width must be >= 0, got {self.element_width}")
        if self.objective not in OBJECTIVES:
            raise DomainError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")


@dataclass(frozen=True, eq=False)
class GeometrySolution:
    m_h: int
    m_v: int
    alpha: float
    gamma_split: float
    objective_value: float
    source: str
    # oracle only: objective over the (alpha, gamma_split) grid for each m_h
    surface: Optional[Dict[int, np.ndarray]] = field(default=None, repr=False)


def divisors(n):
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _check_divisor(n_antennas, m_h):
    if int(m_h) != m_h or m_h < 1 or n_antennas % m_h:
        raise DomainError(f"m_h={m_h!r} does not divide M={n_antennas}")
    return int(m_h), n_antennas // int(m_h)


def aperture_sides(n_antennas, m_h, wavelength, distance, element_width, alpha, gamma_split):
    """``(L_h_t, L_v_t, L_h_r, L_v_r)``; broadcasts over ``alpha`` and ``gamma_split``."""
    m_h, m_v = _check_divisor(n_antennas, m_h)
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma_split, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)) or np.any((gamma < 0) | (gamma > 1)):
        raise DomainError("alpha and gamma_split must lie in [0, 1]")
    base_h = wavelength * distance / m_h
    base_v = wavelength * distance / m_v
    w = element_width
    return (
        base_h**alpha * (m_h - 1) + w,
        base_v**gamma * (m_v - 1) + w,
        base_h ** (1.0 - alpha) * (m_h - 1) + w,
        base_v ** (1.0 - gamma) * (m_v - 1) + w,
    )


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def total_aperture_length(n_antennas, m_h, wavelength, distance, element_width, alpha=0.5, gamma_split=0.5):
    lht, lvt, lhr, lvr = aperture_sides(
        n_antennas, m_h, wavelength, distance, element_width, alpha, gamma_split
    )
    return _scalar(np.hypot(lht, lvt) + np.hypot(lhr, lvr))


def total_aperture_area(n_antennas, m_h, wavelength, distance, element_width, alpha=0.5, gamma_split=0.5):
    lht, lvt, lhr, lvr = aperture_sides(
        n_antennas, m_h, wavelength, distance, element_width, alpha, gamma_split
    )
    return _scalar(lht * lvt + lhr * lvr)


def _objective_fn(objective):
    return total_aperture_length if objective == "length" else total_aperture_area


def _evaluate(problem, m_h, alpha, gamma_split):
    fn = _objective_fn(problem.objective)
    return fn(
        problem.n_antennas, m_h, problem.wavelength, problem.distance,
        problem.element_width, alpha, gamma_split,
    )


def minimize_length(problem):
    """Square arrays of identical size; divisor scan when M is not a square."""
    if problem.objective != "length":
        raise DomainError("minimize_length needs a length-objective problem")
    n = problem.n_antennas
    root = math.isqrt(n)
    if root * root == n:
        m_h = root
    else:
        values = {m: _evaluate(problem, m, 0.5, 0.5) for m in divisors(n)}
        cutoff = min(values.values()) * (1 + _TIE_RTOL)
        m_h = min((m for m, v in values.items() if v <= cutoff), key=lambda m: (abs(m - n // m), -m))
    value = _evaluate(problem, m_h, 0.5, 0.5)
    return GeometrySolution(m_h, n // m_h, 0.5, 0.5, value, "closed_form")


def minimize_area(problem):
    """Horizontal uniform linear arrays of identical size."""
    if problem.objective != "area":
        raise DomainError("minimize_area needs an area-objective problem")
    n = problem.n_antennas
    value = _evaluate(problem, n, 0.5, 0.5)
    return GeometrySolution(n, 1, 0.5, 0.5, value, "closed_form")


def minimize(problem):
    return minimize_length(problem) if problem.objective == "length" else minimize_area(problem)


def grid_oracle(problem, alpha_steps=101, gamma_steps=101):
    """Exhaustive search over every divisor pair and an (alpha, gamma_split) grid.

    Values within a relative 1e-12 of the minimum count as ties, resolved by
    smaller |m_h - m_v|, then larger m_h (horizontal arrays first), then
    smaller alpha and gamma_split. When an axis holds a single antenna its
    split exponent has no effect.
    """
    if alpha_steps < 2 or gamma_steps < 2:
        raise DomainError("grid needs at least 2 steps per axis")
    alphas = np.linspace(0.0, 1.0, alpha_steps)
    gammas = np.linspace(0.0, 1.0, gamma_steps)
    a_grid, g_grid = np.meshgrid(alphas, gammas, indexing="ij")
    n = problem.n_antennas

    surface = {m_h: _evaluate(problem, m_h, a_grid, g_grid) for m_h in divisors(n)}
    best = min(float(v.min()) for v in surface.values())
    cutoff = best + _TIE_RTOL * abs(best)

    candidates = []
    for m_h, values in surface.items():
        for ia, ig in zip(*np.nonzero(values <= cutoff)):
            candidates.append((abs(m_h - n // m_h), -m_h, alphas[ia], gammas[ig], values[ia, ig]))
    _, neg_m_h, alpha, gamma, value = min(candidates)
    m_h = -neg_m_h
    return GeometrySolution(
        m_h, n // m_h, float(alpha), float(gamma), float(value), "grid_oracle", surface
    )
