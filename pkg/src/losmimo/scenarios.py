"""Experiment scenarios runnable from the command line.

Each scenario has a ``resolve`` step that reads and validates every
parameter it needs from :class:`~losmimo.config.Params`, and a ``compute``
step that turns the resolved parameters into CSV rows. Rows are produced in
grid order whatever the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import aperture_gain, channel, eigencap, geometry, optimizer, scaling
from .geometry import LinkGeometry, SpacingSplit


@dataclass
class RunContext:
    c: float = geometry.SPEED_OF_LIGHT
    threads: int = 1
    quad_order: int = 16


@dataclass
class ScenarioOutput:
    columns: List[str]
    rows: List[list]
    summary: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    resolve: Callable
    compute: Callable


def _map(ctx, fn, items):
    if ctx.threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(ctx.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _wavelength(p, ctx, default_frequency):
    if "link.wavelength_m" in p:
        return p.number("link.wavelength_m", positive=True)
    return ctx.c / p.number("link.frequency_hz", default_frequency, positive=True)


def _element_width(p, wavelength, default_factor=0.5):
    if "array.element_width_m" in p:
        return p.number("array.element_width_m", nonnegative=True)
    return wavelength * p.number("array.element_width_factor_dimensionless", default_factor, nonnegative=True)


def _bandwidth_model(p, default="proportional"):
    kind = p.choice("bandwidth.model", ("proportional", "fixed"), default)
    if kind == "proportional":
        return scaling.ProportionalBandwidth(p.number("bandwidth.coef_dimensionless", 0.03, positive=True))
    return scaling.FixedBandwidth(p.number("bandwidth.fixed_hz", 90e6, positive=True))


def _fixed_area(p, gain_model=None):
    return scaling.FixedAreaSpec(
        area=p.number("aperture.area_m2", 5.0, positive=True),
        distance=p.number("link.distance_m", 80.0, positive=True),
        element_width_factor=p.number("array.element_width_factor_dimensionless", 0.5, nonnegative=True),
        power_density_ratio=10 ** (p.number("power.p_over_n0_db", 204.0) / 10),
        bandwidth_model=_bandwidth_model(p),
        gain_model=gain_model or channel.Isotropic(),
    )


def _snr_capacity(spectrum, snr_linear, beta):
    # P = 1 W with sigma2 chosen so that P*beta/sigma2 hits the requested SNR
    sigma2 = beta / snr_linear
    return eigencap.capacity(spectrum, eigencap.waterfill(spectrum, 1.0, sigma2), sigma2).bits_per_use


# spacing-sweep ---------------------------------------------------------------

def _resolve_spacing(p, ctx):
    wavelength = _wavelength(p, ctx, 30e9)
    return dict(
        wavelength=wavelength,
        distance=p.number("link.distance_m", 100.0, positive=True),
        m_h=p.integer("array.m_h", 8),
        m_v=p.integer("array.m_v", 8),
        width=_element_width(p, wavelength),
        snr_db=p.number("power.snr_db", 25.0),
        kappas=p.numbers("xpd.kappa_dimensionless", [0.0, 0.1], low=0.0, high=1.0),
        grid=p.grid("sweep", "m", 0.05, 0.60, 200, positive=True),
    )


def _compute_spacing(r, ctx):
    snr = 10 ** (r["snr_db"] / 10)
    optimal = geometry.symmetric_optimal_spacing(r["wavelength"], r["distance"], r["m_h"], r["m_v"])

    def point(delta):
        link = LinkGeometry.uniform(r["wavelength"], r["distance"], r["m_h"], r["m_v"], delta, r["width"])
        beta = channel.channel_gain_far(link, channel.Isotropic())
        exact = eigencap.gram_eigenvalues(channel.exact_single_pol(link))
        fresnel = eigencap.gram_eigenvalues(channel.fresnel_single_pol(link))
        single = _snr_capacity(exact, snr, beta)
        return [
            (
                _snr_capacity(eigencap.dual_spectrum(exact, xpd), snr, beta),
                _snr_capacity(eigencap.dual_spectrum(fresnel, xpd), snr, beta),
                single,
            )
            for xpd in (channel.XpdModel(k) for k in r["kappas"])
        ]

    results = _map(ctx, point, r["grid"])
    rows, summary = [], []
    for ik, kappa in enumerate(r["kappas"]):
        series = [res[ik] for res in results]
        rows.extend([kappa, delta, *vals] for delta, vals in zip(r["grid"], series))
        best = int(np.argmax([v[0] for v in series]))
        summary.append(
            f"kappa={kappa:g}: peak {series[best][0]:.4f} bits/use at delta={r['grid'][best]:.5f} m "
            f"(optimal spacing {optimal[0]:.5f} m)"
        )
    columns = ["kappa", "delta_m", "capacity_exact_dual", "capacity_fresnel_dual", "capacity_exact_single"]
    return ScenarioOutput(columns, rows, summary)


# kappa-sweep -----------------------------------------------------------------

def _resolve_kappa(p, ctx):
    wavelength = _wavelength(p, ctx, 30e9)
    return dict(
        wavelength=wavelength,
        distance=p.number("link.distance_m", 100.0, positive=True),
        m_h=p.integer("array.m_h", 16),
        m_v=p.integer("array.m_v", 8),
        snr_db=p.number("power.snr_db", 25.0),
        model=p.choice("channel.model", ("fresnel", "exact"), "fresnel"),
        grid=p.grid("sweep", "dimensionless", 0.0, 1.0, 21, low=0.0, high=1.0),
    )


def _compute_kappa(r, ctx):
    link = LinkGeometry.optimal(r["wavelength"], r["distance"], r["m_h"], r["m_v"])
    build = channel.fresnel_single_pol if r["model"] == "fresnel" else channel.exact_single_pol
    single = build(link)
    beta = channel.channel_gain_far(link, channel.Isotropic())
    snr = 10 ** (r["snr_db"] / 10)
    factor = eigencap.gram_eigenvalues(single)
    cap_single = _snr_capacity(factor, snr, beta)

    def point(kappa):
        dual = channel.dual_pol(single, channel.XpdModel(kappa))
        return _snr_capacity(eigencap.gram_eigenvalues(dual), snr, beta)

    duals = _map(ctx, point, r["grid"])
    rows = [[k, c, cap_single] for k, c in zip(r["grid"], duals)]
    low = int(np.argmin(duals))
    summary = [
        f"M={link.n_antennas} locations, single-polarized capacity {cap_single:.4f} bits/use",
        f"minimum dual capacity {duals[low]:.4f} bits/use at kappa={r['grid'][low]:g}",
    ]
    return ScenarioOutput(["kappa", "capacity_dual", "capacity_single"], rows, summary)


# antennas-vs-frequency -------------------------------------------------------

def _resolve_antennas(p, ctx):
    return dict(
        spec=scaling.FixedAreaSpec(
            area=p.number("aperture.area_m2", 5.0, positive=True),
            distance=p.number("link.distance_m", 80.0, positive=True),
            element_width_factor=p.number("array.element_width_factor_dimensionless", 0.5, nonnegative=True),
        ),
        grid=p.grid("sweep", "hz", 1e9, 1e12, 61, "log", positive=True),
    )


def _compute_antennas(r, ctx):
    spec = r["spec"]

    def point(f):
        lam = ctx.c / f
        return [
            f, lam,
            scaling.max_antennas_exact(spec, lam),
            scaling.max_antennas_approx(lam, spec.distance, spec.area),
            scaling.max_antennas_integer(spec, lam),
        ]

    rows = _map(ctx, point, r["grid"])
    ratio = rows[-1][2] / rows[-1][3]
    summary = [f"exact/approx count ratio at f={rows[-1][0]:.6g} Hz: {ratio:.6f}"]
    return ScenarioOutput(["f_hz", "lambda_m", "m_exact", "m_approx", "m_int"], rows, summary)


# freq-sweep ------------------------------------------------------------------

def _resolve_freq(p, ctx):
    return dict(
        spec=_fixed_area(p),
        count=p.choice("scaling.count", scaling.COUNT_MODES, "exact"),
        grid=p.grid("sweep", "hz", 3e9, 3e12, 61, "log", positive=True),
    )


def _compute_freq(r, ctx):
    spec = r["spec"]
    series = {}
    for name, gain in scaling.GAIN_PRESETS.items():
        s = scaling.FixedAreaSpec(spec.area, spec.distance, spec.element_width_factor,
                                  spec.power_density_ratio, spec.bandwidth_model, gain)
        series[name] = scaling.capacity_vs_frequency(s, r["grid"], r["count"], ctx.c, ctx.threads)
    limit = scaling.asymptotic_capacity_limit(spec.area, spec.distance, spec.power_density_ratio)
    rows = []
    for i, f in enumerate(r["grid"]):
        iso = series["isotropic"][i]
        rows.append([
            f, iso.wavelength, iso.bandwidth, iso.m_used,
            iso.capacity_bps,
            series["directive_rx"][i].capacity_bps,
            series["directive_both"][i].capacity_bps,
            limit,
        ])
    summary = [f"isotropic limit {limit:.6g} bit/s; isotropic capacity at top frequency {rows[-1][4]:.6g} bit/s"]
    for name, points in series.items():
        top = [pt for pt in points if pt.frequency >= points[-1].frequency / 10]
        if len(top) >= 2:
            slope = scaling.growth_exponent([pt.frequency for pt in top], [pt.capacity_bps for pt in top])
            summary.append(f"{name}: log-log slope over the top decade {slope:.4f}")
    columns = ["f_hz", "lambda_m", "bandwidth_hz", "m", "capacity_isotropic_bps",
               "capacity_directive_rx_bps", "capacity_directive_both_bps", "isotropic_limit_bps"]
    return ScenarioOutput(columns, rows, summary)


# realistic -------------------------------------------------------------------

def _resolve_realistic(p, ctx):
    return dict(
        spec=_fixed_area(p),
        grid=p.grid("sweep", "hz", 10e9, 100e9, 4, positive=True),
        max_antennas=p.integer("realistic.max_antennas", 2500),
        area_per_wavelength=p.number(
            "realistic.directive_area_per_wavelength_m", aperture_gain.DIRECTIVE_AREA_PER_WAVELENGTH,
            positive=True,
        ),
    )


def _compute_realistic(r, ctx):
    rule = aperture_gain.QuadratureRule(ctx.quad_order)

    def point(f):
        return [
            aperture_gain.realistic_capacity(r["spec"], f, design, ctx.c, rule, r["max_antennas"],
                                             r["area_per_wavelength"])
            for design in ("directive_rx", "directive_both")
        ]

    rows, notes, summary = [], [], []
    for f, (rx, both) in zip(r["grid"], _map(ctx, point, r["grid"])):
        if rx is None or both is None:
            notes.append(f"skipped f_hz={f:.17g}: antenna count above realistic.max_antennas")
            continue
        rows.append([f, rx.wavelength, rx.n_antennas, rx.capacity_ideal_bps, rx.capacity_realistic_bps,
                     both.capacity_ideal_bps, both.capacity_realistic_bps])
        summary.append(
            f"f={f:.6g} Hz M={rx.n_antennas}: realistic/ideal = "
            f"{rx.capacity_realistic_bps / rx.capacity_ideal_bps:.4f} (directive rx), "
            f"{both.capacity_realistic_bps / both.capacity_ideal_bps:.4f} (directive both)"
        )
    columns = ["f_hz", "lambda_m", "m", "capacity_ideal_directive_rx_bps", "capacity_realistic_directive_rx_bps",
               "capacity_ideal_directive_both_bps", "capacity_realistic_directive_both_bps"]
    return ScenarioOutput(columns, rows, summary + notes, notes)


# design ----------------------------------------------------------------------

def _resolve_design(p, ctx):
    wavelength = _wavelength(p, ctx, 30e9)
    return dict(
        wavelength=wavelength,
        distance=p.number("link.distance_m", 100.0, positive=True),
        m_h=p.integer("array.m_h", 8),
        m_v=p.integer("array.m_v", 8),
        width=_element_width(p, wavelength),
    )


def _compute_design(r, ctx):
    lam, d, m_h, m_v = r["wavelength"], r["distance"], r["m_h"], r["m_v"]
    h, v = geometry.symmetric_optimal_spacing(lam, d, m_h, m_v)
    link = LinkGeometry.optimal(lam, d, m_h, m_v, r["width"])
    d_fa = geometry.fraunhofer_array_distance(d, m_h, m_v)
    length_h, length_v = geometry.aperture_lengths(link.tx)
    row = [
        lam, h, v, d_fa, int(d <= d_fa / 10),
        geometry.first_null_beamwidth(lam, m_h, h) if m_h > 1 else math.pi,
        geometry.beam_footprint(d, lam, m_h),
        length_h, length_v, geometry.array_diagonal(link.tx),
    ]
    columns = ["lambda_m", "spacing_h_m", "spacing_v_m", "fraunhofer_m", "finite_depth", "beamwidth_rad",
               "footprint_m", "aperture_h_m", "aperture_v_m", "diagonal_m"]
    summary = [f"optimal spacing h={h:.6g} m, v={v:.6g} m; Fraunhofer array distance {d_fa:.6g} m"]
    return ScenarioOutput(columns, [row], summary)


# capacity --------------------------------------------------------------------

def _resolve_capacity(p, ctx):
    wavelength = _wavelength(p, ctx, 30e9)
    resolved = dict(
        wavelength=wavelength,
        distance=p.number("link.distance_m", 100.0, positive=True),
        m_h=p.integer("array.m_h", 8),
        m_v=p.integer("array.m_v", 8),
        width=_element_width(p, wavelength),
        spacing=p.number("array.spacing_m", positive=True) if "array.spacing_m" in p else None,
        kappa=p.number("xpd.kappa_dimensionless", 0.0, low=0.0, high=1.0),
        snr_db=p.number("power.snr_db", 25.0),
        model=p.choice("channel.model", ("exact", "fresnel"), "exact"),
        polarization=p.choice("channel.polarization", ("dual", "single"), "dual"),
        bandwidth=p.number("bandwidth.fixed_hz", positive=True) if "bandwidth.fixed_hz" in p else None,
    )
    return resolved


def _compute_capacity(r, ctx):
    if r["spacing"] is None:
        link = LinkGeometry.optimal(r["wavelength"], r["distance"], r["m_h"], r["m_v"], r["width"])
    else:
        link = LinkGeometry.uniform(r["wavelength"], r["distance"], r["m_h"], r["m_v"], r["spacing"], r["width"])
    build = channel.fresnel_single_pol if r["model"] == "fresnel" else channel.exact_single_pol
    h = build(link)
    if r["polarization"] == "dual":
        h = channel.dual_pol(h, channel.XpdModel(r["kappa"]))
    beta = channel.channel_gain_far(link, channel.Isotropic())
    spectrum = eigencap.gram_eigenvalues(h)
    sigma2 = beta / 10 ** (r["snr_db"] / 10)
    result = eigencap.capacity(spectrum, eigencap.waterfill(spectrum, 1.0, sigma2), sigma2)
    active = int(np.count_nonzero(result.allocation.powers > 0))
    bps = result.bits_per_use * r["bandwidth"] if r["bandwidth"] else float("nan")
    row = [r["model"], r["polarization"], r["kappa"], result.bits_per_use, active, bps]
    summary = [f"{result.bits_per_use:.6f} bits/use over {active} active dimensions"]
    return ScenarioOutput(["model", "polarization", "kappa", "bits_per_use", "active_dimensions",
                           "bits_per_second"], [row], summary)


# geometry --------------------------------------------------------------------

def _resolve_geometry(p, ctx):
    wavelength = _wavelength(p, ctx, 30e9)
    return dict(
        n=p.integer("geometry.n_antennas", 64),
        wavelength=wavelength,
        distance=p.number("link.distance_m", 100.0, positive=True),
        width=_element_width(p, wavelength),
        alpha_steps=p.integer("oracle.alpha_steps", 101, minimum=2),
        gamma_steps=p.integer("oracle.gamma_steps", 101, minimum=2),
    )


def _compute_geometry(r, ctx):
    rows, summary = [], []
    for objective in optimizer.OBJECTIVES:
        problem = optimizer.GeometryProblem(r["n"], r["wavelength"], r["distance"], r["width"], objective)
        for sol in (optimizer.minimize(problem), optimizer.grid_oracle(problem, r["alpha_steps"], r["gamma_steps"])):
            rows.append([objective, sol.source, sol.m_h, sol.m_v, sol.alpha, sol.gamma_split, sol.objective_value])
            summary.append(f"{objective} [{sol.source}]: {sol.m_h}x{sol.m_v}, alpha={sol.alpha:g}, "
                           f"gamma_split={sol.gamma_split:g}, value={sol.objective_value:.6g}")
    return ScenarioOutput(["objective", "source", "m_h", "m_v", "alpha", "gamma_split", "value"], rows, summary)


# vc-example ------------------------------------------------------------------

def _resolve_vc(p, ctx):
    wavelength = _wavelength(p, ctx, 100e9)
    return dict(
        wavelength=wavelength,
        distance=p.number("link.distance_m", 50.0, positive=True),
        m_h=p.integer("array.m_h", 8),
        m_v=p.integer("array.m_v", 8),
        width=_element_width(p, wavelength),
        alphas=p.numbers("split.alpha_dimensionless", [0.0, 0.01, 0.25, 0.5, 1.0], low=0.0, high=1.0),
        kappa=p.number("xpd.kappa_dimensionless", 0.0, low=0.0, high=1.0),
        bandwidth=p.number("bandwidth.fixed_hz", 3e9, positive=True),
        power=p.number("power.total_w", 128.0, positive=True),
        noise_density=p.number("noise.density_w_per_hz", 4.0e-21, positive=True),
    )


def _compute_vc(r, ctx):
    sigma2 = r["bandwidth"] * r["noise_density"]
    xpd = channel.XpdModel(r["kappa"])

    def point(alpha):
        link = LinkGeometry.optimal(r["wavelength"], r["distance"], r["m_h"], r["m_v"], r["width"],
                                    SpacingSplit(alpha, alpha))
        lht, lvt = geometry.aperture_lengths(link.tx)
        lhr, lvr = geometry.aperture_lengths(link.rx)
        h = channel.dual_pol(channel.fresnel_single_pol(link), xpd)
        bits = eigencap.channel_capacity(h, r["power"], sigma2).bits_per_use
        return [alpha, link.tx.spacing_h, link.rx.spacing_h, lht * lvt, lhr * lvr, bits, bits * r["bandwidth"]]

    rows = _map(ctx, point, r["alphas"])
    summary = [f"alpha={row[0]:g}: tx spacing {row[1]:.5g} m, tx area {row[3]:.5g} m2, "
               f"rx area {row[4]:.5g} m2, {row[6]:.5g} bit/s" for row in rows]
    return ScenarioOutput(["alpha", "spacing_tx_m", "spacing_rx_m", "area_tx_m2", "area_rx_m2",
                           "capacity_bits_per_use", "capacity_bps"], rows, summary)


SCENARIOS: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario("spacing-sweep", "capacity vs common antenna spacing", _resolve_spacing, _compute_spacing),
        Scenario("kappa-sweep", "capacity vs cross-polar leakage", _resolve_kappa, _compute_kappa),
        Scenario("antennas-vs-frequency", "antenna count in a fixed aperture", _resolve_antennas, _compute_antennas),
        Scenario("freq-sweep", "capacity vs carrier frequency", _resolve_freq, _compute_freq),
        Scenario("realistic", "quadrature antenna gains vs ideal gains", _resolve_realistic, _compute_realistic),
        Scenario("design", "optimal spacing and near-field quantities", _resolve_design, _compute_design),
        Scenario("capacity", "one-shot link capacity", _resolve_capacity, _compute_capacity),
        Scenario("geometry", "aperture length/area optimal layouts", _resolve_geometry, _compute_geometry),
        Scenario("vc-example", "asymmetric base-station/device split", _resolve_vc, _compute_vc),
    )
}
