"""Acceptance criteria, one test per criterion with pinned tolerances.

Run ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from losmimo import aperture_gain as ag
from losmimo import channel, eigencap, geometry, optimizer, scaling
from losmimo.channel import FixedGain, Isotropic, XpdModel
from losmimo.eigencap import EigenSpectrum
from losmimo.geometry import LinkGeometry, SpacingSplit
from losmimo.optimizer import GeometryProblem

LAM, DIST = 0.01, 100.0
SNR = 10**2.5


def snr_capacity(spectrum, beta, snr=SNR):
    sigma2 = beta / snr
    return eigencap.capacity(spectrum, eigencap.waterfill(spectrum, 1.0, sigma2), sigma2).bits_per_use


def test_ac1_optimal_spacing_peak(criterion):
    with criterion(1, "optimal-spacing peak of the exact-model spacing sweep") as info:
        start = time.perf_counter()
        deltas = np.linspace(0.05, 0.60, 200)
        caps = []
        for delta in deltas:
            link = LinkGeometry.uniform(LAM, DIST, 8, 8, delta, LAM / 2)
            beta = channel.channel_gain_far(link, Isotropic())
            single = eigencap.gram_eigenvalues(channel.exact_single_pol(link))
            caps.append(snr_capacity(eigencap.dual_spectrum(single, XpdModel(0.0)), beta))
        elapsed = time.perf_counter() - start
        best = int(np.argmax(caps))
        info.append(f"peak {caps[best]:.3f} bits/use at delta={deltas[best]:.5f} m, {elapsed:.1f} s")
        assert abs(deltas[best] / 0.35355 - 1) <= 0.02
        assert abs(caps[best] / 936.2 - 1) <= 0.01
        assert elapsed < 60


def test_ac2_fresnel_exactness(criterion):
    with criterion(2, "Fresnel Gram is diagonal at the optimum, dual spectrum is {mu1 bM, mu2 bM}") as info:
        link = LinkGeometry.optimal(LAM, DIST, 8, 8, LAM / 2)
        h = channel.fresnel_single_pol(link)
        beta, m = channel.channel_gain_far(link, Isotropic()), link.n_antennas
        gram = h.gram()
        off = np.abs(gram - np.diag(np.diag(gram))).max()
        info.append(f"max off-diagonal {off / (beta * m):.2e} bM")
        assert off < 1e-9 * beta * m
        worst = 0.0
        for kappa in (0.0, 0.1, 0.5):
            xpd = XpdModel(kappa)
            eig = np.sort(np.linalg.eigvalsh(channel.dual_pol(h, xpd).gram()))[::-1]
            target = np.array([xpd.mu1 * beta * m] * m + [xpd.mu2 * beta * m] * m)
            # a zero target (mu2 at kappa = 0.5) is compared at the scale bM
            err = np.abs(eig - target) / np.maximum(target, beta * m)
            worst = max(worst, err.max())
        info.append(f"worst eigenvalue rel. error {worst:.2e}")
        assert worst < 1e-9


def test_ac3_kappa_sweep_shape(criterion):
    with criterion(3, "kappa sweep is symmetric, minimal at 0.5, dual >= single") as info:
        link = LinkGeometry.optimal(LAM, DIST, 16, 8)
        h = channel.fresnel_single_pol(link)
        beta, m = channel.channel_gain_far(link, Isotropic()), link.n_antennas
        kappas = np.linspace(0, 1, 21)
        dual = np.array(
            [snr_capacity(eigencap.gram_eigenvalues(channel.dual_pol(h, XpdModel(k))), beta) for k in kappas]
        )
        single = snr_capacity(eigencap.gram_eigenvalues(h), beta)
        asym = np.max(np.abs(dual - dual[::-1]) / dual)
        closed = 2 * m * math.log2(1 + SNR / 2)
        info.append(f"M={m}, asymmetry {asym:.1e}, kappa=0 error {abs(dual[0] / closed - 1):.1e}")
        assert asym < 1e-9
        assert int(np.argmin(dual)) == 10
        assert np.all(dual >= single)
        assert abs(dual[0] / closed - 1) < 1e-9


def test_ac4_waterfill_oracle(criterion):
    with criterion(4, "water-filling KKT and closed-form equivalence on 1000 random instances") as info:
        rng = np.random.default_rng(20240601)
        worst_kkt = worst_q = worst_c = 0.0
        closed_checked = 0
        for trial in range(1000):
            sigma2 = 10 ** rng.uniform(-3, 1)
            power = 10 ** rng.uniform(-3, 3)
            m = int(rng.integers(1, 65))
            if trial % 2:
                values = 10 ** rng.uniform(-4, 2, size=int(rng.integers(1, 65)))
            else:
                xpd = XpdModel(rng.uniform(0, 0.5))
                beta = 10 ** rng.uniform(-3, 1)
                values = np.array([xpd.mu1 * beta * m] * m + [xpd.mu2 * beta * m] * m)
            spec = EigenSpectrum(values)
            alloc = eigencap.waterfill(spec, power, sigma2)
            nu = alloc.water_level
            active = alloc.powers > 0
            pos = spec.values > 0
            kkt = max(
                np.max(np.abs(nu - sigma2 / spec.values[active] - alloc.powers[active]), initial=0.0),
                np.max(nu - sigma2 / spec.values[pos & ~active], initial=0.0),
                abs(alloc.powers.sum() - power),
            ) / nu
            worst_kkt = max(worst_kkt, kkt)
            if trial % 2 == 0:
                closed = eigencap.two_level_waterfill(xpd.mu1, xpd.mu2, beta, m, power, sigma2).powers
                scale = np.maximum(np.abs(closed), power / m)
                worst_q = max(worst_q, np.max(np.abs(alloc.powers - closed) / scale))
                if xpd.mu2 > 0 and power > eigencap.two_level_threshold(xpd.mu1, xpd.mu2, beta, sigma2):
                    general = eigencap.capacity(spec, alloc, sigma2).bits_per_use
                    formula = eigencap.optimal_capacity_closed_form(xpd.mu1, xpd.mu2, beta, m, power, sigma2)
                    worst_c = max(worst_c, abs(formula / general - 1))
                    closed_checked += 1
        info.append(f"KKT {worst_kkt:.1e}, powers {worst_q:.1e}, capacity {worst_c:.1e} over {closed_checked}")
        assert worst_kkt < 1e-9
        assert worst_q < 1e-9
        assert worst_c < 1e-9
        assert closed_checked > 50


def test_ac5_geometry_optimization(criterion):
    with criterion(5, "square arrays minimize length, ULAs minimize area; oracle agrees") as info:
        w = 0.005
        length = GeometryProblem(64, LAM, DIST, w, "length")
        area = GeometryProblem(64, LAM, DIST, w, "area")
        best_len, best_area = optimizer.minimize(length), optimizer.minimize(area)
        direct_len = 2 * math.sqrt(2) * (7 * math.sqrt(0.125) + w)
        info.append(f"length {best_len.objective_value:.6f} m, area {best_area.objective_value:.6f} m2")
        assert (best_len.m_h, best_len.m_v, best_len.alpha, best_len.gamma_split) == (8, 8, 0.5, 0.5)
        assert abs(best_len.objective_value - direct_len) < 1e-6
        # 7.0141 is quoted to 4 decimals; the exact value is 7.014142
        assert abs(best_len.objective_value - 7.0141) < 5e-5
        assert (best_area.m_h, best_area.m_v) == (64, 1)
        assert abs(best_area.objective_value - 0.0788) < 1e-6
        for problem, closed in ((length, best_len), (area, best_area)):
            oracle = optimizer.grid_oracle(problem, 101, 101)
            assert (oracle.m_h, oracle.m_v) == (closed.m_h, closed.m_v)
            assert abs(oracle.objective_value - closed.objective_value) < 1e-9
        step = 1e-5
        grads = [
            (optimizer.total_aperture_length(64, 8, LAM, DIST, w, 0.5 + step, 0.5)
             - optimizer.total_aperture_length(64, 8, LAM, DIST, w, 0.5 - step, 0.5)) / (2 * step),
            (optimizer.total_aperture_length(64, 8, LAM, DIST, w, 0.5, 0.5 + step)
             - optimizer.total_aperture_length(64, 8, LAM, DIST, w, 0.5, 0.5 - step)) / (2 * step),
        ]
        assert max(abs(g) for g in grads) < 1e-6


def test_ac6_antenna_count(criterion):
    with criterion(6, "antenna-count formulas (exact, integer, approximation error law)") as info:
        spec = scaling.FixedAreaSpec(5.0, 80.0, 0.5)
        m_real = scaling.max_antennas_exact(spec, LAM)
        m_int = scaling.max_antennas_integer(spec, LAM)
        n = 1
        while scaling.square_side(spec, LAM, n + 1) <= math.sqrt(5.0):
            n += 1
        root = math.sqrt(m_real)
        residual = math.sqrt(LAM * 80.0 / root) * (root - 1) + 0.5 * LAM - math.sqrt(5.0)
        small = 1.5e-4
        err = abs(scaling.max_antennas_exact(spec, small) / scaling.max_antennas_approx(small, 80.0, 5.0) - 1)
        info.append(f"M_real={m_real:.4f}, M_int={m_int}, error at 1.5e-4 m {err:.4%}")
        assert abs(m_real - 65.587) <= 1e-3
        assert m_int == 64 == n * n
        assert abs(residual) < 1e-9
        assert err < 0.01


def test_ac7_asymptotic_limit_and_growth(criterion):
    with criterion(7, "isotropic limit at 3 THz and directive growth slopes over 1-10 THz") as info:
        limit = scaling.asymptotic_capacity_limit(5.0, 80.0, 10**20.4)
        checks = {}
        for label, bw in (("proportional", scaling.ProportionalBandwidth()), ("fixed", scaling.FixedBandwidth())):
            spec = scaling.FixedAreaSpec(5.0, 80.0, 0.5, 10**20.4, bw, Isotropic())
            cap = scaling.capacity_vs_frequency(spec, [3e12])[0].capacity_bps
            checks[f"isotropic {label} {cap / limit:.4f}x limit"] = abs(cap / 1.4007e12 - 1) < 0.02
        freqs = np.geomspace(1e12, 1e13, 21)

        def slope(bw, preset):
            spec = scaling.FixedAreaSpec(5.0, 80.0, 0.5, 10**20.4, bw, scaling.GAIN_PRESETS[preset])
            pts = scaling.capacity_vs_frequency(spec, freqs)
            return scaling.growth_exponent(freqs, [p.capacity_bps for p in pts])

        both = slope(scaling.FixedBandwidth(), "directive_both")
        rx = slope(scaling.ProportionalBandwidth(), "directive_rx")
        checks[f"directive-both slope {both:.4f}"] = abs(both - 2.0) <= 0.05
        checks[f"directive-rx slope {rx:.4f}"] = abs(rx - 1.0) <= 0.05
        info.extend(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items())
        assert all(checks.values())


def test_ac8_alpha_invariance(criterion):
    with criterion(8, "capacity invariant under the spacing split; base-station layout at alpha=0.01") as info:
        lam, d, w = 0.003, 50.0, 0.0015
        sigma2 = 3e9 * 4e-21
        caps = {}
        for alpha in (0.0, 0.01, 0.25, 0.5, 1.0):
            link = LinkGeometry.optimal(lam, d, 8, 8, w, SpacingSplit(alpha, alpha))
            caps[alpha] = eigencap.channel_capacity(channel.fresnel_single_pol(link), 128.0, sigma2).bits_per_use
        spread = max(abs(c / caps[0.5] - 1) for c in caps.values())
        link = LinkGeometry.optimal(lam, d, 8, 8, w, SpacingSplit(0.01, 0.01))
        lh, lv = geometry.aperture_lengths(link.tx)
        info.append(f"spread {spread:.1e}, h_t={link.tx.spacing_h:.5f} m, tx area {lh * lv:.3f} m2")
        assert spread < 1e-9
        assert abs(link.tx.spacing_h - 0.9610) < 5e-5
        assert abs(lh * lv - 45.3) < 0.05


def test_ac9_realistic_antenna_model(criterion):
    with criterion(9, "quadrature gain properties and realistic vs ideal capacity up to 100 GHz") as info:
        far = ag.normalized_gain(ag.ApertureElement((0, 0), 0.01), ag.SourcePoint((0, 0, 1e4)), 0.01)
        assert abs(far - 1) < 1e-9
        rng = np.random.default_rng(7)
        for _ in range(50):
            g = ag.normalized_gain(
                ag.ApertureElement((0, 0), rng.uniform(0.01, 0.1)),
                ag.SourcePoint((*rng.uniform(-1, 1, 2), rng.uniform(0.2, 10))),
                rng.uniform(0.005, 0.05),
            )
            assert 0 < g <= 1 + 1e-12

        spec = scaling.FixedAreaSpec(5.0, 80.0, 0.5)
        worst_order = 0.0
        ratios = []
        for f in (10e9, 30e9, 60e9, 100e9):
            lam = geometry.SPEED_OF_LIGHT / f
            n = math.isqrt(scaling.max_antennas_integer(spec, lam))
            link = LinkGeometry.optimal(lam, 80.0, n, n, 0.5 * lam)
            planar = (link.tx.positions()[:, None, :] - link.rx.positions()[None, :, :]).reshape(-1, 2)
            offsets = np.unique(np.column_stack((planar, np.full(len(planar), 80.0))), axis=0)
            side = ag.element_side(lam, True)
            g16 = ag.normalized_gains(side, offsets, lam, ag.QuadratureRule(16, adaptive=False))
            g32 = ag.normalized_gains(side, offsets, lam, ag.QuadratureRule(32, adaptive=False))
            worst_order = max(worst_order, np.max(np.abs(g16 / g32 - 1)))
            for design in ("directive_rx", "directive_both"):
                point = ag.realistic_capacity(spec, f, design)
                ratios.append(point.capacity_realistic_bps / point.capacity_ideal_bps)
        assert worst_order < 1e-6

        lam, side = 0.01, 0.03
        link = LinkGeometry.uniform(lam, 100 * 2 * (math.sqrt(2) * side) ** 2 / lam, 2, 2, 0.05)
        g = 4 * math.pi * side**2 / lam**2
        friis = channel.channel_gains(link, FixedGain(g, g))
        realistic = channel.channel_gains(link, ag.realistic_pair_gains(link, side, side))
        friis_err = np.max(np.abs(realistic / friis - 1))
        info.append(
            f"order 16/32 {worst_order:.1e}, Friis {friis_err:.1e}, realistic/ideal in "
            f"[{min(ratios):.4f}, {max(ratios):.4f}]"
        )
        assert friis_err < 0.01
        assert all(abs(r - 1) < 0.10 for r in ratios)
