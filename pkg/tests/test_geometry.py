import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from losmimo import geometry
from losmimo.errors import DomainError
from losmimo.geometry import LinkGeometry, SpacingSplit, UraSpec


@pytest.mark.parametrize("m, m_h, expected", [(6, 4, (1, 1)), (1, 4, (0, 0)), (12, 4, (3, 2))])
def test_antenna_index_examples(m, m_h, expected):
    assert geometry.antenna_index(m, m_h) == expected


def test_antenna_index_matches_row_by_row_enumeration():
    grid = [(i, j) for j in range(3) for i in range(4)]
    assert [geometry.antenna_index(m, 4, 3) for m in range(1, 13)] == grid


@pytest.mark.parametrize("m", [0, -1, 13, 2.5])
def test_antenna_index_out_of_range(m):
    with pytest.raises(DomainError):
        geometry.antenna_index(m, 4, 3)


@given(st.integers(1, 40), st.integers(1, 40), st.data())
def test_antenna_index_round_trip(m_h, m_v, data):
    m = data.draw(st.integers(1, m_h * m_v))
    i, j = geometry.antenna_index(m, m_h, m_v)
    assert 0 <= i < m_h and 0 <= j < m_v
    assert m == j * m_h + i + 1


def test_ura_validation():
    UraSpec(1, 1)
    UraSpec(4, 1, spacing_h=0.1)
    with pytest.raises(DomainError):
        UraSpec(4, 1)
    with pytest.raises(DomainError):
        UraSpec(1, 3, spacing_h=0.1)
    with pytest.raises(DomainError):
        UraSpec(0, 3, 0.1, 0.1)
    with pytest.raises(DomainError):
        UraSpec(2, 2, 0.1, 0.1, element_width=-1)


def test_link_validation():
    a = UraSpec(2, 2, 0.1, 0.1)
    with pytest.raises(DomainError):
        LinkGeometry(a, UraSpec(4, 1, 0.1), 10.0, 0.01)
    with pytest.raises(DomainError):
        LinkGeometry(a, a, 0.0, 0.01)
    with pytest.raises(DomainError):
        LinkGeometry(a, a, 10.0, -0.01)


def test_positions_follow_index_convention():
    ura = UraSpec(3, 2, 0.5, 0.25)
    expected = [(-(m % 3) * 0.5, -(m // 3) * 0.25) for m in range(6)]
    np.testing.assert_allclose(ura.positions(), expected)


def test_pair_distance_examples():
    link = LinkGeometry.uniform(0.01, 100.0, 8, 1, 0.353553)
    assert geometry.pair_distance(link, 1, 1) == 100.0
    assert geometry.pair_distance(link, 1, 2) == pytest.approx(100.000625, abs=1e-6)
    assert geometry.pair_distance(link, 1, 2) == geometry.pair_distance(link, 2, 1)


def test_pair_distances_table_matches_scalar_function():
    link = LinkGeometry.optimal(0.01, 50.0, 3, 4, split=SpacingSplit(0.3, 0.8))
    table = geometry.pair_distances(link)
    for m in range(1, 13):
        for k in range(1, 13):
            assert table[m - 1, k - 1] == pytest.approx(geometry.pair_distance(link, m, k), rel=1e-15)


@given(st.integers(1, 6), st.integers(1, 6), st.floats(0.01, 2.0), st.floats(1.0, 500.0))
def test_pair_distance_symmetric_for_identical_arrays(m_h, m_v, spacing, d):
    link = LinkGeometry.uniform(0.01, d, m_h, m_v, spacing)
    table = geometry.pair_distances(link)
    np.testing.assert_allclose(table, table.T, rtol=1e-15)


def test_array_diagonal_examples():
    assert geometry.array_diagonal(UraSpec(1, 1)) == 0.0
    assert geometry.array_diagonal(UraSpec(8, 8, 0.353553, 0.353553)) == pytest.approx(3.5, abs=1e-4)
    assert geometry.array_diagonal(UraSpec(64, 1, 0.125)) == pytest.approx(7.875, rel=1e-12)


def test_aperture_lengths_examples():
    lh, lv = geometry.aperture_lengths(UraSpec(8, 8, 0.353553, 0.353553, 0.005))
    assert lh == lv == pytest.approx(2.47987, abs=1e-5)
    assert geometry.aperture_lengths(UraSpec(1, 3, 0, 0.2, 0.004))[0] == 0.004
    lh, lv = geometry.aperture_lengths(UraSpec(64, 1, 0.125, 0, 0.005))
    assert (lh, lv) == (pytest.approx(7.880), 0.005)


@given(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0, 0.01), st.floats(0, 0.5))
def test_aperture_lengths_monotone(h, dh, w, dw):
    base = geometry.aperture_lengths(UraSpec(5, 3, h, h, w))
    wider = geometry.aperture_lengths(UraSpec(5, 3, h + dh, h + dh, w + dw))
    assert wider[0] >= base[0] and wider[1] >= base[1]


def test_symmetric_optimal_spacing_examples():
    h, v = geometry.symmetric_optimal_spacing(0.01, 100.0, 8, 8)
    assert h == v == pytest.approx(0.353553, abs=1e-6)
    assert geometry.symmetric_optimal_spacing(0.01, 100.0, 1, 4)[0] == pytest.approx(1.0)
    assert geometry.symmetric_optimal_spacing(0.003, 50.0, 8, 8)[0] == pytest.approx(0.136931, abs=1e-6)


def test_split_spacing_examples():
    sym = geometry.symmetric_optimal_spacing(0.01, 100.0, 8, 4)
    h_t, h_r, v_t, v_r = geometry.split_optimal_spacing(0.01, 100.0, 8, 4, SpacingSplit())
    assert (h_t, v_t) == pytest.approx(sym, rel=1e-15)
    assert (h_r, v_r) == pytest.approx(sym, rel=1e-15)
    h_t, h_r, _, _ = geometry.split_optimal_spacing(0.003, 50.0, 8, 8, SpacingSplit(0.01, 0.01))
    # direct arithmetic: h_t = (λd/m_h)^α, h_r = (λd/m_h)^(1-α)
    assert h_t == pytest.approx(0.01875**0.01, rel=1e-14)
    assert h_t == pytest.approx(0.96101, abs=1e-5)
    assert h_r == pytest.approx(0.019510, abs=1e-6)


def test_split_products_on_grid():
    lam, d, m_h, m_v = 0.004, 70.0, 6, 3
    for alpha in np.linspace(0, 1, 101):
        for gamma in np.linspace(0, 1, 101)[::10]:
            h_t, h_r, v_t, v_r = geometry.split_optimal_spacing(lam, d, m_h, m_v, SpacingSplit(alpha, gamma))
            assert abs(h_t * h_r / (lam * d / m_h) - 1) <= 1e-12
            assert abs(v_t * v_r / (lam * d / m_v) - 1) <= 1e-12


def test_split_validation():
    with pytest.raises(DomainError):
        SpacingSplit(1.5, 0.5)
    with pytest.raises(DomainError):
        geometry.symmetric_optimal_spacing(0.0, 100.0, 8, 8)


def test_fraunhofer_examples():
    assert geometry.fraunhofer_array_distance(100.0, 8, 8) == pytest.approx(3200.0)
    assert geometry.fraunhofer_array_distance(80.0, 1, 1) == pytest.approx(320.0)
    assert geometry.fraunhofer_array_distance(37.0, 2, 3) / 10 == pytest.approx(37.0, rel=1e-15)


def test_beamwidth_and_footprint():
    h = geometry.symmetric_optimal_spacing(0.01, 100.0, 8, 8)[0]
    assert geometry.beam_footprint(100.0, 0.01, 8) == pytest.approx(2 * h, rel=1e-14)
    assert geometry.beam_footprint(100.0, 0.01, 8) == pytest.approx(0.70711, abs=1e-5)
    assert geometry.first_null_beamwidth(0.01, 4, 0.0025) == pytest.approx(math.pi)
    assert geometry.first_null_beamwidth(0.01, 8, h) == pytest.approx(2 * math.asin(0.01 / (8 * h)))
    with pytest.raises(DomainError, match="lambda/\\(m_h\\*h_r\\)"):
        geometry.first_null_beamwidth(0.01, 2, 0.001)


def test_far_channel_gain_diagnostic():
    assert LinkGeometry.optimal(0.01, 100.0, 8, 8).far_channel_gain_ok
    assert not LinkGeometry.uniform(0.01, 5.0, 8, 8, 1.0).far_channel_gain_ok


def test_wavelength_conversion():
    assert geometry.wavelength(30e9, geometry.SPEED_OF_LIGHT_APPROX) == pytest.approx(0.01)
    assert geometry.wavelength(30e9) == pytest.approx(299792458.0 / 30e9)
