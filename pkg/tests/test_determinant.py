import numpy as np
import pytest

from friedrichs3d.determinant import (
    EDGE_MARGIN,
    InsideEssentialSpectrum,
    ModelParams,
    SpectralWindow,
    find_discrete_spectrum,
    fredholm_delta,
    fredholm_delta_threshold,
)
from friedrichs3d.lattice import ORIGIN, PI_POINT, TorusPoint, band_endpoints, lambda_point
from friedrichs3d.quadrature import IntegralResult
from friedrichs3d.vfunction import parse_v

from oracles import WATSON_HALF, WATSON_I_EPS, pi_point_roots

TWO_PI = 2.0 * np.pi


def test_model_params_validation():
    ModelParams(gamma=-2.0, mu=0.3)
    for gamma, mu in ((1.0, 0.0), (1.0, -0.5), (np.nan, 0.5), (1.0, np.inf)):
        with pytest.raises(ValueError):
            ModelParams(gamma=gamma, mu=mu)


def test_spectral_window_orders_itself():
    with pytest.raises(ValueError):
        SpectralWindow(k=ORIGIN, m=3.0, M=2.0, eigen_below=None, eigen_above=None)
    with pytest.raises(ValueError):
        SpectralWindow(k=ORIGIN, m=0.0, M=12.0, eigen_below=1.0, eigen_above=None)
    with pytest.raises(ValueError):
        SpectralWindow(k=ORIGIN, m=0.0, M=12.0, eigen_below=None, eigen_above=11.0)


def test_determinant_closed_form_at_corner_momentum(v_one):
    # with the fiber dispersion pinned at 12 the integral term is exactly
    # volume / (12 - z)
    params = ModelParams(gamma=6.0, mu=0.7)
    for z in (-3.0, 2.5, 20.0, 30.0):
        expected = 12.0 - z - params.mu ** 2 * TWO_PI ** 3 / (12.0 - z)
        got = fredholm_delta(params, v_one, PI_POINT, z)
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_determinant_refuses_band_interior(v_one):
    params = ModelParams(gamma=1.0, mu=0.4)
    k = TorusPoint(0.7, -0.2, 0.1)
    lo, hi = band_endpoints(k)
    for z in (lo + 1e-9, 0.5 * (lo + hi), hi - 1e-9, lo - 1e-7, hi + 1e-7):
        with pytest.raises(InsideEssentialSpectrum):
            fredholm_delta(params, v_one, k, z)


def test_determinant_diagnostics_expose_quadrature(v_cos_half):
    params = ModelParams(gamma=2.0, mu=0.5)
    value, info = fredholm_delta(params, v_cos_half, ORIGIN, -4.0, with_diagnostics=True)
    assert isinstance(info, IntegralResult)
    assert info.converged
    assert value == pytest.approx(
        params.gamma - (-4.0) - params.mu ** 2 * info.value, abs=1e-12
    )


def test_determinant_is_decreasing_below_the_band(v_cos_half):
    params = ModelParams(gamma=-1.0, mu=0.8)
    zs = [-8.0, -5.0, -2.0, -0.5]
    vals = [fredholm_delta(params, v_cos_half, ORIGIN, z) for z in zs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # slope at most -1: differences beat the z spacing
    for (z1, d1), (z2, d2) in zip(zip(zs, vals), zip(zs[1:], vals[1:])):
        assert d1 - d2 >= (z2 - z1) * (1.0 - 1e-9)


def test_threshold_determinant_values(v_one):
    params = ModelParams(gamma=3.0, mu=0.21)
    got = fredholm_delta_threshold(params, v_one, "origin")
    assert got == pytest.approx(3.0 - params.mu ** 2 * WATSON_HALF, rel=1e-9)
    got = fredholm_delta_threshold(params, v_one, "lambda:6")
    assert got == pytest.approx(3.0 - 9.0 + params.mu ** 2 * WATSON_I_EPS, rel=1e-9)


def test_discrete_spectrum_matches_corner_closed_form(v_one):
    for gamma, mu in ((6.0, 0.5), (-1.5, 0.5), (3.0, 1.1), (10.0, 0.25)):
        params = ModelParams(gamma=gamma, mu=mu)
        window = find_discrete_spectrum(params, v_one, PI_POINT)
        below, above = pi_point_roots(gamma, mu)
        assert window.m == pytest.approx(12.0, abs=1e-12)
        assert window.M == pytest.approx(12.0, abs=1e-12)
        assert window.eigen_below == pytest.approx(below, abs=2e-10)
        assert window.eigen_above == pytest.approx(above, abs=2e-10)


def test_discrete_spectrum_existence_logic(v_cos_half):
    k = TorusPoint(0.8, -0.3, 0.2)
    # weak coupling at moderate gamma: no state detaches on either side
    window = find_discrete_spectrum(ModelParams(gamma=2.0, mu=0.05), v_cos_half, k)
    assert window.eigen_below is None and window.eigen_above is None
    # negative gamma pulls a state below the band
    window = find_discrete_spectrum(ModelParams(gamma=-1.0, mu=0.05), v_cos_half, k)
    assert window.eigen_below is not None and window.eigen_below < window.m
    assert window.eigen_above is None
    # large gamma pushes a state above the band
    window = find_discrete_spectrum(ModelParams(gamma=12.5, mu=0.05), v_cos_half, k)
    assert window.eigen_below is None
    assert window.eigen_above is not None and window.eigen_above > window.M


def test_discrete_spectrum_roots_zero_the_grid_determinant(v_cos_half, rng):
    # dual route: roots come from the transform kernel, the audit from the
    # real-space grid quadrature
    for _ in range(3):
        k = TorusPoint(rng.uniform(-np.pi, np.pi, 3))
        params = ModelParams(gamma=float(rng.uniform(-3.0, -0.5)), mu=float(rng.uniform(0.4, 0.9)))
        window = find_discrete_spectrum(params, v_cos_half, k)
        assert window.eigen_below is not None
        resid = fredholm_delta(params, v_cos_half, k, window.eigen_below)
        # |d Delta / dz| >= 1 outside the band, so the residual bounds the root error
        assert abs(resid) < 5e-9


def test_near_edge_roots_are_clamped_to_the_margin(v_one):
    window = find_discrete_spectrum(ModelParams(gamma=0.0, mu=1e-9), v_one, ORIGIN)
    assert window.eigen_below == pytest.approx(-EDGE_MARGIN, abs=1e-18)
    window = find_discrete_spectrum(ModelParams(gamma=6.0, mu=1e-9), v_one, PI_POINT)
    assert window.eigen_below == pytest.approx(12.0 - EDGE_MARGIN, abs=1e-15)
    assert window.eigen_above == pytest.approx(12.0 + EDGE_MARGIN, abs=1e-15)


def test_zero_coupling_function_leaves_pure_shift(v_one):
    # v = 0 collapses the determinant to w0 - z
    zero = parse_v("0")
    params = ModelParams(gamma=-2.0, mu=0.5)
    window = find_discrete_spectrum(params, zero, TorusPoint(0.4, 0.4, -0.9))
    assert window.eigen_below == pytest.approx(
        params.gamma + 3.0 - np.cos(0.4) * 2.0 - np.cos(-0.9), abs=1e-9
    )
