import math

import numpy as np
import pytest

from swarmrel import specfun
from swarmrel.specfun import SeriesControl, SeriesError


# --- incomplete gamma ---------------------------------------------------------


def test_lower_gamma_closed_form_a1():
    # gamma(1, z) = 1 - e^-z
    for z in (0.1, 1.0, 5.0):
        assert specfun.lower_incomplete_gamma(1.0, z) == pytest.approx(
            1.0 - math.exp(-z), abs=1e-12
        )


def test_lower_gamma_a2():
    assert specfun.lower_incomplete_gamma(2.0, 1.0) == pytest.approx(1.0 - 2.0 / math.e, rel=1e-12)


def test_regularized_gamma_limits():
    assert specfun.regularized_gamma(3.7, 0.0) == 0.0
    assert specfun.regularized_gamma(3.7, 1e4) == pytest.approx(1.0, abs=1e-12)


def test_regularized_gamma_monotone_and_bounded():
    for a in (0.5, 1.0, 7.4, 36.2):
        grid = np.linspace(0.0, 5.0 * a, 100)
        vals = [specfun.regularized_gamma(a, z) for z in grid]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))


def test_gamma_domain_errors():
    with pytest.raises(ValueError):
        specfun.regularized_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        specfun.regularized_gamma(-2.0, 1.0)
    with pytest.raises(ValueError):
        specfun.log_gamma(0.0)


# --- Bessel I0 / I1 -----------------------------------------------------------


def _i0_series_oracle(z, terms=40):
    q = 0.25 * z * z
    return sum(q**k / math.factorial(k) ** 2 for k in range(terms))


def test_bessel_at_zero():
    assert specfun.bessel_i0(0.0) == 1.0
    assert specfun.bessel_i1(0.0) == 0.0


def test_bessel_i0_series_oracle():
    assert specfun.bessel_i0(1.0) == pytest.approx(_i0_series_oracle(1.0), rel=1e-14)
    assert specfun.bessel_i0(1.0) == pytest.approx(1.2660658777520084, rel=1e-13)


def test_bessel_symmetry():
    for z in (0.5, 2.0, 10.0):
        assert specfun.bessel_i0(-z) == specfun.bessel_i0(z)
        assert specfun.bessel_i1(-z) == -specfun.bessel_i1(z)


def test_bessel_against_frozen_oracle_values():
    # mpmath.besseli at 40 digits
    assert specfun.bessel_i0(20.0) == pytest.approx(43558282.559553533, rel=1e-12)
    assert specfun.bessel_i1(2.5) == pytest.approx(2.5167162452886984, rel=1e-13)
    assert specfun.bessel_i1(30.0) == pytest.approx(768532038938.95700, rel=1e-10)


def test_bessel_series_asymptotic_seam():
    # both evaluation regimes hit full accuracy on their side of the cutoff
    assert specfun.bessel_i0(14.9) == pytest.approx(308375.57868743920, rel=1e-12)
    assert specfun.bessel_i0(15.1) == pytest.approx(374103.41119040899, rel=1e-12)
    assert specfun.bessel_i1(14.9) == pytest.approx(297840.69477957431, rel=1e-12)
    assert specfun.bessel_i1(15.1) == pytest.approx(361495.56618540161, rel=1e-12)


# --- Laguerre 1/2 ---------------------------------------------------------------


def test_laguerre_half_at_zero():
    assert specfun.laguerre_half(0.0) == pytest.approx(1.0, rel=1e-14)


def test_laguerre_half_dual_route():
    # Bessel route vs confluent-series route, and a frozen 40-digit value
    for z in (-0.5, -2.0, -4.0, -10.0):
        assert specfun.laguerre_half(z) == pytest.approx(
            specfun.hyp1f1(-0.5, 1.0, z), rel=1e-10
        )
    assert specfun.laguerre_half(-4.0) == pytest.approx(2.4036187697641058, rel=1e-12)


# --- hypergeometric series -------------------------------------------------------


def test_hyp_at_zero_is_one():
    assert specfun.hyp1f1(0.3, 1.7, 0.0) == 1.0
    assert specfun.hyp2f2(4.0, 2.0, 1.0, 3.0, 0.0) == 1.0


def test_hyp2f2_pochhammer_cancellation():
    # identical upper/lower parameters collapse to exp(z)
    for z in (0.5, 2.0):
        assert specfun.hyp2f2(1.3, 0.7, 1.3, 0.7, z) == pytest.approx(math.exp(z), rel=1e-11)


def test_hyp2f2_frozen_oracle_value():
    # mpmath.hyper([1.5, 2.5], [0.5, 3.5], 1.0) at 40 digits
    assert specfun.hyp2f2(1.5, 2.5, 0.5, 3.5, 1.0) == pytest.approx(
        5.2430420959827282, rel=1e-10
    )


def test_hyp1f1_negative_argument():
    # 1F1(1; 2; -z) = (1 - e^-z)/z
    for z in (0.3, 1.0, 3.0):
        assert specfun.hyp1f1(1.0, 2.0, -z) == pytest.approx((1 - math.exp(-z)) / z, rel=1e-11)


def test_series_termination_stability():
    # doubling the term cap must not move a converged value
    rng = np.random.default_rng(1)
    for _ in range(20):
        a1, a2 = rng.uniform(0.2, 6.0, 2)
        b1, b2 = rng.uniform(0.4, 6.0, 2)
        z = rng.uniform(-20.0, 20.0)
        v1 = specfun.hyp2f2(a1, a2, b1, b2, z, SeriesControl(rel_tol=1e-12, max_terms=10_000))
        v2 = specfun.hyp2f2(a1, a2, b1, b2, z, SeriesControl(rel_tol=1e-12, max_terms=20_000))
        assert v2 == pytest.approx(v1, rel=1e-11)


def test_series_budget_error():
    with pytest.raises(SeriesError):
        specfun.hyp2f2(3.0, 2.0, 0.5, 1.5, 50.0, SeriesControl(rel_tol=1e-12, max_terms=10))


def test_lower_param_validation():
    with pytest.raises(ValueError):
        specfun.hyp1f1(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        specfun.hyp2f2(1.0, 1.0, -2.0, 1.0, 1.0)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=5)


# --- Tricomi function -------------------------------------------------------------


def test_tricomi_known_identity():
    # U(a, a+1, z) = z^-a
    assert specfun.tricomi_u(1.0, 2.0, 2.0) == pytest.approx(0.5, rel=1e-10)
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.uniform(0.5, 5.0)
        z = rng.uniform(0.1, 10.0)
        assert specfun.tricomi_u(a, a + 1.0, z) == pytest.approx(z**-a, rel=1e-10)


def test_tricomi_frozen_oracle_value():
    # mpmath.hyperu(2.3, 1.1, 0.7) at 40 digits
    assert specfun.tricomi_u(2.3, 1.1, 0.7) == pytest.approx(0.20808430012256138, rel=1e-8)


def test_tricomi_leading_asymptotic():
    # z^a * U(a, b, z) -> 1 as z grows
    assert specfun.tricomi_u(1.7, 0.9, 1e4) * 1e4**1.7 == pytest.approx(1.0, abs=1e-2)
    assert math.exp(specfun.log_tricomi_u_scaled(1.7, 0.9, 1e4)) == pytest.approx(1.0, abs=1e-2)


def test_tricomi_small_shape_endpoint():
    # a < 1 exercises the endpoint substitution
    assert specfun.tricomi_u(0.4, 1.4, 3.0) == pytest.approx(3.0**-0.4, rel=1e-9)


def test_tricomi_domain():
    with pytest.raises(ValueError):
        specfun.tricomi_u(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        specfun.tricomi_u(1.0, 1.0, 0.0)


# --- adaptive quadrature ------------------------------------------------------------


def test_quad_polynomial():
    assert specfun.adaptive_quad(lambda t: 3 * t * t, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_quad_exponential_tail():
    assert specfun.adaptive_quad(lambda t: math.exp(-t), 0.0, math.inf) == pytest.approx(
        1.0, abs=1e-10
    )


def test_quad_gaussian_moment():
    assert specfun.adaptive_quad(lambda t: t * math.exp(-t * t), 0.0, math.inf) == pytest.approx(
        0.5, abs=1e-10
    )


def test_quad_shifted_lower_limit():
    assert specfun.adaptive_quad(lambda t: math.exp(-(t - 2.0)), 2.0, math.inf) == pytest.approx(
        1.0, abs=1e-10
    )


def test_quad_empty_and_bad_ranges():
    assert specfun.adaptive_quad(lambda t: t, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        specfun.adaptive_quad(lambda t: t, 2.0, 1.0)


def test_quad_integrable_endpoint_singularity():
    # 1/sqrt(t) on (0, 1] integrates to 2
    assert specfun.adaptive_quad(
        lambda t: 1.0 / math.sqrt(t), 0.0, 1.0, rel_tol=1e-9, abs_tol=0.0, max_panels=20000
    ) == pytest.approx(2.0, rel=1e-6)
