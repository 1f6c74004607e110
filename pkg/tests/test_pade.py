"""
Tests for Padé approximants and the rational function of a 1-input ratio layer.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from ratnet.exceptions import DegeneratePadeError, DimensionMismatchError, PoleError
from ratnet.models import RatioLayer
from ratnet.services.pade import (
    PadeApproximant,
    maclaurin_of_rational,
    pade_eval,
    pade_from_taylor,
    rational_from_ratio_layer,
)
from ratnet.utils.diffcore import gaussian_array, seeded_rng

EXP_SERIES = [1.0 / math.factorial(k) for k in range(12)]
LOG1P_SERIES = [0.0] + [(-1.0) ** (k + 1) / k for k in range(1, 12)]
ORDERS = [(1, 1), (2, 2), (3, 2)]


def _denominator_matrix(c, L, M):
    return np.array([[c[L + k - j] if L + k - j >= 0 else 0.0 for j in range(1, M + 1)] for k in range(1, M + 1)])


class TestPadeFromTaylor:
    """Solving for the coefficients."""

    def test_exp_one_one(self):
        p = pade_from_taylor([1.0, 1.0, 0.5], 1, 1)
        assert p.a == pytest.approx((1.0, 0.5), abs=1e-15)
        assert p.b == pytest.approx((1.0, -0.5), abs=1e-15)

    def test_no_denominator_gives_truncated_series(self):
        c = [2.0, -1.0, 0.25, 3.0]
        p = pade_from_taylor(c, 3, 0)
        assert p.b == (1.0,)
        assert list(p.a) == c

    def test_degenerate_system(self):
        with pytest.raises(DegeneratePadeError):
            pade_from_taylor([1.0, 0.0, 0.0], 1, 1)

    def test_too_few_coefficients(self):
        with pytest.raises(DimensionMismatchError):
            pade_from_taylor([1.0, 1.0], 1, 1)

    def test_needs_partial_pivoting(self):
        # leading entry of the 2x2 system is zero
        c = [1.0, 1.0, 0.0, 1.0, 1.0]
        p = pade_from_taylor(c, 2, 2)
        np.testing.assert_allclose(maclaurin_of_rational(p, 4), c[:5], atol=1e-12)


class TestPadeEval:
    """Evaluating approximants."""

    def test_exp_one_one_values(self):
        p = pade_from_taylor(EXP_SERIES, 1, 1)
        assert pade_eval(p, 0.0) == 1.0
        assert pade_eval(p, 1.0) == pytest.approx(3.0, abs=1e-14)

    def test_exp_two_two_near_e(self):
        p = pade_from_taylor(EXP_SERIES, 2, 2)
        assert abs(pade_eval(p, 1.0) - math.e) < 4e-3

    def test_pole(self):
        p = PadeApproximant(L=0, M=1, a=(1.0,), b=(1.0, -1.0))
        with pytest.raises(PoleError) as excinfo:
            pade_eval(p, 1.0)
        assert excinfo.value.x == 1.0


class TestMaclaurin:
    """Series expansion of a rational function."""

    def test_no_denominator_pads_with_zeros(self):
        p = PadeApproximant(L=1, M=0, a=(3.0, -1.0), b=(1.0,))
        assert maclaurin_of_rational(p, 4).tolist() == [3.0, -1.0, 0.0, 0.0, 0.0]

    def test_exp_one_one_series(self):
        p = pade_from_taylor(EXP_SERIES, 1, 1)
        np.testing.assert_allclose(maclaurin_of_rational(p, 2), [1.0, 1.0, 0.5], atol=1e-15)

    def test_exp_two_two_round_trip(self):
        p = pade_from_taylor(EXP_SERIES, 2, 2)
        np.testing.assert_allclose(maclaurin_of_rational(p, 4), EXP_SERIES[:5], rtol=0, atol=1e-12)


@pytest.mark.parametrize("L, M", ORDERS)
@pytest.mark.parametrize("series", [EXP_SERIES, LOG1P_SERIES], ids=["exp", "log1p"])
def test_agreement_through_order(series, L, M):
    p = pade_from_taylor(series, L, M)
    np.testing.assert_allclose(maclaurin_of_rational(p, L + M), series[:L + M + 1], rtol=0, atol=1e-10)


@pytest.mark.parametrize("L, M", ORDERS)
def test_agreement_on_random_series(L, M):
    rng = seeded_rng(L * 100 + M)
    accepted = 0
    while accepted < 20:
        c = rng.uniforms(L + M + 1) * 2.0 - 1.0
        if np.linalg.cond(_denominator_matrix(c, L, M)) > 1e4:
            continue
        p = pade_from_taylor(c, L, M)
        np.testing.assert_allclose(maclaurin_of_rational(p, L + M), c, rtol=0, atol=1e-10)
        accepted += 1


def test_normalization_enforced():
    with pytest.raises(ValidationError):
        PadeApproximant(L=0, M=1, a=(1.0,), b=(2.0, 1.0))
    with pytest.raises(ValidationError):
        PadeApproximant(L=1, M=0, a=(1.0,), b=(1.0,))


class TestRatioLayerRational:
    """A 1-input ratio layer is a rational function of its input."""

    def _layer(self, hidden: int, p: int, q: int, seed: int) -> RatioLayer:
        rng = seeded_rng(seed)
        layer = RatioLayer(1, hidden, 2, p=p, q=q)
        layer.params["num_w"][...] = gaussian_array(rng, layer.params["num_w"].shape)
        layer.params["num_b"][...] = gaussian_array(rng, layer.params["num_b"].shape)
        layer.params["den_w"][...] = gaussian_array(rng, layer.params["den_w"].shape, 0.0, 0.3)
        layer.params["out_w"][...] = gaussian_array(rng, layer.params["out_w"].shape)
        layer.params["out_b"][...] = gaussian_array(rng, layer.params["out_b"].shape)
        return layer

    @pytest.mark.parametrize("p, q", [(1, 1), (2, 2), (3, 2), (2, 0)])
    def test_single_unit_matches_forward(self, p, q):
        layer = self._layer(1, p, q, seed=p * 10 + q)
        rational = rational_from_ratio_layer(layer, output=0)
        assert rational.L <= max(p, q)
        assert rational.M <= q
        for x in np.linspace(-1.0, 1.0, 9):
            expected = layer.forward(np.array([[x]]))[0, 0]
            assert pade_eval(rational, float(x)) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_several_units_share_a_denominator(self):
        layer = self._layer(3, 2, 1, seed=4)
        rational = rational_from_ratio_layer(layer, output=1)
        assert rational.M <= 3
        for x in np.linspace(-1.0, 1.0, 9):
            expected = layer.forward(np.array([[x]]))[0, 1]
            assert pade_eval(rational, float(x)) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_requires_single_input(self):
        with pytest.raises(DimensionMismatchError):
            rational_from_ratio_layer(RatioLayer(2, 1, 1, p=1, q=1))
