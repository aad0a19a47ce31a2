"""Power model: branch values, analytic derivatives and the quadratic surrogate.

Derivative reference values were frozen from 40-digit mpmath numerical
differentiation of the raw Doherty formula, independent of the closed forms.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mcpamap.errors import ConfigurationError, DomainError
from mcpamap.powermodel import (
    PRESETS,
    PowerModelParams,
    Variant,
    d2_input_power,
    d_input_power,
    input_power,
    preset,
    taylor_coeffs,
    threshold_jump,
)

EXP1 = PRESETS["exp1"]
EXP3 = PRESETS["exp3"]


def central_diff(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def central_diff2(fn, x, h):
    return (fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h)


def richardson_diff2(fn, x, h):
    # cancels the h**2 truncation term of the plain second difference
    return (4 * central_diff2(fn, x, h / 2) - central_diff2(fn, x, h)) / 3


class TestPresets:
    @pytest.mark.parametrize(
        "name, values",
        [
            ("exp1", (2.7, 0.03, -0.06, 5, 40, 20, 13)),
            ("exp2", (2.7, 0.03, -0.06, 5, 60, 20, 13)),
            ("exp3", (2.7, 0.025, 0.01, 4, 40, 14, 9)),
        ],
    )
    def test_table_values(self, name, values):
        p = preset(name)
        got = (p.alpha, p.beta, p.gamma, p.p_th, p.p_max, p.p_sta, p.p_slp)
        assert got == values
        assert p.variant is Variant.DOHERTY

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            preset("exp9")


class TestValidation:
    def test_rejects_bad_threshold(self):
        with pytest.raises(ConfigurationError):
            EXP1.replace(p_th=50.0)

    def test_rejects_sleep_above_static(self):
        with pytest.raises(ConfigurationError):
            EXP1.replace(p_slp=25.0)

    def test_rejects_nonpositive_efficiency(self):
        # 0.03*10*log10(5) - 0.3 < 0
        with pytest.raises(ConfigurationError):
            EXP1.replace(gamma=-0.3)

    def test_classab_skips_efficiency_check(self):
        p = EXP1.replace(gamma=-0.3, variant="classab")
        assert p.variant is Variant.CLASS_AB


class TestInputPower:
    def test_footnote_value_at_20w(self):
        assert input_power(EXP1, 20.0) == pytest.approx(60.5494, abs=1e-4)
        assert 2 * input_power(EXP1, 20.0) == pytest.approx(121, abs=0.2)

    def test_sleep(self):
        assert input_power(EXP1, 0.0) == 13.0

    def test_full_load(self):
        assert input_power(EXP1, 40.0) == pytest.approx(95.0982, abs=1e-4)
        assert input_power(EXP1, 40.0) + 13 == pytest.approx(108, abs=0.2)

    def test_linear_branch(self):
        assert input_power(EXP1, 3.0) == pytest.approx(28.1)

    def test_branch_values_at_threshold(self):
        assert input_power(EXP1, EXP1.p_th) == pytest.approx(20 + 2.7 * 5)

    def test_vectorised(self):
        got = input_power(EXP1, np.array([0.0, 3.0, 20.0, 40.0]))
        assert got == pytest.approx([13.0, 28.1, 60.54936, 95.09817], abs=1e-4)

    @pytest.mark.parametrize("p", [-1e-9, 40.0001, 41.0, float("nan")])
    def test_domain_errors(self, p):
        with pytest.raises(DomainError):
            input_power(EXP1, p)

    def test_classab(self):
        p = EXP1.replace(variant=Variant.CLASS_AB)
        assert input_power(p, 0.0) == 13.0
        assert input_power(p, 20.0) == pytest.approx(20 + 2.7 * 20)
        assert input_power(p, 40.0) == pytest.approx(20 + 2.7 * 40)

    def test_threshold_jump(self):
        assert threshold_jump(EXP1) == pytest.approx(-0.0978, abs=1e-3)
        assert threshold_jump(EXP1.replace(variant="classab")) == 0.0

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_monotone_per_branch(self, name):
        params = PRESETS[name]
        low = input_power(params, np.linspace(1e-3, params.p_th, 200))
        high = input_power(params, np.linspace(params.p_th + 1e-3, params.p_max, 400))
        assert np.all(np.diff(low) > 0)
        assert np.all(np.diff(high) > 0)


class TestDerivatives:
    def test_first_derivative_exp1(self):
        assert d_input_power(EXP1, 17.5) == pytest.approx(1.86514597531, rel=1e-9)

    def test_second_derivative_exp1(self):
        assert d2_input_power(EXP1, 17.5) == pytest.approx(-0.0127172511987, rel=1e-9)

    def test_exp3_at_18(self):
        assert d_input_power(EXP3, 18.0) == pytest.approx(2.0527202365, rel=1e-9)
        assert d2_input_power(EXP3, 18.0) == pytest.approx(-0.018949346972, rel=1e-9)

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_finite_difference_grid(self, name):
        params = PRESETS[name]
        fn = lambda x: input_power(params, x)
        grid = np.linspace(params.p_th, params.p_max, 102)[1:-1]
        for x in grid:
            h = 1e-4 * x
            fd1 = central_diff(fn, x, h)
            assert abs(d_input_power(params, x) - fd1) / abs(fd1) < 1e-6
            fd2 = richardson_diff2(fn, x, 0.05)
            assert abs(d2_input_power(params, x) - fd2) / abs(fd2) < 1e-5

    def test_exp1_curvature_sign(self):
        # f'' changes sign where beta*10*log10(p) + gamma == 2*c, about 11.7 W
        c = 10 * EXP1.beta / math.log(10)
        p_flip = 10 ** ((2 * c - EXP1.gamma) / (10 * EXP1.beta))
        assert p_flip == pytest.approx(11.71, abs=0.01)
        fn = lambda x: input_power(EXP1, x)
        grid = np.linspace(EXP1.p_th, EXP1.p_max, 102)[1:-1]
        fd2 = np.array([richardson_diff2(fn, x, 0.05) for x in grid])
        assert np.all(fd2[grid < p_flip] > 0)
        assert np.all(fd2[grid > p_flip] < 0)
        assert np.all(np.sign(d2_input_power(EXP1, grid)) == np.sign(fd2))

    def test_vanishing_beta_is_nearly_linear(self):
        p = EXP1.replace(beta=1e-9, gamma=0.5)
        assert abs(d2_input_power(p, 20.0)) < 1e-6

    @pytest.mark.parametrize("p", [5.0, 4.0, 40.0, 0.0])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            d_input_power(EXP1, p)
        with pytest.raises(DomainError):
            d2_input_power(EXP1, p)

    @settings(max_examples=200, deadline=None)
    @given(
        beta=st.floats(0.005, 0.08),
        gamma=st.floats(-0.05, 0.3),
        frac=st.floats(0.02, 0.98),
    )
    def test_matches_finite_difference(self, beta, gamma, frac):
        assume(beta * 10 * math.log10(5.0) + gamma > 0.02)
        params = PowerModelParams(
            alpha=2.7, beta=beta, gamma=gamma, p_th=5.0, p_max=40.0, p_sta=20.0, p_slp=13.0
        )
        x = 5.0 + frac * 35.0
        fd1 = central_diff(lambda v: input_power(params, v), x, 1e-5 * x)
        assert d_input_power(params, x) == pytest.approx(fd1, rel=1e-6, abs=1e-9)


class TestTaylor:
    def test_exp1(self):
        q = taylor_coeffs(EXP1)
        assert q.p_mid == 17.5
        assert q.f0 == pytest.approx(55.9263714366, rel=1e-10)
        assert q.f1 == pytest.approx(1.86514597531, rel=1e-9)
        assert q.f2 == pytest.approx(-0.0127172511987, rel=1e-9)

    def test_exp2_midpoint(self):
        assert taylor_coeffs(PRESETS["exp2"]).p_mid == 27.5

    def test_center_is_exact(self):
        q = taylor_coeffs(EXP1)
        assert q(q.p_mid) == q.f0 == input_power(EXP1, q.p_mid)

    def test_surrogate_at_full_load(self):
        q = taylor_coeffs(EXP1)
        assert q(40.0) == pytest.approx(94.6731016714, rel=1e-9)
        assert abs(q(40.0) - input_power(EXP1, 40.0)) < 0.5

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_all_presets_concave(self, name):
        assert taylor_coeffs(PRESETS[name]).f2 < 0

    def test_interval_midpoint(self):
        assert taylor_coeffs(EXP1, midpoint="interval").p_mid == 22.5

    def test_rejects_midpoint_in_linear_region(self):
        params = EXP1.replace(p_th=15.0)
        with pytest.raises(ConfigurationError):
            taylor_coeffs(params)

    def test_rejects_classab(self):
        with pytest.raises(ConfigurationError):
            taylor_coeffs(EXP1.replace(variant="classab"))

    def test_bad_midpoint_option(self):
        with pytest.raises(ConfigurationError):
            taylor_coeffs(EXP1, midpoint="median")

    def test_is_a_quadratic(self):
        q = taylor_coeffs(EXP1)
        x = np.linspace(0, 40, 9)
        assert np.allclose(np.diff(q(x), 3), 0, atol=1e-9)
        assert math.isclose(central_diff(q, 10.0, 0.5), q.f1 + q.f2 * (10 - 17.5))
