"""Special functions: closed forms, frozen mpmath values, and invariants."""

import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from indexlab.complexfn import (
    PrecisionBudget,
    bessel_i,
    bessel_k,
    gamma,
    generalized_hyp,
    log_gamma,
    reciprocal_gamma,
    upper_incomplete_gamma,
)
from indexlab.errors import DivergentSeriesError, EnvelopeError, PoleError, UnderflowNote

# frozen from mpmath at 30 digits
LOG_GAMMA_2_3I = -2.0928517530927333 + 2.3023965434668676j
UPPER_GAMMA_HALF_I_1 = 0.226302223263196 + 0.12544978941463486j
K0_1 = 0.42102443824070833
K_I_1 = 0.28942803702599213
I_ORDER_2 = 10.863352418973626 - 5.6324191165080807j
HYP1F2 = 0.89324374097502617


def rel(a, b):
    return abs(a - b) / abs(b)


finite = dict(allow_nan=False, allow_infinity=False)


class TestLogGamma:
    def test_one(self):
        assert abs(log_gamma(1.0)) < 1e-14

    def test_half(self):
        assert rel(log_gamma(0.5), math.log(math.sqrt(math.pi))) < 1e-14

    def test_frozen_value(self):
        assert rel(log_gamma(2 + 3j), LOG_GAMMA_2_3I) < 1e-13

    def test_pole_rejected(self):
        with pytest.raises(PoleError):
            log_gamma(-2.0)

    @given(st.floats(-30, 30, **finite), st.floats(-60, 60, **finite))
    def test_matches_mpmath(self, x, y):
        z = complex(x, y)
        if min(abs(z - k) for k in range(0, -32, -1)) < 1e-3:
            return
        want = complex(mpmath.loggamma(z))
        assert abs(log_gamma(z) - want) <= 1e-12 * max(1.0, abs(want))

    def test_vectorised_shape(self):
        z = np.array([[0.5, 1.5], [2.5 + 1j, 3.0 - 4j]])
        out = log_gamma(z)
        assert out.shape == z.shape
        assert out[1, 1] == pytest.approx(log_gamma(3.0 - 4j), rel=1e-15)


class TestReciprocalGamma:
    @pytest.mark.parametrize("z", [0.0, -3.0, -10.0])
    def test_zero_at_poles(self, z):
        assert reciprocal_gamma(z) == 0

    def test_one(self):
        assert reciprocal_gamma(1.0) == pytest.approx(1.0, rel=1e-15)

    @given(st.floats(-8, 8, **finite), st.floats(-8, 8, **finite))
    def test_inverse_of_gamma(self, x, y):
        z = complex(x, y)
        if min(abs(z - k) for k in range(0, -10, -1)) < 1e-2:
            return
        assert gamma(z) * reciprocal_gamma(z) == pytest.approx(1.0, rel=1e-12)


class TestReflectionAndMultiplication:
    def test_reflection_random(self):
        rng = np.random.default_rng(7)
        s = rng.uniform(0.02, 0.98, 200) + 1j * rng.uniform(-20, 20, 200)
        lhs = np.exp(log_gamma(s) + log_gamma(1 - s))
        rhs = np.pi / np.sin(np.pi * s)
        assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-11

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_multiplication_random(self, m):
        rng = np.random.default_rng(m)
        s = rng.uniform(0.1, 4, 50) + 1j * rng.uniform(-10, 10, 50)
        lhs = np.exp(log_gamma(m * s))
        logr = ((m * s - 0.5) * math.log(m) + 0.5 * (1 - m) * math.log(2 * math.pi)
                + sum(log_gamma(s + k / m) for k in range(m)))
        assert np.max(np.abs(lhs - np.exp(logr)) / np.abs(lhs)) < 1e-10

    @given(st.floats(0.5, 20, **finite), st.floats(-20, 20, **finite))
    def test_recurrence(self, x, y):
        z = complex(x, y)
        assert gamma(z + 1) == pytest.approx(z * gamma(z), rel=1e-12)


class TestUpperIncompleteGamma:
    def test_exponential(self):
        assert upper_incomplete_gamma(1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
        assert upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2), rel=1e-14)

    def test_frozen_value(self):
        assert rel(upper_incomplete_gamma(0.5 + 1j, 1.0), UPPER_GAMMA_HALF_I_1) < 1e-12

    def test_exponential_integral(self):
        # e E_1(1)
        assert math.e * upper_incomplete_gamma(0.0, 1.0) == pytest.approx(0.5963473623231941,
                                                                           rel=1e-13)

    @given(st.floats(-6, 6, **finite), st.floats(-6, 6, **finite), st.floats(0.05, 20, **finite))
    def test_matches_mpmath(self, x, y, a):
        w = complex(x, y)
        want = complex(mpmath.gammainc(w, a))
        got = upper_incomplete_gamma(w, a)
        assert abs(got - want) <= 1e-10 * max(abs(want), 1e-300) + 1e-300

    @given(st.floats(0.2, 6, **finite), st.floats(-5, 5, **finite), st.floats(0.1, 10, **finite))
    def test_recurrence(self, x, y, a):
        w = complex(x, y)
        lhs = upper_incomplete_gamma(w + 1, a)
        rhs = w * upper_incomplete_gamma(w, a) + a ** w * math.exp(-a)
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


class TestBesselK:
    def test_half_order(self):
        assert bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2),
                                                   rel=1e-13)

    def test_frozen_k0(self):
        assert rel(bessel_k(0.0, 1.0), K0_1) < 1e-13

    def test_imaginary_order_is_real(self):
        v = bessel_k(1j, 1.0)
        assert abs(v.imag) < 1e-12
        assert rel(v.real, K_I_1) < 1e-12

    def test_half_order_grid(self):
        x = np.linspace(0.1, 20, 20)
        want = np.sqrt(np.pi / (2 * x)) * np.exp(-x)
        assert np.max(np.abs(bessel_k(0.5, x) - want) / want) < 1e-11

    @given(st.floats(-6, 6, **finite), st.floats(-40, 40, **finite), st.floats(0.05, 30, **finite))
    def test_conjugate_symmetry(self, a, b, x):
        nu = complex(a, b)
        assert bessel_k(np.conj(nu), x) == pytest.approx(np.conj(bessel_k(nu, x)), rel=1e-12,
                                                         abs=1e-300)

    @given(st.floats(0, 40, **finite), st.floats(0.05, 20, **finite))
    def test_even_in_imaginary_order(self, tau, x):
        a, b = bessel_k(1j * tau, x), bessel_k(-1j * tau, x)
        assert a.imag == 0 and a == b

    @given(st.floats(-4, 4, **finite), st.floats(-30, 30, **finite), st.floats(0.1, 20, **finite))
    def test_matches_mpmath(self, a, b, x):
        nu = complex(a, b)
        want = complex(mpmath.besselk(nu, x))
        assert abs(bessel_k(nu, x) - want) <= 1e-10 * abs(want) + 1e-300

    @pytest.mark.parametrize("delta", [0.0, math.pi / 6, math.pi / 3, 1.4])
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_uniform_bound(self, delta, x):
        tau = np.linspace(-10, 10, 201)
        k = np.abs(bessel_k(1j * tau, x))
        bound = np.exp(-delta * np.abs(tau)) * bessel_k(0.0, x * math.cos(delta)).real
        assert np.all(k <= bound + 1e-12)

    def test_envelope(self):
        with pytest.raises(EnvelopeError):
            bessel_k(60j, 1.0)

    def test_underflow_note(self):
        with pytest.warns(UnderflowNote):
            assert bessel_k(0.0, 800.0) == 0


class TestBesselI:
    def test_half_order(self):
        assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1),
                                                   rel=1e-14)

    def test_half_order_grid(self):
        w = np.linspace(0.1, 20, 20)
        want = np.sqrt(2 / (np.pi * w)) * np.cosh(w)
        assert np.max(np.abs(bessel_i(-0.5, w) - want) / want) < 1e-11

    def test_origin(self):
        assert bessel_i(0.0, 0.0) == 1

    def test_frozen_value(self):
        z = -0.25 + 2j
        assert rel(bessel_i(-(1 + z), 2.0), I_ORDER_2) < 1e-12

    @given(st.floats(-5, 5, **finite), st.floats(-5, 5, **finite), st.floats(0.1, 30, **finite))
    def test_recurrence(self, a, b, w):
        nu = complex(a, b)
        lhs = bessel_i(nu - 1, w) - bessel_i(nu + 1, w)
        rhs = 2 * nu / w * bessel_i(nu, w)
        scale = abs(bessel_i(nu - 1, w)) + abs(bessel_i(nu + 1, w))
        assert abs(lhs - rhs) <= 1e-11 * scale

    def test_envelope(self):
        with pytest.raises(EnvelopeError):
            bessel_i(0.0, 150.0)


class TestGeneralizedHyp:
    def test_exponential(self):
        assert generalized_hyp([], [], 1.0) == pytest.approx(math.e, rel=1e-15)

    def test_terminating_2f0(self):
        assert generalized_hyp([-1, -2], [], 1.0) == pytest.approx(3.0, rel=1e-15)

    def test_frozen_1f2(self):
        assert rel(generalized_hyp([1], [1.5, 1.5], -0.25), HYP1F2) < 1e-14

    def test_bessel_i_as_0f1(self):
        nu, w = 0.3 + 0.7j, 1.7
        want = (w / 2) ** nu / gamma(nu + 1) * generalized_hyp([], [nu + 1], w * w / 4)
        assert bessel_i(nu, w) == pytest.approx(want, rel=1e-13)

    def test_divergent(self):
        with pytest.raises(DivergentSeriesError):
            generalized_hyp([1, 1, 1], [1], 0.5)

    def test_denominator_pole(self):
        with pytest.raises(PoleError):
            generalized_hyp([1], [-2], 0.5)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            PrecisionBudget(target_abs_tol=0.0, target_rel_tol=0.0)
        with pytest.raises(ValueError):
            PrecisionBudget(max_terms=4)
