import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladderlab.specfun import (
    DivergenceError,
    PoleError,
    basic_hypergeometric_rphis,
    bessel_j,
    hypergeometric_rFs,
    log_gamma,
    pochhammer,
    q_pochhammer,
)


@pytest.mark.parametrize("a,n,expected", [(3.7 + 1j, 0, 1), (2, 3, 24), (0.5, 2, 0.75)])
def test_pochhammer_examples(a, n, expected):
    assert pochhammer(a, n) == pytest.approx(expected, rel=1e-15)


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), st.integers(0, 30))
def test_pochhammer_step(a, n):
    lhs = pochhammer(a, n + 1)
    rhs = pochhammer(a, n) * (a + n)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_q_pochhammer_examples():
    assert q_pochhammer(0.3, 0.7, 0) == 1
    assert q_pochhammer(0.5, 0.5, 2) == pytest.approx(0.375, rel=1e-15)
    assert q_pochhammer(0.0, 0.5, math.inf) == 1


def test_q_pochhammer_infinite_matches_mpmath():
    val = q_pochhammer(0.3 + 0.2j, 0.6, math.inf)
    ref = complex(mpmath.qp(mpmath.mpc(0.3, 0.2), 0.6))
    assert abs(val - ref) < 1e-14


def test_q_pochhammer_divergent_infinite_product():
    with pytest.raises(DivergenceError):
        q_pochhammer(0.5, 1.0, math.inf)


@pytest.mark.parametrize("n", range(1, 6))
def test_q_pochhammer_classical_limit(n):
    q, a = 0.999, 1.3
    approx = q_pochhammer(q**a, q, n) / (1 - q) ** n
    assert abs(approx / pochhammer(a, n) - 1) < 0.01


def test_log_gamma_examples():
    assert abs(log_gamma(1.0)) < 1e-15
    assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)


def test_log_gamma_poles():
    for z in (0, -1, -7):
        with pytest.raises(PoleError):
            log_gamma(z)


def test_log_gamma_against_mpmath(rng):
    re = rng.uniform(0.5, 40, 60)
    im = rng.uniform(-30, 30, 60)
    for z in re + 1j * im:
        ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        val = complex(log_gamma(z))
        # compare the exponentials so the 2*pi*i branch bookkeeping drops out
        assert abs(val.real - ref.real) <= 1e-13 * max(1.0, abs(ref))
        assert abs(np.exp(1j * (val.imag - ref.imag)) - 1) <= 1e-13 * max(1.0, abs(ref))


def test_log_gamma_functional_equation(rng):
    z = rng.uniform(-6, 6, 100) + 1j * rng.uniform(-6, 6, 100)
    ratio = np.exp(log_gamma(z + 1) - log_gamma(z))
    assert np.max(np.abs(ratio / z - 1)) < 1e-12


def test_hypergeometric_examples():
    assert hypergeometric_rFs([1.2, 0.3], [2.5], 0).value == 1
    b, c, z = 0.7, 1.9, 0.4 - 0.2j
    assert hypergeometric_rFs([-1, b], [c], z).value == pytest.approx(1 - b * z / c, rel=1e-15)
    res = hypergeometric_rFs([], [1], -0.25)
    assert res.value == pytest.approx(0.7651976865579666, rel=1e-14)


def test_terminating_series_has_zero_truncation():
    res = hypergeometric_rFs([-4, 2.5], [1.5], 0.3)
    assert res.truncation_estimate == 0


def test_hypergeometric_against_mpmath():
    val = hypergeometric_rFs([0.3 + 1j, 1.1], [2.2], 0.4 + 0.3j).value
    ref = complex(mpmath.hyp2f1(mpmath.mpc(0.3, 1), 1.1, 2.2, mpmath.mpc(0.4, 0.3)))
    assert abs(val - ref) < 1e-14 * abs(ref)
    val = hypergeometric_rFs([1 + 0.5j], [2], -0.8j).value
    ref = complex(mpmath.hyp1f1(mpmath.mpc(1, 0.5), 2, mpmath.mpc(0, -0.8)))
    assert abs(val - ref) < 1e-14 * abs(ref)


def test_hypergeometric_divergent():
    with pytest.raises(DivergenceError):
        hypergeometric_rFs([1.5, 2.5, 0.5], [1.2], 0.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.floats(0.2, 3), st.floats(0.3, 3), st.floats(-1.5, 1.5))
def test_terminating_series_matches_horner(n, b, c, z):
    val = hypergeometric_rFs([-n, b], [c], z).value
    # explicit polynomial coefficients, evaluated by Horner's rule
    coefs = [pochhammer(-n, k) * pochhammer(b, k) / (pochhammer(c, k) * math.factorial(k)) for k in range(n + 1)]
    horner = 0.0
    for cf in reversed(coefs):
        horner = horner * z + cf
    scale = sum(abs(cf) * abs(z) ** k for k, cf in enumerate(coefs))
    assert abs(val - horner) <= 1e-13 * scale


def test_basic_hypergeometric_examples():
    assert basic_hypergeometric_rphis([0.2, 0.3], [0.4], 0.5, 0).value == 1
    res = basic_hypergeometric_rphis([1.0, 0.3, 0.2, 0.1], [0.5, 0.6, 0.7], 0.5, 1.0)
    assert res.value == 1


def test_basic_hypergeometric_direct_sum():
    a, b, q, z = 0.3, 0.6, 0.5, 0.1
    val = basic_hypergeometric_rphis([a], [b], q, z).value
    # 1phi1 carries the extra factor (-1)^k q^{k(k-1)/2}
    direct = sum(
        q_pochhammer(a, q, k) / (q_pochhammer(b, q, k) * q_pochhammer(q, q, k)) * (-1) ** k * q ** (k * (k - 1) / 2) * z**k
        for k in range(20)
    )
    assert abs(val - direct) < 1e-15


def test_basic_hypergeometric_against_mpmath():
    val = basic_hypergeometric_rphis([0.3, 0.4], [0.7], 0.6, 0.5).value
    ref = float(mpmath.qhyper([0.3, 0.4], [0.7], 0.6, 0.5))
    assert abs(val - ref) < 1e-14


def test_bessel_examples():
    assert bessel_j(0, 0) == 1
    assert bessel_j(0.5, 0) == 0
    assert bessel_j(0, 1) == pytest.approx(0.7651976865579666, rel=1e-14)


@pytest.mark.parametrize("a,z", [(0.5, 1.3), (2.5, 0.7 + 0.4j), (1.0, -2.0j), (3.2, 4.0)])
def test_bessel_against_mpmath(a, z):
    ref = complex(mpmath.besselj(a, mpmath.mpmathify(z)))
    assert abs(bessel_j(a, z) - ref) < 1e-14 * max(1.0, abs(ref))
