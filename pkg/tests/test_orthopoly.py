import math

import mpmath
import numpy as np
import pytest

from ladderlab.models import get_model
from ladderlab.operator_engine import interior_grid
from ladderlab.orthopoly import (
    MissingCoefficientError,
    PolynomialFamily,
    UnsupportedFamilyError,
    derivative,
    eval_hypergeometric,
    eval_recurrence,
    gegenbauer_jacobi_ratio_check,
)

# (family, model whose sinusoidal coordinate supplies the evaluation points)
ROUTE_CASES = [
    (PolynomialFamily("Hermite"), "Harmonic"),
    (PolynomialFamily("Laguerre", (1.5,)), "RadialOscillator"),
    (PolynomialFamily("Jacobi", (0.5, 0.5)), "SymPoschlTeller"),
    (PolynomialFamily("Jacobi", (0.5, 1.5)), "PoschlTeller"),
    (PolynomialFamily("MeixnerPollaczek", (1.0, math.pi / 2)), "MeixnerPollaczek"),
    (PolynomialFamily("ContinuousHahnSpecial", (0.5, 0.5)), "ContinuousHahn"),
    (PolynomialFamily("ContinuousDualHahn", (1.0, 1.0, 1.0)), "ContinuousDualHahn"),
    (PolynomialFamily("Wilson", (1.0, 1.0, 1.0, 1.0)), "Wilson"),
    (PolynomialFamily("AskeyWilson", (0.5, 0.5, 0.5, 0.5, 0.5)), "AskeyWilson"),
]


def route_error(fam, model_name, n, npts=25):
    spec = get_model(model_name)
    eta = spec.eta(interior_grid(spec, npts))
    hyp = np.array([eval_hypergeometric(fam, n, e) for e in eta])
    rec = eval_recurrence(fam, n, eta)
    return np.max(np.abs(hyp - rec)) / np.max(np.abs(hyp))


@pytest.mark.parametrize("fam,model_name", ROUTE_CASES, ids=[c[0].family_id + "-" + c[1] for c in ROUTE_CASES])
def test_route_equality_up_to_degree_20(fam, model_name):
    worst = max(route_error(fam, model_name, n) for n in range(21))
    assert worst <= 1e-10


def test_jacobi_examples():
    fam = PolynomialFamily("Jacobi", (0.5, 0.5))
    assert eval_hypergeometric(fam, 0, 0.37) == 1
    assert abs(eval_hypergeometric(fam, 1, 0.0)) < 1e-16


def test_laguerre_example():
    assert eval_hypergeometric(PolynomialFamily("Laguerre", (0.5,)), 1, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_recurrence_degree_zero():
    for fam, _ in ROUTE_CASES:
        assert eval_recurrence(fam, 0, 0.3) == 1


def test_meixner_pollaczek_routes_agree_pointwise():
    fam = PolynomialFamily("MeixnerPollaczek", (1.0, math.pi / 2))
    xs = np.linspace(-3, 3, 20)
    for x in xs:
        assert abs(eval_recurrence(fam, 1, x) - eval_hypergeometric(fam, 1, x)) < 1e-14


def test_wilson_degree_three_at_two():
    fam = PolynomialFamily("Wilson", (1.0, 1.0, 1.0, 1.0))
    a = eval_recurrence(fam, 3, 2.0)
    b = eval_hypergeometric(fam, 3, 2.0)
    assert abs(a - b) <= 1e-12 * abs(b)


@pytest.mark.parametrize("n", [0, 3, 7, 12])
def test_classical_families_against_mpmath(n):
    x = 0.37
    assert eval_hypergeometric(PolynomialFamily("Hermite"), n, x).real == pytest.approx(float(mpmath.hermite(n, x)), rel=1e-12, abs=1e-12)
    assert eval_hypergeometric(PolynomialFamily("Laguerre", (1.5,)), n, x).real == pytest.approx(float(mpmath.laguerre(n, 1.5, x)), rel=1e-12)
    assert eval_hypergeometric(PolynomialFamily("Jacobi", (0.5, 1.2)), n, x).real == pytest.approx(float(mpmath.jacobi(n, 0.5, 1.2, x)), rel=1e-12, abs=1e-12)
    assert eval_hypergeometric(PolynomialFamily("Gegenbauer", (1.3,)), n, x).real == pytest.approx(float(mpmath.gegenbauer(n, 1.3, x)), rel=1e-12, abs=1e-12)


def test_wilson_against_mpmath_4f3():
    a = (0.7, 1.1, 1.3, 0.9)
    n, x = 4, 0.8
    ref = mpmath.rf(a[0] + a[1], n) * mpmath.rf(a[0] + a[2], n) * mpmath.rf(a[0] + a[3], n)
    ref *= mpmath.hyper([-n, n + sum(a) - 1, a[0] + 1j * x, a[0] - 1j * x], [a[0] + a[1], a[0] + a[2], a[0] + a[3]], 1)
    val = eval_hypergeometric(PolynomialFamily("Wilson", a), n, x * x)
    assert abs(val - complex(ref)) < 1e-11 * abs(complex(ref))


def test_gegenbauer_has_no_recurrence():
    with pytest.raises(MissingCoefficientError):
        eval_recurrence(PolynomialFamily("Gegenbauer", (1.0,)), 3, 0.2)


def test_jacobi_parity():
    fam = PolynomialFamily("Jacobi", (0.8, 0.8))
    for n in range(12):
        for x in (0.1, 0.45, 0.9):
            assert abs(eval_hypergeometric(fam, n, -x) - (-1) ** n * eval_hypergeometric(fam, n, x)) < 1e-13


@pytest.mark.parametrize("beta,n,arg,tol", [(0.5, 0, 0.3, 0.0), (0.5, 2, 0.3, 1e-13), (1.2, 5, -0.7, 1e-12)])
def test_gegenbauer_jacobi_ratio(beta, n, arg, tol):
    assert gegenbauer_jacobi_ratio_check(beta, n, arg) <= tol


def test_gegenbauer_jacobi_ratio_sweep():
    worst = max(
        gegenbauer_jacobi_ratio_check(b, n, x)
        for b in (-0.3, 0.5, 1.2, 3.0)
        for n in range(16)
        for x in (-0.9, -0.2, 0.4, 0.95)
    )
    assert worst <= 1e-12


def test_derivative_examples():
    jac = PolynomialFamily("Jacobi", (0.5, 0.5))
    assert derivative(jac, 0, 0.3) == 0
    assert derivative(jac, 1, 0.3) == pytest.approx(1.5, rel=1e-15)
    lag = PolynomialFamily("Laguerre", (0.5,))
    h = 1e-5
    fd = (eval_hypergeometric(lag, 2, 1 + h) - eval_hypergeometric(lag, 2, 1 - h)) / (2 * h)
    assert abs(derivative(lag, 2, 1.0) - fd) < 1e-8


def test_derivative_unsupported_for_deformed_families():
    with pytest.raises(UnsupportedFamilyError):
        derivative(PolynomialFamily("Wilson", (1.0, 1.0, 1.0, 1.0)), 2, 0.5)


@pytest.mark.parametrize("n", range(1, 7))
def test_leading_growth(n):
    fam = PolynomialFamily("Laguerre", (0.5,))
    r = eval_hypergeometric(fam, n, 2e4) / eval_hypergeometric(fam, n, 1e4)
    assert abs(r.real / 2**n - 1) < 0.05


def test_permutation_symmetry():
    for n in range(8):
        for e in (0.3, 2.0):
            w = [eval_hypergeometric(PolynomialFamily("Wilson", p), n, e) for p in [(0.6, 1.1, 1.4, 0.9), (1.4, 0.9, 0.6, 1.1), (0.9, 0.6, 1.1, 1.4)]]
            c = [eval_hypergeometric(PolynomialFamily("ContinuousDualHahn", p), n, e) for p in [(0.6, 1.1, 1.4), (1.4, 0.6, 1.1)]]
            assert abs(w[1] - w[0]) <= 1e-12 * abs(w[0]) and abs(w[2] - w[0]) <= 1e-12 * abs(w[0])
            assert abs(c[1] - c[0]) <= 1e-12 * abs(c[0])


def test_family_constraints():
    with pytest.raises(ValueError):
        PolynomialFamily("Jacobi", (-1.5, 0.0))
    with pytest.raises(ValueError):
        PolynomialFamily("AskeyWilson", (0.5, 0.5, 0.5, 0.5, 1.2))
