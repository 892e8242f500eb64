import itertools
import json
import math

import numpy as np
import pytest

from ladderlab.models import (
    MODEL_NAMES,
    ConstraintError,
    FrequencyError,
    LevelRangeError,
    canonical_name,
    energy,
    floor_prime,
    get_model,
    heisenberg_frequencies,
    ladder_coefficients,
)
from ladderlab.orthopoly import PolynomialFamily, eval_hypergeometric


def test_registry_has_eleven_models():
    assert len(MODEL_NAMES) == 11


def test_aliases():
    assert canonical_name("sym-poschl-teller") == "SymPoschlTeller"
    assert canonical_name("askey_wilson") == "AskeyWilson"
    assert canonical_name("mp") == "MeixnerPollaczek"
    with pytest.raises(KeyError):
        canonical_name("kepler")


def test_energy_examples():
    assert get_model("SymPoschlTeller", g=1.0).energy(2) == pytest.approx(4.0)
    assert get_model("SymPoschlTeller", g=1.0).energy(1) == pytest.approx(1.5)
    assert get_model("MeixnerPollaczek", a=1.0).energy(7) == pytest.approx(7.0)
    aw = get_model("AskeyWilson", a=(0.5,) * 4, q=0.5)
    assert aw.energy(1) == pytest.approx(0.46875, rel=1e-15)
    assert energy(get_model("Wilson", a=(1, 1, 1, 1)), 1) == pytest.approx(2.0)


def test_ground_energy_is_zero(any_model):
    assert any_model.energy(0) == 0


def test_energies_strictly_increasing(any_model):
    top = int(min(25, any_model.level_count - 1))
    E = [any_model.energy(n) for n in range(top + 1)]
    assert all(b > a for a, b in zip(E, E[1:]))


def test_spectrum_conditions(any_model):
    top = int(min(25, any_model.level_count - 2))
    for n in range(top + 1):
        En, En1 = any_model.energy(n), any_model.energy(n + 1)
        ap = any_model.alpha_plus(En)
        am = any_model.alpha_minus(En1)
        assert abs(En1 - En - ap) <= 1e-12 * max(1.0, abs(En1))
        assert abs(En - En1 - am) <= 1e-12 * max(1.0, abs(En1))


def test_frequency_sum_and_product(any_model):
    top = int(min(20, any_model.level_count - 1))
    for n in range(top + 1):
        E = any_model.energy(n)
        ap, am = any_model.heisenberg_frequencies(E)
        scale = max(1.0, abs(ap), abs(am)) ** 2
        assert abs(ap + am - any_model.r1(E)) <= 1e-12 * scale
        assert abs(ap * am + any_model.r0(E)) <= 1e-12 * scale


def test_frequency_examples():
    assert heisenberg_frequencies(get_model("MeixnerPollaczek", a=1.0), 3.0) == pytest.approx((1.0, -1.0))
    assert heisenberg_frequencies(get_model("SymPoschlTeller", g=1.0), 0.0) == pytest.approx((1.5, -0.5))
    assert heisenberg_frequencies(get_model("Harmonic"), 2.0) == pytest.approx((1.0, -1.0))


def test_negative_discriminant():
    with pytest.raises(FrequencyError):
        get_model("SymPoschlTeller", g=1.0).heisenberg_frequencies(-10.0)


def test_ladder_examples():
    for name in MODEL_NAMES:
        assert ladder_coefficients(get_model(name), 0)[2] == 0
    spt = get_model("SymPoschlTeller", g=1.0)
    assert spt.ladder_C(1) * spt.ladder_norm_factor(1) == pytest.approx(1.5)
    mp = get_model("MeixnerPollaczek", a=1.0)
    assert mp.ladder_C(1) * mp.ladder_norm_factor(1) == pytest.approx(2.0)


def test_middle_coefficient_matches_r_polynomials(any_model):
    top = int(min(15, any_model.level_count - 1))
    for n in range(top + 1):
        E = any_model.energy(n)
        if abs(any_model.r0(E)) < 1e-12:
            continue  # the quotient is a removable singularity at this level
        b = -any_model.rm1(E) / any_model.r0(E)
        assert abs(any_model.ladder_B(n) - b) <= 1e-10 * max(1.0, abs(b))


def test_middle_coefficient_matches_polynomial_family(any_model):
    # eta P_n = A P_{n+1} + B P_n + C P_{n-1} evaluated with the hypergeometric route
    top = int(min(8, any_model.level_count - 2))
    etas = (0.31, 0.77)
    for n in range(1, top + 1):
        A, B, C = any_model.ladder_coefficients(n)
        for e in etas:
            P = [any_model.polynomial_hypergeometric(k, e) for k in (n - 1, n, n + 1)]
            res = e * P[1] - A * P[2] - B * P[1] - C * P[0]
            assert abs(res) <= 1e-10 * max(abs(e * P[1]), abs(A * P[2]), abs(C * P[0]))


def test_finite_level_count():
    assert floor_prime(3.7) == 3
    assert floor_prime(3.0) == 2
    assert get_model("Morse", g=3.7).level_count == 4
    assert get_model("Soliton", g=3.7).level_count == 4
    assert get_model("Morse", g=3.0).level_count == 3
    with pytest.raises(LevelRangeError):
        get_model("Morse", g=3.7).energy(4)


def test_constraint_errors():
    with pytest.raises(ConstraintError, match="a_j > 0"):
        get_model("Wilson", a=(-1, 1, 1, 1))
    with pytest.raises(ConstraintError):
        get_model("SymPoschlTeller", g=-1.0)
    with pytest.raises(ConstraintError):
        get_model("AskeyWilson", a=(0.9, 0.9, 0.9, 0.9), q=0.5)
    with pytest.raises(ConstraintError):
        get_model("Harmonic", g=2.0)


def test_eigenfunction_ground_is_positive(any_model):
    lo, hi = any_model.window()
    x = np.linspace(lo, hi, 17)[1:-1]
    v = any_model.eigenfunction(0, x)
    assert np.all(np.abs(np.imag(v)) == 0) and np.all(np.real(v) > 0)


def test_soliton_eigenfunction_is_real():
    v = get_model("Soliton", g=2.5).eigenfunction(2, 0.7)
    assert abs(np.imag(v)) <= 1e-12


def test_meixner_pollaczek_eigenfunction():
    spec = get_model("MeixnerPollaczek", a=1.0)
    fam = PolynomialFamily("MeixnerPollaczek", (1.0, math.pi / 2))
    expected = math.exp(spec.ground_log(0.5).real) * eval_hypergeometric(fam, 1, 0.5)
    assert spec.eigenfunction(1, 0.5) == pytest.approx(expected, rel=1e-13)


def test_eigenfunction_domain_error():
    with pytest.raises(ValueError):
        get_model("SymPoschlTeller").eigenfunction(0, 4.0)


@pytest.mark.parametrize("name,params", [
    ("Wilson", (0.6, 1.1, 1.4, 0.9)),
    ("ContinuousDualHahn", (0.6, 1.1, 1.4)),
    ("AskeyWilson", (0.3, -0.4, 0.6, 0.5)),
])
def test_parameter_permutation_invariance(name, params):
    kw = {"q": 0.6} if name == "AskeyWilson" else {}
    ref = get_model(name, a=params, **kw)
    x = np.linspace(*ref.window(), 9)[1:-1]
    for perm in itertools.permutations(params):
        spec = get_model(name, a=perm, **kw)
        for n in range(6):
            assert abs(spec.energy(n) - ref.energy(n)) <= 1e-12 * max(1.0, ref.energy(n))
            a, b = spec.eigenfunction(n, x), ref.eigenfunction(n, x)
            assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_describe_json_round_trip():
    doc = json.loads(get_model("Morse", g=3.7).to_json(10))
    assert doc["level_count"] == 4
    assert len(doc["spectrum"]) == 4
    assert all(k == k.lower() for k in doc)
