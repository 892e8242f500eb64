import math

import numpy as np
import pytest

from ladderlab.models import get_model
from ladderlab.operator_engine import interior_grid
from ladderlab.shape_invariance import (
    COMPENSATED,
    DISCRETE,
    compensator_check,
    compensator_constants,
    compensator_ladder_check,
    energy_factorization_check,
    factorized_hamiltonian_check,
    forward_shift_check,
    ground_shift_identity_check,
    backward_shift_check,
    prepotential_check,
    prepotential_derivative,
    shape_data,
)

ORDINARY = ("Harmonic", "SymPoschlTeller", "PoschlTeller", "Soliton", "Morse", "RadialOscillator")


@pytest.fixture(params=DISCRETE)
def discrete(request):
    return get_model(request.param)


def test_shift_constant_examples():
    assert get_model("MeixnerPollaczek", a=1.0).shape_f(1) == 2
    assert get_model("MeixnerPollaczek", a=1.0).shape_b(2) == 3
    assert get_model("Wilson", a=(1, 1, 1, 1)).shape_f(2) == pytest.approx(-10)
    aw = get_model("AskeyWilson", a=(0.5,) * 4, q=0.5)
    assert aw.shape_f(1) == pytest.approx(-math.sqrt(0.5) * (2 - 1) * (1 - 1 / 16))
    assert aw.shape_b(1) == pytest.approx(-2.0)
    assert get_model("ContinuousDualHahn", a=(1, 1, 1)).shape_b(0) == -1


def test_shape_data_records_shift():
    sd = shape_data(get_model("Wilson", a=(1, 1, 1, 1)))
    assert sd.delta == {"a": (0.5, 0.5, 0.5, 0.5)} and sd.delta_prime is None
    sd = shape_data(get_model("AskeyWilson"))
    assert sd.delta_prime == 0.5
    with pytest.raises(ValueError):
        shape_data(get_model("Harmonic"))


def test_energy_factorization(discrete):
    assert energy_factorization_check(discrete, 20) <= 1e-12
    sd = shape_data(discrete)
    assert max(sd.factorization_error(discrete, n) for n in range(1, 21)) <= 1e-12


def test_continuous_hahn_first_level():
    spec = get_model("ContinuousHahn", a=(0.5, 0.5))
    # f_1 = 1 + 2 a_1 + 2 a_2 - 1 = 2, b_0 = 1, and E_1 = 1 (1 + 2 - 1) / 2 = 1
    assert spec.shape_f(1) * spec.shape_b(0) / 2 == pytest.approx(1.0)
    assert spec.energy(1) == pytest.approx(1.0)


def test_forward_and_backward_shifts(discrete):
    grid = interior_grid(discrete)
    assert max(forward_shift_check(discrete, n, grid) for n in range(1, 16)) <= 1e-9
    assert max(backward_shift_check(discrete, n, grid) for n in range(0, 15)) <= 1e-9


def test_backward_after_forward_is_hamiltonian(discrete):
    grid = interior_grid(discrete)
    assert max(factorized_hamiltonian_check(discrete, n, grid) for n in range(0, 12)) <= 1e-9


@pytest.mark.parametrize("name", ["MeixnerPollaczek", "ContinuousHahn", "ContinuousDualHahn", "Wilson"])
def test_ground_shift_identity(name):
    spec = get_model(name)
    assert ground_shift_identity_check(spec, interior_grid(spec)) <= 1e-9


def test_ground_shift_identity_not_for_askey_wilson():
    spec = get_model("AskeyWilson")
    with pytest.raises(ValueError):
        ground_shift_identity_check(spec, interior_grid(spec))


def test_compensator_constant_examples():
    mp = get_model("MeixnerPollaczek", a=1.0)
    assert compensator_constants(mp, 0) == (2.0, 2.0)
    assert compensator_constants(mp, 3)[1] == 5
    assert compensator_constants(get_model("ContinuousDualHahn", a=(1, 1, 1)), 1) == (1.0, 27.0)


@pytest.mark.parametrize("name", COMPENSATED)
def test_compensator_identities(name):
    spec = get_model(name)
    grid = interior_grid(spec)
    for n in range(10):
        r1, r2 = compensator_check(spec, n, grid)
        assert r1 <= 1e-10 and r2 <= 1e-10


@pytest.mark.parametrize("name,params", [("MeixnerPollaczek", {"a": 0.7}), ("ContinuousDualHahn", {"a": (0.4, 1.3, 0.9)})])
def test_compensator_other_parameters(name, params):
    spec = get_model(name, params)
    grid = interior_grid(spec)
    assert max(max(compensator_check(spec, n, grid)) for n in range(8)) <= 1e-10
    assert compensator_ladder_check(spec, 12) <= 1e-10


@pytest.mark.parametrize("name", COMPENSATED)
def test_compensator_rebuilds_ladder_coefficients(name):
    assert compensator_ladder_check(get_model(name), 12) <= 1e-10


def test_compensator_only_for_two_models():
    with pytest.raises(ValueError):
        compensator_check(get_model("Wilson"), 1, [0.5])


@pytest.mark.parametrize("name", ORDINARY)
def test_prepotential(name):
    spec = get_model(name)
    assert prepotential_check(spec, interior_grid(spec)) <= 1e-10


def test_prepotential_examples():
    x = np.linspace(0.3, 2.8, 7)
    w1, _ = prepotential_derivative(get_model("Harmonic"), x)
    assert np.allclose(w1, -x, atol=1e-14)
    w1, _ = prepotential_derivative(get_model("SymPoschlTeller", g=1.0), x)
    assert np.allclose(w1, 1.0 / np.tan(x), rtol=1e-13)
    x = np.linspace(-2, 2, 7)
    w1, _ = prepotential_derivative(get_model("Morse", g=2.0, mu=1.0), x)
    assert np.allclose(w1, -np.exp(x) + 2.0, rtol=1e-13)


def test_prepotential_matches_ground_state_log_derivative():
    for name in ORDINARY:
        spec = get_model(name)
        x = interior_grid(spec, 20)
        w1, _ = prepotential_derivative(spec, x)
        h = 1e-6
        fd = (spec.ground_log(x + h) - spec.ground_log(x - h)).real / (2 * h)
        assert np.max(np.abs(w1 - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))


def test_prepotential_rejects_discrete():
    with pytest.raises(ValueError):
        prepotential_derivative(get_model("Wilson"), [0.5])
