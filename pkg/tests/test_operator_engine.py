import math

import numpy as np
import pytest

from ladderlab.models import MODEL_NAMES, get_model
from ladderlab.operator_engine import (
    GridEvaluation,
    anticommutator_check,
    apply_hamiltonian_ordinary,
    apply_ladder,
    apply_similarity_hamiltonian_discrete,
    eigen_data,
    eigen_residual,
    hermiticity_check,
    interior_grid,
    norm_squared,
    orthogonality,
    rows_to_csv,
    su11_commutator_check,
    three_term_residual,
    truncated_norm_squared,
    VerificationRow,
)


def test_interior_grid_respects_margin():
    spec = get_model("SymPoschlTeller")
    g = interior_grid(spec, 50)
    assert len(g) == 50 and g[0] > 0.02 * math.pi * 0.99 and g[-1] < math.pi
    assert np.all(np.diff(g) > 0)


def test_grid_evaluation_requires_increasing_points():
    with pytest.raises(ValueError):
        GridEvaluation([0.0, 0.0], [1.0, 2.0])


def test_harmonic_ground_state_annihilated():
    spec = get_model("Harmonic")
    out = apply_hamiltonian_ordinary(spec, 0, interior_grid(spec))
    assert np.max(np.abs(out.values)) < 1e-13


@pytest.mark.parametrize("name,params,n,E", [
    ("SymPoschlTeller", {"g": 1.0}, 2, 4.0),
    ("Morse", {"g": 2.5, "mu": 1.0}, 1, 2.0),
])
def test_ordinary_hamiltonian_examples(name, params, n, E):
    spec = get_model(name, params)
    grid = interior_grid(spec)
    out = apply_hamiltonian_ordinary(spec, n, grid)
    phi = spec.eigenfunction(n, grid)
    assert np.max(np.abs(out.values - E * phi)) <= 1e-9 * np.max(np.abs(phi)) * max(1, E)


@pytest.mark.parametrize("name,params,n,E", [
    ("MeixnerPollaczek", {"a": 1.0}, 0, 0.0),
    ("Wilson", {"a": (1, 1, 1, 1)}, 1, 2.0),
    ("AskeyWilson", {"a": (0.5,) * 4, "q": 0.5}, 1, 0.46875),
])
def test_discrete_hamiltonian_examples(name, params, n, E):
    spec = get_model(name, params)
    grid = interior_grid(spec)
    out = apply_similarity_hamiltonian_discrete(spec, n, grid)
    P = spec.polynomial(n, spec.eta(grid))
    assert np.max(np.abs(out.values - E * P)) <= 1e-9 * max(1.0, np.max(np.abs(E * P)))


def test_wrong_kind_is_rejected():
    with pytest.raises(TypeError):
        apply_hamiltonian_ordinary(get_model("Wilson"), 1, [0.5, 1.0])
    with pytest.raises(TypeError):
        apply_similarity_hamiltonian_discrete(get_model("Harmonic"), 1, [0.5, 1.0])


def test_analytic_derivatives_match_richardson():
    spec = get_model("PoschlTeller", g=1.5, h=2.5)
    x = interior_grid(spec, 9)
    phi, d1, d2 = eigen_data(spec, 3, x)
    h = 1e-3

    def fd(f, x, h):
        return (f(x + h) - f(x - h)) / (2 * h), (f(x + h) - 2 * f(x) + f(x - h)) / h**2

    f = lambda t: spec.eigenfunction(3, t)  # noqa: E731
    a1, a2 = fd(f, x, h)
    b1, b2 = fd(f, x, h / 2)
    rich1, rich2 = (4 * b1 - a1) / 3, (4 * b2 - a2) / 3
    assert np.max(np.abs(d1 - rich1)) < 1e-8 * np.max(np.abs(d1))
    assert np.max(np.abs(d2 - rich2)) < 1e-6 * np.max(np.abs(d2))


def test_eigen_residual_all_levels(any_model):
    grid = interior_grid(any_model)
    top = int(min(15, any_model.level_count - 1))
    assert max(eigen_residual(any_model, n, grid) for n in range(top + 1)) <= 1e-8


def test_ground_state_annihilated(any_model):
    grid = interior_grid(any_model)
    for which in ("minus", "minus_prime"):
        rep = apply_ladder(any_model, which, 0, grid)
        assert rep.expected_coefficient == 0 and rep.max_rel_residual <= 1e-10


def test_ladder_examples():
    spt = get_model("SymPoschlTeller", g=1.0)
    rep = apply_ladder(spt, "minus_prime", 1, interior_grid(spt))
    assert rep.fitted_coefficient.real == pytest.approx(1.5, rel=1e-9)
    ch = get_model("ContinuousHahn", a=(0.5, 0.5))
    rep = apply_ladder(ch, "minus_prime", 1, interior_grid(ch))
    assert rep.fitted_coefficient.real == pytest.approx(0.5, rel=1e-9)
    mp = get_model("MeixnerPollaczek", a=1.0)
    rep = apply_ladder(mp, "minus_prime", 1, interior_grid(mp))
    assert rep.fitted_coefficient.real == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize("which", ["minus", "plus", "minus_prime", "plus_prime"])
def test_ladder_coefficients_match(any_model, which):
    grid = interior_grid(any_model)
    top = int(min(12, any_model.level_count - 1))
    for n in range(1 if which.startswith("minus") else 0, top + 1):
        if which.startswith("plus") and n + 1 >= any_model.level_count:
            continue
        rep = apply_ladder(any_model, which, n, grid)
        assert rep.coefficient_error <= 1e-9, (n, rep)
        assert rep.max_rel_residual <= 1e-9, (n, rep)


def test_invalid_ladder_kind():
    with pytest.raises(ValueError):
        apply_ladder(get_model("Harmonic"), "sideways", 1, [0.1, 0.2])


@pytest.mark.parametrize("name,n,tol", [("MeixnerPollaczek", 1, 1e-11), ("SymPoschlTeller", 3, 1e-10), ("AskeyWilson", 2, 1e-9)])
def test_three_term_examples(name, n, tol):
    spec = get_model(name)
    assert three_term_residual(spec, n, interior_grid(spec)) <= tol


def test_three_term_all_models(any_model):
    grid = interior_grid(any_model)
    top = int(min(12, any_model.level_count - 2))
    for n in range(1, top + 1):
        assert three_term_residual(any_model, n, grid) <= 1e-10


def test_orthogonality_examples():
    spt = get_model("SymPoschlTeller", g=1.0)
    assert orthogonality(spt, 0, 0) == pytest.approx(math.pi / 2, rel=1e-10)
    for name in MODEL_NAMES:
        spec = get_model(name)
        val = orthogonality(spec, 0, 1)
        assert abs(val) / math.sqrt(norm_squared(spec, 0) * norm_squared(spec, 1)) <= 1e-8


def test_morse_top_level_normalizable_next_one_not():
    spec = get_model("Morse", g=3.7)
    assert norm_squared(spec, 3) > 0
    # phi_4 behaves like exp((g - 4) x) as x -> -infinity
    grow = [truncated_norm_squared(spec, 4, lo, 10.0) for lo in (-20.0, -40.0, -80.0)]
    assert grow[0] < grow[1] < grow[2] and grow[2] > 1e3 * grow[0]


def test_hermiticity(any_model):
    assert hermiticity_check(any_model, 10) <= 1e-6


def test_su11_relations():
    assert su11_commutator_check(get_model("MeixnerPollaczek", a=1.0), 10) <= 1e-11
    assert su11_commutator_check(get_model("RadialOscillator", g=1.0), 10) <= 1e-11
    assert su11_commutator_check(get_model("MeixnerPollaczek", a=1.0), 2) == 0.0
    with pytest.raises(TypeError):
        su11_commutator_check(get_model("Wilson"), 10)


@pytest.mark.parametrize("name", ["SymPoschlTeller", "Soliton"])
def test_anticommutator(name):
    assert anticommutator_check(get_model(name), 12) <= 1e-9


def test_rows_to_csv():
    text = rows_to_csv([VerificationRow("Harmonic", "abc", 1, "eigen", 1e-12, 1e-8)])
    lines = text.strip().split("\n")
    assert lines[0] == "model,params_hash,n,check_name,residual,tolerance,pass"
    assert lines[1].endswith("True")
