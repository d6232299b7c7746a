import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_symmetric_density, trace_out_first_pair
from spinpart.angular import Direction, SpinState
from spinpart.partition import (
    PairState,
    brute_force_pair_oracle,
    pair_annihilation_ops,
    pair_husimi,
    pair_husimi_weighted,
    projected_excited_state,
    projection_probabilities,
    q_dicke,
    reduced_pair_state,
    remove_pair,
    sample_projections,
    spin_one_coherent_vector,
    spin_one_rotation,
)
from spinpart.random import random_direction, random_spin_state
from spinpart.states import cat_state, coherent, dicke, rotate, w_state

seeds = st.integers(0, 2**32 - 1)
pair_two_js = st.integers(2, 16)


def test_q_dicke_examples():
    assert q_dicke(8, -8) == 0 and q_dicke(8, -7) == 0
    assert q_dicke(8, 8) == 1
    assert q_dicke(8, 0, exact=True) == Fraction(7, 30)
    with pytest.raises(ValueError):
        q_dicke(0.5, 0.5)


@pytest.mark.parametrize("two_j", range(2, 21))
def test_q_dicke_sum_rule(two_j):
    j = two_j / 2
    ms = [Fraction(k, 2) for k in range(-two_j, two_j + 1, 2)]
    assert sum(q_dicke(j, m, exact=True) for m in ms) == Fraction(two_j + 1, 3)


@pytest.mark.parametrize("two_j", range(2, 17))
def test_pair_annihilators_complete(two_j):
    ops = pair_annihilation_ops(two_j / 2)
    total = sum(p.T @ p for p in ops)
    assert np.abs(total - np.eye(two_j + 1)).max() < 1e-12
    for p in ops:
        assert p.shape == (two_j - 1, two_j + 1)


def test_pair_annihilator_matches_q_dicke():
    p = pair_annihilation_ops(8)[1]
    for k, m in enumerate(range(-8, 9)):
        assert (p.T @ p)[k, k] == pytest.approx(q_dicke(8, m), abs=1e-14)


def test_two_qubits_reduced_state_is_identity_map():
    s = random_spin_state(1, 5)
    assert reduced_pair_state(s).allclose(PairState.from_spin_state(s), atol=1e-14)
    assert brute_force_pair_oracle(s.matrix).allclose(PairState.from_spin_state(s), atol=1e-14)


def test_reduced_pair_of_named_states():
    assert np.allclose(reduced_pair_state(w_state(8)).matrix, np.diag([0, 1 / 8, 7 / 8]), atol=1e-12)
    assert np.allclose(reduced_pair_state(cat_state(8)).matrix, np.diag([0.5, 0, 0.5]), atol=1e-12)
    with pytest.raises(ValueError):
        reduced_pair_state(dicke(0.5, 0.5))


@settings(max_examples=25)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True), st.integers(2, 16))
def test_coherent_state_pair_is_coherent(theta, phi, two_j):
    pair = reduced_pair_state(coherent(two_j / 2, Direction(theta, phi)))
    v = spin_one_coherent_vector(theta, phi)
    assert np.abs(pair.matrix - np.outer(v, v.conj())).max() < 1e-12


@pytest.mark.parametrize("two_j", [2, 3, 4, 5, 6, 7, 8])
def test_oracle_equivalence(two_j):
    rng = np.random.default_rng(100 + two_j)
    for trial in range(50):
        rho = random_symmetric_density(two_j, rng, pure=trial % 2 == 0)
        ours = reduced_pair_state(SpinState(two_j / 2, rho))
        assert np.abs(ours.matrix - brute_force_pair_oracle(rho).matrix).max() < 1e-12


def test_oracle_dicke_pair_probabilities():
    for m in range(-4, 5):
        amps = np.zeros(9)
        amps[m + 4] = 1
        assert brute_force_pair_oracle(amps).matrix[0, 0].real == pytest.approx(q_dicke(4, m), abs=1e-13)
    with pytest.raises(ValueError):
        brute_force_pair_oracle(np.ones(10))


@pytest.mark.parametrize("two_j", [2, 3, 4, 6, 8])
def test_remove_pair_matches_qubit_partial_trace(two_j):
    rng = np.random.default_rng(two_j)
    rho = random_symmetric_density(two_j, rng)
    out = remove_pair(SpinState(two_j / 2, rho))
    assert np.abs(out.matrix - trace_out_first_pair(rho)).max() < 1e-12


@settings(max_examples=100)
@given(seeds, pair_two_js)
def test_husimi_two_paths_agree(seed, two_j):
    rng = np.random.default_rng(seed)
    s = random_spin_state(two_j / 2, rng)
    n = random_direction(rng)
    assert abs(pair_husimi(s, n) - pair_husimi_weighted(s, n)) < 1e-12


@settings(max_examples=50)
@given(seeds, pair_two_js)
def test_rotation_covariance(seed, two_j):
    rng = np.random.default_rng(seed)
    s = random_spin_state(two_j / 2, rng)
    n = random_direction(rng)
    lhs = reduced_pair_state(rotate(s, n))
    r = spin_one_rotation(n)
    rhs = r @ reduced_pair_state(s).matrix @ r.conj().T
    assert np.abs(lhs.matrix - rhs).max() < 1e-12


def test_projection_probabilities_examples():
    p = projection_probabilities(dicke(8, -8), Direction.z())
    assert p[0] == pytest.approx(1)
    w = w_state(8)
    # with R = exp(-i phi Jz) exp(-i theta Jy) the interference zeros of
    # |m=-J+1> sit where the |m=-J> coherent peaks are: cos(theta) = -m/J
    for m in range(-7, 8):
        theta_m = math.acos(-m / 8)
        assert projection_probabilities(w, Direction(theta_m, 0.3))[m + 8] < 1e-12
    s = random_spin_state(8, 3)
    assert projection_probabilities(s, Direction(1.0, 2.0)).sum() == pytest.approx(1, abs=1e-12)


def test_cat_equatorial_parity_alternation():
    cat = cat_state(8)
    period = 2 * math.pi / 16
    a = projection_probabilities(cat, Direction.equatorial(0.0))
    b = projection_probabilities(cat, Direction.equatorial(period / 2))
    c = projection_probabilities(cat, Direction.equatorial(period))
    assert a[1::2].sum() == pytest.approx(0, abs=1e-12)  # odd m vanish
    assert b[0::2].sum() == pytest.approx(0, abs=1e-12)  # even m vanish
    assert np.allclose(a, c, atol=1e-12)


def test_pair_husimi_examples():
    for theta in np.linspace(0, math.pi, 9):
        q = pair_husimi(dicke(8, -8), Direction(theta, 0.0))
        assert q == pytest.approx(math.sin(theta / 2) ** 4, abs=1e-12)
    assert pair_husimi(w_state(8), Direction.z()) == pytest.approx(0, abs=1e-14)
    assert pair_husimi(SpinState.maximally_mixed(8), Direction(0.7, 1.9)) == pytest.approx(1 / 3, abs=1e-12)


def test_projected_excited_state_examples():
    mat, ratio = projected_excited_state(dicke(8, -8), "sigma-")
    assert ratio == 0 and not mat.any()
    assert projected_excited_state(dicke(8, 8), "sigma-")[1] == pytest.approx(1)
    assert projected_excited_state(w_state(8), "sigma-")[1] == pytest.approx(0, abs=1e-15)
    assert projected_excited_state(w_state(8), "sigma+")[1] == pytest.approx(7 / 8)
    with pytest.raises(ValueError):
        projected_excited_state(w_state(8), "circular")


@settings(max_examples=30)
@given(seeds, pair_two_js)
def test_light_shift_ratio_is_pole_husimi(seed, two_j):
    s = random_spin_state(two_j / 2, seed)
    pair = reduced_pair_state(s).matrix
    for pol, k in (("sigma-", 0), ("pi", 1), ("sigma+", 2)):
        assert projected_excited_state(s, pol)[1] == pytest.approx(pair[k, k].real, abs=1e-12)
    assert projected_excited_state(s, "sigma-")[1] == pytest.approx(pair_husimi(s, Direction.z()), abs=1e-12)
    assert projected_excited_state(s, "sigma+")[1] == pytest.approx(pair_husimi(s, Direction(math.pi, 0)), abs=1e-12)


def test_sampling():
    counts = sample_projections(dicke(8, -8), Direction.z(), 100, seed=1)
    assert counts[0] == 100 and counts.sum() == 100
    a = sample_projections(w_state(8), Direction(1.0, 0.0), 500, seed=7)
    b = sample_projections(w_state(8), Direction(1.0, 0.0), 500, seed=7)
    assert np.array_equal(a, b)
    shots = 100_000
    c = sample_projections(cat_state(8), Direction.z(), shots, seed=3)
    sigma = math.sqrt(shots * 0.25)
    assert abs(c[0] - shots / 2) < 5 * sigma and abs(c[-1] - shots / 2) < 5 * sigma
    with pytest.raises(ValueError):
        sample_projections(dicke(8, 0), Direction.z(), 0, seed=1)


def test_pair_state_validation():
    with pytest.raises(ValueError):
        PairState(np.eye(2) / 2)
    with pytest.raises(ValueError):
        PairState(np.eye(3))
    assert PairState.maximally_mixed().is_physical()
    assert not PairState(np.diag([1.2, -0.1, -0.1])).is_physical()
