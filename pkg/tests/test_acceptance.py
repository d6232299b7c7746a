"""Acceptance criteria, one or more checks per criterion at the stated tolerance.

Every check prints ``CRITERION n [part]: PASS|FAIL ...`` as it runs, and the
pytest terminal summary (see conftest.py) prints one aggregated line per
criterion. Run ``python3 tests/test_acceptance.py`` for the same report
without pytest.
"""

import math
import time
from fractions import Fraction

import numpy as np

from oracles import two_qubit_marginal_4x4
from spinpart.angular import Direction
from spinpart.dynamics import (
    JointState,
    calibrated_rabi,
    coupling_ratio,
    lindblad_evolve,
    rabi_pulse_ideal,
    spontaneous_emission_map,
    transition_system,
)
from spinpart.nonclassical import (
    concurrence_from_squeezing,
    concurrence_lower_bound,
    conditional_min_entropy,
    conditional_min_entropy_14_2,
    echo_populations,
    extremal_coherence,
    fibonacci_sphere,
    fourier_components,
    max_c_distribution,
    oat_squeezing_optimum,
    parity_expectation,
    parity_weights,
    sign_expectation,
    sign_weights,
    spin_uncertainty,
    wootters_concurrence,
)
from spinpart.partition import (
    brute_force_pair_oracle,
    pair_husimi_grid,
    projection_probabilities,
    q_dicke,
    reduced_pair_state,
    sample_projections,
)
from spinpart.random import random_coherent_mixture, random_pair_state, random_spin_state
from spinpart.scenarios import two_pi_retention
from spinpart.states import OatParams, basis_vector, cat_state, coherent, dicke, one_axis_twisting, superposition, w_state
from spinpart.tomography import fit_husimi, reconstruct_pair_state

RESULTS = []

SQUEEZE_CHI = 2 * math.pi * 32.1e3
CAT_CHI = 2 * math.pi * 1.25e6
T_PULSE = 62e-9
TAU_EXCITED = 1.2e-6

# pair basis (+1, 0, -1) inside two qubits ordered |dd>, |du>, |ud>, |uu>
_TRIPLET_ROWS = np.array([[0, 0, 0, 1], [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0], [1, 0, 0, 0]])


def record(criterion, part, passed, detail):
    passed = bool(passed)
    RESULTS.append((criterion, part, passed, detail))
    print(f"CRITERION {criterion} [{part}]: {'PASS' if passed else 'FAIL'} {detail}")
    return passed


def summary_lines():
    lines = []
    for criterion in sorted({r[0] for r in RESULTS}):
        parts = [r for r in RESULTS if r[0] == criterion]
        ok = all(r[2] for r in parts)
        failed = [r[1] for r in parts if not r[2]]
        detail = "all parts within tolerance" if ok else "failing: " + ", ".join(failed)
        lines.append(f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'} ({len(parts)} checks; {detail})")
    return lines


def fourier_amplitude(fn, order, nodes=64):
    phis = 2 * math.pi * np.arange(nodes) / nodes
    return fourier_components([(p, fn(p)) for p in phis]).amplitude(order)


def test_criterion_01_pair_up_table():
    start = time.perf_counter()
    exact = {m: q_dicke(8, m, exact=True) for m in range(-8, 9)}
    total = sum(q_dicke(8, m) for m in range(-8, 9))
    elapsed = time.perf_counter() - start
    ok = (
        exact[-8] == 0
        and exact[-7] == 0
        and exact[8] == 1
        and exact[0] == Fraction(7, 30)
        and sum(exact.values()) == Fraction(17, 3)
        and abs(total - 17 / 3) < 1e-12
        and elapsed < 1.0
    )
    assert record(1, "Q_m table", ok, f"Q_0={exact[0]} sum={sum(exact.values())} float sum err={abs(total - 17 / 3):.1e} t={elapsed:.3f}s")


def test_criterion_02_pair_extraction_oracle():
    start = time.perf_counter()
    worst = 0.0
    for two_j in (2, 3, 4, 6, 8):
        rng = np.random.default_rng(1000 + two_j)
        for _ in range(50):
            s = random_spin_state(two_j / 2, rng)
            ours = reduced_pair_state(s).matrix
            brute = brute_force_pair_oracle(s.matrix).matrix
            independent = _TRIPLET_ROWS @ two_qubit_marginal_4x4(s.matrix) @ _TRIPLET_ROWS.T
            worst = max(worst, np.abs(ours - brute).max(), np.abs(ours - independent).max())
    elapsed = time.perf_counter() - start
    assert record(2, "2^N partial trace", worst < 1e-12 and elapsed < 30, f"max error {worst:.1e} over 250 states, t={elapsed:.1f}s")


def test_criterion_03_w_state():
    w = w_state(8)
    pair_err = np.abs(reduced_pair_state(w).matrix - np.diag([0, 1 / 8, 7 / 8])).max()
    bound, n = concurrence_lower_bound(w)
    wootters = wootters_concurrence(reduced_pair_state(w))
    checks = [
        record(3, "pair state", pair_err < 1e-12, f"max error {pair_err:.1e}"),
        record(3, "C lower bound", abs(bound - 0.125) < 1e-6 and n.theta < 1e-3, f"max C_n={bound:.10f} at theta={n.theta:.2e}"),
        record(3, "Wootters agrees", abs(wootters - bound) < 1e-6, f"wootters={wootters:.10f}"),
    ]
    assert all(checks)


def test_criterion_04_cat_state():
    cat = cat_state(8)
    pair_err = np.abs(reduced_pair_state(cat).matrix - np.diag([0.5, 0, 0.5])).max()
    max_c = max_c_distribution(cat)[0]
    s_cond = conditional_min_entropy_14_2(cat)
    w_bound = conditional_min_entropy(0.91, 0.882)
    cat_bound = conditional_min_entropy(0.66, 0.53)
    checks = [
        record(4, "pair state", pair_err < 1e-12, f"max error {pair_err:.1e}"),
        record(4, "C_n <= 0", max_c <= 1e-9, f"max C_n={max_c:.2e}"),
        record(4, "S(14|2)=-ln2", abs(s_cond + math.log(2)) < 1e-9, f"S={s_cond:.12f}"),
        record(
            4,
            "quoted bounds",
            abs(w_bound + 0.031) < 5e-4 and abs(cat_bound + 0.219) < 5e-4 and abs(w_bound + 0.03) <= 0.01 and abs(cat_bound + 0.23) <= 0.03,
            f"W {w_bound:.4f} vs -0.03(1), cat {cat_bound:.4f} vs -0.23(3)",
        ),
    ]
    assert all(checks)


def test_criterion_05_squeezing():
    # the twisting generator is chi Jx^2, so the state on the equator of the x axis
    # that squeezes in the xy plane is |m=-J>; a y-polarized start is checked below
    opt = oat_squeezing_optimum(dicke(8, -8), SQUEEZE_CHI, 1.4e-6)
    pair = reduced_pair_state(opt.state)
    wootters = wootters_concurrence(pair)
    from_dj = concurrence_from_squeezing(opt.delta_j_min, 8)
    rotated = one_axis_twisting(coherent(8, Direction(math.pi / 2, math.pi / 2)), OatParams(SQUEEZE_CHI, 0.0, opt.time))
    thetas = np.linspace(0, math.pi, 2001)
    rotated_dj = min(spin_uncertainty(rotated, Direction(t, 0.0)) for t in thetas)
    checks = [
        record(5, "Delta J_min", abs(opt.delta_j_min - 0.85) <= 0.01, f"Delta J_min={opt.delta_j_min:.5f} at t={opt.time * 1e9:.1f} ns (target 0.85 +/- 0.01)"),
        record(5, "concurrence", abs(wootters - 0.055) <= 0.001, f"wootters={wootters:.5f} (target 0.055 +/- 0.001)"),
        record(5, "squeezing relation", abs(from_dj - wootters) < 1e-3, f"from Delta J {from_dj:.7f} vs wootters {wootters:.7f}"),
        record(5, "rotated start agrees", abs(rotated_dj - opt.delta_j_min) < 1e-5, f"y-polarized start gives {rotated_dj:.6f}"),
    ]
    assert all(checks)


def test_criterion_06_cat_revival():
    echo = OatParams.cat_revival(CAT_CHI)
    cat = one_axis_twisting(dicke(8, -8), echo)
    pops = cat.populations
    coherence = extremal_coherence(cat)
    sigma = fourier_amplitude(lambda p: sign_expectation(cat, p, echo), 16)
    parity = fourier_amplitude(lambda p: parity_expectation(cat, p), 16)
    checks = [
        record(6, "t_cat", abs(echo.duration - 200e-9) < 1e-15, f"t_cat={echo.duration * 1e9:.3f} ns"),
        record(6, "populations", abs(pops[0] - 0.5) < 1e-9 and abs(pops[-1] - 0.5) < 1e-9, f"Pi_-8={pops[0]:.12f} Pi_8={pops[-1]:.12f}"),
        record(6, "coherence", abs(coherence - 0.5) < 1e-9, f"|rho_-8,8|={coherence:.12f}"),
        record(6, "echo |c_16|", abs(sigma - 0.5) < 1e-8, f"{sigma:.12f}"),
        record(6, "parity |c_16|", abs(parity - 0.5) < 1e-8, f"{parity:.12f}"),
    ]
    assert all(checks)


def test_criterion_07_tomography():
    theta, phi = fibonacci_sphere(50)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        pair = random_pair_state(rng, rank=int(rng.integers(1, 4)))
        rec = reconstruct_pair_state(fit_husimi(theta=theta, phi=phi, values=pair_husimi_grid(pair, theta, phi)))
        worst = max(worst, np.abs(rec.pair.matrix - pair.matrix).max())
    w = w_state(8)
    q_m = np.array([q_dicke(8, m) for m in range(-8, 9)])
    shots = 10_000
    values = [q_m @ sample_projections(w, Direction(t, p), shots, seed=70 + i) / shots for i, (t, p) in enumerate(zip(theta, phi))]
    noisy = reconstruct_pair_state(fit_husimi(theta=theta, phi=phi, values=values))
    noisy_err = np.abs(noisy.pair.matrix - reduced_pair_state(w).matrix).max()
    checks = [
        record(7, "noise-free round trip", worst < 1e-10, f"max error {worst:.1e} over 100 states"),
        record(7, "10^4 shots per node", noisy_err < 0.02, f"W pair max error {noisy_err:.4f}"),
    ]
    assert all(checks)


def test_criterion_08_concurrence_conjecture():
    rng = np.random.default_rng(8)
    gap = 0.0
    for _ in range(200):
        pair = random_pair_state(rng, rank=int(rng.integers(1, 4)))
        gap = max(gap, abs(max(0.0, max_c_distribution(pair)[0]) - wootters_concurrence(pair)))
    worst_mix = 0.0
    for _ in range(100):
        mix = random_coherent_mixture(rng, terms=int(rng.integers(1, 6)))
        worst_mix = max(worst_mix, max(0.0, max_c_distribution(mix)[0]), wootters_concurrence(mix))
    checks = [
        record(8, "max C_n = Wootters", gap < 1e-4, f"largest gap {gap:.1e} over 200 states"),
        record(8, "coherent mixtures", worst_mix < 1e-8, f"largest value {worst_mix:.1e} over 100 mixtures"),
    ]
    assert all(checks)


def test_criterion_09_w_decay():
    sys = transition_system(8, 9, 1 / TAU_EXCITED)
    ground = spontaneous_emission_map(sys, dicke(9, -8))
    pops = ground.populations
    c = wootters_concurrence(reduced_pair_state(ground))
    checks = [
        record(9, "populations", abs(pops[0] - 1 / 9) < 1e-12 and abs(pops[1] - 8 / 9) < 1e-12 and pops[2:].sum() < 1e-12, f"Pi_-8={pops[0]:.12f} Pi_-7={pops[1]:.12f}"),
        record(9, "concurrence 1/9", abs(c - 1 / 9) < 1e-9, f"wootters={c:.12f}"),
    ]
    assert all(checks)


def test_criterion_10_which_path():
    sys = transition_system(8, 9, 1 / TAU_EXCITED)
    je = sys.j_excited
    psi1 = superposition(je, basis_vector(je, -9) + basis_vector(je, 9))
    psi2 = superposition(je, basis_vector(je, -8) + basis_vector(je, 8))
    c1 = extremal_coherence(spontaneous_emission_map(sys, psi1))
    # psi2 lives on m' = -8, 8 of J' = 9 and decays onto the extremal levels of J = 8
    c2 = extremal_coherence(spontaneous_emission_map(sys, psi2))
    ratio = c2 / abs(psi2.element(-8, 8))
    checks = [
        record(10, "psi1 washed out", c1 == 0.0, f"coherence {c1!r}"),
        record(10, "psi2 keeps 1/18", abs(c2 - 1 / 18) < 1e-12 and abs(ratio - 1 / 9) < 1e-12, f"coherence {c2:.12f}, retention {ratio:.12f}"),
    ]
    assert all(checks)


def test_criterion_11_pi_pulse_fidelity():
    sys = transition_system(8, 9, 1 / TAU_EXCITED)
    ground = dicke(8, -8)
    rabi = calibrated_rabi(sys, ground, "pi", T_PULSE)
    final = lindblad_evolve(sys, JointState.from_ground(sys, ground), rabi, 0.0, T_PULSE, "pi")
    fidelity = float(final.excited_block[1, 1].real)
    assert record(11, "pi-pulse fidelity", abs(fidelity - 0.98) <= 0.01, f"|9,-8> population {fidelity:.5f} (target 0.98 +/- 0.01)")


def test_criterion_11_two_pi_retention():
    rows = [two_pi_retention(8, pol, T_PULSE, TAU_EXCITED) for pol in ("x", "pi")]
    ok = all(0.75 <= r[4] <= 0.90 for r in rows)
    detail = ", ".join(f"{r[0]}: {r[4]:.4f}" for r in rows)
    assert record(11, "2 pi retention", ok, f"{detail} (target 0.75..0.90)")


def test_criterion_11_psi1_residual():
    sys = transition_system(8, 9)
    res = rabi_pulse_ideal(sys, cat_state(8), "x", math.pi)
    pops = res.excited.populations
    residual = pops[2] + pops[-3]
    assert record(11, "psi1 residual", abs(residual - 0.03) <= 0.005, f"|m'=+-7> population {residual:.5f} (target 0.030 +/- 0.005)")


def test_criterion_11_cg_ratio():
    ratio = coupling_ratio(transition_system(8, 9), "x", 8, 7, 9)
    assert record(11, "CG ratio", abs(ratio - 1 / math.sqrt(153)) < 1e-15, f"{ratio:.15f} vs 1/sqrt(153)={1 / math.sqrt(153):.15f}")


EXPERIMENTAL_ONLY = (
    "concurrences 0.089(5), 0.058(6); W fidelity 0.91(1); P_2J 0.26(1); "
    "Sigma_2J 0.247(5)/0.024(1)/0.202(2)/0.211(6); phi asymmetries"
)


def _shot_spread(probabilities, weights, shots=200, nodes=61, repeats=30):
    # a phase grid commensurate with the 2 pi / 16 fringe period puts every node on an
    # extremum (no shot noise) or a zero crossing (noise orthogonal to the fringe)
    phis = 2 * math.pi * np.arange(nodes) / nodes
    probs = [np.clip(probabilities(p), 0, None) for p in phis]
    amps = []
    for seed in range(repeats):
        rng = np.random.default_rng(1200 + seed)
        est = [weights @ rng.multinomial(shots, p / p.sum()) / shots for p in probs]
        amps.append(fourier_components(zip(phis, est)).amplitude(16))
    return float(np.mean(amps)), float(np.std(amps, ddof=1))


def test_criterion_12_experimental_numbers_and_shot_scale():
    echo = OatParams.cat_revival(CAT_CHI)
    cat = one_axis_twisting(dicke(8, -8), echo)
    record(12, "not reproduced", True, f"experimental-only values documented, not simulated: {EXPERIMENTAL_ONLY}")
    ideal = {
        "W concurrence": wootters_concurrence(reduced_pair_state(w_state(8))),
        "decayed W concurrence": wootters_concurrence(
            reduced_pair_state(spontaneous_emission_map(transition_system(8, 9, 1 / TAU_EXCITED), dicke(9, -8)))
        ),
        "cat |c_16|": fourier_amplitude(lambda p: sign_expectation(cat, p, echo), 16),
    }
    ideal_ok = (
        abs(ideal["W concurrence"] - 1 / 8) < 1e-12
        and abs(ideal["decayed W concurrence"] - 1 / 9) < 1e-12
        and abs(ideal["cat |c_16|"] - 0.5) < 1e-8
    )
    record(12, "ideal values", ideal_ok, ", ".join(f"{k}={v:.6f}" for k, v in ideal.items()))
    echo_mean, echo_std = _shot_spread(lambda p: echo_populations(cat, p, echo), sign_weights(8))
    par_mean, par_std = _shot_spread(lambda p: projection_probabilities(cat, Direction.equatorial(p)), parity_weights(8))
    checks = [
        record(12, "echo shot scale", abs(echo_mean - 0.5) < 0.01 and 0.001 <= echo_std <= 0.02, f"200 shots x 61 phases: |c_16|={echo_mean:.4f} +/- {echo_std:.4f}"),
        record(12, "parity shot scale", abs(par_mean - 0.5) < 0.01 and 0.001 <= par_std <= 0.02, f"200 shots x 61 phases: |c_16|={par_mean:.4f} +/- {par_std:.4f}"),
    ]
    assert all(checks)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failures += 1
    print()
    print("\n".join(summary_lines()))
    raise SystemExit(1 if failures else 0)
