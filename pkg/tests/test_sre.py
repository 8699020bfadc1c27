import math

import numpy as np
import pytest

from dismagick.errors import NotNormalized, TooManyQubits
from dismagick.mps import MPS, from_statevector, random_mps, to_statevector
from dismagick.pauli_clifford import random_clifford
from dismagick.sre import (exact_m2, sampled_m2, stab_fidelity_lower_bound, stabilizer_fidelity,
                           stabilizer_states)
from dismagick.statevector import (Statevector, apply_two_qubit_gate_inplace, ghz, t_product,
                                   zero_state)
from oracles import m2_bruteforce, random_state

LOG43 = math.log2(4 / 3)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_t_product_oracle(k):
    # oracle: brute-force enumeration of all 4^k Pauli strings
    expected = m2_bruteforce(t_product(k).amplitudes)
    assert expected == pytest.approx(k * LOG43, abs=1e-12)
    assert exact_m2(t_product(k)) == pytest.approx(expected, abs=1e-12)


def test_stabilizer_fixtures_have_zero_magic():
    assert exact_m2(zero_state(5)) == pytest.approx(0.0, abs=1e-12)
    assert exact_m2(ghz(6)) == pytest.approx(0.0, abs=1e-12)


def test_random_state_matches_bruteforce():
    psi = random_state(4, np.random.default_rng(8))
    assert exact_m2(Statevector(psi)) == pytest.approx(m2_bruteforce(psi), abs=1e-10)


def test_clifford_invariance():
    rng = np.random.default_rng(0)
    psi = Statevector(random_state(5, rng))
    before = exact_m2(psi)
    for _ in range(20):
        b = int(rng.integers(4))
        apply_two_qubit_gate_inplace(psi, random_clifford(rng), (b, b + 1))
    assert exact_m2(psi) == pytest.approx(before, abs=1e-10)


def test_too_many_qubits():
    with pytest.raises(TooManyQubits):
        exact_m2(Statevector(np.ones(2 ** 13, dtype=complex) / 2 ** 6.5))


def test_sampled_matches_exact_within_error():
    mps = random_mps(8, 8, 3)
    exact = exact_m2(to_statevector(mps))
    est = sampled_m2(mps, 10_000, 5)
    assert abs(est.value - exact) < 4 * est.std_error
    assert est.shots == 10_000


def test_sampled_is_seeded_and_exact_for_stabilizers():
    mps = from_statevector(ghz(6))
    a, b = sampled_m2(mps, 500, 1), sampled_m2(mps, 500, 1)
    assert a.value == b.value
    assert a.value == pytest.approx(0.0, abs=1e-10)
    assert sampled_m2(from_statevector(t_product(3)), 20_000, 2).value == pytest.approx(
        3 * LOG43, abs=0.05)


def test_unnormalized_rejected():
    mps = random_mps(4, 2, 0)
    bad = MPS([t * 2 for t in mps.tensors], 0)
    with pytest.raises(NotNormalized):
        sampled_m2(bad, 10, 0)


@pytest.mark.parametrize("n,count", [(1, 6), (2, 60), (3, 1080)])
def test_stabilizer_state_counts(n, count):
    # oracle: 2^n prod_{k=1..n} (2^k + 1)
    assert count == 2 ** n * math.prod(2 ** k + 1 for k in range(1, n + 1))
    assert len(stabilizer_states(n)) == count


def test_fidelity_bound_conventions():
    assert stab_fidelity_lower_bound(0.0) == 1.0
    assert stab_fidelity_lower_bound(1.0) == pytest.approx(0.0)
    assert stab_fidelity_lower_bound(math.log(2), unit="nats") == pytest.approx(0.0)
    with pytest.raises(ValueError):
        stab_fidelity_lower_bound(1.0, unit="dits")


def test_fidelity_bound_on_t_state():
    psi = t_product(1)
    assert stabilizer_fidelity(psi) >= stab_fidelity_lower_bound(exact_m2(psi)) - 1e-12


def _letter_label(row):
    return "".join("IXYZ"[k] for k in row)


def test_bell_site_zero_marginals():
    from dismagick.sre import sample_pauli_strings
    from dismagick.sre import _right_canonical_tensors

    letters, values = sample_pauli_strings(_right_canonical_tensors(from_statevector(ghz(2))),
                                           100_000, 3)
    freq = np.bincount(letters[:, 0], minlength=4) / letters.shape[0]
    sigma = math.sqrt(0.25 * 0.75 / letters.shape[0])
    assert np.all(np.abs(freq - 0.25) < 5 * sigma)
    assert {_letter_label(r) for r in letters[:1000]} <= {"II", "XX", "YY", "ZZ"}
    np.testing.assert_allclose(values, 1.0, atol=1e-10)


def test_joint_letter_distribution_matches_bruteforce():
    from oracles import all_labels, pauli_matrix
    from dismagick.sre import _right_canonical_tensors, sample_pauli_strings

    psi = random_state(3, np.random.default_rng(12))
    # oracle: Pi(P) = <P>^2 / 2^n over all 64 strings
    exp = {lab: abs(np.vdot(psi, pauli_matrix(lab) @ psi)) ** 2 for lab in all_labels(3)}
    probs = {lab: v / 8 for lab, v in exp.items()}
    shots = 60_000
    letters, values = sample_pauli_strings(
        _right_canonical_tensors(from_statevector(Statevector(psi))), shots, 4)
    labels = [_letter_label(r) for r in letters]
    counts = {lab: 0 for lab in probs}
    for lab in labels:
        counts[lab] += 1
    for lab, p in probs.items():
        sigma = math.sqrt(max(p * (1 - p), 1e-12) / shots)
        assert abs(counts[lab] / shots - p) < 5 * sigma + 1e-9
    for lab, v in zip(labels[:200], values[:200]):
        assert v == pytest.approx(exp[lab], abs=1e-10)
