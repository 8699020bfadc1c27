import numpy as np
import pytest
from hypothesis import given, strategies as st

from dismagick.errors import NonCliffordGate
from dismagick.pauli_clifford import (CNOT, H, I2, S, SWAP, GateKind, PauliString, TwoQubitGate,
                                      canonical_key, clifford_index, clifford_matrices,
                                      clifford_rz_gate, conjugate_pauli,
                                      enumerate_two_qubit_cliffords, local_coset_representatives,
                                      random_clifford, random_clifford_rz_candidate, rz)
from oracles import pauli_matrix

labels = st.text(alphabet="IXYZ", min_size=1, max_size=6)


@given(labels)
def test_label_round_trip(label):
    p = PauliString.from_label(label)
    assert p.label == label
    assert p.weight == sum(c != "I" for c in label)


@given(labels)
def test_matrix_matches_kron(label):
    np.testing.assert_allclose(PauliString.from_label(label).to_matrix(), pauli_matrix(label))


def test_signed_labels():
    np.testing.assert_allclose(PauliString.from_label("-XZ").to_matrix(), -pauli_matrix("XZ"))
    np.testing.assert_allclose(PauliString.from_label("iY").to_matrix(), 1j * pauli_matrix("Y"))


def test_qubit_zero_is_most_significant():
    p = PauliString.from_label("XI")
    assert p.x_mask == 0b10 and p.z_mask == 0


@pytest.mark.parametrize("gate,before,after", [
    (CNOT, "XI", "XX"), (CNOT, "IZ", "ZZ"), (CNOT, "ZI", "ZI"), (CNOT, "IX", "IX"),
    (np.kron(H, I2), "ZI", "XI"), (np.kron(H, I2), "XI", "ZI"),
    (np.kron(S, I2), "XI", "YI"), (SWAP, "XZ", "ZX"),
])
def test_conjugation_table(gate, before, after):
    out = conjugate_pauli(TwoQubitGate(gate), PauliString.from_label(before))
    np.testing.assert_allclose(out.to_matrix(), gate @ pauli_matrix(before) @ gate.conj().T,
                               atol=1e-12)
    assert out.letters == after


def test_non_clifford_rejected():
    t = np.kron(np.diag([1, np.exp(0.25j * np.pi)]), I2)
    with pytest.raises(NonCliffordGate):
        conjugate_pauli(TwoQubitGate(t), PauliString.from_label("XI"))


def test_group_size_identity_first_and_unitary():
    mats = clifford_matrices()
    assert mats.shape == (11520, 4, 4)
    np.testing.assert_allclose(mats[0], np.eye(4))
    eye = np.eye(4)
    assert np.max(np.abs(mats @ mats.conj().transpose(0, 2, 1) - eye)) < 1e-12
    assert len(clifford_index()) == 11520


def test_composition_closure_sample():
    idx = clifford_index()
    rng = np.random.default_rng(0)
    mats = clifford_matrices()
    for _ in range(200):
        i, j = rng.integers(11520, size=2)
        assert canonical_key(mats[i] @ mats[j]) in idx


def test_every_element_maps_paulis_to_paulis():
    gates = enumerate_two_qubit_cliffords()
    rng = np.random.default_rng(2)
    for k in rng.integers(11520, size=50):
        assert gates[k].is_clifford()


def test_canonical_key_ignores_global_phase():
    g = random_clifford(3).matrix
    assert canonical_key(g) == canonical_key(np.exp(0.7j) * g)


def test_local_cosets_partition_group():
    reps = local_coset_representatives()
    uniq, counts = np.unique(reps, return_counts=True)
    assert len(uniq) == 20 and set(counts) == {576}
    assert reps[0] == 0
    assert np.all(reps <= np.arange(11520))


def test_random_clifford_is_seeded():
    assert random_clifford(5).canonical_key == random_clifford(5).canonical_key


def test_rz_convention():
    np.testing.assert_allclose(rz(np.pi / 2), np.diag([np.exp(-0.25j * np.pi),
                                                       np.exp(0.25j * np.pi)]))


def test_clifford_rz_candidate():
    g = random_clifford_rz_candidate(11)
    assert g.kind is GateKind.CLIFFORD_RZ
    assert g.unitarity_error() < 1e-12
    # theta = 0 collapses to a Clifford
    c = clifford_rz_gate(random_clifford(1), 0.0, 1, random_clifford(2))
    assert c.is_clifford()
    assert not clifford_rz_gate(np.eye(4), np.pi / 4, 0, np.eye(4)).is_clifford()
    with pytest.raises(ValueError):
        clifford_rz_gate(np.eye(4), 0.1, 2, np.eye(4))
