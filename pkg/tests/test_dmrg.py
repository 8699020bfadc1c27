import math
import warnings

import numpy as np
import pytest

from dismagick.dmrg import (MPO, MPOBondCapWarning, compress_mpo, conjugate_dense, conjugate_mpo,
                            heisenberg_mpo, heisenberg_pipeline, lanczos_ground, mpo_expectation,
                            reference_energy, relative_error, two_site_dmrg)
from dismagick.errors import BondOutOfRange
from dismagick.pauli_clifford import SWAP, random_clifford, random_clifford_rz_candidate
from oracles import heisenberg_dense, heisenberg_ground_sz0


@pytest.mark.parametrize("L", [2, 3, 5, 6])
def test_mpo_matches_dense_sum(L):
    np.testing.assert_allclose(heisenberg_mpo(L).to_dense(), heisenberg_dense(L), atol=1e-14)


def test_two_site_spectrum():
    np.testing.assert_allclose(np.linalg.eigvalsh(heisenberg_mpo(2).to_dense()),
                               [-0.75, 0.25, 0.25, 0.25], atol=1e-14)


def test_four_site_ground_energy():
    e0 = np.linalg.eigvalsh(heisenberg_dense(4))[0]
    assert e0 == pytest.approx(-(3 + 2 * math.sqrt(3)) / 4, abs=1e-12)
    assert e0 == pytest.approx(-1.61603, abs=1e-5)


def test_hermiticity():
    assert heisenberg_mpo(7).hermiticity_error(seed=1) < 1e-10
    h = conjugate_mpo(heisenberg_mpo(6), random_clifford_rz_candidate(0), 2)
    assert h.hermiticity_error(seed=2) < 1e-10


def test_lanczos_on_dense_matrix():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((30, 30))
    a = a + a.T
    res = lanczos_ground(lambda v: a @ v, rng.standard_normal(30), max_iter=30, tol=1e-12)
    assert res.value == pytest.approx(np.linalg.eigvalsh(a)[0], abs=1e-9)


@pytest.mark.parametrize("L,D", [(2, 2), (4, 4), (8, 16)])
def test_dmrg_reaches_exact_energy(L, D):
    exact = np.linalg.eigvalsh(heisenberg_dense(L))[0]
    res = two_site_dmrg(heisenberg_mpo(L), D, 6, seed=0)
    assert res.energy == pytest.approx(exact, abs=1e-8)
    assert res.energy == pytest.approx(mpo_expectation(heisenberg_mpo(L), res.mps), abs=1e-9)
    assert res.mps.norm() == pytest.approx(1.0)


def test_dmrg_energy_non_increasing_and_bounded():
    h = heisenberg_mpo(12)
    res = two_site_dmrg(h, 4, 6, seed=1)
    e = np.array(res.energies)
    assert np.all(np.diff(e) <= 1e-9)
    assert res.mps.max_bond <= 4
    assert res.energy >= reference_energy(12) - 1e-9


def test_dmrg_validation():
    with pytest.raises(ValueError):
        two_site_dmrg(heisenberg_mpo(4), 0, 1)
    with pytest.raises(ValueError):
        two_site_dmrg(heisenberg_mpo(4), 2, 0)


def test_conjugation_identity_and_clifford():
    h = heisenberg_mpo(6)
    dense = h.to_dense()
    same = conjugate_mpo(h, np.eye(4), 3)
    assert np.max(np.abs(same.to_dense() - dense)) < 1e-10
    g = random_clifford(4)
    out = conjugate_mpo(h, g, 1).to_dense()
    np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(dense), atol=1e-9)
    np.testing.assert_allclose(out, conjugate_dense(dense, g, 1), atol=1e-12)


def test_swap_relabels_coupling_pattern():
    # swapping sites 2,3 of 0-1-2-3-4-5 gives edges 0-1, 1-3, 3-2, 2-4, 4-5
    out = conjugate_mpo(heisenberg_mpo(6), SWAP, 2).to_dense()
    expected = heisenberg_dense(6, [(0, 1), (1, 3), (2, 3), (2, 4), (4, 5)])
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_repeated_conjugation_spectrum():
    rng = np.random.default_rng(5)
    h = heisenberg_mpo(8)
    e0 = np.linalg.eigvalsh(h.to_dense())
    for _ in range(12):
        h = conjugate_mpo(h, random_clifford_rz_candidate(rng), int(rng.integers(7)))
    np.testing.assert_allclose(np.linalg.eigvalsh(h.to_dense()), e0, atol=1e-8)


def test_compression_cap_warns():
    rng = np.random.default_rng(1)
    h = heisenberg_mpo(8)
    for _ in range(10):
        h = conjugate_mpo(h, random_clifford_rz_candidate(rng), int(rng.integers(7)),
                          max_bond=10 ** 6)
    with pytest.warns(MPOBondCapWarning):
        capped = compress_mpo(h, max_bond=4)
    assert capped.max_bond <= 4


def test_conjugation_bond_check():
    with pytest.raises(BondOutOfRange):
        conjugate_mpo(heisenberg_mpo(4), np.eye(4), 3)


def test_relative_error():
    assert relative_error(-0.75, -0.75) == 0.0
    assert relative_error(-0.74, -0.75) == pytest.approx(0.0133333333333)
    with pytest.raises(ZeroDivisionError):
        relative_error(1.0, 0.0)


def test_reference_energy_dense_and_cached(tmp_path, monkeypatch):
    monkeypatch.setenv("DISMAGICK_DATA_DIR", str(tmp_path))
    assert reference_energy(4) == pytest.approx(-(3 + 2 * math.sqrt(3)) / 4, abs=1e-12)
    assert "L=4,D=512,seed=0,sweeps=20" in (tmp_path / "reference_energies.json").read_text()


@pytest.mark.slow
def test_long_chain_reference_matches_sparse_diagonalization():
    # oracle: Lanczos on the Sz = 0 sector of the full 2^20 space
    e_sparse = heisenberg_ground_sz0(20)
    e_ref = reference_energy(20)
    assert e_ref == pytest.approx(e_sparse, abs=1e-9)
    e4 = two_site_dmrg(heisenberg_mpo(20), 4, 10, seed=0).energy
    e8 = two_site_dmrg(heisenberg_mpo(20), 8, 10, seed=0).energy
    assert e4 >= e_ref - 1e-9 and e8 >= e_ref - 1e-9
    assert e8 <= e4 + 1e-9
    assert 1e-4 <= relative_error(e4, e_ref) <= 1e-2


def test_pipeline_small_chain():
    res = heisenberg_pipeline(6, 2, 2, candidates=4, shots=300, seed=2)
    assert [r.sweep for r in res.records] == [0, 1, 2]
    assert res.coherence is not None and res.coherence.passed
    assert res.records[-1].gates == len(res.circuit) == 2 * 5 * 2
    for r in res.records:
        assert r.energy >= res.reference - 1e-9
