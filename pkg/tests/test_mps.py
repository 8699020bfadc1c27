import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dismagick.errors import BondOutOfRange, TooLarge
from dismagick.mps import (TruncationConfig, apply_two_site_gate, bond_entropy, from_statevector,
                           ghz_mps, mps_fidelity, random_mps, to_statevector, zero_mps)
from dismagick.statevector import Statevector
from oracles import embed, entropy_bits, random_state


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2 ** 31))
def test_statevector_round_trip(n, seed):
    psi = random_state(n, np.random.default_rng(seed))
    mps = from_statevector(Statevector(psi))
    np.testing.assert_allclose(to_statevector(mps).amplitudes, psi, atol=1e-10)


def test_canonical_form_is_isometric():
    mps = random_mps(8, 6, 1)
    for c in (0, 3, 7):
        mps.canonicalize(c)
        assert mps.isometry_error() < 1e-12
        assert mps.norm() == pytest.approx(1.0)


def test_gate_matches_dense_and_entropy():
    rng = np.random.default_rng(3)
    psi = random_state(6, rng)
    gate = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    mps, disc = apply_two_site_gate(from_statevector(Statevector(psi)), gate, 2)
    expected = embed(gate, (2, 3), 6) @ psi
    assert disc == pytest.approx(0.0, abs=1e-14)
    assert abs(np.vdot(expected, to_statevector(mps).amplitudes)) == pytest.approx(1.0, abs=1e-10)
    for cut in range(1, 6):
        assert bond_entropy(mps, cut - 1) == pytest.approx(entropy_bits(expected, cut), abs=1e-9)


def test_truncation_reports_discarded_weight():
    psi = random_state(6, np.random.default_rng(4))
    mps = from_statevector(Statevector(psi))
    out, disc = apply_two_site_gate(mps, np.eye(4), 2, TruncationConfig(max_bond=2))
    s = np.linalg.svd(psi.reshape(8, 8), compute_uv=False)
    assert disc == pytest.approx(np.sum(s[2:] ** 2), rel=1e-8)
    assert out.bond_dims[3] == 2
    assert out.norm() == pytest.approx(1.0)


def test_fixtures_and_fidelity():
    assert bond_entropy(ghz_mps(5), 2) == pytest.approx(1.0)
    assert mps_fidelity(zero_mps(4), zero_mps(4)) == pytest.approx(1.0)


def test_errors():
    with pytest.raises(BondOutOfRange):
        apply_two_site_gate(zero_mps(3), np.eye(4), 2)
    with pytest.raises(TooLarge):
        to_statevector(zero_mps(15))
