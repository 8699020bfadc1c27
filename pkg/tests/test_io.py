import numpy as np
import pytest

from dismagick.dmrg import heisenberg_mpo, load_mpo, save_mpo
from dismagick.io import load_state, read_arrays, save_state, write_arrays
from dismagick.mps import random_mps
from dismagick.statevector import ghz


def test_mps_round_trip(tmp_path):
    mps = random_mps(5, 3, 2)
    save_state(tmp_path / "a.mps", mps)
    back = load_state(tmp_path / "a.mps")
    assert back.center == mps.center
    for a, b in zip(mps.tensors, back.tensors):
        np.testing.assert_array_equal(a, b)


def test_statevector_round_trip(tmp_path):
    save_state(tmp_path / "g.sv", ghz(4))
    np.testing.assert_array_equal(load_state(tmp_path / "g.sv").amplitudes, ghz(4).amplitudes)


def test_mpo_round_trip(tmp_path):
    h = heisenberg_mpo(5)
    save_mpo(tmp_path / "h.mpo", h)
    back = load_mpo(tmp_path / "h.mpo")
    np.testing.assert_array_equal(back.to_dense(), h.to_dense())


def test_header_is_json_line(tmp_path):
    write_arrays(tmp_path / "x", "mps", [np.ones((1, 2, 1))], {"center": 0})
    first = (tmp_path / "x").read_bytes().split(b"\n", 1)[0]
    assert b'"format": "dismagick-tensors"' in first
    kind, arrays, meta = read_arrays(tmp_path / "x")
    assert kind == "mps" and meta == {"center": 0} and arrays[0].shape == (1, 2, 1)


def test_rejects_foreign_and_truncated_files(tmp_path):
    (tmp_path / "bad").write_bytes(b'{"format": "other"}\n')
    with pytest.raises(ValueError):
        read_arrays(tmp_path / "bad")
    write_arrays(tmp_path / "t", "mps", [np.ones((1, 2, 1))])
    (tmp_path / "t").write_bytes((tmp_path / "t").read_bytes()[:-3])
    with pytest.raises(ValueError):
        read_arrays(tmp_path / "t")
