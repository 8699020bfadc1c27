import numpy as np
import pytest

from dismagick.mps import TruncationConfig, from_statevector
from dismagick.dismagicker import NelderMeadConfig
from dismagick.sre import exact_m2
from dismagick.statevector import apply_two_qubit_gate_inplace, prepare_benchmark_state
from dismagick.sweep import (CliffordOnly, Joint, Sequential, SweepConfig, run_sweeps,
                             strategies_for)

FAST = SweepConfig(nelder_mead=NelderMeadConfig(max_iters=200, restart_count=0))


def test_strategy_schedules():
    assert [Sequential(2, 1).actions(s) for s in (1, 2, 3)] == [(True, False)] * 2 + [(False, True)]
    assert [Joint(1, 1).actions(s) for s in (1, 2)] == [(True, True), (False, True)]
    assert CliffordOnly(3).actions(1) == (False, True)
    assert [s.total for s in strategies_for(6, 4)] == [10, 10, 10]
    with pytest.raises(ValueError):
        strategies_for(-1, 2)


def test_clifford_only_keeps_m2_and_lowers_every_cut():
    psi = prepare_benchmark_state(6, seed=2)
    res = run_sweeps(psi, CliffordOnly(3), seed=0)
    m2 = [r.m2 for r in res.records]
    assert max(m2) - min(m2) < 1e-10
    profiles = np.array([r.ee_profile for r in res.records])
    assert np.all(np.diff(profiles, axis=0) <= 1e-10)


def test_input_untouched_and_circuit_replays():
    psi = prepare_benchmark_state(5, seed=3)
    before = psi.amplitudes.copy()
    res = run_sweeps(psi, Joint(1, 1), FAST, seed=1)
    np.testing.assert_array_equal(psi.amplitudes, before)
    replay = psi.copy()
    for step in res.circuit:
        apply_two_qubit_gate_inplace(replay, step.gate, step.sites)
    assert abs(np.vdot(replay.amplitudes, res.state.amplitudes)) == pytest.approx(1.0, abs=1e-10)
    assert res.records[-1].m2 == pytest.approx(exact_m2(res.state))
    assert [r.sweep for r in res.records] == [0, 1, 2]
    assert len(res.circuit) == 4 * 2 + 4


def test_seeded_reproducibility():
    psi = prepare_benchmark_state(5, seed=4)
    a = run_sweeps(psi, Sequential(1, 1), FAST, seed=7)
    b = run_sweeps(psi, Sequential(1, 1), FAST, seed=7)
    assert [r.m2 for r in a.records] == [r.m2 for r in b.records]


def test_dismagicking_lowers_m2():
    psi = prepare_benchmark_state(5, seed=6)
    res = run_sweeps(psi, Sequential(2, 0), FAST, seed=0)
    assert res.records[-1].m2 < res.records[0].m2


def test_per_bond_records_and_return_sweep():
    psi = prepare_benchmark_state(4, seed=1)
    cfg = SweepConfig(per_bond_records=True, return_sweep=True)
    res = run_sweeps(psi, CliffordOnly(1), cfg, seed=0)
    # bonds 0,1,2 then 1,0 on the way back, plus baseline and end-of-sweep records
    assert [r.bond for r in res.records] == [None, 0, 1, 2, 1, 0, None]


def test_mps_path():
    mps = from_statevector(prepare_benchmark_state(6, seed=3))
    cfg = SweepConfig(trunc=TruncationConfig(max_bond=4), candidates=4, shots=300)
    res = run_sweeps(mps, Joint(1, 0), cfg, seed=0)
    assert res.state.max_bond <= 4
    assert len(res.circuit) == 10
    assert res.records[-1].discarded_weight >= 0.0


def test_rejects_unknown_state():
    with pytest.raises(TypeError):
        run_sweeps(np.zeros(4), CliffordOnly(1))
