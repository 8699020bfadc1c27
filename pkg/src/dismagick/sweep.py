"""Bond-by-bond sweeps interleaving dismagicker and Clifford disentangler gates.

A sweep visits bonds ``0 .. n-2`` left to right.  Depending on the strategy
and phase, each bond gets a dismagicker ``U_M``, a Clifford disentangler
``U_C``, or ``U_M`` followed by ``U_C``:

=============  ====================  ==================
strategy       phase 1               phase 2
=============  ====================  ==================
CliffordOnly   U_C                   --
Sequential     U_M                   U_C
Joint          U_M then U_C          U_C
=============  ====================  ==================

On a :class:`~dismagick.statevector.Statevector` the dismagicker is the
continuous Nelder-Mead gate scored by exact M2; on an
:class:`~dismagick.mps.MPS` it is the discrete Clifford+Rz search scored by
sampled M2, and every bond update ends with a truncated SVD.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .dismagicker import (NelderMeadConfig, optimize_dismagicker_continuous,
                          optimize_dismagicker_discrete)
from .disentangler import best_clifford_disentangler, two_site_from_statevector
from .mps import MPS, NO_TRUNCATION, TruncationConfig, apply_gate_to_theta, entropy_profile
from .pauli_clifford import TwoQubitGate, uniform_theta
from .sre import exact_m2, sampled_m2
from .statevector import Statevector, apply_two_qubit_gate_inplace, entanglement_profile


@dataclass(frozen=True)
class CliffordOnly:
    sweeps: int
    name = "clifford_only"

    @property
    def total(self) -> int:
        return self.sweeps

    def actions(self, sweep: int) -> tuple[bool, bool]:
        return False, True


@dataclass(frozen=True)
class Sequential:
    dismagick_sweeps: int
    disentangle_sweeps: int
    name = "sequential"

    @property
    def total(self) -> int:
        return self.dismagick_sweeps + self.disentangle_sweeps

    def actions(self, sweep: int) -> tuple[bool, bool]:
        if sweep <= self.dismagick_sweeps:
            return True, False
        return False, True


@dataclass(frozen=True)
class Joint:
    joint_sweeps: int
    disentangle_sweeps: int
    name = "joint"

    @property
    def total(self) -> int:
        return self.joint_sweeps + self.disentangle_sweeps

    def actions(self, sweep: int) -> tuple[bool, bool]:
        if sweep <= self.joint_sweeps:
            return True, True
        return False, True


SweepStrategy = CliffordOnly | Sequential | Joint


def strategies_for(phase1: int, phase2: int) -> list:
    """The three strategies compared at equal total sweep count."""
    for k in (phase1, phase2):
        if k < 0:
            raise ValueError("sweep counts must be >= 0")
    return [CliffordOnly(phase1 + phase2), Sequential(phase1, phase2), Joint(phase1, phase2)]


@dataclass(frozen=True)
class SweepConfig:
    nelder_mead: NelderMeadConfig = NelderMeadConfig()
    disentangler_cost: str = "von_neumann"
    trunc: TruncationConfig = NO_TRUNCATION
    candidates: int = 200
    shots: int = 10_000
    theta_dist: object = uniform_theta
    return_sweep: bool = False
    per_bond_records: bool = False
    ee_cut: int | None = None


@dataclass
class CircuitStep:
    bond: int
    gate: TwoQubitGate
    role: str  # "dismagicker" or "disentangler"

    @property
    def sites(self) -> tuple[int, int]:
        return self.bond, self.bond + 1


@dataclass
class TrajectoryRecord:
    sweep: int
    m2: float
    m2_stderr: float
    ee: float
    ee_profile: list
    wall_time: float
    gates_applied: int
    bond: int | None = None
    discarded_weight: float = 0.0


@dataclass
class SweepResult:
    state: object
    circuit: list = field(default_factory=list)
    records: list = field(default_factory=list)


def _bond_order(n: int, return_sweep: bool):
    order = [(b, "right") for b in range(n - 1)]
    if return_sweep:
        order += [(b, "left") for b in range(n - 3, -1, -1)]
    return order


def _measure(state, cfg: SweepConfig, rng):
    if isinstance(state, Statevector):
        m2, err = exact_m2(state), 0.0
        profile = entanglement_profile(state)
    else:
        est = sampled_m2(state, cfg.shots, int(rng.integers(2 ** 63)))
        m2, err = est.value, est.std_error
        profile = entropy_profile(state)
    n = len(profile) + 1
    cut = cfg.ee_cut if cfg.ee_cut is not None else n // 2
    ee = profile[cut - 1] if profile else 0.0
    return m2, err, ee, profile


def run_sweeps(state, strategy, cfg: SweepConfig = SweepConfig(), seed=None) -> SweepResult:
    """Run ``strategy.total`` sweeps and return final state, circuit and per-sweep records.

    The input is not modified.  Records hold the baseline (sweep 0) and one
    entry per completed sweep; with ``cfg.per_bond_records`` an entry is also
    appended after every bond.
    """
    rng = np.random.default_rng(seed)
    if isinstance(state, Statevector):
        state.check_normalized(1e-8)
        work = state.copy()
        n = work.n
    elif isinstance(state, MPS):
        work = state.copy()
        if work.center is None:
            work.canonicalize(0)
        work.normalize()
        n = work.L
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")

    result = SweepResult(work)
    t0 = time.perf_counter()
    m2, err, ee, prof = _measure(work, cfg, rng)
    result.records.append(TrajectoryRecord(0, m2, err, ee, prof, 0.0, 0))

    for sweep in range(1, strategy.total + 1):
        use_m, use_c = strategy.actions(sweep)
        discarded = 0.0
        for bond, direction in _bond_order(n, cfg.return_sweep):
            step_seed = int(rng.integers(2 ** 63))
            if isinstance(work, Statevector):
                _statevector_step(work, bond, use_m, use_c, cfg, step_seed, result.circuit)
            else:
                discarded += _mps_step(work, bond, direction, use_m, use_c, cfg, step_seed,
                                       result.circuit)
            if cfg.per_bond_records:
                m2, err, ee, prof = _measure(work, cfg, rng)
                result.records.append(TrajectoryRecord(
                    sweep, m2, err, ee, prof, time.perf_counter() - t0,
                    len(result.circuit), bond, discarded))
        m2, err, ee, prof = _measure(work, cfg, rng)
        result.records.append(TrajectoryRecord(
            sweep, m2, err, ee, prof, time.perf_counter() - t0, len(result.circuit),
            None, discarded))
    result.state = work
    return result


def _statevector_step(psi, bond, use_m, use_c, cfg, seed, circuit):
    if use_m:
        res = optimize_dismagicker_continuous(psi, bond, cfg.nelder_mead, seed)
        apply_two_qubit_gate_inplace(psi, res.gate, (bond, bond + 1))
        circuit.append(CircuitStep(bond, res.gate, "dismagicker"))
    if use_c:
        theta = two_site_from_statevector(psi, bond)
        res = best_clifford_disentangler(theta, cfg.trunc, cfg.disentangler_cost)
        apply_two_qubit_gate_inplace(psi, res.gate, (bond, bond + 1))
        circuit.append(CircuitStep(bond, res.gate, "disentangler"))


def _mps_step(mps, bond, direction, use_m, use_c, cfg, seed, circuit) -> float:
    if use_m:
        res = optimize_dismagicker_discrete(mps, bond, cfg.candidates, cfg.shots, seed,
                                            cfg.theta_dist)
        circuit.append(CircuitStep(bond, res.gate, "dismagicker"))
    theta = mps.two_site_tensor(bond)
    if use_m:
        theta = apply_gate_to_theta(theta, res.gate)
    if use_c:
        res = best_clifford_disentangler(theta / np.linalg.norm(theta), cfg.trunc,
                                         cfg.disentangler_cost)
        theta = apply_gate_to_theta(theta, res.gate)
        circuit.append(CircuitStep(bond, res.gate, "disentangler"))
    discarded, _ = mps.set_two_site_tensor(bond, theta, cfg.trunc, direction)
    return discarded
