"""Dismagicker gates: non-Clifford two-qubit unitaries that lower M2.

Two search modes:

* continuous -- ``exp(i V(theta))`` with ``V`` a real combination of the 16
  two-qubit Pauli strings, optimized by Nelder-Mead against the exact M2 of
  the whole statevector;
* discrete -- best of a batch of random ``Clifford . Rz . Clifford`` gates
  (plus the identity), scored by Pauli-sampled M2 on an MPS.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .mps import MPS, apply_gate_to_theta
from .pauli_clifford import GateKind, PauliString, TwoQubitGate, random_clifford_rz_candidate, uniform_theta
from .sre import SreEstimate, sampled_m2_tensors
from .statevector import Statevector

N_PARAMS = 16


def _pauli_basis() -> np.ndarray:
    basis = np.empty((N_PARAMS, 4, 4), dtype=complex)
    for a in range(N_PARAMS):
        first, second = divmod(a, 4)
        basis[a] = PauliString.from_label("IXYZ"[first] + "IXYZ"[second]).to_matrix()
    basis.setflags(write=False)
    return basis


PAULI_BASIS = _pauli_basis()
PARAM_LABELS = tuple(a + b for a in "IXYZ" for b in "IXYZ")


def generator(theta) -> np.ndarray:
    """``V(theta) = sum_a theta_a P_a`` over the basis ordered II, IX, ..., ZZ."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameters, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameters must be finite")
    return (theta @ PAULI_BASIS.reshape(N_PARAMS, 16)).reshape(4, 4)


def generator_to_unitary(theta) -> TwoQubitGate:
    """``exp(i V(theta))`` via Hermitian eigendecomposition."""
    w, v = np.linalg.eigh(generator(theta))
    return TwoQubitGate((v * np.exp(1j * w)) @ v.conj().T, GateKind.PARAM_GENERATOR)


@dataclass(frozen=True)
class NelderMeadConfig:
    max_iters: int = 2000
    xtol: float = 1e-6
    ftol: float = 1e-8
    initial_step: float = 0.1
    restart_count: int = 2

    def __post_init__(self):
        if self.max_iters < 1 or self.xtol <= 0 or self.ftol <= 0 or self.initial_step <= 0:
            raise ValueError("Nelder-Mead tolerances, step and iteration cap must be positive")
        if self.restart_count < 0:
            raise ValueError("restart_count must be >= 0")


@dataclass
class ContinuousResult:
    gate: TwoQubitGate
    m2_after: float
    m2_before: float
    theta: np.ndarray
    converged: bool
    nfev: int
    trace: list = field(default_factory=list, repr=False)

    def write_trace(self, path) -> None:
        write_trace_csv(path, self.trace)


def write_trace_csv(path, trace) -> None:
    """Write ``(evaluation, cost)`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "cost"])
        for i, c in trace:
            w.writerow([i, repr(float(c))])


def _xz_basis() -> np.ndarray:
    # two-qubit Paulis indexed by (2*x0 + z0) * 4 + (2*x1 + z1): I, Z, X, Y per qubit
    order = "IZXY"
    return np.stack([PauliString.from_label(a + b).to_matrix() for a in order for b in order])


_XZ_BASIS = _xz_basis()


def local_pauli_table(state: Statevector, bond: int) -> np.ndarray:
    """Pauli expectations arranged as ``(16 local strings on the bond, 4**(n-2) rest)``."""
    n = state.n
    table = kernels.pauli_expectation_table(np.ascontiguousarray(state.amplitudes))
    t = table.reshape((2,) * (2 * n))
    t = t.transpose([a for q in range(n) for a in (q, n + q)]).reshape((4,) * n)
    return np.ascontiguousarray(np.moveaxis(t, (bond, bond + 1), (0, 1)).reshape(16, -1))


_XZ_ROWS = _XZ_BASIS.reshape(16, 16)
_XZ_COLS = np.ascontiguousarray(_XZ_ROWS.conj().T) / 4.0


def pauli_transfer_matrix(u: np.ndarray) -> np.ndarray:
    """Real ``R`` with ``U^dag P_a U = sum_b R[a, b] P_b`` in the local table basis."""
    # row-major vec(A X C) = (A kron C^T) vec(X)
    ud = u.conj().T
    k = (ud[:, None, :, None] * u.T[None, :, None, :]).reshape(16, 16)
    return np.ascontiguousarray((_XZ_ROWS @ k.T @ _XZ_COLS).real)


def _make_cost(state: Statevector, bond: int, trace: list):
    # M2 after a local gate only needs the fixed table mixed by the gate's
    # transfer matrix, so each evaluation is one 16x16 by 16x4^(n-2) product.
    table = local_pauli_table(state, bond)
    dim = 1 << state.n
    flat_basis = PAULI_BASIS.reshape(N_PARAMS, 16)

    def cost(theta):
        w, v = np.linalg.eigh((theta @ flat_basis).reshape(4, 4))
        u = (v * np.exp(1j * w)) @ v.conj().T
        moved = pauli_transfer_matrix(u) @ table
        moved *= moved
        value = -math.log2(float(np.sum(moved * moved)) / dim)
        trace.append((len(trace), value))
        return value

    return cost


def _simplex(center, step, signs):
    sim = np.tile(center, (N_PARAMS + 1, 1))
    sim[1:] += np.diag(step * signs)
    return sim


def optimize_dismagicker_continuous(state: Statevector, bond: int,
                                    cfg: NelderMeadConfig = NelderMeadConfig(),
                                    seed=None) -> ContinuousResult:
    """Nelder-Mead minimization of M2 after ``exp(iV)`` on qubits ``(bond, bond+1)``.

    The first simplex is ``theta = 0`` plus axis steps of ``initial_step``;
    each restart re-centers on the incumbent with the step halved and axis
    signs drawn from ``seed``.  The identity is always a simplex vertex, so the
    returned cost never exceeds the starting M2.
    """
    if not 0 <= bond <= state.n - 2:
        raise ValueError(f"bond {bond} invalid for {state.n} qubits")
    rng = np.random.default_rng(seed)
    trace: list = []
    cost = _make_cost(state, bond, trace)
    m2_before = cost(np.zeros(N_PARAMS))
    best_x, best_f = np.zeros(N_PARAMS), m2_before
    step = cfg.initial_step
    signs = np.ones(N_PARAMS)
    converged = False
    for attempt in range(cfg.restart_count + 1):
        res = minimize(
            cost, best_x, method="Nelder-Mead",
            options={
                "initial_simplex": _simplex(best_x, step, signs),
                "xatol": cfg.xtol, "fatol": cfg.ftol, "maxiter": cfg.max_iters,
            },
        )
        converged = bool(res.success)
        if res.fun < best_f:
            best_x, best_f = np.array(res.x), float(res.fun)
        step *= 0.5
        signs = rng.choice([-1.0, 1.0], size=N_PARAMS)
    gate = generator_to_unitary(best_x)
    return ContinuousResult(gate, best_f, m2_before, best_x, converged, len(trace), trace)


@dataclass
class DiscreteResult:
    gate: TwoQubitGate
    estimate: SreEstimate
    index: int
    estimates: list = field(repr=False)


def right_canonical_merged(mps: MPS, bond: int) -> list:
    """Right-canonical tensor list with sites ``bond, bond+1`` merged into one ``d=4`` site.

    A two-site gate on the merged site keeps it right-isometric, so the list
    stays a valid input for Pauli sampling after the gate is applied.  The
    result is normalized.
    """
    work = mps.copy()
    theta = work.two_site_tensor(bond)
    cl, _, _, cr = theta.shape
    q, r = np.linalg.qr(theta.reshape(cl, 4 * cr).T)
    tensors = [q.T.reshape(-1, 4, cr)] + work.tensors[bond + 2:]
    carry = r.T
    for t in reversed(work.tensors[:bond]):
        t = np.tensordot(t, carry, axes=(2, 0))
        a, d, b = t.shape
        q, r = np.linalg.qr(t.reshape(a, d * b).T)
        tensors.insert(0, q.T.reshape(-1, d, b))
        carry = r.T
    tensors[0] = tensors[0] * (carry[0, 0] / abs(carry[0, 0]))
    return tensors


def optimize_dismagicker_discrete(mps: MPS, bond: int, candidates: int = 200,
                                  shots: int = 10_000, seed=None,
                                  theta_dist=uniform_theta) -> DiscreteResult:
    """Pick the lowest sampled-M2 gate among ``candidates`` random Clifford+Rz gates.

    The identity is candidate 0.  Each candidate is scored with its own fresh
    batch of ``shots`` Pauli samples; ties go to the lower index.
    """
    ss = np.random.SeedSequence(seed if not isinstance(seed, np.random.Generator)
                                else int(seed.integers(2 ** 63)))
    gate_seed, *shot_seeds = ss.spawn(candidates + 2)
    gate_rng = np.random.default_rng(gate_seed)
    gates = [TwoQubitGate(np.eye(4, dtype=complex), GateKind.CLIFFORD)]
    gates += [random_clifford_rz_candidate(gate_rng, theta_dist) for _ in range(candidates)]
    base = right_canonical_merged(mps, bond)
    site = bond
    estimates = []
    for g, s in zip(gates, shot_seeds):
        tensors = list(base)
        tensors[site] = np.ascontiguousarray(apply_gate_to_theta(
            base[site].reshape(base[site].shape[0], 2, 2, -1), g).reshape(base[site].shape))
        estimates.append(sampled_m2_tensors(tensors, shots, s))
    values = np.array([e.value for e in estimates])
    index = int(np.flatnonzero(values <= values.min())[0])
    return DiscreteResult(gates[index], estimates[index], index, estimates)
