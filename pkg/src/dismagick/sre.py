"""Stabilizer Renyi entropy (alpha = 2), exact and Pauli-sampled.

M2 is reported in bits:  M2 = -log2( sum_P <psi|P|psi>^4 / 2^n ).
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import kernels
from .errors import NotNormalized, TooManyQubits
from .mps import MPS
from .pauli_clifford import H, I2, PauliString, S, SINGLE_QUBIT_PAULIS, canonical_key
from .statevector import Statevector

MAX_EXACT_QUBITS = 12


class SreMethod(enum.Enum):
    EXACT = "exact"
    PAULI_SAMPLED = "pauli_sampled"


@dataclass(frozen=True)
class SreEstimate:
    value: float
    std_error: float
    shots: int
    method: SreMethod

    def as_dict(self) -> dict:
        return {
            "m2": self.value,
            "std_error": self.std_error,
            "shots": self.shots,
            "method": self.method.value,
        }


def pauli_expectation(psi: Statevector, p: PauliString) -> complex:
    if p.n != psi.n:
        raise ValueError("qubit count mismatch")
    return kernels.pauli_expectation(psi.amplitudes, p.x_mask, p.z_mask) * 1j ** p.phase_exp


def pauli_moment4(psi: Statevector) -> float:
    """``sum_P |<psi|P|psi>|^4`` over all 4^n Pauli strings."""
    if psi.n > MAX_EXACT_QUBITS:
        raise TooManyQubits(f"exact M2 is limited to {MAX_EXACT_QUBITS} qubits, got {psi.n}")
    return kernels.pauli_moment4(psi.amplitudes)


def exact_m2(psi: Statevector) -> float:
    return -math.log2(pauli_moment4(psi) / (1 << psi.n))


def exact_m2_bruteforce(psi: Statevector) -> float:
    """Explicit 4^n enumeration with dense Pauli matrices; test oracle for small n."""
    n = psi.n
    total = 0.0
    for letters in product(range(4), repeat=n):
        m = np.ones((1, 1), dtype=complex)
        for k in letters:
            m = np.kron(m, SINGLE_QUBIT_PAULIS[k])
        total += abs(np.vdot(psi.amplitudes, m @ psi.amplitudes)) ** 4
    return -math.log2(total / 2 ** n)


def stab_fidelity_lower_bound(m2: float, unit: str = "bits") -> float:
    """``2 exp(-M2) - 1`` with M2 expressed in nats.

    With the default ``unit="bits"`` the input is converted by ``ln 2`` first,
    i.e. the bound is ``2 * 2**(-m2) - 1``.  The value may be negative.
    """
    if unit == "bits":
        nats = m2 * math.log(2)
    elif unit == "nats":
        nats = m2
    else:
        raise ValueError("unit must be 'bits' or 'nats'")
    return 2.0 * math.exp(-nats) - 1.0


# -- Pauli sampling on MPS ---------------------------------------------------

@lru_cache(maxsize=None)
def _letter_masks(d: int):
    """(x, z) masks of the 4^m letters on a site of dimension d = 2^m, base-4 order I, X, Y, Z."""
    m = d.bit_length() - 1
    xs, zs = [], []
    for letters in product(range(4), repeat=m):
        x = z = 0
        for k in letters:
            bx, bz = ((0, 0), (1, 0), (1, 1), (0, 1))[k]
            x = (x << 1) | bx
            z = (z << 1) | bz
        xs.append(x)
        zs.append(z)
    return np.array(xs, dtype=np.int64), np.array(zs, dtype=np.int64)


def sample_pauli_strings(tensors, shots: int, seed=None):
    """Draw Pauli strings from ``Pi(P) = <P>^2 / 2^n``.

    ``tensors`` must be right-canonical with the (normalized) center on the
    first site.  Physical dimensions may be any power of two, so merged
    two-site tensors are allowed; letters on a site of dimension ``2^m`` are
    indexed in base 4 over its ``m`` qubits.

    Returns ``(letters, values)``: an ``(shots, len(tensors))`` integer array
    and the ``<P_s>^2`` of each drawn string.
    """
    rng = np.random.default_rng(seed)
    env = np.ones((shots, 1, 1), dtype=np.complex128)
    log_scale = np.zeros(shots)
    letters = np.empty((shots, len(tensors)), dtype=np.int64)
    for site, a in enumerate(tensors):
        xs, zs = _letter_masks(a.shape[1])
        u = rng.random(shots)
        env, pick, norm2 = kernels.pauli_sample_site(
            env, np.ascontiguousarray(a, dtype=np.complex128), xs, zs, u)
        letters[:, site] = pick
        log_scale += np.log(norm2)
    values = np.exp(log_scale) * np.abs(env[:, 0, 0]) ** 2
    return letters, values


def _right_canonical_tensors(mps: MPS):
    work = mps.copy()
    if work.center is None:
        work.canonicalize(0)
    else:
        work.move_center(0)
    nrm = np.linalg.norm(work.tensors[0])
    if abs(nrm - 1.0) > 1e-6:
        raise NotNormalized(f"MPS norm is {nrm:.8f}")
    work.tensors[0] = work.tensors[0] / nrm
    return work.tensors


def estimate_from_values(values: np.ndarray) -> SreEstimate:
    """Plug-in estimate ``-log2(mean <P>^2)`` with delta-method standard error."""
    shots = values.size
    mean = float(np.mean(values))
    if shots > 1:
        sem = float(np.std(values, ddof=1)) / math.sqrt(shots)
    else:
        sem = float("inf")
    value = -math.log2(mean)
    return SreEstimate(value, sem / (mean * math.log(2)), shots, SreMethod.PAULI_SAMPLED)


def sampled_m2(mps: MPS, shots: int = 10_000, seed=None) -> SreEstimate:
    """Perfect-Pauli-sampling estimate of M2 for a normalized MPS."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    _, values = sample_pauli_strings(_right_canonical_tensors(mps), shots, seed)
    return estimate_from_values(values)


def sampled_m2_tensors(tensors, shots: int, seed=None) -> SreEstimate:
    """As :func:`sampled_m2` for an already right-canonical tensor list."""
    _, values = sample_pauli_strings(tensors, shots, seed)
    return estimate_from_values(values)


# -- stabilizer states (brute-force oracle) ---------------------------------

def _embed_single(gate, q, n):
    m = np.ones((1, 1), dtype=complex)
    for k in range(n):
        m = np.kron(m, gate if k == q else I2)
    return m


def _embed_cnot(c, t, n):
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    bc, bt = 1 << (n - 1 - c), 1 << (n - 1 - t)
    for b in range(dim):
        m[b ^ bt if b & bc else b, b] = 1.0
    return m


@lru_cache(maxsize=4)
def stabilizer_states(n: int) -> np.ndarray:
    """All n-qubit stabilizer states modulo phase, as rows (6, 60, 1080 for n = 1, 2, 3)."""
    if n > 4:
        raise TooManyQubits("stabilizer enumeration is limited to n <= 4")
    gens = [_embed_single(H, q, n) for q in range(n)]
    gens += [_embed_single(S, q, n) for q in range(n)]
    gens += [_embed_cnot(c, t, n) for c in range(n) for t in range(n) if c != t]
    start = np.zeros(1 << n, dtype=complex)
    start[0] = 1.0
    states = [start]
    seen = {canonical_key(start)}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for g in gens:
            w = g @ v
            key = canonical_key(w)
            if key not in seen:
                seen.add(key)
                states.append(w)
                queue.append(w)
    arr = np.array(states)
    arr.setflags(write=False)
    return arr


def stabilizer_fidelity(psi: Statevector) -> float:
    """``max_phi |<phi|psi>|^2`` over all stabilizer states (n <= 4)."""
    stabs = stabilizer_states(psi.n)
    return float(np.max(np.abs(stabs.conj() @ psi.amplitudes) ** 2))
