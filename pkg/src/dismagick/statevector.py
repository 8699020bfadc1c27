"""Dense statevector simulation for small qubit counts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotNormalized, SiteOutOfRange, TooLarge
from .pauli_clifford import GateKind, TwoQubitGate, random_clifford

MAX_DENSE_QUBITS = 14
ENTROPY_EIG_FLOOR = 1e-12


@dataclass
class Statevector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = a.size.bit_length() - 1
        if a.size != 1 << n:
            raise ValueError(f"length {a.size} is not a power of two")
        if n > MAX_DENSE_QUBITS:
            raise TooLarge(f"{n} qubits exceeds the dense limit {MAX_DENSE_QUBITS}")
        self.amplitudes = a

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def normalized(cls, amplitudes) -> Statevector:
        a = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(a / np.linalg.norm(a))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self, tol: float = 1e-10) -> None:
        err = abs(self.norm() ** 2 - 1.0)
        if err > tol:
            raise NotNormalized(f"|psi|^2 deviates from 1 by {err:.3e}")

    def copy(self) -> Statevector:
        return Statevector(self.amplitudes.copy())

    def tensor(self, other: Statevector) -> Statevector:
        return Statevector(np.kron(self.amplitudes, other.amplitudes))


def basis_state(n: int, index: int = 0) -> Statevector:
    a = np.zeros(1 << n, dtype=np.complex128)
    a[index] = 1.0
    return Statevector(a)


def zero_state(n: int) -> Statevector:
    return basis_state(n, 0)


def product_state(single_qubit_states) -> Statevector:
    a = np.ones(1, dtype=np.complex128)
    for s in single_qubit_states:
        a = np.kron(a, np.asarray(s, dtype=np.complex128))
    return Statevector.normalized(a)


T_STATE = np.array([1.0, np.exp(0.25j * np.pi)]) / np.sqrt(2)


def t_product(n: int) -> Statevector:
    return product_state([T_STATE] * n)


def ghz(n: int) -> Statevector:
    a = np.zeros(1 << n, dtype=np.complex128)
    a[0] = a[-1] = 1 / np.sqrt(2)
    return Statevector(a)


def fidelity(a: Statevector, b: Statevector) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def _check_sites(n, i, j):
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise SiteOutOfRange(f"sites ({i}, {j}) invalid for {n} qubits")


def apply_two_qubit_gate_inplace(psi: Statevector, g, sites) -> Statevector:
    i, j = sites
    n = psi.n
    _check_sites(n, i, j)
    m = g.matrix if isinstance(g, TwoQubitGate) else np.asarray(g, dtype=np.complex128)
    kernels.apply_two_qubit_inplace(psi.amplitudes, np.ascontiguousarray(m, dtype=np.complex128), n, i, j)
    return psi


def apply_two_qubit_gate(psi: Statevector, g, sites) -> Statevector:
    """Return ``g`` applied to qubits ``sites = (i, j)``; row index of ``g`` is ``2*q_i + q_j``."""
    return apply_two_qubit_gate_inplace(psi.copy(), g, sites)


def apply_circuit(psi: Statevector, circuit) -> Statevector:
    """Apply a sequence of ``(sites, gate)`` pairs."""
    out = psi.copy()
    for sites, g in circuit:
        apply_two_qubit_gate_inplace(out, g, sites)
    return out


def haar_random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with phase-fixed R diagonal."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_random_two_qubit(seed=None) -> TwoQubitGate:
    return TwoQubitGate(haar_random_unitary(4, seed), GateKind.HAAR)


def brickwork_bonds(n: int, layer: int) -> list[tuple[int, int]]:
    """Nearest-neighbour pairs of one brickwork layer; even layers start at qubit 0."""
    return [(i, i + 1) for i in range(layer % 2, n - 1, 2)]


def prepare_benchmark_state(n: int, clifford_depth: int = 6, haar_layers: int = 3,
                            seed=None) -> Statevector:
    """|0...0> evolved by random-Clifford then Haar-random brickwork layers."""
    rng = np.random.default_rng(seed)
    psi = zero_state(n)
    for layer in range(clifford_depth):
        for bond in brickwork_bonds(n, layer):
            apply_two_qubit_gate_inplace(psi, random_clifford(rng), bond)
    for layer in range(haar_layers):
        for bond in brickwork_bonds(n, layer):
            apply_two_qubit_gate_inplace(psi, haar_random_two_qubit(rng), bond)
    return psi


def entropy_bits(probs, floor: float = ENTROPY_EIG_FLOOR) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > floor]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def schmidt_values(psi: Statevector, cut: int) -> np.ndarray:
    n = psi.n
    if not 1 <= cut <= n - 1:
        raise SiteOutOfRange(f"cut {cut} invalid for {n} qubits")
    return np.linalg.svd(psi.amplitudes.reshape(1 << cut, -1), compute_uv=False)


def entanglement_entropy(psi: Statevector, cut: int) -> float:
    """Von Neumann entropy (bits) of qubits ``[0, cut)``."""
    return entropy_bits(schmidt_values(psi, cut) ** 2)


def entanglement_profile(psi: Statevector) -> list[float]:
    return [entanglement_entropy(psi, c) for c in range(1, psi.n)]
