"""Pauli strings and the two-qubit Clifford group.

Bit convention: qubit 0 is the most significant bit of a basis index, so a
Pauli string with masks ``(x, z)`` acts on a basis state as
``X^x Z^z |b> = (-1)^{popcount(b & z)} |b ^ x>``.  Letters are Hermitian:
a qubit with both bits set carries ``Y = i X Z``.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NonCliffordGate

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PAULI_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_LETTER_OF = {v: k for k, v in PAULI_LETTERS.items()}
SINGLE_QUBIT_PAULIS = (I2, X, Y, Z)

N_TWO_QUBIT_CLIFFORDS = 11520
_KEY_GRID = 1e-8


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


@dataclass(frozen=True)
class PauliString:
    """``i**phase_exp`` times a tensor product of Hermitian Pauli letters."""

    n: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks must fit in {self.n} bits")
        if self.phase_exp not in (0, 1, 2, 3):
            raise ValueError("phase_exp must be in {0, 1, 2, 3}")

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse labels such as ``"XZ"``, ``"-YI"`` or ``"iZZ"``."""
        phase = 0
        for prefix, exp in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if label.startswith(prefix):
                phase = exp
                label = label[len(prefix):]
                break
        n = len(label)
        x = z = 0
        for q, ch in enumerate(label.upper()):
            try:
                bx, bz = PAULI_LETTERS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r}") from None
            x |= bx << (n - 1 - q)
            z |= bz << (n - 1 - q)
        return cls(n, x, z, phase)

    @property
    def letters(self) -> str:
        n = self.n
        return "".join(
            _LETTER_OF[((self.x_mask >> (n - 1 - q)) & 1, (self.z_mask >> (n - 1 - q)) & 1)]
            for q in range(n)
        )

    @property
    def label(self) -> str:
        return ("", "i", "-", "-i")[self.phase_exp] + self.letters

    @property
    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    def to_matrix(self) -> np.ndarray:
        m = np.ones((1, 1), dtype=complex)
        for ch in self.letters:
            m = np.kron(m, SINGLE_QUBIT_PAULIS["IXYZ".index(ch)])
        return (1j ** self.phase_exp) * m

    def __repr__(self):
        return f"PauliString({self.label!r})"


class GateKind(enum.Enum):
    CLIFFORD = "clifford"
    HAAR = "haar"
    PARAM_GENERATOR = "param_generator"
    CLIFFORD_RZ = "clifford_rz"
    OTHER = "other"


def canonical_key(matrix: np.ndarray) -> bytes:
    """Hash key identifying a matrix up to global phase."""
    flat = np.asarray(matrix, dtype=complex).reshape(-1)
    nz = np.flatnonzero(np.abs(flat) > _KEY_GRID)
    if nz.size == 0:
        raise ValueError("zero matrix has no canonical key")
    normed = flat / flat[nz[0]]
    grid = np.round(np.concatenate([normed.real, normed.imag]) / _KEY_GRID)
    return (grid.astype(np.int64) + 0).tobytes()


@dataclass(frozen=True, eq=False)
class TwoQubitGate:
    matrix: np.ndarray
    kind: GateKind = GateKind.OTHER
    canonical_key: bytes | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-qubit gate must be 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, kind=GateKind.OTHER) -> TwoQubitGate:
        return cls(np.asarray(matrix, dtype=complex), kind, canonical_key(matrix))

    @property
    def dagger(self) -> TwoQubitGate:
        return TwoQubitGate(self.matrix.conj().T, self.kind)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.abs(m.conj().T @ m - np.eye(4)).max())

    def is_clifford(self, atol: float = 1e-10) -> bool:
        try:
            for x in range(4):
                for z in range(4):
                    if x or z:
                        conjugate_pauli(self, PauliString(2, x, z), atol=atol)
        except NonCliffordGate:
            return False
        return True

    def equal_up_to_phase(self, other, atol: float = 1e-10) -> bool:
        other = other.matrix if isinstance(other, TwoQubitGate) else np.asarray(other)
        overlap = np.vdot(self.matrix, other) / 4.0
        if abs(abs(overlap) - 1.0) > atol:
            return False
        return bool(np.abs(other - overlap * self.matrix).max() < atol * 10)


def _two_qubit_paulis() -> np.ndarray:
    out = np.empty((16, 4, 4), dtype=complex)
    for x in range(4):
        for z in range(4):
            out[4 * x + z] = PauliString(2, x, z).to_matrix()
    return out


_PAULIS2 = _two_qubit_paulis()


def conjugate_pauli(g: TwoQubitGate, p: PauliString, atol: float = 1e-10) -> PauliString:
    """Return the Pauli string equal to ``g p g^dagger``."""
    if p.n != 2:
        raise ValueError("conjugate_pauli acts on two-qubit Pauli strings")
    u = g.matrix if isinstance(g, TwoQubitGate) else np.asarray(g, dtype=complex)
    m = u @ p.to_matrix() @ u.conj().T
    coeffs = np.einsum("kij,ji->k", _PAULIS2, m) / 4.0
    k = int(np.argmax(np.abs(coeffs)))
    c = coeffs[k]
    if np.abs(m - c * _PAULIS2[k]).max() > atol:
        raise NonCliffordGate(f"{p.label} is not mapped to a single Pauli string")
    exp = int(np.round(np.angle(c) / (np.pi / 2))) % 4
    if abs(c - 1j ** exp) > atol:
        raise NonCliffordGate(f"{p.label} maps with non-unit coefficient {c}")
    return PauliString(2, k // 4, k % 4, exp)


def clifford_generators() -> list[np.ndarray]:
    """The BFS generating set: H and S on each qubit, then CNOT(0 -> 1)."""
    return [np.kron(H, I2), np.kron(I2, H), np.kron(S, I2), np.kron(I2, S), CNOT]


@lru_cache(maxsize=1)
def _clifford_table() -> tuple[np.ndarray, tuple[bytes, ...]]:
    gens = clifford_generators()
    ident = np.eye(4, dtype=complex)
    mats = [ident]
    keys = [canonical_key(ident)]
    seen = {keys[0]: 0}
    queue = deque([0])
    while queue:
        m = mats[queue.popleft()]
        for gen in gens:
            new = gen @ m
            key = canonical_key(new)
            if key not in seen:
                seen[key] = len(mats)
                mats.append(new)
                keys.append(key)
                queue.append(len(mats) - 1)
    arr = np.array(mats)
    arr.setflags(write=False)
    return arr, tuple(keys)


def clifford_matrices() -> np.ndarray:
    """Read-only ``(11520, 4, 4)`` array of the enumerated Clifford unitaries."""
    return _clifford_table()[0]


@lru_cache(maxsize=1)
def clifford_index() -> dict[bytes, int]:
    """Map canonical key -> enumeration index."""
    return {k: i for i, k in enumerate(_clifford_table()[1])}


@lru_cache(maxsize=1)
def _clifford_gates() -> tuple[TwoQubitGate, ...]:
    mats, keys = _clifford_table()
    return tuple(TwoQubitGate(m, GateKind.CLIFFORD, k) for m, k in zip(mats, keys))


def enumerate_two_qubit_cliffords() -> list[TwoQubitGate]:
    """Every two-qubit Clifford modulo global phase, identity first, BFS order."""
    return list(_clifford_gates())


@lru_cache(maxsize=1)
def local_coset_representatives() -> np.ndarray:
    """For each enumerated Clifford, the lowest index ``j`` with ``C_j = (a kron b) C_i``.

    Single-qubit gates applied after a two-qubit gate leave the entanglement
    across the pair unchanged, so any such cost is constant on these cosets.
    """
    mats = clifford_matrices()
    index = clifford_index()
    local = [np.kron(H, I2), np.kron(I2, H), np.kron(S, I2), np.kron(I2, S)]
    n = len(mats)
    rows = np.repeat(np.arange(n), len(local))
    cols = np.array([index[canonical_key(g @ m)] for m in mats for g in local])
    graph = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    reps = np.full(labels.max() + 1, n)
    np.minimum.at(reps, labels, np.arange(n))
    out = reps[labels]
    out.setflags(write=False)
    return out


def random_clifford(seed=None) -> TwoQubitGate:
    """Uniform draw from the enumerated Clifford group.

    ``seed`` may be an int, a ``SeedSequence`` or a ``numpy.random.Generator``;
    a generator is advanced in place.
    """
    rng = np.random.default_rng(seed)
    return _clifford_gates()[int(rng.integers(N_TWO_QUBIT_CLIFFORDS))]


def uniform_theta(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.0, 2.0 * np.pi))


def clifford_rz_gate(c_left, theta: float, qubit: int, c_right) -> TwoQubitGate:
    """``c_left @ Rz(theta)[qubit] @ c_right`` as a CliffordRz gate."""
    if qubit not in (0, 1):
        raise ValueError("qubit must be 0 or 1")
    left = c_left.matrix if isinstance(c_left, TwoQubitGate) else np.asarray(c_left)
    right = c_right.matrix if isinstance(c_right, TwoQubitGate) else np.asarray(c_right)
    local = np.kron(rz(theta), I2) if qubit == 0 else np.kron(I2, rz(theta))
    return TwoQubitGate(left @ local @ right, GateKind.CLIFFORD_RZ)


def random_clifford_rz_candidate(seed=None, theta_dist=uniform_theta) -> TwoQubitGate:
    """Random ``C2 . Rz(theta) . C2'`` with the rotation on a uniformly chosen qubit.

    ``theta_dist`` is called with the generator and returns the angle.
    """
    rng = np.random.default_rng(seed)
    c_left = random_clifford(rng)
    c_right = random_clifford(rng)
    qubit = int(rng.integers(2))
    theta = float(theta_dist(rng))
    return clifford_rz_gate(c_left, theta, qubit, c_right)
