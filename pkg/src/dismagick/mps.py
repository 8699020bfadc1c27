"""Open-boundary matrix product states of qubits.

Site tensors have shape ``(left_bond, 2, right_bond)``.  Bond ``k`` is the
cut between sites ``k`` and ``k + 1`` (``0 <= k <= L - 2``); a two-site gate
"at bond k" acts on sites ``(k, k + 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BondOutOfRange, TooLarge
from .pauli_clifford import TwoQubitGate
from .statevector import MAX_DENSE_QUBITS, Statevector, entropy_bits

NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class TruncationConfig:
    """``max_bond=None`` keeps every singular value above the cutoffs."""

    max_bond: int | None = None
    svd_cutoff: float = 0.0

    def __post_init__(self):
        if self.max_bond is not None and self.max_bond < 1:
            raise ValueError("max_bond must be >= 1")
        if self.svd_cutoff < 0:
            raise ValueError("svd_cutoff must be >= 0")


NO_TRUNCATION = TruncationConfig()


def truncated_svd(mat: np.ndarray, trunc: TruncationConfig = NO_TRUNCATION):
    """SVD keeping the leading values allowed by ``trunc``.

    Returns ``(u, s, vh, discarded)`` where ``discarded`` is the dropped
    fraction of ``sum(s**2)``.  ``s`` is not renormalized.
    """
    try:
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        u, s, vh = _svd_fallback(mat)
    total = float(np.sum(s ** 2))
    if total == 0.0:
        return u[:, :1], s[:1], vh[:1], 0.0
    smax = s[0]
    keep = int(np.sum(s > max(NOISE_FLOOR, trunc.svd_cutoff) * smax))
    keep = max(keep, 1)
    if trunc.max_bond is not None:
        keep = min(keep, trunc.max_bond)
    discarded = float(np.sum(s[keep:] ** 2)) / total
    return u[:, :keep], s[:keep], vh[:keep], discarded


def _svd_fallback(mat):
    import scipy.linalg

    return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")


class MPS:
    """Chain of site tensors with an optional orthogonality center."""

    def __init__(self, tensors, center: int | None = None):
        self.tensors = [np.asarray(t, dtype=np.complex128) for t in tensors]
        if not self.tensors:
            raise ValueError("an MPS needs at least one site")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError(f"bond mismatch {a.shape} vs {b.shape}")
        self.center = center

    @property
    def L(self) -> int:
        return len(self.tensors)

    def __len__(self):
        return self.L

    @property
    def bond_dims(self) -> list[int]:
        return [1] + [t.shape[2] for t in self.tensors]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def copy(self) -> MPS:
        return MPS([t.copy() for t in self.tensors], self.center)

    def _check_bond(self, k):
        if not 0 <= k <= self.L - 2:
            raise BondOutOfRange(f"bond {k} invalid for L={self.L}")

    # -- gauge -------------------------------------------------------------
    def canonicalize(self, center: int = 0) -> MPS:
        """Bring the chain into mixed-canonical form around ``center`` (in place)."""
        for k in range(center):
            self._shift_right(k)
        for k in range(self.L - 1, center, -1):
            self._shift_left(k)
        self.center = center
        return self

    def move_center(self, center: int) -> MPS:
        if not 0 <= center < self.L:
            raise IndexError(f"center {center} out of range")
        if self.center is None:
            return self.canonicalize(center)
        while self.center < center:
            self._shift_right(self.center)
            self.center += 1
        while self.center > center:
            self._shift_left(self.center)
            self.center -= 1
        return self

    def _shift_right(self, k):
        t = self.tensors[k]
        cl, d, cr = t.shape
        q, r = np.linalg.qr(t.reshape(cl * d, cr))
        self.tensors[k] = q.reshape(cl, d, q.shape[1])
        self.tensors[k + 1] = np.tensordot(r, self.tensors[k + 1], axes=(1, 0))

    def _shift_left(self, k):
        t = self.tensors[k]
        cl, d, cr = t.shape
        q, r = np.linalg.qr(t.reshape(cl, d * cr).T)
        self.tensors[k] = q.T.reshape(q.shape[1], d, cr)
        self.tensors[k - 1] = np.tensordot(self.tensors[k - 1], r.T, axes=(2, 0))

    # -- norms -------------------------------------------------------------
    def norm(self) -> float:
        if self.center is not None:
            return float(np.linalg.norm(self.tensors[self.center]))
        return float(np.sqrt(abs(overlap(self, self))))

    def normalize(self) -> MPS:
        if self.center is None:
            self.canonicalize(0)
        self.tensors[self.center] /= np.linalg.norm(self.tensors[self.center])
        return self

    def isometry_error(self) -> float:
        """Max deviation of left/right isometry conditions around the center."""
        if self.center is None:
            raise ValueError("no orthogonality center set")
        err = 0.0
        for k, t in enumerate(self.tensors):
            cl, d, cr = t.shape
            if k < self.center:
                m = t.reshape(cl * d, cr)
                err = max(err, np.abs(m.conj().T @ m - np.eye(cr)).max())
            elif k > self.center:
                m = t.reshape(cl, d * cr)
                err = max(err, np.abs(m @ m.conj().T - np.eye(cl)).max())
        return float(err)

    # -- two-site access ---------------------------------------------------
    def two_site_tensor(self, bond: int) -> np.ndarray:
        """Center-gauged ``(chi_l, 2, 2, chi_r)`` tensor at ``bond``; moves the center to ``bond``."""
        self._check_bond(bond)
        self.move_center(bond)
        return np.tensordot(self.tensors[bond], self.tensors[bond + 1], axes=(2, 0))

    def set_two_site_tensor(self, bond: int, theta: np.ndarray,
                            trunc: TruncationConfig = NO_TRUNCATION,
                            direction: str = "right") -> tuple[float, np.ndarray]:
        """Split ``theta`` by SVD into sites ``bond, bond+1`` and renormalize.

        The caller guarantees the rest of the chain is gauged around ``bond``.
        Returns ``(discarded_weight, kept_singular_values)``.
        """
        self._check_bond(bond)
        cl, _, _, cr = theta.shape
        u, s, vh, discarded = truncated_svd(theta.reshape(cl * 2, 2 * cr), trunc)
        s = s / np.linalg.norm(s)
        chi = s.size
        if direction == "right":
            self.tensors[bond] = u.reshape(cl, 2, chi)
            self.tensors[bond + 1] = (s[:, None] * vh).reshape(chi, 2, cr)
            self.center = bond + 1
        elif direction == "left":
            self.tensors[bond] = (u * s[None, :]).reshape(cl, 2, chi)
            self.tensors[bond + 1] = vh.reshape(chi, 2, cr)
            self.center = bond
        else:
            raise ValueError("direction must be 'left' or 'right'")
        return discarded, s


def apply_gate_to_theta(theta: np.ndarray, gate) -> np.ndarray:
    """Contract a 4x4 gate into the physical legs of a two-site tensor."""
    m = gate.matrix if isinstance(gate, TwoQubitGate) else np.asarray(gate)
    cl, _, _, cr = theta.shape
    return np.einsum("ij,ajb->aib", m, theta.reshape(cl, 4, cr)).reshape(cl, 2, 2, cr)


def apply_two_site_gate(mps: MPS, g, bond: int,
                        trunc: TruncationConfig = NO_TRUNCATION,
                        direction: str = "right", inplace: bool = False):
    """Apply ``g`` to sites ``(bond, bond+1)``; returns ``(mps, discarded_weight)``."""
    out = mps if inplace else mps.copy()
    theta = apply_gate_to_theta(out.two_site_tensor(bond), g)
    discarded, _ = out.set_two_site_tensor(bond, theta, trunc, direction)
    return out, discarded


def overlap(a: MPS, b: MPS) -> complex:
    """``<a|b>``."""
    if a.L != b.L:
        raise ValueError("length mismatch")
    env = np.ones((1, 1), dtype=np.complex128)
    for ta, tb in zip(a.tensors, b.tensors):
        env = np.tensordot(env, tb, axes=(1, 0))
        env = np.tensordot(ta.conj(), env, axes=([0, 1], [0, 1]))
    return complex(env[0, 0])


def mps_fidelity(a: MPS, b: MPS) -> float:
    return float(abs(overlap(a, b)) ** 2 / (abs(overlap(a, a)) * abs(overlap(b, b))))


def singular_values(mps: MPS, bond: int) -> np.ndarray:
    mps._check_bond(bond)
    mps.move_center(bond)
    t = mps.tensors[bond]
    cl, d, cr = t.shape
    s = np.linalg.svd(t.reshape(cl * d, cr), compute_uv=False)
    return s / np.linalg.norm(s)


def bond_entropy(mps: MPS, bond: int) -> float:
    """Von Neumann entropy (bits) across ``bond``; moves the center."""
    return entropy_bits(singular_values(mps, bond) ** 2)


def entropy_profile(mps: MPS) -> list[float]:
    return [bond_entropy(mps, k) for k in range(mps.L - 1)]


def from_statevector(psi: Statevector, trunc: TruncationConfig = NO_TRUNCATION) -> MPS:
    n = psi.n
    rest = psi.amplitudes.reshape(1, -1)
    tensors = []
    for _ in range(n - 1):
        chi = rest.shape[0]
        u, s, vh, _ = truncated_svd(rest.reshape(chi * 2, -1), trunc)
        tensors.append(u.reshape(chi, 2, s.size))
        rest = s[:, None] * vh
    tensors.append(rest.reshape(rest.shape[0], 2, 1))
    return MPS(tensors, center=n - 1)


def to_statevector(mps: MPS) -> Statevector:
    if mps.L > MAX_DENSE_QUBITS:
        raise TooLarge(f"L={mps.L} exceeds dense limit {MAX_DENSE_QUBITS}")
    v = np.ones((1, 1), dtype=np.complex128)
    for t in mps.tensors:
        v = np.tensordot(v, t, axes=(1, 0)).reshape(-1, t.shape[2])
    return Statevector(v.reshape(-1))


def product_mps(local_states) -> MPS:
    tensors = []
    for s in local_states:
        s = np.asarray(s, dtype=np.complex128)
        tensors.append((s / np.linalg.norm(s)).reshape(1, 2, 1))
    return MPS(tensors, center=0)


def zero_mps(L: int) -> MPS:
    return product_mps([[1.0, 0.0]] * L)


def ghz_mps(L: int) -> MPS:
    if L == 1:
        return product_mps([[1 / np.sqrt(2), 1 / np.sqrt(2)]])
    tensors = []
    for k in range(L):
        cl = 1 if k == 0 else 2
        cr = 1 if k == L - 1 else 2
        t = np.zeros((cl, 2, cr), dtype=np.complex128)
        for v in (0, 1):
            t[min(v, cl - 1), v, min(v, cr - 1)] = 1.0
        tensors.append(t)
    tensors[0] = tensors[0] / np.sqrt(2)
    return MPS(tensors).canonicalize(0)


def random_mps(L: int, bond: int, seed=None) -> MPS:
    """Seeded Gaussian tensors, canonicalized at site 0 and normalized."""
    rng = np.random.default_rng(seed)
    dims = [1] + [min(bond, 2 ** min(k, L - k)) for k in range(1, L)] + [1]
    tensors = []
    for k in range(L):
        shape = (dims[k], 2, dims[k + 1])
        tensors.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return MPS(tensors).canonicalize(0).normalize()
