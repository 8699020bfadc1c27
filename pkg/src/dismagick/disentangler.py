"""Exhaustive two-qubit Clifford search minimizing bond entanglement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mps import TruncationConfig
from .pauli_clifford import (TwoQubitGate, clifford_matrices, enumerate_two_qubit_cliffords,
                             local_coset_representatives)
from .errors import SiteOutOfRange
from .statevector import ENTROPY_EIG_FLOOR, Statevector

COSTS = ("von_neumann", "renyi2", "truncation")
TIE_TOL = 1e-12
_CHUNK = 2048


@dataclass
class DisentanglerResult:
    gate: TwoQubitGate
    ee_after: float
    index: int
    ee_identity: float


def two_site_from_statevector(psi: Statevector, bond: int) -> np.ndarray:
    """Compress the environments of qubits ``(bond, bond+1)`` into isometries.

    Returns a ``(chi_l, 2, 2, chi_r)`` tensor with the same spectrum across every
    cut through the two physical legs as ``psi``.
    """
    n = psi.n
    if not 0 <= bond <= n - 2:
        raise SiteOutOfRange(f"bond {bond} invalid for {n} qubits")
    left, right = 1 << bond, 1 << (n - bond - 2)
    t = psi.amplitudes.reshape(left, 4 * right)
    _, s, vh = np.linalg.svd(t, full_matrices=False)
    keep = max(1, int(np.sum(s > 1e-14 * s[0])))
    t = (s[:keep, None] * vh[:keep]).reshape(keep * 4, right)
    u, s, _ = np.linalg.svd(t, full_matrices=False)
    keep_r = max(1, int(np.sum(s > 1e-14 * s[0])))
    t = (u[:, :keep_r] * s[:keep_r]).reshape(keep, 2, 2, keep_r)
    return t / np.linalg.norm(t)


def _spectra(theta: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Reduced-density eigenvalues across the central cut after each gate."""
    cl, _, _, cr = theta.shape
    th = theta.reshape(cl, 4, cr)
    out = []
    for start in range(0, len(mats), _CHUNK):
        g = mats[start:start + _CHUNK]
        m = np.einsum("gij,ajb->gaib", g, th).reshape(len(g), cl * 2, 2 * cr)
        if cl <= cr:
            rho = m @ m.conj().transpose(0, 2, 1)
        else:
            rho = m.conj().transpose(0, 2, 1) @ m
        out.append(np.linalg.eigvalsh(rho))
    return np.concatenate(out)


def spectrum_costs(lams: np.ndarray, cost: str = "von_neumann",
                   trunc: TruncationConfig | None = None) -> np.ndarray:
    lams = np.clip(lams, 0.0, None)
    lams = lams / lams.sum(axis=-1, keepdims=True)
    if cost == "von_neumann":
        safe = np.where(lams > ENTROPY_EIG_FLOOR, lams, 1.0)
        return np.maximum(0.0, -np.sum(lams * np.log2(safe) * (lams > ENTROPY_EIG_FLOOR), axis=-1))
    if cost == "renyi2":
        return np.maximum(0.0, -np.log2(np.sum(lams ** 2, axis=-1)))
    if cost == "truncation":
        if trunc is None or trunc.max_bond is None:
            raise ValueError("truncation cost needs a TruncationConfig with max_bond")
        desc = -np.sort(-lams, axis=-1)
        return np.sum(desc[..., trunc.max_bond:], axis=-1)
    raise ValueError(f"unknown cost {cost!r}; choose from {COSTS}")


def disentangler_costs(theta: np.ndarray, cost: str = "von_neumann",
                       trunc: TruncationConfig | None = None,
                       exhaustive: bool = False) -> np.ndarray:
    """Cost of every enumerated Clifford applied to ``theta`` (enumeration order).

    By default one gate per local-Clifford coset is contracted and its cost is
    shared by the other 575 members; ``exhaustive=True`` contracts all 11520.
    """
    mats = clifford_matrices()
    if exhaustive:
        return spectrum_costs(_spectra(theta, mats), cost, trunc)
    reps = local_coset_representatives()
    uniq, inverse = np.unique(reps, return_inverse=True)
    return spectrum_costs(_spectra(theta, mats[uniq]), cost, trunc)[inverse]


def best_clifford_disentangler(theta: np.ndarray, trunc: TruncationConfig | None = None,
                               cost: str = "von_neumann",
                               exhaustive: bool = False) -> DisentanglerResult:
    """Search all 11520 Cliffords for the lowest central-cut cost.

    ``theta`` is the ``(chi_l, 2, 2, chi_r)`` two-site tensor with isometric
    environments.  Ties within 1e-12 go to the lowest enumeration index, and
    the identity (index 0) is always a candidate.
    """
    costs = disentangler_costs(theta, cost, trunc, exhaustive)
    best = float(costs.min())
    index = int(np.flatnonzero(costs <= best + TIE_TOL)[0])
    return DisentanglerResult(
        enumerate_two_qubit_cliffords()[index], float(costs[index]), index, float(costs[0])
    )
