"""NumPy fallback for the compiled statevector kernels.

Same signatures and semantics as ``_kernels.pyx``.
"""
import numpy as np


def _hadamard(dim):
    h = np.ones((1, 1))
    while h.shape[0] < dim:
        h = np.block([[h, h], [h, -h]])
    return h


def pauli_moment4(psi):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    dim = psi.shape[0]
    had = _hadamard(dim)
    idx = np.arange(dim)
    total = 0.0
    # block over x masks to keep memory at O(block * dim)
    block = max(1, min(dim, (1 << 22) // dim))
    for start in range(0, dim, block):
        xs = idx[start:start + block, None]
        v = psi[idx[None, :] ^ xs].conj() * psi[None, :]
        w = v @ had
        total += float(np.sum(np.abs(w) ** 4))
    return total


def pauli_expectation(psi, x_mask, z_mask):
    psi = np.asarray(psi, dtype=np.complex128)
    idx = np.arange(psi.shape[0])
    parity = np.array([bin(v).count("1") & 1 for v in (idx & z_mask)])
    acc = np.sum(psi[idx ^ x_mask].conj() * psi * (1 - 2 * parity))
    return complex(acc * 1j ** (bin(x_mask & z_mask).count("1") & 3))


def apply_two_qubit_inplace(psi, gate, n, qi, qj):
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, (qi, qj), (0, 1))
    shape = t.shape
    out = (gate @ t.reshape(4, -1)).reshape(shape)
    psi[:] = np.moveaxis(out, (0, 1), (qi, qj)).reshape(-1)
    return psi


def _letter_matrices(d, xs, zs):
    t = np.arange(d)
    mats = np.zeros((len(xs), d, d), dtype=complex)
    for p, (x, z) in enumerate(zip(xs, zs)):
        sign = 1 - 2 * np.array([bin(v).count("1") & 1 for v in (t & z)])
        mats[p, t ^ x, t] = sign * 1j ** (bin(x & z).count("1") & 3)
    return mats


def pauli_sample_site(env, a, xs, zs, u):
    shots, ca, _ = env.shape
    _, d, cc = a.shape
    npl = len(xs)
    paulis = _letter_matrices(d, xs, zs)
    # b[(p, c'), (a, t)] = sum_s conj(A[a, s, c']) P[s, t]
    b = np.einsum("asc,pst->pcat", a.conj(), paulis).reshape(npl * cc, ca * d)
    tmp = (env.reshape(shots * ca, ca) @ a.reshape(ca, d * cc)).reshape(shots, ca, d, cc)
    tmp = tmp.transpose(1, 2, 0, 3).reshape(ca * d, shots * cc)
    new = (b @ tmp).reshape(npl, cc, shots, cc)
    v = new.view(np.float64).reshape(npl, cc, shots, 2 * cc)
    w = np.einsum("pcnk,pcnk->np", v, v)
    cdf = np.cumsum(w, axis=1)
    pick = np.minimum((cdf <= (u * cdf[:, -1])[:, None]).sum(axis=1), npl - 1)
    rows = np.arange(shots)
    norm2 = w[rows, pick]
    out = new[pick, :, rows, :] / np.sqrt(norm2)[:, None, None]
    return np.ascontiguousarray(out), pick.astype(np.int64), norm2


def pauli_expectation_table(psi):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    dim = psi.shape[0]
    idx = np.arange(dim)
    v = psi[idx[None, :] ^ idx[:, None]].conj() * psi[None, :]
    w = v @ _hadamard(dim)
    ny = np.array([[bin(x & z).count("1") & 3 for z in range(dim)] for x in range(dim)])
    return np.real(w * (1j ** ny))
