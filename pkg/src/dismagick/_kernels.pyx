# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Qubit 0 is the most significant bit of the basis index, so the bit masks
used here coincide with the masks of :class:`dismagick.pauli_clifford.PauliString`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(unsigned long long v) nogil:
    return __builtin_popcountll(v)


cdef inline void _fwht(double* w, Py_ssize_t dim) nogil:
    cdef Py_ssize_t h = 1, i, j
    cdef double a, b
    while h < dim:
        i = 0
        while i < dim:
            for j in range(i, i + h):
                a = w[j]
                b = w[j + h]
                w[j] = a + b
                w[j + h] = a - b
            i += 2 * h
        h *= 2


def pauli_moment4(cnp.ndarray[cplx, ndim=1] psi not None):
    """Return sum over all Pauli strings P of |<psi|P|psi>|^4.

    For each X mask the products conj(psi[b ^ x]) psi[b] are Walsh-Hadamard
    transformed over b, which yields <X^x Z^z> for every Z mask at once.
    The expectation is real for even |x & z| and imaginary otherwise, so only
    one of the two transformed components contributes per z.
    """
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t x, b, c
    cdef double total = 0.0, a2
    cdef cnp.ndarray[double, ndim=1] re_arr = np.ascontiguousarray(psi.real)
    cdef cnp.ndarray[double, ndim=1] im_arr = np.ascontiguousarray(psi.imag)
    cdef cnp.ndarray[double, ndim=1] wr_arr = np.empty(dim)
    cdef cnp.ndarray[double, ndim=1] wi_arr = np.empty(dim)
    cdef double* pr = <double*> re_arr.data
    cdef double* pi = <double*> im_arr.data
    cdef double* wr = <double*> wr_arr.data
    cdef double* wi = <double*> wi_arr.data
    with nogil:
        for x in range(dim):
            for b in range(dim):
                c = b ^ x
                wr[b] = pr[c] * pr[b] + pi[c] * pi[b]
                wi[b] = pr[c] * pi[b] - pi[c] * pr[b]
            _fwht(wr, dim)
            _fwht(wi, dim)
            for b in range(dim):
                if _popcount(<unsigned long long>(b & x)) & 1:
                    a2 = wi[b] * wi[b]
                else:
                    a2 = wr[b] * wr[b]
                total += a2 * a2
    return total


def pauli_expectation(cnp.ndarray[cplx, ndim=1] psi not None,
                      unsigned long long x_mask, unsigned long long z_mask):
    """<psi| i^{|x&z|} X^x Z^z |psi> (the Hermitian Pauli with Y letters)."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t b
    cdef cplx acc = 0
    cdef cplx[::1] p = np.ascontiguousarray(psi)
    with nogil:
        for b in range(dim):
            if _popcount(b & z_mask) & 1:
                acc -= p[b ^ x_mask].conjugate() * p[b]
            else:
                acc += p[b ^ x_mask].conjugate() * p[b]
    cdef int ny = _popcount(x_mask & z_mask) & 3
    if ny == 1:
        acc = acc * 1j
    elif ny == 2:
        acc = -acc
    elif ny == 3:
        acc = acc * (-1j)
    return acc


def apply_two_qubit_inplace(cnp.ndarray[cplx, ndim=1] psi not None,
                            cnp.ndarray[cplx, ndim=2] gate not None,
                            int n, int qi, int qj):
    """Apply a 4x4 gate to qubits (qi, qj) of ``psi`` in place; qi is the high index."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef unsigned long long bi = 1ULL << (n - 1 - qi)
    cdef unsigned long long bj = 1ULL << (n - 1 - qj)
    cdef Py_ssize_t b, r
    cdef Py_ssize_t idx[4]
    cdef cplx amp[4]
    cdef cplx g[16]
    cdef cplx acc
    cdef int c
    cdef cplx[::1] p = psi
    for r in range(4):
        for c in range(4):
            g[4 * r + c] = gate[r, c]
    with nogil:
        for b in range(dim):
            if (b & bi) or (b & bj):
                continue
            idx[0] = b
            idx[1] = b | bj
            idx[2] = b | bi
            idx[3] = b | bi | bj
            for r in range(4):
                amp[r] = p[idx[r]]
            for r in range(4):
                acc = 0
                for c in range(4):
                    acc = acc + g[4 * r + c] * amp[c]
                p[idx[r]] = acc
    return psi


def pauli_sample_site(cnp.ndarray[cplx, ndim=3] env not None,
                      cnp.ndarray[cplx, ndim=3] a not None,
                      cnp.ndarray[cnp.int64_t, ndim=1] xs not None,
                      cnp.ndarray[cnp.int64_t, ndim=1] zs not None,
                      cnp.ndarray[cnp.float64_t, ndim=1] u not None):
    """One site of sequential Pauli sampling for every shot.

    ``env`` is ``(shots, chi_a, chi_a)`` with (bra, ket) bond order, ``a`` the
    right-canonical site tensor ``(chi_a, d, chi_c)``, ``xs``/``zs`` the letter
    masks and ``u`` uniform draws.  Returns ``(new_env, pick, norm2)`` with the
    chosen environment normalized to unit Frobenius norm.
    """
    cdef Py_ssize_t shots = env.shape[0], ca = a.shape[0], d = a.shape[1], cc = a.shape[2]
    cdef Py_ssize_t npl = xs.shape[0]
    cdef cnp.ndarray[cplx, ndim=3] out = np.empty((shots, cc, cc), dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pick = np.empty(shots, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] norm2 = np.empty(shots)
    cdef cplx[:, :, ::1] E = np.ascontiguousarray(env)
    # A2 rows a, columns (t, j); AH rows (s, i), columns a
    cdef cplx[:, ::1] A2 = np.ascontiguousarray(a).reshape(ca, d * cc)
    cdef cplx[:, ::1] AH = np.ascontiguousarray(a.conj().transpose(1, 2, 0)).reshape(d * cc, ca)
    cdef cplx[:, :, ::1] O = out
    cdef cplx[:, ::1] X = np.empty((ca, d * cc), dtype=np.complex128)
    # G[(s, i), (t, j)] = (A_s^dag E A_t)[i, j]
    cdef cplx[:, ::1] G = np.empty((d * cc, d * cc), dtype=np.complex128)
    cdef cplx[::1] V = np.empty(d, dtype=np.complex128)
    cdef double[:, ::1] WT = np.empty((d, d))
    cdef double[::1] W = np.empty(npl)
    cdef cnp.int64_t[::1] XM = xs
    cdef cnp.int64_t[::1] ZM = zs
    cdef double[::1] U = u
    cdef cnp.int64_t[::1] PK = pick
    cdef double[::1] N2 = norm2
    cdef Py_ssize_t n, s, t, i, j, k, p, x, z, h, q
    cdef cplx acc, ph, va, vb
    cdef cplx one = 1.0, zero = 0.0
    cdef double tot, cum, scale, target
    cdef int m_a = <int> ca, m_w = <int> (d * cc)
    cdef char nn = b"N"
    with nogil:
        for n in range(shots):
            # row-major C = A @ B is column-major C^T = B^T @ A^T
            zgemm(&nn, &nn, &m_w, &m_a, &m_a, &one, &A2[0, 0], &m_w, &E[n, 0, 0], &m_a,
                  &zero, &X[0, 0], &m_w)
            zgemm(&nn, &nn, &m_w, &m_w, &m_a, &one, &X[0, 0], &m_w, &AH[0, 0], &m_a,
                  &zero, &G[0, 0], &m_w)
            # weights: the i^{|x&z|} factor is a global phase, so for fixed x the
            # sum over t with signs (-1)^{t.z} is a Walsh-Hadamard transform
            for x in range(d):
                for z in range(d):
                    WT[x, z] = 0.0
                for i in range(cc):
                    for j in range(cc):
                        for t in range(d):
                            V[t] = G[(t ^ x) * cc + i, t * cc + j]
                        h = 1
                        while h < d:
                            q = 0
                            while q < d:
                                for t in range(q, q + h):
                                    va = V[t]
                                    vb = V[t + h]
                                    V[t] = va + vb
                                    V[t + h] = va - vb
                                q += 2 * h
                            h *= 2
                        for z in range(d):
                            WT[x, z] += V[z].real * V[z].real + V[z].imag * V[z].imag
            tot = 0.0
            for p in range(npl):
                W[p] = WT[XM[p], ZM[p]]
                tot += W[p]
            target = U[n] * tot
            cum = 0.0
            k = npl - 1
            for p in range(npl):
                cum += W[p]
                if cum > target and W[p] > 0.0:
                    k = p
                    break
            PK[n] = k
            N2[n] = W[k]
            scale = 1.0 / sqrt(W[k])
            x = XM[k]
            z = ZM[k]
            ph = 1.0
            q = _popcount(x & z) & 3
            if q == 1:
                ph = 1j
            elif q == 2:
                ph = -1.0
            elif q == 3:
                ph = -1j
            for i in range(cc):
                for j in range(cc):
                    O[n, i, j] = 0
            for t in range(d):
                va = -ph if (_popcount(t & z) & 1) else ph
                for i in range(cc):
                    for j in range(cc):
                        O[n, i, j] = O[n, i, j] + va * G[(t ^ x) * cc + i, t * cc + j]
            for i in range(cc):
                for j in range(cc):
                    O[n, i, j] = O[n, i, j] * scale
    return out, pick, norm2


def pauli_expectation_table(cnp.ndarray[cplx, ndim=1] psi not None):
    """Real table ``T[x, z] = <psi| i^{|x&z|} X^x Z^z |psi>`` over all masks."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t x, b, c
    cdef cnp.ndarray[double, ndim=2] table = np.empty((dim, dim))
    cdef cnp.ndarray[double, ndim=1] re_arr = np.ascontiguousarray(psi.real)
    cdef cnp.ndarray[double, ndim=1] im_arr = np.ascontiguousarray(psi.imag)
    cdef cnp.ndarray[double, ndim=1] wr_arr = np.empty(dim)
    cdef cnp.ndarray[double, ndim=1] wi_arr = np.empty(dim)
    cdef double* pr = <double*> re_arr.data
    cdef double* pi = <double*> im_arr.data
    cdef double* wr = <double*> wr_arr.data
    cdef double* wi = <double*> wi_arr.data
    cdef double* out = <double*> table.data
    cdef int k
    with nogil:
        for x in range(dim):
            for b in range(dim):
                c = b ^ x
                wr[b] = pr[c] * pr[b] + pi[c] * pi[b]
                wi[b] = pr[c] * pi[b] - pi[c] * pr[b]
            _fwht(wr, dim)
            _fwht(wi, dim)
            for b in range(dim):
                k = _popcount(<unsigned long long>(b & x)) & 3
                if k == 0:
                    out[x * dim + b] = wr[b]
                elif k == 1:
                    out[x * dim + b] = -wi[b]
                elif k == 2:
                    out[x * dim + b] = -wr[b]
                else:
                    out[x * dim + b] = wi[b]
    return table
