# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR kernel.

One tight loop, no numpy C-API: typed memoryviews only, so the extension
builds with nothing but a C compiler.  latflow.backend falls back to the
numpy implementation when this module is absent.
"""


def csr_matvec(double[::1] data, long long[::1] indices,
               long long[::1] indptr, double[::1] x, double[::1] out):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1
    cdef double acc
    with nogil:
        for i in range(n_rows):
            acc = 0.0
            for j in range(indptr[i], indptr[i + 1]):
                acc += data[j] * x[indices[j]]
            out[i] = acc
