# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pairwise phase-lag kernel.

Counts, for every channel pair i < j, the signed number of samples where
sin(phi_i - phi_j) is positive minus those where it is negative. The sine
of the difference is expanded as s_i*c_j - c_i*s_j so the inner loop is
branch-free and vectorises.
"""


def pli_counts(const double[:, ::1] c, const double[:, ::1] s, double tie_tol,
               long long[:, ::1] out):
    """Accumulate signed sign counts into the upper triangle of ``out``."""
    cdef Py_ssize_t n_ch = c.shape[0], m = c.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double d
    cdef long long cnt
    cdef const double *ci
    cdef const double *si
    cdef const double *cj
    cdef const double *sj
    if s.shape[0] != n_ch or s.shape[1] != m:
        raise ValueError("cos and sin arrays must have the same shape")
    if out.shape[0] != n_ch or out.shape[1] != n_ch:
        raise ValueError("output must be n_channels x n_channels")
    if m == 0:
        return
    with nogil:
        for i in range(n_ch):
            ci = &c[i, 0]
            si = &s[i, 0]
            for j in range(i + 1, n_ch):
                cj = &c[j, 0]
                sj = &s[j, 0]
                cnt = 0
                for k in range(m):
                    d = si[k] * cj[k] - ci[k] * sj[k]
                    cnt = cnt + (d > tie_tol) - (d < -tie_tol)
                out[i, j] += cnt
