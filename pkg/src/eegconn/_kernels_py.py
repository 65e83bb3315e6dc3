"""NumPy fallback for the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def pli_counts(c, s, tie_tol, out):
    """Accumulate signed sign counts into the upper triangle of ``out``."""
    c = np.asarray(c, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if c.shape != s.shape:
        raise ValueError("cos and sin arrays must have the same shape")
    n_ch = c.shape[0]
    if out.shape != (n_ch, n_ch):
        raise ValueError("output must be n_channels x n_channels")
    for i in range(n_ch - 1):
        d = s[i] * c[i + 1:] - c[i] * s[i + 1:]
        out[i, i + 1:] += (
            np.count_nonzero(d > tie_tol, axis=1) - np.count_nonzero(d < -tie_tol, axis=1)
        )
