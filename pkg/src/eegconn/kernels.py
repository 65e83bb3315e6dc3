"""Kernel backend selection.

The compiled extension ``eegconn._kernels`` is used when importable. Set
``EEGCONN_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import os

import numpy as np

from . import _kernels_py

_impl = _kernels_py
BACKEND = "python"
if not os.environ.get("EEGCONN_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

# |sin(dphi)| at or below this is a tie (sgn = 0). Scaled copies of one
# signal differ in phase only by round-off, which must not count as a lag.
TIE_TOL = 1e-9


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python' or None=active)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def phase_sync(phasors, tie_tol=TIE_TOL, backend=None):
    """Epoch-averaged PLV and PLI matrices from unit phasors.

    ``phasors`` is complex (n_epochs, n_channels, n_samples) with unit
    modulus. Returns two symmetric (n_channels, n_channels) arrays; the PLV
    diagonal is 1 and the PLI diagonal 0.
    """
    impl = get_backend(backend)
    z = np.asarray(phasors, dtype=np.complex128)
    if z.ndim != 3:
        raise ValueError(f"phasors must be 3-D, got shape {z.shape}")
    n_ep, n_ch, m = z.shape
    plv = np.zeros((n_ch, n_ch))
    pli = np.zeros((n_ch, n_ch))
    counts = np.zeros((n_ch, n_ch), dtype=np.int64)
    for e in range(n_ep):
        ze = z[e]
        plv += np.abs(ze @ ze.conj().T) / m
        counts[:] = 0
        impl.pli_counts(
            np.ascontiguousarray(ze.real), np.ascontiguousarray(ze.imag), tie_tol, counts
        )
        pli += np.abs(counts) / m
    plv /= n_ep
    pli /= n_ep
    iu = np.triu_indices(n_ch, 1)
    out_plv = np.eye(n_ch)
    out_plv[iu] = plv[iu]
    out_plv.T[iu] = plv[iu]
    out_pli = np.zeros((n_ch, n_ch))
    out_pli[iu] = pli[iu]
    out_pli.T[iu] = pli[iu]
    np.clip(out_plv, 0.0, 1.0, out=out_plv)
    return out_plv, out_pli
