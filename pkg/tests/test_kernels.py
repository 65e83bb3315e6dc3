import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eegconn import kernels
from eegconn.connectivity import pli, plv

try:
    from eegconn import _kernels  # noqa: F401
    HAVE_EXT = True
except ImportError:
    HAVE_EXT = False

needs_ext = pytest.mark.skipif(not HAVE_EXT, reason="compiled extension not built")


def random_phasors(g, n_ep, n_ch, m):
    return np.exp(1j * g.uniform(-np.pi, np.pi, (n_ep, n_ch, m)))


def oracle(z, tie_tol=kernels.TIE_TOL):
    n_ep, n_ch, _ = z.shape
    pv = np.eye(n_ch)
    pl = np.zeros((n_ch, n_ch))
    for i in range(n_ch):
        for j in range(i + 1, n_ch):
            a = [plv(np.angle(z[e, i]), np.angle(z[e, j])) for e in range(n_ep)]
            b = [pli(np.angle(z[e, i]), np.angle(z[e, j]), tie_tol) for e in range(n_ep)]
            pv[i, j] = pv[j, i] = np.mean(a)
            pl[i, j] = pl[j, i] = np.mean(b)
    return pv, pl


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_ext)])
def test_phase_sync_matches_pairwise(backend):
    z = random_phasors(np.random.default_rng(0), 3, 5, 257)
    pv, pl = kernels.phase_sync(z, backend=backend)
    opv, opl = oracle(z)
    np.testing.assert_allclose(pv, opv, atol=1e-12)
    np.testing.assert_allclose(pl, opl, atol=1e-12)


@needs_ext
@given(seed=st.integers(0, 2**31 - 1), n_ch=st.integers(1, 9), m=st.integers(1, 300),
       ties=st.booleans())
def test_backends_agree_exactly(seed, n_ch, m, ties):
    g = np.random.default_rng(seed)
    z = random_phasors(g, 2, n_ch, m)
    if ties and n_ch > 1:
        z[:, 1] = z[:, 0]
    a = kernels.phase_sync(z, backend="python")
    b = kernels.phase_sync(z, backend="cython")
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_identical_rows_tie():
    z = random_phasors(np.random.default_rng(1), 1, 1, 100)
    z = np.concatenate([z, z * (1 + 1e-15)], axis=1)
    z /= np.abs(z)
    _, pl = kernels.phase_sync(z)
    assert pl[0, 1] == 0.0


def test_bad_shape():
    with pytest.raises(ValueError):
        kernels.phase_sync(np.ones((3, 3)))
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
