"""The numba and numpy backends must agree."""

import numpy as np
import pytest

from cdecode import kernels

pytestmark = pytest.mark.skipif("numba" not in kernels.BACKENDS, reason="numba not installed")


def _case(rng, n, t, mask_frac=0.0):
    em = rng.normal(size=(n, t))
    trans = rng.normal(size=(t + 2, t + 2))
    if mask_frac:
        trans[rng.random(trans.shape) < mask_frac] = -np.inf
        trans[t, 0] = trans[0, 0] = trans[0, t + 1] = 0.0
    return em, trans[:t, :t].copy(), trans[t, :t].copy(), trans[:t, t + 1].copy()


@pytest.mark.parametrize("n,t", [(1, 1), (1, 4), (7, 3), (30, 9), (5, 17)])
def test_viterbi_backends_identical(n, t):
    rng = np.random.default_rng(n * 100 + t)
    for frac in (0.0, 0.5):
        args = _case(rng, n, t, frac)
        p1, s1 = kernels.get_backend("numba").viterbi(*args)
        p2, s2 = kernels.get_backend("numpy").viterbi(*args)
        assert p1.tolist() == p2.tolist()
        assert s1 == s2


def test_viterbi_tie_break_identical():
    em = np.zeros((5, 4))
    args = (em, np.zeros((4, 4)), np.zeros(4), np.zeros(4))
    p1, _ = kernels.get_backend("numba").viterbi(*args)
    p2, _ = kernels.get_backend("numpy").viterbi(*args)
    assert p1.tolist() == p2.tolist() == [0] * 5


@pytest.mark.parametrize("n,t", [(1, 2), (6, 4), (40, 9)])
def test_forward_backward_backends_close(n, t):
    rng = np.random.default_rng(n + t)
    args = _case(rng, n, t)
    a1, z1 = kernels.get_backend("numba").forward(*args)
    a2, z2 = kernels.get_backend("numpy").forward(*args)
    np.testing.assert_allclose(a1, a2, rtol=1e-12, atol=1e-12)
    assert z1 == pytest.approx(z2, rel=1e-13)
    b1 = kernels.get_backend("numba").backward(*args)
    b2 = kernels.get_backend("numpy").backward(*args)
    np.testing.assert_allclose(b1, b2, rtol=1e-12, atol=1e-12)


def test_forward_handles_neg_inf_rows():
    rng = np.random.default_rng(1)
    em, inner, start, end = _case(rng, 3, 3)
    start[:] = -np.inf
    for name in kernels.BACKENDS:
        _, z = kernels.get_backend(name).forward(em, inner, start, end)
        assert z == -np.inf


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")
