import numpy as np
import pytest

from admui import using_backend
from admui._kernels import BACKENDS


def ipf(r, ty, tz, iters=20_000, tol=1e-15):
    """Classical iterative proportional fitting: alternate exact row and column rescaling."""
    q = np.array(r, dtype=float)
    q[ty == 0, :] = 0.0
    q[:, tz == 0] = 0.0
    for _ in range(iters):
        rs = q.sum(axis=1)
        q = q * np.divide(ty, rs, out=np.zeros_like(ty), where=rs > 0)[:, None]
        cs = q.sum(axis=0)
        q = q * np.divide(tz, cs, out=np.zeros_like(tz), where=cs > 0)[None, :]
        if np.abs(q.sum(axis=1) - ty).sum() < tol:
            break
    return q / q.sum()


def random_joint(rng, shape):
    e = rng.standard_exponential(shape)
    return e / e.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    with using_backend(request.param):
        yield request.param
