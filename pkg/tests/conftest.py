import numpy as np
import pytest

from mdeptest.numeric import RngStream, cholesky
from mdeptest.simgen import FactorModelSpec, generate_batch


def small_spec(p, m, M, seed=0, mu=None):
    """Random factor model with a dense innovation covariance."""
    rng = np.random.default_rng(seed)
    mixing = [rng.standard_normal((p, m)) / (h + 1) for h in range(M + 1)]
    B = rng.standard_normal((m, m))
    L = cholesky(B @ B.T / m + np.eye(m))
    return FactorModelSpec(tuple(mixing), L, mu)


def batches(spec, n, total, seed, chunk=20_000):
    """Yield stacked samples, ``total`` replicates in chunks."""
    done = 0
    k = 0
    while done < total:
        size = min(chunk, total - done)
        yield generate_batch(spec, n, size, RngStream(seed, 77, k))
        done += size
        k += 1


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
