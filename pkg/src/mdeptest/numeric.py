"""Scalar numeric kernels and reproducible random streams.

Normal variates are produced by inverting the standard normal CDF on
53-bit uniforms taken from a Philox counter-based generator.  A stream is
identified by an integer key such as ``(seed, domain, index)``; equal keys
give equal sequences and any window of the sequence can be regenerated
without drawing the preceding values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack
from scipy.special import ndtr, ndtri

from .errors import DomainError, NotPositiveDefiniteError

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x):
    """Standard normal CDF.

    Accepts a scalar or an array. Scalars are evaluated through
    ``math.erfc`` which keeps full relative precision in both tails.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if math.isnan(x):
            raise DomainError("normal_cdf of NaN")
        return min(1.0, max(0.0, 0.5 * math.erfc(-x / _SQRT2)))
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any():
        raise DomainError("normal_cdf of NaN")
    return np.clip(ndtr(x), 0.0, 1.0)


def normal_sf(x):
    """Upper tail ``1 - normal_cdf(x)`` without cancellation."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("normal_sf of NaN")
    return min(1.0, max(0.0, 0.5 * math.erfc(x / _SQRT2)))


def normal_quantile(q):
    """Inverse of :func:`normal_cdf` on the open interval (0, 1)."""
    if np.ndim(q) == 0:
        q = float(q)
        if not 0.0 < q < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {q}")
        return float(ndtri(q))
    q = np.asarray(q, dtype=float)
    if not np.all((q > 0.0) & (q < 1.0)):
        raise DomainError("quantile levels must lie in (0, 1)")
    return ndtri(q)


def cholesky(S):
    """Lower Cholesky factor ``L`` with ``L @ L.T == S``.

    Raises
    ------
    NotPositiveDefiniteError
        Carries the 1-based index of the first non-positive leading minor.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {S.shape}")
    scale = max(np.abs(S).max(initial=0.0), np.finfo(float).tiny)
    if np.abs(S - S.T).max(initial=0.0) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric")
    L, info = lapack.dpotrf(S, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(int(info))
    if info < 0:  # pragma: no cover - argument error inside LAPACK
        raise DomainError(f"dpotrf argument {-info} invalid")
    return L


@dataclass(frozen=True)
class RngStream:
    """Key of an independent random stream.

    Parameters
    ----------
    seed : int
        64-bit experiment seed.
    domain : int
        Identifies the purpose of the stream (scenario, data vs mean draws).
    index : int
        Replicate index.
    """

    seed: int
    domain: int = 0
    index: int = 0

    def philox_key(self):
        from numpy.random import SeedSequence

        entropy = [self.seed & (2**64 - 1), self.domain, self.index]
        return SeedSequence(entropy).generate_state(2, dtype=np.uint64)

    def child(self, domain):
        """Stream sharing seed and index but with a different domain."""
        return RngStream(self.seed, domain, self.index)


def _raw_words(stream, count, start):
    bitgen = np.random.Philox(key=stream.philox_key())
    # one counter increment yields four 64-bit words
    block, skip = divmod(start, 4)
    if block:
        bitgen.advance(block)
    return bitgen.random_raw(count + skip)[skip:]


def uniform_draws(stream, count, start=0):
    """``count`` uniforms on the open interval (0, 1), words ``start`` onward."""
    raw = _raw_words(stream, int(count), int(start))
    return ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def gaussian_draws(stream, count, start=0):
    """``count`` iid standard normal variates from ``stream``.

    Draw ``k`` of the stream depends only on the key and ``k``, so
    ``gaussian_draws(s, 10)[5:]`` equals ``gaussian_draws(s, 5, start=5)``.
    """
    return ndtri(uniform_draws(stream, count, start))
