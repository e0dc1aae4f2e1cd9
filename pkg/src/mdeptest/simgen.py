"""Moving-average factor-model generator with exact autocovariances.

``X_t = mu + sum_{h=0}^{M} A_h eps_{t-h}`` with ``eps_t ~ N(0, Sigma)``
iid in ``R^m``.  The lag-h autocovariance is
``Gamma(h) = sum_{k=0}^{M-h} A_k Sigma A_{k+h}'`` and vanishes beyond M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ConfigError, DimensionError
from .numeric import cholesky, gaussian_draws, uniform_draws

VARIANTS = ("reciprocal-h", "linear-h")
MEAN_SCENARIOS = ("null", "power1", "power2", "two-sample-1", "two-sample-2")


@dataclass(frozen=True, eq=False)
class FactorModelSpec:
    """True process for simulation and oracle computations.

    Parameters
    ----------
    mixing : tuple of ndarray
        ``A_0 .. A_M``, each p x m.
    innovation_chol : ndarray
        Lower Cholesky factor of the m x m innovation covariance.
    mu : ndarray, optional
        Mean vector; zero when omitted.
    """

    mixing: tuple
    innovation_chol: np.ndarray
    mu: np.ndarray | None = None

    def __post_init__(self):
        mixing = tuple(np.asarray(A, dtype=float) for A in self.mixing)
        if not mixing:
            raise ConfigError("at least one mixing matrix is required")
        shape = mixing[0].shape
        if any(A.shape != shape for A in mixing):
            raise ConfigError("mixing matrices must share one shape")
        L = np.asarray(self.innovation_chol, dtype=float)
        if L.shape != (shape[1], shape[1]):
            raise ConfigError(f"innovation factor has shape {L.shape}, expected {(shape[1],) * 2}")
        if np.any(np.triu(L, 1)):
            raise ConfigError("innovation factor must be lower triangular")
        object.__setattr__(self, "mixing", mixing)
        object.__setattr__(self, "innovation_chol", L)
        if self.mu is not None:
            mu = np.asarray(self.mu, dtype=float)
            if mu.shape != (shape[0],):
                raise ConfigError(f"mean has shape {mu.shape}, expected ({shape[0]},)")
            object.__setattr__(self, "mu", mu)

    @property
    def p(self):
        return self.mixing[0].shape[0]

    @property
    def m(self):
        return self.mixing[0].shape[1]

    @property
    def M(self):
        return len(self.mixing) - 1

    @cached_property
    def loadings(self):
        """``A_h L`` so that ``A_h eps = (A_h L) z`` with z standard normal."""
        return tuple(A @ self.innovation_chol for A in self.mixing)

    def with_mean(self, mu):
        spec = FactorModelSpec(self.mixing, self.innovation_chol, mu)
        spec.__dict__["loadings"] = self.loadings
        return spec

    def gamma0_is_pd(self):
        try:
            cholesky(autocov_matrix(self, 0))
        except Exception:
            return False
        return True


@dataclass(frozen=True)
class ModelCatalogEntry:
    name: str
    M: int
    ratio: int
    phi1: float
    phi2: float
    w: float
    mixing_variant: str
    mixing_w: float


# (p/n, phi1, phi2, w) per model; Models III and IV use the linear-in-h
# mixing variant whose band is |i - j| <= p.
CATALOG = {
    "I": ModelCatalogEntry("I", 0, 4, 0.2, 0.3, 0.9, "reciprocal-h", 0.9),
    "II": ModelCatalogEntry("II", 1, 1, 0.6, 0.4, 0.8, "reciprocal-h", 0.8),
    "III": ModelCatalogEntry("III", 2, 2, 0.6, 0.6, 0.8, "linear-h", 1.0),
    "IV": ModelCatalogEntry("IV", 3, 3, 0.6, 0.3, 0.8, "linear-h", 1.0),
}

# two-sample design: (w, phi1, phi2) per group, p = 4n
TWO_SAMPLE_GROUPS = ((0.9, 0.2, 0.3), (0.5, 0.4, 0.5))
TWO_SAMPLE_RATIO = 4


def default_factor_dim(p):
    return math.ceil(1.2 * p)


def build_mixing(p, m, M, phi1, w, variant="reciprocal-h"):
    """Banded mixing matrices ``A_0 .. A_M``.

    ``A_h[i, j] = c(h) * phi1 / max(1, |i - j|^2)`` inside the band
    ``|i - j| <= p * w`` and zero outside, with ``c(h) = 1/(h+1)`` for the
    reciprocal variant and ``c(h) = h + 1`` for the linear variant.
    """
    if not 0 < w <= 1:
        raise ConfigError(f"band fraction w must lie in (0, 1], got {w}")
    if m <= p:
        raise ConfigError(f"factor dimension m={m} must exceed p={p}")
    if variant not in VARIANTS:
        raise ConfigError(f"unknown mixing variant {variant!r}")
    dist = np.abs(np.arange(p)[:, None] - np.arange(m)[None, :])
    base = np.where(dist <= p * w, phi1 / np.maximum(1, dist) ** 2, 0.0)
    if variant == "reciprocal-h":
        scales = [1.0 / (h + 1) for h in range(M + 1)]
    else:
        scales = [float(h + 1) for h in range(M + 1)]
    return tuple(c * base for c in scales)


@lru_cache(maxsize=32)
def _innovation_cached(m, p, phi2, w):
    return _innovation(m, p, phi2, w, np.ones(m))


def _innovation(m, p, phi2, w, sigma):
    dist = np.abs(np.arange(m)[:, None] - np.arange(m)[None, :])
    scale = np.sqrt(np.outer(sigma, sigma))
    band = (dist > 0) & (dist <= p * w)
    S = np.where(band, scale * phi2 / np.maximum(dist, 1) ** 2, 0.0)
    S[np.diag_indices(m)] = sigma
    L = cholesky(S)
    S.setflags(write=False)
    L.setflags(write=False)
    return S, L


def innovation_covariance(m, p, phi2, w, sigma=None):
    """Banded innovation covariance and its Cholesky factor.

    ``Sigma[i, i] = sigma_i`` and ``Sigma[i, j] = sqrt(sigma_i sigma_j) phi2 / |i-j|^2``
    for ``0 < |i - j| <= p * w``.  ``sigma`` defaults to all ones.
    """
    if not 0 < w <= 1:
        raise ConfigError(f"band fraction w must lie in (0, 1], got {w}")
    if sigma is None:
        return _innovation_cached(int(m), int(p), float(phi2), float(w))
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (m,) or np.any(sigma <= 0):
        raise ConfigError("sigma must be a positive vector of length m")
    return _innovation(m, p, phi2, w, sigma)


def make_spec(p, M, phi1, phi2, w, variant="reciprocal-h", mixing_w=None, m=None, sigma=None):
    m = default_factor_dim(p) if m is None else m
    mixing = build_mixing(p, m, M, phi1, w if mixing_w is None else mixing_w, variant)
    _, L = innovation_covariance(m, p, phi2, w, sigma)
    return FactorModelSpec(mixing, L)


@lru_cache(maxsize=64)
def model_spec(name, n, m=None):
    """Factor model for catalog model ``name`` at sample size ``n``."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(CATALOG)}")
    p = entry.ratio * n
    return make_spec(
        p, entry.M, entry.phi1, entry.phi2, entry.w, entry.mixing_variant, entry.mixing_w, m
    )


@lru_cache(maxsize=64)
def two_sample_specs(M, n, m=None):
    """The two group processes of the two-sample design at order M, size n."""
    p = TWO_SAMPLE_RATIO * n
    return tuple(make_spec(p, M, phi1, phi2, w, m=m) for w, phi1, phi2 in TWO_SAMPLE_GROUPS)


def autocov_matrix(spec, h):
    """Exact ``Gamma(h)``; negative lags give the transpose."""
    if h < 0:
        return autocov_matrix(spec, -h).T
    if h > spec.M:
        raise DimensionError(f"lag {h} exceeds model order M={spec.M}")
    K = spec.loadings
    return sum(K[k] @ K[k + h].T for k in range(spec.M - h + 1))


def true_autocov(spec, h):
    """``(Gamma(h), tr Gamma(h))`` for ``0 <= h <= M``."""
    if not 0 <= h <= spec.M:
        raise DimensionError(f"lag {h} outside 0..{spec.M}")
    G = autocov_matrix(spec, h)
    return G, float(np.trace(G))


def tr_product(spec_a, a, b, spec_b=None):
    """``tr(Gamma_a(a) Gamma_b(b))``; zero when a lag exceeds its model order."""
    spec_b = spec_a if spec_b is None else spec_b
    if abs(a) > spec_a.M or abs(b) > spec_b.M:
        return 0.0
    Ga = autocov_matrix(spec_a, a)
    Gb = autocov_matrix(spec_b, b)
    return float(np.sum(Ga * Gb.T))


def omega(spec, n, M=None):
    """``Omega_n = sum_{|h| <= M} (1 - |h|/n) Gamma(h)``."""
    M = spec.M if M is None else min(M, spec.M)
    G0 = autocov_matrix(spec, 0)
    out = G0.copy()
    for h in range(1, M + 1):
        Gh = autocov_matrix(spec, h)
        out += (1.0 - h / n) * (Gh + Gh.T)
    return out


def tr_omega(spec, n):
    return float(np.trace(omega(spec, n)))


def tr_omega_sq(spec, n):
    W = omega(spec, n)
    return float(np.sum(W * W.T))


def generate(spec, n, stream):
    """Draw an exactly stationary sample of length ``n``.

    M extra innovations precede ``t = 1`` so that every row has the
    stationary distribution.
    """
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    M, m = spec.M, spec.m
    z = gaussian_draws(stream, (n + M) * m).reshape(n + M, m)
    return _mix(spec, z, n)


def _mix(spec, z, n):
    M = spec.M
    K = spec.loadings
    X = z[M : M + n] @ K[0].T
    for h in range(1, M + 1):
        X += z[M - h : M - h + n] @ K[h].T
    if spec.mu is not None:
        X += spec.mu
    return X


def generate_batch(spec, n, R, stream):
    """``R`` independent samples stacked as an array of shape (R, n, p)."""
    M, m = spec.M, spec.m
    z = gaussian_draws(stream, R * (n + M) * m).reshape(R, n + M, m)
    K = spec.loadings
    X = z[:, M : M + n] @ K[0].T
    for h in range(1, M + 1):
        X += z[:, M - h : M - h + n] @ K[h].T
    if spec.mu is not None:
        X += spec.mu
    return X


def sample_mean_scenario(scenario, p, stream):
    """Mean vector (or mean difference) for one replicate.

    ``power1``: ``p^{-1/2} U(2, 3)``; ``power2``: ``p^{-1/4} U(2, 3)``;
    ``two-sample-1``: ``p^{-1/2} U(1, 2)``; ``two-sample-2``: ``p^{-1/4} U(1, 2)``.
    """
    if scenario == "null":
        return np.zeros(p)
    try:
        low, power = {
            "power1": (2.0, 0.5),
            "power2": (2.0, 0.25),
            "two-sample-1": (1.0, 0.5),
            "two-sample-2": (1.0, 0.25),
        }[scenario]
    except KeyError:
        raise ConfigError(f"unknown mean scenario {scenario!r}; choose from {MEAN_SCENARIOS}")
    u = uniform_draws(stream, p)
    return (low + u) / p**power
