"""Samplers and unnormalized log-densities for complex matrix ensembles.

Conventions: standard complex Gaussian entries have E|z|^2 = 1 (real and
imaginary parts of variance 1/2 each); a covariance Sigma enters a Wishart
draw through its unique Hermitian PSD square root; densities are always
unnormalized and logarithmic.

Randomness flows through :class:`RngStream`, a counter-based keyed stream:
the same (seed, stream) always reproduces the same draws, and distinct
stream ids are independent, so batch work can be split across workers with
disjoint substreams and reduced in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eig_sorted, require_hermitian

__all__ = [
    "DEFAULT_SEED",
    "RngStream",
    "Ginibre",
    "Wishart",
    "Induced",
    "SumWishart",
    "HaarUnitary",
    "sample",
    "sample_batch",
    "sample_ginibre",
    "sample_haar_unitary",
    "sample_wishart",
    "sample_induced_state",
    "sample_sum_wishart",
    "logdensity_wishart_matrix",
    "logdensity_eigs",
]

DEFAULT_SEED = 0xD1AC

_MASK64 = (1 << 64) - 1

# Positive-definiteness floor for covariance matrices.
_PD_MIN_EIG = 1e-10


@dataclass
class RngStream:
    """Reproducible keyed random stream (counter-based Philox).

    Identical (seed, stream) pairs yield identical sequences on every
    platform; distinct stream ids are statistically independent.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.generator = np.random.Generator(self._bitgen)

    def clone(self):
        """Fresh stream at the start of the same (seed, stream) path."""
        return RngStream(self.seed, self.stream)

    def substream(self, i):
        """Independent derived stream; use disjoint ``i`` per worker."""
        return RngStream(self.seed, self.stream ^ (0x9E3779B97F4A7C15 * (i + 1)))

    def chunk_generator(self, i):
        """Generator for reduction chunk ``i`` (fixed order, jump-derived)."""
        return np.random.Generator(self._bitgen.jumped(i + 1))


def _as_stream(rng):
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError("rng must be an RngStream or an integer seed")


def _check_covariance(sigma, m):
    sigma = require_hermitian(sigma, name="Sigma")
    if sigma.shape[0] != m:
        raise ValueError(f"Sigma must be {m}x{m}, got {sigma.shape}")
    w = np.linalg.eigvalsh(0.5 * (sigma + sigma.conj().T))
    if w.min() <= _PD_MIN_EIG:
        raise ValueError("Sigma must be positive definite")
    return sigma


def _sqrtm_psd(sigma):
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# ----------------------------------------------------------------------
# Ensemble descriptions
# ----------------------------------------------------------------------

@dataclass
class Ginibre:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")


@dataclass
class Wishart:
    m: int
    n: int
    sigma: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 1 or self.n < self.m:
            raise ValueError("requires 1 <= m <= n")
        if self.sigma is not None:
            self.sigma = _check_covariance(self.sigma, self.m)


@dataclass
class Induced:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < self.m:
            raise ValueError("requires 1 <= m <= n")


@dataclass
class SumWishart:
    """Sum of independent Wishart draws sharing the matrix size m."""

    m: int
    components: tuple = ()  # sequence of (n_i, sigma_i or None)

    def __post_init__(self):
        if not self.components:
            raise ValueError("at least one component required")
        comps = []
        for n_i, sigma_i in self.components:
            if n_i < self.m:
                raise ValueError("each component needs n_i >= m")
            if sigma_i is not None:
                sigma_i = _check_covariance(sigma_i, self.m)
            comps.append((int(n_i), sigma_i))
        self.components = tuple(comps)


@dataclass
class HaarUnitary:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")


# ----------------------------------------------------------------------
# Samplers
# ----------------------------------------------------------------------

def sample_ginibre(m, n, rng):
    """m x n matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1)."""
    gen = _as_stream(rng).generator
    re = gen.normal(size=(m, n))
    im = gen.normal(size=(m, n))
    return (re + 1j * im) / np.sqrt(2.0)


def sample_haar_unitary(m, rng):
    """Haar-distributed m x m unitary.

    QR of a Ginibre draw with the diagonal phases of R divided out, the
    standard correction that makes the law exactly Haar.
    """
    z = sample_ginibre(m, m, rng)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def sample_wishart(m, n, rng, sigma=None):
    """Wishart draw W = Sigma^{1/2} Z Z^* Sigma^{1/2} with Z Ginibre(m, n)."""
    spec = Wishart(m, n, sigma)
    z = sample_ginibre(m, n, rng)
    w = z @ z.conj().T
    if spec.sigma is not None:
        root = _sqrtm_psd(spec.sigma)
        w = root @ w @ root
    return 0.5 * (w + w.conj().T)


def sample_induced_state(m, n, rng):
    """Trace-one reduced state rho = X X^* / tr(X X^*) from a Ginibre X."""
    spec = Induced(m, n)
    x = sample_ginibre(spec.m, spec.n, rng)
    rho = x @ x.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def sample_sum_wishart(m, components, rng):
    """Sum of independent Wishart draws with shared m.

    Components are drawn sequentially from the same stream, so a
    single-component spec follows the exact seed path of
    :func:`sample_wishart`.
    """
    spec = SumWishart(m, tuple(components))
    rng = _as_stream(rng)
    total = np.zeros((m, m), dtype=complex)
    for n_i, sigma_i in spec.components:
        total += sample_wishart(m, n_i, rng, sigma_i)
    return 0.5 * (total + total.conj().T)


def sample(spec, rng):
    """Draw once from an ensemble description."""
    rng = _as_stream(rng)
    if isinstance(spec, Ginibre):
        return sample_ginibre(spec.m, spec.n, rng)
    if isinstance(spec, Wishart):
        return sample_wishart(spec.m, spec.n, rng, spec.sigma)
    if isinstance(spec, Induced):
        return sample_induced_state(spec.m, spec.n, rng)
    if isinstance(spec, SumWishart):
        return sample_sum_wishart(spec.m, spec.components, rng)
    if isinstance(spec, HaarUnitary):
        return sample_haar_unitary(spec.m, rng)
    raise TypeError(f"unknown ensemble spec {type(spec).__name__}")


def sample_batch(spec, count, rng):
    """Stack of ``count`` consecutive draws from one stream."""
    rng = _as_stream(rng)
    return np.stack([sample(spec, rng) for _ in range(count)])


# ----------------------------------------------------------------------
# Unnormalized log-densities
# ----------------------------------------------------------------------

def logdensity_wishart_matrix(w, n, sigma=None):
    """Unnormalized log-density (n - m) logdet W - tr(Sigma^{-1} W).

    Also covers the equal-covariance sum of Wishart draws with
    n = n_1 + ... + n_k.
    """
    w = require_hermitian(w, name="W")
    m = w.shape[0]
    if n < m:
        raise ValueError("requires n >= m")
    eigs = np.linalg.eigvalsh(0.5 * (w + w.conj().T))
    if eigs.min() <= 0:
        raise ValueError("W must be positive definite")
    if sigma is None:
        tr = float(np.trace(w).real)
    else:
        sigma = _check_covariance(sigma, m)
        tr = float(np.trace(np.linalg.solve(sigma, w)).real)
    return float((n - m) * np.sum(np.log(eigs)) - tr)


def logdensity_eigs(lam, kind, n, m):
    """Unnormalized joint log-density of eigenvalues.

    kind "wishart": sum (n-m) log l_j - sum l_j + 2 sum_{i<j} log|l_i - l_j|.
    kind "induced": the same without the linear term, restricted to the
    probability simplex.  Coincident eigenvalues give -inf (repulsion
    boundary), not an error.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.size != m:
        raise ValueError(f"expected {m} eigenvalues, got {lam.size}")
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if kind == "induced":
        if abs(lam.sum() - 1.0) > 1e-10:
            raise ValueError("induced eigenvalues must lie on the unit simplex")
    elif kind != "wishart":
        raise ValueError(f"unknown kind {kind!r}")
    if n < m:
        raise ValueError("requires n >= m")
    out = float((n - m) * np.sum(np.log(lam)))
    if kind == "wishart":
        out -= float(lam.sum())
    for i in range(m):
        for j in range(i + 1, m):
            gap = abs(lam[i] - lam[j])
            if gap == 0.0:
                return float("-inf")
            out += 2.0 * np.log(gap)
    return out


def sorted_eigenvalues(w):
    """Descending eigenvalues of a Hermitian draw (thin wrapper)."""
    return eig_sorted(w)
