"""Matrix-argument special functions: multivariate gamma, the unitary
group exponential integral (Harish-Chandra / Itzykson-Zuber), and the
confluent hypergeometric function of Hermitian matrix argument.

The hypergeometric function is evaluated from its Euler-type integral over
the matrix interval 0 < X < 1 by rejection Monte Carlo: proposals are drawn
uniformly from the entrywise box (diagonal in [0, 1], off-diagonal real and
imaginary parts in [-1, 1], which contains the interval), and kept when all
eigenvalues lie in (0, 1).  Lebesgue measure on the independent entries is
exactly the flat matrix measure of that integral, so the acceptance-masked
box mean is unbiased.  Identity checks reuse one proposal stream on both
sides (common random numbers) to suppress the variance of the residual.

All Monte Carlo loops accumulate fixed-size chunks drawn from jump-derived
substreams in chunk order, so results are reproducible for a given
(seed, chunk size) no matter how the chunks are executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ensembles import RngStream
from .linalg import require_hermitian, vandermonde

__all__ = [
    "MCEstimate",
    "IdentityCheck",
    "DegenerateSpectrumError",
    "RejectionStarvedError",
    "gamma_p",
    "log_gamma_p",
    "hciz_closed_form",
    "hciz_monte_carlo",
    "matrix_1f1",
    "kummer_residual",
    "sum_wishart_symmetry_residual",
]

# Minimum pairwise spectral gap for the determinantal closed form.
MIN_SPECTRAL_GAP = 1e-8

# Abort threshold for the box-rejection sampler.
MIN_ACCEPT_RATE = 1e-4

DEFAULT_CHUNK = 32768


class DegenerateSpectrumError(ValueError):
    """Closed form requested for a spectrum with a repeated eigenvalue."""


class RejectionStarvedError(RuntimeError):
    """Box-rejection acceptance rate fell below the usable floor."""


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate: sample mean, standard error, sample count."""

    value: float
    stderr: float
    n_samples: int

    def agrees_with(self, reference, k=3.0):
        """True when ``reference`` lies within k standard errors."""
        return abs(self.value - reference) <= k * self.stderr


@dataclass(frozen=True)
class IdentityCheck:
    """Two Monte Carlo sides of an identity and their relative gap."""

    lhs: MCEstimate
    rhs: MCEstimate

    @property
    def scale(self):
        return max(abs(self.lhs.value), abs(self.rhs.value), 1e-300)

    @property
    def residual(self):
        """Relative difference of the two sides."""
        return abs(self.lhs.value - self.rhs.value) / self.scale

    @property
    def combined_stderr(self):
        """Relative combined standard error of the two sides."""
        return math.hypot(self.lhs.stderr, self.rhs.stderr) / self.scale

    def passed(self, k=3.0):
        return self.residual <= k * self.combined_stderr or self.residual == 0.0

    def __float__(self):
        return self.residual


def log_gamma_p(a, p):
    """Log multivariate gamma: p(p-1)/2 log pi + sum_j log Gamma(a - j)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not a - p + 1 > 0:
        raise ValueError(f"gamma_p pole: requires a > p - 1, got a={a}, p={p}")
    return 0.5 * p * (p - 1) * math.log(math.pi) + float(
        sum(gammaln(a - j) for j in range(p))
    )


def gamma_p(a, p):
    """Multivariate gamma function (positive arguments)."""
    return math.exp(log_gamma_p(a, p))


def _validate_simple(v, name):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.size > 1:
        gaps = np.abs(v[:, None] - v[None, :])[np.triu_indices(v.size, 1)]
        if gaps.min() <= MIN_SPECTRAL_GAP:
            raise DegenerateSpectrumError(
                f"degenerate spectrum: {name} has a pairwise gap <= {MIN_SPECTRAL_GAP}"
            )
    return v


def hciz_closed_form(a, b):
    """Unitary average of exp(tr(A U B U^*)) for simple spectra a, b.

    Determinantal formula: prod_{j<=m} Gamma(j) * det[exp(a_i b_j)]
    divided by the two Vandermonde products.  Rows are rescaled before the
    determinant to avoid overflow.
    """
    a = _validate_simple(a, "a")
    b = _validate_simple(b, "b")
    if a.size != b.size:
        raise ValueError("spectra must have equal length")
    m = a.size
    outer = np.outer(a, b)
    row_shift = outer.max(axis=1)
    mat = np.exp(outer - row_shift[:, None])
    sign, logdet = np.linalg.slogdet(mat)
    if sign == 0:
        raise DegenerateSpectrumError("determinant vanished; spectrum too close")
    log_pref = float(sum(gammaln(j) for j in range(1, m + 1)))
    log_mag = log_pref + logdet + row_shift.sum()
    denom = vandermonde(a) * vandermonde(b)
    return sign * math.exp(log_mag) / denom


def _accumulate(chunks_iter):
    """Fixed-order mean/stderr accumulation over value chunks.

    Values are shifted by the first sample before squaring so constant
    integrands report zero variance instead of cancellation noise.
    """
    total = 0.0
    total_sq = 0.0
    count = 0
    shift = None
    for vals in chunks_iter:
        if shift is None and vals.size:
            shift = float(vals[0])
        centered = vals - shift
        total += float(centered.sum())
        total_sq += float(np.square(centered).sum())
        count += vals.size
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    stderr = math.sqrt(var / max(count - 1, 1))
    return shift + mean, stderr, count


def _chunk_sizes(n_samples, chunk):
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    sizes = [chunk] * (n_samples // chunk)
    if n_samples % chunk:
        sizes.append(n_samples % chunk)
    return sizes


def hciz_monte_carlo(a_mat, b_mat, n_samples, rng, chunk=DEFAULT_CHUNK):
    """Haar Monte Carlo of the unitary exponential integral.

    Averages exp(tr(A U B U^*)) over Haar unitaries drawn by batched QR
    with phase correction.
    """
    a_mat = require_hermitian(a_mat, name="A")
    b_mat = require_hermitian(b_mat, name="B")
    if a_mat.shape != b_mat.shape:
        raise ValueError("A and B must have the same shape")
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    m = a_mat.shape[0]
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    def chunks():
        for i, size in enumerate(_chunk_sizes(n_samples, chunk)):
            gen = rng.chunk_generator(i)
            z = (
                gen.normal(size=(size, m, m)) + 1j * gen.normal(size=(size, m, m))
            ) * inv_sqrt2
            q, r = np.linalg.qr(z)
            d = np.einsum("sii->si", r).copy()
            d[d == 0] = 1.0
            u = q * (d / np.abs(d))[:, None, :]
            tr = np.einsum(
                "ij,sjk,kl,sil->s", a_mat, u, b_mat, u.conj(), optimize=True
            ).real
            yield np.exp(tr)

    mean, stderr, count = _accumulate(chunks())
    return MCEstimate(mean, stderr, count)


# ----------------------------------------------------------------------
# Box-rejection machinery for integrals over 0 < X < 1
# ----------------------------------------------------------------------

def _box_proposals(p, size, gen):
    """Uniform entrywise box proposals containing the matrix interval.

    The draw order (diagonal, off-diagonal real, off-diagonal imaginary) is
    fixed so identity checks can replay one stream on both sides.
    """
    n_off = p * (p - 1) // 2
    diag = gen.uniform(0.0, 1.0, size=(size, p))
    re = gen.uniform(-1.0, 1.0, size=(size, n_off))
    im = gen.uniform(-1.0, 1.0, size=(size, n_off))
    x = np.zeros((size, p, p), dtype=complex)
    idx = np.arange(p)
    x[:, idx, idx] = diag
    k = 0
    for i in range(p):
        for j in range(i + 1, p):
            z = re[:, k] + 1j * im[:, k]
            x[:, i, j] = z
            x[:, j, i] = z.conj()
            k += 1
    return x


def _box_volume(p):
    return 2.0 ** (p * (p - 1))


def _box_mc(p, n_samples, rng, chunk, integrand):
    """Rejection MC of integrand(eigs, X) over the matrix interval.

    ``integrand`` maps (accepted eigenvalue rows, accepted proposals) to log
    values; rejected proposals contribute zero.
    """
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    accepted = 0
    seen = 0

    def chunks():
        nonlocal accepted, seen
        for i, size in enumerate(_chunk_sizes(n_samples, chunk)):
            gen = rng.chunk_generator(i)
            x = _box_proposals(p, size, gen)
            w = np.linalg.eigvalsh(x)
            ok = (w[:, 0] > 0.0) & (w[:, -1] < 1.0)
            vals = np.zeros(size)
            if ok.any():
                vals[ok] = np.exp(integrand(w[ok], x[ok]))
            accepted += int(ok.sum())
            seen += size
            yield vals

    mean, stderr, count = _accumulate(chunks())
    if accepted / seen < MIN_ACCEPT_RATE:
        raise RejectionStarvedError(
            f"rejection starved: acceptance rate {accepted / seen:.2e}"
        )
    vol = _box_volume(p)
    return MCEstimate(vol * mean, vol * stderr, count), accepted / seen


def matrix_1f1(a, c, lam, n_samples, rng, chunk=DEFAULT_CHUNK):
    """Confluent hypergeometric 1F1(a; c; -Lambda) of Hermitian argument.

    Euler-integral rejection Monte Carlo with the multivariate beta
    prefactor Gamma_p(c) / (Gamma_p(a) Gamma_p(c - a)).  Requires
    a > p - 1 and c - a > p - 1 (integrable endpoint powers) and p <= 3
    (acceptance collapses beyond that).
    """
    lam = require_hermitian(lam, name="Lambda")
    p = lam.shape[0]
    if p > 3:
        raise ValueError("p <= 3 required (box rejection becomes starved)")
    if not (a > p - 1 and c - a > p - 1):
        raise ValueError(
            f"requires a > p - 1 and c - a > p - 1, got a={a}, c={c}, p={p}"
        )
    log_pref = log_gamma_p(c, p) - log_gamma_p(a, p) - log_gamma_p(c - a, p)

    def integrand(w, x):
        tr = np.einsum("ij,sji->s", lam, x, optimize=True).real
        return (
            (a - p) * np.log(w).sum(axis=1)
            + (c - a - p) * np.log1p(-w).sum(axis=1)
            - tr
        )

    est, _rate = _box_mc(p, n_samples, rng, chunk, integrand)
    scale = math.exp(log_pref)
    return MCEstimate(est.value * scale, est.stderr * scale, est.n_samples)


def kummer_residual(a, c, lam, n_samples, rng, chunk=DEFAULT_CHUNK):
    """Check 1F1(a; c; -Lambda) = exp(-tr Lambda) 1F1(c-a; c; Lambda).

    Both sides run :func:`matrix_1f1` on a replayed proposal stream
    (common random numbers); returns the relative-residual record.
    """
    lam = require_hermitian(lam, name="Lambda")
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    lhs = matrix_1f1(a, c, lam, n_samples, rng.clone(), chunk)
    raw = matrix_1f1(c - a, c, -lam, n_samples, rng.clone(), chunk)
    damp = math.exp(-float(np.trace(lam).real))
    rhs = MCEstimate(raw.value * damp, raw.stderr * damp, raw.n_samples)
    return IdentityCheck(lhs, rhs)


def sum_wishart_symmetry_residual(
    w, sigma_a, sigma_b, n_a, n_b, n_samples, rng, chunk=DEFAULT_CHUNK
):
    """Two-route identity satisfied by the density of a two-Wishart sum.

    With Lambda = sqrt(W)(Sigma_A^{-1} - Sigma_B^{-1})sqrt(W),

        exp(-tr(W Sigma_B^{-1})) * I(n_A, n_B, -Lambda)
            = exp(-tr(W Sigma_A^{-1})) * I(n_B, n_A, +Lambda),

    where I(r, s, L) integrates det(X)^{r-m} det(1-X)^{s-m} exp(tr(L X))
    over the matrix interval 0 < X < 1.  The substitution X -> 1 - X maps
    one side onto the other (equivalently, this is the Kummer relation for
    the underlying Euler integral), so the equality is exact and free of
    normalization constants.  Both sides are evaluated by box rejection on
    a replayed proposal stream (common random numbers).
    """
    w = require_hermitian(w, name="W")
    m = w.shape[0]
    if n_a < m or n_b < m:
        raise ValueError("requires n_a >= m and n_b >= m")
    eigs_w, vecs_w = np.linalg.eigh(0.5 * (w + w.conj().T))
    if eigs_w.min() <= 0:
        raise ValueError("W must be positive definite")
    sig_a = require_hermitian(sigma_a, name="Sigma_A")
    sig_b = require_hermitian(sigma_b, name="Sigma_B")
    inv_a = np.linalg.inv(sig_a)
    inv_b = np.linalg.inv(sig_b)
    sqw = (vecs_w * np.sqrt(eigs_w)) @ vecs_w.conj().T
    lam = sqw @ (inv_a - inv_b) @ sqw
    lam = 0.5 * (lam + lam.conj().T)
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))

    def side(pow_x, pow_1mx, lam_signed, log_scale, stream):
        def integrand(eigs, x):
            tr = np.einsum("ij,sji->s", lam_signed, x, optimize=True).real
            return (
                pow_x * np.log(eigs).sum(axis=1)
                + pow_1mx * np.log1p(-eigs).sum(axis=1)
                - tr
            )

        est, _ = _box_mc(m, n_samples, stream, chunk, integrand)
        scale = math.exp(log_scale)
        return MCEstimate(est.value * scale, est.stderr * scale, est.n_samples)

    lhs = side(
        n_a - m, n_b - m, lam, -float(np.trace(w @ inv_b).real), rng.clone()
    )
    rhs = side(
        n_b - m, n_a - m, -lam, -float(np.trace(w @ inv_a).real), rng.clone()
    )
    return IdentityCheck(lhs, rhs)
