"""Statistical harness wiring samplers to their closed-form references.

One-sample Kolmogorov-Smirnov tests against quadrature CDFs, trace-moment
reports, exact 1-D marginals of the small-m joint eigenvalue densities, and
named end-to-end verification suites with deterministic seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid, quad
from scipy.special import kolmogorov

from . import ensembles
from .ensembles import DEFAULT_SEED, RngStream

__all__ = [
    "KSResult",
    "Histogram",
    "Marginal1D",
    "ks_test",
    "marginal_from_joint_m2",
    "moment_report",
    "MomentRow",
    "verify_suite",
    "SUITES",
]

ALPHA = 0.01

KS_MIN_SAMPLES = 100


@dataclass(frozen=True)
class KSResult:
    """One-sample KS statistic with its asymptotic p-value."""

    statistic: float
    p_value: float
    n: int

    def passed(self, alpha=ALPHA):
        return self.p_value > alpha


def ks_test(samples, cdf):
    """Two-sided one-sample KS test against a reference CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < KS_MIN_SAMPLES:
        raise ValueError(f"KS test needs at least {KS_MIN_SAMPLES} samples, got {n}")
    f = np.asarray(cdf(x), dtype=float)
    up = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    d = max(float(np.max(up - f)), float(np.max(f - lo)))
    return KSResult(d, float(kolmogorov(math.sqrt(n) * d)), n)


@dataclass(frozen=True)
class Histogram:
    """Simple counted histogram; density view integrates to one."""

    edges: np.ndarray
    counts: np.ndarray
    total: int

    @classmethod
    def from_samples(cls, samples, bins=50, data_range=None):
        counts, edges = np.histogram(samples, bins=bins, range=data_range)
        return cls(edges, counts, int(counts.sum()))

    @property
    def density(self):
        widths = np.diff(self.edges)
        return self.counts / (self.total * widths)

    def rows(self):
        """(lo, hi, count, density) rows for CSV emission."""
        dens = self.density
        return [
            (self.edges[i], self.edges[i + 1], int(self.counts[i]), float(dens[i]))
            for i in range(self.counts.size)
        ]


@dataclass(frozen=True)
class Marginal1D:
    """Normalized 1-D density; exact pdf, dense-grid interpolated CDF."""

    grid: np.ndarray
    cdf_values: np.ndarray
    norm: float
    unnorm: object  # callable, unnormalized scalar density

    @property
    def support(self):
        return float(self.grid[0]), float(self.grid[-1])

    def pdf(self, t):
        if np.ndim(t) == 0:
            return self.unnorm(float(t)) / self.norm
        return np.array([self.unnorm(float(v)) for v in np.asarray(t)]) / self.norm

    def cdf(self, t):
        return np.interp(t, self.grid, self.cdf_values, left=0.0, right=1.0)

    def moment(self, fn):
        """Quadrature expectation of fn(t) under the density."""
        lo, hi = self.support
        val, _ = quad(
            lambda t: fn(t) * self.pdf(t), lo, hi, limit=400, epsabs=1e-12
        )
        return val


def _normalized_marginal(unnorm, lo, hi, grid_points=20001):
    norm, _ = quad(unnorm, lo, hi, limit=400, epsabs=1e-12, epsrel=1e-12)
    grid = np.linspace(lo, hi, grid_points)
    vals = np.array([unnorm(t) for t in grid]) / norm
    cdf = cumulative_trapezoid(vals, grid, initial=0.0)
    cdf /= cdf[-1]
    return Marginal1D(grid, cdf, norm, unnorm)


def marginal_from_joint_m2(kind, n):
    """Largest-eigenvalue marginal of the m = 2 joint eigenvalue density.

    "induced": on the simplex lam = (t, 1-t) the joint density collapses to
    (t(1-t))^(n-2) (2t-1)^2 on t in [1/2, 1).
    "wishart": the joint (l1 l2)^(n-2) exp(-l1-l2) (l1-l2)^2 on l1 > l2 > 0
    is reduced by inner quadrature; the domain is truncated at
    T = n + 10 sqrt(n), whose tail mass is below 1e-10.
    """
    if kind == "induced":
        if n < 2:
            raise ValueError("induced marginal needs n >= 2")

        def unnorm(t):
            if t <= 0.5 or t >= 1.0:
                return 0.0
            return (t * (1.0 - t)) ** (n - 2) * (2.0 * t - 1.0) ** 2

        return _normalized_marginal(unnorm, 0.5, 1.0)

    if kind == "wishart":
        if n < 2:
            raise ValueError("wishart m=2 marginal needs n >= 2")
        t_max = n + 10.0 * math.sqrt(n)

        def unnorm(t):
            if t <= 0.0:
                return 0.0

            def joint(s):
                return (t * s) ** (n - 2) * math.exp(-t - s) * (t - s) ** 2

            val, _ = quad(joint, 0.0, t, limit=200, epsabs=1e-14)
            return val

        return _normalized_marginal(unnorm, 0.0, t_max, grid_points=2001)

    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class MomentRow:
    power: int
    value: float
    stderr: float
    n_samples: int


def moment_report(matrices, powers):
    """Monte Carlo estimates of E[tr W^k] for each requested power."""
    stack = np.asarray(matrices)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise ValueError("need a nonempty stack of square matrices")
    eigs = np.linalg.eigvalsh(stack)
    rows = []
    for k in powers:
        traces = np.sum(eigs ** float(k), axis=1)
        mean = float(traces.mean())
        stderr = float(traces.std(ddof=1) / math.sqrt(traces.size))
        rows.append(MomentRow(int(k), mean, stderr, traces.size))
    return rows


# ----------------------------------------------------------------------
# Named verification suites
# ----------------------------------------------------------------------

def _suite_wishart_m1(n_samples, seed, n=3):
    rng = RngStream(seed)
    draws = np.array(
        [ensembles.sample_wishart(1, n, rng)[0, 0].real for _ in range(n_samples)]
    )
    ks = ks_test(draws, stats.gamma(a=n).cdf)
    return {
        "statistic": ks.statistic,
        "p_value": ks.p_value,
        "pass": ks.passed(),
        "n": n,
        "references": ["scalar Gram matrix of n complex Gaussians follows Gamma(n, 1)"],
    }


def _suite_induced_m2(n_samples, seed, n=2):
    rng = RngStream(seed)
    draws = np.stack(
        [ensembles.sample_induced_state(2, n, rng) for _ in range(n_samples)]
    )
    eigs = np.linalg.eigvalsh(draws)
    lam_max = eigs[:, -1]
    marg = marginal_from_joint_m2("induced", n)
    ks = ks_test(lam_max, marg.cdf)
    purity = np.sum(eigs**2, axis=1)
    purity_mean = float(purity.mean())
    purity_stderr = float(purity.std(ddof=1) / math.sqrt(purity.size))
    purity_ref = marg.moment(lambda t: t * t + (1.0 - t) ** 2)
    purity_ok = abs(purity_mean - purity_ref) <= 3.0 * purity_stderr
    return {
        "statistic": ks.statistic,
        "p_value": ks.p_value,
        "pass": bool(ks.passed() and purity_ok),
        "n": n,
        "purity_mean": purity_mean,
        "purity_stderr": purity_stderr,
        "purity_reference": purity_ref,
        "references": [
            "eigenvalue density of trace-normalized Gram matrices "
            "(Zyczkowski-Sommers induced measure)"
        ],
    }


def _suite_sum_equivalence(n_samples, seed, m=2, n=2, k=2):
    rng_sum = RngStream(seed, stream=0)
    rng_ref = RngStream(seed, stream=1)
    comps = tuple((n, None) for _ in range(k))
    sums = np.stack(
        [ensembles.sample_sum_wishart(m, comps, rng_sum) for _ in range(n_samples)]
    )
    refs = np.stack(
        [ensembles.sample_wishart(m, k * n, rng_ref) for _ in range(n_samples)]
    )
    eig_sum = np.sort(np.linalg.eigvalsh(sums), axis=1)
    eig_ref = np.sort(np.linalg.eigvalsh(refs), axis=1)
    per_eig = []
    for j in range(m):
        stat, p = stats.ks_2samp(eig_sum[:, j], eig_ref[:, j])
        per_eig.append({"component": j, "statistic": float(stat), "p_value": float(p)})
    worst = min(per_eig, key=lambda r: r["p_value"])
    return {
        "statistic": worst["statistic"],
        "p_value": worst["p_value"],
        "pass": all(r["p_value"] > ALPHA for r in per_eig),
        "m": m,
        "n": n,
        "k": k,
        "per_eigenvalue": per_eig,
        "references": [
            "sum of k same-covariance Wishart matrices equals Wishart with k-fold n"
        ],
    }


def _suite_haar(n_samples, seed, m=3):
    rng = RngStream(seed, stream=0)
    rng_rot = RngStream(seed, stream=1)
    v = ensembles.sample_haar_unitary(m, RngStream(seed, stream=2))
    top = np.array(
        [
            abs(ensembles.sample_haar_unitary(m, rng)[0, 0]) ** 2
            for _ in range(n_samples)
        ]
    )
    rotated = np.array(
        [
            abs((v @ ensembles.sample_haar_unitary(m, rng_rot))[0, 0]) ** 2
            for _ in range(n_samples)
        ]
    )
    mean = float(top.mean())
    stderr = float(top.std(ddof=1) / math.sqrt(top.size))
    mean_ok = abs(mean - 1.0 / m) <= 3.0 * stderr
    stat, p = stats.ks_2samp(top, rotated)
    return {
        "statistic": float(stat),
        "p_value": float(p),
        "pass": bool(mean_ok and p > ALPHA),
        "m": m,
        "entry_mean": mean,
        "entry_stderr": stderr,
        "entry_reference": 1.0 / m,
        "references": ["Haar columns are uniform on the unit sphere: E|U_11|^2 = 1/m"],
    }


SUITES = {
    "wishart-m1": _suite_wishart_m1,
    "induced-m2": _suite_induced_m2,
    "sum-equivalence": _suite_sum_equivalence,
    "haar": _suite_haar,
}

_SUITE_DEFAULT_SAMPLES = {
    "wishart-m1": 100_000,
    "induced-m2": 10_000,
    "sum-equivalence": 10_000,
    "haar": 20_000,
}


def verify_suite(name, n_samples=None, seed=None, **params):
    """Run a named end-to-end check and return its JSON-ready verdict."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    seed = DEFAULT_SEED if seed is None else int(seed)
    n_samples = (
        _SUITE_DEFAULT_SAMPLES[name] if n_samples is None else int(n_samples)
    )
    result = SUITES[name](n_samples, seed, **params)
    verdict = {"suite": name, "seed": seed, "n_samples": n_samples}
    verdict.update(result)
    return verdict
