"""Mollified one-dimensional delta identities checked by adaptive quadrature.

A Gaussian mollifier ``exp(-x^2/2 eps^2) / (sqrt(2 pi) eps)`` stands in for
the point mass.  Every check returns the quantities the exact identity
equates, so callers (tests, CLI) can watch the gap close as eps -> 0.  For
smooth test functions the gap of each mollified pairing shrinks like eps^2,
which :func:`convergence_order` measures on a fixed eps grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "EPS_GRID",
    "TRUNCATION_WIDTHS",
    "QUAD_ABS_TOL",
    "DegenerateCompositionError",
    "Mollifier",
    "TestFunction",
    "PolynomialG",
    "ConvolutionProfile",
    "sampling_residual",
    "derivative_pairing",
    "composition_roots",
    "scaling_check",
    "convolution_shift",
    "pv_sinc",
    "dirichlet_delta",
    "convergence_order",
]

# Fixed eps grid for order-of-convergence measurements.
EPS_GRID = (0.2, 0.1, 0.05, 0.025)

# Integration window in mollifier widths; Gaussian tail mass beyond 12
# widths is below 1e-31.
TRUNCATION_WIDTHS = 12.0

QUAD_ABS_TOL = 1e-12


class DegenerateCompositionError(ValueError):
    """Composition delta(g(x)) requested for a g with a multiple root."""


@dataclass(frozen=True)
class Mollifier:
    """Gaussian approximate identity of width ``epsilon``."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("mollifier width must be positive")

    def pdf(self, x):
        e = self.epsilon
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x / e) ** 2) / (math.sqrt(2.0 * math.pi) * e)

    def derivative(self, x, order):
        """Analytic derivative of the mollifier (Hermite factors, order 1 or 2)."""
        e2 = self.epsilon**2
        x = np.asarray(x, dtype=float)
        if order == 1:
            return -(x / e2) * self.pdf(x)
        if order == 2:
            return (x * x / e2 - 1.0) / e2 * self.pdf(x)
        raise ValueError("only derivative orders 1 and 2 are supported")

    def window(self, center=0.0):
        h = TRUNCATION_WIDTHS * self.epsilon
        return center - h, center + h


class TestFunction:
    """Polynomial times an optional Gaussian envelope exp(-x^2 / 2 s^2).

    ``coeffs`` are given highest degree first, matching the CLI grammar
    (``"1,0,-4"`` is x^2 - 4).  Derivatives up to second order are exact.
    """

    def __init__(self, coeffs, envelope=None):
        coeffs = [float(c) for c in np.atleast_1d(coeffs)]
        if not coeffs:
            raise ValueError("empty coefficient list")
        if envelope is not None and not envelope > 0:
            raise ValueError("envelope width must be positive")
        self.coeffs = tuple(coeffs)
        self.envelope = None if envelope is None else float(envelope)
        self._poly = np.polynomial.Polynomial(coeffs[::-1])
        self._dpoly = self._poly.deriv()
        self._ddpoly = self._dpoly.deriv()

    def __repr__(self):
        return f"TestFunction(coeffs={list(self.coeffs)}, envelope={self.envelope})"

    @property
    def is_zero(self):
        return all(c == 0.0 for c in self.coeffs)

    def _env(self, x):
        s2 = self.envelope**2
        return np.exp(-0.5 * x * x / s2)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val = self._poly(x)
        if self.envelope is not None:
            val = val * self._env(x)
        return val if val.ndim else float(val)

    def derivative(self, x, order=1):
        """Exact derivative of given order (1 or 2)."""
        x = np.asarray(x, dtype=float)
        p, dp, ddp = self._poly(x), self._dpoly(x), self._ddpoly(x)
        if self.envelope is None:
            out = {1: dp, 2: ddp}.get(order)
            if out is None:
                raise ValueError("only derivative orders 1 and 2 are supported")
        else:
            s2 = self.envelope**2
            env = self._env(x)
            denv = -(x / s2) * env
            if order == 1:
                out = dp * env + p * denv
            elif order == 2:
                ddenv = (x * x / s2 - 1.0) / s2 * env
                out = ddp * env + 2.0 * dp * denv + p * ddenv
            else:
                raise ValueError("only derivative orders 1 and 2 are supported")
        return out if out.ndim else float(out)


class PolynomialG:
    """Real polynomial g with its real roots, for delta(g(x)) compositions.

    Coefficients highest degree first.  Roots are extracted numerically;
    a root is flagged simple when |g'(root)| > 1e-8.
    """

    SIMPLE_ROOT_MIN_SLOPE = 1e-8

    def __init__(self, coeffs):
        coeffs = [float(c) for c in np.atleast_1d(coeffs)]
        while len(coeffs) > 1 and coeffs[0] == 0.0:
            coeffs = coeffs[1:]
        if len(coeffs) < 2:
            raise ValueError("g must have degree >= 1")
        self.coeffs = tuple(coeffs)
        self._poly = np.polynomial.Polynomial(coeffs[::-1])
        self._dpoly = self._poly.deriv()
        rts = np.polynomial.Polynomial(coeffs[::-1]).roots()
        real = [r.real for r in rts if abs(r.imag) <= 1e-8 * (1.0 + abs(r))]
        self.roots = np.sort(np.asarray(real, dtype=float))
        self.slopes = self._dpoly(self.roots) if self.roots.size else np.array([])

    def __call__(self, x):
        out = self._poly(np.asarray(x, dtype=float))
        return out if out.ndim else float(out)

    def gprime(self, x):
        out = self._dpoly(np.asarray(x, dtype=float))
        return out if out.ndim else float(out)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def all_roots_simple(self):
        return bool(np.all(np.abs(self.slopes) > self.SIMPLE_ROOT_MIN_SLOPE))


def _quad(f, lo, hi, **kw):
    kw.setdefault("epsabs", QUAD_ABS_TOL)
    kw.setdefault("epsrel", 1e-11)
    kw.setdefault("limit", 400)
    val, _ = quad(f, lo, hi, **kw)
    return val


def sampling_residual(f, a, eps):
    """Integral of f against the mollifier centered at ``a``, minus f(a)."""
    moll = Mollifier(eps)
    lo, hi = moll.window(a)
    val = _quad(lambda x: f(x) * moll.pdf(x - a), lo, hi)
    return val - float(f(a))


def derivative_pairing(f, n, eps):
    """Integral of f against the n-th mollifier derivative (n in {1, 2}).

    Converges to (-1)^n f^(n)(0) as eps -> 0.
    """
    if n not in (1, 2):
        raise ValueError("derivative order must be 1 or 2")
    moll = Mollifier(eps)
    lo, hi = moll.window(0.0)
    return _quad(lambda x: f(x) * moll.derivative(x, n), lo, hi)


def composition_roots(g, f, eps):
    """Check delta(g(x)) against the simple-root sum.

    Returns ``(lhs, rhs)`` where lhs integrates f(x) delta_eps(g(x)) and
    rhs is the exact sum of f(root)/|g'(root)| over the real roots of g.
    """
    if not isinstance(g, PolynomialG):
        g = PolynomialG(g)
    if not g.all_roots_simple:
        raise DegenerateCompositionError(
            "degenerate composition: g has a multiple root"
        )
    moll = Mollifier(eps)
    rhs = float(sum(f(r) / abs(s) for r, s in zip(g.roots, g.slopes)))
    if g.roots.size == 0:
        return 0.0, 0.0
    # Window wide enough that |g| > 14 eps at the ends of each root's
    # neighborhood; adaptive panels locate the peaks via `points`.
    min_slope = float(np.min(np.abs(g.slopes)))
    margin = max(1.0, 3.0 * TRUNCATION_WIDTHS * eps / min_slope)
    lo = float(g.roots.min()) - margin
    hi = float(g.roots.max()) + margin
    lhs = _quad(
        lambda x: f(x) * moll.pdf(g(x)),
        lo,
        hi,
        points=list(g.roots),
    )
    return lhs, rhs


def scaling_check(a, f, eps):
    """Check delta(a x) = delta(x)/|a|: returns (quadrature lhs, f(0)/|a|)."""
    if a == 0:
        raise ValueError("scaling factor must be nonzero")
    moll = Mollifier(eps)
    h = TRUNCATION_WIDTHS * eps / abs(a)
    lhs = _quad(lambda x: f(x) * moll.pdf(a * x), -h, h)
    return lhs, float(f(0.0)) / abs(a)


@dataclass(frozen=True)
class ConvolutionProfile:
    """Sampled convolution of two shifted mollifiers and its closed form."""

    grid: np.ndarray
    values: np.ndarray
    expected: np.ndarray
    center: float
    width: float

    @property
    def peak(self):
        return float(self.grid[int(np.argmax(self.values))])

    @property
    def mean(self):
        mass = np.trapezoid(self.values, self.grid)
        return float(np.trapezoid(self.grid * self.values, self.grid) / mass)

    @property
    def measured_width(self):
        mass = np.trapezoid(self.values, self.grid)
        mu = self.mean
        var = np.trapezoid((self.grid - mu) ** 2 * self.values, self.grid) / mass
        return float(math.sqrt(max(var, 0.0)))

    @property
    def max_error(self):
        return float(np.max(np.abs(self.values - self.expected)))

    def pair(self, f):
        """Trapezoid pairing of a test function with the convolved profile."""
        return float(np.trapezoid(f(self.grid) * self.values, self.grid))


def convolution_shift(a, b, eps1, eps2):
    """Convolve delta_eps1(. - a) with delta_eps2(. - b) on a fine grid.

    The result is compared pointwise against the closed form: a Gaussian of
    width sqrt(eps1^2 + eps2^2) centered at a + b.
    """
    m1, m2 = Mollifier(eps1), Mollifier(eps2)
    dx = min(eps1, eps2) / 20.0
    h1 = TRUNCATION_WIDTHS * eps1
    h2 = TRUNCATION_WIDTHS * eps2
    n1 = int(math.ceil(2.0 * h1 / dx)) + 1
    n2 = int(math.ceil(2.0 * h2 / dx)) + 1
    t1 = a - h1 + dx * np.arange(n1)
    t2 = b - h2 + dx * np.arange(n2)
    conv = np.convolve(m1.pdf(t1 - a), m2.pdf(t2 - b)) * dx
    grid = (t1[0] + t2[0]) + dx * np.arange(conv.size)
    width = math.hypot(eps1, eps2)
    center = a + b
    expected = Mollifier(width).pdf(grid - center)
    return ConvolutionProfile(grid, conv, expected, center, width)


def pv_sinc(omega):
    """Principal value of the integral of sin(omega x)/x over the line.

    Symmetry removes the singularity (twice the half-line integral); the
    tail beyond X = 200/|omega| is added from the first two terms of its
    integration-by-parts expansion.  Target pi * sign(omega).
    """
    if omega == 0:
        raise ValueError("omega must be nonzero")
    w = abs(omega)
    x_max = 200.0 / w
    lobe = math.pi / w  # first half-oscillation, regular integrand
    head = _quad(lambda x: w * np.sinc(w * x / math.pi), 0.0, lobe)
    body, _ = quad(
        lambda x: 1.0 / x, lobe, x_max, weight="sin", wvar=w, limit=400
    )
    tail = math.cos(w * x_max) / (w * x_max) + math.sin(w * x_max) / (
        w * x_max
    ) ** 2
    return math.copysign(2.0 * (head + body + tail), omega)


def dirichlet_delta(f, T):
    """Pair f with the truncated Fourier kernel sin(T x)/(pi x).

    Converges to f(0) as T grows.  Needs a Gaussian envelope on f (or the
    zero function) so the integral is absolutely convergent.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if f.is_zero:
        return 0.0
    if f.envelope is None:
        raise ValueError("dirichlet_delta requires a test function with an envelope")
    half = TRUNCATION_WIDTHS * f.envelope
    lobe = min(math.pi / T, half / 4.0)
    mid = _quad(lambda x: f(x) * T * np.sinc(T * x / math.pi) / math.pi, -lobe, lobe)
    wings = 0.0
    for lo, hi in ((lobe, half), (-half, -lobe)):
        part, _ = quad(
            lambda x: f(x) / (math.pi * x),
            lo,
            hi,
            weight="sin",
            wvar=T,
            limit=800,
            epsabs=1e-11,
        )
        wings += part
    return mid + wings


def convergence_order(residual_fn, eps_grid=EPS_GRID):
    """Log-log slope of |residual_fn(eps)| over the eps grid."""
    eps = np.asarray(eps_grid, dtype=float)
    res = np.array([abs(residual_fn(e)) for e in eps])
    if np.any(res == 0.0):
        raise ValueError("residual vanished; order is not measurable")
    slope, _ = np.polyfit(np.log(eps), np.log(res), 1)
    return float(slope)
