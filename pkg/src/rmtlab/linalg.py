"""Dense complex/real matrix kernels shared by every other module.

Conventions fixed here and relied upon everywhere else:

* vectorization is column-stacking (``vec``/``unvec``),
* Hermitian/symmetric coordinate bases are orthonormal under
  ``<A, B> = Re tr(A^* B)``, ordered diagonal-first then lexicographic
  ``(j, k)`` with the real part before the imaginary part,
* eigenvalues are sorted in descending order.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "HERMITIAN_RTOL",
    "vec",
    "unvec",
    "kron",
    "vandermonde",
    "is_hermitian",
    "require_hermitian",
    "hermitize",
    "eig_sorted",
    "coordinate_basis",
    "coordinate_dim",
    "matrix_to_coordinates",
    "coordinates_to_matrix",
    "realify",
]

# Hermitian deviation allowed relative to the largest entry magnitude.
HERMITIAN_RTOL = 1e-12

_KINDS = ("symmetric", "hermitian")


def vec(x):
    """Column-stacked vectorization of a matrix."""
    return np.asarray(x).flatten(order="F")


def unvec(v, rows, cols):
    """Inverse of :func:`vec` for the given shape."""
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot reshape {v.size} entries to {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def kron(a, b):
    """Kronecker product; block (i, j) is ``a[i, j] * b``."""
    return np.kron(np.asarray(a), np.asarray(b))


def vandermonde(lam):
    """Product of (lam_i - lam_j) over pairs i < j; empty product is 1."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = 1.0
    for i in range(lam.size):
        for j in range(i + 1, lam.size):
            out *= lam[i] - lam[j]
    return float(out)


def _max_abs(x):
    return float(np.abs(x).max()) if x.size else 0.0


def is_hermitian(x, rtol=HERMITIAN_RTOL):
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        return False
    dev = _max_abs(x - x.conj().T)
    return dev <= rtol * max(1.0, _max_abs(x))


def require_hermitian(x, rtol=HERMITIAN_RTOL, name="matrix"):
    """Return ``x`` as a complex ndarray, raising if not Hermitian within tolerance."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be square, got shape {x.shape}")
    dev = _max_abs(x - x.conj().T)
    if dev > rtol * max(1.0, _max_abs(x)):
        raise ValueError(f"{name} is not Hermitian (deviation {dev:.3e})")
    return x


def hermitize(x):
    """Exact Hermitian part (x + x^*)/2."""
    x = np.asarray(x, dtype=complex)
    return 0.5 * (x + x.conj().T)


def eig_sorted(x, vectors=False):
    """Eigenvalues of a Hermitian matrix in descending order.

    The input is validated against the Hermitian tolerance and symmetrized
    before decomposition.  With ``vectors=True`` also returns the matching
    eigenvector columns.
    """
    x = require_hermitian(x)
    h = hermitize(x)
    if vectors:
        w, v = np.linalg.eigh(h)
        return w[::-1].copy(), v[:, ::-1].copy()
    return np.linalg.eigvalsh(h)[::-1].copy()


def coordinate_dim(kind, m):
    """Number of real coordinates of the symmetric/Hermitian space."""
    if kind == "symmetric":
        return m * (m + 1) // 2
    if kind == "hermitian":
        return m * m
    raise ValueError(f"unknown kind {kind!r}, expected one of {_KINDS}")


def coordinate_basis(kind, m):
    """Orthonormal basis of the real m x m symmetric or Hermitian matrices.

    Orthonormal under ``<A, B> = Re tr(A^* B)``.  Order: the m diagonal
    units E_jj, then for each pair j < k (lexicographic) the symmetrized
    unit (E_jk + E_kj)/sqrt(2) followed, for the Hermitian kind, by
    i(E_jk - E_kj)/sqrt(2).
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}, expected one of {_KINDS}")
    if m < 1:
        raise ValueError("m must be >= 1")
    basis = []
    for j in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for j in range(m):
        for k in range(j + 1, m):
            e = np.zeros((m, m), dtype=complex)
            e[j, k] = inv_sqrt2
            e[k, j] = inv_sqrt2
            basis.append(e)
            if kind == "hermitian":
                e = np.zeros((m, m), dtype=complex)
                e[j, k] = 1j * inv_sqrt2
                e[k, j] = -1j * inv_sqrt2
                basis.append(e)
    return basis


def matrix_to_coordinates(x, kind):
    """Real coordinate vector of ``x`` in the fixed orthonormal basis."""
    x = np.asarray(x, dtype=complex)
    m = x.shape[0]
    basis = coordinate_basis(kind, m)
    return np.array([np.trace(b.conj().T @ x).real for b in basis])


def coordinates_to_matrix(coords, kind, m):
    """Matrix with the given coordinates; Hermitian (or real symmetric) exactly."""
    coords = np.asarray(coords, dtype=float)
    if coords.size != coordinate_dim(kind, m):
        raise ValueError(
            f"expected {coordinate_dim(kind, m)} coordinates for {kind} m={m}, "
            f"got {coords.size}"
        )
    out = np.zeros((m, m), dtype=complex)
    for c, b in zip(coords, coordinate_basis(kind, m)):
        out += c * b
    if kind == "symmetric":
        return out.real
    return out


def realify(a):
    """Real 2n x 2n block matrix [[Re a, -Im a], [Im a, Re a]] of a complex matrix."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])
