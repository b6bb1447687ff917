"""Dense Hermitian linear algebra: spectral decompositions, functional
calculus, Haar sampling, density states, and majorization utilities.

All functions are pure; matrices are plain complex ndarrays and RNG state is
passed explicitly, so values are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDensity,
    InvalidRank,
    LengthMismatch,
    NonHermitianInput,
    DomainViolation,
)

# Tolerances sized for double-precision eigensolvers at n <= 16.
TOL_HERM = 1e-10
TOL_UNITARY = 1e-10
TOL_RECON = 1e-10
TOL_PSD = 1e-12  # relative to largest eigenvalue
TOL_RANK = 1e-12  # relative to largest eigenvalue
TOL_TRACE = 1e-10
TOL_SUM = 1e-10


def require_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> np.ndarray:
    """Validate Hermitian symmetry and return the symmetrized copy."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise NonHermitianInput("dimension must be >= 1")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    resid = float(np.abs(a - a.conj().T).max())
    if resid > tol * scale:
        raise NonHermitianInput(f"symmetry residual {resid:.3e} exceeds {tol:.1e}")
    return (a + a.conj().T) / 2.0


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A*)/2, no validation."""
    return (a + a.conj().T) / 2.0


def is_unitary(u: np.ndarray, tol: float = TOL_UNITARY) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    resid = u.conj().T @ u - np.eye(u.shape[0])
    return float(np.linalg.norm(resid, 2)) <= tol


def require_unitary(u: np.ndarray, tol: float = TOL_UNITARY) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise DomainViolation("matrix is not unitary within tolerance")
    return u


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix in both orderings.

    diagonalizer_desc columns are eigenvectors such that
    V_desc* A V_desc = diag(eigenvalues_desc), and likewise ascending.
    """

    eigenvalues_desc: np.ndarray
    eigenvalues_asc: np.ndarray
    diagonalizer_desc: np.ndarray
    diagonalizer_asc: np.ndarray


def eig_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> SpectralDecomposition:
    """Full eigendecomposition with descending and ascending orderings."""
    a = require_hermitian(a, tol)
    w, v = np.linalg.eigh(a)
    return SpectralDecomposition(
        eigenvalues_desc=w[::-1].copy(),
        eigenvalues_asc=w.copy(),
        diagonalizer_desc=v[:, ::-1].copy(),
        diagonalizer_asc=v.copy(),
    )


def matrix_function(a: np.ndarray, g, domain: tuple[float, float] | None = None) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix via its spectrum.

    `domain`, when given, is the open interval on which g is defined; any
    eigenvalue outside it raises DomainViolation.  The result depends only on
    spectral projections, so eigenvector choice in degenerate blocks is
    immaterial.
    """
    a = require_hermitian(a)
    w, v = np.linalg.eigh(a)
    if domain is not None:
        lo, hi = domain
        if np.any(w <= lo) or np.any(w >= hi):
            raise DomainViolation(
                f"eigenvalue outside open domain ({lo}, {hi}): range [{w.min():.3e}, {w.max():.3e}]"
            )
    gw = np.asarray(g(w), dtype=float)
    return hermitize((v * gw) @ v.conj().T)


def positive_part(a: np.ndarray) -> np.ndarray:
    """Positive part A+ of a Hermitian matrix (PSD, with A = A+ - A-)."""
    a = require_hermitian(a)
    w, v = np.linalg.eigh(a)
    return hermitize((v * np.maximum(w, 0.0)) @ v.conj().T)


def negative_part(a: np.ndarray) -> np.ndarray:
    """Negative part A- = A+ - A (PSD)."""
    a = require_hermitian(a)
    w, v = np.linalg.eigh(a)
    return hermitize((v * np.maximum(-w, 0.0)) @ v.conj().T)


def matrix_leq(a: np.ndarray, b: np.ndarray, tol: float = TOL_PSD) -> bool:
    """Loewner order test: A <= B iff B - A is PSD (min-eigenvalue test)."""
    a = require_hermitian(a)
    b = require_hermitian(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    w = np.linalg.eigvalsh(b - a)
    scale = max(1.0, float(np.abs(w).max()))
    return bool(w.min() >= -tol * scale)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The triangular factor's diagonal phases are divided out; without that
    correction the QR factor is not Haar.
    """
    if n < 1:
        raise DimensionMismatch("n must be >= 1")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class DensityState:
    """Positive semidefinite, unit-trace Hermitian matrix with rank metadata.

    eigenvalues are sorted ascending; rank counts eigenvalues above
    TOL_RANK relative to the largest one.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    full_rank: bool

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def density_state(
    matrix: np.ndarray,
    tol_psd: float = TOL_PSD,
    tol_trace: float = TOL_TRACE,
    tol_rank: float = TOL_RANK,
) -> DensityState:
    """Validate and wrap a matrix as a DensityState."""
    m = require_hermitian(matrix)
    w = np.linalg.eigvalsh(m)
    top = max(float(w.max()), 0.0)
    if w.min() < -tol_psd * max(top, 1.0):
        raise InvalidDensity(f"negative eigenvalue {w.min():.3e}")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > tol_trace:
        raise InvalidDensity(f"trace {tr!r} differs from 1 beyond {tol_trace:.1e}")
    rank = int(np.count_nonzero(w > tol_rank * max(top, 1.0)))
    return DensityState(matrix=m, eigenvalues=w.copy(), rank=rank, full_rank=rank == m.shape[0])


def random_density(n: int, rank: int, rng: np.random.Generator) -> DensityState:
    """Random density matrix of the requested rank (Wishart-style)."""
    if not (1 <= rank <= n):
        raise InvalidRank(f"rank {rank} outside [1, {n}]")
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return density_state(m)


def trace_product_bounds(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float]:
    """(lower, Tr(AB), upper) with lower = <lam_desc(A), lam_asc(B)> and
    upper = <lam_desc(A), lam_desc(B)>."""
    a = require_hermitian(a)
    b = require_hermitian(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    wa = np.sort(np.linalg.eigvalsh(a))[::-1]
    wb = np.sort(np.linalg.eigvalsh(b))
    value = float(np.trace(a @ b).real)
    lower = float(wa @ wb)
    upper = float(wa @ wb[::-1])
    return lower, value, upper


def _sorted_desc(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise LengthMismatch("expected 1-d vectors")
    return np.sort(x)[::-1]


def is_weakly_majorized(x, y, tol: float = TOL_SUM) -> bool:
    """Prefix sums of the descending rearrangement of x never exceed y's."""
    xd, yd = _sorted_desc(x), _sorted_desc(y)
    if xd.shape != yd.shape:
        raise LengthMismatch(f"lengths {len(xd)} vs {len(yd)}")
    return bool(np.all(np.cumsum(xd) <= np.cumsum(yd) + tol))


def is_majorized(x, y, tol: float = TOL_SUM) -> bool:
    """Weak majorization plus equal totals."""
    xd, yd = _sorted_desc(x), _sorted_desc(y)
    if xd.shape != yd.shape:
        raise LengthMismatch(f"lengths {len(xd)} vs {len(yd)}")
    if abs(xd.sum() - yd.sum()) > tol:
        return False
    return is_weakly_majorized(xd, yd, tol)
