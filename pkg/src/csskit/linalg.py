"""Dense complex matrix arithmetic and the spectral primitives.

Everything in this artifact is a square operator on a tensor product of
small subsystems. Subsystem 0 is the leftmost tensor factor; the composite
row index is row-major, ``i = i0*(d1*d2*...) + i1*(d2*...) + ...``, which is
exactly the convention of ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .config import ATOL, HERM_TOL
from .errors import DimensionMismatch, NoConvergence, NotHermitian, ShapeMismatch

__all__ = [
    "HermitianEigenDecomposition",
    "herm_eig",
    "matrix_abs",
    "unitary_from_hermitian",
    "hs_distance_sq",
    "hs_norm",
    "partial_transpose",
    "partial_trace",
    "permute_subsystems",
    "kron",
    "rank_with_tol",
    "is_hermitian",
]


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    """True when ``||m - m^dag||_HS <= tol``."""
    return hs_norm(m - m.conj().T) <= tol


@dataclass(frozen=True)
class HermitianEigenDecomposition:
    """Spectral decomposition with eigenvalues sorted in decreasing order.

    ``eigenvectors[:, k]`` is the unit eigenvector for ``eigenvalues[k]``, so
    ``V @ diag(w) @ V^dag`` reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, eigenvalues: np.ndarray | None = None) -> np.ndarray:
        """Rebuild ``V diag(w) V^dag``, optionally with replaced eigenvalues."""
        w = self.eigenvalues if eigenvalues is None else np.asarray(eigenvalues)
        v = self.eigenvectors
        return (v * w) @ v.conj().T


def herm_eig(m: np.ndarray, tol: float = HERM_TOL) -> HermitianEigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    m : ndarray
        Square matrix, Hermitian within `tol` in Hilbert-Schmidt norm.

    Raises
    ------
    NotHermitian
        If the Hermiticity precondition fails.
    NoConvergence
        If the underlying eigensolver does not converge.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m, tol):
        raise NotHermitian(
            f"matrix is not Hermitian: ||m - m^dag||_HS = {hs_norm(m - m.conj().T):.3e}"
        )
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return HermitianEigenDecomposition(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def matrix_abs(m: np.ndarray) -> np.ndarray:
    """Operator absolute value ``sqrt(m^dag m)`` of a Hermitian matrix.

    Computed spectrally as ``V diag(|w|) V^dag``; the result is Hermitian,
    positive semi-definite, and commutes with the input.
    """
    eig = herm_eig(m)
    out = eig.reconstruct(np.abs(eig.eigenvalues))
    return 0.5 * (out + out.conj().T)


def unitary_from_hermitian(h: np.ndarray) -> np.ndarray:
    """Matrix exponential ``exp(i h)`` of a Hermitian generator.

    Evaluated spectrally, so the result is unitary to working precision.
    """
    eig = herm_eig(h)
    return eig.reconstruct(np.exp(1j * eig.eigenvalues))


def hs_norm(x: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(x)))


def hs_distance_sq(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Hilbert-Schmidt distance ``sum |a_ij - b_ij|^2``.

    For Hermitian operands this equals ``Tr[(a-b)^2]``. The squared quantity
    is the canonical distance functional throughout this package; no square
    root is ever taken.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {a.shape} vs {b.shape}")
    d = a - b
    return float(np.real(np.sum(d * d.conj())))


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"subsystem dimensions must be >= 1, got {dims}")
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if prod(dims) != n:
        raise DimensionMismatch(f"prod({dims}) = {prod(dims)} != matrix dimension {n}")
    return dims


def partial_transpose(m: np.ndarray, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transpose the indices of one tensor factor.

    The operation is involutive, trace-preserving and Hermiticity-preserving;
    on a product operator it transposes the chosen factor only.
    """
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    k = len(dims)
    if not 0 <= subsystem < k:
        raise DimensionMismatch(f"subsystem {subsystem} out of range for {k} factors")
    t = m.reshape(dims + dims)
    t = np.swapaxes(t, subsystem, k + subsystem)
    return t.reshape(m.shape)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in `keep`.

    The kept factors stay in their original relative order. Preserves trace
    and positive semi-definiteness.
    """
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    k = len(dims)
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= k for i in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {k} factors")
    t = m.reshape(dims + dims)
    # Contract row/column index pairs of the traced-out factors.
    traced = 0
    for i in range(k):
        if i in keep:
            continue
        axis = i - traced
        t = np.trace(t, axis1=axis, axis2=axis + (k - traced))
        traced += 1
    d_out = prod(dims[i] for i in keep) if keep else 1
    return t.reshape(d_out, d_out)


def permute_subsystems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``perm[i]`` of the input becomes factor ``i``."""
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    k = len(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(k)):
        raise DimensionMismatch(f"perm {perm} is not a permutation of 0..{k - 1}")
    t = m.reshape(dims + dims)
    t = t.transpose(perm + tuple(k + p for p in perm))
    return t.reshape(m.shape)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor (Kronecker) product, subsystem 0 on the left."""
    return np.kron(np.asarray(a), np.asarray(b))


def rank_with_tol(eigs: Sequence[float], tol: float) -> int:
    """Number of eigenvalues strictly greater than `tol`."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return int(np.sum(np.asarray(eigs) > tol))
