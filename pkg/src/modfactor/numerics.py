"""Dense Hermitian linear algebra with explicit tolerances.

Every rank and positivity decision in the package goes through
:func:`herm_eig`, so there is exactly one tolerance semantics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPositive


@dataclass(frozen=True)
class NumericConfig:
    """Tolerances.

    psd_tol
        relative bound for rejecting negative eigenvalues
    rank_tol
        relative eigenvalue threshold for rank decisions
    verify_tol
        absolute defect bound for identity checks
    """

    psd_tol: float = 1e-9
    rank_tol: float = 1e-9
    verify_tol: float = 1e-8

    def __post_init__(self):
        for name in ("psd_tol", "rank_tol", "verify_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")

    def as_dict(self) -> dict:
        return {"psd_tol": self.psd_tol, "rank_tol": self.rank_tol, "verify_tol": self.verify_tol}


DEFAULT = NumericConfig()


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise InvalidInput(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix has non-finite entries")
    return M


def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def hermitize(M, cfg: NumericConfig = DEFAULT) -> np.ndarray:
    """Return (M + M*)/2 after checking M is Hermitian within tolerance."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise InvalidInput(f"matrix is not square: {M.shape}")
    skew = max_abs(M - M.conj().T)
    if skew > cfg.verify_tol * (1.0 + max_abs(M)):
        raise InvalidInput(f"matrix is not Hermitian (defect {skew:.3g})")
    return (M + M.conj().T) / 2


def herm_eig(M, cfg: NumericConfig = DEFAULT):
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns
    are the corresponding eigenvectors.
    """
    H = hermitize(M, cfg)
    if H.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, U = np.linalg.eigh(H)
    return w, U


def _psd_threshold(w, tol):
    top = w[-1] if w.size else 0.0
    return -tol * max(1.0, top)


def min_eig_ratio(M, cfg: NumericConfig = DEFAULT) -> float:
    """lambda_min / max(1, lambda_max); the quantity psd_check thresholds."""
    w, _ = herm_eig(M, cfg)
    if not w.size:
        return 0.0
    return float(w[0] / max(1.0, w[-1]))


def psd_check(M, cfg: NumericConfig = DEFAULT) -> bool:
    w, _ = herm_eig(M, cfg)
    if not w.size:
        return True
    return bool(w[0] >= _psd_threshold(w, cfg.psd_tol))


def psd_sqrt(M, cfg: NumericConfig = DEFAULT) -> np.ndarray:
    """PSD square root; eigenvalues in the tolerance band below zero are clamped."""
    w, U = herm_eig(M, cfg)
    if not w.size:
        return np.zeros((0, 0), dtype=complex)
    if w[0] < _psd_threshold(w, cfg.psd_tol):
        raise NotPositive(f"matrix is not positive semidefinite (lambda_min = {w[0]:.3g})")
    root = np.sqrt(np.clip(w, 0.0, None))
    R = (U * root) @ U.conj().T
    return (R + R.conj().T) / 2


def rank_kernel(G, cfg: NumericConfig = DEFAULT):
    """Numerical rank and an orthonormal kernel basis of a PSD matrix.

    The rank counts eigenvalues above ``rank_tol * lambda_max``; the
    remaining eigenvectors are returned as the columns of the kernel basis.
    """
    w, U = herm_eig(G, cfg)
    if not w.size:
        return 0, np.zeros((0, 0), dtype=complex)
    if w[0] < _psd_threshold(w, cfg.psd_tol):
        raise NotPositive(f"Gram matrix is not positive semidefinite (lambda_min = {w[0]:.3g})")
    cut = cfg.rank_tol * max(w[-1], 0.0)
    keep = w > cut
    return int(np.count_nonzero(keep)), U[:, ~keep]


def range_basis(G, cfg: NumericConfig = DEFAULT):
    """Eigenpairs of a PSD matrix above the rank cut.

    Returns ``(w, U)`` with ``G ~= U diag(w) U*``; used to realize a
    presented space as a concrete Hilbert space.
    """
    w, U = herm_eig(G, cfg)
    if not w.size:
        return w, U
    if w[0] < _psd_threshold(w, cfg.psd_tol):
        raise NotPositive(f"Gram matrix is not positive semidefinite (lambda_min = {w[0]:.3g})")
    keep = w > cfg.rank_tol * max(w[-1], 0.0)
    return w[keep], U[:, keep]


def lstsq(A, B, cfg: NumericConfig = DEFAULT):
    """Least-squares solution of ``A X = B`` and its Frobenius residual."""
    A = as_matrix(A)
    B = np.asarray(B, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    B = as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise InvalidInput(f"row mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}")
    X, *_ = np.linalg.lstsq(A, B, rcond=None)
    residual = float(np.linalg.norm(A @ X - B))
    return X, residual
