"""Dense complex linear-algebra kernel.

All operations work on square (or rectangular, where noted) complex
``numpy`` arrays in double precision.  Eigen-decompositions of general
matrices go through the Schur form (unitary similarity to upper
triangular), so eigenvalues stay reliable even for defective inputs;
eigenvectors are recovered by triangular back-substitution and carry
per-vector residuals.  Tolerances come from :mod:`channellab.tolerances`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import tolerances as tol


def as_matrix(m, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex array, checking finiteness (and squareness)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm distance from `m` to its own adjoint."""
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues with matching eigenvector columns and residuals.

    `residual` is the max over pairs of ``||A v - lambda v||_2``;
    `vector_residuals` holds the per-column values.  Ordering is
    operation-specific: `hermitian_eig` sorts real eigenvalues ascending,
    `general_eig` sorts by decreasing modulus, then by phase angle.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    vector_residuals: np.ndarray = field(repr=False, default=None)


def _residuals(a: np.ndarray, vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a @ vecs - vecs * vals[np.newaxis, :], axis=0)


def hermitian_eig(m) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input must be Hermitian within ``HERMITICITY_TOL`` in max norm; it
    is symmetrized to (m + m^dag)/2 before solving.  Solver failures
    propagate as ``numpy.linalg.LinAlgError``.
    """
    a = as_matrix(m, square=True)
    defect = hermiticity_defect(a)
    if defect > tol.HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} exceeds {tol.HERMITICITY_TOL:.0e}")
    h = (a + a.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    res = _residuals(h, w.astype(complex), v)
    return EigenSystem(w, v, float(res.max(initial=0.0)), res)


def general_eig(m) -> EigenSystem:
    """Full complex eigendecomposition of a general square matrix.

    Route: Schur form (Hessenberg reduction + shifted QR inside LAPACK),
    eigenvalues read off the triangular diagonal, eigenvectors recovered
    by back-substitution and rotated back with the Schur basis.  Near-zero
    diagonal differences are floored at machine precision times the matrix
    scale, so defective inputs yield eigenvectors of the achievable
    quality with honest residuals.  Output is sorted by decreasing
    modulus, then by phase angle.
    """
    a = as_matrix(m, square=True)
    n = a.shape[0]
    t, z = scipy.linalg.schur(a, output="complex")
    vals = np.diag(t).copy()
    scale = max(1.0, float(np.abs(t).max(initial=0.0)))
    floor = np.finfo(float).eps * scale
    vecs = np.zeros((n, n), dtype=complex)
    for k in range(n):
        lam = vals[k]
        y = np.zeros(n, dtype=complex)
        y[k] = 1.0
        for i in range(k - 1, -1, -1):
            s = t[i, i + 1 : k + 1] @ y[i + 1 : k + 1]
            d = t[i, i] - lam
            if abs(d) < floor:
                d = floor
            y[i] = -s / d
        v = z @ y
        vecs[:, k] = v / np.linalg.norm(v)
    order = np.lexsort((np.angle(vals), -np.abs(vals)))
    vals = vals[order]
    vecs = vecs[:, order]
    res = _residuals(a, vals, vecs)
    return EigenSystem(vals, vecs, float(res.max(initial=0.0)), res)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = u @ diag(s) @ v.conj().T``.

    Singular values are nonnegative descending; `u` and `v` have
    orthonormal columns.
    """
    a = as_matrix(m)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.conj().T


def trace_norm(m) -> float:
    """Sum of singular values.  For states this induces the trace
    distance with no 1/2 factor: orthogonal pure states are at distance 2."""
    a = as_matrix(m, square=True)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def psd_sqrt(m) -> np.ndarray:
    """Hermitian PSD square root.

    Accepts Hermitian input (within ``HERMITICITY_TOL``) whose eigenvalues
    are nonnegative up to rounding; negatives above ``-PSD_REJECT`` are
    clipped to zero, anything below that is rejected.
    """
    a = as_matrix(m, square=True)
    defect = hermiticity_defect(a)
    if defect > tol.HERMITICITY_TOL:
        raise ValueError(f"psd_sqrt needs a Hermitian matrix: defect {defect:.3e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    if w.size and w.min() < -tol.PSD_REJECT:
        raise ValueError(f"matrix is materially non-PSD: min eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2.0


def log_on_support(m, support_tol: float = tol.SUPPORT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Natural log of a Hermitian PSD matrix on its support.

    Eigenvalues above `support_tol` get ``ln``; the kernel maps to zero.
    Returns ``(log_matrix, support_projector)``.
    """
    a = as_matrix(m, square=True)
    defect = hermiticity_defect(a)
    if defect > tol.HERMITICITY_TOL:
        raise ValueError(f"log_on_support needs a Hermitian matrix: defect {defect:.3e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    if w.size and w.min() < -tol.PSD_REJECT:
        raise ValueError(f"matrix is materially non-PSD: min eigenvalue {w.min():.3e}")
    on = w > support_tol
    logs = np.where(on, np.log(np.where(on, w, 1.0)), 0.0)
    logm = (v * logs) @ v.conj().T
    proj = (v * on.astype(float)) @ v.conj().T
    return (logm + logm.conj().T) / 2.0, (proj + proj.conj().T) / 2.0


def polar_left(m) -> tuple[np.ndarray, np.ndarray]:
    """Left polar decomposition ``m = p @ u``.

    `p` = sqrt(m m^dag) is Hermitian PSD and `u` is unitary (SVD supplies
    the unitary completion on the kernel of `p`).
    """
    a = as_matrix(m, square=True)
    w, s, v = svd(a)
    p = (w * s) @ w.conj().T
    u = w @ v.conj().T
    return (p + p.conj().T) / 2.0, u


def kron(a, b) -> np.ndarray:
    """Kronecker product with block layout ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one tensor factor of an operator on ``H_A (x) H_B``.

    Composite indices follow the `kron` layout (A is the slow factor).
    ``keep="A"`` returns a dim_a x dim_a matrix, ``keep="B"`` the other
    marginal; the full trace is preserved either way.
    """
    a = as_matrix(m, square=True)
    if dim_a <= 0 or dim_b <= 0 or a.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"partial_trace: matrix of shape {a.shape} does not factor as ({dim_a}*{dim_b})^2"
        )
    blocks = a.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", blocks)
    if keep == "B":
        return np.einsum("ijik->jk", blocks)
    raise ValueError(f'keep must be "A" or "B", got {keep!r}')
