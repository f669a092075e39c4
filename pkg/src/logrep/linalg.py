"""Dense complex matrix kernels.

Every operator in this package is a dense ``numpy`` complex array.  The
functions here accept a single ``(n, n)`` matrix and, where noted, a stack
``(..., n, n)`` so contour quadrature can run all nodes in one pass.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_same_dim, check_square

#: pivots at or below this fraction of ``||a||_inf`` count as zero
PIVOT_TOL = 1e-14
#: default norm cap for :func:`expm`
EXPM_NORM_CAP = 1e3
#: Taylor order used after scaling
EXPM_ORDER = 18


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when elimination meets a pivot below the singularity threshold."""

    def __init__(self, pivot_index, pivot_magnitude, scale):
        self.pivot_index = pivot_index
        self.pivot_magnitude = pivot_magnitude
        self.scale = scale
        super().__init__(
            f"singular matrix: pivot {pivot_index} has magnitude "
            f"{pivot_magnitude:.3e} <= {PIVOT_TOL:g} * {scale:.3e}")


class ExpmOverflowError(OverflowError):
    pass


class EigenError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    condition: float

    def reconstruct(self):
        v = self.vectors
        return v @ np.diag(self.values) @ inv(v)


def matmul(a, b):
    a = check_square(a, "a")
    b = check_square(b, "b")
    check_same_dim(a, b, "matmul")
    return a @ b


def solve(a, rhs):
    """Solve ``a x = rhs`` by Gaussian elimination with partial pivoting.

    ``a`` may be a stack ``(..., n, n)``; ``rhs`` is then ``(..., n)`` or
    ``(..., n, m)`` with the same leading shape.  A pivot whose magnitude is
    at most ``1e-14 * ||a||_inf`` raises :class:`SingularMatrixError`
    naming the elimination step.
    """
    a = check_square(a, "a", allow_batch=True)
    b = np.asarray(rhs, dtype=complex)
    n = a.shape[-1]
    batch = a.shape[:-2]
    vector_rhs = b.ndim == a.ndim - 1
    if vector_rhs:
        b = b[..., None]
    if b.shape[:-1] != batch + (n,):
        raise ValueError(f"rhs shape {np.shape(rhs)} incompatible with {a.shape}")
    m = b.shape[-1]
    A = a.reshape(-1, n, n).copy()
    B = b.reshape(-1, n, m).copy()
    rows = np.arange(A.shape[0])
    scale = np.abs(A).sum(axis=-1).max(axis=-1)

    for k in range(n):
        p = k + np.argmax(np.abs(A[:, k:, k]), axis=1)
        pivot = np.abs(A[rows, p, k])
        bad = pivot <= PIVOT_TOL * scale
        if np.any(bad):
            i = int(np.argmax(bad))
            raise SingularMatrixError(k, float(pivot[i]), float(scale[i]))
        swap = p != k
        if np.any(swap):
            r = rows[swap]
            ps = p[swap]
            A[r, k], A[r, ps] = A[r, ps].copy(), A[r, k].copy()
            B[r, k], B[r, ps] = B[r, ps].copy(), B[r, k].copy()
        if k + 1 < n:
            factors = A[:, k + 1:, k] / A[:, k, k][:, None]
            A[:, k + 1:, k:] -= factors[:, :, None] * A[:, None, k, k:]
            B[:, k + 1:] -= factors[:, :, None] * B[:, None, k]

    X = np.empty_like(B)
    for k in range(n - 1, -1, -1):
        acc = B[:, k]
        if k + 1 < n:
            acc = acc - np.einsum("bj,bjm->bm", A[:, k, k + 1:], X[:, k + 1:])
        X[:, k] = acc / A[:, k, k][:, None]

    X = X.reshape(batch + (n, m))
    return X[..., 0] if vector_rhs else X


def inv(a):
    a = check_square(a, "a", allow_batch=True)
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape)
    return solve(a, eye)


def expm(a, norm_cap=EXPM_NORM_CAP):
    """Matrix exponential by scaling and squaring with an order-18 Taylor core.

    The squaring count is ``ceil(log2 ||a||_F)`` so the scaled argument has
    Frobenius norm at most one.  Accepts stacks of matrices.
    """
    a = check_square(a, "a", allow_batch=True)
    norms = np.linalg.norm(a, axis=(-2, -1))
    top = float(np.max(norms)) if norms.size else 0.0
    if top > norm_cap:
        raise ExpmOverflowError(
            f"||a||_F = {top:.3e} exceeds the expm cap {norm_cap:g}")
    squarings = int(np.ceil(np.log2(top))) if top > 1.0 else 0
    x = a / 2.0 ** squarings
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape)
    result = eye.copy()
    for k in range(EXPM_ORDER, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def eig(a):
    a = check_square(a, "a")
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigenvalue iteration did not converge: {exc}") from exc
    return EigenDecomposition(values, vectors, float(np.linalg.cond(vectors)))


def opnorm(a):
    """Spectral norm (largest singular value); stacks give one value each."""
    a = check_square(a, "a", allow_batch=True)
    s = np.linalg.svd(a, compute_uv=False)[..., 0]
    return float(s) if s.ndim == 0 else s


def eigfunc(a, f):
    """``f(a)`` through the eigendecomposition; the diagonalization oracle."""
    d = eig(a)
    return d.vectors @ np.diag(f(d.values)) @ inv(d.vectors)


def commutator(a, b):
    return a @ b - b @ a
