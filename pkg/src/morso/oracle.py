"""Dense reference computations: Stein Gramians, classic balanced
truncation, and principal angles between subspaces.

These routines are deliberately straightforward dense algorithms.  They
serve as trusted references for the low-rank machinery in the rest of the
package and as a baseline reduction method in benchmark comparisons.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainMismatch,
    OrderTooLarge,
    RankDeficient,
    UnstableSystem,
)
from .systems import FirstOrderSystem

__all__ = [
    "GramianPair",
    "stein_gramians",
    "dense_balanced_truncation",
    "subspace_angles",
]

# Largest first-order dimension for which the Stein equations are solved by
# one dense Kronecker system; beyond it the squared-iteration (doubling)
# solver is used.  The Kronecker matrix is (2N)^2 square, so this bound
# caps it at ~134 MB.
KRON_LIMIT = 64

_STEIN_TOL = 1e-12


@dataclass(frozen=True)
class GramianPair:
    """Controllability/observability Gramians with solve residuals.

    Both matrices are symmetric positive semidefinite solutions of the
    Stein equations ``Wc = A Wc A^T + B B^T`` and ``Wo = A^T Wo A + C^T C``;
    the residuals are the Frobenius norms of the defect of each equation.
    """

    Wc: np.ndarray
    Wo: np.ndarray
    residual_c: float
    residual_o: float


def _spectral_radius(A):
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0


def _solve_stein(A, Q, max_doublings=64):
    """Solve W = A W A^T + Q for symmetric Q."""
    d = A.shape[0]
    if d <= KRON_LIMIT:
        lhs = np.eye(d * d) - np.kron(A, A)
        w = np.linalg.solve(lhs, Q.reshape(-1, order="F"))
        W = w.reshape((d, d), order="F")
    else:
        # Doubling: after k rounds W holds the first 2^k terms of the series
        # and Ak = A^(2^k); quadratically convergent for spectral radius < 1.
        W = Q.copy()
        Ak = A.copy()
        qnorm = np.linalg.norm(Q, "fro")
        for _ in range(max_doublings):
            W = W + Ak @ W @ Ak.T
            Ak = Ak @ Ak
            res = np.linalg.norm(W - A @ W @ A.T - Q, "fro")
            if res < _STEIN_TOL * max(qnorm, 1e-300):
                break
    return 0.5 * (W + W.T)


def stein_gramians(fos):
    """Dense Gramians of a stable difference first-order system.

    Parameters
    ----------
    fos : FirstOrderSystem
        Discrete-domain system with spectral radius strictly below one.

    Returns
    -------
    GramianPair

    Raises
    ------
    UnstableSystem
        If the spectral radius is within 1e-10 of (or beyond) one.
    """
    if not fos.is_discrete:
        raise DomainMismatch("Stein Gramians are defined for difference systems")
    rho = _spectral_radius(fos.A)
    if rho >= 1.0 - 1e-10:
        raise UnstableSystem(
            f"spectral radius {rho:.12f} is not strictly inside the unit disk"
        )
    Qc = fos.B @ fos.B.T
    Qo = fos.C.T @ fos.C
    Wc = _solve_stein(fos.A, Qc)
    Wo = _solve_stein(fos.A.T, Qo)
    res_c = float(np.linalg.norm(Wc - fos.A @ Wc @ fos.A.T - Qc, "fro"))
    res_o = float(np.linalg.norm(Wo - fos.A.T @ Wo @ fos.A - Qo, "fro"))
    return GramianPair(Wc=Wc, Wo=Wo, residual_c=res_c, residual_o=res_o)


def _psd_sqrt_factor(W):
    # Symmetric eigendecomposition-based square root; round-off can push
    # eigenvalues slightly negative, clip them at zero.
    lam, V = np.linalg.eigh(W)
    lam = np.clip(lam, 0.0, None)
    return V * np.sqrt(lam)


def dense_balanced_truncation(fos, order):
    """Square-root balanced truncation of a stable difference system.

    Factors both Gramians, computes the SVD of the cross factor (whose
    singular values are the Hankel singular values), and truncates the
    balancing projection to the requested order.

    Parameters
    ----------
    fos : FirstOrderSystem
        Stable difference system of order 2N.
    order : int
        Reduced order, ``1 <= order <= 2N`` (the full order reproduces the
        system exactly); must not exceed the numerical Hankel rank.

    Returns
    -------
    (FirstOrderSystem, ndarray)
        The reduced system and all 2N Hankel singular values.
    """
    full = fos.order
    if not 1 <= order <= full:
        raise OrderTooLarge(f"order must lie in [1, {full}], got {order}")
    pair = stein_gramians(fos)
    Lc = _psd_sqrt_factor(pair.Wc)
    Lo = _psd_sqrt_factor(pair.Wo)
    U, hsv, Vt = np.linalg.svd(Lo.T @ Lc)
    if hsv[order - 1] <= 1e-14 * hsv[0]:
        raise OrderTooLarge(
            f"requested order {order} exceeds the numerical Hankel rank"
        )
    scale = hsv[:order] ** -0.5
    Xp = Lc @ (Vt[:order].T * scale)
    Yp = Lo @ (U[:, :order] * scale)
    reduced = FirstOrderSystem(
        Yp.T @ fos.A @ Xp, Yp.T @ fos.B, fos.C @ Xp, h=fos.h
    )
    return reduced, hsv


def subspace_angles(P, Q):
    """Principal angles between the column spaces of P and Q.

    Both inputs are orthonormalized by thin QR; the angles are the
    arccosines of the singular values of the overlap matrix, clipped to
    [-1, 1], returned nondecreasing.  The number of angles is the smaller
    column count.

    Raises
    ------
    RankDeficient
        If either input lacks full column rank.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.shape[0] != Q.shape[0]:
        raise DimensionMismatch(
            f"row counts differ: {P.shape[0]} vs {Q.shape[0]}"
        )
    for name, mat in (("P", P), ("Q", Q)):
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] < max(mat.shape) * np.finfo(float).eps * sv[0]:
            raise RankDeficient(f"{name} does not have full column rank")
    Qp, _ = np.linalg.qr(P)
    Qq, _ = np.linalg.qr(Q)
    s = np.linalg.svd(Qp.T @ Qq, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))
