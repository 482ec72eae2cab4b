"""Second-order systems, their first-order form, transfer functions and
stability analysis.

A continuous second-order system is the quintuplet ``{M, D, K, F, G}`` of
mass, damping, stiffness, input and output matrices,

    M q''(t) + D q'(t) + K q(t) = F u(t),    y(t) = G q(t),

and the discrete (difference) counterpart advances three consecutive
states,

    M q[i+1] + D q[i] + K q[i-1] = F u[i],   y[i] = G q[i].

Both share one representation: :class:`SecondOrderSystem` with ``h=None``
for the continuous case and a positive step ``h`` for the difference case.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np
from scipy.linalg import lu_factor, lu_solve, get_lapack_funcs

from .errors import (
    ConditioningWarning,
    DimensionMismatch,
    SingularAtPoint,
    SingularMass,
    ZeroPoint,
)

__all__ = [
    "SecondOrderSystem",
    "FirstOrderSystem",
    "StabilityReport",
    "linearize",
    "transfer",
    "stability_report",
]

# |margin| below this counts as sitting on the stability boundary.
MARGINAL_TOL = 1e-10

# Condition estimate above which a warning is recorded for the mass matrix.
COND_WARN_THRESHOLD = 1e12

# Reciprocal condition below which a polynomial matrix counts as singular
# at the evaluation point.
_RCOND_SINGULAR = 1e-13


def _as_matrix(a, name, allow_empty=False):
    arr = np.array(a, dtype=float, copy=True, order="C")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got ndim={arr.ndim}")
    if not allow_empty and (arr.shape[0] < 1 or arr.shape[1] < 1):
        raise DimensionMismatch(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return arr


def _freeze(arr):
    arr.setflags(write=False)
    return arr


def _checked_lu(mat, what):
    """LU-factorize `mat`, raising SingularMass if it is numerically singular
    and warning when the condition estimate exceeds COND_WARN_THRESHOLD."""
    anorm = np.linalg.norm(mat, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact zero pivots
        lu, piv = lu_factor(mat)
    if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0.0):
        raise SingularMass(f"{what} is singular: LU factorization failed")
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm)
    if rcond == 0.0 or not np.isfinite(rcond):
        raise SingularMass(f"{what} is numerically singular (rcond={rcond})")
    cond = 1.0 / rcond
    if cond > COND_WARN_THRESHOLD:
        warnings.warn(
            f"{what} has condition estimate {cond:.2e}; results may be inaccurate",
            ConditioningWarning,
            stacklevel=3,
        )
    return (lu, piv), cond


def _solve_checked(mat, rhs, point):
    """Solve mat @ x = rhs, raising SingularAtPoint if mat is numerically
    singular (the evaluation point is a characteristic frequency)."""
    anorm = np.linalg.norm(mat, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = lu_factor(mat)
    if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0.0):
        raise SingularAtPoint(f"characteristic matrix is singular at point {point}")
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm)
    if not np.isfinite(rcond) or rcond < _RCOND_SINGULAR:
        raise SingularAtPoint(
            f"characteristic matrix is numerically singular at point {point} "
            f"(rcond={rcond:.2e})"
        )
    return lu_solve((lu, piv), rhs)


class SecondOrderSystem:
    """Quintuplet {M, D, K, F, G} with a continuous/discrete domain tag.

    Parameters
    ----------
    M, D, K : (N, N) array_like
        Mass, damping and stiffness matrices.  M must be invertible.
    F : (N, m) array_like
        Input map.
    G : (p, N) array_like
        Output map.
    h : float or None, optional
        ``None`` (default) marks a continuous system; a positive step size
        marks a difference system.

    Notes
    -----
    Instances are immutable: the stored arrays are read-only copies, and
    the LU factorization of M is computed once at construction.  They are
    therefore safe to share across concurrent readers.
    """

    def __init__(self, M, D, K, F, G, h=None):
        M = _as_matrix(M, "M")
        D = _as_matrix(D, "D")
        K = _as_matrix(K, "K")
        F = _as_matrix(F, "F")
        G = _as_matrix(G, "G")

        N = M.shape[0]
        if M.shape != (N, N):
            raise DimensionMismatch(f"M must be square, got {M.shape}")
        for name, mat in (("D", D), ("K", K)):
            if mat.shape != (N, N):
                raise DimensionMismatch(
                    f"{name} must be {N}x{N} to match M, got {mat.shape}"
                )
        if F.shape[0] != N:
            raise DimensionMismatch(f"F must have {N} rows, got {F.shape}")
        if G.shape[1] != N:
            raise DimensionMismatch(f"G must have {N} columns, got {G.shape}")

        if h is not None:
            h = float(h)
            if not h > 0:
                raise DimensionMismatch(f"discrete step h must be positive, got {h}")

        self.M = _freeze(M)
        self.D = _freeze(D)
        self.K = _freeze(K)
        self.F = _freeze(F)
        self.G = _freeze(G)
        self.h = h
        self._mass_lu, self.mass_condition = _checked_lu(M, "mass matrix M")

    # -- basic shape/domain queries --------------------------------------

    @property
    def order(self):
        """Number of second-order states N."""
        return self.M.shape[0]

    @property
    def n_inputs(self):
        return self.F.shape[1]

    @property
    def n_outputs(self):
        return self.G.shape[0]

    @property
    def is_discrete(self):
        return self.h is not None

    @property
    def is_continuous(self):
        return self.h is None

    def __repr__(self):
        dom = f"discrete, h={self.h}" if self.is_discrete else "continuous"
        return (
            f"SecondOrderSystem(N={self.order}, m={self.n_inputs}, "
            f"p={self.n_outputs}, {dom})"
        )

    # -- mass solves (cached LU) ------------------------------------------

    def solve_mass(self, rhs):
        """Return M^{-1} @ rhs using the cached LU factorization.

        Non-finite right-hand sides pass through as non-finite results so
        that iteration divergence can be diagnosed by the caller.
        """
        return lu_solve(self._mass_lu, rhs, check_finite=False)

    def solve_mass_t(self, rhs):
        """Return M^{-T} @ rhs using the cached LU factorization."""
        return lu_solve(self._mass_lu, rhs, trans=1, check_finite=False)

    # -- transfer function -------------------------------------------------

    def characteristic(self, point):
        """Evaluate the characteristic polynomial matrix at a complex point.

        Continuous systems use ``P(s) = M s^2 + D s + K``; difference
        systems use ``P(z) = M z + D + K z^{-1}``.
        """
        pt = complex(point)
        if self.is_continuous:
            return self.M * pt * pt + self.D * pt + self.K
        if pt == 0:
            raise ZeroPoint("discrete characteristic matrix is undefined at z = 0")
        return self.M * pt + self.D + self.K / pt

    def transfer(self, point):
        """Transfer matrix ``G P(.)^{-1} F`` at a complex point.

        Raises
        ------
        SingularAtPoint
            If the point is (numerically) a characteristic frequency.
        ZeroPoint
            For z = 0 on a difference system.
        """
        P = self.characteristic(point).astype(complex)
        X = _solve_checked(P, self.F.astype(complex), point)
        return self.G @ X


@dataclass(frozen=True)
class FirstOrderSystem:
    """Standardized state-space form ``x' = A x + B u, y = C x`` (or the
    difference analogue ``x[i+1] = A x[i] + B u[i]``)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    h: float | None = None

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        C = _as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionMismatch(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise DimensionMismatch(f"C must have {n} columns, got {C.shape}")
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze(B))
        object.__setattr__(self, "C", _freeze(C))

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    @property
    def is_discrete(self):
        return self.h is not None

    @property
    def is_continuous(self):
        return self.h is None

    def transfer(self, point):
        """Transfer matrix ``C (pt I - A)^{-1} B``."""
        pt = complex(point)
        P = pt * np.eye(self.order, dtype=complex) - self.A
        X = _solve_checked(P, self.B.astype(complex), point)
        return self.C @ X


def linearize(sos):
    """First-order form of a second-order system.

    For a continuous system with state ``x = [q; q']``:

        A = [[0, I], [-M^{-1}K, -M^{-1}D]],  B = [[0], [M^{-1}F]],
        C = [G, 0].

    For a difference system the natural state is the pair of consecutive
    positions ``x[i] = [q[i-1]; q[i]]``, which gives the same A and B (with
    the difference matrices) but ``C = [0, G]``, so that the first-order
    transfer function matches ``G P(z)^{-1} F`` exactly.

    Parameters
    ----------
    sos : SecondOrderSystem

    Returns
    -------
    FirstOrderSystem
        Standardized (identity-E) form of order 2N, same domain tag.
    """
    N = sos.order
    m = sos.n_inputs
    A = np.zeros((2 * N, 2 * N))
    A[:N, N:] = np.eye(N)
    A[N:, :N] = -sos.solve_mass(sos.K)
    A[N:, N:] = -sos.solve_mass(sos.D)

    B = np.zeros((2 * N, m))
    B[N:] = sos.solve_mass(sos.F)

    C = np.zeros((sos.n_outputs, 2 * N))
    if sos.is_continuous:
        C[:, :N] = sos.G
    else:
        C[:, N:] = sos.G
    return FirstOrderSystem(A, B, C, h=sos.h)


def transfer(sys, point):
    """Transfer matrix of a second- or first-order system at one point."""
    return sys.transfer(point)


@dataclass(frozen=True)
class StabilityReport:
    """Spectrum-based stability summary.

    ``margin`` is ``-max Re(lambda)`` for continuous systems and
    ``1 - max |lambda|`` for discrete ones.  Eigenvalues within
    ``MARGINAL_TOL`` of the boundary are flagged marginal and count as
    unstable.
    """

    is_stable: bool
    margin: float
    marginal: bool
    spectrum: np.ndarray = field(repr=False)


def stability_report(sys):
    """Compute the characteristic spectrum and a stability verdict.

    Parameters
    ----------
    sys : SecondOrderSystem or FirstOrderSystem
        Second-order systems are analyzed through their standardized
        linearization (2N eigenvalues).

    Returns
    -------
    StabilityReport
    """
    if isinstance(sys, SecondOrderSystem):
        A = linearize(sys).A
    else:
        A = sys.A
    eig = np.linalg.eigvals(A)
    eig = eig[np.lexsort((eig.imag, eig.real))]
    if sys.is_continuous:
        margin = float(-np.max(eig.real)) if eig.size else np.inf
    else:
        margin = float(1.0 - np.max(np.abs(eig))) if eig.size else 1.0
    marginal = abs(margin) < MARGINAL_TOL
    return StabilityReport(
        is_stable=bool(margin > 0 and not marginal),
        margin=margin,
        marginal=marginal,
        spectrum=eig,
    )
