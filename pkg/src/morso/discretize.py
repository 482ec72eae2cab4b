"""Conversion between differential and difference second-order systems.

Three explicit schemes are supported.  All of them approximate the
acceleration by the central second difference
``(q[i+1] - 2 q[i] + q[i-1]) / h^2`` and differ in the divided difference
used for the velocity:

========  =================================
forward   (q[i+1] - q[i]) / h
backward  (q[i] - q[i-1]) / h
central   (q[i+1] - q[i-1]) / (2 h)
========  =================================

Each scheme maps {M, D, K} to difference matrices {Mb, Db, Kb} such that
``Mb q[i+1] + Db q[i] + Kb q[i-1] = F u[i]``; F and G pass through
unchanged.  The maps are linear and invertible, and all of them satisfy
``Mb + Db + Kb = K`` exactly, so the DC gain is preserved for every step
size.  The explicit schemes are only conditionally stable: discretizing a
stable system with too large a step yields an unstable difference system
(a warning is emitted when that happens).
"""

import enum
import warnings

import numpy as np

from .errors import (
    BadParameters,
    DomainMismatch,
    NonPositiveStep,
    UnstableDiscretizationWarning,
)
from .systems import SecondOrderSystem, stability_report

__all__ = [
    "Scheme",
    "DEFAULT_SCHEME",
    "discretize",
    "inverse_discretize",
    "consistency_error",
    "consistency_curve",
    "write_consistency_curve",
    "default_step",
]


class Scheme(enum.Enum):
    """Velocity difference used by the discretization."""

    FORWARD_VELOCITY = "forward"
    BACKWARD_VELOCITY = "backward"
    CENTRAL_VELOCITY = "central"

    @classmethod
    def from_name(cls, name):
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise BadParameters(f"unknown scheme {name!r}; expected one of: {valid}")


DEFAULT_SCHEME = Scheme.FORWARD_VELOCITY


def discretize(sos, h, scheme=DEFAULT_SCHEME, *, stability_check=True):
    """Convert a continuous system to difference form with step ``h``.

    Parameters
    ----------
    sos : SecondOrderSystem
        Continuous system.
    h : float
        Positive step size.
    scheme : Scheme, optional
        Velocity difference to use (default: forward).
    stability_check : bool, optional
        When True (default), emit UnstableDiscretizationWarning if the
        continuous system is stable but the difference system is not.

    Returns
    -------
    SecondOrderSystem
        Difference system tagged with the step ``h``.
    """
    if sos.is_discrete:
        raise DomainMismatch("discretize expects a continuous system")
    h = float(h)
    if not h > 0:
        raise NonPositiveStep(f"step size must be positive, got {h}")

    M, D, K = sos.M, sos.D, sos.K
    h2 = h * h
    if scheme is Scheme.FORWARD_VELOCITY:
        Mb = (M + h * D) / h2
        Db = (h2 * K - 2.0 * M - h * D) / h2
        Kb = M / h2
    elif scheme is Scheme.BACKWARD_VELOCITY:
        Mb = M / h2
        Db = (h2 * K - 2.0 * M + h * D) / h2
        Kb = (M - h * D) / h2
    elif scheme is Scheme.CENTRAL_VELOCITY:
        Mb = (2.0 * M + h * D) / (2.0 * h2)
        Db = (h2 * K - 2.0 * M) / h2
        Kb = (2.0 * M - h * D) / (2.0 * h2)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    dsos = SecondOrderSystem(Mb, Db, Kb, sos.F, sos.G, h=h)
    if stability_check:
        if stability_report(sos).is_stable and not stability_report(dsos).is_stable:
            warnings.warn(
                f"discretization with h={h} ({scheme.value} scheme) made a "
                "stable system unstable; reduce the step size",
                UnstableDiscretizationWarning,
                stacklevel=2,
            )
    return dsos


def inverse_discretize(dsos, scheme=DEFAULT_SCHEME):
    """Recover the continuous system from a difference system.

    Inverts the linear map of :func:`discretize` for the given scheme; the
    step size is taken from the system's domain tag.
    """
    if dsos.is_continuous:
        raise DomainMismatch("inverse_discretize expects a discrete system")
    h = dsos.h
    Mb, Db, Kb = dsos.M, dsos.D, dsos.K
    h2 = h * h
    K = Mb + Db + Kb
    D = h * (Mb - Kb)
    if scheme is Scheme.FORWARD_VELOCITY:
        M = h2 * Kb
    elif scheme is Scheme.BACKWARD_VELOCITY:
        M = h2 * Mb
    elif scheme is Scheme.CENTRAL_VELOCITY:
        M = h2 * (Mb + Kb) / 2.0
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return SecondOrderSystem(M, D, K, dsos.F, dsos.G, h=None)


def default_step(sos):
    """Heuristic step size ``0.1 / rho`` with ``rho = max(1, ||M^{-1}K||_F^{1/2})``.

    The spectral-radius proxy keeps the fastest structural frequency well
    inside the schemes' conditional stability region for typical damped
    systems; it is a default, not a guarantee.
    """
    rho = max(1.0, np.linalg.norm(sos.solve_mass(sos.K), "fro") ** 0.5)
    return 0.1 / rho


def consistency_error(sos, h, scheme, s_points):
    """Largest relative transfer deviation between a continuous system and
    its discretization, ``max_s ||T_d(e^{s h}) - T_c(s)|| / ||T_c(s)||``.

    The norm is the largest singular value.  All points must lie in the
    resolvent set of both systems.
    """
    dsos = discretize(sos, h, scheme, stability_check=False)
    worst = 0.0
    for s in s_points:
        tc = sos.transfer(s)
        td = dsos.transfer(np.exp(complex(s) * h))
        num = np.linalg.norm(td - tc, 2)
        den = np.linalg.norm(tc, 2)
        worst = max(worst, num / den)
    return worst


def consistency_curve(sos, hs, scheme, s_points):
    """Deviation of :func:`consistency_error` for each step size in ``hs``."""
    return [(float(h), consistency_error(sos, h, scheme, s_points)) for h in hs]


def write_consistency_curve(path_or_file, sos, hs, scheme, s_points):
    """Write a ``step,max_relative_deviation`` CSV for documentation plots."""
    rows = consistency_curve(sos, hs, scheme, s_points)
    if hasattr(path_or_file, "write"):
        f = path_or_file
        close = False
    else:
        f = open(path_or_file, "w", encoding="utf-8")
        close = True
    try:
        f.write("step,max_relative_deviation\n")
        for h, err in rows:
            f.write(f"{h!r},{err!r}\n")
    finally:
        if close:
            f.close()
    return rows
