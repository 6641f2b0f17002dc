"""Projection and proximal primitives used across the solvers."""

from __future__ import annotations

import numpy as np


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the l1 ball via the sorted-cumsum rule.

    Ties are broken by the stable descending order of magnitudes, so the
    result is deterministic across runs.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    if np.abs(v).sum() <= radius:
        return v.copy()
    if radius == 0:
        return np.zeros_like(v)
    mags = np.sort(np.abs(v), kind="stable")[::-1]
    cums = np.cumsum(mags)
    counts = np.arange(1, v.size + 1)
    feasible = mags - (cums - radius) / counts > 0
    last = counts[feasible][-1]
    shift = (cums[last - 1] - radius) / last
    return soft_threshold(v, shift)


def project_l1_ball_bisection(
    v: np.ndarray, radius: float, tol: float = 1e-14, max_iter: int = 200
) -> np.ndarray:
    """Reference projection by bisection on the soft-threshold level.

    Independent of the sorting-based path; used as its oracle.
    """
    v = np.asarray(v, dtype=np.float64)
    if np.abs(v).sum() <= radius:
        return v.copy()
    if radius == 0:
        return np.zeros_like(v)
    lo, hi = 0.0, float(np.abs(v).max())
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        total = np.maximum(np.abs(v) - mid, 0.0).sum()
        if total > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return soft_threshold(v, 0.5 * (lo + hi))


def project_ball_around(u: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Projection onto ``{u : ||u - center||_1 <= radius}``."""
    return center + project_l1_ball(u - center, radius)


def project_psd_cone(x: np.ndarray) -> np.ndarray:
    """Nearest positive-semidefinite matrix (eigenvalue clipping).

    The reassembled product is re-symmetrized because BLAS accumulation
    order differs between mirrored entries.
    """
    xh = 0.5 * (x + x.conj().T)
    w, vecs = np.linalg.eigh(xh)
    w = np.maximum(w, 0.0)
    out = (vecs * w) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


def project_pixelwise_ball(p: np.ndarray, radius: float) -> np.ndarray:
    """Clip each leading-axis vector of ``p`` to the Euclidean ball.

    Used for the dual variable of the isotropic total-variation term, where
    ``p`` stacks the two gradient components along axis 0.
    """
    mag = np.sqrt(np.sum(p**2, axis=0))
    factor = np.where(mag > radius, radius / np.maximum(mag, 1e-300), 1.0)
    return p * factor
