"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

Every kernel exists in two versions: a ``*_numpy`` vectorized implementation
and a ``*_numba`` loop implementation compiled with ``@njit``.  The module
selects defaults at import time from what measures faster on this workload
(see ``benchmarks/bench_kernels.py``): compiled loops for the scatter and
the direct field synthesis, BLAS-backed numpy for the quadratic forms and
the weighted accumulation.  Set ``MCFLI_NO_NUMBA=1`` to force the numpy path
everywhere (also the automatic fallback when numba is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("MCFLI_NO_NUMBA", "").strip() not in ("", "0")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


NUMBA_ENABLED = _HAVE_NUMBA and not _DISABLED


def using_numba() -> bool:
    """True when the dispatched kernels run through numba."""
    return NUMBA_ENABLED


# ---------------------------------------------------------------------------
# quadratic forms  y_m = alpha_m^* H alpha_m
# ---------------------------------------------------------------------------


def srop_quadratic_numpy(alphas: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    t = alphas @ matrix.T
    return np.einsum("mq,mq->m", alphas.conj(), t)


@njit(cache=True)
def _srop_quadratic_loop(alphas, matrix, out):
    m_count, q = alphas.shape
    for m in range(m_count):
        acc = 0.0 + 0.0j
        for j in range(q):
            row = 0.0 + 0.0j
            for k in range(q):
                row += matrix[j, k] * alphas[m, k]
            acc += np.conj(alphas[m, j]) * row
        out[m] = acc


def srop_quadratic_numba(alphas: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    out = np.empty(alphas.shape[0], dtype=np.complex128)
    _srop_quadratic_loop(
        np.ascontiguousarray(alphas), np.ascontiguousarray(matrix), out
    )
    return out


# ---------------------------------------------------------------------------
# weighted outer-product accumulation  W = sum_m z_m alpha_m alpha_m^*
# ---------------------------------------------------------------------------


def srop_accumulate_numpy(alphas: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (alphas.T * weights) @ alphas.conj()


@njit(cache=True)
def _srop_accumulate_loop(alphas, weights, out):
    m_count, q = alphas.shape
    for m in range(m_count):
        w = weights[m]
        for j in range(q):
            wa = w * alphas[m, j]
            for k in range(q):
                out[j, k] += wa * np.conj(alphas[m, k])


def srop_accumulate_numba(alphas: np.ndarray, weights: np.ndarray) -> np.ndarray:
    q = alphas.shape[1]
    out = np.zeros((q, q), dtype=np.complex128)
    _srop_accumulate_loop(
        np.ascontiguousarray(alphas), np.ascontiguousarray(weights), out
    )
    return out


# ---------------------------------------------------------------------------
# scatter-add of matrix entries into frequency bins (adjoint of the gather)
# ---------------------------------------------------------------------------


def scatter_bins_numpy(values: np.ndarray, bins: np.ndarray, n_bins: int) -> np.ndarray:
    out = np.zeros(n_bins, dtype=np.complex128)
    np.add.at(out, bins, values)
    return out


@njit(cache=True)
def _scatter_bins_loop(values, bins, out):
    for i in range(values.shape[0]):
        out[bins[i]] += values[i]


def scatter_bins_numba(values: np.ndarray, bins: np.ndarray, n_bins: int) -> np.ndarray:
    out = np.zeros(n_bins, dtype=np.complex128)
    _scatter_bins_loop(
        np.ascontiguousarray(values), np.ascontiguousarray(bins), out
    )
    return out


# ---------------------------------------------------------------------------
# direct field synthesis  h(x) = sum_q alpha_q exp(+2i pi nu_q . x)
# ---------------------------------------------------------------------------


def field_direct_numpy(
    freqs: np.ndarray, alpha: np.ndarray, points: np.ndarray
) -> np.ndarray:
    phase = points @ freqs.T  # (n_points, q)
    return np.exp(2j * np.pi * phase) @ alpha


@njit(cache=True)
def _field_direct_loop(freqs, alpha, points, out):
    n_points, dim = points.shape
    q = freqs.shape[0]
    for i in range(n_points):
        acc = 0.0 + 0.0j
        for c in range(q):
            ph = 0.0
            for d in range(dim):
                ph += freqs[c, d] * points[i, d]
            acc += alpha[c] * np.exp(2j * np.pi * ph)
        out[i] = acc


def field_direct_numba(
    freqs: np.ndarray, alpha: np.ndarray, points: np.ndarray
) -> np.ndarray:
    out = np.empty(points.shape[0], dtype=np.complex128)
    _field_direct_loop(
        np.ascontiguousarray(freqs),
        np.ascontiguousarray(alpha.astype(np.complex128)),
        np.ascontiguousarray(points),
        out,
    )
    return out


# Default dispatch per kernel, from benchmarks/bench_kernels.py on this
# workload: the quadratic forms and the weighted accumulation are BLAS-bound
# and the vectorized numpy paths win at every operating size, while the
# scatter and the direct field synthesis are loop-bound and gain 2-3x from
# compilation.  MCFLI_NO_NUMBA=1 forces the numpy path everywhere.
srop_quadratic = srop_quadratic_numpy
srop_accumulate = srop_accumulate_numpy
if NUMBA_ENABLED:
    scatter_bins = scatter_bins_numba
    field_direct = field_direct_numba
else:
    scatter_bins = scatter_bins_numpy
    field_direct = field_direct_numpy
