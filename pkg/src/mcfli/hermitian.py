"""Hermitian matrix container with diagonal/hollow decomposition."""

from __future__ import annotations

import numpy as np


class HermitianMatrix:
    """Square complex Hermitian matrix.

    The constructor symmetrizes its input (``(H + H^*) / 2``) after checking
    that the asymmetry is below ``asym_tol`` relative to the Frobenius norm,
    so the stored array satisfies ``H[k, j] == conj(H[j, k])`` exactly.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray, asym_tol: float = 1e-8):
        data = np.asarray(data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {data.shape}")
        scale = np.linalg.norm(data)
        asym = np.linalg.norm(data - data.conj().T)
        if scale > 0 and asym > asym_tol * scale:
            raise ValueError(
                f"matrix is not Hermitian: relative asymmetry {asym / scale:.2e}"
            )
        sym = 0.5 * (data + data.conj().T)
        sym.setflags(write=False)
        self.data = sym

    @property
    def order(self) -> int:
        return self.data.shape[0]

    def diagonal_part(self) -> "HermitianMatrix":
        return HermitianMatrix(np.diag(np.diag(self.data)))

    def hollow_part(self) -> "HermitianMatrix":
        out = self.data.copy()
        np.fill_diagonal(out, 0.0)
        return HermitianMatrix(out)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def numerical_rank(self, rel_tol: float = 1e-8) -> int:
        s = np.linalg.svd(self.data, compute_uv=False)
        if s[0] == 0:
            return 0
        return int(np.count_nonzero(s > rel_tol * s[0]))

    def __array__(self, dtype=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(order={self.order})"


def random_hermitian(
    order: int,
    seed,
    hollow: bool = False,
    constant_diagonal: float | None = None,
    psd: bool = False,
) -> HermitianMatrix:
    """Random Hermitian test matrix with optional structure."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order))
    h = 0.5 * (a + a.conj().T)
    if psd:
        h = h @ h.conj().T
    if hollow:
        np.fill_diagonal(h, 0.0)
    if constant_diagonal is not None:
        np.fill_diagonal(h, constant_diagonal)
    return HermitianMatrix(h)
