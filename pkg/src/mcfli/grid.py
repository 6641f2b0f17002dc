"""Sampling grids shared by scenes, layouts and operators.

A :class:`Grid` fixes the discretization of the object plane: ``n1`` points
per axis over a square field of view of side ``fov``, together with the
optical constants (wavelength, imaging depth) that convert core positions
into spatial frequencies.  All Fourier transforms in the package go through
:meth:`Grid.fft` / :meth:`Grid.ifft`, which use the unitary DFT with the
coordinate origin at the center of the field of view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    dim: int
    n1: int
    fov: float
    wavelength: float = 1.0
    depth: float = 1.0

    @property
    def n_points(self) -> int:
        return self.n1**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n1,) * self.dim

    @property
    def pixel_pitch(self) -> float:
        return self.fov / self.n1

    @property
    def pixel_volume(self) -> float:
        """Pixel length (1-D) or area (2-D); weight of the discrete integral."""
        return self.pixel_pitch**self.dim

    @property
    def bandwidth(self) -> float:
        """Two-sided spectral width ``W = n1 / fov``."""
        return self.n1 / self.fov

    @property
    def frequency_pitch(self) -> float:
        return 1.0 / self.fov

    @property
    def fourier_scale(self) -> float:
        """Constant relating continuous Fourier coefficients to DFT bins.

        Equals ``fov / sqrt(N)`` in 1-D and ``fov**2 / sqrt(N)`` in 2-D.
        """
        return self.fov**self.dim / np.sqrt(self.n_points)

    @property
    def core_pitch(self) -> float:
        """Distal-plane spacing that lands visibilities on the frequency grid.

        A pair of cores separated by ``core_pitch`` probes a frequency of
        exactly one grid pitch ``1/fov``.
        """
        return self.wavelength * self.depth / self.fov

    def axis_coords(self) -> np.ndarray:
        """Pixel-center coordinates along one axis, origin at the center."""
        return (np.arange(self.n1) - self.n1 // 2) * self.pixel_pitch

    def points(self) -> np.ndarray:
        """All grid points, shape ``(n_points, dim)``, C-order raveling."""
        ax = self.axis_coords()
        if self.dim == 1:
            return ax[:, None]
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    # -- unitary, origin-centered DFT ------------------------------------

    def fft(self, values: np.ndarray) -> np.ndarray:
        """Unitary DFT of a grid-shaped array; bin ``k`` holds frequency ``k/fov``."""
        return np.fft.fftn(np.fft.ifftshift(values)) / np.sqrt(self.n_points)

    def ifft(self, spectrum: np.ndarray) -> np.ndarray:
        """Inverse (and adjoint) of :meth:`fft`."""
        return np.fft.fftshift(np.fft.ifftn(spectrum)) * np.sqrt(self.n_points)

    def bin_index(self, int_freqs: np.ndarray) -> np.ndarray:
        """Flat spectrum index for integer per-axis frequencies (mod ``n1``)."""
        int_freqs = np.asarray(int_freqs)
        if self.dim == 1:
            return int_freqs.reshape(int_freqs.shape[:-1]) % self.n1
        folded = int_freqs % self.n1
        return folded[..., 0] * self.n1 + folded[..., 1]


def make_grid(
    dim: int,
    n1: int,
    fov: float,
    wavelength: float = 1.0,
    depth: float = 1.0,
) -> Grid:
    """Build a validated :class:`Grid`.

    ``n1`` must be even (the grid straddles the origin symmetrically) and the
    field of view, wavelength and depth must be positive.
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if n1 < 2 or n1 % 2 != 0:
        raise ValueError(f"n1 must be even and >= 2, got {n1}")
    if fov <= 0:
        raise ValueError(f"fov must be positive, got {fov}")
    if wavelength <= 0 or depth <= 0:
        raise ValueError("wavelength and depth must be positive")
    return Grid(dim=dim, n1=n1, fov=fov, wavelength=wavelength, depth=depth)
