"""Simulated phase-shifting calibration of the per-core wavefields.

The generalized sensing model replaces the plane-wave interference of the
far-field picture with arbitrary per-core complex fields.  Calibration
recovers those fields from intensity-only fringe patterns: for each core an
8-frame stack is rendered against a phase-stepped reference core, and an
8-point DFT along the steps isolates the interference term.  The recovered
fields carry the reference core's phase as a common per-pixel factor, which
cancels in every predicted speckle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Grid
from .hermitian import HermitianMatrix
from .layout import CoreLayout
from .scene import SceneImage
from .sensing import debias
from .sketch import SketchBatch

N_PHASE_STEPS = 8
REFERENCE_FLOOR_RATIO = 1e-6


@dataclass(frozen=True, eq=False)
class WavefieldSet:
    grid: Grid
    fields: np.ndarray  # (q, *grid.shape) complex
    reference: int = 0
    mask: np.ndarray | None = None  # pixels where recovery was possible

    def __post_init__(self):
        self.fields.setflags(write=False)
        if self.mask is not None:
            self.mask.setflags(write=False)

    @property
    def order(self) -> int:
        return self.fields.shape[0]

    def predict_speckle(self, alpha: np.ndarray) -> np.ndarray:
        """Intensity produced by a sketch through these fields."""
        amp = np.tensordot(np.asarray(alpha, dtype=np.complex128), self.fields, axes=1)
        out = np.abs(amp) ** 2
        if self.mask is not None:
            out = np.where(self.mask, out, 0.0)
        return out

    def vignette_estimate(self) -> np.ndarray:
        """Mean per-core intensity, the paper-style field-of-view estimate."""
        return np.mean(np.abs(self.fields) ** 2, axis=0)


@dataclass(frozen=True, eq=False)
class FringeStack:
    grid: Grid
    frames: np.ndarray  # (q, 8, *grid.shape) intensity frames
    reference_frame: np.ndarray  # intensity of the reference core alone

    def __post_init__(self):
        self.frames.setflags(write=False)
        self.reference_frame.setflags(write=False)

    @property
    def n_frames(self) -> int:
        """Total acquisitions: 8 per core plus the reference-only frame."""
        return self.frames.shape[0] * self.frames.shape[1] + 1


def _smooth_profile(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Low-order random profile in [-1, 1] over the grid."""
    ax = grid.axis_coords() / grid.fov
    freq = rng.integers(1, 3)
    phase = rng.uniform(0, 2 * np.pi)
    if grid.dim == 1:
        return np.cos(2 * np.pi * freq * ax + phase)
    fy = rng.integers(1, 3)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    return np.cos(2 * np.pi * (freq * gx + fy * gy) + phase)


def synth_fields(
    layout: CoreLayout,
    grid: Grid,
    perturbation: tuple[str, float] | None = None,
    seed=0,
) -> WavefieldSet:
    """Synthetic per-core wavefields.

    Without perturbation each field is the pure plane wave of the far-field
    model (unit amplitude).  ``("amplitude-ripple", delta)`` modulates each
    core's amplitude with a smooth random profile of depth ``delta``;
    ``("phase-aberration", delta)`` applies a smooth random phase screen of
    ``delta`` radians RMS-scale.
    """
    if grid != layout.grid:
        raise ValueError("layout and grid disagree")
    rng = np.random.default_rng(seed)
    points = grid.points()
    freqs = layout.core_frequencies
    fields = np.empty((layout.order, *grid.shape), dtype=np.complex128)
    for q in range(layout.order):
        wave = _kernels.field_direct(
            np.ascontiguousarray(freqs[q : q + 1]),
            np.ones(1, dtype=np.complex128),
            np.ascontiguousarray(points),
        ).reshape(grid.shape)
        if perturbation is None:
            fields[q] = wave
            continue
        kind, delta = perturbation
        profile = _smooth_profile(grid, rng)
        if kind == "amplitude-ripple":
            fields[q] = (1.0 + delta * profile) * wave
        elif kind == "phase-aberration":
            fields[q] = np.exp(1j * delta * profile) * wave
        else:
            raise ValueError(f"unknown perturbation {kind!r}")
    return WavefieldSet(grid=grid, fields=fields)


def render_fringes(
    fields: WavefieldSet, noise_sigma: float = 0.0, seed=0
) -> FringeStack:
    """Render the 8-step interferograms of every core against the reference.

    Frame ``k`` of core ``q`` is the intensity of the reference field (phase
    advanced by ``2 pi k / 8``) superposed with the core field.  Optional
    additive Gaussian noise of standard deviation ``noise_sigma`` relative to
    the peak frame intensity.
    """
    ref = fields.fields[fields.reference]
    steps = 2.0 * np.pi * np.arange(N_PHASE_STEPS) / N_PHASE_STEPS
    shifted = ref[None] * np.exp(1j * steps.reshape((-1,) + (1,) * fields.grid.dim))
    frames = np.abs(shifted[None] + fields.fields[:, None]) ** 2
    reference_frame = np.abs(ref) ** 2
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        scale = noise_sigma * frames.max()
        frames = frames + rng.normal(0.0, scale, size=frames.shape)
        reference_frame = reference_frame + rng.normal(
            0.0, scale, size=reference_frame.shape
        )
    return FringeStack(grid=fields.grid, frames=frames, reference_frame=reference_frame)


def recover_fields(
    stack: FringeStack, floor_ratio: float = REFERENCE_FLOOR_RATIO
) -> WavefieldSet:
    """Recover the wavefields (referenced to the reference core's phase).

    The 7-th coefficient of the 8-point DFT along the phase steps equals
    ``4 * I_i * exp(i * relative phase)``; dividing by ``8 * sqrt(I_ref)``
    yields the field.  Pixels whose reference intensity falls below
    ``floor_ratio * max`` are masked out; recovery fails if more than half
    the field of view is masked.
    """
    i00 = stack.reference_frame
    floor = floor_ratio * i00.max()
    mask = i00 > floor
    if mask.mean() < 0.5:
        raise ValueError(
            "reference intensity below the floor over more than half the FOV"
        )
    coef = np.fft.fft(stack.frames, axis=1)[:, N_PHASE_STEPS - 1]
    denom = np.where(mask, np.sqrt(np.abs(i00)), 1.0)
    fields = np.where(mask[None], coef / (N_PHASE_STEPS * denom[None]), 0.0)
    return WavefieldSet(grid=stack.grid, fields=fields, mask=mask)


def generalized_matrix(fields: WavefieldSet, scene: SceneImage) -> HermitianMatrix:
    """The Hermitian matrix of cross-core overlaps weighted by the image."""
    if scene.grid != fields.grid:
        raise ValueError("scene and fields are defined on different grids")
    flat = fields.fields.reshape(fields.order, -1)
    weighted = flat.conj() * scene.values.ravel()
    return HermitianMatrix(fields.grid.pixel_volume * (weighted @ flat.T))


def generalized_forward(
    fields: WavefieldSet, sketches: SketchBatch, scene: SceneImage
) -> np.ndarray:
    """Debiased measurements predicted from calibrated fields.

    Each raw value is the inner product of the predicted speckle with the
    image; the cross-core matrix itself is never materialized.
    """
    if scene.grid != fields.grid:
        raise ValueError("scene and fields are defined on different grids")
    if sketches.q != fields.order:
        raise ValueError("sketch length does not match the number of fields")
    pixvol = fields.grid.pixel_volume
    vals = scene.values
    z = np.empty(sketches.m)
    alphas = sketches.alphas
    for m_idx in range(sketches.m):
        z[m_idx] = pixvol * np.sum(fields.predict_speckle(alphas[m_idx]) * vals)
    return debias(z)


def speckle_cross_correlation(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Normalized cross-correlation between two intensity patterns."""
    num = float(np.sum(predicted * truth))
    den = float(np.linalg.norm(predicted) * np.linalg.norm(truth))
    if den == 0:
        return 0.0
    return num / den
