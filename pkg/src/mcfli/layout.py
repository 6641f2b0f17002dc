"""Core layouts and their visibility (difference-set) bookkeeping.

A layout holds the distal-plane positions of the fiber cores.  Every ordered
pair ``(j, k)`` of cores probes the object spectrum at the visibility
``(p_j - p_k) / (wavelength * depth)``.  Positions are stored continuous;
visibilities are snapped to the nearest frequency-grid bin when building the
index map, and the snap residual is recorded per pair so that departures from
the on-grid assumption stay measurable.  Duplicate off-diagonal bins are
allowed and counted rather than rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import Grid

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True, eq=False)
class CoreLayout:
    grid: Grid
    positions: np.ndarray  # (q, dim) distal-plane coordinates
    bin_map: np.ndarray  # (q, q) flat frequency-bin index; diagonal -> bin 0
    snap_residuals: np.ndarray  # (q, q) max per-axis |rounding residual|, bin units
    kind: str = "explicit"
    _pair_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.positions, self.bin_map, self.snap_residuals):
            arr.setflags(write=False)

    @property
    def order(self) -> int:
        return self.positions.shape[0]

    @property
    def core_frequencies(self) -> np.ndarray:
        """Per-core frequency ``p_q / (wavelength * depth)``, shape (q, dim)."""
        return self.positions / (self.grid.wavelength * self.grid.depth)

    def _pairs(self):
        if "pj" not in self._pair_cache:
            q = self.order
            pj, pk = np.nonzero(~np.eye(q, dtype=bool))
            self._pair_cache["pj"] = pj.astype(np.int64)
            self._pair_cache["pk"] = pk.astype(np.int64)
            self._pair_cache["bins"] = np.ascontiguousarray(self.bin_map[pj, pk])
        return (
            self._pair_cache["pj"],
            self._pair_cache["pk"],
            self._pair_cache["bins"],
        )

    @property
    def off_diagonal_bins(self) -> np.ndarray:
        """Flat bin of every ordered pair ``j != k`` (multiset, q(q-1) entries)."""
        return self._pairs()[2]

    @property
    def distinct_visibilities(self) -> int:
        """Number of distinct non-zero frequency bins hit by core pairs."""
        bins = np.unique(self.off_diagonal_bins)
        return int(bins.size - np.count_nonzero(bins == 0))

    @property
    def multiplicities(self) -> tuple[np.ndarray, np.ndarray]:
        """Occupied off-diagonal bins and how many ordered pairs hit each."""
        return np.unique(self.off_diagonal_bins, return_counts=True)

    @property
    def is_distinct(self) -> bool:
        """True when every off-diagonal visibility occupies its own non-zero bin."""
        bins, counts = self.multiplicities
        return bool(np.all(counts == 1) and not np.any(bins == 0))

    @property
    def max_snap_residual(self) -> float:
        return float(self.snap_residuals.max()) if self.order else 0.0

    # -- spectrum <-> matrix maps ----------------------------------------

    def gather(self, spectrum: np.ndarray) -> np.ndarray:
        """Lift a flat spectrum onto core pairs: entry ``(j,k)`` reads its bin.

        The diagonal reads bin 0 (the zero frequency) for every core.
        """
        return spectrum[self.bin_map]

    def scatter(self, matrix: np.ndarray) -> np.ndarray:
        """Adjoint of :meth:`gather`: accumulate matrix entries into bins.

        Duplicate bins are summed; conjugate pairs land in mirrored bins, so a
        Hermitian input produces a conjugate-symmetric spectrum.
        """
        return _kernels.scatter_bins(
            np.ascontiguousarray(matrix.ravel()).astype(np.complex128),
            np.ascontiguousarray(self.bin_map.ravel()),
            self.grid.n_points,
        )


def _build_layout(grid: Grid, positions: np.ndarray, kind: str) -> CoreLayout:
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    if positions.shape[1] != grid.dim:
        raise ValueError(
            f"positions have dim {positions.shape[1]}, grid has dim {grid.dim}"
        )
    diffs = positions[:, None, :] - positions[None, :, :]
    in_bins = diffs * grid.fov / (grid.wavelength * grid.depth)
    snapped = np.rint(in_bins)
    residual = np.abs(in_bins - snapped).max(axis=-1)
    bin_map = grid.bin_index(snapped.astype(np.int64))
    return CoreLayout(
        grid=grid,
        positions=positions,
        bin_map=np.ascontiguousarray(bin_map.astype(np.int64)),
        snap_residuals=residual,
        kind=kind,
    )


def explicit_layout(grid: Grid, positions: np.ndarray) -> CoreLayout:
    """Layout from user-provided positions (length units, distal plane)."""
    return _build_layout(grid, positions, kind="explicit")


def random_layout_1d(grid: Grid, q: int, seed) -> CoreLayout:
    """Draw ``q`` core positions uniformly without replacement on a 1-D comb.

    Candidate positions are the ``n1 + 1`` multiples of the core pitch in
    ``[-n1/2, n1/2] * core_pitch``, so all visibilities land on-grid (modulo
    the spectral wrap for separations beyond half the bandwidth).
    Deterministic under a fixed seed.
    """
    if grid.dim != 1:
        raise ValueError("random_layout_1d requires a 1-D grid")
    if q < 2:
        raise ValueError(f"need at least 2 cores, got {q}")
    n_slots = grid.n1 + 1
    if q > n_slots:
        raise ValueError(f"q={q} exceeds the {n_slots} distinct grid positions")
    rng = np.random.default_rng(seed)
    slots = rng.choice(n_slots, size=q, replace=False) - grid.n1 // 2
    positions = slots[:, None] * grid.core_pitch
    return _build_layout(grid, positions, kind="random-1d")


def fermat_spiral_layout(
    grid: Grid, q: int, diameter: float | None = None
) -> CoreLayout:
    """Arrange ``q`` cores on a golden-angle spiral in the distal plane.

    The radius grows as the square root of the core index and the azimuth
    steps by the golden angle, which spreads the pairwise differences and
    keeps off-diagonal visibilities (nearly) all distinct.  The scaling
    constants are not canonical, so the spiral ``diameter`` is exposed; the
    default spans half the aliasing-free aperture of the grid.  Whether all
    off-diagonal gridded visibilities are actually unique at this grid
    resolution is reported by ``CoreLayout.is_distinct``.
    """
    if grid.dim != 2:
        raise ValueError("fermat_spiral_layout requires a 2-D grid")
    if q < 1:
        raise ValueError(f"need at least 1 core, got {q}")
    if diameter is None:
        diameter = 0.5 * grid.n1 * grid.core_pitch
    idx = np.arange(q, dtype=np.float64)
    radius = 0.5 * diameter * np.sqrt(idx / max(q - 1, 1))
    angle = idx * GOLDEN_ANGLE
    positions = np.stack(
        [radius * np.cos(angle), radius * np.sin(angle)], axis=1
    )
    return _build_layout(grid, positions, kind="fermat-spiral")


def downsample_layout(layout: CoreLayout, step: int) -> CoreLayout:
    """Keep every ``step``-th core (used to thin a spiral, e.g. 110 -> 55)."""
    return _build_layout(layout.grid, layout.positions[::step], kind=layout.kind)
