"""Multicore-fiber lensless imaging toolbox.

Sensing chain (partial Fourier sampling on core-pair visibilities, symmetric
rank-one projections, debiasing), recovery solvers, simulated phase-shifting
calibration, and Monte-Carlo harnesses.
"""

from ._kernels import using_numba
from .calibration import (
    FringeStack,
    WavefieldSet,
    generalized_forward,
    generalized_matrix,
    recover_fields,
    render_fringes,
    synth_fields,
)
from .grid import Grid, make_grid
from .hermitian import HermitianMatrix, random_hermitian
from .layout import (
    CoreLayout,
    downsample_layout,
    explicit_layout,
    fermat_spiral_layout,
    random_layout_1d,
)
from .scene import (
    SceneImage,
    bar_target_scene,
    delta_scene,
    gaussian_vignette,
    rectangles_scene,
    sparse_scene,
    spikes_scene,
    zeros_scene,
)
from .sensing import (
    CombinedOperator,
    InterferometricOperator,
    MeasurementRecord,
    NoiseModel,
    SpeckleField,
    SropOperator,
    add_noise,
    debias,
    interferometric_matrix,
    interferometric_rank,
    measure,
    rs_measure,
    rs_scan,
    si_measure,
    speckle_field,
    srop_centered_forward,
    srop_forward,
)
from .sketch import SketchBatch, draw_sketches, sketches_from_alphas
from .solvers import (
    RecoveryResult,
    SolverConfig,
    nyquist_forward,
    nyquist_recover,
    nyquist_sketches,
    solve_bpdn_l1,
    solve_lasso,
    solve_trace_min_psd,
    solve_tv_nonneg,
    vignetted_snr,
)

__version__ = "0.1.0"

__all__ = [
    "using_numba",
    "Grid",
    "make_grid",
    "CoreLayout",
    "random_layout_1d",
    "fermat_spiral_layout",
    "explicit_layout",
    "downsample_layout",
    "SketchBatch",
    "draw_sketches",
    "sketches_from_alphas",
    "SceneImage",
    "sparse_scene",
    "spikes_scene",
    "delta_scene",
    "rectangles_scene",
    "bar_target_scene",
    "zeros_scene",
    "gaussian_vignette",
    "HermitianMatrix",
    "random_hermitian",
    "InterferometricOperator",
    "SropOperator",
    "CombinedOperator",
    "SpeckleField",
    "MeasurementRecord",
    "NoiseModel",
    "interferometric_matrix",
    "interferometric_rank",
    "srop_forward",
    "srop_centered_forward",
    "debias",
    "speckle_field",
    "rs_measure",
    "rs_scan",
    "si_measure",
    "add_noise",
    "measure",
    "WavefieldSet",
    "FringeStack",
    "synth_fields",
    "render_fringes",
    "recover_fields",
    "generalized_forward",
    "generalized_matrix",
    "SolverConfig",
    "RecoveryResult",
    "solve_lasso",
    "solve_bpdn_l1",
    "solve_trace_min_psd",
    "solve_tv_nonneg",
    "nyquist_sketches",
    "nyquist_forward",
    "nyquist_recover",
    "vignetted_snr",
]
