import numpy as np
import pytest

from mcfli import (
    CombinedOperator,
    SceneImage,
    WavefieldSet,
    draw_sketches,
    explicit_layout,
    fermat_spiral_layout,
    generalized_forward,
    generalized_matrix,
    interferometric_matrix,
    make_grid,
    recover_fields,
    render_fringes,
    sparse_scene,
    synth_fields,
)
from mcfli.calibration import speckle_cross_correlation
from mcfli.sensing import srop_forward


def snapped_spiral(grid, q):
    lay = fermat_spiral_layout(grid, q)
    snapped = np.rint(lay.positions / grid.core_pitch) * grid.core_pitch
    return explicit_layout(grid, snapped)


@pytest.fixture(scope="module")
def setup_2d():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 6)
    return grid, layout


def test_farfield_fields_reproduce_projection(setup_2d):
    grid, layout = setup_2d
    fields = synth_fields(layout, grid)
    sk = draw_sketches(6, 5, seed=0)
    rng = np.random.default_rng(1)
    scene = SceneImage(grid=grid, values=rng.uniform(0, 1, grid.shape))
    mat = interferometric_matrix(scene, layout)
    y_srop = srop_forward(mat.data, sk)
    for idx in range(sk.m):
        s = fields.predict_speckle(sk.alphas[idx])
        val = grid.pixel_volume * np.sum(s * scene.values)
        assert val == pytest.approx(y_srop[idx], rel=1e-8)


def test_generalized_matrix_matches_interferometric(setup_2d):
    grid, layout = setup_2d
    fields = synth_fields(layout, grid)
    rng = np.random.default_rng(2)
    scene = SceneImage(grid=grid, values=rng.uniform(0, 1, grid.shape))
    g_mat = generalized_matrix(fields, scene).data
    i_mat = interferometric_matrix(scene, layout, path="direct").data
    assert np.linalg.norm(g_mat - i_mat) <= 1e-10 * np.linalg.norm(i_mat)


def test_generalized_matrix_hermitian_psd(setup_2d):
    grid, layout = setup_2d
    fields = synth_fields(layout, grid, perturbation=("amplitude-ripple", 0.1), seed=3)
    rng = np.random.default_rng(4)
    scene = SceneImage(grid=grid, values=rng.uniform(0, 1, grid.shape))
    g_mat = generalized_matrix(fields, scene)
    w = g_mat.eigenvalues()
    assert w.min() >= -1e-10 * np.abs(w).max()


def test_amplitude_ripple_bounded_model_deviation(setup_2d):
    grid, layout = setup_2d
    rng = np.random.default_rng(5)
    scene = SceneImage(grid=grid, values=rng.uniform(0, 1, grid.shape))
    i_mat = interferometric_matrix(scene, layout, path="direct").data
    fields = synth_fields(layout, grid, perturbation=("amplitude-ripple", 0.05), seed=6)
    g_mat = generalized_matrix(fields, scene).data
    rel = np.linalg.norm(g_mat - i_mat) / np.linalg.norm(i_mat)
    assert rel <= 0.15


def test_single_core_speckle_ignores_phase(setup_2d):
    grid, _ = setup_2d
    layout1 = snapped_spiral(grid, 1)
    fields = synth_fields(layout1, grid, perturbation=("amplitude-ripple", 0.2), seed=7)
    s1 = fields.predict_speckle(np.array([np.exp(0.3j)]))
    s2 = fields.predict_speckle(np.array([np.exp(-2.1j)]))
    assert np.allclose(s1, s2, atol=1e-12 * s1.max())


def test_generalized_forward_matches_combined(setup_2d):
    grid, layout = setup_2d
    fields = synth_fields(layout, grid)
    sk = draw_sketches(6, 8, seed=8)
    scene = sparse_scene(grid, 5, seed=9, zero_mean=False)
    z = generalized_forward(fields, sk, scene)
    op = CombinedOperator(layout, sk)
    y = op.forward(scene.values)
    assert np.linalg.norm(z - y) <= 1e-6 * max(np.linalg.norm(y), 1e-300)


def test_generalized_forward_zero_scene(setup_2d):
    grid, layout = setup_2d
    fields = synth_fields(layout, grid)
    sk = draw_sketches(6, 4, seed=10)
    scene = SceneImage(grid=grid, values=np.zeros(grid.shape))
    assert np.all(generalized_forward(fields, sk, scene) == 0)


# ---------------------------------------------------------------------------
# fringes
# ---------------------------------------------------------------------------


def test_fringe_formula_constant_fields():
    grid = make_grid(2, 8, 1.0)
    fields = WavefieldSet(
        grid=grid, fields=np.ones((2, 8, 8), dtype=np.complex128)
    )
    stack = render_fringes(fields)
    steps = 2 * np.pi * np.arange(8) / 8
    for k in range(8):
        assert np.allclose(stack.frames[1, k], 2 + 2 * np.cos(steps[k]), atol=1e-12)


def test_frame_count_is_linear_in_cores():
    grid = make_grid(2, 8, 1.0)
    layout = snapped_spiral(grid, 5)
    fields = synth_fields(layout, grid)
    stack = render_fringes(fields)
    assert stack.n_frames == 8 * 5 + 1


def test_frames_sum_to_static_intensity():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 4)
    fields = synth_fields(layout, grid, perturbation=("amplitude-ripple", 0.1), seed=0)
    stack = render_fringes(fields)
    ref = np.abs(fields.fields[0]) ** 2
    for q in range(4):
        static = ref + np.abs(fields.fields[q]) ** 2
        total = stack.frames[q].sum(axis=0)
        assert np.allclose(total, 8 * static, atol=1e-10 * static.max())


def test_seventh_dft_coefficient():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 4)
    fields = synth_fields(layout, grid, perturbation=("phase-aberration", 0.3), seed=1)
    stack = render_fringes(fields)
    ref = fields.fields[0]
    for q in range(4):
        coef = np.fft.fft(stack.frames[q], axis=0)[7]
        r0, rq = np.abs(ref), np.abs(fields.fields[q])
        rel_phase = np.angle(fields.fields[q]) - np.angle(ref)
        expect = 4 * (2 * r0 * rq) * np.exp(1j * rel_phase)
        assert np.allclose(coef, expect, atol=1e-9 * np.abs(expect).max())


# ---------------------------------------------------------------------------
# recovery round trips
# ---------------------------------------------------------------------------


def test_noiseless_roundtrip_exact():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 6)
    fields = synth_fields(layout, grid, perturbation=("phase-aberration", 0.4), seed=2)
    recovered = recover_fields(render_fringes(fields))
    sk = draw_sketches(6, 20, seed=3)
    for alpha in sk.alphas:
        corr = speckle_cross_correlation(
            recovered.predict_speckle(alpha), fields.predict_speckle(alpha)
        )
        assert corr >= 0.999


def test_recovered_reference_has_zero_phase():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 4)
    fields = synth_fields(layout, grid, perturbation=("phase-aberration", 0.5), seed=4)
    recovered = recover_fields(render_fringes(fields))
    phase = np.angle(recovered.fields[0])[recovered.mask]
    assert np.abs(phase).max() <= 1e-9


def test_recovery_is_global_phase_referenced():
    # recovered fields equal the true ones times exp(-i phase of core 0)
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 5)
    fields = synth_fields(layout, grid, perturbation=("phase-aberration", 0.3), seed=5)
    recovered = recover_fields(render_fringes(fields))
    ref_phase = np.exp(-1j * np.angle(fields.fields[0]))
    for q in range(5):
        expect = fields.fields[q] * ref_phase
        diff = np.abs(recovered.fields[q] - expect)[recovered.mask]
        assert diff.max() <= 1e-9


def test_forward_predictions_invariant_to_reference_phase():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 5)
    fields = synth_fields(layout, grid, perturbation=("amplitude-ripple", 0.1), seed=6)
    recovered = recover_fields(render_fringes(fields))
    sk = draw_sketches(5, 6, seed=7)
    scene = sparse_scene(grid, 4, seed=8, zero_mean=False)
    z_true = generalized_forward(fields, sk, scene)
    z_rec = generalized_forward(recovered, sk, scene)
    assert np.allclose(z_rec, z_true, atol=1e-9 * max(np.abs(z_true).max(), 1e-300))


def test_noisy_roundtrip():
    grid = make_grid(2, 16, 1.0)
    layout = snapped_spiral(grid, 6)
    fields = synth_fields(layout, grid, seed=9)
    stack = render_fringes(fields, noise_sigma=0.01, seed=10)
    recovered = recover_fields(stack)
    sk = draw_sketches(6, 20, seed=11)
    for alpha in sk.alphas:
        corr = speckle_cross_correlation(
            recovered.predict_speckle(alpha), fields.predict_speckle(alpha)
        )
        assert corr >= 0.99


def test_dark_reference_rejected():
    grid = make_grid(2, 16, 1.0)
    fields_arr = np.ones((3, 16, 16), dtype=np.complex128)
    # reference bright only in a thin strip: recovery must refuse
    fields_arr[0] *= 1e-9
    fields_arr[0, :2, :] = 1.0
    fields = WavefieldSet(grid=grid, fields=fields_arr)
    stack = render_fringes(fields)
    with pytest.raises(ValueError):
        recover_fields(stack)
