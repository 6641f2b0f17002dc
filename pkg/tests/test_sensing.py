import numpy as np
import pytest

from mcfli import (
    CombinedOperator,
    HermitianMatrix,
    NoiseModel,
    SceneImage,
    SropOperator,
    add_noise,
    debias,
    draw_sketches,
    interferometric_matrix,
    interferometric_rank,
    make_grid,
    measure,
    random_hermitian,
    random_layout_1d,
    sparse_scene,
    spikes_scene,
    zeros_scene,
)
from mcfli.layout import fermat_spiral_layout
from mcfli.sensing import srop_centered_forward, srop_forward


def direct_sum_oracle(scene, layout):
    """Entrywise double sum over pixels and core pairs (no FFT anywhere)."""
    grid = layout.grid
    f = scene.vignetted_values.ravel()
    pts = grid.points()
    freqs = layout.core_frequencies
    q = layout.order
    out = np.zeros((q, q), dtype=complex)
    for j in range(q):
        for k in range(q):
            nu = freqs[j] - freqs[k]
            out[j, k] = grid.pixel_volume * np.sum(
                f * np.exp(-2j * np.pi * (pts @ nu))
            )
    return out


# ---------------------------------------------------------------------------
# interferometric matrix
# ---------------------------------------------------------------------------


def test_zero_scene_gives_zero_matrix():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 5, seed=0)
    mat = interferometric_matrix(zeros_scene(g), lay)
    assert np.all(mat.data == 0)


def test_nonnegative_scene_gives_psd_matrix():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 8, seed=1)
    rng = np.random.default_rng(2)
    scene = SceneImage(grid=g, values=rng.uniform(0, 1, g.shape))
    mat = interferometric_matrix(scene, lay)
    w = mat.eigenvalues()
    assert w.min() >= -1e-10 * np.abs(w).max()


def test_fft_path_matches_direct_double_sum():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 5, seed=3)
    scene = sparse_scene(g, 3, seed=4)
    fft_mat = interferometric_matrix(scene, lay, path="fft")
    oracle = direct_sum_oracle(scene, lay)
    scale = np.linalg.norm(oracle)
    assert np.linalg.norm(fft_mat.data - oracle) <= 1e-10 * scale


def test_direct_path_agrees_with_fft_on_grid():
    g = make_grid(2, 16, 1.0)
    lay = fermat_spiral_layout(g, 6)
    # snap the spiral onto the frequency comb so both paths see the same model
    snapped = np.rint(lay.positions / g.core_pitch) * g.core_pitch
    from mcfli import explicit_layout

    lay = explicit_layout(g, snapped)
    rng = np.random.default_rng(5)
    scene = SceneImage(grid=g, values=rng.standard_normal(g.shape))
    a = interferometric_matrix(scene, lay, path="fft").data
    b = interferometric_matrix(scene, lay, path="direct").data
    assert np.linalg.norm(a - b) <= 1e-10 * np.linalg.norm(b)


def test_constant_diagonal_equals_scaled_dc():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 6, seed=6)
    scene = sparse_scene(g, 4, seed=7, zero_mean=False)
    mat = interferometric_matrix(scene, lay)
    dc = g.fourier_scale * g.fft(scene.values)[0]
    assert np.allclose(np.diag(mat.data), dc, rtol=1e-12, atol=1e-14)


def test_grid_mismatch_rejected():
    g1 = make_grid(1, 64, 1.0)
    g2 = make_grid(1, 32, 1.0)
    lay = random_layout_1d(g1, 4, seed=0)
    with pytest.raises(ValueError):
        interferometric_matrix(zeros_scene(g2), lay)


def test_frobenius_identity_on_distinct_layout():
    # for zero-mean scenes on layouts with all-distinct visibilities, the
    # matrix energy equals the energy of the restricted spectrum
    g = make_grid(1, 256, 1.0)
    lay = None
    for seed in range(50):
        cand = random_layout_1d(g, 6, seed=seed)
        if cand.is_distinct:
            lay = cand
            break
    assert lay is not None, "no distinct layout found in 50 seeds"
    scene = sparse_scene(g, 10, seed=3, zero_mean=True)
    mat = interferometric_matrix(scene, lay)
    lhs = mat.frobenius_norm() ** 2 / g.fourier_scale**2
    spectrum = g.fft(scene.values)
    bins = np.unique(lay.off_diagonal_bins)
    rhs = np.sum(np.abs(spectrum[bins]) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-10)


# ---------------------------------------------------------------------------
# rank of spike scenes
# ---------------------------------------------------------------------------


def test_rank_single_spike():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 6, seed=0)
    assert interferometric_rank(spikes_scene(g, 1, seed=1), lay) == 1


def test_rank_four_spikes_q16():
    g = make_grid(1, 256, 1.0)
    lay = random_layout_1d(g, 16, seed=2)
    assert interferometric_rank(spikes_scene(g, 4, seed=3), lay) == 4


def test_rank_saturates_at_core_count():
    g = make_grid(1, 256, 1.0)
    lay = random_layout_1d(g, 4, seed=4)
    assert interferometric_rank(spikes_scene(g, 20, seed=5), lay) == 4


# ---------------------------------------------------------------------------
# rank-one projections
# ---------------------------------------------------------------------------


def test_identity_projects_to_core_count():
    q = 9
    sk = draw_sketches(q, 12, seed=0)
    y = srop_forward(np.eye(q), sk)
    assert np.allclose(y, q, rtol=1e-13)


def test_mean_estimates_trace():
    q, m = 6, 20000
    sk = draw_sketches(q, m, seed=1)
    h = random_hermitian(q, seed=2, constant_diagonal=0.7)
    y = srop_forward(h.data, sk)
    se = y.std(ddof=1) / np.sqrt(m)
    assert abs(y.mean() - h.trace()) <= 3 * se


def test_quadratic_form_matches_double_loop():
    q = 4
    sk = draw_sketches(q, 1, seed=3)
    h = random_hermitian(q, seed=4)
    y = srop_forward(h.data, sk)[0]
    a = sk.alphas[0]
    acc = 0.0 + 0.0j
    for j in range(q):
        for k in range(q):
            acc += np.conj(a[j]) * h.data[j, k] * a[k]
    assert y == pytest.approx(acc.real, rel=1e-12)
    assert abs(acc.imag) <= 1e-12 * np.linalg.norm(h.data)


def test_non_hermitian_input_rejected():
    sk = draw_sketches(4, 3, seed=5)
    bad = np.arange(16.0).reshape(4, 4) + 1j
    with pytest.raises(ValueError):
        srop_forward(bad, sk)


def test_debias_arithmetic():
    assert np.allclose(debias(np.array([3.0, 3.0, 3.0])), 0.0)
    assert np.allclose(debias(np.array([1.0, 2.0, 3.0])), [-1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        debias(np.array([]))


def test_centered_forward_kills_diagonal():
    q = 5
    sk = draw_sketches(q, 8, seed=6)
    diag = np.diag(np.random.default_rng(7).standard_normal(q)).astype(complex)
    scale = max(np.linalg.norm(diag), 1.0)
    y = srop_centered_forward(diag, sk)
    assert np.abs(y).max() <= 1e-12 * scale
    op = SropOperator(sk, centered=True)
    assert np.abs(op.forward(diag)).max() <= 1e-12 * scale


def test_centered_forward_diagonal_shift_invariance():
    q = 5
    sk = draw_sketches(q, 6, seed=8)
    h = random_hermitian(q, seed=9)
    shifted = h.data + 3.7 * np.eye(q)
    a = srop_centered_forward(h.data, sk)
    b = srop_centered_forward(shifted, sk)
    assert np.allclose(a, b, atol=1e-12 * np.linalg.norm(shifted))


def test_centered_forward_equals_debiased_forward():
    q, m = 3, 6
    sk = draw_sketches(q, m, seed=10)
    h = random_hermitian(q, seed=11)
    explicit = srop_centered_forward(h.data, sk)
    fast = debias(srop_forward(h.data, sk))
    assert np.allclose(explicit, fast, atol=1e-13 * np.linalg.norm(h.data))


def test_srop_adjoint_identity():
    q, m = 7, 15
    sk = draw_sketches(q, m, seed=12)
    rng = np.random.default_rng(13)
    for centered in (False, True):
        op = SropOperator(sk, centered=centered)
        h = random_hermitian(q, seed=rng.integers(2**31)).data
        z = rng.standard_normal(m)
        lhs = op.forward(h) @ z
        rhs = np.sum(np.conj(op.adjoint(z)) * h).real
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_lemma1_second_moment_identity():
    # (1/M) A* A (J) concentrates on J for hollow J under unit-modulus sketches
    q, m = 6, 20000
    sk = draw_sketches(q, m, seed=14)
    j_mat = random_hermitian(q, seed=15, hollow=True)
    op = SropOperator(sk, centered=False)
    y = op.forward(j_mat.data)
    recon = op.adjoint(y) / m
    alphas = sk.alphas
    # entrywise standard error of the averaged summand
    summand = (alphas.T[:, None, :] * alphas.conj().T[None, :, :]) * y[None, None, :]
    se = summand.std(axis=2, ddof=1) / np.sqrt(m)
    diff = np.abs(recon - j_mat.data)
    mask = ~np.eye(q, dtype=bool)
    assert np.all(diff[mask] <= 3.5 * np.abs(se[mask]) + 1e-12)


def test_centered_srop_l1_sandwich():
    # loose concentration bracket for the per-measurement l1 norm
    q, m = 6, 2000
    j_mat = random_hermitian(q, seed=16, hollow=True)
    j_unit = j_mat.data / np.linalg.norm(j_mat.data)
    ratios = []
    for seed in range(100):
        sk = draw_sketches(q, m, seed=1000 + seed)
        y = SropOperator(sk, centered=True).forward(j_unit)
        ratios.append(np.abs(y).sum() / m)
    assert min(ratios) >= 0.05
    assert max(ratios) <= 1.2


# ---------------------------------------------------------------------------
# combined operator
# ---------------------------------------------------------------------------


def _combined(n1=128, q=10, m=24, seed=0):
    g = make_grid(1, n1, 1.0)
    lay = random_layout_1d(g, q, seed=seed)
    sk = draw_sketches(q, m, seed=seed + 1)
    return CombinedOperator(lay, sk)


def test_combined_zero_maps():
    op = _combined()
    assert np.all(op.forward(np.zeros(op.n)) == 0)
    assert np.all(op.adjoint(np.zeros(op.m)) == 0)


def test_combined_adjoint_pairs():
    op = _combined(n1=256, q=12, m=64, seed=2)
    rng = np.random.default_rng(3)
    for _ in range(100):
        v = rng.standard_normal(op.n)
        z = rng.standard_normal(op.m)
        lhs = op.forward(v) @ z
        rhs = v @ op.adjoint(z)
        denom = 0.5 * (
            np.linalg.norm(op.forward(v)) * np.linalg.norm(z)
            + np.linalg.norm(v) * np.linalg.norm(op.adjoint(z))
        )
        assert abs(lhs - rhs) <= 1e-10 * max(denom, 1e-300)


def test_combined_matches_unfused_pipeline():
    g = make_grid(1, 256, 1.0)
    lay = random_layout_1d(g, 8, seed=4)
    sk = draw_sketches(8, 20, seed=5)
    scene = sparse_scene(g, 5, seed=6, zero_mean=True)
    op = CombinedOperator(lay, sk)
    fused = op.forward(scene.values)
    mat = interferometric_matrix(scene, lay)
    unfused = SropOperator(sk, centered=True).forward(mat.data)
    scale = max(np.linalg.norm(unfused), 1e-300)
    assert np.linalg.norm(fused - unfused) <= 1e-12 * scale


def test_dense_matrix_matches_operator():
    op = _combined(n1=64, q=7, m=18, seed=7)
    dense = op.as_matrix()
    rng = np.random.default_rng(8)
    for _ in range(5):
        v = rng.standard_normal(op.n)
        assert np.allclose(dense @ v, op.forward(v), atol=1e-12)


def test_combined_shape_validation():
    op = _combined()
    with pytest.raises(ValueError):
        op.forward(np.zeros(op.n + 1))
    with pytest.raises(ValueError):
        op.adjoint(np.zeros(op.m + 1))


# ---------------------------------------------------------------------------
# noise and records
# ---------------------------------------------------------------------------


def test_noise_none_is_free():
    y = np.arange(5.0)
    out, eps = add_noise(y, NoiseModel("none"), seed=0)
    assert np.array_equal(out, y)
    assert eps == 0.0


def test_unknown_noise_model_rejected():
    with pytest.raises(ValueError):
        NoiseModel("poisson")


def test_noise_seeded_reproducible():
    y = np.zeros(16)
    a, ea = add_noise(y, NoiseModel("gaussian", 0.5), seed=42)
    b, eb = add_noise(y, NoiseModel("gaussian", 0.5), seed=42)
    assert np.array_equal(a, b) and ea == eb


def test_centered_noise_variance_identity():
    # E |n_c|^2 = (1 - 1/M) E |n|^2, checked at the experiment size and at a
    # small M where the 1/M correction is actually visible
    rng_seed = 7
    y = np.zeros(10**5)
    noisy, _ = add_noise(y, NoiseModel("gaussian", 1.0), seed=rng_seed)
    nc = debias(noisy)
    ratio = np.mean(nc**2) / np.mean(noisy**2)
    assert abs(ratio - (1 - 1e-5)) < 0.02

    m = 4
    acc_nc, acc_n = 0.0, 0.0
    for s in range(20000):
        noisy, _ = add_noise(np.zeros(m), NoiseModel("gaussian", 1.0), seed=s)
        acc_nc += np.mean(debias(noisy) ** 2)
        acc_n += np.mean(noisy**2)
    assert acc_nc / acc_n == pytest.approx(1 - 1 / m, abs=0.02)


def test_measurement_record_roundtrip_invariants():
    g = make_grid(1, 64, 1.0)
    lay = random_layout_1d(g, 6, seed=0)
    sk = draw_sketches(6, 12, seed=1)
    scene = sparse_scene(g, 3, seed=2)
    rec = measure(scene, lay, sk, NoiseModel("uniform", 0.01), seed=3)
    assert rec.raw.shape == rec.debiased.shape == (12,)
    assert abs(rec.debiased.sum()) <= 1e-10 * max(np.abs(rec.raw).max(), 1e-300)
    assert rec.epsilon > 0
    assert rec.mode == "srop"
