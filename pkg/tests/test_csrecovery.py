import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tfrecover import (GrayImage, PixelMask, UniformScheme, BandedScheme,
                       TvParams, MeasurementSet, make_mask, write_mask,
                       read_mask, tv_value, tv_gradient, tv_inpaint,
                       l1_recover)


# ---------------------------------------------------------------------------
# masks

def test_uniform_full_retain():
    mask = make_mask((4, 4), UniformScheme(1.0), seed=0)
    assert mask.observed.all()


def test_uniform_quarter_on_4x4():
    mask = make_mask((4, 4), UniformScheme(0.25), seed=0)
    assert mask.n_observed == 4


def test_mask_determinism():
    a = make_mask((16, 16), UniformScheme(0.5), seed=9)
    b = make_mask((16, 16), UniformScheme(0.5), seed=9)
    np.testing.assert_array_equal(a.observed, b.observed)
    c = make_mask((16, 16), UniformScheme(0.5), seed=10)
    assert not np.array_equal(a.observed, c.observed)


def test_banded_counts_and_band_placement():
    dims = (32, 64)
    scheme = BandedScheme(p_high=0.45, p_low=0.01, low_band_fraction=0.25)
    mask = make_mask(dims, scheme, seed=1)
    total = dims[0] * dims[1]
    cols = np.arange(dims[1])
    low_cols = (cols >= 24) & (cols < 40)  # centered 16 of 64 columns
    n_low = mask.observed[:, low_cols].sum()
    n_high = mask.observed[:, ~low_cols].sum()
    assert n_low == round(0.01 * total)
    assert n_high == round(0.45 * total)


def test_banded_capacity_error():
    with pytest.raises(ValueError):
        make_mask((8, 8), BandedScheme(p_high=0.9, p_low=0.01,
                                       low_band_fraction=0.5), seed=0)


def test_mask_file_roundtrip(tmp_path):
    mask = make_mask((8, 12), BandedScheme(0.3, 0.02, 0.25), seed=5)
    path = tmp_path / "mask.pgm"
    write_mask(mask, path)
    back = read_mask(path)
    np.testing.assert_array_equal(back.observed, mask.observed)
    assert back.scheme == mask.scheme
    assert back.seed == 5


# ---------------------------------------------------------------------------
# TV functional

def test_tv_constant_zero():
    assert tv_value(np.full((5, 5), 3.0), 0.0) == 0.0


def test_tv_single_interior_pixel_hand_value():
    s = np.zeros((5, 5))
    s[2, 2] = 1.0
    assert abs(tv_value(s, 0.0) - (2.0 + np.sqrt(2.0))) < 1e-12


@given(st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=25)
def test_tv_positive_homogeneity(alpha):
    rng = np.random.default_rng(2)
    s = rng.normal(size=(6, 6))
    assert tv_value(alpha * s, 0.0) == pytest.approx(alpha * tv_value(s, 0.0),
                                                     rel=1e-12)


def test_tv_zero_iff_constant():
    rng = np.random.default_rng(4)
    s = rng.normal(size=(6, 6))
    assert tv_value(s, 0.0) > 0
    assert tv_value(np.zeros((6, 6)), 0.0) == 0


def test_tv_midpoint_convexity():
    rng = np.random.default_rng(8)
    for eps in (0.0, 1e-2, 1.0):
        for _ in range(10):
            a = rng.normal(size=(7, 5))
            b = rng.normal(size=(7, 5))
            lhs = tv_value((a + b) / 2, eps)
            rhs = (tv_value(a, eps) + tv_value(b, eps)) / 2
            assert lhs <= rhs + 1e-12


def test_tv_gradient_constant_and_1x1():
    assert np.all(tv_gradient(np.full((4, 4), 2.0), 1e-2) == 0)
    assert tv_gradient(np.zeros((1, 1)), 1e-2) == 0


def local_tv_terms(s, eps, i, j):
    """Sum of the TV terms that depend on s[i, j] (its own and up to two
    neighbors'). Differencing only these avoids roundoff from the ~R*C
    unchanged terms, which would otherwise swamp small gradient entries."""
    rows, cols = s.shape
    acc = 0.0
    for a, b in ((i, j), (i - 1, j), (i, j - 1)):
        if 0 <= a < rows and 0 <= b < cols:
            dv = s[a + 1, b] - s[a, b] if a + 1 < rows else 0.0
            dh = s[a, b + 1] - s[a, b] if b + 1 < cols else 0.0
            acc += np.sqrt(dv**2 + dh**2 + eps**2)
    return acc


def finite_difference_gradient(s, eps, h=1e-4):
    g = np.zeros_like(s)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            sp = s.copy(); sp[i, j] += h
            sm = s.copy(); sm[i, j] -= h
            g[i, j] = (local_tv_terms(sp, eps, i, j)
                       - local_tv_terms(sm, eps, i, j)) / (2 * h)
    return g


@pytest.mark.parametrize("shape", [(4, 4), (8, 8), (17, 9)])
def test_tv_gradient_matches_finite_differences(shape):
    # seed chosen so no gradient entry is near zero by cancellation; the
    # relative bound is meaningless against an accidentally ~1e-7 entry
    rng = np.random.default_rng(27)
    s = rng.uniform(0, 255, size=shape)
    analytic = tv_gradient(s, 1e-2)
    fd = finite_difference_gradient(s, 1e-2)
    rel = np.abs(analytic - fd) / np.maximum(np.abs(fd), 1e-8)
    assert rel.max() < 1e-5


def test_tv_gradient_requires_positive_epsilon():
    with pytest.raises(ValueError):
        tv_gradient(np.zeros((3, 3)), 0.0)


# ---------------------------------------------------------------------------
# inpainting

def image_of(pixels):
    return GrayImage(pixels=np.asarray(pixels, float), vmin=0.0, vmax=255.0)


def test_inpaint_fully_observed_identity():
    rng = np.random.default_rng(1)
    px = np.floor(rng.uniform(0, 255, size=(8, 8)))
    mask = make_mask((8, 8), UniformScheme(1.0), seed=0)
    result = tv_inpaint(image_of(px), mask)
    np.testing.assert_array_equal(result.image.pixels, px)


def test_inpaint_constant_image_recovers_constant():
    c = 37.0
    mask = make_mask((12, 12), UniformScheme(0.2), seed=3)
    result = tv_inpaint(image_of(np.where(mask.observed, c, 0.0)), mask)
    assert np.max(np.abs(result.image.pixels - c)) < 1e-6


def test_inpaint_objective_monotone_and_observed_bitexact():
    rng = np.random.default_rng(6)
    # piecewise-constant 32x32 blocks
    blocks = np.floor(rng.uniform(0, 255, size=(4, 4)))
    px = np.kron(blocks, np.ones((8, 8)))
    mask = make_mask((32, 32), UniformScheme(0.5), seed=7)
    damaged = image_of(np.where(mask.observed, px, 0.0))
    params = TvParams(epsilon=1.0, step=0.25, max_iters=800, tol=1e-9)
    result = tv_inpaint(damaged, mask, params)
    assert np.all(np.diff(result.objectives) <= 0)
    assert result.objectives[-1] <= result.objectives[0]
    same = result.image.pixels[mask.observed] == damaged.pixels[mask.observed]
    assert same.all()


def test_inpaint_errors():
    img = image_of(np.zeros((4, 4)))
    empty = PixelMask(observed=np.zeros((4, 4), bool), scheme=None, seed=0)
    with pytest.raises(ValueError):
        tv_inpaint(img, empty)
    wrong = PixelMask(observed=np.ones((3, 3), bool), scheme=None, seed=0)
    with pytest.raises(ValueError):
        tv_inpaint(img, wrong)


def test_tvparams_validation():
    with pytest.raises(ValueError):
        TvParams(epsilon=0.0)
    with pytest.raises(ValueError):
        TvParams(step=-1.0)


# ---------------------------------------------------------------------------
# l1 demonstrator

def sparse_instance(N, M, support, seed):
    rng = np.random.default_rng(seed)
    s_true = np.zeros(N, complex)
    s_true[list(support)] = np.exp(2j * np.pi * rng.uniform(size=len(support)))
    x = np.fft.ifft(s_true, norm="ortho")
    idx = np.sort(rng.choice(N, size=M, replace=False))
    return MeasurementSet(sample_indices=idx, values=x[idx], signal_length=N), s_true


def test_l1_full_observation_one_sparse():
    meas, s_true = sparse_instance(32, 32, [5], seed=0)
    s = l1_recover(meas, lam=1e-3, max_iters=200)
    assert np.argmax(np.abs(s)) == 5
    assert abs(s[5] - s_true[5]) < 1e-6
    assert np.max(np.abs(np.delete(s, 5))) < 1e-6


def test_l1_zero_measurements_give_zero():
    meas = MeasurementSet(sample_indices=np.arange(16), values=np.zeros(16),
                          signal_length=16)
    s = l1_recover(meas, lam=0.1)
    assert np.all(s == 0)


def test_l1_four_sparse_half_measurements():
    support = [4, 17, 33, 50]
    meas, s_true = sparse_instance(64, 32, support, seed=42)
    s = l1_recover(meas, lam=0.05, max_iters=3000)
    got_support = np.flatnonzero(np.abs(s) > 1e-6 * np.abs(s).max())
    assert sorted(got_support) == support
    assert np.max(np.abs(s - s_true)) < 1e-3
    # independent residual check: recovered spectrum reproduces the samples
    resid = np.fft.ifft(s, norm="ortho")[meas.sample_indices] - meas.values
    assert np.max(np.abs(resid)) < 1e-10


def test_l1_parameter_errors():
    meas = MeasurementSet(sample_indices=np.array([], int), values=np.array([]),
                          signal_length=8)
    with pytest.raises(ValueError):
        l1_recover(meas, lam=0.1)
    good, _ = sparse_instance(16, 8, [2], seed=1)
    with pytest.raises(ValueError):
        l1_recover(good, lam=0.0)


def test_measurement_set_invariants():
    with pytest.raises(ValueError):
        MeasurementSet(sample_indices=[3, 3], values=[0, 0], signal_length=8)
    with pytest.raises(ValueError):
        MeasurementSet(sample_indices=[5, 2], values=[0, 0], signal_length=8)
    with pytest.raises(ValueError):
        MeasurementSet(sample_indices=[0, 9], values=[0, 0], signal_length=8)
    with pytest.raises(ValueError):
        MeasurementSet(sample_indices=[0], values=[0, 1], signal_length=8)
