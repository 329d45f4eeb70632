"""Boxcar averaging and thin-plate smoothing spline reconstructions."""

import numpy as np
import pytest

from cvfbm import (
    BoxcarConfig,
    SampleSet,
    ThinPlateConfig,
    boxcar_reconstruct,
    default_smoothing_p,
    random_mask,
    subsample,
    thin_plate_coefficients,
    thin_plate_reconstruct,
)


def make_samples(rows, cols, positions, values):
    return SampleSet(
        rows=rows,
        cols=cols,
        positions=np.asarray(positions, dtype=np.int64),
        values=np.asarray(values, dtype=complex),
    )


def random_field(rows, cols, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


class TestBoxcar:
    def test_full_sampling_window_one_is_identity(self):
        f = random_field(5, 5, seed=1)
        s = subsample(f, random_mask(5, 5, 25, seed=0))
        out = boxcar_reconstruct(s, BoxcarConfig(window=1, range_adjust="none"))
        assert np.max(np.abs(out - f)) < 1e-12

    def test_single_sample_floods_grid(self):
        z = 1.5 - 2.0j
        s = make_samples(6, 6, [[2, 3]], [z])
        out = boxcar_reconstruct(s, BoxcarConfig(window=3, range_adjust="none"))
        assert np.allclose(out, z)

    def test_two_corner_samples_hand_values(self):
        # 3x3 grid, samples at (0,0)=1 and (2,2)=3, window 3:
        # the center window sees both samples, the corner windows see one
        s = make_samples(3, 3, [[0, 0], [2, 2]], [1.0, 3.0])
        out = boxcar_reconstruct(s, BoxcarConfig(window=3, range_adjust="none"))
        assert out[1, 1] == pytest.approx(2.0)
        assert out[0, 0] == pytest.approx(1.0)
        assert out[2, 2] == pytest.approx(3.0)
        assert out[0, 1] == pytest.approx(1.0)

    def test_window_grows_until_samples_found(self):
        # an 11x11 grid with one far-away sample: every window eventually sees it
        s = make_samples(11, 11, [[0, 0], [0, 1]], [2.0, 4.0])
        out = boxcar_reconstruct(s, BoxcarConfig(window=3, range_adjust="none"))
        assert np.all(np.isfinite(out))
        assert out[10, 10] == pytest.approx(3.0)

    def test_values_stay_in_convex_hull(self):
        f = random_field(10, 10, seed=2)
        s = subsample(f, random_mask(10, 10, 30, seed=1))
        out = boxcar_reconstruct(s, BoxcarConfig(window=5, range_adjust="none"))
        assert out.real.max() <= s.values.real.max() + 1e-12
        assert out.real.min() >= s.values.real.min() - 1e-12
        assert out.imag.max() <= s.values.imag.max() + 1e-12
        assert out.imag.min() >= s.values.imag.min() - 1e-12

    def test_linear_in_sample_values(self):
        pos = random_mask(8, 8, 20, seed=3)
        f1 = random_field(8, 8, seed=4)
        f2 = random_field(8, 8, seed=5)
        alpha = 2.0 - 0.5j
        cfg = BoxcarConfig(window=3, range_adjust="none")
        a = boxcar_reconstruct(subsample(f1 * alpha + f2, pos), cfg)
        b = alpha * boxcar_reconstruct(subsample(f1, pos), cfg) + boxcar_reconstruct(
            subsample(f2, pos), cfg
        )
        assert np.max(np.abs(a - b)) < 1e-8

    def test_affine_adjustment_fixes_scale_shift(self):
        # truth is an affine image of the boxcar prediction, so the adjusted
        # reconstruction matches the known values at the sample positions
        f = random_field(12, 12, seed=6)
        pos = random_mask(12, 12, 60, seed=7)
        s = subsample(f, pos)
        plain = boxcar_reconstruct(s, BoxcarConfig(window=5, range_adjust="none"))
        adjusted = boxcar_reconstruct(s, BoxcarConfig(window=5, range_adjust="affine"))
        def sample_rss(field):
            return np.linalg.norm(field[pos[:, 0], pos[:, 1]] - s.values)
        assert sample_rss(adjusted) <= sample_rss(plain) + 1e-12

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            BoxcarConfig(window=4)

    def test_empty_samples_rejected(self):
        s = make_samples(4, 4, np.zeros((0, 2)), [])
        with pytest.raises(ValueError):
            boxcar_reconstruct(s, BoxcarConfig())


class TestThinPlate:
    def test_interpolates_at_p_one(self):
        f = random_field(10, 10, seed=8)
        pos = random_mask(10, 10, 25, seed=9)
        s = subsample(f, pos)
        out = thin_plate_reconstruct(s, ThinPlateConfig(p=1.0))
        at_samples = out[pos[:, 0], pos[:, 1]]
        assert np.max(np.abs(at_samples - s.values)) < 1e-8 * max(
            1.0, np.max(np.abs(s.values))
        )

    def test_constant_samples_give_constant_field(self):
        z = 0.7 + 0.1j
        pos = random_mask(8, 8, 12, seed=10)
        s = make_samples(8, 8, pos, np.full(12, z))
        for p in (1.0, 0.5, 0.1):
            out = thin_plate_reconstruct(s, ThinPlateConfig(p=p))
            assert np.max(np.abs(out - z)) < 1e-8

    @pytest.mark.parametrize("p", [1.0, 0.9, 0.5, 0.1])
    def test_plane_reproduced_exactly(self, p):
        pos = random_mask(9, 9, 20, seed=11)
        vals = 2.0 * pos[:, 1] + 3.0 * pos[:, 0] + 1.0
        s = make_samples(9, 9, pos, vals.astype(complex))
        out = thin_plate_reconstruct(s, ThinPlateConfig(p=p))
        cc, rr = np.meshgrid(np.arange(9), np.arange(9))
        plane = (2.0 * cc + 3.0 * rr + 1.0).astype(complex)
        assert np.max(np.abs(out - plane)) < 1e-8

    def test_side_conditions_hold(self):
        f = random_field(12, 12, seed=12)
        pos = random_mask(12, 12, 30, seed=13)
        s = subsample(f, pos)
        c, d, p = thin_plate_coefficients(s, ThinPlateConfig())
        scale = max(1.0, np.max(np.abs(c)))
        assert abs(c.sum()) < 1e-8 * scale
        assert abs((c * pos[:, 1]).sum()) < 1e-8 * scale * 12
        assert abs((c * pos[:, 0]).sum()) < 1e-8 * scale * 12

    def test_roughness_decreases_with_p(self):
        # smaller p weights the roughness penalty more, so the fitted surface
        # can only get smoother
        f = random_field(16, 16, seed=14)
        pos = random_mask(16, 16, 60, seed=15)
        s = subsample(f, pos)

        def roughness(field):
            fxx = np.diff(field, 2, axis=1)[:-2, :]
            fyy = np.diff(field, 2, axis=0)[:, :-2]
            fxy = np.diff(np.diff(field, 1, axis=0), 1, axis=1)[:-1, :-1]
            return float(
                np.sum(np.abs(fxx) ** 2) + 2 * np.sum(np.abs(fxy) ** 2) + np.sum(np.abs(fyy) ** 2)
            )

        values = [
            roughness(thin_plate_reconstruct(s, ThinPlateConfig(p=p)))
            for p in (1.0, 0.9, 0.5, 0.1)
        ]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_linear_in_sample_values(self):
        pos = random_mask(10, 10, 25, seed=16)
        f1 = random_field(10, 10, seed=17)
        f2 = random_field(10, 10, seed=18)
        alpha = 1.0 + 2.0j
        cfg = ThinPlateConfig(p=0.7)
        a = thin_plate_reconstruct(subsample(f1 * alpha + f2, pos), cfg)
        b = alpha * thin_plate_reconstruct(subsample(f1, pos), cfg) + thin_plate_reconstruct(
            subsample(f2, pos), cfg
        )
        assert np.max(np.abs(a - b)) < 1e-8

    def test_collinear_positions_rejected(self):
        s = make_samples(6, 6, [[0, 0], [1, 1], [2, 2], [3, 3]], [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ValueError):
            thin_plate_reconstruct(s, ThinPlateConfig(p=1.0))

    def test_p_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            ThinPlateConfig(p=0.0)
        with pytest.raises(ValueError):
            ThinPlateConfig(p=1.5)

    def test_default_p_in_range(self):
        pos = random_mask(20, 20, 50, seed=19)
        p = default_smoothing_p(pos)
        assert 0.0 < p <= 1.0
