import numpy as np
import pytest

from pfkex.grids import (
    AcquisitionMask,
    ComplexGrid,
    GeometryParams,
    apply_mask,
    conjugate_reflect,
    dft2_centered,
    dft_cols_centered,
    dft_rows_centered,
    frequency_weight,
    inverse_frequency_weight,
)


def random_grid(ny, nx, seed=0):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(ny, nx)) + 1j * rng.normal(size=(ny, nx))
    return ComplexGrid.from_array(data)


class TestComplexGrid:
    def test_index_maps_are_bijections(self):
        g = ComplexGrid.zeros(8, 6)
        assert g.k_values().min() == -4 and g.k_values().max() == 3
        assert g.n_values().min() == -3 and g.n_values().max() == 2
        g255 = ComplexGrid.zeros(255, 255)
        assert g255.center_k == 127
        assert g255.k_values().min() == -127 and g255.k_values().max() == 127

    def test_rejects_bad_centers(self):
        with pytest.raises(ValueError):
            ComplexGrid(np.zeros((4, 4), dtype=complex), 4, 0)

    def test_at_physical_indexing(self):
        g = random_grid(8, 8, 3)
        assert g.at(0, 0) == g.data[4, 4]
        assert g.at(-4, 3) == g.data[0, 7]


class TestDft2Centered:
    def test_all_zero_grid(self):
        g = ComplexGrid.zeros(4, 4)
        out = dft2_centered(g)
        assert np.all(out.data == 0)

    def test_impulse_at_center_is_constant(self):
        g = ComplexGrid.zeros(4, 4)
        g.data[g.center_k, g.center_n] = 1.0
        out = dft2_centered(g)
        assert np.allclose(out.data, 0.25)  # 1/sqrt(16)

    @pytest.mark.parametrize("shape", [(8, 8), (7, 9), (255, 255)])
    def test_round_trip(self, shape):
        g = random_grid(*shape, seed=1)
        back = dft2_centered(dft2_centered(g), inverse=True)
        assert np.max(np.abs(back.data - g.data)) < 1e-12

    def test_unitarity(self):
        g = random_grid(16, 12, 5)
        out = dft2_centered(g)
        n_in = np.linalg.norm(g.data)
        assert abs(np.linalg.norm(out.data) - n_in) < 1e-10 * n_in


class TestDftRowsCentered:
    def test_constant_row_gives_impulse(self):
        g = ComplexGrid.from_array(np.ones((1, 4)))
        out = dft_rows_centered(g)
        expected = np.zeros(4, dtype=complex)
        expected[g.center_n] = 2.0  # 4 / sqrt(4)
        assert np.allclose(out.data[0], expected)

    def test_round_trip(self):
        g = random_grid(3, 8, 7)
        back = dft_rows_centered(dft_rows_centered(g), inverse=True)
        assert np.max(np.abs(back.data - g.data)) < 1e-12

    def test_separability_matches_dft2(self):
        g = random_grid(8, 8, 11)
        via_1d = dft_cols_centered(dft_rows_centered(g))
        via_2d = dft2_centered(g)
        assert np.max(np.abs(via_1d.data - via_2d.data)) < 1e-12


class TestFrequencyWeight:
    geom = GeometryParams(fov_x=1.0, fov_y=1.0, delta_t=0.02)

    def test_dc_row_is_zero(self):
        g = random_grid(8, 8, 2)
        out = frequency_weight(g, self.geom)
        assert np.all(out.data[g.center_k] == 0)

    def test_single_sample_arithmetic(self):
        # delta_v = 0.5 -> weight at k=1 is j*pi
        g = ComplexGrid.zeros(4, 4)
        g.data[g.center_k + 1, 0] = 1.0
        out = frequency_weight(g, self.geom)
        assert out.data[g.center_k + 1, 0] == pytest.approx(1j * np.pi)

    def test_round_trip_off_dc(self):
        g = random_grid(16, 8, 9)
        w = frequency_weight(g, self.geom)
        back = inverse_frequency_weight(w, self.geom, preserve_dc_from=g)
        assert np.max(np.abs(back.data - g.data)) < 1e-12

    def test_inverse_preserves_dc_row(self):
        g = random_grid(8, 8, 4)
        dc_src = random_grid(8, 8, 5)
        out = inverse_frequency_weight(g, self.geom, preserve_dc_from=dc_src)
        assert np.array_equal(out.data[g.center_k], dc_src.data[g.center_k])

    def test_inverse_of_weight_example(self):
        g = ComplexGrid.zeros(4, 4)
        g.data[g.center_k + 1, 0] = 1j * np.pi
        out = inverse_frequency_weight(g, self.geom, preserve_dc_from=ComplexGrid.zeros(4, 4))
        assert out.data[g.center_k + 1, 0] == pytest.approx(1.0 + 0.0j)

    def test_shape_mismatch_rejected(self):
        g = random_grid(8, 8, 4)
        with pytest.raises(ValueError):
            inverse_frequency_weight(g, self.geom, preserve_dc_from=ComplexGrid.zeros(4, 4))


class TestAcquisitionMask:
    def test_complete_sentinel_is_identity(self):
        g = random_grid(8, 8, 6)
        mask = AcquisitionMask.complete(g)
        assert mask.is_complete
        out = apply_mask(g, mask)
        assert np.array_equal(out.data, g.data)

    def test_counting_acquired_region(self):
        g = ComplexGrid.from_array(np.ones((8, 8)))
        mask = AcquisitionMask.for_grid(g, q=0, m=0)
        out = apply_mask(g, mask)
        # acquired block: k >= 0 and n >= 0, i.e. rows 4..7, cols 4..7 plus
        # the k=0/n=0 edges -> 5x5 ones? centers at (4,4) leave rows 4..7 (k=0..3)
        expected = np.zeros((8, 8))
        expected[4:, 4:] = 1.0
        assert np.array_equal(out.data.real, expected)
        assert int(out.data.real.sum()) == 16

    def test_counting_partial_lines(self):
        # 255x255 with q=10, m=45 acquires (128+10) x (128+45) samples
        mask = AcquisitionMask(255, 255, 127, 127, 10, 45)
        acq = mask.acquired()
        assert acq.sum() == (128 + 10) * (128 + 45)

    def test_idempotent(self):
        g = random_grid(8, 8, 8)
        mask = AcquisitionMask.for_grid(g, q=2, m=3)
        once = apply_mask(g, mask)
        twice = apply_mask(once, mask)
        assert np.array_equal(once.data, twice.data)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            AcquisitionMask(8, 8, 4, 4, 5, 0)
        with pytest.raises(ValueError):
            AcquisitionMask(8, 8, 4, 4, 0, -1)


class TestConjugateReflect:
    def test_real_image_round_trip(self):
        # half-space masking of a conjugate-symmetric grid: every missing
        # sample with an in-range mirror is recovered exactly
        rng = np.random.default_rng(12)
        img = rng.random((16, 16))
        full = dft2_centered(ComplexGrid.from_array(img))
        mask = AcquisitionMask.for_grid(full, q=2, m=full.center_n)
        partial = apply_mask(full, mask)
        filled = conjugate_reflect(partial, mask)
        err = np.abs(filled.data - full.data)
        # k = -8 and n = -8 have no mirror on an even grid; exclude them
        assert err[1:, 1:].max() < 1e-10

    def test_real_sample_conjugation(self):
        g = ComplexGrid.zeros(8, 8)
        g.data[g.center_k + 2, g.center_n + 1] = 3.0
        mask = AcquisitionMask.for_grid(g, q=0, m=0)
        out = conjugate_reflect(g, mask)
        assert out.data[g.center_k - 2, g.center_n - 1] == 3.0 - 0.0j

    def test_fully_acquired_unchanged(self):
        g = random_grid(8, 8, 13)
        out = conjugate_reflect(g, AcquisitionMask.complete(g))
        assert np.array_equal(out.data, g.data)

    def test_acquired_samples_untouched(self):
        g = random_grid(9, 9, 14)
        mask = AcquisitionMask.for_grid(g, q=1, m=2)
        partial = apply_mask(g, mask)
        out = conjugate_reflect(partial, mask)
        acq = mask.acquired()
        assert np.array_equal(out.data[acq], partial.data[acq])

    def test_odd_grid_symmetric_complete_recovery(self):
        rng = np.random.default_rng(21)
        img = rng.random((15, 15))
        full = dft2_centered(ComplexGrid.from_array(img))
        mask = AcquisitionMask.for_grid(full, q=0, m=7)  # half the lines
        partial = apply_mask(full, mask)
        filled = conjugate_reflect(partial, mask)
        assert np.max(np.abs(filled.data - full.data)) < 1e-10
