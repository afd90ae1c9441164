import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from herzlab.herz import shell_decomposition
from herzlab.spectral import (
    FrequencyGrid,
    GridMismatchError,
    ScalarField,
    SpectralField,
    convolve,
    convolve_direct,
    fft_size,
    cropped_ifft,
    padded_fft,
    is_divergence_free,
    leray_project,
    load_field,
    save_field,
    solve_u3_from_divergence,
)
from herzlab.symmetry import ParityLabel, measure_label

from conftest import random_complex


def brute_convolution(a, b, grid):
    """Literal double loop over pairs of modes."""
    N = grid.half_extent
    out = np.zeros(grid.shape, dtype=complex)
    rng = range(-N, N + 1)
    for k in itertools.product(rng, rng, rng):
        for m in itertools.product(rng, rng, rng):
            d = tuple(ki - mi for ki, mi in zip(k, m))
            if max(abs(x) for x in d) > N:
                continue
            out[grid.index(k)] += a[grid.index(d)] * b[grid.index(m)]
    return grid.cell_volume * out


class TestGrid:
    def test_mode_count(self):
        g = FrequencyGrid(3, 0.5)
        assert g.size == 7**3
        assert g.xi.shape == (3, 7, 7, 7)

    @pytest.mark.parametrize("N,h", [(0, 1.0), (2, 0.0), (2, -1.0), (1.5, 1.0)])
    def test_rejects_bad_parameters(self, N, h):
        with pytest.raises(ValueError):
            FrequencyGrid(N, h)

    def test_reflection_and_swap_closure(self, grid4):
        xi = grid4.xi
        for s in range(3):
            np.testing.assert_array_equal(np.flip(xi[s], axis=s), -xi[s])
        np.testing.assert_array_equal(np.swapaxes(xi[0], 0, 1), xi[1])

    def test_origin_excluded_from_divisions(self, grid4):
        o = grid4.origin
        assert grid4.inv_xi2[o] == 0 and grid4.inv_xi_norm[o] == 0
        assert not grid4.nonzero[o]

    def test_arrays_read_only(self, grid4):
        with pytest.raises(ValueError):
            grid4.xi[0, 0, 0, 0] = 1.0


class TestConvolve:
    def test_origin_impulses(self, grid4):
        f = ScalarField.impulse(grid4, (0, 0, 0))
        out = convolve(f, f)
        expected = np.zeros(grid4.shape)
        expected[grid4.origin] = grid4.cell_volume
        np.testing.assert_allclose(out.values, expected, atol=1e-15)

    def test_shift(self, grid4):
        f = ScalarField.impulse(grid4, (1, 0, 0))
        g = ScalarField.impulse(grid4, (0, 1, 0))
        out = convolve(f, g).values
        expected = np.zeros(grid4.shape)
        expected[grid4.index((1, 1, 0))] = grid4.cell_volume
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_truncation_drops_out_of_grid_modes(self, grid4):
        f = ScalarField.impulse(grid4, (4, 0, 0))
        out = convolve(f, f).values
        assert np.max(np.abs(out)) < 1e-15

    def test_no_wraparound(self, grid4):
        # corner modes must not alias onto the opposite side of the cube
        f = ScalarField.impulse(grid4, (4, 4, 4))
        g = ScalarField.impulse(grid4, (1, 1, 1))
        assert np.max(np.abs(convolve(f, g).values)) < 1e-15

    def test_shell_indicator_matches_direct_sum(self, grid8):
        ind = (shell_decomposition(grid8).shell_index == 0).astype(float)
        f = ScalarField(grid8, ind)
        fast = convolve(f, f).values
        slow = convolve_direct(f, f).values
        assert np.max(np.abs(fast - slow)) <= 1e-12 * np.max(np.abs(slow))

    def test_direct_sum_against_literal_loops(self):
        g = FrequencyGrid(2, 0.5)
        rng = np.random.default_rng(3)
        a, b = random_complex(rng, g.shape), random_complex(rng, g.shape)
        expected = brute_convolution(a, b, g)
        got = convolve_direct(ScalarField(g, a), ScalarField(g, b)).values
        np.testing.assert_allclose(got, expected, rtol=1e-13, atol=1e-15)

    @given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 4))
    def test_fft_matches_direct(self, seed, N):
        g = FrequencyGrid(N, 0.5)
        rng = np.random.default_rng(seed)
        f, h = ScalarField(g, random_complex(rng, g.shape)), ScalarField(g, random_complex(rng, g.shape))
        fast, slow = convolve(f, h).values, convolve_direct(f, h).values
        assert np.max(np.abs(fast - slow)) <= 1e-12 * np.max(np.abs(slow))

    @given(seed=st.integers(0, 2**32 - 1))
    def test_commutative(self, seed):
        g = FrequencyGrid(3, 0.5)
        rng = np.random.default_rng(seed)
        f, h = ScalarField(g, random_complex(rng, g.shape)), ScalarField(g, random_complex(rng, g.shape))
        a, b = convolve(f, h).values, convolve(h, f).values
        assert np.max(np.abs(a - b)) <= 1e-14 * np.max(np.abs(a))

    def test_real_and_complex_paths_agree(self, grid4):
        rng = np.random.default_rng(0)
        a, b = rng.random(grid4.shape), rng.random(grid4.shape)
        real = convolve(ScalarField(grid4, a), ScalarField(grid4, b)).values
        cplx = convolve(ScalarField(grid4, a + 0j), ScalarField(grid4, b + 0j)).values
        np.testing.assert_allclose(real, cplx.real, rtol=1e-12, atol=1e-14)

    def test_transform_round_trip(self, grid4):
        rng = np.random.default_rng(1)
        a = random_complex(rng, grid4.shape)
        N = grid4.half_extent
        back = cropped_ifft(padded_fft(a, N), N, offset=0)
        assert np.max(np.abs(back - a)) <= 1e-12 * np.max(np.abs(a))
        assert fft_size(N) >= 3 * N + 1

    def test_grid_mismatch(self, grid4):
        other = FrequencyGrid(4, 0.25)
        with pytest.raises(GridMismatchError):
            convolve(ScalarField.zeros(grid4), ScalarField.zeros(other))

    def test_unknown_method(self, grid4):
        with pytest.raises(ValueError):
            convolve(ScalarField.zeros(grid4), ScalarField.zeros(grid4), method="circular")


class TestLeray:
    def test_gradient_field_is_removed(self, grid4):
        rng = np.random.default_rng(0)
        phi = random_complex(rng, grid4.shape)
        u = SpectralField(grid4, grid4.xi * phi)
        assert leray_project(u).max_amplitude() <= 1e-14 * u.max_amplitude()

    def test_hand_evaluated_mode(self, grid4):
        data = np.zeros((3, *grid4.shape), dtype=complex)
        idx = grid4.index((1, 1, 0))
        data[0][idx] = 1.0
        v = leray_project(SpectralField(grid4, data)).data
        np.testing.assert_allclose(v[:, idx[0], idx[1], idx[2]], [0.5, -0.5, 0.0], atol=1e-15)

    def test_origin_zeroed(self, grid4):
        data = np.ones((3, *grid4.shape), dtype=complex)
        v = leray_project(SpectralField(grid4, data)).data
        assert np.all(v[(slice(None), *grid4.origin)] == 0)

    @given(seed=st.integers(0, 2**32 - 1))
    def test_idempotent_and_divergence_free(self, seed):
        g = FrequencyGrid(3, 0.5)
        rng = np.random.default_rng(seed)
        data = random_complex(rng, (3, *g.shape))
        data /= np.max(np.abs(data))
        once = leray_project(SpectralField(g, data))
        twice = leray_project(once)
        assert np.max(np.abs(twice.data - once.data)) <= 1e-14
        div = np.abs(np.sum(g.xi * once.data, axis=0))
        assert np.max(div) <= 1e-13
        assert is_divergence_free(once)


class TestEdiv:
    def test_zero_input(self, grid4):
        u3, mask = solve_u3_from_divergence(ScalarField.zeros(grid4), ScalarField.zeros(grid4))
        assert np.all(u3.values == 0)
        assert mask.sum() == grid4.n**2

    def test_x2_pattern_label_and_divergence(self, grid4):
        x1, x2, x3 = grid4.xi
        env = np.exp(-grid4.xi2)
        u1 = ScalarField(grid4, env * (x2 * x3 + 1j * x1))
        u2 = ScalarField(grid4, env * (x1 * x3 + 1j * x2))
        u3, mask = solve_u3_from_divergence(u1, u2)
        assert measure_label(u3) == ParityLabel.parse("110|001")
        u = SpectralField.from_components(u1, u2, u3)
        div = np.abs(np.sum(grid4.xi * u.data, axis=0))
        assert np.max(div[~mask]) <= 1e-14 * u.max_amplitude()


class TestSerialization:
    @pytest.mark.parametrize("suffix", [".json", ".npz"])
    def test_vector_round_trip_bit_exact(self, tmp_path, grid4, suffix):
        rng = np.random.default_rng(5)
        u = SpectralField(grid4, random_complex(rng, (3, *grid4.shape)) / 3.0)
        path = tmp_path / f"u{suffix}"
        save_field(u, path)
        back = load_field(path)
        assert back.grid == u.grid
        assert np.array_equal(back.data, u.data)

    def test_scalar_round_trip(self, tmp_path, grid4):
        f = ScalarField(grid4, np.random.default_rng(1).random(grid4.shape))
        save_field(f, tmp_path / "f.json")
        back = load_field(tmp_path / "f.json")
        assert isinstance(back, ScalarField)
        assert np.array_equal(back.values.real, f.values)

    def test_rejects_foreign_file(self, tmp_path):
        (tmp_path / "x.json").write_text('{"format": "other"}')
        with pytest.raises(ValueError):
            load_field(tmp_path / "x.json")


def test_fields_reject_non_finite(grid4):
    bad = np.zeros(grid4.shape)
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        ScalarField(grid4, bad)
