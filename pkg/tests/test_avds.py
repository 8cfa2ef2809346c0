"""Tests for the adaptive variable-distance contrast filter."""

import math

import numpy as np
import pytest

from avdsprep import (
    AvdsConfig,
    AvdsOutcome,
    DistanceKind,
    InvalidConfig,
    Plane,
    avds_adaptive,
    avds_single,
)
from avdsprep.avds import distance, subwindows

from conftest import random_plane
from oracles import avds as oracle_avds
from oracles import subwindow_values


class TestDistanceKind:
    def test_values_fix_the_tie_break_order(self):
        assert [int(k) for k in DistanceKind] == [0, 1, 2, 3]
        assert DistanceKind.EUCLIDEAN == 0
        assert DistanceKind.BHATTACHARYA == 1
        assert DistanceKind.MANHATTAN == 2
        assert DistanceKind.HAMMING == 3

    def test_labels(self):
        assert [k.label for k in DistanceKind] == [
            "euclidean", "bhattacharya", "manhattan", "hamming",
        ]

    @pytest.mark.parametrize("kind", list(DistanceKind))
    def test_parse_round_trip(self, kind):
        assert DistanceKind.parse(kind.label) is kind
        assert DistanceKind.parse(kind.label.upper()) is kind
        assert DistanceKind.parse(f"  {kind.label} ") is kind

    def test_parse_rejects_unknown(self):
        with pytest.raises(InvalidConfig):
            DistanceKind.parse("chebyshev")


class TestAvdsConfig:
    def test_defaults(self):
        config = AvdsConfig()
        assert config.k == 3
        assert config.omega == 2.0
        assert config.bd_bins == 16
        assert config.epsilon == 1e-9

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k": 1},
            {"k": 2.5},
            {"omega": -0.5},
            {"bd_bins": 1},
            {"bd_bins": 8.0},
            {"epsilon": 0.0},
            {"epsilon": -1e-9},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(InvalidConfig):
            AvdsConfig(**kwargs)

    def test_boundary_values_allowed(self):
        assert AvdsConfig(k=2).k == 2
        assert AvdsConfig(omega=0.0).omega == 0.0
        assert AvdsConfig(bd_bins=2).bd_bins == 2


class TestSubwindows:
    def test_interior_geometry_k3(self):
        plane = Plane(np.add.outer(10.0 * np.arange(7), np.arange(7.0)))
        sws = subwindows(plane, x=3, y=3, k=3)
        assert sws.center_value == 33.0
        assert np.array_equal(sws.nw, [[11, 12, 13], [21, 22, 23], [31, 32, 33]])
        assert np.array_equal(sws.ne, [[13, 14, 15], [23, 24, 25], [33, 34, 35]])
        assert np.array_equal(sws.sw, [[31, 32, 33], [41, 42, 43], [51, 52, 53]])
        assert np.array_equal(sws.se, [[33, 34, 35], [43, 44, 45], [53, 54, 55]])
        assert np.array_equal(sws.c, [[22, 23, 24], [32, 33, 34], [42, 43, 44]])

    def test_every_subwindow_contains_the_center(self):
        plane = Plane(np.add.outer(10.0 * np.arange(9), np.arange(9.0)))
        for x, y, k in [(4, 4, 3), (4, 4, 4), (0, 0, 3), (8, 8, 2), (2, 7, 3)]:
            sws = subwindows(plane, x=x, y=y, k=k)
            for patch in sws.patches:
                assert patch.shape == (k, k)
                assert sws.center_value in patch

    def test_even_k_centered_equals_se(self):
        plane = Plane(np.add.outer(10.0 * np.arange(5), np.arange(5.0)))
        sws = subwindows(plane, x=2, y=2, k=2)
        assert np.array_equal(sws.c, sws.se)

    def test_corner_matches_scalar_reference(self, rng):
        plane = random_plane(rng, 6, 7)
        for x, y, k in [(0, 0, 3), (6, 0, 2), (0, 5, 4), (6, 5, 3)]:
            sws = subwindows(plane, x=x, y=y, k=k)
            expected = subwindow_values(plane.pixels, y, x, k)
            for patch, values in zip(sws.patches, expected):
                assert np.array_equal(patch.ravel(), np.array(values))

    def test_labels_and_patches_align(self):
        plane = Plane(np.zeros((5, 5)))
        sws = subwindows(plane, x=2, y=2, k=2)
        assert sws.labels == ("NW", "NE", "SW", "SE", "C")
        assert len(sws.patches) == 5

    def test_rejects_small_k(self):
        with pytest.raises(InvalidConfig):
            subwindows(Plane(np.zeros((5, 5))), x=2, y=2, k=1)


class TestDistance:
    @pytest.mark.parametrize("kind", list(DistanceKind))
    def test_uniform_patch_is_zero(self, kind):
        patch = np.full((3, 3), 42.0)
        assert distance(patch, 42.0, kind) == 0.0

    def test_euclidean_example(self):
        assert distance([5.0, 5.0, 5.0, 9.0], 5.0, DistanceKind.EUCLIDEAN) == 4.0

    def test_manhattan_example(self):
        assert distance([5.0, 5.0, 5.0, 9.0], 5.0, DistanceKind.MANHATTAN) == 4.0

    def test_hamming_counts_quantized_mismatches(self):
        values = [100.4, 100.6, 101.0, 99.0]
        assert distance(values, 100.0, DistanceKind.HAMMING) == 3.0

    def test_hamming_rounds_half_up(self):
        # floor(v + 0.5): 99.5 joins 100, 100.5 leaves it.
        assert distance([99.5, 100.5], 100.0, DistanceKind.HAMMING) == 1.0

    def test_hamming_is_an_integer_count(self, rng):
        for _ in range(20):
            patch = rng.uniform(0.0, 255.0, (3, 3))
            d = distance(patch, float(rng.uniform(0.0, 255.0)), DistanceKind.HAMMING)
            assert d == math.floor(d)
            assert 0.0 <= d <= patch.size

    def test_bhattacharya_disjoint_bins(self):
        # All nine samples land in bin 0, the center in bin 15; the
        # expected value is recomputed here from the floored histograms.
        config = AvdsConfig()
        bins = config.bd_bins
        d = distance(np.zeros((3, 3)), 255.0, DistanceKind.BHATTACHARYA, config)
        p = np.full(bins, 1e-6)
        p[0] = 1.0
        q = np.full(bins, 1e-6)
        q[bins - 1] = 1.0
        bc = np.sum(np.sqrt((p / p.sum()) * (q / q.sum())))
        assert d == pytest.approx(-math.log(bc), rel=1e-12)

    def test_bhattacharya_respects_bin_count(self):
        # With 2 bins, 0 and 100 share bin 0 so the distance collapses.
        wide = distance(np.zeros((2, 2)), 100.0, DistanceKind.BHATTACHARYA,
                        AvdsConfig(bd_bins=16))
        narrow = distance(np.zeros((2, 2)), 100.0, DistanceKind.BHATTACHARYA,
                          AvdsConfig(bd_bins=2))
        assert narrow == 0.0
        assert wide > 1.0


class TestAvdsSingle:
    @pytest.mark.parametrize("kind", list(DistanceKind))
    @pytest.mark.parametrize("level", [0.0, 77.25, 255.0])
    def test_constant_plane_is_exact_fixed_point(self, kind, level):
        plane = Plane(np.full((6, 6), level))
        out = avds_single(plane, kind, AvdsConfig(k=3, omega=2.0))
        assert np.array_equal(out.pixels, plane.pixels)

    def test_omega_zero_averages_subwindow_means(self, rng):
        # With omega = 0 every non-degenerate weight is 1, so the output is
        # the plain average of the five sub-window means.
        plane = random_plane(rng, 8, 9)
        k = 3
        pad = k - 1
        padded = np.pad(plane.pixels, pad, mode="reflect")
        h, w = plane.pixels.shape

        def mean_at(ay, ax):
            acc = np.zeros((h, w))
            for dy in range(k):
                for dx in range(k):
                    acc += padded[ay + dy:ay + dy + h, ax + dx:ax + dx + w]
            return acc / (k * k)

        mid = k // 2
        mus = [mean_at(0, 0), mean_at(0, pad), mean_at(pad, 0),
               mean_at(pad, pad), mean_at(mid, mid)]
        expected = sum(mus) / 5.0
        out = avds_single(plane, DistanceKind.EUCLIDEAN, AvdsConfig(k=k, omega=0.0))
        assert np.max(np.abs(out.pixels - expected)) <= 1e-11

    def test_step_plane_matches_reference(self):
        pixels = np.where(np.arange(8)[None, :] < 4, 0.0, 200.0) * np.ones((8, 1))
        plane = Plane(pixels)
        config = AvdsConfig(k=3, omega=2.0)
        out = avds_single(plane, DistanceKind.EUCLIDEAN, config)
        expected = oracle_avds(pixels, 3, 2.0, int(DistanceKind.EUCLIDEAN))
        assert np.max(np.abs(out.pixels - expected)) <= 1e-12

    @pytest.mark.parametrize("kind", list(DistanceKind))
    @pytest.mark.parametrize("k,omega", [(2, 1.0), (3, 2.0), (3, 3.5)])
    def test_matches_scalar_reference(self, rng, kind, k, omega):
        plane = random_plane(rng, 7, 6)
        config = AvdsConfig(k=k, omega=omega)
        out = avds_single(plane, kind, config)
        expected = oracle_avds(plane.pixels, k, omega, int(kind),
                               config.bd_bins, config.epsilon)
        assert np.max(np.abs(out.pixels - expected)) <= 1e-12

    @pytest.mark.parametrize("kind", list(DistanceKind))
    def test_output_within_input_range(self, rng, kind):
        plane = random_plane(rng, 10, 10, 30.0, 220.0)
        out = avds_single(plane, kind)
        assert out.pixels.min() >= plane.pixels.min()
        assert out.pixels.max() <= plane.pixels.max()

    def test_growing_omega_concentrates_on_closest_subwindow(self):
        # The centered sub-window has by far the smallest distance, so the
        # output converges to its mean as omega grows.
        pixels = np.full((5, 5), 100.0)
        pixels[2, 2] = 100.5
        for y, x in [(0, 0), (0, 4), (4, 0), (4, 4)]:
            pixels[y, x] = 200.0
        plane = Plane(pixels)
        mu_c = (100.0 * 8 + 100.5) / 9.0
        gaps = []
        for omega in (0.0, 1.0, 2.0, 4.0):
            out = avds_single(plane, DistanceKind.EUCLIDEAN,
                              AvdsConfig(k=3, omega=omega))
            gaps.append(abs(float(out.pixels[2, 2]) - mu_c))
        for wide, tight in zip(gaps, gaps[1:]):
            assert tight <= wide + 1e-12

    @pytest.mark.parametrize("kind", [DistanceKind.EUCLIDEAN, DistanceKind.MANHATTAN])
    def test_single_degenerate_subwindow_wins_outright(self, kind):
        # The NW sub-window of the middle pixel matches the center exactly,
        # so its mean is the answer regardless of the other distances.
        plane = Plane(np.array([
            [50.0, 50.0, 60.0],
            [50.0, 50.0, 70.0],
            [80.0, 90.0, 100.0],
        ]))
        out = avds_single(plane, kind, AvdsConfig(k=2, omega=2.0))
        assert out.pixels[1, 1] == 50.0

    def test_multiple_degenerate_subwindows_average(self):
        # NW and NE both quantize to the center level (Hamming distance 0)
        # with different means; the output is their unweighted average.
        plane = Plane(np.array([
            [100.4, 99.6, 100.4],
            [100.2, 100.0, 99.8],
            [150.0, 160.0, 170.0],
        ]))
        out = avds_single(plane, DistanceKind.HAMMING, AvdsConfig(k=2, omega=2.0))
        assert abs(float(out.pixels[1, 1]) - 100.0) <= 1e-12


class TestAvdsAdaptive:
    def test_constant_plane_breaks_tie_toward_euclidean(self):
        plane = Plane(np.full((6, 6), 99.0))
        outcome = avds_adaptive(plane)
        assert outcome.chosen is DistanceKind.EUCLIDEAN
        assert all(value == 0.0 for value in outcome.contrasts.values())
        assert np.array_equal(outcome.chosen_output.pixels, plane.pixels)

    def test_chosen_matches_independent_argmax(self, rng):
        plane = random_plane(rng, 12, 11)
        config = AvdsConfig(k=3, omega=2.0)
        outcome = avds_adaptive(plane, config)
        contrasts = {
            kind: float(np.std(avds_single(plane, kind, config).pixels))
            for kind in DistanceKind
        }
        best = max(DistanceKind, key=lambda kind: (contrasts[kind], -int(kind)))
        assert outcome.chosen is best
        for kind in DistanceKind:
            assert outcome.contrasts[kind] == contrasts[kind]

    def test_chosen_output_is_bit_identical_to_single_run(self, rng):
        plane = random_plane(rng, 9, 8)
        outcome = avds_adaptive(plane)
        rerun = avds_single(plane, outcome.chosen)
        assert np.array_equal(outcome.chosen_output.pixels, rerun.pixels)
        assert outcome.chosen_output is outcome.outputs[outcome.chosen]

    def test_outcome_covers_every_kind(self, rng):
        outcome = avds_adaptive(random_plane(rng, 5, 5))
        assert set(outcome.outputs) == set(DistanceKind)
        assert set(outcome.contrasts) == set(DistanceKind)

    def test_outcome_rejects_partial_maps(self, rng):
        plane = random_plane(rng, 4, 4)
        out = avds_single(plane, DistanceKind.EUCLIDEAN)
        with pytest.raises(InvalidConfig):
            AvdsOutcome(
                outputs={DistanceKind.EUCLIDEAN: out},
                contrasts={DistanceKind.EUCLIDEAN: 0.0},
                chosen=DistanceKind.EUCLIDEAN,
            )
