from fractions import Fraction

import numpy as np
import pytest

from mixkit import (
    MixConfig,
    MixedLabel,
    Region,
    crop,
    cutmix,
    halfres_transform,
    mix_labels,
    mix_matrix,
    mixup,
    paste,
    resize,
    resizemix,
)

from conftest import ScriptedRNG, random_image, rng
from oracles import bilinear_reference, check_mix_partition, crop_reference

ALL_COMBOS = [
    (obtain, paste_to)
    for obtain in ("cut_random", "cut_salient", "cut_non_salient", "resize_whole")
    for paste_to in ("corresponding", "random", "salient", "non_salient")
]


def heatmap_for(seed, w, h):
    return rng(seed).integers(0, 256, size=(h, w)).astype(np.float64) / 255.0


def combo_config(obtain, paste_to):
    if obtain == "resize_whole" and paste_to == "corresponding":
        return MixConfig(obtain=obtain, paste_to=paste_to, alpha=1.0, beta=1.0)
    return MixConfig(obtain=obtain, paste_to=paste_to, alpha=0.25, beta=0.9)


class TestPaste:
    def test_full_image_patch_replaces_target(self):
        src = random_image(1, 6, 6)
        tgt = random_image(2, 6, 6)
        np.testing.assert_array_equal(paste(src, tgt, Region(0, 6, 0, 6)), src)

    def test_crop_then_paste_at_same_region_is_identity(self):
        img = random_image(3, 8, 8)
        r = Region(2, 7, 1, 5)
        np.testing.assert_array_equal(paste(crop(img, r), img, r), img)

    def test_white_patch_on_black(self):
        tgt = np.zeros((8, 8, 1), dtype=np.uint8)
        patch = np.full((3, 3, 1), 255, dtype=np.uint8)
        out = paste(patch, tgt, Region(2, 5, 2, 5))
        assert int(out.sum()) == 9 * 255
        assert np.all(out[2:5, 2:5] == 255)

    def test_target_not_modified(self):
        tgt = np.zeros((4, 4, 1), dtype=np.uint8)
        paste(np.full((2, 2, 1), 9, dtype=np.uint8), tgt, Region(0, 2, 0, 2))
        assert np.all(tgt == 0)

    def test_extent_mismatch_rejected(self):
        with pytest.raises(ValueError):
            paste(np.zeros((2, 2, 1), np.uint8), np.zeros((8, 8, 1), np.uint8), Region(0, 3, 0, 2))

    def test_out_of_bounds_rejected(self):
        with pytest.raises(ValueError):
            paste(np.zeros((2, 2, 1), np.uint8), np.zeros((4, 4, 1), np.uint8), Region(3, 5, 0, 2))


class TestMixLabels:
    def test_quarter_weight_pair(self):
        out = mix_labels(3, 7, Fraction(1, 4))
        assert out.entries == ((3, Fraction(1, 4)), (7, Fraction(3, 4)))

    def test_same_class_merges_to_one(self):
        out = mix_labels(2, 2, Fraction(3, 10))
        assert out.entries == ((2, Fraction(1)),)

    def test_endpoint_lambda_one(self):
        out = mix_labels(4, 9, 1)
        assert out.entries == ((4, Fraction(1)),)

    def test_endpoint_lambda_zero(self):
        out = mix_labels(4, 9, 0)
        assert out.entries == ((9, Fraction(1)),)

    def test_weights_sum_exactly_one(self):
        g = rng(17)
        for _ in range(200):
            lam = Fraction(int(g.integers(0, 1000)), 1000)
            out = mix_labels(int(g.integers(0, 50)), int(g.integers(0, 50)), lam)
            assert sum(w for _, w in out.entries) == 1
            assert len(out.entries) <= 2

    def test_soft_inputs_mix_exactly(self):
        soft = MixedLabel.from_pairs([(0, Fraction(1, 2)), (5, Fraction(1, 2))])
        out = mix_labels(soft, 5, Fraction(1, 3))
        assert out.weight(0) == Fraction(1, 6)
        assert out.weight(5) == Fraction(5, 6)
        assert sum(w for _, w in out.entries) == 1

    def test_float_lambda_is_exact(self):
        out = mix_labels(1, 2, 0.1)
        assert sum(w for _, w in out.entries) == 1

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            mix_labels(1, 2, Fraction(5, 4))


class TestCutmix:
    def test_area_fraction_one_reproduces_source(self):
        src = random_image(4, 16, 12)
        tgt = random_image(5, 16, 12)
        res = cutmix(src, tgt, 0, 1, ScriptedRNG(random_values=[1.0]))
        np.testing.assert_array_equal(res.image, src)
        assert res.lam == 1
        assert res.label.entries == ((0, Fraction(1)),)

    def test_area_fraction_zero_gives_single_pixel_patch(self):
        src = random_image(6, 16, 12)
        tgt = random_image(7, 16, 12)
        res = cutmix(src, tgt, 0, 1, ScriptedRNG(random_values=[0.0]))
        assert res.paste_region.area() == 1
        assert res.lam == Fraction(1, 16 * 12)
        diff = np.any(res.image != tgt, axis=2)
        assert diff.sum() <= 1

    def test_source_and_paste_regions_coincide(self):
        src = random_image(8, 10, 10)
        tgt = random_image(9, 10, 10)
        res = cutmix(src, tgt, 0, 1, rng(3))
        assert res.source_region == res.paste_region

    def test_composition_matches_replayed_draws(self):
        import math

        src = random_image(10, 14, 9)
        tgt = random_image(11, 14, 9)
        res = cutmix(src, tgt, 0, 1, rng(21))
        g = rng(21)
        lam_target = float(g.random())
        w_p = min(max(int(math.floor(14 * math.sqrt(lam_target) + 0.5)), 1), 14)
        h_p = min(max(int(math.floor(9 * math.sqrt(lam_target) + 0.5)), 1), 9)
        x_c = int(g.integers(0, 14))
        y_c = int(g.integers(0, 9))
        from mixkit import region_from_center

        r = region_from_center((x_c, y_c), w_p, h_p, 14, 9)
        assert res.paste_region == r
        np.testing.assert_array_equal(res.image, paste(crop(src, r), tgt, r))

    def test_lambda_equals_realized_area_ratio(self):
        src = random_image(12, 11, 7)
        tgt = random_image(13, 11, 7)
        for seed in range(50):
            res = cutmix(src, tgt, 0, 1, rng(seed))
            assert res.lam == Fraction(res.paste_region.area(), 11 * 7)
            assert res.label.weight(0) == res.lam
            assert res.label.weight(1) == 1 - res.lam

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            cutmix(random_image(1, 4, 4), random_image(2, 5, 4), 0, 1, rng(0))


class TestResizemix:
    def test_scale_one_reproduces_source(self):
        src = random_image(14, 12, 12)
        tgt = random_image(15, 12, 12)
        res = resizemix(src, tgt, 0, 1, rng=ScriptedRNG(uniform_values=[1.0]))
        np.testing.assert_array_equal(res.image, src)
        assert res.lam == 1
        assert res.tau == 1.0

    def test_half_scale_on_32(self):
        src = random_image(16, 32, 32)
        tgt = random_image(17, 32, 32)
        res = resizemix(src, tgt, 0, 1, rng=ScriptedRNG(uniform_values=[0.5]))
        assert res.paste_region.width() == 16
        assert res.paste_region.height() == 16
        assert res.lam == Fraction(1, 4)
        assert res.source_region is None

    def test_matches_matrix_cell_on_shared_stream(self):
        src = random_image(18, 20, 16)
        tgt = random_image(19, 20, 16)
        cfg = MixConfig(obtain="resize_whole", paste_to="random", alpha=0.3, beta=0.7)
        a = resizemix(src, tgt, 0, 1, 0.3, 0.7, rng=rng(40))
        b = mix_matrix(src, tgt, 0, 1, cfg, rng=rng(40))
        np.testing.assert_array_equal(a.image, b.image)
        assert a.lam == b.lam and a.tau == b.tau and a.paste_region == b.paste_region

    def test_lambda_close_to_tau_squared(self):
        src = random_image(20, 32, 32)
        tgt = random_image(21, 32, 32)
        bound = 2 / 32 + 2 / 32 + 1 / (32 * 32)
        for seed in range(100):
            res = resizemix(src, tgt, 0, 1, rng=rng(seed))
            assert abs(float(res.lam) - res.tau**2) <= bound

    def test_default_scale_range(self):
        src = random_image(22, 24, 24)
        tgt = random_image(23, 24, 24)
        for seed in range(100):
            res = resizemix(src, tgt, 0, 1, rng=rng(seed))
            assert 0.1 <= res.tau <= 0.8

    def test_patch_content_is_resized_source(self):
        src = random_image(24, 18, 14)
        tgt = random_image(25, 18, 14)
        res = resizemix(src, tgt, 0, 1, rng=rng(77))
        r = res.paste_region
        expected_patch = resize(src, r.width(), r.height())
        np.testing.assert_array_equal(res.image[r.y_b : r.y_t, r.x_l : r.x_r], expected_patch)


class TestMixup:
    def test_endpoints(self):
        src = random_image(26, 7, 7)
        tgt = random_image(27, 7, 7)
        np.testing.assert_array_equal(mixup(src, tgt, 0, 1, 1.0).image, src)
        np.testing.assert_array_equal(mixup(src, tgt, 0, 1, 0.0).image, tgt)

    def test_halfway_rounds_half_away_from_zero(self):
        src = np.full((1, 1, 1), 100, dtype=np.uint8)
        tgt = np.full((1, 1, 1), 51, dtype=np.uint8)
        out = mixup(src, tgt, 0, 1, 0.5)
        assert out.image[0, 0, 0] == 76

    def test_paste_region_is_full_frame(self):
        src = random_image(28, 5, 9)
        tgt = random_image(29, 5, 9)
        res = mixup(src, tgt, 0, 1, 0.25)
        assert res.paste_region == Region(0, 5, 0, 9)
        assert res.source_region is None
        assert res.tau is None
        assert res.lam == Fraction(1, 4)

    def test_label_uses_blend_weight(self):
        res = mixup(random_image(1, 4, 4), random_image(2, 4, 4), 3, 8, 0.5)
        assert res.label.weight(3) == Fraction(1, 2)
        assert res.label.weight(8) == Fraction(1, 2)

    def test_out_of_range_weight_rejected(self):
        with pytest.raises(ValueError):
            mixup(random_image(1, 4, 4), random_image(2, 4, 4), 0, 1, 1.5)


class TestMixMatrix:
    def test_cut_random_corresponding_equals_cutmix(self):
        src = random_image(30, 13, 11)
        tgt = random_image(31, 13, 11)
        cfg = MixConfig(obtain="cut_random", paste_to="corresponding")
        for seed in range(25):
            a = cutmix(src, tgt, 0, 1, rng(seed))
            b = mix_matrix(src, tgt, 0, 1, cfg, rng=rng(seed))
            np.testing.assert_array_equal(a.image, b.image)
            assert a.lam == b.lam
            assert a.source_region == b.source_region
            assert a.paste_region == b.paste_region
            assert a.label == b.label

    def test_cut_salient_singleton_centers_on_argmax(self):
        src = random_image(32, 9, 9)
        tgt = random_image(33, 9, 9)
        hm = np.zeros((9, 9))
        hm[6, 2] = 1.0
        cfg = MixConfig(obtain="cut_salient", paste_to="random")
        res = mix_matrix(src, tgt, 0, 1, cfg, src_heatmap=hm, rng=ScriptedRNG(random_values=[0.25], seed=5))
        # area fraction 0.25 on 9x9 rounds to a 5x5 patch (4.5 rounds up)
        assert res.source_region.width() == 5
        cx, cy = res.source_region.center()
        assert abs(cx - 2) <= 0.5 and abs(cy - 6) <= 0.5

    def test_missing_source_heatmap_rejected(self):
        cfg = MixConfig(obtain="cut_salient", paste_to="random")
        with pytest.raises(ValueError, match="source heatmap"):
            mix_matrix(random_image(1, 8, 8), random_image(2, 8, 8), 0, 1, cfg, rng=rng(0))

    def test_missing_target_heatmap_rejected(self):
        cfg = MixConfig(obtain="cut_random", paste_to="salient")
        with pytest.raises(ValueError, match="target heatmap"):
            mix_matrix(random_image(1, 8, 8), random_image(2, 8, 8), 0, 1, cfg, rng=rng(0))

    def test_heatmap_dimension_mismatch_rejected(self):
        cfg = MixConfig(obtain="cut_salient", paste_to="random")
        with pytest.raises(ValueError, match="match image"):
            mix_matrix(
                random_image(1, 8, 8),
                random_image(2, 8, 8),
                0,
                1,
                cfg,
                src_heatmap=heatmap_for(3, 4, 4),
                rng=rng(0),
            )

    def test_resize_whole_corresponding_needs_unit_scale(self):
        cfg = MixConfig(obtain="resize_whole", paste_to="corresponding")
        with pytest.raises(ValueError, match="alpha == beta == 1"):
            mix_matrix(random_image(1, 8, 8), random_image(2, 8, 8), 0, 1, cfg, rng=rng(0))

    def test_resize_whole_corresponding_unit_scale_reproduces_source(self):
        src = random_image(34, 6, 6)
        tgt = random_image(35, 6, 6)
        cfg = MixConfig(obtain="resize_whole", paste_to="corresponding", alpha=1.0, beta=1.0)
        res = mix_matrix(src, tgt, 0, 1, cfg, rng=rng(0))
        np.testing.assert_array_equal(res.image, src)
        assert res.lam == 1
        assert res.paste_region == Region(0, 6, 0, 6)

    def test_invalid_modes_rejected(self):
        with pytest.raises(ValueError):
            MixConfig(obtain="cut_everything", paste_to="random").validate()
        with pytest.raises(ValueError):
            MixConfig(obtain="cut_random", paste_to="nowhere").validate()
        with pytest.raises(ValueError):
            MixConfig(obtain="resize_whole", paste_to="random", alpha=0.9, beta=0.2).validate()
        with pytest.raises(ValueError):
            MixConfig(obtain="resize_whole", paste_to="random", alpha=0.0).validate()

    @pytest.mark.parametrize("obtain,paste_to", ALL_COMBOS)
    def test_partition_oracle_every_combo(self, obtain, paste_to):
        src = random_image(100, 11, 9)
        tgt = random_image(101, 11, 9)
        src_hm = heatmap_for(102, 11, 9)
        tgt_hm = heatmap_for(103, 11, 9)
        cfg = combo_config(obtain, paste_to)
        res = mix_matrix(src, tgt, 0, 1, cfg, src_hm, tgt_hm, rng=rng(55))
        r = res.paste_region
        if obtain == "resize_whole":
            patch = bilinear_reference(src, r.width(), r.height())
        else:
            s = res.source_region
            patch = crop_reference(src, s.x_l, s.x_r, s.y_b, s.y_t)
        assert check_mix_partition(res.image, patch, tgt, r.x_l, r.x_r, r.y_b, r.y_t)
        assert res.lam == Fraction(r.area(), 11 * 9)

    def test_self_mix_label_collapses(self):
        img = random_image(36, 8, 8)
        cfg = MixConfig(obtain="cut_random", paste_to="random")
        res = mix_matrix(img, img, 4, 4, cfg, rng=rng(8))
        assert res.label.entries == ((4, Fraction(1)),)


class TestInformationPreservation:
    def test_resize_obtain_keeps_every_source_pixel_at_half_scale_or_more(self):
        # at scale rates >= 0.5 every source pixel lands in some bilinear
        # window; flipping a pixel's high bit must change the patch
        g = rng(60)
        for trial in range(40):
            src = random_image(200 + trial, 16, 16)
            tgt = random_image(300 + trial, 16, 16)
            tau = float(g.uniform(0.5, 1.0))
            script = [tau]
            seed = int(g.integers(0, 2**32))
            res = resizemix(src, tgt, 0, 1, rng=ScriptedRNG(uniform_values=list(script), seed=seed))
            x = int(g.integers(0, 16))
            y = int(g.integers(0, 16))
            perturbed = src.copy()
            perturbed[y, x] ^= 0x80
            res2 = resizemix(perturbed, tgt, 0, 1, rng=ScriptedRNG(uniform_values=list(script), seed=seed))
            assert res.paste_region == res2.paste_region
            if res.paste_region.width() >= 2 and res.paste_region.height() >= 2:
                assert np.any(res.image != res2.image), (trial, tau, x, y)

    def test_cut_obtain_discards_pixels_outside_the_region(self):
        src = random_image(400, 16, 16)
        tgt = random_image(401, 16, 16)
        res = cutmix(src, tgt, 0, 1, ScriptedRNG(random_values=[0.25], seed=9))
        s = res.source_region
        outside = [(x, y) for x in range(16) for y in range(16)
                   if not (s.x_l <= x < s.x_r and s.y_b <= y < s.y_t)]
        assert outside
        x, y = outside[0]
        perturbed = src.copy()
        perturbed[y, x] ^= 0x80
        res2 = cutmix(perturbed, tgt, 0, 1, ScriptedRNG(random_values=[0.25], seed=9))
        np.testing.assert_array_equal(res.image, res2.image)


class TestHalfres:
    def test_resize_mode_constant_image(self):
        img = np.full((8, 8, 1), 50, dtype=np.uint8)
        out = halfres_transform(img, "resize")
        assert out.shape == (4, 4, 1)
        assert np.all(out == 50)

    def test_center_crop_mode(self):
        img = random_image(37, 4, 4)
        out = halfres_transform(img, "center_crop")
        np.testing.assert_array_equal(out, img[1:3, 1:3])

    def test_rand_crop_in_bounds_over_many_seeds(self):
        img = random_image(38, 5, 5)
        for seed in range(100):
            out = halfres_transform(img, "rand_crop", rng(seed))
            assert out.shape == (2, 2, 3)
            found = False
            for y0 in range(4):
                for x0 in range(4):
                    if np.array_equal(out, img[y0 : y0 + 2, x0 : x0 + 2]):
                        found = True
            assert found

    def test_odd_dims_floor(self):
        img = random_image(39, 7, 9)
        out = halfres_transform(img, "resize")
        assert out.shape == (4, 3, 3)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            halfres_transform(np.zeros((1, 4, 1), np.uint8), "resize")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            halfres_transform(random_image(1, 4, 4), "stretch")

    def test_rand_crop_needs_rng(self):
        with pytest.raises(ValueError):
            halfres_transform(random_image(1, 4, 4), "rand_crop")


class TestMixedLabelInvariants:
    def test_duplicate_classes_rejected_raw(self):
        with pytest.raises(ValueError):
            MixedLabel(((1, Fraction(1, 2)), (1, Fraction(1, 2))))

    def test_bad_sum_rejected(self):
        with pytest.raises(ValueError):
            MixedLabel(((1, Fraction(1, 2)),))

    def test_from_pairs_drops_zeros(self):
        lbl = MixedLabel.from_pairs([(1, Fraction(0)), (2, Fraction(1))])
        assert lbl.entries == ((2, Fraction(1)),)

    def test_json_form(self):
        lbl = mix_labels(3, 7, Fraction(1, 4))
        assert lbl.to_json() == [[3, 0.25], [7, 0.75]]
