"""
Test corpus I/O
Leitura/escrita de PGM, manifesto, normalização e aumento balanceado
"""

import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.corpus.augmentation import (
    AffineBounds, AffineParams, apply_affine, balance_and_augment, sample_affine,
)
from src.python.corpus.manifest import MANIFEST_NAME, Manifest, ManifestEntry, load_word_images
from src.python.corpus.word_image import (
    WordImage, fit_dimensions, normalize, read_image, write_image,
)
from src.python.utils.errors import EmptyCorpus, IoError, MalformedImage, ManifestError

from tests.conftest import write_corpus


class TestImageFiles:

    def test_write_then_read_keeps_8bit_levels(self, tmp_path):
        pixels = (np.arange(60, dtype=np.float32).reshape(6, 10) * 4) / 255.0
        path = write_image(WordImage(pixels), tmp_path / 'word.pgm')
        assert path.read_bytes().startswith(b'P5')
        assert np.allclose(read_image(path).pixels, pixels, atol=1e-6)

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(IoError):
            read_image(tmp_path / 'absent.pgm')

    def test_garbage_is_malformed(self, tmp_path):
        path = tmp_path / 'bad.pgm'
        path.write_bytes(b'not an image at all')
        with pytest.raises(MalformedImage):
            read_image(path)

    def test_truncated_pixel_data_is_malformed(self, tmp_path):
        path = tmp_path / 'short.pgm'
        path.write_bytes(b'P5\n20 20\n255\n' + bytes(50))
        with pytest.raises(MalformedImage):
            read_image(path)

    def test_colour_image_is_malformed(self, tmp_path):
        path = tmp_path / 'colour.ppm'
        path.write_bytes(b'P6\n2 2\n255\n' + bytes(12))
        with pytest.raises(MalformedImage):
            read_image(path)

    def test_word_image_range_is_checked(self):
        with pytest.raises(ValueError):
            WordImage(np.full((2, 2), 1.5))
        with pytest.raises(ValueError):
            WordImage(np.zeros((0, 3)))


class TestNormalize:

    def test_fit_dimensions_preserves_aspect(self):
        assert fit_dimensions(10, 30, 8, 12) == (4, 12)
        assert fit_dimensions(40, 10, 8, 12) == (8, 2)
        assert fit_dimensions(8, 12, 8, 12) == (8, 12)

    def test_wide_image_is_centered_with_zero_padding(self):
        image = WordImage(np.ones((10, 30), dtype=np.float32))
        result = normalize(image, 8, 12)
        assert result.shape == (8, 12)
        assert np.all(result.pixels[:2] == 0.0)
        assert np.all(result.pixels[6:] == 0.0)
        assert np.allclose(result.pixels[2:6], 1.0)

    def test_invert_flips_scan_polarity(self):
        white_page = WordImage(np.ones((8, 12), dtype=np.float32))
        assert np.all(normalize(white_page, 8, 12, invert=True).pixels == 0.0)

    def test_same_size_is_exact_copy(self):
        image = WordImage(np.random.default_rng(1).random((8, 12)))
        result = normalize(image, 8, 12)
        assert np.array_equal(result.pixels, image.pixels)
        assert result.pixels is not image.pixels

    def test_invalid_target(self):
        with pytest.raises(ValueError):
            normalize(WordImage.zeros(4, 4), 0, 4)


class TestManifest:

    def test_save_and_load(self, tmp_path):
        manifest = Manifest(tmp_path, [ManifestEntry('a.pgm', 'spot'), ManifestEntry('b.pgm')])
        loaded = Manifest.load(manifest.save(tmp_path / MANIFEST_NAME))
        assert loaded.entries == manifest.entries
        assert not loaded.has_transcriptions

    def test_comments_and_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / MANIFEST_NAME
        path.write_text('# header\n\nx.pgm\tword\n', encoding='utf-8')
        loaded = Manifest.load(path)
        assert loaded.transcriptions() == ['word']

    def test_too_many_columns(self, tmp_path):
        path = tmp_path / MANIFEST_NAME
        path.write_text('x.pgm\tword\textra\n', encoding='utf-8')
        with pytest.raises(ManifestError):
            Manifest.load(path)

    def test_path_escaping_root(self, tmp_path):
        path = tmp_path / MANIFEST_NAME
        path.write_text('../outside.pgm\n', encoding='utf-8')
        with pytest.raises(ManifestError):
            Manifest.load(path)

    def test_unlabeled_transcriptions_raise(self, tmp_path):
        with pytest.raises(ManifestError):
            Manifest(tmp_path, [ManifestEntry('a.pgm')]).transcriptions()

    def test_load_word_images_normalizes_every_entry(self, tmp_path):
        manifest = Manifest.load(write_corpus(tmp_path, ['ab', 'cd', 'ef']))
        images = load_word_images(manifest, 8, 12)
        assert [image.shape for image in images] == [(8, 12)] * 3
        assert len(load_word_images(manifest, 8, 12, indices=[2])) == 1

    def test_empty_manifest(self, tmp_path):
        with pytest.raises(EmptyCorpus):
            load_word_images(Manifest(tmp_path, []), 8, 12)


class TestAugmentation:

    def test_identity_is_exact_copy(self):
        image = WordImage(np.random.default_rng(3).random((8, 12)))
        assert np.array_equal(apply_affine(image, AffineParams.identity()).pixels, image.pixels)

    def test_sampled_parameters_stay_in_bounds(self):
        bounds = AffineBounds()
        rng = np.random.default_rng(0)
        for _ in range(50):
            params = sample_affine(rng, bounds)
            assert bounds.rotation[0] <= params.rotation <= bounds.rotation[1]
            assert bounds.scale[0] <= params.scale_x <= bounds.scale[1]
            assert bounds.translate[0] <= params.translate_y <= bounds.translate[1]

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            AffineBounds(rotation=(5.0, -5.0))

    def test_warp_keeps_shape_and_range(self):
        image = WordImage(np.random.default_rng(4).random((8, 12)))
        params = AffineParams(rotation=4.0, shear=0.05, scale_x=1.1, translate_x=1.5)
        warped = apply_affine(image, params)
        assert warped.shape == image.shape
        assert 0.0 <= warped.pixels.min() and warped.pixels.max() <= 1.0

    def test_translation_shifts_by_whole_pixels(self):
        image = WordImage(np.random.default_rng(5).random((8, 12)))
        shifted = apply_affine(image, AffineParams(translate_x=2.0)).pixels
        np.testing.assert_allclose(shifted[:, 2:], image.pixels[:, :-2], atol=1e-6)
        assert np.all(shifted[:, :2] == 0.0)

    def test_half_turn_is_point_reflection(self):
        image = WordImage(np.random.default_rng(6).random((9, 13)))
        turned = apply_affine(image, AffineParams(rotation=180.0)).pixels
        np.testing.assert_allclose(turned, image.pixels[::-1, ::-1], atol=1e-5)

    @pytest.mark.parametrize('seed', range(10))
    def test_balance_ratio_is_independent_of_source_counts(self, seed):
        rng = np.random.default_rng(100 + seed)
        sizes = {'a': 1, 'b': 4, 'c': 15, 'd': 30}
        samples = [(WordImage.zeros(6, 10), label) for label, size in sizes.items() for _ in range(size)]
        augmented = balance_and_augment(samples, 102, rng)
        counts = Counter(label for _, label in augmented)
        assert set(counts) == set(sizes)
        # 102 = 4 * 25 + 2
        assert sorted(counts.values()) == [25, 25, 26, 26]

    def test_balance_splits_evenly(self):
        samples = [(WordImage.zeros(8, 12), 'a')] * 5 + [(WordImage.zeros(8, 12), 'b'),
                                                         (WordImage.zeros(8, 12), 'c')]
        augmented = balance_and_augment(samples, 10, np.random.default_rng(0))
        counts = Counter(label for _, label in augmented)
        assert len(augmented) == 10
        assert sorted(counts.values()) == [3, 3, 4]

    def test_balance_is_deterministic(self):
        samples = [(WordImage(np.random.default_rng(i).random((8, 12))), str(i % 3)) for i in range(6)]
        first = balance_and_augment(samples, 9, np.random.default_rng(11))
        second = balance_and_augment(samples, 9, np.random.default_rng(11))
        assert [label for _, label in first] == [label for _, label in second]
        assert all(np.array_equal(a.pixels, b.pixels) for (a, _), (b, _) in zip(first, second))

    def test_balance_rejects_too_few_samples(self):
        with pytest.raises(ValueError):
            balance_and_augment([], 4, np.random.default_rng(0))
        samples = [(WordImage.zeros(2, 2), 'a'), (WordImage.zeros(2, 2), 'b')]
        with pytest.raises(ValueError):
            balance_and_augment(samples, 1, np.random.default_rng(0))
