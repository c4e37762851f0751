"""
Test synthetic word rendering
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image, ImageDraw
from pydantic import ValidationError

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.adapt.benchmark import load_benchmark_vocabulary
from src.python.corpus.manifest import MANIFEST_NAME, Manifest
from src.python.corpus.word_image import normalize, read_image
from src.python.phoc.phoc_builder import Alphabet
from src.python.synth.glyphs import GLYPH_SETS, get_glyph_set
from src.python.synth.renderer import generate_corpus, render_word, rescale
from src.python.synth.styles import PRESET_STYLES, STYLE_A, STYLE_B, StyleFamily
from src.python.utils.errors import EmptyWord, MissingGlyph


@pytest.mark.parametrize('name', sorted(GLYPH_SETS))
def test_glyph_sets_cover_default_alphabet(name):
    get_glyph_set(name).validate(Alphabet())


def test_unknown_glyph_set():
    with pytest.raises(ValueError):
        get_glyph_set('cursive')


@pytest.mark.parametrize('style', [STYLE_A, STYLE_B], ids=lambda s: s.id)
def test_render_puts_ink_on_dark_background(style):
    image = render_word('spotting', style, np.random.default_rng(0))
    assert image.height == style.base_height
    assert image.width > image.height
    assert image.pixels.max() > 0.9
    # most of the canvas stays background
    assert np.median(image.pixels) < 0.2


def test_render_is_deterministic_per_stream():
    first = render_word('word', STYLE_B, np.random.default_rng(5))
    second = render_word('word', STYLE_B, np.random.default_rng(5))
    third = render_word('word', STYLE_B, np.random.default_rng(6))
    assert np.array_equal(first.pixels, second.pixels)
    assert not np.array_equal(first.pixels, third.pixels) or first.shape != third.shape


def test_longer_words_render_wider():
    fixed = StyleFamily(id='fixed', stroke_width=(2.0, 2.0), slant=(0.0, 0.0), char_spacing=(2.0, 2.0),
                        baseline_jitter=(0.0, 0.0), noise_amplitude=(0.0, 0.0))
    short = render_word('ab', fixed, np.random.default_rng(0))
    long = render_word('abababab', fixed, np.random.default_rng(0))
    assert long.width > short.width


def test_render_rejects_words_without_symbols():
    with pytest.raises(EmptyWord):
        render_word('?!', STYLE_A, np.random.default_rng(0))


def test_rescale():
    image = render_word('a', STYLE_A, np.random.default_rng(0))
    assert rescale(image, 2.0).height == 2 * image.height
    assert np.array_equal(rescale(image, 1.0).pixels, image.pixels)


def test_style_validation():
    with pytest.raises(ValidationError):
        StyleFamily(id='bad', slant=(10.0, -10.0))
    with pytest.raises(ValidationError):
        StyleFamily(id='bad', stroke_width=(0.0, 2.0))
    with pytest.raises(ValidationError):
        StyleFamily(id='bad', glyph_variant='cursive')
    with pytest.raises(ValidationError):
        StyleFamily(id='bad', base_height=8)
    with pytest.raises(ValidationError):
        StyleFamily(id='bad', colour='red')


def test_presets_differ():
    assert set(PRESET_STYLES) == {'style_a', 'style_b'}
    assert STYLE_A.glyph_variant != STYLE_B.glyph_variant
    assert STYLE_A.slant != STYLE_B.slant


class TestGenerateCorpus:

    def test_writes_manifest_and_scan_polarity_images(self, tmp_path):
        manifest = generate_corpus(['Spot', 'word'], 2, STYLE_A, None, tmp_path, np.random.default_rng(1))
        assert len(manifest) == 4
        loaded = Manifest.load(tmp_path / MANIFEST_NAME)
        assert loaded.transcriptions() == ['spot', 'spot', 'word', 'word']

        stored = read_image(loaded.resolve(loaded.entries[0]))
        # light paper on disk
        assert np.median(stored.pixels) > 0.8

    def test_scale_jitter_enlarges_images(self, tmp_path):
        manifest = generate_corpus(['ab'], 1, STYLE_A, (2.0, 2.0), tmp_path, np.random.default_rng(1))
        stored = read_image(manifest.resolve(manifest.entries[0]))
        assert stored.height == 2 * STYLE_A.base_height

    def test_same_seed_same_bytes(self, tmp_path):
        first = generate_corpus(['ab', 'cd'], 1, STYLE_B, (1.0, 2.0), tmp_path / 'x', np.random.default_rng(3))
        second = generate_corpus(['ab', 'cd'], 1, STYLE_B, (1.0, 2.0), tmp_path / 'y', np.random.default_rng(3))
        for a, b in zip(first.entries, second.entries):
            assert first.resolve(a).read_bytes() == second.resolve(b).read_bytes()

    def test_rejects_empty_input(self, tmp_path):
        with pytest.raises(ValueError):
            generate_corpus([], 1, STYLE_A, None, tmp_path, np.random.default_rng(0))
        with pytest.raises(ValueError):
            generate_corpus(['a'], 0, STYLE_A, None, tmp_path, np.random.default_rng(0))


FIXED = StyleFamily(id='fixed', stroke_width=(3.0, 3.0), slant=(0.0, 0.0), char_spacing=(2.0, 2.0),
                    baseline_jitter=(0.0, 0.0), noise_amplitude=(0.0, 0.0))


def reference_bitmap(symbol: str, stroke: int = 3, height: int = 48) -> np.ndarray:
    """Single glyph drawn straight from the print glyph table, no slant, jitter or noise"""
    glyph = get_glyph_set('print')[symbol]
    scale = height - 1
    margin = stroke + 2
    width = int(math.ceil(max(glyph.advance * scale, 1.0))) + 2 * margin
    canvas = Image.new('L', (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    for polyline in glyph.strokes:
        points = [(float(margin) + x * scale, y * scale) for x, y in polyline]
        if len(points) == 1:
            (px, py), r = points[0], stroke / 2.0
            draw.ellipse([px - r, py - r, px + r, py + r], fill=255)
        else:
            draw.line(points, fill=255, width=stroke, joint='curve')
    return np.asarray(canvas, dtype=np.float32) / 255.0


def test_fixed_style_a_matches_reference_bitmap():
    image = render_word('a', FIXED, np.random.default_rng(0))
    expected = reference_bitmap('a')
    assert image.shape == expected.shape
    assert np.array_equal(image.pixels, expected)
    # the parameters are fixed: the stream is never consulted
    assert np.array_equal(render_word('a', FIXED, np.random.default_rng(99)).pixels, image.pixels)


def ink_row_centroid(image) -> float:
    rows = np.arange(image.height, dtype=np.float64)
    mass = image.pixels.astype(np.float64).sum(axis=1)
    return float((rows * mass).sum() / mass.sum())


def test_baseline_jitter_magnitude_stays_in_range():
    shifted = FIXED.model_copy(update={'baseline_jitter': (3.0, 3.0)})
    plain = ink_row_centroid(render_word('a', FIXED, np.random.default_rng(0)))
    offsets = [ink_row_centroid(render_word('a', shifted, np.random.default_rng(seed))) - plain
               for seed in range(20)]
    assert all(2.5 < abs(offset) < 3.5 for offset in offsets)
    assert min(offsets) < 0 < max(offsets)


def test_missing_glyph_names_the_symbol():
    alphabet = Alphabet.from_string('ab#')
    with pytest.raises(MissingGlyph, match="'#'"):
        render_word('a#b', STYLE_A, np.random.default_rng(0), alphabet)


def mean_l1(first, second) -> float:
    return float(np.abs(first.pixels - second.pixels).mean())


def test_style_families_are_farther_apart_than_two_renders_of_one():
    words = load_benchmark_vocabulary()[:60]
    same, across = [], []
    for index, word in enumerate(words):
        a1, a2, b = (
            normalize(render_word(word, style, np.random.default_rng([index, k])), 32, 96)
            for k, style in enumerate((STYLE_A, STYLE_A, STYLE_B))
        )
        same.append(mean_l1(a1, a2))
        across.append(mean_l1(a1, b))
    assert np.mean(across) > np.mean(same)
