"""
Shared fixtures: small PHOC configs, tiny estimator models and on-disk corpora
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.corpus.manifest import MANIFEST_NAME, Manifest, ManifestEntry
from src.python.corpus.word_image import WordImage, write_image
from src.python.estimator.model import init_model
from src.python.phoc.phoc_builder import Alphabet, PhocConfig

TINY_SHAPE = (8, 12)


def tiny_architecture(output_dim: int, hidden: int = 8):
    return [
        {'type': 'conv', 'filters': 2, 'kernel': 3},
        {'type': 'relu'},
        {'type': 'maxpool', 'size': 2},
        {'type': 'flatten'},
        {'type': 'dense', 'units': hidden},
        {'type': 'relu'},
        {'type': 'dropout'},
        {'type': 'dense', 'units': output_dim},
        {'type': 'sigmoid'},
    ]


def make_tiny_model(phoc_config: PhocConfig, seed: int = 0, dtype=np.float64, dropout_p: float = 0.5):
    return init_model(
        tiny_architecture(phoc_config.dim), seed, phoc_config,
        input_shape=TINY_SHAPE, dropout_p=dropout_p, dtype=dtype,
    )


def random_images(count: int, seed: int = 0, shape=TINY_SHAPE):
    rng = np.random.default_rng(seed)
    return [WordImage(rng.random(shape).astype(np.float32)) for _ in range(count)]


def write_corpus(root: Path, words, shape=(10, 30), seed: int = 0, labeled: bool = True) -> Path:
    """Write random scan-polarity PGMs plus a manifest; returns the manifest path"""
    rng = np.random.default_rng(seed)
    (root / 'images').mkdir(parents=True, exist_ok=True)
    entries = []
    for index, word in enumerate(words):
        relative = f"images/{index:03d}.pgm"
        write_image(WordImage(rng.random(shape).astype(np.float32)), root / relative)
        entries.append(ManifestEntry(relative, word if labeled else None))
    return Manifest(root=root, entries=entries).save(root / MANIFEST_NAME)


@pytest.fixture
def small_phoc():
    """6-symbol alphabet, single level: D = 6"""
    return PhocConfig(levels=(1,), alphabet=Alphabet.from_string('abcdef'))


@pytest.fixture
def two_level_phoc():
    return PhocConfig(levels=(1, 2), alphabet=Alphabet.from_string('abcdefghijklmnopqrstuvwxyz'))


@pytest.fixture
def tiny_model(small_phoc):
    return make_tiny_model(small_phoc)
