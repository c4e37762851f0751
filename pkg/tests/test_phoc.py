"""
Test PHOC builder
Valida dimensão, canonicalização e a equivalência com uma enumeração independente de intervalos
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.python.phoc.phoc_builder import (
    DEFAULT_SYMBOLS, Alphabet, PhocConfig, PhocVector, canonicalize, check_compatible,
    phoc_dim, phoc_matrix, phoc_of_string,
)
from src.python.utils.errors import EmptyWord, LengthMismatch


def oracle_phoc(word: str, config: PhocConfig) -> np.ndarray:
    """Exact rational interval overlap, enumerating every (level, region, character)"""
    n = len(word)
    size = config.alphabet.size
    bits = np.zeros(config.dim, dtype=np.uint8)
    offset = 0
    for level in config.levels:
        for region in range(level):
            r_lo, r_hi = Fraction(region, level), Fraction(region + 1, level)
            for i, ch in enumerate(word):
                c_lo, c_hi = Fraction(i, n), Fraction(i + 1, n)
                overlap = min(c_hi, r_hi) - max(c_lo, r_lo)
                if overlap > 0 and overlap / Fraction(1, n) >= Fraction(config.overlap_threshold):
                    bits[offset + region * size + config.alphabet.index(ch)] = 1
        offset += level * size
    return bits


def test_default_dimension_is_540():
    config = PhocConfig()
    assert phoc_dim(config) == 540
    assert len(phoc_of_string('word', config)) == 540


def test_matches_interval_oracle_on_random_words():
    config = PhocConfig()
    rng = np.random.default_rng(2024)
    symbols = list(DEFAULT_SYMBOLS)
    mismatches = 0
    for _ in range(1000):
        length = int(rng.integers(1, 16))
        word = ''.join(rng.choice(symbols, size=length))
        if not np.array_equal(phoc_of_string(word, config).bits, oracle_phoc(word, config)):
            mismatches += 1
    assert mismatches == 0


def test_two_character_word_by_hand():
    config = PhocConfig(levels=(1, 2), alphabet=Alphabet.from_string('ab'))
    assert phoc_of_string('ab', config).bits.tolist() == [1, 1, 1, 0, 0, 1]


def test_single_character_fills_every_region():
    config = PhocConfig(levels=(1, 2), alphabet=Alphabet.from_string('xy'))
    bits = phoc_of_string('x', config).bits
    assert bits.reshape(-1, 2)[:, 0].tolist() == [1] * 3
    assert bits.reshape(-1, 2)[:, 1].tolist() == [0] * 3


def test_first_level_is_character_presence():
    config = PhocConfig()
    bits = phoc_of_string('hello', config).bits[:36]
    assert {DEFAULT_SYMBOLS[i] for i in np.flatnonzero(bits)} == set('helo')


def test_canonicalize_lowercases_and_drops_foreign_symbols():
    assert canonicalize("Hello, World!", Alphabet()) == 'helloworld'
    assert phoc_of_string("Hello!", PhocConfig()) == phoc_of_string('hello', PhocConfig())


def test_empty_word_raises():
    with pytest.raises(EmptyWord):
        phoc_of_string('', PhocConfig())
    with pytest.raises(EmptyWord):
        phoc_of_string('?!', PhocConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        PhocConfig(levels=(2, 1))
    with pytest.raises(ValueError):
        PhocConfig(levels=())
    with pytest.raises(ValueError):
        Alphabet.from_string('aa')
    with pytest.raises(ValueError):
        PhocConfig(overlap_threshold=0.0)


def test_config_hash_tracks_alphabet_order_and_round_trips():
    forward = PhocConfig(alphabet=Alphabet.from_string('abc'))
    reverse = PhocConfig(alphabet=Alphabet.from_string('cba'))
    assert forward.config_hash != reverse.config_hash
    assert PhocConfig.from_dict(forward.to_dict()) == forward
    assert PhocConfig.from_dict(forward.to_dict()).config_hash == forward.config_hash


def test_check_compatible(small_phoc):
    vector = phoc_of_string('abc', small_phoc)
    check_compatible(vector, small_phoc)
    with pytest.raises(LengthMismatch):
        check_compatible(vector, PhocConfig())


def test_vector_is_read_only_and_binary(small_phoc):
    vector = phoc_of_string('face', small_phoc)
    with pytest.raises(ValueError):
        vector.bits[0] = 1
    with pytest.raises(ValueError):
        PhocVector(np.array([0, 2]), small_phoc.config_hash)


def test_matrix_rows_equal_single_vectors(two_level_phoc):
    words = ['spot', 'word', 'a']
    matrix = phoc_matrix(words, two_level_phoc)
    assert matrix.shape == (3, two_level_phoc.dim)
    for row, word in zip(matrix, words):
        assert np.array_equal(row, phoc_of_string(word, two_level_phoc).as_float())
