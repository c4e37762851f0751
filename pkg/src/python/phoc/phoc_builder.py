"""Construção de embeddings PHOC (Pyramidal Histogram of Characters).

Este módulo converte strings em vetores binários de atributos. Cada atributo
indica a presença de um caractere do alfabeto em uma região horizontal da
palavra, para cada nível da pirâmide.

Layout dos atributos:
    nível (externo) -> região -> caractere (interno)

Com a configuração padrão (níveis 1, 2, 4, 8 e alfabeto a-z + 0-9) a dimensão
é 36 x 15 = 540.

Exemplo de uso:
    >>> config = PhocConfig()
    >>> vector = phoc_of_string("to", config)
    >>> phoc_dim(config)
    540
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from src.python.utils.errors import EmptyWord, LengthMismatch

DEFAULT_SYMBOLS = 'abcdefghijklmnopqrstuvwxyz0123456789'
DEFAULT_LEVELS = (1, 2, 4, 8)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols; order is part of every persisted artifact"""

    symbols: Tuple[str, ...] = tuple(DEFAULT_SYMBOLS)
    _index: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one symbol")
        for symbol in symbols:
            if not isinstance(symbol, str) or len(symbol) != 1:
                raise ValueError(f"alphabet symbols must be single characters, got {symbol!r}")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be unique")
        object.__setattr__(self, 'symbols', symbols)
        object.__setattr__(self, '_index', {s: i for i, s in enumerate(symbols)})

    @classmethod
    def from_string(cls, symbols: str) -> 'Alphabet':
        return cls(tuple(symbols))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def as_string(self) -> str:
        return ''.join(self.symbols)

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class PhocConfig:
    """Pyramid levels, alphabet and overlap rule of a PHOC embedding"""

    levels: Tuple[int, ...] = DEFAULT_LEVELS
    alphabet: Alphabet = field(default_factory=Alphabet)
    overlap_threshold: float = 0.5

    def __post_init__(self):
        levels = tuple(int(level) for level in self.levels)
        if not levels:
            raise ValueError("at least one pyramid level is required")
        if any(level < 1 for level in levels):
            raise ValueError(f"pyramid levels must be >= 1, got {list(levels)}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"pyramid levels must be strictly increasing, got {list(levels)}")
        if not 0.0 < float(self.overlap_threshold) <= 1.0:
            raise ValueError(f"overlap_threshold must be in (0, 1], got {self.overlap_threshold}")
        object.__setattr__(self, 'levels', levels)
        object.__setattr__(self, 'overlap_threshold', float(self.overlap_threshold))

    @property
    def dim(self) -> int:
        return self.alphabet.size * sum(self.levels)

    @property
    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode('utf-8')
        return hashlib.sha256(payload).hexdigest()[:16]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alphabet': self.alphabet.as_string(),
            'levels': list(self.levels),
            'overlap_threshold': self.overlap_threshold,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PhocConfig':
        return cls(
            levels=tuple(data.get('levels', DEFAULT_LEVELS)),
            alphabet=Alphabet.from_string(data.get('alphabet', DEFAULT_SYMBOLS)),
            overlap_threshold=float(data.get('overlap_threshold', 0.5)),
        )


@dataclass(frozen=True, eq=False)
class PhocVector:
    """Binary attribute vector bound to the PhocConfig that produced it"""

    bits: np.ndarray
    config_hash: str

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("PHOC bits must be a 1-D vector")
        if np.any(bits > 1):
            raise ValueError("PHOC bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, 'bits', bits)

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhocVector):
            return NotImplemented
        return self.config_hash == other.config_hash and np.array_equal(self.bits, other.bits)

    def as_float(self, dtype=np.float64) -> np.ndarray:
        return self.bits.astype(dtype)


def phoc_dim(config: PhocConfig) -> int:
    """Embedding dimension: alphabet size times the sum of the levels"""
    return config.dim


def canonicalize(word: str, alphabet: Alphabet) -> str:
    """Lowercase and drop characters outside the alphabet (result may be empty)"""
    return ''.join(ch for ch in word.lower() if ch in alphabet)


def _level_offsets(config: PhocConfig) -> Dict[int, int]:
    offsets = {}
    running = 0
    for level in config.levels:
        offsets[level] = running * config.alphabet.size
        running += level
    return offsets


def _phoc_bits(canonical: str, config: PhocConfig) -> np.ndarray:
    n = len(canonical)
    alphabet_size = config.alphabet.size
    threshold = config.overlap_threshold
    bits = np.zeros(config.dim, dtype=np.uint8)

    for level, offset in _level_offsets(config).items():
        # Interval endpoints scaled by n*level so every comparison is on integers:
        # character i spans [i*level, (i+1)*level], region r spans [r*n, (r+1)*n];
        # the required overlap threshold*(1/n) becomes threshold*level.
        required = threshold * level
        for i, ch in enumerate(canonical):
            char_index = config.alphabet.index(ch)
            char_lo, char_hi = i * level, (i + 1) * level
            first_region = char_lo // n
            last_region = min(level - 1, (char_hi - 1) // n)
            for region in range(first_region, last_region + 1):
                overlap = min(char_hi, (region + 1) * n) - max(char_lo, region * n)
                if overlap >= required:
                    bits[offset + region * alphabet_size + char_index] = 1
    return bits


def phoc_of_string(word: str, config: PhocConfig) -> PhocVector:
    """PHOC of a word; raises EmptyWord when nothing survives canonicalization"""
    canonical = canonicalize(word, config.alphabet)
    if not canonical:
        raise EmptyWord(f"word {word!r} has no characters of the alphabet")
    return PhocVector(bits=_phoc_bits(canonical, config), config_hash=config.config_hash)


def phoc_matrix(words: Sequence[str], config: PhocConfig, dtype=np.float64) -> np.ndarray:
    """Stack the PHOCs of `words` row-wise"""
    matrix = np.zeros((len(words), config.dim), dtype=dtype)
    for row, word in enumerate(words):
        matrix[row] = phoc_of_string(word, config).bits
    return matrix


def check_compatible(vector: PhocVector, config: PhocConfig) -> None:
    """Raise LengthMismatch if `vector` was not built with `config`"""
    if len(vector) != config.dim or vector.config_hash != config.config_hash:
        raise LengthMismatch(
            f"PHOC vector (dim {len(vector)}) does not belong to config {config.config_hash}"
        )
