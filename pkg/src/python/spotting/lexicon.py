"""
Lexicons for word recognition
Language-based (word-frequency list) or closed (vocabulary of a labeled collection)
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.python.phoc.phoc_builder import PhocConfig, PhocVector, canonicalize, phoc_matrix
from src.python.utils.errors import EmptyLexicon, IoError

LexiconSource = Union[str, Path, Sequence[str]]


@dataclass(frozen=True, eq=False)
class Lexicon:
    """Canonical, deduplicated words with their precomputed PHOC rows"""

    words: Tuple[str, ...]
    phoc_config: PhocConfig
    matrix: np.ndarray = field(init=False, repr=False)
    norms_sq: np.ndarray = field(init=False, repr=False)
    _index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        words = tuple(self.words)
        if not words:
            raise EmptyLexicon("lexicon has no entries")
        if len(set(words)) != len(words):
            raise ValueError("lexicon words must be unique")
        for word in words:
            if not word or canonicalize(word, self.phoc_config.alphabet) != word:
                raise ValueError(f"lexicon word {word!r} is not canonical")
        matrix = phoc_matrix(words, self.phoc_config, dtype=np.float64)
        norms_sq = np.einsum('ij,ij->i', matrix, matrix)
        matrix.setflags(write=False)
        norms_sq.setflags(write=False)
        object.__setattr__(self, 'words', words)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'norms_sq', norms_sq)
        object.__setattr__(self, '_index', {word: i for i, word in enumerate(words)})

    @classmethod
    def from_words(cls, words: Iterable[str], phoc_config: PhocConfig, limit: Optional[int] = None) -> 'Lexicon':
        """Canonicalize, drop empty words, keep the first occurrence of duplicates"""
        seen: Dict[str, None] = {}
        for word in words:
            canonical = canonicalize(word, phoc_config.alphabet)
            if canonical and canonical not in seen:
                seen[canonical] = None
                if limit is not None and len(seen) >= limit:
                    break
        return cls(tuple(seen), phoc_config)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return canonicalize(word, self.phoc_config.alphabet) in self._index

    def index(self, word: str) -> int:
        return self._index[canonicalize(word, self.phoc_config.alphabet)]

    def phoc(self, index: int) -> PhocVector:
        return PhocVector(self.matrix[index].astype(np.uint8), self.phoc_config.config_hash)

    def entries(self) -> List[Tuple[str, PhocVector]]:
        return [(word, self.phoc(i)) for i, word in enumerate(self.words)]


def read_word_list(path: Union[str, Path]) -> List[str]:
    """One word per line (first tab-separated column); '#' comments and blank lines skipped"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise IoError(f"cannot read lexicon {path}: {exc}") from exc
    words = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        words.append(line.split('\t')[0].strip())
    return words


def load_lexicon(source: LexiconSource, phoc_config: PhocConfig, limit: Optional[int] = None) -> Lexicon:
    """Lexicon from a word-list file or an in-memory list; `limit` keeps the first N entries"""
    words = read_word_list(source) if isinstance(source, (str, Path)) else list(source)
    return Lexicon.from_words(words, phoc_config, limit)


def build_closed_lexicon(transcriptions: Iterable[str], phoc_config: PhocConfig) -> Lexicon:
    """Exact vocabulary of a labeled collection, in first-occurrence order"""
    return Lexicon.from_words(transcriptions, phoc_config)


def oov_rate(lexicon: Lexicon, transcriptions: Iterable[str]) -> float:
    """Share of (canonical, non-empty) word occurrences missing from the lexicon"""
    canonical = [canonicalize(t, lexicon.phoc_config.alphabet) for t in transcriptions]
    canonical = [c for c in canonical if c]
    if not canonical:
        return 0.0
    missing = sum(1 for word in canonical if word not in lexicon._index)
    return missing / len(canonical)
