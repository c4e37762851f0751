"""Ranking por dissimilaridade de cosseno, reconhecimento por léxico e AP.

Todas as comparações usam d_cos(u, v) = 1 - u.v / sqrt(|u|^2 |v|^2), limitada
inferiormente a 0. Vetores idênticos têm d_cos(u, u) == 0 exatamente.

Regras de desempate (determinismo):
    - ranking: dissimilaridade crescente, depois id crescente
    - reconhecimento: menor índice do léxico

Exemplo de uso:
    >>> result = recognize(a_hat, lexicon)
    >>> ranked = rank_qbs("orders", gallery, phoc_config)
    >>> average_precision([1, 0, 1, 0])
    0.8333...
"""

from dataclasses import dataclass
from typing import Any, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from src.python.estimator.model import EstimatorModel, as_values, forward
from src.python.phoc.phoc_builder import PhocConfig, phoc_of_string
from src.python.spotting.lexicon import Lexicon
from src.python.utils.errors import EmptyGallery, EmptyLexicon, LengthMismatch, NoRelevant, ZeroVector


def d_cos_many(query: Any, matrix: Any, row_norms_sq: Optional[np.ndarray] = None) -> np.ndarray:
    """Cosine dissimilarity between one vector and every row of a matrix"""
    q = np.asarray(as_values(query), dtype=np.float64)
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or q.ndim != 1 or m.shape[1] != q.shape[0]:
        raise LengthMismatch(f"vector of length {q.shape} cannot be compared with rows of {m.shape}")
    q_norm_sq = float(q @ q)
    if q_norm_sq == 0.0:
        raise ZeroVector("cosine dissimilarity of a zero query vector")
    if row_norms_sq is None:
        row_norms_sq = np.einsum('ij,ij->i', m, m)
    if np.any(row_norms_sq == 0.0):
        raise ZeroVector("cosine dissimilarity against a zero vector")
    cosine = (m @ q) / np.sqrt(row_norms_sq * q_norm_sq)
    distances = np.maximum(1.0 - cosine, 0.0)
    # matmul and einsum may sum in different orders
    distances[np.all(m == q, axis=1)] = 0.0
    return distances


def d_cos(u: Any, v: Any) -> float:
    """1 - cos(u, v); in [0, 1] for nonnegative vectors"""
    u_arr, v_arr = as_values(u), as_values(v)
    if u_arr.shape != v_arr.shape:
        raise LengthMismatch(f"vectors of lengths {u_arr.shape} and {v_arr.shape}")
    return float(d_cos_many(u_arr, v_arr[None, :])[0])


def dissimilarity_matrix(queries: np.ndarray, gallery: np.ndarray) -> np.ndarray:
    """d_cos between every query row and every gallery row, shape (Q, N)"""
    q = np.asarray(queries, dtype=np.float64)
    g = np.asarray(gallery, dtype=np.float64)
    if q.shape[1] != g.shape[1]:
        raise LengthMismatch(f"query dimension {q.shape[1]} differs from gallery dimension {g.shape[1]}")
    q_sq = np.einsum('ij,ij->i', q, q)
    g_sq = np.einsum('ij,ij->i', g, g)
    if np.any(q_sq == 0.0) or np.any(g_sq == 0.0):
        raise ZeroVector("cosine dissimilarity of a zero vector")
    cosine = (q @ g.T) / np.sqrt(np.outer(q_sq, g_sq))
    return np.maximum(1.0 - cosine, 0.0)


# --- ranking ----------------------------------------------------------------

@dataclass
class RankedList:
    """Gallery items ordered by non-decreasing dissimilarity to a query"""

    query_id: Optional[Hashable]
    items: List[Tuple[Hashable, float]]

    def __len__(self) -> int:
        return len(self.items)

    @property
    def ids(self) -> List[Hashable]:
        return [item_id for item_id, _ in self.items]

    def top(self, k: int) -> 'RankedList':
        return RankedList(self.query_id, self.items[:k])


def ranking_order(dissimilarities: np.ndarray, tie_keys: Optional[np.ndarray] = None) -> np.ndarray:
    """Indices sorted by dissimilarity, then by tie key (default: position)"""
    if tie_keys is None:
        tie_keys = np.arange(len(dissimilarities))
    return np.lexsort((tie_keys, dissimilarities))


def rank_vectors(
    query_vector: Any,
    gallery: Any,
    ids: Optional[Sequence[Hashable]] = None,
    query_id: Optional[Hashable] = None
) -> RankedList:
    """Rank gallery rows (attribute vectors) by d_cos to a query vector"""
    matrix = np.asarray([as_values(g) for g in gallery]) if not isinstance(gallery, np.ndarray) else gallery
    if len(matrix) == 0:
        raise EmptyGallery("cannot rank an empty gallery")
    ids = list(range(len(matrix))) if ids is None else list(ids)
    if len(ids) != len(matrix):
        raise LengthMismatch(f"{len(ids)} ids for a gallery of {len(matrix)}")

    dissimilarities = d_cos_many(query_vector, matrix)
    position_of = {item_id: rank for rank, item_id in enumerate(sorted(ids))}
    tie_keys = np.array([position_of[item_id] for item_id in ids])
    order = ranking_order(dissimilarities, tie_keys)
    return RankedList(query_id, [(ids[i], float(dissimilarities[i])) for i in order])


def rank_qbe(
    query_image: Any,
    gallery: Any,
    model: EstimatorModel,
    ids: Optional[Sequence[Hashable]] = None,
    query_id: Optional[Hashable] = None
) -> RankedList:
    """Query-by-example: the query vector is phi(query_image, W) in eval mode"""
    return rank_vectors(forward(model, query_image, 'eval'), gallery, ids, query_id)


def rank_qbs(
    query_string: str,
    gallery: Any,
    phoc_config: PhocConfig,
    ids: Optional[Sequence[Hashable]] = None
) -> RankedList:
    """Query-by-string: the query vector is the PHOC of the string"""
    query = phoc_of_string(query_string, phoc_config)
    return rank_vectors(query.bits, gallery, ids, query_id=query_string)


# --- recognition ------------------------------------------------------------

@dataclass(frozen=True)
class RecognitionResult:
    label: str
    dissimilarity: float
    lexicon_index: int


def recognize_batch(attributes: Any, lexicon: Lexicon) -> List[RecognitionResult]:
    """Nearest lexicon entry for every row of an (N, D) estimate matrix"""
    if len(lexicon) == 0:
        raise EmptyLexicon("cannot recognize against an empty lexicon")
    estimates = np.atleast_2d(np.asarray(attributes, dtype=np.float64))
    if estimates.shape[0] == 0:
        return []
    distances = dissimilarity_matrix(estimates, lexicon.matrix)
    # argmin returns the first (lowest-index) minimum
    best = distances.argmin(axis=1)
    return [
        RecognitionResult(lexicon.words[b], float(distances[row, b]), int(b))
        for row, b in enumerate(best)
    ]


def recognize(a_hat: Any, lexicon: Lexicon) -> RecognitionResult:
    """l* = argmin over the lexicon of d_cos(a_hat, PHOC(l)); ties go to the lowest index"""
    if len(lexicon) == 0:
        raise EmptyLexicon("cannot recognize against an empty lexicon")
    distances = d_cos_many(as_values(a_hat), lexicon.matrix, lexicon.norms_sq)
    best = int(ranking_order(distances)[0])
    return RecognitionResult(lexicon.words[best], float(distances[best]), best)


# --- average precision ------------------------------------------------------

def average_precision(relevance: Sequence[int]) -> float:
    """(1/R) * sum of precision@k over the relevant ranks k"""
    rel = np.asarray(relevance, dtype=bool)
    total = int(rel.sum())
    if total == 0:
        raise NoRelevant("average precision needs at least one relevant item")
    hits = np.cumsum(rel)
    ranks = np.arange(1, len(rel) + 1)
    return float(np.sum(hits[rel] / ranks[rel]) / total)
