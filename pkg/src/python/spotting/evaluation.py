"""Avaliação de word spotting por mean average precision (mAP).

Protocolos:
    - qbe (query-by-example): cada imagem do conjunto de teste é consulta uma
      vez; a própria instância é removida da sua lista quando exclude_self está
      ativo; consultas sem nenhum item relevante restante são ignoradas.
    - qbs (query-by-string): cada transcrição canônica única é consulta uma vez.

Stopwords nunca são consultas, mas permanecem na galeria como distratores.
Relevância = mesma transcrição canônica.

Exemplo de uso:
    >>> result = evaluate_map('qbs', manifest, model, EvaluationOptions(stopwords=('the', 'of')))
    >>> print(f"mAP = {result.mean_ap:.4f}")
"""

from dataclasses import dataclass, field
from typing import Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.python.corpus.manifest import Manifest, load_word_images
from src.python.estimator.model import EstimatorModel, predict_batch
from src.python.phoc.phoc_builder import PhocConfig, canonicalize, phoc_matrix
from src.python.spotting.retrieval import average_precision, dissimilarity_matrix, ranking_order
from src.python.utils.errors import NoQueries

PROTOCOLS = ('qbe', 'qbs')


@dataclass(frozen=True)
class EvaluationOptions:
    exclude_self: bool = True
    stopwords: Tuple[str, ...] = ()


@dataclass(frozen=True)
class QueryResult:
    query_id: Hashable
    query: str
    ap: float
    num_relevant: int


@dataclass
class EvaluationResult:
    """Per-query APs of one protocol run; mAP is their mean"""

    protocol: str
    queries: List[QueryResult] = field(default_factory=list)
    skipped: int = 0

    @property
    def mean_ap(self) -> float:
        if not self.queries:
            raise NoQueries(f"{self.protocol} evaluation produced no valid query")
        return float(np.mean([q.ap for q in self.queries]))

    @property
    def per_query_aps(self) -> List[float]:
        return [q.ap for q in self.queries]


def _canonical_stopwords(stopwords: Iterable[str], config: PhocConfig) -> set:
    return {c for c in (canonicalize(w, config.alphabet) for w in stopwords) if c}


def _ap_for_row(dissimilarities: np.ndarray, relevant: np.ndarray, keep: np.ndarray) -> Tuple[Optional[float], int]:
    indices = np.flatnonzero(keep)
    num_relevant = int(relevant[indices].sum())
    if num_relevant == 0:
        return None, 0
    order = indices[ranking_order(dissimilarities[indices], indices)]
    return average_precision(relevant[order]), num_relevant


def evaluate_attributes(
    protocol: str,
    transcriptions: Sequence[str],
    attributes: np.ndarray,
    phoc_config: PhocConfig,
    exclude_self: bool = True,
    stopwords: Iterable[str] = ()
) -> EvaluationResult:
    """Run a protocol over precomputed gallery estimates (row i belongs to transcription i)"""
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol '{protocol}', expected one of {PROTOCOLS}")
    attributes = np.asarray(attributes, dtype=np.float64)
    if len(transcriptions) != len(attributes):
        raise ValueError(f"{len(transcriptions)} transcriptions for {len(attributes)} estimates")

    labels = np.array([canonicalize(t, phoc_config.alphabet) for t in transcriptions], dtype=object)
    stop = _canonical_stopwords(stopwords, phoc_config)
    result = EvaluationResult(protocol)
    everything = np.ones(len(labels), dtype=bool)

    if protocol == 'qbe':
        query_rows = [i for i, label in enumerate(labels) if label and label not in stop]
        if not query_rows:
            raise NoQueries("qbe evaluation has no query images")
        distances = dissimilarity_matrix(attributes[query_rows], attributes)
        for row, i in enumerate(query_rows):
            keep = everything.copy()
            if exclude_self:
                keep[i] = False
            ap, num_relevant = _ap_for_row(distances[row], labels == labels[i], keep)
            if ap is None:
                result.skipped += 1
                continue
            result.queries.append(QueryResult(i, labels[i], ap, num_relevant))
    else:
        unique = list(dict.fromkeys(label for label in labels if label and label not in stop))
        if not unique:
            raise NoQueries("qbs evaluation has no query strings")
        distances = dissimilarity_matrix(phoc_matrix(unique, phoc_config), attributes)
        for row, word in enumerate(unique):
            ap, num_relevant = _ap_for_row(distances[row], labels == word, everything)
            result.queries.append(QueryResult(row, word, ap, num_relevant))

    if not result.queries:
        raise NoQueries(f"{protocol} evaluation produced no valid query")
    return result


def evaluate_map(
    protocol: str,
    test_set: Manifest,
    model: EstimatorModel,
    options: Optional[EvaluationOptions] = None,
    attributes: Optional[np.ndarray] = None
) -> EvaluationResult:
    """mAP of `model` on a labeled manifest; estimates are computed unless supplied"""
    options = options or EvaluationOptions()
    transcriptions = test_set.transcriptions()
    if attributes is None:
        images = load_word_images(test_set, *model.input_shape)
        attributes = predict_batch(model, images)
    return evaluate_attributes(
        protocol, transcriptions, attributes, model.phoc_config,
        exclude_self=options.exclude_self, stopwords=options.stopwords,
    )
