"""
Spotting Package
Léxicos, ranking QbE/QbS por dissimilaridade de cosseno, reconhecimento e avaliação mAP
"""

from .evaluation import EvaluationOptions, EvaluationResult, QueryResult, evaluate_attributes, evaluate_map
from .lexicon import Lexicon, build_closed_lexicon, load_lexicon, oov_rate
from .retrieval import (
    RankedList, RecognitionResult, average_precision, d_cos, rank_qbe, rank_qbs, rank_vectors,
    recognize, recognize_batch,
)

__all__ = [
    'EvaluationOptions',
    'EvaluationResult',
    'Lexicon',
    'QueryResult',
    'RankedList',
    'RecognitionResult',
    'average_precision',
    'build_closed_lexicon',
    'd_cos',
    'evaluate_attributes',
    'evaluate_map',
    'load_lexicon',
    'oov_rate',
    'rank_qbe',
    'rank_qbs',
    'rank_vectors',
    'recognize',
    'recognize_batch',
]
