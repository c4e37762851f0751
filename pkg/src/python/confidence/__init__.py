"""
Confidence Package
Medidas de confiança das estimativas de atributos e seleção do subconjunto mais confiável
"""

from .measures import (
    MEASURES, ConfidenceScore, conf_entropy, conf_mc_dropout, conf_oracle, conf_random,
    conf_sigmoid, score_batch,
)
from .selection import rank_by_confidence, select_top_fraction, selection_count

__all__ = [
    'MEASURES',
    'ConfidenceScore',
    'conf_entropy',
    'conf_mc_dropout',
    'conf_oracle',
    'conf_random',
    'conf_sigmoid',
    'rank_by_confidence',
    'score_batch',
    'select_top_fraction',
    'selection_count',
]
