"""Medidas de confiança c(x, W) para estimativas de atributos.

Todas as medidas são orientadas de forma que valores MAIORES indicam maior
confiança, para que a seleção do subconjunto mais confiável use um único
contrato (ordenar de forma decrescente).

Medidas disponíveis:
    - sigmoid:    soma das estimativas ativas (> 0.5)
    - entropy:    entropia conjunta negativa (atributos independentes)
    - mc_dropout: menos a variância média sobre passes com dropout no teste
    - oracle:     menos a dissimilaridade de cosseno ao PHOC verdadeiro
                  (diagnóstico; requer rótulos)
    - random:     pontuação uniforme aleatória (linha de base de seleção)

Exemplo de uso:
    >>> conf_sigmoid(forward(model, image)).value
    >>> scores = score_batch('entropy', model, images)
"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence

import numpy as np

from src.python.estimator.model import EstimatorModel, ImageLike, as_values, mc_dropout_samples, predict_batch
from src.python.spotting.retrieval import d_cos
from src.python.utils.errors import LengthMismatch

MEASURES = ('sigmoid', 'entropy', 'mc_dropout', 'oracle', 'random')
LOG_CLAMP = 1e-7
DEFAULT_MC_PASSES = 100


@dataclass(frozen=True)
class ConfidenceScore:
    """Confidence value of one estimate; comparable only within one measure"""

    value: float
    measure_id: str

    def __post_init__(self):
        if self.measure_id not in MEASURES:
            raise ValueError(f"unknown confidence measure '{self.measure_id}'")


def conf_sigmoid(a_hat: Any) -> ConfidenceScore:
    """Sum of the estimates above 0.5; entries <= 0.5 contribute nothing"""
    values = as_values(a_hat).astype(np.float64)
    return ConfidenceScore(float(values[values > 0.5].sum()), 'sigmoid')


def conf_entropy(a_hat: Any) -> ConfidenceScore:
    """Negative joint Bernoulli entropy (natural log, 0 ln 0 = 0); 0 for binary vectors"""
    p = as_values(a_hat).astype(np.float64)
    q = 1.0 - p
    terms = p * np.log(np.maximum(p, LOG_CLAMP)) + q * np.log(np.maximum(q, LOG_CLAMP))
    return ConfidenceScore(float(terms.sum()), 'entropy')


def conf_mc_dropout(
    model: EstimatorModel,
    image: ImageLike,
    passes: int = DEFAULT_MC_PASSES,
    rng: Optional[np.random.Generator] = None
) -> ConfidenceScore:
    """Minus the mean per-attribute sample variance over `passes` test-dropout forward passes"""
    if passes < 2:
        raise ValueError(f"MC dropout needs at least 2 passes, got {passes}")
    samples = mc_dropout_samples(model, image, passes, rng).astype(np.float64)
    variance = samples.var(axis=0, ddof=1)
    # + 0.0 turns -0.0 into 0.0
    return ConfidenceScore(float(-variance.mean()) + 0.0, 'mc_dropout')


def conf_oracle(a_hat: Any, truth: Any) -> ConfidenceScore:
    """Minus the cosine dissimilarity to the true PHOC (diagnostic only)"""
    return ConfidenceScore(-d_cos(as_values(a_hat), as_values(truth)) + 0.0, 'oracle')


def conf_random(rng: np.random.Generator) -> ConfidenceScore:
    return ConfidenceScore(float(rng.random()), 'random')


def score_batch(
    measure_id: str,
    model: Optional[EstimatorModel] = None,
    images: Optional[Sequence[ImageLike]] = None,
    attributes: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
    passes: int = DEFAULT_MC_PASSES,
    truths: Optional[Sequence[Any]] = None
) -> List[ConfidenceScore]:
    """Score a whole corpus with one measure

    `attributes` are eval-mode estimates (N, D), computed from `images` when omitted.
    mc_dropout draws one child stream of `rng` per image; random draws N values from `rng`.
    """
    if measure_id not in MEASURES:
        raise ValueError(f"unknown confidence measure '{measure_id}', expected one of {MEASURES}")

    if measure_id == 'mc_dropout':
        if model is None or images is None:
            raise ValueError("mc_dropout scoring needs the model and the images")
        streams = rng.spawn(len(images)) if rng is not None else [None] * len(images)
        return [conf_mc_dropout(model, image, passes, stream) for image, stream in zip(images, streams)]

    if attributes is None:
        if model is None or images is None:
            raise ValueError(f"'{measure_id}' scoring needs attribute estimates or the model and images")
        attributes = predict_batch(model, images)
    attributes = np.asarray(attributes)

    if measure_id == 'random':
        if rng is None:
            raise ValueError("random scoring needs an rng")
        return [ConfidenceScore(float(v), 'random') for v in rng.random(len(attributes))]
    if measure_id == 'sigmoid':
        return [conf_sigmoid(row) for row in attributes]
    if measure_id == 'entropy':
        return [conf_entropy(row) for row in attributes]

    if truths is None:
        raise ValueError("oracle scoring needs ground-truth PHOC vectors")
    if len(truths) != len(attributes):
        raise LengthMismatch(f"{len(truths)} truths for {len(attributes)} estimates")
    return [conf_oracle(row, truth) for row, truth in zip(attributes, truths)]
