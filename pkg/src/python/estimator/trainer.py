"""Treinamento do estimador por mini-batches com ADAM.

O conjunto de treino é percorrido por um fluxo contínuo de permutações
aleatórias: cada iteração consome os próximos `batch_size` índices, gerando
uma nova permutação sempre que a anterior se esgota. Cada iteração executa um
adam_step sobre o gradiente médio do batch.

Cronogramas suportados:
    - segmentos de iterações: ((70000, 1e-4), (10000, 1e-5))
    - épocas: epochs=1 com learning_rate=1e-5 (ciclos de adaptação)

Exemplo de uso:
    >>> schedule = TrainingSchedule(segments=((4000, 1e-4), (500, 1e-5)), seed=11)
    >>> model, losses = train(model, dataset, schedule, logger=logger)
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.python.estimator.model import EstimatorModel, as_values, loss_and_gradient, stack_images
from src.python.estimator.optimizer import AdamState, adam_step
from src.python.utils.errors import EmptyDataset, LengthMismatch

REFERENCE_SEGMENTS = ((70000, 1e-4), (10000, 1e-5))


@dataclass(frozen=True)
class TrainingSchedule:
    """Iteration segments (count, lr) or an epoch count at a single learning rate"""

    segments: Tuple[Tuple[int, float], ...] = REFERENCE_SEGMENTS
    epochs: Optional[int] = None
    learning_rate: float = 1e-5
    batch_size: int = 10
    weight_decay: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    dropout_seed: Optional[int] = None
    log_every: int = 500

    def __post_init__(self):
        segments = tuple((int(n), float(lr)) for n, lr in self.segments)
        object.__setattr__(self, 'segments', segments)
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs is not None:
            if self.epochs < 1:
                raise ValueError(f"epochs must be >= 1, got {self.epochs}")
            if self.learning_rate <= 0:
                raise ValueError("learning_rate must be positive")
        else:
            if not segments:
                raise ValueError("an iteration schedule needs at least one segment")
            for count, lr in segments:
                if count < 0 or lr <= 0:
                    raise ValueError(f"invalid schedule segment ({count}, {lr})")

    def learning_rates(self, dataset_size: int) -> List[float]:
        """Learning rate of every iteration"""
        if self.epochs is not None:
            iterations = math.ceil(self.epochs * dataset_size / self.batch_size)
            return [self.learning_rate] * iterations
        rates: List[float] = []
        for count, lr in self.segments:
            rates.extend([lr] * count)
        return rates


class BatchStream:
    """Endless stream of shuffled index batches (a new permutation whenever one runs out)"""

    def __init__(self, size: int, batch_size: int, rng: np.random.Generator):
        self.size = size
        self.batch_size = batch_size
        self.rng = rng
        self._order = np.empty(0, dtype=np.int64)

    def next(self) -> np.ndarray:
        while len(self._order) < self.batch_size:
            self._order = np.concatenate([self._order, self.rng.permutation(self.size)])
        batch, self._order = self._order[:self.batch_size], self._order[self.batch_size:]
        return batch


def _as_arrays(model: EstimatorModel, dataset: Sequence[Tuple[Any, Any]]) -> Tuple[np.ndarray, np.ndarray]:
    images = stack_images(model, [image for image, _ in dataset])
    targets = np.stack([as_values(target) for _, target in dataset]).astype(model.dtype)
    if targets.shape[1] != model.output_dim:
        raise LengthMismatch(f"targets have {targets.shape[1]} attributes, model outputs {model.output_dim}")
    return images, targets


def train(
    model: EstimatorModel,
    dataset: Sequence[Tuple[Any, Any]],
    schedule: TrainingSchedule,
    logger=None,
    on_iteration: Optional[Callable[[int, float], None]] = None
) -> Tuple[EstimatorModel, List[float]]:
    """Train a copy of `model`; returns (trained model, per-iteration loss trace)

    Each call starts from a fresh ADAM state. Shuffling and dropout draw from two
    child streams of `schedule.seed`; a `dropout_seed` gives the dropout masks their
    own stream. Runs are reproducible for a fixed dataset order.
    """
    if not dataset:
        raise EmptyDataset("training set is empty")

    images, targets = _as_arrays(model, dataset)
    trained = model.copy()
    shuffle_rng, dropout_rng = np.random.default_rng(schedule.seed).spawn(2)
    if schedule.dropout_seed is not None:
        dropout_rng = np.random.default_rng(schedule.dropout_seed)
    stream = BatchStream(len(images), schedule.batch_size, shuffle_rng)
    state = AdamState.for_params(
        trained.params,
        beta1=schedule.beta1,
        beta2=schedule.beta2,
        eps=schedule.eps,
        weight_decay=schedule.weight_decay,
    )

    rates = schedule.learning_rates(len(images))
    losses: List[float] = []
    if logger:
        logger.info(f"  training {trained.num_parameters} parameters: "
                    f"{len(rates)} iterations, batch {schedule.batch_size}, {len(images)} samples")

    for iteration, lr in enumerate(rates, 1):
        batch = stream.next()
        loss, grads = loss_and_gradient(trained, images[batch], targets[batch], 'train', dropout_rng)
        state.lr = lr
        adam_step(state, trained.params, grads)
        losses.append(loss)

        if on_iteration:
            on_iteration(iteration, loss)
        if logger and schedule.log_every and iteration % schedule.log_every == 0:
            window = losses[-schedule.log_every:]
            logger.iteration(iteration, len(rates), lr, float(np.mean(window)))

    return trained, losses
