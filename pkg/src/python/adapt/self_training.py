"""Adaptação sem anotações por auto-treinamento com pseudo-rótulos.

Cada ciclo:
    1. estima os atributos de todas as imagens não rotuladas (modo eval)
    2. pontua cada estimativa com a medida de confiança do cronograma
    3. seleciona a fração mais confiável (sobre o conjunto completo)
    4. gera pseudo-rótulos por reconhecimento com o léxico; o alvo de treino é
       o PHOC da entrada do léxico, nunca a própria estimativa
    5. balanceia as classes e aumenta o conjunto até o tamanho configurado
    6. treina o modelo (épocas e learning rate do ciclo)

Os pseudo-rótulos de um ciclo são descartados no ciclo seguinte. Rótulos
verdadeiros só entram como diagnóstico (acurácia dos pseudo-rótulos, mAP) ou
na medida 'oracle', que é um limite superior de referência.

Exemplo de uso:
    >>> schedule = AdaptSchedule(cycles=20, measure='sigmoid', seed=3)
    >>> adapted, reports = adapt(model, unlabeled_images, lexicon, schedule, logger=logger)
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.python.confidence.measures import MEASURES, ConfidenceScore, score_batch
from src.python.confidence.selection import select_top_fraction
from src.python.corpus.augmentation import AffineBounds, balance_and_augment
from src.python.corpus.word_image import WordImage
from src.python.estimator.model import EstimatorModel, predict_batch
from src.python.estimator.trainer import TrainingSchedule, train
from src.python.phoc.phoc_builder import PhocVector, canonicalize, phoc_of_string
from src.python.spotting.evaluation import evaluate_attributes
from src.python.spotting.lexicon import Lexicon
from src.python.spotting.retrieval import recognize_batch
from src.python.utils.errors import EmptyCorpus, EmptyLexicon
from src.python.utils.rng import derive_rng, derive_seed


@dataclass(frozen=True)
class AdaptSchedule:
    """Cycle count, selection fractions, augmentation size and cycle training settings"""

    cycles: int = 20
    initial_fraction: float = 0.10
    later_fraction: float = 0.60
    switch_after: int = 10
    fractions: Tuple[float, ...] = ()
    augmented_size: int = 10000
    learning_rate: float = 1e-5
    epochs: int = 1
    batch_size: int = 10
    weight_decay: float = 5e-5
    measure: str = 'sigmoid'
    mc_passes: int = 100
    seed: int = 0
    affine_bounds: AffineBounds = field(default_factory=AffineBounds)
    log_every: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'fractions', tuple(float(f) for f in self.fractions))
        if self.cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {self.cycles}")
        if self.fractions and len(self.fractions) != self.cycles:
            raise ValueError(f"{len(self.fractions)} explicit fractions for {self.cycles} cycles")
        for fraction in (self.initial_fraction, self.later_fraction) + self.fractions:
            if not 0.0 < fraction <= 1.0:
                raise ValueError(f"selection fractions must be in (0, 1], got {fraction}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown confidence measure '{self.measure}', expected one of {MEASURES}")
        if self.augmented_size < 1 or self.epochs < 1:
            raise ValueError("augmented_size and epochs must be >= 1")

    def fraction_for(self, cycle: int) -> float:
        """Selection fraction of 1-based `cycle`"""
        if not 1 <= cycle <= self.cycles:
            raise ValueError(f"cycle {cycle} outside 1..{self.cycles}")
        if self.fractions:
            return self.fractions[cycle - 1]
        return self.initial_fraction if cycle <= self.switch_after else self.later_fraction

    def training_schedule(self, seed: int, dropout_seed: Optional[int] = None) -> TrainingSchedule:
        return TrainingSchedule(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            weight_decay=self.weight_decay,
            seed=seed,
            dropout_seed=dropout_seed,
            log_every=self.log_every,
        )


@dataclass(frozen=True)
class PseudoLabel:
    image_id: int
    attributes: np.ndarray
    confidence: ConfidenceScore
    label: str
    target: PhocVector


@dataclass
class PseudoLabeledSet:
    """Selected images with their lexicon pseudo-labels and training targets"""

    items: List[PseudoLabel] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def labels(self) -> List[str]:
        return [item.label for item in self.items]


@dataclass
class DiagnosticSet:
    """Labeled data used for reporting only; never reaches selection or training"""

    unlabeled_transcriptions: Optional[Sequence[str]] = None
    eval_images: Optional[Sequence[WordImage]] = None
    eval_transcriptions: Optional[Sequence[str]] = None
    protocols: Tuple[str, ...] = ('qbs', 'qbe')
    stopwords: Tuple[str, ...] = ()


@dataclass
class CycleReport:
    cycle: int
    fraction: float
    selected: int
    mean_confidence: float
    classes: int
    losses: List[float] = field(default_factory=list)
    mean_label_length: float = 0.0
    pseudo_label_accuracy: Optional[float] = None
    map_scores: Dict[str, float] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        """JSON-ready run-log record"""
        return {
            'cycle': self.cycle,
            'fraction': self.fraction,
            'selected': self.selected,
            'mean_confidence': self.mean_confidence,
            'classes': self.classes,
            'loss_mean': float(np.mean(self.losses)) if self.losses else None,
            'loss_final': self.losses[-1] if self.losses else None,
            'loss_trace': list(self.losses),
            'mean_label_length': self.mean_label_length,
            'pseudo_label_accuracy': self.pseudo_label_accuracy,
            'map': dict(sorted(self.map_scores.items())),
        }


def pseudo_label(
    attributes: np.ndarray,
    scores: Sequence[ConfidenceScore],
    selected: Sequence[int],
    lexicon: Lexicon
) -> PseudoLabeledSet:
    """Recognize the selected estimates; targets are the lexicon entries' PHOCs"""
    recognitions = recognize_batch(attributes[list(selected)], lexicon)
    return PseudoLabeledSet([
        PseudoLabel(
            image_id=int(i),
            attributes=attributes[i],
            confidence=scores[i],
            label=result.label,
            target=lexicon.phoc(result.lexicon_index),
        )
        for i, result in zip(selected, recognitions)
    ])


def label_accuracy(pseudo: PseudoLabeledSet, transcriptions: Sequence[str], lexicon: Lexicon) -> float:
    """Share of pseudo-labels equal to the canonical true transcription"""
    if not pseudo.items:
        return 0.0
    alphabet = lexicon.phoc_config.alphabet
    correct = sum(
        1 for item in pseudo.items
        if canonicalize(transcriptions[item.image_id], alphabet) == item.label
    )
    return correct / len(pseudo.items)


def _diagnostic_maps(model: EstimatorModel, diagnostics: DiagnosticSet) -> Dict[str, float]:
    if not diagnostics.eval_images or not diagnostics.eval_transcriptions:
        return {}
    attributes = predict_batch(model, diagnostics.eval_images)
    return {
        protocol: evaluate_attributes(
            protocol, diagnostics.eval_transcriptions, attributes, model.phoc_config,
            stopwords=diagnostics.stopwords,
        ).mean_ap
        for protocol in diagnostics.protocols
    }


def _oracle_truths(labels: Optional[Sequence[str]], model: EstimatorModel) -> Optional[List[PhocVector]]:
    if labels is None:
        return None
    return [phoc_of_string(label, model.phoc_config) for label in labels]


def run_cycle(
    model: EstimatorModel,
    unlabeled: Sequence[WordImage],
    lexicon: Lexicon,
    schedule: AdaptSchedule,
    cycle_index: int,
    rng: np.random.Generator,
    diagnostics: Optional[DiagnosticSet] = None,
    oracle_truths: Optional[Sequence[PhocVector]] = None,
    logger=None
) -> Tuple[EstimatorModel, CycleReport]:
    """One estimate / select / pseudo-label / augment / train cycle"""
    if not unlabeled:
        raise EmptyCorpus("adaptation needs unlabeled images")
    if len(lexicon) == 0:
        raise EmptyLexicon("adaptation needs a non-empty lexicon")
    if schedule.measure == 'oracle' and oracle_truths is None:
        raise ValueError("the oracle measure needs ground-truth labels")

    score_rng, augment_rng, train_rng = rng.spawn(3)
    fraction = schedule.fraction_for(cycle_index)

    attributes = predict_batch(model, unlabeled).astype(np.float64)
    scores = score_batch(
        schedule.measure, model, unlabeled, attributes,
        rng=score_rng, passes=schedule.mc_passes, truths=oracle_truths,
    )
    selected = select_top_fraction(list(enumerate(scores)), fraction)
    pseudo = pseudo_label(attributes, scores, selected, lexicon)

    report = CycleReport(
        cycle=cycle_index,
        fraction=fraction,
        selected=len(pseudo),
        mean_confidence=float(np.mean([item.confidence.value for item in pseudo.items])),
        classes=len(set(pseudo.labels)),
        mean_label_length=float(np.mean([len(label) for label in pseudo.labels])),
    )
    if diagnostics and diagnostics.unlabeled_transcriptions is not None:
        report.pseudo_label_accuracy = label_accuracy(pseudo, diagnostics.unlabeled_transcriptions, lexicon)

    targets = {item.label: item.target for item in pseudo.items}
    # every pseudo-label class keeps at least one sample
    augmented = balance_and_augment(
        [(unlabeled[item.image_id], item.label) for item in pseudo.items],
        max(schedule.augmented_size, len(targets)),
        augment_rng,
        schedule.affine_bounds,
    )
    dataset = [(image, targets[label]) for image, label in augmented]
    train_seed = int(train_rng.integers(2 ** 63))
    training = schedule.training_schedule(train_seed, derive_seed(schedule.seed, 'dropout', cycle_index))
    model, report.losses = train(model, dataset, training, logger=logger)

    if diagnostics:
        report.map_scores = _diagnostic_maps(model, diagnostics)
    return model, report


def adapt(
    model: EstimatorModel,
    unlabeled: Sequence[WordImage],
    lexicon: Lexicon,
    schedule: AdaptSchedule,
    diagnostics: Optional[DiagnosticSet] = None,
    oracle_labels: Optional[Sequence[str]] = None,
    on_cycle_end: Optional[Callable[[EstimatorModel, CycleReport], None]] = None,
    logger=None
) -> Tuple[EstimatorModel, List[CycleReport]]:
    """Run exactly `schedule.cycles` cycles on a copy of `model`

    Cycle k draws from the substream ('adapt', k) of `schedule.seed`, so its
    training set depends only on the model entering the cycle and the seed.
    """
    if not unlabeled:
        raise EmptyCorpus("adaptation needs unlabeled images")
    current = model.copy()
    truths = _oracle_truths(oracle_labels, current) if schedule.measure == 'oracle' else None
    reports: List[CycleReport] = []

    for cycle in range(1, schedule.cycles + 1):
        if logger:
            logger.cycle(cycle, schedule.cycles,
                         f"measure={schedule.measure} fraction={schedule.fraction_for(cycle):.2f}")
        current, report = run_cycle(
            current, unlabeled, lexicon, schedule, cycle,
            derive_rng(schedule.seed, 'adapt', cycle),
            diagnostics=diagnostics, oracle_truths=truths, logger=logger,
        )
        reports.append(report)
        if logger:
            summary = f"  selected {report.selected} ({report.classes} classes), loss {np.mean(report.losses):.4f}"
            if report.pseudo_label_accuracy is not None:
                summary += f", pseudo-label accuracy {report.pseudo_label_accuracy:.3f}"
            for protocol, value in sorted(report.map_scores.items()):
                summary += f", {protocol} mAP {value:.4f}"
            logger.info(summary)
        if on_cycle_end:
            on_cycle_end(current, report)

    return current, reports


def selection_accuracy(
    model: EstimatorModel,
    images: Sequence[WordImage],
    transcriptions: Sequence[str],
    lexicon: Lexicon,
    measure: str,
    fraction: float,
    rng: np.random.Generator,
    passes: int = 100
) -> float:
    """Pseudo-label accuracy of the `fraction` most confident images under `measure` (diagnostic)"""
    attributes = predict_batch(model, images).astype(np.float64)
    truths = _oracle_truths(transcriptions, model) if measure == 'oracle' else None
    scores = score_batch(measure, model, images, attributes, rng=rng, passes=passes, truths=truths)
    selected = select_top_fraction(list(enumerate(scores)), fraction)
    return label_accuracy(pseudo_label(attributes, scores, selected, lexicon), transcriptions, lexicon)
