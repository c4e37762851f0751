"""Benchmark sintético de dois estilos para reproduzir tendências de adaptação.

Domínio de origem: palavras renderizadas no estilo A (rotuladas, usadas no
treino inicial depois de ampliadas por transformações afins com cisalhamento
largo). Domínio alvo: as mesmas palavras no estilo B, sem rótulos para a
adaptação e com rótulos apenas no conjunto de avaliação. O léxico é
"baseado na língua": contém as palavras de origem e omite uma parcela
controlada (OOV) do vocabulário alvo.

Tudo é gerado em memória a partir de uma única semente.

Exemplo de uso:
    >>> words = load_benchmark_vocabulary()
    >>> result = run_trend_experiment(words, seed=1, measures=('sigmoid', 'random'))
    >>> result.final_map['sigmoid']['qbs'] - result.initial_map['qbs']
"""

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.python.adapt.self_training import AdaptSchedule, DiagnosticSet, adapt, selection_accuracy
from src.python.corpus.augmentation import AffineBounds, balance_and_augment
from src.python.corpus.word_image import WordImage, normalize
from src.python.estimator.architecture import reference_architecture
from src.python.estimator.model import EstimatorModel, init_model, predict_batch
from src.python.estimator.trainer import TrainingSchedule, train
from src.python.phoc.phoc_builder import PhocConfig, phoc_of_string
from src.python.spotting.evaluation import evaluate_attributes
from src.python.spotting.lexicon import Lexicon, oov_rate, read_word_list
from src.python.synth.renderer import render_word, rescale
from src.python.synth.styles import STYLE_A, STYLE_B, StyleFamily
from src.python.utils.rng import SeedStreams

project_root = Path(__file__).parent.parent.parent.parent
DEFAULT_VOCABULARY = project_root / 'inputs' / 'lexicon' / 'common_words.txt'

# shear up to 0.3 spans the slant of either preset hand
SOURCE_AFFINE = AffineBounds(rotation=(-3.0, 3.0), shear=(-0.3, 0.3), scale=(0.9, 1.1), translate=(-2.0, 2.0))


@dataclass(frozen=True)
class BenchmarkConfig:
    """Corpus sizes, styles and schedules of one benchmark run"""

    target_words: int = 100
    source_per_word: int = 5
    target_per_word: int = 10
    eval_per_word: int = 5
    oov_fraction: float = 0.10
    source_style: StyleFamily = STYLE_A
    target_style: StyleFamily = STYLE_B
    scale_jitter: Optional[Tuple[float, float]] = (1.0, 2.0)
    input_shape: Tuple[int, int] = (32, 96)
    source_augmented_size: Optional[int] = 8000
    source_affine: AffineBounds = SOURCE_AFFINE
    initial_training: TrainingSchedule = TrainingSchedule(segments=((4000, 1e-4), (500, 1e-5)), log_every=0)
    adaptation: AdaptSchedule = field(default_factory=AdaptSchedule)


@dataclass
class BenchmarkData:
    lexicon: Lexicon
    source: List[Tuple[WordImage, str]]
    target_images: List[WordImage]
    target_transcriptions: List[str]
    eval_images: List[WordImage]
    eval_transcriptions: List[str]

    @property
    def oov_rate(self) -> float:
        return oov_rate(self.lexicon, self.target_transcriptions)


@dataclass
class TrendResult:
    seed: int
    initial_map: Dict[str, float]
    final_map: Dict[str, Dict[str, float]] = field(default_factory=dict)
    first_cycle_accuracy: Dict[str, Optional[float]] = field(default_factory=dict)
    oov_rate: float = 0.0


def load_benchmark_vocabulary(path: Path = DEFAULT_VOCABULARY) -> List[str]:
    return read_word_list(path)


def _render_set(
    words: Sequence[str],
    per_word: int,
    style: StyleFamily,
    config: BenchmarkConfig,
    rng: np.random.Generator
) -> List[Tuple[WordImage, str]]:
    jobs = [word for word in words for _ in range(per_word)]
    samples = []
    for word, stream in zip(jobs, rng.spawn(len(jobs))):
        image = render_word(word, style, stream)
        if config.scale_jitter is not None:
            image = rescale(image, float(stream.uniform(*config.scale_jitter)))
        samples.append((normalize(image, *config.input_shape), word))
    return samples


def build_benchmark(
    words: Sequence[str],
    config: BenchmarkConfig,
    streams: SeedStreams,
    phoc_config: Optional[PhocConfig] = None
) -> BenchmarkData:
    """Render the source, target and evaluation corpora and the language-based lexicon"""
    phoc_config = phoc_config or PhocConfig()
    vocabulary = list(Lexicon.from_words(words, phoc_config).words)
    if len(vocabulary) < config.target_words:
        raise ValueError(f"vocabulary has {len(vocabulary)} words, benchmark needs {config.target_words}")

    pick = streams.generator('synth', 0)
    order = pick.permutation(len(vocabulary))
    target_vocab = [vocabulary[i] for i in sorted(order[:config.target_words])]
    oov_count = math.ceil(round(config.oov_fraction * len(target_vocab), 9))
    oov = {target_vocab[i] for i in pick.choice(len(target_vocab), size=oov_count, replace=False)}
    lexicon = Lexicon.from_words([w for w in vocabulary if w not in oov], phoc_config)

    source = _render_set(lexicon.words, config.source_per_word, config.source_style, config,
                         streams.generator('synth', 1))
    target = _render_set(target_vocab, config.target_per_word, config.target_style, config,
                         streams.generator('synth', 2))
    evaluation = _render_set(target_vocab, config.eval_per_word, config.target_style, config,
                             streams.generator('synth', 3))

    return BenchmarkData(
        lexicon=lexicon,
        source=source,
        target_images=[image for image, _ in target],
        target_transcriptions=[word for _, word in target],
        eval_images=[image for image, _ in evaluation],
        eval_transcriptions=[word for _, word in evaluation],
    )


def train_initial_model(data: BenchmarkData, config: BenchmarkConfig, streams: SeedStreams,
                        logger=None) -> EstimatorModel:
    phoc_config = data.lexicon.phoc_config
    model = init_model(reference_architecture(phoc_config.dim), streams.integer('init'),
                       phoc_config, config.input_shape)
    source = data.source
    if config.source_augmented_size:
        source = balance_and_augment(source, max(config.source_augmented_size, len(data.lexicon)),
                                     streams.generator('synth', 4), config.source_affine)
    dataset = [(image, phoc_of_string(word, phoc_config)) for image, word in source]
    schedule = replace(config.initial_training, seed=streams.integer('train'),
                       dropout_seed=streams.integer('dropout'))
    model, _ = train(model, dataset, schedule, logger=logger)
    return model


def evaluate_model(model: EstimatorModel, data: BenchmarkData, protocols=('qbs', 'qbe')) -> Dict[str, float]:
    attributes = predict_batch(model, data.eval_images)
    return {
        protocol: evaluate_attributes(protocol, data.eval_transcriptions, attributes, model.phoc_config).mean_ap
        for protocol in protocols
    }


def run_trend_experiment(
    words: Sequence[str],
    seed: int,
    measures: Sequence[str] = ('sigmoid',),
    config: Optional[BenchmarkConfig] = None,
    logger=None
) -> TrendResult:
    """Initial (source-only) mAP and final mAP after adaptation with each confidence measure"""
    config = config or BenchmarkConfig()
    streams = SeedStreams(seed)
    data = build_benchmark(words, config, streams)
    initial = train_initial_model(data, config, streams, logger)
    result = TrendResult(seed=seed, initial_map=evaluate_model(initial, data), oov_rate=data.oov_rate)
    if logger:
        logger.info(f"seed {seed}: OOV {result.oov_rate:.1%}")
        logger.metrics(f"seed {seed}, initial", result.initial_map)

    for measure in measures:
        schedule = replace(config.adaptation, measure=measure, seed=streams.integer('adapt'))
        adapted, reports = adapt(
            initial, data.target_images, data.lexicon, schedule,
            diagnostics=DiagnosticSet(unlabeled_transcriptions=data.target_transcriptions),
            oracle_labels=data.target_transcriptions if measure == 'oracle' else None,
            logger=logger,
        )
        result.final_map[measure] = evaluate_model(adapted, data)
        result.first_cycle_accuracy[measure] = reports[0].pseudo_label_accuracy
        if logger:
            logger.metrics(f"seed {seed}, {measure} adapted", result.final_map[measure])
    return result


def subset_accuracy(
    words: Sequence[str],
    seed: int,
    measures: Sequence[str] = ('sigmoid', 'random'),
    fraction: float = 0.25,
    config: Optional[BenchmarkConfig] = None
) -> Dict[str, float]:
    """Pseudo-label accuracy of the most confident `fraction` of the target corpus, per measure"""
    config = config or BenchmarkConfig()
    streams = SeedStreams(seed)
    data = build_benchmark(words, config, streams)
    initial = train_initial_model(data, config, streams)
    return {
        measure: selection_accuracy(
            initial, data.target_images, data.target_transcriptions, data.lexicon,
            measure, fraction, streams.generator('adapt', 0), config.adaptation.mc_passes,
        )
        for measure in measures
    }
