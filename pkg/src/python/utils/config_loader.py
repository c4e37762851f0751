"""Carregamento e validação da configuração de execução (RunConfig).

A configuração é um arquivo JSON UTF-8 validado por modelos pydantic. Os
valores padrão do esquema são os do treinamento de referência (batch 10,
weight decay 5e-5, ADAM 0.9/0.999, 70000 iterações a 1e-4 + 10000 a 1e-5,
K = 20 ciclos, 10% e depois 60%, 10000 amostras aumentadas). Ajustes para
execução em desktop ficam em inputs/config/desk_config.json.

Erros de validação viram ConfigError com o caminho do campo, por exemplo
`synth.styles.0.stroke_width: lower bound 5.0 exceeds upper bound 2.0`.

Exemplo de uso:
    >>> config = ConfigLoader('inputs/config/desk_config.json').load(seed=7)
    >>> schedule = config.training.schedule(seed=123)
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.python.adapt.self_training import AdaptSchedule
from src.python.confidence.measures import MEASURES
from src.python.corpus.augmentation import AffineBounds
from src.python.estimator.architecture import reference_architecture
from src.python.estimator.trainer import REFERENCE_SEGMENTS, TrainingSchedule
from src.python.phoc.phoc_builder import DEFAULT_LEVELS, DEFAULT_SYMBOLS, Alphabet, PhocConfig
from src.python.spotting.evaluation import PROTOCOLS
from src.python.synth.styles import PRESET_STYLES, StyleFamily
from src.python.utils.errors import ConfigError
from src.python.utils.rng import MAX_SEED

PathLike = Union[str, Path]


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


class PhocSettings(_Section):
    levels: List[int] = list(DEFAULT_LEVELS)
    alphabet: str = DEFAULT_SYMBOLS
    overlap_threshold: float = 0.5

    def to_config(self) -> PhocConfig:
        try:
            return PhocConfig(tuple(self.levels), Alphabet.from_string(self.alphabet), self.overlap_threshold)
        except ValueError as exc:
            raise ConfigError(f"phoc: {exc}") from exc


class EstimatorSettings(_Section):
    input_height: int = Field(32, ge=4)
    input_width: int = Field(96, ge=4)
    hidden_units: int = Field(256, ge=1)
    dropout_p: float = Field(0.5, ge=0.0, lt=1.0)
    architecture: Optional[List[Dict[str, Any]]] = None

    @property
    def input_shape(self) -> Tuple[int, int]:
        return (self.input_height, self.input_width)

    def layers(self, output_dim: int) -> List[Dict[str, Any]]:
        if self.architecture is not None:
            return [dict(layer) for layer in self.architecture]
        return reference_architecture(output_dim, self.hidden_units)


class TrainingSettings(_Section):
    segments: List[Tuple[int, float]] = list(REFERENCE_SEGMENTS)
    batch_size: int = Field(10, ge=1)
    weight_decay: float = Field(5e-5, ge=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)
    log_every: int = Field(500, ge=0)

    @field_validator('segments')
    @classmethod
    def _check_segments(cls, value):
        if not value:
            raise ValueError("at least one (iterations, learning_rate) segment is required")
        for iterations, lr in value:
            if iterations < 0 or lr <= 0:
                raise ValueError(f"invalid segment ({iterations}, {lr})")
        return value

    def schedule(self, seed: int, dropout_seed: Optional[int] = None) -> TrainingSchedule:
        return TrainingSchedule(
            segments=tuple(tuple(s) for s in self.segments),
            batch_size=self.batch_size,
            weight_decay=self.weight_decay,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            seed=seed,
            dropout_seed=dropout_seed,
            log_every=self.log_every,
        )


class SynthSettings(_Section):
    words: List[str] = []
    wordlist: Optional[Path] = None
    per_word: int = Field(1, ge=1)
    style: str = 'style_a'
    styles: List[StyleFamily] = []
    scale_jitter: Optional[Tuple[float, float]] = (1.0, 2.0)

    @field_validator('scale_jitter')
    @classmethod
    def _check_jitter(cls, value):
        if value is not None and not 0 < value[0] <= value[1]:
            raise ValueError(f"scale_jitter must satisfy 0 < low <= high, got {value}")
        return value

    def resolve_style(self, style_id: Optional[str] = None) -> StyleFamily:
        style_id = style_id or self.style
        for family in self.styles:
            if family.id == style_id:
                return family
        if style_id in PRESET_STYLES:
            return PRESET_STYLES[style_id]
        known = sorted({f.id for f in self.styles} | set(PRESET_STYLES))
        raise ConfigError(f"synth.style: unknown style '{style_id}', expected one of {known}")


class AugmentationSettings(_Section):
    rotation: Tuple[float, float] = (-5.0, 5.0)
    shear: Tuple[float, float] = (-0.1, 0.1)
    scale: Tuple[float, float] = (0.9, 1.1)
    translate: Tuple[float, float] = (-2.0, 2.0)

    def to_bounds(self) -> AffineBounds:
        try:
            return AffineBounds(self.rotation, self.shear, self.scale, self.translate)
        except ValueError as exc:
            raise ConfigError(f"adapt.augmentation: {exc}") from exc


class AdaptSettings(_Section):
    cycles: int = Field(20, ge=1)
    initial_fraction: float = Field(0.10, gt=0.0, le=1.0)
    later_fraction: float = Field(0.60, gt=0.0, le=1.0)
    switch_after: int = Field(10, ge=0)
    fractions: List[float] = []
    augmented_size: int = Field(10000, ge=1)
    learning_rate: float = Field(1e-5, gt=0.0)
    epochs: int = Field(1, ge=1)
    measure: str = 'sigmoid'
    mc_passes: int = Field(100, ge=2)
    augmentation: AugmentationSettings = AugmentationSettings()

    @field_validator('measure')
    @classmethod
    def _check_measure(cls, value: str) -> str:
        value = value.replace('-', '_')
        if value not in MEASURES:
            raise ValueError(f"unknown confidence measure '{value}', expected one of {list(MEASURES)}")
        return value

    @field_validator('fractions')
    @classmethod
    def _check_fractions(cls, value):
        for fraction in value:
            if not 0.0 < fraction <= 1.0:
                raise ValueError(f"selection fractions must be in (0, 1], got {fraction}")
        return value

    def schedule(self, seed: int, training: TrainingSettings, measure: Optional[str] = None) -> AdaptSchedule:
        try:
            return AdaptSchedule(
                cycles=self.cycles,
                initial_fraction=self.initial_fraction,
                later_fraction=self.later_fraction,
                switch_after=self.switch_after,
                fractions=tuple(self.fractions),
                augmented_size=self.augmented_size,
                learning_rate=self.learning_rate,
                epochs=self.epochs,
                batch_size=training.batch_size,
                weight_decay=training.weight_decay,
                measure=(measure or self.measure).replace('-', '_'),
                mc_passes=self.mc_passes,
                seed=seed,
                affine_bounds=self.augmentation.to_bounds(),
                log_every=training.log_every,
            )
        except ValueError as exc:
            raise ConfigError(f"adapt: {exc}") from exc


class EvaluationSettings(_Section):
    protocols: List[str] = list(PROTOCOLS)
    exclude_self: bool = True
    stopwords: List[str] = []
    stopword_file: Optional[Path] = None

    @field_validator('protocols')
    @classmethod
    def _check_protocols(cls, value):
        for protocol in value:
            if protocol not in PROTOCOLS:
                raise ValueError(f"unknown protocol '{protocol}', expected one of {list(PROTOCOLS)}")
        return value


class PathSettings(_Section):
    train_corpus: Optional[Path] = None
    target_corpus: Optional[Path] = None
    eval_corpus: Optional[Path] = None
    lexicon: Optional[Path] = None
    model: Optional[Path] = None
    output_dir: Path = Path('outputs')


class RunConfig(_Section):
    """Complete configuration of one command run; the seed is mandatory"""

    seed: int = Field(..., ge=0, lt=MAX_SEED)
    phoc: PhocSettings = PhocSettings()
    estimator: EstimatorSettings = EstimatorSettings()
    training: TrainingSettings = TrainingSettings()
    synth: SynthSettings = SynthSettings()
    adapt: AdaptSettings = AdaptSettings()
    evaluation: EvaluationSettings = EvaluationSettings()
    paths: PathSettings = PathSettings()

    def require(self, *fields: str) -> None:
        """Raise ConfigError unless every dotted path field (e.g. 'paths.lexicon') names an existing file"""
        for dotted in fields:
            value: Any = self
            for part in dotted.split('.'):
                value = getattr(value, part)
            if value is None:
                raise ConfigError(f"{dotted}: required by this command but not configured")
            if not Path(value).exists():
                raise ConfigError(f"{dotted}: path does not exist: {value}")


def format_validation_error(error: ValidationError) -> str:
    """One line per problem: dotted field path and pydantic's message"""
    lines = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item['loc']) or '<root>'
        lines.append(f"{location}: {item['msg']}")
    return '; '.join(lines)


class ConfigLoader:
    """Loads RunConfig from a JSON file plus command-line overrides"""

    def __init__(self, config_path: Optional[PathLike] = None):
        self.config_path = Path(config_path) if config_path else None

    def _read(self) -> Dict[str, Any]:
        if self.config_path is None:
            return {}
        if not self.config_path.is_file():
            raise ConfigError(f"config file not found: {self.config_path}")
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse config {self.config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {self.config_path} must contain a JSON object")
        # keys starting with '_' are comments
        return {k: v for k, v in data.items() if not k.startswith('_')}

    def load(self, seed: Optional[int] = None, output_dir: Optional[PathLike] = None) -> RunConfig:
        data = self._read()
        if seed is not None:
            data['seed'] = seed
        if output_dir is not None:
            data.setdefault('paths', {})
            data['paths'] = dict(data['paths'], output_dir=str(output_dir))
        try:
            return RunConfig.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(format_validation_error(exc)) from exc


def load_config(path: Optional[PathLike] = None, seed: Optional[int] = None,
                output_dir: Optional[PathLike] = None) -> RunConfig:
    return ConfigLoader(path).load(seed=seed, output_dir=output_dir)
