"""Aumento de dados por transformações afins e balanceamento de classes.

Cada amostra emitida é uma transformação afim aleatória (rotação, cisalhamento,
escala e translação) de uma imagem de origem da mesma classe. O balanceamento
distribui as amostras de forma igual entre as classes de rótulo.

Exemplo de uso:
    >>> rng = np.random.default_rng(0)
    >>> augmented = balance_and_augment(samples, target_count=10000, rng=rng)
"""

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import cv2
import numpy as np

from src.python.corpus.word_image import WordImage

Range = Tuple[float, float]


@dataclass(frozen=True)
class AffineBounds:
    """Sampling bounds for random affine augmentation"""

    rotation: Range = (-5.0, 5.0)      # degrees
    shear: Range = (-0.1, 0.1)
    scale: Range = (0.9, 1.1)          # per axis
    translate: Range = (-2.0, 2.0)     # pixels

    def __post_init__(self):
        for name in ('rotation', 'shear', 'scale', 'translate'):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"affine bound '{name}' has lower > upper: ({lo}, {hi})")
        if self.scale[0] <= 0:
            raise ValueError("affine scale bounds must be positive")


@dataclass(frozen=True)
class AffineParams:
    rotation: float = 0.0
    shear: float = 0.0
    scale_x: float = 1.0
    scale_y: float = 1.0
    translate_x: float = 0.0
    translate_y: float = 0.0

    @classmethod
    def identity(cls) -> 'AffineParams':
        return cls()

    @property
    def is_identity(self) -> bool:
        return self == AffineParams()


def sample_affine(rng: np.random.Generator, bounds: Optional[AffineBounds] = None) -> AffineParams:
    """Draw each parameter uniformly within its bounds"""
    bounds = bounds or AffineBounds()
    return AffineParams(
        rotation=float(rng.uniform(*bounds.rotation)),
        shear=float(rng.uniform(*bounds.shear)),
        scale_x=float(rng.uniform(*bounds.scale)),
        scale_y=float(rng.uniform(*bounds.scale)),
        translate_x=float(rng.uniform(*bounds.translate)),
        translate_y=float(rng.uniform(*bounds.translate)),
    )


def affine_matrix(params: AffineParams, height: int, width: int) -> np.ndarray:
    """Forward 2x3 map about the image centre: T(c + t) . R . Sh . S . T(-c)"""
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    theta = math.radians(params.rotation)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    rotation = np.array([[cos_t, -sin_t, 0.0], [sin_t, cos_t, 0.0], [0.0, 0.0, 1.0]])
    shear = np.array([[1.0, params.shear, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    scale = np.diag([params.scale_x, params.scale_y, 1.0])
    to_origin = np.array([[1.0, 0.0, -cx], [0.0, 1.0, -cy], [0.0, 0.0, 1.0]])
    back = np.array([
        [1.0, 0.0, cx + params.translate_x],
        [0.0, 1.0, cy + params.translate_y],
        [0.0, 0.0, 1.0],
    ])
    return (back @ rotation @ shear @ scale @ to_origin)[:2]


def apply_affine(image: WordImage, params: AffineParams) -> WordImage:
    """Bilinear warp with zero fill; identity parameters return an exact copy"""
    if params.is_identity:
        return image.copy()
    matrix = affine_matrix(params, image.height, image.width)
    warped = cv2.warpAffine(
        image.pixels.astype(np.float32),
        matrix,
        (image.width, image.height),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=0.0,
    )
    return WordImage(np.clip(warped, 0.0, 1.0))


def _class_counts(num_classes: int, target_count: int, rng: np.random.Generator) -> np.ndarray:
    counts = np.full(num_classes, target_count // num_classes, dtype=np.int64)
    remainder = target_count % num_classes
    if remainder:
        counts[rng.choice(num_classes, size=remainder, replace=False)] += 1
    return counts


def balance_and_augment(
    samples: Sequence[Tuple[WordImage, str]],
    target_count: int,
    rng: np.random.Generator,
    bounds: Optional[AffineBounds] = None
) -> List[Tuple[WordImage, str]]:
    """Class-balanced augmented training set of exactly `target_count` pairs

    Every class gets target_count // classes samples; the remainder goes to
    distinct randomly chosen classes. The class sequence is shuffled, and each
    emitted image is a fresh affine augmentation of a uniformly chosen source
    image of its class.
    """
    if not samples:
        raise ValueError("balance_and_augment needs at least one sample")

    by_class: Dict[str, List[WordImage]] = OrderedDict()
    for image, label in samples:
        by_class.setdefault(label, []).append(image)
    labels = sorted(by_class)

    if target_count < len(labels):
        raise ValueError(
            f"target_count ({target_count}) must be >= number of classes ({len(labels)})"
        )

    counts = _class_counts(len(labels), target_count, rng)
    sequence = np.repeat(np.arange(len(labels)), counts)
    sequence = sequence[rng.permutation(len(sequence))]

    augmented = []
    for class_index in sequence:
        label = labels[class_index]
        sources = by_class[label]
        source = sources[int(rng.integers(len(sources)))]
        augmented.append((apply_affine(source, sample_affine(rng, bounds)), label))
    return augmented
