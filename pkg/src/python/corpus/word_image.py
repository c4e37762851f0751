"""Representação, leitura/escrita e normalização de imagens de palavras.

Convenção: tinta = 1, fundo = 0, valores em [0, 1] (float32).
Arquivos em disco são PGM binários (P5, maxval 255); a conversão é linear
(v = k / 255), de modo que escrever e ler de volta preserva os valores.

Exemplo de uso:
    >>> image = read_image('outputs/synth_style_a/images/000000_the.pgm')
    >>> net_input = normalize(image, 32, 96, invert=True)
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import cv2
import numpy as np
from PIL import Image, UnidentifiedImageError

from src.python.utils.errors import IoError, MalformedImage

PathLike = Union[str, Path]


@dataclass(eq=False)
class WordImage:
    """Grayscale word image, row-major, ink = 1"""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float32)
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError(f"word image must be a non-empty 2-D array, got shape {pixels.shape}")
        if not np.all(np.isfinite(pixels)) or pixels.min() < 0.0 or pixels.max() > 1.0:
            raise ValueError("word image pixels must lie in [0, 1]")
        self.pixels = pixels

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self):
        return self.pixels.shape

    @classmethod
    def zeros(cls, height: int, width: int) -> 'WordImage':
        return cls(np.zeros((height, width), dtype=np.float32))

    def copy(self) -> 'WordImage':
        return WordImage(self.pixels.copy())

    def inverted(self) -> 'WordImage':
        return WordImage(1.0 - self.pixels)


def read_image(path: PathLike) -> WordImage:
    """Read an 8-bit grayscale PGM (P5) file into a WordImage

    Raises:
        IoError: file missing or unreadable
        MalformedImage: not a valid 8-bit grayscale PGM (including truncated data)
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"image not found: {path}")
    try:
        with Image.open(path) as img:
            if img.format != 'PPM' or img.mode != 'L':
                raise MalformedImage(f"{path}: expected 8-bit grayscale PGM, got {img.format}/{img.mode}")
            img.load()
            data = np.array(img, dtype=np.uint8)
    except MalformedImage:
        raise
    except (UnidentifiedImageError, SyntaxError, ValueError) as exc:
        raise MalformedImage(f"{path}: {exc}") from exc
    except OSError as exc:
        # PIL reports truncated pixel data as OSError
        raise MalformedImage(f"{path}: {exc}") from exc
    return WordImage(data.astype(np.float32) / 255.0)


def write_image(image: WordImage, path: PathLike) -> Path:
    """Write a WordImage as binary PGM (P5, maxval 255)"""
    path = Path(path)
    data = np.rint(image.pixels * 255.0).astype(np.uint8)
    try:
        Image.fromarray(data).save(path, format='PPM')
    except OSError as exc:
        raise IoError(f"cannot write image {path}: {exc}") from exc
    return path


def fit_dimensions(height: int, width: int, target_h: int, target_w: int):
    """Largest aspect-preserving size that fits the target box (integer arithmetic)"""
    if target_h * width <= target_w * height:
        new_h = target_h
        new_w = max(1, min(target_w, (target_h * width) // height))
    else:
        new_w = target_w
        new_h = max(1, min(target_h, (target_w * height) // width))
    return new_h, new_w


def normalize(image: WordImage, target_h: int, target_w: int, invert: bool = False) -> WordImage:
    """Optional inversion, aspect-preserving bilinear rescale and centered zero padding"""
    if target_h < 1 or target_w < 1:
        raise ValueError(f"target dimensions must be positive, got {target_h}x{target_w}")

    pixels = 1.0 - image.pixels if invert else image.pixels
    new_h, new_w = fit_dimensions(image.height, image.width, target_h, target_w)

    if (new_h, new_w) == (image.height, image.width):
        content = pixels.astype(np.float32, copy=True)
    else:
        content = cv2.resize(
            pixels.astype(np.float32), (new_w, new_h), interpolation=cv2.INTER_LINEAR
        )

    canvas = np.zeros((target_h, target_w), dtype=np.float32)
    top = (target_h - new_h) // 2
    left = (target_w - new_w) // 2
    canvas[top:top + new_h, left:left + new_w] = content
    return WordImage(np.clip(canvas, 0.0, 1.0))
