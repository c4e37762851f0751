"""Renderização procedural de palavras sintéticas rotuladas.

Substitui um corpus renderizado a partir de fontes manuscritas: cada palavra é
desenhada com os traços vetoriais de um conjunto de glifos, com espessura,
inclinação, espaçamento, oscilação da linha de base e ruído amostrados da
família de estilo.

Formato gerado em disco:
    <out_dir>/images/<indice>_<palavra>.pgm   (polaridade de digitalização:
                                               tinta escura sobre fundo claro)
    <out_dir>/manifest.tsv                    (caminho<TAB>transcrição)

Exemplo de uso:
    >>> rng = np.random.default_rng(7)
    >>> image = render_word("spotting", STYLE_A, rng)
    >>> manifest = generate_corpus(words, 3, STYLE_B, (1.0, 2.0), 'outputs/synth_b', rng)
"""

import math
from pathlib import Path
from typing import Optional, Sequence, Tuple

import cv2
import numpy as np
from PIL import Image, ImageDraw

from src.python.corpus.manifest import MANIFEST_NAME, Manifest, ManifestEntry
from src.python.corpus.word_image import WordImage, write_image
from src.python.phoc.phoc_builder import Alphabet, canonicalize
from src.python.synth.glyphs import get_glyph_set
from src.python.synth.styles import StyleFamily
from src.python.utils.errors import EmptyWord, IoError


def _sample(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    lo, hi = bounds
    return lo if lo == hi else float(rng.uniform(lo, hi))


def _signed(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    """Magnitude within `bounds`, negated with probability 1/2"""
    magnitude = _sample(rng, bounds)
    return magnitude if rng.random() < 0.5 else -magnitude


def render_word(
    word: str,
    style: StyleFamily,
    rng: np.random.Generator,
    alphabet: Optional[Alphabet] = None
) -> WordImage:
    """Render one word (ink = 1) with parameters sampled from the style family"""
    alphabet = alphabet or Alphabet()
    canonical = canonicalize(word, alphabet)
    if not canonical:
        raise EmptyWord(f"word {word!r} has no renderable characters")

    glyphs = get_glyph_set(style.glyph_variant)
    height = style.base_height
    stroke = max(1, int(round(_sample(rng, style.stroke_width))))
    slant = math.tan(math.radians(_sample(rng, style.slant)))
    spacing = _sample(rng, style.char_spacing)
    noise = _sample(rng, style.noise_amplitude)
    jitter = [_signed(rng, style.baseline_jitter) if style.baseline_jitter[1] > 0 else 0.0 for _ in canonical]

    scale = height - 1
    slant_room = int(math.ceil(abs(slant) * height))
    margin = stroke + 2
    advances = [glyphs[ch].advance * scale for ch in canonical]
    body = sum(advances) + spacing * (len(canonical) - 1)
    width = int(math.ceil(max(body, 1.0))) + 2 * margin + slant_room

    canvas = Image.new('L', (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    baseline_y = 0.80 * scale
    # positive slant leans right: shift the glyph origin so the sheared word stays in frame
    origin = margin + (slant_room if slant < 0 else 0)

    cursor = float(origin)
    for ch, advance, dy in zip(canonical, advances, jitter):
        for polyline in glyphs[ch].strokes:
            points = []
            for x, y in polyline:
                py = y * scale + dy
                px = cursor + x * scale + (baseline_y - py) * slant
                points.append((px, py))
            if len(points) == 1:
                px, py = points[0]
                r = stroke / 2.0
                draw.ellipse([px - r, py - r, px + r, py + r], fill=255)
            else:
                draw.line(points, fill=255, width=stroke, joint='curve')
        cursor += advance + spacing

    pixels = np.asarray(canvas, dtype=np.float32) / 255.0
    if noise > 0:
        pixels = pixels + noise * rng.uniform(-1.0, 1.0, size=pixels.shape).astype(np.float32)
    return WordImage(np.clip(pixels, 0.0, 1.0))


def rescale(image: WordImage, factor: float) -> WordImage:
    """Bilinear resize by `factor` (both axes)"""
    if factor == 1.0:
        return image.copy()
    new_h = max(1, int(round(image.height * factor)))
    new_w = max(1, int(round(image.width * factor)))
    resized = cv2.resize(image.pixels, (new_w, new_h), interpolation=cv2.INTER_LINEAR)
    return WordImage(np.clip(resized, 0.0, 1.0))


def generate_corpus(
    wordlist: Sequence[str],
    per_word: int,
    style: StyleFamily,
    scale_jitter: Optional[Tuple[float, float]],
    out_dir: Path,
    rng: np.random.Generator,
    alphabet: Optional[Alphabet] = None,
    logger=None
) -> Manifest:
    """Render `per_word` images for each word and write PGM files plus manifest

    Each image gets its own child stream of `rng` (one per image index), and is
    upscaled by an independent factor uniform in `scale_jitter` (None disables).
    """
    if not wordlist:
        raise ValueError("generate_corpus needs a non-empty word list")
    if per_word < 1:
        raise ValueError(f"per_word must be >= 1, got {per_word}")

    alphabet = alphabet or Alphabet()
    out_dir = Path(out_dir)
    image_dir = out_dir / 'images'
    try:
        image_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {image_dir}: {exc}") from exc

    jobs = [word for word in wordlist for _ in range(per_word)]
    streams = rng.spawn(len(jobs))
    entries = []
    for index, (word, stream) in enumerate(zip(jobs, streams)):
        canonical = canonicalize(word, alphabet)
        image = render_word(canonical, style, stream, alphabet)
        if scale_jitter is not None:
            image = rescale(image, float(stream.uniform(*scale_jitter)))
        relative = f"images/{index:06d}_{canonical}.pgm"
        # corpora are stored like scans (dark ink on light paper)
        write_image(image.inverted(), out_dir / relative)
        entries.append(ManifestEntry(relative, canonical))

        if logger and (index + 1) % 500 == 0:
            logger.info(f"  rendered {index + 1}/{len(jobs)} images")

    manifest = Manifest(root=out_dir, entries=entries)
    manifest.save(out_dir / MANIFEST_NAME)
    if logger:
        logger.info(f"✓ Corpus '{style.id}': {len(entries)} images in {out_dir}")
    return manifest
