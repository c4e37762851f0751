"""
Built-in vector glyph sets
Each symbol is a list of polylines in a unit box (x to the right, y downwards).
Vertical layout: ascender 0.05, x-height 0.35, baseline 0.80, descender 0.98.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.python.phoc.phoc_builder import Alphabet
from src.python.utils.errors import MissingGlyph

Point = Tuple[float, float]
Polyline = List[Point]

ASC, XH, BASE, DESC = 0.05, 0.35, 0.80, 0.98
MID = (XH + BASE) / 2.0
BOWL_RY = (BASE - XH) / 2.0
CAP = 0.15


def _arc(cx: float, cy: float, rx: float, ry: float, start: float, end: float, steps: int = 14) -> Polyline:
    """Elliptic arc; angles in degrees, counter-clockwise on screen"""
    angles = np.radians(np.linspace(start, end, steps))
    return [(cx + rx * math.cos(a), cy - ry * math.sin(a)) for a in angles]


def _bowl(cx: float = 0.25, rx: float = 0.2) -> Polyline:
    return _arc(cx, MID, rx, BOWL_RY, 0, 360, 20)


def _print_strokes() -> Dict[str, Tuple[float, List[Polyline]]]:
    """(advance, strokes) for the rounded 'print' hand"""
    return {
        'a': (0.50, [_bowl(), [(0.45, XH), (0.45, BASE)]]),
        'b': (0.50, [[(0.05, ASC), (0.05, BASE)], _bowl()]),
        'c': (0.45, [_arc(0.25, MID, 0.2, BOWL_RY, 45, 315)]),
        'd': (0.50, [[(0.45, ASC), (0.45, BASE)], _bowl()]),
        'e': (0.50, [[(0.05, MID), (0.45, MID)] + _arc(0.25, MID, 0.2, BOWL_RY, 0, 315)]),
        'f': (0.38, [[(0.35, 0.10), (0.25, ASC), (0.15, 0.15), (0.15, BASE)], [(0.03, XH), (0.33, XH)]]),
        'g': (0.50, [_bowl(), [(0.45, XH), (0.45, 0.90)] + _arc(0.25, 0.90, 0.2, 0.08, 0, -180)]),
        'h': (0.50, [[(0.05, ASC), (0.05, BASE)], [(0.05, 0.50), (0.20, XH), (0.40, 0.38), (0.45, 0.50), (0.45, BASE)]]),
        'i': (0.20, [[(0.10, XH), (0.10, BASE)], [(0.10, 0.18), (0.10, 0.22)]]),
        'j': (0.28, [[(0.20, XH), (0.20, 0.92), (0.10, DESC), (0.02, 0.93)], [(0.20, 0.18), (0.20, 0.22)]]),
        'k': (0.45, [[(0.05, ASC), (0.05, BASE)], [(0.40, XH), (0.05, 0.62), (0.42, BASE)]]),
        'l': (0.20, [[(0.10, ASC), (0.10, BASE)]]),
        'm': (0.68, [[(0.05, XH), (0.05, BASE)],
                     [(0.05, 0.45), (0.18, XH), (0.33, 0.45), (0.33, BASE)],
                     [(0.33, 0.45), (0.48, XH), (0.62, 0.45), (0.62, BASE)]]),
        'n': (0.48, [[(0.05, XH), (0.05, BASE)], [(0.05, 0.45), (0.22, XH), (0.42, 0.45), (0.42, BASE)]]),
        'o': (0.50, [_bowl()]),
        'p': (0.50, [[(0.05, XH), (0.05, DESC)], _bowl()]),
        'q': (0.50, [[(0.45, XH), (0.45, DESC)], _bowl()]),
        'r': (0.38, [[(0.05, XH), (0.05, BASE)], [(0.05, 0.50), (0.18, XH), (0.35, XH)]]),
        's': (0.46, [[(0.40, 0.40), (0.25, XH), (0.08, 0.42), (0.10, 0.55), (0.38, 0.62),
                      (0.42, 0.74), (0.25, BASE), (0.05, 0.75)]]),
        't': (0.36, [[(0.15, 0.15), (0.15, 0.75), (0.25, BASE), (0.33, 0.77)], [(0.03, XH), (0.33, XH)]]),
        'u': (0.48, [[(0.05, XH), (0.05, 0.70), (0.20, BASE), (0.42, 0.70)], [(0.42, XH), (0.42, BASE)]]),
        'v': (0.46, [[(0.03, XH), (0.23, BASE), (0.43, XH)]]),
        'w': (0.64, [[(0.03, XH), (0.17, BASE), (0.32, 0.50), (0.47, BASE), (0.61, XH)]]),
        'x': (0.47, [[(0.05, XH), (0.42, BASE)], [(0.42, XH), (0.05, BASE)]]),
        'y': (0.46, [[(0.03, XH), (0.23, BASE)], [(0.43, XH), (0.13, DESC)]]),
        'z': (0.47, [[(0.05, XH), (0.42, XH), (0.05, BASE), (0.42, BASE)]]),
        '0': (0.50, [_arc(0.25, 0.475, 0.2, 0.325, 0, 360, 24)]),
        '1': (0.45, [[(0.10, 0.28), (0.25, CAP), (0.25, BASE)], [(0.10, BASE), (0.40, BASE)]]),
        '2': (0.50, [_arc(0.25, 0.33, 0.18, 0.17, 160, -10) + [(0.05, BASE), (0.45, BASE)]]),
        '3': (0.50, [_arc(0.25, 0.32, 0.17, 0.16, 150, -90), _arc(0.25, 0.64, 0.19, 0.16, 90, -150)]),
        '4': (0.50, [[(0.35, BASE), (0.35, CAP), (0.05, 0.60), (0.47, 0.60)]]),
        '5': (0.50, [[(0.42, CAP), (0.10, CAP), (0.08, 0.45)] + _arc(0.25, 0.60, 0.19, 0.18, 130, -150)]),
        '6': (0.50, [[(0.40, 0.18), (0.20, 0.30), (0.07, 0.60)], _arc(0.25, 0.62, 0.19, 0.18, 0, 360)]),
        '7': (0.50, [[(0.05, CAP), (0.45, CAP), (0.18, BASE)]]),
        '8': (0.50, [_arc(0.25, 0.31, 0.16, 0.16, 0, 360), _arc(0.25, 0.635, 0.2, 0.165, 0, 360)]),
        '9': (0.50, [_arc(0.25, 0.33, 0.19, 0.18, 0, 360), [(0.44, 0.33), (0.30, 0.65), (0.15, BASE)]]),
    }


def _blockify(strokes: List[Polyline], grid: float = 0.1, widen: float = 1.2) -> List[Polyline]:
    """Snap points to a coarse grid and widen horizontally: angular, boxy letter forms"""
    blocky = []
    for polyline in strokes:
        snapped: Polyline = []
        for x, y in polyline:
            point = (
                min(1.0, round(min(1.0, x * widen) / grid) * grid),
                min(1.0, max(0.0, round(y / grid) * grid)),
            )
            if not snapped or snapped[-1] != point:
                snapped.append(point)
        blocky.append(snapped)
    return blocky


@dataclass(frozen=True)
class Glyph:
    advance: float
    strokes: Tuple[Tuple[Point, ...], ...]


@dataclass(frozen=True)
class GlyphSet:
    """Per-symbol stroke descriptions of one hand"""

    name: str
    glyphs: Dict[str, Glyph]

    def validate(self, alphabet: Alphabet) -> None:
        for symbol in alphabet.symbols:
            glyph = self.glyphs.get(symbol)
            if glyph is None or not glyph.strokes:
                raise MissingGlyph(f"glyph set '{self.name}' has no strokes for {symbol!r}")
            for polyline in glyph.strokes:
                for x, y in polyline:
                    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                        raise ValueError(f"glyph {symbol!r} of '{self.name}' leaves the unit box")

    def __getitem__(self, symbol: str) -> Glyph:
        glyph = self.glyphs.get(symbol)
        if glyph is None:
            raise MissingGlyph(f"glyph set '{self.name}' has no strokes for {symbol!r}")
        return glyph


def _freeze(name: str, table: Dict[str, Tuple[float, Sequence[Polyline]]]) -> GlyphSet:
    glyphs = {}
    for symbol, (advance, strokes) in table.items():
        frozen = tuple(
            tuple((float(np.clip(x, 0.0, 1.0)), float(np.clip(y, 0.0, 1.0))) for x, y in polyline)
            for polyline in strokes
        )
        glyphs[symbol] = Glyph(advance=float(advance), strokes=frozen)
    return GlyphSet(name=name, glyphs=glyphs)


def _build_glyph_sets() -> Dict[str, GlyphSet]:
    printed = _print_strokes()
    block = {
        symbol: (min(1.0, advance * 1.2), _blockify(strokes))
        for symbol, (advance, strokes) in printed.items()
    }
    return {'print': _freeze('print', printed), 'block': _freeze('block', block)}


GLYPH_SETS: Dict[str, GlyphSet] = _build_glyph_sets()


def get_glyph_set(name: str) -> GlyphSet:
    try:
        return GLYPH_SETS[name]
    except KeyError:
        raise ValueError(f"unknown glyph variant '{name}', expected one of {sorted(GLYPH_SETS)}")
