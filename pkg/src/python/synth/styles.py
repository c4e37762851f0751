"""
Style families for synthetic word rendering
A family is a set of sampling ranges; each rendered word draws its own values.
"""

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.python.synth.glyphs import GLYPH_SETS

Range = Tuple[float, float]

# Renderer limits per field: (min, max)
STYLE_LIMITS: Dict[str, Range] = {
    'stroke_width': (1.0, 12.0),
    'slant': (-45.0, 45.0),
    'char_spacing': (-10.0, 40.0),
    'baseline_jitter': (0.0, 12.0),
    'noise_amplitude': (0.0, 1.0),
}


class StyleFamily(BaseModel):
    """Sampling ranges of one synthetic hand (px, degrees, amplitude)"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    id: str
    stroke_width: Range = (2.0, 4.0)
    slant: Range = (-5.0, 5.0)
    char_spacing: Range = (1.0, 4.0)
    baseline_jitter: Range = (0.0, 1.5)
    noise_amplitude: Range = (0.0, 0.05)
    glyph_variant: str = 'print'
    base_height: int = 48

    @field_validator('stroke_width', 'slant', 'char_spacing', 'baseline_jitter', 'noise_amplitude')
    @classmethod
    def _check_range(cls, value: Range, info) -> Range:
        lo, hi = value
        if lo > hi:
            raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")
        limit_lo, limit_hi = STYLE_LIMITS[info.field_name]
        if lo < limit_lo or hi > limit_hi:
            raise ValueError(f"range ({lo}, {hi}) outside renderer limits [{limit_lo}, {limit_hi}]")
        return (float(lo), float(hi))

    @field_validator('glyph_variant')
    @classmethod
    def _check_variant(cls, value: str) -> str:
        if value not in GLYPH_SETS:
            raise ValueError(f"unknown glyph variant '{value}', expected one of {sorted(GLYPH_SETS)}")
        return value

    @model_validator(mode='after')
    def _check_height(self) -> 'StyleFamily':
        if not 16 <= self.base_height <= 256:
            raise ValueError(f"base_height must be in [16, 256], got {self.base_height}")
        return self


STYLE_A = StyleFamily(
    id='style_a',
    stroke_width=(2.0, 4.0),
    slant=(-5.0, 5.0),
    char_spacing=(1.0, 4.0),
    baseline_jitter=(0.0, 1.5),
    noise_amplitude=(0.0, 0.05),
    glyph_variant='print',
)

STYLE_B = StyleFamily(
    id='style_b',
    stroke_width=(3.0, 6.0),
    slant=(10.0, 25.0),
    char_spacing=(-2.0, 2.0),
    baseline_jitter=(0.0, 3.0),
    noise_amplitude=(0.05, 0.15),
    glyph_variant='block',
)

PRESET_STYLES: Dict[str, StyleFamily] = {STYLE_A.id: STYLE_A, STYLE_B.id: STYLE_B}
