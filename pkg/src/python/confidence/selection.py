"""
Confidence-ranked subset selection
"""

import math
from typing import Hashable, List, Sequence, Tuple

from src.python.confidence.measures import ConfidenceScore
from src.python.utils.errors import MixedMeasures


def selection_count(fraction: float, total: int) -> int:
    """ceil(fraction * total), robust to binary round-off (0.1 * 200 selects 20)"""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"selection fraction must be in (0, 1], got {fraction}")
    return min(total, math.ceil(round(fraction * total, 9)))


def rank_by_confidence(items: Sequence[Tuple[Hashable, ConfidenceScore]]) -> List[Hashable]:
    """All ids, most confident first; equal scores ordered by ascending id"""
    measures = {score.measure_id for _, score in items}
    if len(measures) > 1:
        raise MixedMeasures(f"cannot rank scores of different measures: {sorted(measures)}")
    ordered = sorted(items, key=lambda item: (-item[1].value, item[0]))
    return [item_id for item_id, _ in ordered]


def select_top_fraction(items: Sequence[Tuple[Hashable, ConfidenceScore]], fraction: float) -> List[Hashable]:
    """The ceil(fraction * |items|) most confident ids, in descending confidence"""
    count = selection_count(fraction, len(items))
    return rank_by_confidence(items)[:count]
