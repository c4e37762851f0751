"""
Adapt Package
Auto-treinamento com pseudo-rótulos do léxico, guiado por medidas de confiança
"""

from .self_training import (
    AdaptSchedule, CycleReport, DiagnosticSet, PseudoLabeledSet, adapt, run_cycle,
    selection_accuracy,
)

__all__ = [
    'AdaptSchedule',
    'CycleReport',
    'DiagnosticSet',
    'PseudoLabeledSet',
    'adapt',
    'run_cycle',
    'selection_accuracy',
]
