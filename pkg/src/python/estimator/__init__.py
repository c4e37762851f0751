"""
Estimator Package
Estimador de atributos PHOC treinado do zero (numpy): forward/backward, BCE, ADAM
"""

from .architecture import reference_architecture, validate_architecture
from .model import (
    AttributeVector, EstimatorModel, backward, bce_loss, forward, init_model,
    loss_and_gradient, predict_batch,
)
from .model_io import load_model, save_model
from .optimizer import AdamState, adam_step
from .trainer import TrainingSchedule, train

__all__ = [
    'AdamState',
    'AttributeVector',
    'EstimatorModel',
    'TrainingSchedule',
    'adam_step',
    'backward',
    'bce_loss',
    'forward',
    'init_model',
    'load_model',
    'loss_and_gradient',
    'predict_batch',
    'reference_architecture',
    'save_model',
    'train',
    'validate_architecture',
]
