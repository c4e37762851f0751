"""Estimador de atributos phi(x, W): modelo, passes forward/backward e perda BCE.

O modelo mapeia uma WordImage normalizada (tinta = 1) para um AttributeVector
com valores em (0, 1), um por atributo PHOC.

Modos de execução do forward:
    - eval:       determinístico, sem dropout
    - train:      dropout invertido nas camadas ocultas totalmente conectadas
    - mc_dropout: igual ao train, usado na inferência estocástica (Monte Carlo)

O gradiente é calculado analiticamente (backpropagation) e combinado com a
sigmoide de saída: dL/dz = (p - t) / D para cada amostra.

Exemplo de uso:
    >>> model = init_model(reference_architecture(540), seed=7, phoc_config=PhocConfig())
    >>> a_hat = forward(model, image, mode='eval')
    >>> loss, grads = loss_and_gradient(model, images, targets, mode='train', rng=rng)
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.python.corpus.word_image import WordImage
from src.python.estimator import layers
from src.python.estimator.architecture import (
    LayerSpec, fan_in, param_shapes, validate_architecture,
)
from src.python.phoc.phoc_builder import PhocConfig, PhocVector
from src.python.utils.errors import BadArchitecture, GeometryMismatch, LengthMismatch

MODES = ('train', 'eval', 'mc_dropout')
DEFAULT_INPUT_SHAPE = (32, 96)
LOG_CLAMP = 1e-7

ImageLike = Union[WordImage, np.ndarray]


@dataclass(frozen=True, eq=False)
class AttributeVector:
    """Estimator output: one probability in (0, 1) per PHOC attribute"""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.ndim != 1:
            raise ValueError("attribute vector must be 1-D")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return int(self.values.shape[0])


def as_values(vector: Any) -> np.ndarray:
    """Plain array view of an AttributeVector, PhocVector or array-like"""
    if isinstance(vector, AttributeVector):
        return vector.values
    if isinstance(vector, PhocVector):
        return vector.bits
    return np.asarray(vector)


@dataclass
class EstimatorModel:
    """Architecture, parameters W and the PHOC configuration of the output head"""

    architecture: List[LayerSpec]
    params: Dict[str, np.ndarray]
    phoc_config: PhocConfig = field(default_factory=PhocConfig)
    input_shape: Tuple[int, int] = DEFAULT_INPUT_SHAPE
    dropout_p: float = 0.5

    def __post_init__(self):
        self.input_shape = (int(self.input_shape[0]), int(self.input_shape[1]))
        validate_architecture(self.architecture, self.input_shape, self.phoc_config.dim)
        if not 0.0 <= float(self.dropout_p) < 1.0:
            raise BadArchitecture(f"dropout probability must be in [0, 1), got {self.dropout_p}")
        self.dropout_p = float(self.dropout_p)

        expected = param_shapes(self.architecture, self.input_shape)
        if [name for name, _ in expected] != list(self.params):
            raise BadArchitecture("parameter names do not match the architecture")
        ordered = OrderedDict()
        for name, shape in expected:
            array = np.asarray(self.params[name])
            if array.shape != shape:
                raise BadArchitecture(f"parameter {name} has shape {array.shape}, expected {shape}")
            if not np.all(np.isfinite(array)):
                raise BadArchitecture(f"parameter {name} has non-finite values")
            ordered[name] = array
        self.params = ordered

    @property
    def output_dim(self) -> int:
        return self.phoc_config.dim

    @property
    def phoc_config_hash(self) -> str:
        return self.phoc_config.config_hash

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.params.values())).dtype

    @property
    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def copy(self) -> 'EstimatorModel':
        return EstimatorModel(
            architecture=[dict(layer) for layer in self.architecture],
            params=OrderedDict((k, v.copy()) for k, v in self.params.items()),
            phoc_config=self.phoc_config,
            input_shape=self.input_shape,
            dropout_p=self.dropout_p,
        )

    def astype(self, dtype) -> 'EstimatorModel':
        clone = self.copy()
        clone.params = OrderedDict((k, v.astype(dtype)) for k, v in clone.params.items())
        return clone


def init_model(
    architecture: Sequence[LayerSpec],
    seed: int,
    phoc_config: Optional[PhocConfig] = None,
    input_shape: Tuple[int, int] = DEFAULT_INPUT_SHAPE,
    dropout_p: float = 0.5,
    dtype=np.float32
) -> EstimatorModel:
    """Fan-in scaled uniform weights U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero biases"""
    phoc_config = phoc_config or PhocConfig()
    validate_architecture(architecture, input_shape, phoc_config.dim)
    rng = np.random.default_rng(seed)

    params = OrderedDict()
    for name, shape in param_shapes(architecture, input_shape):
        if name.endswith('.weight'):
            bound = np.sqrt(6.0 / fan_in(shape))
            params[name] = rng.uniform(-bound, bound, size=shape).astype(dtype)
        else:
            params[name] = np.zeros(shape, dtype=dtype)

    return EstimatorModel(
        architecture=[dict(layer) for layer in architecture],
        params=params,
        phoc_config=phoc_config,
        input_shape=input_shape,
        dropout_p=dropout_p,
    )


# --- forward ----------------------------------------------------------------

def _check_mode(model: EstimatorModel, mode: str, rng: Optional[np.random.Generator]) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown mode '{mode}', expected one of {MODES}")
    if mode != 'eval' and model.dropout_p > 0 and rng is None:
        raise ValueError(f"mode '{mode}' needs an rng for dropout masks")


def stack_images(model: EstimatorModel, images: Sequence[ImageLike]) -> np.ndarray:
    """(N, H, W) batch in the model dtype; raises GeometryMismatch on a wrong image size"""
    arrays = []
    for image in images:
        pixels = image.pixels if isinstance(image, WordImage) else np.asarray(image)
        if pixels.shape != model.input_shape:
            raise GeometryMismatch(
                f"image shape {pixels.shape} does not match model input {model.input_shape}"
            )
        arrays.append(pixels)
    if not arrays:
        return np.zeros((0,) + model.input_shape, dtype=model.dtype)
    return np.stack(arrays).astype(model.dtype, copy=False)


def first_dropout_index(model: EstimatorModel) -> int:
    """Index of the first dropout layer (or the layer count when there is none)"""
    for index, layer in enumerate(model.architecture):
        if layer['type'] == 'dropout':
            return index
    return len(model.architecture)


def run_layers(
    model: EstimatorModel,
    x: np.ndarray,
    start: int,
    stop: int,
    mode: str = 'eval',
    rng: Optional[np.random.Generator] = None,
    caches: Optional[list] = None
) -> np.ndarray:
    """Apply layers [start, stop) to activations `x`; appends backward caches when given a list"""
    for index in range(start, stop):
        layer = model.architecture[index]
        kind = layer['type']
        cache: Any = None
        if kind == 'conv':
            x, windows = layers.conv_forward(x, model.params[f"{index}.weight"], model.params[f"{index}.bias"])
            cache = windows
        elif kind == 'relu':
            x, cache = layers.relu_forward(x)
        elif kind == 'maxpool':
            shape = x.shape
            x, argmax = layers.maxpool_forward(x, layer['size'])
            cache = (argmax, shape)
        elif kind == 'flatten':
            cache = x.shape
            x = x.reshape(x.shape[0], -1)
        elif kind == 'dense':
            cache = x
            x = layers.dense_forward(x, model.params[f"{index}.weight"], model.params[f"{index}.bias"])
        elif kind == 'dropout':
            if mode != 'eval':
                cache = layers.dropout_mask(x.shape, model.dropout_p, rng, x.dtype)
                if cache is not None:
                    x = x * cache
        elif kind == 'sigmoid':
            x = layers.sigmoid(x)
        if caches is not None:
            caches.append(cache)
    return x


def forward_batch(
    model: EstimatorModel,
    batch: np.ndarray,
    mode: str = 'eval',
    rng: Optional[np.random.Generator] = None,
    caches: Optional[list] = None
) -> np.ndarray:
    """Forward pass of an (N, H, W) batch; returns (N, D) sigmoid outputs"""
    _check_mode(model, mode, rng)
    x = np.asarray(batch, dtype=model.dtype)[:, None, :, :]
    return run_layers(model, x, 0, len(model.architecture), mode, rng, caches)


def forward(
    model: EstimatorModel,
    image: ImageLike,
    mode: str = 'eval',
    rng: Optional[np.random.Generator] = None
) -> AttributeVector:
    """phi(x, W) for a single image"""
    batch = stack_images(model, [image])
    return AttributeVector(forward_batch(model, batch, mode, rng)[0])


def predict_batch(
    model: EstimatorModel,
    images: Sequence[ImageLike],
    chunk_size: int = 64
) -> np.ndarray:
    """Eval-mode attribute estimates for a list of images, shape (N, D)"""
    batch = stack_images(model, images)
    outputs = [
        forward_batch(model, batch[start:start + chunk_size], 'eval')
        for start in range(0, len(batch), chunk_size)
    ]
    if not outputs:
        return np.zeros((0, model.output_dim), dtype=model.dtype)
    return np.concatenate(outputs, axis=0)


# --- loss and backward ------------------------------------------------------

def _bce_terms(p: np.ndarray, t: np.ndarray) -> np.ndarray:
    p = np.clip(p.astype(np.float64), LOG_CLAMP, 1.0 - LOG_CLAMP)
    t = t.astype(np.float64)
    return -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))


def bce_loss(pred: Any, target: Any) -> float:
    """Mean binary cross-entropy over attributes (and samples for 2-D input), p clamped to [1e-7, 1-1e-7]"""
    p, t = as_values(pred), as_values(target)
    if p.shape != t.shape:
        raise LengthMismatch(f"prediction shape {p.shape} differs from target shape {t.shape}")
    return float(np.mean(_bce_terms(p, t)))


def _targets_array(model: EstimatorModel, targets: Sequence[Any], count: int) -> np.ndarray:
    if isinstance(targets, np.ndarray):
        array = targets
    else:
        array = np.stack([as_values(t) for t in targets]) if len(targets) else np.zeros((0, model.output_dim))
    array = np.asarray(array, dtype=model.dtype)
    if array.shape != (count, model.output_dim):
        raise LengthMismatch(f"targets have shape {array.shape}, expected {(count, model.output_dim)}")
    return array


def backward_batch(model: EstimatorModel, caches: list, grad_logits: np.ndarray) -> Dict[str, np.ndarray]:
    """Backpropagate dL/dz of the output pre-activation through every layer below the sigmoid"""
    grads: Dict[str, np.ndarray] = {}
    grad = grad_logits
    first_parametric = min(
        (i for i, layer in enumerate(model.architecture) if layer['type'] in ('conv', 'dense')),
        default=0,
    )
    for index in range(len(model.architecture) - 2, -1, -1):
        layer = model.architecture[index]
        kind = layer['type']
        cache = caches[index]
        if kind == 'conv':
            need_input = index > first_parametric
            grad, grads[f"{index}.weight"], grads[f"{index}.bias"] = layers.conv_backward(
                grad, cache, model.params[f"{index}.weight"], need_input_grad=need_input
            )
            if grad is None:
                break
        elif kind == 'dense':
            grad, grads[f"{index}.weight"], grads[f"{index}.bias"] = layers.dense_backward(
                grad, cache, model.params[f"{index}.weight"]
            )
        elif kind == 'relu':
            grad = layers.relu_backward(grad, cache)
        elif kind == 'maxpool':
            argmax, shape = cache
            grad = layers.maxpool_backward(grad, argmax, shape, layer['size'])
        elif kind == 'flatten':
            grad = grad.reshape(cache)
        elif kind == 'dropout':
            if cache is not None:
                grad = grad * cache
    return OrderedDict((name, grads[name]) for name in model.params)


def loss_and_gradient(
    model: EstimatorModel,
    images: Union[np.ndarray, Sequence[ImageLike]],
    targets: Union[np.ndarray, Sequence[Any]],
    mode: str = 'train',
    rng: Optional[np.random.Generator] = None
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Mean BCE over the batch and its gradient w.r.t. every parameter (same dropout masks)"""
    batch = images if isinstance(images, np.ndarray) else stack_images(model, images)
    if batch.shape[1:] != model.input_shape:
        raise GeometryMismatch(f"batch shape {batch.shape[1:]} does not match model input {model.input_shape}")
    t = _targets_array(model, targets, len(batch))

    caches: list = []
    p = forward_batch(model, batch, mode, rng, caches)
    loss = float(np.mean(_bce_terms(p, t)))
    grad_logits = (p - t) / (p.shape[0] * p.shape[1])
    return loss, backward_batch(model, caches, grad_logits.astype(model.dtype, copy=False))


def backward(
    model: EstimatorModel,
    image: ImageLike,
    target: Any,
    mode: str = 'train',
    rng: Optional[np.random.Generator] = None
) -> Dict[str, np.ndarray]:
    """Gradient of bce_loss(forward(image), target) for one sample"""
    _, grads = loss_and_gradient(model, [image], [target], mode, rng)
    return grads


# --- Monte Carlo dropout ----------------------------------------------------

def mc_dropout_samples(
    model: EstimatorModel,
    image: ImageLike,
    passes: int,
    rng: Optional[np.random.Generator]
) -> np.ndarray:
    """`passes` stochastic outputs (passes, D); the dropout-free prefix is computed once"""
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    _check_mode(model, 'mc_dropout', rng)
    batch = stack_images(model, [image])[:, None, :, :]
    split = first_dropout_index(model)
    prefix = run_layers(model, batch, 0, split, 'eval')
    repeated = np.repeat(prefix, passes, axis=0)
    return run_layers(model, repeated, split, len(model.architecture), 'mc_dropout', rng)
