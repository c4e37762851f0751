"""
Architecture descriptors for the attribute estimator
A descriptor is a JSON-friendly list of layer dicts, e.g. {'type': 'conv', 'filters': 8, 'kernel': 3}
"""

from typing import Any, Dict, List, Sequence, Tuple

from src.python.utils.errors import BadArchitecture

LayerSpec = Dict[str, Any]
Shape = Tuple[int, ...]

LAYER_TYPES = ('conv', 'relu', 'maxpool', 'flatten', 'dense', 'dropout', 'sigmoid')
PARAMETRIC = ('conv', 'dense')


def reference_architecture(output_dim: int, hidden_units: int = 256) -> List[LayerSpec]:
    """Two conv blocks, one hidden fully connected layer with dropout, sigmoid attribute head"""
    return [
        {'type': 'conv', 'filters': 8, 'kernel': 3},
        {'type': 'relu'},
        {'type': 'maxpool', 'size': 2},
        {'type': 'conv', 'filters': 16, 'kernel': 3},
        {'type': 'relu'},
        {'type': 'maxpool', 'size': 2},
        {'type': 'flatten'},
        {'type': 'dense', 'units': hidden_units},
        {'type': 'relu'},
        {'type': 'dropout'},
        {'type': 'dense', 'units': output_dim},
        {'type': 'sigmoid'},
    ]


def _positive(layer: LayerSpec, key: str, index: int) -> int:
    value = layer.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise BadArchitecture(f"layer {index} ({layer.get('type')}): '{key}' must be a positive integer")
    return value


def layer_shapes(architecture: Sequence[LayerSpec], input_shape: Tuple[int, int]) -> List[Shape]:
    """Per-sample output shape of every layer (channels first); validates the descriptor"""
    if not architecture:
        raise BadArchitecture("architecture is empty")

    shape: Shape = (1, int(input_shape[0]), int(input_shape[1]))
    shapes: List[Shape] = []
    for index, layer in enumerate(architecture):
        kind = layer.get('type')
        if kind not in LAYER_TYPES:
            raise BadArchitecture(f"layer {index}: unknown type {kind!r}")

        if kind == 'conv':
            if len(shape) != 3:
                raise BadArchitecture(f"layer {index}: conv needs a spatial input")
            kernel = _positive(layer, 'kernel', index)
            if kernel % 2 == 0:
                raise BadArchitecture(f"layer {index}: conv kernel must be odd for same padding")
            shape = (_positive(layer, 'filters', index), shape[1], shape[2])
        elif kind == 'maxpool':
            if len(shape) != 3:
                raise BadArchitecture(f"layer {index}: maxpool needs a spatial input")
            size = _positive(layer, 'size', index)
            if shape[1] < size or shape[2] < size:
                raise BadArchitecture(f"layer {index}: maxpool {size} larger than input {shape[1:]}")
            shape = (shape[0], shape[1] // size, shape[2] // size)
        elif kind == 'flatten':
            if len(shape) != 3:
                raise BadArchitecture(f"layer {index}: flatten applied twice")
            shape = (shape[0] * shape[1] * shape[2],)
        elif kind == 'dense':
            if len(shape) != 1:
                raise BadArchitecture(f"layer {index}: dense needs a flattened input")
            shape = (_positive(layer, 'units', index),)
        elif kind == 'dropout':
            if len(shape) != 1:
                raise BadArchitecture(f"layer {index}: dropout is only supported on fully connected layers")
        shapes.append(shape)

    return shapes


def validate_architecture(
    architecture: Sequence[LayerSpec],
    input_shape: Tuple[int, int],
    output_dim: int
) -> List[Shape]:
    """Check the descriptor ends in dense(output_dim) + sigmoid with no dropout on the output"""
    shapes = layer_shapes(architecture, input_shape)
    if len(architecture) < 2 or architecture[-1]['type'] != 'sigmoid' or architecture[-2]['type'] != 'dense':
        raise BadArchitecture("architecture must end with a dense layer followed by sigmoid")
    if 'sigmoid' in [layer['type'] for layer in architecture[:-1]]:
        raise BadArchitecture("sigmoid is only allowed as the output activation")
    if shapes[-1] != (output_dim,):
        raise BadArchitecture(
            f"architecture output dimension {shapes[-1][0]} does not match PHOC dimension {output_dim}"
        )
    return shapes


def param_shapes(architecture: Sequence[LayerSpec], input_shape: Tuple[int, int]) -> List[Tuple[str, Shape]]:
    """Parameter names and shapes in declaration order ('<layer>.weight', '<layer>.bias')"""
    shapes = layer_shapes(architecture, input_shape)
    previous: Shape = (1, int(input_shape[0]), int(input_shape[1]))
    result: List[Tuple[str, Shape]] = []
    for index, (layer, shape) in enumerate(zip(architecture, shapes)):
        if layer['type'] == 'conv':
            k = layer['kernel']
            result.append((f"{index}.weight", (layer['filters'], previous[0], k, k)))
            result.append((f"{index}.bias", (layer['filters'],)))
        elif layer['type'] == 'dense':
            result.append((f"{index}.weight", (previous[0], layer['units'])))
            result.append((f"{index}.bias", (layer['units'],)))
        previous = shape
    return result


def fan_in(shape: Shape) -> int:
    """Inputs feeding one unit of a weight tensor"""
    if len(shape) == 4:
        return shape[1] * shape[2] * shape[3]
    return shape[0]
