"""
ADAM optimizer with decoupled weight decay
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from src.python.utils.errors import ShapeMismatch

Params = Dict[str, np.ndarray]


@dataclass
class AdamState:
    """Step count, moment accumulators and hyperparameters"""

    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 5e-5
    t: int = 0
    m: Params = field(default_factory=OrderedDict)
    v: Params = field(default_factory=OrderedDict)

    @classmethod
    def for_params(cls, params: Params, **hyperparameters) -> 'AdamState':
        state = cls(**hyperparameters)
        state.m = OrderedDict((k, np.zeros_like(p)) for k, p in params.items())
        state.v = OrderedDict((k, np.zeros_like(p)) for k, p in params.items())
        return state


def _check_shapes(state: AdamState, params: Params, grads: Params) -> None:
    if list(params) != list(grads):
        raise ShapeMismatch("gradient names do not match parameter names")
    for name, p in params.items():
        if grads[name].shape != p.shape:
            raise ShapeMismatch(f"gradient {name} has shape {grads[name].shape}, parameter has {p.shape}")
        if name in state.m and state.m[name].shape != p.shape:
            raise ShapeMismatch(f"moment {name} has shape {state.m[name].shape}, parameter has {p.shape}")


def adam_step(state: AdamState, params: Params, grads: Params) -> Tuple[AdamState, Params]:
    """One bias-corrected ADAM update; W <- W - lr*wd*W is applied first. Arrays are updated in place."""
    _check_shapes(state, params, grads)
    state.t += 1
    correction1 = 1.0 - state.beta1 ** state.t
    correction2 = 1.0 - state.beta2 ** state.t

    for name, p in params.items():
        g = grads[name].astype(p.dtype, copy=False)
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m, v = state.m[name], state.v[name]

        if state.weight_decay:
            p -= state.lr * state.weight_decay * p
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)

        m_hat = m / correction1
        v_hat = v / correction2
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)

    return state, params
