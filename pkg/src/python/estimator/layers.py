"""
Batched layer primitives (forward and backward) on NCHW / NF arrays
"""

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


# --- convolution ------------------------------------------------------------

def conv_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Same-padded stride-1 convolution; returns (output, windows) with windows kept for backward"""
    k = weight.shape[2]
    pad = k // 2
    padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    # (N, C, H, W, k, k)
    windows = sliding_window_view(padded, (k, k), axis=(2, 3))
    out = np.tensordot(windows, weight, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias[None, :, None, None]
    return np.ascontiguousarray(out), windows


def conv_backward(
    grad_out: np.ndarray,
    windows: np.ndarray,
    weight: np.ndarray,
    need_input_grad: bool = True
) -> Tuple[Optional[np.ndarray], np.ndarray, np.ndarray]:
    """Gradients (input, weight, bias) of conv_forward"""
    grad_w = np.tensordot(grad_out, windows, axes=([0, 2, 3], [0, 2, 3]))
    grad_b = grad_out.sum(axis=(0, 2, 3))
    if not need_input_grad:
        return None, grad_w, grad_b

    n, _, h, w = grad_out.shape
    channels, k = weight.shape[1], weight.shape[2]
    pad = k // 2
    grad_padded = np.zeros((n, channels, h + 2 * pad, w + 2 * pad), dtype=grad_out.dtype)
    for i in range(k):
        for j in range(k):
            contribution = np.tensordot(grad_out, weight[:, :, i, j], axes=([1], [0]))
            grad_padded[:, :, i:i + h, j:j + w] += contribution.transpose(0, 3, 1, 2)
    return grad_padded[:, :, pad:pad + h, pad:pad + w], grad_w, grad_b


# --- pooling ----------------------------------------------------------------

def maxpool_forward(x: np.ndarray, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Non-overlapping max pooling; trailing rows/columns that do not fill a window are dropped"""
    n, c, h, w = x.shape
    ho, wo = h // size, w // size
    blocks = x[:, :, :ho * size, :wo * size].reshape(n, c, ho, size, wo, size)
    blocks = blocks.transpose(0, 1, 2, 4, 3, 5).reshape(n, c, ho, wo, size * size)
    argmax = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, argmax[..., None], axis=-1)[..., 0]
    return out, argmax


def maxpool_backward(grad_out: np.ndarray, argmax: np.ndarray, input_shape: Tuple[int, ...], size: int) -> np.ndarray:
    n, c, h, w = input_shape
    ho, wo = grad_out.shape[2], grad_out.shape[3]
    blocks = np.zeros((n, c, ho, wo, size * size), dtype=grad_out.dtype)
    np.put_along_axis(blocks, argmax[..., None], grad_out[..., None], axis=-1)
    blocks = blocks.reshape(n, c, ho, wo, size, size).transpose(0, 1, 2, 4, 3, 5)
    grad_in = np.zeros(input_shape, dtype=grad_out.dtype)
    grad_in[:, :, :ho * size, :wo * size] = blocks.reshape(n, c, ho * size, wo * size)
    return grad_in


# --- fully connected --------------------------------------------------------

def dense_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    return x @ weight + bias


def dense_backward(grad_out: np.ndarray, x: np.ndarray, weight: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return grad_out @ weight.T, x.T @ grad_out, grad_out.sum(axis=0)


# --- activations ------------------------------------------------------------

def relu_forward(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mask = x > 0
    return np.where(mask, x, 0).astype(x.dtype, copy=False), mask


def relu_backward(grad_out: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, grad_out, 0).astype(grad_out.dtype, copy=False)


def dropout_mask(shape: Tuple[int, ...], p: float, rng: np.random.Generator, dtype) -> Optional[np.ndarray]:
    """Inverted-dropout mask (kept units scaled by 1/(1-p)); None when p == 0"""
    if p <= 0.0:
        return None
    keep = rng.random(shape) >= p
    return (keep / (1.0 - p)).astype(dtype)


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Logistic function kept strictly inside (0, 1) for the array's dtype"""
    p = 0.5 * (1.0 + np.tanh(0.5 * z))
    dtype = p.dtype
    low = np.finfo(dtype).tiny
    high = np.nextafter(dtype.type(1), dtype.type(0))
    return np.clip(p, low, high)
