"""Persistência do modelo em arquivo binário WSAF.

Layout do arquivo:
    b'WSAF'                      magic (4 bytes)
    versão                       1 byte (FORMAT_VERSION)
    tamanho do cabeçalho         uint32 little-endian
    cabeçalho                    JSON UTF-8 (chaves ordenadas): arquitetura,
                                 alfabeto, níveis, limiar, geometria, dropout,
                                 nomes e formas dos parâmetros
    parâmetros                   float32 little-endian, na ordem de declaração
    checksum                     CRC-32 (uint32 LE) de tudo após o byte de versão

Os parâmetros são gravados como float32: um modelo float32 sobrevive ao ciclo
save -> load bit a bit; um modelo float64 é convertido.
"""

import json
import struct
import zlib
from collections import OrderedDict
from pathlib import Path
from typing import Union

import numpy as np

from src.python.estimator.architecture import param_shapes
from src.python.estimator.model import EstimatorModel
from src.python.phoc.phoc_builder import PhocConfig
from src.python.utils.errors import ChecksumMismatch, IoError, ModelFormatError, VersionMismatch

MAGIC = b'WSAF'
FORMAT_VERSION = 1
MODEL_SUFFIX = '.wsaf'

PathLike = Union[str, Path]


def _header(model: EstimatorModel) -> bytes:
    header = {
        'architecture': model.architecture,
        'phoc': model.phoc_config.to_dict(),
        'phoc_config_hash': model.phoc_config_hash,
        'input_shape': list(model.input_shape),
        'dropout_p': model.dropout_p,
        'params': [[name, list(array.shape)] for name, array in model.params.items()],
    }
    return json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')


def encode_model(model: EstimatorModel) -> bytes:
    header = _header(model)
    payload = b''.join(
        np.ascontiguousarray(array, dtype='<f4').tobytes() for array in model.params.values()
    )
    body = struct.pack('<I', len(header)) + header + payload
    return MAGIC + bytes([FORMAT_VERSION]) + body + struct.pack('<I', zlib.crc32(body))


def decode_model(data: bytes) -> EstimatorModel:
    if len(data) < len(MAGIC) + 1 + 4 + 4 or data[:4] != MAGIC:
        raise ModelFormatError("not a WSAF model file")
    version = data[4]
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"model format version {version} is not supported (expected {FORMAT_VERSION})")

    body, stored = data[5:-4], struct.unpack('<I', data[-4:])[0]
    if zlib.crc32(body) != stored:
        raise ChecksumMismatch("model file checksum does not match its contents")

    header_len = struct.unpack('<I', body[:4])[0]
    if 4 + header_len > len(body):
        raise ModelFormatError("model header length exceeds file size")
    try:
        header = json.loads(body[4:4 + header_len].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unreadable model header: {exc}") from exc

    try:
        phoc_config = PhocConfig.from_dict(header['phoc'])
        stored_hash = header['phoc_config_hash']
        input_shape = tuple(header['input_shape'])
        declared = [(name, tuple(shape)) for name, shape in header['params']]
        expected = param_shapes(header['architecture'], input_shape)
        dropout_p = float(header['dropout_p'])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid model header: {exc}") from exc
    if phoc_config.config_hash != stored_hash:
        raise ModelFormatError("stored PHOC configuration does not match its hash")
    if declared != expected:
        raise ModelFormatError("parameter table does not match the architecture")

    payload = body[4 + header_len:]
    expected_bytes = 4 * sum(int(np.prod(shape)) for _, shape in declared)
    if len(payload) != expected_bytes:
        raise ModelFormatError(f"parameter payload has {len(payload)} bytes, expected {expected_bytes}")

    params = OrderedDict()
    offset = 0
    for name, shape in declared:
        count = int(np.prod(shape))
        params[name] = np.frombuffer(payload, dtype='<f4', count=count, offset=offset).astype(np.float32).reshape(shape)
        offset += 4 * count

    return EstimatorModel(
        architecture=header['architecture'],
        params=params,
        phoc_config=phoc_config,
        input_shape=input_shape,
        dropout_p=dropout_p,
    )


def save_model(model: EstimatorModel, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_model(model))
    except OSError as exc:
        raise IoError(f"cannot write model {path}: {exc}") from exc
    return path


def load_model(path: PathLike) -> EstimatorModel:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read model {path}: {exc}") from exc
    return decode_model(data)
