"""
Seed streams
Expands one 64-bit run seed into named, independent numpy random streams
"""

import zlib
from typing import Tuple

import numpy as np

STREAM_NAMES = ('synth', 'init', 'train', 'adapt', 'dropout', 'confidence')

MAX_SEED = 2 ** 64


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode('utf-8'))


def seed_sequence(seed: int, name: str, *keys: int) -> np.random.SeedSequence:
    """SeedSequence for substream `name`, optionally indexed by `keys` (cycle, image, ...)"""
    if not 0 <= int(seed) < MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    spawn_key: Tuple[int, ...] = (_name_key(name),) + tuple(int(k) for k in keys)
    return np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)


def derive_rng(seed: int, name: str, *keys: int) -> np.random.Generator:
    """Generator for a named substream"""
    return np.random.default_rng(seed_sequence(seed, name, *keys))


def derive_seed(seed: int, name: str, *keys: int) -> int:
    """Integer seed (63 bits) for APIs that take plain integer seeds"""
    state = seed_sequence(seed, name, *keys).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


class SeedStreams:
    """Named substreams of a single run seed (see STREAM_NAMES)

    'train' shuffles batches, 'dropout' draws the training dropout masks.
    """

    def __init__(self, seed: int):
        if not 0 <= int(seed) < MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)

    def generator(self, name: str, *keys: int) -> np.random.Generator:
        return derive_rng(self.seed, name, *keys)

    def integer(self, name: str, *keys: int) -> int:
        return derive_seed(self.seed, name, *keys)
