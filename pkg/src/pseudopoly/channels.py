"""Memoryless channel simulation and LLR computation.

Gaussian noise is generated by inverse-CDF transform of the generator's
uniform stream (scipy.special.ndtri), so any implementation that reproduces
the same uniform stream reproduces the received vectors bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtri


@dataclass(frozen=True)
class Bsc:
    """Binary symmetric channel with crossover probability p.

    p = 1/2 is admitted for boundary testing (zero LLR); p = 0 is rejected
    because it produces infinite LLRs.
    """

    p: float

    def __post_init__(self):
        if not 0 < self.p <= 0.5:
            raise ValueError("crossover probability must be in (0, 1/2]")


@dataclass(frozen=True)
class BiAwgn:
    """Binary-input AWGN channel, mapping bit 0 -> +1 and bit 1 -> -1."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("noise standard deviation must be positive")

    @classmethod
    def from_ebn0_db(cls, ebn0_db: float, rate: float) -> "BiAwgn":
        """sigma^2 = 1 / (2 R 10^(EbN0dB/10))."""
        if not 0 < rate < 1:
            raise ValueError("rate must be in (0, 1)")
        sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))
        return cls(math.sqrt(sigma2))


ChannelModel = Union[Bsc, BiAwgn]


def transmit(codeword: Sequence[int], channel: ChannelModel, rng: np.random.Generator) -> np.ndarray:
    """Send a binary word through the channel using the supplied generator."""
    word = np.asarray(codeword)
    if word.ndim != 1:
        raise ValueError("codeword must be a vector")
    if isinstance(channel, Bsc):
        flips = rng.random(word.size) < channel.p
        return (word.astype(np.uint8) ^ flips.astype(np.uint8)).astype(np.uint8)
    if isinstance(channel, BiAwgn):
        u = np.maximum(rng.random(word.size), 1e-300)
        noise = channel.sigma * ndtri(u)
        return (1.0 - 2.0 * word.astype(np.float64)) + noise
    raise TypeError(f"unknown channel {channel!r}")


def llr(received: Sequence[float], channel: ChannelModel) -> np.ndarray:
    """Per-bit log(Pr(y|0)/Pr(y|1)); positive values favor bit 0."""
    y = np.asarray(received, dtype=np.float64)
    if isinstance(channel, Bsc):
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("BSC output must be binary")
        mag = math.log((1.0 - channel.p) / channel.p)
        return np.where(y == 0, mag, -mag)
    if isinstance(channel, BiAwgn):
        return 2.0 * y / channel.sigma**2
    raise TypeError(f"unknown channel {channel!r}")


def trial_rng(master_seed: int, point_index: int, trial_index: int, stream: int = 0) -> np.random.Generator:
    """Counter-based per-trial generator (Philox), so that serial and
    parallel schedules draw identical noise."""
    bg = np.random.Philox(
        key=np.array([master_seed & (2**64 - 1), stream], dtype=np.uint64),
        counter=np.array([0, trial_index, point_index, 0], dtype=np.uint64),
    )
    return np.random.Generator(bg)
