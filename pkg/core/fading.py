"""Seeded channel draws: instantaneous link SNRs and complex gains.

Every random quantity comes from a counter-based Philox stream keyed by
(seed, stream block). Trial t lives in stream block t // STREAM_BLOCK at row
t % STREAM_BLOCK and each link owns one column. Work chunks of any size slice
the same rows, so a draw never depends on chunking or on how chunks are
spread across workers.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple, Union

import numpy as np

from core.model import Link, NetworkTopology, PowerAllocation, forward_links, mean_snr_vector

logger = logging.getLogger(__name__)

Value = Union[float, np.ndarray]

STREAM_BLOCK = 4096
_MANTISSA = 2**52


def block_stream(seed: int, block: int, *tag: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(block, *tag))
    return np.random.Generator(np.random.Philox(sequence))


def block_bounds(n_trials: int, block_size: int) -> Iterator[Tuple[int, int]]:
    """Yield (block index, rows) covering trials 0..n_trials-1."""
    n_blocks = -(-n_trials // block_size)
    for block in range(n_blocks):
        yield block, min(block_size, n_trials - block * block_size)


@dataclass(frozen=True)
class FadingRealization:
    """Instantaneous link SNRs; values are floats or equally shaped arrays of trials."""

    n_relays: int
    link_snr: Dict[Link, Value]

    def __getitem__(self, link: Link) -> Value:
        return self.link_snr[link]

    def snr(self, tx: str, rx: str) -> Value:
        return self.link_snr[Link(tx, rx)]

    @classmethod
    def from_matrix(cls, n_relays: int, matrix: np.ndarray) -> "FadingRealization":
        links = forward_links(n_relays)
        if matrix.shape[-1] != len(links):
            raise ValueError(f"expected {len(links)} link columns, got {matrix.shape[-1]}")
        return cls(n_relays, {link: matrix[..., i] for i, link in enumerate(links)})


@dataclass(frozen=True)
class ComplexGains:
    n_relays: int
    gain: Dict[Link, Value]

    def __getitem__(self, link: Link) -> Value:
        return self.gain[link]

    @classmethod
    def from_matrix(cls, n_relays: int, matrix: np.ndarray) -> "ComplexGains":
        links = forward_links(n_relays)
        return cls(n_relays, {link: matrix[..., i] for i, link in enumerate(links)})


def open_uniform(stream: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Uniforms on the 2^52 midpoint lattice, strictly inside (0, 1)."""
    return (stream.integers(0, _MANTISSA, size=shape, dtype=np.int64) + 0.5) / _MANTISSA


#########################################################################################
# Exponential SNRs by inverse CDF: gamma = -mean * ln(U), U in (0, 1).
#########################################################################################
def exponential_snrs(mean_snr: np.ndarray, stream: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    shape = mean_snr.shape if size is None else (size, mean_snr.shape[0])
    return -mean_snr * np.log(open_uniform(stream, shape))


def trial_snrs(mean_snr: np.ndarray, seed: int, start: int, stop: int) -> np.ndarray:
    """Link SNR rows for trials start..stop-1, cut from whole stream blocks."""
    if stop <= start:
        return np.empty((0, mean_snr.shape[0]))
    parts = []
    for key in range(start // STREAM_BLOCK, -(-stop // STREAM_BLOCK)):
        base = key * STREAM_BLOCK
        rows = exponential_snrs(mean_snr, block_stream(seed, key), STREAM_BLOCK)
        parts.append(rows[max(start, base) - base : min(stop, base + STREAM_BLOCK) - base])
    return np.concatenate(parts, axis=0)


def draw_realization(
    topo: NetworkTopology,
    power: PowerAllocation,
    stream: np.random.Generator,
    size: Optional[int] = None,
) -> FadingRealization:
    matrix = exponential_snrs(mean_snr_vector(topo, power), stream, size)
    if size is None:
        return FadingRealization(topo.n_relays, {link: float(v) for link, v in zip(topo.links, matrix)})
    return FadingRealization.from_matrix(topo.n_relays, matrix)


#########################################################################################
# h = (a + ib) * sigma / sqrt(2) with a, b standard normal, so E|h|^2 = sigma^2.
#########################################################################################
def draw_complex_gains(
    topo: NetworkTopology,
    stream: np.random.Generator,
    size: Optional[int] = None,
) -> ComplexGains:
    sigma = np.sqrt(topo.variance_vector())
    shape = sigma.shape if size is None else (size, sigma.shape[0])
    parts = stream.standard_normal((2, *shape))
    matrix = (parts[0] + 1j * parts[1]) * sigma / np.sqrt(2.0)
    if size is None:
        return ComplexGains(topo.n_relays, {link: complex(h) for link, h in zip(topo.links, matrix)})
    return ComplexGains.from_matrix(topo.n_relays, matrix)


def realization_from_gains(gains: ComplexGains, power: PowerAllocation) -> FadingRealization:
    link_snr: Dict[Link, Value] = {}
    for link, h in gains.gain.items():
        snr = power.power_of(link.tx) * np.abs(h) ** 2 / power.n0
        link_snr[link] = float(snr) if np.ndim(snr) == 0 else snr
    return FadingRealization(gains.n_relays, link_snr)

