"""Counter-based random streams.

Variate ``j`` of the stream keyed by ``seed`` is the splitmix64 finalizer
applied to ``seed + (j + 1) * GOLDEN`` (mod 2**64). No generator state is
carried between draws, so any draw of any trial can be computed
independently of scheduling.
"""
from . import kernels

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
# draw indices stay below this; auxiliary per-trial variates live above it
AUX_BASE = 1 << 62


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def variate(seed: int, index: int) -> int:
    return mix64(seed + GOLDEN * (index + 1))


def derive_seed(master: int, index: int) -> int:
    """Seed of trial ``index`` under ``master``."""
    return variate(master, index)


def aux_variate(seed: int, tag: int) -> int:
    return variate(seed, AUX_BASE + tag)


def aux_below(seed: int, tag: int, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` from one auxiliary variate (bound <= 2**64)."""
    return (aux_variate(seed, tag) * bound) >> 64


def stream(seed: int, count: int, start: int = 0):
    return kernels.stream(seed & MASK, start, count)
