"""
Seeded randomness.

One master seed feeds independent numpy generators, one per purpose (and one
per agent), so adding draws for one feature never shifts the draws of another.
Streams are keyed with numpy's SeedSequence spawn keys.

Replicate seeds are derived with SplitMix64, a bijective 64-bit mixer:

    derive_seed(base, v, k) = mix(base + mix(v << 32 | k))   (mod 2**64)

For a fixed base seed this is injective over (variant, replicate) pairs with
both indices below 2**32.
"""

from enum import IntEnum

import numpy as np

MASK64 = (1 << 64) - 1


class StreamPurpose(IntEnum):
    PLACEMENT = 1
    AGENT = 2
    BROADCAST = 3


def splitmix64(value):
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed, variant, replicate):
    if not (0 <= variant < 1 << 32 and 0 <= replicate < 1 << 32):
        raise ValueError("Variant and replicate indices must fit in 32 bits.")
    code = (variant << 32) | replicate
    return splitmix64((base_seed + splitmix64(code)) & MASK64)


def stream(seed, purpose, *keys):
    sequence = np.random.SeedSequence(
        entropy=seed, spawn_key=(int(purpose), *(int(key) for key in keys))
    )
    return np.random.Generator(np.random.PCG64(sequence))


class RunStreams:
    """All generators used by one simulation run."""

    def __init__(self, seed):
        self.seed = seed
        self.placement = stream(seed, StreamPurpose.PLACEMENT)
        self.broadcast = stream(seed, StreamPurpose.BROADCAST)
        self._agents = {}

    def agent(self, agent_id):
        generator = self._agents.get(agent_id)
        if generator is None:
            generator = stream(self.seed, StreamPurpose.AGENT, agent_id)
            self._agents[agent_id] = generator
        return generator
