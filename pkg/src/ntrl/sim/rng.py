"""Counter-based 64-bit random stream with splittable sub-streams.

The generator is splitmix64: output i is ``mix64(seed + (i+1) * GAMMA)``
where ``mix64`` is the splitmix64 finalizer and GAMMA the golden-ratio
increment. All arithmetic is 64-bit integer, so the same (seed, counter)
pair yields the same draw on every platform. Because x -> mix64(x) is a
bijection and the counter offsets are distinct, derived per-index seeds
are pairwise distinct by construction.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

ALGORITHM = "splitmix64"


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit integers."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(base_seed: int, index: int) -> int:
    """Derive the index-th child seed of base_seed (used for batch sims)."""
    return mix64((base_seed + (index + 1) * _GAMMA) & _MASK)


def _string_key(key: str) -> int:
    # FNV-1a over utf-8 bytes: stable, dependency-free
    h = 0xCBF29CE484222325
    for b in key.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return h


class RngStream:
    """One independent draw sequence. Cheap to create; never shared between
    concurrent consumers — split instead."""

    algorithm = ALGORITHM

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK
        self.counter = counter

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * _GAMMA) & _MASK)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection-sampled (no modulo bias)."""
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % span)

    def choice(self, items):
        return items[self.randint(0, len(items) - 1)]

    def split(self, key: str | int) -> "RngStream":
        """Child stream keyed by a label; independent of this stream's counter."""
        k = _string_key(key) if isinstance(key, str) else mix64(key)
        return RngStream(mix64(self.seed ^ k))

    def state(self) -> tuple[str, int, int]:
        return (self.algorithm, self.seed, self.counter)
