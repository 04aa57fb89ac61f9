"""SplitMix64 pseudo-random generator.

Bit-exact and platform independent so seeded graph completion and synthetic
graphs can be pinned in tests.
"""

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def below(self, k: int) -> int:
        return self.next() % k

    def other_than(self, self_index: int, n: int) -> int:
        """Uniform node in [0, n) excluding ``self_index`` (n >= 2)."""
        r = self.next() % (n - 1)
        return r if r < self_index else r + 1
