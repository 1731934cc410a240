import math

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """
    Deterministic 64-bit generator shared by every seeded operation.

    One object belongs to one caller at a time; draws advance its state.
    """

    GOLDEN = 0x9E3779B97F4A7C15

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def weights_uniform(self) -> float:
        """Uniform in [0, 1) from the top 24 bits (codec weight fill)."""
        return (self.next_u64() >> 40) / float(1 << 24)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError('hi must be >= lo')
        return lo + int(self.uniform() * (hi - lo + 1))

    def gaussian(self, std: float = 1.0) -> float:
        # Box-Muller, cosine branch; always consumes two uniforms
        u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(1.0 - u1))
        return std * radius * math.cos(2.0 * math.pi * u2)
