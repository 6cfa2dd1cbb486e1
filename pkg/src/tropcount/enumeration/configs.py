import fractions
import random

import msgspec

from ..tropical.curves import RationalVector

COORDINATE_DENOMINATOR = 1_000_003
DEFAULT_COORDINATE_RANGE = 10**9
SEED_STRIDE = 1_000_003


class PointConfiguration(msgspec.Struct, kw_only=True, frozen=True):
    points: tuple[RationalVector, ...]
    seed: int
    attempt: int = 0

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("configuration points are not pairwise distinct")

    @property
    def dimension(self) -> int:
        return len(self.points[0]) if self.points else 0

    def translated(self, offset: tuple) -> "PointConfiguration":
        shifted = tuple(tuple(x + fractions.Fraction(o) for x, o in zip(p, offset)) for p in self.points)
        return PointConfiguration(points=shifted, seed=self.seed, attempt=self.attempt)


def derived_seed(seed: int, attempt: int) -> int:
    """Seed of the generator behind resampling attempt `attempt`; attempt 0 of seed s uses s * 1000003."""
    return seed * SEED_STRIDE + attempt


def random_configuration(
    count: int,
    seed: int,
    attempt: int = 0,
    *,
    dimension: int = 2,
    coordinate_range: int = DEFAULT_COORDINATE_RANGE,
) -> PointConfiguration:
    """Points with coordinates n / 1000003 for n drawn uniformly from [-coordinate_range, coordinate_range]."""
    if count < 0:
        raise ValueError(f"cannot draw {count} points")
    if coordinate_range < 1:
        raise ValueError(f"coordinate range must be positive, got {coordinate_range}")
    rng = random.Random(derived_seed(seed, attempt))
    points: list[RationalVector] = []
    while len(points) < count:
        p = tuple(fractions.Fraction(rng.randint(-coordinate_range, coordinate_range), COORDINATE_DENOMINATOR) for _ in range(dimension))
        if p not in points:
            points.append(p)
    return PointConfiguration(points=tuple(points), seed=seed, attempt=attempt)
