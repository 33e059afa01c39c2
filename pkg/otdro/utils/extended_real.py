import dataclasses
import functools
import math


@functools.total_ordering
@dataclasses.dataclass(frozen=True)
class ExtendedReal:
    """
    A value in (-inf, +inf]. The +inf case is carried by an explicit tag so
    that optimizers and sums never depend on float infinity arithmetic.
    """

    value: float = 0.0
    infinite: bool = False

    @staticmethod
    def finite(value):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("ExtendedReal.finite requires a finite value")
        return ExtendedReal(value, False)

    @staticmethod
    def positive_infinity():
        return ExtendedReal(0.0, True)

    @staticmethod
    def of(value):
        """Wraps a float or passes an ExtendedReal through; nan is refused."""
        if isinstance(value, ExtendedReal):
            return value
        value = float(value)
        if math.isnan(value):
            raise ValueError("nan has no extended-real representation")
        if value == math.inf:
            return ExtendedReal.positive_infinity()
        if value == -math.inf:
            raise ValueError("-inf is excluded from the extended-real range")
        return ExtendedReal(value, False)

    @property
    def is_finite(self):
        return not self.infinite

    def __add__(self, other):
        other = ExtendedReal.of(other)
        if self.infinite or other.infinite:
            return ExtendedReal.positive_infinity()
        return ExtendedReal(self.value + other.value, False)

    __radd__ = __add__

    def scale(self, factor):
        """Multiplication by a non-negative factor, with 0 * inf = 0."""
        if factor < 0:
            raise ValueError("ExtendedReal can only be scaled by factors >= 0")
        if self.infinite:
            return ExtendedReal(0.0, False) if factor == 0 else self
        return ExtendedReal(self.value * factor, False)

    def __eq__(self, other):
        if not isinstance(other, (ExtendedReal, int, float)):
            return NotImplemented
        other = ExtendedReal.of(other)
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return self.value == other.value

    def __lt__(self, other):
        other = ExtendedReal.of(other)
        if self.infinite:
            return False
        if other.infinite:
            return True
        return self.value < other.value

    def __hash__(self):
        return hash((self.infinite, 0.0 if self.infinite else self.value))

    def __float__(self):
        return math.inf if self.infinite else self.value

    def __repr__(self):
        return "ExtendedReal(+inf)" if self.infinite else "ExtendedReal({})".format(
            self.value
        )
