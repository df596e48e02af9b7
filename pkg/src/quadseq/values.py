"""Exact arithmetic over a fixed basis of real numbers.

A value is stored as a vector of rational coefficients over an ordered
basis of real generators (by default ``1, sqrt(2), sqrt(3), sqrt(5), ...``).
Addition, subtraction and scalar multiplication are exact coefficient
operations.  Signs and comparisons are decided by interval refinement:
every generator supplies integer fixed-point approximations at arbitrary
precision, and the precision doubles until the candidate sign separates
from the accumulated rounding error.  For rationally independent
generators this always terminates; for dependent ones (say a basis
containing both ``1`` and ``sqrt(4)``) a nonzero coefficient vector can
denote the real number zero, and the refinement loop raises
:class:`~quadseq.errors.IndeterminateComparison` once it exceeds its cap.

Equality of two values is equality of coefficient vectors, which is finer
than equality of the denoted reals exactly when the basis is dependent.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import BasisMismatch, IndeterminateComparison

Rational = Union[int, Fraction, str]

#: floor of the precision cap used by sign refinement (bits)
DEFAULT_MAX_BITS = 4096

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# shared fixed-point cache for square roots: radicand -> (bits, floor(sqrt(n)*2^bits))
_SQRT_CACHE: dict[int, tuple[int, int]] = {}


def _sqrt_fixpoint(n: int, bits: int) -> int:
    """floor-ish approximation f with |f - sqrt(n)*2^bits| <= 1."""
    cached = _SQRT_CACHE.get(n)
    if cached is None or cached[0] < bits:
        b = max(bits, 256, 0 if cached is None else 2 * cached[0])
        val = math.isqrt(n << (2 * b))
        _SQRT_CACHE[n] = (b, val)
        cached = (b, val)
    b, val = cached
    # shifting a floor approximation down keeps the error within one ulp
    return val >> (b - bits)


class Generator:
    """A single basis element: a positive real number with a refinement oracle."""

    key: object
    is_rational: bool

    def fixpoint(self, bits: int) -> int:
        """Integer f with |f - g*2^bits| <= 1 (exact when ``is_rational``)."""
        raise NotImplementedError

    def to_obj(self):
        raise NotImplementedError


class OneGenerator(Generator):
    """The rational unit 1."""

    key = "one"
    is_rational = True

    def fixpoint(self, bits: int) -> int:
        return 1 << bits

    def to_obj(self):
        return "one"

    def __repr__(self):
        return "1"


class SqrtGenerator(Generator):
    """sqrt(n) for a positive integer n."""

    is_rational = False

    def __init__(self, n: int):
        if not isinstance(n, int) or n <= 0:
            raise ValueError(f"sqrt radicand must be a positive integer, got {n!r}")
        self.n = n
        self.key = ("sqrt", n)

    def fixpoint(self, bits: int) -> int:
        return _sqrt_fixpoint(self.n, bits)

    def to_obj(self):
        return {"sqrt": self.n}

    def __repr__(self):
        return f"sqrt{self.n}"


def _generator_from_obj(obj) -> Generator:
    if obj == "one":
        return OneGenerator()
    if isinstance(obj, dict) and set(obj) == {"sqrt"}:
        return SqrtGenerator(int(obj["sqrt"]))
    raise ValueError(f"unknown basis generator: {obj!r}")


class RealBasis:
    """An ordered tuple of real generators over which values are expressed."""

    __slots__ = ("generators", "max_bits", "_key", "_one_index")

    def __init__(self, generators: Sequence[Generator], max_bits: int = DEFAULT_MAX_BITS):
        gens = tuple(generators)
        if not gens:
            raise ValueError("basis needs at least one generator")
        keys = [g.key for g in gens]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate basis generators")
        self.generators = gens
        self.max_bits = max_bits
        self._key = tuple(keys)
        self._one_index = next(
            (i for i, g in enumerate(gens) if isinstance(g, OneGenerator)), None
        )

    @classmethod
    def default(cls, size: int, max_bits: int = DEFAULT_MAX_BITS) -> "RealBasis":
        """1 followed by square roots of the first ``size - 1`` primes."""
        if size < 1:
            raise ValueError("basis size must be >= 1")
        if size - 1 > len(_SMALL_PRIMES):
            raise ValueError("default basis supports at most 13 generators")
        gens: list[Generator] = [OneGenerator()]
        gens += [SqrtGenerator(p) for p in _SMALL_PRIMES[: size - 1]]
        return cls(gens, max_bits=max_bits)

    @property
    def size(self) -> int:
        return len(self.generators)

    @property
    def one_index(self):
        return self._one_index

    def __eq__(self, other):
        return isinstance(other, RealBasis) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"RealBasis({', '.join(map(repr, self.generators))})"

    def to_obj(self) -> list:
        return [g.to_obj() for g in self.generators]

    @classmethod
    def from_obj(cls, obj: Iterable, max_bits: int = DEFAULT_MAX_BITS) -> "RealBasis":
        return cls([_generator_from_obj(o) for o in obj], max_bits=max_bits)

    # -- construction helpers ------------------------------------------------

    def value(self, coeffs: Sequence[Rational]) -> "ValueVector":
        return ValueVector(self, coeffs)

    def zero(self) -> "ValueVector":
        return ValueVector._raw(self, (0,) * self.size, 1)

    def rational(self, q: Rational) -> "ValueVector":
        """The rational number q, as a coefficient on the unit generator."""
        if self._one_index is None:
            raise ValueError("basis has no rational unit generator")
        q = _to_fraction(q)
        nums = [0] * self.size
        nums[self._one_index] = q.numerator
        return ValueVector._raw(self, tuple(nums), q.denominator)

    # -- sign machinery ------------------------------------------------------

    def _effective_cap(self, nums: Sequence[int]) -> int:
        """Precision sufficient to separate any *nonzero* combination.

        For integer-radicand square roots a nonzero integer combination has
        absolute value at least 1 / M^(2^k - 1) where M bounds every
        conjugate and k counts the irrational slots involved, so precision
        linear in the coefficient height (times 2^k) always suffices.  The
        returned cap only matters for dependent bases, where the true value
        can be zero and refinement must eventually give up.
        """
        height = 1
        k_irr = 0
        supported = True
        for n, g in zip(nums, self.generators):
            if n == 0:
                continue
            if not g.is_rational:
                k_irr += 1
                if not isinstance(g, SqrtGenerator):
                    supported = False
            height = max(height, abs(n).bit_length())
        if not supported or k_irr == 0:
            return self.max_bits
        formula = (1 << k_irr) * (height + 8 * k_irr + 16) + 64
        return max(self.max_bits, min(formula, 1 << 22))

    def _sign_of_combo(self, nums: Sequence[int]) -> int:
        """Sign of sum(nums[i] * generator[i]), exact."""
        nz = [(n, g) for n, g in zip(nums, self.generators) if n != 0]
        if not nz:
            return 0
        bits = 64
        cap = self._effective_cap(nums)
        while True:
            s = 0
            err = 0
            for n, g in nz:
                s += n * g.fixpoint(bits)
                if not g.is_rational:
                    err += abs(n)
            if err == 0:
                return (s > 0) - (s < 0)
            if s > err:
                return 1
            if s < -err:
                return -1
            bits <<= 1
            if bits > cap:
                raise IndeterminateComparison(
                    f"sign undecided at {cap} bits; basis generators are "
                    "likely rationally dependent",
                    bits=cap,
                )

    def _eval_fixpoint(self, nums: Sequence[int], bits: int) -> tuple[int, int]:
        """(s, err) with |s - 2^bits * sum(nums[i]*g_i)| <= err."""
        s = 0
        err = 0
        for n, g in zip(nums, self.generators):
            if n == 0:
                continue
            s += n * g.fixpoint(bits)
            if not g.is_rational:
                err += abs(n)
        return s, err


def _to_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class ValueVector:
    """An exact real number: rational coefficients over a :class:`RealBasis`.

    Internally the coefficients are integers over one positive common
    denominator; the public ``coeffs`` view reduces them.  Two values are
    equal iff their coefficient vectors are equal.  Order comparisons go
    through sign refinement and may raise IndeterminateComparison on
    dependent bases.
    """

    __slots__ = ("basis", "_nums", "_den")

    def __init__(self, basis: RealBasis, coeffs: Sequence[Rational]):
        fracs = [_to_fraction(c) for c in coeffs]
        if len(fracs) != basis.size:
            raise ValueError(
                f"expected {basis.size} coefficients, got {len(fracs)}"
            )
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        self.basis = basis
        self._nums = tuple(f.numerator * (den // f.denominator) for f in fracs)
        self._den = den

    @classmethod
    def _raw(cls, basis: RealBasis, nums: tuple[int, ...], den: int) -> "ValueVector":
        v = object.__new__(cls)
        v.basis = basis
        v._nums = nums
        v._den = den
        return v

    # -- views ---------------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self._den) for n in self._nums)

    @property
    def is_zero(self) -> bool:
        return all(n == 0 for n in self._nums)

    def serialize(self) -> list[str]:
        return [_format_fraction(c) for c in self.coeffs]

    @classmethod
    def deserialize(cls, basis: RealBasis, obj: Sequence[str]) -> "ValueVector":
        return cls(basis, [Fraction(s) for s in obj])

    def __repr__(self):
        parts = []
        for c, g in zip(self.coeffs, self.basis.generators):
            if c == 0:
                continue
            parts.append(f"{c}" if g.is_rational else f"{c}*{g!r}")
        return f"<{' + '.join(parts) or '0'}>"

    # -- arithmetic ----------------------------------------------------------

    def _check_basis(self, other: "ValueVector"):
        if self.basis != other.basis:
            raise BasisMismatch(
                f"values over different bases: {self.basis!r} vs {other.basis!r}"
            )

    def __add__(self, other: "ValueVector") -> "ValueVector":
        self._check_basis(other)
        if self._den == other._den:
            return ValueVector._raw(
                self.basis,
                tuple(a + b for a, b in zip(self._nums, other._nums)),
                self._den,
            )
        den = math.lcm(self._den, other._den)
        sa, sb = den // self._den, den // other._den
        return ValueVector._raw(
            self.basis,
            tuple(a * sa + b * sb for a, b in zip(self._nums, other._nums)),
            den,
        )

    def __sub__(self, other: "ValueVector") -> "ValueVector":
        self._check_basis(other)
        if self._den == other._den:
            return ValueVector._raw(
                self.basis,
                tuple(a - b for a, b in zip(self._nums, other._nums)),
                self._den,
            )
        den = math.lcm(self._den, other._den)
        sa, sb = den // self._den, den // other._den
        return ValueVector._raw(
            self.basis,
            tuple(a * sa - b * sb for a, b in zip(self._nums, other._nums)),
            den,
        )

    def __neg__(self) -> "ValueVector":
        return ValueVector._raw(self.basis, tuple(-n for n in self._nums), self._den)

    def scale(self, q: Rational) -> "ValueVector":
        """Multiply by an exact rational scalar."""
        q = _to_fraction(q)
        return ValueVector._raw(
            self.basis,
            tuple(n * q.numerator for n in self._nums),
            self._den * q.denominator,
        )

    __mul__ = scale
    __rmul__ = scale

    # -- comparisons ---------------------------------------------------------

    def sign(self) -> int:
        return self.basis._sign_of_combo(self._nums)

    def cmp(self, other: "ValueVector") -> int:
        """-1, 0 or +1 by the order of the denoted real numbers."""
        self._check_basis(other)
        if self._den == other._den:
            diff = tuple(a - b for a, b in zip(self._nums, other._nums))
        else:
            diff = tuple(
                a * other._den - b * self._den
                for a, b in zip(self._nums, other._nums)
            )
        return self.basis._sign_of_combo(diff)

    def __eq__(self, other):
        if not isinstance(other, ValueVector):
            return NotImplemented
        if self.basis != other.basis:
            return False
        if self._den == other._den:
            return self._nums == other._nums
        return all(
            a * other._den == b * self._den
            for a, b in zip(self._nums, other._nums)
        )

    def __hash__(self):
        g = math.gcd(self._den, *(abs(n) for n in self._nums))
        g = g or 1
        return hash((self.basis._key, tuple(n // g for n in self._nums), self._den // g))

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    # -- numeric views -------------------------------------------------------

    def evaluate_interval(self, max_width: Fraction = Fraction(1, 10**6)) -> tuple[Fraction, Fraction]:
        """Rational interval [lo, hi] containing the value, hi - lo <= max_width."""
        max_width = _to_fraction(max_width)
        if max_width <= 0:
            raise ValueError("interval width must be positive")
        bits = 64
        while True:
            s, err = self.basis._eval_fixpoint(self._nums, bits)
            scale = self._den << bits
            lo, hi = Fraction(s - err, scale), Fraction(s + err, scale)
            if hi - lo <= max_width:
                return lo, hi
            bits <<= 1

    def __float__(self):
        lo, hi = self.evaluate_interval(Fraction(1, 10**15))
        return float((lo + hi) / 2)


def _format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def value_cmp(a: ValueVector, b: ValueVector) -> int:
    """Module-level comparison helper: -1, 0 or +1."""
    return a.cmp(b)
