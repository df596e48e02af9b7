"""Monomials, monomial ideals, and their behaviour under the transforms.

Monomials are tuples of nonnegative integer exponents.  A step in
direction ``w`` rewrites a monomial by sending the ``w`` exponent to the
total degree (every other variable picks up a factor of ``w``); the
induced map on a monomial ideal additionally strips ``ord(I)`` powers of
``w``, which is what makes orders drop.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import EmptyGeneratorSet, IndexOutOfRange
from .values import ValueVector

Monomial = tuple[int, ...]


def total_degree(m: Monomial) -> int:
    return sum(m)


def divides(a: Monomial, b: Monomial) -> bool:
    """Componentwise a <= b."""
    return all(x <= y for x, y in zip(a, b))


def _validate_monomial(m, dim=None) -> Monomial:
    t = tuple(m)
    if dim is not None and len(t) != dim:
        raise ValueError(f"expected {dim} exponents, got {len(t)}")
    if not t:
        raise ValueError("monomials need at least one variable")
    if any(not isinstance(e, int) or e < 0 for e in t):
        raise ValueError(f"exponents must be nonnegative integers: {t}")
    return t


def minimalize(gens: Iterable[Monomial]) -> tuple[Monomial, ...]:
    """Divisibility-minimal elements, deduplicated and lex-sorted."""
    gs = sorted(set(tuple(g) for g in gens))
    if not gs:
        raise EmptyGeneratorSet("no generators given")
    keep = [
        g
        for g in gs
        if not any(h != g and divides(h, g) for h in gs)
    ]
    return tuple(keep)


class MonomialIdeal:
    """A monomial ideal, stored by its unique minimal generating set."""

    __slots__ = ("dim", "generators")

    def __init__(self, generators: Iterable[Monomial], dim: int | None = None):
        gens = [tuple(g) for g in generators]
        if not gens:
            raise EmptyGeneratorSet("a monomial ideal needs at least one generator")
        d = dim if dim is not None else len(gens[0])
        gens = [_validate_monomial(g, d) for g in gens]
        self.dim = d
        self.generators = minimalize(gens)

    @classmethod
    def _raw(cls, generators: Iterable[Monomial], dim: int) -> "MonomialIdeal":
        """Wrap a generator set already known minimal, skipping the
        quadratic divisibility scan.  Callers must guarantee minimality;
        the tuple is sorted so equality with normally-built ideals holds.
        """
        gens = tuple(sorted(tuple(g) for g in generators))
        if not gens:
            raise EmptyGeneratorSet("a monomial ideal needs at least one generator")
        ideal = cls.__new__(cls)
        ideal.dim = dim
        ideal.generators = gens
        return ideal

    def order(self) -> int:
        """Smallest total degree of an element (attained on a generator)."""
        return min(total_degree(g) for g in self.generators)

    @property
    def is_unit(self) -> bool:
        return self.generators == ((0,) * self.dim,)

    @property
    def is_principal(self) -> bool:
        return len(self.generators) == 1

    def contains(self, m: Monomial) -> bool:
        m = _validate_monomial(m, self.dim)
        return any(divides(g, m) for g in self.generators)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialIdeal)
            and self.dim == other.dim
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.dim, self.generators))

    def __repr__(self):
        return f"MonomialIdeal({list(self.generators)})"

    @classmethod
    def maximal(cls, dim: int) -> "MonomialIdeal":
        """The ideal generated by all the variables."""
        return cls([tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)])


def _check_direction(direction: int, dim: int) -> int:
    if not 0 <= direction < dim:
        raise IndexOutOfRange(f"direction {direction} outside 0..{dim - 1}")
    return direction


def rewrite_monomial(m: Monomial, direction: int) -> Monomial:
    """Image of a monomial under one step in ``direction`` (no order strip)."""
    m = _validate_monomial(m)
    _check_direction(direction, len(m))
    return tuple(
        total_degree(m) if i == direction else e for i, e in enumerate(m)
    )


def rewrite_word(m: Monomial, word: Sequence[int]) -> Monomial:
    for w in word:
        m = rewrite_monomial(m, w)
    return m


def transform_ideal(ideal: MonomialIdeal, direction: int) -> MonomialIdeal:
    """One transform step of the ideal: rewrite and strip ord(I) powers."""
    _check_direction(direction, ideal.dim)
    r = ideal.order()
    gens = [
        tuple(
            total_degree(g) - r if i == direction else e
            for i, e in enumerate(g)
        )
        for g in ideal.generators
    ]
    return MonomialIdeal(gens, dim=ideal.dim)


def transform_word(ideal: MonomialIdeal, word: Sequence[int]) -> MonomialIdeal:
    for w in word:
        ideal = transform_ideal(ideal, w)
    return ideal


def extend_ideal(ideal: MonomialIdeal, word: Sequence[int]) -> MonomialIdeal:
    """Extension of the ideal along a word: rewrite generators, no strip."""
    gens = [rewrite_word(g, word) for g in ideal.generators]
    return MonomialIdeal(gens, dim=ideal.dim)


def rewrite_matrix(word: Sequence[int], dim: int) -> tuple[tuple[int, ...], ...]:
    """Integer matrix M with rewrite_word(m) == M @ m; each factor has det 1."""
    rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    for w in word:
        _check_direction(w, dim)
        # left-multiply by the elementary factor whose w-th row sums everything
        rows[w] = [sum(rows[i][j] for i in range(dim)) for j in range(dim)]
    return tuple(tuple(r) for r in rows)


def apply_matrix(matrix: Sequence[Sequence[int]], m: Monomial) -> Monomial:
    return tuple(sum(row[j] * m[j] for j in range(len(m))) for row in matrix)


def monomial_value(frame_values: Sequence[ValueVector], m: Monomial) -> ValueVector:
    """Value of a monomial: the exponent-weighted sum of the frame values."""
    m = _validate_monomial(m, len(frame_values))
    total = frame_values[0].basis.zero()
    for e, v in zip(m, frame_values):
        if e:
            total = total + v.scale(e)
    return total
