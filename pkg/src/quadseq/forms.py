"""Monomial forms under the transforms: order traces, drops, and ratios.

A form is described by its monomial support.  One transform step in
direction ``w`` maps a support monomial by sending its ``w`` exponent to
``total_degree - order(form)``; the support stays the same size, so the
trace of orders along a direction word is well defined.  The headline
facts checked here: along a word that uses every direction the order of
every nonunit form drops strictly, while a word that misses some
direction leaves the corresponding variable's order pinned at 1 forever;
and for two fixed monomials the ratio of their orders along an argmin
word converges to the ratio of their frame values.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyGeneratorSet,
    NotTerminated,
    RatioUndefined,
)
from .monomials import (
    Monomial,
    MonomialIdeal,
    divides,
    monomial_value,
    rewrite_monomial,
    total_degree,
    _validate_monomial,
)
from .sequence import ParameterFrame, SequenceState
from .values import ValueVector


class MonomialForm:
    """A form identified by its monomial support (deduplicated, sorted)."""

    __slots__ = ("dim", "support")

    def __init__(self, support: Iterable[Monomial], dim: int | None = None):
        monos = sorted(set(tuple(m) for m in support))
        if not monos:
            raise EmptyGeneratorSet("a form needs a nonempty support")
        d = dim if dim is not None else len(monos[0])
        self.support = tuple(_validate_monomial(m, d) for m in monos)
        self.dim = d

    def order(self) -> int:
        return min(total_degree(m) for m in self.support)

    @property
    def is_unit(self) -> bool:
        return self.order() == 0

    def __eq__(self, other):
        return (
            isinstance(other, MonomialForm)
            and self.dim == other.dim
            and self.support == other.support
        )

    def __hash__(self):
        return hash((self.dim, self.support))

    def __repr__(self):
        return f"MonomialForm({list(self.support)})"


def transform_form(form: MonomialForm, direction: int) -> MonomialForm:
    """One step in ``direction``: rewrite the support and strip ord(form)."""
    r = form.order()
    moved = [
        tuple(
            total_degree(m) - r if i == direction else e
            for i, e in enumerate(m)
        )
        for m in form.support
    ]
    out = MonomialForm(moved, dim=form.dim)
    if len(out.support) != len(form.support):
        raise AssertionError("transform collapsed distinct support monomials")
    return out


def ord_trace(form: MonomialForm, word: Sequence[int]) -> tuple[int, ...]:
    """Orders of the form before and after each step of the word."""
    trace = [form.order()]
    for w in word:
        form = transform_form(form, w)
        trace.append(form.order())
    return tuple(trace)


def value_of_form(frame_values: Sequence[ValueVector], form: MonomialForm) -> ValueVector:
    """The smallest value attained on the support."""
    best = monomial_value(frame_values, form.support[0])
    for m in form.support[1:]:
        v = monomial_value(frame_values, m)
        if v.cmp(best) < 0:
            best = v
    return best


# -- exhaustive order-drop sweeps ---------------------------------------------


@lru_cache(maxsize=None)
def _nonunit_monomials(dim: int, max_degree: int) -> tuple[Monomial, ...]:
    return tuple(
        e
        for e in itertools.product(range(max_degree + 1), repeat=dim)
        if 1 <= sum(e) <= max_degree
    )


@lru_cache(maxsize=None)
def enumerate_antichains(dim: int, max_degree: int) -> tuple[tuple[Monomial, ...], ...]:
    """Every nonempty set of pairwise divisibility-incomparable monomials.

    Any form's order trace equals the trace of the antichain of its
    divisibility-minimal support monomials, so sweeping antichains covers
    all forms of bounded support degree.
    """
    monos = _nonunit_monomials(dim, max_degree)
    n = len(monos)
    comparable = [
        [
            i != j and (divides(monos[i], monos[j]) or divides(monos[j], monos[i]))
            for j in range(n)
        ]
        for i in range(n)
    ]
    out: list[tuple[Monomial, ...]] = []

    def rec(start: int, chosen: list[int]):
        if chosen:
            out.append(tuple(monos[i] for i in chosen))
        for i in range(start, n):
            if not any(comparable[i][j] for j in chosen):
                chosen.append(i)
                rec(i + 1, chosen)
                chosen.pop()

    rec(0, [])
    return tuple(out)


@lru_cache(maxsize=None)
def _antichain_arrays(dim: int, max_degree: int):
    chains = enumerate_antichains(dim, max_degree)
    width = max(len(c) for c in chains)
    gens = np.zeros((len(chains), width, dim), dtype=np.int64)
    mask = np.zeros((len(chains), width), dtype=bool)
    for i, chain in enumerate(chains):
        for j, m in enumerate(chain):
            gens[i, j] = m
            mask[i, j] = True
    return gens, mask


_BIG = np.int64(1) << 40


def order_drop_report(dim: int, word: Sequence[int], max_degree: int = 3) -> dict:
    """Check the strict order drop for every antichain form at once.

    A word touching every direction must strictly lower the order of each
    nonunit form (the report carries the worst final order and verifies
    that per-step orders never increase).  A word missing some direction
    admits a witness whose order never moves: that variable itself.
    """
    word = [int(w) for w in word]
    for w in word:
        if not 0 <= w < dim:
            raise ValueError(f"direction {w} outside 0..{dim - 1}")
    missing = sorted(set(range(dim)) - set(word))
    if missing:
        witness = MonomialForm(
            [tuple(1 if i == missing[0] else 0 for i in range(dim))]
        )
        trace = ord_trace(witness, word)
        return {
            "full_coverage": False,
            "missing": tuple(missing),
            "witness": witness,
            "witness_trace": trace,
            "witness_constant": len(set(trace)) == 1,
        }
    gens, mask = _antichain_arrays(dim, max_degree)
    cur = gens.copy()
    deg = cur.sum(axis=2)
    initial = np.where(mask, deg, _BIG).min(axis=1)
    prev = initial
    monotone = True
    for w in word:
        deg = cur.sum(axis=2)
        order = np.where(mask, deg, _BIG).min(axis=1)
        cur[:, :, w] = np.where(mask, deg - order[:, None], 0)
        deg = cur.sum(axis=2)
        order = np.where(mask, deg, _BIG).min(axis=1)
        if not (order <= prev).all():
            monotone = False
        prev = order
    final = prev
    return {
        "full_coverage": True,
        "forms_checked": int(gens.shape[0]),
        "all_drop": bool((final < initial).all()),
        "orders_monotone": monotone,
        "max_final_order": int(final.max()),
    }


# -- order ratios along an argmin word ----------------------------------------


def _rational_ratio(f_val: ValueVector, g_val: ValueVector) -> Fraction | None:
    """q with f == q * g if such a rational exists, else None."""
    fc, gc = f_val.coeffs, g_val.coeffs
    q = None
    for a, b in zip(fc, gc):
        if b == 0:
            if a != 0:
                return None
            continue
        r = a / b
        if q is None:
            q = r
        elif q != r:
            return None
    return q


def _format(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def ratio_limit_report(
    frame: ParameterFrame,
    f: MonomialForm,
    g: MonomialForm,
    steps: int,
) -> dict:
    """Orders of f and g along the argmin word, with the exact limit.

    After n steps the order of a form is the least total degree of its
    rewritten support.  The ratio ordF/ordG converges to
    value(f)/value(g); the limit field is exact when that ratio is
    rational and an enclosing interval (plus both exact values) otherwise.
    """
    if f.dim != frame.dim or g.dim != frame.dim:
        raise ValueError("form dimension does not match the frame")
    if g.is_unit:
        raise RatioUndefined("denominator form is a unit: its order is 0")
    state = SequenceState.from_frame(frame)
    f_sup = [list(m) for m in f.support]
    g_sup = [list(m) for m in g.support]
    trace = []
    for n in range(1, steps + 1):
        state, w = state.step_argmin()
        for sup in (f_sup, g_sup):
            for m in sup:
                m[w] = sum(m)
        ord_f = min(sum(m) for m in f_sup)
        ord_g = min(sum(m) for m in g_sup)
        if ord_g == 0:
            raise RatioUndefined(f"order of denominator form hit 0 at step {n}")
        trace.append({"n": n, "ordF": ord_f, "ordG": ord_g})
    f_val = value_of_form(frame.values, f)
    g_val = value_of_form(frame.values, g)
    q = _rational_ratio(f_val, g_val)
    if q is not None:
        limit = {"kind": "rational", "num": q.numerator, "den": q.denominator}
    else:
        width = Fraction(1, 10**12)
        while True:
            flo, fhi = f_val.evaluate_interval(width)
            glo, ghi = g_val.evaluate_interval(width)
            if flo > 0 and glo > 0:
                break
            width /= 2**10
        limit = {
            "kind": "irrational",
            "value_f": f_val.serialize(),
            "value_g": g_val.serialize(),
            "interval": {"lo": _format(flo / ghi), "hi": _format(fhi / glo)},
        }
    return {"trace": trace, "limit": limit}


def power_bracketing_report(
    frame: ParameterFrame,
    f: MonomialForm,
    g: MonomialForm,
    p: int,
    q: int,
    steps: int,
) -> list[dict]:
    """Monomial membership tests for f^q / g^p along the argmin word.

    Works for singleton supports: after n steps, f^q sits in g^p times the
    ring iff q * rewritten(f) >= p * rewritten(g) componentwise.  Each
    entry also reports the same test against g^(p+1).
    """
    if len(f.support) != 1 or len(g.support) != 1:
        raise ValueError("power bracketing needs singleton supports")
    state = SequenceState.from_frame(frame)
    mf = list(f.support[0])
    mg = list(g.support[0])
    out = []
    for n in range(1, steps + 1):
        state, w = state.step_argmin()
        mf[w] = sum(mf)
        mg[w] = sum(mg)
        lower = all(q * a >= p * b for a, b in zip(mf, mg))
        upper = all(q * a >= (p + 1) * b for a, b in zip(mf, mg))
        out.append(
            {
                "n": n,
                "ordF": sum(mf),
                "ordG": sum(mg),
                "lower_divides": lower,
                "upper_divides": upper,
            }
        )
    return out


def comparability_index(
    frame: ParameterFrame,
    p_mono: Monomial,
    q_mono: Monomial,
    max_steps: int = 10_000,
) -> tuple[int, str]:
    """First argmin step making the pair ideal (p, q) principal, and the side.

    Returns ``(t, "q/p")`` when the image of p divides the image of q at
    step t (so q/p lies in the transformed ring), ``(t, "p/q")`` for the
    other side.  Raises NotTerminated past ``max_steps``.
    """
    p_img = _validate_monomial(p_mono, frame.dim)
    q_img = _validate_monomial(q_mono, frame.dim)
    if p_img == q_img:
        raise ValueError("the two monomials must differ")
    state = SequenceState.from_frame(frame)
    t = 0
    while t <= max_steps:
        if divides(p_img, q_img):
            return t, "q/p"
        if divides(q_img, p_img):
            return t, "p/q"
        ideal = MonomialIdeal([p_img, q_img], dim=frame.dim)
        r = ideal.order()
        state, w = state.step_argmin()
        p_img = tuple(
            total_degree(p_img) - r if i == w else e for i, e in enumerate(p_img)
        )
        q_img = tuple(
            total_degree(q_img) - r if i == w else e for i, e in enumerate(q_img)
        )
        t += 1
    raise NotTerminated(
        f"pair ideal still not principal after {max_steps} steps", steps=max_steps
    )
