"""Directed sequences of monomial local quadratic transforms.

A :class:`SequenceState` tracks the exact values of the current frame
(one positive value per direction), the running sum ``E`` of the step
values, and the full step history.  A monomial step in direction ``w``
subtracts ``v(w)`` from every other value; a rescale step keeps the
direction structure but installs externally supplied new values (the
outcome of a coordinate change is data, not something the value frame
determines).  The value of a step — the smallest frame value at that
moment — is recorded with each step.

Stepping is exact.  Internally every frame value is an integer
coefficient vector over the basis with one shared denominator, and each
state carries small fixed-point "shadow" mantissas with rigorous error
bounds; comparisons are decided by the shadows whenever the gap exceeds
the accumulated error and fall back to full sign refinement otherwise,
so a 10^4-step run costs fractions of a second without ever trusting a
float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    AmbiguousDirection,
    DirectionNotMinimal,
    IncompleteCoverage,
    IndexOutOfRange,
    KilledDirectionUsed,
    NonPositiveValue,
)
from .monomials import MonomialIdeal, extend_ideal
from .values import RealBasis, ValueVector

DEFAULT_NAMES = ("x", "y", "z", "w", "v", "u")

# shadow tuning: mantissa size after a refresh, the floor that triggers
# one, and the largest tolerated accumulated error (all in bits / ulps)
_SH_TARGET = 120
_SH_MIN = 76
_SH_ERR_MAX = 1 << 34


def default_names(dim: int) -> tuple[str, ...]:
    if dim <= len(DEFAULT_NAMES):
        return DEFAULT_NAMES[:dim]
    return DEFAULT_NAMES + tuple(f"x{i}" for i in range(len(DEFAULT_NAMES), dim))


class ParameterFrame:
    """Named directions with strictly positive exact values."""

    __slots__ = ("names", "values")

    def __init__(self, values: Sequence[ValueVector], names: Sequence[str] | None = None):
        vals = tuple(values)
        if not vals:
            raise ValueError("a frame needs at least one direction")
        basis = vals[0].basis
        for v in vals:
            v._check_basis(vals[0])
            if v.sign() <= 0:
                raise NonPositiveValue(f"frame value {v!r} is not strictly positive")
        self.names = tuple(names) if names is not None else default_names(len(vals))
        if len(self.names) != len(vals):
            raise ValueError("one name per direction required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("direction names must be distinct")
        self.values = vals

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def basis(self) -> RealBasis:
        return self.values[0].basis

    def __repr__(self):
        inner = ", ".join(f"{n}={v!r}" for n, v in zip(self.names, self.values))
        return f"ParameterFrame({inner})"


@dataclass(frozen=True)
class StepRecord:
    """One step: ``monomial`` (direction, possibly run-length compressed) or ``rescale``."""

    kind: str
    direction: Optional[int]
    m_value: ValueVector
    count: int = 1
    new_values: Optional[tuple[ValueVector, ...]] = None

    @property
    def carries_direction(self) -> bool:
        return self.direction is not None


def _common_den(vectors: Sequence[ValueVector]):
    import math

    den = 1
    for v in vectors:
        den = math.lcm(den, v._den)
    nums = tuple(
        tuple(n * (den // v._den) for n in v._nums) for v in vectors
    )
    return nums, den


class SequenceState:
    """Immutable snapshot of a transform sequence; steps return successors."""

    __slots__ = (
        "basis", "names", "dim",
        "_den", "_vals", "_E", "_n", "_hist", "_counts",
        "_seg_E0", "_seg_sum0", "_rescaled", "_sum0", "_frame0",
        "_sh", "_sherr", "_shscale", "_slack_sh", "_slack_err",
    )

    # -- construction --------------------------------------------------------

    @classmethod
    def from_frame(cls, frame: ParameterFrame | Sequence[ValueVector],
                   names: Sequence[str] | None = None) -> "SequenceState":
        if not isinstance(frame, ParameterFrame):
            frame = ParameterFrame(frame, names)
        st = object.__new__(cls)
        st.basis = frame.basis
        st.names = frame.names
        st.dim = frame.dim
        nums, den = _common_den(frame.values)
        st._den = den
        st._vals = nums
        st._E = (0,) * frame.basis.size
        st._n = 0
        st._hist = []
        st._counts = (0,) * frame.dim
        st._seg_E0 = st._E
        st._seg_sum0 = _vec_total(nums)
        st._rescaled = False
        st._sum0 = st._seg_sum0
        st._frame0 = frame.values
        st._sh = None
        st._sherr = None
        st._shscale = 0
        st._slack_sh = None
        st._slack_err = 0
        st._ensure_shadows()
        return st

    def _spawn(self, vals, den, E, record, counts, seg_E0, seg_sum0,
               rescaled, sh, sherr, shscale, slack_sh, slack_err) -> "SequenceState":
        st = object.__new__(SequenceState)
        st.basis = self.basis
        st.names = self.names
        st.dim = self.dim
        st._den = den
        st._vals = vals
        st._E = E
        if len(self._hist) == self._n:
            self._hist.append(record)
            st._hist = self._hist
        else:  # a sibling successor already extended the shared history
            st._hist = self._hist[: self._n] + [record]
        st._n = self._n + 1
        st._counts = counts
        st._seg_E0 = seg_E0
        st._seg_sum0 = seg_sum0
        st._rescaled = rescaled
        st._sum0 = self._sum0
        st._frame0 = self._frame0
        st._sh = sh
        st._sherr = sherr
        st._shscale = shscale
        st._slack_sh = slack_sh
        st._slack_err = slack_err
        return st

    # -- shadow machinery ----------------------------------------------------

    def _shadow_eval(self, vec, T: int) -> int:
        """Mantissa m with |m - value * 2^T| <= 2, value = vec/den over the basis."""
        height = sum(abs(c) for c in vec)
        bits = max(64, T + height.bit_length() + 70)
        s, _err = self.basis._eval_fixpoint(vec, bits)
        return s // (self._den << (bits - T))

    def _fresh_shadows(self, T: int):
        sh = tuple(self._shadow_eval(v, T) for v in self._vals)
        return sh, (2,) * self.dim

    def _ensure_shadows(self):
        sh, errs, T = self._sh, self._sherr, self._shscale
        if sh is not None and min(sh) >= (1 << _SH_MIN) and max(errs) <= _SH_ERR_MAX:
            return sh, errs, T
        if sh is None:
            # probe the magnitude of the smallest value
            bits = 128
            while True:
                probes = [self.basis._eval_fixpoint(v, bits) for v in self._vals]
                if all(abs(s) - e > (1 << 66) for s, e in probes):
                    break
                bits *= 2
            smallest = min(abs(s) for s, _ in probes)
            T = _SH_TARGET + (bits - smallest.bit_length()) + (self._den.bit_length() - 1)
        while True:
            if sh is not None:
                T += max(64, _SH_TARGET - max(min(sh), 1).bit_length())
            sh, errs = self._fresh_shadows(T)
            if min(sh) >= (1 << _SH_MIN):
                break
        self._sh, self._sherr, self._shscale = sh, errs, T
        if not self._rescaled:
            d1 = self.dim - 1
            gap = tuple(s0 - d1 * e for s0, e in zip(self._sum0, self._E))
            self._slack_sh = self._shadow_eval(gap, T)
            self._slack_err = 2
        return sh, errs, T

    def _cmp_exact(self, i: int, j: int) -> int:
        vi, vj = self._vals[i], self._vals[j]
        return self.basis._sign_of_combo(tuple(a - b for a, b in zip(vi, vj)))

    def _value_sign_exact(self, vec) -> int:
        return self.basis._sign_of_combo(vec)

    # -- views ---------------------------------------------------------------

    @property
    def step_count(self) -> int:
        return self._n

    @property
    def history(self) -> tuple[StepRecord, ...]:
        return tuple(self._hist[: self._n])

    @property
    def frame(self) -> ParameterFrame:
        return ParameterFrame(
            tuple(ValueVector._raw(self.basis, v, self._den) for v in self._vals),
            self.names,
        )

    @property
    def frame_values(self) -> tuple[ValueVector, ...]:
        return tuple(ValueVector._raw(self.basis, v, self._den) for v in self._vals)

    @property
    def initial_frame_values(self) -> tuple[ValueVector, ...]:
        return self._frame0

    @property
    def partial_sum(self) -> ValueVector:
        """E: the sum of the values of all steps taken so far."""
        return ValueVector._raw(self.basis, self._E, self._den)

    @property
    def had_rescale(self) -> bool:
        return self._rescaled

    def m_value(self, n: int) -> ValueVector:
        if not 0 <= n < self._n:
            raise IndexOutOfRange(f"step {n} outside 0..{self._n - 1}")
        return self._hist[n].m_value

    def direction_counts(self) -> dict[str, int]:
        """Occurrences per direction among direction-carrying steps.

        Monomial runs count with multiplicity; a rescale recorded with a
        ``direction`` counts once for that direction.
        """
        return {name: c for name, c in zip(self.names, self._counts)}

    # -- stepping ------------------------------------------------------------

    def _argmin_unique(self) -> int:
        sh, errs, _ = self._ensure_shadows()
        mi = 0
        for i in range(1, self.dim):
            if sh[i] < sh[mi]:
                mi = i
        for i in range(self.dim):
            if i != mi and sh[i] - sh[mi] <= errs[i] + errs[mi]:
                # shadow gap inconclusive: settle exactly
                mi = 0
                for j in range(1, self.dim):
                    if self._cmp_exact(j, mi) < 0:
                        mi = j
                for j in range(self.dim):
                    if j != mi and self._cmp_exact(j, mi) == 0:
                        raise AmbiguousDirection(
                            f"minimum attained by both {self.names[mi]} and {self.names[j]}"
                        )
                return mi
        return mi

    def step_argmin(self) -> tuple["SequenceState", int]:
        """One monomial step in the direction of the unique smallest value."""
        mi = self._argmin_unique()
        return self._monomial(mi, 1, checked=True), mi

    def step_in_direction(self, direction: int) -> "SequenceState":
        """One scripted monomial step; the direction's value must be minimal."""
        self._check_dir(direction)
        return self._monomial(direction, 1, checked=False)

    def run_in_direction(self, direction: int, count: int) -> "SequenceState":
        """``count`` consecutive monomial steps in one direction, applied in bulk."""
        self._check_dir(direction)
        if count < 1:
            raise ValueError("run count must be >= 1")
        return self._monomial(direction, count, checked=False)

    def _check_dir(self, direction: int):
        if not 0 <= direction < self.dim:
            raise IndexOutOfRange(
                f"direction {direction} outside 0..{self.dim - 1}"
            )

    def _monomial(self, mi: int, count: int, checked: bool) -> "SequenceState":
        sh, errs, T = self._ensure_shadows()
        vm = self._vals[mi]
        shm, errm = sh[mi], errs[mi]
        if not checked:
            # validity: every other value must stay strictly positive after
            # subtracting count * v(mi), which also certifies minimality at
            # every intermediate step of the run
            for w in range(self.dim):
                if w == mi:
                    continue
                gap = sh[w] - count * shm
                slack = errs[w] + count * errm
                if gap > slack:
                    continue
                sgn = self._value_sign_exact(
                    tuple(a - count * b for a, b in zip(self._vals[w], vm))
                )
                if sgn < 0:
                    mid = self._value_sign_exact(
                        tuple(a - b for a, b in zip(self._vals[w], vm))
                    )
                    if mid < 0:
                        raise DirectionNotMinimal(
                            f"{self.names[mi]} is not minimal: {self.names[w]} is smaller"
                        )
                    raise DirectionNotMinimal(
                        f"run of {count} steps in {self.names[mi]} overshoots {self.names[w]}"
                    )
                if sgn == 0:
                    raise NonPositiveValue(
                        f"value of {self.names[w]} would reach zero"
                    )
        vals = tuple(
            v if i == mi else tuple(a - count * b for a, b in zip(v, vm))
            for i, v in enumerate(self._vals)
        )
        E = tuple(e + count * b for e, b in zip(self._E, vm))
        new_sh = tuple(
            s if i == mi else s - count * shm for i, s in enumerate(sh)
        )
        new_err = tuple(
            e if i == mi else e + count * errm + 1 for i, e in enumerate(errs)
        )
        counts = tuple(
            c + count if i == mi else c for i, c in enumerate(self._counts)
        )
        record = StepRecord(
            kind="monomial",
            direction=mi,
            m_value=ValueVector._raw(self.basis, vm, self._den),
            count=count,
        )
        if self._slack_sh is not None:
            d1 = self.dim - 1
            slack_sh = self._slack_sh - d1 * count * shm
            slack_err = self._slack_err + d1 * count * errm + 1
        else:
            slack_sh, slack_err = None, 0
        return self._spawn(vals, self._den, E, record, counts,
                           self._seg_E0, self._seg_sum0, self._rescaled,
                           new_sh, new_err, T, slack_sh, slack_err)

    def current_min(self) -> tuple[int, ValueVector]:
        """Index and value of a minimal frame entry (ties resolved to lowest index)."""
        sh, errs, _ = self._ensure_shadows()
        mi = 0
        certain = True
        for i in range(1, self.dim):
            if sh[i] < sh[mi]:
                mi = i
        for i in range(self.dim):
            if i != mi and sh[i] - sh[mi] <= errs[i] + errs[mi]:
                certain = False
                break
        if not certain:
            mi = 0
            for j in range(1, self.dim):
                if self._cmp_exact(j, mi) < 0:
                    mi = j
        return mi, ValueVector._raw(self.basis, self._vals[mi], self._den)

    def rescale(self, new_values: Sequence[ValueVector],
                direction: int | None = None) -> "SequenceState":
        """A coordinate-change step: the frame is replaced by ``new_values``.

        The step's value is the current frame minimum.  ``direction`` may
        record which variable was divided out, for occupancy reporting.
        """
        if len(new_values) != self.dim:
            raise ValueError("rescale must supply one value per direction")
        if direction is not None:
            self._check_dir(direction)
        ref = ValueVector._raw(self.basis, self._vals[0], self._den)
        for v in new_values:
            v._check_basis(ref)
            if v.sign() <= 0:
                raise NonPositiveValue("rescaled frame values must stay positive")
        import math

        _, m = self.current_min()
        nums, den = _common_den(tuple(new_values))
        full = math.lcm(den, self._den)
        vals = tuple(tuple(n * (full // den) for n in row) for row in nums)
        # E' = E + m, re-expressed over the new common denominator
        E = tuple((e + mm) * (full // self._den)
                  for e, mm in zip(self._E, m._nums))
        den = full
        record = StepRecord(
            kind="rescale",
            direction=direction,
            m_value=m,
            new_values=tuple(new_values),
        )
        counts = self._counts
        if direction is not None:
            counts = tuple(
                c + 1 if i == direction else c for i, c in enumerate(counts)
            )
        st = self._spawn(vals, den, E, record, counts,
                         E, _vec_total(vals), True,
                         None, None, 0, None, 0)
        st._ensure_shadows()
        return st

    # -- invariants and reports ----------------------------------------------

    def conservation_check(self) -> bool:
        """(dim-1) * (E - E_seg) + sum(frame) - sum(frame_seg) == 0, exactly.

        ``seg`` marks the start of the current rescale-free segment; the
        identity holds within every such segment regardless of which
        directions were stepped.
        """
        d1 = self.dim - 1
        total = _vec_total(self._vals)
        return all(
            d1 * (e - e0) + t - t0 == 0
            for e, e0, t, t0 in zip(self._E, self._seg_E0, total, self._seg_sum0)
        )

    def series_bound(self) -> ValueVector:
        """sum(initial frame) / (dim - 1): the ceiling for rescale-free runs."""
        if self.dim < 2:
            raise ValueError("the series bound needs at least two directions")
        total = self._frame0[0].basis.zero()
        for v in self._frame0:
            total = total + v
        return total.scale(Fraction(1, self.dim - 1))

    def bound_gap_sign(self) -> int:
        """Sign of (series bound - E).  Only defined for rescale-free runs."""
        if self._rescaled:
            raise ValueError("the series bound does not apply after a rescale")
        if self.dim < 2:
            raise ValueError("the series bound needs at least two directions")
        # the gap equals sum(frame)/(d-1) whenever the conservation identity
        # holds, so its shadow lives at the frame scale and is maintained
        # incrementally alongside the frame shadows
        self._ensure_shadows()
        if self._slack_sh > self._slack_err:
            return 1
        if self._slack_sh < -self._slack_err:
            return -1
        d1 = self.dim - 1
        gap = tuple(s - d1 * e for s, e in zip(self._sum0, self._E))
        return self._value_sign_exact(gap)

    def starving_directions(self, window: int) -> set[str]:
        """Names absent from the last ``window`` direction-carrying steps.

        A zero window is vacuous and reports nothing as starving.
        """
        if window < 0:
            raise ValueError("window must be >= 0")
        if window == 0:
            return set()
        seen: set[int] = set()
        remaining = window
        for rec in reversed(self._hist[: self._n]):
            if rec.carries_direction:
                seen.add(rec.direction)
                remaining -= 1
                if remaining == 0:
                    break
        return {self.names[i] for i in range(self.dim) if i not in seen}

    def change_of_direction(self, n: int, method: str = "value") -> bool:
        """Did the sequence leave its first infinitely-near point by step n?

        ``value`` compares the first step value with step n-1's; ``ideal``
        asks whether the extension of the maximal ideal along the first n
        directions has order at least 2.  The two agree on argmin runs.
        """
        if not 1 <= n <= self._n:
            raise IndexOutOfRange(f"prefix length {n} outside 1..{self._n}")
        if method == "value":
            return self.m_value(0).cmp(self.m_value(n - 1)) > 0
        if method == "ideal":
            word: list[int] = []
            for rec in self._hist[:n]:
                if rec.kind != "monomial":
                    raise ValueError("ideal route needs a monomial-only prefix")
                word.extend([rec.direction] * rec.count)
            ext = extend_ideal(MonomialIdeal.maximal(self.dim), word)
            return ext.order() >= 2
        raise ValueError(f"unknown method {method!r}")

    def first_use_order_report(self) -> dict:
        """Order the directions by first monomial use and test the initial frame.

        Checks, in that ordering a_1, ..., a_d of the *initial* values:
        strict ascent; an integer s >= 1 with s*a_1 < a_2 < (s+1)*a_1;
        and (j-2)*a_j < a_1 + ... + a_(j-1) for every j >= 3.
        """
        order: list[int] = []
        for rec in self._hist[: self._n]:
            if rec.kind == "monomial" and rec.direction not in order:
                order.append(rec.direction)
        if len(order) < self.dim:
            missing = [self.names[i] for i in range(self.dim) if i not in order]
            raise IncompleteCoverage(f"directions never used: {missing}")
        a = [self._frame0[i] for i in order]
        ascending = all(a[j].cmp(a[j + 1]) < 0 for j in range(self.dim - 1))
        gap_integer = None
        if self.dim >= 2 and ascending:
            s = 1
            while a[1].cmp(a[0].scale(2 * s)) > 0:
                s *= 2
            lo, hi = s // 2, 2 * s  # a2 < 2s*a1 now; floor lies in [lo, hi)
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if a[1].cmp(a[0].scale(mid)) > 0:
                    lo = mid
                else:
                    hi = mid
            s = max(lo, 1)
            if a[0].scale(s).cmp(a[1]) < 0 and a[1].cmp(a[0].scale(s + 1)) < 0:
                gap_integer = s
        prefix_dominance = True
        prefix = a[0] + a[1] if self.dim >= 2 else None
        for j in range(3, self.dim + 1):
            if a[j - 1].scale(j - 2).cmp(prefix) >= 0:
                prefix_dominance = False
            if j <= self.dim - 1:
                prefix = prefix + a[j - 1]
        return {
            "order": tuple(self.names[i] for i in order),
            "ascending": ascending,
            "gap_integer": gap_integer,
            "prefix_dominance": prefix_dominance,
            "all_hold": ascending and gap_integer is not None and prefix_dominance,
        }

    def quotient_sequence(self, killed: int) -> "SequenceState":
        """Replay the same steps with one direction removed from the frame."""
        self._check_dir(killed)
        if self.dim < 2:
            raise ValueError("nothing would remain after removing a direction")
        keep = [i for i in range(self.dim) if i != killed]
        names = tuple(self.names[i] for i in keep)
        st = SequenceState.from_frame(
            ParameterFrame(tuple(self._frame0[i] for i in keep), names)
        )
        for rec in self._hist[: self._n]:
            if rec.direction == killed:
                raise KilledDirectionUsed(
                    f"step in removed direction {self.names[killed]}"
                )
            if rec.kind == "monomial":
                proj = keep.index(rec.direction)
                st = st._monomial(proj, rec.count, checked=False)
            else:
                st = st.rescale(
                    tuple(rec.new_values[i] for i in keep),
                    direction=None if rec.direction is None
                    else keep.index(rec.direction),
                )
        return st


def _vec_total(vals: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    return tuple(sum(col) for col in zip(*vals))
