"""Named verification checks runnable against any scenario.

The registry keys are the stable interface strings used by configs and
the command line.  Each check inspects a replayed scenario (one shared
replay per invocation of run_checks) and returns a verdict:

- "pass"           the claimed property held everywhere it was tested
- "fail"           a counterexample was found; the detail names it
- "not applicable" the scenario does not satisfy the check's hypotheses
                   (the detail says which one is missing)

Checks never weaken their claim to fit a scenario: a divergent or
rescaling plan gets "not applicable" from a bounded-sum check rather
than a vacuous pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    AmbiguousDirection,
    IncompleteCoverage,
    NotTerminated,
    RatioUndefined,
    UnknownCheck,
)
from .forms import MonomialForm, order_drop_report, ratio_limit_report
from .gallery import Scenario, replay_states
from .monomials import extend_ideal
from .sequence import SequenceState
from .values import ValueVector
from .videals import short_chain_report, tau_bound, videal_chain

SMALL_FRAME_THRESHOLD = Fraction(1, 10**6)


@dataclass
class CheckResult:
    check: str
    verdict: str  # "pass" | "fail" | "not applicable"
    detail: dict

    @property
    def ok(self) -> bool:
        return self.verdict != "fail"


@dataclass
class RunArtifacts:
    """Everything the per-step checks need, gathered in one replay."""

    scenario: Scenario
    final: SequenceState
    conservation_all: bool
    conservation_fail_step: int | None
    bound_applicable: bool
    bound_reason: str
    bound_all: bool
    bound_fail_step: int | None
    boundary_sums: list[ValueVector]


def frame_rationally_independent(values: Sequence[ValueVector]) -> bool:
    """Exact rank test: no nonzero integer combination of the values is 0."""
    rows = [list(v.coeffs) for v in values]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                factor = rows[r][c] / prow[c]
                rows[r] = [a - factor * b for a, b in zip(rows[r], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank == len(rows)


def collect_artifacts(scenario: Scenario, replay: bool = True) -> RunArtifacts:
    """Gather per-step facts in one replay.

    With ``replay=False`` no step is taken: the artifacts describe the
    initial state and the per-step fields hold vacuously.  Checks that
    look only at the frame use this to skip the replay entirely.
    """
    has_rescale = scenario.mode == "scripted" and any(
        ps.kind == "rescale" for ps in scenario.plan
    )
    bound_applicable = not has_rescale and scenario.frame.dim >= 2
    bound_reason = (
        "coordinate rescales re-seed the frame, so no single ceiling applies"
        if has_rescale
        else ""
    )
    conservation_all = True
    conservation_fail = None
    bound_all = True
    bound_fail = None
    boundaries = set(scenario.boundaries)
    boundary_sums: dict[int, ValueVector] = {}
    n = 0
    state = SequenceState.from_frame(scenario.frame)
    if replay:
        for state in replay_states(scenario):
            n += 1
            if conservation_all and not state.conservation_check():
                conservation_all = False
                conservation_fail = n
            if bound_applicable and bound_all and state.bound_gap_sign() <= 0:
                bound_all = False
                bound_fail = n
            if n in boundaries:
                boundary_sums[n] = state.partial_sum
    return RunArtifacts(
        scenario=scenario,
        final=state,
        conservation_all=conservation_all,
        conservation_fail_step=conservation_fail,
        bound_applicable=bound_applicable,
        bound_reason=bound_reason,
        bound_all=bound_all if bound_applicable else False,
        bound_fail_step=bound_fail,
        boundary_sums=[boundary_sums[b] for b in scenario.boundaries
                       if b in boundary_sums],
    )


# -- individual checks ---------------------------------------------------------


def _check_conservation(art: RunArtifacts, options: dict) -> CheckResult:
    detail = {"records": art.final.step_count}
    if art.conservation_all:
        return CheckResult("eq631", "pass", detail)
    detail["first_failure_at"] = art.conservation_fail_step
    return CheckResult("eq631", "fail", detail)


def _check_series_bound(art: RunArtifacts, options: dict) -> CheckResult:
    if not art.bound_applicable:
        return CheckResult("bound63", "not applicable",
                           {"reason": art.bound_reason})
    final = art.final
    values = final.initial_frame_values
    independent = frame_rationally_independent(values)
    detail: dict = {
        "records": final.step_count,
        "bound": final.series_bound(),
        "running_sum": final.partial_sum,
        "independent_values": independent,
    }
    threshold = options.get("small_threshold", SMALL_FRAME_THRESHOLD)
    intervals = [v.evaluate_interval(threshold / 4) for v in final.frame_values]
    tail_small = all(hi < threshold for _, hi in intervals)
    detail["frame_below_threshold"] = tail_small
    detail["threshold"] = threshold
    if tail_small:
        d = final.frame.dim
        detail["sum_within_of_bound"] = threshold * d / (d - 1)
    if art.bound_all:
        return CheckResult("bound63", "pass", detail)
    detail["first_failure_at"] = art.bound_fail_step
    return CheckResult("bound63", "fail", detail)


def _check_switching_witness(art: RunArtifacts, options: dict) -> CheckResult:
    final = art.final
    carrying = sum(1 for r in final.history if r.carries_direction)
    if carrying == 0:
        return CheckResult("switching-witness", "not applicable",
                           {"reason": "no direction-carrying steps"})
    windows = options.get("windows") or [w for w in (1, 2, 5, 10, 20, carrying)
                                         if w <= carrying]
    per_window = {w: sorted(final.starving_directions(w)) for w in windows}
    counts = final.direction_counts()
    never_used = sorted(name for name, c in counts.items() if c == 0)
    return CheckResult("switching-witness", "pass", {
        "starving_by_window": per_window,
        "direction_counts": counts,
        "never_used": never_used,
    })


def _check_order_drop(art: RunArtifacts, options: dict) -> CheckResult:
    final = art.final
    dim = final.frame.dim
    cap = options.get("word_cap", 128)
    max_degree = options.get("max_degree", 3)
    # the word consists of the monomial steps only: a rescale may carry a
    # direction label, but it is not a letter the rewrite acts through
    word: list[int] = []
    used: set[int] = set()
    pos = 0
    covering_len = None
    for rec in final.history:
        if rec.kind != "monomial":
            continue
        if len(word) < cap:
            word.extend([rec.direction] * min(rec.count, cap - len(word)))
        pos += rec.count
        if rec.direction not in used:
            used.add(rec.direction)
            if len(used) == dim:
                covering_len = pos - rec.count + 1
    if not word:
        return CheckResult("thm33a", "not applicable",
                           {"reason": "no monomial steps in the plan"})
    if len(used) == dim:
        if covering_len > cap:
            return CheckResult("thm33a", "not applicable", {
                "reason": "directions only covered beyond the sweep cap",
                "word_cap": cap,
            })
        report = order_drop_report(dim, word[:covering_len], max_degree)
        verdict = "pass" if report["all_drop"] and report["orders_monotone"] else "fail"
        return CheckResult("thm33a", verdict, {
            "mode": "full-coverage",
            "word_length": covering_len,
            "report": report,
        })
    report = order_drop_report(dim, word, max_degree)
    ok = (not report["full_coverage"]) and report["witness_constant"]
    return CheckResult("thm33a", "pass" if ok else "fail", {
        "mode": "missing-direction",
        "missing_from_word": sorted(
            final.names[i] for i in range(dim) if i not in used
        ),
        "report": report,
    })


def _check_first_use(art: RunArtifacts, options: dict) -> CheckResult:
    final = art.final
    if final.had_rescale:
        return CheckResult("prop344", "not applicable",
                           {"reason": "frame was rescaled mid-run"})
    try:
        report = final.first_use_order_report()
    except IncompleteCoverage as exc:
        return CheckResult("prop344", "not applicable", {"reason": str(exc)})
    verdict = "pass" if report["all_hold"] else "fail"
    return CheckResult("prop344", verdict, {"report": report})


def _check_ratio_limit(art: RunArtifacts, options: dict) -> CheckResult:
    sc = art.scenario
    if sc.mode != "argmin":
        return CheckResult("ratio-limit", "not applicable",
                           {"reason": "order ratios are tracked along argmin runs"})
    dim = sc.frame.dim
    f_sup = options.get("ratio_f") or [tuple(1 if i == 1 else 0 for i in range(dim))]
    g_sup = options.get("ratio_g") or [tuple(1 if i == 0 else 0 for i in range(dim))]
    steps = min(options.get("ratio_steps", 40), sc.steps or 40)
    try:
        report = ratio_limit_report(
            sc.frame, MonomialForm(f_sup, dim), MonomialForm(g_sup, dim), steps)
    except (RatioUndefined, AmbiguousDirection) as exc:
        return CheckResult("ratio-limit", "not applicable", {"reason": str(exc)})
    ok = len(report["trace"]) == steps
    return CheckResult("ratio-limit", "pass" if ok else "fail", report)


def _check_videal_chain(art: RunArtifacts, options: dict) -> CheckResult:
    frame = art.scenario.frame
    length = options.get("chain_length", 12)
    chain = videal_chain(frame, length)
    descending = all(
        b["threshold"].cmp(a["threshold"]) > 0
        and a["ideal"] != b["ideal"]
        and all(a["ideal"].contains(g) for g in b["ideal"].generators)
        for a, b in zip(chain, chain[1:])
    )
    colengths = [e["colength"] for e in chain]
    independent = frame_rationally_independent(frame.values)
    ok = descending and all(c >= 1 for c in colengths)
    if independent:
        ok = ok and all(c == 1 for c in colengths)
    return CheckResult("videal-chain", "pass" if ok else "fail", {
        "chain_length": length,
        "descending": descending,
        "colengths": colengths,
        "independent_values": independent,
        "thresholds": [e["threshold"] for e in chain],
    })


def _check_tau_bound(art: RunArtifacts, options: dict) -> CheckResult:
    frame = art.scenario.frame
    n_ideals = options.get("n_ideals", 6)
    max_steps = options.get("tau_max_steps", 200)
    try:
        j = tau_bound(frame, n_ideals, max_steps=max_steps)
    except AmbiguousDirection as exc:
        return CheckResult("tau-bound", "not applicable", {"reason": str(exc)})
    except NotTerminated as exc:
        return CheckResult("tau-bound", "not applicable", {
            "reason": f"no principal prefix within {exc.steps} steps",
        })
    # re-verify minimality independently of the search loop
    chain = [e["ideal"] for e in videal_chain(frame, n_ideals)]
    state = SequenceState.from_frame(frame)
    word = []
    for _ in range(j):
        state, w = state.step_argmin()
        word.append(w)
    at_j = all(extend_ideal(i, word).is_principal for i in chain)
    before = (
        j == 0
        or not all(extend_ideal(i, word[:-1]).is_principal for i in chain)
    )
    verdict = "pass" if at_j and before else "fail"
    return CheckResult("tau-bound", verdict, {
        "n_ideals": n_ideals,
        "prefix_length": j,
        "all_principal_at_bound": at_j,
        "minimal": before,
    })


def _check_short_chain(art: RunArtifacts, options: dict) -> CheckResult:
    report = short_chain_report(art.scenario.frame)
    if not report["applies"]:
        return CheckResult("remark4175", "not applicable", {
            "reason": "some value is at least twice the smallest",
        })
    ok = (
        report["starts_at_unit"]
        and report["second_is_maximal"]
        and report["ends_at_m_squared"]
        and report["all_colengths_one"]
    )
    return CheckResult("remark4175", "pass" if ok else "fail", {
        "thresholds": report["thresholds"],
        "colengths": report["colengths"],
        "ends_at_m_squared": report["ends_at_m_squared"],
    })


def _check_series_sum(art: RunArtifacts, options: dict) -> CheckResult:
    sc = art.scenario
    if sc.sum_after_episodes is None or not sc.boundaries:
        return CheckResult("series-sum", "not applicable",
                           {"reason": "no closed-form episode sums declared"})
    basis = sc.frame.basis
    mismatches = []
    floor_ok = True
    for k, total in enumerate(art.boundary_sums, start=1):
        expected = basis.rational(sc.sum_after_episodes(k))
        if total.coeffs != expected.coeffs:
            mismatches.append(k)
        if sc.diverges and total.cmp(basis.rational(k)) < 0:
            floor_ok = False
    detail: dict = {
        "episodes": len(art.boundary_sums),
        "mismatched_episodes": mismatches,
    }
    if sc.diverges:
        detail["sums_dominate_episode_count"] = floor_ok
    if sc.expected_limit is not None:
        detail["limit"] = sc.expected_limit
    ok = not mismatches and (floor_ok or not sc.diverges)
    return CheckResult("series-sum", "pass" if ok else "fail", detail)


def _check_change_of_direction(art: RunArtifacts, options: dict) -> CheckResult:
    final = art.final
    limit = 0
    for rec in final.history:
        if rec.kind != "monomial":
            break
        limit += 1
    limit = min(limit, options.get("prefix_cap", 30))
    if limit == 0:
        return CheckResult("change-of-direction", "not applicable",
                           {"reason": "no monomial-only prefix to compare on"})
    disagreements = []
    first_change = None
    for n in range(1, limit + 1):
        via_value = final.change_of_direction(n, method="value")
        via_ideal = final.change_of_direction(n, method="ideal")
        if via_value != via_ideal:
            disagreements.append(n)
        if first_change is None and via_value:
            first_change = n
    verdict = "pass" if not disagreements else "fail"
    return CheckResult("change-of-direction", verdict, {
        "prefixes_compared": limit,
        "disagreements": disagreements,
        "first_change_at": first_change,
    })


CHECKS: dict[str, Callable[[RunArtifacts, dict], CheckResult]] = {
    "eq631": _check_conservation,
    "bound63": _check_series_bound,
    "switching-witness": _check_switching_witness,
    "thm33a": _check_order_drop,
    "prop344": _check_first_use,
    "ratio-limit": _check_ratio_limit,
    "videal-chain": _check_videal_chain,
    "tau-bound": _check_tau_bound,
    "remark4175": _check_short_chain,
    "series-sum": _check_series_sum,
    "change-of-direction": _check_change_of_direction,
}

EXPLANATIONS = {
    "eq631": (
        "Conservation of value mass within a rescale-free stretch: for a "
        "d-direction frame, (d-1) times the sum of step values taken since "
        "the stretch began, plus the current frame total, equals the frame "
        "total at the start of the stretch.  Every monomial step subtracts "
        "its value from exactly d-1 coordinates, so the identity holds "
        "step by step; the check verifies it as an exact coefficient "
        "identity after every record."
    ),
    "bound63": (
        "Bounded running sum: along a rescale-free run the sum of step "
        "values stays strictly below (initial frame total)/(d-1), because "
        "the conservation identity makes the gap equal to the current "
        "frame total over d-1, which is positive.  The check also reports "
        "whether the final frame has shrunk below a small threshold, which "
        "pins the running sum to within threshold*d/(d-1) of the ceiling."
    ),
    "switching-witness": (
        "Occupancy report for the recent past: for each window size it "
        "lists the directions that did not carry any of the last so-many "
        "direction-carrying records.  A direction that starves in every "
        "window is the classic witness that the sequence has locked onto "
        "a proper subset of the coordinates."
    ),
    "thm33a": (
        "Order-drop dichotomy: along a word of directions that uses every "
        "coordinate at least once, the order of every nonunit monomial "
        "form strictly drops; if some coordinate never occurs, the form "
        "consisting of that single variable keeps order one forever.  The "
        "check sweeps all antichain supports up to a degree cap through "
        "the scenario's word and verifies whichever branch applies."
    ),
    "prop344": (
        "Shape of the initial values under first-use ordering: listing the "
        "initial frame values in the order their directions first carry a "
        "step, the values ascend strictly; an integer s >= 1 squeezes the "
        "second value between s and s+1 times the first; and each later "
        "value a_j satisfies (j-2)*a_j < a_1 + ... + a_(j-1)."
    ),
    "ratio-limit": (
        "Order ratio convergence: fixing two monomials and rewriting both "
        "along the argmin word, the ratio of their orders converges to "
        "the ratio of their frame values.  The check records the order "
        "pairs at every step and emits the exact limit (a fraction when "
        "the value ratio is rational, otherwise both exact values plus a "
        "rational enclosure)."
    ),
    "videal-chain": (
        "Valuation-ideal ladder: starting from the whole ring, repeatedly "
        "take the monomials of value strictly above the current ideal's "
        "value.  The resulting chain must descend strictly, its thresholds "
        "must be exactly the attained monomial values in increasing order, "
        "and when the frame values admit no rational relation each step "
        "has colength one (exactly one monomial sits at each threshold)."
    ),
    "tau-bound": (
        "Principality prefix: extending each of the first n valuation "
        "ideals through the argmin word eventually makes all of them "
        "principal at once; the check reports the least such prefix length "
        "and re-verifies both that it works and that one step fewer does "
        "not."
    ),
    "remark4175": (
        "Short ladder under tightly clustered values: when every frame "
        "value is below twice the smallest, the valuation ideals between "
        "the whole ring and the square of the maximal ideal are exactly "
        "the ring, the maximal ideal, one ideal per remaining variable, "
        "and the square itself - a chain of d+2 ideals with colength one "
        "at every step."
    ),
    "series-sum": (
        "Episode-sum law: scenarios built from episodes declare an exact "
        "closed form for the running sum at each episode boundary.  The "
        "check replays the plan and compares every boundary sum to the "
        "closed form by exact arithmetic; for divergent scenarios it also "
        "confirms the sums dominate the episode count."
    ),
    "change-of-direction": (
        "Two routes to 'the sequence moved': comparing the first step "
        "value against the (n-1)st detects a strict drop exactly when the "
        "extension of the maximal ideal along the first n directions has "
        "order at least two.  The check runs both routes on every prefix "
        "and demands they agree."
    ),
}


def list_checks() -> list[str]:
    return sorted(CHECKS)


def explain(check: str) -> str:
    if check not in EXPLANATIONS:
        raise UnknownCheck(check)
    return EXPLANATIONS[check]


# checks that only look at the frame; requesting nothing else skips the replay
FRAME_ONLY_CHECKS = {"ratio-limit", "videal-chain", "tau-bound", "remark4175"}


def run_checks(scenario: Scenario, check_ids: Sequence[str],
               options: dict | None = None) -> list[CheckResult]:
    """Replay once, then run each requested check (deduplicated, in order)."""
    options = options or {}
    ordered: list[str] = []
    for cid in check_ids:
        if cid not in CHECKS:
            raise UnknownCheck(cid)
        if cid not in ordered:
            ordered.append(cid)
    needs_replay = any(cid not in FRAME_ONLY_CHECKS for cid in ordered)
    art = collect_artifacts(scenario, replay=needs_replay)
    return [CHECKS[cid](art, options) for cid in ordered]
