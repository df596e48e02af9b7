"""Command line entry point: scenario runner and report emitter.

Subcommands
-----------
run      execute one scenario (--config JSON file or --preset name) and
         emit a JSON report, plus a CSV trace when asked
verify   run the numbered acceptance criteria, one verdict line each
list     show the available presets and checks
explain  print the one-paragraph description of a check

Reports are canonical: the same config and seed produce byte-identical
JSON.  Rationals are serialized as "num/den" strings, and every real
value carries a rational enclosure of the configured width instead of a
float.  Wall-clock timings never enter the report; --timings prints
them to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from . import acceptance
from .checks import CheckResult, explain, list_checks, run_checks
from .errors import ConfigError, QuadseqError, UnknownCheck
from .forms import MonomialForm
from .gallery import PlanStep, Scenario, build_preset, list_presets, replay_states
from .monomials import MonomialIdeal
from .sequence import ParameterFrame
from .values import RealBasis, ValueVector

DEFAULT_WIDTH = Fraction(1, 10**6)


# -- canonical serialization ----------------------------------------------------


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _value_obj(v: ValueVector, width: Fraction) -> dict:
    lo, hi = v.evaluate_interval(width)
    return {
        "coeffs": [_frac_str(c) for c in v.coeffs],
        "interval": {"lo": _frac_str(lo), "hi": _frac_str(hi)},
    }


def _canonical(obj, width: Fraction):
    """Recursively rewrite report payloads into JSON-stable primitives."""
    if isinstance(obj, ValueVector):
        return _value_obj(obj, width)
    if isinstance(obj, Fraction):
        return _frac_str(obj)
    if isinstance(obj, MonomialIdeal):
        return {"generators": [list(g) for g in obj.generators]}
    if isinstance(obj, MonomialForm):
        return {"support": [list(m) for m in obj.support]}
    if isinstance(obj, dict):
        return {str(k): _canonical(v, width) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(x, width) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_canonical(x, width) for x in obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):  # floats are never canonical
        raise ConfigError(f"refusing to serialize a float: {obj!r}")
    return repr(obj)


# -- config parsing --------------------------------------------------------------


def _to_rational(spec, where: str) -> Fraction:
    if isinstance(spec, bool) or isinstance(spec, float):
        raise ConfigError(f"{where}: write rationals as strings like \"3/4\"")
    try:
        return Fraction(str(spec))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: not a rational: {spec!r}") from exc


def _parse_value(basis: RealBasis, spec, where: str) -> ValueVector:
    if isinstance(spec, list):
        if len(spec) != basis.size:
            raise ConfigError(
                f"{where}: expected {basis.size} coefficients, got {len(spec)}"
            )
        return basis.value([_to_rational(c, where) for c in spec])
    return basis.rational(_to_rational(spec, where))


def _parse_plan(basis: RealBasis, obj, dim: int) -> tuple[PlanStep, ...]:
    if not isinstance(obj, list):
        raise ConfigError("plan must be a list of step objects")
    steps = []
    for i, ps in enumerate(obj):
        where = f"plan[{i}]"
        if not isinstance(ps, dict) or "kind" not in ps:
            raise ConfigError(f"{where}: each step needs a \"kind\"")
        kind = ps["kind"]
        if kind == "monomial":
            if "direction" not in ps:
                raise ConfigError(f"{where}: monomial step needs a direction")
            steps.append(
                PlanStep("monomial", direction=int(ps["direction"]),
                         count=int(ps.get("count", 1)))
            )
        elif kind == "rescale":
            vals = ps.get("values")
            if not isinstance(vals, list) or len(vals) != dim:
                raise ConfigError(f"{where}: rescale needs {dim} new values")
            new_values = tuple(
                _parse_value(basis, v, f"{where}.values[{j}]")
                for j, v in enumerate(vals)
            )
            direction = ps.get("direction")
            steps.append(
                PlanStep("rescale", direction=None if direction is None
                         else int(direction), new_values=new_values)
            )
        else:
            raise ConfigError(f"{where}: unknown step kind {kind!r}")
    return tuple(steps)


def _parse_options(obj) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError("options must be an object")
    options = dict(obj)
    if "small_threshold" in options:
        options["small_threshold"] = _to_rational(
            options["small_threshold"], "options.small_threshold")
    for key in ("ratio_f", "ratio_g"):
        if key in options:
            options[key] = [tuple(int(e) for e in m) for m in options[key]]
    return options


def scenario_from_config(cfg: dict) -> Scenario:
    if "preset" in cfg:
        kwargs = dict(cfg.get("preset_options") or {})
        return build_preset(cfg["preset"], steps=cfg.get("steps"),
                            seed=cfg.get("seed"), **kwargs)
    for key in ("dimension", "frame"):
        if key not in cfg:
            raise ConfigError(f"inline scenario needs {key!r} (or use a preset)")
    dim = int(cfg["dimension"])
    basis = (RealBasis.from_obj(cfg["basis"]) if "basis" in cfg
             else RealBasis.default(dim))
    frame_spec = cfg["frame"]
    if not isinstance(frame_spec, list) or len(frame_spec) != dim:
        raise ConfigError(f"frame must list {dim} values")
    values = [_parse_value(basis, s, f"frame[{i}]")
              for i, s in enumerate(frame_spec)]
    frame = ParameterFrame(values, names=cfg.get("names"))
    mode = cfg.get("mode", "argmin")
    name = cfg.get("name", "scenario")
    if mode == "argmin":
        return Scenario(name=name, frame=frame, mode="argmin",
                        steps=int(cfg.get("steps", 0)),
                        seed=cfg.get("seed"))
    if mode == "scripted":
        plan = _parse_plan(basis, cfg.get("plan", []), dim)
        boundaries = tuple(int(b) for b in cfg.get("boundaries", ()))
        return Scenario(name=name, frame=frame, mode="scripted", plan=plan,
                        boundaries=boundaries, seed=cfg.get("seed"))
    raise ConfigError(f"unknown mode {mode!r} (use \"argmin\" or \"scripted\")")


# -- trace and report ------------------------------------------------------------


def build_trace(scenario: Scenario, width: Fraction) -> list[dict]:
    """One row per record; failures carry the record index."""
    rows = []
    n = 0
    try:
        for st in replay_states(scenario):
            n += 1
            rec = st.history[-1]
            m_lo, m_hi = st.m_value(st.step_count - 1).evaluate_interval(width)
            e_lo, e_hi = st.partial_sum.evaluate_interval(width)
            rows.append({
                "step": n,
                "kind": rec.kind,
                "dir": "" if rec.direction is None else st.names[rec.direction],
                "m_lo": _frac_str(m_lo),
                "m_hi": _frac_str(m_hi),
                "E_lo": _frac_str(e_lo),
                "E_hi": _frac_str(e_hi),
            })
    except QuadseqError as exc:
        raise ConfigError(f"scenario failed at record {n + 1}: {exc}") from exc
    return rows


def build_report(scenario: Scenario, results: list[CheckResult],
                 trace: list[dict], width: Fraction, source: str) -> dict:
    return {
        "scenario": {
            "name": scenario.name,
            "source": source,
            "dimension": scenario.dim,
            "basis": scenario.frame.basis.to_obj(),
            "names": list(scenario.frame.names),
            "frame": [_value_obj(v, width) for v in scenario.frame.values],
            "mode": scenario.mode,
            "steps": scenario.steps,
            "plan_records": len(scenario.plan),
            "seed": scenario.seed,
            "notes": scenario.notes,
        },
        "interval_width": _frac_str(width),
        "checks": [
            {"check": r.check, "verdict": r.verdict,
             "detail": _canonical(r.detail, width)}
            for r in results
        ],
        "trace": trace,
    }


CSV_COLUMNS = ("step", "kind", "dir", "m_lo", "m_hi", "E_lo", "E_hi")


def write_csv(path: str, trace: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(trace)


# -- subcommands -----------------------------------------------------------------


def cmd_run(args) -> int:
    t0 = time.perf_counter()
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        source = f"config:{os.path.basename(args.config)}"
    else:
        cfg = {"preset": args.preset}
        source = f"preset:{args.preset}"
    if args.steps is not None:
        cfg["steps"] = args.steps
    if args.seed is not None:
        cfg["seed"] = args.seed

    scenario = scenario_from_config(cfg)
    check_ids = cfg.get("checks", [])
    if args.checks is not None:
        check_ids = (list_checks() if args.checks == "all"
                     else [c for c in args.checks.split(",") if c])
    options = _parse_options(cfg.get("options"))

    output = cfg.get("output") or {}
    width = DEFAULT_WIDTH
    if "interval_width" in output:
        width = _to_rational(output["interval_width"], "output.interval_width")
    if args.interval_width is not None:
        width = _to_rational(args.interval_width, "--interval-width")
    if width <= 0:
        raise ConfigError("interval width must be positive")

    trace = build_trace(scenario, width)
    results = run_checks(scenario, check_ids, options)
    report = build_report(scenario, results, trace, width, source)
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"

    json_path = output.get("json")
    csv_path = output.get("csv")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        json_path = os.path.join(args.out, json_path or "report.json")
        csv_path = os.path.join(args.out, csv_path or "trace.csv")
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(payload)
        print(f"wrote {json_path}", file=sys.stderr)
    else:
        sys.stdout.write(payload)
    if csv_path:
        write_csv(csv_path, trace)
        print(f"wrote {csv_path}", file=sys.stderr)
    for r in results:
        print(f"{r.check}: {r.verdict}", file=sys.stderr)
    if args.timings:
        print(f"run took {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 0 if all(r.ok for r in results) else 1


def cmd_verify(args, parser) -> int:
    if not args.all:
        parser.error("verify needs --all (the suite runs as a whole)")
    results = acceptance.run_all()
    for r in results:
        print(r.line())
        if args.timings:
            print(f"  criterion {r.number} took {r.seconds:.2f}s",
                  file=sys.stderr)
    failed = [r.number for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""))
    return 0 if not failed else 1


def cmd_list(_args) -> int:
    print("presets:")
    for name in list_presets():
        print(f"  {name}")
    print("checks:")
    for name in list_checks():
        print(f"  {name}")
    return 0


def cmd_explain(args) -> int:
    print(explain(args.check))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadseq",
        description="run and verify directed sequences of monomial local "
                    "quadratic transforms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario and emit a report")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON scenario config file")
    src.add_argument("--preset", help="named preset scenario")
    run_p.add_argument("--steps", type=int, help="step/episode budget override")
    run_p.add_argument("--seed", type=int, help="seed override")
    run_p.add_argument("--out", help="directory for report.json and trace.csv")
    run_p.add_argument("--interval-width",
                       help="rational width for value enclosures, e.g. 1/1000000")
    run_p.add_argument("--checks",
                       help="comma-separated check ids, or \"all\" "
                            "(overrides the config)")
    run_p.add_argument("--timings", action="store_true",
                       help="print wall-clock timings to stderr")

    verify_p = sub.add_parser("verify", help="run the acceptance criteria")
    verify_p.add_argument("--all", action="store_true",
                          help="run the full suite")
    verify_p.add_argument("--timings", action="store_true",
                          help="print per-criterion timings to stderr")

    sub.add_parser("list", help="show available presets and checks")

    explain_p = sub.add_parser("explain", help="describe one check")
    explain_p.add_argument("check", help="check id, e.g. eq631")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args, parser)
        if args.command == "list":
            return cmd_list(args)
        return cmd_explain(args)
    except UnknownCheck as exc:
        print(f"unknown check: {exc.args[0]}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QuadseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
