"""Command-line interface.

Exit codes: 0 success, 1 usage error or infeasible request, 2 mathematical
failure (the output then carries a witness).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import io
from .epistemic import marginal
from .exactalg import DimensionError, Field, FieldError, Matrix, Subspace
from .horizon import Infeasible, ScenarioError, appendix_a_scenario, run_sequence, verify_horizon
from .measurement import construct_measurement, measured_variable
from .phasespace import classify_subspace, make_phase_space
from .transform import NotSymplectic, symplectic_defect
from .variable import NotPoisson

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2


class UsageError(Exception):
    pass


def _field(name: Optional[str]) -> Optional[Field]:
    if name is None:
        return None
    try:
        return Field.from_name(name)
    except (FieldError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _load(path):
    try:
        return io.read_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _emit(args, payload: dict, text: Optional[str] = None) -> None:
    out = io.dumps(payload) if args.format == "json" or text is None else text.rstrip("\n") + "\n"
    if getattr(args, "output", None):
        io.write_atomic(args.output, out)
    else:
        sys.stdout.write(out)


# -- commands ------------------------------------------------------------------


def cmd_verify_horizon(args) -> int:
    field = _field(args.field)
    if args.mode == "sample" and args.seed is None:
        raise UsageError("--seed is required with --mode sample")
    try:
        rep = verify_horizon(field, args.ns, args.na, args.mode, seed=args.seed, samples=args.samples,
                             word_length=args.word_length, cap=args.cap)
    except Infeasible as exc:
        raise UsageError(f"infeasible sweep: {exc}") from None
    d = rep.to_dict()
    text = "\n".join(f"{k}: {v}" for k, v in d.items())
    _emit(args, d, text)
    return EXIT_OK if rep.passed else EXIT_MATH


def _trace_payload(sc, field, tr) -> dict:
    return {"scenario": io.scenario_to_json(sc), "trace": tr.to_dict(field)}


def _trace_text(tr, field) -> str:
    d = tr.to_dict(field)
    lines = []
    for t, (s, r) in enumerate(zip(d["states"], d["pointer_readings"])):
        head = "t0" if t == 0 else f"t{t} after {d['steps'][t - 1]}"
        lines.append(f"{head}: state=({', '.join(map(str, s))}) pointers={r}")
        if t:
            lines.append(f"  disturbed: {d['disturbance_notes'][t - 1]}")
    return "\n".join(lines)


def cmd_run_scenario(args) -> int:
    field = _field(args.field)
    if args.builtin:
        if args.builtin != "appendix-a":
            raise UsageError(f"unknown builtin scenario {args.builtin!r}")
        field = field or Field.prime(2)
        if args.all_initial:
            if not field.is_finite:
                raise UsageError("--all-initial needs a finite field")
            sc = appendix_a_scenario(field)
            traces = []
            for u in sc.space.states():
                sc_u = appendix_a_scenario(field, list(u))
                traces.append(run_sequence(sc_u).to_dict(field))
            _emit(args, {"scenario": io.scenario_to_json(sc), "count": len(traces), "closed_forms_ok": True, "traces": traces},
                  f"{len(traces)} traces, all matching the closed forms")
            return EXIT_OK
        initial = _parse_initial(args.initial) if args.initial else None
        sc = appendix_a_scenario(field, initial)
    else:
        if not args.file:
            raise UsageError("give a scenario file or --builtin")
        try:
            sc = io.scenario_from_json(_load(args.file), field)
        except ScenarioError as exc:
            _emit(args, {"error": "gate", "step": exc.label, "message": str(exc)}, str(exc))
            return EXIT_MATH
        if args.initial:
            sc.initial = _parse_initial(args.initial)
    try:
        tr = run_sequence(sc)
    except ScenarioError as exc:
        _emit(args, {"error": "gate", "step": exc.label, "message": str(exc)}, str(exc))
        return EXIT_MATH
    _emit(args, _trace_payload(sc, sc.space.field, tr), _trace_text(tr, sc.space.field))
    return EXIT_OK


def _parse_initial(s: str) -> list:
    return [x.strip() for x in s.split(",")]


def cmd_build_measurement(args) -> int:
    d = _load(args.file)
    v = io.variable_from_json(d, io.space_from_json(d["space"], _field(args.field)) if "space" in d else None)
    try:
        meas = construct_measurement(v.space, v.Z, subject_name=args.subject)
    except NotPoisson as exc:
        F = v.space.field
        i, j = exc.witness
        _emit(args, {"error": "not-poisson", "witness": {"rows": [i, j], "bracket": F.to_literal(exc.bracket)}}, str(exc))
        return EXIT_MATH
    payload = io.measurement_to_json(meas)
    payload["measured_variable"] = measured_variable(meas).Z.to_literal()
    text = "\n".join(" ".join(f"{x:>4}" for x in r) for r in payload["transform"]["matrix"])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_marginalize(args) -> int:
    try:
        e = io.state_from_json(_load(args.file))
    except (io.FormatError, DimensionError, FieldError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed state file: {exc}") from None
    try:
        e.space.factor(args.factor)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    m = marginal(e, args.factor)
    _emit(args, io.state_to_json(m), f"known={m.known} value_point={m.a}")
    return EXIT_OK


def cmd_check_symplectic(args) -> int:
    d = _load(args.file)
    field = _field(args.field)
    if "space" in d:
        space = io.space_from_json(d["space"], field)
    else:
        lit = d["matrix"]
        if field is None:
            raise UsageError("matrix file has no space; pass --field")
        if len(lit) % 2:
            raise UsageError("a symplectic matrix has even size")
        space = make_phase_space(field, len(lit) // 2)
    M = Matrix.from_literal(space.field, d["matrix"], space.dim)
    defect = symplectic_defect(M, space.omega)
    if defect is None:
        _emit(args, {"symplectic": True}, "symplectic")
        return EXIT_OK
    (i, j), val = defect
    _emit(args, {"symplectic": False, "witness": {"entry": [i, j], "value": space.field.to_literal(val)}},
          f"not symplectic: entry ({i}, {j}) of M^T Omega M - Omega is {val}")
    return EXIT_MATH


def cmd_classify_subspace(args) -> int:
    d = _load(args.file)
    space = io.space_from_json(d["space"], _field(args.field))
    vecs = [io.vector_from_json(space, r) for r in d["basis"]]
    kind = classify_subspace(space, Subspace.span(space.field, space.dim, vecs))
    _emit(args, {"kind": kind.value}, kind.value)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nomic", description="Exact toy-theory measurement tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="write here (atomically) instead of stdout")
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--field", help="z2, z3, ..., or q")

    p = sub.add_parser("verify-horizon", help="check measurable <=> Poisson on one instance")
    common(p)
    p.add_argument("--ns", type=int, default=1)
    p.add_argument("--na", type=int, default=1)
    p.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--word-length", type=int, default=12)
    p.add_argument("--cap", type=int, default=4, help="largest joint dimension for exhaustive enumeration")
    p.set_defaults(func=cmd_verify_horizon, field="z2")

    p = sub.add_parser("run-scenario", help="run a sequence of measurements")
    common(p)
    p.add_argument("file", nargs="?")
    p.add_argument("--builtin", choices=["appendix-a"])
    p.add_argument("--all-initial", action="store_true")
    p.add_argument("--initial", help="comma-separated values or symbol names")
    p.set_defaults(func=cmd_run_scenario)

    p = sub.add_parser("build-measurement", help="construct a measurement of a Poisson variable")
    common(p)
    p.add_argument("file")
    p.add_argument("--subject", default="A")
    p.set_defaults(func=cmd_build_measurement)

    p = sub.add_parser("marginalize", help="marginal of an epistemic state")
    common(p)
    p.add_argument("file")
    p.add_argument("--factor", required=True)
    p.set_defaults(func=cmd_marginalize)

    p = sub.add_parser("check-symplectic", help="gate a matrix file")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_check_symplectic)

    p = sub.add_parser("classify-subspace", help="isotropic / Lagrangian / symplectic / neither")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_classify_subspace)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nomic: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.FormatError, DimensionError, FieldError, KeyError) as exc:
        print(f"nomic: bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotSymplectic as exc:
        print(f"nomic: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
