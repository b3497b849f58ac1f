"""JSON interchange: spaces, transforms, states, variables, measurements, scenarios."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .epistemic import EpistemicState, make_epistemic
from .exactalg import DimensionError, Field, Matrix, Subspace
from .horizon import Scenario
from .measurement import Measurement, make_measurement, make_subject
from .phasespace import PhaseSpace, compose, factor_space, make_phase_space
from .transform import AffineSymplectic, make_affine_symplectic
from .variable import LinearVariable, make_variable


class FormatError(ValueError):
    pass


def _need(d, key):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"missing key {key!r}")
    return d[key]


# -- spaces ----------------------------------------------------------------------


def space_to_json(space: PhaseSpace) -> dict:
    if space.is_atomic:
        f = space.layout[0]
        return {"field": space.field.name, "n": space.n, "name": f.name}
    return {"field": space.field.name,
            "compose": [{"field": space.field.name, "n": f.n, "name": f.name} for f in space.layout]}


def space_from_json(d, field: Optional[Field] = None) -> PhaseSpace:
    """``{"field", "n"[, "name"]}`` or ``{"compose": [...]}``; ``field`` overrides the file."""
    if not isinstance(d, dict):
        raise FormatError("space descriptor must be an object")
    if field is None and "field" in d:
        field = Field.from_name(d["field"])
    if "compose" in d:
        parts = d["compose"]
        if not isinstance(parts, list) or not parts:
            raise FormatError("compose needs a non-empty list")
        return compose(*(space_from_json(p, field) for p in parts))
    if field is None:
        raise FormatError("space descriptor has no field")
    n = _need(d, "n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise FormatError("n must be an integer")
    return make_phase_space(field, n, d.get("name", "V"))


# -- transforms, states, variables ----------------------------------------------------


def vector_from_json(space: PhaseSpace, lit) -> tuple:
    if not isinstance(lit, list):
        raise FormatError("vector literal must be a list")
    return space.vector(space.field.from_literal(x) for x in lit)


def transform_to_json(f: AffineSymplectic) -> dict:
    return {"matrix": f.M.to_literal(), "shift": [f.space.field.to_literal(x) for x in f.v]}


def transform_from_json(space: PhaseSpace, d) -> AffineSymplectic:
    """Parses and gates; raises ``NotSymplectic`` for a bad matrix."""
    M = Matrix.from_literal(space.field, _need(d, "matrix"), space.dim)
    v = vector_from_json(space, d["shift"]) if d.get("shift") is not None else None
    return make_affine_symplectic(space, M, v)


def state_to_json(e: EpistemicState) -> dict:
    F = e.space.field
    return {"space": space_to_json(e.space), "known": [[F.to_literal(x) for x in u] for u in e.known],
            "value_point": [F.to_literal(x) for x in e.a]}


def state_from_json(d, space: Optional[PhaseSpace] = None) -> EpistemicState:
    if space is None:
        space = space_from_json(_need(d, "space"))
    known = _need(d, "known")
    if not isinstance(known, list):
        raise FormatError("known must be a list of rows")
    rows = [vector_from_json(space, r) for r in known]
    return make_epistemic(space, Subspace.span(space.field, space.dim, rows), vector_from_json(space, _need(d, "value_point")))


def variable_to_json(v: LinearVariable) -> dict:
    return {"space": space_to_json(v.space), "rows": v.Z.to_literal()}


def variable_from_json(d, space: Optional[PhaseSpace] = None) -> LinearVariable:
    if space is None:
        space = space_from_json(_need(d, "space"))
    rows = _need(d, "rows")
    return make_variable(space, Matrix.from_literal(space.field, rows, space.dim))


def measurement_to_json(meas: Measurement) -> dict:
    F = meas.object.field
    return {
        "object": space_to_json(meas.object),
        "subject": {"space": space_to_json(meas.subject.space), "Q": [[F.to_literal(x) for x in q] for q in meas.subject.Q.vectors],
                    "P": [[F.to_literal(x) for x in p] for p in meas.subject.P.vectors]},
        "ready_q": [F.to_literal(x) for x in meas.ready_q],
        "transform": transform_to_json(meas.m),
    }


def measurement_from_json(d) -> Measurement:
    obj = space_from_json(_need(d, "object"))
    sd = _need(d, "subject")
    sspace = space_from_json(_need(sd, "space"))
    Q = [vector_from_json(sspace, r) for r in _need(sd, "Q")]
    P = [vector_from_json(sspace, r) for r in sd["P"]] if "P" in sd else None
    subj = make_subject(sspace, Q, P)
    joint = compose(obj, sspace)
    m = transform_from_json(joint, _need(d, "transform"))
    ready = vector_from_json(sspace, d["ready_q"]) if "ready_q" in d else None
    return make_measurement(obj, subj, m, ready)


# -- scenarios -----------------------------------------------------------------


def scenario_to_json(sc: Scenario) -> dict:
    F = sc.space.field
    subjects = [{"factor": name, "Q": [[F.to_literal(x) for x in q] for q in s.Q.vectors]} for name, s in sc.subjects.items()]
    return {
        "space": space_to_json(sc.space),
        "subjects": subjects,
        "initial": [x if isinstance(x, str) else F.to_literal(F(x)) for x in sc.initial],
        "steps": [{"label": label, "transform": transform_to_json(f)} for label, f in sc.steps],
    }


def scenario_from_json(d, field: Optional[Field] = None) -> Scenario:
    """Steps are gated as they are parsed; a failure carries the step label."""
    from .horizon import ScenarioError
    from .transform import NotSymplectic

    space = space_from_json(_need(d, "space"), field)
    subjects = {}
    for s in _need(d, "subjects"):
        name = s if isinstance(s, str) else _need(s, "factor")
        sub = factor_space(space, name)
        Q = [vector_from_json(sub, r) for r in s["Q"]] if isinstance(s, dict) and "Q" in s else \
            [sub.basis_vector(f"q{i + 1}") for i in range(sub.n)]
        subjects[name] = make_subject(sub, Q)
    steps = []
    for st in _need(d, "steps"):
        label = str(_need(st, "label"))
        try:
            steps.append((label, transform_from_json(space, _need(st, "transform"))))
        except (NotSymplectic, DimensionError) as exc:
            raise ScenarioError(label, str(exc)) from None
    initial = _need(d, "initial")
    if not isinstance(initial, list):
        raise FormatError("initial must be a list")
    return Scenario(space, subjects, steps, initial)


# -- files ---------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
