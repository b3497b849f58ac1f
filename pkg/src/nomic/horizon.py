"""Brute-force verification engines and the sequential-measurement runner."""

from __future__ import annotations

import itertools
import os
import random
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .epistemic import all_epistemic_states
from .exactalg import Field, Matrix, Subspace
from .measurement import (
    Measurement,
    blocks,
    construct_measurement,
    copies,
    make_subject,
    measured_variable,
    standard_subject,
)
from .phasespace import (
    PhaseSpace,
    compose,
    coordinate_lagrangians,
    lagrangians,
    make_phase_space,
    project,
)
from .transform import AffineSymplectic, is_symplectic, lift
from .variable import (
    LinearVariable,
    NotPoisson,
    equivalent,
    is_poisson,
    linear_variables_up_to_equivalence,
    poisson_variables_up_to_equivalence,
)

TRANSVECTION_THRESHOLD = 10 ** 8


class Infeasible(ValueError):
    pass


# -- enumeration of Sp(2n, p) -------------------------------------------------


def _omega_rows(space: PhaseSpace) -> list:
    return [list(r) for r in space.omega.rows]


def _enumerate_naive(space: PhaseSpace) -> Iterator[Matrix]:
    F, d = space.field, space.dim
    for flat in itertools.product(F.elements(), repeat=d * d):
        M = Matrix(F, tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(d)), d)
        if is_symplectic(M, space.omega):
            yield M


def _enumerate_backtrack(space: PhaseSpace) -> Iterator[Matrix]:
    """Choose columns one at a time, keeping ``omega(c_i, c_j) = Omega_ij`` for placed pairs.

    This is the gate filter with pruning: a full assignment passes exactly
    when ``M^T Omega M = Omega``, and each matrix is reached once.
    """
    F, d, p = space.field, space.dim, space.field.p
    W = _omega_rows(space)
    vecs = list(F.vectors(d))
    # Omega v for each candidate, so omega(c, v) = c . (Omega v)
    wv = [[sum(W[i][k] * v[k] for k in range(d)) % p for i in range(d)] for v in vecs]
    cols: list = []
    cols_w: list = []

    def rec(j):
        if j == d:
            yield Matrix(F, tuple(tuple(c[i] for c in cols) for i in range(d)), d)
            return
        for v, ov in zip(vecs, wv):
            ok = True
            for i, c in enumerate(cols):
                if sum(a * b for a, b in zip(c, ov)) % p != W[i][j] % p:
                    ok = False
                    break
            if ok:
                cols.append(v)
                cols_w.append(ov)
                yield from rec(j + 1)
                cols.pop()
                cols_w.pop()

    yield from rec(0)


def transvection(space: PhaseSpace, u: Sequence, c) -> Matrix:
    """``x -> x + c omega(u, x) u``."""
    F, d = space.field, space.dim
    wu = [F(sum(u[k] * space.omega.rows[k][j] for k in range(d))) for j in range(d)]  # u^T Omega
    return Matrix(F, tuple(tuple(F((1 if i == j else 0) + c * u[i] * wu[j]) for j in range(d)) for i in range(d)), d)


def transvection_generators(space: PhaseSpace, scalars: Optional[Sequence] = None) -> list:
    """Transvections along ``e_i`` and ``e_i + e_j``; these generate Sp over any field."""
    F, d = space.field, space.dim
    if scalars is None:
        scalars = [c for c in F.elements() if c] if F.is_finite else [F(1), F(-1), F(2), F(Fraction(1, 2))]
    us = [tuple(1 if k == i else 0 for k in range(d)) for i in range(d)]
    us += [tuple(1 if k in (i, j) else 0 for k in range(d)) for i, j in itertools.combinations(range(d), 2)]
    gens = []
    for u in us:
        for c in scalars:
            T = transvection(space, u, c)
            if T not in gens and T != Matrix.identity(F, d):
                gens.append(T)
    return gens


def _enumerate_transvection(space: PhaseSpace) -> Iterator[Matrix]:
    """Orbit of the identity under left multiplication by transvections, with a visited set."""
    gens = transvection_generators(space)
    start = Matrix.identity(space.field, space.dim)
    seen = {start}
    queue = deque([start])
    while queue:
        M = queue.popleft()
        yield M
        for g in gens:
            N = g @ M
            if N not in seen:
                seen.add(N)
                queue.append(N)


def enumerate_symplectic(space: PhaseSpace, method: str = "auto", cap: int = 4) -> Iterator[Matrix]:
    """Every symplectic matrix on ``space`` exactly once (finite fields).

    ``method`` is ``naive`` (filter all matrices through the gate),
    ``backtrack`` (column-wise pruned filter) or ``transvection``
    (generator closure).  ``auto`` takes ``backtrack``, switching to
    ``transvection`` beyond 10^8 candidate matrices.
    """
    F = space.field
    if not F.is_finite:
        raise Infeasible("symplectic matrices over Q cannot be enumerated; use sample mode")
    if space.dim > cap:
        raise Infeasible(f"dimension {space.dim} exceeds the enumeration cap {cap}")
    candidates = F.p ** (space.dim ** 2)
    if method == "auto":
        method = "transvection" if candidates > TRANSVECTION_THRESHOLD else "backtrack"
    if method == "naive":
        if candidates > TRANSVECTION_THRESHOLD:
            raise Infeasible(f"{candidates} candidates is too many for the naive filter")
        return _enumerate_naive(space)
    if method == "backtrack":
        return _enumerate_backtrack(space)
    if method == "transvection":
        return _enumerate_transvection(space)
    raise ValueError(f"unknown enumeration method {method!r}")


def random_symplectic(space: PhaseSpace, rng: random.Random, word_length: int, gens: Optional[list] = None) -> Matrix:
    """A product of ``word_length`` generators drawn with ``rng``."""
    gens = gens if gens is not None else transvection_generators(space)
    M = Matrix.identity(space.field, space.dim)
    for _ in range(word_length):
        M = rng.choice(gens) @ M
    return M


# -- horizon verification -------------------------------------------------------


@dataclass
class HorizonReport:
    field: str
    n_S: int
    n_A: int
    mode: str
    method: str
    group_order: int
    lagrangians: int
    measurements_checked: int
    transpose_failures: list
    poisson_violations: list
    poisson_variables_checked: int
    construction_failures: list
    non_poisson_checked: int
    non_poisson_measurable_claims: list
    seed: Optional[int] = None
    samples: Optional[int] = None
    word_length: Optional[int] = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not (self.poisson_violations or self.construction_failures or self.non_poisson_measurable_claims or self.transpose_failures)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self, include_elapsed: bool = True) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        if not include_elapsed:
            d.pop("elapsed")
        return d


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NOMIC_THREADS", "1")))
    except ValueError:
        return 1


def _check_matrix(M: Matrix, obj: PhaseSpace, subjects: list, joint: PhaseSpace) -> tuple:
    """Part II for one matrix against every subject: returns (transpose_ok, violations)."""
    transpose_ok = is_symplectic(M.T, joint.omega)
    bad = []
    m = AffineSymplectic(joint, M, joint.zero_vector())
    for subj in subjects:
        meas = Measurement(obj, subj, subj.space.zero_vector(), m)
        mfs = blocks(meas).M_FS
        if not (mfs @ obj.omega @ mfs.T).is_zero():
            bad.append({"matrix": M.to_literal(), "Q": [list(map(obj.field.to_literal, v)) for v in subj.Q.vectors], "M_FS": mfs.to_literal()})
    return transpose_ok, bad


def _check_chunk(args) -> tuple:
    rows_list, field_p, n_S, n_A, q_bases = args
    F = Field(field_p)
    obj = make_phase_space(F, n_S, "S")
    A = make_phase_space(F, n_A, "A")
    joint = compose(obj, A)
    subjects = [make_subject(A, q) for q in q_bases]
    tfails, viols = [], []
    for rows in rows_list:
        M = Matrix(F, rows, joint.dim)
        ok, bad = _check_matrix(M, obj, subjects, joint)
        if not ok:
            tfails.append(M.to_literal())
        viols += bad
    return tfails, viols


def _part_one(obj: PhaseSpace, poisson_vars: Iterable, non_poisson_vars: Iterable) -> tuple:
    fails, claims = [], []
    n_ok = n_bad = 0
    for Z in poisson_vars:
        n_ok += 1
        try:
            meas = construct_measurement(obj, Z)
        except NotPoisson:
            fails.append({"Z": Z.Z.to_literal(), "reason": "rejected"})
            continue
        if not equivalent(measured_variable(meas), Z):
            fails.append({"Z": Z.Z.to_literal(), "reason": "measured variable not equivalent"})
    for Z in non_poisson_vars:
        n_bad += 1
        try:
            construct_measurement(obj, Z)
        except NotPoisson:
            continue
        claims.append({"Z": Z.Z.to_literal()})
    return n_ok, fails, n_bad, claims


def verify_horizon(field: Field, n_S: int = 1, n_A: int = 1, mode: str = "exhaustive", seed: Optional[int] = None,
                   samples: int = 200, word_length: int = 12, method: str = "auto", cap: int = 4) -> HorizonReport:
    """Check both directions of the measurable-iff-Poisson theorem on one instance.

    Exhaustive mode walks every symplectic matrix on ``S + A`` and every
    Lagrangian manifest subspace; sample mode draws seeded generator words.
    """
    t0 = time.perf_counter()
    obj = make_phase_space(field, n_S, "S")
    A = make_phase_space(field, n_A, "A")
    joint = compose(obj, A)
    if mode == "exhaustive":
        if not field.is_finite:
            raise Infeasible("exhaustive mode needs a finite field")
        Qs = lagrangians(A)
        subjects = [make_subject(A, q) for q in Qs]
        mats = list(enumerate_symplectic(joint, method, cap))
        used = method if method != "auto" else ("transvection" if field.p ** (joint.dim ** 2) > TRANSVECTION_THRESHOLD else "backtrack")
        threads = _threads()
        q_bases = [q.vectors for q in Qs]
        if threads > 1 and len(mats) > 1000:
            size = -(-len(mats) // (threads * 4))
            chunks = [([M.rows for M in mats[i:i + size]], field.p, n_S, n_A, q_bases) for i in range(0, len(mats), size)]
            with ProcessPoolExecutor(threads) as ex:
                results = list(ex.map(_check_chunk, chunks))
        else:
            results = [_check_chunk(([M.rows for M in mats], field.p, n_S, n_A, q_bases))]
        tfails = [t for r in results for t in r[0]]
        viols = [v for r in results for v in r[1]]
        pv = poisson_variables_up_to_equivalence(obj)
        npv = [Z for Z in linear_variables_up_to_equivalence(obj) if not is_poisson(Z)]
        n_ok, cfails, n_bad, claims = _part_one(obj, pv, npv)
        rep = HorizonReport(field.name, n_S, n_A, mode, used, len(mats), len(Qs), len(mats) * len(Qs),
                            sorted(tfails), sorted(viols, key=repr), n_ok, cfails, n_bad, claims)
    elif mode == "sample":
        if seed is None:
            raise ValueError("sample mode needs a seed")
        rng = random.Random(seed)
        gens_joint = transvection_generators(joint)
        gens_A = transvection_generators(A)
        gens_S = transvection_generators(obj)
        q_std = [A.basis_vector(f"q{i + 1}") for i in range(n_A)]
        Qs = list(coordinate_lagrangians(A))
        for _ in range(4):
            g = random_symplectic(A, rng, word_length, gens_A)
            Qs.append(Subspace.span(field, A.dim, [g @ q for q in q_std]))
        Qs = list(dict.fromkeys(Qs))
        subjects = [make_subject(A, q) for q in Qs]
        tfails, viols = [], []
        for _ in range(samples):
            M = random_symplectic(joint, rng, word_length, gens_joint)
            ok, bad = _check_matrix(M, obj, subjects, joint)
            if not ok:
                tfails.append(M.to_literal())
            viols += bad
        pv, npv = [], []
        q_S = [obj.basis_vector(f"q{i + 1}") for i in range(n_S)]
        p_S = [obj.basis_vector(f"p{i + 1}") for i in range(n_S)]
        for _ in range(max(1, samples // 10)):
            g = random_symplectic(obj, rng, word_length, gens_S)
            k = rng.randint(1, n_S)
            pv.append(LinearVariable(obj, Matrix(field, tuple(g @ q for q in q_S[:k]), obj.dim)))
            npv.append(LinearVariable(obj, Matrix(field, (g @ q_S[0], g @ p_S[0]), obj.dim)))
        n_ok, cfails, n_bad, claims = _part_one(obj, pv, npv)
        rep = HorizonReport(field.name, n_S, n_A, mode, "generator-words", samples, len(Qs), samples * len(Qs),
                            tfails, viols, n_ok, cfails, n_bad, claims, seed=seed, samples=samples, word_length=word_length)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep.elapsed = round(time.perf_counter() - t0, 3)
    return rep


# -- sequential measurement scenarios -------------------------------------------


class Symbolic:
    """Affine forms over named symbols, stored as coefficient tuples (symbols..., constant)."""

    def __init__(self, field: Field, symbols: Sequence[str]):
        self.field = field
        self.symbols = tuple(symbols)

    def parse(self, entry) -> tuple:
        F, k = self.field, len(self.symbols)
        if isinstance(entry, str) and entry.strip() in self.symbols:
            i = self.symbols.index(entry.strip())
            return tuple(F.one if j == i else F.zero for j in range(k)) + (F.zero,)
        return (F.zero,) * k + (F(entry),)

    def render(self, form: Sequence) -> str:
        F = self.field
        terms = []
        for s, c in zip(self.symbols + ("",), form):
            if c == 0:
                continue
            if not F.is_finite and c < 0:
                sign, mag = "-", -c
            else:
                sign, mag = "+", c
            body = s if (mag == 1 and s) else (f"{mag}{s}" if s else f"{mag}")
            terms.append((sign, body))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            out += sign + body
        return out


@dataclass
class Scenario:
    space: PhaseSpace
    subjects: dict  # factor name -> ToySubject on that factor
    steps: list  # (label, AffineSymplectic)
    initial: list  # entries: field literals or symbol names
    closed_forms: Optional[Callable] = None  # u(t0) -> [u(t1), u(t2), ...] for concrete checks


@dataclass
class ScenarioTrace:
    labels: list
    states: list
    pointer_readings: list  # per time: {subject: manifest value}
    disturbance_notes: list  # per step: {coordinate label: delta}
    symbols: tuple = ()

    def to_dict(self, field: Field) -> dict:
        lit = lambda x: x if isinstance(x, str) else field.to_literal(x)
        return {
            "symbols": list(self.symbols),
            "steps": self.labels,
            "states": [[lit(x) for x in s] for s in self.states],
            "pointer_readings": [{k: [lit(x) for x in v] for k, v in r.items()} for r in self.pointer_readings],
            "disturbance_notes": self.disturbance_notes,
        }


class ScenarioError(ValueError):
    def __init__(self, label: str, msg: str):
        super().__init__(f"step {label!r}: {msg}")
        self.label = label


def _is_symbolic(initial) -> bool:
    return any(isinstance(x, str) and x.strip() and (x.strip()[0].isalpha() or x.strip()[0] == "_") for x in initial)


def run_sequence(sc: Scenario) -> ScenarioTrace:
    """Replay the steps from the initial state, recording states, pointers and deltas.

    A symbolic initial state (entries naming symbols) is carried as affine
    forms and rendered as strings; a concrete one is carried exactly.
    """
    space, F = sc.space, sc.space.field
    for label, f in sc.steps:
        if f.space != space:
            raise ScenarioError(label, "transformation acts on a different space")
        if not is_symplectic(f.M, space.omega):
            raise ScenarioError(label, "transformation fails the symplectic gate")
    if len(sc.initial) != space.dim:
        raise ValueError(f"initial state has {len(sc.initial)} entries, space has dimension {space.dim}")
    if _is_symbolic(sc.initial):
        syms = [x.strip() for x in sc.initial if isinstance(x, str) and x.strip() and not _looks_numeric(x)]
        sym = Symbolic(F, syms)
        forms = [sym.parse(x) for x in sc.initial]
        k = len(syms) + 1
        L = Matrix(F, tuple(tuple(r) for r in forms), k)
        mats = [L]
        for label, f in sc.steps:
            prev = mats[-1]
            shifted = f.M @ prev
            rows = tuple(r[:-1] + (F(r[-1] + c),) for r, c in zip(shifted.rows, f.v))
            mats.append(Matrix(F, rows, k))
        states = [tuple(sym.render(r) for r in m.rows) for m in mats]
        readings = []
        for m in mats:
            rd = {}
            for name, subj in sc.subjects.items():
                block = Matrix(F, tuple(m.rows[i] for i in space.factor(name).indices), k)
                rd[name] = tuple(sym.render(r) for r in (subj.manifest.Z @ block).rows)
            readings.append(rd)
        notes = []
        for a, b in zip(mats, mats[1:]):
            notes.append({space.labels[i]: sym.render(tuple(F(y - x) for x, y in zip(ra, rb)))
                          for i, (ra, rb) in enumerate(zip(a.rows, b.rows)) if ra != rb})
        return ScenarioTrace([l for l, _ in sc.steps], states, readings, notes, tuple(syms))
    x = space.vector(sc.initial)
    states = [x]
    for label, f in sc.steps:
        states.append(f(states[-1]))
    readings = [{name: subj.manifest(project(space, name, s)) for name, subj in sc.subjects.items()} for s in states]
    notes = [{space.labels[i]: F.to_literal(F(b - a)) for i, (a, b) in enumerate(zip(s0, s1)) if a != b}
             for s0, s1 in zip(states, states[1:])]
    if sc.closed_forms is not None:
        expected = sc.closed_forms(x)
        for t, (got, want) in enumerate(zip(states[1:], expected), start=1):
            if tuple(got) != tuple(want):
                raise ScenarioError(sc.steps[t - 1][0], f"state {got} differs from closed form {want}")
    return ScenarioTrace([l for l, _ in sc.steps], states, readings, notes)


def _looks_numeric(x: str) -> bool:
    try:
        Fraction(x.strip())
        return True
    except ValueError:
        return False


def appendix_a_closed_forms(field: Field, u: Sequence) -> list:
    """``u(t1)`` and ``u(t2)`` for the momentum-then-position sequence on ``A1 + S + A2``."""
    u1, u2, u3, u4, u5, u6 = u
    t1 = (u1 + u4, u2, u2 + u3, u4, u5, u6)
    t2 = (u1 + u4, u2, u2 + u3, u4 - u6, u2 + u3 + u5, u6)
    return [tuple(field(x) for x in t1), tuple(field(x) for x in t2)]


def appendix_a_scenario(field: Field, initial: Optional[Sequence] = None) -> Scenario:
    """``A1`` measures the momentum of ``S``, then ``A2`` measures its position."""
    S = make_phase_space(field, 1, "S")
    A1 = make_phase_space(field, 1, "A1")
    A2 = make_phase_space(field, 1, "A2")
    joint = compose(A1, S, A2)
    m_p = construct_measurement(S, [[0, 1]], subject_name="A1")
    m_q = construct_measurement(S, [[1, 0]], subject_name="A2")
    steps = [("m_p", lift(joint, ["S", "A1"], m_p.m)), ("m_q", lift(joint, ["S", "A2"], m_q.m))]
    subjects = {"A1": m_p.subject, "A2": m_q.subject}
    if initial is None:
        initial = [f"u{i}" for i in range(1, 7)]
    return Scenario(joint, subjects, steps, list(initial), closed_forms=lambda u: appendix_a_closed_forms(field, u))


def determines(points: Iterable, key: Callable, target: Callable) -> tuple:
    """Whether ``target(x)`` is a function of ``key(x)`` over ``points``; witness pair if not."""
    seen = {}
    for x in points:
        k, t = key(x), target(x)
        if k in seen and seen[k][0] != t:
            return False, (seen[k][1], x)
        seen.setdefault(k, (t, x))
    return True, None


def disturbance_claims(field: Field) -> dict:
    """Exhaustive check of what the two pointers at ``t2`` reveal about ``S`` (ready values zero).

    Returns ``{"t0": (determined, witness), "t1": ..., "t2": ...}``.
    """
    sc = appendix_a_scenario(field)
    space = sc.space
    (_, mp), (_, mq) = sc.steps
    ready = [u for u in space.states() if u[0] == 0 and u[4] == 0]
    runs = []
    for u in ready:
        t1 = mp(u)
        t2 = mq(t1)
        runs.append((u, t1, t2))
    pointers = lambda r: (sc.subjects["A1"].manifest(project(space, "A1", r[2])), sc.subjects["A2"].manifest(project(space, "A2", r[2])))
    return {
        f"t{t}": determines(runs, pointers, lambda r, t=t: project(space, "S", r[t]))
        for t in range(3)
    }


# -- copier search -----------------------------------------------------------


def search_copier(space: PhaseSpace, Z, cap: int = 4, shifts: bool = True) -> Optional[tuple]:
    """Exhaustive search for ``(f, ready_state)`` copying ``Z``; ``None`` proves none exists.

    Walks every affine symplectic map on ``V + V`` (identity first) and every
    epistemic state of ``V`` as the blank copy's ready state.
    """
    if not space.field.is_finite:
        raise Infeasible("copier search needs a finite field")
    if not isinstance(Z, LinearVariable):
        from .variable import make_variable

        Z = make_variable(space, Z)
    joint = compose(space, space)
    states = list(all_epistemic_states(space))
    I = Matrix.identity(space.field, joint.dim)
    mats = itertools.chain([I], (M for M in enumerate_symplectic(joint, cap=cap) if M != I))
    vs = list(joint.states()) if shifts else [joint.zero_vector()]
    for M in mats:
        for v in vs:
            f = AffineSymplectic(joint, M, v)
            for e in states:
                if copies(space, Z, f, e) is None:
                    return f, e
    return None


def search_preparation(field: Field, n_S: int = 1, n_A: int = 1) -> list:
    """Measurements after which the object's ontic state no longer depends on its input.

    Hook for the suspected preparation no-go: returns every symplectic ``M``
    on ``S + A`` (standard subject, ready value 0) whose object output is the
    same for all object inputs and subject momenta.  No claim is attached.
    """
    S = make_phase_space(field, n_S, "S")
    subj = standard_subject(field, n_A)
    joint = compose(S, subj.space)
    out = []
    inputs = [s + p for s in S.states() for p in subj.P.elements()]
    for M in enumerate_symplectic(joint):
        outs = {tuple((M @ x)[:S.dim]) for x in inputs}
        if len(outs) == 1:
            out.append(M)
    return out
