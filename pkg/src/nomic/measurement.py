"""Toy subjects and measurement interactions.

A measurement acts on ``S + A``.  Its matrix is read in the adapted basis
``S + Q + P`` of the subject, and refined to ``S + F + C + P`` where ``C`` is
the part of the manifest value that depends on the subject's unknown initial
momentum and ``F`` the part that does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .epistemic import EpistemicState, make_epistemic
from .exactalg import (
    DimensionError,
    FieldError,
    Matrix,
    Subspace,
    Vector,
    image,
    intersection,
    orthogonal_complement,
    solve,
    vadd,
    vsub,
)
from .phasespace import (
    PhaseSpace,
    Kind,
    classify_subspace,
    compose,
    lagrangian_complement,
    make_phase_space,
)
from .transform import AffineSymplectic, NotSymplectic, make_affine_symplectic
from .variable import LinearVariable, NotPoisson, make_variable, poisson_witness


class NotLagrangian(ValueError):
    pass


def _columns(field, vectors, nrows) -> Matrix:
    return Matrix.from_columns(field, list(vectors), nrows)


@dataclass(frozen=True)
class ToySubject:
    """A toy system with a Lagrangian manifest subspace ``Q`` and a complement ``P``.

    ``manifest`` maps a subject state to the coordinates of its ``Q`` part
    (projection along ``P``) in ``Q``'s canonical basis.
    """

    space: PhaseSpace
    Q: Subspace
    P: Subspace
    manifest: LinearVariable

    @property
    def n(self) -> int:
        return self.space.n

    def adapted_basis(self) -> Matrix:
        """Columns: ``Q`` basis then ``P`` basis."""
        return _columns(self.space.field, self.Q.vectors + self.P.vectors, self.space.dim)

    def split(self, x: Sequence) -> tuple:
        """``(q, p)`` coordinates of a subject state in the adapted basis."""
        c = solve(self.adapted_basis(), tuple(x))
        return c[: self.Q.dim], c[self.Q.dim:]


def make_subject(space: PhaseSpace, Q, P=None) -> ToySubject:
    """``Q`` must be Lagrangian; ``P`` defaults to :func:`lagrangian_complement`."""
    F = space.field
    if not isinstance(Q, Subspace):
        Q = Subspace.span(F, space.dim, Q)
    if Q.ambient != space.dim:
        raise DimensionError(f"Q lives in dimension {Q.ambient}, subject has dimension {space.dim}")
    kind = classify_subspace(space, Q)
    if kind is not Kind.LAGRANGIAN:
        raise NotLagrangian(f"manifest subspace is {kind.value}, not Lagrangian (dim {Q.dim}, need {space.n})")
    if P is None:
        P = lagrangian_complement(space, Q)
    elif not isinstance(P, Subspace):
        P = Subspace.span(F, space.dim, P)
    if P.dim != space.n or intersection(P, Q).dim != 0:
        raise ValueError("P is not a complement of Q")
    T = _columns(F, Q.vectors + P.vectors, space.dim)
    manifest = make_variable(space, T.inverse().take(range(space.n), range(space.dim)))
    return ToySubject(space, Q, P, manifest)


def standard_subject(field, n: int = 1, name: str = "A") -> ToySubject:
    """Subject whose manifest variable is its position ``span{q_1..q_n}``."""
    space = make_phase_space(field, n, name)
    return make_subject(space, [space.basis_vector(f"q{i + 1}") for i in range(n)])


@dataclass(frozen=True)
class Measurement:
    object: PhaseSpace
    subject: ToySubject
    ready_q: Vector
    m: AffineSymplectic

    @property
    def joint(self) -> PhaseSpace:
        return self.m.space

    def pointer(self, x) -> tuple:
        """Manifest value of the subject after ``m`` acts on the joint state ``x``."""
        y = self.m(x)
        return self.subject.manifest(y[self.object.dim:])


def joint_space(obj: PhaseSpace, subject: ToySubject) -> PhaseSpace:
    return compose(obj, subject.space)


def make_measurement(obj: PhaseSpace, subject: ToySubject, m, ready_q: Sequence = None, shift: Sequence = None) -> Measurement:
    joint = joint_space(obj, subject)
    if not isinstance(m, AffineSymplectic):
        m = make_affine_symplectic(joint, m, shift)
    elif m.space.dim != joint.dim or m.space.field != joint.field:
        raise DimensionError("transformation does not act on object + subject")
    elif m.space != joint:
        m = AffineSymplectic(joint, m.M, m.v)
    if ready_q is None:
        ready_q = subject.space.zero_vector()
    else:
        ready_q = subject.space.vector(ready_q)
        if ready_q not in subject.Q:
            raise ValueError("ready value must lie in the manifest subspace Q")
    return Measurement(obj, subject, ready_q, m)


# -- block structure ---------------------------------------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    """The measurement matrix in the ``S + F + C + P`` basis.

    ``block("Q", "P")`` and friends read the coarse ``S + Q + P`` blocks;
    ``F``/``C`` blocks come from the refined basis.  ``F_basis`` and
    ``C_basis`` are in ``Q`` coordinates.
    """

    coarse: Matrix
    refined: Matrix
    dims: dict
    F_basis: tuple
    C_basis: tuple
    to_FC: Matrix  # Q coordinates -> (F, C) coordinates

    def _ranges(self, refined: bool) -> dict:
        s, q, f = self.dims["S"], self.dims["Q"], self.dims["F"]
        if refined:
            return {"S": range(0, s), "F": range(s, s + f), "C": range(s + f, s + q), "P": range(s + q, s + 2 * q)}
        return {"S": range(0, s), "Q": range(s, s + q), "P": range(s + q, s + 2 * q)}

    def block(self, row: str, col: str) -> Matrix:
        if row in "FC" or col in "FC":
            r = self._ranges(True)
            return self.refined.take(r[row], r[col])
        r = self._ranges(False)
        return self.coarse.take(r[row], r[col])

    def __getattr__(self, name):
        # M_QP, M_FS, ...
        if name.startswith("M_") and len(name) == 4:
            return self.block(name[2], name[3])
        raise AttributeError(name)

    def reassemble(self) -> Matrix:
        names = ["S", "Q", "P"]
        return Matrix.block([[self.block(a, b) for b in names] for a in names])


def _complement_in_coords(C: Subspace) -> list:
    """Complement of ``C`` inside F^k: orthogonal over Q, pivot-free unit vectors over Z_p."""
    F, k = C.field, C.ambient
    if not F.is_finite:
        return list(orthogonal_complement(C).vectors)
    return [tuple(F.one if j == i else F.zero for j in range(k)) for i in range(k) if i not in C.pivots]


def blocks(meas: Measurement) -> BlockDecomposition:
    subj, obj = meas.subject, meas.object
    fld = obj.field
    ds, nq = obj.dim, subj.n
    T = Matrix.block_diag(Matrix.identity(fld, ds), subj.adapted_basis())
    coarse = T.inverse() @ meas.m.M @ T
    M_QP = coarse.take(range(ds, ds + nq), range(ds + nq, ds + 2 * nq))
    C = image(M_QP)
    if fld.is_finite:
        Fvecs = _complement_in_coords(C)
    else:
        # orthogonal complement of im(M_QP) within Q, using the inner product of A
        QB = _columns(fld, subj.Q.vectors, subj.space.dim)
        C_A = Subspace.span(fld, subj.space.dim, [QB @ c for c in C.vectors])
        F_A = intersection(orthogonal_complement(C_A), subj.Q)
        Fvecs = [subj.Q.coordinates(v) for v in F_A.vectors]
    R = _columns(fld, list(Fvecs) + list(C.vectors), nq) if nq else Matrix.identity(fld, 0)
    Rinv = R.inverse()
    T2 = Matrix.block_diag(Matrix.identity(fld, ds), R, Matrix.identity(fld, nq))
    refined = T2.inverse() @ coarse @ T2
    dims = {"S": ds, "Q": nq, "F": len(Fvecs), "C": C.dim}
    return BlockDecomposition(coarse, refined, dims, tuple(Fvecs), C.vectors, Rinv)


@dataclass(frozen=True)
class ManifestSplit:
    F: LinearVariable
    C: LinearVariable


def manifest_split(meas: Measurement, bd: Optional[BlockDecomposition] = None) -> ManifestSplit:
    """Free and contingent manifest variables, as maps on the subject's space."""
    bd = bd or blocks(meas)
    subj = meas.subject
    f = bd.dims["F"]
    rows = (bd.to_FC @ subj.manifest.Z).rows
    dim = subj.space.dim
    return ManifestSplit(
        F=make_variable(subj.space, Matrix(subj.space.field, rows[:f], dim)),
        C=make_variable(subj.space, Matrix(subj.space.field, rows[f:], dim)),
    )


def measured_variable(meas: Measurement, bd: Optional[BlockDecomposition] = None) -> LinearVariable:
    """``M_FS``: object state -> free manifest value."""
    bd = bd or blocks(meas)
    return make_variable(meas.object, bd.M_FS)


# -- fixed variables ----------------------------------------------------------


@dataclass(frozen=True)
class Extractor:
    """Read ``Z(s)`` off the post-measurement manifest value ``q``.

    ``q -> E (F(q) - offset)`` where ``F`` projects manifest coordinates onto
    the free part and ``offset`` absorbs the ready value and affine shift.
    """

    E: Matrix
    to_F: Matrix
    offset: Vector

    def __call__(self, q: Sequence) -> tuple:
        fld = self.E.field
        return self.E @ vsub(fld, self.to_F @ tuple(q), self.offset)


@dataclass(frozen=True)
class FixedVerdict:
    fixed: bool
    extractor: Optional[Extractor] = None
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.fixed


def _free_offset(meas: Measurement, bd: BlockDecomposition) -> Vector:
    ds = meas.object.dim
    origin = meas.object.zero_vector() + meas.ready_q
    q = meas.subject.manifest(meas.m(origin)[ds:])
    return bd.to_FC.take(range(bd.dims["F"]), range(bd.dims["Q"])) @ q


def is_fixed(meas: Measurement, Z) -> FixedVerdict:
    """Whether ``Z`` can be read off the pointer, by factoring through ``M_FS``."""
    bd = blocks(meas)
    mfs = bd.M_FS
    to_F = bd.to_FC.take(range(bd.dims["F"]), range(bd.dims["Q"]))
    offset = _free_offset(meas, bd)
    if isinstance(Z, LinearVariable):
        if Z.space != meas.object:
            raise DimensionError("variable is not defined on the measured object")
        E_rows = []
        for zrow in Z.rows:
            e = solve(mfs.T, zrow)
            if e is None:
                return FixedVerdict(False)
            E_rows.append(e)
        E = Matrix(Z.space.field, tuple(E_rows), mfs.nrows)
        return FixedVerdict(True, Extractor(E, to_F, offset))
    # general variable: constant on every fiber of M_FS
    if not meas.object.field.is_finite:
        raise FieldError("general variables need a finite field")
    seen = {}
    for s in meas.object.states():
        key = mfs @ s
        if key in seen and Z(seen[key]) != Z(s):
            return FixedVerdict(False, witness=(seen[key], s))
        seen.setdefault(key, s)
    return FixedVerdict(True)


def fixed_oracle(meas: Measurement, Z) -> FixedVerdict:
    """Definitional check: pointer value after ``m`` determines ``Z(s)`` for every ``s`` and momentum ``p``."""
    obj, subj = meas.object, meas.subject
    fld = obj.field
    if not fld.is_finite:
        raise FieldError("the enumeration oracle needs a finite field")
    table = {}
    for s in obj.states():
        zs = Z(s)
        for p in subj.P.elements():
            x = s + vadd(fld, meas.ready_q, p)
            q = meas.pointer(x)
            if q in table and table[q][0] != zs:
                return FixedVerdict(False, witness=(table[q][1], x))
            table.setdefault(q, (zs, x))
    return FixedVerdict(True)


# -- constructions -------------------------------------------------------------


def construct_measurement(obj: PhaseSpace, Z, subject_name: str = "A") -> Measurement:
    """The measurement ``[[1, 0, Omega_S Z^T], [Z, 1, 0], [0, 0, 1]]`` of a Poisson variable.

    The subject has one degree of freedom per row of ``Z`` and its position as
    manifest variable.  A zero-row ``Z`` gets one zero row, so the subject is
    never empty.
    """
    if not isinstance(Z, LinearVariable):
        Z = make_variable(obj, Z)
    fld = obj.field
    w = poisson_witness(Z)
    if w is not None:
        raise NotPoisson(*w)
    Zm = Z.Z if Z.Z.nrows else Matrix.zeros(fld, 1, obj.dim)
    k = Zm.nrows
    subject = standard_subject(fld, k, subject_name)
    I_s, I_k = Matrix.identity(fld, obj.dim), Matrix.identity(fld, k)
    M = Matrix.block([
        [I_s, Matrix.zeros(fld, obj.dim, k), obj.omega @ Zm.T],
        [Zm, I_k, Matrix.zeros(fld, k, k)],
        [Matrix.zeros(fld, k, obj.dim), Matrix.zeros(fld, k, k), I_k],
    ])
    try:
        return make_measurement(obj, subject, M)
    except NotSymplectic as exc:  # pragma: no cover - excluded by the Poisson check
        raise NotPoisson((0, 0), exc.value) from exc


def isotropic_dual(space: PhaseSpace, R: Matrix) -> list:
    """Vectors ``b_j`` with ``<r_i, b_j> = delta_ij`` and ``omega(b_i, b_j) = 0``.

    Needs the rows of ``R`` independent and spanning an isotropic subspace.
    """
    fld = space.field
    bs = []
    for j in range(R.nrows):
        cons = list(R.rows) + [tuple(space.omega.T @ b) for b in bs]
        rhs = [fld.one if i == j else fld.zero for i in range(R.nrows)] + [fld.zero] * len(bs)
        b = solve(Matrix(fld, tuple(cons), space.dim), rhs)
        if b is None:
            raise ValueError("rows are not independent and isotropic")
        bs.append(b)
    return bs


def construct_copier(space: PhaseSpace, Z) -> AffineSymplectic:
    """A reversible map on ``V + V`` copying ``Z`` from the first copy into the second.

    ``(v, x) -> (v + Omega G^T Omega x, x + G v)`` with ``G = B R``, where ``R``
    is a row basis of ``Z`` and ``B`` an isotropic dual basis, so ``Z G = Z``.
    The second copy must start in the ready state :func:`copier_ready_state`.
    """
    if not isinstance(Z, LinearVariable):
        Z = make_variable(space, Z)
    w = poisson_witness(Z)
    if w is not None:
        raise NotPoisson(*w)
    fld = space.field
    R = Z.row_space().basis
    if R.nrows:
        B = _columns(fld, isotropic_dual(space, R), space.dim)
        G = B @ R
    else:
        G = Matrix.zeros(fld, space.dim, space.dim)
    H = space.omega @ G.T @ space.omega
    I = Matrix.identity(fld, space.dim)
    joint = compose(space, space)
    return make_affine_symplectic(joint, Matrix.block([[I, H], [G, I]]))


def copier_ready_state(space: PhaseSpace, Z) -> EpistemicState:
    """``Z`` known to be zero: support ``ker(Z)``."""
    if not isinstance(Z, LinearVariable):
        Z = make_variable(space, Z)
    return make_epistemic(space, Z.row_space())


def copies(space: PhaseSpace, Z, f: AffineSymplectic, ready: EpistemicState) -> Optional[tuple]:
    """Check ``Z(v) + Z(v) = (Z + Z) f(v + x)`` for every ``v`` and every ``x`` in the ready support.

    Returns ``None`` on success or the first failing ``(v, x)``.
    """
    if not isinstance(Z, LinearVariable):
        Z = make_variable(space, Z)
    d = space.dim
    xs = list(ready.support().elements())
    for v in space.states():
        zv = Z(v)
        for x in xs:
            y = f(v + x)
            if Z(y[:d]) != zv or Z(y[d:]) != zv:
                return v, x
    return None


# -- pointer preservation ------------------------------------------------------


def is_pointer_preserving(meas: Measurement, method: str = "blocks") -> bool:
    """``M_QP = 0`` and ``M_PP`` invertible, or (``method="definition"``) by enumeration."""
    if method == "blocks":
        bd = blocks(meas)
        mpp = bd.M_PP
        return bd.M_QP.is_zero() and mpp.rank == mpp.nrows
    if method != "definition":
        raise ValueError(f"unknown method {method!r}")
    obj, subj = meas.object, meas.subject
    fld = obj.field
    if not fld.is_finite:
        raise FieldError("the definitional check needs a finite field")
    ds = obj.dim
    P = subj.P
    pts = list(P.elements())
    for s in obj.states():
        for q in subj.Q.elements():
            img = {meas.m(s + vadd(fld, q, p))[ds:] for p in pts}
            y0 = next(iter(img))
            if img != {vadd(fld, y0, p) for p in pts}:
                return False
    return True
