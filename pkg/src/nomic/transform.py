"""Affine symplectic maps and irreversible physical transformations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .epistemic import EpistemicState, make_epistemic
from .exactalg import DimensionError, Matrix, Subspace, Vector, image, kernel, vadd
from .phasespace import OnticState, PhaseSpace, darboux_basis, subsystem_indices


class NotSymplectic(ValueError):
    def __init__(self, entry: tuple, value):
        i, j = entry
        super().__init__(f"M^T Omega M - Omega is nonzero at entry ({i}, {j}): {value}")
        self.entry = entry
        self.value = value


class NotPhysical(ValueError):
    pass


class DimensionShrinkViolation(NotPhysical):
    pass


def symplectic_defect(M: Matrix, omega: Matrix) -> Optional[tuple]:
    """First nonzero entry of ``M^T Omega M - Omega`` as ``((i, j), value)``."""
    if M.shape != omega.shape:
        raise DimensionError(f"matrix of shape {M.shape} on a space of dimension {omega.nrows}")
    D = M.T @ omega @ M - omega
    for i, r in enumerate(D.rows):
        for j, x in enumerate(r):
            if x != 0:
                return (i, j), x
    return None


def is_symplectic(M: Matrix, omega: Matrix) -> bool:
    return symplectic_defect(M, omega) is None


@dataclass(frozen=True)
class AffineSymplectic:
    """``x -> M x + v`` with ``M^T Omega M = Omega``; build with :func:`make_affine_symplectic`."""

    space: PhaseSpace
    M: Matrix
    v: Vector

    def __call__(self, x) -> Vector:
        if isinstance(x, OnticState):
            x = x.coords
        return vadd(self.space.field, self.M @ tuple(x), self.v)

    def __matmul__(self, inner: "AffineSymplectic") -> "AffineSymplectic":
        return compose_maps(self, inner)

    @property
    def is_linear(self) -> bool:
        return all(x == 0 for x in self.v)


def make_affine_symplectic(space: PhaseSpace, M, v: Sequence = None) -> AffineSymplectic:
    """The single gate for dynamics: rejects any ``M`` that does not preserve the form."""
    if not isinstance(M, Matrix):
        M = Matrix.of(space.field, M, space.dim)
    defect = symplectic_defect(M, space.omega)
    if defect is not None:
        raise NotSymplectic(*defect)
    v = space.zero_vector() if v is None else space.vector(v)
    return AffineSymplectic(space, M, v)


def identity(space: PhaseSpace) -> AffineSymplectic:
    return AffineSymplectic(space, Matrix.identity(space.field, space.dim), space.zero_vector())


def compose_maps(outer: AffineSymplectic, inner: AffineSymplectic) -> AffineSymplectic:
    """``(s, u) o (t, v) = (s t, u + s v)``."""
    if outer.space != inner.space:
        raise DimensionError("cannot compose maps on different spaces")
    return AffineSymplectic(outer.space, outer.M @ inner.M, vadd(outer.space.field, outer.v, outer.M @ inner.v))


def symplectic_inverse(M: Matrix, omega: Matrix) -> Matrix:
    """``Omega^T M^T Omega``; valid because ``Omega^T = Omega^-1`` for block-canonical forms."""
    return omega.T @ M.T @ omega


def inverse_transpose(M: Matrix, omega: Matrix) -> Matrix:
    """``(M^-1)^T = -Omega M Omega``."""
    return -(omega @ M @ omega)


def inverse(f: AffineSymplectic) -> AffineSymplectic:
    Minv = symplectic_inverse(f.M, f.space.omega)
    F = f.space.field
    return AffineSymplectic(f.space, Minv, tuple(F(-x) for x in Minv @ f.v))


def apply(f: AffineSymplectic, x) -> OnticState:
    return OnticState(f.space, f(x))


def push_epistemic(f: AffineSymplectic, e: EpistemicState) -> EpistemicState:
    """Image of an epistemic state: ``((f^-1)^T U, f(a) + v)``."""
    if e.space != f.space:
        raise DimensionError("state and map live on different spaces")
    G = inverse_transpose(f.M, f.space.omega)
    U = Subspace.span(f.space.field, f.space.dim, [G @ u for u in e.known])
    return make_epistemic(f.space, U, f(e.a))


def lift(joint: PhaseSpace, names: Sequence, f: AffineSymplectic) -> AffineSymplectic:
    """Act with ``f`` (defined on the named factors, in that order) and identity elsewhere.

    This is how a map written for ``A1 + S`` is placed on ``A1 + S + A2`` or
    on ``S + A1``: by factor name, never by position.
    """
    idx = subsystem_indices(joint, names)
    if len(idx) != f.space.dim:
        raise DimensionError(f"factors {list(names)} have dimension {len(idx)}, map acts on {f.space.dim}")
    F = joint.field
    rows = [list(r) for r in Matrix.identity(F, joint.dim).rows]
    v = list(joint.zero_vector())
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            rows[i][j] = f.M.rows[a][b]
        v[i] = f.v[a]
    return make_affine_symplectic(joint, rows, v)


# -- irreversible transformations -------------------------------------------


@dataclass(frozen=True)
class PhysicalTransformation:
    domain: PhaseSpace
    codomain: PhaseSpace
    F: Matrix
    w: Vector
    kept: tuple  # domain coordinates where the codomain sits in the dilation

    def __call__(self, x) -> Vector:
        return vadd(self.codomain.field, self.F @ tuple(x), self.w)


def _codomain_slot(domain: PhaseSpace, codomain: PhaseSpace, at) -> tuple:
    if at is not None:
        idx = subsystem_indices(domain, [at] if isinstance(at, str) else at)
        if len(idx) != codomain.dim:
            raise NotPhysical(f"factor(s) {at} have dimension {len(idx)}, codomain has {codomain.dim}")
        return idx
    if domain.dim == codomain.dim:
        return tuple(range(domain.dim))
    for f in domain.layout:
        if f.dim == codomain.dim:
            return f.indices
    raise NotPhysical("codomain does not embed as a factor of the domain")


def make_physical(domain: PhaseSpace, codomain: PhaseSpace, F, w: Sequence = None, at=None) -> PhysicalTransformation:
    """Validate an affine map ``V -> W`` constructively and record where ``W`` sits in ``V``.

    Steps: dimension check, kernel symplectic, restriction to the kernel's
    symplectic complement preserves the form, dilation passes the gate.
    """
    if domain.field != codomain.field:
        raise DimensionError("domain and codomain are over different fields")
    if not isinstance(F, Matrix):
        F = Matrix.of(domain.field, F, domain.dim)
    if F.shape != (codomain.dim, domain.dim):
        raise DimensionError(f"matrix of shape {F.shape} for a map {domain.dim} -> {codomain.dim}")
    if domain.dim < codomain.dim:
        raise DimensionShrinkViolation(f"domain dimension {domain.dim} is smaller than codomain dimension {codomain.dim}")
    if image(F).dim != codomain.dim:
        raise NotPhysical("image does not span the codomain")
    w = codomain.zero_vector() if w is None else codomain.vector(w)
    pt = PhysicalTransformation(domain, codomain, F, w, _codomain_slot(domain, codomain, at))
    dilate(pt)
    return pt


def dilate(pt: PhysicalTransformation) -> AffineSymplectic:
    """Reversible ``f~`` on the domain with ``pt(x) = W(f~(x))`` for the slot projection ``W``.

    ``f~`` sends the kernel's complement through ``F`` and maps the kernel
    onto the discarded coordinates by matching Darboux bases.
    """
    dom, F = pt.domain, pt.F
    fld = dom.field
    K = kernel(F) if F.nrows else Subspace.full(fld, dom.dim)
    try:
        ke, kf = darboux_basis(dom, K)
    except ValueError:
        raise NotPhysical("kernel is not a symplectic subspace") from None
    rest = tuple(i for i in range(dom.dim) if i not in pt.kept)
    discarded = Subspace.span(fld, dom.dim, [tuple(fld.one if j == i else fld.zero for j in range(dom.dim)) for i in rest])
    de, df = darboux_basis(dom, discarded)
    # G : V -> discarded coordinates, zero on K^omega, K -> discarded by Darboux bases
    src = Matrix.from_columns(fld, list(ke) + list(kf), dom.dim)
    dst = Matrix.from_columns(fld, list(de) + list(df), dom.dim)
    Kw = kernel(Matrix(fld, tuple(ke) + tuple(kf), dom.dim) @ dom.omega) if K.dim else Subspace.full(fld, dom.dim)
    basis = Matrix.from_columns(fld, list(src.T.rows) + list(Kw.vectors), dom.dim)
    images = Matrix.from_columns(fld, list(dst.T.rows) + [dom.zero_vector()] * Kw.dim, dom.dim)
    G = images @ basis.inverse() if dom.dim else images
    M = [list(r) for r in G.rows]
    v = [fld.zero] * dom.dim
    for a, i in enumerate(pt.kept):
        M[i] = list(F.rows[a])
        v[i] = pt.w[a]
    try:
        return make_affine_symplectic(dom, M, v)
    except NotSymplectic as exc:
        raise NotPhysical(f"dilation fails the symplectic gate: {exc}") from None
