"""Symplectic phase spaces, subspace classification and composite systems."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .exactalg import (
    DimensionError,
    Field,
    Matrix,
    Subspace,
    Vector,
    _require_same_field,
    enumerate_subspaces,
    intersection,
    kernel,
    orthogonal_complement,
)


@dataclass(frozen=True)
class Factor:
    name: str
    offset: int
    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def indices(self) -> tuple:
        return tuple(range(self.offset, self.offset + self.dim))


@dataclass(frozen=True)
class PhaseSpace:
    """A 2n-dimensional symplectic vector space.

    Coordinates follow ``labels``.  A composite keeps each factor's
    ``(q.., p..)`` block contiguous; ``layout`` records where each factor sits.
    """

    field: Field
    n: int
    omega: Matrix
    labels: tuple
    layout: tuple

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def is_atomic(self) -> bool:
        return len(self.layout) == 1

    def factor(self, name) -> Factor:
        for f in self.layout:
            if f.name == str(name):
                return f
        raise KeyError(f"no factor named {name!r}; factors are {[f.name for f in self.layout]}")

    @property
    def factor_names(self) -> tuple:
        return tuple(f.name for f in self.layout)

    @property
    def conjugate_pairs(self) -> tuple:
        """Index pairs ``(q_i, p_i)`` across all factors."""
        return tuple((f.offset + i, f.offset + f.n + i) for f in self.layout for i in range(f.n))

    def zero_vector(self) -> Vector:
        return (self.field.zero,) * self.dim

    def vector(self, xs) -> Vector:
        v = self.field.vector(xs)
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} in a space of dimension {self.dim}")
        return v

    def basis_vector(self, label: str) -> Vector:
        i = self.labels.index(label)
        return tuple(self.field.one if j == i else self.field.zero for j in range(self.dim))

    def states(self) -> Iterator[Vector]:
        return self.field.vectors(self.dim)

    def __repr__(self):
        parts = "+".join(f"{f.name}(n={f.n})" for f in self.layout)
        return f"PhaseSpace[{self.field.name}]({parts})"


def canonical_omega(field: Field, n: int) -> Matrix:
    I = Matrix.identity(field, n)
    Z = Matrix.zeros(field, n, n)
    return Matrix.block([[Z, I], [-I, Z]])


def make_phase_space(field: Field, n: int, name: str = "V") -> PhaseSpace:
    if n < 1:
        raise ValueError("a toy system needs at least one degree of freedom")
    labels = tuple(f"q{i + 1}" for i in range(n)) + tuple(f"p{i + 1}" for i in range(n))
    return PhaseSpace(field, n, canonical_omega(field, n), labels, (Factor(str(name), 0, n),))


def compose(*spaces: PhaseSpace) -> PhaseSpace:
    """Direct sum of several spaces, factors in argument order.

    Factor names are kept when they are distinct, otherwise every factor is
    renamed by its 1-based position.
    """
    if not spaces:
        raise ValueError("nothing to compose")
    field = _require_same_field(*(s.field for s in spaces))
    factors = []
    off = 0
    for s in spaces:
        for f in s.layout:
            factors.append((f.name, off + f.offset, f.n))
        off += s.dim
    names = [f[0] for f in factors]
    if len(set(names)) != len(names):
        names = [str(i + 1) for i in range(len(names))]
    layout = tuple(Factor(nm, o, n) for nm, (_, o, n) in zip(names, factors))
    labels = []
    for f in layout:
        labels += [f"{f.name}.q{i + 1}" for i in range(f.n)] + [f"{f.name}.p{i + 1}" for i in range(f.n)]
    omega = Matrix.block_diag(*(canonical_omega(field, f.n) for f in layout))
    return PhaseSpace(field, sum(f.n for f in layout), omega, tuple(labels), layout)


def direct_sum(a: PhaseSpace, b: PhaseSpace) -> PhaseSpace:
    return compose(a, b)


def factor_space(space: PhaseSpace, name) -> PhaseSpace:
    f = space.factor(name)
    return make_phase_space(space.field, f.n, f.name)


def subsystem_indices(space: PhaseSpace, names: Sequence) -> tuple:
    return tuple(i for nm in names for i in space.factor(nm).indices)


def subsystem(space: PhaseSpace, names: Sequence) -> PhaseSpace:
    """The composite of the named factors, in the given order."""
    return compose(*(factor_space(space, nm) for nm in names))


def embed(space: PhaseSpace, name, x: Sequence) -> Vector:
    f = space.factor(name)
    if len(x) != f.dim:
        raise DimensionError(f"factor {f.name} has dimension {f.dim}, got length {len(x)}")
    out = list(space.zero_vector())
    for i, xi in zip(f.indices, x):
        out[i] = space.field(xi)
    return tuple(out)


def project(space: PhaseSpace, name, x: Sequence) -> Vector:
    f = space.factor(name)
    return tuple(x[i] for i in f.indices)


def factor_subspace(space: PhaseSpace, name) -> Subspace:
    """The coordinate subspace occupied by one factor."""
    F = space.field
    return Subspace.span(F, space.dim, [tuple(F.one if j == i else F.zero for j in range(space.dim)) for i in space.factor(name).indices])


@dataclass(frozen=True)
class OnticState:
    space: PhaseSpace
    coords: Vector

    def __post_init__(self):
        if len(self.coords) != self.space.dim:
            raise DimensionError(f"ontic state of length {len(self.coords)} in a space of dimension {self.space.dim}")

    @classmethod
    def of(cls, space: PhaseSpace, xs) -> "OnticState":
        return cls(space, space.vector(xs))


def _coords(space: PhaseSpace, x) -> Vector:
    if isinstance(x, OnticState):
        if x.space != space:
            raise DimensionError("ontic state belongs to a different space")
        return x.coords
    return space.vector(x)


def symplectic_form(space: PhaseSpace, x, y):
    """``x^T Omega y``."""
    x, y = _coords(space, x), _coords(space, y)
    return space.field(sum(a * b for a, b in zip(x, space.omega @ y)))


def _check_ambient(space: PhaseSpace, w: Subspace):
    _require_same_field(space.field, w.field)
    if w.ambient != space.dim:
        raise DimensionError(f"subspace of F^{w.ambient} in a space of dimension {space.dim}")


def symplectic_complement(space: PhaseSpace, w: Subspace) -> Subspace:
    _check_ambient(space, w)
    if w.dim == 0:
        return Subspace.full(space.field, space.dim)
    return kernel(w.basis @ space.omega)


class Kind(enum.Enum):
    SYMPLECTIC = "symplectic"
    ISOTROPIC = "isotropic"
    LAGRANGIAN = "lagrangian"
    NEITHER = "neither"


def classify_subspace(space: PhaseSpace, w: Subspace) -> Kind:
    c = symplectic_complement(space, w)
    if c == w:
        return Kind.LAGRANGIAN
    if w <= c:
        return Kind.ISOTROPIC
    if intersection(w, c).dim == 0:
        return Kind.SYMPLECTIC
    return Kind.NEITHER


def is_isotropic(space: PhaseSpace, w: Subspace) -> bool:
    return classify_subspace(space, w) in (Kind.ISOTROPIC, Kind.LAGRANGIAN)


def is_lagrangian(space: PhaseSpace, w: Subspace) -> bool:
    return classify_subspace(space, w) is Kind.LAGRANGIAN


def isotropic_witness(space: PhaseSpace, w: Subspace) -> Optional[tuple]:
    """A pair of basis vectors of ``w`` with nonzero form, if any."""
    vs = w.vectors
    for i, j in itertools.combinations(range(len(vs)), 2):
        if symplectic_form(space, vs[i], vs[j]) != 0:
            return vs[i], vs[j]
    return None


def lagrangians(space: PhaseSpace) -> list:
    """All Lagrangian subspaces (finite fields only)."""
    return [w for w in enumerate_subspaces(space.field, space.dim, space.n) if is_lagrangian(space, w)]


def isotropic_subspaces(space: PhaseSpace) -> list:
    return [w for k in range(space.n + 1) for w in enumerate_subspaces(space.field, space.dim, k) if is_isotropic(space, w)]


def coordinate_lagrangians(space: PhaseSpace) -> Iterator[Subspace]:
    """Lagrangians spanned by one of ``q_i``/``p_i`` per conjugate pair.

    Ordered by the number of ``q`` coordinates taken, so ``span{p}`` comes
    first and ``span{q}`` last.
    """
    F = space.field
    pairs = space.conjugate_pairs
    for k in range(len(pairs) + 1):
        for qs in itertools.combinations(range(len(pairs)), k):
            idx = [q if i in qs else p for i, (q, p) in enumerate(pairs)]
            yield Subspace.span(F, space.dim, [tuple(F.one if j == i else F.zero for j in range(space.dim)) for i in idx])


def lagrangian_complement(space: PhaseSpace, q: Subspace) -> Subspace:
    """A Lagrangian ``P`` with ``Q + P`` the whole space, chosen deterministically.

    Over Q this is the orthogonal complement of ``Q``.  Over Z_p the
    orthogonal complement can meet ``Q`` (span{(1,1)} over Z_2 is its own
    complement), so the first transverse coordinate Lagrangian is used; one
    always exists.
    """
    if not is_lagrangian(space, q):
        raise ValueError("complement requested for a non-Lagrangian subspace")
    if not space.field.is_finite:
        return orthogonal_complement(q)
    for cand in coordinate_lagrangians(space):
        if intersection(cand, q).dim == 0:
            return cand
    raise AssertionError("no transverse coordinate Lagrangian found")


def darboux_basis(space: PhaseSpace, w: Subspace) -> tuple:
    """Symplectic Gram-Schmidt: ``(es, fs)`` with ``omega(e_i, f_j) = delta_ij``.

    Raises ``ValueError`` when ``w`` is not a symplectic subspace.
    """
    _check_ambient(space, w)
    F = space.field
    vecs = list(w.vectors)
    es, fs = [], []
    while vecs:
        e = vecs.pop(0)
        j = next((k for k, v in enumerate(vecs) if symplectic_form(space, e, v) != 0), None)
        if j is None:
            raise ValueError("subspace is not symplectic: its form is degenerate")
        f = vecs.pop(j)
        s = F.inv(symplectic_form(space, e, f))
        f = tuple(F(s * x) for x in f)
        rest = []
        for v in vecs:
            a, b = symplectic_form(space, e, v), symplectic_form(space, f, v)
            rest.append(tuple(F(vi - a * fi + b * ei) for vi, fi, ei in zip(v, f, e)))
        vecs = rest
        es.append(e)
        fs.append(f)
    return es, fs
