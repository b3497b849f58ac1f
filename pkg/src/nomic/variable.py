"""Variables of toy systems: linear variables, Poisson brackets, fibers."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .exactalg import DimensionError, FieldError, Matrix, Subspace, enumerate_subspaces, kernel
from .phasespace import PhaseSpace, is_isotropic


class NotPoisson(ValueError):
    """A variable whose component functionals do not pairwise commute."""

    def __init__(self, witness: tuple, bracket):
        i, j = witness
        super().__init__(f"rows {i} and {j} have Poisson bracket {bracket} != 0")
        self.witness = witness
        self.bracket = bracket


@dataclass(frozen=True)
class LinearVariable:
    """A linear map ``Z : V -> F^k`` stored as its k x 2n matrix; row order is kept."""

    space: PhaseSpace
    Z: Matrix

    @property
    def value_dim(self) -> int:
        return self.Z.nrows

    @property
    def rows(self) -> tuple:
        return self.Z.rows

    def __call__(self, x) -> tuple:
        return self.Z @ tuple(x)

    def row_space(self) -> Subspace:
        return Subspace.span(self.space.field, self.space.dim, self.Z.rows)

    def kernel(self) -> Subspace:
        if self.Z.nrows == 0:
            return Subspace.full(self.space.field, self.space.dim)
        return kernel(self.Z)


def make_variable(space: PhaseSpace, Z) -> LinearVariable:
    if not isinstance(Z, Matrix):
        Z = Matrix.of(space.field, Z, space.dim)
    if Z.ncols != space.dim:
        raise DimensionError(f"variable matrix has {Z.ncols} columns, space has dimension {space.dim}")
    if Z.field != space.field:
        raise FieldError("variable and space are over different fields")
    return LinearVariable(space, Z)


def poisson_bracket(space: PhaseSpace, f1: Sequence, f2: Sequence):
    """``f1 Omega f2^T`` for two functionals given as rows."""
    if len(f1) != space.dim or len(f2) != space.dim:
        raise DimensionError("functional length does not match the space")
    return space.field(sum(a * b for a, b in zip(f1, space.omega @ tuple(f2))))


def poisson_witness(v: LinearVariable) -> Optional[tuple]:
    """First row pair ``(i, j)`` with nonzero bracket, with the bracket value."""
    rows = v.rows
    for i, j in itertools.combinations(range(len(rows)), 2):
        b = poisson_bracket(v.space, rows[i], rows[j])
        if b != 0:
            return (i, j), b
    return None


def is_poisson(v: LinearVariable) -> bool:
    return (v.Z @ v.space.omega @ v.Z.T).is_zero()


def require_poisson(v: LinearVariable) -> None:
    w = poisson_witness(v)
    if w is not None:
        raise NotPoisson(*w)


def fibers(v) -> list:
    """Preimage classes of the variable, as lists of ontic states.

    Classes are ordered by their smallest member; members are in lexicographic order.
    """
    space = v.space
    if not space.field.is_finite:
        raise FieldError("fibers can only be enumerated over a finite field")
    groups = defaultdict(list)
    for x in space.states():
        groups[v(x)].append(x)
    return sorted(groups.values())


def equivalent(v1: LinearVariable, v2: LinearVariable) -> bool:
    """Same induced partition; for linear maps, same kernel."""
    if v1.space != v2.space:
        raise DimensionError("variables live on different spaces")
    return v1.kernel() == v2.kernel()


def same_partition(v1, v2) -> bool:
    """Partition equality by enumeration (finite fields)."""
    norm = lambda v: sorted(tuple(c) for c in fibers(v))
    return norm(v1) == norm(v2)


@dataclass(frozen=True)
class GeneralVariable:
    """An arbitrary function on a finite state space, held as a lookup table."""

    space: PhaseSpace
    table: dict

    @classmethod
    def from_function(cls, space: PhaseSpace, fn: Callable) -> "GeneralVariable":
        if not space.field.is_finite:
            raise FieldError("general variables need a finite field")
        return cls(space, {x: fn(x) for x in space.states()})

    def __call__(self, x):
        return self.table[tuple(x)]


def all_linear_variables(space: PhaseSpace, max_rows: int) -> Iterator[LinearVariable]:
    """Every k x 2n matrix for k = 0..max_rows (finite fields)."""
    F = space.field
    for k in range(max_rows + 1):
        for flat in itertools.product(F.elements(), repeat=k * space.dim):
            rows = [flat[i * space.dim:(i + 1) * space.dim] for i in range(k)]
            yield LinearVariable(space, Matrix(F, tuple(tuple(r) for r in rows), space.dim))


def poisson_variables_up_to_equivalence(space: PhaseSpace) -> list:
    """One representative per class: the RREF basis of each isotropic row space."""
    out = []
    for k in range(space.n + 1):
        for w in enumerate_subspaces(space.field, space.dim, k):
            if is_isotropic(space, w):
                out.append(LinearVariable(space, w.basis))
    return out


def linear_variables_up_to_equivalence(space: PhaseSpace) -> list:
    """One representative per row space, Poisson or not."""
    return [LinearVariable(space, w.basis) for w in enumerate_subspaces(space.field, space.dim)]
