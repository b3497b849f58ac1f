"""Epistemic states ``(U, a)``: supports, purity, products and marginals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .exactalg import (
    AffineSubspace,
    DimensionError,
    FieldError,
    Subspace,
    Vector,
    coset_canonical_rep,
    enumerate_subspaces,
    intersection,
    orthogonal_complement,
)
from .phasespace import (
    PhaseSpace,
    compose,
    factor_space,
    factor_subspace,
    is_isotropic,
    is_lagrangian,
    isotropic_witness,
    project,
)


class NotIsotropic(ValueError):
    def __init__(self, witness: tuple):
        super().__init__(f"known functionals {witness[0]} and {witness[1]} have nonzero symplectic form")
        self.witness = witness


@dataclass(frozen=True)
class EpistemicState:
    """Known functionals ``U`` (isotropic) and a point ``a`` of the support.

    ``a`` is kept as the canonical representative of ``a + U^perp``, so two
    states with the same support are equal.
    """

    space: PhaseSpace
    U: Subspace
    a: Vector

    @property
    def known(self) -> tuple:
        return self.U.vectors

    def support(self) -> AffineSubspace:
        return AffineSubspace(orthogonal_complement(self.U), self.a)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.support()


def make_epistemic(space: PhaseSpace, U, a: Sequence = None) -> EpistemicState:
    if not isinstance(U, Subspace):
        U = Subspace.span(space.field, space.dim, U)
    if U.ambient != space.dim or U.field != space.field:
        raise DimensionError("known functionals do not match the space")
    if not is_isotropic(space, U):
        raise NotIsotropic(isotropic_witness(space, U))
    a = space.zero_vector() if a is None else space.vector(a)
    return EpistemicState(space, U, coset_canonical_rep(orthogonal_complement(U), a))


def support(e: EpistemicState) -> AffineSubspace:
    return e.support()


def enumerate_support(e: EpistemicState) -> list:
    if not e.space.field.is_finite:
        raise FieldError("supports over Q are infinite")
    return sorted(e.support().elements())


def is_pure(e: EpistemicState) -> bool:
    return is_lagrangian(e.space, e.U)


def maximal_ignorance(space: PhaseSpace) -> EpistemicState:
    return make_epistemic(space, Subspace.zero(space.field, space.dim))


def product(e1: EpistemicState, e2: EpistemicState) -> EpistemicState:
    """``(U1 + U2, a1 + a2)`` on the direct sum of the two spaces."""
    space = compose(e1.space, e2.space)
    d1 = e1.space.dim
    z1, z2 = (0,) * e2.space.dim, (0,) * d1
    U = Subspace.span(space.field, space.dim, [u + z1 for u in e1.known] + [z2 + u for u in e2.known])
    return make_epistemic(space, U, e1.a + e2.a)


def marginal(e: EpistemicState, factor) -> EpistemicState:
    """``(U ∩ V_factor, V_factor(a))`` expressed on the factor's own space."""
    space = e.space
    local = intersection(e.U, factor_subspace(space, factor))
    sub = factor_space(space, factor)
    U = Subspace.span(space.field, sub.dim, [project(space, factor, u) for u in local.vectors])
    return make_epistemic(sub, U, project(space, factor, e.a))


def pointer_state(subject, q_value) -> EpistemicState:
    """The state in which the subject's manifest value is known to be ``q_value``.

    ``q_value`` is either a vector of the subject's space lying in ``Q`` or its
    coordinates in ``Q``'s canonical basis.  The known functionals are the rows
    of the manifest variable, so the support is ``P + q``.
    """
    space, Q = subject.space, subject.Q
    q_value = tuple(q_value)
    if len(q_value) == space.dim:
        if q_value not in Q:
            raise ValueError(f"{q_value} is not a manifest (Q) vector")
        q = space.vector(q_value)
    elif len(q_value) == Q.dim:
        q = Q.combine(space.field.vector(q_value))
    else:
        raise DimensionError(f"pointer value of length {len(q_value)}")
    return make_epistemic(space, subject.manifest.row_space(), q)


def all_epistemic_states(space: PhaseSpace) -> Iterator[EpistemicState]:
    """Every epistemic state exactly once: isotropic ``U`` times canonical cosets."""
    F = space.field
    for k in range(space.n + 1):
        for U in enumerate_subspaces(F, space.dim, k):
            if not is_isotropic(space, U):
                continue
            perp = orthogonal_complement(U)
            # canonical coset reps are zero on perp's pivots: free elsewhere
            free = [j for j in range(space.dim) if j not in perp.pivots]
            for vals in F.vectors(len(free)):
                a = [F.zero] * space.dim
                for j, x in zip(free, vals):
                    a[j] = x
                yield EpistemicState(space, U, tuple(a))
