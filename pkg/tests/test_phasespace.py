import itertools

import pytest
from hypothesis import given, strategies as st

from nomic.exactalg import Field, Matrix, Subspace, enumerate_subspaces
from nomic.phasespace import (
    Kind,
    canonical_omega,
    classify_subspace,
    compose,
    coordinate_lagrangians,
    darboux_basis,
    embed,
    factor_space,
    is_lagrangian,
    lagrangian_complement,
    lagrangians,
    make_phase_space,
    project,
    symplectic_complement,
    symplectic_form,
)


def test_omega_over_q():
    assert canonical_omega(Field.rationals(), 1) == Matrix.of(Field.rationals(), [[0, 1], [-1, 0]])


def test_omega_over_z2_is_symmetric():
    assert canonical_omega(Field.prime(2), 1) == Matrix.of(Field.prime(2), [[0, 1], [1, 0]])


def test_omega_over_z3_stores_minus_one_as_two():
    W = canonical_omega(Field.prime(3), 2)
    assert W.rows[2][0] == 2 and W.rows[3][1] == 2 and W.rows[0][2] == 1


def test_form_on_basis_vectors(field):
    V = make_phase_space(field, 2)
    q1, q2, p1 = (V.basis_vector(l) for l in ("q1", "q2", "p1"))
    assert symplectic_form(V, q1, p1) == 1
    assert symplectic_form(V, q1, q2) == 0
    assert symplectic_form(V, p1, q1) == field(-1)


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2)])
def test_form_is_alternating(p, n):
    V = make_phase_space(Field.prime(p), n)
    for x in V.states():
        assert symplectic_form(V, x, x) == 0


def test_rejects_zero_degrees_of_freedom():
    with pytest.raises(ValueError):
        make_phase_space(Field.prime(2), 0)


def test_complement_examples(z2):
    V = make_phase_space(z2, 1)
    assert symplectic_complement(V, Subspace.zero(z2, 2)) == Subspace.full(z2, 2)
    assert symplectic_complement(V, Subspace.full(z2, 2)).dim == 0
    q = Subspace.span(z2, 2, [(1, 0)])
    # by enumeration: v with omega(q, v) = 0
    brute = Subspace.span(z2, 2, [v for v in V.states() if symplectic_form(V, (1, 0), v) == 0])
    assert symplectic_complement(V, q) == q == brute


def test_classification_examples(field):
    V = make_phase_space(field, 2)
    qs = Subspace.span(field, 4, [V.basis_vector("q1"), V.basis_vector("q2")])
    assert classify_subspace(V, qs) is Kind.LAGRANGIAN
    qp = Subspace.span(field, 4, [V.basis_vector("q1"), V.basis_vector("p1")])
    assert classify_subspace(V, qp) is Kind.SYMPLECTIC
    assert classify_subspace(V, Subspace.zero(field, 4)) is Kind.ISOTROPIC
    mixed = Subspace.span(field, 4, [V.basis_vector("q1"), V.basis_vector("p1"), V.basis_vector("q2")])
    assert classify_subspace(V, mixed) is Kind.NEITHER


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2)])
def test_complement_is_involutive_and_dimension_complementary(p, n):
    F = Field.prime(p)
    V = make_phase_space(F, n)
    for W in enumerate_subspaces(F, V.dim):
        c = symplectic_complement(V, W)
        assert c.dim == V.dim - W.dim
        assert symplectic_complement(V, c) == W


@pytest.mark.parametrize("p,n,count", [(2, 1, 3), (3, 1, 4), (2, 2, 15)])
def test_lagrangian_counts(p, n, count):
    # (p+1) for n = 1; (p+1)(p^2+1) for n = 2
    assert len(lagrangians(make_phase_space(Field.prime(p), n))) == count


def test_compose_two_bits(field):
    a = make_phase_space(field, 1, "a")
    b = make_phase_space(field, 1, "b")
    ab = compose(a, b)
    assert ab.dim == 4
    assert ab.omega == Matrix.block_diag(a.omega, b.omega)
    assert ab.labels == ("a.q1", "a.p1", "b.q1", "b.p1")


def test_compose_renames_clashing_factors(z2):
    V = make_phase_space(z2, 1)
    assert compose(V, V).factor_names == ("1", "2")


@given(st.lists(st.integers(0, 2), min_size=2, max_size=2), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_embed_project(x, y):
    F = Field.prime(3)
    a = make_phase_space(F, 1, "a")
    b = make_phase_space(F, 2, "b")
    ab = compose(a, b)
    assert project(ab, "a", embed(ab, "a", x)) == F.vector(x)
    s = tuple(F(u + v) for u, v in zip(embed(ab, "a", x), embed(ab, "b", y)))
    assert project(ab, "b", s) == F.vector(y)


def test_factor_space_is_atomic(z2):
    ab = compose(make_phase_space(z2, 1, "a"), make_phase_space(z2, 2, "b"))
    assert factor_space(ab, "b") == make_phase_space(z2, 2, "b")
    with pytest.raises(KeyError):
        ab.factor("c")


def test_coordinate_lagrangians_are_lagrangian(field):
    V = make_phase_space(field, 2)
    cl = list(coordinate_lagrangians(V))
    assert len(cl) == 4 and all(is_lagrangian(V, L) for L in cl)


@pytest.mark.parametrize("name", ["Z2", "Z3", "Q"])
def test_lagrangian_complement_is_a_lagrangian_complement(name):
    F = Field.from_name(name)
    V = make_phase_space(F, 2)
    vecs = [(1, 1, 0, 0), (0, 0, 1, F(-1))]
    Q = Subspace.span(F, 4, vecs)
    assert is_lagrangian(V, Q)
    P = lagrangian_complement(V, Q)
    assert is_lagrangian(V, P) and (P & Q).dim == 0


def test_darboux_basis_of_symplectic_subspace(z3):
    V = make_phase_space(z3, 2)
    W = Subspace.span(z3, 4, [(1, 1, 0, 0), (0, 0, 1, 0)])
    es, fs = darboux_basis(V, W)
    for (i, e), (j, f) in itertools.product(enumerate(es), enumerate(fs)):
        assert symplectic_form(V, e, f) == (1 if i == j else 0)
    for a, b in itertools.combinations(es, 2):
        assert symplectic_form(V, a, b) == 0


def test_darboux_basis_rejects_degenerate(z2):
    V = make_phase_space(z2, 2)
    with pytest.raises(ValueError):
        darboux_basis(V, Subspace.span(z2, 4, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]))
