import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nomic.exactalg import (
    AffineSubspace,
    DimensionError,
    Field,
    FieldError,
    Matrix,
    Subspace,
    coset_canonical_rep,
    enumerate_subspaces,
    image,
    intersection,
    kernel,
    orthogonal_complement,
    rref,
    solve,
    subspace_sum,
)
from oracles import span_mod_p

FIELDS = [Field.prime(2), Field.prime(3), Field.prime(5), Field.rationals()]


def matrices(field, max_rows=4, max_cols=4):
    if field.is_finite:
        elem = st.integers(0, field.p - 1)
    else:
        elem = st.fractions(min_value=-3, max_value=3, max_denominator=3)

    @st.composite
    def build(draw):
        r = draw(st.integers(0, max_rows))
        c = draw(st.integers(1, max_cols))
        rows = [[draw(elem) for _ in range(c)] for _ in range(r)]
        return Matrix.of(field, rows, c)

    return build()


any_matrix = st.sampled_from(FIELDS).flatmap(matrices)


# -- fields -------------------------------------------------------------------


def test_field_names_and_canonical_residues():
    assert Field.from_name("z2") == Field.prime(2)
    assert Field.from_name("Q") == Field.rationals()
    assert Field.prime(3)(-1) == 2
    assert Field.rationals()("3/6") == Fraction(1, 2)


def test_non_prime_modulus_rejected():
    with pytest.raises(FieldError):
        Field.prime(4)


def test_inverse_of_zero_raises(field):
    with pytest.raises(ZeroDivisionError):
        field.inv(field.zero)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_every_nonzero_residue_has_an_inverse(p):
    F = Field.prime(p)
    for a in range(1, p):
        assert F(a * F.inv(a)) == 1


def test_literal_round_trip():
    Q = Field.rationals()
    for x in [Fraction(-7, 3), Fraction(0), Fraction(5)]:
        assert Q.from_literal(Q.to_literal(x)) == x
    assert Field.prime(3).to_literal(Field.prime(3)(-1)) == 2


# -- rref, kernel, image, solve -------------------------------------------------


def test_rref_identity():
    I = Matrix.identity(Field.rationals(), 3)
    R, r, piv = rref(I)
    assert R == I and r == 3 and list(piv) == [0, 1, 2]


def test_rref_zero():
    Z = Matrix.zeros(Field.prime(3), 2, 4)
    R, r, piv = rref(Z)
    assert R == Z and r == 0 and list(piv) == []


def test_rref_z2_rank_one():
    F = Field.prime(2)
    R, r, _ = rref(Matrix.of(F, [[1, 1], [1, 1]]))
    assert R == Matrix.of(F, [[1, 1], [0, 0]]) and r == 1
    # row space has 2 elements: {00, 11}
    assert span_mod_p([[1, 1], [1, 1]], 2) == {(0, 0), (1, 1)}


def test_kernel_examples():
    F = Field.prime(2)
    assert kernel(Matrix.identity(F, 2)).dim == 0
    assert kernel(Matrix.of(F, [[1, 0]])) == Subspace.span(F, 2, [(0, 1)])
    # check both candidate vectors by hand
    assert [v for v in [(0, 1), (1, 1)] if v[0] == 0] == [(0, 1)]
    assert kernel(Matrix.zeros(F, 1, 4)) == Subspace.full(F, 4)


def test_image_examples():
    F = Field.prime(2)
    assert image(Matrix.identity(F, 3)) == Subspace.full(F, 3)
    assert image(Matrix.zeros(F, 3, 2)).dim == 0
    assert image(Matrix.of(F, [[1], [1]])) == Subspace.span(F, 2, [(1, 1)])


def test_solve_examples():
    F = Field.prime(3)
    assert solve(Matrix.identity(F, 2), (1, 2)) == (1, 2)
    assert solve(Matrix.zeros(F, 2, 2), (1, 0)) is None
    assert solve(Matrix.of(F, [[2]]), (1,)) == (2,)


def test_intersection_examples():
    F = Field.prime(2)
    U = Subspace.span(F, 4, [(1, 0, 1, 0), (0, 1, 0, 1)])
    E = Subspace.span(F, 4, [(1, 0, 0, 0), (0, 1, 0, 0)])
    assert intersection(U, U) == U
    assert intersection(U, Subspace.zero(F, 4)).dim == 0
    assert intersection(U, E).dim == 0
    assert span_mod_p(U.vectors, 2) & span_mod_p(E.vectors, 2) == {(0, 0, 0, 0)}


@given(any_matrix)
def test_rank_nullity(m):
    assert m.rank + kernel(m).dim == m.ncols


@given(any_matrix)
def test_rref_idempotent(m):
    R, r, piv = rref(m)
    R2, r2, piv2 = rref(R)
    assert R2 == R and r2 == r and piv2 == piv


@given(any_matrix)
def test_kernel_vectors_are_annihilated(m):
    for v in kernel(m).vectors:
        assert all(x == 0 for x in m @ v)


@given(any_matrix)
def test_image_dimension_is_rank(m):
    assert image(m).dim == m.rank


@given(any_matrix, st.data())
def test_solve_finds_a_solution_when_one_exists(m, data):
    F = m.field
    coeffs = data.draw(st.lists(st.integers(-2, 2), min_size=m.ncols, max_size=m.ncols))
    b = m @ F.vector(coeffs)
    x = solve(m, b)
    assert x is not None and m @ x == b


@given(st.sampled_from(FIELDS).flatmap(lambda f: matrices(f, 4, 4)))
def test_inverse_when_square_full_rank(m):
    if m.nrows != m.ncols or m.nrows == 0:
        return
    if m.rank < m.nrows:
        with pytest.raises(ZeroDivisionError):
            m.inverse()
    else:
        assert m @ m.inverse() == Matrix.identity(m.field, m.nrows)


def test_matrix_shape_errors():
    F = Field.prime(2)
    with pytest.raises(DimensionError):
        Matrix.identity(F, 2) @ Matrix.identity(F, 3)
    with pytest.raises(DimensionError):
        Matrix.of(F, [[1, 0], [1]])


def test_matrix_literal_round_trip(field):
    m = Matrix.of(field, [[1, 2, 0], [0, -1, 1]])
    assert Matrix.from_literal(field, m.to_literal()) == m


# -- subspaces -------------------------------------------------------------------


def _subspaces(field, dim):
    @st.composite
    def build(draw):
        k = draw(st.integers(0, dim))
        elem = st.integers(0, field.p - 1) if field.is_finite else st.integers(-2, 2)
        vecs = [tuple(draw(elem) for _ in range(dim)) for _ in range(k)]
        return Subspace.span(field, dim, vecs)

    return build()


subspace_pairs = st.sampled_from(FIELDS).flatmap(
    lambda f: st.tuples(_subspaces(f, 4), _subspaces(f, 4))
)


@given(subspace_pairs)
def test_dimension_formula(uw):
    u, w = uw
    assert subspace_sum(u, w).dim + intersection(u, w).dim == u.dim + w.dim


@given(subspace_pairs)
def test_perp_is_an_involution_with_complementary_dimension(uw):
    u, _ = uw
    assert orthogonal_complement(orthogonal_complement(u)) == u
    assert orthogonal_complement(u).dim == u.ambient - u.dim


@given(subspace_pairs)
def test_intersection_is_contained_in_both(uw):
    u, w = uw
    i = intersection(u, w)
    assert i <= u and i <= w


def test_self_orthogonal_line_over_z2():
    F = Field.prime(2)
    L = Subspace.span(F, 2, [(1, 1)])
    assert orthogonal_complement(L) == L


def test_canonical_form_is_unique():
    F = Field.prime(2)
    a = Subspace.span(F, 3, [(1, 1, 0), (0, 1, 1)])
    b = Subspace.span(F, 3, [(1, 0, 1), (1, 1, 0), (0, 1, 1)])
    assert a == b and hash(a) == hash(b)


@pytest.mark.parametrize("p,d", [(2, 3), (3, 2), (2, 4)])
def test_enumerate_subspaces_matches_brute_force_spans(p, d):
    F = Field.prime(p)
    listed = {frozenset(s.elements()) for s in enumerate_subspaces(F, d)}
    vecs = list(F.vectors(d))
    brute = set()
    for k in range(d + 1):
        for combo in itertools.combinations(vecs, k):
            brute.add(frozenset(span_mod_p(combo, p) or {(0,) * d}))
    assert listed == brute
    assert len(list(enumerate_subspaces(F, d))) == len(brute)


def test_coset_canonical_rep_is_constant_on_cosets():
    F = Field.prime(3)
    U = Subspace.span(F, 3, [(1, 2, 0)])
    for a in F.vectors(3):
        rep = coset_canonical_rep(U, a)
        for u in U.elements():
            assert coset_canonical_rep(U, tuple(F(x + y) for x, y in zip(a, u))) == rep


def test_affine_subspace_membership_and_elements():
    F = Field.prime(2)
    A = AffineSubspace.of(Subspace.span(F, 2, [(0, 1)]), (1, 0))
    assert sorted(A.elements()) == [(1, 0), (1, 1)]
    assert (1, 1) in A and (0, 1) not in A
