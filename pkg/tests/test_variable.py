import pytest

from nomic.exactalg import DimensionError, Field, Matrix
from nomic.phasespace import make_phase_space
from nomic.variable import (
    GeneralVariable,
    NotPoisson,
    all_linear_variables,
    equivalent,
    fibers,
    is_poisson,
    linear_variables_up_to_equivalence,
    make_variable,
    poisson_bracket,
    poisson_variables_up_to_equivalence,
    poisson_witness,
    require_poisson,
    same_partition,
)


def test_position_and_momentum(field):
    V = make_phase_space(field, 1)
    q = make_variable(V, [[1, 0]])
    p = make_variable(V, [[0, 1]])
    assert q((3, 5)) == (field(3),)
    assert p((3, 5)) == (field(5),)


def test_trivial_variable_has_no_rows(field):
    V = make_phase_space(field, 1)
    t = make_variable(V, Matrix.zeros(field, 0, 2))
    assert t.value_dim == 0 and t((1, 1)) == ()
    assert is_poisson(t)


def test_wrong_width_rejected(z2):
    with pytest.raises(DimensionError):
        make_variable(make_phase_space(z2, 1), [[1, 0, 0]])


def test_single_functionals_are_poisson(z3):
    V = make_phase_space(z3, 2)
    for Z in all_linear_variables(V, 1):
        assert is_poisson(Z)


def test_identity_is_not_poisson(field):
    V = make_phase_space(field, 1)
    Z = make_variable(V, [[1, 0], [0, 1]])
    assert not is_poisson(Z)
    assert poisson_witness(Z) == ((0, 1), 1)
    with pytest.raises(NotPoisson) as exc:
        require_poisson(Z)
    assert exc.value.witness == (0, 1)


def test_positions_are_poisson(field):
    V = make_phase_space(field, 3)
    Z = make_variable(V, [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]])
    assert is_poisson(Z)


def test_brackets(field):
    V = make_phase_space(field, 1)
    assert poisson_bracket(V, (1, 0), (1, 0)) == 0
    assert poisson_bracket(V, (1, 0), (0, 1)) == 1
    for f in [(1, 2), (3, 1)]:
        assert poisson_bracket(V, f, f) == 0


@pytest.mark.parametrize("p", [2, 3])
def test_poisson_iff_row_space_isotropic_two_rows(p):
    F = Field.prime(p)
    V = make_phase_space(F, 1)
    for Z in all_linear_variables(V, 2):
        brackets_vanish = all(poisson_bracket(V, a, b) == 0 for a in Z.rows for b in Z.rows)
        assert is_poisson(Z) == brackets_vanish


def test_fibers_of_position(z2):
    V = make_phase_space(z2, 1)
    assert fibers(make_variable(V, [[1, 0]])) == [[(0, 0), (0, 1)], [(1, 0), (1, 1)]]
    assert fibers(make_variable(V, Matrix.zeros(z2, 0, 2))) == [sorted(V.states())]
    assert fibers(make_variable(V, [[1, 0], [0, 1]])) == [[x] for x in sorted(V.states())]


def test_fibers_need_finite_field(qq):
    with pytest.raises(ValueError):
        fibers(make_variable(make_phase_space(qq, 1), [[1, 0]]))


def test_equivalence_examples(z2, z3):
    V3 = make_phase_space(z3, 1)
    assert equivalent(make_variable(V3, [[1, 2]]), make_variable(V3, [[2, 1]]))
    V2 = make_phase_space(z2, 1)
    assert not equivalent(make_variable(V2, [[1, 0]]), make_variable(V2, [[0, 1]]))
    assert equivalent(make_variable(V2, [[1, 1]]), make_variable(V2, [[1, 1], [1, 1]]))


@pytest.mark.parametrize("p", [2, 3])
def test_kernel_equivalence_matches_partition_equality(p):
    V = make_phase_space(Field.prime(p), 1)
    vs = list(all_linear_variables(V, 2))[:60]
    for a in vs:
        for b in vs[::7]:
            assert equivalent(a, b) == same_partition(a, b)


def test_general_variable_partition(z2):
    V = make_phase_space(z2, 1)
    g = GeneralVariable.from_function(V, lambda x: x[0] * x[1])
    assert sorted(map(len, fibers(g))) == [1, 3]


@pytest.mark.parametrize("p,n_poisson,n_all", [(2, 4, 5), (3, 5, 6)])
def test_enumeration_up_to_equivalence(p, n_poisson, n_all):
    V = make_phase_space(Field.prime(p), 1)
    # zero space, p+1 lines (all isotropic), whole plane (not)
    assert len(poisson_variables_up_to_equivalence(V)) == n_poisson
    assert len(linear_variables_up_to_equivalence(V)) == n_all
