import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modfactor.algebra import (
    AlgebraSpec,
    arithmetic,
    canonical_basis,
    conditional_expectation,
    from_blocks,
    is_positive,
    mat_adjoint,
    mat_mul,
    structure_constants,
    to_blocks,
    trace,
)
from modfactor.errors import InvalidInput
from modfactor.numerics import psd_check

from conftest import SPECS, random_matrix


def test_spec_dimensions():
    s = AlgebraSpec((2, 1))
    assert s.N == 5 and s.D == 3
    with pytest.raises(InvalidInput):
        AlgebraSpec(())
    with pytest.raises(InvalidInput):
        AlgebraSpec((2, 0))


def test_unit():
    u = AlgebraSpec((2, 1)).unit()
    np.testing.assert_array_equal(u.blocks[0], np.eye(2))
    np.testing.assert_array_equal(u.blocks[1], [[1]])
    assert trace(u) == 3


def test_involution_and_unit(spec, rng):
    a, b = spec.random(rng), spec.random(rng)
    assert (a.adj().adj() - a).max_norm() == 0
    assert (a * b).adj().allclose(b.adj() * a.adj(), atol=1e-14)
    one = spec.unit()
    assert (one * a - a).max_norm() == 0 and (a * one - a).max_norm() == 0


def test_arithmetic_dispatch(rng):
    s = AlgebraSpec((1, 2))
    a, b = s.random(rng), s.random(rng)
    assert (arithmetic(a, b, "add") - (a + b)).max_norm() == 0
    assert (arithmetic(a, b, "mul") - a * b).max_norm() == 0
    assert (arithmetic(a, None, "adjoint") - a.adj()).max_norm() == 0
    assert (arithmetic(a, 2j, "scale") - 2j * a).max_norm() == 0
    with pytest.raises(InvalidInput):
        arithmetic(a, AlgebraSpec((2,)).unit(), "add")
    with pytest.raises(InvalidInput):
        arithmetic(a, b, "divide")


def test_mul_matches_embedding(spec, rng):
    a, b = spec.random(rng), spec.random(rng)
    np.testing.assert_allclose((a * b).rep(), a.rep() @ b.rep(), atol=1e-13)


def test_positivity(spec, rng):
    a = spec.random(rng)
    assert is_positive(a.adj() * a)
    s = AlgebraSpec((2,))
    assert not is_positive(s.element([np.diag([1.0, -0.1])]))
    assert not is_positive(s.element([[[0, 1], [0, 0]]]))


def test_positivity_matches_eigen_signs(rng):
    s = AlgebraSpec((2, 1))
    for _ in range(50):
        h = s.random(rng, hermitian=True)
        expected = all(np.linalg.eigvalsh(b)[0] >= -1e-9 * max(1, np.linalg.eigvalsh(b)[-1]) for b in h.blocks)
        assert is_positive(h) == expected


def test_trace_basics(spec, rng):
    for i, e in enumerate(canonical_basis(spec)):
        label_diag = trace(e)
        assert label_diag in (0, 1)
    for _ in range(100):
        a = spec.random(rng)
        assert trace(a.adj() * a).real > 0
    a, b = spec.random(rng), spec.random(rng)
    assert abs(trace(a * b) - trace(b * a)) < 1e-12 * (1 + a.max_norm() * b.max_norm())


def test_matrix_units_trace_delta():
    s = AlgebraSpec((2,))
    basis = canonical_basis(s)
    assert [trace(e) for e in basis] == [1, 0, 0, 1]


def test_canonical_basis_order():
    basis = canonical_basis(AlgebraSpec((2,)))
    expected = [np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])]
    for e, m in zip(basis, expected):
        np.testing.assert_array_equal(e.blocks[0], m)
    p, q = canonical_basis(AlgebraSpec((1, 1)))
    assert (p * p - p).max_norm() == 0 and (p * q).max_norm() == 0
    assert ((p + q) - AlgebraSpec((1, 1)).unit()).max_norm() == 0


def test_coordinate_roundtrip(spec, rng):
    a = spec.random(rng)
    basis = canonical_basis(spec)
    rebuilt = spec.zero()
    for c, e in zip(a.coords(), basis):
        rebuilt = rebuilt + complex(c) * e
    assert (rebuilt - a).max_norm() == 0
    assert (spec.from_coords(a.coords()) - a).max_norm() == 0


def test_structure_constants_examples():
    s = AlgebraSpec((2,))
    np.testing.assert_array_equal(structure_constants(s.unit()), np.eye(4))
    E11 = canonical_basis(s)[0]
    L = structure_constants(E11)
    # E11 E12 = E12: column of E12 (index 1) has a one in row 1
    assert L[1, 1] == 1


def test_structure_constants_definition(spec, rng):
    b = spec.random(rng)
    L = structure_constants(b)
    for a, e in enumerate(canonical_basis(spec)):
        np.testing.assert_allclose((b * e).coords(), L[:, a], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPECS), st.integers(0, 2**32 - 1))
def test_structure_constants_multiplicative(dims, seed):
    rng = np.random.default_rng(seed)
    s = AlgebraSpec(dims)
    a, b = s.random(rng), s.random(rng)
    defect = np.max(np.abs(structure_constants(a * b) - structure_constants(a) @ structure_constants(b)))
    assert defect < 1e-12 * (1 + a.max_norm() * b.max_norm())


def test_conditional_expectation_examples():
    s = AlgebraSpec((2, 1))
    e = conditional_expectation(np.ones((3, 3)), s)
    np.testing.assert_array_equal(e.blocks[0], np.ones((2, 2)))
    np.testing.assert_array_equal(e.blocks[1], [[1]])
    a = s.random(np.random.default_rng(0))
    assert (conditional_expectation(a.rep(), s) - a).max_norm() == 0
    assert (conditional_expectation(np.eye(3), s) - s.unit()).max_norm() == 0
    with pytest.raises(InvalidInput):
        conditional_expectation(np.eye(2), s)


def test_conditional_expectation_positive(rng):
    s = AlgebraSpec((1, 2))
    for _ in range(100):
        A = random_matrix(rng, 3)
        M = A @ A.conj().T
        assert psd_check(M)
        assert is_positive(conditional_expectation(M, s))


def test_matrices_over_algebra(rng):
    s = AlgebraSpec((1, 2))
    X = rng.standard_normal((2, 3, s.N)) + 1j * rng.standard_normal((2, 3, s.N))
    Y = rng.standard_normal((3, 2, s.N)) + 1j * rng.standard_normal((3, 2, s.N))
    np.testing.assert_allclose(from_blocks(s, to_blocks(s, X), 2, 3), X)
    P = mat_mul(s, X, Y)
    for i in range(2):
        for j in range(2):
            ref = s.zero()
            for m in range(3):
                ref = ref + s.from_coords(X[i, m]) * s.from_coords(Y[m, j])
            assert (s.from_coords(P[i, j]) - ref).max_norm() < 1e-13
    Xa = mat_adjoint(s, X)
    assert (s.from_coords(Xa[2, 1]) - s.from_coords(X[1, 2]).adj()).max_norm() == 0
