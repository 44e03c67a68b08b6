import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modfactor.algebra import AlgebraSpec
from modfactor.cpgns import LinearMap, gns, identity_map, is_cp, trace_map
from modfactor.errors import (
    Inconsistent,
    InvalidInput,
    NotCP,
    NotFull,
    NotIsometry,
    NotPhiMap,
    WrongShape,
)
from modfactor.factor import (
    cyclicity_check,
    factorize,
    from_factorization,
    infer_phi,
    is_phi_map,
    pad_k2,
    phi_map_defect,
    stinespring,
    stinespring_defects,
)
from modfactor.generators import (
    SMALL_SPECS,
    make_rng,
    perturb_non_cp,
    random_factorization,
    random_module,
    random_operator_phi_map,
    random_phi_map,
)
from modfactor.hilbmod import ModuleElement, pairwise_inner, ModuleMap, PresentedModule, free_module, matrix_module, module_dim

C1 = AlgebraSpec((1,))
M2 = AlgebraSpec((2,))


def scalar_problem():
    E = free_module(C1, 1)
    return ModuleMap(E, E, [[np.sqrt(2.0)]]), LinearMap(C1, C1, [[2.0]])


def identity_dilation():
    E, F = free_module(M2, 1), matrix_module(2, 2)
    cols = [F.from_operator(M2.from_coords(e).rep()).coords for e in np.eye(4)]
    return ModuleMap(E, F, np.stack(cols, axis=1)), identity_map(M2)


def instance(seed, pad=1):
    rng = make_rng(seed)
    B = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    C = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    E = random_module(B, int(rng.integers(1, 4)), rng)
    return random_phi_map(E, C, int(rng.integers(1, 3)), pad, rng)


def test_phi_map_examples():
    T, phi = scalar_problem()
    assert is_phi_map(T, phi).passed
    rep = is_phi_map(T.scaled(2.0), phi)
    assert not rep.passed and rep.max_defect == pytest.approx(6.0)
    zero = ModuleMap(T.domain, T.codomain, [[0.0]])
    assert is_phi_map(zero, LinearMap(C1, C1, [[0.0]])).passed


def test_phi_map_scaling_defect():
    # <2Tx, 2Ty> - phi<x, y> = 3 phi<x, y>, so the defect triples
    for seed in range(5):
        T, phi, _ = instance(seed)
        assert phi_map_defect(T, phi) < 1e-10
        expected = 3 * np.max(np.abs(pairwise_inner(T.codomain, T.matrix.T)))
        assert phi_map_defect(T.scaled(2.0), phi) == pytest.approx(expected, rel=1e-9)


def test_phi_map_algebra_mismatch():
    T, _ = scalar_problem()
    with pytest.raises(InvalidInput):
        is_phi_map(T, identity_map(M2))


def test_infer_phi_recovers_planted_map():
    for seed in range(10):
        rng = make_rng(seed)
        B = AlgebraSpec(SMALL_SPECS[seed % len(SMALL_SPECS)])
        E = free_module(B, 1)
        T, phi, _ = random_phi_map(E, M2, 2, 1, rng)
        np.testing.assert_allclose(infer_phi(T).matrix, phi.matrix, atol=1e-10)


def test_infer_phi_not_full():
    Z = PresentedModule(M2, np.zeros((1, 1, 4)))
    with pytest.raises(NotFull):
        infer_phi(ModuleMap(Z, free_module(M2, 1), np.zeros((4, 4))))
    # a full row module is enough: c* E11 c' spans M2
    row = matrix_module(1, 2)
    T = ModuleMap(row, free_module(M2, 1), np.zeros((4, row.free_dim)))
    np.testing.assert_allclose(infer_phi(T).matrix, 0, atol=1e-12)
    # a scalar module over C + C inner-products only into the first summand
    half = PresentedModule(AlgebraSpec((1, 1)), np.array([[[1.0, 0.0]]]))
    with pytest.raises(NotFull):
        infer_phi(ModuleMap(half, free_module(C1, 1), np.zeros((1, 2))))


def test_infer_phi_inconsistent():
    E = free_module(C1, 2)
    T = ModuleMap(E, free_module(C1, 1), [[1.0, 1.0]])  # <Te1, Te2> = 1 but <e1, e2> = 0
    with pytest.raises(Inconsistent):
        infer_phi(T)


def test_factorize_scalar_example():
    T, phi = scalar_problem()
    f = factorize(T, phi)
    assert f.passed
    H = f.tensor.gram_coords[0, 0, 0].real
    assert H == pytest.approx(2.0)
    assert abs(f.v.matrix[0, 0]) / np.sqrt(H) == pytest.approx(1.0)
    assert f.dims == {"F_corr": 1, "tensor": 1, "F": 1}


def test_factorize_identity_dilation():
    T, phi = identity_dilation()
    f = factorize(T, phi)
    assert f.passed and f.dims["tensor"] == 4


@pytest.mark.parametrize("seed", range(25))
def test_factorize_round_trip(seed):
    T, phi, _ = instance(seed)
    f = factorize(T, phi)
    assert f.isometry_defect < 1e-9
    assert f.reconstruction_defect < 1e-9
    assert f.defects["well_definedness_defect"] < 1e-9
    # an isometry cannot shrink the quotient dimension
    assert f.dims["tensor"] <= f.dims["F"]


def test_factorize_rejects_non_phi_map():
    T, phi, _ = instance(3)
    with pytest.raises(NotPhiMap):
        factorize(T.scaled(1.5), phi)


def test_factorize_rejects_non_cp():
    T, phi, _ = instance(4)
    with pytest.raises(NotCP):
        factorize(T, perturb_non_cp(phi, 4))


@pytest.mark.parametrize("seed", range(25))
def test_from_factorization(seed):
    rng = make_rng(seed + 1000)
    B = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    C = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    E = random_module(B, int(rng.integers(1, 4)), rng)
    corr, zeta, v = random_factorization(E, C, int(rng.integers(1, 3)), int(rng.integers(0, 3)), rng)
    T, phi = from_factorization(corr, zeta, v, E)
    assert phi_map_defect(T, phi) < 1e-10
    assert is_cp(phi)


def test_from_factorization_zero_vector():
    E = random_module(M2, 2, 0)
    corr, zeta, v = random_factorization(E, C1, 1, 0, 0)
    T, phi = from_factorization(corr, corr.module.zero(), v, E)
    assert np.max(np.abs(T.matrix)) == 0 and np.max(np.abs(phi.matrix)) == 0


def test_from_factorization_rejects_non_isometry():
    E = random_module(M2, 2, 0)
    corr, zeta, v = random_factorization(E, C1, 1, 0, 0)
    with pytest.raises(NotIsometry):
        from_factorization(corr, zeta, v.scaled(2.0), E)


def test_round_trip_through_factorization():
    T, phi, _ = instance(11)
    f = factorize(T, phi)
    T2, phi2 = from_factorization(f.gns.corr, f.gns.zeta, f.v, T.domain)
    np.testing.assert_allclose(phi2.matrix, phi.matrix, atol=1e-10)
    diff = ModuleElement(T.codomain, (T2.matrix - T.matrix)[:, 0])
    assert diff.null_defect() < 1e-18


def test_stinespring_identity():
    T, phi = identity_dilation()
    s = stinespring(T, phi)
    assert s.K1_dim == 2
    np.testing.assert_allclose(s.V.conj().T @ s.V, np.eye(2), atol=1e-12)
    assert max(s.defects.values()) < 1e-10
    c = cyclicity_check(s)
    assert c.stinespring_cyclic and c.nondegenerate


def test_stinespring_scalar():
    T, phi = scalar_problem()
    s = stinespring(T, phi)
    assert (s.H1_dim, s.H2_dim, s.K1_dim, s.K2_dim) == (1, 1, 1, 1)
    assert abs(s.V[0, 0]) ** 2 == pytest.approx(2.0)
    assert max(s.defects.values()) < 1e-12


@pytest.mark.parametrize("seed", range(15))
def test_stinespring_random(seed):
    rng = make_rng(seed)
    B = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    E = random_module(B, int(rng.integers(1, 3)), rng)
    T, phi, F = random_operator_phi_map(E, int(rng.integers(1, 4)), int(rng.integers(1, 3)), int(rng.integers(0, 2)), rng)
    s = stinespring(T, phi)
    assert max(s.defects.values()) < 1e-8, s.defects
    c = cyclicity_check(s)
    assert c.stinespring_cyclic and c.nondegenerate
    assert s.K2_dim <= s.H2_dim


def test_stinespring_wrong_shape():
    T, phi, _ = random_phi_map(free_module(C1, 1), AlgebraSpec((1, 1)), 1, 0, 0)
    with pytest.raises(WrongShape):
        stinespring(T, phi)
    T, phi, _ = random_phi_map(free_module(M2, 1), M2, 1, 1, 0)
    with pytest.raises(WrongShape):
        stinespring(T, phi)


def test_padded_k2_is_degenerate():
    T, phi = identity_dilation()
    s = pad_k2(stinespring(T, phi))
    c = cyclicity_check(s)
    assert c.stinespring_cyclic and not c.nondegenerate
    assert stinespring_defects(s, T, phi)["coisometry_defect"] == pytest.approx(1.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.2, 5.0))
def test_factorization_scales_with_phi(seed, t):
    # T is a phi-map iff sqrt(t) T is a (t phi)-map
    T, phi, _ = instance(seed % 1000)
    assert is_phi_map(T.scaled(np.sqrt(t)), phi.scaled(t)).passed
    assert factorize(T.scaled(np.sqrt(t)), phi.scaled(t)).passed


def test_module_dims_consistent():
    T, phi, F = instance(5, pad=2)
    f = factorize(T, phi)
    assert f.dims["F"] == module_dim(F)
    assert f.dims["F_corr"] == gns(phi).module_dim()


@pytest.mark.parametrize("seed", range(10))
def test_factorize_after_from_factorization(seed):
    rng = make_rng(seed + 500)
    B = AlgebraSpec(SMALL_SPECS[int(rng.integers(len(SMALL_SPECS)))])
    E = random_module(B, int(rng.integers(1, 3)), rng)
    corr, zeta, v = random_factorization(E, M2, 2, 1, rng)
    T, phi = from_factorization(corr, zeta, v, E)
    f = factorize(T, phi)
    assert f.passed
    # the rebuilt correspondence is the minimal one, never larger than the input
    assert f.dims["F_corr"] == gns(phi).module_dim() <= module_dim(corr.module)
