import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modfactor.algebra import AlgebraSpec, canonical_basis
from modfactor.cpgns import (
    GnsData,
    LinearMap,
    apply,
    choi,
    choi_spectra,
    gns,
    gns_defect,
    gns_gram_positive,
    gns_minimality,
    identity_map,
    is_cp,
    kraus_decomposition,
    kraus_oracle,
    kraus_says_cp,
    trace_map,
    transpose_map,
)
from modfactor.errors import InvalidInput, NotCP
from modfactor.generators import perturb_non_cp, random_cp
from modfactor.hilbmod import Correspondence, ModuleElement, PresentedModule, module_dim, scalar_gram

from conftest import SPECS

C1 = AlgebraSpec((1,))
M2 = AlgebraSpec((2,))


def scalar_map(t):
    return LinearMap(C1, C1, np.array([[t]], dtype=complex))


def test_apply_examples():
    b = M2.from_rep(np.array([[1, 2], [3, 4]]))
    np.testing.assert_array_equal(apply(identity_map(M2), b).rep(), b.rep())
    np.testing.assert_array_equal(apply(transpose_map(M2), b).rep(), b.rep().T)
    assert apply(trace_map(M2), b).rep()[0, 0] == 5
    with pytest.raises(InvalidInput):
        apply(identity_map(M2), AlgebraSpec((3,)).unit())


def test_from_function_matches_matrix(rng):
    s = AlgebraSpec((1, 2))
    phi = LinearMap.from_function(s, M2, lambda b: M2.from_rep(np.full((2, 2), b.blocks[0][0, 0]) + b.blocks[1]))
    for _ in range(5):
        b = s.random(rng)
        expected = np.full((2, 2), b.blocks[0][0, 0]) + b.blocks[1]
        np.testing.assert_allclose(phi(b).rep(), expected, atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from(SPECS), st.integers(0, 2**31))
def test_linearity(bd, cd, seed):
    B, C = AlgebraSpec(bd), AlgebraSpec(cd)
    rng = np.random.default_rng(seed)
    phi = random_cp(B, C, 2, rng)
    a, b = B.random(rng), B.random(rng)
    z = complex(rng.standard_normal(), rng.standard_normal())
    assert phi(a * z + b).allclose(phi(a) * z + phi(b), atol=1e-12)


def test_choi_identity_m2():
    (Cm,) = choi(identity_map(M2))
    w = np.linalg.eigvalsh(Cm)
    assert np.trace(Cm).real == pytest.approx(2)
    assert np.sum(w > 1e-12) == 1 and w[-1] == pytest.approx(2)


def test_choi_trace_times_unit():
    phi = LinearMap.from_function(M2, M2, lambda b: M2.unit() * complex(np.trace(b.rep())))
    (Cm,) = choi(phi)
    np.testing.assert_allclose(Cm, np.eye(4), atol=1e-15)


def test_choi_transpose_is_swap():
    (Cm,) = choi(transpose_map(M2))
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[i * 2 + j, j * 2 + i] = 1
    np.testing.assert_array_equal(Cm.real, swap)
    assert choi_spectra(transpose_map(M2))[0][0] == pytest.approx(-1, abs=1e-10)
    assert not is_cp(transpose_map(M2))


def test_scalar_maps():
    assert is_cp(scalar_map(2)) and is_cp(scalar_map(0))
    assert not is_cp(scalar_map(-1))
    assert not is_cp(scalar_map(1j))


def test_kraus_identity():
    kd = kraus_oracle(identity_map(M2))
    assert kd.count == 1
    A = kd.operators[0][0]
    np.testing.assert_allclose(A @ A.conj().T, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(A, A[0, 0] * np.eye(2), atol=1e-12)


def test_kraus_depolarizing():
    phi = LinearMap.from_function(M2, M2, lambda b: M2.unit() * complex(np.trace(b.rep()) / 2))
    kd = kraus_oracle(phi)
    assert kd.count == 4 and kd.defect < 1e-12


def test_kraus_rejects_transpose():
    assert not kraus_says_cp(transpose_map(M2))
    assert kraus_decomposition(transpose_map(M2)).defect > 0.5
    with pytest.raises(NotCP):
        kraus_oracle(transpose_map(M2))


def test_gns_scalar_example():
    g = gns(scalar_map(2))
    assert g.corr.module.gram_coords[0, 0, 0] == 2
    assert g.module_dim() == 1
    assert gns_defect(g) == 0


def test_gns_identity_m2():
    g = gns(identity_map(M2))
    assert g.module_dim() == 4
    assert gns_defect(g) < 1e-14


def test_gns_trace_scalar_gram():
    g = gns(trace_map(M2))
    np.testing.assert_allclose(scalar_gram(g.corr.module), np.eye(4), atol=1e-15)


def test_gns_rejects_non_cp():
    with pytest.raises(NotCP):
        gns(transpose_map(M2))


def test_gns_random_batch():
    worst = 0.0
    for seed in range(60):
        B, C = AlgebraSpec(SPECS[seed % 6]), AlgebraSpec(SPECS[(seed // 6) % 6])
        g = gns(random_cp(B, C, 1 + seed % 3, seed))
        worst = max(worst, gns_defect(g))
        assert gns_minimality(g).passed
    assert worst < 1e-12


def test_gns_dimension_bounded_by_choi_rank():
    for seed in range(20):
        B, C = AlgebraSpec((1, 2)), AlgebraSpec((2, 1))
        phi = random_cp(B, C, 1, seed)
        ranks = sum(int(np.sum(w > 1e-9 * max(1, w[-1]))) for w in choi_spectra(phi))
        assert gns(phi).module_dim() <= ranks * C.D


def test_minimality_detects_planted_generator():
    phi = LinearMap.from_function(C1, M2, lambda b: M2.unit() * b.blocks[0][0, 0])
    g = gns(phi)
    assert g.module_dim() == 4 and gns_minimality(g).passed
    gram = np.zeros((2, 2, M2.N), dtype=complex)
    gram[0, 0] = gram[1, 1] = M2.unit_coords
    module = PresentedModule(M2, gram)
    action = np.eye(2)[None, :, :, None] * M2.unit_coords[None, None, None, :]
    corr = Correspondence(module, C1, action)
    zeta = ModuleElement(module, np.concatenate([M2.unit_coords, np.zeros(M2.N)]))
    bigger = GnsData(corr, zeta, phi)
    assert gns_defect(bigger) < 1e-15
    rep = gns_minimality(bigger)
    assert (rep.span_rank, rep.module_rank) == (4, 8) and not rep.passed


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from(SPECS), st.integers(0, 2**31), st.booleans())
def test_three_cp_criteria_agree(bd, cd, seed, perturb):
    B, C = AlgebraSpec(bd), AlgebraSpec(cd)
    phi = random_cp(B, C, 1 + seed % 3, seed)
    if perturb:
        phi = perturb_non_cp(phi, seed)
    verdicts = {is_cp(phi), kraus_says_cp(phi), gns_gram_positive(phi)}
    assert verdicts == {not perturb}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SPECS), st.integers(0, 2**31), st.floats(0.1, 10))
def test_scaling_covariance(bd, seed, t):
    B = AlgebraSpec(bd)
    phi = random_cp(B, M2, 2, seed)
    assert is_cp(phi.scaled(t))
    assert not is_cp(phi.scaled(-t))
    assert gns(phi.scaled(t)).module_dim() == gns(phi).module_dim()


def test_sum_of_cp_is_cp(rng):
    B, C = AlgebraSpec((1, 2)), AlgebraSpec((2,))
    phi = random_cp(B, C, 1, rng) + random_cp(B, C, 2, rng)
    assert is_cp(phi) and gns_defect(gns(phi)) < 1e-12


def test_trace_map_gns_dim(spec):
    assert gns(trace_map(spec)).module_dim() == spec.N
    assert module_dim(gns(identity_map(spec)).corr.module) == spec.N
