"""Seeded random instances.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``, whose
output stream is platform independent, so a fixed seed and fixed specs
give identical instances everywhere.
"""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraSpec, mat_adjoint, mat_mul
from .cpgns import LinearMap, choi, gns
from .errors import InvalidInput
from .hilbmod import (
    MatrixModule,
    ModuleMap,
    PresentedModule,
    embed_free,
    free_module,
    interior_tensor,
    tensor_coords,
)
from .numerics import DEFAULT, NumericConfig, range_basis

# specs with dimension <= 9, used by the batch generators
SMALL_SPECS = [(1,), (2,), (3,), (1, 1), (1, 2), (2, 1), (1, 1, 1), (2, 2), (1, 1, 2)]


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n: int, rng) -> np.ndarray:
    Q, R = np.linalg.qr(_gaussian(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def random_cp(B: AlgebraSpec, C: AlgebraSpec, rank: int, seed) -> LinearMap:
    """``b -> E_C(V* (rep(b) (x) I_rank) V)`` for a Gaussian ``V`` of shape ``(D_B rank, D_C)``."""
    if rank < 1:
        raise InvalidInput("rank must be >= 1")
    rng = make_rng(seed)
    V = _gaussian(rng, (B.D * rank, C.D)) / np.sqrt(2 * B.D * rank)
    eye = np.eye(rank)
    vals = []
    for e in np.eye(B.N):
        M = V.conj().T @ np.kron(B.from_coords(e).rep(), eye) @ V
        vals.append(C.from_rep(M))
    return LinearMap.from_values(B, C, vals)


def random_module(B: AlgebraSpec, k: int, seed, rows=None) -> PresentedModule:
    """Submodule of ``B^rows`` spanned by k random vectors; Gram ``X* X``.

    With fewer rows than generators the module has a nontrivial null space.
    """
    rng = make_rng(seed)
    rows = rows if rows is not None else int(rng.integers(1, k + 1))
    X = np.stack([[B.random(rng).coords() for _ in range(k)] for _ in range(rows)])
    G = mat_mul(B, mat_adjoint(B, X), X)
    return PresentedModule(B, G)


def _padded_isometry(v: ModuleMap, pad: int, rng) -> ModuleMap:
    """Append ``pad`` zero coordinates and mix generators with a random unitary."""
    C = v.codomain.algebra
    k = v.codomain.k
    F = free_module(C, k + pad)
    M = np.zeros((k + pad, C.N, v.domain.free_dim), dtype=complex)
    M[:k] = v.matrix.reshape(k, C.N, -1)
    U = random_unitary(k + pad, rng)
    M = np.tensordot(U, M, axes=(1, 0))
    return ModuleMap(v.domain, F, M.reshape(F.free_dim, -1))


def random_phi_map(E: PresentedModule, C: AlgebraSpec, rank: int, pad: int, seed, cfg: NumericConfig = DEFAULT):
    """A phi-map ``T = v(id (.) zeta)`` into a free module with ``pad`` spare generators.

    Returns ``(T, phi, F)``.
    """
    rng = make_rng(seed)
    phi = random_cp(E.algebra, C, rank, rng)
    g = gns(phi, cfg)
    tensor = interior_tensor(E, g.corr, cfg)
    v = _padded_isometry(embed_free(tensor, cfg), pad, rng)
    xz = tensor_coords(tensor, np.eye(E.free_dim), g.zeta.coords)[:, 0, :]
    T = ModuleMap(E, v.codomain, v.matrix @ xz.T)
    return T, phi, v.codomain


def random_factorization(E: PresentedModule, C: AlgebraSpec, rank: int, pad: int, seed, cfg: NumericConfig = DEFAULT):
    """A random triple ``(F_corr, zeta, v)`` with v an isometry on ``E (.) F_corr``.

    The correspondence is the GNS module of a random CP map, but zeta is a
    random vector in it rather than the cyclic one.
    """
    rng = make_rng(seed)
    corr = gns(random_cp(E.algebra, C, rank, rng), cfg).corr
    zeta = corr.module.random_element(rng)
    tensor = interior_tensor(E, corr, cfg)
    v = _padded_isometry(embed_free(tensor, cfg), pad, rng)
    return corr, zeta, v


def matrix_realization(module: PresentedModule, cfg: NumericConfig = DEFAULT):
    """Isometric realization of a module over ``M_n`` inside ``M_{r x n}``.

    Returns ``(W, r)`` where ``W`` (r x k n) sends the stacked coefficient
    block of an element to its operator.
    """
    if len(module.algebra.block_dims) != 1:
        raise InvalidInput("matrix realization needs a single-block algebra")
    w, U = range_basis(module.gram_blocks[0], cfg)
    return np.sqrt(w)[:, None] * U.conj().T, len(w)


def random_operator_phi_map(E: PresentedModule, d1: int, rank: int, pad: int, seed, cfg: NumericConfig = DEFAULT):
    """A phi-map into ``B(C^d1, C^d2)`` with ``d2 = dim K2 + pad``.

    Returns ``(T, phi, F)`` with F a MatrixModule.
    """
    rng = make_rng(seed)
    C = AlgebraSpec((d1,))
    phi = random_cp(E.algebra, C, rank, rng)
    g = gns(phi, cfg)
    tensor = interior_tensor(E, g.corr, cfg)
    W, r = matrix_realization(tensor, cfg)
    d2 = max(r + pad, 1)
    Y = random_unitary(d2, rng)[:, :r]
    F = MatrixModule(d2, d1)
    k = tensor.k
    blocks = np.eye(tensor.free_dim).reshape(-1, k, d1, d1).reshape(-1, k * d1, d1)
    cols = [F.from_operator(Y @ W @ X).coords for X in blocks]
    v = ModuleMap(tensor, F, np.stack(cols, axis=1))
    xz = tensor_coords(tensor, np.eye(E.free_dim), g.zeta.coords)[:, 0, :]
    T = ModuleMap(E, F, v.matrix @ xz.T)
    return T, phi, F


def perturb_non_cp(phi: LinearMap, seed, margin: float = 0.5) -> LinearMap:
    """Subtract a rank-one CP map large enough to make some Choi block indefinite.

    With ``a`` the unit Choi vector of ``b -> A b A*`` on one domain block,
    ``<a| C(phi - c psi) |a> <= lambda_max - c = -margin``.
    """
    rng = make_rng(seed)
    B, C = phi.domain, phi.codomain
    s = int(rng.integers(len(B.block_dims)))
    t = int(rng.integers(len(C.block_dims)))
    n, m, o = B.block_dims[s], C.block_dims[t], C.rep_offsets[t]
    A = np.zeros((C.D, n), dtype=complex)
    A[o:o + m] = _gaussian(rng, (m, n))
    A /= np.linalg.norm(A)
    top = np.linalg.eigvalsh(choi(phi)[s])[-1]
    c = max(top, 0.0) + margin
    cols = phi.matrix.copy()
    for e_idx in range(n * n):
        p, q = divmod(e_idx, n)
        E = np.zeros((n, n), dtype=complex)
        E[p, q] = 1.0
        cols[:, B.offsets[s] + e_idx] -= c * C.from_rep(A @ E @ A.conj().T).coords()
    return LinearMap(B, C, cols)


def pick_spec(rng, specs=SMALL_SPECS) -> AlgebraSpec:
    return AlgebraSpec(specs[int(rng.integers(len(specs)))])
