"""Factorization of phi-maps through the GNS correspondence.

A complex-linear ``T: E -> F`` is a phi-map when
``<T x, T x'> = phi(<x, x'>)``.  For completely positive phi, ``T``
factors as ``x -> v(x (.) zeta)`` with (F_phi, zeta) the GNS data of phi
and ``v: E (.) F_phi -> F`` an isometry defined on spanning vectors by

    (x (.) b zeta) c  ->  T(x b) c.

Conversely every such composite is a phi-map for ``phi = <zeta, . zeta>``.

The second half builds, for ``F = B(H1, H2)``, the dilation data
``K1 = F_phi (.) H1``, ``K2 = E (.) K1``, ``rho``, ``Psi``, ``V`` and
``W* = v (.) id``.  Since ``v (.) id`` maps K2 into H2, ``W*`` is an
isometry ``K2 -> H2`` and ``W`` is the corresponding coisometry
(``W W* = I`` on K2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import adjoint_coords, canonical_basis, right_multiplication, structure_constants
from .cpgns import GnsData, LinearMap, gns, is_cp
from .errors import (
    Inconsistent,
    InvalidInput,
    NotCP,
    NotFull,
    NotIsometry,
    NotPhiMap,
    WellDefinednessFailure,
    WrongShape,
)
from .hilbmod import (
    ModuleElement,
    ModuleMap,
    PresentedModule,
    TensorModule,
    as_matrix_module,
    column_space,
    hilbert_frame,
    interior_tensor,
    left_act,
    module_dim,
    null_defects,
    null_space,
    pairwise_inner,
    tensor_coords,
    tensor_correspondence,
)
from .numerics import DEFAULT, NumericConfig, lstsq, max_abs, rank_kernel


@dataclass
class PhiMapReport:
    max_defect: float
    passed: bool


def _check_algebras(T: ModuleMap, phi: LinearMap):
    if T.domain.algebra != phi.domain or T.codomain.algebra != phi.codomain:
        raise InvalidInput(
            f"T maps a {T.domain.algebra}-module to a {T.codomain.algebra}-module "
            f"but phi maps {phi.domain} -> {phi.codomain}"
        )


def _domain_inner(E: PresentedModule) -> np.ndarray:
    return pairwise_inner(E, np.eye(E.free_dim))


def phi_map_defect(T: ModuleMap, phi: LinearMap) -> float:
    _check_algebras(T, phi)
    lhs = pairwise_inner(T.codomain, T.matrix.T)
    rhs = _domain_inner(T.domain) @ phi.matrix.T
    return max_abs(lhs - rhs)


def is_phi_map(T: ModuleMap, phi: LinearMap, cfg: NumericConfig = DEFAULT) -> PhiMapReport:
    d = phi_map_defect(T, phi)
    return PhiMapReport(d, d <= cfg.verify_tol)


def infer_phi(T: ModuleMap, cfg: NumericConfig = DEFAULT) -> LinearMap:
    """Solve ``phi(<x_a, x_b>) = <T x_a, T x_b>`` over free basis pairs.

    phi is determined only when the inner products span the whole algebra.
    """
    E, F = T.domain, T.codomain
    B, C = E.algebra, F.algebra
    ips = _domain_inner(E).reshape(-1, B.N)
    vals = pairwise_inner(F, T.matrix.T).reshape(-1, C.N)
    rank = rank_kernel(ips.conj().T @ ips, cfg)[0] if ips.size else 0
    if rank < B.N:
        raise NotFull(f"inner products span a {rank}-dimensional subspace of {B} (dimension {B.N})")
    X, residual = lstsq(ips, vals, cfg)
    if residual > cfg.verify_tol:
        raise Inconsistent(f"least-squares residual {residual:.3g}: T is not a phi-map for any phi")
    return LinearMap(B, C, X.T)


@dataclass
class Factorization:
    gns: GnsData
    tensor: TensorModule
    v: ModuleMap
    defects: dict
    dims: dict
    tol: float

    @property
    def isometry_defect(self) -> float:
        return self.defects["isometry_defect"]

    @property
    def reconstruction_defect(self) -> float:
        return self.defects["reconstruction_defect"]

    @property
    def passed(self) -> bool:
        return all(d <= self.tol for d in self.defects.values())


def _isometry_on_spanning_vectors(T: ModuleMap, tensor: TensorModule) -> np.ndarray:
    """Matrix of ``(e_i (.) b_a zeta) c_b -> T(e_i b_a) c_b``."""
    F = T.codomain
    C = F.algebra
    m = T.domain.free_dim
    Tvals = T.matrix.T.reshape(m, F.k, C.N)
    cols = np.empty((m, C.N, F.k, C.N), dtype=complex)
    for beta, c in enumerate(canonical_basis(C)):
        cols[:, beta] = Tvals @ right_multiplication(c).T
    return cols.reshape(tensor.free_dim, F.free_dim).T


def factorize(T: ModuleMap, phi: LinearMap, cfg: NumericConfig = DEFAULT) -> Factorization:
    _check_algebras(T, phi)
    if not is_cp(phi, cfg):
        raise NotCP("phi is not completely positive")
    report = is_phi_map(T, phi, cfg)
    if not report.passed:
        raise NotPhiMap(f"T is not a phi-map (defect {report.max_defect:.3g})")

    g = gns(phi, cfg)
    E, F = T.domain, T.codomain
    tensor = interior_tensor(E, g.corr, cfg)
    v = ModuleMap(tensor, F, _isometry_on_spanning_vectors(T, tensor))

    kernel = v.kernel_defect(cfg)
    if kernel > cfg.verify_tol:
        raise WellDefinednessFailure(f"v does not vanish on null vectors (defect {kernel:.3g})")

    xz = tensor_coords(tensor, np.eye(E.free_dim), g.zeta.coords)[:, 0, :]
    diff = (v.matrix @ xz.T - T.matrix).T
    # trace norm sqrt(trace <d, d>) of T(x) - v(x (.) zeta) over the free basis of E
    recon = float(np.sqrt(max(np.max(null_defects(F, diff)), 0.0))) if diff.size else 0.0

    defects = {
        "isometry_defect": v.isometry_defect(),
        "reconstruction_defect": recon,
        "well_definedness_defect": max(kernel, 0.0),
    }
    dims = {
        "F_corr": module_dim(g.corr.module, cfg),
        "tensor": module_dim(tensor, cfg),
        "F": module_dim(F, cfg),
    }
    return Factorization(g, tensor, v, defects, dims, cfg.verify_tol)


def cp_map_of_vector(corr, zeta: ModuleElement) -> LinearMap:
    """``b -> <zeta, b zeta>``."""
    B = corr.left_algebra
    bz = np.stack([left_act(corr, b, zeta).coords for b in canonical_basis(B)])
    vals = pairwise_inner(corr.module, zeta.coords[None, :], bz)[0]
    return LinearMap(B, corr.module.algebra, vals.T)


def from_factorization(F_corr, zeta: ModuleElement, v: ModuleMap, E: PresentedModule, cfg: NumericConfig = DEFAULT):
    """Assemble ``T = v(id (.) zeta)`` and ``phi = <zeta, . zeta>``."""
    if not zeta.module.same_as(F_corr.module):
        raise InvalidInput("zeta is not an element of the correspondence")
    tensor = interior_tensor(E, F_corr, cfg)
    if not v.domain.same_as(tensor):
        raise InvalidInput("v is not defined on E (.) F")
    iso = v.isometry_defect()
    if iso > cfg.verify_tol:
        raise NotIsometry(f"v is not an isometry (defect {iso:.3g})")
    xz = tensor_coords(tensor, np.eye(E.free_dim), zeta.coords)[:, 0, :]
    T = ModuleMap(E, v.codomain, v.matrix @ xz.T)
    return T, cp_map_of_vector(F_corr, zeta)


# dilation data for F = B(H1, H2)

@dataclass
class StinespringData:
    """Concrete dilation data.

    Matrices act on orthonormal coordinates of the quotients of K1 and K2;
    ``rho[a]`` is the image of the a-th basis element of the domain algebra,
    ``Psi[j]`` the image of the j-th free basis vector of E.
    """

    H1_dim: int
    H2_dim: int
    K1: PresentedModule
    K2: PresentedModule
    rho: np.ndarray
    Psi: np.ndarray
    V: np.ndarray
    Wstar: np.ndarray
    defects: dict = field(default_factory=dict)

    @property
    def K1_dim(self) -> int:
        return self.rho.shape[1]

    @property
    def K2_dim(self) -> int:
        return self.Psi.shape[1]

    @property
    def W(self) -> np.ndarray:
        return self.Wstar.conj().T


def stinespring(T: ModuleMap, phi: LinearMap, cfg: NumericConfig = DEFAULT) -> StinespringData:
    C = T.codomain.algebra
    if len(C.block_dims) != 1:
        raise WrongShape(f"the coefficient algebra must be a single matrix block, got {C}")
    F = as_matrix_module(T.codomain)
    if F is None:
        raise WrongShape("the codomain is not a matrix module B(H1, H2)")
    d1, d2 = F.cols, F.rows

    fac = factorize(T, phi, cfg)
    E = T.domain
    B = E.algebra
    K1corr = tensor_correspondence(fac.gns.corr, column_space(d1), cfg)
    K1 = K1corr.module
    K2 = interior_tensor(E, K1corr, cfg)
    J1, Q1 = hilbert_frame(K1, cfg)
    J2, Q2 = hilbert_frame(K2, cfg)

    rho = np.stack([J1 @ K1corr.action[a][:, :, 0] @ Q1 for a in range(B.N)])
    zh = tensor_coords(K1, fac.gns.zeta.coords, np.eye(d1))[0]
    V = J1 @ zh.T
    xk = tensor_coords(K2, np.eye(E.free_dim), np.eye(K1.k))
    Psi = np.stack([J2 @ M.T @ Q1 for M in xk])

    # v on the generators of E (.) F_phi, then (.) e_j gives column j of the operator
    gens = np.zeros((fac.tensor.free_dim, fac.tensor.k), dtype=complex)
    for t in range(fac.tensor.k):
        gens[:, t] = fac.tensor.generator(t).coords
    ops = F.to_operator_coords((fac.v.matrix @ gens).T)  # (kE N_B, d2, d1)
    Wcoef = ops.transpose(1, 0, 2).reshape(d2, -1)
    Wstar = Wcoef @ Q2

    s = StinespringData(d1, d2, K1, K2, rho, Psi, V, Wstar)
    s.defects = stinespring_defects(s, T, phi, cfg)
    K = null_space(K2, cfg)
    s.defects["wstar_kernel_defect"] = max_abs(Wcoef @ K) if K.size else 0.0
    return s


def stinespring_defects(s: StinespringData, T: ModuleMap, phi: LinearMap, cfg: NumericConfig = DEFAULT) -> dict:
    F = as_matrix_module(T.codomain)
    if F is None:
        raise WrongShape("the codomain is not a matrix module B(H1, H2)")
    E = T.domain
    B = E.algebra
    Tops = F.to_operator_coords(T.matrix.T)
    if s.Psi.shape[0] != E.free_dim or s.rho.shape[0] != B.N:
        raise InvalidInput("dilation data does not match T")
    recon = max_abs(Tops - np.einsum("hk,xkl,lj->xhj", s.Wstar, s.Psi, s.V))
    coiso = max_abs(s.Wstar.conj().T @ s.Wstar - np.eye(s.K2_dim))
    phi1 = phi.codomain.from_coords(phi.matrix @ B.unit_coords).rep()
    vv = max_abs(s.V.conj().T @ s.V - phi1)

    rho_of = lambda coords: np.tensordot(coords, s.rho, axes=(0, 0))
    unital = max_abs(rho_of(B.unit_coords) - np.eye(s.K1_dim))
    mult = star = 0.0
    stars = adjoint_coords(B, np.eye(B.N))
    for a, b_a in enumerate(canonical_basis(B)):
        L = structure_constants(b_a)
        for b in range(B.N):
            mult = max(mult, max_abs(rho_of(L[:, b]) - s.rho[a] @ s.rho[b]))
        star = max(star, max_abs(rho_of(stars[a]) - s.rho[a].conj().T))

    ips = _domain_inner(E)
    lhs = np.einsum("xki,ykj->xyij", s.Psi.conj(), s.Psi)
    rhs = np.tensordot(ips, s.rho, axes=([2], [0]))
    psi = max_abs(lhs - rhs)
    return {
        "reconstruction_defect": recon,
        "coisometry_defect": coiso,
        "VstarV_defect": vv,
        "rho_unital_defect": unital,
        "rho_mult_defect": mult,
        "rho_adjoint_defect": star,
        "psi_inner_defect": psi,
    }


@dataclass
class CyclicityReport:
    cyclic_rank: int
    K1_dim: int
    nondegenerate_rank: int
    K2_dim: int

    @property
    def stinespring_cyclic(self) -> bool:
        return self.cyclic_rank == self.K1_dim

    @property
    def nondegenerate(self) -> bool:
        return self.nondegenerate_rank == self.K2_dim


def _span_rank(cols: np.ndarray, cfg) -> int:
    if cols.size == 0:
        return 0
    return rank_kernel(cols @ cols.conj().T, cfg)[0]


def cyclicity_check(s: StinespringData, cfg: NumericConfig = DEFAULT) -> CyclicityReport:
    rv = np.concatenate([r @ s.V for r in s.rho], axis=1)
    pk = np.concatenate(list(s.Psi), axis=1)
    return CyclicityReport(_span_rank(rv, cfg), s.K1_dim, _span_rank(pk, cfg), s.K2_dim)


def pad_k2(s: StinespringData) -> StinespringData:
    """Enlarge K2 by one dimension orthogonal to everything (planted defect)."""
    g = s.K2.gram_coords
    k = g.shape[0]
    gram = np.zeros((k + 1, k + 1, 1), dtype=complex)
    gram[:k, :k] = g
    gram[k, k, 0] = 1.0
    K2 = PresentedModule(s.K2.algebra, gram)
    Psi = np.concatenate([s.Psi, np.zeros((s.Psi.shape[0], 1, s.Psi.shape[2]))], axis=1)
    Wstar = np.concatenate([s.Wstar, np.zeros((s.Wstar.shape[0], 1))], axis=1)
    return StinespringData(s.H1_dim, s.H2_dim, s.K1, K2, s.rho, Psi, s.V, Wstar)
