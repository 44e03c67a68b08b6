"""Linear maps between block algebras, complete positivity, and Paschke's GNS.

Choi convention: for the domain block i of size n,

    C_i = sum_{j,k} E_jk (x) rep(phi(E_jk))

so that ``phi(E_jk) = (<j| (x) I) C_i (|k> (x) I)``.  A map on a direct sum
is CP iff each of these blocks is positive semidefinite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, AlgebraSpec, adjoint_coords, structure_constants, to_blocks
from .errors import InvalidInput, NotCP
from .hilbmod import (
    Correspondence,
    ModuleElement,
    PresentedModule,
    left_act,
    module_dim,
    pairwise_inner,
    right_act,
    scalar_gram,
)
from .numerics import DEFAULT, NumericConfig, herm_eig, max_abs, psd_check, rank_kernel


class LinearMap:
    """Linear map between algebras, stored as an ``N_C x N_B`` coordinate matrix."""

    def __init__(self, domain: AlgebraSpec, codomain: AlgebraSpec, matrix):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (codomain.N, domain.N):
            raise InvalidInput(f"map matrix must have shape {(codomain.N, domain.N)}, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInput("map has non-finite entries")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @classmethod
    def from_values(cls, domain, codomain, values):
        if len(values) != domain.N:
            raise InvalidInput(f"a map on {domain} needs {domain.N} values, got {len(values)}")
        for v in values:
            if v.spec != codomain:
                raise InvalidInput("map value is not in the codomain")
        return cls(domain, codomain, np.stack([v.coords() for v in values], axis=1))

    @classmethod
    def from_function(cls, domain, codomain, f):
        """Tabulate ``f`` (AlgebraElement -> AlgebraElement) on the canonical basis."""
        eye = np.eye(domain.N)
        return cls.from_values(domain, codomain, [f(domain.from_coords(e)) for e in eye])

    @property
    def values(self) -> list:
        return [self.codomain.from_coords(self.matrix[:, a]) for a in range(self.domain.N)]

    def __call__(self, b: AlgebraElement) -> AlgebraElement:
        return apply(self, b)

    def __sub__(self, other):
        return LinearMap(self.domain, self.codomain, self.matrix - other.matrix)

    def __add__(self, other):
        return LinearMap(self.domain, self.codomain, self.matrix + other.matrix)

    def scaled(self, t):
        return LinearMap(self.domain, self.codomain, t * self.matrix)

    def __repr__(self):
        return f"LinearMap({self.domain} -> {self.codomain})"


def apply(phi: LinearMap, b: AlgebraElement) -> AlgebraElement:
    if b.spec != phi.domain:
        raise InvalidInput(f"element of {b.spec} is not in the domain {phi.domain}")
    return phi.codomain.from_coords(phi.matrix @ b.coords())


def identity_map(spec: AlgebraSpec) -> LinearMap:
    return LinearMap(spec, spec, np.eye(spec.N))


def transpose_map(spec: AlgebraSpec) -> LinearMap:
    return LinearMap(spec, spec, adjoint_coords(spec, np.eye(spec.N)).conj())


def trace_map(spec: AlgebraSpec) -> LinearMap:
    scalars = AlgebraSpec((1,))
    return LinearMap(spec, scalars, spec.unit_coords.conj()[None, :])


def choi(phi: LinearMap) -> list:
    B, C = phi.domain, phi.codomain
    D = C.D
    blocks = []
    for sl, n in zip(B.block_slices(), B.block_dims):
        Cm = np.zeros((n * D, n * D), dtype=complex)
        for j in range(n):
            for k in range(n):
                val = C.from_coords(phi.matrix[:, sl.start + j * n + k]).rep()
                Cm[j * D:(j + 1) * D, k * D:(k + 1) * D] = val
        blocks.append(Cm)
    return blocks


def choi_spectra(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> list:
    return [herm_eig(C, cfg)[0] for C in choi(phi)]


def is_cp(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> bool:
    try:
        return all(psd_check(C, cfg) for C in choi(phi))
    except InvalidInput:
        # a non-Hermitian Choi block means phi is not even Hermitian-preserving
        return False


@dataclass
class KrausDecomposition:
    """Kraus operators per domain block and the reconstruction defects.

    ``operators[i]`` holds ``D_C x n_i`` matrices with
    ``rep(phi(b)) = sum_i sum_r A b_i A*``.
    """

    operators: list
    defect: float
    range_defect: float

    @property
    def count(self) -> int:
        return sum(len(ops) for ops in self.operators)


# reconstruction defect above which the Kraus oracle declares a map non-CP
KRAUS_TOL = 1e-8


def kraus_decomposition(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> KrausDecomposition:
    """Kraus operators from the positive part of each Choi block.

    Eigenvectors of eigenvalues at or below the rank cut are dropped, so
    for a non-CP map the reconstruction misses the negative part and the
    defect is large.  Never raises on non-CP input.
    """
    B, C = phi.domain, phi.codomain
    D = C.D
    ops = []
    for Cm, n in zip(choi(phi), B.block_dims):
        H = (Cm + Cm.conj().T) / 2
        w, U = np.linalg.eigh(H)
        cut = cfg.rank_tol * max(w[-1], 0.0)
        block_ops = []
        for lam, vec in zip(w, U.T):
            if lam > cut:
                block_ops.append(np.sqrt(lam) * vec.reshape(n, D).T)
        ops.append(block_ops)

    defect = rng_defect = 0.0
    for a, label in enumerate(_labels(B)):
        s, j, k = label
        n = B.block_dims[s]
        E = np.zeros((n, n), dtype=complex)
        E[j, k] = 1.0
        recon = sum((A @ E @ A.conj().T for A in ops[s]), np.zeros((D, D), dtype=complex))
        target = C.from_coords(phi.matrix[:, a]).rep()
        defect = max(defect, max_abs(recon - target))
        inside = C.from_rep(recon).rep()
        rng_defect = max(rng_defect, max_abs(recon - inside))
    return KrausDecomposition(ops, defect, rng_defect)


def _labels(spec):
    return [(s, p, q) for s, n in enumerate(spec.block_dims) for p in range(n) for q in range(n)]


def kraus_oracle(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> KrausDecomposition:
    """Kraus decomposition, raising NotCP when it fails to reconstruct phi."""
    kd = kraus_decomposition(phi, cfg)
    if kd.defect > KRAUS_TOL or kd.range_defect > cfg.verify_tol:
        raise NotCP(f"Kraus reconstruction defect {kd.defect:.3g}; the map is not completely positive")
    return kd


def kraus_says_cp(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> bool:
    kd = kraus_decomposition(phi, cfg)
    return kd.defect <= KRAUS_TOL and kd.range_defect <= cfg.verify_tol


# GNS

@dataclass
class GnsData:
    corr: Correspondence
    zeta: ModuleElement
    phi: LinearMap

    def module_dim(self, cfg: NumericConfig = DEFAULT) -> int:
        return module_dim(self.corr.module, cfg)


def gns_gram(phi: LinearMap) -> np.ndarray:
    """Coordinates of ``G_ab = phi(b_a* b_b)`` as an ``(N_B, N_B, N_C)`` array."""
    B = phi.domain
    star = adjoint_coords(B, np.eye(B.N))
    # coords(b_a* b_b) = L(b_a*)[:, b]
    prods = np.stack([structure_constants(B.from_coords(star[a])) for a in range(B.N)])
    return np.einsum("cm,abm->abc", phi.matrix, np.swapaxes(prods, 1, 2))


def gns_gram_positive(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> bool:
    """The second CP criterion: the Gram [phi(b_a* b_b)] is positive in M_N(C)."""
    G = gns_gram(phi)
    blocks = to_blocks(phi.codomain, G)
    try:
        return all(psd_check(M, cfg) for M in blocks)
    except InvalidInput:
        return False


def gns(phi: LinearMap, cfg: NumericConfig = DEFAULT) -> GnsData:
    """Paschke's GNS construction.

    Generators are ``b_a zeta`` for the whole canonical basis of the domain;
    the left action is given by the structure constants and ``zeta`` is the
    unit of the domain expanded in that basis.
    """
    B, C = phi.domain, phi.codomain
    if not gns_gram_positive(phi, cfg):
        raise NotCP("GNS Gram [phi(b_a* b_b)] is not positive; the map is not completely positive")
    module = PresentedModule(C, gns_gram(phi), cfg)
    action = np.zeros((B.N, B.N, B.N, C.N), dtype=complex)
    for a in range(B.N):
        L = structure_constants(B.from_coords(np.eye(B.N)[a]))
        action[a] = L[:, :, None] * C.unit_coords[None, None, :]
    corr = Correspondence(module, B, action)
    zeta = ModuleElement(module, np.kron(B.unit_coords, C.unit_coords))
    return GnsData(corr, zeta, phi)


def gns_defect(g: GnsData) -> float:
    """Max entry of ``<zeta, b zeta> - phi(b)`` over the canonical basis."""
    B = g.corr.left_algebra
    zs = np.stack([left_act(g.corr, b, g.zeta).coords for b in _basis(B)])
    vals = pairwise_inner(g.corr.module, g.zeta.coords[None, :], zs)[0]
    return max_abs(vals - g.phi.matrix.T)


def _basis(spec):
    return [spec.from_coords(e) for e in np.eye(spec.N)]


@dataclass
class MinimalityReport:
    span_rank: int
    module_rank: int

    @property
    def passed(self) -> bool:
        return self.span_rank == self.module_rank


def cyclic_span(g: GnsData) -> np.ndarray:
    """Free coordinates of ``b zeta c`` for all basis pairs (rows)."""
    rows = []
    for b in _basis(g.corr.left_algebra):
        bz = left_act(g.corr, b, g.zeta)
        for c in _basis(g.corr.module.algebra):
            rows.append(right_act(bz, c).coords)
    return np.array(rows)


def gns_minimality(g: GnsData, cfg: NumericConfig = DEFAULT) -> MinimalityReport:
    S = scalar_gram(g.corr.module)
    W = cyclic_span(g)
    span = rank_kernel(W.conj() @ S @ W.T, cfg)[0]
    return MinimalityReport(span, rank_kernel(S, cfg)[0])
