"""Finitely generated Hilbert C*-modules in presented form.

A module over ``C`` is given by ``k`` generators and the C-valued Gram
matrix ``G_ij = <e_i, e_j>``.  Its elements are coefficient tuples
``sum_i e_i c_i`` and are never reduced modulo the null space; equality
and well-definedness are decided through the scalar Gram of the trace
form ``trace <x, y>``, which vanishes exactly on null vectors.

Coordinates of an element are the canonical coordinates of ``c_1, ..., c_k``
concatenated (generator-major).  These are also the coordinates in the
free complex basis ``{e_i c_b}`` used by module maps.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraSpec,
    adjoint_coords,
    canonical_basis,
    from_blocks,
    mat_adjoint,
    mat_mul,
    right_multiplication,
    structure_constants,
    to_blocks,
)
from .errors import InternalError, InvalidInput, NotPositive
from .numerics import DEFAULT, NumericConfig, max_abs, psd_check, psd_sqrt, range_basis, rank_kernel


class PresentedModule:
    """Right Hilbert module over ``algebra`` with ``k`` generators.

    ``gram`` is an array of shape ``(k, k, N)`` holding canonical
    coordinates of the Gram entries, or a nested list of AlgebraElement.
    """

    def __init__(self, algebra: AlgebraSpec, gram, cfg: NumericConfig = DEFAULT):
        self.algebra = algebra
        if isinstance(gram, (list, tuple)):
            gram = _coords_of_nested(algebra, gram)
        gram = np.array(gram, dtype=complex)
        if gram.ndim != 3 or gram.shape[0] != gram.shape[1] or gram.shape[2] != algebra.N:
            raise InvalidInput(f"Gram array of shape {gram.shape} does not fit {algebra}")
        if not np.all(np.isfinite(gram)):
            raise InvalidInput("Gram has non-finite entries")
        skew = max_abs(gram - np.swapaxes(adjoint_coords(algebra, gram), 0, 1))
        if skew > cfg.verify_tol * (1.0 + max_abs(gram)):
            raise InvalidInput(f"Gram is not Hermitian (defect {skew:.3g})")
        self.gram_coords = gram
        self.gram_coords.setflags(write=False)

    def __repr__(self):
        return f"{type(self).__name__}(algebra={self.algebra}, k={self.k})"

    @property
    def k(self) -> int:
        return self.gram_coords.shape[0]

    @property
    def free_dim(self) -> int:
        return self.k * self.algebra.N

    @property
    def gram(self) -> list:
        A = self.algebra
        return [[A.from_coords(self.gram_coords[i, j]) for j in range(self.k)] for i in range(self.k)]

    @cached_property
    def gram_blocks(self) -> list:
        """Gram as an element of ``M_k(C)``, one Hermitian matrix per block."""
        return [(M + M.conj().T) / 2 for M in to_blocks(self.algebra, self.gram_coords)]

    @cached_property
    def scalar_gram(self) -> np.ndarray:
        return scalar_gram(self)

    def is_positive(self, cfg: NumericConfig = DEFAULT) -> bool:
        return all(psd_check(M, cfg) for M in self.gram_blocks)

    def element(self, coeffs) -> "ModuleElement":
        return ModuleElement.from_coeffs(self, coeffs)

    def generator(self, i: int) -> "ModuleElement":
        coords = np.zeros(self.free_dim, dtype=complex)
        coords[i * self.algebra.N:(i + 1) * self.algebra.N] = self.algebra.unit_coords
        return ModuleElement(self, coords)

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, np.zeros(self.free_dim, dtype=complex))

    def free_basis(self) -> list:
        eye = np.eye(self.free_dim, dtype=complex)
        return [ModuleElement(self, eye[i]) for i in range(self.free_dim)]

    def random_element(self, rng) -> "ModuleElement":
        n = self.free_dim
        return ModuleElement(self, rng.standard_normal(n) + 1j * rng.standard_normal(n))

    def same_as(self, other, atol=1e-10) -> bool:
        return (
            isinstance(other, PresentedModule)
            and other.algebra == self.algebra
            and other.k == self.k
            and max_abs(other.gram_coords - self.gram_coords) <= atol * (1.0 + max_abs(self.gram_coords))
        )


def _coords_of_nested(algebra, gram):
    k = len(gram)
    out = np.zeros((k, k, algebra.N), dtype=complex)
    for i, row in enumerate(gram):
        if len(row) != k:
            raise InvalidInput("Gram must be a square array")
        for j, g in enumerate(row):
            if not isinstance(g, AlgebraElement) or g.spec != algebra:
                raise InvalidInput(f"Gram entry ({i},{j}) is not an element of {algebra}")
            out[i, j] = g.coords()
    return out


class ModuleElement:
    """``sum_i e_i c_i`` held as the concatenated coordinates of the c_i."""

    __slots__ = ("module", "coords")

    def __init__(self, module: PresentedModule, coords):
        coords = np.array(coords, dtype=complex)
        if coords.shape != (module.free_dim,):
            raise InvalidInput(f"expected {module.free_dim} coordinates, got shape {coords.shape}")
        self.module = module
        self.coords = coords

    @classmethod
    def from_coeffs(cls, module, coeffs):
        if len(coeffs) != module.k:
            raise InvalidInput(f"module has {module.k} generators, got {len(coeffs)} coefficients")
        parts = []
        for c in coeffs:
            if c.spec != module.algebra:
                raise InvalidInput("coefficient algebra does not match the module")
            parts.append(c.coords())
        return cls(module, np.concatenate(parts) if parts else np.zeros(0, dtype=complex))

    @property
    def coeffs(self) -> list:
        A = self.module.algebra
        return [A.from_coords(c) for c in self.coords.reshape(self.module.k, A.N)]

    def _check(self, other):
        if not isinstance(other, ModuleElement) or other.module is not self.module and not other.module.same_as(self.module):
            raise InvalidInput("module elements belong to different modules")

    def __add__(self, other):
        self._check(other)
        return ModuleElement(self.module, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return ModuleElement(self.module, self.coords - other.coords)

    def __mul__(self, scalar):
        return ModuleElement(self.module, scalar * self.coords)

    __rmul__ = __mul__

    def null_defect(self) -> float:
        """``trace <x, x>``; zero exactly for null vectors."""
        return float(null_defects(self.module, self.coords[None, :])[0])

    def __repr__(self):
        return f"ModuleElement({self.module!r}, coords={self.coords.tolist()})"


# inner products

def _split(module: PresentedModule, X) -> list:
    """Rows of X (element coordinates) as stacked ``(m, k n, n)`` block columns."""
    A, k = module.algebra, module.k
    X = np.asarray(X).reshape(-1, k, A.N)
    out = []
    for sl, n in zip(A.block_slices(), A.block_dims):
        out.append(X[:, :, sl].reshape(-1, k, n, n).reshape(-1, k * n, n))
    return out


def pairwise_inner(module: PresentedModule, X, Y=None) -> np.ndarray:
    """All inner products ``<x_a, y_b>`` as an ``(m_x, m_y, N)`` coordinate array."""
    A = module.algebra
    Xs = _split(module, X)
    Ys = Xs if Y is None else _split(module, Y)
    out = np.zeros((Xs[0].shape[0], Ys[0].shape[0], A.N), dtype=complex)
    for sl, n, R, Xb, Yb in zip(A.block_slices(), A.block_dims, module.gram_blocks, Xs, Ys):
        RY = np.einsum("ij,bjt->bit", R, Yb)
        out[:, :, sl] = np.einsum("aiq,bit->abqt", Xb.conj(), RY).reshape(Xb.shape[0], Yb.shape[0], n * n)
    return out


def inner_product(u: ModuleElement, v: ModuleElement) -> AlgebraElement:
    u._check(v)
    c = pairwise_inner(u.module, u.coords[None, :], v.coords[None, :])[0, 0]
    return u.module.algebra.from_coords(c)


def scalar_gram(module: PresentedModule) -> np.ndarray:
    """Matrix S with ``trace <x, y> = x^H S y`` in free coordinates.

    For matrix units ``c_b = E_pq``, ``c_g = E_rt`` of block s one has
    ``trace(E_qp G E_rt) = G[p, r] delta(q, t)``.
    """
    A, k = module.algebra, module.k
    S = np.zeros((k, A.N, k, A.N), dtype=complex)
    for sl, n, R in zip(A.block_slices(), A.block_dims, module.gram_blocks):
        blk = np.einsum("ipjr,qt->ipqjrt", R.reshape(k, n, k, n), np.eye(n))
        S[:, sl, :, sl] = blk.reshape(k, n * n, k, n * n)
    S = S.reshape(k * A.N, k * A.N)
    return (S + S.conj().T) / 2


def null_defects(module: PresentedModule, X) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.real(np.einsum("ai,ij,aj->a", X.conj(), module.scalar_gram, X))


def module_dim(module: PresentedModule, cfg: NumericConfig = DEFAULT) -> int:
    return rank_kernel(module.scalar_gram, cfg)[0]


def null_space(module: PresentedModule, cfg: NumericConfig = DEFAULT) -> np.ndarray:
    """Orthonormal basis (columns) of the null vectors in free coordinates."""
    return rank_kernel(module.scalar_gram, cfg)[1]


def right_act(u: ModuleElement, c: AlgebraElement) -> ModuleElement:
    if c.spec != u.module.algebra:
        raise InvalidInput("right coefficient is not in the module's algebra")
    R = right_multiplication(c)
    k = u.module.k
    return ModuleElement(u.module, (u.coords.reshape(k, -1) @ R.T).ravel())


def right_act_coords(module: PresentedModule, X, c: AlgebraElement) -> np.ndarray:
    R = right_multiplication(c)
    X = np.asarray(X)
    m = X.shape[0]
    return (X.reshape(m, module.k, -1) @ R.T).reshape(m, -1)


# correspondences

class Correspondence:
    """A presented module over C with a left action of ``left_algebra``.

    ``action[a]`` is the k x k matrix over C of the a-th canonical basis
    element of the left algebra, ``b . e_j = sum_m e_m A(b)_{mj}``.
    """

    def __init__(self, module: PresentedModule, left_algebra: AlgebraSpec, action):
        action = np.array(action, dtype=complex)
        k, N = module.k, module.algebra.N
        if action.shape != (left_algebra.N, k, k, N):
            raise InvalidInput(
                f"action must have shape {(left_algebra.N, k, k, N)}, got {action.shape}"
            )
        if not np.all(np.isfinite(action)):
            raise InvalidInput("action has non-finite entries")
        self.module = module
        self.left_algebra = left_algebra
        self.action = action
        self.action.setflags(write=False)

    def __repr__(self):
        return f"Correspondence({self.left_algebra} -> {self.module.algebra}, k={self.module.k})"

    def action_of(self, b) -> np.ndarray:
        """Matrix over C of the left action of b (element or coordinate vector)."""
        coords = b.coords() if isinstance(b, AlgebraElement) else np.asarray(b)
        if coords.shape != (self.left_algebra.N,):
            raise InvalidInput("element is not in the left algebra")
        return np.tensordot(coords, self.action, axes=(0, 0))


def left_act(corr: Correspondence, b: AlgebraElement, u: ModuleElement) -> ModuleElement:
    if b.spec != corr.left_algebra:
        raise InvalidInput("element is not in the correspondence's left algebra")
    if not u.module.same_as(corr.module):
        raise InvalidInput("element does not belong to the correspondence")
    k, N = corr.module.k, corr.module.algebra.N
    out = mat_mul(corr.module.algebra, corr.action_of(b), u.coords.reshape(k, 1, N))
    return ModuleElement(u.module, out.ravel())


class LeftActionReport:
    def __init__(self, unital_defect, mult_defect, adjoint_defect, tol):
        self.unital_defect = float(unital_defect)
        self.mult_defect = float(mult_defect)
        self.adjoint_defect = float(adjoint_defect)
        self.passed = max(self.unital_defect, self.mult_defect, self.adjoint_defect) <= tol

    def as_dict(self):
        return {
            "unital_defect": self.unital_defect,
            "mult_defect": self.mult_defect,
            "adjoint_defect": self.adjoint_defect,
        }


def check_left_action(corr: Correspondence, cfg: NumericConfig = DEFAULT) -> LeftActionReport:
    C, B = corr.module.algebra, corr.left_algebra
    G = corr.module.gram_coords
    GA = np.stack([mat_mul(C, G, A) for A in corr.action])
    unital = max_abs(np.tensordot(B.unit_coords, GA, axes=(0, 0)) - G)
    mult = adj = 0.0
    basis = canonical_basis(B)
    star = adjoint_coords(B, np.eye(B.N))
    for a, ba in enumerate(basis):
        L = structure_constants(ba)
        for b in range(B.N):
            lhs = np.tensordot(L[:, b], GA, axes=(0, 0))
            rhs = mat_mul(C, GA[a], corr.action[b])
            mult = max(mult, max_abs(lhs - rhs))
        Astar = corr.action_of(star[a])
        adj = max(adj, max_abs(mat_mul(C, mat_adjoint(C, Astar), G) - GA[a]))
    return LeftActionReport(unital, mult, adj, cfg.verify_tol)


def identity_correspondence(spec: AlgebraSpec) -> Correspondence:
    """The algebra as a correspondence over itself, generated by the unit."""
    module = free_module(spec, 1)
    return Correspondence(module, spec, np.eye(spec.N, dtype=complex).reshape(spec.N, 1, 1, spec.N))


def column_space(d: int) -> Correspondence:
    """``C^d`` as a Hilbert space with the left action of ``M_d``."""
    scalars = AlgebraSpec((1,))
    module = free_module(scalars, d)
    action = np.zeros((d * d, d, d, 1), dtype=complex)
    for p in range(d):
        for q in range(d):
            action[p * d + q, p, q, 0] = 1.0
    return Correspondence(module, AlgebraSpec((d,)), action)


# standard modules

def free_module(spec: AlgebraSpec, k: int) -> PresentedModule:
    gram = np.zeros((k, k, spec.N), dtype=complex)
    for i in range(k):
        gram[i, i] = spec.unit_coords
    return PresentedModule(spec, gram)


class MatrixModule(PresentedModule):
    """``M_{m x n}`` as a right module over ``M_n`` with inner product ``x* y``.

    Generators are the matrix units ``E_{a1}``; ``<E_a1, E_b1> = delta_ab E_11``.
    """

    def __init__(self, rows: int, cols: int):
        if rows < 1 or cols < 1:
            raise InvalidInput("matrix_module needs m, n >= 1")
        spec = AlgebraSpec((cols,))
        gram = np.zeros((rows, rows, spec.N), dtype=complex)
        for a in range(rows):
            gram[a, a, 0] = 1.0
        super().__init__(spec, gram)
        self.rows = rows
        self.cols = cols

    def to_operator_coords(self, X) -> np.ndarray:
        """Operator model of a batch of elements: row a is the first row of c_a."""
        X = np.atleast_2d(X).reshape(-1, self.rows, self.cols, self.cols)
        return X[:, :, 0, :]

    def to_operator(self, u: ModuleElement) -> np.ndarray:
        return self.to_operator_coords(u.coords)[0]

    def from_operator(self, M) -> ModuleElement:
        M = np.asarray(M, dtype=complex)
        if M.shape != (self.rows, self.cols):
            raise InvalidInput(f"expected a {self.rows}x{self.cols} matrix, got {M.shape}")
        coeffs = np.zeros((self.rows, self.cols, self.cols), dtype=complex)
        coeffs[:, 0, :] = M
        return ModuleElement(self, coeffs.ravel())


def matrix_module(m: int, n: int) -> MatrixModule:
    return MatrixModule(m, n)


def as_matrix_module(module: PresentedModule):
    """Return a MatrixModule equal to ``module``, or None if it is not one."""
    if isinstance(module, MatrixModule):
        return module
    if len(module.algebra.block_dims) != 1:
        return None
    candidate = MatrixModule(module.k, module.algebra.block_dims[0])
    return candidate if candidate.same_as(module, atol=0.0) else None


# interior tensor products

class TensorModule(PresentedModule):
    """``E (.) F`` with generators ``x_i (.) y_j`` indexed i-major."""

    def __init__(self, algebra, gram, left: PresentedModule, right: Correspondence, cfg=DEFAULT):
        super().__init__(algebra, gram, cfg)
        self.left = left
        self.right = right


def interior_tensor(E: PresentedModule, F: Correspondence, cfg: NumericConfig = DEFAULT) -> TensorModule:
    """Gram ``H_(ij),(kl) = sum_m G^F_jm A(<x_i, x_k>)_ml``."""
    if E.algebra != F.left_algebra:
        raise InvalidInput(f"E is a module over {E.algebra}, F acts from {F.left_algebra}")
    C = F.module.algebra
    kE, kF = E.k, F.module.k
    acts = np.tensordot(E.gram_coords, F.action, axes=([2], [0]))  # (kE, kE, kF, kF, N)
    GF = F.module.gram_coords
    mats = to_blocks(C, acts.transpose(0, 2, 1, 3, 4).reshape(kE * kF, kE * kF, C.N))
    # block-diagonal (I_kE kron G^F) times the assembled action matrix
    gf_blocks = to_blocks(C, GF)
    H_blocks = []
    for M, Gb in zip(mats, gf_blocks):
        big = np.kron(np.eye(kE), Gb)
        H_blocks.append(big @ M)
    H = from_blocks(C, H_blocks, kE * kF, kE * kF)
    herm = np.swapaxes(adjoint_coords(C, H), 0, 1)
    skew = max_abs(H - herm)
    if skew > cfg.verify_tol * (1.0 + max_abs(H)):
        raise InternalError(f"tensor Gram is not Hermitian (defect {skew:.3g}); the left action is not adjointable")
    T = TensorModule(C, (H + herm) / 2, E, F, cfg)
    if not T.is_positive(cfg):
        raise InternalError("tensor Gram is not positive; the input correspondence is invalid")
    return T


def tensor_coords(T: TensorModule, X, Y) -> np.ndarray:
    """Coordinates of all ``x_a (.) y_b`` (rows of X, Y) as an ``(m_x, m_y, free_dim)`` array."""
    E, F = T.left, T.right
    C = F.module.algebra
    kE, kF = E.k, F.module.k
    X = np.atleast_2d(X).reshape(-1, kE, E.algebra.N)
    Y = np.atleast_2d(Y).reshape(-1, kF, C.N)
    acts = np.tensordot(X, F.action, axes=([2], [0]))  # (mx, kE, kF, kF, N)
    mx, my = X.shape[0], Y.shape[0]
    # [A(b_i) d]_l = sum_j A(b_i)_lj d_j for every x, i and y
    lhs = acts.reshape(mx * kE * kF, kF, C.N)
    rhs = np.swapaxes(Y, 0, 1)  # (kF, my, N)
    prod = mat_mul(C, lhs, rhs)  # (mx kE kF, my, N)
    prod = prod.reshape(mx, kE, kF, my, C.N).transpose(0, 3, 1, 2, 4)
    return prod.reshape(mx, my, kE * kF * C.N)


def tensor_element(x: ModuleElement, y: ModuleElement, T: TensorModule) -> ModuleElement:
    if not x.module.same_as(T.left) or not y.module.same_as(T.right.module):
        raise InvalidInput("factors do not belong to the tensor product's modules")
    return ModuleElement(T, tensor_coords(T, x.coords, y.coords)[0, 0])


def tensor_correspondence(F1: Correspondence, F2: Correspondence, cfg: NumericConfig = DEFAULT) -> Correspondence:
    """``F1 (.) F2`` with the left action ``a . (y (.) z) = (a . y) (.) z``."""
    module = interior_tensor(F1.module, F2, cfg)
    k1, k2 = F1.module.k, F2.module.k
    A = np.tensordot(F1.action, F2.action, axes=([3], [0]))  # (NA, k1, k1, k2, k2, NC)
    A = A.transpose(0, 1, 3, 2, 4, 5).reshape(F1.left_algebra.N, k1 * k2, k1 * k2, -1)
    return Correspondence(module, F1.left_algebra, A)


# module maps

class ModuleMap:
    """A complex-linear map between presented modules.

    ``matrix`` sends free coordinates of the domain to free coordinates of
    the codomain; column j is the image of the j-th free basis vector
    ``e_i c_b`` of the domain.
    """

    def __init__(self, domain: PresentedModule, codomain: PresentedModule, matrix):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (codomain.free_dim, domain.free_dim):
            raise InvalidInput(
                f"map matrix must have shape {(codomain.free_dim, domain.free_dim)}, got {matrix.shape}"
            )
        if not np.all(np.isfinite(matrix)):
            raise InvalidInput("map has non-finite entries")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @classmethod
    def from_values(cls, domain, codomain, values):
        if len(values) != domain.free_dim:
            raise InvalidInput(f"need {domain.free_dim} values, got {len(values)}")
        for v in values:
            if not v.module.same_as(codomain):
                raise InvalidInput("value does not lie in the codomain")
        M = np.stack([v.coords for v in values], axis=1) if values else np.zeros((codomain.free_dim, 0))
        return cls(domain, codomain, M)

    @property
    def values(self) -> list:
        return [ModuleElement(self.codomain, self.matrix[:, j]) for j in range(self.domain.free_dim)]

    def __call__(self, x: ModuleElement) -> ModuleElement:
        if not x.module.same_as(self.domain):
            raise InvalidInput("element is not in the map's domain")
        return ModuleElement(self.codomain, self.matrix @ x.coords)

    def scaled(self, t) -> "ModuleMap":
        return ModuleMap(self.domain, self.codomain, t * self.matrix)

    def kernel_defect(self, cfg: NumericConfig = DEFAULT) -> float:
        """Largest ``trace <T k, T k>`` over an orthonormal null basis of the domain."""
        K = null_space(self.domain, cfg)
        if K.shape[1] == 0:
            return 0.0
        return float(np.max(null_defects(self.codomain, (self.matrix @ K).T)))

    def isometry_defect(self) -> float:
        """Max entry of ``<v e, v e'> - <e, e'>`` over free basis pairs."""
        lhs = pairwise_inner(self.codomain, self.matrix.T)
        rhs = pairwise_inner(self.domain, np.eye(self.domain.free_dim))
        return max_abs(lhs - rhs)


def embed_free(module: PresentedModule, cfg: NumericConfig = DEFAULT) -> ModuleMap:
    """Isometry ``sum e_i c_i -> (G^{1/2} c)_i`` into the free module of rank k."""
    A, k = module.algebra, module.k
    try:
        roots = [psd_sqrt(M, cfg) for M in module.gram_blocks]
    except NotPositive as exc:
        raise NotPositive(f"module Gram is not positive: {exc}") from None
    X = _split(module, np.eye(module.free_dim))
    cols = np.zeros((module.free_dim, k, A.N), dtype=complex)
    for sl, n, Rt, Xb in zip(A.block_slices(), A.block_dims, roots, X):
        Y = np.einsum("ij,bjq->biq", Rt, Xb).reshape(-1, k, n, n)
        cols[:, :, sl] = Y.reshape(-1, k, n * n)
    target = free_module(A, k)
    return ModuleMap(module, target, cols.reshape(module.free_dim, -1).T)


def hilbert_frame(module: PresentedModule, cfg: NumericConfig = DEFAULT):
    """Concrete Hilbert-space realization of a module over the complex numbers.

    Returns ``(J, Q)``: J maps presented coordinates to coordinates in an
    orthonormal basis of the quotient, Q maps back with ``J Q = I``.
    """
    if module.algebra.block_dims != (1,):
        raise InvalidInput("hilbert_frame needs a module over the complex numbers")
    w, U = range_basis(module.scalar_gram, cfg)
    J = np.sqrt(w)[:, None] * U.conj().T
    Q = U / np.sqrt(w)[None, :]
    return J, Q
