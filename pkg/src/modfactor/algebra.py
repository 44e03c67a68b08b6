"""Finite-dimensional C*-algebras given as direct sums of full matrix blocks.

An element of ``M_{n_1} + ... + M_{n_s}`` is stored as its tuple of
blocks.  Coordinates in the canonical basis (matrix units, block-major,
row-major inside a block) are simply the concatenated flattened blocks,
which is what the module layer works with.

Arrays of shape ``(r, c, N)`` represent ``r x c`` matrices with entries in
the algebra, one coordinate vector per entry.  ``M_r(A)`` is itself a
direct sum of the ``M_{r n_i}``, and :func:`to_blocks` / :func:`from_blocks`
convert between the two pictures.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Number

import numpy as np

from .errors import InvalidInput
from .numerics import DEFAULT, NumericConfig, max_abs, psd_check


@dataclass(frozen=True)
class AlgebraSpec:
    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims:
            raise InvalidInput("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise InvalidInput(f"block sizes must be >= 1, got {list(dims)}")
        object.__setattr__(self, "block_dims", dims)

    @cached_property
    def N(self) -> int:
        """Vector-space dimension."""
        return sum(n * n for n in self.block_dims)

    @cached_property
    def D(self) -> int:
        """Dimension of the block-diagonal representation."""
        return sum(self.block_dims)

    @cached_property
    def offsets(self) -> tuple:
        out, o = [], 0
        for n in self.block_dims:
            out.append(o)
            o += n * n
        return tuple(out)

    @cached_property
    def rep_offsets(self) -> tuple:
        out, o = [], 0
        for n in self.block_dims:
            out.append(o)
            o += n
        return tuple(out)

    def block_slices(self):
        return [slice(o, o + n * n) for o, n in zip(self.offsets, self.block_dims)]

    def __str__(self):
        return "+".join(f"M{n}" for n in self.block_dims)

    # constructors

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def from_coords(self, vec) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.N,):
            raise InvalidInput(f"expected {self.N} coordinates, got shape {vec.shape}")
        return AlgebraElement(
            self, [vec[s].reshape(n, n) for s, n in zip(self.block_slices(), self.block_dims)]
        )

    def zero(self) -> "AlgebraElement":
        return self.from_coords(np.zeros(self.N, dtype=complex))

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    @cached_property
    def unit_coords(self) -> np.ndarray:
        return self.unit().coords()

    def random(self, rng, hermitian=False) -> "AlgebraElement":
        blocks = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in self.block_dims]
        if hermitian:
            blocks = [(b + b.conj().T) / 2 for b in blocks]
        return AlgebraElement(self, blocks)

    def from_rep(self, M) -> "AlgebraElement":
        """Read off the diagonal blocks of a D x D matrix without checks."""
        return AlgebraElement(
            self, [M[o:o + n, o:o + n] for o, n in zip(self.rep_offsets, self.block_dims)]
        )


class AlgebraElement:
    """An element of a finite-dimensional C*-algebra."""

    __slots__ = ("spec", "blocks")

    def __init__(self, spec: AlgebraSpec, blocks):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != len(spec.block_dims):
            raise InvalidInput(f"{spec} needs {len(spec.block_dims)} blocks, got {len(blocks)}")
        for b, n in zip(blocks, spec.block_dims):
            if b.shape != (n, n):
                raise InvalidInput(f"block of shape {b.shape} does not fit {spec}")
            if not np.all(np.isfinite(b)):
                raise InvalidInput("algebra element has non-finite entries")
        self.spec = spec
        self.blocks = blocks

    def __repr__(self):
        return f"AlgebraElement({self.spec}, {[b.tolist() for b in self.blocks]})"

    def coords(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def rep(self) -> np.ndarray:
        """Block-diagonal D x D matrix."""
        M = np.zeros((self.spec.D, self.spec.D), dtype=complex)
        for o, b in zip(self.spec.rep_offsets, self.blocks):
            M[o:o + len(b), o:o + len(b)] = b
        return M

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.spec != self.spec:
            raise InvalidInput("algebra elements live in different algebras")

    def adj(self) -> "AlgebraElement":
        return AlgebraElement(self.spec, [b.conj().T for b in self.blocks])

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.spec, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.spec, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(self.spec, [other * a for a in self.blocks])
        self._check(other)
        return AlgebraElement(self.spec, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __rmul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(self.spec, [other * a for a in self.blocks])
        return NotImplemented

    def max_norm(self) -> float:
        return max(max_abs(b) for b in self.blocks)

    def allclose(self, other, atol=1e-12) -> bool:
        self._check(other)
        return (self - other).max_norm() <= atol


def arithmetic(a: AlgebraElement, b, op: str) -> AlgebraElement:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "adjoint":
        return a.adj()
    if op == "scale":
        if not isinstance(b, Number):
            raise InvalidInput("scale expects a complex number")
        return b * a
    raise InvalidInput(f"unknown operation {op!r}")


def is_positive(a: AlgebraElement, cfg: NumericConfig = DEFAULT) -> bool:
    for b in a.blocks:
        if max_abs(b - b.conj().T) > cfg.verify_tol * (1.0 + max_abs(b)):
            return False
        if not psd_check(b, cfg):
            return False
    return True


def trace(a: AlgebraElement) -> complex:
    return complex(sum(np.trace(b) for b in a.blocks))


def canonical_basis(spec: AlgebraSpec) -> list:
    eye = np.eye(spec.N, dtype=complex)
    return [spec.from_coords(eye[i]) for i in range(spec.N)]


def basis_labels(spec: AlgebraSpec) -> list:
    return [(s, p, q) for s, n in enumerate(spec.block_dims) for p in range(n) for q in range(n)]


def structure_constants(b: AlgebraElement) -> np.ndarray:
    """Matrix of left multiplication by ``b`` in canonical coordinates.

    Inside block s the product ``b E_pq`` equals ``sum_r b[r,p] E_rq``, so in
    row-major coordinates left multiplication is ``b_s kron I``.
    """
    spec = b.spec
    L = np.zeros((spec.N, spec.N), dtype=complex)
    for sl, n, blk in zip(spec.block_slices(), spec.block_dims, b.blocks):
        L[sl, sl] = np.kron(blk, np.eye(n))
    return L


def right_multiplication(c: AlgebraElement) -> np.ndarray:
    """Matrix R(c) with coords(a c) = R(c) coords(a)."""
    spec = c.spec
    R = np.zeros((spec.N, spec.N), dtype=complex)
    for sl, n, blk in zip(spec.block_slices(), spec.block_dims, c.blocks):
        R[sl, sl] = np.kron(np.eye(n), blk.T)
    return R


def conditional_expectation(M, spec: AlgebraSpec) -> AlgebraElement:
    """Compress a D x D matrix onto the block-diagonal subalgebra."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (spec.D, spec.D):
        raise InvalidInput(f"expected a {spec.D}x{spec.D} matrix, got {M.shape}")
    return spec.from_rep(M)


# matrices over the algebra, stored as coordinate arrays of shape (r, c, N)

def to_blocks(spec: AlgebraSpec, X) -> list:
    X = np.asarray(X)
    r, c = X.shape[:2]
    out = []
    for sl, n in zip(spec.block_slices(), spec.block_dims):
        Y = X[:, :, sl].reshape(r, c, n, n).transpose(0, 2, 1, 3)
        out.append(Y.reshape(r * n, c * n))
    return out


def from_blocks(spec: AlgebraSpec, mats, r: int, c: int) -> np.ndarray:
    X = np.zeros((r, c, spec.N), dtype=complex)
    for sl, n, M in zip(spec.block_slices(), spec.block_dims, mats):
        X[:, :, sl] = M.reshape(r, n, c, n).transpose(0, 2, 1, 3).reshape(r, c, n * n)
    return X


def mat_mul(spec: AlgebraSpec, X, Y) -> np.ndarray:
    if X.shape[1] != Y.shape[0]:
        raise InvalidInput(f"cannot multiply {X.shape[:2]} by {Y.shape[:2]} matrices")
    prods = [a @ b for a, b in zip(to_blocks(spec, X), to_blocks(spec, Y))]
    return from_blocks(spec, prods, X.shape[0], Y.shape[1])


def mat_adjoint(spec: AlgebraSpec, X) -> np.ndarray:
    mats = [M.conj().T for M in to_blocks(spec, X)]
    return from_blocks(spec, mats, X.shape[1], X.shape[0])


def adjoint_coords(spec: AlgebraSpec, v) -> np.ndarray:
    """Coordinates of ``a*`` from coordinates of ``a`` (last axis)."""
    v = np.asarray(v)
    out = np.empty_like(v)
    for sl, n in zip(spec.block_slices(), spec.block_dims):
        blk = v[..., sl].reshape(v.shape[:-1] + (n, n))
        out[..., sl] = np.swapaxes(blk, -1, -2).conj().reshape(v.shape[:-1] + (n * n,))
    return out
