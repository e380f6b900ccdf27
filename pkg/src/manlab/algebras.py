"""Hermitian-closed unital operator algebras and their block structure.

An algebra is stored as an HS-orthonormal basis of d x d matrices.  Its
structure is the central-block data: the ambient space splits into blocks
C^{n_J} (x) C^{d_J} on which the algebra acts as 1_{n_J} (x) M_{d_J}; the
commutant acts as M_{n_J} (x) 1_{d_J}.  Everything downstream (omega
operators, projection maps, protocol simulators) is driven by this data.

Values are immutable after construction; the lazy caches (decomposition,
commutant, block bases, omega) are write-once and idempotent, so algebras are
safe to share read-only across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt, prod
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import AlgebraError, DecompositionError
from .linalg import (
    RANK_RTOL,
    SuperOperator,
    _haar_unitary_from_generator,
    dagger,
    nullspace,
    orthonormalize_hs,
    swap_operator,
)
from .rng import RngStream

# Residual tolerance for "X belongs to the algebra" checks.
MEMBERSHIP_TOL = 1e-9
# Tolerance for validating that an isometry block-diagonalizes the algebra.
ISO_TOL = 1e-8
# Relative eigenvalue-gap threshold when clustering spectra of random
# central/block elements; separates exact degeneracy from generic splitting.
CLUSTER_RTOL = 1e-7
# Two algebras are equal when their HS projectors differ by less than this.
EQUALITY_TOL = 1e-8

# Fixed stream for the randomness internal to decompose(); a constant keeps
# decompositions reproducible without threading a seed through every call.
_DECOMPOSE_RNG = RngStream(seed=0x5CA1AB1E, stream=911)

# Above this many stacked rows the commutant solver switches from one big SVD
# to the Gram-matrix eigenproblem (same nullspace, squared spectrum).
_STACKED_ROWS_LIMIT = 80_000
_GRAM_NULL_RTOL = 1e-12


class _RetryDraw(Exception):
    """Internal: a random draw in decompose() was degenerate; try again."""


@dataclass(frozen=True)
class Block:
    """One central block: algebra acts as 1_n (x) M_d on range(projector)."""

    n: int
    d: int
    projector: np.ndarray  # ambient x ambient central projection
    isometry: np.ndarray   # ambient x (n*d); column p*d + l is |p> (x) |l>


@dataclass(frozen=True)
class StructuralDecomposition:
    dim: int
    blocks: tuple[Block, ...]

    @property
    def d_Z(self) -> int:
        return len(self.blocks)

    @property
    def n_vec(self) -> tuple[int, ...]:
        return tuple(b.n for b in self.blocks)

    @property
    def d_vec(self) -> tuple[int, ...]:
        return tuple(b.d for b in self.blocks)

    @property
    def algebra_dim(self) -> int:
        return sum(b.d * b.d for b in self.blocks)

    @property
    def commutant_dim(self) -> int:
        return sum(b.n * b.n for b in self.blocks)

    def block_embed(self, j: int, mat: np.ndarray) -> np.ndarray:
        """Embed an (n_j d_j) x (n_j d_j) matrix into the ambient space."""
        iso = self.blocks[j].isometry
        return iso @ mat @ dagger(iso)


@dataclass(frozen=True)
class BlockBases:
    """The two families e_alpha (spanning A) and e_tilde_beta (spanning A')."""

    e: tuple[np.ndarray, ...]
    e_labels: tuple[tuple[int, int, int], ...]
    e_tilde: tuple[np.ndarray, ...]
    e_tilde_labels: tuple[tuple[int, int, int], ...]


class OperatorAlgebra:
    """Hermitian-closed unital subalgebra of L(C^d), as an orthonormal basis."""

    def __init__(self, d: int, basis: np.ndarray):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 3 or basis.shape[1:] != (d, d):
            raise AlgebraError(f"basis must have shape (k, {d}, {d})")
        if basis.shape[0] < 1 or basis.shape[0] > d * d:
            raise AlgebraError("algebra dimension out of range")
        basis.setflags(write=False)
        self.d = int(d)
        self.basis = basis
        self._decomposition: Optional[StructuralDecomposition] = None
        self._commutant: Optional["OperatorAlgebra"] = None
        self._block_bases: Optional[BlockBases] = None
        self._omega: Optional[np.ndarray] = None

    # -- basic geometry ----------------------------------------------------

    @property
    def dim(self) -> int:
        """d(A), the linear dimension of the algebra."""
        return self.basis.shape[0]

    def __repr__(self) -> str:
        return f"OperatorAlgebra(d={self.d}, dim={self.dim})"

    def project(self, x: np.ndarray) -> np.ndarray:
        """HS-orthogonal projection of x onto the algebra."""
        coeffs = np.einsum("kij,ij->k", self.basis.conj(), x)
        return np.tensordot(coeffs, self.basis, axes=1)

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        scale = max(1.0, float(np.linalg.norm(x)))
        return bool(np.linalg.norm(x - self.project(x)) <= tol * scale)

    def projection_superoperator(self) -> SuperOperator:
        return SuperOperator.hs_projection(list(self.basis))

    def validate(self, tol: float = MEMBERSHIP_TOL) -> None:
        """Check orthonormality, unitality and closure; raise if violated."""
        k = self.dim
        flat = self.basis.reshape(k, -1)
        gram = flat.conj() @ flat.T
        if np.linalg.norm(gram - np.eye(k)) > tol * k:
            raise AlgebraError("basis is not HS-orthonormal")
        if not self.contains(np.eye(self.d), tol):
            raise AlgebraError("algebra does not contain the identity")
        for b in self.basis:
            if not self.contains(dagger(b), tol):
                raise AlgebraError("algebra not closed under adjoints")
        for a in self.basis:
            for b in self.basis:
                if not self.contains(a @ b, tol):
                    raise AlgebraError("algebra not closed under products")

    # -- cached structure --------------------------------------------------

    def commutant_algebra(self, use_cache: bool = True) -> "OperatorAlgebra":
        if use_cache and self._commutant is not None:
            return self._commutant
        result = compute_commutant(self)
        if self._commutant is None:
            self._commutant = result
        return result

    def decomposition(self, rng: Optional[RngStream] = None) -> StructuralDecomposition:
        if self._decomposition is None:
            self._decomposition = _compute_decomposition(self, rng or _DECOMPOSE_RNG)
        return self._decomposition

    def block_bases(self) -> BlockBases:
        if self._block_bases is None:
            self._block_bases = block_bases(self.decomposition())
        return self._block_bases

    def conjugated(self, u: np.ndarray) -> "OperatorAlgebra":
        """The image algebra U A U^dag, carrying structure caches along."""
        _check_unitary(u)
        new_basis = np.einsum("ij,kjl,ml->kim", u, self.basis, u.conj())
        out = OperatorAlgebra(self.d, new_basis)
        if self._decomposition is not None:
            out._decomposition = _conjugate_decomposition(self._decomposition, u)
        if self._commutant is not None:
            comm = self._commutant
            cc = OperatorAlgebra(self.d, np.einsum("ij,kjl,ml->kim", u, comm.basis, u.conj()))
            if comm._decomposition is not None:
                cc._decomposition = _conjugate_decomposition(comm._decomposition, u)
            out._commutant = cc
        return out


# -- construction -----------------------------------------------------------


def algebra_from_generators(gens: Sequence[np.ndarray], d: int) -> OperatorAlgebra:
    """Smallest hermitian-closed unital algebra containing the generators.

    Adjoints and the identity are added up front, then pairwise products are
    folded in until the linear dimension stabilizes.  The dimension strictly
    grows each round, so d^2 rounds bound the loop.
    """
    mats = [np.eye(d, dtype=complex)]
    for g in gens:
        g = np.asarray(g, dtype=complex)
        if g.shape != (d, d):
            raise AlgebraError(f"generator shape {g.shape} != ({d}, {d})")
        mats.append(g)
        mats.append(dagger(g))
    basis = orthonormalize_hs(mats)
    for _ in range(d * d + 1):
        products = [a @ b for a in basis for b in basis]
        new_basis = orthonormalize_hs(list(basis) + products)
        if len(new_basis) == len(basis):
            return OperatorAlgebra(d, np.stack(basis))
        basis = new_basis
    raise AlgebraError("product closure did not stabilize within d^2 rounds")


def full_algebra(d: int) -> OperatorAlgebra:
    basis = np.eye(d * d, dtype=complex).reshape(d * d, d, d)
    alg = OperatorAlgebra(d, basis)
    eye = np.eye(d, dtype=complex)
    alg._decomposition = StructuralDecomposition(d, (Block(1, d, eye, eye),))
    triv = _trivial_core(d)
    _link_commutants(alg, triv)
    return alg


def trivial_algebra(d: int) -> OperatorAlgebra:
    alg = _trivial_core(d)
    _link_commutants(alg, full_algebra(d))
    return alg


def _trivial_core(d: int) -> OperatorAlgebra:
    basis = np.eye(d, dtype=complex).reshape(1, d, d) / np.sqrt(d)
    alg = OperatorAlgebra(d, basis)
    eye = np.eye(d, dtype=complex)
    alg._decomposition = StructuralDecomposition(d, (Block(d, 1, eye, eye),))
    return alg


def masa_from_unitary(u: np.ndarray) -> OperatorAlgebra:
    """Maximal abelian algebra spanned by |u_i><u_i| for the columns u_i."""
    u = np.asarray(u, dtype=complex)
    _check_unitary(u)
    d = u.shape[0]
    basis = np.einsum("ik,jk->kij", u, u.conj())
    alg = OperatorAlgebra(d, basis)
    blocks = tuple(
        Block(1, 1, np.outer(u[:, i], u[:, i].conj()), u[:, i: i + 1]) for i in range(d)
    )
    alg._decomposition = StructuralDecomposition(d, _canonical_block_order(d, blocks))
    alg._commutant = alg  # a MASA is its own commutant
    return alg


def diagonal_masa(d: int) -> OperatorAlgebra:
    return masa_from_unitary(np.eye(d))


def structural_algebra(
    block_dims: Sequence[tuple[int, int]],
    basis_change: Optional[np.ndarray] = None,
) -> OperatorAlgebra:
    """Algebra with prescribed block data [(n_J, d_J), ...].

    Blocks are laid out along the diagonal in the given order; an optional
    unitary then moves the whole structure to a generic position.
    """
    block_dims = [(int(n), int(dj)) for n, dj in block_dims]
    if not block_dims or any(n < 1 or dj < 1 for n, dj in block_dims):
        raise AlgebraError("block dimensions must be positive")
    d = sum(n * dj for n, dj in block_dims)
    alg = _structural_core(d, block_dims, swap_factors=False)
    comm = _structural_core(d, block_dims, swap_factors=True)
    if basis_change is not None:
        basis_change = np.asarray(basis_change, dtype=complex)
        if basis_change.shape != (d, d):
            raise AlgebraError("basis change unitary has wrong shape")
        _check_unitary(basis_change)
        alg = alg.conjugated(basis_change)
        comm = comm.conjugated(basis_change)
    _link_commutants(alg, comm)
    return alg


def _structural_core(d, block_dims, swap_factors):
    basis_mats = []
    blocks = []
    eye_d = np.eye(d, dtype=complex)
    offset = 0
    for n, dj in block_dims:
        m = n * dj
        iso = eye_d[:, offset: offset + m]
        if swap_factors:
            iso = iso @ _factor_swap(n, dj).T
            n, dj = dj, n
        for l in range(dj):
            for mm in range(dj):
                unit = np.zeros((dj, dj), dtype=complex)
                unit[l, mm] = 1.0
                mat = iso @ np.kron(np.eye(n), unit) @ dagger(iso) / np.sqrt(n)
                basis_mats.append(mat)
        proj = iso @ dagger(iso)
        blocks.append(Block(n, dj, proj, iso))
        offset += m
    alg = OperatorAlgebra(d, np.stack(basis_mats))
    alg._decomposition = StructuralDecomposition(d, _canonical_block_order(d, tuple(blocks)))
    return alg


def _factor_swap(n: int, d: int) -> np.ndarray:
    """Permutation C^n (x) C^d -> C^d (x) C^n sending |p>|l> to |l>|p>."""
    p = np.zeros((n * d, n * d))
    for pp in range(n):
        for l in range(d):
            p[l * n + pp, pp * d + l] = 1.0
    return p


def lattice_algebra(
    site_dims: Sequence[int],
    region: Iterable[int],
    _with_commutant: bool = True,
) -> OperatorAlgebra:
    """Local algebra of a lattice region: L(H_S) (x) 1 on the complement.

    Sites are 0-indexed; region=() gives the scalars C1 and the full site set
    gives L(H).  The commutant is the algebra of the complementary region.
    """
    site_dims = [int(x) for x in site_dims]
    if not site_dims or any(x < 1 for x in site_dims):
        raise AlgebraError("site dimensions must be positive integers")
    region = sorted(set(int(r) for r in region))
    for r in region:
        if r < 0 or r >= len(site_dims):
            raise AlgebraError(f"region index {r} out of range")
    comp = [i for i in range(len(site_dims)) if i not in region]
    d = prod(site_dims)
    n = prod(site_dims[i] for i in comp) if comp else 1
    dj = prod(site_dims[i] for i in region) if region else 1
    iso = _site_order_unitary(site_dims, comp + region)
    basis_mats = np.empty((dj * dj, d, d), dtype=complex)
    scaled = iso / np.sqrt(n)
    for l in range(dj):
        for m in range(dj):
            unit = np.zeros((dj, dj), dtype=complex)
            unit[l, m] = 1.0
            basis_mats[l * dj + m] = scaled @ np.kron(np.eye(n), unit) @ dagger(iso)
    alg = OperatorAlgebra(d, basis_mats)
    alg._decomposition = StructuralDecomposition(
        d, (Block(n, dj, np.eye(d, dtype=complex), iso),)
    )
    if _with_commutant:
        _link_commutants(alg, lattice_algebra(site_dims, comp, _with_commutant=False))
    return alg


def _site_order_unitary(site_dims, order):
    """Permutation mapping (x)_{i in order} H_i to the natural site order."""
    d = prod(site_dims)
    idx = np.arange(d)
    digits = np.unravel_index(idx, [site_dims[i] for i in order])
    natural = [None] * len(site_dims)
    for pos, site in enumerate(order):
        natural[site] = digits[pos]
    rows = np.ravel_multi_index(tuple(natural), site_dims)
    u = np.zeros((d, d), dtype=complex)
    u[rows, idx] = 1.0
    return u


def _link_commutants(a: OperatorAlgebra, b: OperatorAlgebra) -> None:
    a._commutant = b
    b._commutant = a


# -- structural operations ---------------------------------------------------


def compute_commutant(alg: OperatorAlgebra) -> OperatorAlgebra:
    """Commutant as the joint nullspace of X -> [X, B_k] over the basis."""
    d = alg.d
    eye = np.eye(d, dtype=complex)
    rows = alg.dim * d * d
    if rows <= _STACKED_ROWS_LIMIT:
        stacked = np.concatenate(
            [np.kron(b, eye) - np.kron(eye, b.T) for b in alg.basis], axis=0
        )
        # unit-norm basis elements set the natural scale; without the floor a
        # stack that is pure rounding noise (scalar algebras) loses its nullspace
        null_rows = nullspace(stacked, scale=1.0)
    else:
        # Gram route: nullspace of sum_k L_k^dag L_k, assembled analytically.
        g_left = np.zeros((d, d), dtype=complex)
        g_right = np.zeros((d, d), dtype=complex)
        cross = np.zeros((d * d, d * d), dtype=complex)
        for b in alg.basis:
            g_left += dagger(b) @ b
            g_right += b.conj() @ b.T
            cross += np.kron(dagger(b), b.T) + np.kron(b, b.conj())
        gram = np.kron(g_left, eye) + np.kron(eye, g_right) - cross
        gram = (gram + dagger(gram)) / 2
        evals, evecs = np.linalg.eigh(gram)
        keep = evals <= _GRAM_NULL_RTOL * max(evals[-1], 1.0)
        null_rows = evecs[:, keep].T
    basis = null_rows.reshape(-1, d, d)
    return OperatorAlgebra(d, basis)


def commutant(alg: OperatorAlgebra) -> OperatorAlgebra:
    return alg.commutant_algebra()


def algebra_intersection(a: OperatorAlgebra, b: OperatorAlgebra) -> OperatorAlgebra:
    """Intersection of the two algebras as subspaces (always unital)."""
    if a.d != b.d:
        raise AlgebraError(f"ambient dimensions differ: {a.d} vs {b.d}")
    eye = np.eye(a.d * a.d, dtype=complex)
    pa = a.projection_superoperator().transfer
    pb = b.projection_superoperator().transfer
    stacked = np.concatenate([eye - pa, eye - pb], axis=0)
    basis = nullspace(stacked, scale=1.0).reshape(-1, a.d, a.d)
    return OperatorAlgebra(a.d, basis)


def center(alg: OperatorAlgebra) -> OperatorAlgebra:
    return algebra_intersection(alg, alg.commutant_algebra())


def algebras_equal(a: OperatorAlgebra, b: OperatorAlgebra, tol: float = EQUALITY_TOL) -> bool:
    """Basis-free equality: HS distance between the two projectors."""
    if a.d != b.d:
        return False
    pa = a.projection_superoperator().transfer
    pb = b.projection_superoperator().transfer
    return bool(np.linalg.norm(pa - pb) <= tol)


def decompose(alg: OperatorAlgebra, rng: Optional[RngStream] = None) -> StructuralDecomposition:
    return alg.decomposition(rng)


def _compute_decomposition(alg, rng, max_attempts: int = 12) -> StructuralDecomposition:
    d = alg.d
    commutant_alg = alg.commutant_algebra()
    center_alg = algebra_intersection(alg, commutant_alg)
    d_z = center_alg.dim
    last_failure = "no attempt made"
    for attempt in range(max_attempts):
        gen = rng.generator(attempt)
        try:
            blocks = _decompose_attempt(alg, center_alg, d_z, gen)
        except _RetryDraw as exc:
            last_failure = str(exc)
            continue
        dec = StructuralDecomposition(d, _canonical_block_order(d, blocks))
        if dec.algebra_dim != alg.dim or dec.commutant_dim != commutant_alg.dim:
            last_failure = "dimension bookkeeping mismatch"
            continue
        if sum(b.n * b.d for b in dec.blocks) != d:
            last_failure = "block sizes do not fill the space"
            continue
        return dec
    raise DecompositionError(
        f"central decomposition failed after {max_attempts} attempts: {last_failure}"
    )


def _decompose_attempt(alg, center_alg, d_z, gen):
    d = alg.d
    c = _random_hermitian(center_alg.basis, gen)
    evals, evecs = np.linalg.eigh(c)
    clusters = _cluster_indices(evals)
    if len(clusters) != d_z:
        raise _RetryDraw(f"center element produced {len(clusters)} clusters, need {d_z}")
    blocks = []
    for cluster in clusters:
        v = evecs[:, cluster]
        m = v.shape[1]
        restricted = [dagger(v) @ b @ v for b in alg.basis]
        local_basis = orthonormalize_hs(restricted)
        dj = isqrt(len(local_basis))
        if dj * dj != len(local_basis) or m % dj != 0:
            raise _RetryDraw("restricted algebra dimension is not a perfect square")
        nj = m // dj
        units = _matrix_unit_isometry(local_basis, nj, dj, gen)
        iso = v @ units
        _validate_block_form(alg, iso, nj, dj)
        blocks.append(Block(nj, dj, v @ dagger(v), iso))
    return tuple(blocks)


def _random_hermitian(basis, gen):
    coeffs = gen.standard_normal(len(basis)) + 1j * gen.standard_normal(len(basis))
    m = np.tensordot(coeffs, np.asarray(basis), axes=1)
    return (m + dagger(m)) / 2


def _cluster_indices(evals: np.ndarray) -> list[list[int]]:
    spread = float(evals[-1] - evals[0])
    scale = max(abs(float(evals[0])), abs(float(evals[-1])), 1.0)
    if spread <= 1e-12 * scale:
        return [list(range(len(evals)))]
    gap_tol = CLUSTER_RTOL * spread
    clusters = [[0]]
    for i in range(1, len(evals)):
        if evals[i] - evals[i - 1] > gap_tol:
            clusters.append([i])
        else:
            clusters[-1].append(i)
    return clusters


def _matrix_unit_isometry(local_basis, nj, dj, gen):
    """Orthonormal block coordinates in which the algebra reads 1_n (x) M_d.

    Spectral projections Q_1..Q_d of a generic hermitian algebra element each
    have rank n; Q_l x Q_1 for a generic algebra element x is full rank, and
    its polar isometry transports the basis of range(Q_1) to range(Q_l).
    """
    m = nj * dj
    if dj == 1:
        return np.eye(m, dtype=complex)
    h = _random_hermitian(local_basis, gen)
    evals, evecs = np.linalg.eigh(h)
    clusters = _cluster_indices(evals)
    if len(clusters) != dj or any(len(c) != nj for c in clusters):
        raise _RetryDraw("block element spectrum did not split into d_J level sets")
    q = [evecs[:, c] for c in clusters]
    coeffs = gen.standard_normal(len(local_basis)) + 1j * gen.standard_normal(len(local_basis))
    x = np.tensordot(coeffs, np.asarray(local_basis), axes=1)
    columns = [q[0]]
    for l in range(1, dj):
        t = q[l] @ (dagger(q[l]) @ x @ q[0])
        u, s, vh = np.linalg.svd(t, full_matrices=False)
        if s[-1] <= RANK_RTOL * max(s[0], 1.0):
            raise _RetryDraw("transport operator between level sets is rank-deficient")
        columns.append(u @ vh)
    iso = np.empty((m, m), dtype=complex)
    for l, w in enumerate(columns):
        for p in range(nj):
            iso[:, p * dj + l] = w[:, p]
    return iso


def _validate_block_form(alg, iso, nj, dj):
    for b in alg.basis:
        w = (dagger(iso) @ b @ iso).reshape(nj, dj, nj, dj)
        mean = np.einsum("plpm->lm", w) / nj
        ideal = np.einsum("pq,lm->plqm", np.eye(nj), mean)
        if np.linalg.norm(w - ideal) > ISO_TOL:
            raise _RetryDraw("isometry does not block-diagonalize the algebra")


def _canonical_block_order(d: int, blocks: tuple[Block, ...]) -> tuple[Block, ...]:
    # The ordering of blocks is a free choice; sort on (d_J, n_J, <R>) with a
    # fixed reference matrix so reports and caches are reproducible.
    ref = np.diag(np.arange(d) / max(d - 1, 1))

    def key(b: Block):
        return (b.d, b.n, round(float(np.real(np.trace(b.projector @ ref))), 9))

    return tuple(sorted(blocks, key=key))


def _conjugate_decomposition(dec: StructuralDecomposition, u: np.ndarray) -> StructuralDecomposition:
    blocks = tuple(
        Block(b.n, b.d, u @ b.projector @ dagger(u), u @ b.isometry) for b in dec.blocks
    )
    return StructuralDecomposition(dec.dim, blocks)


def _check_unitary(u: np.ndarray, tol: float = 1e-8) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise AlgebraError("expected a square matrix")
    if np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])) > tol * u.shape[0]:
        raise AlgebraError("matrix is not unitary")


# -- block bases, projections, sampling --------------------------------------


def is_collinear(dec: StructuralDecomposition, tol: float = 1e-9) -> tuple[bool, Optional[float]]:
    """Whether n_J/d_J is block-independent; the common ratio when it is."""
    ratios = [b.n / b.d for b in dec.blocks]
    if max(ratios) - min(ratios) <= tol:
        return True, ratios[0]
    return False, None


def block_bases(dec: StructuralDecomposition) -> BlockBases:
    e, e_labels, et, et_labels = [], [], [], []
    for j, b in enumerate(dec.blocks):
        iso = b.isometry
        for l in range(b.d):
            for m in range(b.d):
                unit = np.zeros((b.d, b.d), dtype=complex)
                unit[l, m] = 1.0
                e.append(iso @ np.kron(np.eye(b.n) / np.sqrt(b.d), unit) @ dagger(iso))
                e_labels.append((j, l, m))
        for p in range(b.n):
            for q in range(b.n):
                unit = np.zeros((b.n, b.n), dtype=complex)
                unit[p, q] = 1.0
                et.append(iso @ np.kron(unit, np.eye(b.d) / np.sqrt(b.n)) @ dagger(iso))
                et_labels.append((j, p, q))
    return BlockBases(tuple(e), tuple(e_labels), tuple(et), tuple(et_labels))


def projection_map(alg: OperatorAlgebra) -> SuperOperator:
    """Conditional expectation onto the algebra (HS-orthogonal, CP, unital)."""
    return alg.projection_superoperator()


def kraus_projection_maps(dec: StructuralDecomposition) -> tuple[SuperOperator, SuperOperator]:
    """(P_A, P_A') in Kraus form built from the block bases."""
    bases = block_bases(dec)
    return SuperOperator.from_kraus(bases.e_tilde), SuperOperator.from_kraus(bases.e)


def haar_algebra_unitary(
    dec: StructuralDecomposition, rng: RngStream, counter: int = 0
) -> np.ndarray:
    """Haar unitary of the algebra: independent Haar factors on each irrep."""
    gen = rng.generator(counter)
    u = np.zeros((dec.dim, dec.dim), dtype=complex)
    for b in dec.blocks:
        uj = _haar_unitary_from_generator(b.d, gen)
        u += b.isometry @ np.kron(np.eye(b.n), uj) @ dagger(b.isometry)
    return u


def interleaved_block_swap(n: int, d: int) -> np.ndarray:
    """Identity on the two n factors, swap of the two d factors, interleaved.

    Acts on (C^n (x) C^d)^(x 2); this is the building block of the omega
    operator of one central block.
    """
    return swap_operator([n, d], {1})
