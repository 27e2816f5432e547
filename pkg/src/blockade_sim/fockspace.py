"""Tensor-product operator algebra on truncated Fock spaces.

Conventions used throughout the package:

- subsystem order is (qubit, mode1, mode2); tensor components combine with
  ``np.kron`` in that order, so flat indices are C-order raveled occupation
  tuples;
- qubit basis is {|e>, |g>} with sigma_z|e> = +|e> (|e> is index 0);
- vectorization is column-stacking: vec(A rho B) = (B^T kron A) vec(rho).

Operators are dense complex matrices; superoperators are scipy sparse.
All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class InvalidDimensionError(ValueError):
    """Operator/space dimensions are inconsistent."""


class InvalidArgumentError(ValueError):
    """Argument outside the operation's domain."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered subsystem dimensions of a truncated tensor-product space."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise InvalidDimensionError("dims must be nonempty")
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"every subsystem dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def index(self, occupations: Sequence[int]) -> int:
        """Flat index of the basis state with the given occupation tuple."""
        if len(occupations) != len(self.dims):
            raise InvalidArgumentError("occupation tuple length does not match dims")
        return int(np.ravel_multi_index(tuple(occupations), self.dims))

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))


@dataclass(frozen=True)
class Operator:
    """Complex square matrix tagged with its HilbertSpace."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise InvalidDimensionError(
                f"matrix shape {m.shape} does not match space dimension {d}"
            )
        object.__setattr__(self, "matrix", _readonly(m))

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def _check_space(self, other: "Operator"):
        if self.space.dims != other.space.dims:
            raise InvalidDimensionError(
                f"operators on different spaces: {self.space.dims} vs {other.space.dims}"
            )

    def __add__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check_space(other)
            return Operator(self.space, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if self.space.dims != other.space.dims:
                raise InvalidDimensionError("operator and state on different spaces")
            return self.matrix @ other.amplitudes
        return self.matrix @ other


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state; squared norm within 1e-12 of 1."""

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if v.shape != (self.space.total_dim,):
            raise InvalidDimensionError("amplitude vector does not match space dimension")
        nrm2 = float(np.vdot(v, v).real)
        if abs(nrm2 - 1.0) > 1e-12:
            raise InvalidArgumentError(f"state not normalized: |psi|^2 = {nrm2!r}")
        object.__setattr__(self, "amplitudes", _readonly(v))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(Operator(self.space, np.outer(self.amplitudes, self.amplitudes.conj())))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite Operator.

    Construction validates the invariants; tolerances can be relaxed for
    states coming out of a numerical integrator (see dynamics.Trajectory).
    """

    op: Operator
    tol_herm: float = field(default=1e-10, compare=False)
    tol_trace: float = field(default=1e-8, compare=False)
    tol_positivity: float = field(default=1e-8, compare=False)

    def __post_init__(self):
        m = self.op.matrix
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > self.tol_herm:
            raise InvalidArgumentError(f"density matrix not Hermitian: max|rho-rho^dag| = {herm:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > self.tol_trace:
            raise InvalidArgumentError(f"density matrix trace {tr!r} not within tolerance of 1")
        lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lam_min < -self.tol_positivity:
            raise InvalidArgumentError(f"density matrix not positive: min eigenvalue = {lam_min:.3e}")

    @property
    def space(self) -> HilbertSpace:
        return self.op.space

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


@dataclass(frozen=True)
class SuperOperator:
    """d^2 x d^2 matrix acting on column-stacked density matrices (sparse)."""

    space: HilbertSpace
    matrix: sp.spmatrix

    def __post_init__(self):
        d2 = self.space.total_dim ** 2
        m = sp.csr_matrix(self.matrix)
        if m.shape != (d2, d2):
            raise InvalidDimensionError(f"superoperator shape {m.shape}, expected {(d2, d2)}")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, SuperOperator):
            if self.space.dims != other.space.dims:
                raise InvalidDimensionError("superoperators on different spaces")
            return SuperOperator(self.space, self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        if self.space.dims != other.space.dims:
            raise InvalidDimensionError("superoperators on different spaces")
        return SuperOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "SuperOperator") -> "SuperOperator":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "SuperOperator":
        return SuperOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# elementary operators
# ---------------------------------------------------------------------------

def annihilation(cutoff: int) -> Operator:
    """Bosonic lowering operator on a truncated Fock space.

    <n-1|a|n> = sqrt(n); exact on the truncated space, so a^dag a |n> = n|n>
    for every retained level and [a, a^dag] = 1 away from the top level.
    """
    if cutoff < 2:
        raise InvalidDimensionError(f"cutoff must be >= 2, got {cutoff}")
    m = np.zeros((cutoff, cutoff), dtype=complex)
    ns = np.arange(1, cutoff)
    m[ns - 1, ns] = np.sqrt(ns)
    return Operator(HilbertSpace((cutoff,)), m)


def number(cutoff: int) -> Operator:
    """Photon number operator a^dag a."""
    a = annihilation(cutoff)
    return a.dag() @ a


def pauli(which: str) -> Operator:
    """Pauli operator in the {|e>, |g>} basis, sigma_z|e> = +|e>."""
    mats = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
        "plus": [[0, 1], [0, 0]],   # sigma_+ = |e><g|
        "minus": [[0, 0], [1, 0]],  # sigma_- = |g><e|
    }
    if which not in mats:
        raise InvalidArgumentError(f"unknown Pauli label {which!r}")
    return Operator(HilbertSpace((2,)), np.array(mats[which], dtype=complex))


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def basis_state(space: HilbertSpace, occupations: Sequence[int]) -> StateVector:
    """Product basis state |n_0, n_1, ...> as a StateVector."""
    for n, d in zip(occupations, space.dims):
        if not 0 <= n < d:
            raise InvalidArgumentError(f"occupation {occupations} outside dims {space.dims}")
    v = np.zeros(space.total_dim, dtype=complex)
    v[space.index(occupations)] = 1.0
    return StateVector(space, v)


def embed(op: Operator, space: HilbertSpace, position: int) -> Operator:
    """Place a single-subsystem operator into the full tensor-product space.

    identity (x) ... (x) op (x) ... (x) identity, with op at `position`.
    """
    if not 0 <= position < space.n_subsystems:
        raise InvalidArgumentError(f"position {position} outside space with dims {space.dims}")
    if op.space.dims != (space.dims[position],):
        raise InvalidDimensionError(
            f"operator dimension {op.space.dims} does not match dims[{position}] = "
            f"{space.dims[position]}"
        )
    m = np.eye(1, dtype=complex)
    for i, d in enumerate(space.dims):
        m = np.kron(m, op.matrix if i == position else np.eye(d, dtype=complex))
    return Operator(space, m)


# ---------------------------------------------------------------------------
# reductions and reshufflings
# ---------------------------------------------------------------------------

def _as_tensor(matrix: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    # row index axes 0..n-1, column index axes n..2n-1
    return matrix.reshape(dims + dims)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the kept subsystems (trace preserved)."""
    keep = sorted(set(int(k) for k in keep))
    dims = rho.space.dims
    n = len(dims)
    if not keep:
        raise InvalidArgumentError("keep must be a nonempty set of subsystem indices")
    if any(k < 0 or k >= n for k in keep):
        raise InvalidArgumentError(f"keep indices {keep} outside 0..{n - 1}")
    t = _as_tensor(rho.matrix, dims)
    traced = [i for i in range(n) if i not in keep]
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    d_keep = int(np.prod([dims[k] for k in keep]))
    reduced = t.reshape(d_keep, d_keep)
    # re-Hermitize roundoff so the DensityMatrix invariants hold exactly
    reduced = (reduced + reduced.conj().T) / 2
    return DensityMatrix(
        Operator(HilbertSpace(tuple(dims[k] for k in keep)), reduced),
        tol_herm=rho.tol_herm, tol_trace=rho.tol_trace, tol_positivity=rho.tol_positivity,
    )


def partial_transpose(rho: DensityMatrix, subsystem: int) -> Operator:
    """Transpose the indices of one subsystem; Hermitian, trace 1, possibly non-positive."""
    dims = rho.space.dims
    n = len(dims)
    if not 0 <= subsystem < n:
        raise InvalidArgumentError(f"subsystem {subsystem} outside 0..{n - 1}")
    t = _as_tensor(rho.matrix, dims)
    t = np.swapaxes(t, subsystem, subsystem + n)
    d = rho.space.total_dim
    return Operator(rho.space, t.reshape(d, d))


def expectation(rho: DensityMatrix, op: Operator) -> complex:
    """Tr(rho op); real within 1e-10 when op is Hermitian."""
    if rho.space.dims != op.space.dims:
        raise InvalidDimensionError("state and operator on different spaces")
    return complex(np.sum(rho.matrix * op.matrix.T))


# ---------------------------------------------------------------------------
# vectorization (column stacking) and elementary superoperators
# ---------------------------------------------------------------------------

def vectorize(rho) -> np.ndarray:
    """Column-stack a matrix: vec(rho)[i + d*j] = rho[i, j]."""
    m = rho.matrix if isinstance(rho, (Operator, DensityMatrix)) else np.asarray(rho)
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def devectorize(vec: np.ndarray, space: HilbertSpace) -> Operator:
    d = space.total_dim
    v = np.asarray(vec, dtype=complex).ravel()
    if v.size != d * d:
        raise InvalidDimensionError(f"vector length {v.size} does not match {d}^2")
    return Operator(space, v.reshape((d, d), order="F"))


def spre(op: Operator) -> SuperOperator:
    """Left multiplication: spre(A) vec(rho) = vec(A rho)."""
    d = op.space.total_dim
    return SuperOperator(op.space, sp.kron(sp.identity(d), sp.csr_matrix(op.matrix), format="csr"))


def spost(op: Operator) -> SuperOperator:
    """Right multiplication: spost(B) vec(rho) = vec(rho B)."""
    d = op.space.total_dim
    return SuperOperator(op.space, sp.kron(sp.csr_matrix(op.matrix.T), sp.identity(d), format="csr"))
