"""Lindblad master equation machinery.

Assembles the Liouvillian as a sparse superoperator, integrates transient
dynamics with an adaptive embedded Runge-Kutta scheme (scipy's solve_ivp on
the vectorized density matrix), solves for the steady state by shifted
inverse power iteration on a sparse LU factorization, and evaluates the
input-output observables of the three-port geometry: output photon numbers,
equal-time and time-delayed second-order correlations (quantum regression).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .circuit import (
    CircuitParams,
    SupermodeParams,
    TimeDepHamiltonian,
    bare_mode_ops,
    build_effective_hamiltonian,
    derive_supermodes,
)
from .fockspace import (
    DensityMatrix,
    HilbertSpace,
    InvalidArgumentError,
    InvalidDimensionError,
    Operator,
    SuperOperator,
    annihilation,
    embed,
    pauli,
    spost,
    spre,
    vectorize,
)


class StiffnessError(RuntimeError):
    """The adaptive integrator underflowed its step size."""


class NumericalFailureError(RuntimeError):
    """An iterative solver failed to converge."""


class DegenerateSteadyStateError(NumericalFailureError):
    """The Liouvillian null space is (numerically) more than one-dimensional."""


class UndefinedCorrelationError(ValueError):
    """A correlation was requested for a port with no output photons."""


# integrator-drift tolerances for states coming out of evolve()
_TRAJ_TOL = dict(tol_herm=1e-8, tol_trace=1e-7, tol_positivity=1e-6)


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus collapse operators with their rates.

    The Hamiltonian is either a static Operator or a list of
    (Operator, f(t)) pairs; collapse operators enter the dissipator as
    rate * D[B] with D[B]rho = B rho B^dag - {B^dag B, rho}/2.
    """

    hamiltonian: Operator | TimeDepHamiltonian
    collapse_ops: tuple[tuple[Operator, float], ...]

    def __init__(self, hamiltonian, collapse_ops: Sequence[tuple[Operator, float]]):
        space = hamiltonian.space if isinstance(hamiltonian, Operator) else hamiltonian[0][0].space
        collapse = []
        for op, rate in collapse_ops:
            if rate < 0:
                raise InvalidArgumentError(f"collapse rate must be nonnegative, got {rate}")
            if op.space.dims != space.dims:
                raise InvalidDimensionError("collapse operator space differs from Hamiltonian space")
            collapse.append((op, float(rate)))
        if not isinstance(hamiltonian, Operator):
            for op, _ in hamiltonian:
                if op.space.dims != space.dims:
                    raise InvalidDimensionError("Hamiltonian terms on different spaces")
        object.__setattr__(self, "hamiltonian", hamiltonian)
        object.__setattr__(self, "collapse_ops", tuple(collapse))

    @property
    def space(self) -> HilbertSpace:
        h = self.hamiltonian
        return h.space if isinstance(h, Operator) else h[0][0].space

    @property
    def is_static(self) -> bool:
        return isinstance(self.hamiltonian, Operator)


def standard_collapse_ops(
    p: CircuitParams,
    space: HilbertSpace,
    mode_ops: tuple[Operator, Operator] | None = None,
) -> list[tuple[Operator, float]]:
    """Default dissipation channels: qubit decay and dephasing, mode losses.

    {(sigma_-, Gamma), (sigma_z, Gamma_f/2), (a1, gamma1), (a2, gamma2)};
    pass mode_ops to supply a1, a2 in a rotated (supermode-labeled) frame.
    """
    if mode_ops is None:
        n = space.dims[1]
        mode_ops = (embed(annihilation(n), space, 1), embed(annihilation(n), space, 2))
    return [
        (embed(pauli("minus"), space, 0), p.Gamma),
        (embed(pauli("z"), space, 0), p.Gamma_f / 2),
        (mode_ops[0], p.gamma1),
        (mode_ops[1], p.gamma2),
    ]


def _dissipator(op: Operator, rate: float) -> SuperOperator:
    bdb = op.dag() @ op
    return rate * (spre(op) @ spost(op.dag()) - 0.5 * spre(bdb) - 0.5 * spost(bdb))


def build_liouvillian(model: LindbladModel) -> SuperOperator:
    """Generator of the master equation on column-stacked density matrices.

    L = -i (spre(H) - spost(H)) + sum_k rate_k D[B_k]; requires a static
    Hamiltonian (time-dependent models are integrated by evolve directly).
    """
    if not model.is_static:
        raise InvalidArgumentError(
            "build_liouvillian requires a static Hamiltonian; use evolve for time-dependent models"
        )
    h = model.hamiltonian
    liouv = -1j * (spre(h) - spost(h))
    for op, rate in model.collapse_ops:
        if rate > 0:
            liouv = liouv + _dissipator(op, rate)
    return liouv


def _dissipator_matrix(model: LindbladModel) -> sp.spmatrix:
    d = model.space.total_dim
    acc = sp.csr_matrix((d * d, d * d), dtype=complex)
    for op, rate in model.collapse_ops:
        if rate > 0:
            acc = acc + _dissipator(op, rate).matrix
    return acc


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the master equation."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]

    def expect(self, op: Operator) -> np.ndarray:
        """Expectation value of op along the trajectory."""
        return np.array([np.sum(s.matrix * op.matrix.T) for s in self.states])

    def populations(self, flat_indices: Sequence[int]) -> np.ndarray:
        """Summed diagonal weight on the given basis indices, per sample."""
        idx = list(flat_indices)
        return np.array([s.matrix[idx, idx].real.sum() for s in self.states])


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_grid: Sequence[float],
    rtol: float = 1e-8,
    atol: float = 1e-10,
    method: str = "RK45",
) -> Trajectory:
    """Integrate the master equation, sampling the solution on t_grid.

    Uses an adaptive embedded explicit Runge-Kutta pair with per-element
    (rtol, atol) error control and dense output. Time-dependent Hamiltonians
    are re-evaluated at every integrator stage. A step-size underflow is
    reported as StiffnessError.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise InvalidArgumentError("t_grid must be an increasing vector with >= 2 points")
    if rho0.space.dims != model.space.dims:
        raise InvalidDimensionError("initial state space differs from model space")

    d = model.space.total_dim
    y0 = vectorize(rho0)

    if model.is_static:
        liouv = build_liouvillian(model).matrix

        def rhs(t, y):
            return liouv @ y

    else:
        diss = _dissipator_matrix(model)
        terms = [(op.matrix, f) for op, f in model.hamiltonian]

        def rhs(t, y):
            h = terms[0][0] * terms[0][1](t)
            for m, f in terms[1:]:
                h = h + m * f(t)
            rho = y.reshape((d, d), order="F")
            drho = -1j * (h @ rho - rho @ h)
            return drho.reshape(-1, order="F") + diss @ y

    sol = solve_ivp(
        rhs, (t_grid[0], t_grid[-1]), y0, t_eval=t_grid, rtol=rtol, atol=atol, method=method
    )
    if not sol.success:
        raise StiffnessError(
            f"integrator failed: {sol.message}; try a shorter time span, looser tolerances, "
            "or the static-Liouvillian exponential path (propagate_expm)"
        )

    states = []
    for k in range(sol.y.shape[1]):
        m = sol.y[:, k].reshape((d, d), order="F")
        m = (m + m.conj().T) / 2
        states.append(DensityMatrix(Operator(model.space, m), **_TRAJ_TOL))
    return Trajectory(times=t_grid, states=tuple(states))


def propagate_expm(liouv: SuperOperator, rho0: DensityMatrix, t_grid: Sequence[float]) -> Trajectory:
    """Exact propagation exp(L t) rho0 for static Liouvillians."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise InvalidArgumentError("t_grid must be increasing")
    d = rho0.space.total_dim
    mat = liouv.matrix.tocsc()
    y = vectorize(rho0)
    states = []
    t_prev = t_grid[0]
    for k, t in enumerate(t_grid):
        if k > 0:
            y = spla.expm_multiply(mat * (t - t_prev), y)
            t_prev = t
        m = y.reshape((d, d), order="F")
        m = (m + m.conj().T) / 2
        states.append(DensityMatrix(Operator(rho0.space, m), **_TRAJ_TOL))
    return Trajectory(times=t_grid, states=tuple(states))


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

def _factorize_shifted(mat: sp.spmatrix, shift: float):
    """Sparse LU of (L - shift I), growing the shift if L is exactly singular."""
    d2 = mat.shape[0]
    eye = sp.identity(d2, dtype=complex, format="csc")
    last_err = None
    for bump in (1.0, 1e2, 1e4):
        try:
            return spla.splu((mat - shift * bump * eye).tocsc())
        except RuntimeError as err:  # exactly singular factorization
            last_err = err
    raise NumericalFailureError(f"sparse LU of the shifted Liouvillian failed: {last_err}")


def _norm_2_estimate(mat: sp.spmatrix, iters: int = 12) -> float:
    """Largest singular value of mat by power iteration on mat^H mat."""
    n = mat.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    s = 1.0
    for _ in range(iters):
        w = mat.conj().T @ (mat @ v)
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    return float(np.sqrt(s))


def _second_smallest_singular(lu, d2: int, max_iters: int = 30) -> float:
    """Second-smallest singular value of the factorized matrix.

    Block power iteration on M^{-1} M^{-H} (two deterministic start vectors);
    the Ritz values approximate 1/sigma^2 of the two smallest singular
    values. Stops once the second Ritz value stabilizes: only its order of
    magnitude matters for degeneracy detection.
    """
    q = np.zeros((d2, 2), dtype=complex)
    d = int(np.sqrt(d2))
    q[:: d + 1, 0] = 1.0  # vec(identity): overlaps the steady state
    q[0, 1] = 1.0
    q[d + 1, 1] = -1.0  # traceless diagonal direction
    q, _ = np.linalg.qr(q)
    theta2_prev = None
    for _ in range(max_iters):
        z = np.column_stack([lu.solve(lu.solve(q[:, j], trans="H")) for j in range(2)])
        t = q.conj().T @ z
        ritz = np.linalg.eigvalsh((t + t.conj().T) / 2)
        theta2 = float(min(abs(ritz)))
        q, _ = np.linalg.qr(z)
        if theta2_prev is not None and abs(theta2 - theta2_prev) <= 0.05 * abs(theta2):
            break
        theta2_prev = theta2
    if theta2 <= 0:
        return np.inf
    return 1.0 / np.sqrt(theta2)


def steady_state(
    liouv: SuperOperator,
    tol: float = 1e-10,
    max_iter: int = 200,
    check_uniqueness: bool = True,
) -> DensityMatrix:
    """Null vector of the Liouvillian as a density matrix.

    Shifted inverse power method: sparse LU of (L - sigma I) with
    sigma = 1e-12 ||L||_max, iterated from the vectorized maximally mixed
    state until ||L vec(rho)||_max < tol ||L||_max for the trace-normalized
    candidate. The start vector and shift are fixed for reproducibility.
    """
    mat = liouv.matrix.tocsc()
    d = liouv.space.total_dim
    norm_max = float(np.abs(mat.data).max()) if mat.nnz else 0.0
    if norm_max == 0.0:
        raise NumericalFailureError("zero Liouvillian has no unique steady state")
    lu = _factorize_shifted(mat, 1e-12 * norm_max)

    v = vectorize(np.eye(d, dtype=complex) / d)
    residual = np.inf
    for _ in range(max_iter):
        v = lu.solve(v)
        v = v / np.abs(v).max()
        trace = v[:: d + 1].sum()
        if abs(trace) > 1e-300:
            candidate = v / trace
            residual = float(np.abs(mat @ candidate).max())
            if residual < tol * norm_max:
                break
    else:
        raise NumericalFailureError(
            f"inverse iteration did not converge in {max_iter} iterations; "
            f"final residual {residual:.3e} (tolerance {tol * norm_max:.3e})"
        )
    # one polish application: the tiny shift gains ~|shift|/gap per solve and
    # pushes e.g. undriven configurations to the floating-point floor rather
    # than leaving tolerance-level junk in empty modes
    v = lu.solve(v)
    v = v / np.abs(v).max()

    if check_uniqueness:
        sigma2 = _second_smallest_singular(lu, d * d)
        sigma_max = _norm_2_estimate(mat)
        if sigma2 < 1e-8 * sigma_max:
            raise DegenerateSteadyStateError(
                f"second-smallest singular value {sigma2:.3e} is below 1e-8 of the largest "
                f"({sigma_max:.3e}); the steady state is not unique"
            )

    rho = (v / v[:: d + 1].sum()).reshape((d, d), order="F")
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    return DensityMatrix(Operator(liouv.space, rho), tol_positivity=1e-6)


# ---------------------------------------------------------------------------
# input-output observables
# ---------------------------------------------------------------------------

def _default_mode_ops(space: HilbertSpace) -> tuple[Operator, Operator]:
    if space.n_subsystems != 3:
        raise InvalidDimensionError(
            "default mode operators need the (qubit, mode, mode) space; pass mode_ops explicitly"
        )
    n1, n2 = space.dims[1], space.dims[2]
    return embed(annihilation(n1), space, 1), embed(annihilation(n2), space, 2)


def _expect(rho: DensityMatrix, matrix: np.ndarray) -> complex:
    return complex(np.sum(rho.matrix * matrix.T))


def output_photon_numbers(
    rho_ss: DensityMatrix,
    gamma1: float,
    gamma2: float,
    mode_ops: tuple[Operator, Operator] | None = None,
) -> tuple[float, float, float]:
    """Average output photon numbers of the three ports.

    Each resonator loses photons at equal rates gamma_i/3 into its own line,
    the joint line, and the environment, so
    N1 = gamma1/3 <a1+ a1>, N2 = gamma2/3 <a2+ a2>, and the joint port adds
    the interference term sqrt(gamma1 gamma2)(<a1+ a2> + <a2+ a1>)/3.
    """
    a1, a2 = mode_ops if mode_ops is not None else _default_mode_ops(rho_ss.space)
    n1 = _expect(rho_ss, (a1.dag() @ a1).matrix).real
    n2 = _expect(rho_ss, (a2.dag() @ a2).matrix).real
    cross = _expect(rho_ss, (a1.dag() @ a2).matrix) + _expect(rho_ss, (a2.dag() @ a1).matrix)
    n3 = (gamma1 * n1 + gamma2 * n2 + np.sqrt(gamma1 * gamma2) * cross.real) / 3
    return gamma1 * n1 / 3, gamma2 * n2 / 3, n3


def _port_operator(
    port: int, gamma1: float, gamma2: float, a1: Operator, a2: Operator
) -> Operator:
    if port == 1:
        return np.sqrt(gamma1 / 3) * a1
    if port == 2:
        return np.sqrt(gamma2 / 3) * a2
    if port == 3:
        return np.sqrt(gamma1 / 3) * a1 + np.sqrt(gamma2 / 3) * a2
    raise InvalidArgumentError(f"port must be 1, 2 or 3, got {port}")


def g2_zero(
    rho_ss: DensityMatrix,
    gamma1: float,
    gamma2: float,
    mode_ops: tuple[Operator, Operator] | None = None,
    ports: Sequence[int] = (1, 2, 3),
) -> tuple[float, ...]:
    """Equal-time second-order correlations of the requested output ports.

    g2_i(0) = <c_i+ c_i+ c_i c_i> / <c_i+ c_i>^2 with the port operators
    c1 = sqrt(g1/3) a1, c2 = sqrt(g2/3) a2, c3 = c1 + c2 (the vacuum input
    terms drop in normal order). Port 3's numerator expands into the
    quadruple sum over both modes with the escape-rate weights.
    """
    a1, a2 = mode_ops if mode_ops is not None else _default_mode_ops(rho_ss.space)
    out = []
    for port in ports:
        c = _port_operator(port, gamma1, gamma2, a1, a2)
        n_c = _expect(rho_ss, (c.dag() @ c).matrix).real
        if n_c < 1e-12:
            raise UndefinedCorrelationError(f"port {port} has no output photons (N = {n_c:.3e})")
        numer = _expect(rho_ss, (c.dag() @ c.dag() @ c @ c).matrix).real
        out.append(numer / n_c**2)
    return tuple(out)


def g2_tau(
    model: LindbladModel,
    rho_ss: DensityMatrix,
    port: int,
    tau_grid: Sequence[float],
    gamma1: float,
    gamma2: float,
    mode_ops: tuple[Operator, Operator] | None = None,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> np.ndarray:
    """Time-delayed second-order correlation of one output port.

    Quantum regression: the operator-dressed steady state c rho_ss c^dag
    (trace-normalized) is evolved under the same Liouvillian and
    g2(tau) = Tr[c^dag c rho~(tau)] / Tr[c^dag c rho_ss]^2. Requires a
    static Hamiltonian and a supplied steady state.
    """
    if not model.is_static:
        raise InvalidArgumentError("g2_tau requires a static Hamiltonian")
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid[0] != 0:
        raise InvalidArgumentError("tau_grid must start at 0")
    a1, a2 = mode_ops if mode_ops is not None else _default_mode_ops(rho_ss.space)
    c = _port_operator(port, gamma1, gamma2, a1, a2)
    cdc = (c.dag() @ c).matrix
    n_c = _expect(rho_ss, cdc).real
    if n_c < 1e-12:
        raise UndefinedCorrelationError(f"port {port} has no output photons (N = {n_c:.3e})")

    dressed = c.matrix @ rho_ss.matrix @ c.matrix.conj().T
    dressed = (dressed + dressed.conj().T) / (2 * np.trace(dressed).real)
    rho0 = DensityMatrix(Operator(rho_ss.space, dressed), **_TRAJ_TOL)
    traj = evolve(model, rho0, tau_grid, rtol=rtol, atol=atol)
    return np.array([_expect(state, cdc).real / n_c for state in traj.states])


# ---------------------------------------------------------------------------
# convenience wiring for the paper system
# ---------------------------------------------------------------------------

def effective_model(
    p: CircuitParams,
    cutoff: int,
    delta_plus: float | None = None,
    enforce_constraint: bool = True,
) -> tuple[LindbladModel, SupermodeParams, tuple[Operator, Operator]]:
    """Supermode-frame effective model with the standard dissipation channels.

    Builds H_eff on the (qubit, A+, A-) space with per-mode dimension
    `cutoff`, and the collapse set {sigma-, sigma_z, a1, a2} with a1, a2
    expressed in the supermode labels. Returns (model, supermode params,
    (a1, a2)); the mode operators are what the input-output observables
    need on this space.
    """
    sp_params = derive_supermodes(p, enforce_constraint=enforce_constraint)
    if delta_plus is not None:
        sp_params = sp_params.with_detuning(delta_plus)
    space = HilbertSpace((2, cutoff, cutoff))
    h_eff = build_effective_hamiltonian(sp_params, space)
    mode_ops = bare_mode_ops(sp_params, space)
    model = LindbladModel(h_eff, standard_collapse_ops(p, space, mode_ops))
    return model, sp_params, mode_ops
