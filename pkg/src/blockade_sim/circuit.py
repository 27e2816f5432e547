"""Hamiltonians of the two-resonator/gap-tunable-qubit circuit.

Builds the lab-frame Hamiltonian with both longitudinal and transverse
qubit-resonator couplings, derives the normal-mode (supermode) quantities,
and constructs the effective quadratic-coupling Hamiltonian responsible for
photon blockade.

Two index conventions coexist:

- "bare" spaces label the tensor slots (qubit, a1, a2);
- "supermode" spaces label them (qubit, A+, A-).

`mode_rotation` / `bare_to_supermode` / `supermode_to_bare` convert between
them; `bare_mode_ops` and `supermode_ops_bare` give the cross-frame operator
combinations directly.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .fockspace import (
    HilbertSpace,
    InvalidArgumentError,
    InvalidDimensionError,
    Operator,
    StateVector,
    annihilation,
    basis_state,
    embed,
    pauli,
)

# a time-dependent Hamiltonian is a list of (constant operator, scalar f(t)) terms
TimeDepHamiltonian = list[tuple[Operator, Callable[[float], complex]]]


class AdvisoryWarning(UserWarning):
    """A soft modeling assumption is violated (run continues)."""


class ConstraintViolationError(ValueError):
    """A hard physical-parameter constraint is violated."""


@dataclass(frozen=True)
class CircuitParams:
    """Physical inputs of the circuit (dimensionless units, hbar = 1).

    omega1, omega2   resonator frequencies
    g                inter-resonator (capacitive) coupling
    G1, G2           qubit-resonator coupling strengths
    theta_mix        qubit mixing angle, tan(theta_mix) = gap/bias
    omega_q          qubit frequency
    eps1, eps2       complex drive amplitudes
    omega_d          drive frequency (both drives share it)
    gamma1, gamma2   resonator total loss rates
    Gamma, Gamma_f   qubit decay and pure-dephasing rates
    """

    omega1: float
    omega2: float
    g: float
    G1: float
    G2: float
    theta_mix: float
    omega_q: float
    eps1: complex
    eps2: complex
    omega_d: float
    gamma1: float
    gamma2: float
    Gamma: float
    Gamma_f: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega_q", "omega_d", "gamma1", "gamma2", "Gamma", "Gamma_f"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be nonnegative")
        if self.G1 <= 0 or self.G2 <= 0:
            raise InvalidArgumentError("G1 and G2 must be positive")
        if self.g >= 0.1 * min(self.G1, self.G2):
            warnings.warn(
                f"g = {self.g} is not small against min(G1, G2) = {min(self.G1, self.G2)}; "
                "the rotating-wave treatment assumes g << G_i",
                AdvisoryWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class SupermodeParams:
    """Normal-mode quantities derived from CircuitParams."""

    beta: float
    Gbar: float
    Gx: float
    Gz: float
    Omega_plus: float
    Omega_minus: float
    Omega_plus_prime: float
    lamb_dicke: float
    Theta: float
    eps_plus: complex
    eps_minus: complex
    Delta_plus: float
    Delta_minus: float
    Delta2: float

    def with_detuning(self, delta_plus: float) -> "SupermodeParams":
        """Copy with the A+ drive detuning replaced (Delta_minus follows)."""
        return dataclasses.replace(
            self, Delta_plus=delta_plus, Delta_minus=delta_plus + self.Delta2
        )


def eq6_omega1(omega2: float, g: float, beta: float) -> float:
    """omega1 that satisfies the normal-mode decoupling constraint."""
    return omega2 + g * (beta**2 - 1) / beta


def solve_g_for_splitting(delta2: float, omega1: float, Gx: float, beta: float) -> float:
    """Inter-resonator coupling g giving a target supermode splitting Delta2.

    Solves 4 Gx^2 / (3 (omega1 + g/beta)) - g (1 + beta^2)/beta = delta2 for
    the physical (small-|g|) root; quadratic in u = g/beta.
    """
    b2 = 1 + beta**2
    # b2 u^2 + (delta2 + b2 omega1) u + (delta2 omega1 - 4 Gx^2 / 3) = 0
    A, B, C = b2, delta2 + b2 * omega1, delta2 * omega1 - 4 * Gx**2 / 3
    disc = B**2 - 4 * A * C
    if disc < 0:
        raise InvalidArgumentError(f"no real g gives Delta2 = {delta2} at omega1 = {omega1}")
    roots = [(-B + math.sqrt(disc)) / (2 * A), (-B - math.sqrt(disc)) / (2 * A)]
    u = min(roots, key=abs)
    return u * beta


def derive_supermodes(p: CircuitParams, enforce_constraint: bool = True) -> SupermodeParams:
    """Derive every supermode quantity from the physical circuit parameters.

    Requires the resonator detuning to satisfy omega1 - omega2 =
    g (beta^2 - 1)/beta (otherwise the normal modes do not decouple); pass
    enforce_constraint=False to skip, e.g. while re-solving g in sweeps.
    """
    beta = p.G1 / p.G2
    if enforce_constraint:
        residual = (p.omega1 - p.omega2) - p.g * (beta**2 - 1) / beta
        scale = max(abs(p.omega1), abs(p.omega2), 1.0)
        if abs(residual) > 1e-9 * scale:
            raise ConstraintViolationError(
                "resonator detuning violates the decoupling constraint "
                f"omega1 - omega2 = g(beta^2-1)/beta; residual = {residual:.6e}"
            )
    Gbar = math.hypot(p.G1, p.G2)
    Gz = Gbar * math.cos(p.theta_mix)
    Gx = -Gbar * math.sin(p.theta_mix)
    Omega_plus = p.omega1 + p.g / beta
    Omega_minus = p.omega2 - p.g / beta
    dispersive_shift = 4 * Gx**2 / (3 * Omega_plus)
    Omega_plus_prime = Omega_plus - dispersive_shift
    lamb_dicke = Gz / Omega_plus
    if abs(lamb_dicke) >= 0.15:
        warnings.warn(
            f"Lamb-Dicke parameter {lamb_dicke:.3f} is not small; the first-order "
            "expansion behind the quadratic coupling degrades",
            AdvisoryWarning,
            stacklevel=2,
        )
    norm = math.sqrt(1 + beta**2)
    eps_plus = (beta * p.eps1 + p.eps2) / norm
    eps_minus = (p.eps1 - beta * p.eps2) / norm
    Delta_plus = Omega_plus_prime - p.omega_d
    Delta2 = dispersive_shift - p.g * (1 + beta**2) / beta
    return SupermodeParams(
        beta=beta,
        Gbar=Gbar,
        Gx=Gx,
        Gz=Gz,
        Omega_plus=Omega_plus,
        Omega_minus=Omega_minus,
        Omega_plus_prime=Omega_plus_prime,
        lamb_dicke=lamb_dicke,
        Theta=-2 * lamb_dicke * Gx,
        eps_plus=complex(eps_plus),
        eps_minus=complex(eps_minus),
        Delta_plus=Delta_plus,
        Delta_minus=Delta_plus + Delta2,
        Delta2=Delta2,
    )


def resolve_resonant(p: CircuitParams, delta_plus: float = 0.0) -> CircuitParams:
    """Lock the qubit and drive onto the shifted supermode frequency.

    Sets omega_q = 2 Omega'_+ (two-photon resonance) and omega_d =
    Omega'_+ - delta_plus, then returns the updated parameters.
    """
    sp = derive_supermodes(p, enforce_constraint=False)
    return dataclasses.replace(
        p, omega_q=2 * sp.Omega_plus_prime, omega_d=sp.Omega_plus_prime - delta_plus
    )


def multiphoton_coefficient(kind: str, m: int, n: int, lamb_dicke: float) -> float:
    """Expansion coefficient of the m-photon-assisted n-photon qubit transition.

    B1(m, n) = e^{-2 lam^2} (-1)^{m+n}   (2 lam)^{2m+n-1} / ((m-1)! (m+n)!),  m >= 1
    B2(m, n) = e^{-2 lam^2} (-1)^{m+n-1} (2 lam)^{2m+n-1} / (m! (m+n-1)!),    m >= 0
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if kind == "B1":
        if m < 1:
            raise InvalidArgumentError(f"B1 requires m >= 1, got {m}")
        sign = (-1) ** (m + n)
        denom = math.factorial(m - 1) * math.factorial(m + n)
    elif kind == "B2":
        if m < 0:
            raise InvalidArgumentError(f"B2 requires m >= 0, got {m}")
        sign = (-1) ** (m + n - 1)
        denom = math.factorial(m) * math.factorial(m + n - 1)
    else:
        raise InvalidArgumentError(f"kind must be 'B1' or 'B2', got {kind!r}")
    return math.exp(-2 * lamb_dicke**2) * sign * (2 * lamb_dicke) ** (2 * m + n - 1) / denom


# ---------------------------------------------------------------------------
# Hamiltonian builders
# ---------------------------------------------------------------------------

def _check_space(space: HilbertSpace):
    if space.n_subsystems != 3 or space.dims[0] != 2 or space.dims[1] != space.dims[2]:
        raise InvalidDimensionError(f"expected dims (2, N, N), got {space.dims}")


def _one(t: float) -> complex:
    return 1.0


def _exp_phase(t: float, freq: float) -> complex:
    return np.exp(1j * freq * t)


def build_lab_hamiltonian(p: CircuitParams, space: HilbertSpace) -> TimeDepHamiltonian:
    """Full lab-frame Hamiltonian H0 + H_d(t) on the (qubit, a1, a2) space.

    Returned as (operator, f(t)) pairs whose weighted sum at time t is the
    Hamiltonian; the static part is first, the two drive terms carry
    e^{-i omega_d t} and its conjugate.
    """
    _check_space(space)
    n = space.dims[1]
    sz = embed(pauli("z"), space, 0)
    sx = embed(pauli("x"), space, 0)
    a1 = embed(annihilation(n), space, 1)
    a2 = embed(annihilation(n), space, 2)

    h0 = 0.5 * p.omega_q * sz + p.omega1 * (a1.dag() @ a1) + p.omega2 * (a2.dag() @ a2)
    h0 = h0 + p.g * (a1.dag() @ a2 + a2.dag() @ a1)
    sin_t, cos_t = math.sin(p.theta_mix), math.cos(p.theta_mix)
    for gi, ai in ((p.G1, a1), (p.G2, a2)):
        x_i = ai.dag() + ai
        h0 = h0 + (-gi * sin_t) * (sx @ x_i) + (gi * cos_t) * (sz @ x_i)

    terms: TimeDepHamiltonian = [(h0, _one)]
    if p.eps1 != 0 or p.eps2 != 0:
        h_drive = p.eps1 * a1.dag() + p.eps2 * a2.dag()
        terms.append((h_drive, partial(_exp_phase, freq=-p.omega_d)))
        terms.append((h_drive.dag(), partial(_exp_phase, freq=p.omega_d)))
    return terms


def build_effective_hamiltonian(sp: SupermodeParams, space: HilbertSpace) -> Operator:
    """Static rotating-frame Hamiltonian with the quadratic qubit coupling.

    On the (qubit, A+, A-) space:
    H_eff = (Delta+/2) sigma_z + Delta+ n_+ + Delta- n_- +
            Theta (sigma_+ A+^2 + h.c.) + sum_i (eps_i A_i^dag + h.c.)
    """
    _check_space(space)
    n = space.dims[1]
    sz = embed(pauli("z"), space, 0)
    sm = embed(pauli("minus"), space, 0)
    a_p = embed(annihilation(n), space, 1)
    a_m = embed(annihilation(n), space, 2)

    h = 0.5 * sp.Delta_plus * sz
    h = h + sp.Delta_plus * (a_p.dag() @ a_p) + sp.Delta_minus * (a_m.dag() @ a_m)
    h = h + sp.Theta * (sm.dag() @ a_p @ a_p + a_p.dag() @ a_p.dag() @ sm)
    for eps, op in ((sp.eps_plus, a_p), (sp.eps_minus, a_m)):
        h = h + eps * op.dag() + np.conj(eps) * op
    return h


def build_rotating_frame_full(
    p: CircuitParams,
    sp: SupermodeParams,
    space: HilbertSpace,
    include_linear_coupling: bool = True,
) -> TimeDepHamiltonian:
    """Rotating-frame Hamiltonian with the fast terms kept explicitly.

    The static part equals the effective Hamiltonian (the linear transverse
    coupling's dispersive effect is already absorbed into Omega'_+); on top
    of it the counter-rotating quadratic term oscillates at +-4 omega_d and,
    when include_linear_coupling is set, the transverse coupling terms at
    +-omega_d and +-3 omega_d. Time-averaging over one drive period recovers
    the effective Hamiltonian; used to cross-validate it.
    """
    _check_space(space)
    n = space.dims[1]
    sp_op = embed(pauli("plus"), space, 0)
    a_p = embed(annihilation(n), space, 1)

    terms: TimeDepHamiltonian = [(build_effective_hamiltonian(sp, space), _one)]
    h_cr = -sp.Theta * (sp_op @ a_p.dag() @ a_p.dag())
    terms.append((h_cr, partial(_exp_phase, freq=4 * p.omega_d)))
    terms.append((h_cr.dag(), partial(_exp_phase, freq=-4 * p.omega_d)))
    if include_linear_coupling:
        for op, freq in ((sp.Gx * (sp_op @ a_p), p.omega_d), (sp.Gx * (sp_op @ a_p.dag()), 3 * p.omega_d)):
            terms.append((op, partial(_exp_phase, freq=freq)))
            terms.append((op.dag(), partial(_exp_phase, freq=-freq)))
    return terms


def evaluate_hamiltonian(terms: TimeDepHamiltonian, t: float) -> np.ndarray:
    """Dense matrix of a (operator, f(t)) term list at time t."""
    total = np.zeros_like(terms[0][0].matrix)
    for op, f in terms:
        total = total + op.matrix * f(t)
    return total


# ---------------------------------------------------------------------------
# eigenstate ladder and basis changes
# ---------------------------------------------------------------------------

_STATE_LABELS = ("psi1+", "psi1-", "psi2+", "psi2-", "dressed+", "dressed-")


def supermode_states(sp: SupermodeParams, space: HilbertSpace, which: str) -> StateVector:
    """Low-lying supermode eigenstates in the bare-mode Fock basis.

    Two-mode spaces (N, N) give the photonic states; the dressed states need
    the full (2, N, N) space since they superpose |g>|psi2+> with |e>|00>.
    """
    if which not in _STATE_LABELS:
        raise InvalidArgumentError(f"which must be one of {_STATE_LABELS}, got {which!r}")
    full = space.n_subsystems == 3
    if full:
        _check_space(space)
        mode_dims = space.dims[1:]
    elif space.n_subsystems == 2 and space.dims[0] == space.dims[1]:
        mode_dims = space.dims
    else:
        raise InvalidDimensionError(f"expected dims (N, N) or (2, N, N), got {space.dims}")
    n = mode_dims[0]
    if which in ("psi2+", "psi2-", "dressed+", "dressed-") and n < 3:
        raise InvalidDimensionError(f"two-excitation states need mode dimension >= 3, got {n}")
    if which.startswith("dressed") and not full:
        raise InvalidDimensionError("dressed states require the full (2, N, N) space")

    beta = sp.beta
    norm1 = math.sqrt(1 + beta**2)
    norm2 = 1 + beta**2
    mode_space = HilbertSpace(mode_dims)
    vec = np.zeros(mode_space.total_dim, dtype=complex)
    if which == "psi1+":
        vec[mode_space.index((1, 0))] = beta / norm1
        vec[mode_space.index((0, 1))] = 1 / norm1
    elif which == "psi1-":
        vec[mode_space.index((1, 0))] = 1 / norm1
        vec[mode_space.index((0, 1))] = -beta / norm1
    elif which in ("psi2+", "dressed+", "dressed-"):
        vec[mode_space.index((2, 0))] = beta**2 / norm2
        vec[mode_space.index((1, 1))] = math.sqrt(2) * beta / norm2
        vec[mode_space.index((0, 2))] = 1 / norm2
    elif which == "psi2-":
        vec[mode_space.index((2, 0))] = 1 / norm2
        vec[mode_space.index((1, 1))] = -math.sqrt(2) * beta / norm2
        vec[mode_space.index((0, 2))] = beta**2 / norm2

    if not full:
        return StateVector(mode_space, vec)
    ground = np.zeros(2, dtype=complex)
    ground[1] = 1.0  # |g>
    if which.startswith("dressed"):
        excited = np.zeros(2, dtype=complex)
        excited[0] = 1.0
        vac = basis_state(mode_space, (0, 0)).amplitudes
        sign = 1.0 if which == "dressed+" else -1.0
        amp = (np.kron(ground, vec) + sign * np.kron(excited, vac)) / math.sqrt(2)
        return StateVector(space, amp)
    return StateVector(space, np.kron(ground, vec))


def _mode_angle(sp: SupermodeParams) -> float:
    return math.atan2(1.0, sp.beta)  # cos = G1/Gbar, sin = G2/Gbar


def mode_rotation(sp: SupermodeParams, mode_dims: Sequence[int]) -> Operator:
    """Unitary V mapping supermode Fock labels to bare-mode coordinates.

    Columns are the supermode Fock states |m+, m-> expressed in the bare
    basis; V is exactly unitary on the truncated space and exact on every
    total-photon-number sector that fits below the cutoff.
    """
    if len(mode_dims) != 2 or mode_dims[0] != mode_dims[1]:
        raise InvalidDimensionError(f"mode rotation needs equal two-mode dims, got {tuple(mode_dims)}")
    n = mode_dims[0]
    space = HilbertSpace(tuple(mode_dims))
    a1 = embed(annihilation(n), space, 0)
    a2 = embed(annihilation(n), space, 1)
    phi = _mode_angle(sp)
    gen = phi * (a2.dag().matrix @ a1.matrix - a1.dag().matrix @ a2.matrix)
    rot = scipy.linalg.expm(gen)
    # reflection part of the mode matrix: supermode label (m+, m-) -> (-1)^(m-)
    phases = np.array([(-1.0) ** space.occupations(i)[1] for i in range(space.total_dim)])
    return Operator(space, rot * phases[np.newaxis, :])


def _rotation_for(obj_space: HilbertSpace, sp: SupermodeParams) -> np.ndarray:
    if obj_space.n_subsystems == 2:
        return mode_rotation(sp, obj_space.dims).matrix
    if obj_space.n_subsystems == 3 and obj_space.dims[0] == 2:
        v = mode_rotation(sp, obj_space.dims[1:]).matrix
        return np.kron(np.eye(2, dtype=complex), v)
    raise InvalidDimensionError(f"expected a two-mode or (2, N, N) space, got {obj_space.dims}")


def bare_to_supermode(obj, sp: SupermodeParams):
    """Re-express an Operator/StateVector/DensityMatrix in supermode labels."""
    v = _rotation_for(obj.space, sp)
    if isinstance(obj, StateVector):
        return StateVector(obj.space, v.conj().T @ obj.amplitudes)
    if isinstance(obj, Operator):
        return Operator(obj.space, v.conj().T @ obj.matrix @ v)
    m = v.conj().T @ obj.matrix @ v
    return dataclasses.replace(obj, op=Operator(obj.space, (m + m.conj().T) / 2))


def supermode_to_bare(obj, sp: SupermodeParams):
    """Inverse of bare_to_supermode."""
    v = _rotation_for(obj.space, sp)
    if isinstance(obj, StateVector):
        return StateVector(obj.space, v @ obj.amplitudes)
    if isinstance(obj, Operator):
        return Operator(obj.space, v @ obj.matrix @ v.conj().T)
    m = v @ obj.matrix @ v.conj().T
    return dataclasses.replace(obj, op=Operator(obj.space, (m + m.conj().T) / 2))


def bare_mode_ops(sp: SupermodeParams, space: HilbertSpace) -> tuple[Operator, Operator]:
    """a1, a2 as operators on a supermode-labeled (qubit, A+, A-) space."""
    _check_space(space)
    n = space.dims[1]
    a_p = embed(annihilation(n), space, 1)
    a_m = embed(annihilation(n), space, 2)
    c, s = sp.beta / math.sqrt(1 + sp.beta**2), 1 / math.sqrt(1 + sp.beta**2)
    return c * a_p + s * a_m, s * a_p - c * a_m


def supermode_ops_bare(sp: SupermodeParams, space: HilbertSpace) -> tuple[Operator, Operator]:
    """A+, A- as operators on a bare-labeled (qubit, a1, a2) space."""
    _check_space(space)
    n = space.dims[1]
    a1 = embed(annihilation(n), space, 1)
    a2 = embed(annihilation(n), space, 2)
    c, s = sp.beta / math.sqrt(1 + sp.beta**2), 1 / math.sqrt(1 + sp.beta**2)
    return c * a1 + s * a2, s * a1 - c * a2
