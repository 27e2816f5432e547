"""Simulation library for a two-resonator circuit-QED single-photon source.

A gap-tunable qubit couples to two superconducting resonators through both
its longitudinal and transverse degrees of freedom. One normal mode of the
resonator pair acquires an effective quadratic (two-photon) coupling to the
qubit, which makes the two-photon ladder anharmonic and blockades the
second excitation: the driven system emits antibunched, sub-Poissonian
microwave photons through three output ports and leaves the two resonators
entangled in the steady state.

The library builds every Hamiltonian of that model, solves the Lindblad
master equation (transients, steady states, two-time correlations), and
computes the photon statistics, s-parametrized quasiprobabilities,
nonclassical depth, and logarithmic negativity. `blockade_sim.experiments`
drives everything from declarative JSON configs; the `blockade-sim` CLI
wraps it.
"""

__version__ = "0.1.0"

from .circuit import (
    AdvisoryWarning,
    CircuitParams,
    ConstraintViolationError,
    SupermodeParams,
    bare_mode_ops,
    bare_to_supermode,
    build_effective_hamiltonian,
    build_lab_hamiltonian,
    build_rotating_frame_full,
    derive_supermodes,
    eq6_omega1,
    evaluate_hamiltonian,
    mode_rotation,
    multiphoton_coefficient,
    resolve_resonant,
    solve_g_for_splitting,
    supermode_ops_bare,
    supermode_states,
    supermode_to_bare,
)
from .dynamics import (
    DegenerateSteadyStateError,
    LindbladModel,
    NumericalFailureError,
    StiffnessError,
    Trajectory,
    UndefinedCorrelationError,
    build_liouvillian,
    effective_model,
    evolve,
    g2_tau,
    g2_zero,
    output_photon_numbers,
    propagate_expm,
    standard_collapse_ops,
    steady_state,
)
from .fockspace import (
    DensityMatrix,
    HilbertSpace,
    InvalidArgumentError,
    InvalidDimensionError,
    Operator,
    StateVector,
    SuperOperator,
    annihilation,
    basis_state,
    devectorize,
    embed,
    expectation,
    identity,
    number,
    partial_trace,
    partial_transpose,
    pauli,
    spost,
    spre,
    vectorize,
)
from .phasespace import (
    NonclassicalDepthUndefinedWarning,
    PhotonStatistics,
    QpdGrid,
    ResolutionError,
    logarithmic_negativity,
    nonclassical_depth_numeric,
    nonclassical_depth_qubit,
    photon_probabilities,
    qpd,
    t_matrix_element,
)
