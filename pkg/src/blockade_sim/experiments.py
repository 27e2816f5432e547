"""Declarative experiment runner.

Reproduces the blockade studies from JSON configs: transient evolution,
steady-state photon statistics, delayed correlations, quasiprobability
grids, the (drive detuning x drive phase) sweeps, and the entanglement
scan over the coupling ratio. Sweep points are embarrassingly parallel;
results merge in deterministic index order, so serial and parallel runs
agree bitwise. Every run emits its data file (CSV or JSON) plus a
manifest.json with the config hash and solver settings.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import (
    CircuitParams,
    derive_supermodes,
    eq6_omega1,
    multiphoton_coefficient,
    resolve_resonant,
    solve_g_for_splitting,
    supermode_to_bare,
)
from .dynamics import (
    NumericalFailureError,
    StiffnessError,
    UndefinedCorrelationError,
    build_liouvillian,
    effective_model,
    evolve,
    g2_tau,
    g2_zero,
    output_photon_numbers,
    steady_state,
)
from .fockspace import HilbertSpace, basis_state, partial_trace
from .phasespace import logarithmic_negativity, photon_probabilities, qpd

EXPERIMENTS = (
    "evolve", "steady", "g2tau", "qpd", "sweep2d", "negativity_vs_beta",
    "rates_table", "single_drive",
)


class ConfigValidationError(ValueError):
    """Config does not match the schema; collects every offending field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

_CIRCUIT_FIELDS = {
    "omega1", "omega2", "g", "G1", "G2", "theta_mix", "eps1", "eps2",
    "gamma1", "gamma2", "Gamma", "Gamma_f", "delta_plus", "omega_q", "omega_d",
}
_NUMERICS_FIELDS = {
    "fock_cutoff", "rtol", "atol", "t_max", "t_points", "tau_max", "tau_points",
    "qpd_range", "qpd_resolution", "s_values", "sweep", "beta_values", "delta2",
    "check_uniqueness", "steady_tol", "frame", "convergence_check",
}
_OUTPUT_FIELDS = {"path", "format"}
_SWEEP_AXES = {"delta_plus", "theta_drive"}

_NUMERICS_DEFAULTS = dict(
    fock_cutoff=7, rtol=1e-8, atol=1e-10, t_max=5.0, t_points=201,
    tau_max=10.0, tau_points=21, qpd_range=3.0, qpd_resolution=201,
    s_values=(0.0, 0.5, 0.54), sweep=None, beta_values=(0.5, 0.75, 1.0, 1.5, 2.0),
    delta2=None, check_uniqueness=False, steady_tol=1e-10, frame="effective",
    convergence_check=False,
)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    circuit: dict
    numerics: dict
    output: dict

    @property
    def fock_cutoff(self) -> int:
        return int(self.numerics["fock_cutoff"])


def _as_complex(value, name, problems) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    problems.append(f"{name} must be a number or an [re, im] pair")
    return 0j


def validate_config(raw: dict) -> ExperimentConfig:
    """Check the raw JSON dict against the schema (fail-fast on unknowns)."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigValidationError(["config must be a JSON object"])
    unknown = set(raw) - {"spec_version", "experiment", "circuit", "numerics", "output"}
    if unknown:
        problems.append(f"unknown top-level fields: {sorted(unknown)}")
    if raw.get("spec_version") != 1:
        problems.append("spec_version must be 1")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        problems.append(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")

    circuit = dict(raw.get("circuit") or {})
    unknown = set(circuit) - _CIRCUIT_FIELDS
    if unknown:
        problems.append(f"unknown circuit fields: {sorted(unknown)}")
    for name in ("omega1", "omega2", "g", "G1", "G2", "theta_mix"):
        if not isinstance(circuit.get(name), (int, float)):
            problems.append(f"circuit.{name} must be a number")
    for name in ("gamma1", "gamma2", "Gamma", "Gamma_f"):
        value = circuit.get(name)
        if not isinstance(value, (int, float)) or value < 0:
            problems.append(f"circuit.{name} must be a nonnegative number")
    for name in ("eps1", "eps2"):
        _as_complex(circuit.get(name, 0.0), f"circuit.{name}", problems)

    numerics = {**_NUMERICS_DEFAULTS, **(raw.get("numerics") or {})}
    unknown = set(numerics) - _NUMERICS_FIELDS
    if unknown:
        problems.append(f"unknown numerics fields: {sorted(unknown)}")
    if not isinstance(numerics["fock_cutoff"], int) or numerics["fock_cutoff"] < 3:
        problems.append("numerics.fock_cutoff must be an integer >= 3")
    if numerics["frame"] not in ("effective", "lab"):
        problems.append("numerics.frame must be 'effective' or 'lab'")
    if experiment == "sweep2d":
        sweep = numerics.get("sweep")
        if not isinstance(sweep, dict) or set(sweep) != _SWEEP_AXES:
            problems.append(f"numerics.sweep must define exactly the axes {sorted(_SWEEP_AXES)}")
        else:
            for axis, spec in sweep.items():
                keys = set(spec) if isinstance(spec, dict) else set()
                if keys != {"min", "max", "count"}:
                    problems.append(f"numerics.sweep.{axis} needs min/max/count")
                elif not isinstance(spec["count"], int) or spec["count"] < 2:
                    problems.append(f"numerics.sweep.{axis}.count must be an integer >= 2")
        if numerics.get("delta2") is None:
            problems.append("numerics.delta2 (target supermode splitting) required for sweep2d")
    if experiment == "negativity_vs_beta":
        betas = numerics.get("beta_values")
        if not betas or any(not isinstance(b, (int, float)) or b <= 0 for b in betas):
            problems.append("numerics.beta_values must be positive numbers")
        if numerics.get("delta2") is None:
            problems.append("numerics.delta2 required for negativity_vs_beta")

    output = dict(raw.get("output") or {})
    unknown = set(output) - _OUTPUT_FIELDS
    if unknown:
        problems.append(f"unknown output fields: {sorted(unknown)}")
    if output and output.get("format", "csv") not in ("csv", "json"):
        problems.append("output.format must be 'csv' or 'json'")

    if problems:
        raise ConfigValidationError(problems)
    return ExperimentConfig(experiment=experiment, circuit=circuit, numerics=numerics, output=output)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return validate_config(json.load(fh))


def _build_params(circuit: dict, theta_drive: float | None = None) -> CircuitParams:
    """CircuitParams from the config section, resonantly locked by default."""
    problems: list[str] = []
    if theta_drive is None:
        eps1 = _as_complex(circuit.get("eps1", 0.0), "eps1", problems)
        eps2 = _as_complex(circuit.get("eps2", 0.0), "eps2", problems)
    else:
        eps1 = complex(np.exp(-1j * theta_drive / 2))
        eps2 = complex(np.exp(+1j * theta_drive / 2))
    if problems:
        raise ConfigValidationError(problems)
    p = CircuitParams(
        omega1=circuit["omega1"], omega2=circuit["omega2"], g=circuit["g"],
        G1=circuit["G1"], G2=circuit["G2"], theta_mix=circuit["theta_mix"],
        omega_q=circuit.get("omega_q") or 0.0,
        eps1=eps1, eps2=eps2,
        omega_d=circuit.get("omega_d") or 0.0,
        gamma1=circuit["gamma1"], gamma2=circuit["gamma2"],
        Gamma=circuit["Gamma"], Gamma_f=circuit["Gamma_f"],
    )
    if circuit.get("omega_q") is None or circuit.get("omega_d") is None:
        p = resolve_resonant(p, delta_plus=circuit.get("delta_plus", 0.0))
    return p


# ---------------------------------------------------------------------------
# result containers and writers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResultTable:
    """Column-oriented result; None entries mean 'undefined at this point'."""

    columns: dict

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: {lengths}")


@dataclass(frozen=True)
class SweepResult:
    """2D sweep output: one observable matrix per name, axes attached."""

    axis1_name: str
    axis2_name: str
    axis1: np.ndarray
    axis2: np.ndarray
    observables: dict

    def to_table(self) -> ResultTable:
        n1, n2 = len(self.axis1), len(self.axis2)
        cols = {
            self.axis1_name: [self.axis1[i] for i in range(n1) for _ in range(n2)],
            self.axis2_name: [self.axis2[j] for _ in range(n1) for j in range(n2)],
        }
        for name, matrix in self.observables.items():
            cols[name] = [matrix[i][j] for i in range(n1) for j in range(n2)]
        return ResultTable(cols)

    @staticmethod
    def from_table(table: ResultTable, axis1_name: str, axis2_name: str) -> "SweepResult":
        a1 = sorted(set(table.columns[axis1_name]))
        a2 = sorted(set(table.columns[axis2_name]))
        index = {(v1, v2): k for k, (v1, v2) in enumerate(
            zip(table.columns[axis1_name], table.columns[axis2_name]))}
        observables = {}
        for name, values in table.columns.items():
            if name in (axis1_name, axis2_name):
                continue
            matrix = [[values[index[(v1, v2)]] for v2 in a2] for v1 in a1]
            observables[name] = matrix
        return SweepResult(axis1_name, axis2_name, np.array(a1), np.array(a2), observables)


def _format_value(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(table: ResultTable, path):
    """Header row + decimal values at 17 significant digits, UNIX newlines.

    Complex columns are split into <name>_re / <name>_im; undefined entries
    are emitted as empty fields.
    """
    names, columns = [], []
    for name, values in table.columns.items():
        if any(isinstance(v, complex) and not isinstance(v, float) for v in values):
            names += [f"{name}_re", f"{name}_im"]
            columns.append([None if v is None else complex(v).real for v in values])
            columns.append([None if v is None else complex(v).imag for v in values])
        else:
            names.append(name)
            columns.append(list(values))
    n_rows = len(columns[0]) if columns else 0
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in range(n_rows):
            fh.write(",".join(_format_value(col[row]) for col in columns) + "\n")


def read_csv(path) -> ResultTable:
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    names = lines[0].split(",")
    raw_cols = {name: [] for name in names}
    for line in lines[1:]:
        for name, cell in zip(names, line.split(",")):
            raw_cols[name].append(None if cell == "" else float(cell))
    columns: dict = {}
    for name in names:
        if name.endswith("_re") and name[:-3] + "_im" in raw_cols:
            stem = name[:-3]
            re_vals, im_vals = raw_cols[name], raw_cols[stem + "_im"]
            columns[stem] = [
                None if r is None else complex(r, i) for r, i in zip(re_vals, im_vals)
            ]
        elif name.endswith("_im") and name[:-3] + "_re" in raw_cols:
            continue
        else:
            columns[name] = raw_cols[name]
    return ResultTable(columns)


def write_json(table: ResultTable, path):
    payload = {}
    for name, values in table.columns.items():
        out = []
        for v in values:
            if v is None or (isinstance(v, float) and math.isnan(v)):
                out.append(None)
            elif isinstance(v, complex) and not isinstance(v, float):
                out.append([v.real, v.imag])
            else:
                out.append(float(v))
        payload[name] = out
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def config_hash(raw: dict) -> str:
    return hashlib.sha256(json.dumps(raw, sort_keys=True).encode()).hexdigest()


def write_manifest(raw_config: dict, config: ExperimentConfig, out_path: Path, jobs: int):
    manifest = {
        "config_sha256": config_hash(raw_config),
        "experiment": config.experiment,
        "package_version": __version__,
        "output": out_path.name,
        "solver": {
            "fock_cutoff": config.fock_cutoff,
            "rtol": config.numerics["rtol"],
            "atol": config.numerics["atol"],
            "steady_tol": config.numerics["steady_tol"],
            "check_uniqueness": bool(config.numerics["check_uniqueness"]),
            "jobs": jobs,
        },
    }
    with open(out_path.parent / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# single-configuration experiments
# ---------------------------------------------------------------------------

def _steady_state_for(p: CircuitParams, numerics: dict):
    model, sp_params, mode_ops = effective_model(p, cutoff=int(numerics["fock_cutoff"]))
    rho = steady_state(
        build_liouvillian(model),
        tol=numerics["steady_tol"],
        check_uniqueness=bool(numerics["check_uniqueness"]),
    )
    return model, sp_params, mode_ops, rho


def _run_evolve(config: ExperimentConfig) -> ResultTable:
    p = _build_params(config.circuit)
    numerics = config.numerics
    cutoff = config.fock_cutoff
    t = np.linspace(0.0, float(numerics["t_max"]), int(numerics["t_points"]))
    if numerics["frame"] == "lab":
        from .circuit import build_lab_hamiltonian
        from .dynamics import LindbladModel, standard_collapse_ops

        space = HilbertSpace((2, cutoff, cutoff))
        model = LindbladModel(build_lab_hamiltonian(p, space), standard_collapse_ops(p, space))
        sp_params = derive_supermodes(p)
        rho0 = basis_state(space, (1, 0, 0)).to_density_matrix()
        traj = evolve(model, rho0, t, rtol=numerics["rtol"], atol=numerics["atol"])
        p00, ppsi = [], []
        for state in traj.states:
            stats = photon_probabilities(state, beta=sp_params.beta)
            p00.append(stats.joint[0, 0])
            ppsi.append(stats.p_psi1_plus)
        p00, ppsi = np.array(p00), np.array(ppsi)
    else:
        model, sp_params, _ = effective_model(p, cutoff=cutoff)
        space = model.space
        rho0 = basis_state(space, (1, 0, 0)).to_density_matrix()
        traj = evolve(model, rho0, t, rtol=numerics["rtol"], atol=numerics["atol"])
        # supermode labels: |00> and the one-photon A+ level are diagonal
        p00 = traj.populations([space.index((0, 0, 0)), space.index((1, 0, 0))])
        ppsi = traj.populations([space.index((0, 1, 0)), space.index((1, 1, 0))])
    return ResultTable({"time": list(t), "p00": list(p00), "p_psi1_plus": list(ppsi),
                        "p_sum": list(p00 + ppsi)})


def _steady_observables(p: CircuitParams, numerics: dict) -> dict:
    _, sp_params, mode_ops, rho = _steady_state_for(p, numerics)
    n1, n2, n3 = output_photon_numbers(rho, p.gamma1, p.gamma2, mode_ops=mode_ops)
    correlations = {}
    for port, name in ((1, "g21"), (2, "g22"), (3, "g23")):
        try:
            (correlations[name],) = g2_zero(rho, p.gamma1, p.gamma2, mode_ops=mode_ops, ports=(port,))
        except UndefinedCorrelationError:
            correlations[name] = None
    stats = photon_probabilities(supermode_to_bare(rho, sp_params), beta=sp_params.beta)
    joint = stats.joint
    multi = float(max(joint[i, j] for i in range(joint.shape[0])
                      for j in range(joint.shape[1]) if i + j >= 2))
    return {
        "N1": n1, "N2": n2, "N3": n3,
        "g21": correlations["g21"], "g22": correlations["g22"], "g23": correlations["g23"],
        "P_00": joint[0, 0], "P_10": joint[1, 0], "P_01": joint[0, 1],
        "P_11": joint[1, 1], "P_20": joint[2, 0], "P_02": joint[0, 2],
        "p_psi1_plus": stats.p_psi1_plus, "max_multiphoton": multi,
    }


def _run_steady(config: ExperimentConfig) -> ResultTable:
    p = _build_params(config.circuit)
    obs = _steady_observables(p, config.numerics)
    if config.numerics["convergence_check"]:
        # repeat with two more Fock levels per mode; every observable must
        # stay put to 1e-6 relative or the truncation is too tight
        finer = dict(config.numerics)
        finer["fock_cutoff"] = config.fock_cutoff + 2
        obs_fine = _steady_observables(p, finer)
        deltas = [
            abs(obs[k] - obs_fine[k]) / max(abs(obs_fine[k]), 1e-300)
            for k in ("N1", "N2", "N3", "P_00", "p_psi1_plus")
        ]
        obs["cutoff_convergence_delta"] = max(deltas)
        if obs["cutoff_convergence_delta"] >= 1e-6:
            raise NumericalFailureError(
                f"steady-state observables move by {obs['cutoff_convergence_delta']:.2e} "
                f"between Fock dimensions {config.fock_cutoff} and {config.fock_cutoff + 2}; "
                "increase fock_cutoff"
            )
    return ResultTable({k: [v] for k, v in obs.items()})


def _run_g2tau(config: ExperimentConfig) -> ResultTable:
    p = _build_params(config.circuit)
    numerics = config.numerics
    model, _, mode_ops, rho = _steady_state_for(p, numerics)
    tau = np.linspace(0.0, float(numerics["tau_max"]), int(numerics["tau_points"]))
    cols = {"tau": list(tau)}
    for port in (1, 2, 3):
        curve = g2_tau(model, rho, port, tau, p.gamma1, p.gamma2, mode_ops=mode_ops,
                       rtol=numerics["rtol"], atol=numerics["atol"])
        cols[f"g2{port}"] = list(curve)
    return ResultTable(cols)


def _run_qpd(config: ExperimentConfig) -> ResultTable:
    p = _build_params(config.circuit)
    numerics = config.numerics
    _, sp_params, _, rho = _steady_state_for(p, numerics)
    rho1 = partial_trace(supermode_to_bare(rho, sp_params), {1})
    half = float(numerics["qpd_range"])
    resolution = int(numerics["qpd_resolution"])
    cols = {"s": [], "re": [], "im": [], "value": []}
    for s in numerics["s_values"]:
        grid = qpd(rho1, float(s), (-half, half), (-half, half), resolution)
        re_ax, im_ax = grid.re_axis, grid.im_axis
        for i in range(resolution):
            for j in range(resolution):
                cols["s"].append(float(s))
                cols["re"].append(float(re_ax[j]))
                cols["im"].append(float(im_ax[i]))
                cols["value"].append(float(grid.values[i, j]))
    return ResultTable(cols)


def _run_rates_table(config: ExperimentConfig) -> ResultTable:
    # dimensionless units are tied to omega_i/2pi in MHz, so a dimensionless
    # rate X is quoted as X MHz for Theta_n/(2pi)
    p = _build_params(config.circuit)
    sp_params = derive_supermodes(p, enforce_constraint=False)
    orders, rates = [], []
    for n in (2, 3, 4, 5):
        orders.append(n)
        rates.append(abs(sp_params.Gx * multiphoton_coefficient("B2", 0, n, sp_params.lamb_dicke)))
    return ResultTable({"n_photon": orders, "theta_n_over_2pi_mhz": rates})


def _run_negativity_vs_beta(config: ExperimentConfig) -> ResultTable:
    numerics = config.numerics
    betas = [float(b) for b in numerics["beta_values"]]
    e_c = [
        _negativity_point(config.circuit, beta, float(numerics["delta2"]), numerics)
        for beta in betas
    ]
    return ResultTable({"beta": betas, "e_c": e_c})


def _negativity_point(circuit: dict, beta: float, delta2: float, numerics: dict) -> float:
    gbar = math.hypot(circuit["G1"], circuit["G2"])
    g1 = gbar * beta / math.sqrt(1 + beta**2)
    g2 = gbar / math.sqrt(1 + beta**2)
    gx = -gbar * math.sin(circuit["theta_mix"])
    omega2 = circuit["omega2"]
    g_coupling = solve_g_for_splitting(delta2, eq6_omega1(omega2, 0.0, beta), gx, beta)
    # the constraint couples omega1 and g; one fixed-point pass settles it
    omega1 = eq6_omega1(omega2, g_coupling, beta)
    g_coupling = solve_g_for_splitting(delta2, omega1, gx, beta)
    omega1 = eq6_omega1(omega2, g_coupling, beta)
    sub = dict(circuit)
    sub.update(G1=g1, G2=g2, g=g_coupling, omega1=omega1, omega2=omega2)
    p = _build_params(sub)
    _, sp_params, _, rho = _steady_state_for(p, numerics)
    rho12 = partial_trace(supermode_to_bare(rho, sp_params), {1, 2})
    return logarithmic_negativity(rho12)


# ---------------------------------------------------------------------------
# 2D sweep
# ---------------------------------------------------------------------------

def _sweep_point(args) -> tuple:
    """One (delta_plus, theta_drive) grid point; None entries mark failures."""
    circuit, numerics, delta2, delta_plus, theta = args
    try:
        sub = dict(circuit)
        beta = circuit["G1"] / circuit["G2"]
        gbar = math.hypot(circuit["G1"], circuit["G2"])
        gx = -gbar * math.sin(circuit["theta_mix"])
        g_coupling = solve_g_for_splitting(delta2, circuit["omega1"], gx, beta)
        sub.update(g=g_coupling, omega2=circuit["omega1"] - g_coupling * (beta**2 - 1) / beta,
                   delta_plus=delta_plus)
        p = _build_params(sub, theta_drive=theta)
        _, _, mode_ops, rho = _steady_state_for(p, numerics)
        n1, _, n3 = output_photon_numbers(rho, p.gamma1, p.gamma2, mode_ops=mode_ops)
        out = {"n1": n1, "n3": n3}
        for port, name in ((1, "g21"), (3, "g23")):
            try:
                (value,) = g2_zero(rho, p.gamma1, p.gamma2, mode_ops=mode_ops, ports=(port,))
                out[name] = value
            except UndefinedCorrelationError:
                out[name] = None
        return (out["n1"], out["n3"], out["g21"], out["g23"], None)
    except (NumericalFailureError, StiffnessError, ValueError) as err:
        return (None, None, None, None, f"{type(err).__name__}: {err}")


def run_sweep2d(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Steady-state observables over the (drive detuning, drive phase) grid.

    Per point the drives are unit-amplitude with phases -theta/2 and
    +theta/2, the inter-resonator coupling is re-solved for the configured
    supermode splitting, and the full parameter set is re-derived before the
    steady-state solve. Points are independent; failures are recorded as
    nulls with a warning and the run continues.
    """
    numerics = config.numerics
    sweep = numerics["sweep"]
    ax1 = np.linspace(sweep["delta_plus"]["min"], sweep["delta_plus"]["max"],
                      sweep["delta_plus"]["count"])
    ax2 = np.linspace(sweep["theta_drive"]["min"], sweep["theta_drive"]["max"],
                      sweep["theta_drive"]["count"])
    tasks = [
        (config.circuit, numerics, float(numerics["delta2"]), float(d), float(t))
        for d in ax1 for t in ax2
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=8))
    else:
        results = [_sweep_point(t) for t in tasks]

    names = ("n1", "n3", "g21", "g23")
    matrices = {name: [[None] * len(ax2) for _ in range(len(ax1))] for name in names}
    matrices["log10_g21"] = [[None] * len(ax2) for _ in range(len(ax1))]
    matrices["log10_g23"] = [[None] * len(ax2) for _ in range(len(ax1))]
    for k, values in enumerate(results):
        i, j = divmod(k, len(ax2))
        if values[-1] is not None:
            warnings.warn(f"sweep point ({ax1[i]:.4g}, {ax2[j]:.4g}) failed: {values[-1]}")
        for name, value in zip(names, values[:4]):
            matrices[name][i][j] = value
        for src, dst in (("g21", "log10_g21"), ("g23", "log10_g23")):
            value = matrices[src][i][j]
            matrices[dst][i][j] = None if value is None or value <= 0 else math.log10(value)
    return SweepResult("delta_plus", "theta_drive", ax1, ax2, matrices)


# ---------------------------------------------------------------------------
# single-drive check and dispatch
# ---------------------------------------------------------------------------

def single_drive_check(config: ExperimentConfig, force_degenerate: bool = False) -> dict:
    """Blockade with one drive and no inter-resonator capacitor.

    With g = 0 the supermodes stay split by the dispersive shift alone,
    Delta2 = 4 Gx^2/(3 Omega+); as long as that splitting dwarfs the
    residual A- drive, all three ports stay sub-Poissonian. Setting
    force_degenerate artificially removes the splitting as a control.
    """
    circuit = dict(config.circuit)
    circuit.update(g=0.0, eps1=1.0, eps2=0.0)
    circuit["omega2"] = circuit["omega1"]  # g = 0 needs equal frequencies at any beta
    p = _build_params(circuit)
    numerics = dict(config.numerics)
    model, sp_params, mode_ops = effective_model(p, cutoff=int(numerics["fock_cutoff"]))
    if force_degenerate:
        degenerate = sp_params.with_detuning(sp_params.Delta_plus)
        degenerate = dataclasses.replace(degenerate, Delta_minus=degenerate.Delta_plus, Delta2=0.0)
        from .circuit import build_effective_hamiltonian
        from .dynamics import LindbladModel, standard_collapse_ops

        space = model.space
        model = LindbladModel(
            build_effective_hamiltonian(degenerate, space),
            standard_collapse_ops(p, space, mode_ops),
        )
        sp_params = degenerate
    rho = steady_state(build_liouvillian(model), tol=numerics["steady_tol"],
                       check_uniqueness=bool(numerics["check_uniqueness"]))
    g21, g22, g23 = g2_zero(rho, p.gamma1, p.gamma2, mode_ops=mode_ops)
    return {
        "delta2": sp_params.Delta2,
        "eps_minus": sp_params.eps_minus,
        "splitting_to_drive_ratio": abs(sp_params.Delta2) / max(abs(sp_params.eps_minus), 1e-300),
        "g21": g21, "g22": g22, "g23": g23,
        "all_blockaded": bool(max(g21, g22, g23) < 0.1),
    }


def run(config: ExperimentConfig, jobs: int = 1):
    """Dispatch a validated config to its experiment; returns the result."""
    if config.experiment == "evolve":
        return _run_evolve(config)
    if config.experiment == "steady":
        return _run_steady(config)
    if config.experiment == "g2tau":
        return _run_g2tau(config)
    if config.experiment == "qpd":
        return _run_qpd(config)
    if config.experiment == "rates_table":
        return _run_rates_table(config)
    if config.experiment == "negativity_vs_beta":
        return _run_negativity_vs_beta(config)
    if config.experiment == "sweep2d":
        return run_sweep2d(config, jobs=jobs)
    if config.experiment == "single_drive":
        report = single_drive_check(config)
        return ResultTable({k: [v] for k, v in report.items()})
    raise ConfigValidationError([f"unknown experiment {config.experiment!r}"])


def run_to_files(raw_config: dict, out_path=None, jobs: int = 1):
    """Validate, run, and write the data file plus manifest.json."""
    config = validate_config(raw_config)
    result = run(config, jobs=jobs)
    out = Path(out_path or config.output.get("path") or f"{config.experiment}.csv")
    fmt = config.output.get("format", "csv") if out_path is None else (
        "json" if str(out_path).endswith(".json") else "csv")
    table = result.to_table() if isinstance(result, SweepResult) else result
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        write_json(table, out)
    else:
        write_csv(table, out)
    write_manifest(raw_config, config, out, jobs)
    return result, out
