"""Vacuum <-> single-photon Rabi cycling under the quadratic coupling.

With the symmetric supermode driven on resonance, the two-resonator system
cycles between |00> and the symmetric single-photon state while the
two-photon ladder stays detached (split by 2 sqrt(2) Theta). The sum
P(0,0) + P(psi1+) staying pinned near 1 is the truncation-fidelity measure
of the blockade. Pass --lab to overlay the full time-dependent lab-frame
Hamiltonian (resolves the 2 pi/2500 drive period; takes ~10 s).
"""

import sys

import numpy as np
from _common import OUTPUT_DIR, get_pyplot, paper_params

from blockade_sim import (
    LindbladModel,
    basis_state,
    build_lab_hamiltonian,
    derive_supermodes,
    effective_model,
    evolve,
    photon_probabilities,
    standard_collapse_ops,
)
from blockade_sim.fockspace import HilbertSpace

run_lab = "--lab" in sys.argv

p = paper_params()
model, sp, _ = effective_model(p, cutoff=7)
space = model.space
rho0 = basis_state(space, (1, 0, 0)).to_density_matrix()

results = {}
for label, collapse in (("no dissipation", []), ("dissipative", model.collapse_ops)):
    t = np.linspace(0.0, 5.0, 201)
    traj = evolve(LindbladModel(model.hamiltonian, collapse), rho0, t)
    p00 = traj.populations([space.index((0, 0, 0)), space.index((1, 0, 0))])
    ppsi = traj.populations([space.index((0, 1, 0)), space.index((1, 1, 0))])
    results[label] = (t, p00, ppsi)
    print(f"{label}: min[P(0,0) + P(psi1+)] = {(p00 + ppsi).min():.4f}")

if run_lab:
    cutoff = 4
    lab_space = HilbertSpace((2, cutoff, cutoff))
    lab = LindbladModel(build_lab_hamiltonian(p, lab_space), standard_collapse_ops(p, lab_space))
    t_lab = np.linspace(0.0, 1.0, 401)
    traj = evolve(lab, basis_state(lab_space, (1, 0, 0)).to_density_matrix(), t_lab,
                  rtol=2e-5, atol=1e-8)
    ppsi_lab = np.array([photon_probabilities(s, beta=sp.beta).p_psi1_plus for s in traj.states])
    print(f"lab frame (t <= 1): P(psi1+) reaches {ppsi_lab.max():.4f}")

plt = get_pyplot()
if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), sharey=True)
    for ax, (label, (t, p00, ppsi)) in zip(axes, results.items()):
        ax.plot(t, p00, label="P(0,0)")
        ax.plot(t, ppsi, label="P(psi1+)")
        ax.plot(t, p00 + ppsi, "k--", lw=1, label="sum")
        if run_lab and label == "dissipative":
            ax.plot(t_lab, ppsi_lab, color="C1", alpha=0.35, lw=0.7)
        ax.set_title(label)
        ax.set_xlabel("t (units of 1/gamma)")
    axes[0].set_ylabel("population")
    axes[0].legend(loc="center right", fontsize=8)
    fig.tight_layout()
    out = OUTPUT_DIR / "blockade_dynamics.png"
    fig.savefig(out, dpi=150)
    print(f"saved {out}")
