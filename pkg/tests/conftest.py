import math

import pytest

from blockade_sim.circuit import CircuitParams, derive_supermodes, resolve_resonant


def make_paper_params(**overrides) -> CircuitParams:
    """The dimensionless working point used throughout the numerical studies.

    Identical resonators at 2500, couplings G_i = 0.06 omega_i, mixing angle
    pi/4, g = 6 (degenerate supermodes), unbalanced drives 0.95 / 1, unit
    resonator and qubit decay, dephasing rate 2. Qubit and drive are locked
    to the shifted supermode frequency unless overridden.
    """
    base = dict(
        omega1=2500.0,
        omega2=2500.0,
        g=6.0,
        G1=150.0,
        G2=150.0,
        theta_mix=math.pi / 4,
        omega_q=0.0,  # placeholder, resolved below
        eps1=0.95 + 0j,
        eps2=1.0 + 0j,
        omega_d=0.0,  # placeholder, resolved below
        gamma1=1.0,
        gamma2=1.0,
        Gamma=1.0,
        Gamma_f=2.0,
    )
    base.update(overrides)
    return resolve_resonant(CircuitParams(**base))


@pytest.fixture(scope="session")
def paper_params():
    return make_paper_params()


@pytest.fixture(scope="session")
def paper_supermodes(paper_params):
    return derive_supermodes(paper_params)
