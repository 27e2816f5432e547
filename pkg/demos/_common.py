"""Shared setup for the demo scripts: default working point and output dir."""

import math
from pathlib import Path

from blockade_sim import CircuitParams, resolve_resonant

OUTPUT_DIR = Path(__file__).parent / "output"
OUTPUT_DIR.mkdir(exist_ok=True)


def paper_params(**overrides) -> CircuitParams:
    """Degenerate-supermode working point: identical resonators at 2500,
    G = 0.06 omega, mixing angle pi/4, g = 6, drives 0.95 / 1, unit decay."""
    base = dict(
        omega1=2500.0, omega2=2500.0, g=6.0, G1=150.0, G2=150.0,
        theta_mix=math.pi / 4, omega_q=0.0, eps1=0.95 + 0j, eps2=1.0 + 0j,
        omega_d=0.0, gamma1=1.0, gamma2=1.0, Gamma=1.0, Gamma_f=2.0,
    )
    base.update(overrides)
    return resolve_resonant(CircuitParams(**base))


def get_pyplot():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        return plt
    except ImportError:
        return None
