"""Simulation and verification tools for structurally damped sigma-evolution
equations ``u_tt + (-Delta)^sigma u + (-Delta)^delta u_t = f``."""

from .errors import *  # noqa: F401,F403
from .model import (  # noqa: F401
    Corollary,
    DecayPrediction,
    DerivedConstants,
    ModelParams,
    RegionVerdict,
    Regime,
    Theorem,
    blowup_condition,
    check_region,
    critical_exponent,
    decay_prediction,
    derive_constants,
    lifespan_exponent,
    loss_of_decay,
    phase_csv,
    phase_diagram,
)
from .propagator import KernelValues, RootPair, char_roots, evolve_linear, kernels, radial_norm  # noqa: F401
from .spectral import SpectralField, SpectralGrid, frac_symbol, lr_norm, sobolev_norm  # noqa: F401

__version__ = "0.1.0"
