"""Nonlocal reaction-diffusion model of public sentiment and polarization."""

from .analysis import (
    PolarityReport,
    SensitivityResult,
    difference_map,
    energy,
    polarity_report,
    sensitivity_scan,
    sentiment_sum,
    sign_of,
)
from .core import (
    ExtendedKernel,
    OffsetWeights,
    SimConfig,
    gen_initial_grid,
    gen_kernel,
    kernel_offsets,
    make_rng,
)
from .dynamics import (
    DivergenceError,
    RunResult,
    baseline_no_interaction,
    euler_step,
    nonlocal_term,
    potential,
    reaction,
    run_to_equilibrium,
    stable_dt,
)

__version__ = "0.1.0"
