"""Spectral lab for the 1D damped fractional wave equation.

Simulates energy decay under spatially varying damping, measures decay
rates across the fractional order, and numerically probes the resolvent
bounds, observability constants, sampling constants, and the order-2
threshold mechanism that govern those rates.
"""

from .analysis import (
    IntervalPair,
    a_lambda_intervals,
    interval_growth_classification,
    lemma1_infimum,
    ls_constant,
    power_difference_constant,
    sinc_translate_average,
    vanishing_damping_ratio,
)
from .damping import (
    DampingProfile,
    level_set_density,
    make_profile,
    profile_from_descriptor,
    window_average_infimum,
)
from .errors import (
    ConfigError,
    DegenerateFitError,
    DegenerateInputError,
    NumericalError,
    ParameterError,
    ResourceError,
    StructuralError,
)
from .resolvent import (
    GeneratorMatrix,
    assemble_generator,
    resolvent_norm_at,
    resolvent_scan,
    scalar_resolvent_constant,
    wave_observability_constant,
)
from .scans import ScanResult, fit_loglog_slope
from .simulator import (
    EnergyTrace,
    WaveState,
    constant_damping_oracle,
    energy,
    make_initial,
    simulate,
    step_strang,
)
from .spectral import (
    Field,
    Grid,
    Spectrum,
    apply_bessel_multiplier,
    band_project,
    forward,
    inverse,
    sobolev_norm,
)

__version__ = "0.1.0"
