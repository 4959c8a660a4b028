from .config import RunConfig, load_config
from .database import MaterialDatabase
from .dissipation import (
    LOSSLESS,
    QBudget,
    Regime,
    beam_mass,
    evaluate_budget,
    mass_responsivity,
    mass_sensitivity,
    q_air,
    q_air_molecular,
    q_air_viscous,
    q_support,
    q_ted,
    q_total,
    relaxation_time,
    resonant_frequency,
)
from .explorer import (
    Constraint,
    DesignSpace,
    Objective,
    OperatingPoint,
    SweepAxis,
    SweepRow,
    SweepSpec,
    TraceEntry,
    mode_sweep,
    mode_sweep_series,
    optimize_geometry,
    run_sweep,
    run_sweep_series,
)
from .files import SweepFile, TableFile, TraceFile, write_json
from .gas import GasEnvironment, SphereModel
from .geometry import Geometry
from .material import Material
from .modes import ModeSpec, mode_eigenvalue, mode_shape, mode_shape_nodes
from .response import (
    FrequencySweep,
    PeakFit,
    PeakMethod,
    extract_residual_q,
    fit_half_power,
    fit_lorentzian,
    synthesize_peak,
)

__version__ = "0.1.0"
