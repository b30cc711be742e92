"""nlslab: a numerical laboratory for the periodic defocusing NLS equation.

Pieces: a structure-preserving split-step integrator, a transfer-matrix
Floquet spectrum for the associated 2x2 operator, contour-normalized gap
quantities, first-principles mode frequencies, and comparison experiments
against the nearly-linear reference flows built from them.
"""

__version__ = "0.1.0"

from .approx_compare import (
    boundedness_verdict,
    build_v,
    build_w,
    difference_series,
    extract_frequencies,
    highfreq_experiment,
    highfreq_scan,
)
from .checks import check_names, run_battery, summary_dict, write_checks_json
from .dnls_flow import Trajectory, conserved_report, evolve, step_strang
from .errors import (
    BlowUpError,
    BranchCutError,
    ConfigError,
    GeometryError,
    NlsLabError,
    ResolutionError,
    SolverError,
)
from .field import Potential, SpectralGrid, StateField, hamiltonian, l2_norm, sobolev_norm
from .frequencies import FrequencyTable, frequency_pipeline
from .psi_normalization import SigmaSet, solve_sigma, trace_identity_check
from .scenarios import (
    Scenario,
    bundled_names,
    bundled_scenario,
    initial_state,
    load_scenario,
    parse_scenario,
)
from .zs_spectral import GapTable, discriminant, periodic_spectrum

__all__ = [
    "BlowUpError",
    "BranchCutError",
    "ConfigError",
    "GeometryError",
    "NlsLabError",
    "ResolutionError",
    "SolverError",
    "FrequencyTable",
    "GapTable",
    "Potential",
    "Scenario",
    "SigmaSet",
    "SpectralGrid",
    "StateField",
    "Trajectory",
    "boundedness_verdict",
    "build_v",
    "build_w",
    "bundled_names",
    "bundled_scenario",
    "check_names",
    "conserved_report",
    "difference_series",
    "discriminant",
    "evolve",
    "extract_frequencies",
    "frequency_pipeline",
    "hamiltonian",
    "highfreq_experiment",
    "highfreq_scan",
    "initial_state",
    "l2_norm",
    "load_scenario",
    "parse_scenario",
    "periodic_spectrum",
    "run_battery",
    "sobolev_norm",
    "solve_sigma",
    "step_strang",
    "summary_dict",
    "trace_identity_check",
    "write_checks_json",
    "__version__",
]
