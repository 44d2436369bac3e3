"""Harmonic maps into S^2 and constant mean curvature surfaces in R^3:
spectral families of flat connections, extended frames, mu-Darboux
transforms and simple factor dressing, checked numerically on a grid."""

from .errors import CMCError
from .quatlib import Quaternion, line_to_sphere, matrix_to_quat, quat_mul, quat_to_matrix
from .surface import ConformalGrid, OneForm, SurfaceData
from .flat_family import ConnectionFamily, ParallelSection, family_of, from_hopf, parallel_section
from .frame import associated_surface, integrate_frame, sym_bobenko
from .vacuum import VacuumCylinder, fit_cylinder, vacuum_cylinder
from .transforms import (
    DarbouxResult,
    DressingResult,
    MuParams,
    dressed_cmc_surface,
    dressed_holomorphy_check,
    equivalence_check,
    gamma,
    mu_darboux_normal,
    mu_darboux_surface,
    mu_darboux_T,
    mu_params,
    riccati_residual,
    simple_factor_dress,
)
from .config import ExperimentConfig
from .report import DiagnosticsReport, export_obj, export_report
from .experiments import run_experiment
from .kernels import BACKEND

__version__ = "0.1.0"
