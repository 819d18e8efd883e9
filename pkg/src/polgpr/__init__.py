"""Dual-cross-polarized GPR processing: simulation, clutter removal, detection and orientation estimation."""
from .core import (
    Bscan, OrientationEstimate, PolarimetricScan, SurveyGrid, TargetModel,
    angle_error, normalize_bscan,
)
from .simulator import ClutterSpec, WaveletSpec, scattering_amplitudes, synthesize_pair, synthesize_scan
from .preprocess import TargetWindow, mean_subtract, scr, svd_remove_largest
from .dcpd import Detection, ccp, detect
from .dcpoe import ContrastMode, estimate_orientation, per_sample_angle, threshold_sweep
from .alford import alford_estimate
from .evaluation import ExperimentPlan, Scene, ccp_constancy, compare_estimators, run_plan

__version__ = "0.1.0"
