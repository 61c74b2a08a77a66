"""Synthetic measurement chain: sampling, estimation, calibration and histograms."""

from emsq.lab.chain import (
    CalibrationPoint,
    CalibrationResult,
    RfChain,
    calibrate_chain,
    noise_density,
    synthetic_sweep,
)
from emsq.lab.estimate import CmEstimate, DuanEstimate, estimate_cm, estimate_duan
from emsq.lab.histogram import DiffHistogram, difference_histogram
from emsq.lab.sampling import QuadratureBatch, rotate_detector, sample_quadratures

__all__ = [
    "CalibrationPoint",
    "CalibrationResult",
    "CmEstimate",
    "DiffHistogram",
    "DuanEstimate",
    "QuadratureBatch",
    "RfChain",
    "calibrate_chain",
    "difference_histogram",
    "estimate_cm",
    "estimate_duan",
    "noise_density",
    "rotate_detector",
    "sample_quadratures",
    "synthetic_sweep",
]
