"""Three-mode electromechanical device: drives, stability, scattering and output CM."""

from emsq.model.device import DeviceParams, reference_device, reference_operating_point
from emsq.model.geometry import cmod_scaling, coupling_from_geometry, gap_scaling
from emsq.model.modes import (
    CavityMode,
    DriveState,
    MechanicalMode,
    drive_to_cooperativity,
    effective_temperature,
    half_coth,
    thermal_occupation,
)
from emsq.model.scattering import (
    ScatterCoeffs,
    ideal_coefficients,
    resonant_coefficients,
    scattering_coefficients,
)
from emsq.model.spectrum import OperatingPoint, filtered_output_cm, output_spectral_cm
from emsq.model.stability import StabilityReport, critical_c2, stability_check
from emsq.model.sweep import SweepRow, power_sweep

__all__ = [
    "CavityMode",
    "DeviceParams",
    "DriveState",
    "MechanicalMode",
    "OperatingPoint",
    "ScatterCoeffs",
    "StabilityReport",
    "SweepRow",
    "cmod_scaling",
    "coupling_from_geometry",
    "critical_c2",
    "drive_to_cooperativity",
    "effective_temperature",
    "filtered_output_cm",
    "gap_scaling",
    "half_coth",
    "ideal_coefficients",
    "output_spectral_cm",
    "power_sweep",
    "reference_device",
    "reference_operating_point",
    "resonant_coefficients",
    "scattering_coefficients",
    "stability_check",
    "thermal_occupation",
]
