"""Simulator and analysis toolkit for two-mode entangled microwave radiation
generated by a parametrically driven mechanical oscillator."""

from emsq.gaussian import (
    CovMat4,
    EntanglementReport,
    TmstParams,
    cm_from_tmst,
    ebit_rate,
    entanglement_report,
    entropy_of_formation,
    epr_duan,
    marginal_cm,
    negativity,
    quantum_discord,
    squeezing_vs_angle,
    tmst_from_cm,
    wigner_density,
)

__version__ = "0.1.0"

__all__ = [
    "CovMat4",
    "EntanglementReport",
    "TmstParams",
    "cm_from_tmst",
    "ebit_rate",
    "entanglement_report",
    "entropy_of_formation",
    "epr_duan",
    "marginal_cm",
    "negativity",
    "quantum_discord",
    "squeezing_vs_angle",
    "tmst_from_cm",
    "wigner_density",
]
