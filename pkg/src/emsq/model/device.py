"""Full device description and the reference parameter set."""
from __future__ import annotations

from dataclasses import dataclass, replace

from emsq.constants import dbm_to_watt, hz_to_angular
from emsq.model.modes import CavityMode, DriveState, MechanicalMode, drive_to_cooperativity
from emsq.model.spectrum import OperatingPoint


@dataclass(frozen=True)
class DeviceParams:
    """Mechanical mode, the two cavities, pump powers and detection settings.

    ``pump_noise_a1``/``pump_noise_a2`` add ``a_j * P_r`` (P_r in watts) to the
    intrinsic-bath occupation of cavity ``j``; they default to zero.
    """

    mech: MechanicalMode
    cav1: CavityMode
    cav2: CavityMode
    p_blue_dbm: float
    p_red_dbm: float
    bandwidth_hz: float = 100.0
    filter_kind: str = "rect"
    pump_noise_a1: float = 0.0
    pump_noise_a2: float = 0.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")
        if self.pump_noise_a1 < 0 or self.pump_noise_a2 < 0:
            raise ValueError("pump noise coefficients must be >= 0")

    def with_red_power(self, p_red_dbm: float) -> "DeviceParams":
        return replace(self, p_red_dbm=p_red_dbm)

    def drives(self) -> tuple[DriveState, DriveState]:
        """Blue drive on cavity 1 at ``w_c1 + w_m``, red drive on cavity 2 at ``w_c2 - w_m``."""
        w_m = self.mech.omega_m
        blue = drive_to_cooperativity(
            dbm_to_watt(self.p_blue_dbm), self.cav1, self.mech, self.cav1.omega_c + w_m
        )
        red = drive_to_cooperativity(
            dbm_to_watt(self.p_red_dbm), self.cav2, self.mech, self.cav2.omega_c - w_m
        )
        return blue, red

    def operating_point(self) -> OperatingPoint:
        blue, red = self.drives()
        p_red_w = dbm_to_watt(self.p_red_dbm)
        return OperatingPoint(
            c1=blue.coop,
            c2=red.coop,
            eta1=self.cav1.eta,
            eta2=self.cav2.eta,
            kappa1=self.cav1.kappa,
            kappa2=self.cav2.kappa,
            gamma_m=self.mech.gamma_m,
            n_m=self.mech.n_bar_m,
            n1_ex=self.cav1.n_bar_ex,
            n2_ex=self.cav2.n_bar_ex,
            n1_in=self.cav1.n_bar_in + self.pump_noise_a1 * p_red_w,
            n2_in=self.cav2.n_bar_in + self.pump_noise_a2 * p_red_w,
        )


def reference_device(**overrides) -> DeviceParams:
    """The measured device at its reported operating point."""
    mech = MechanicalMode.from_occupation(hz_to_angular(2.81e6), hz_to_angular(6.0), 60.0)
    cav1 = CavityMode(hz_to_angular(10.17e9), hz_to_angular(0.52e6), 0.76, hz_to_angular(152.0))
    cav2 = CavityMode(hz_to_angular(12.13e9), hz_to_angular(0.48e6), 0.67, hz_to_angular(170.0))
    dev = DeviceParams(mech, cav1, cav2, p_blue_dbm=-87.1, p_red_dbm=-84.4)
    return replace(dev, **overrides) if overrides else dev


def reference_operating_point(n_m: float = 60.0) -> OperatingPoint:
    """Reported cooperativities (67.0, 113.3) with the reference rates; cavity baths empty."""
    return OperatingPoint(
        c1=67.0,
        c2=113.3,
        eta1=0.76,
        eta2=0.67,
        kappa1=hz_to_angular(0.52e6),
        kappa2=hz_to_angular(0.48e6),
        gamma_m=hz_to_angular(6.0),
        n_m=n_m,
    )
