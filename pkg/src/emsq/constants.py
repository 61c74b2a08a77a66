"""Physical constants (CODATA 2018, SI) and unit conversions used at I/O boundaries."""
import math

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
TWO_PI = 2.0 * math.pi

#: Variance of a vacuum quadrature in the convention used throughout the package.
VACUUM_VARIANCE = 0.5


def dbm_to_watt(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * math.log10(p_w) + 30.0


def hz_to_angular(f_hz):
    return TWO_PI * f_hz


def angular_to_hz(omega):
    return omega / TWO_PI


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)
