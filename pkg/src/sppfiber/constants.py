"""Physical constants (SI) and unit helpers used across the package."""

import math

C0 = 299_792_458.0            # vacuum speed of light, m/s
EPS0 = 8.854_187_8128e-12     # vacuum permittivity, F/m
MU0 = 1.256_637_062_12e-6     # vacuum permeability, H/m
ETA0 = math.sqrt(MU0 / EPS0)  # vacuum impedance, ohm

# hc in eV*nm, for photon-energy conversions of tabulated optical data
EV_NM = 1239.841_984_3320026

NM = 1e-9


def omega_from_lambda_nm(lambda_nm: float) -> float:
    """Angular frequency (rad/s) of vacuum wavelength given in nm."""
    if lambda_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {lambda_nm} nm")
    return 2.0 * math.pi * C0 / (lambda_nm * NM)


def k0_from_lambda_nm(lambda_nm: float) -> float:
    """Vacuum wavenumber (rad/m) of vacuum wavelength given in nm."""
    if lambda_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {lambda_nm} nm")
    return 2.0 * math.pi / (lambda_nm * NM)
