"""Unit conversions and physical constants.

Canonical internal units: nm for length, keV for energy, GHz for frequency,
seconds for time, photon counts for tallies. Linewidths are carried as FWHM;
Gaussian standard deviations are derived on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Ratio between a Gaussian FWHM and its standard deviation, 2*sqrt(2 ln 2).
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# Speed of light in nm/s (convenient for nm <-> GHz conversions).
C_NM_PER_S = 2.99792458e17

# Elementary charge in coulombs.
ELEMENTARY_CHARGE_C = 1.602176634e-19

_WAVELENGTH_MAX_NM = 10000.0


def fwhm_to_sigma(value: float) -> float:
    """Convert a Gaussian FWHM to its standard deviation (same unit)."""
    if value <= 0:
        raise DomainError(f"FWHM must be positive, got {value!r}")
    return value / FWHM_PER_SIGMA


def sigma_to_fwhm(value: float) -> float:
    """Convert a Gaussian standard deviation to its FWHM (same unit)."""
    if value <= 0:
        raise DomainError(f"sigma must be positive, got {value!r}")
    return value * FWHM_PER_SIGMA


def wavelength_fwhm_to_frequency_ghz(center_nm: float, width_nm: float) -> float:
    """Convert a wavelength linewidth to a frequency linewidth in GHz.

    Uses the small-width relation dnu = c * dlambda / lambda^2, valid for
    width << center.
    """
    _check_wavelength(center_nm)
    if width_nm <= 0:
        raise DomainError(f"width must be positive, got {width_nm!r}")
    if width_nm >= center_nm:
        raise DomainError(
            f"width {width_nm!r} nm must be well below center {center_nm!r} nm"
        )
    return C_NM_PER_S * width_nm / center_nm**2 / 1e9


def frequency_fwhm_to_wavelength_nm(center_nm: float, width_ghz: float) -> float:
    """Convert a frequency linewidth (GHz) at a wavelength center to nm."""
    _check_wavelength(center_nm)
    if width_ghz <= 0:
        raise DomainError(f"width must be positive, got {width_ghz!r}")
    return width_ghz * 1e9 * center_nm**2 / C_NM_PER_S


def wavelength_nm_to_frequency_ghz(wavelength_nm: float) -> float:
    _check_wavelength(wavelength_nm)
    return C_NM_PER_S / wavelength_nm / 1e9


def frequency_ghz_to_wavelength_nm(frequency_ghz: float) -> float:
    if frequency_ghz <= 0:
        raise DomainError(f"frequency must be positive, got {frequency_ghz!r}")
    return C_NM_PER_S / (frequency_ghz * 1e9)


def _check_wavelength(center_nm: float) -> None:
    if not (0 < center_nm < _WAVELENGTH_MAX_NM):
        raise DomainError(
            f"wavelength must lie in (0, {_WAVELENGTH_MAX_NM:g}) nm, got {center_nm!r}"
        )


@dataclass(frozen=True)
class SpectralQuantity:
    """A spectral line: center and FWHM with an explicit unit tag.

    The unit is either "nm" (wavelength) or "GHz" (frequency); center and
    width share it.
    """

    center: float
    fwhm: float
    unit: str

    def __post_init__(self):
        if self.unit not in ("nm", "GHz"):
            raise DomainError(f"unit must be 'nm' or 'GHz', got {self.unit!r}")
        if not (math.isfinite(self.center) and math.isfinite(self.fwhm)):
            raise DomainError("center and fwhm must be finite")
        if self.fwhm <= 0:
            raise DomainError(f"fwhm must be positive, got {self.fwhm!r}")
        if self.unit == "nm":
            _check_wavelength(self.center)

    def to_frequency(self) -> "SpectralQuantity":
        if self.unit == "GHz":
            return self
        return SpectralQuantity(
            center=wavelength_nm_to_frequency_ghz(self.center),
            fwhm=wavelength_fwhm_to_frequency_ghz(self.center, self.fwhm),
            unit="GHz",
        )

    def to_wavelength(self) -> "SpectralQuantity":
        if self.unit == "nm":
            return self
        center_nm = frequency_ghz_to_wavelength_nm(self.center)
        return SpectralQuantity(
            center=center_nm,
            fwhm=frequency_fwhm_to_wavelength_nm(center_nm, self.fwhm),
            unit="nm",
        )
