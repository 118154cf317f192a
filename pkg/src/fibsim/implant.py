"""Forward model of where ions land.

Covers counted-pulse planning, dose arithmetic, and sampling of ion rest
positions from the Gaussian beam profile combined in quadrature with the
energy-dependent lateral straggle. Straggle versus energy is a configured
lookup table with linear interpolation; no transport physics is simulated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, EnergyRangeError
from .geometry import Point2D, Point3D
from .seeding import RandomSeed
from .units import ELEMENTARY_CHARGE_C, fwhm_to_sigma

MACHINE_ENERGY_RANGE_KEV = (10.0, 200.0)

STRAGGLE_CSV_HEADER = ["energy_keV", "lateral_sigma_nm", "depth_mean_nm", "depth_sigma_nm"]


@dataclass(frozen=True)
class BeamSpec:
    """Focused ion beam settings: spot FWHM, energy, current.

    ``pointing_sigma_nm`` optionally adds a per-shot (not per-ion) Gaussian
    pointing offset; disabled by default so the quadrature model of beam
    width plus straggle is reproduced exactly.
    """

    fwhm_nm: float
    energy_kev: float
    current_pa: float
    pointing_sigma_nm: float = 0.0

    def __post_init__(self):
        if self.fwhm_nm < 0:
            raise DomainError(f"beam FWHM must be >= 0, got {self.fwhm_nm}")
        lo, hi = MACHINE_ENERGY_RANGE_KEV
        if not (lo <= self.energy_kev <= hi):
            raise DomainError(
                f"beam energy {self.energy_kev} keV outside machine range [{lo}, {hi}]"
            )
        if self.current_pa <= 0:
            raise DomainError(f"beam current must be positive, got {self.current_pa}")
        if self.pointing_sigma_nm < 0:
            raise DomainError("pointing sigma must be >= 0")

    def sigma_nm(self) -> float:
        """Beam profile standard deviation; 0 for an ideal point beam."""
        return fwhm_to_sigma(self.fwhm_nm) if self.fwhm_nm > 0 else 0.0


@dataclass(frozen=True)
class StraggleEntry:
    energy_kev: float
    lateral_sigma_nm: float
    depth_mean_nm: float
    depth_sigma_nm: float

    def __post_init__(self):
        if self.lateral_sigma_nm < 0 or self.depth_sigma_nm < 0:
            raise DomainError("straggle sigmas must be >= 0")
        if self.depth_mean_nm < 0:
            raise DomainError("mean depth must be >= 0")


class StraggleTable:
    """Energy-indexed straggle values with linear interpolation, no extrapolation."""

    def __init__(self, entries: list[StraggleEntry]):
        if not entries:
            raise DomainError("straggle table needs at least one entry")
        energies = [e.energy_kev for e in entries]
        if any(b <= a for a, b in zip(energies, energies[1:])):
            raise DomainError("straggle energies must be strictly increasing")
        self.entries = list(entries)
        self._energies = np.array(energies)
        self._lateral = np.array([e.lateral_sigma_nm for e in entries])
        self._depth_mean = np.array([e.depth_mean_nm for e in entries])
        self._depth_sigma = np.array([e.depth_sigma_nm for e in entries])

    def energy_range_kev(self) -> tuple[float, float]:
        return float(self._energies[0]), float(self._energies[-1])

    def lookup(self, energy_kev: float) -> StraggleEntry:
        lo, hi = self.energy_range_kev()
        if not (lo <= energy_kev <= hi):
            raise EnergyRangeError(energy_kev, lo, hi)
        return StraggleEntry(
            energy_kev=float(energy_kev),
            lateral_sigma_nm=float(np.interp(energy_kev, self._energies, self._lateral)),
            depth_mean_nm=float(np.interp(energy_kev, self._energies, self._depth_mean)),
            depth_sigma_nm=float(np.interp(energy_kev, self._energies, self._depth_sigma)),
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> "StraggleTable":
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: empty straggle CSV") from None
            if [h.strip() for h in header] != STRAGGLE_CSV_HEADER:
                raise ConfigError(
                    f"{path}: expected header {','.join(STRAGGLE_CSV_HEADER)}, "
                    f"got {','.join(header)}"
                )
            entries = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 4:
                    raise ConfigError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
                try:
                    vals = [float(c) for c in row]
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
                entries.append(StraggleEntry(*vals))
        return cls(entries)

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(STRAGGLE_CSV_HEADER)
            for e in self.entries:
                writer.writerow(
                    [repr(e.energy_kev), repr(e.lateral_sigma_nm),
                     repr(e.depth_mean_nm), repr(e.depth_sigma_nm)]
                )


def default_straggle_table() -> StraggleTable:
    """Shipped default anchored at 19 nm lateral sigma (100 keV) and 106 nm depth (160 keV).

    Other energies scale linearly through those anchors; the depth spread is a
    nominal 25% of the mean depth. Replace via CSV for calibrated values.
    """
    energies = [10.0, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 160.0, 175.0, 200.0]
    entries = [
        StraggleEntry(
            energy_kev=e,
            lateral_sigma_nm=19.0 * e / 100.0,
            depth_mean_nm=106.0 * e / 160.0,
            depth_sigma_nm=0.25 * 106.0 * e / 160.0,
        )
        for e in energies
    ]
    return StraggleTable(entries)


@dataclass(frozen=True)
class ImplantShot:
    """One counted pulse: a target point and an exact number of ions."""

    target: Point2D
    requested_ions: int
    energy_kev: float

    def __post_init__(self):
        if not isinstance(self.requested_ions, int) or self.requested_ions < 0:
            raise DomainError(f"requested_ions must be an int >= 0, got {self.requested_ions!r}")


def plan_pulse(current_pa: float, n_ions: int) -> float:
    """Pulse duration in microseconds that delivers n_ions at the given current."""
    if current_pa <= 0:
        raise DomainError(f"current must be positive, got {current_pa}")
    if n_ions < 0:
        raise DomainError(f"ion count must be >= 0, got {n_ions}")
    return n_ions * ELEMENTARY_CHARGE_C / (current_pa * 1e-12) * 1e6


def dose_to_ions(dose_per_cm2: float, area_um2: float) -> float:
    """Expected ion count for an areal dose over an exposure area."""
    if dose_per_cm2 < 0:
        raise DomainError(f"dose must be >= 0, got {dose_per_cm2}")
    if area_um2 <= 0:
        raise DomainError(f"area must be positive, got {area_um2}")
    return dose_per_cm2 * area_um2 * 1e-8


def ions_to_dose(n_ions: float, area_um2: float) -> float:
    """Areal dose in cm^-2 corresponding to an ion count over an area."""
    if n_ions < 0:
        raise DomainError(f"ion count must be >= 0, got {n_ions}")
    if area_um2 <= 0:
        raise DomainError(f"area must be positive, got {area_um2}")
    return n_ions / (area_um2 * 1e-8)


def expected_lateral_sigma(beam: BeamSpec, straggle_sigma_nm: float) -> float:
    """Per-axis position spread: beam sigma and straggle added in quadrature."""
    if straggle_sigma_nm < 0:
        raise DomainError("straggle sigma must be >= 0")
    return math.hypot(beam.sigma_nm(), straggle_sigma_nm)


def sample_ion_array(
    shot: ImplantShot,
    beam: BeamSpec,
    table: StraggleTable,
    seed: RandomSeed,
) -> np.ndarray:
    """Sample rest positions for one shot as an (n, 3) array of nm coordinates.

    Lateral offsets are isotropic Gaussian with the quadrature sigma at the
    shot energy; depth is Gaussian around the table's mean depth, clipped at
    the surface. Identical (shot, beam, table, seed) give identical output.
    """
    entry = table.lookup(shot.energy_kev)
    sigma = expected_lateral_sigma(beam, entry.lateral_sigma_nm)
    rng = seed.generator()
    n = shot.requested_ions

    center = shot.target.as_array()
    if beam.pointing_sigma_nm > 0:
        center = center + rng.normal(0.0, beam.pointing_sigma_nm, size=2)

    positions = np.empty((n, 3))
    if sigma > 0:
        positions[:, :2] = center + rng.normal(0.0, sigma, size=(n, 2))
    else:
        positions[:, :2] = center
    if entry.depth_sigma_nm > 0:
        depth = rng.normal(entry.depth_mean_nm, entry.depth_sigma_nm, size=n)
    else:
        depth = np.full(n, entry.depth_mean_nm)
    positions[:, 2] = np.clip(depth, 0.0, None)
    return positions


def sample_ion_positions(
    shot: ImplantShot,
    beam: BeamSpec,
    table: StraggleTable,
    seed: RandomSeed,
) -> list[Point3D]:
    """Sample rest positions for one shot; see sample_ion_array for the model."""
    arr = sample_ion_array(shot, beam, table, seed)
    return [Point3D(float(x), float(y), float(z)) for x, y, z in arr]
