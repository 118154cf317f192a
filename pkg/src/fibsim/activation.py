"""Conversion of implanted ions into optically active emitters.

The yield surface eta(energy, dose) is a bilinear grid in (energy, log10
dose). The shipped default is a two-parameter power law anchored at 2.5%
for 100 keV ions at 1e12 cm^-2, because the measured surface is only
published as trends plus extrema; an explicit grid CSV overrides it.
Electron irradiation is a step function of fluence with a single
multiplier.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import Point3D
from .seeding import RandomSeed
from .units import FWHM_PER_SIGMA

YIELD_CSV_HEADER = ["energy_keV", "dose_cm2", "eta"]

# Queries may extrapolate up to a factor of 2 beyond either grid edge.
_EXTRAPOLATION_FACTOR = 2.0


class YieldValue(NamedTuple):
    eta: float
    extrapolated: bool


@dataclass(frozen=True)
class FineStructure:
    """Relative transition offsets (GHz) and branching weights of one emitter."""

    offsets_ghz: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.offsets_ghz) != len(self.weights):
            raise DomainError("offsets and weights must have equal length")
        if any(w < 0 for w in self.weights):
            raise DomainError("branching weights must be >= 0")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise DomainError(f"branching weights must sum to 1, got {sum(self.weights)!r}")


def default_fine_structure() -> FineStructure:
    """Nominal four-line template; the level splittings are configuration, not physics
    derived here."""
    return FineStructure(
        offsets_ghz=(155.0, 105.0, -105.0, -155.0),
        weights=(0.2, 0.3, 0.3, 0.2),
    )


@dataclass(frozen=True)
class Emitter:
    """Ground-truth created defect: position, line parameters, brightness."""

    position: Point3D
    zpl_center_ghz: float
    homogeneous_fwhm_mhz: float
    brightness_kcts: float
    fine_structure: FineStructure | None = None

    def __post_init__(self):
        if self.zpl_center_ghz <= 0:
            raise DomainError("ZPL center frequency must be positive")
        if self.homogeneous_fwhm_mhz <= 0:
            raise DomainError("homogeneous linewidth must be positive")
        if self.brightness_kcts <= 0:
            raise DomainError("brightness must be positive")


@dataclass(frozen=True)
class SpectralPopulation:
    """Distribution the per-emitter spectral properties are drawn from.

    Homogeneous linewidths are log-normal with the median set so the mean
    equals ``homogeneous_mean_mhz``, floored at the lifetime limit
    1000 / (2 pi lifetime_ns) MHz. A ``fine_structure`` of None renders a
    single transition at the ZPL center.
    """

    zpl_center_ghz: float
    inhomogeneous_fwhm_ghz: float
    homogeneous_mean_mhz: float = 200.0
    homogeneous_shape: float = 0.4
    lifetime_ns: float = 1.7
    brightness_kcts: float = 30.0
    brightness_rel_sigma: float = 0.1
    fine_structure: FineStructure | None = None

    def __post_init__(self):
        for name in ("zpl_center_ghz", "inhomogeneous_fwhm_ghz", "homogeneous_mean_mhz",
                     "lifetime_ns", "brightness_kcts"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.homogeneous_shape < 0 or self.brightness_rel_sigma < 0:
            raise DomainError("shape and spread parameters must be >= 0")
        if self.homogeneous_mean_mhz < self.lifetime_limit_mhz():
            raise DomainError("homogeneous mean linewidth lies below the lifetime limit")

    def lifetime_limit_mhz(self) -> float:
        """Minimum transition linewidth set by the excited-state lifetime."""
        return 1e3 / (2.0 * math.pi * self.lifetime_ns)

    def homogeneous_median_mhz(self) -> float:
        return self.homogeneous_mean_mhz / math.exp(self.homogeneous_shape**2 / 2.0)


class YieldSurface:
    """Conversion probability grid over (energy, log10 dose) plus irradiation response.

    eta must be non-decreasing along energy at fixed dose and non-increasing
    along dose at fixed energy.
    """

    def __init__(
        self,
        energies_kev,
        doses_per_cm2,
        eta,
        irradiation_multiplier: float = 10.0,
        activation_fluence_per_cm2: float = 1e17,
        yield_cap: float = 1.0,
    ):
        self.energies_kev = np.asarray(energies_kev, dtype=float)
        self.doses_per_cm2 = np.asarray(doses_per_cm2, dtype=float)
        self.eta = np.asarray(eta, dtype=float)
        self.irradiation_multiplier = float(irradiation_multiplier)
        self.activation_fluence_per_cm2 = float(activation_fluence_per_cm2)
        self.yield_cap = float(yield_cap)
        self._validate()
        self._log_doses = np.log10(self.doses_per_cm2)

    def _validate(self):
        if self.energies_kev.ndim != 1 or self.doses_per_cm2.ndim != 1:
            raise DomainError("energy and dose grids must be 1-d")
        if np.any(np.diff(self.energies_kev) <= 0) or np.any(np.diff(self.doses_per_cm2) <= 0):
            raise DomainError("grid axes must be strictly increasing")
        if np.any(self.doses_per_cm2 <= 0):
            raise DomainError("doses must be positive")
        if self.eta.shape != (self.energies_kev.size, self.doses_per_cm2.size):
            raise DomainError(
                f"eta shape {self.eta.shape} does not match grid "
                f"({self.energies_kev.size}, {self.doses_per_cm2.size})"
            )
        if np.any(self.eta < 0) or np.any(self.eta > 1):
            raise DomainError("eta values must lie in [0, 1]")
        if np.any(np.diff(self.eta, axis=0) < -1e-12):
            raise DomainError("eta must be non-decreasing along energy")
        if np.any(np.diff(self.eta, axis=1) > 1e-12):
            raise DomainError("eta must be non-increasing along dose")
        if self.irradiation_multiplier < 1:
            raise DomainError("irradiation multiplier must be >= 1")
        if not (0 < self.yield_cap <= 1):
            raise DomainError("yield cap must lie in (0, 1]")

    def lookup(self, energy_kev: float, dose_per_cm2: float) -> YieldValue:
        """Bilinear interpolation in (energy, log10 dose); flags extrapolated queries.

        Linear extrapolation from the edge cells is permitted up to a factor
        of 2 beyond either grid edge; further out raises.
        """
        if dose_per_cm2 <= 0:
            raise DomainError(f"dose must be positive, got {dose_per_cm2}")
        e, u = float(energy_kev), math.log10(dose_per_cm2)
        egrid, ugrid = self.energies_kev, self._log_doses

        e_lo, e_hi = egrid[0], egrid[-1]
        u_lo, u_hi = ugrid[0], ugrid[-1]
        log_f = math.log10(_EXTRAPOLATION_FACTOR)
        if not (e_lo / _EXTRAPOLATION_FACTOR <= e <= e_hi * _EXTRAPOLATION_FACTOR):
            raise DomainError(
                f"energy {e} keV beyond {_EXTRAPOLATION_FACTOR}x the grid edge "
                f"[{e_lo}, {e_hi}]"
            )
        if not (u_lo - log_f <= u <= u_hi + log_f):
            raise DomainError(
                f"dose {dose_per_cm2:g} beyond {_EXTRAPOLATION_FACTOR}x the grid edge "
                f"[{10 ** u_lo:g}, {10 ** u_hi:g}]"
            )
        extrapolated = not (e_lo <= e <= e_hi and u_lo <= u <= u_hi)

        val = _bilinear(egrid, ugrid, self.eta, e, u)
        return YieldValue(eta=float(np.clip(val, 0.0, 1.0)), extrapolated=extrapolated)

    @classmethod
    def from_power_law(
        cls,
        eta_ref: float = 0.025,
        energy_exponent: float = 1.0,
        dose_exponent: float = 0.3,
        energies_kev=None,
        doses_per_cm2=None,
        **kwargs,
    ) -> "YieldSurface":
        """Sample eta = eta_ref * (E/100)^a * (D/1e12)^-b onto a grid, clipped to [0, 1]."""
        if energies_kev is None:
            energies_kev = np.arange(10.0, 100.1, 5.0)
        if doses_per_cm2 is None:
            doses_per_cm2 = 10 ** np.arange(12.0, 14.01, 0.125)
        energies_kev = np.asarray(energies_kev, dtype=float)
        doses_per_cm2 = np.asarray(doses_per_cm2, dtype=float)
        ee = energies_kev[:, None] / 100.0
        dd = doses_per_cm2[None, :] / 1e12
        eta = np.clip(eta_ref * ee**energy_exponent * dd**-dose_exponent, 0.0, 1.0)
        return cls(energies_kev, doses_per_cm2, eta, **kwargs)

    @classmethod
    def from_csv(cls, path: str | Path, **kwargs) -> "YieldSurface":
        """Load a complete grid from long-format rows energy_keV,dose_cm2,eta."""
        path = Path(path)
        rows = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: empty yield CSV") from None
            if [h.strip() for h in header] != YIELD_CSV_HEADER:
                raise ConfigError(
                    f"{path}: expected header {','.join(YIELD_CSV_HEADER)}, got {','.join(header)}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                try:
                    rows.append(tuple(float(c) for c in row))
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
        energies = np.array(sorted({r[0] for r in rows}))
        doses = np.array(sorted({r[1] for r in rows}))
        eta = np.full((energies.size, doses.size), np.nan)
        for e, d, v in rows:
            eta[np.searchsorted(energies, e), np.searchsorted(doses, d)] = v
        if np.any(np.isnan(eta)):
            raise ConfigError(f"{path}: grid is not complete (missing energy/dose cells)")
        return cls(energies, doses, eta, **kwargs)

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(YIELD_CSV_HEADER)
            for i, e in enumerate(self.energies_kev):
                for j, d in enumerate(self.doses_per_cm2):
                    writer.writerow([repr(float(e)), repr(float(d)), repr(float(self.eta[i, j]))])


def _bilinear(xgrid, ygrid, z, x, y):
    """Bilinear interpolation with linear extrapolation from the edge cells."""
    i = int(np.clip(np.searchsorted(xgrid, x) - 1, 0, xgrid.size - 2)) if xgrid.size > 1 else 0
    j = int(np.clip(np.searchsorted(ygrid, y) - 1, 0, ygrid.size - 2)) if ygrid.size > 1 else 0
    if xgrid.size == 1 and ygrid.size == 1:
        return z[0, 0]
    if xgrid.size == 1:
        ty = (y - ygrid[j]) / (ygrid[j + 1] - ygrid[j])
        return z[0, j] * (1 - ty) + z[0, j + 1] * ty
    if ygrid.size == 1:
        tx = (x - xgrid[i]) / (xgrid[i + 1] - xgrid[i])
        return z[i, 0] * (1 - tx) + z[i + 1, 0] * tx
    tx = (x - xgrid[i]) / (xgrid[i + 1] - xgrid[i])
    ty = (y - ygrid[j]) / (ygrid[j + 1] - ygrid[j])
    return (
        z[i, j] * (1 - tx) * (1 - ty)
        + z[i + 1, j] * tx * (1 - ty)
        + z[i, j + 1] * (1 - tx) * ty
        + z[i + 1, j + 1] * tx * ty
    )


def default_yield_surface(**kwargs) -> YieldSurface:
    return YieldSurface.from_power_law(**kwargs)


def yield_lookup(surface: YieldSurface, energy_kev: float, dose_per_cm2: float) -> YieldValue:
    """Conversion probability at (energy, dose); function form of surface.lookup."""
    return surface.lookup(energy_kev, dose_per_cm2)


def apply_irradiation(eta: float, fluence_per_cm2: float, surface: YieldSurface) -> float:
    """Yield after electron irradiation: a step function of fluence.

    At or above the surface's activation fluence the yield is multiplied by
    the irradiation multiplier and clamped at the yield cap; below it the
    yield is unchanged.
    """
    if not (0 <= eta <= 1):
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if fluence_per_cm2 < 0:
        raise DomainError(f"fluence must be >= 0, got {fluence_per_cm2}")
    if fluence_per_cm2 >= surface.activation_fluence_per_cm2:
        return min(eta * surface.irradiation_multiplier, surface.yield_cap)
    return eta


def sample_emitter_count(n_ions: int, eta: float, seed: RandomSeed) -> int:
    """Number of created emitters for n_ions at conversion yield eta (Poisson)."""
    if n_ions < 0:
        raise DomainError("ion count must be >= 0")
    if not (0 <= eta <= 1):
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if n_ions == 0 or eta == 0:
        return 0
    return int(seed.generator().poisson(n_ions * eta))


def sample_emitters(
    ion_positions,
    eta: float,
    population: SpectralPopulation,
    seed: RandomSeed,
) -> list[Emitter]:
    """Convert ions to emitters: one Bernoulli(eta) trial per ion.

    Accepts a list of Point3D or an (n, 3) array. Surviving ions keep their
    positions; spectral properties are drawn from the population, with the
    homogeneous width floored at the lifetime limit.
    """
    if not (0 <= eta <= 1):
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if isinstance(ion_positions, np.ndarray):
        arr = np.asarray(ion_positions, dtype=float).reshape(-1, 3)
    else:
        arr = np.array([p.as_array() for p in ion_positions], dtype=float).reshape(-1, 3)
    rng = seed.generator()
    keep = rng.random(arr.shape[0]) < eta
    kept = arr[keep]
    n = kept.shape[0]
    if n == 0:
        return []

    inhom_sigma = population.inhomogeneous_fwhm_ghz / fwhm_per_sigma()
    centers = rng.normal(population.zpl_center_ghz, inhom_sigma, size=n)
    gamma = population.lifetime_limit_mhz()
    if population.homogeneous_shape > 0:
        widths = rng.lognormal(
            math.log(population.homogeneous_median_mhz()),
            population.homogeneous_shape,
            size=n,
        )
    else:
        widths = np.full(n, population.homogeneous_mean_mhz)
    widths = np.maximum(widths, gamma)
    if population.brightness_rel_sigma > 0:
        bright = population.brightness_kcts * np.maximum(
            rng.normal(1.0, population.brightness_rel_sigma, size=n), 0.1
        )
    else:
        bright = np.full(n, population.brightness_kcts)

    return [
        Emitter(
            position=Point3D(float(x), float(y), float(z)),
            zpl_center_ghz=float(c),
            homogeneous_fwhm_mhz=float(w),
            brightness_kcts=float(b),
            fine_structure=population.fine_structure,
        )
        for (x, y, z), c, w, b in zip(kept, centers, widths, bright)
    ]


def fwhm_per_sigma() -> float:
    from .units import FWHM_PER_SIGMA

    return FWHM_PER_SIGMA
