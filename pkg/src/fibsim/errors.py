"""Exception types shared across the simulator and analysis pipeline."""


class DomainError(ValueError):
    """An argument lies outside its physically meaningful domain."""


class EnergyRangeError(DomainError):
    """Requested beam energy falls outside the straggle table's interval."""

    def __init__(self, energy_kev: float, lo_kev: float, hi_kev: float):
        self.energy_kev = energy_kev
        self.valid_range = (lo_kev, hi_kev)
        super().__init__(
            f"energy {energy_kev:g} keV outside table range "
            f"[{lo_kev:g}, {hi_kev:g}] keV (no extrapolation)"
        )


class ConfigError(ValueError):
    """A config file or serialized input could not be parsed or validated."""


class FitError(RuntimeError):
    """A least-squares or maximum-likelihood fit failed."""


class FitConvergenceError(FitError):
    """Optimizer exhausted its iteration budget; carries the last iterate."""

    def __init__(self, message: str, last_params=None):
        self.last_params = last_params
        super().__init__(message)


class GridFitError(FitError):
    """Grid registration did not stabilize; carries the last fit."""

    def __init__(self, message: str, last_fit=None):
        self.last_fit = last_fit
        super().__init__(message)


class TargetingError(FitError):
    """Targeting analysis could not identify the required features."""


class ReportIntegrityError(RuntimeError):
    """A persisted report failed its digest or checksum verification."""
