"""Shared domain types, error classes and small angle/amplitude helpers."""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

CHANNELS = ("HH", "HV", "VV")
FRAMES = ("I", "II")
# CCP is a derived channel; it never appears in a PolarimetricScan.
DERIVED_CHANNELS = ("CCP", "ANGLE")


class PolGPRError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PolGPRError, ValueError):
    """Bad input or configuration (CLI exit code 1)."""


class DomainError(ValidationError):
    pass


class DegenerateInputError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class AlignmentError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class DataError(PolGPRError):
    """Input data that parses as a request but cannot be processed (CLI exit code 2)."""


class ScanFormatError(DataError):
    pass


class NoSignalError(DataError):
    pass


@dataclass(frozen=True)
class SurveyGrid:
    """Sampling geometry of a B-scan.

    dt is in ns, dx in m. ``epsilon_r`` is the relative permittivity of the
    (single, effective) medium.
    """

    dt: float = 0.01
    dx: float = 0.01
    n_samples: int = 512
    n_traces: int = 101
    epsilon_r: float = 3.0

    def __post_init__(self):
        for name in ("dt", "dx", "epsilon_r"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if self.dt <= 0 or self.dx <= 0:
            raise ValidationError("dt and dx must be positive")
        if self.epsilon_r < 1:
            raise ValidationError(f"epsilon_r must be >= 1, got {self.epsilon_r}")
        for name in ("n_samples", "n_traces"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 2:
                raise ValidationError(f"{name} must be an integer >= 2, got {v!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_samples, self.n_traces)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_traces) * self.dx


@dataclass(frozen=True, eq=False)
class Bscan:
    """A time-samples x traces matrix tagged with its grid, channel and frame.

    The data array is copied and made read-only on construction.
    """

    grid: SurveyGrid
    channel: str
    frame: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.channel not in CHANNELS + DERIVED_CHANNELS:
            raise ValidationError(f"unknown channel {self.channel!r}")
        if self.frame not in FRAMES:
            raise ValidationError(f"unknown frame {self.frame!r}")
        data = np.array(self.data, dtype=np.float64)
        if data.shape != self.grid.shape:
            raise DimensionError(
                f"data shape {data.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(data)):
            raise ValidationError("B-scan data contains NaN or Inf")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def with_data(self, data, channel: str | None = None) -> "Bscan":
        return Bscan(self.grid, channel or self.channel, self.frame, data)

    def __eq__(self, other):
        if not isinstance(other, Bscan):
            return NotImplemented
        return (self.grid == other.grid and self.channel == other.channel
                and self.frame == other.frame
                and np.array_equal(self.data, other.data))


@dataclass(frozen=True)
class PolarimetricScan:
    """HH, HV and VV B-scans of one antenna frame. S_VH is never stored (reciprocity)."""

    frame: str
    hh: Bscan
    hv: Bscan
    vv: Bscan

    def __post_init__(self):
        for name, b in (("hh", self.hh), ("hv", self.hv), ("vv", self.vv)):
            if b.channel != name.upper():
                raise ValidationError(f"field {name} holds a {b.channel} scan")
            if b.frame != self.frame:
                raise ValidationError(f"{name} scan is frame {b.frame}, expected {self.frame}")
            if b.grid != self.hh.grid:
                raise AlignmentError("channels of a polarimetric scan must share one grid")

    @property
    def grid(self) -> SurveyGrid:
        return self.hh.grid

    def channels(self) -> dict[str, Bscan]:
        return {"HH": self.hh, "HV": self.hv, "VV": self.vv}

    def map(self, fn) -> "PolarimetricScan":
        """Apply a Bscan -> Bscan function to every channel."""
        return PolarimetricScan(self.frame, fn(self.hh), fn(self.hv), fn(self.vv))


@dataclass(frozen=True)
class TargetModel:
    """A thin elongated scatterer crossing the survey line.

    theta is the azimuth in degrees, [0, 180). reflection_sign is -1 when the
    target is denser (higher permittivity) than the medium, +1 otherwise.
    """

    x0: float = 0.5
    depth: float = 0.03
    theta: float = 0.0
    reflection_sign: int = -1
    amplitude: float = 1.0

    def __post_init__(self):
        for name in ("x0", "depth", "theta", "amplitude"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if not 0 <= self.theta < 180:
            raise ValidationError(f"theta must lie in [0, 180), got {self.theta}")
        if self.reflection_sign not in (-1, 1):
            raise ValidationError("reflection_sign must be -1 or +1")
        if self.amplitude <= 0:
            raise ValidationError("amplitude must be positive")
        if self.depth <= 0:
            raise ValidationError("depth must be positive")


@dataclass(frozen=True, eq=False)
class OrientationEstimate:
    """Result of an orientation estimator.

    ``angle_map`` holds per-sample angles in [0, 90) and NaN outside ``mask``.
    ``region`` is the ambiguity branch taken (A, B, A' or B'); the Alford
    baseline leaves it as None.
    """

    theta_cal: float
    theta_base: float
    angle_map: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)
    sm1: float = 0.0
    sm2: float = 0.0
    n_selected: int = 0
    rule: str = "none"
    region: str | None = None
    spread: float = 0.0

    def __post_init__(self):
        if not 0 <= self.theta_cal < 180:
            raise ValidationError(f"theta_cal {self.theta_cal} outside [0, 180)")
        if int(np.count_nonzero(self.mask)) != self.n_selected:
            raise ValidationError("mask count does not match n_selected")

    def summary(self) -> dict:
        return {
            "theta_cal": self.theta_cal,
            "theta_base": self.theta_base,
            "n_selected": self.n_selected,
            "sm1": self.sm1,
            "sm2": self.sm2,
            "rule": self.rule,
            "region": self.region,
            "angle_spread": self.spread,
        }


def angle_error(theta_a: float, theta_b: float, period: float = 180.0) -> float:
    """Distance between two orientations on a circle of the given period (degrees).

    >>> angle_error(179, 1)
    2.0
    """
    if not (math.isfinite(theta_a) and math.isfinite(theta_b)):
        raise DomainError("angle_error needs finite inputs")
    d = math.fmod(abs(theta_a - theta_b), period)
    return float(min(d, period - d))


def normalize_bscan(b: Bscan) -> Bscan:
    peak = np.max(np.abs(b.data))
    if peak == 0:
        raise DegenerateInputError("cannot normalize an all-zero B-scan")
    return b.with_data(b.data / peak)


def circular_mean(angles: np.ndarray, period: float) -> tuple[float, float]:
    """Mean of angles on a circle of ``period`` degrees, returned in [0, period).

    Also returns the mean resultant length (1 for identical angles).
    """
    phase = np.radians(np.asarray(angles, dtype=float) * (360.0 / period))
    c = float(np.sum(np.cos(phase)))
    s = float(np.sum(np.sin(phase)))
    n = phase.size
    mean = math.degrees(math.atan2(s, c)) * (period / 360.0)
    mean = mean % period
    if mean >= period:  # fmod edge case for tiny negatives
        mean = 0.0
    return mean, math.hypot(c, s) / n


def grids_match(*scans: Bscan) -> bool:
    return all(s.grid == scans[0].grid for s in scans[1:])


