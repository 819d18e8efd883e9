"""Orientation estimation from the frame-I and frame-II cross-polarized scans.

Per sample, the ratio S_I,HV / S_II,HV equals tan(2 theta) for an ideal thin
scatterer, which fixes theta up to a 90 degree ambiguity.  The ambiguity is
resolved from the signs and relative size of the dominant amplitudes; the
rules flip when the target is less dense than the medium.
"""
from __future__ import annotations

import enum

import numpy as np

from .core import (
    Bscan, DomainError, NoSignalError, OrientationEstimate, ValidationError,
    angle_error, circular_mean,
)
from .dcpd import ccp, check_cross_pair

DEFAULT_TH = 0.8


class ContrastMode(enum.Enum):
    TARGET_DENSER = -1   # negative reflection coefficient (metal, root in sand)
    TARGET_RARER = 1

    @property
    def reflection_sign(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value) -> "ContrastMode":
        if isinstance(value, cls):
            return value
        names = {"denser": cls.TARGET_DENSER, "rarer": cls.TARGET_RARER,
                 "TargetDenser": cls.TARGET_DENSER, "TargetRarer": cls.TARGET_RARER}
        if value in names:
            return names[value]
        raise ValidationError(f"unknown contrast mode {value!r}")

    @property
    def label(self) -> str:
        return "denser" if self is ContrastMode.TARGET_DENSER else "rarer"


def per_sample_angle(s1: float, s2: float) -> float:
    """Half the arctangent of s1/s2 in degrees, folded into [0, 90)."""
    if s1 == 0 and s2 == 0:
        raise DomainError("angle undefined when both cross-pol amplitudes are zero")
    return float(_angles(np.array([s1], float), np.array([s2], float))[0])


def _angles(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = s1 / s2
    # s2 == 0: arctan(+-inf) / 2 = +-45, both fold to 45
    a = np.where(s2 == 0, 45.0, np.degrees(np.arctan(ratio)) / 2.0)
    a = np.where(a < 0, a + 90.0, a)
    # float rounding of a tiny negative angle + 90 can land on 90 exactly
    return np.where(a >= 90.0, a - 90.0, a)


def _signed_peak(s: np.ndarray, mask: np.ndarray) -> float:
    flat = np.where(mask, np.abs(s), -1.0)
    return float(s.flat[int(np.argmax(flat))])


def resolve_ambiguity(theta_base: float, sm1: float, sm2: float,
                      contrast: ContrastMode = ContrastMode.TARGET_DENSER):
    """Map theta_base in [0, 90) to [0, 180). Returns (theta_cal, rule, region)."""
    denser = contrast is ContrastMode.TARGET_DENSER
    if theta_base < 45:
        dominant = sm1 if abs(sm1) > abs(sm2) else sm2
        flip = dominant > 0 if denser else dominant < 0
        return (theta_base + 90, "rule1", "A'") if flip else (theta_base, "none", "A")
    flip = sm1 > sm2 if denser else sm1 < sm2
    return (theta_base + 90, "rule2", "B'") if flip else (theta_base, "none", "B")


def estimate_orientation(s1: Bscan, s2: Bscan, th: float = DEFAULT_TH,
                         contrast=ContrastMode.TARGET_DENSER,
                         averaging: str = "circular") -> OrientationEstimate:
    """Estimate the azimuth of an elongated target from aligned HV scans of frames I and II.

    Samples whose max-normalized CCP exceeds ``th`` are kept.  Their
    per-sample angles are averaged (``averaging="circular"`` averages on the
    90-degree circle; ``"arithmetic"`` is the plain mean) and the 90 degree
    ambiguity is resolved from the signed peak amplitudes of the two scans
    over the kept samples.
    """
    check_cross_pair(s1, s2)
    if not 0 < th < 1:
        raise ValidationError(f"threshold must lie in (0, 1), got {th}")
    contrast = ContrastMode.parse(contrast)
    c = ccp(s1, s2).data
    peak = c.max()
    if peak == 0:
        raise NoSignalError("both cross-pol scans are identically zero")
    mask = (c / peak) > th
    n = int(np.count_nonzero(mask))
    if n == 0:
        raise NoSignalError(f"no sample has normalized CCP above {th}")

    a1, a2 = s1.data, s2.data
    angle_map = np.full(a1.shape, np.nan)
    angle_map[mask] = _angles(a1[mask], a2[mask])
    selected = angle_map[mask]  # row-major order, fixed summation order
    if averaging == "circular":
        theta_base, _ = circular_mean(selected, 90.0)
    elif averaging == "arithmetic":
        theta_base = float(np.sum(selected) / n)
    else:
        raise ValidationError(f"unknown averaging {averaging!r}")
    dev = np.abs(selected - theta_base) % 90.0
    spread = float(np.sqrt(np.mean(np.minimum(dev, 90.0 - dev) ** 2)))

    sm1 = _signed_peak(a1, mask)
    sm2 = _signed_peak(a2, mask)
    theta_cal, rule, region = resolve_ambiguity(theta_base, sm1, sm2, contrast)
    theta_cal = theta_cal % 180.0
    return OrientationEstimate(theta_cal=float(theta_cal), theta_base=float(theta_base),
                               angle_map=angle_map, mask=mask, sm1=sm1, sm2=sm2,
                               n_selected=n, rule=rule, region=region, spread=spread)


def analytic_region(theta_real: float) -> str:
    """Region of the true azimuth: A [0,45), B [45,90), A' [90,135), B' [135,180)."""
    return ("A", "B", "A'", "B'")[int(theta_real // 45) % 4]


def threshold_sweep(s1: Bscan, s2: Bscan, th_values, contrast=ContrastMode.TARGET_DENSER,
                    theta_real: float | None = None, averaging: str = "circular"):
    """Run the estimator at each threshold.

    Returns a list of dicts with keys th, theta_cal, error (None without
    ``theta_real``), n_selected and empty (True when no sample passed th).
    """
    th_values = list(th_values)
    if not th_values:
        raise ValidationError("th_values must be non-empty")
    rows = []
    for th in th_values:
        if not 0 < th < 1:
            raise ValidationError(f"threshold {th} outside (0, 1)")
        try:
            est = estimate_orientation(s1, s2, th, contrast, averaging)
        except NoSignalError:
            rows.append({"th": th, "theta_cal": None, "error": None, "n_selected": 0, "empty": True})
            continue
        err = None if theta_real is None else angle_error(est.theta_cal, theta_real)
        rows.append({"th": th, "theta_cal": est.theta_cal, "error": err,
                     "n_selected": est.n_selected, "empty": False})
    return rows
