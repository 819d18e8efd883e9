"""Alford-rotation orientation baseline on a single frame's full scattering triple."""
from __future__ import annotations

import math

import numpy as np

from .core import (
    NoSignalError, OrientationEstimate, PolarimetricScan, ValidationError,
    angle_error, circular_mean,
)

DEFAULT_TRACE_THRESHOLD = 0.5


def alford_angles(hh, hv, vv) -> np.ndarray:
    """Per-sample rotation angle 0.5*atan2(2 HV, HH - VV) folded into [0, 90)."""
    a = 0.5 * np.degrees(np.arctan2(2.0 * np.asarray(hv, float),
                                    np.asarray(hh, float) - np.asarray(vv, float)))
    a = np.mod(a, 90.0)
    return np.where(a >= 90.0, a - 90.0, a)


def alford_estimate(scan: PolarimetricScan, trace_threshold: float = DEFAULT_TRACE_THRESHOLD,
                    window=None, averaging: str = "circular") -> OrientationEstimate:
    """Alford-style azimuth estimate in [0, 90); the 90 degree ambiguity is left unresolved.

    Samples are selected where |HH + VV| normalized by its maximum exceeds
    ``trace_threshold``, optionally restricted to ``window``.
    """
    if not 0 < trace_threshold < 1:
        raise ValidationError("trace_threshold must lie in (0, 1)")
    hh, hv, vv = scan.hh.data, scan.hv.data, scan.vv.data
    trace = np.abs(hh + vv)
    peak = trace.max()
    if peak == 0:
        raise NoSignalError("HH + VV is identically zero")
    mask = (trace / peak) > trace_threshold
    if window is not None:
        mask &= window.mask(trace.shape)
    n = int(np.count_nonzero(mask))
    if n == 0:
        raise NoSignalError("no sample passes the trace threshold")
    angle_map = np.full(trace.shape, np.nan)
    angle_map[mask] = alford_angles(hh[mask], hv[mask], vv[mask])
    selected = angle_map[mask]
    if averaging == "circular":
        theta, _ = circular_mean(selected, 90.0)
    elif averaging == "arithmetic":
        theta = float(np.sum(selected) / n)
    else:
        raise ValidationError(f"unknown averaging {averaging!r}")
    dev = np.abs(selected - theta) % 90.0
    spread = float(np.sqrt(np.mean(np.minimum(dev, 90.0 - dev) ** 2)))
    return OrientationEstimate(theta_cal=float(theta), theta_base=float(theta),
                               angle_map=angle_map, mask=mask, n_selected=n,
                               rule="none", region=None, spread=spread)


def alford_error(theta_cal: float, theta_real: float) -> float:
    """Alford error scored modulo 90 degrees."""
    return angle_error(theta_cal, theta_real, period=90.0)


def summarize(errors) -> dict:
    errs = [e for e in errors if e is not None and math.isfinite(e)]
    if not errs:
        return {"mean": None, "max": None, "n": 0}
    return {"mean": float(np.mean(errs)), "max": float(np.max(errs)), "n": len(errs)}
