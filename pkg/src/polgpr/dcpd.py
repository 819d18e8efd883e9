"""Dual-cross-polarized detection: the rotation-invariant combination of two HV scans."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlignmentError, Bscan, ValidationError


@dataclass(frozen=True)
class Detection:
    trace_index: int | None
    sample_index: int | None
    ccp_peak: float
    detected: bool
    noise_floor: float = 0.0

    def to_dict(self):
        return {"detected": self.detected, "trace_index": self.trace_index,
                "sample_index": self.sample_index, "ccp_peak": self.ccp_peak,
                "noise_floor": self.noise_floor}


def check_cross_pair(b1: Bscan, b2: Bscan):
    if b1.channel != "HV" or b2.channel != "HV":
        raise AlignmentError(f"expected two HV scans, got {b1.channel} and {b2.channel}")
    if b1.frame != "I" or b2.frame != "II":
        raise AlignmentError(f"expected frames I and II, got {b1.frame} and {b2.frame}")
    if b1.grid != b2.grid:
        raise AlignmentError("frame I and frame II scans are on different grids")


def shift_traces(b: Bscan, shift: int) -> Bscan:
    """Shift traces by an integer count (positive moves data to higher indices), zero-filled."""
    if shift == 0:
        return b
    out = np.zeros_like(b.data)
    if abs(shift) >= b.grid.n_traces:
        raise ValidationError("trace shift exceeds the number of traces")
    if shift > 0:
        out[:, shift:] = b.data[:, :-shift]
    else:
        out[:, :shift] = b.data[:, -shift:]
    return b.with_data(out)


def ccp(b1: Bscan, b2: Bscan) -> Bscan:
    """Combined cross-polarized value sqrt(S_I,HV^2 + S_II,HV^2), sample by sample."""
    check_cross_pair(b1, b2)
    return Bscan(b1.grid, "CCP", "I", np.hypot(b1.data, b2.data))


def noise_floor(data: np.ndarray) -> float:
    """Median of the per-trace maxima after discarding the top decile of them."""
    per_trace = np.sort(np.abs(data).max(axis=0))
    n_keep = max(1, int(np.floor(0.9 * per_trace.size)))
    return float(np.median(per_trace[:n_keep]))


def detect(ccp_scan: Bscan, detect_threshold: float = 0.5) -> Detection:
    """Locate the CCP peak and decide whether it stands out from the noise floor.

    The scene counts as a detection when the robust noise floor is below
    ``detect_threshold`` times the global maximum.  Ties in the peak go to the
    smallest trace index, then the smallest sample index.
    """
    if not 0 < detect_threshold < 1:
        raise ValidationError("detect_threshold must lie in (0, 1)")
    data = ccp_scan.data
    if np.any(data < 0):
        raise ValidationError("CCP scan must be non-negative")
    peak = float(data.max())
    if peak == 0:
        return Detection(None, None, 0.0, False)
    floor = noise_floor(data)
    # trace-major flattening puts the smallest trace index first on ties
    flat = int(np.argmax(data.T))
    trace, sample = divmod(flat, data.shape[0])
    return Detection(trace, sample, peak, floor < detect_threshold * peak, floor)
