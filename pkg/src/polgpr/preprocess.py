"""Background removal (mean subtraction, SVD) and the signal-to-clutter ratio."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Bscan, DimensionError, DomainError, ValidationError


@dataclass(frozen=True)
class TargetWindow:
    """Half-open index box [t_lo, t_hi) x [x_lo, x_hi) around the target reflection."""

    t_lo: int
    t_hi: int
    x_lo: int
    x_hi: int

    def __post_init__(self):
        if not (0 <= self.t_lo < self.t_hi and 0 <= self.x_lo < self.x_hi):
            raise ValidationError(f"malformed window {self}")

    def check(self, shape):
        ns, nx = shape
        if self.t_hi > ns or self.x_hi > nx:
            raise DimensionError(f"window {self} exceeds grid shape {shape}")

    def mask(self, shape) -> np.ndarray:
        self.check(shape)
        m = np.zeros(shape, dtype=bool)
        m[self.t_lo:self.t_hi, self.x_lo:self.x_hi] = True
        return m

    def to_dict(self):
        return {"t_lo": self.t_lo, "t_hi": self.t_hi, "x_lo": self.x_lo, "x_hi": self.x_hi}


def mean_subtract(b: Bscan, background: Bscan | None = None) -> Bscan:
    """Remove the mean trace.

    With ``background`` (a target-free scan on the same grid) its average
    trace is subtracted; otherwise the scan's own average trace is used.
    """
    if background is not None:
        if background.grid != b.grid:
            raise DimensionError("background scan grid does not match")
        ref = background.data.mean(axis=1, keepdims=True)
    else:
        ref = b.data.mean(axis=1, keepdims=True)
    return b.with_data(b.data - ref)


def svd_remove_largest(b: Bscan, k: int = 1) -> Bscan:
    """Zero the ``k`` largest singular values and rebuild the matrix."""
    ns, nx = b.data.shape
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k < min(ns, nx):
        raise DomainError(f"k must satisfy 1 <= k < {min(ns, nx)}, got {k!r}")
    u, s, vt = np.linalg.svd(b.data, full_matrices=False)
    s = s.copy()
    s[:k] = 0.0
    return b.with_data((u * s) @ vt)


def scr(b: Bscan, window: TargetWindow) -> float:
    """Max |amplitude| inside ``window`` over max |amplitude| outside it.

    Returns ``inf`` when the region outside the window is identically zero.
    """
    inside = window.mask(b.data.shape)
    if inside.all():
        raise ValidationError("window covers the whole grid; no clutter region")
    a = np.abs(b.data)
    clutter = a[~inside].max()
    signal = a[inside].max()
    if clutter == 0:
        return float("inf")
    return float(signal / clutter)


def preprocess(b: Bscan, method: str = "mean", background: Bscan | None = None,
               k: int = 1) -> Bscan:
    if method == "mean":
        return mean_subtract(b, background)
    if method == "svd":
        return svd_remove_largest(b, k)
    if method == "none":
        return b
    raise ValidationError(f"unknown preprocessing method {method!r}")
