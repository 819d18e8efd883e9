"""Synthetic dual-frame polarimetric B-scans of a thin elongated scatterer.

The target response in every channel is the product of a scalar scattering
amplitude (the rotated thin-wire scattering matrix of the chosen antenna
frame) and a shared space-time pattern: a Ricker pulse delayed along the
diffraction hyperbola and scaled by 1/r spreading.  Clutter terms model the
antenna direct coupling, the ground-surface return and white receiver noise.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .core import (
    ConfigurationError, FRAMES, PolarimetricScan, Bscan, SurveyGrid,
    TargetModel, ValidationError,
)

C_M_PER_NS = 0.299792458

# stream tags for the per-trace random generators
_NOISE, _SURFACE, _ORIENT = 0, 1, 2
_CHANNEL_ID = {"HH": 0, "HV": 1, "VV": 2}
_FRAME_ID = {"I": 0, "II": 1}


@dataclass(frozen=True)
class WaveletSpec:
    """Ricker source pulse. ``time_zero`` (ns) is the arrival time of the ground surface."""

    center_frequency: float = 2.0
    kind: str = "ricker"
    time_zero: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.center_frequency) and self.center_frequency > 0):
            raise ValidationError("center_frequency must be positive")
        if self.kind != "ricker":
            raise ValidationError(f"unsupported wavelet kind {self.kind!r}")
        if not math.isfinite(self.time_zero) or self.time_zero < 0:
            raise ValidationError("time_zero must be >= 0")

    @property
    def half_support(self) -> float:
        """Half width (ns) beyond which the pulse is below ~5e-5 of its peak."""
        return 1.0 / self.center_frequency


@dataclass(frozen=True)
class ClutterSpec:
    """Antenna coupling, ground return and noise.

    ``leakage`` is the fraction of the co-pol coupling and surface terms that
    reaches the cross-pol channel (finite port isolation).  ``coupling_lead``
    is how long (ns) before the surface return the direct coupling arrives.
    """

    coupling_amplitude: float = 0.0
    surface_amplitude: float = 0.0
    roughness_std: float = 0.0
    noise_std: float = 0.0
    seed: int = 0
    leakage: float = 0.02
    coupling_lead: float = 0.3

    def __post_init__(self):
        for name in ("coupling_amplitude", "surface_amplitude", "roughness_std",
                     "noise_std", "leakage", "coupling_lead"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise ValidationError(f"{name} must be a finite number >= 0, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")


def scattering_amplitudes(theta: float, frame: str, reflection_sign: int = 1):
    """(S_HH, S_HV, S_VV) of a unit thin wire at azimuth ``theta`` degrees.

    Frame II is frame I rotated by 45 degrees.
    """
    if not math.isfinite(theta):
        raise ValidationError("theta must be finite")
    th = math.radians(theta)
    if frame == "I":
        hh, hv, vv = math.cos(th) ** 2, 0.5 * math.sin(2 * th), math.sin(th) ** 2
    elif frame == "II":
        q = th + math.pi / 4
        hh, hv, vv = math.cos(q) ** 2, 0.5 * math.cos(2 * th), math.sin(q) ** 2
    else:
        raise ValidationError(f"unknown frame {frame!r}")
    return reflection_sign * hh, reflection_sign * hv, reflection_sign * vv


def ricker(t, fc: float):
    """Ricker wavelet with unit peak at t = 0; t in ns, fc in GHz."""
    a = (np.pi * fc * np.asarray(t, dtype=float)) ** 2
    out = (1.0 - 2.0 * a) * np.exp(-a)
    return float(out) if out.ndim == 0 else out


def wave_speed(epsilon_r: float) -> float:
    return C_M_PER_NS / math.sqrt(epsilon_r)


def travel_time(x, target: TargetModel, grid: SurveyGrid):
    """Two-way travel time (ns) from antenna position ``x`` to the target."""
    r = np.hypot(np.asarray(x, dtype=float) - target.x0, target.depth)
    out = 2.0 * r / wave_speed(grid.epsilon_r)
    return float(out) if out.ndim == 0 else out


def _rng(seed, *stream):
    return np.random.default_rng([int(seed), *stream])


def target_pattern(target: TargetModel, grid: SurveyGrid, wavelet: WaveletSpec,
                   attenuation: float = 0.0) -> np.ndarray:
    """Unit space-time response: pulse on the hyperbola times spreading and attenuation.

    ``attenuation`` is an amplitude coefficient in Np/m applied over the two-way path.
    """
    x = grid.positions
    r = np.hypot(x - target.x0, target.depth)
    tt = 2.0 * r / wave_speed(grid.epsilon_r)
    gain = (target.depth / r) * np.exp(-attenuation * 2.0 * r)
    t = grid.times[:, None] - wavelet.time_zero - tt[None, :]
    return ricker(t, wavelet.center_frequency) * gain[None, :]


def check_scene(target: TargetModel, grid: SurveyGrid, wavelet: WaveletSpec):
    extent = (grid.n_traces - 1) * grid.dx
    if not 0 <= target.x0 <= extent:
        raise ConfigurationError(
            f"target x0={target.x0} m lies outside the scanned extent [0, {extent}]")
    apex = wavelet.time_zero + travel_time(target.x0, target, grid)
    window = grid.n_samples * grid.dt
    if apex + wavelet.half_support > window:
        raise ConfigurationError(
            f"apex arrival {apex:.4f} ns plus pulse support exceeds the "
            f"{window:.4f} ns time window")


def synthesize_scan(target: TargetModel, grid: SurveyGrid | None = None,
                    wavelet: WaveletSpec | None = None,
                    clutter: ClutterSpec | None = None, frame: str = "I",
                    attenuation: float = 0.0,
                    theta_jitter: float = 0.0) -> PolarimetricScan:
    """Simulate HH, HV and VV B-scans of one antenna frame.

    ``theta_jitter`` perturbs the target azimuth per trace, uniformly within
    +/- theta_jitter degrees, as a stand-in for a slightly curved target
    (e.g. a root).  The perturbation is shared by both frames.

    Randomness is drawn from generators keyed by (seed, stream, ..., trace),
    so output does not depend on evaluation order.  Surface roughness is a
    property of the ground and is shared by the two frames; receiver noise is
    independent per frame and channel.
    """
    grid = grid or SurveyGrid()
    wavelet = wavelet or WaveletSpec()
    clutter = clutter or ClutterSpec()
    if frame not in FRAMES:
        raise ValidationError(f"unknown frame {frame!r}")
    if not math.isfinite(attenuation) or attenuation < 0:
        raise ValidationError("attenuation must be >= 0")
    if not math.isfinite(theta_jitter) or theta_jitter < 0:
        raise ValidationError("theta_jitter must be >= 0")
    check_scene(target, grid, wavelet)

    fc = wavelet.center_frequency
    t = grid.times
    ns, nx = grid.shape
    pattern = target_pattern(target, grid, wavelet, attenuation)

    if theta_jitter > 0:
        thetas = [target.theta + _rng(clutter.seed, _ORIENT, j).uniform(-theta_jitter, theta_jitter)
                  for j in range(nx)]
        amps = np.array([scattering_amplitudes(th, frame, target.reflection_sign)
                         for th in thetas]).T  # (3, nx)
    else:
        amps = np.repeat(np.array(scattering_amplitudes(
            target.theta, frame, target.reflection_sign))[:, None], nx, axis=1)

    coupling = clutter.coupling_amplitude * ricker(
        t - (wavelet.time_zero - clutter.coupling_lead), fc)

    out = {}
    for ch, k in _CHANNEL_ID.items():
        data = target.amplitude * amps[k][None, :] * pattern
        scale = 1.0 if ch != "HV" else clutter.leakage
        if scale > 0 and (clutter.coupling_amplitude > 0 or clutter.surface_amplitude > 0):
            data = data + scale * coupling[:, None]
            if clutter.surface_amplitude > 0:
                surface = np.empty((ns, nx))
                for j in range(nx):
                    g = _rng(clutter.seed, _SURFACE, k, j)
                    a_j, d_j = g.normal(1.0, clutter.roughness_std), g.normal(0.0, clutter.roughness_std * grid.dt)
                    surface[:, j] = a_j * ricker(t - wavelet.time_zero - d_j, fc)
                data = data + scale * clutter.surface_amplitude * surface
        if clutter.noise_std > 0:
            noise = np.empty((ns, nx))
            for j in range(nx):
                noise[:, j] = _rng(clutter.seed, _NOISE, _FRAME_ID[frame], k, j).standard_normal(ns)
            data = data + clutter.noise_std * noise
        out[ch] = Bscan(grid, ch, frame, data)
    return PolarimetricScan(frame, out["HH"], out["HV"], out["VV"])


def synthesize_pair(target, grid=None, wavelet=None, clutter=None, **kw):
    """Both antenna frames of the same survey line: (frame I, frame II)."""
    return tuple(synthesize_scan(target, grid, wavelet, clutter, frame=f, **kw) for f in FRAMES)


def apex_indices(target: TargetModel, grid: SurveyGrid, wavelet: WaveletSpec):
    """(sample, trace) indices nearest to the hyperbola apex."""
    j = int(round(target.x0 / grid.dx))
    i = int(round((wavelet.time_zero + travel_time(target.x0, target, grid)) / grid.dt))
    return i, j


def ground_truth_window(target: TargetModel, grid: SurveyGrid, wavelet: WaveletSpec,
                        trace_margin: int = 5):
    """Target window: apex time +/- pulse support, apex trace +/- ``trace_margin``."""
    from .preprocess import TargetWindow

    i, j = apex_indices(target, grid, wavelet)
    half = int(math.ceil(wavelet.half_support / grid.dt))
    return TargetWindow(
        t_lo=max(0, i - half), t_hi=min(grid.n_samples, i + half + 1),
        x_lo=max(0, j - trace_margin), x_hi=min(grid.n_traces, j + trace_margin + 1))
