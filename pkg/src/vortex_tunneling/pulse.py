"""Current-pulse drives: the reduced field E~(t) and the pair frequency M(t).

Two analytic families share one Gaussian dip of M,

    M(t) = m0 - (m0 - m_min) exp(-u^2),     u = (t - t_center) / t_p,

and differ in E~: ``bipolar-derivative`` is the derivative of a Gaussian,
normalised to peak |E~| = e_max, so it carries no net time integral;
``unipolar-gaussian`` is e_max exp(-s^2). For both, s = (t - t_center -
e_offset) / t_p. A ``custom-sampled`` profile interpolates user samples
with clamped cubic splines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

SHAPES = ("bipolar-derivative", "unipolar-gaussian", "custom-sampled")
SHAPE_CODES = {name: i for i, name in enumerate(SHAPES)}

_BIPOLAR_NORM = math.sqrt(2.0 * math.e)
_EDGE_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class PulseProfile:
    shape: str
    e_max: float
    m_min: float
    t_p: float
    t_center: float
    m0: float = 1.0
    e_offset: float = 0.0
    sample_t: np.ndarray | None = None
    sample_e: np.ndarray | None = None
    sample_m: np.ndarray | None = None

    def __post_init__(self):
        if self.shape == "custom-sampled":
            t = np.asarray(self.sample_t, dtype=float)
            object.__setattr__(self, "_e_spline", CubicSpline(t, self.sample_e, bc_type="clamped"))
            object.__setattr__(self, "_m_spline", CubicSpline(t, self.sample_m, bc_type="clamped"))

    # -- values -----------------------------------------------------------
    def e_tilde(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == "custom-sampled":
            return self._e_spline(self._clip(t))
        s = (t - self.t_center - self.e_offset) / self.t_p
        if self.shape == "bipolar-derivative":
            return -self.e_max * _BIPOLAR_NORM * s * np.exp(-s * s)
        return self.e_max * np.exp(-s * s)

    def e_dot(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == "custom-sampled":
            return np.where(self._inside(t), self._e_spline(self._clip(t), 1), 0.0)
        s = (t - self.t_center - self.e_offset) / self.t_p
        if self.shape == "bipolar-derivative":
            return -self.e_max * _BIPOLAR_NORM * (1.0 - 2.0 * s * s) * np.exp(-s * s) / self.t_p
        return -2.0 * s * self.e_max * np.exp(-s * s) / self.t_p

    def m(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == "custom-sampled":
            return self._m_spline(self._clip(t))
        u = (t - self.t_center) / self.t_p
        return self.m0 - (self.m0 - self.m_min) * np.exp(-u * u)

    def m_dot(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape == "custom-sampled":
            return np.where(self._inside(t), self._m_spline(self._clip(t), 1), 0.0)
        u = (t - self.t_center) / self.t_p
        return 2.0 * u * (self.m0 - self.m_min) * np.exp(-u * u) / self.t_p

    def _clip(self, t):
        return np.clip(t, self.sample_t[0], self.sample_t[-1])

    def _inside(self, t):
        return (t >= self.sample_t[0]) & (t <= self.sample_t[-1])

    # -- bookkeeping ------------------------------------------------------
    @property
    def is_null(self) -> bool:
        if self.shape == "custom-sampled":
            return bool(np.all(self.sample_e == 0) and np.all(self.sample_m == self.m0))
        return self.e_max == 0 and self.m_min == self.m0

    def support(self, half_width: float = 4.5):
        """Time interval outside which the drive is at rest to ~exp(-half_width^2)."""
        if self.shape == "custom-sampled":
            return float(self.sample_t[0]), float(self.sample_t[-1])
        lo = min(self.t_center, self.t_center + self.e_offset)
        hi = max(self.t_center, self.t_center + self.e_offset)
        return lo - half_width * self.t_p, hi + half_width * self.t_p

    def at_rest(self, t, rtol: float = _EDGE_RTOL) -> bool:
        """True when E~(t) ~ 0 and M(t) ~ m0 within ``rtol`` of the drive scales."""
        e_scale = max(abs(self.e_max), 1e-300)
        if self.shape == "custom-sampled":
            e_scale = max(float(np.max(np.abs(self.sample_e))), 1e-300)
        return (
            abs(float(self.e_tilde(t))) <= rtol * e_scale
            and abs(float(self.m(t)) - self.m0) <= rtol * self.m0
        )

    def kernel_args(self):
        """Flat arrays consumed by the compiled integrator."""
        par = np.array(
            [self.m0, self.m_min, self.e_max, self.t_p, self.t_center, self.e_offset],
            dtype=np.float64,
        )
        if self.shape == "custom-sampled":
            knots = np.ascontiguousarray(self._e_spline.x, dtype=np.float64)
            ce = np.ascontiguousarray(self._e_spline.c, dtype=np.float64)
            cm = np.ascontiguousarray(self._m_spline.c, dtype=np.float64)
        else:
            knots = np.zeros(1)
            ce = np.zeros((4, 0))
            cm = np.zeros((4, 0))
        return SHAPE_CODES[self.shape], par, knots, ce, cm

    def to_dict(self) -> dict:
        out = {
            "shape": self.shape,
            "e_max": self.e_max,
            "m_min": self.m_min,
            "t_p": self.t_p,
            "t_center": self.t_center,
            "m0": self.m0,
            "e_offset": self.e_offset,
        }
        if self.shape == "custom-sampled":
            out["samples"] = {
                "t": [float(x) for x in self.sample_t],
                "e_tilde": [float(x) for x in self.sample_e],
                "m": [float(x) for x in self.sample_m],
            }
        return out


def make_pulse(
    shape,
    e_max,
    m_min,
    t_p,
    t_center=0.0,
    m0=1.0,
    e_offset=0.0,
    samples=None,
) -> PulseProfile:
    """Validate inputs and build a :class:`PulseProfile`.

    For ``custom-sampled``, ``samples`` is a mapping with equal-length
    arrays ``t``, ``e_tilde`` and ``m``; the drive must start and end at
    rest (E~ = 0, M = m0) and M must stay at or above ``m_min``.
    """
    if shape not in SHAPES:
        raise ValueError(f"unknown pulse shape {shape!r}; expected one of {SHAPES}")
    if not m_min > 0:
        raise ValueError("m_min must be positive")
    if m_min > m0:
        raise ValueError("m_min cannot exceed m0")
    if not t_p > 0:
        raise ValueError("t_p must be positive")
    if shape != "custom-sampled":
        return PulseProfile(shape, float(e_max), float(m_min), float(t_p), float(t_center),
                            float(m0), float(e_offset))

    if samples is None:
        raise ValueError("custom-sampled pulse needs samples")
    t = np.asarray(samples["t"], dtype=float)
    e = np.asarray(samples["e_tilde"], dtype=float)
    m = np.asarray(samples["m"], dtype=float)
    if not (t.ndim == 1 and t.shape == e.shape == m.shape and t.size >= 4):
        raise ValueError("samples t, e_tilde, m must be 1-d arrays of equal length >= 4")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    e_scale = max(float(np.max(np.abs(e))), 1e-300)
    if abs(e[0]) > _EDGE_RTOL * e_scale or abs(e[-1]) > _EDGE_RTOL * e_scale:
        raise ValueError("custom E~ must vanish at both ends")
    if abs(m[0] - m0) > _EDGE_RTOL * m0 or abs(m[-1] - m0) > _EDGE_RTOL * m0:
        raise ValueError("custom M must equal m0 at both ends")
    pulse = PulseProfile(shape, e_scale if e_max is None else float(e_max), float(m_min),
                         float(t_p), float(t_center), float(m0), float(e_offset), t, e, m)
    dense = np.linspace(t[0], t[-1], 8 * t.size)
    if np.min(pulse.m(dense)) < m_min * (1 - 1e-12):
        raise ValueError("custom M dips below m_min")
    return pulse


def evaluate_pulse(p: PulseProfile, t):
    """Return ``(e_tilde, m, m_dot)`` at time(s) ``t``."""
    return p.e_tilde(t), p.m(t), p.m_dot(t)


def null_pulse(m0=1.0, t_p=1.0, t_center=0.0) -> PulseProfile:
    return make_pulse("bipolar-derivative", 0.0, m0, t_p, t_center, m0=m0)
