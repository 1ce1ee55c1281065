"""Euclidean single-vortex action and its saddle point.

A vortex crossing the wire at constant Euclidean speed v (in units of c1)
costs

    S(v) = A sqrt(1 + v^2) / v,     A = M l_x / c1,

and the dilute-gas weight adds ln v. Core fermions add a term that grows
with the traversal time, giving the effective action

    S_eff(v) = A + A / (2 v^2) + C l_x^3 k_F^3 omega0(0) d / (16 v) + ln v.

All routines are pure functions of their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

XTOL = 1e-10


class ActionTerms(NamedTuple):
    action: float
    log_term: float

    @property
    def total(self) -> float:
        return self.action + self.log_term


def action_constant_velocity(m_freq, l_x, v_e, c1=1.0) -> ActionTerms:
    """Reduced action (M l_x / c1) sqrt(1 + v^2) / v and the ln v term apart."""
    if not (v_e > 0 and m_freq > 0):
        raise ValueError("v_e and m_freq must be positive")
    a = m_freq * l_x / c1
    return ActionTerms(a * math.sqrt(1.0 + v_e * v_e) / v_e, math.log(v_e))


@dataclass(frozen=True)
class InstantonResult:
    v_e_star: float
    tau1: float
    s_e: float
    branch: str
    log_term: float
    tau0: float

    @property
    def exponent(self) -> float:
        """s_e + ln v_E*, the minimised value including the entropy term."""
        return self.s_e + self.log_term

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["exponent"] = self.exponent
        return d


def _bracket_root(fn, lo, hi):
    while fn(hi) < 0:
        hi *= 4.0
        if hi > 1e300:
            raise RuntimeError("failed to bracket the saddle")
    while fn(lo) > 0:
        lo /= 4.0
        if lo < 1e-300:
            raise RuntimeError("failed to bracket the saddle")
    return optimize.brentq(fn, lo, hi, xtol=1e-300, rtol=XTOL, maxiter=500)


def saddle(m_freq, l_x, c1=1.0) -> InstantonResult:
    """Minimise S(v) + ln v over v.

    Stationarity reads v sqrt(1 + v^2) = A. The reported ``s_e`` is S at the
    saddle; the ln v weight is kept separately in ``log_term``.
    """
    a = m_freq * l_x / c1
    if not a > 1:
        raise ValueError("saddle requires M l_x / c1 > 1")
    v = _bracket_root(lambda v: v * math.sqrt(1.0 + v * v) - a, 1.0, a)
    s = action_constant_velocity(m_freq, l_x, v, c1)
    return InstantonResult(v, l_x / (v * c1), s.action, "kinetic", s.log_term, 1.0 / m_freq)


class EffectiveAction(NamedTuple):
    leading: float
    kinetic: float
    fermion: float
    log_term: float

    @property
    def total(self) -> float:
        return self.leading + self.kinetic + self.fermion + self.log_term


def fermion_coefficient(l_x, k_f, omega0_0, d, c_coeff=1.0, c1=1.0) -> float:
    """B in S_eff = A + A/2v^2 + B/v + ln v."""
    return c_coeff * l_x**3 * k_f**3 * omega0_0 * d / (16.0 * c1)


def effective_action(m_freq, l_x, v_e, k_f=0.0, omega0_0=0.0, d=0.0, c_coeff=1.0,
                     c1=1.0) -> EffectiveAction:
    if not v_e > 0:
        raise ValueError("v_e must be positive")
    a = m_freq * l_x / c1
    b = fermion_coefficient(l_x, k_f, omega0_0, d, c_coeff, c1)
    return EffectiveAction(a, a / (2.0 * v_e * v_e), b / v_e, math.log(v_e))


def effective_action_derivative(m_freq, l_x, v_e, k_f=0.0, omega0_0=0.0, d=0.0,
                                c_coeff=1.0, c1=1.0) -> float:
    a = m_freq * l_x / c1
    b = fermion_coefficient(l_x, k_f, omega0_0, d, c_coeff, c1)
    return -a / v_e**3 - b / v_e**2 + 1.0 / v_e


def minimize_effective_action(m_freq, l_x, k_f=0.0, omega0_0=0.0, d=0.0, c_coeff=1.0,
                              c1=1.0) -> InstantonResult:
    """Saddle of S_eff; ``s_e`` excludes ln v as in :func:`saddle`."""
    a = m_freq * l_x / c1
    if not a > 0:
        raise ValueError("M l_x / c1 must be positive")
    b = fermion_coefficient(l_x, k_f, omega0_0, d, c_coeff, c1)
    # v^3 dS/dv = v^2 - b v - a
    v = _bracket_root(lambda v: v * v - b * v - a, 1e-3, max(1.0, a, b))
    terms = effective_action(m_freq, l_x, v, k_f, omega0_0, d, c_coeff, c1)
    branch = "kinetic" if terms.kinetic >= terms.fermion else "fermion"
    return InstantonResult(v, l_x / (v * c1), terms.total - terms.log_term, branch,
                           terms.log_term, 1.0 / m_freq)


class FermionAction(NamedTuple):
    value: float
    estimate: float | None


def longitudinal_fermion_action(l_x, k_f, omega0_0, tau, d, gap=None, eps_f=None) -> FermionAction:
    """(d/16) l_x^2 k_F^3 omega0(0) tau and, given gap and eps_f, the
    estimate (k_F l_x)^2 (gap/eps_f)^2 / 64."""
    value = d / 16.0 * l_x**2 * k_f**3 * omega0_0 * tau
    est = None
    if gap is not None and eps_f is not None:
        est = (k_f * l_x) ** 2 * (gap / eps_f) ** 2 / 64.0
    return FermionAction(value, est)


class TransversePhase(NamedTuple):
    real: float
    imag: float
    correction_scale: float


def transverse_phase(l_x, y, k_f, d, omega0_0, tau1) -> TransversePhase:
    """Leading imaginary action (k_F^3 d / 3 pi) l_x y and its relative O((omega0 tau1)^2) scale."""
    return TransversePhase(0.0, k_f**3 * d / (3.0 * math.pi) * l_x * y, (omega0_0 * tau1) ** 2)


class MagnusBalance(NamedTuple):
    k_f: float
    shift: float


def magnus_compensating_kf(k_f_outside, magnus_coefficient, d) -> MagnusBalance:
    """k_F for which the spectral-flow force k_F^3 d / 3 pi equals the Magnus coefficient."""
    if not magnus_coefficient > 0:
        raise ValueError("Magnus coefficient must be positive")
    k = (3.0 * math.pi * magnus_coefficient / d) ** (1.0 / 3.0)
    return MagnusBalance(k, k / k_f_outside - 1.0)


def path_averaged_action(m_of_x, l_x, c1=1.0, x=None) -> float:
    """(1/c1) int_0^l_x M(x) dx.

    Without ``x`` the samples are taken as uniform on the periodic interval
    [0, l_x) and summed with the rectangle rule, which is spectrally
    accurate for smooth periodic profiles. With ``x`` (covering [0, l_x])
    the composite trapezoid is used.
    """
    m = np.asarray(m_of_x, dtype=float)
    if np.any(m < 0):
        raise ValueError("M(x) samples must be non-negative")
    if x is None:
        return float(np.sum(m) * l_x / m.size / c1)
    return float(integrate.trapezoid(m, np.asarray(x, dtype=float)) / c1)
