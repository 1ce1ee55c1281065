"""Closed-form predictions for slowly driven modes.

These routines never call the mode integrator; they serve as independent
references for it. Contents: the adiabaticity margin |d omega/dt| / omega^2,
WKB mode functions, the instantaneous-vacuum (linear-response) current,
the lattice sum

    S(b) = sum_n (pi^2 n^2 + b^2)^(-3/2)
         = (2 / pi b^2) (1 + int_b^inf w dw / (sqrt(w^2 - b^2) sinh^2 w)),

its exponentially small finite-size correction, and the transported
vortex number N = -(1/pi) int E~ M exp(-M l_x / c1) dt.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

from .params import SimulationParams
from .pulse import PulseProfile

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-10
B_PRIME_WARN = 2.0


# -- adiabaticity ----------------------------------------------------------

def _omega_dot_ratio(kx, t, pulse, params):
    """|omega'|/omega^2 on (k_x, k_y=0); k_y only raises omega."""
    c1sq = params.c1**2
    e = pulse.e_tilde(t)
    ed = pulse.e_dot(t)
    m = pulse.m(t)
    md = pulse.m_dot(t)
    q = kx[:, None] - e[None, :]
    w2 = c1sq * q**2 + m[None, :] ** 2
    num = np.abs(-c1sq * q * ed[None, :] + (m * md)[None, :])
    return num / w2**1.5


def adiabaticity_margin(pulse: PulseProfile, params: SimulationParams, n_t: int = 4001,
                        return_argmax: bool = False):
    """max over grid and time of |omega_k'| / omega_k^2.

    The numerator does not depend on k_y, so the maximum over k_y sits at
    k_y = 0 and only the k_x column is scanned.
    """
    if pulse.is_null:
        return (0.0, (0.0, 0.0)) if return_argmax else 0.0
    if params.t_start is None or params.t_end is None:
        params = params.with_window(pulse)
    t = np.linspace(params.t_start, params.t_end, n_t)
    kx = params.kx_values()
    r = _omega_dot_ratio(kx, t, pulse, params)
    i, j = np.unravel_index(int(np.argmax(r)), r.shape)
    if return_argmax:
        return float(r[i, j]), (float(kx[i]), float(t[j]))
    return float(r[i, j])


# -- WKB -------------------------------------------------------------------

def _omega(kx, ky, t, pulse, params):
    c1sq = params.c1**2
    return math.sqrt(c1sq * ky**2 + c1sq * (kx - float(pulse.e_tilde(t))) ** 2 + float(pulse.m(t)) ** 2)


def wkb_phase(kx, ky, pulse, params, t, t_i=None) -> float:
    t_i = params.t_start if t_i is None else t_i
    if t == t_i:
        return 0.0
    # split at the pulse centre so quad sees the structure
    pts = [x for x in (pulse.t_center, pulse.t_center + pulse.e_offset) if t_i < x < t]
    val, _ = integrate.quad(lambda s: _omega(kx, ky, s, pulse, params), t_i, t,
                            points=pts or None, epsabs=0.0, epsrel=1e-13, limit=2000)
    return val


def wkb_mode(kx, ky, pulse: PulseProfile, t, params: SimulationParams, t_i=None):
    """Return (f, f_dot) of the first-order WKB mode at time ``t``."""
    w = _omega(kx, ky, t, pulse, params)
    ph = wkb_phase(kx, ky, pulse, params, t, t_i)
    f = np.exp(-1j * ph) / math.sqrt(2.0 * w * params.volume)
    return complex(f), complex(-1j * w * f)


# -- instantaneous-vacuum current ------------------------------------------

class LinearResponse(NamedTuple):
    full: float
    first_order: float


def current_linear_response(pulse_or_e, params: SimulationParams, t=0.0, m=None) -> LinearResponse:
    """Current carried by the instantaneous vacuum on the grid.

    ``full`` is (c1^2/V) sum_k (k_x - E~)/omega_k; ``first_order`` is its
    expansion to linear order in E~. ``pulse_or_e`` is a pulse (evaluated
    at ``t``) or a bare value of E~, in which case ``m`` must be given.
    """
    if isinstance(pulse_or_e, PulseProfile):
        e = float(pulse_or_e.e_tilde(t))
        m = float(pulse_or_e.m(t))
    else:
        e = float(pulse_or_e)
        if m is None:
            raise ValueError("m is required when E~ is given directly")
    c1sq = params.c1**2
    kx = params.kx_values()
    ky = params.ky_values()
    msq = c1sq * ky**2 + m**2
    q = kx[None, :] - e
    full = math.fsum((q / np.sqrt(c1sq * q**2 + msq[:, None])).ravel().tolist())
    first = math.fsum((msq[:, None] * (c1sq * kx[None, :] ** 2 + msq[:, None]) ** -1.5).ravel().tolist())
    v = params.volume
    return LinearResponse(c1sq * full / v, -c1sq * e * first / v)


def lattice_part(e_tilde, m, params: SimulationParams, shift: int = 0) -> float:
    """Grid sum minus k_x integral of (k_x - E~)/omega for one k_y channel.

    The sum runs over n in [-n_kx + shift, n_kx + shift]; the integral runs
    over the same window widened by half a spacing on each side. The
    difference is the part of the current sensitive to the discreteness of
    k_x.
    """
    c1sq = params.c1**2
    dk = 2.0 * math.pi / params.l_x
    n = np.arange(-params.n_kx + shift, params.n_kx + shift + 1)
    q = n * dk - e_tilde
    s = math.fsum((q / np.sqrt(c1sq * q**2 + m**2)).tolist())
    q_lo = (n[0] - 0.5) * dk - e_tilde
    q_hi = (n[-1] + 0.5) * dk - e_tilde
    cont = (math.sqrt(c1sq * q_hi**2 + m**2) - math.sqrt(c1sq * q_lo**2 + m**2)) / (c1sq * dk)
    return s - cont


# -- lattice sum -------------------------------------------------------------

def _inv_sinh_sq(x):
    ex = np.exp(-2.0 * x)
    return 4.0 * ex / (1.0 - ex) ** 2


def lattice_sum_integral(b: float) -> float:
    """int_b^inf w dw / (sqrt(w^2-b^2) sinh^2 w) via w = b cosh u."""
    if not b > 0:
        raise ValueError("b must be positive")
    # integrand is ~ exp(-2 b cosh u); stop where it is 1e-30 of its start
    u_max = math.acosh(1.0 + 35.0 / b)

    def g(u):
        w = b * math.cosh(u)
        return w * float(_inv_sinh_sq(w))

    val, _ = integrate.quad(g, 0.0, u_max, epsabs=0.0, epsrel=1e-13, limit=500)
    return val


def lattice_sum(b: float) -> float:
    """sum_n (pi^2 n^2 + b^2)^(-3/2) from its integral representation."""
    if not b > 0:
        raise ValueError("b must be positive")
    return 2.0 / (math.pi * b * b) * (1.0 + lattice_sum_integral(b))


def lattice_sum_direct(b: float, n_terms: int = 4000) -> float:
    """Brute-force partial sum plus an Euler-Maclaurin tail."""
    if not b > 0:
        raise ValueError("b must be positive")
    n = np.arange(1, n_terms + 1, dtype=float)
    g = (math.pi**2 * n**2 + b * b) ** -1.5
    head = b**-3 + 2.0 * math.fsum(g.tolist())
    big_n = float(n_terms)
    r = math.sqrt(math.pi**2 * big_n**2 + b * b)
    integral = (1.0 - math.pi * big_n / r) / (math.pi * b * b)
    g_n = r**-3
    g1 = -3.0 * math.pi**2 * big_n * r**-5
    g3 = (-45.0 * math.pi**4 * big_n * r**-7 + 105.0 * math.pi**6 * big_n**3 * r**-9)
    tail = integral - 0.5 * g_n - g1 / 12.0 + g3 / 720.0
    return head + 2.0 * tail


def lattice_sum_correction(b: float) -> float:
    """Leading relative finite-size correction 2 sqrt(pi b) exp(-2b)."""
    return 2.0 * math.sqrt(math.pi * b) * math.exp(-2.0 * b)


def lattice_sum_correction_bessel(b: float, n_images: int = 1) -> float:
    """Image-sum form 4 b sum_j j K_1(2 j b) of the same correction."""
    return 4.0 * b * sum(j * special.k1(2.0 * j * b) for j in range(1, n_images + 1))


# -- transported number --------------------------------------------------------

def _window(pulse, params):
    if params.t_start is not None and params.t_end is not None:
        return params.t_start, params.t_end
    return pulse.support(6.0)


def predicted_transport(pulse: PulseProfile, params: SimulationParams, warn: bool = True) -> float:
    """-(1/pi) int E~ M exp(-M l_x / c1) dt."""
    if warn:
        b_min = _b_prime_min(pulse, params)
        if b_min < B_PRIME_WARN:
            warnings.warn(f"b' = M l_x / 2 c1 falls to {b_min:.3g}; finite-size expansion unreliable",
                          RuntimeWarning, stacklevel=2)
    if pulse.is_null:
        return 0.0
    lo, hi = _window(pulse, params)
    lx_c = params.l_x / params.c1

    def g(t):
        m = float(pulse.m(t))
        return float(pulse.e_tilde(t)) * m * math.exp(-m * lx_c)

    pts = sorted({x for x in (pulse.t_center, pulse.t_center + pulse.e_offset) if lo < x < hi})
    edges = [lo, *pts, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(g, a, b, epsabs=QUAD_EPSABS * pulse.t_p, epsrel=QUAD_EPSREL, limit=500)
        total += val
    return -total / math.pi


def transport_log_slope(pulse_factory, params_list, rel_step=1e-4) -> np.ndarray:
    """d ln|N_pred| / d l_x at each point of a sweep (central differences)."""
    from dataclasses import replace

    out = []
    for p in params_list:
        h = rel_step * p.l_x
        up = predicted_transport(pulse_factory(p.l_x + h), replace(p, l_x=p.l_x + h), warn=False)
        dn = predicted_transport(pulse_factory(p.l_x - h), replace(p, l_x=p.l_x - h), warn=False)
        out.append((math.log(abs(up)) - math.log(abs(dn))) / (2 * h))
    return np.array(out)


def _b_prime_min(pulse, params):
    lo, hi = _window(pulse, params)
    t = np.linspace(lo, hi, 4001)
    m_min = min(float(np.min(pulse.m(t))), pulse.m_min if pulse.shape != "custom-sampled" else np.inf)
    return m_min * params.l_x / (2.0 * params.c1)


# -- operating point ---------------------------------------------------------

@dataclass(frozen=True)
class AdiabaticPrediction:
    n_transported_pred: float
    margin: float
    b_min: float
    touch: bool
    tp_ratio: float
    lx_over_lambda: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def operating_conditions(pulse: PulseProfile, params: SimulationParams) -> AdiabaticPrediction:
    b_min = _b_prime_min(pulse, params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        n_pred = predicted_transport(pulse, params, warn=False)
    return AdiabaticPrediction(
        n_transported_pred=n_pred,
        margin=adiabaticity_margin(pulse, params),
        b_min=b_min,
        touch=bool(b_min <= 0.5),
        tp_ratio=(pulse.t_p / (2.0 * math.pi)) / (params.l_x / params.c1),
        lx_over_lambda=params.l_x / params.compton_length,
    )


# -- first-order particle production ---------------------------------------------

def born_occupation(kx, ky, pulse: PulseProfile, params: SimulationParams,
                    samples_per_period: int = 64) -> np.ndarray:
    """|int (omega'/2 omega) exp(2i int omega) dt|^2 for each (kx, ky).

    Lowest-order Bogoliubov coefficient of a slowly driven oscillator; used
    to predict residual excitation before running the integrator.
    """
    kx = np.atleast_1d(np.asarray(kx, dtype=float))
    ky = np.atleast_1d(np.asarray(ky, dtype=float))
    if params.t_start is None or params.t_end is None:
        params = params.with_window(pulse)
    c1sq = params.c1**2
    w_top = math.sqrt(c1sq * (np.max(ky**2) + (np.max(np.abs(kx)) + abs(pulse.e_max)) ** 2)
                      + max(pulse.m0, pulse.m_min) ** 2)
    dt = 2.0 * math.pi / (samples_per_period * w_top)
    n = int(math.ceil((params.t_end - params.t_start) / dt))
    t = np.linspace(params.t_start, params.t_end, n + 1)
    e, ed = pulse.e_tilde(t), pulse.e_dot(t)
    m, md = pulse.m(t), pulse.m_dot(t)
    out = np.empty(kx.shape)
    for i in range(kx.size):
        q = kx[i] - e
        w = np.sqrt(c1sq * ky[i] ** 2 + c1sq * q**2 + m**2)
        wd = (-c1sq * q * ed + m * md) / w
        phase = integrate.cumulative_simpson(w, x=t, initial=0.0)
        amp = integrate.trapezoid(wd / (2.0 * w) * np.exp(2j * phase), t)
        out[i] = abs(amp) ** 2
    return out
