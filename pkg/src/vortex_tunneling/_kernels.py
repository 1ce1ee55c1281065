"""Compiled inner loops for the mode integrator.

A block of modes shares one adaptive step sequence. Each step applies the
sixth-order Magnus propagator built on three Gauss-Legendre nodes; the
fourth-order Magnus truncation from the same nodes supplies the embedded
error estimate. The propagator is the exponential of a traceless 2x2 real
matrix, so det = 1 and the Wronskian is conserved to round-off.

sl(2) elements are carried as triples (a, b, c) <-> [[a, b], [c, -a]].
"""

import math

import numpy as np
from numba import njit

BIPOLAR = 0
UNIPOLAR = 1
CUSTOM = 2

_SQRT2E = math.sqrt(2.0 * math.e)
_R15 = math.sqrt(15.0) / 10.0
_SQ15_3 = math.sqrt(15.0) / 3.0

STATUS_OK = 0
STATUS_UNDERFLOW = 1


@njit(cache=True)
def _spline(knots, coef, t):
    n = knots.size
    if t <= knots[0]:
        i = 0
        dx = 0.0
    elif t >= knots[n - 1]:
        i = n - 2
        dx = knots[n - 1] - knots[n - 2]
    else:
        i = np.searchsorted(knots, t) - 1
        dx = t - knots[i]
    return ((coef[0, i] * dx + coef[1, i]) * dx + coef[2, i]) * dx + coef[3, i]


@njit(cache=True)
def pulse_eval(code, par, knots, ce, cm, t):
    """Return (E~(t), M(t)); ``par`` = [m0, m_min, e_max, t_p, t_center, e_offset]."""
    if code == CUSTOM:
        return _spline(knots, ce, t), _spline(knots, cm, t)
    m0 = par[0]
    tp = par[3]
    u = (t - par[4]) / tp
    m = m0 - (m0 - par[1]) * math.exp(-u * u)
    s = (t - par[4] - par[5]) / tp
    if code == BIPOLAR:
        e = -par[2] * _SQRT2E * s * math.exp(-s * s)
    else:
        e = par[2] * math.exp(-s * s)
    return e, m


@njit(cache=True)
def _expm_sl2(a, b, c):
    d = a * a + b * c
    if d < 0.0:
        th = math.sqrt(-d)
        co = math.cos(th)
        si = math.sin(th) / th
    elif d > 0.0:
        th = math.sqrt(d)
        co = math.cosh(th)
        si = math.sinh(th) / th
    else:
        co = 1.0
        si = 1.0
    return co + si * a, si * b, si * c, co - si * a


@njit(cache=True)
def _magnus6(h, w1, w2, w3):
    """Sixth-order Magnus exponent and its difference from the fourth-order one."""
    q2 = _SQ15_3 * h * (w3 - w1)
    q3 = (10.0 / 3.0) * h * (w3 - 2.0 * w2 + w1)
    # P = -20 a1 - a3 + [a1, a2];  Q = a2 - [a1, 2 a3 + [a1, a2]] / 60
    pa = -h * q2
    pb = -20.0 * h
    pc = 20.0 * h * w2 + q3
    qa = h * q3 / 30.0
    qb = -h * h * q2 / 30.0
    qc = -q2 - h * h * w2 * q2 / 30.0
    ra = pb * qc - qb * pc
    rb = 2.0 * (pa * qb - qa * pb)
    rc = 2.0 * (qa * pc - pa * qc)
    a6 = ra / 240.0
    b6 = h + rb / 240.0
    c6 = -h * w2 - q3 / 12.0 + rc / 240.0
    return a6, b6, c6, a6 - h * q2 / 12.0, rb / 240.0, rc / 240.0


@njit(cache=True)
def _beta_sq(f, fd, w, volume):
    # (V/2w)|f' + i w f|^2: equals the energy-form occupation when the
    # Wronskian is exact, but cannot go negative
    re = fd.real - w * f.imag
    im = fd.imag + w * f.real
    return volume / (2.0 * w) * (re * re + im * im)


@njit(cache=True)
def _observe(kx, kysq, f, fd, e, m, c1sq, volume):
    # consecutive modes are k_x mirror pairs; adding each pair first makes
    # the current vanish exactly when the pair evolves identically
    jsum = 0.0
    nsum = 0.0
    nm = kx.size
    j = 0
    while j < nm:
        jt = 0.0
        for jj in range(j, min(j + 2, nm)):
            a2 = f[jj].real * f[jj].real + f[jj].imag * f[jj].imag
            q = kx[jj] - e
            jt += 2.0 * c1sq * q * a2
            w = math.sqrt(kysq[jj] + c1sq * q * q + m * m)
            nsum += _beta_sq(f[jj], fd[jj], w, volume)
        jsum += jt
        j += 2
    return jsum, nsum


@njit(cache=True)
def evolve_block(kx, ky, f, fd, samples, code, par, knots, ce, cm,
                 c1, volume, wscale, tol, hmax, record):
    """Advance every mode of a block through ``samples``, in place.

    Returns (j_partial, n_partial, drift, n_steps, n_rejected, status).
    ``j_partial``/``n_partial`` hold this block's contribution to
    2 c1^2 sum (k_x - E~)|f|^2 and sum |beta_k|^2 at each sample time when
    ``record`` is set; ``drift`` is the per-mode maximum Wronskian residual
    against i / wscale (wscale = V for normalised modes).
    """
    nm = kx.size
    ns = samples.size
    c1sq = c1 * c1
    jp = np.zeros(ns)
    npart = np.zeros(ns)
    drift = np.zeros(nm)
    fn = np.empty(nm, dtype=np.complex128)
    fdn = np.empty(nm, dtype=np.complex128)
    kysq = np.empty(nm)
    for j in range(nm):
        kysq[j] = c1sq * ky[j] * ky[j]

    t = samples[0]
    e, m = pulse_eval(code, par, knots, ce, cm, t)
    for j in range(nm):
        re = f[j].real * fd[j].imag - f[j].imag * fd[j].real
        drift[j] = abs(-2.0 * re * wscale - 1.0)
    if record:
        jp[0], npart[0] = _observe(kx, kysq, f, fd, e, m, c1sq, volume)

    h = hmax
    n_steps = 0
    n_rej = 0
    si = 1
    while si < ns:
        t_next = samples[si]
        span = t_next - t
        clipped = h >= span
        hh = span if clipped else h
        e1, m1 = pulse_eval(code, par, knots, ce, cm, t + (0.5 - _R15) * hh)
        e2, m2 = pulse_eval(code, par, knots, ce, cm, t + 0.5 * hh)
        e3, m3 = pulse_eval(code, par, knots, ce, cm, t + (0.5 + _R15) * hh)
        m1 *= m1
        m2 *= m2
        m3 *= m3
        err = 0.0
        for j in range(nm):
            k = kx[j]
            w1 = kysq[j] + c1sq * (k - e1) * (k - e1) + m1
            w2 = kysq[j] + c1sq * (k - e2) * (k - e2) + m2
            w3 = kysq[j] + c1sq * (k - e3) * (k - e3) + m3
            a, b, c, da, db, dc = _magnus6(hh, w1, w2, w3)
            om = math.sqrt(w2)
            ej = max(abs(da), abs(db) * om, abs(dc) / om)
            if ej > err:
                err = ej
            p00, p01, p10, p11 = _expm_sl2(a, b, c)
            fn[j] = p00 * f[j] + p01 * fd[j]
            fdn[j] = p10 * f[j] + p11 * fd[j]
        if err > tol:
            n_rej += 1
            h = hh * max(0.2, 0.9 * (tol / err) ** 0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                return jp, npart, drift, n_steps, n_rej, STATUS_UNDERFLOW
            continue
        for j in range(nm):
            f[j] = fn[j]
            fd[j] = fdn[j]
        n_steps += 1
        if not clipped:
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * (tol / err) ** 0.2)
            h = min(hmax, hh * grow)
            t = t + hh
            continue
        t = t_next
        e, m = pulse_eval(code, par, knots, ce, cm, t)
        for j in range(nm):
            re = f[j].real * fd[j].imag - f[j].imag * fd[j].real
            dj = abs(-2.0 * re * wscale - 1.0)
            if dj > drift[j]:
                drift[j] = dj
        if record:
            jp[si], npart[si] = _observe(kx, kysq, f, fd, e, m, c1sq, volume)
        si += 1
    return jp, npart, drift, n_steps, n_rej, STATUS_OK
