import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from vortex_tunneling.modes import (
    IntegrationError,
    evolve,
    init_modes,
    omega_sq,
    sweep_blocks,
    wronskian_residual,
    wronskian_residuals,
)
from vortex_tunneling.observables import mode_occupations, occupation
from vortex_tunneling.params import SimulationParams
from vortex_tunneling.pulse import PulseProfile, make_pulse, null_pulse


def reference_mode(kx, ky, pulse, params, f0, fd0, t0, t1, rtol=1e-13):
    c1sq = params.c1**2

    def rhs(t, y):
        w2 = c1sq * ky**2 + c1sq * (kx - float(pulse.e_tilde(t))) ** 2 + float(pulse.m(t)) ** 2
        return [y[2], y[3], -w2 * y[0], -w2 * y[1]]

    y0 = [f0.real, f0.imag, fd0.real, fd0.imag]
    sol = solve_ivp(rhs, (t0, t1), y0, method="DOP853", rtol=rtol, atol=1e-16 * abs(f0))
    y = sol.y[:, -1]
    return y[0] + 1j * y[1], y[2] + 1j * y[3]


def test_omega_sq_examples():
    p = SimulationParams(l_x=10.0, l_y=100.0, n_kx=20, n_ky=2)
    null = null_pulse()
    assert omega_sq(0.0, 0.0, 0.0, null, p) == 1.0
    assert omega_sq(2 * math.pi / 10, 0.0, 3.0, null, p) == pytest.approx((2 * math.pi / 10) ** 2 + 1)
    pulse = make_pulse("bipolar-derivative", 0.3, 0.5, 2.0, 0.0)
    t = -1.3
    e = float(pulse.e_tilde(t))
    assert omega_sq(e, 0.0, t, pulse, p) == pytest.approx(float(pulse.m(t)) ** 2, rel=1e-15)
    ks = np.linspace(e - 1, e + 1, 201)
    assert np.argmin(omega_sq(ks, 0.0, t, pulse, p)) == 100


def test_init_modes_vacuum():
    p = SimulationParams(l_x=10.0, l_y=10.0, n_kx=20, n_ky=2, aspect_min=1.0)
    ens = init_modes(p)
    assert len(ens) == p.n_modes
    k0 = ens.index_of(0, 0)
    assert abs(ens.f[k0]) ** 2 == pytest.approx(1 / 200, rel=1e-15)
    assert np.max(wronskian_residuals(ens.f, ens.f_dot, p.volume)) < 1e-14
    w = np.sqrt(omega_sq(ens.k_x, ens.k_y, 0.0, null_pulse(), p))
    n = occupation(ens.f, w, p.volume, ens.f_dot)
    assert np.max(np.abs(n)) < 1e-14
    assert wronskian_residual(ens.mode(k0)) < 1e-15


def test_init_refuses_inside_pulse(small_params, strong_pulse):
    from dataclasses import replace

    p = replace(small_params, t_start=-1.0, t_end=5.0)
    with pytest.raises(ValueError, match="inside the pulse"):
        init_modes(p, strong_pulse)


def test_null_pulse_phase_rotation(small_params):
    pulse = null_pulse(t_p=1.0)
    ens = init_modes(small_params, pulse, t_start=-10.0)
    out = evolve(ens, pulse, 37.5)
    w = np.sqrt(omega_sq(ens.k_x, ens.k_y, 0.0, pulse, small_params))
    expect = ens.f * np.exp(-1j * w * 47.5)
    assert np.max(np.abs(out.f - expect) / np.abs(ens.f)) < 1e-9
    assert np.max(np.abs(mode_occupations(out, pulse))) < 1e-18
    assert np.max(out.drift) < 1e-12


def test_evolve_matches_reference_in_strong_pulse(small_params, strong_pulse):
    p = small_params.with_window(strong_pulse)
    ens = init_modes(p, strong_pulse)
    out = evolve(ens, strong_pulse, p.t_end)
    for ix, iy in [(0, 0), (2, 1), (-3, 0), (6, -3)]:
        i = ens.index_of(ix, iy)
        f, fd = reference_mode(ens.k_x[i], ens.k_y[i], strong_pulse, p, ens.f[i], ens.f_dot[i], p.t_start, p.t_end)
        assert abs(out.f[i] - f) / abs(ens.f[i]) < 1e-8
        assert abs(out.f_dot[i] - fd) / abs(ens.f_dot[i]) < 1e-8
    assert np.max(out.drift) < 1e-8


def test_slow_tanh_step_leaves_vacuum():
    t = np.linspace(-1500.0, 1500.0, 3001)
    m = 1.5 + 0.5 * np.tanh(t / 100.0)
    pulse = PulseProfile("custom-sampled", 0.0, 1.0, 100.0, 0.0, 1.0, 0.0, t, np.zeros_like(t), m)
    p = SimulationParams(l_x=10.0, l_y=100.0, n_kx=16, n_ky=0, tol=1e-12, t_start=-1500.0, t_end=1500.0)
    ens = init_modes(p, pulse).subset([p.n_kx])
    out = evolve(ens, pulse, 1500.0)
    n = float(mode_occupations(out, pulse)[0])
    f, fd = reference_mode(0.0, 0.0, pulse, p, ens.f[0], ens.f_dot[0], -1500.0, 1500.0)
    w = 2.0
    n_ref = p.volume / (2 * w) * abs(fd + 1j * w * f) ** 2
    assert n < 1e-8
    assert n == pytest.approx(n_ref, abs=1e-12)


def test_linearity(small_params, strong_pulse):
    p = small_params.with_window(strong_pulse)
    ens = init_modes(p, strong_pulse)
    alpha = 0.3 - 1.7j
    a = evolve(ens, strong_pulse, 0.0)
    b = evolve(ens.scaled(alpha), strong_pulse, 0.0)
    assert np.max(np.abs(b.f - alpha * a.f)) < 1e-13 * np.max(np.abs(alpha * a.f))


def test_reflection_symmetry_without_field(small_params):
    pulse = make_pulse("bipolar-derivative", 0.0, 0.4, 1.5, 0.0)
    p = small_params.with_window(pulse)
    ens = init_modes(p, pulse)
    out = evolve(ens, pulse, 0.7)
    for ix in range(1, p.n_kx + 1):
        for iy in range(-p.n_ky, p.n_ky + 1):
            a = abs(out.f[out.index_of(ix, iy)])
            b = abs(out.f[out.index_of(-ix, iy)])
            assert a == b


def test_tolerance_controls_error(small_params, strong_pulse):
    from dataclasses import replace

    p = small_params.with_window(strong_pulse)
    ens = init_modes(p, strong_pulse)
    i = ens.index_of(1, 0)
    f_ref, _ = reference_mode(ens.k_x[i], ens.k_y[i], strong_pulse, p, ens.f[i], ens.f_dot[i], p.t_start, p.t_end)
    errs = []
    for tol in (1e-6, 1e-8, 1e-10):
        out = evolve(ens, strong_pulse, p.t_end, tol=tol)
        errs.append(abs(out.f[i] - f_ref) / abs(f_ref))
        # the propagator is unimodular: drift sits at round-off for every tol
        assert np.max(out.drift) < 1e-12
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


def test_drift_abort_and_argument_checks(small_params, strong_pulse):
    p = small_params.with_window(strong_pulse)
    ens = init_modes(p, strong_pulse)
    bad = ens.copy()
    bad.f[3] *= 1.01
    bad.drift[:] = 0.0
    with pytest.raises(IntegrationError, match="Wronskian"):
        evolve(bad, strong_pulse, p.t_start + 1.0)
    with pytest.raises(ValueError):
        evolve(ens, strong_pulse, p.t_start - 1.0)
    with pytest.raises(ValueError):
        sweep_blocks(ens, strong_pulse, np.array([p.t_start + 1, p.t_start + 2]))


def test_worker_count_does_not_change_bits(small_params, strong_pulse):
    p = small_params.with_window(strong_pulse)
    ens = init_modes(p, strong_pulse)
    samples = np.linspace(p.t_start, p.t_end, 51)
    a = sweep_blocks(ens, strong_pulse, samples, workers=1)
    b = sweep_blocks(ens, strong_pulse, samples, workers=3)
    assert np.array_equal(a.j_x, b.j_x) and np.array_equal(a.n_total, b.n_total)
    assert np.array_equal(a.ensemble.f, b.ensemble.f)
