import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from vortex_tunneling.params import CGS, MaterialParams, PhysicalConstants, SimulationParams
from vortex_tunneling.pulse import evaluate_pulse, make_pulse, null_pulse


def test_coupling_constant():
    assert CGS.g == pytest.approx(2 * CGS.e / (CGS.hbar * CGS.c), rel=1e-15)
    assert CGS.alpha_em == pytest.approx(1 / 137.035999, rel=1e-8)
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=-1.0)


def test_material_regime_warning():
    with pytest.warns(RuntimeWarning):
        MaterialParams(d=1e-6, xi=5e-6, delta_london=3e-6, gap=1e-15)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        MaterialParams.from_lab_units(10, 30, 100, 10)
    with pytest.raises(ValueError):
        MaterialParams(d=0.0, xi=1.0, delta_london=2.0, gap=1.0)


def test_fermi_consistency():
    good = 0.5 * CGS.hbar * 2.0 * 3.0
    MaterialParams(1.0, 2.0, 3.0, 1.0, k_f=2.0, v_f=3.0, eps_f=1.02 * good)
    with pytest.raises(ValueError):
        MaterialParams(1.0, 2.0, 3.0, 1.0, k_f=2.0, v_f=3.0, eps_f=1.0)


def test_grid_counts_and_symmetry():
    p = SimulationParams(l_x=10.0, l_y=100.0, n_kx=20, n_ky=5)
    ix, iy, kx, ky = p.grid()
    assert kx.size == p.n_modes == 41 * 11
    pairs = set(zip(ix.tolist(), iy.tolist()))
    assert len(pairs) == kx.size
    assert all((-a, b) in pairs and (a, -b) in pairs for a, b in pairs)
    assert p.kx_values() == pytest.approx(2 * np.pi * np.arange(-20, 21) / 10.0)
    assert p.k_cut == pytest.approx(2 * np.pi * 20 / 10)


def test_params_reject_low_cutoff_and_short_wire():
    with pytest.raises(ValueError, match="k_cut"):
        SimulationParams(l_x=10.0, l_y=100.0, n_kx=5)
    with pytest.raises(ValueError, match="l_y"):
        SimulationParams(l_x=10.0, l_y=50.0)


def test_null_pulse_is_identity():
    p = make_pulse("bipolar-derivative", 0.0, 1.0, 3.0)
    t = np.linspace(-20, 20, 11)
    e, m, md = evaluate_pulse(p, t)
    assert np.all(e == 0) and np.all(m == 1.0) and np.all(md == 0)
    assert p.is_null and null_pulse().is_null


def test_bipolar_has_zero_area_and_unit_peak():
    e_star, tp = 0.37, 5.0
    p = make_pulse("bipolar-derivative", e_star, 0.5, tp, 2.0)
    # the two lobes integrated separately cancel to rounding
    left, _ = integrate.quad(p.e_tilde, 2.0 - 40 * tp, 2.0, epsabs=0, epsrel=1e-13)
    right, _ = integrate.quad(p.e_tilde, 2.0, 2.0 + 40 * tp, epsabs=0, epsrel=1e-13)
    area = left + right
    assert abs(area) < 1e-12 * e_star * tp
    t = np.linspace(-20, 20, 400001)
    assert np.max(np.abs(p.e_tilde(t))) == pytest.approx(e_star, rel=1e-9)
    assert float(p.e_tilde(2.0)) == 0.0
    assert float(p.m(2.0)) == 0.5


def test_unipolar_area_matches_quadrature():
    e_star, tp = 0.2, 3.0
    p = make_pulse("unipolar-gaussian", e_star, 0.5, tp, 1.0)
    area, _ = integrate.quad(p.e_tilde, -np.inf, np.inf, epsabs=1e-15, epsrel=1e-13)
    assert area == pytest.approx(math.sqrt(math.pi) * e_star * tp, rel=1e-12)


@pytest.mark.parametrize("shape", ["bipolar-derivative", "unipolar-gaussian"])
def test_pulse_derivatives_second_order(shape):
    p = make_pulse(shape, 0.4, 0.3, 2.0, 0.5, e_offset=0.7)
    t = np.linspace(-5, 6, 37)
    errs = []
    for h in (1e-2, 5e-3):
        fd_e = (p.e_tilde(t + h) - p.e_tilde(t - h)) / (2 * h)
        fd_m = (p.m(t + h) - p.m(t - h)) / (2 * h)
        errs.append(max(np.max(np.abs(fd_e - p.e_dot(t))), np.max(np.abs(fd_m - p.m_dot(t)))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_pulse_limits_and_bounds():
    p = make_pulse("bipolar-derivative", 0.1, 0.25, 4.0, 0.0, e_offset=3.0)
    t = np.linspace(-80, 80, 100001)
    assert np.min(p.m(t)) >= 0.25 - 1e-15
    assert p.at_rest(-80.0) and p.at_rest(80.0)
    assert not p.at_rest(0.0)


def test_make_pulse_errors():
    with pytest.raises(ValueError, match="shape"):
        make_pulse("square", 0.1, 0.5, 1.0)
    with pytest.raises(ValueError):
        make_pulse("bipolar-derivative", 0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        make_pulse("bipolar-derivative", 0.1, -0.2, 1.0)
    with pytest.raises(ValueError):
        make_pulse("bipolar-derivative", 0.1, 1.5, 1.0)
    with pytest.raises(ValueError):
        make_pulse("bipolar-derivative", 0.1, 0.5, 0.0)


def test_custom_sampled_pulse():
    t = np.linspace(-10, 10, 201)
    e = 0.1 * np.exp(-t**2) * t
    e[0] = e[-1] = 0.0
    m = 1.0 - 0.4 * np.exp(-(t**2) / 4)
    m[0] = m[-1] = 1.0
    p = make_pulse("custom-sampled", None, 0.55, 2.0, samples={"t": t, "e_tilde": e, "m": m})
    assert float(p.e_tilde(0.5)) == pytest.approx(0.1 * 0.5 * math.exp(-0.25), rel=1e-4)
    assert float(p.m(50.0)) == 1.0 and float(p.m_dot(50.0)) == 0.0
    with pytest.raises(ValueError, match="vanish"):
        bad = e.copy()
        bad[0] = 0.05
        make_pulse("custom-sampled", None, 0.55, 2.0, samples={"t": t, "e_tilde": bad, "m": m})
    with pytest.raises(ValueError, match="below"):
        make_pulse("custom-sampled", None, 0.7, 2.0, samples={"t": t, "e_tilde": e, "m": m})


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.05, 1.0), st.floats(0.1, 50.0), st.floats(-100, 100))
def test_pulse_properties(e_max, m_min, tp, t):
    p = make_pulse("bipolar-derivative", e_max, m_min, tp, 0.0)
    assert abs(float(p.e_tilde(t))) <= e_max * (1 + 1e-12)
    assert m_min - 1e-15 <= float(p.m(t)) <= 1.0
