"""Self-contained identity and oracle checks, grouped into named suites."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import adiabatic, estimates, fermions, instanton
from .params import UM, MaterialParams, SimulationParams


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} [{self.suite}] {self.name}: {self.measured:.3e} (tol {self.tolerance:.1e})"


def _rel(a, b):
    return abs(a - b) / abs(b)


def suite_lattice_sum():
    out = []
    for b in (1.0, 2.0, 5.0, 10.0):
        err = _rel(adiabatic.lattice_sum(b), adiabatic.lattice_sum_direct(b))
        out.append(CheckResult("lattice-sum", f"quadrature vs direct sum, b={b:g}", err, 1e-10, err <= 1e-10))
    b = 10.0
    asym = 2.0 / (math.pi * b * b) * (1.0 + adiabatic.lattice_sum_correction(b))
    err = _rel(adiabatic.lattice_sum_direct(b), asym)
    out.append(CheckResult("lattice-sum", "b=10 vs leading correction", err, 1e-8, err <= 1e-8))
    return out


def suite_materials():
    mat = MaterialParams.from_lab_units(10.0, 30.0, 100.0, 10.0)
    rep = estimates.check_conditions(mat, 1.0 * UM, 1.0)
    nm = 1e-7
    items = [
        ("lambda ~ 35 nm", _rel(rep.lambda_compton / nm, 35.0), 0.10),
        ("l_x/lambda ~ 30", _rel(rep.ratio_lx_lambda, 30.0), 0.10),
        ("gap reduction ~ 5", _rel(rep.gap_reduction, 5.0), 0.15),
        ("quasiparticle bound ~ 4e-12 s", abs(math.log(rep.t_p_bound_quasiparticle / 4e-12)), math.log(2)),
        ("vortex bound ~ 1e-14 s", abs(math.log(rep.t_p_bound_vortex / 1e-14)), math.log(2)),
    ]
    return [CheckResult("materials", n, m, t, m <= t) for n, m, t in items]


def suite_fermion():
    band = fermions.CoreBand(gap=0.2, v_f=1.0, k_f=1.0)
    v = fermions.VelocityProfile("gaussian", 0.4, 0.0, 3.0)
    phi = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    t = 25.0
    occ = fermions.vlasov_evolve(phi, np.array([0.0]), v, band, t)
    ref = -fermions.edge_shift(phi, t, v, band)
    kp = float(band.k_perp(0.0))
    err = float(np.max(np.abs(occ.boundary - ref))) / kp
    out = [CheckResult("fermion", "characteristics vs analytic edge", err, 1e-6, err <= 1e-6)]
    x = 0.3
    vd = fermions.VelocityProfile("delta", x, 0.0)
    w0 = band.omega0_0
    got = fermions.edge_shift(phi, t, vd, band)
    err = float(np.max(np.abs(got - kp * x * np.sin(w0 * t + phi))))
    out.append(CheckResult("fermion", "delta pulse edge", err, 1e-14, err <= 1e-14))
    return out


def suite_saddle():
    out = []
    prev = None
    for a in (100.0, 400.0, 1600.0):
        r = instanton.saddle(a, 1.0)
        err = _rel(r.v_e_star, math.sqrt(a))
        out.append(CheckResult("saddle", f"v_E* vs sqrt(ML), ML={a:g}", err, 0.05, err < 0.05))
        excess = r.s_e - a
        ok = 0 <= excess < 5 and (prev is None or excess <= prev)
        out.append(CheckResult("saddle", f"s_e - ML bounded, ML={a:g}", excess, 5.0, ok))
        prev = excess
    return out


def suite_quench():
    from .modes import init_modes
    from .observables import quench_occupation, sudden_quench

    p = SimulationParams(l_x=2.0, l_y=20.0, n_kx=4, n_ky=3)
    ens = init_modes(p)
    n = sudden_quench(ens, 1.0, 2.0)
    w1 = np.sqrt(ens.k_x**2 + ens.k_y**2 + 1.0)
    w2 = np.sqrt(ens.k_x**2 + ens.k_y**2 + 4.0)
    err = float(np.max(np.abs(n - quench_occupation(w1, w2))))
    k0 = ens.index_of(0, 0)
    err0 = abs(float(n[k0]) - 0.125)
    return [
        CheckResult("quench", "per-mode Bogoliubov occupation", err, 1e-8, err <= 1e-8),
        CheckResult("quench", "k=0 occupation = 1/8", err0, 1e-8, err0 <= 1e-8),
    ]


SUITES = {
    "lattice-sum": suite_lattice_sum,
    "materials": suite_materials,
    "fermion": suite_fermion,
    "saddle": suite_saddle,
    "quench": suite_quench,
}


def run_verify(suite_name: str = "all"):
    if suite_name == "all":
        names = list(SUITES)
    elif suite_name in SUITES:
        names = [suite_name]
    else:
        raise ValueError(f"unknown suite {suite_name!r}; choose from {sorted(SUITES)} or 'all'")
    results = []
    for name in names:
        results.extend(SUITES[name]())
    return results
