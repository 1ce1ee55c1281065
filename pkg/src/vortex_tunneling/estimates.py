"""Order-of-magnitude bridge from film parameters to the model scales.

All formulas are CGS and carry their printed numerical prefactors:

    hbar M0 ~ e^2 d / (16 alpha^2 delta^2)
    m      ~ hbar^2 d / (16 e^2 xi^2)
    c1     ~ (xi / delta) c
    lambda ~ 16 alpha xi delta / d
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import CGS, MaterialParams, PhysicalConstants

MUCH_GREATER = 3.0


def estimate_m0(mat: MaterialParams, consts: PhysicalConstants = CGS, log_factor: float = 1.0) -> float:
    """hbar M0 (erg). ``log_factor`` multiplies in an optional ln(l_x / xi_bar) enhancement."""
    return log_factor * consts.e**2 * mat.d / (16.0 * consts.alpha_em**2 * mat.delta_london**2)


@dataclass(frozen=True)
class VortexMass:
    mass: float
    from_m0_c1: float


def estimate_c1(mat: MaterialParams, consts: PhysicalConstants = CGS) -> float:
    return mat.xi / mat.delta_london * consts.c


def estimate_vortex_mass(mat: MaterialParams, consts: PhysicalConstants = CGS) -> VortexMass:
    """Electromagnetic mass and the mass hbar M0 / c1^2 implied by the other estimates."""
    m = consts.hbar**2 * mat.d / (16.0 * consts.e**2 * mat.xi**2)
    return VortexMass(m, estimate_m0(mat, consts) / estimate_c1(mat, consts) ** 2)


def estimate_lambda(mat: MaterialParams, consts: PhysicalConstants = CGS) -> float:
    return 16.0 * consts.alpha_em * mat.xi * mat.delta_london / mat.d


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass
class ConditionReport:
    lambda_compton: float
    m0_phys: float
    c1_phys: float
    m_vortex: float
    ratio_lx_lambda: float
    gap_reduction: float
    gap_bar: float
    xi_bar: float
    t_p_bound_quasiparticle: float
    t_p_bound_vortex: float
    checks: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "checks"}
        d["checks"] = [c.__dict__ for c in self.checks]
        d["all_passed"] = self.all_passed
        return d

    def format(self) -> str:
        rows = [
            ("lambda [cm]", self.lambda_compton),
            ("hbar M0 [erg]", self.m0_phys),
            ("c1 [cm/s]", self.c1_phys),
            ("vortex mass [g]", self.m_vortex),
            ("l_x / lambda", self.ratio_lx_lambda),
            ("gap reduction", self.gap_reduction),
            ("quasiparticle bound [s]", self.t_p_bound_quasiparticle),
            ("vortex bound [s]", self.t_p_bound_vortex),
        ]
        lines = [f"{k:<26}{v:.4g}" for k, v in rows]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{tag} {c.name:<22} {c.lhs:.3g} >> {c.rhs:.3g}  (margin {c.margin:.3g})")
        return "\n".join(lines)


def _check(name, lhs, rhs, factor):
    margin = lhs / rhs
    return Check(name, lhs, rhs, margin, margin >= factor)


def check_conditions(mat: MaterialParams, l_x: float, t_p: float, consts: PhysicalConstants = CGS,
                     gap_reduction_override: float | None = None,
                     much_greater: float = MUCH_GREATER) -> ConditionReport:
    """Evaluate the operating-window inequalities for a film and pulse.

    A "much greater than" inequality passes when the ratio of its sides is
    at least ``much_greater``.
    """
    lam = estimate_lambda(mat, consts)
    c1 = estimate_c1(mat, consts)
    ratio = l_x / lam
    red = math.sqrt(ratio) if gap_reduction_override is None else gap_reduction_override
    gap_bar = mat.gap / red
    xi_bar = mat.xi * red
    bound_qp = consts.hbar / gap_bar
    bound_v = l_x / c1
    half = t_p / (2.0 * math.pi)
    checks = [
        _check("l_x >> lambda", l_x, lam, much_greater),
        _check("t_p/2pi >> hbar/gap_bar", half, bound_qp, much_greater),
        _check("t_p/2pi >> l_x/c1", half, bound_v, much_greater),
        _check("l_x >> xi_bar", l_x, xi_bar, much_greater),
    ]
    return ConditionReport(lam, estimate_m0(mat, consts), c1, estimate_vortex_mass(mat, consts).mass,
                           ratio, red, gap_bar, xi_bar, bound_qp, bound_v, checks)
