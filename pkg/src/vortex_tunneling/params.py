"""Physical constants, film parameters and dimensionless run parameters.

Physical quantities are Gaussian CGS (erg, cm, s, statC), which is the
system the vortex-mass and screening-length estimates are written in.
The dynamic modules are scale free and normally run with M0 = c1 = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as sc

# SI -> Gaussian conversions
_HBAR = sc.hbar * 1e7
_C = sc.c * 1e2
_E = sc.e * sc.c * 10.0
_KB = sc.k * 1e7

NM = 1e-7  # cm
UM = 1e-4  # cm


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in Gaussian units.

    ``g`` is the dual coupling 2e/(hbar c); it is derived, never passed in.
    """

    hbar: float = _HBAR
    c: float = _C
    e: float = _E
    k_b: float = _KB
    alpha_em: float = field(init=False)
    g: float = field(init=False)

    def __post_init__(self):
        for name in ("hbar", "c", "e", "k_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "alpha_em", self.e**2 / (self.hbar * self.c))
        object.__setattr__(self, "g", 2.0 * self.e / (self.hbar * self.c))

    @property
    def flux_quantum(self) -> float:
        return 2.0 * math.pi / self.g


CGS = PhysicalConstants()


@dataclass(frozen=True)
class MaterialParams:
    """Film parameters: lengths in cm, energies in erg.

    The Fermi-surface fields are optional; they only enter the core-fermion
    corrections. When all three are present, eps_f is checked against the
    free-electron relation eps_f = hbar k_f v_f / 2 to ``fermi_rtol``.
    """

    d: float
    xi: float
    delta_london: float
    gap: float
    k_f: float | None = None
    v_f: float | None = None
    eps_f: float | None = None
    fermi_rtol: float = 0.05
    consts: PhysicalConstants = CGS

    def __post_init__(self):
        for name in ("d", "xi", "delta_london", "gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("k_f", "v_f", "eps_f"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive when given")
        if not (self.d < self.xi < self.delta_london):
            warnings.warn(
                "film outside the thin-film regime d < xi < delta_london",
                RuntimeWarning,
                stacklevel=2,
            )
        if None not in (self.k_f, self.v_f, self.eps_f):
            expected = 0.5 * self.consts.hbar * self.k_f * self.v_f
            if abs(self.eps_f - expected) > self.fermi_rtol * expected:
                raise ValueError(
                    f"eps_f={self.eps_f:.4g} inconsistent with hbar k_f v_f/2={expected:.4g}"
                )

    @classmethod
    def from_lab_units(cls, d_nm, xi_nm, delta_nm, gap_kelvin, consts=CGS, **kw):
        """Build from nanometres and a gap quoted in kelvin (k_B T)."""
        return cls(
            d=d_nm * NM,
            xi=xi_nm * NM,
            delta_london=delta_nm * NM,
            gap=gap_kelvin * consts.k_b,
            consts=consts,
            **kw,
        )


@dataclass(frozen=True)
class SimulationParams:
    """Dimensionless description of one dynamic run.

    The k_x grid is {2 pi n / l_x : |n| <= n_kx}, k_y likewise with l_y, so
    the ultraviolet cutoff ``k_cut`` is the largest grid |k_x|.
    ``t_start``/``t_end`` may be left as None and filled from the pulse
    with :meth:`with_window`.
    """

    m0: float = 1.0
    c1: float = 1.0
    l_x: float = 10.0
    l_y: float = 100.0
    n_kx: int = 100
    n_ky: int = 25
    tol: float = 1e-10
    t_start: float | None = None
    t_end: float | None = None
    cutoff_factor: float = 10.0
    aspect_min: float = 10.0
    phase_step: float = 1.5

    def __post_init__(self):
        if not (self.m0 > 0 and self.c1 > 0 and self.l_x > 0 and self.l_y > 0):
            raise ValueError("m0, c1, l_x, l_y must be positive")
        if int(self.n_kx) != self.n_kx or int(self.n_ky) != self.n_ky:
            raise ValueError("n_kx, n_ky must be integers")
        if self.n_kx < 0 or self.n_ky < 0:
            raise ValueError("n_kx, n_ky must be non-negative")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")
        if not 0 < self.phase_step <= 3.0:
            raise ValueError("phase_step must lie in (0, 3]")
        if self.c1 * self.k_cut < self.cutoff_factor * self.m0:
            raise ValueError(
                f"c1*k_cut={self.c1 * self.k_cut:.4g} below {self.cutoff_factor}*m0; "
                "increase n_kx or decrease l_x"
            )
        if self.l_y < self.aspect_min * self.l_x:
            raise ValueError(f"l_y must be at least {self.aspect_min}*l_x")
        if self.t_start is not None and self.t_end is not None and not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def volume(self) -> float:
        return self.l_x * self.l_y

    @property
    def k_cut(self) -> float:
        return 2.0 * math.pi * self.n_kx / self.l_x

    @property
    def n_modes(self) -> int:
        return (2 * self.n_kx + 1) * (2 * self.n_ky + 1)

    @property
    def compton_length(self) -> float:
        return self.c1 / self.m0

    def kx_values(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(-self.n_kx, self.n_kx + 1) / self.l_x

    def ky_values(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(-self.n_ky, self.n_ky + 1) / self.l_y

    def grid(self):
        """Integer indices and wavenumbers, sorted lexicographically by (k_x, k_y)."""
        ix, iy = np.meshgrid(
            np.arange(-self.n_kx, self.n_kx + 1),
            np.arange(-self.n_ky, self.n_ky + 1),
            indexing="ij",
        )
        ix = ix.ravel()
        iy = iy.ravel()
        return ix, iy, 2.0 * np.pi * ix / self.l_x, 2.0 * np.pi * iy / self.l_y

    def with_window(self, pulse, half_width: float = 4.5) -> "SimulationParams":
        """Return a copy whose run window brackets the pulse by ``half_width`` t_p."""
        from dataclasses import replace

        lo, hi = pulse.support(half_width)
        return replace(
            self,
            t_start=self.t_start if self.t_start is not None else lo,
            t_end=self.t_end if self.t_end is not None else hi,
        )
