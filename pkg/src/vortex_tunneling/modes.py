"""Mode functions of the dual vortex field.

Each grid mode obeys f'' + omega_k(t)^2 f = 0 with

    omega_k^2 = c1^2 k_y^2 + c1^2 (k_x - E~(t))^2 + M(t)^2,

and is normalised by the Wronskian f f'* - f' f* = i/V. Modes are
independent; they are integrated in blocks of equal |k_x| that share one
adaptive step sequence, and blocks can be farmed out to worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .params import SimulationParams
from .pulse import PulseProfile


class IntegrationError(RuntimeError):
    """Raised when the mode integrator cannot meet its tolerance."""


DRIFT_ABORT_FACTOR = 1e3


def omega_sq(k_x, k_y, t, pulse: PulseProfile, params: SimulationParams):
    """Instantaneous squared frequency; broadcasts over k and t."""
    c1 = params.c1
    e = pulse.e_tilde(t)
    m = pulse.m(t)
    return c1**2 * np.square(k_y) + c1**2 * np.square(np.subtract(k_x, e)) + np.square(m)


@dataclass(frozen=True)
class Mode:
    k_x: float
    k_y: float
    f: complex
    f_dot: complex
    volume: float

    @property
    def wronskian_ref(self) -> complex:
        return 1j / self.volume


def wronskian_residual(mode: Mode, volume: float | None = None) -> float:
    """|f f'* - f' f* - i/V| * V for one mode."""
    v = mode.volume if volume is None else volume
    w = mode.f * np.conj(mode.f_dot) - mode.f_dot * np.conj(mode.f)
    return float(abs(w - 1j / v) * v)


def wronskian_residuals(f, f_dot, volume, norm=1.0):
    w = f * np.conj(f_dot) - f_dot * np.conj(f)
    return np.abs(w - 1j * norm / volume) * volume / norm


@dataclass
class ModeEnsemble:
    """All grid modes at one time, stored as parallel arrays.

    Modes are ordered lexicographically by (k_x, k_y); ``ix``/``iy`` are the
    integer grid labels. ``drift`` holds the largest Wronskian residual seen
    by each mode since initialisation, measured against norm * i/V; ``norm``
    is 1 for physical modes and |alpha|^2 after :meth:`scaled`.
    """

    ix: np.ndarray
    iy: np.ndarray
    k_x: np.ndarray
    k_y: np.ndarray
    f: np.ndarray
    f_dot: np.ndarray
    t: float
    params: SimulationParams
    drift: np.ndarray = field(default=None)
    norm: float = 1.0

    def __post_init__(self):
        if self.drift is None:
            self.drift = wronskian_residuals(self.f, self.f_dot, self.params.volume, self.norm)

    def __len__(self):
        return self.f.size

    def mode(self, i: int) -> Mode:
        return Mode(float(self.k_x[i]), float(self.k_y[i]), complex(self.f[i]),
                    complex(self.f_dot[i]), self.params.volume)

    @property
    def modes(self):
        return [self.mode(i) for i in range(len(self))]

    def index_of(self, ix: int, iy: int) -> int:
        hits = np.flatnonzero((self.ix == ix) & (self.iy == iy))
        if hits.size == 0:
            raise KeyError((ix, iy))
        return int(hits[0])

    def copy(self) -> "ModeEnsemble":
        return replace(self, f=self.f.copy(), f_dot=self.f_dot.copy(), drift=self.drift.copy())

    def subset(self, idx) -> "ModeEnsemble":
        idx = np.asarray(idx)
        return ModeEnsemble(self.ix[idx], self.iy[idx], self.k_x[idx], self.k_y[idx],
                            self.f[idx].copy(), self.f_dot[idx].copy(), self.t, self.params,
                            self.drift[idx].copy(), self.norm)

    def scaled(self, alpha: complex) -> "ModeEnsemble":
        return replace(self, f=alpha * self.f, f_dot=alpha * self.f_dot, drift=self.drift.copy(),
                       norm=self.norm * abs(alpha) ** 2)


def init_modes(params: SimulationParams, pulse: PulseProfile | None = None,
               t_start: float | None = None) -> ModeEnsemble:
    """Positive-frequency plane waves at the start of the run.

    With a pulse, the drive must be at rest at ``t_start``; the frequency
    used is the instantaneous one there, which is the free one to within
    the rest tolerance.
    """
    t0 = params.t_start if t_start is None else t_start
    if t0 is None:
        t0 = 0.0 if pulse is None else pulse.support()[0]
    ix, iy, kx, ky = params.grid()
    if pulse is None:
        w = np.sqrt(params.c1**2 * (kx**2 + ky**2) + params.m0**2)
    else:
        if not pulse.at_rest(t0):
            raise ValueError(
                f"t_start={t0} lies inside the pulse support "
                f"(E~={float(pulse.e_tilde(t0)):.3e}, M-m0={float(pulse.m(t0)) - pulse.m0:.3e}); "
                "start earlier"
            )
        w = np.sqrt(omega_sq(kx, ky, t0, pulse, params))
    f = (1.0 / np.sqrt(2.0 * w * params.volume)).astype(np.complex128)
    return ModeEnsemble(ix, iy, kx, ky, f, -1j * w * f, float(t0), params)


def partition_blocks(ensemble: ModeEnsemble):
    """Index arrays of modes sharing |n_x|, ordered by |n_x|.

    Within a block the modes (-n_x, n_y) and (n_x, n_y) sit next to each
    other, which the compiled reduction relies on.
    """
    blocks = []
    for a in np.unique(np.abs(ensemble.ix)):
        pos = np.flatnonzero(ensemble.ix == a)
        if a == 0:
            blocks.append(pos)
            continue
        neg = np.flatnonzero(ensemble.ix == -a)
        pos = pos[np.argsort(ensemble.iy[pos], kind="stable")]
        neg = neg[np.argsort(ensemble.iy[neg], kind="stable")]
        if neg.size != pos.size:
            blocks.append(np.concatenate([neg, pos]))
        else:
            blocks.append(np.column_stack([neg, pos]).ravel())
    return blocks


def _block_hmax(kx, ky, pulse: PulseProfile, params: SimulationParams):
    if pulse.shape == "custom-sampled":
        e_abs = float(np.max(np.abs(pulse.sample_e)))
        m_top = float(max(np.max(pulse.sample_m), pulse.m0))
    else:
        e_abs = abs(pulse.e_max)
        m_top = max(pulse.m0, pulse.m_min)
    c1 = params.c1
    w_top = math.sqrt(c1**2 * float(np.max(ky**2)) + c1**2 * (float(np.max(np.abs(kx))) + e_abs) ** 2
                      + m_top**2)
    return params.phase_step / w_top


def _run_block(args):
    kx, ky, f, fd, samples, kargs, c1, volume, wscale, tol, hmax, record = args
    code, par, knots, ce, cm = kargs
    f = f.copy()
    fd = fd.copy()
    jp, npart, drift, n_steps, n_rej, status = _kernels.evolve_block(
        kx, ky, f, fd, samples, code, par, knots, ce, cm, c1, volume, wscale, tol, hmax, record
    )
    return jp, npart, drift, f, fd, n_steps, n_rej, status


def _map(fn, jobs, workers):
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


@dataclass
class BlockSweep:
    """Raw integrator output reduced over blocks in a fixed order."""

    ensemble: ModeEnsemble
    j_x: np.ndarray
    n_total: np.ndarray
    n_steps: int
    n_rejected: int


def sweep_blocks(ensemble: ModeEnsemble, pulse: PulseProfile, samples, tol=None,
                 workers: int = 1, record: bool = True) -> BlockSweep:
    """Integrate all blocks through ``samples`` (first sample = ensemble time)."""
    params = ensemble.params
    tol = params.tol if tol is None else tol
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    if samples[0] != ensemble.t:
        raise ValueError("first sample must equal the ensemble time")
    if np.any(np.diff(samples) <= 0):
        raise ValueError("sample times must be strictly increasing")
    kargs = pulse.kernel_args()
    blocks = partition_blocks(ensemble)
    jobs = []
    for idx in blocks:
        kx = np.ascontiguousarray(ensemble.k_x[idx])
        ky = np.ascontiguousarray(ensemble.k_y[idx])
        jobs.append((kx, ky, ensemble.f[idx], ensemble.f_dot[idx], samples, kargs,
                     float(params.c1), float(params.volume), float(params.volume / ensemble.norm),
                     float(tol),
                     _block_hmax(kx, ky, pulse, params), record))
    results = _map(_run_block, jobs, workers)

    out = ensemble.copy()
    j_x = np.zeros(samples.size)
    n_total = np.zeros(samples.size)
    n_steps = n_rej = 0
    for idx, (jp, npart, drift, f, fd, ns_, nr_, status) in zip(blocks, results):
        if status == _kernels.STATUS_UNDERFLOW:
            raise IntegrationError(
                f"step-size underflow in block |n_x|={abs(int(ensemble.ix[idx[0]]))}"
            )
        j_x += jp
        n_total += npart
        out.f[idx] = f
        out.f_dot[idx] = fd
        out.drift[idx] = np.maximum(out.drift[idx], drift)
        n_steps += ns_
        n_rej += nr_
    out.t = float(samples[-1])
    worst = float(np.max(out.drift))
    if worst > DRIFT_ABORT_FACTOR * tol:
        raise IntegrationError(
            f"Wronskian drift {worst:.3e} exceeds {DRIFT_ABORT_FACTOR:g}*tol={DRIFT_ABORT_FACTOR * tol:.1e}"
        )
    return BlockSweep(out, j_x, n_total, n_steps, n_rej)


def evolve(ensemble: ModeEnsemble, pulse: PulseProfile, t_target: float, tol=None,
           workers: int = 1) -> ModeEnsemble:
    """Advance every mode to ``t_target``; returns a new ensemble."""
    if t_target < ensemble.t:
        raise ValueError("t_target precedes the ensemble time")
    if t_target == ensemble.t:
        return ensemble.copy()
    samples = np.array([ensemble.t, float(t_target)])
    return sweep_blocks(ensemble, pulse, samples, tol=tol, workers=workers, record=False).ensemble
