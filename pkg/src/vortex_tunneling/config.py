"""JSON scenario files.

A scenario document has sections ``sim``, ``pulse``, ``outputs`` and an
optional ``sweep``; the ``estimate``, ``instanton`` and ``fermions``
subcommands read their own sections. Errors name the offending line.

Example::

    {
      "sim":   {"l_x": 6, "l_y": 120, "n_kx": 100, "n_ky": 25, "tol": 1e-10},
      "pulse": {"shape": "bipolar-derivative", "e_max": 0.02, "m_min": 0.8,
                "t_p": 500, "e_offset_ratio": 0.7071067811865476},
      "sweep": {"axis": "l_x", "values": [6, 7, 8], "scale_l_y": true}
    }
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, fields, replace

from .params import SimulationParams
from .pulse import PulseProfile, make_pulse

SIM_KEYS = {f.name for f in fields(SimulationParams)}
PULSE_KEYS = {"shape", "e_max", "m_min", "t_p", "t_center", "m0", "e_offset", "e_offset_ratio",
              "samples"}
OUTPUT_KEYS = {"modes", "dt"}
SWEEP_AXES = ("l_x", "t_p", "e_max", "m_min", "tol")
SECTIONS = {"sim", "pulse", "outputs", "sweep", "estimate", "instanton", "fermions", "verify"}


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def _line_of(text: str, key: str, after: str | None = None) -> int | None:
    start = 0
    if after is not None:
        m = re.search(r'"%s"\s*:' % re.escape(after), text)
        if m:
            start = m.start()
    m = re.search(r'"%s"\s*:' % re.escape(key), text[start:])
    if m is None:
        return None
    return text.count("\n", 0, start + m.start()) + 1


def config_hash(doc: dict) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class Scenario:
    sim: SimulationParams
    pulse: PulseProfile
    outputs: dict = field(default_factory=dict)
    sweep: dict | None = None
    doc: dict = field(default_factory=dict)

    @property
    def hash(self) -> str:
        return config_hash(self.doc)

    def points(self):
        """Yield (value, sim, pulse) for each sweep point, or the single run."""
        if not self.sweep:
            yield None, self.sim, self.pulse
            return
        axis = self.sweep["axis"]
        pulse_doc = self.doc["pulse"]
        for val in self.sweep["values"]:
            sim = self.sim
            pd = dict(pulse_doc)
            if axis == "l_x":
                ly = self.sim.l_y * val / self.sim.l_x if self.sweep.get("scale_l_y") else self.sim.l_y
                sim = replace(sim, l_x=float(val), l_y=float(ly))
            elif axis == "tol":
                sim = replace(sim, tol=float(val))
            else:
                pd[axis] = val
            yield val, replace(sim, t_start=self.sim.t_start, t_end=self.sim.t_end), _pulse_from(pd)


def _pulse_from(pd: dict) -> PulseProfile:
    pd = dict(pd)
    ratio = pd.pop("e_offset_ratio", None)
    if ratio is not None:
        if "e_offset" in pd:
            raise ValueError("give e_offset or e_offset_ratio, not both")
        pd["e_offset"] = float(ratio) * float(pd["t_p"])
    if "shape" not in pd:
        raise ValueError("pulse.shape is required")
    for key in ("e_max", "m_min", "t_p"):
        if key not in pd:
            raise ValueError(f"pulse.{key} is required")
    return make_pulse(**pd)


def parse_scenario(text: str, need_pulse: bool = True) -> Scenario:
    """Parse and validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", 1)
    for sec in doc:
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section {sec!r}", _line_of(text, sec))

    sim_doc = doc.get("sim", {})
    for key in sim_doc:
        if key not in SIM_KEYS:
            raise ConfigError(f"unknown sim key {key!r}", _line_of(text, key, "sim"))
    try:
        sim = SimulationParams(**sim_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sim: {exc}", _line_of(text, "sim")) from None

    pulse = None
    if need_pulse or "pulse" in doc:
        if "pulse" not in doc:
            raise ConfigError("missing section 'pulse'", 1)
        for key in doc["pulse"]:
            if key not in PULSE_KEYS:
                raise ConfigError(f"unknown pulse key {key!r}", _line_of(text, key, "pulse"))
        try:
            pulse = _pulse_from(doc["pulse"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"pulse: {exc}", _line_of(text, "pulse")) from None
        if pulse.m0 != sim.m0:
            raise ConfigError("pulse.m0 must equal sim.m0", _line_of(text, "m0", "pulse"))

    outputs = doc.get("outputs", {})
    for key in outputs:
        if key not in OUTPUT_KEYS:
            raise ConfigError(f"unknown outputs key {key!r}", _line_of(text, key, "outputs"))

    sweep = doc.get("sweep")
    if sweep is not None:
        line = _line_of(text, "sweep")
        axis = sweep.get("axis")
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}", _line_of(text, "axis", "sweep") or line)
        vals = sweep.get("values")
        if not isinstance(vals, list) or len(vals) < 1:
            raise ConfigError("sweep.values must be a non-empty list", _line_of(text, "values", "sweep") or line)
        diffs = [b - a for a, b in zip(vals[:-1], vals[1:])]
        if not (all(x > 0 for x in diffs) or all(x < 0 for x in diffs)):
            raise ConfigError("sweep.values must be strictly monotone", _line_of(text, "values", "sweep") or line)
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
            raise ConfigError("sweep.values must be finite numbers", _line_of(text, "values", "sweep") or line)
    scen = Scenario(sim, pulse, outputs, sweep, doc)
    if sweep is not None and pulse is not None:
        try:
            for _ in scen.points():
                pass
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sweep: {exc}", _line_of(text, "sweep")) from None
    return scen


def load_scenario(path, need_pulse: bool = True) -> Scenario:
    with open(path) as fh:
        return parse_scenario(fh.read(), need_pulse)
