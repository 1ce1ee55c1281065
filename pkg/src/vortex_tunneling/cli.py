"""Command-line front end: simulate, sweep, estimate, instanton, fermions, verify."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .adiabatic import operating_conditions
from .config import ConfigError, config_hash, load_scenario
from .observables import simulate

DEFAULT_MATERIAL = {"d_nm": 10.0, "xi_nm": 30.0, "delta_nm": 100.0, "gap_kelvin": 10.0,
                    "l_x_um": 1.0, "t_p_s": 1e-9}


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serialisable: {type(x)}")


def _load_doc(path):
    if path is None:
        return {}
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno) from None


def _run_point(sim, pulse, outputs, tol, threads):
    if tol is not None:
        sim = replace(sim, tol=tol)
    sim = sim.with_window(pulse)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        pred = operating_conditions(pulse, sim)
    res = simulate(sim, pulse, workers=threads, dt=outputs.get("dt"))
    ratio = res.n_transported / pred.n_transported_pred if pred.n_transported_pred else math.nan
    extra = {"prediction": pred.to_dict(), "measured_over_predicted": ratio,
             "pulse": pulse.to_dict(), "sim": {k: v for k, v in sim.__dict__.items()}}
    return res, extra


def cmd_simulate(args) -> int:
    scen = load_scenario(args.config)
    meta = {"config_hash": scen.hash}
    res, extra = _run_point(scen.sim, scen.pulse, scen.outputs, args.tol, args.threads)
    out = Path(args.out)
    doc = json.loads(res.to_json(meta))
    doc.update(extra)
    _write(out / "summary.json", _dump(doc))
    _write(out / "timeseries.csv", res.to_csv(meta))
    if scen.outputs.get("modes"):
        _write(out / "modes.csv", res.modes_csv(meta))
    print(f"n_transported = {res.n_transported:.6e}  predicted = "
          f"{extra['prediction']['n_transported_pred']:.6e}  "
          f"max drift = {res.diagnostics['max_wronskian_drift']:.2e}")
    return 0


def cmd_sweep(args) -> int:
    scen = load_scenario(args.config)
    if not scen.sweep:
        raise ConfigError("config has no sweep section")
    meta = {"config_hash": scen.hash}
    out = Path(args.out)
    axis = scen.sweep["axis"]
    rows = []
    for i, (val, sim, pulse) in enumerate(scen.points()):
        res, extra = _run_point(sim, pulse, scen.outputs, args.tol, args.threads)
        pm = dict(meta, sweep_axis=axis, sweep_value=val)
        doc = json.loads(res.to_json(pm))
        doc.update(extra)
        _write(out / f"point_{i:03d}.json", _dump(doc))
        _write(out / f"point_{i:03d}.csv", res.to_csv(pm))
        rows.append({
            axis: float(val),
            "n_transported": res.n_transported,
            "n_predicted": extra["prediction"]["n_transported_pred"],
            "ratio": extra["measured_over_predicted"],
            "n_total_final": float(res.n_total[-1]),
            "max_mode_occupation": res.max_mode_occupation,
            "max_wronskian_drift": res.diagnostics["max_wronskian_drift"],
        })
        print(f"{axis}={val}: N={res.n_transported:.6e} ratio={rows[-1]['ratio']:.4f}")
    buf = io.StringIO()
    buf.write(f"# version={__version__}\n# config_hash={scen.hash}\n")
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) for k, v in r.items()})
    _write(out / "sweep.csv", buf.getvalue())
    agg = {"version": __version__, "config_hash": scen.hash, "axis": axis, "points": rows}
    if len(rows) >= 2:
        x = np.array([r[axis] for r in rows])
        agg["slope_measured"] = float(np.polyfit(x, np.log(np.abs([r["n_transported"] for r in rows])), 1)[0])
        agg["slope_predicted"] = float(np.polyfit(x, np.log(np.abs([r["n_predicted"] for r in rows])), 1)[0])
    _write(out / "sweep.json", _dump(agg))
    return 0


def cmd_estimate(args) -> int:
    from .estimates import check_conditions
    from .params import UM, MaterialParams

    doc = _load_doc(args.config)
    cfg = dict(DEFAULT_MATERIAL, **doc.get("estimate", {}))
    unknown = set(cfg) - set(DEFAULT_MATERIAL) - {"much_greater", "gap_reduction_override"}
    if unknown:
        raise ConfigError(f"unknown estimate keys {sorted(unknown)}")
    mat = MaterialParams.from_lab_units(cfg["d_nm"], cfg["xi_nm"], cfg["delta_nm"], cfg["gap_kelvin"])
    kw = {k: cfg[k] for k in ("much_greater", "gap_reduction_override") if k in cfg}
    rep = check_conditions(mat, cfg["l_x_um"] * UM, cfg["t_p_s"], **kw)
    print(rep.format())
    out = {"version": __version__, "config_hash": config_hash(cfg), "input": cfg, "report": rep.to_dict()}
    _write(Path(args.out) / "estimate.json", _dump(out))
    return 0


def cmd_instanton(args) -> int:
    from . import instanton

    doc = _load_doc(args.config).get("instanton", {})
    values = doc.get("ml", [100.0, 400.0, 1600.0])
    fermion = doc.get("fermion")
    rows = []
    for a in values:
        r = instanton.saddle(float(a), 1.0).to_dict()
        r["ml"] = float(a)
        if fermion:
            l_x = float(fermion.get("l_x", 1.0))
            kw = {k: fermion[k] for k in ("k_f", "omega0_0", "d", "c_coeff") if k in fermion}
            r["effective"] = instanton.minimize_effective_action(float(a) / l_x, l_x, **kw).to_dict()
        rows.append(r)
        print(f"ML={a:g}: v_E*={r['v_e_star']:.6g} s_e-ML={r['s_e'] - a:.6g}")
    out = {"version": __version__, "config_hash": config_hash(doc), "saddles": rows}
    _write(Path(args.out) / "instanton.json", _dump(out))
    return 0


def cmd_fermions(args) -> int:
    from . import fermions

    doc = _load_doc(args.config).get("fermions", {})
    band = fermions.CoreBand(doc.get("gap", 0.2), doc.get("v_f", 1.0), doc.get("k_f", 1.0))
    pv = doc.get("velocity", {"kind": "gaussian", "amplitude": 0.4, "t0": 0.0, "width": 3.0})
    v = fermions.VelocityProfile(**pv)
    t_end = float(doc.get("t_end", 25.0))
    n_phi = int(doc.get("n_phi", 64))
    d = float(doc.get("d", 0.1))
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    occ = fermions.vlasov_evolve(phi, np.array([0.0]), v, band, t_end)
    ana = -fermions.edge_shift(phi, t_end, v, band)
    head = f"# version={__version__}\n# config_hash={config_hash(doc)}\n"
    lines = [head + "phi,l_edge_analytic,l_edge_characteristics"]
    lines += [f"{p!r},{a!r},{c!r}" for p, a, c in zip(phi.tolist(), ana.tolist(), occ.boundary.tolist())]
    _write(Path(args.out) / "boundary.csv", "\n".join(lines) + "\n")
    period = 2.0 * math.pi / band.omega0_0
    t = np.linspace(0.0, float(doc.get("periods", 3.0)) * period, int(doc.get("n_t", 301)))
    px, py = fermions.momentum_transfer(v.displacement, t, band, d)
    lines = [head + "t,p_x,p_y"] + [f"{a!r},{b!r},{c!r}" for a, b, c in zip(t.tolist(), px.tolist(), py.tolist())]
    _write(Path(args.out) / "momentum.csv", "\n".join(lines) + "\n")
    err = float(np.max(np.abs(occ.boundary - ana)) / band.k_perp(0.0))
    print(f"edge agreement (units of k_perp): {err:.3e}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verify

    results = run_verify(args.suite)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    if args.out:
        doc = {"version": __version__, "suite": args.suite,
               "results": [r.__dict__ for r in results], "passed": ok}
        _write(Path(args.out) / f"verify_{args.suite}.json", _dump(doc))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vortex-tunneling", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_config):
        p.add_argument("--config", required=need_config, help="JSON scenario file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
        p.add_argument("--tol", type=float, default=None, help="override integrator tolerance")

    for name, fn, need in (("simulate", cmd_simulate, True), ("sweep", cmd_sweep, True),
                           ("estimate", cmd_estimate, False), ("instanton", cmd_instanton, False),
                           ("fermions", cmd_fermions, False)):
        p = sub.add_parser(name)
        common(p, need)
        p.set_defaults(func=fn)
    p = sub.add_parser("verify")
    from .verify import SUITES

    p.add_argument("suite", nargs="?", default="all", choices=["all", *SUITES])
    common(p, False)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
