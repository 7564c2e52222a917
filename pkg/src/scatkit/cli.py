"""Command-line front end: named experiments over diagram/packet/model files.

Every run writes <name>.report.json (verdicts, fits, residuals, plus the
fully resolved option set) and <name>.csv (plot data).  Reports are
byte-stable for a fixed spec and seed: no timestamps, sorted keys, plain
repr floats.  Exit codes: 0 experiment completed (verdicts may still be
negative), 1 computation error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import degree as degree_mod
from .classical import correspondence_compare, packet_density
from .diagram import load_diagram, load_kconfig
from .errors import CliConfigError, ScatkitError
from .fits import fit_falloff
from .fourvector import FourVector
from .landau import SolverOptions, classify_point, sample_surface
from .packets import BumpProfile, MomentumWavePacket
from .transforms import (
    HoleSpec,
    MuForm,
    ScatteringModelF,
    TRSampleGrid,
    TSampleGrid,
    cone_split,
    inverse_F,
    sample_T_line,
    split_F,
)
from .wavepacket import QuadOptions, falloff_fit

KINDS = ("analyze", "scan-surface", "falloff", "transform", "mc-compare", "degree")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    kind: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CliConfigError(f"unknown experiment kind {self.kind!r}")


def emit_plotdata(table) -> bytes:
    """CSV bytes: header row then numeric rows; NaN serialized as 'nan'."""
    header, rows = table
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        out = []
        for cell in row:
            if isinstance(cell, float) and math.isnan(cell):
                out.append("nan")
            else:
                out.append(repr(cell) if isinstance(cell, float) else cell)
        writer.writerow(out)
    return buf.getvalue().encode("utf-8")


def parse_plotdata(raw: bytes):
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
    return rows[0], rows[1:]


def _read(path: str) -> bytes:
    p = Path(path)
    if not p.exists():
        raise CliConfigError(f"input file not found: {path}")
    return p.read_bytes()


def load_keyvalue(raw: bytes | str) -> dict:
    """Flat key = value config; '#' starts a comment."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    out = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def load_packet_config(raw: bytes | str) -> MomentumWavePacket:
    """Packet from flat keys: m, pbar (4 comma-separated reals), gamma, r1,
    r2, dim."""
    kv = load_keyvalue(raw)
    try:
        m = float(kv["m"])
        pbar = FourVector(*(float(c) for c in kv["pbar"].split(",")))
        gamma = float(kv.get("gamma", "0"))
        r1 = float(kv["r1"])
        r2 = float(kv["r2"])
        dim = int(kv.get("dim", "3"))
    except KeyError as exc:
        raise CliConfigError(f"packet config missing key {exc}") from exc
    except ValueError as exc:
        raise CliConfigError(f"bad packet config value: {exc}") from exc
    try:
        return MomentumWavePacket(m, pbar, gamma, BumpProfile(r1, r2), dim)
    except ValueError as exc:
        raise CliConfigError(str(exc)) from exc


def load_model_config(raw: bytes | str) -> tuple[ScatteringModelF, MuForm, dict]:
    """Transform model from flat keys: kind, l, R1, R2, eps, q0, mu (comma
    separated diagonal quadratic coefficients), plus grid controls."""
    kv = load_keyvalue(raw)
    try:
        kind = kv.get("kind", "bump")
        l = int(kv.get("l", "1"))
        envelope = None
        if "R1" in kv or "R2" in kv:
            envelope = BumpProfile(float(kv["R1"]), float(kv["R2"]))
        model = ScatteringModelF(
            kind,
            l,
            envelope=envelope,
            q0=float(kv.get("q0", "0")),
            eps=float(kv.get("eps", "0.05")),
        )
        mu_coeffs = [float(c) for c in kv.get("mu", ",".join(["1.0"] * l)).split(",")]
        mu = MuForm.diagonal_quadratic(mu_coeffs)
    except (KeyError, ValueError) as exc:
        raise CliConfigError(f"bad model config: {exc}") from exc
    return model, mu, kv


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not serializable: {type(obj)}")


def _write_outputs(spec: ExperimentSpec, out_dir: Path, report: dict, table) -> None:
    report = dict(report)
    report["experiment"] = {
        "name": spec.name,
        "kind": spec.kind,
        "inputs": dict(sorted(spec.inputs.items())),
        "options": dict(sorted(spec.options.items())),
        "seed": spec.seed,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{spec.name}.report.json").write_bytes(
        json.dumps(report, sort_keys=True, indent=1, default=_json_default).encode("utf-8")
    )
    (out_dir / f"{spec.name}.csv").write_bytes(emit_plotdata(table))


# ---------------------------------------------------------------------------
# Experiment bodies
# ---------------------------------------------------------------------------


def _solver_options(spec: ExperimentSpec) -> SolverOptions:
    o = spec.options
    return SolverOptions(
        max_iters=int(o.get("max_iters", 400)),
        starts=int(o.get("starts", 16)),
        tol_feas=float(o.get("tol_feas", 1e-8)),
        alpha_min=float(o.get("alpha_min", 1e-10)),
        seed=spec.seed,
    )


def _run_degree(spec: ExperimentSpec):
    n_l = int(spec.options["nl"])
    n_v = int(spec.options["nv"])
    deg = degree_mod.degree(n_l, n_v)
    model = degree_mod.local_model(deg)
    report = {
        "d": str(deg.d),
        "d_float": float(deg.d),
        "kind": model.kind,
        "epsilon_rule": model.epsilon_rule,
    }
    rows = [[float(n_l), float(n_v), float(deg.d)]]
    return report, (["n_lines", "n_vertices", "degree"], rows)


def _run_analyze(spec: ExperimentSpec):
    d = load_diagram(_read(spec.inputs["diagram"]))
    K = load_kconfig(_read(spec.inputs["k"]))
    catalog = [d] + [load_diagram(_read(p)) for p in spec.inputs.get("catalog", "").split(";") if p]
    opts = _solver_options(spec)
    cls = classify_point(catalog, K, opts)
    report = {
        "verdict": cls.verdict,
        "singular": list(cls.singular),
        "unknown": list(cls.unknown),
        "results": [r.to_dict() for r in cls.results],
    }
    rows = [
        [float(i), 1.0 if r.feasible else 0.0, r.residual, float(r.iterations)]
        for i, r in enumerate(cls.results)
    ]
    return report, (["diagram", "feasible", "residual", "iterations"], rows)


def _run_scan_surface(spec: ExperimentSpec):
    d = load_diagram(_read(spec.inputs["diagram"]))
    count = int(spec.options.get("count", 10))
    samples = sample_surface(d, count, spec.seed, _solver_options(spec))
    report = {
        "requested": count,
        "returned": len(samples),
        "budget_exhausted": samples.budget_exhausted,
    }
    header = ["sample"] + [f"k{i}_{c}" for i in range(d.n_external) for c in "txyz"]
    rows = []
    for j, K in enumerate(samples):
        row = [float(j)]
        for k in K:
            row += [k.t, k.x, k.y, k.z]
        rows.append(row)
    return report, (header, rows)


def _run_falloff(spec: ExperimentSpec):
    packet = load_packet_config(_read(spec.inputs["packet"]))
    u = FourVector(*(float(c) for c in spec.options["u"].split(",")))
    gamma = float(spec.options.get("gamma", packet.gamma))
    tau_min = float(spec.options.get("tau_min", 10.0))
    tau_max = float(spec.options.get("tau_max", 100.0))
    points = int(spec.options.get("points", 12))
    taus = np.geomspace(tau_min, tau_max, points)
    quad = QuadOptions(
        nodes_per_period=float(spec.options.get("nodes_per_period", 16.0)),
        min_nodes=int(spec.options.get("min_nodes", 64)),
    )
    pk = packet.with_gamma(gamma)
    from .wavepacket import evaluate_position

    mags = [abs(evaluate_position(pk, u * t, t, quad)) for t in taus]
    fit = fit_falloff(taus, mags, gamma=gamma)
    rows = [[float(t), float(m)] for t, m in zip(taus, mags)]
    return {"fit": fit.to_dict()}, (["tau", "magnitude"], rows)


def _run_transform(spec: ExperimentSpec):
    model, mu, kv = load_model_config(_read(spec.inputs["model"]))
    experiment = spec.options.get("experiment", "roundtrip")
    if model.l != 1:
        raise CliConfigError("transform experiments run at l = 1")
    v_max = float(kv.get("v_max", 300.0))
    h = float(kv.get("v_step", 0.08))
    if experiment == "roundtrip":
        v = np.arange(-v_max, v_max + h / 2, h)
        grid = TSampleGrid([v], sample_T_line(model, mu, v, [0.0]))
        qs = np.linspace(-0.8 * (model.support_radius() or 1.0), 0.8 * (model.support_radius() or 1.0), 17)
        rows = []
        worst = 0.0
        for q in qs:
            rec = inverse_F(grid, [q]).value
            ref = complex(model.value([[q]]))
            err = abs(rec - ref)
            worst = max(worst, err)
            rows.append([float(q), rec.real, rec.imag, ref.real, ref.imag, err])
        report = {"max_error": worst, "passed": worst <= 1e-6}
        return report, (["q", "rec_re", "rec_im", "ref_re", "ref_im", "abs_err"], rows)
    if experiment == "split":
        gamma0 = float(spec.options.get("gamma0", 0.5))
        box = float(kv.get("split_box", 60.0))
        hs = float(kv.get("split_step", 0.03))
        vs = np.arange(-box + hs / 2, box, hs)
        r_axis = np.arange(0.0, gamma0 * box + 1.0, 0.05)
        trs = TRSampleGrid(vs, r_axis, sample_T_line(model, mu, vs, r_axis))
        v = np.arange(-v_max, v_max + h / 2, h)
        grid = TSampleGrid([v], sample_T_line(model, mu, v, [0.0]))
        rows = []
        worst = 0.0
        for q in np.linspace(-0.2, 0.2, 9):
            s = split_F(trs, mu, gamma0, [q])
            direct = inverse_F(grid, [q]).value
            err = abs(s.total - direct)
            worst = max(worst, err)
            rows.append([float(q), s.F1.real, s.F1.imag, s.F2.real, s.F2.imag, err])
        report = {"max_error": worst, "gamma0": gamma0, "passed": worst <= 1e-5}
        return report, (["q", "F1_re", "F1_im", "F2_re", "F2_im", "abs_err"], rows)
    if experiment == "cone":
        if model.kind != "pole":
            raise CliConfigError("cone experiment expects a pole model")
        hs = float(kv.get("cone_step", 0.004))
        vfull = np.arange(-v_max + hs / 2, v_max, hs)
        grid = TSampleGrid([vfull], model.pole_T(vfull))
        hole = HoleSpec([1.0], float(spec.options.get("theta", 0.4)))
        rows = []
        worst = 0.0
        for q in np.linspace(-0.4, 0.4, 9):
            res = cone_split(grid, hole, [q])
            ref = 1.0 / (q - model.q0 + 1j * model.eps)
            err = abs(res.total - ref)
            worst = max(worst, err)
            rows.append([float(q), res.F_H.real, res.F_H.imag, res.F_A.real, res.F_A.imag, err])
        inside = cone_split(grid, hole, [0.05 + 0.02j])
        outside = cone_split(grid, hole, [0.05 - 0.02j])
        report = {
            "max_error": worst,
            "convergent_inside": inside.convergent,
            "convergent_outside": outside.convergent,
            "passed": worst <= 1e-4 and inside.convergent and not outside.convergent,
        }
        return report, (["q", "FH_re", "FH_im", "FA_re", "FA_im", "abs_err"], rows)
    raise CliConfigError(f"unknown transform experiment {experiment!r}")


def _run_mc_compare(spec: ExperimentSpec):
    packet = load_packet_config(_read(spec.inputs["packet"]))
    d = load_diagram(_read(spec.inputs["diagram"]))
    from .diagram import validate_diagram

    rep = validate_diagram(d)
    if not rep.valid:
        raise CliConfigError("diagram invalid: " + "; ".join(rep.violations))
    taus = np.array([float(t) for t in spec.options["tau_grid"].split(",")])
    count = int(spec.options.get("count", 200000))
    quad = QuadOptions(
        nodes_per_period=float(spec.options.get("nodes_per_period", 16.0)),
        min_nodes=int(spec.options.get("min_nodes", 64)),
    )
    # on-cone: classical density exponent vs doubled quantum amplitude power
    from .classical import propagated_density_estimate

    u_dir = np.zeros(3)
    u_dir[0] = float(spec.options.get("u_oncone", 0.1))
    ests = []
    rows = []
    for i, t in enumerate(taus):
        rho = packet_density(packet.with_gamma(0.0), t)
        est, err = propagated_density_estimate(
            rho, u_dir, t, count=count, seed=spec.seed + i, ball_radius=math.sqrt(t)
        )
        ests.append(est)
        rows.append([float(t), est, err])
    cfit = fit_falloff(taus, ests, gamma=0.0)
    v = FourVector(math.sqrt(1.0 + float(u_dir @ u_dir)), *u_dir)
    qfit = falloff_fit(packet, v, taus, gamma=0.0, opts=quad)
    comparison = correspondence_compare(cfit, qfit)
    report = {
        "classical_fit": cfit.to_dict(),
        "quantum_fit": qfit.to_dict(),
        "comparison": comparison.to_dict(),
        "diagram_loops": rep.loops,
    }
    return report, (["tau", "classical_density", "stat_err"], rows)


_BODIES = {
    "degree": _run_degree,
    "analyze": _run_analyze,
    "scan-surface": _run_scan_surface,
    "falloff": _run_falloff,
    "transform": _run_transform,
    "mc-compare": _run_mc_compare,
}


def run(spec: ExperimentSpec, out_dir: str | Path = ".") -> int:
    """Execute one experiment; returns the process exit code."""
    out = Path(out_dir)
    try:
        report, table = _BODIES[spec.kind](spec)
    except CliConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ScatkitError, ValueError, KeyError) as exc:
        print(f"computation error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    _write_outputs(spec, out, report, table)
    return 0


# ---------------------------------------------------------------------------
# argparse wiring
# ---------------------------------------------------------------------------


def _common(sub):
    sub.add_argument("--name", default=None, help="experiment name (output prefix)")
    sub.add_argument("--out-dir", default=".", help="directory for report and CSV")
    sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatkit", description=__doc__)
    subs = ap.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("analyze", help="classify a momentum configuration against a catalog")
    sp.add_argument("--diagram", required=True)
    sp.add_argument("--k", required=True)
    sp.add_argument("--catalog", nargs="*", default=[])
    sp.add_argument("--starts", type=int, default=16)
    _common(sp)

    sp = subs.add_parser("scan-surface", help="sample realizable momentum configurations")
    sp.add_argument("--diagram", required=True)
    sp.add_argument("--count", type=int, default=10)
    _common(sp)

    sp = subs.add_parser("falloff", help="fit the decay law of a packet magnitude")
    sp.add_argument("--packet", required=True)
    sp.add_argument("--u", required=True, help="t,x,y,z displacement direction")
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--tau-min", type=float, default=10.0)
    sp.add_argument("--tau-max", type=float, default=100.0)
    sp.add_argument("--points", type=int, default=12)
    _common(sp)

    sp = subs.add_parser("transform", help="reduced-transform experiments")
    sp.add_argument("--model", required=True)
    sp.add_argument("--experiment", choices=["roundtrip", "split", "cone"], default="roundtrip")
    _common(sp)

    sp = subs.add_parser("mc-compare", help="classical-vs-quantum decay comparison")
    sp.add_argument("--packet", required=True)
    sp.add_argument("--diagram", required=True)
    sp.add_argument("--tau-grid", required=True, help="comma-separated tau values")
    sp.add_argument("--count", type=int, default=200000)
    _common(sp)

    sp = subs.add_parser("degree", help="singularity degree from line/vertex counts")
    sp.add_argument("--nl", type=int, required=True)
    sp.add_argument("--nv", type=int, required=True)
    _common(sp)
    return ap


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    kind = args.command
    name = args.name or kind.replace("-", "_")
    inputs = {}
    options = {}
    if kind == "analyze":
        inputs = {"diagram": args.diagram, "k": args.k}
        if args.catalog:
            inputs["catalog"] = ";".join(args.catalog)
        options["starts"] = args.starts
    elif kind == "scan-surface":
        inputs = {"diagram": args.diagram}
        options["count"] = args.count
    elif kind == "falloff":
        inputs = {"packet": args.packet}
        options["u"] = args.u
        if args.gamma is not None:
            options["gamma"] = args.gamma
        options["tau_min"] = args.tau_min
        options["tau_max"] = args.tau_max
        options["points"] = args.points
    elif kind == "transform":
        inputs = {"model": args.model}
        options["experiment"] = args.experiment
    elif kind == "mc-compare":
        inputs = {"packet": args.packet, "diagram": args.diagram}
        options["tau_grid"] = args.tau_grid
        options["count"] = args.count
    elif kind == "degree":
        options = {"nl": args.nl, "nv": args.nv}
    return ExperimentSpec(name=name, kind=kind, inputs=inputs, options=options, seed=args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
    except CliConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(spec, out_dir=args.out_dir)


if __name__ == "__main__":
    sys.exit(main())
