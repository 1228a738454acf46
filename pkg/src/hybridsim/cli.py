"""Command-line entry point: builders, sweeps, simulation, reconstruction, metrics.

Artifacts are plain CSV/JSON with stable formatting; identical argv + seed
produce byte-identical outputs.  Wall-clock timestamps appear only in the run
manifest.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import fock, homodyne, metrics, states, teleamp, tomography
from .fock import DensityOp, Ket

SCHEMA_VERSION = 1

DEFAULTS = {
    "efficiency_pre": homodyne.DEFAULT_EFFICIENCY_PRE,
    "efficiency_symmetric": homodyne.DEFAULT_EFFICIENCY_SYMMETRIC,
    "n_phases": homodyne.DEFAULT_N_PHASES,
    "n_samples": homodyne.DEFAULT_N_SAMPLES,
    "grid_points": homodyne.DEFAULT_GRID_POINTS,
    "mode1_dim": 3,
    "mode2_dim_small_alpha": 30,
    "mode2_dim_large_alpha": 50,
    "tomo_dims": (3, 10),
    "tomo_bin_width": 0.2,
    "tomo_x_range": 6.0,
    "tomo_max_iter": 2000,
    "tomo_tol": 1e-9,
    "teleamp_dims": teleamp.DEFAULT_DIMS,
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path: str, fieldnames, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in fieldnames) + "\n")


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(path: str, command: str, params: dict, outputs: list[str]) -> None:
    write_json(path, {
        "schema": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    })


def parse_range(text: str) -> list[float]:
    """start:stop:step (inclusive of start, exclusive of stop + step/2), or one value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise argparse.ArgumentTypeError("step must be positive")
    vals = []
    k = 0
    while True:
        v = start + k * step
        if v >= stop + step / 2:
            break
        vals.append(round(v, 12))
        k += 1
    return vals


def parse_dims(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(","))


def out_dir_override(path: str) -> str:
    env = os.environ.get("HYBRIDSIM_OUT")
    if env and not os.path.isabs(path):
        return os.path.join(env, path)
    return path


def load_state(path: str):
    with open(path, encoding="utf-8") as fh:
        return fock.from_json_dict(json.load(fh))


def _as_density(obj) -> DensityOp:
    if isinstance(obj, Ket):
        return DensityOp.from_ket(obj)
    if isinstance(obj, DensityOp):
        return obj
    raise ValueError("expected a state (ket or density matrix) JSON")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state_build(args) -> int:
    dims2 = states.default_mode2_dim(max(args.alpha_i, args.alpha, args.alpha_f_prime))
    params: dict = {"kind": args.kind}
    if args.kind == "coherent":
        ket = fock.coherent(args.alpha, args.dim or dims2)
        params.update(alpha=args.alpha, dim=args.dim or dims2)
    elif args.kind == "pacs":
        ket = states.photon_added_coherent(args.alpha, args.n_add, args.dim or dims2)
        params.update(alpha=args.alpha, n_add=args.n_add, dim=args.dim or dims2)
    elif args.kind == "hybrid-pre":
        dims = args.dims or states.default_dims(args.alpha_i)
        ket = states.hybrid_pre(args.alpha_i, args.phi, dims)
        params.update(alpha_i=args.alpha_i, phi=args.phi, dims=list(dims))
    elif args.kind == "hybrid-sym":
        dims = args.dims or states.default_dims(args.alpha_i)
        ket, hp = states.hybrid_symmetric(args.alpha_i, dims, args.phi)
        params.update(alpha_i=args.alpha_i, phi=args.phi, dims=list(dims),
                      g=hp.g, t=hp.t, r=hp.r, alpha_f=hp.alpha_f)
    elif args.kind == "ideal-hybrid":
        dims = args.dims or (3, states.default_mode2_dim(abs(args.alpha)))
        ket = states.ideal_hybrid(args.alpha, dims)
        params.update(alpha=args.alpha, dims=list(dims))
    elif args.kind == "ecs":
        dims = args.dims or (states.default_mode2_dim(args.alpha_f),
                             states.default_mode2_dim(args.alpha_f_prime))
        ket = states.ecs(args.alpha_f, args.alpha_f_prime, dims)
        params.update(alpha_f=args.alpha_f, alpha_f_prime=args.alpha_f_prime,
                      dims=list(dims))
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.kind)
    out = out_dir_override(args.out)
    obj = fock.to_json_dict(DensityOp.from_ket(ket) if args.density else ket)
    write_json(out, obj)
    write_manifest(out + ".manifest.json", "state build", params, [out])
    print(f"wrote {out}")
    return 0


def cmd_sweep_fidelity_small(args) -> int:
    rows = states.sweep_fidelity_small(args.alpha_f, search=args.search)
    out = out_dir_override(args.out)
    write_csv(out, ["alpha_f", "alpha_i", "F_mapped", "F_search", "diff"], rows)
    write_manifest(out + ".manifest.json", "sweep fidelity-small",
                   {"alpha_f": args.alpha_f, "search": args.search}, [out])
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_sweep_teleamp(args) -> int:
    rows = teleamp.sweep_teleamp(args.alpha_i, args.alpha_f_prime, dims=args.dims)
    out = out_dir_override(args.out)
    write_csv(out, ["alpha_i", "alpha_f", "alpha_f_prime",
                    "F_closed", "F_oracle", "P_closed", "P_oracle"], rows)
    write_manifest(out + ".manifest.json", "sweep teleamp",
                   {"alpha_i": args.alpha_i, "alpha_f_prime": args.alpha_f_prime,
                    "dims": list(args.dims)}, [out])
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_npt_curve(args) -> int:
    rows = metrics.npt_curve(args.alpha_i)
    out = out_dir_override(args.out)
    write_csv(out, ["alpha_i", "npt", "dim_mode2"], rows)
    write_manifest(out + ".manifest.json", "npt curve",
                   {"alpha_i": args.alpha_i}, [out])
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_homodyne_simulate(args) -> int:
    rho = _as_density(load_state(args.state))
    grid = homodyne.QuadGrid(homodyne.default_half_width(max(args.alpha_hint, 0.0)),
                             args.grid_points)
    config = homodyne.HomodyneConfig(
        phases=tuple(homodyne.default_phases(args.n_phases)),
        n_samples=args.samples, efficiency=args.efficiency,
        seed=args.seed, grid=grid)
    data = homodyne.sample(rho, config)
    out = out_dir_override(args.out)
    write_csv(out, ["event_id", "theta", "x1", "x2"],
              ({"event_id": int(r["event_id"]), "theta": float(r["theta"]),
                "x1": float(r["x1"]), "x2": float(r["x2"])} for r in data))
    sidecar = {
        "state_file": os.path.basename(args.state),
        "efficiency": args.efficiency,
        "seed": args.seed,
        "phases": [float(p) for p in config.phases],
        "state_phase_set": [float(p) for p in config.state_phase_set],
        "n_samples": args.samples,
        "grid_half_width": grid.half_width,
        "grid_points": grid.n_points,
    }
    write_json(out + ".meta.json", sidecar)
    write_manifest(out + ".manifest.json", "homodyne simulate", sidecar,
                   [out, out + ".meta.json"])
    print(f"wrote {out} ({args.samples} events)")
    return 0


def read_dataset(path: str) -> np.ndarray:
    raw = np.genfromtxt(path, delimiter=",", names=True)
    if raw.size == 0:
        raise ValueError(f"no rows in {path}")
    out = np.empty(raw.size, dtype=homodyne.SAMPLE_DTYPE)
    for name in ("event_id", "theta", "x1", "x2"):
        out[name] = raw[name]
    return out


def cmd_tomo_reconstruct(args) -> int:
    data = read_dataset(args.data)
    config = tomography.TomoConfig(
        dims=args.dims, phases=tuple(sorted(set(np.round(data["theta"], 12)))),
        bin_width=args.bin_width, x_range=args.x_range,
        efficiency=args.efficiency, max_iter=args.max_iter, tol=args.tol,
        dilution=args.dilution)
    result = tomography.reconstruct(data, config)
    out = out_dir_override(args.out)
    write_json(out, fock.to_json_dict(result.rho))
    report = {
        "iterations": result.iterations,
        "converged": result.converged,
        "final_loglik": result.loglik_trace[-1],
        "dims": list(args.dims),
        "efficiency": args.efficiency,
    }
    write_json(args.report or out + ".report.json", report)
    write_manifest(out + ".manifest.json", "tomo reconstruct", report, [out])
    print(f"wrote {out} (iterations={result.iterations}, converged={result.converged})")
    return 0


def cmd_metric_npt(args) -> int:
    rho = _as_density(load_state(args.state))
    print(_fmt(metrics.npt(rho, args.mode)))
    return 0


def cmd_metric_fidelity(args) -> int:
    rho = _as_density(load_state(args.state))
    target = load_state(args.target)
    if not isinstance(target, Ket):
        raise ValueError("--target must be a ket JSON")
    print(_fmt(metrics.fidelity(rho, target)))
    return 0


def cmd_metric_wigner(args) -> int:
    obj = load_state(args.state)
    rho = _as_density(obj)
    if rho.shape.n_modes == 2:
        rho, _ = metrics.condition_on_mode1(rho, args.condition)
    w = metrics.wigner(rho, -args.x_range, args.x_range, -args.x_range, args.x_range,
                       args.points, args.points)
    out = out_dir_override(args.out)
    rows = [{"x": x, "p": p, "w": w.values[i, j]}
            for i, x in enumerate(w.xs) for j, p in enumerate(w.ps)]
    write_csv(out, ["x", "p", "w"], rows)
    write_manifest(out + ".manifest.json", "metric wigner",
                   {"x_range": args.x_range, "points": args.points}, [out])
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# verify all
# ---------------------------------------------------------------------------

def _check(report: list, name: str, passed: bool, detail: str) -> None:
    report.append({"check": name, "passed": bool(passed), "detail": detail})


def cmd_verify_all(args) -> int:
    out_dir = out_dir_override(args.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    path = lambda name: os.path.join(out_dir, name)
    outputs: list[str] = []
    report: list[dict] = []

    # 1. gain / photon-addition fidelity points
    g2 = states.gain(1, 2.0)
    f2, f4 = states.fidelity_pacs_coherent(2.0), states.fidelity_pacs_coherent(4.0)
    num2 = metrics.state_fidelity(fock.coherent(g2 * 2.0, 60),
                                  states.photon_added_coherent(2.0, 1, 60))
    g4 = states.gain(1, 4.0)
    num4 = metrics.state_fidelity(fock.coherent(g4 * 4.0, 80),
                                  states.photon_added_coherent(4.0, 1, 80))
    ok = (abs(g2 * 2 - 2.414) < 1e-3 and abs(f2 - 0.98) < 5e-3
          and abs(f4 - 0.998) < 1e-3 and abs(f2 - num2) < 1e-6
          and abs(f4 - num4) < 1e-6)
    _check(report, "gain-fidelity-points", ok,
           f"g*a={g2 * 2:.6f} F(2)={f2:.6f} F(4)={f4:.6f} |closed-num|={abs(f2 - num2):.2e}")

    # 2. symmetric-state fidelity points
    fa, afa = states.fidelity_symmetric(2.0)
    fb, afb = states.fidelity_symmetric(1.0)
    ok = (abs(fa - 0.991) < 2e-3 and abs(afa - 0.207) < 3e-3
          and abs(fb - 0.946) < 2e-3 and abs(afb - 0.309) < 3e-3)
    _check(report, "symmetric-fidelity-points", ok,
           f"ai=2: F={fa:.6f} af={afa:.6f}; ai=1: F={fb:.6f} af={afb:.6f}")

    # 3. superposed-operation route equals the direct construction
    worst = 1.0
    for ai in (0.5, 1.0, 1.4, 2.0):
        hp = states.HybridParams.balanced(ai)
        base = fock.tensor(fock.fock(0, 3), fock.coherent(ai, 30))
        route, _ = states.apply_superposed_addition(hp.r, hp.t, base)
        worst = min(worst, metrics.state_fidelity(route, states.hybrid_pre(ai, dims=(3, 30))))
    _check(report, "superposed-route-equals-direct", worst >= 1 - 1e-10,
           f"min fidelity {worst:.2e} to the direct construction")

    # 4. tele-amplification sweep (oracle vs closed forms, both outcomes)
    grid = parse_range("0.5:2.0:0.1")
    all_rows = {}
    tele_ok, eq_ok, cf_ok, dom_ok = True, True, True, True
    for ai, fname, floor in ((1.0, "teleamp_ai1.csv", 0.999), (2.0, "teleamp_ai2.csv", 0.9999)):
        rows = teleamp.sweep_teleamp(ai, grid)
        all_rows[ai] = rows
        f_small = states.fidelity_symmetric(ai)[0]
        for row in rows:
            p = teleamp.TeleampParams.for_target(ai, row["alpha_f_prime"])
            out10, _ = _teleamp_pair(p)
            tele_ok &= row["F_oracle"] > floor
            dom_ok &= row["F_oracle"] >= f_small
            cf = teleamp.teleamp_output_closed_form(p, dims=(3, teleamp.DEFAULT_DIMS[3]))
            cf_ok &= metrics.state_fidelity(cf, out10) >= 1 - 1e-6
        write_csv(path(fname),
                  ["alpha_i", "alpha_f", "alpha_f_prime",
                   "F_closed", "F_oracle", "P_closed", "P_oracle"], rows)
        outputs.append(path(fname))
        eq_ok &= _eq10_eq11_agreement(ai, grid) >= 1 - 1e-8
    disc = teleamp.discrepancy_report((1.0, 2.0), (0.5, 1.0, 1.5, 2.0))
    write_csv(path("teleamp_discrepancy.csv"), list(disc[0].keys()), disc)
    outputs.append(path("teleamp_discrepancy.csv"))
    _check(report, "teleamp-oracle-fidelity", tele_ok,
           f"min F_oracle ai=1: {min(r['F_oracle'] for r in all_rows[1.0]):.6f}, "
           f"ai=2: {min(r['F_oracle'] for r in all_rows[2.0]):.6f}")
    _check(report, "teleamp-outcome-equivalence", eq_ok, "|<out10|out01>| >= 1 - 1e-8")
    _check(report, "teleamp-closed-form-state", cf_ok, "closed form vs oracle >= 1 - 1e-6")
    _check(report, "teleamp-distillation-dominance", dom_ok, "F' >= F(alpha_i) on the grid")

    # 5. NPT suite
    prod = DensityOp.from_ket(states.ideal_hybrid(0.0, (3, 10)))
    bell_amps = np.zeros((3, 3), dtype=complex)
    bell_amps[0, 0] = bell_amps[1, 1] = 1 / math.sqrt(2)
    bell = DensityOp.from_ket(fock.Ket(fock.ModeShape((3, 3)), bell_amps.ravel()))
    pre = states.hybrid_pre(1.4, dims=(3, 30))
    sym = states.hybrid_symmetric(1.4, dims=(3, 30))[0]
    n_pre = metrics.npt(DensityOp.from_ket(pre))
    n_sym = metrics.npt(DensityOp.from_ket(sym))
    curve = metrics.npt_curve(parse_range("1.4:3.25:0.05") + [3.25])
    write_csv(path("npt_curve.csv"), ["alpha_i", "npt", "dim_mode2"], curve)
    outputs.append(path("npt_curve.csv"))
    conv = abs(metrics.npt(DensityOp.from_ket(states.hybrid_pre(2.0, dims=(3, 30))))
               - metrics.npt(DensityOp.from_ket(states.hybrid_pre(2.0, dims=(3, 60)))))
    ok = (metrics.npt(prod) < 1e-10 and abs(metrics.npt(bell) - 0.5) < 1e-10
          and abs(n_pre - n_sym) < 1e-8 and conv < 1e-6
          and all(r["npt"] > 0 for r in curve))
    _check(report, "npt-suite", ok,
           f"bell={metrics.npt(bell):.12f} pre={n_pre:.8f} sym={n_sym:.8f} "
           f"truncation drift={conv:.2e}")

    # 6. convention checks (sampled variance, Wigner points, marginal)
    vac = DensityOp.from_ket(fock.tensor(fock.fock(0, 2), fock.fock(0, 2)))
    cfg = homodyne.HomodyneConfig(n_samples=100_000, seed=args.seed,
                                  grid=homodyne.QuadGrid(homodyne.default_half_width(0.0)))
    data = homodyne.sample(vac, cfg)
    var = float(np.var(data["x1"]))
    w_vac = metrics.wigner_point(DensityOp.from_ket(fock.fock(0, 10)), 0.0, 0.0)
    w_one = metrics.wigner_point(DensityOp.from_ket(fock.fock(1, 10)), 0.0, 0.0)
    rho_pre = DensityOp.from_ket(states.hybrid_pre(1.4, dims=(3, 25)))
    cond0, _ = metrics.condition_on_mode1(rho_pre, 0)
    cond1, _ = metrics.condition_on_mode1(rho_pre, 1)
    l1 = _wigner_marginal_l1(cond0)
    for name, cond in (("wigner_vacuum_branch.csv", cond0),
                       ("wigner_photon_branch.csv", cond1)):
        w = metrics.wigner(cond, n_x=121, n_p=121)
        rows = [{"x": x, "p": p, "w": w.values[i, j]}
                for i, x in enumerate(w.xs) for j, p in enumerate(w.ps)]
        write_csv(path(name), ["x", "p", "w"], rows)
        outputs.append(path(name))
    ok = (abs(var - 0.5) < 0.01 and abs(w_vac - 1 / math.pi) < 1e-6
          and abs(w_one + 1 / math.pi) < 1e-6 and l1 < 1e-4)
    _check(report, "convention-checks", ok,
           f"var={var:.4f} W_vac(0,0)={w_vac:.8f} W_1(0,0)={w_one:.8f} marginal L1={l1:.2e}")

    # 7. small-hybrid fidelity sweep (fig 2a data)
    rows = states.sweep_fidelity_small(parse_range("0.05:0.45:0.01"), search="alpha-i")
    write_csv(path("fig2a.csv"), ["alpha_f", "alpha_i", "F_mapped", "F_search", "diff"], rows)
    outputs.append(path("fig2a.csv"))
    worst = max(abs(r["diff"]) for r in rows)
    _check(report, "fig2a-map-vs-search", worst < 1e-4, f"max |diff| = {worst:.2e}")

    # theory density matrix for the density-bar figure, cropped to the
    # reconstruction dimensions (the discarded tail is renormalized away)
    pre_big = states.hybrid_pre(1.4, dims=(3, 30))
    pre_small = fock.crop_mode(pre_big, 1, 10, rel_tol=1e-2).normalize()
    write_json(path("rho_hybrid_pre.json"),
               fock.to_json_dict(DensityOp.from_ket(pre_small)))
    outputs.append(path("rho_hybrid_pre.json"))

    write_json(path("verify_report.json"), report)
    outputs.append(path("verify_report.json"))
    write_manifest(path("manifest.json"), "verify all", {"seed": args.seed}, outputs)

    width = max(len(r["check"]) for r in report)
    for r in report:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"{r['check']:<{width}}  {status}  {r['detail']}")
    n_fail = sum(not r["passed"] for r in report)
    print(f"{len(report) - n_fail}/{len(report)} checks passed")
    return 0 if n_fail == 0 else 1


def _teleamp_pair(p: teleamp.TeleampParams):
    d1, d2, d3, d2p = teleamp.DEFAULT_DIMS
    psi_s = states.hybrid_displaced(p.alpha_i, p.alpha_f, dims=(d1, d2))
    channel = states.ecs(p.alpha_f, p.alpha_f_prime, dims=(d3, d2p))
    return teleamp.bell_project(psi_s, channel, (1, 0))


def _eq10_eq11_agreement(alpha_i: float, grid) -> float:
    d1, d2, d3, d2p = teleamp.DEFAULT_DIMS
    worst = 1.0
    for afp in grid:
        p = teleamp.TeleampParams.for_target(alpha_i, afp)
        psi_s = states.hybrid_displaced(p.alpha_i, p.alpha_f, dims=(d1, d2))
        channel = states.ecs(p.alpha_f, p.alpha_f_prime, dims=(d3, d2p))
        out10, _ = teleamp.bell_project(psi_s, channel, (1, 0))
        out01, _ = teleamp.bell_project(psi_s, channel, (0, 1))
        worst = min(worst, abs(fock.overlap(out10, out01)))
    return worst


def _wigner_marginal_l1(rho_single: DensityOp) -> float:
    w = metrics.wigner(rho_single, n_x=161, n_p=321)
    marg = w.marginal_x()
    grid = homodyne.QuadGrid(6.0, 161)
    pdf = homodyne.quad_pdf_single(rho_single, 0.0, grid)
    return float(np.trapezoid(np.abs(marg - pdf), w.xs))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hybridsim",
        description="Hybrid-entanglement simulation toolkit "
                    "(states, tele-amplification, homodyne tomography)")
    ap.add_argument("--show-defaults", action="store_true",
                    help="print the physical defaults table and exit")
    sub = ap.add_subparsers(dest="group")

    st = sub.add_parser("state", help="state builders").add_subparsers(dest="action")
    b = st.add_parser("build", help="build a named state and dump it as JSON")
    b.add_argument("--kind", required=True,
                   choices=["coherent", "pacs", "hybrid-pre", "hybrid-sym",
                            "ideal-hybrid", "ecs"])
    b.add_argument("--alpha", type=float, default=0.0)
    b.add_argument("--alpha-i", type=float, default=0.0)
    b.add_argument("--alpha-f", type=float, default=0.0)
    b.add_argument("--alpha-f-prime", type=float, default=0.0)
    b.add_argument("--phi", type=float, default=0.0)
    b.add_argument("--n-add", type=int, default=1)
    b.add_argument("--dim", type=int, default=None)
    b.add_argument("--dims", type=parse_dims, default=None)
    b.add_argument("--density", action="store_true",
                   help="dump the density matrix instead of the ket")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_state_build)

    sw = sub.add_parser("sweep", help="parameter sweeps").add_subparsers(dest="action")
    fs = sw.add_parser("fidelity-small", help="small-hybrid fidelity vs alpha_f")
    fs.add_argument("--alpha-f", type=parse_range, required=True)
    fs.add_argument("--search", choices=["alpha-i", "free"], default="alpha-i")
    fs.add_argument("--out", required=True)
    fs.set_defaults(func=cmd_sweep_fidelity_small)
    ts = sw.add_parser("teleamp", help="tele-amplification fidelity and success probability")
    ts.add_argument("--alpha-i", type=float, required=True)
    ts.add_argument("--alpha-f-prime", type=parse_range, required=True)
    ts.add_argument("--dims", type=parse_dims, default=teleamp.DEFAULT_DIMS)
    ts.add_argument("--out", required=True)
    ts.set_defaults(func=cmd_sweep_teleamp)

    np_ = sub.add_parser("npt", help="entanglement negativity").add_subparsers(dest="action")
    nc = np_.add_parser("curve", help="NPT of the pre-displacement hybrid vs alpha_i")
    nc.add_argument("--alpha-i", type=parse_range, required=True)
    nc.add_argument("--out", required=True)
    nc.set_defaults(func=cmd_npt_curve)

    hm = sub.add_parser("homodyne", help="quadrature acquisition").add_subparsers(dest="action")
    hs = hm.add_parser("simulate", help="sample heralded quadrature pairs from a state JSON")
    hs.add_argument("--state", required=True)
    hs.add_argument("--samples", type=int, default=homodyne.DEFAULT_N_SAMPLES)
    hs.add_argument("--efficiency", type=float, default=1.0)
    hs.add_argument("--seed", type=int, default=0)
    hs.add_argument("--n-phases", type=int, default=homodyne.DEFAULT_N_PHASES)
    hs.add_argument("--alpha-hint", type=float, default=2.0,
                    help="largest coherent amplitude in the state (sets the grid range)")
    hs.add_argument("--grid-points", type=int, default=homodyne.DEFAULT_GRID_POINTS)
    hs.add_argument("--out", required=True)
    hs.set_defaults(func=cmd_homodyne_simulate)

    tm = sub.add_parser("tomo", help="max-likelihood tomography").add_subparsers(dest="action")
    tr = tm.add_parser("reconstruct", help="reconstruct a two-mode state from a dataset CSV")
    tr.add_argument("--data", required=True)
    tr.add_argument("--dims", type=parse_dims, default=(3, 10))
    tr.add_argument("--bin-width", type=float, default=0.2)
    tr.add_argument("--x-range", type=float, default=6.0)
    tr.add_argument("--efficiency", type=float, default=1.0)
    tr.add_argument("--max-iter", type=int, default=2000)
    tr.add_argument("--tol", type=float, default=1e-9)
    tr.add_argument("--dilution", type=float, default=1.0)
    tr.add_argument("--report", default=None)
    tr.add_argument("--out", required=True)
    tr.set_defaults(func=cmd_tomo_reconstruct)

    mt = sub.add_parser("metric", help="figures of merit").add_subparsers(dest="action")
    mn = mt.add_parser("npt", help="negativity of the partial transpose")
    mn.add_argument("--state", required=True)
    mn.add_argument("--mode", type=int, default=1)
    mn.set_defaults(func=cmd_metric_npt)
    mf = mt.add_parser("fidelity", help="<psi|rho|psi> against a target ket")
    mf.add_argument("--state", required=True)
    mf.add_argument("--target", required=True)
    mf.set_defaults(func=cmd_metric_fidelity)
    mw = mt.add_parser("wigner", help="Wigner function on a grid, CSV output")
    mw.add_argument("--state", required=True)
    mw.add_argument("--condition", type=int, default=0,
                    help="for two-mode states: Fock outcome on mode 1")
    mw.add_argument("--x-range", type=float, default=6.0)
    mw.add_argument("--points", type=int, default=121)
    mw.set_defaults(func=cmd_metric_wigner)
    mw.add_argument("--out", required=True)

    vf = sub.add_parser("verify", help="closed-form vs oracle suite").add_subparsers(dest="action")
    va = vf.add_parser("all", help="run every check and emit the figure artifacts")
    va.add_argument("--out-dir", required=True)
    va.add_argument("--seed", type=int, default=0)
    va.set_defaults(func=cmd_verify_all)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.show_defaults:
        for key, value in DEFAULTS.items():
            print(f"{key} = {value}")
        return 0
    func = getattr(args, "func", None)
    if func is None:
        ap.print_help()
        return 2
    try:
        return func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
