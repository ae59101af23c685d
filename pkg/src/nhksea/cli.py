"""Command-line front end.

Each command writes one data file (CSV with a header, or JSON records) and
a JSON sidecar carrying the resolved configuration, version, wall time and
detected features. Exit codes: 0 success, 1 usage error, 2 failed validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from . import correlations, model, oracle, quench
from .errors import NhkseaError
from .model import THERMODYNAMIC, ModelParams
from .util import inclusive_range, parallel_map, resolve_threads

COMMANDS = ("spectrum", "phase-diagram", "ent-scan", "quench", "dqpt-map", "sigma-scan",
            "validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> np.ndarray:
    """``start:stop:step`` or a single number."""
    parts = str(text).split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    try:
        return inclusive_range(*vals)
    except NhkseaError as exc:
        raise UsageError(str(exc)) from exc


def parse_sites(text) -> int | str:
    t = str(text).strip().lower()
    if t in ("inf", THERMODYNAMIC):
        return THERMODYNAMIC
    try:
        return int(t)
    except ValueError as exc:
        raise UsageError(f"bad chain length {text!r}") from exc


def load_config(path: str) -> dict:
    """Read ``key = value`` lines (``#`` comments), or the config block of a sidecar."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if p.suffix == ".json":
        data = json.loads(text)
        cfg = data.get("config", data)
        return {k: v for k, v in cfg.items() if v is not None}
    out = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_table(path: Path, header, rows, fmt: str = "csv"):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        data = buf.getvalue()
    else:
        recs = [{h: _json_value(v) for h, v in zip(header, r)} for r in rows]
        data = json.dumps(recs, indent=1) + "\n"
    try:
        with open(path, "w", newline="") as f:
            f.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return _json_value(obj)


def version_string() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        return "unknown"


PLOT_STUB = '''"""Plot stub for {data}. Edit columns and labels as needed."""
import csv
import matplotlib.pyplot as plt

with open({data!r}) as f:
    rows = list(csv.DictReader(f))
cols = list(rows[0].keys())
x = [float(r[cols[0]]) for r in rows]
for c in cols[1:]:
    try:
        plt.plot(x, [float(r[c]) for r in rows], label=c)
    except ValueError:
        pass
plt.xlabel(cols[0])
plt.legend()
plt.savefig({png!r})
'''


def _params(a, h=None) -> ModelParams:
    return ModelParams(a.gamma, a.ksea, a.h if h is None else h, parse_sites(a.n))


def cmd_spectrum(a):
    p = _params(a)
    if a.phi:
        phi = parse_range(a.phi)
    elif p.thermodynamic:
        phi = np.linspace(0, np.pi, 201)[1:-1]
    else:
        phi = model.momentum_grid(p).angles
    eps = model.dispersion(p, phi)
    rows = [(f, e.real, e.imag, np.cos(f) - e.real, np.cos(f) + e.real) for f, e in zip(phi, eps)]
    lab = model.classify_phase(p)
    win = model.broken_momentum_window(p)
    feats = {"region": lab.region.value, "boundary_fields": lab.boundary_fields,
             "broken_window": list(win) if win else None}
    return ["phi", "re_eps", "im_eps", "re_lower", "re_upper"], rows, feats


def cmd_phase_diagram(a):
    gs, ks, hs = parse_range(a.gamma_range), parse_range(a.ksea_range), parse_range(a.h_range)
    cells = [(g, k, h) for g in gs for k in ks for h in hs]

    def one(c):
        p = ModelParams(c[0], c[1], c[2], THERMODYNAMIC)
        lab = model.classify_phase(p)
        bf = lab.h_ep if lab.h_ep is not None else lab.h_f
        return (c[0], c[1], c[2], lab.region.value, model.min_dispersion_squared(p),
                np.nan if bf is None else bf,
                np.nan if lab.hermitian_h_f is None else lab.hermitian_h_f)

    rows = parallel_map(one, cells, a.threads)
    counts = {}
    for r in rows:
        counts[r[3]] = counts.get(r[3], 0) + 1
    return (["gamma", "ksea", "h", "region", "min_eps2", "h_boundary", "hermitian_h_f"], rows,
            {"region_counts": counts})


def cmd_ent_scan(a):
    hs = parse_range(a.h)
    scan = correlations.entanglement_scan(_params(a, h=hs[0]), hs, threads=a.threads)
    rows = list(zip(scan.h, scan.E, scan.dEdh))
    kinks = [{"h": k.position, "strength": k.strength} for k in scan.kinks]
    return ["h", "E", "dEdh"], rows, {"kinks": kinks}


def _spec(a, h0=None, h1=None):
    n = parse_sites(a.n)
    return quench.QuenchSpec.from_fields(a.gamma, a.ksea, a.h0 if h0 is None else h0,
                                         a.h1 if h1 is None else h1, n, a.tmax, a.dt)


def cmd_quench(a):
    spec = _spec(a)
    res = quench.rate_function_series(spec)
    t, lam = res.series.times, res.series.values
    header, cols = ["t"], [t]
    if not spec.params1.thermodynamic:
        header.append("LE")
        cols.append(np.exp(-spec.params1.n_sites * lam))
    header.append("lambda")
    cols.append(lam)
    if a.entanglement:
        header.append("E")
        cols.append(quench.entanglement_series(spec, t).values)
    feats = {"cusps": [{"t": c.time, "predicted": c.predicted, "family": c.family,
                        "strength": c.strength} for c in res.cusps],
             "outside_derivation": spec.outside_derivation}
    if res.prediction is not None:
        feats["critical_angles"] = res.prediction.critical_angles
        feats["critical_times"] = res.prediction.critical_times
    return header, list(zip(*cols)), feats


def cmd_dqpt_map(a):
    h0r = [float(x) for x in a.h0_range.split(":")[:2]]
    h1r = [float(x) for x in a.h1_range.split(":")[:2]]
    qm = quench.quadrant_map(a.gamma, a.ksea, h0r, h1r, a.resolution, a.threads)
    rows = [(qm.h0[i], qm.h1[j], int(qm.n_roots[i, j]), bool(qm.cusp[i, j]))
            for i in range(len(qm.h0)) for j in range(len(qm.h1))]
    feats = {"quadrant_fraction": {q: qm.fraction(q) for q in ("I", "II", "III", "IV")}}
    return ["h0", "h1", "n_roots", "cusp"], rows, feats


def cmd_sigma_scan(a):
    vals = parse_range(a.values)
    fixed = a.h0 if a.vary == "h1" else a.h1
    tmpl = _spec(a, h0=fixed if a.vary == "h1" else vals[0], h1=fixed if a.vary == "h0" else vals[0])

    def one(v):
        s = _spec(a, h0=tmpl.params0.h if a.vary == "h1" else v,
                  h1=tmpl.params1.h if a.vary == "h0" else v)
        r = quench.sigma_report(s, a.tavg, a.tburn, a.dt)
        return (v, r.sigma, r.mean, r.mean_sq, r.literal)

    rows = parallel_map(one, vals, a.threads)
    sig = np.array([r[1] for r in rows])
    d2 = np.abs(np.diff(sig, 2))
    peak = float(vals[int(np.argmax(d2)) + 1]) if len(d2) else None
    return [a.vary, "sigma", "mean_E", "mean_E2", "literal"], rows, {"curvature_peak": peak}


def run_validation(n: int = 8, seed: int = 0):
    """Oracle suite as (name, value, tolerance) triples."""
    rng = np.random.default_rng(seed)
    checks = []
    sizes = [m for m in (4, 6, 8, 10) if m <= max(n, 4)]
    for m in sizes:
        for g, k, h in ((0.5, 0.75, 1.5), (1.0, 0.75, 0.6)):
            p = ModelParams(g, k, h, m)
            dev = oracle.match_spectra(oracle.block_spectrum(p),
                                       oracle.ed_fermion_hamiltonian(p).even_spectrum)
            checks.append((f"spectrum N={m} g={g} K={k} h={h}", dev, 1e-10))
    for g, k, h in ((0.5, 0.75, 0.5), (1.0, 0.75, 0.6)):
        p = ModelParams(g, k, h, n)
        checks.append((f"entanglement N={n} g={g} K={k} h={h}",
                       abs(oracle.ed_entanglement(p) - correlations.entanglement(p)), 1e-6))
    spec = quench.QuenchSpec.from_fields(0.5, 1.0, 5.0, 0.5, n)
    for t in (0.0, 0.4, 1.3):
        d = np.max(np.abs(oracle.ed_evolved_correlators(spec.params0, spec.params1, t).as_array()
                          - quench.evolved_correlators(spec, t).as_array()))
        checks.append((f"evolved correlators t={t}", d, 1e-8))
    s2 = quench.QuenchSpec.from_fields(0.5, 0.75, 0.4, 1.5, n)
    for t in (0.7, 3.0):
        ref = oracle.ed_loschmidt_overlap(s2.params0, s2.params1, t)
        checks.append((f"echo product formula vs dense overlap t={t}",
                       abs(quench.loschmidt_product(s2, t) - ref), 1e-10))
        ref = oracle.ed_loschmidt_overlap(s2.params0, s2.params1, t, normalized=True)
        checks.append((f"normalized echo vs dense overlap t={t}",
                       abs(quench.loschmidt_echo(s2, t) - ref), 1e-10))
        fac = np.prod(quench.echo_factors(s2, t))
        checks.append((f"normalized echo vs per-block factors t={t}", abs(fac - ref), 1e-10))
    worst = 0.0
    for _ in range(50):
        p = ModelParams(rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(-2, 2), 8)
        phi, t = rng.uniform(0.01, np.pi - 0.01), rng.uniform(0, 3)
        blk = model.block_hamiltonian(p, phi)
        st = quench.BlockState(phi, *np.exp(1j * rng.uniform(0, 6, 2)) / np.sqrt(2))
        raw = np.array(quench.evolve_block(blk, st, t).raw)
        worst = max(worst, np.max(np.abs(raw - oracle.dense_block_propagator(blk.matrix, t)
                                         @ st.vector)))
    checks.append(("block propagator vs dense exponential", worst, 1e-12))
    checks.append(("effective Hamiltonian N=4",
                   oracle.effective_hamiltonian_check(0.3, 0.2, 0.7, 4, tol=np.inf), 1e-12))
    g, k = 0.3, 0.4
    hf = math.sqrt(1 - g * g - k * k)
    m = oracle.ksea_product_minimization(g, k, hf)
    checks.append(("product-state minimum at h_f", abs(m.delta_min - m.delta_g), 1e-8))
    return checks


def cmd_validate(a):
    checks = run_validation(a.n_validate)
    rows = [(name, val, tol, bool(val <= tol)) for name, val, tol in checks]
    ok = all(r[3] for r in rows)
    return ["check", "value", "tolerance", "passed"], rows, {"all_passed": ok}


HANDLERS = {"spectrum": cmd_spectrum, "phase-diagram": cmd_phase_diagram,
            "ent-scan": cmd_ent_scan, "quench": cmd_quench, "dqpt-map": cmd_dqpt_map,
            "sigma-scan": cmd_sigma_scan, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nhksea", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value file (or a sidecar JSON); flags override it")
        p.add_argument("--out", help="data file path (default <command>.<format>)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default NONHERM_THREADS or 1)")
        p.add_argument("--emit-plot-script", action="store_true",
                       help="also write a matplotlib stub that reads the CSV")

    def model_args(p, field=True):
        p.add_argument("--gamma", type=float, default=0.5)
        p.add_argument("--ksea", type=float, default=0.75)
        p.add_argument("--n", default="5000", help="even chain length or 'inf'")
        if field:
            p.add_argument("--h", type=float, default=1.0)

    p = sub.add_parser("spectrum", help="dispersion over momentum")
    model_args(p)
    p.add_argument("--phi", help="start:stop:step angles (default: chain momenta)")
    common(p)

    p = sub.add_parser("phase-diagram", help="region labels over (gamma, K, h)")
    p.add_argument("--gamma-range", default="0:1.5:0.05")
    p.add_argument("--ksea-range", default="0:1.5:0.05")
    p.add_argument("--h-range", default="0:2:0.1")
    common(p)

    p = sub.add_parser("ent-scan", help="nearest-neighbour entanglement versus h")
    model_args(p, field=False)
    p.add_argument("--h", default="0:2:0.005", help="start:stop:step")
    common(p)

    def quench_args(p):
        p.add_argument("--gamma", type=float, default=0.1)
        p.add_argument("--ksea", type=float, default=0.2)
        p.add_argument("--n", default="5000")
        p.add_argument("--h0", type=float, default=0.4)
        p.add_argument("--h1", type=float, default=1.5)
        p.add_argument("--tmax", type=float, default=50.0)

    p = sub.add_parser("quench", help="Loschmidt echo and rate function after a quench")
    quench_args(p)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--entanglement", action="store_true", help="add the E(t) column")
    common(p)

    p = sub.add_parser("dqpt-map", help="critical-momentum existence on an (h0, h1) grid")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--ksea", type=float, default=0.2)
    p.add_argument("--h0-range", default="0:2")
    p.add_argument("--h1-range", default="0:2")
    p.add_argument("--resolution", type=int, default=20)
    common(p)

    p = sub.add_parser("sigma-scan", help="long-time entanglement fluctuation versus a field")
    quench_args(p)
    p.set_defaults(gamma=0.5, ksea=1.0, n="2000", h0=5.0, h1=5.0)
    p.add_argument("--vary", choices=("h0", "h1"), default="h1")
    p.add_argument("--values", default="0.2:2:0.05", help="start:stop:step of the varied field")
    p.add_argument("--tavg", type=float, default=500.0)
    p.add_argument("--tburn", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=0.05)
    common(p)

    p = sub.add_parser("validate", help="run the exact-diagonalization cross-checks")
    p.add_argument("--n", dest="n_validate", type=int, default=8)
    common(p)
    return ap


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        cfg = load_config(args.config)
        cfg.pop("command", None)
        sp_ = ap._subparsers._group_actions[0].choices[args.command]
        dests = {a.dest for a in sp_._actions}
        unknown = set(cfg) - dests
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = {k: (str(v) if not isinstance(v, bool) else v) for k, v in cfg.items()
               if k not in ("config", "out", "format", "emit_plot_script")}
        sp_.set_defaults(**cfg)
        args = ap.parse_args(argv)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    t0 = time.perf_counter()
    try:
        args = _parse(argv)
        args.threads = resolve_threads(args.threads)
        header, rows, feats = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"nhksea: usage error: {exc}", file=sys.stderr)
        return 1
    except NhkseaError as exc:
        print(f"nhksea: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out or f"{args.command}.{args.format}")
    try:
        write_table(out, header, rows, args.format)
        side = out.with_suffix(".meta.json") if args.format == "json" else out.with_suffix(".json")
        config = {k: v for k, v in vars(args).items() if k not in ("config",)}
        meta = {"command": args.command, "config": config, "version": version_string(),
                "wall_time_s": time.perf_counter() - t0, "features": feats,
                "columns": header, "rows": len(rows)}
        side.write_text(json.dumps(_jsonable(meta), indent=1, sort_keys=True) + "\n")
        if args.emit_plot_script:
            stub = out.with_name(out.stem + "_plot.py")
            stub.write_text(PLOT_STUB.format(data=str(out), png=str(out.with_suffix(".png"))))
    except (OSError, UsageError) as exc:
        print(f"nhksea: cannot write output: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate" and not feats["all_passed"]:
        for r in rows:
            if not r[3]:
                print(f"FAILED {r[0]}: {r[1]:.3e} > {r[2]:.1e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
