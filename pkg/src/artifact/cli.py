"""Command-line front end: deterministic CSV outputs, JSON manifests, SVG plots."""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, jacobi, ltratio, schrodinger
from .errors import ArtifactError, ConfigError

COMMANDS = ("schrodinger-spectrum", "jacobi-spectrum", "ratio-sweep", "sharpness",
            "sum-plan", "selftest")

# keys accepted per command (from flags or the config file)
KEYS = {
    "schrodinger-spectrum": {"d", "p", "h", "alpha", "beta", "gamma", "eps", "g", "w",
                             "j_cap", "max_modes", "workers"},
    "jacobi-spectrum": {"n", "g", "gamma"},
    "ratio-sweep": {"kind", "f", "h", "n", "d", "p", "alpha", "beta", "gamma", "eps", "g",
                    "w", "j_cap", "max_modes", "jacobi_eps"},
    "sharpness": {"kind", "h", "n", "d", "p", "phi", "beta", "gamma", "g", "j_cap",
                  "max_modes"},
    "sum-plan": {"f", "eps", "p", "d", "n0", "n_terms", "checkpoints"},
    "selftest": {"seed"},
}
COMMON = {"out", "plot", "config"}


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _floats(s):
    if isinstance(s, (list, tuple)):
        return [float(x) for x in s]
    try:
        return [float(x) for x in str(s).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad number list {s!r}") from None


def _ints(s):
    vals = _floats(s)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {s!r}")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with parameters; flags override it")
        p.add_argument("--out", help="CSV path (default: <command>.csv)")
        p.add_argument("--plot", action="store_true", default=None, help="also write an SVG")
        return p

    def windows(p):
        p.add_argument("--alpha", help="alpha(h) spec, e.g. loglog_over_log:0.02")
        p.add_argument("--beta", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--g", help="g(h) spec, e.g. inv_loglog:2.5")
        p.add_argument("--w", help="w(h) spec")
        p.add_argument("--j-cap", dest="j_cap", choices=sorted(schrodinger.J_CAPS))
        p.add_argument("--max-modes", dest="max_modes", type=int)

    p = common(sub.add_parser("schrodinger-spectrum"))
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--h", help="comma-separated couplings")
    p.add_argument("--workers", type=int)
    windows(p)

    p = common(sub.add_parser("jacobi-spectrum"))
    p.add_argument("--n", type=int)
    p.add_argument("--g", help="g(n) spec: const:c, loglog, log:c, pow:c,e")
    p.add_argument("--gamma", type=float)

    p = common(sub.add_parser("ratio-sweep"))
    p.add_argument("--kind", choices=["schrodinger_decreasing", "schrodinger_increasing",
                                      "jacobi_decreasing", "jacobi_increasing"])
    p.add_argument("--f", help="weight: const:c, exp_decay:k, exp_growth:x, tab:t,f;...")
    p.add_argument("--h")
    p.add_argument("--n")
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--jacobi-eps", dest="jacobi_eps", type=float)
    windows(p)

    p = common(sub.add_parser("sharpness"))
    p.add_argument("--kind", choices=["cone", "diamond"])
    p.add_argument("--h")
    p.add_argument("--n")
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--phi", choices=["default", "critical"])
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--g")
    p.add_argument("--j-cap", dest="j_cap", choices=sorted(schrodinger.J_CAPS))
    p.add_argument("--max-modes", dest="max_modes", type=int)

    p = common(sub.add_parser("sum-plan"))
    p.add_argument("--f")
    p.add_argument("--eps", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--n0", type=int)
    p.add_argument("--n-terms", dest="n_terms", type=float)
    p.add_argument("--checkpoints", type=int)

    p = common(sub.add_parser("selftest"))
    p.add_argument("--seed", type=int)
    return ap


def resolve(args) -> dict:
    """Merge the config file with the flags (flags win) and reject unknown keys."""
    cmd = args.command
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg.pop("command", None)
        bad = set(cfg) - KEYS[cmd] - COMMON
        if bad:
            raise ConfigError(f"unknown config keys for {cmd}: {sorted(bad)}")
    for k, v in vars(args).items():
        if k in ("command", "config") or v is None:
            continue
        cfg[k] = v
    return cfg


def _windows(cfg, sharp=False):
    base = ltratio.sharp_windows() if sharp else schrodinger.ParameterWindows()
    kw = {}
    for key, attr in (("alpha", "alpha_of_h"), ("g", "g_of_h"), ("w", "w_of_h")):
        if key in cfg:
            kw[attr] = cfg[key]
    for key in ("beta", "gamma", "eps"):
        if key in cfg:
            kw[key] = float(cfg[key])
    if "beta" in kw and "eps" not in kw:
        kw["eps"] = 2 * kw["beta"]
    if not kw:
        return base
    d = dict(alpha_of_h=base.alpha_of_h, beta=base.beta, gamma=base.gamma, eps=base.eps,
             g_of_h=base.g_of_h, w_of_h=base.w_of_h)
    d.update(kw)
    return schrodinger.ParameterWindows(**d)


# ---------------------------------------------------------------------------
# commands: each returns (columns, rows, meta, plot points)

def cmd_schrodinger(cfg):
    d = int(cfg.get("d", 2))
    p = float(cfg.get("p", 2.0))
    hs = _floats(cfg.get("h", "1e4"))
    win = _windows(cfg)
    cap = cfg.get("j_cap", "lam_safe")
    mm = cfg.get("max_modes", 3000)
    workers = int(cfg.get("workers", 1))
    cols = ["h", "ell", "j", "nu", "multiplicity", "weight", "count", "re_m", "im_m",
            "re_lambda", "im_lambda", "residual", "admissible", "status"]
    rows, pts = [], []
    for h in hs:
        conf = schrodinger.SchrodingerConfig(d=d, h=h, p=p)
        recs = schrodinger.enumerate_spectrum(conf, win, cap, mm, workers=workers)
        for r in recs:
            rows.append([h, r.ell, r.j, r.nu, r.multiplicity, r.weight, r.count, r.m.real,
                         r.m.imag, r.lam.real, r.lam.imag, r.residual, r.admissible, r.status])
            if r.admissible:
                pts.append((r.lam.real / h, r.lam.imag / h))
    meta = {"windows": win.describe(), "axes": "Re lambda / h, Im lambda / h"}
    return cols, rows, meta, pts


def cmd_jacobi(cfg):
    n = int(cfg.get("n", 1000))
    conf = jacobi.JacobiConfig(n=n, gamma=float(cfg.get("gamma", 0.8)),
                               g_of_n=cfg.get("g", "loglog"))
    recs = jacobi.solve_window(conf)
    cols = ["j", "re_z", "im_z", "re_lambda", "im_lambda", "residual", "kj_abs", "admissible"]
    rows = [[r.j, r.z.real, r.z.imag, r.lam.real, r.lam.imag, r.residual, r.kj_abs,
             r.admissible] for r in recs]
    win = jacobi.mode_window(n, conf.gamma, conf.g_of_n)
    meta = {"window": [win.j_lo, win.j_hi], "g": conf.g(), "eigenvalues": sum(r.eigenvalue for r in recs),
            "axes": "Re lambda, Im lambda"}
    pts = [(r.lam.real, r.lam.imag) for r in recs if r.eigenvalue]
    return cols, rows, meta, pts


def cmd_ratio(cfg):
    kind = cfg.get("kind", "schrodinger_decreasing")
    f = ltratio.WeightFunction.parse(cfg.get("f", "const:1"))
    p = float(cfg.get("p", 2.0 if kind.startswith("schrodinger") else 1.0))
    if kind.startswith("schrodinger"):
        sweep = _floats(cfg.get("h", "1e4,1e5,1e6"))
        reps = ltratio.divergence_experiment(
            kind, sweep, f, _windows(cfg), d=int(cfg.get("d", 2)), p=p,
            j_cap_policy=cfg.get("j_cap", "admissible"), max_modes=cfg.get("max_modes", 3000))
        par = "h"
    else:
        sweep = _ints(cfg.get("n", "500,1000,2000,4000"))
        reps = ltratio.divergence_experiment(kind, sweep, f, p=p,
                                             gamma=float(cfg.get("gamma", 0.8)),
                                             g_of_n=jacobi._as_g(cfg.get("g", "loglog")),
                                             eps=cfg.get("jacobi_eps"))
        par = "n"
    cols = [par, "ratio", "predictor", "ratio_over_predictor"]
    rows = [[r.parameter, r.ratio_value, r.lower_bound_predictor, r.per_point] for r in reps]
    meta = {"slope": reps.slope, "note": ltratio.LOWER_BOUND_NOTE,
            "axes": f"log10 {par}, ratio"}
    pts = [(math.log10(r.parameter), r.ratio_value) for r in reps]
    return cols, rows, meta, pts


def cmd_sharpness(cfg):
    kind = cfg.get("kind", "cone")
    crit = cfg.get("phi", "default") == "critical"
    p = float(cfg.get("p", 2.0 if kind == "cone" else 1.0))
    if kind == "cone":
        sweep = _floats(cfg.get("h", "1e4,1e5,1e6,1e7"))
        win = _windows(cfg, sharp=True)
        phi = ltratio.phi_cone_critical if crit else ltratio.phi_cone_default
        reps = ltratio.sharpness_experiment("cone", sweep, phi=phi, d=int(cfg.get("d", 2)), p=p,
                                            windows=win, j_cap_policy=cfg.get("j_cap", "admissible"),
                                            max_modes=cfg.get("max_modes", 3000))
        par = "h"
    else:
        sweep = _ints(cfg.get("n", "500,1000,2000,4000"))
        phi = ltratio.phi_diamond_critical if crit else ltratio.phi_diamond_default
        reps = ltratio.sharpness_experiment("diamond", sweep, phi=phi, p=p,
                                            gamma=float(cfg.get("gamma", 0.8)),
                                            g_of_n=jacobi._as_g(cfg.get("g", "loglog")))
        par = "n"
    cols = [par, "sum_over_phi", "growth_predictor", "mode_count"]
    rows = [[r.parameter, r.ratio_value, r.lower_bound_predictor, r.mode_count] for r in reps]
    vals = [r.ratio_value for r in reps]
    meta = {"strictly_increasing": all(b > a for a, b in zip(vals, vals[1:])),
            "axes": f"log10 {par}, sum / phi"}
    pts = [(math.log10(r.parameter), r.ratio_value) for r in reps]
    return cols, rows, meta, pts


def cmd_sumplan(cfg):
    f = ltratio.WeightFunction.parse(cfg.get("f", "const:1"))
    plan = ltratio.sum_construction_plan(f, float(cfg.get("eps", 0.4)), float(cfg.get("p", 2.0)),
                                         int(cfg.get("d", 2)), int(cfg.get("n0", 2)),
                                         float(cfg.get("n_terms", 1e24)),
                                         int(cfg.get("checkpoints", 40)))
    cols = ["n", "c_n", "k_log_n", "K_log_n", "S_A", "S_B"]
    rows = [[r.n, r.c_n, r.k, r.K, r.S_A, r.S_B] for r in plan.rows]
    meta = {"tail_fraction_B": plan.tail_fraction_B, "sqrtF_max": plan.sqrtF_max,
            "axes": "log10 n, S_A"}
    pts = [(math.log10(r.n), r.S_A) for r in plan.rows]
    return cols, rows, meta, pts


def cmd_selftest(cfg):
    from . import selftest
    results = selftest.run(seed=int(cfg.get("seed", 0)))
    cols = ["check", "passed", "detail"]
    rows = [[name, ok, detail] for name, ok, detail in results]
    meta = {"all_passed": all(ok for _, ok, _ in results)}
    return cols, rows, meta, []


HANDLERS = {"schrodinger-spectrum": cmd_schrodinger, "jacobi-spectrum": cmd_jacobi,
            "ratio-sweep": cmd_ratio, "sharpness": cmd_sharpness, "sum-plan": cmd_sumplan,
            "selftest": cmd_selftest}


# ---------------------------------------------------------------------------
# output

def _csv_field(v) -> str:
    s = fmt(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def write_csv(path: Path, command: str, cfg: dict, cols, rows, meta):
    # worker count and output paths do not change results; they stay in the manifest
    echo = {k: v for k, v in sorted(cfg.items()) if k not in ("out", "plot", "workers")}
    lines = [f"# command: {command}",
             f"# config: {json.dumps(echo, sort_keys=True, default=str)}",
             f"# meta: {json.dumps(meta, sort_keys=True, default=fmt)}",
             f"# columns: {', '.join(cols)}",
             ",".join(cols)]
    lines += [",".join(_csv_field(v) for v in row) for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_svg(path: Path, pts, title: str, axes: str):
    W, H, pad = 640, 480, 50
    pts = [(x, y) for x, y in pts if math.isfinite(x) and math.isfinite(y)]
    out = [f'<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<text x="{W // 2}" y="{H - 10}" text-anchor="middle" font-size="12">{axes}</text>',
           f'<rect x="{pad}" y="{pad}" width="{W - 2 * pad}" height="{H - 2 * pad}" '
           'fill="none" stroke="black"/>']
    if pts:
        xs, ys = np.array(pts).T
        x0, x1 = xs.min(), xs.max()
        y0, y1 = ys.min(), ys.max()
        sx = (W - 2 * pad) / (x1 - x0 if x1 > x0 else 1)
        sy = (H - 2 * pad) / (y1 - y0 if y1 > y0 else 1)
        for x, y in pts:
            cx = pad + (x - x0) * sx
            cy = H - pad - (y - y0) * sy
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="steelblue"/>')
        out.append(f'<text x="{pad}" y="{H - pad + 15}" font-size="10">{x0:.4g}</text>')
        out.append(f'<text x="{W - pad}" y="{H - pad + 15}" text-anchor="end" font-size="10">{x1:.4g}</text>')
        out.append(f'<text x="{pad - 4}" y="{H - pad}" text-anchor="end" font-size="10">{y0:.4g}</text>')
        out.append(f'<text x="{pad - 4}" y="{pad + 10}" text-anchor="end" font-size="10">{y1:.4g}</text>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


def run(command: str, cfg: dict) -> int:
    unknown = set(cfg) - KEYS[command] - COMMON
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {sorted(unknown)}")
    out = Path(cfg.get("out") or f"{command}.csv")
    if not out.parent.exists():
        raise ConfigError(f"output directory {out.parent} does not exist")
    t0 = time.perf_counter()
    cols, rows, meta, pts = HANDLERS[command](cfg)
    elapsed = time.perf_counter() - t0
    write_csv(out, command, cfg, cols, rows, meta)
    files = [out.name]
    if cfg.get("plot"):
        svg = out.with_suffix(".svg")
        write_svg(svg, pts, command, meta.get("axes", ""))
        files.append(svg.name)
    manifest = {"command": command, "config": {k: v for k, v in sorted(cfg.items())},
                "versions": {"artifact": __version__, "numpy": np.__version__,
                             "scipy": scipy.__version__, "python": platform.python_version()},
                "timings_s": {"compute": elapsed}, "rows": len(rows), "files": files,
                "meta": meta}
    out.with_suffix(".json").write_text(json.dumps(manifest, indent=2, sort_keys=True,
                                                   default=fmt) + "\n", encoding="utf-8")
    if command == "selftest" and not meta["all_passed"]:
        return 3
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve(args)
        return run(args.command, cfg)
    except ArtifactError as e:
        rec = {"error": type(e).__name__, "message": str(e), "exit_code": e.exit_code}
        print(json.dumps(rec), file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
