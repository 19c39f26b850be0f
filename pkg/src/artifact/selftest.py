"""Quick invariant suites behind the `selftest` command (no extra dependencies)."""
from __future__ import annotations

import math

import numpy as np

from . import jacobi, ltratio, schrodinger, specfun
from .errors import OracleMismatch


def _wronskian(rng, k=200):
    worst = 0.0
    for _ in range(k):
        nu = rng.uniform(0, 30)
        z = complex(rng.uniform(1, 60), rng.uniform(-5, 5))
        J = specfun.bessel_j(nu, z).to_complex()
        Y = specfun.bessel_y(nu, z).to_complex()
        dJ = specfun.d_bessel_j(nu, z).to_complex()
        dY = specfun.d_bessel_y(nu, z).to_complex()
        w = (J * dY - dJ * Y) * math.pi * z / 2
        scale = abs(J * dY) + abs(dJ * Y)
        worst = max(worst, abs(w - 1) / max(1.0, scale * abs(math.pi * z / 2)))
    return worst < 1e-9, f"max rel Wronskian defect {worst:.3g}"


def _conjugation(rng, k=200):
    worst = 0.0
    for _ in range(k):
        nu = rng.uniform(0, 30)
        z = complex(rng.uniform(0.5, 80), rng.uniform(-8, 8))
        a = specfun.bessel_j(nu, z).to_complex()
        b = specfun.bessel_j(nu, z.conjugate()).to_complex()
        worst = max(worst, abs(a - b.conjugate()) / max(abs(a), 1e-300))
    return worst < 1e-12, f"max rel conjugation defect {worst:.3g}"


def _schrodinger():
    h = 1e4
    cfg = schrodinger.SchrodingerConfig(d=2, h=h, p=2.0)
    recs = schrodinger.enumerate_spectrum(cfg)
    ok = [r for r in recs if r.admissible]
    good = all(schrodinger.bound_check(r, h) and r.residual <= 1e-9 for r in ok)
    mapped = all(abs(r.lam - (1j * h + r.m * r.m)) <= 1e-12 * abs(r.lam) for r in ok)
    frac = len(ok) / max(1, len(recs))
    return good and mapped and frac >= 0.9, f"{len(ok)}/{len(recs)} accepted at h=1e4"


def _jacobi_oracle():
    n = 1000
    cfg = jacobi.JacobiConfig(n=n, g_of_n="const:2")
    recs = jacobi.solve_window(cfg)
    roots = np.array(jacobi.companion_oracle(n))
    dist = max(float(np.min(np.abs(roots - r.z))) for r in recs)
    if dist > 1e-8:
        raise OracleMismatch(f"Newton and companion roots differ by {dist:.3g} at n={n}")
    resid = max(r.residual for r in recs)
    mapped = max(abs(r.lam - (1j * cfg.c + r.z + 1 / r.z)) for r in recs)
    return resid <= 1e-10 and mapped <= 1e-13, \
        f"n={n}: oracle gap {dist:.3g}, max residual {resid:.3g}"


def _free_jacobi():
    ev = jacobi.truncated_matrix_oracle(0, 200, b=np.zeros(8), trusted_only=False)
    off = float(np.max(jacobi.dist_segment(ev)))
    return off <= 1e-6, f"free spectrum distance to [-2, 2]: {off:.3g}"


def _ratio_arithmetic():
    h = 1e4
    cfg = schrodinger.SchrodingerConfig(d=2, h=h, p=2.0)
    rec = schrodinger.EigenvalueRecord(
        mode=schrodinger.ModeIndex(1, 1, 1.0), m0=0j, m1=0j, m=0j, k=0j, lam=1j * h,
        multiplicity=1, residual=0.0, admissible=True, h=h, d=2, weight=1)
    val = ltratio.schrodinger_ratio([rec], cfg, ltratio.WeightFunction("constant", 1.0)).ratio_value
    exp = 1 / (math.pi * h)
    return abs(val - exp) <= 1e-15 * exp, f"single-record ratio {val!r} vs {exp!r}"


SUITES = [("wronskian", _wronskian), ("conjugation", _conjugation),
          ("schrodinger_modes", _schrodinger), ("jacobi_oracle", _jacobi_oracle),
          ("free_jacobi", _free_jacobi), ("ratio_arithmetic", _ratio_arithmetic)]


def run(seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in SUITES:
        if fn.__code__.co_argcount:
            ok, detail = fn(rng)
        else:
            ok, detail = fn()
        out.append((name, bool(ok), detail))
    return out
