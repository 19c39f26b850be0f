"""The ten acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line (also repeated in the terminal summary)
and then asserts the criterion, so a FAIL line is a failing test.
"""
import math
import time

import mpmath as mp
import numpy as np
import pytest

import oracle as O
from conftest import report
from artifact import cli, jacobi, ltratio, schrodinger, specfun

HS = [1e4, 1e5, 1e6, 1e7]
NS = [500, 1000, 2000, 4000]
MAX_MODES = 3000


# --- 1 ----------------------------------------------------------------------

def test_criterion_1_special_functions():
    rng = np.random.default_rng(2024)
    K = 1000
    nu = rng.uniform(0, 20, K)
    z = np.exp(rng.uniform(math.log(0.5), math.log(1e4), K)) * np.exp(1j * rng.uniform(-math.pi / 3, math.pi / 3, K))
    t0 = time.perf_counter()
    wr, rec, conj, half = [], [], [], []
    for v, zz in zip(nu, z):
        zz = complex(zz)
        J = O.to_mp(specfun.bessel_j(v, zz))
        Y = O.to_mp(specfun.bessel_y(v, zz))
        dJ = O.to_mp(specfun.d_bessel_j(v, zz))
        dY = O.to_mp(specfun.d_bessel_y(v, zz))
        ref = 2 / (mp.pi * mp.mpc(zz))
        wr.append(float(abs(J * dY - dJ * Y - ref) / abs(ref)))
        # recurrence centred at nu + 1 so every order is non-negative
        worst = 0.0
        for f in (specfun.bessel_j, specfun.bessel_y, specfun.hankel1):
            a, b, c = (O.to_mp(f(v, zz)), O.to_mp(f(v + 2, zz)), O.to_mp(f(v + 1, zz)))
            t = 2 * (v + 1) / mp.mpc(zz) * c
            worst = max(worst, float(abs(a + b - t) / max(abs(a), abs(b), abs(t))))
        rec.append(worst)
        Jc = O.to_mp(specfun.bessel_j(v, zz.conjugate()))
        conj.append(float(abs(Jc - mp.conj(J)) / abs(J)))
    for k, zz in enumerate(z):
        hv = (0.5, 1.5, 2.5)[k % 3]
        half.append(max(O.scaled_rel(specfun.bessel_j(hv, complex(zz)), O.closed_half("J", hv, zz)),
                        O.scaled_rel(specfun.bessel_y(hv, complex(zz)), O.closed_half("Y", hv, zz))))
    elapsed = time.perf_counter() - t0
    wr, rec, conj, half = map(np.array, (wr, rec, conj, half))
    checks = {"wronskian<=1e-10": wr.max() <= 1e-10, "recurrence<=1e-9": rec.max() <= 1e-9,
              "conjugation<=1e-12": conj.max() <= 1e-12, "half_integer<=1e-10": half.max() <= 1e-10,
              "runtime<10s": elapsed < 10}
    bad = wr > 1e-10
    detail = (f"{K} samples; wronskian max {wr.max():.3g} ({bad.mean():.0%} above 1e-10, "
              f"min |Im z| among them {np.abs(z.imag)[bad].min() if bad.any() else 0:.3g}); "
              f"recurrence max {rec.max():.3g}; conjugation max {conj.max():.3g}; "
              f"half-integer max {half.max():.3g}; {elapsed:.1f} s; "
              + ", ".join(f"{k}={'ok' if v else 'no'}" for k, v in checks.items()))
    assert report(1, all(checks.values()), detail)


# --- 2 ----------------------------------------------------------------------

def test_criterion_2_jacobi_oracle_equivalence():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (200, 500, 1000, 2000):
        cfg = jacobi.JacobiConfig(n=n, g_of_n="const:2", gamma=0.8)
        win = jacobi.mode_window(n, 0.8, 2.0)
        recs = jacobi.solve_window(cfg)
        if win.empty:
            parts.append(f"n={n}: window [{win.j_lo},{win.j_hi}] empty")
            continue
        roots = jacobi.companion_oracle(n)
        m = jacobi.match_oracle(recs, roots, win)
        dist = max(x[1] for x in m)
        counts = [int(x[2]) for x in m]
        resid = max(r.residual for r in recs)
        good = dist <= 1e-8 and resid <= 1e-10 and all(c == 1 for c in counts)
        ok &= good
        parts.append(f"n={n}: {len(recs)} roots, max match {dist:.2g}, max residual {resid:.2g}, "
                     f"roots per D_j {sorted(set(counts))}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    assert report(2, ok, "; ".join(parts) + f"; {elapsed:.1f} s")


# --- 3 ----------------------------------------------------------------------

def test_criterion_3_jacobi_localization():
    gamma = 0.8
    parts, ok, Ks = [], True, []
    for n in (200, 500, 1000, 2000, 4000):
        cfg = jacobi.JacobiConfig(n=n, g_of_n="const:2", gamma=gamma)
        recs = jacobi.solve_window(cfg)
        in_D = sum(r.admissible for r in recs)
        ev = [r for r in recs if r.eigenvalue]
        if not ev:
            parts.append(f"n={n}: no roots")
            continue
        c = cfg.c
        re_ok = all(r.lam.real > 0 for r in ev)
        im = np.array([r.lam.imag for r in ev])
        im_ok = bool(np.all((im >= 0.5 * c) & (im <= c + 1e-9)))
        K = max(abs(r.lam - 2 * math.cos(r.phi) - 1j * c) * n ** gamma for r in ev)
        Ks.append(K)
        ok &= re_ok and im_ok
        parts.append(f"n={n}: {len(ev)} eigenvalues ({in_D} inside D_j), Re>0 {re_ok}, "
                     f"Im/c in [{im.min() / c:.3f}, {im.max() / c:.3f}], K {K:.3g}")
    K = max(Ks)
    ok &= K < 50
    assert report(3, ok, "; ".join(parts) + f"; single K = {K:.3g}")


# --- 4 ----------------------------------------------------------------------

def test_criterion_4_truncated_matrix():
    n, N = 200, 1600
    t0 = time.perf_counter()
    c = n ** (-2 / 3)
    recs = [r for r in jacobi.solve_window(jacobi.JacobiConfig(n=n, g_of_n="const:2"))
            if r.admissible]
    ev_all = jacobi.truncated_matrix_oracle(n, N, trusted_only=False)
    ev = jacobi.trusted(ev_all, n, N)
    rec_dist = max((float(np.min(np.abs(ev_all - r.lam))) for r in recs), default=0.0)
    # the window is empty at n = 200, so the check also runs on the companion roots
    zs = np.array(jacobi.companion_oracle(n))
    lam = 1j * c + zs + 1 / zs
    far = lam[jacobi.dist_segment(lam) > jacobi.pollution_floor(n, N)]
    comp_dist = max(float(np.min(np.abs(ev - l))) for l in far)
    top = float(ev_all.imag.max())
    elapsed = time.perf_counter() - t0
    ok = rec_dist <= 1e-3 and comp_dist <= 1e-3 and top <= c + 1e-6 and elapsed < 60
    assert report(4, ok, f"{len(recs)} constructed records (max gap {rec_dist:.2g}); "
                         f"{far.size} companion eigenvalues above the pollution floor, max gap "
                         f"{comp_dist:.2g}; max Im over all truncated eigenvalues - c = "
                         f"{top - c:.3g}; {elapsed:.1f} s")


# --- 5 ----------------------------------------------------------------------

def test_criterion_5_schrodinger_pipeline():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    parts, ok = [], True
    for h, sample in ((1e4, 15), (1e5, 10), (1e6, 8)):
        recs = schrodinger.enumerate_spectrum(schrodinger.SchrodingerConfig(d=2, h=h),
                                              max_modes=MAX_MODES)
        acc = [r for r in recs if r.admissible]
        frac = len(acc) / max(1, len(recs))
        bounds = all(schrodinger.bound_check(r, h) for r in acc)
        own = max(r.residual for r in acc)
        pick = rng.choice(len(acc), min(sample, len(acc)), replace=False)
        ext = max(abs(complex(O.char_residual_cf_checked(acc[i].m, acc[i].nu, h)[0])) for i in pick)
        good = frac >= 0.9 and bounds and own <= 1e-9 and ext <= 1e-9
        ok &= good
        parts.append(f"h={h:.0e}: {len(acc)}/{len(recs)} accepted, bounds {bounds}, "
                     f"residual {own:.2g}, extended-precision residual on {len(pick)} "
                     f"records {ext:.2g}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    assert report(5, ok, "; ".join(parts) + f"; {elapsed:.0f} s")


# --- 6 ----------------------------------------------------------------------

def _stable_positive(vals):
    vals = np.asarray(vals, dtype=float)
    return bool(np.all(vals > 0) and (np.argmin(vals) == 0 or vals.max() / vals.min() < 1.5))


def test_criterion_6_divergence_trends():
    one = ltratio.WeightFunction("constant", 1.0)
    a = ltratio.divergence_experiment("schrodinger_decreasing", HS, one, max_modes=MAX_MODES)
    v1 = [r.ratio_value / math.log(r.parameter) for r in a]
    g = ltratio.WeightFunction("exp_growth", 0.3)
    b = ltratio.divergence_experiment("schrodinger_increasing", HS, g, max_modes=MAX_MODES)
    v2 = [r.ratio_value / r.parameter ** (0.4 * 0.3) for r in b]
    ok = _stable_positive(v1) and _stable_positive(v2)
    assert report(6, ok, "f=1 Ratio/log h " + ", ".join(f"{v:.3g}" for v in v1)
                  + "; f=e^(0.3t) Ratio/h^0.12 " + ", ".join(f"{v:.3g}" for v in v2))


# --- 7 ----------------------------------------------------------------------

def test_criterion_7_integrable_weight():
    f = ltratio.WeightFunction("exp_decay", 0.5)
    reps = ltratio.divergence_experiment("schrodinger_decreasing", HS, f, max_modes=MAX_MODES)
    vals = np.array([r.ratio_value for r in reps])
    spread = vals.max() / vals.min() if vals.min() > 0 else math.inf
    fz = ltratio.jacobi_fuzz(trials=100, seed=0, p=1.5, f=f)
    # |rho| < 0.2 is roughly the 5% two-sided critical value for 100 samples
    fuzz_ok = math.isfinite(fz.constant) and abs(fz.spearman) < 0.2
    ok = spread < 10 and fuzz_ok
    assert report(7, ok, "Ratio " + ", ".join(f"{v:.3g}" for v in vals)
                  + f" (max/min {spread:.3g}); fuzz constant {fz.constant:.4g}, "
                    f"Spearman rho {fz.spearman:.3g}, eigenvalues found {int(fz.counts.sum())}")


# --- 8 ----------------------------------------------------------------------

def _increasing(vals):
    return all(b > a for a, b in zip(vals, vals[1:]))


def _spread(vals):
    vals = np.asarray(vals, dtype=float)
    return vals.max() / vals.min() if vals.min() > 0 else math.inf


def test_criterion_8_sharpness():
    cone = [r.ratio_value for r in ltratio.sharpness_experiment("cone", HS, max_modes=MAX_MODES)]
    cone_c = [r.ratio_value for r in ltratio.sharpness_experiment(
        "cone", HS, phi=ltratio.phi_cone_critical, max_modes=MAX_MODES)]
    dia = [r.ratio_value for r in ltratio.sharpness_experiment("diamond", NS, p=1.0)]
    dia_c = [r.ratio_value for r in ltratio.sharpness_experiment(
        "diamond", NS, phi=ltratio.phi_diamond_critical, p=1.0)]
    ok = _increasing(cone) and _increasing(dia) and _spread(cone_c) < 10 and _spread(dia_c) < 10

    def fmt(v):
        return ", ".join(f"{x:.3g}" for x in v)
    assert report(8, ok, f"cone {fmt(cone)} (increasing {_increasing(cone)}); cone critical "
                         f"{fmt(cone_c)} (max/min {_spread(cone_c):.3g}); diamond {fmt(dia)} "
                         f"(increasing {_increasing(dia)}); diamond critical {fmt(dia_c)} "
                         f"(max/min {_spread(dia_c):.3g})")


# --- 9 ----------------------------------------------------------------------

def test_criterion_9_sum_plan():
    t0 = time.perf_counter()
    plan = ltratio.sum_construction_plan(ltratio.WeightFunction("constant", 1.0), 0.4, 2.0, 2,
                                         2, 10 ** 24)
    elapsed = time.perf_counter() - t0
    SA = plan.rows[-1].S_A
    ok = plan.tail_fraction_B < 0.1 and SA > 0.9 * plan.sqrtF_max and elapsed < 10
    assert report(9, ok, f"n_max {plan.n_max:.3g}: tail share of S_B {plan.tail_fraction_B:.3g}; "
                         f"S_A / F^(1/2) = {SA / plan.sqrtF_max:.4f}; {elapsed:.2f} s")


# --- 10 ---------------------------------------------------------------------

COMMANDS = [
    ["schrodinger-spectrum", "--h", "1e4,1e5", "--max-modes", "300"],
    ["jacobi-spectrum", "--n", "1000", "--g", "const:2"],
    ["ratio-sweep", "--kind", "schrodinger_increasing", "--f", "exp_growth:0.5",
     "--h", "1e4,1e5", "--max-modes", "300"],
    ["ratio-sweep", "--kind", "jacobi_decreasing", "--f", "const:1", "--n", "1000,2000",
     "--g", "const:2"],
    ["sharpness", "--kind", "cone", "--h", "1e4,1e5", "--max-modes", "300"],
    ["sharpness", "--kind", "diamond", "--n", "1000,2000"],
    ["sum-plan", "--n-terms", "1e12"],
    ["selftest"],
]


def test_criterion_10_determinism(tmp_path):
    same = []
    for k, cmd in enumerate(COMMANDS):
        a, b = tmp_path / f"a{k}.csv", tmp_path / f"b{k}.csv"
        assert cli.main(cmd + ["--out", str(a)]) == 0
        assert cli.main(cmd + ["--out", str(b)]) == 0
        same.append(a.read_bytes() == b.read_bytes())
    assert report(10, all(same), f"{sum(same)}/{len(same)} command configurations byte-identical")
