"""Weight functions and Lieb-Thirring type functionals over computed spectra.

All functionals here are sums over the constructed eigenvalues only, so they
are lower bounds for the corresponding sums over the full discrete spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import jacobi, schrodinger
from .errors import ConfigError, HypothesisViolated, MixedParameter

LOWER_BOUND_NOTE = "constructed-mode lower bound"


# ---------------------------------------------------------------------------
# weight functions

class WeightFunction:
    """Positive continuous weight f on [0, inf) with F(x) = int_0^x f.

    kinds: 'constant' (c), 'exp_decay' (kappa), 'exp_growth' (xi),
    'tabulated' (points: (t_i, f_i) pairs, linear in between, constant
    beyond the last point).
    """

    def __init__(self, kind: str, param: float = 1.0, points=None):
        self.kind = kind
        self.param = float(param)
        if kind == "constant":
            if not self.param > 0:
                raise ConfigError("constant weight must be positive")
        elif kind in ("exp_decay", "exp_growth"):
            if not self.param > 0:
                raise ConfigError(f"{kind} needs a positive rate")
        elif kind == "tabulated":
            pts = np.asarray(points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
                raise ConfigError("tabulated weight needs at least two (t, f) points")
            if pts[0, 0] != 0 or np.any(np.diff(pts[:, 0]) <= 0):
                raise ConfigError("tabulated abscissae must start at 0 and increase")
            if np.any(pts[:, 1] <= 0):
                raise ConfigError("weight values must be positive")
            self.points = pts
        else:
            raise ConfigError(f"unknown weight kind {kind!r}")
        self.monotone = self._monotone()

    @classmethod
    def parse(cls, spec: str) -> "WeightFunction":
        """'const:1', 'exp_decay:0.5', 'exp_growth:0.3', 'tab:0,1;2,0.5'."""
        kind, _, rest = spec.partition(":")
        try:
            if kind in ("const", "constant"):
                return cls("constant", float(rest or 1))
            if kind in ("exp_decay", "exp_growth"):
                return cls(kind, float(rest))
            if kind in ("tab", "tabulated"):
                pts = [tuple(float(v) for v in p.split(",")) for p in rest.split(";")]
                return cls("tabulated", points=pts)
        except ValueError:
            pass
        raise ConfigError(f"bad weight spec {spec!r}")

    @property
    def spec(self) -> str:
        if self.kind == "constant":
            return f"const:{self.param!r}"
        if self.kind == "tabulated":
            return "tab:" + ";".join(f"{float(a)!r},{float(b)!r}" for a, b in self.points)
        return f"{self.kind}:{self.param!r}"

    def f(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full(t.shape, self.param)
        elif self.kind == "exp_decay":
            out = np.exp(-self.param * t)
        elif self.kind == "exp_growth":
            out = np.exp(self.param * t)
        else:
            out = np.interp(t, self.points[:, 0], self.points[:, 1])
        return float(out) if out.ndim == 0 else out

    __call__ = f

    def F(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ConfigError("F is defined for x >= 0")
        c = self.param
        if self.kind == "constant":
            out = c * x
        elif self.kind == "exp_decay":
            out = -np.expm1(-c * x) / c
        elif self.kind == "exp_growth":
            out = np.expm1(c * x) / c
        else:
            out = np.vectorize(self._F_tab)(x)
        return float(out) if np.ndim(out) == 0 else out

    def _F_tab(self, x):
        if math.isinf(x):
            return math.inf
        t = self.points[:, 0]
        inner = t[(t > 0) & (t < x)]
        val, _ = integrate.quad(self.f, 0, x, points=inner if inner.size else None,
                                epsrel=1e-10, limit=200)
        return val

    def integrable(self) -> bool:
        return self.kind == "exp_decay"

    def _monotone(self) -> str:
        if self.kind == "constant":
            return "constant"
        if self.kind == "exp_decay":
            return "non-increasing"
        if self.kind == "exp_growth":
            return "non-decreasing"
        grid = np.linspace(0, self.points[-1, 0] * 1.5, 400)
        d = np.diff(self.f(grid))
        if np.all(d <= 0):
            return "non-increasing"
        if np.all(d >= 0):
            return "non-decreasing"
        return "none"

    def non_increasing(self) -> bool:
        return self.monotone in ("constant", "non-increasing")

    def non_decreasing(self) -> bool:
        return self.monotone in ("constant", "non-decreasing")

    def __repr__(self):
        return f"WeightFunction({self.spec!r})"


def weight_F(f: WeightFunction, x: float) -> float:
    return f.F(x)


# ---------------------------------------------------------------------------
# reports

@dataclass
class RatioReport:
    parameter: float
    ratio_value: float
    lower_bound_predictor: float
    mode_count: int
    notes: str = LOWER_BOUND_NOTE
    extra: dict = field(default_factory=dict)

    @property
    def per_point(self) -> float:
        p = self.lower_bound_predictor
        return self.ratio_value / p if p else math.nan


class ReportList(list):
    """List of RatioReport with the least-squares slope through the origin."""

    slope: float = math.nan


def fit_through_origin(reports) -> float:
    x = np.array([r.lower_bound_predictor for r in reports], dtype=float)
    y = np.array([r.ratio_value for r in reports], dtype=float)
    den = float(np.dot(x, x))
    return float(np.dot(x, y) / den) if den > 0 else math.nan


def mu_d(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(1 + d / 2)


# ---------------------------------------------------------------------------
# Schrodinger functionals

def _single_h(records, h):
    hs = {r.h for r in records}
    if len(hs) > 1 or (hs and not math.isclose(hs.pop(), h, rel_tol=1e-12)):
        raise MixedParameter("records come from different couplings h")


def _sampled(records) -> bool:
    return any(r.count != 1 for r in records)


def schrodinger_summands(lam, p, d, f: WeightFunction):
    lam = np.asarray(lam, dtype=complex)
    im = lam.imag
    a = np.abs(lam)
    return im ** p / a ** (d / 2) * f(np.log(a / im))


def schrodinger_ratio(records, config, f: WeightFunction) -> RatioReport:
    """(mu_d h^p)^-1 sum weight (Im lam)^p / |lam|^(d/2) f(log(|lam| / Im lam))."""
    _single_h(records, config.h)
    acc = [r for r in records if r.admissible]
    notes = LOWER_BOUND_NOTE
    if _sampled(acc):
        notes += "; block-sampled (weight * corner summand)"
    if not acc:
        return RatioReport(config.h, 0.0, math.nan, 0, notes)
    lam = np.array([r.lam for r in acc])
    w = np.array([r.weight for r in acc], dtype=float)
    s = schrodinger_summands(lam, config.p, config.d, f)
    val = float(np.sum(w * s)) / (mu_d(config.d) * config.h ** config.p)
    return RatioReport(config.h, val, math.nan, int(sum(r.count for r in acc)), notes)


def cone_sum(records, tau: float, config) -> float:
    """(mu_d h^p)^-1 sum over Im lam >= tau Re lam of weight |lam|^(p - d/2)."""
    if not tau > 0:
        raise ConfigError("tau must be positive")
    tot = 0.0
    for r in records:
        if r.admissible and r.lam.imag >= tau * r.lam.real:
            tot += r.weight * abs(r.lam) ** (config.p - config.d / 2)
    return tot / (mu_d(config.d) * config.h ** config.p)


def cone_tau(h: float, beta: float) -> float:
    return h ** (-2 * beta) / (32 * math.pi ** 2)


# ---------------------------------------------------------------------------
# Jacobi functionals

def dist_segment(lam):
    """dist(lam, [-2, 2])."""
    lam = np.asarray(lam, dtype=complex)
    x = np.clip(lam.real, -2, 2)
    return np.abs(lam - x)


def dist_endpoints(lam):
    lam = np.asarray(lam, dtype=complex)
    return np.minimum(np.abs(lam - 2), np.abs(lam + 2))


def jacobi_lt_sum(lams, p: float, f: WeightFunction) -> float:
    """sum dist^p / |lam^2 - 4|^(1/2) f(log(dist_end / dist)) (no normalisation)."""
    lam = np.asarray(lams, dtype=complex)
    ds = dist_segment(lam)
    lam = lam[ds > 0]
    ds = ds[ds > 0]
    de = dist_endpoints(lam)
    s = ds ** p / np.sqrt(np.abs(lam * lam - 4)) * f(np.log(de / ds))
    return float(np.sum(s))


def _single_n(records):
    ns = {r.n for r in records}
    if len(ns) > 1:
        raise MixedParameter("records come from different n")
    return ns.pop() if ns else None


def jacobi_lt_functional(records, config, f: WeightFunction) -> RatioReport:
    _single_n(records)
    acc = [r for r in records if r.eigenvalue]
    n = config.n
    val = jacobi_lt_sum([r.lam for r in acc], config.p, f) / n ** (1 - 2 * config.p / 3)
    return RatioReport(n, val, math.nan, len(acc))


def diamond_sum(records, omega: float, p: float) -> float:
    """n^-(1-2p/3) [sum_{Phi+} |lam-2|^(p-1/2) + sum_{Phi-} |lam+2|^(p-1/2)]."""
    if not 0 < omega < math.pi / 2:
        raise ConfigError("omega must lie in (0, pi/2)")
    n = _single_n(records)
    t = math.tan(omega)
    tot = 0.0
    for r in records:
        if not r.eigenvalue:
            continue
        lam = r.lam
        if 2 - lam.real < t * abs(lam.imag):
            tot += abs(lam - 2) ** (p - 0.5)
        if 2 + lam.real < t * abs(lam.imag):
            tot += abs(lam + 2) ** (p - 0.5)
    return tot / n ** (1 - 2 * p / 3) if n else 0.0


def diamond_omega(n: int) -> float:
    return math.atan(4 * (2 - math.sqrt(2)) * n ** (2 / 3))


# ---------------------------------------------------------------------------
# experiments

def _schrodinger_records(h, d, p, windows, j_cap_policy, max_modes, **kw):
    cfg = schrodinger.SchrodingerConfig(d=d, h=h, p=p)
    return cfg, schrodinger.enumerate_spectrum(cfg, windows, j_cap_policy, max_modes, **kw)


def _check_block_monotone(f: WeightFunction, p, d):
    # the high-corner lower bound needs a summand decreasing in ell and j
    if f.non_increasing():
        return
    if f.kind == "exp_growth" and f.param <= min(p, d / 2):
        return
    raise ConfigError("block sampling needs a non-increasing weight or exp_growth(xi <= min(p, d/2))")


def divergence_experiment(kind: str, sweep, f: WeightFunction,
                          windows: schrodinger.ParameterWindows | None = None, *,
                          d: int = 2, p: float = 2.0, j_cap_policy="admissible",
                          max_modes: int | None = 4000, gamma: float = 0.8,
                          g_of_n=None, eps: float | None = None) -> ReportList:
    """Functional value and theorem predictor along a sweep.

    Schrodinger kinds use the weight-free corollary predictors F(eps log h)
    (non-increasing f) and F(eps log h) - F(eps/2 log h) (non-decreasing f),
    with eps = 2 beta.  Jacobi kinds use F(log n^(2/3)) - 3 f(0) log g(n)
    and F(log(pi^2 n^eps)) - F(log(pi^2 g(n)^2)).
    """
    sweep = list(sweep)
    if sweep != sorted(sweep):
        raise ConfigError("sweep must be sorted ascending")
    out = ReportList()
    if kind.startswith("schrodinger"):
        windows = windows or schrodinger.ParameterWindows()
        e = windows.eps
        if not math.isclose(windows.beta, e / 2):
            raise ConfigError("divergence experiments need beta = eps/2")
        if kind == "schrodinger_decreasing" and not f.non_increasing():
            raise HypothesisViolated("decreasing kind needs a non-increasing f")
        if kind == "schrodinger_increasing" and not f.non_decreasing():
            raise HypothesisViolated("increasing kind needs a non-decreasing f")
        if max_modes is not None:
            _check_block_monotone(f, p, d)
        for h in sweep:
            cfg, recs = _schrodinger_records(h, d, p, windows, j_cap_policy, max_modes)
            rep = schrodinger_ratio(recs, cfg, f)
            L = math.log(h)
            if kind == "schrodinger_decreasing":
                rep.lower_bound_predictor = float(f.F(e * L))
            elif kind == "schrodinger_increasing":
                rep.lower_bound_predictor = float(f.F(e * L) - f.F(e * L / 2))
            else:
                raise ConfigError(f"unknown kind {kind!r}")
            rep.extra = {"attempted": len(recs), "accepted": sum(r.admissible for r in recs)}
            out.append(rep)
    elif kind.startswith("jacobi"):
        g_of_n = g_of_n or jacobi.default_g
        for n in sweep:
            n = int(n)
            cfg = jacobi.JacobiConfig(n=n, p=p, gamma=gamma, g_of_n=g_of_n)
            recs = jacobi.solve_window(cfg)
            rep = jacobi_lt_functional(recs, cfg, f)
            g = float(cfg.g(n))
            if kind == "jacobi_decreasing":
                if not f.non_increasing():
                    raise HypothesisViolated("decreasing kind needs a non-increasing f")
                rep.lower_bound_predictor = float(f.F(math.log(n ** (2 / 3))) - 3 * f.f(0) * math.log(g))
            elif kind == "jacobi_increasing":
                if not f.non_decreasing():
                    raise HypothesisViolated("increasing kind needs a non-decreasing f")
                ee = 0.5 if eps is None else eps
                a = math.log(math.pi ** 2 * n ** ee)
                b = math.log(math.pi ** 2 * g * g)
                rep.lower_bound_predictor = float(f.F(max(a, 0)) - f.F(max(b, 0)))
            else:
                raise ConfigError(f"unknown kind {kind!r}")
            rep.extra = {"attempted": len(recs), "eigenvalues": sum(r.eigenvalue for r in recs),
                         "in_D": sum(r.admissible for r in recs)}
            out.append(rep)
    else:
        raise ConfigError(f"unknown kind {kind!r}")
    out.slope = fit_through_origin(out)
    return out


def phi_cone_default(tau, p):
    return tau ** (-p) / math.log(1 / tau)


def phi_cone_critical(tau, p):
    return tau ** (-p)


def phi_diamond_default(omega, p):
    t = math.tan(omega)
    return t ** p / math.log(t)


def phi_diamond_critical(omega, p):
    return math.tan(omega) ** p


def sharp_windows() -> schrodinger.ParameterWindows:
    """Windows with 3 gamma/4 < beta < gamma, as the cone argument needs."""
    return schrodinger.ParameterWindows(beta=0.36, gamma=0.45, eps=0.72)


def sharpness_experiment(kind: str, sweep, beta_or_phi=None, *, phi=None, d: int = 2,
                         p: float = 2.0, windows=None, j_cap_policy="admissible",
                         max_modes: int | None = 4000, gamma: float = 0.8,
                         g_of_n=None) -> ReportList:
    """Cone or diamond sums at the scheduled tau(h) / omega(n), divided by phi.

    For 'cone', `beta_or_phi` is beta (default from `windows`); for
    'diamond' it is ignored.  `phi` defaults to the log-slack test function.
    Each report has ratio_value = sum / phi and lower_bound_predictor = the
    growth predicted by the argument (g^(d-1) h^(2 p beta) / phi(tau)
    respectively tan^p(omega) / phi(omega)).
    """
    sweep = list(sweep)
    if sweep != sorted(sweep):
        raise ConfigError("sweep must be sorted ascending")
    out = ReportList()
    if kind == "cone":
        windows = windows or sharp_windows()
        beta = windows.beta if beta_or_phi is None else float(beta_or_phi)
        if beta != windows.beta:
            windows = schrodinger.ParameterWindows(windows.alpha_of_h, beta, windows.gamma,
                                                   2 * beta, windows.g_of_h, windows.w_of_h)
        if not 0.75 * windows.gamma < beta < windows.gamma:
            raise HypothesisViolated("cone sharpness needs 3 gamma/4 < beta < gamma")
        phi = phi or phi_cone_default
        for h in sweep:
            cfg = schrodinger.SchrodingerConfig(d=d, h=h, p=p)
            sets = schrodinger.index_sets(h, windows)
            if max(sets.alpha, 0) >= windows.gamma / 2:
                raise HypothesisViolated("cone sharpness needs alpha(h) < gamma/2")
            tau = cone_tau(h, beta)
            kw = dict(layout="sharp")
            lo = schrodinger.enumerate_spectrum(cfg, windows, j_cap_policy, max_modes,
                                                corner="low", **kw)
            if lo and lo[0].count != 1 or len(lo) == max_modes:
                # blocks: the summand grows with j, so it is read at the low
                # corner, while cone membership is checked at both corners
                hi = schrodinger.enumerate_spectrum(cfg, windows, j_cap_policy, max_modes,
                                                    corner="high", **kw)
                recs = [a if (b.admissible and b.lam.imag >= tau * b.lam.real)
                        else _drop(a) for a, b in zip(lo, hi)]
            else:
                recs = lo
            val = cone_sum(recs, tau, cfg) / phi(tau, p)
            g = float(windows.g_of_h(h))
            pred = g ** (d - 1) * h ** (2 * p * beta) / phi(tau, p)
            acc = [r for r in recs if r.admissible]
            out.append(RatioReport(h, val, pred, int(sum(r.count for r in acc)),
                                   LOWER_BOUND_NOTE, {"tau": tau}))
    elif kind == "diamond":
        phi = phi or phi_diamond_default
        g_of_n = g_of_n or jacobi.default_g
        for n in sweep:
            n = int(n)
            cfg = jacobi.JacobiConfig(n=n, p=p, gamma=gamma, g_of_n=g_of_n)
            recs = jacobi.solve_window(cfg)
            om = diamond_omega(n)
            val = diamond_sum(recs, om, p) / phi(om, p)
            pred = math.tan(om) ** p / phi(om, p)
            out.append(RatioReport(n, val, pred, sum(r.eigenvalue for r in recs),
                                   LOWER_BOUND_NOTE, {"omega": om}))
    else:
        raise ConfigError(f"unknown sharpness kind {kind!r}")
    out.slope = fit_through_origin(out)
    return out


def _drop(rec):
    from dataclasses import replace
    return replace(rec, admissible=False, status="outside_cone")


# ---------------------------------------------------------------------------
# sum construction bookkeeping

@dataclass
class SumPlanRow:
    n: int
    c_n: float
    k: float
    K: float
    S_A: float
    S_B: float


@dataclass
class SumPlan:
    rows: list
    eps: float
    p: float
    d: int
    n0: int
    n_max: int
    tail_fraction_B: float    # share of S_B contributed by n > n_max / 2
    sqrtF_max: float          # F(eps log n_max)^(1/2)


def _euler_maclaurin(G, dG, a: int, b: int, integral) -> float:
    """sum_{n=a+1}^{b} G(log n)/n for smooth G, via Euler-Maclaurin.

    g(n) = G(log n)/n, g'(n) = (G'(x) - G(x))/n^2.  The remainder after the
    B_2 term is of order g'''(n) / 720, negligible once a is large.
    """
    def g(n):
        return G(math.log(n)) / n

    def dg(n):
        x = math.log(n)
        return (dG(x) - G(x)) / (n * n)

    return integral(math.log(a), math.log(b)) + (g(b) - g(a)) / 2 + (dg(b) - dg(a)) / 12


def sum_construction_plan(f: WeightFunction, eps: float, p: float, d: int, n0: int,
                          N_terms: int, checkpoints: int = 40, direct: int = 200000) -> SumPlan:
    """Bookkeeping for the disjoint-support sum potential.

    V_n = i n chi_B, so int |V_n|^p = mu_d n^p.  With K(x) = F(eps x)^(-1/2)
    and k = -K' = (eps/2) F(eps x)^(-3/2) f(eps x), the scalings are
    c_n = (k(log n) / (n mu_d n^p))^(1/(2p-d)), and the partial sums are
    S_A = sum F(eps log n) k(log n)/n and S_B = sum k(log n)/n over
    n0 <= n <= N.  Terms up to `direct` are added one by one; beyond that,
    blocks between checkpoints use Euler-Maclaurin with the integral in
    x = log n (closed form for S_B, quadrature for S_A).
    """
    if not 2 * p - d > 0:
        raise HypothesisViolated("needs p > d/2")
    if f.integrable() or not f.non_increasing():
        raise HypothesisViolated("needs a non-increasing f with divergent integral")
    if n0 < 2:
        raise ConfigError("n0 must be >= 2 so that log n0 > 0")
    vol = mu_d(d)

    def Fe(x):
        return float(f.F(eps * x))

    def K(x):
        return Fe(x) ** -0.5

    def k(x):
        return 0.5 * eps * Fe(x) ** -1.5 * float(f.f(eps * x))

    def GA(x):
        return Fe(x) * k(x)

    def deriv(G):
        def dG(x):
            hstep = 1e-5 * max(1.0, x)
            return (G(x + hstep) - G(x - hstep)) / (2 * hstep)
        return dG

    def int_B(a, b):
        return K(a) - K(b)

    def int_A(a, b):
        val, _ = integrate.quad(GA, a, b, epsrel=1e-12, limit=200)
        return val

    n_max = n0 + int(round(N_terms))
    # python ints: n_max may exceed the int64 range
    marks = {n0, n_max}
    marks.update(int(round(v)) for v in np.geomspace(float(n0), float(n_max), checkpoints))
    half = n_max // 2
    if half > n0:
        marks.add(half)
    marks = sorted(m for m in marks if n0 <= m <= n_max)
    rows = []
    SA = SB = 0.0
    last = n0 - 1
    S_at = {}
    for mk in marks:
        mk = int(mk)
        if mk <= direct:
            ns = np.arange(last + 1, mk + 1, dtype=float)
            xs = np.log(ns)
            kv = np.array([k(x) for x in xs]) if ns.size < 64 else _vec_k(f, eps, xs)
            Fv = np.asarray(f.F(eps * xs), dtype=float)
            SA += math.fsum(Fv * kv / ns)
            SB += math.fsum(kv / ns)
        else:
            a = max(last, direct)
            if last < a:
                ns = np.arange(last + 1, a + 1, dtype=float)
                xs = np.log(ns)
                kv = _vec_k(f, eps, xs)
                SA += math.fsum(np.asarray(f.F(eps * xs)) * kv / ns)
                SB += math.fsum(kv / ns)
            SA += _euler_maclaurin(GA, deriv(GA), a, mk, int_A)
            SB += _euler_maclaurin(k, deriv(k), a, mk, int_B)
        last = mk
        S_at[mk] = (SA, SB)
        x = math.log(mk)
        c = (k(x) / (mk * vol * mk ** p)) ** (1 / (2 * p - d))
        rows.append(SumPlanRow(mk, c, k(x), K(x), SA, SB))
    SB_total = rows[-1].S_B
    SB_half = S_at.get(half, (0.0, 0.0))[1] if half > n0 else 0.0
    tail = (SB_total - SB_half) / SB_total if SB_total > 0 else math.nan
    return SumPlan(rows, eps, p, d, n0, n_max, tail, Fe(math.log(n_max)) ** 0.5)


def _vec_k(f, eps, xs):
    F = np.asarray(f.F(eps * xs), dtype=float)
    return 0.5 * eps * F ** -1.5 * np.asarray(f.f(eps * xs), dtype=float)


# ---------------------------------------------------------------------------
# Jacobi inequality fuzzing

@dataclass
class FuzzReport:
    norms: np.ndarray         # ||b||_p^p per trial
    values: np.ndarray        # functional per trial
    ratios: np.ndarray        # values / norms
    counts: np.ndarray        # eigenvalues kept per trial
    constant: float           # max ratio
    spearman: float           # rank correlation of ratio against norm


def settled_eigenvalues(b, N: int, tol: float = 1e-8):
    """Truncated-operator eigenvalues off [-2, 2] that agree between N and 2N."""
    e1 = jacobi.truncated_matrix_oracle(0, N, b=b, trusted_only=False, layout="literal")
    e2 = jacobi.truncated_matrix_oracle(0, 2 * N, b=b, trusted_only=False, layout="literal")
    keep = []
    for e in e1:
        if dist_segment(e) > tol and np.min(np.abs(e2 - e)) < tol:
            keep.append(e)
    return np.array(keep, dtype=complex)


def jacobi_fuzz(trials: int = 100, seed: int = 0, p: float = 1.5,
                f: WeightFunction | None = None, max_support: int = 8,
                amplitude: float = 0.5, N: int = 80) -> FuzzReport:
    """Functional / ||b||_p^p over random finitely supported complex potentials."""
    from scipy import stats
    f = f or WeightFunction("exp_decay", 0.5)
    rng = np.random.default_rng(seed)
    norms, vals, cnts = [], [], []
    for _ in range(trials):
        m = int(rng.integers(1, max_support + 1))
        rad = amplitude * np.sqrt(rng.random(m))
        b = rad * np.exp(2j * np.pi * rng.random(m))
        lam = settled_eigenvalues(b, N)
        norms.append(float(np.sum(np.abs(b) ** p)))
        vals.append(jacobi_lt_sum(lam, p, f))
        cnts.append(lam.size)
    norms, vals = np.array(norms), np.array(vals)
    ratios = vals / norms
    rho = float(stats.spearmanr(norms, ratios).statistic)
    return FuzzReport(norms, vals, ratios, np.array(cnts), float(ratios.max()), rho)
