"""Eigenvalues of -Laplace + i h chi_B for the unit ball B in R^d.

A mode (ell, j) with Bessel order nu = ell + d/2 - 1 is solved in three
stages:

    m0  closed-form guess
    m1  zero of the auxiliary function f(z) = theta_nu(z) - pi/4 - 2 pi j
        - i log(sqrt(h) / (4 pi j))
    m   root of the characteristic residual
        k/m - [J'_nu(m) / J_nu(m)] [H_nu(k) / H'_nu(k)],  k = sqrt(i h + m^2)

and the eigenvalue is lambda = i h + m^2.  Everything is vectorised over
modes.  The Bessel ratios come from the Debye pieces in ``specfun``, so no
exponential scale ever materialises.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import specfun
from .errors import (ConfigError, EscapedBall, NoConvergence, PoleProximity,
                     RegimeUnsupported, WindowInvalid)

H_FLOOR = 1e3
H_CAP = 1e8
AUX_TOL = 1e-10
CHAR_TOL = 1e-9
MAX_IT = 50
MAX_HALVINGS = 12

# 2 pi split so that j * TWO_PI_HI is exact for j < 2**29
TWO_PI_HI = float(np.float32(2 * np.pi))
TWO_PI_LO = 2 * np.pi - TWO_PI_HI

# j-cap thresholds on the predicted Im lambda / h (see enumerate_spectrum)
J_CAPS = {"lam_safe": 0.55, "admissible": 0.05, "none": None}


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class SchrodingerConfig:
    d: int = 2
    h: float = 1e4
    p: float = 2.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ConfigError(f"dimension must be an integer >= 2, got {self.d}")
        if not self.h > 0:
            raise ConfigError(f"coupling h must be positive, got {self.h}")
        if self.d == 2 and not self.p > 1:
            raise ConfigError("d = 2 needs p > 1")
        if self.d >= 3 and not self.p >= self.d / 2:
            raise ConfigError(f"d = {self.d} needs p >= d/2")


class SlowFunction:
    """Named scalar function of h, parsed from strings like 'pow:2,-0.2'.

    kinds:
      const:c            c
      pow:c,e            c h^e
      loglog_over_log:k  k log log h / log h   (so h^value = (log h)^k)
      inv_loglog:c       min(1, c / log log h)
      log:c              c log h
      spec_alpha:b       min(b/2, 1/log log(h + e^e))
    """

    def __init__(self, spec: str):
        kind, _, rest = spec.partition(":")
        try:
            args = tuple(float(a) for a in rest.split(",")) if rest else ()
        except ValueError:
            raise ConfigError(f"bad slow function spec {spec!r}") from None
        nargs = {"const": 1, "pow": 2, "loglog_over_log": 1, "inv_loglog": 1,
                 "log": 1, "spec_alpha": 1}
        if kind not in nargs or len(args) != nargs[kind]:
            raise ConfigError(f"bad slow function spec {spec!r}")
        self.kind = kind
        self.args = args
        self.spec = spec

    def __call__(self, h):
        a = self.args
        h = np.asarray(h, dtype=float)
        if self.kind == "const":
            out = np.full(h.shape, a[0])
        elif self.kind == "pow":
            out = a[0] * h ** a[1]
        elif self.kind == "loglog_over_log":
            out = a[0] * np.log(np.log(h)) / np.log(h)
        elif self.kind == "inv_loglog":
            out = np.minimum(1.0, a[0] / np.log(np.log(h)))
        elif self.kind == "log":
            out = a[0] * np.log(h)
        else:
            out = np.minimum(a[0] / 2, 1 / np.log(np.log(h + math.e ** math.e)))
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"SlowFunction({self.spec!r})"


def _as_slow(f) -> Callable:
    if isinstance(f, str):
        return SlowFunction(f)
    if isinstance(f, (int, float)):
        return SlowFunction(f"const:{float(f)!r}")
    return f


@dataclass(frozen=True)
class ParameterWindows:
    alpha_of_h: Callable = field(default_factory=lambda: SlowFunction("loglog_over_log:0.02"))
    beta: float = 0.2
    gamma: float = 0.4
    eps: float = 0.4
    g_of_h: Callable = field(default_factory=lambda: SlowFunction("inv_loglog:2.5"))
    w_of_h: Callable = field(default_factory=lambda: SlowFunction("log:1"))

    def __post_init__(self):
        for name in ("alpha_of_h", "g_of_h", "w_of_h"):
            object.__setattr__(self, name, _as_slow(getattr(self, name)))
        if not 0 < self.beta < self.gamma < 0.5:
            raise WindowInvalid(f"need 0 < beta < gamma < 1/2, got beta={self.beta}, gamma={self.gamma}")

    def validate(self, h: float):
        a = float(self.alpha_of_h(h))
        g = float(self.g_of_h(h))
        # alpha = beta is allowed: it is the degenerate (empty) window
        if not 0 < a <= self.beta:
            raise WindowInvalid(f"alpha(h)={a} not in (0, beta] at h={h}")
        if not 0 < g <= 1:
            raise WindowInvalid(f"g(h)={g} not in (0, 1] at h={h}")
        if g < 2 * h ** (self.beta - self.gamma) * (1 - 1e-12):
            raise WindowInvalid(f"g(h)={g} below 2 h^(beta-gamma) at h={h}")
        hs = h * np.array([1.0, 2.0, 10.0, 1e3])
        if np.any(np.diff(np.asarray(self.g_of_h(hs), dtype=float)) > 1e-15):
            raise WindowInvalid("g must be non-increasing")
        if float(self.w_of_h(h)) < 1:
            raise WindowInvalid("w(h) must be >= 1")

    def describe(self) -> dict:
        def name(f):
            return getattr(f, "spec", repr(f))
        return {"alpha": name(self.alpha_of_h), "beta": self.beta, "gamma": self.gamma,
                "eps": self.eps, "g": name(self.g_of_h), "w": name(self.w_of_h)}


@dataclass(frozen=True)
class ModeIndex:
    ell: int
    j: int
    nu: float


@dataclass(frozen=True)
class EigenvalueRecord:
    mode: ModeIndex
    m0: complex
    m1: complex
    m: complex
    k: complex
    lam: complex
    multiplicity: int
    residual: float
    admissible: bool
    status: str = "ok"
    h: float = float("nan")
    d: int = 2
    aux_residual: float = float("nan")
    half_ball: bool = False         # |m1 - m0| < nu/2
    weight: int = 0                 # multiplicity-weighted mode count represented
    count: int = 1                  # number of modes represented
    iterations: tuple = (0, 0)

    @property
    def ell(self):
        return self.mode.ell

    @property
    def j(self):
        return self.mode.j

    @property
    def nu(self):
        return self.mode.nu


# ---------------------------------------------------------------------------
# elementary pieces

def nu_of(ell: int, d: int) -> float:
    return ell + d / 2 - 1


def _comb(n, k):
    return math.comb(n, k) if n >= 0 else 0


def multiplicity(ell: int, d: int) -> int:
    """Dimension of degree-ell spherical harmonics in d variables."""
    return _comb(d + ell - 1, d - 1) - _comb(d + ell - 3, d - 1)


def initial_guess(nu, j, h):
    j = np.asarray(j, dtype=float)
    out = 2 * np.pi * j + np.asarray(nu) * np.pi / 2 + np.pi / 2 \
        + 1j * np.log(np.sqrt(h) / (4 * np.pi * j))
    return complex(out) if out.ndim == 0 else out


def predicted_im_ratio(nu, j, h):
    """(h + 2 Re m0 Im m0) / h: Im lambda / h predicted from the guess."""
    m0 = initial_guess(nu, j, h)
    return 1 + 2 * np.real(m0) * np.imag(m0) / h


def _ceil(x):
    return np.ceil(np.asarray(x) * (1 - 1e-12)).astype(np.int64)


def _floor(x):
    return np.floor(np.asarray(x) * (1 + 1e-12)).astype(np.int64)


@dataclass(frozen=True)
class IndexSets:
    h: float
    alpha: float
    beta: float
    gamma: float
    g: float
    L: range
    Jtilde: range

    def J_of(self, ell: int) -> range:
        lo = int(_ceil(ell / self.g))
        hi = int(_floor(self.h ** (self.gamma + 0.5)))
        return range(lo, max(lo, hi + 1))

    def Ltilde_of(self, j: int) -> range:
        lo = int(_ceil(self.h ** (self.alpha + 0.5)))
        hi = int(_floor(j * self.g))
        return range(lo, max(lo, hi + 1))


def index_sets(h: float, windows: ParameterWindows) -> IndexSets:
    windows.validate(h)
    a = float(windows.alpha_of_h(h))
    g = float(windows.g_of_h(h))
    lo = int(_ceil(h ** (a + 0.5)))
    hi = int(_floor(h ** (windows.beta + 0.5)))
    L = range(lo, max(lo, hi + 1))
    jlo = int(_ceil(8 * h ** (a + 0.5) / g))
    jhi = int(_floor(h ** (windows.beta + 0.5) / g))
    return IndexSets(h, a, windows.beta, windows.gamma, g, L, range(jlo, max(jlo, jhi + 1)))


def j_cap(nu, h, ratio: float):
    """Largest j >= 1 with predicted Im lambda / h >= ratio (0 if none).

    The prediction is monotone decreasing in j once 4 pi j > sqrt(h), so a
    vectorised integer bisection over [ceil(sqrt(h)/(4 pi)), h] suffices.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    lo = np.full(nu.shape, max(1, math.ceil(math.sqrt(h) / (4 * math.pi))), dtype=np.int64)
    ok = predicted_im_ratio(nu, lo, h) >= ratio
    hi = np.full(nu.shape, int(h) + 1, dtype=np.int64)
    lo = np.where(ok, lo, 0)
    while True:
        act = ok & (hi - lo > 1)
        if not act.any():
            break
        mid = (lo + hi) // 2
        good = predicted_im_ratio(nu, mid, h) >= ratio
        lo = np.where(act & good, mid, lo)
        hi = np.where(act & ~good, mid, hi)
    return lo


# ---------------------------------------------------------------------------
# vectorised stage functions

def _sv_ratio(a, b):
    return a.value / b.value * math.exp(a.log_scale - b.log_scale)


def _aux(z, nu, j, h):
    """f_{nu,j}(z), f' = theta'(z) and a reliability mask."""
    p = specfun.debye_parts(nu, z)
    rot = (z.real - j * TWO_PI_HI) - j * TWO_PI_LO
    f = rot + 1j * z.imag + p.xs + np.log(p.S1 / p.S2) / 2j - np.pi / 4 \
        - 1j * np.log(np.sqrt(h) / (4 * np.pi * j))
    _, df = specfun.theta_debye(p)
    good = (p.err <= specfun.DEBYE_TOL) & (z.real > 0) & (np.abs(z) > nu)
    for i in np.flatnonzero(~good):
        # slow path: tracked phase and Hankel-product derivative
        th = specfun.phase_theta(nu[i], z[i], on_outside="ignore", method="track")
        f[i] = th - np.pi / 4 - 2 * np.pi * j[i] - 1j * np.log(np.sqrt(h) / (4 * np.pi * j[i]))
        df[i] = specfun.d_phase_theta(nu[i], z[i])
    return f, df


def _bessel_ratios(nu, m, k):
    """R_J = J'(m)/J(m), L = H'(k)/H(k) and the pole indicator.

    J = (H1 + H2)/2, so J'/J = (L1 + rho L2)/(1 + rho) with rho = H2/H1.
    """
    pm = specfun.debye_parts(nu, m)
    L1, L2, rho = specfun.log_derivatives(pm)
    RJ = (L1 + rho * L2) / (1 + rho)
    pole_j = np.abs(1 + rho) / (1 + np.abs(rho))
    pk = specfun.debye_parts(nu, k)
    Lk, _, _ = specfun.log_derivatives(pk)
    good_m = (pm.err <= specfun.DEBYE_TOL) & (m.real > 0) & (np.abs(m) > nu)
    good_k = (pk.err <= specfun.DEBYE_TOL) & (k.real > 0) & (np.abs(k) > nu)
    for i in np.flatnonzero(~good_m):
        Jv = specfun.bessel_j(nu[i], m[i])
        RJ[i] = _sv_ratio(specfun.d_bessel_j(nu[i], m[i]), Jv)
        pole_j[i] = 1.0 if Jv.value != 0 else 0.0
    for i in np.flatnonzero(~good_k):
        Lk[i] = _sv_ratio(specfun.d_hankel1(nu[i], k[i]), specfun.hankel1(nu[i], k[i]))
    return RJ, Lk, pole_j


def _kk(m, h):
    k = np.sqrt(1j * h + m * m)
    return np.where(k.imag < 0, -k, k)   # principal branch: Im k >= 0


def _char(m, nu, h):
    """Characteristic residual F(m), F'(m), k and pole indicators."""
    k = _kk(m, h)
    RJ, L, pole_j = _bessel_ratios(nu, m, k)
    RH = 1 / L
    F = k / m - RJ * RH
    dRJ = -RJ / m - (1 - (nu / m) ** 2) - RJ ** 2
    dL = -L / k - (1 - (nu / k) ** 2) - L ** 2
    dRH = -dL / L ** 2
    dF = -1j * h / (k * m * m) - (dRJ * RH + RJ * dRH * m / k)
    pole_h = np.abs(L) * np.abs(k)     # H'(k)/H(k) relative size
    return F, dF, k, pole_j, pole_h


def _newton(fun, z, args, tol, centre=None, radius=None):
    """Damped Newton, vectorised.  Returns z, |f|, iterations, status.

    status: 0 converged, 1 no convergence, 2 left the ball, 3 non-finite.
    """
    z = z.astype(complex).copy()
    n = z.size
    status = np.ones(n, dtype=np.int8)
    its = np.zeros(n, dtype=np.int64)
    f, df = fun(z, *args)[:2]
    res = np.abs(f)
    act = np.ones(n, dtype=bool)
    for it in range(MAX_IT + 1):
        tol_i = np.maximum(tol, 8 * np.spacing(np.abs(z)))
        done = act & (res <= tol_i)
        status[done] = 0
        act &= ~done
        bad = act & ~np.isfinite(res)
        status[bad] = 3
        act &= ~bad
        if not act.any() or it == MAX_IT:
            break
        idx = np.flatnonzero(act)
        sub_args = tuple(a[idx] if isinstance(a, np.ndarray) else a for a in args)
        step = f[idx] / df[idx]
        zi, ri = z[idx], res[idx]
        t = np.ones(idx.size)
        trial = zi - step
        ft, dft = fun(trial, *sub_args)[:2]
        rt = np.abs(ft)
        for _ in range(MAX_HALVINGS):
            worse = ~(rt < ri) & (ri > 8 * np.spacing(np.abs(zi)) * 4)
            if not worse.any():
                break
            w = np.flatnonzero(worse)
            t[w] *= 0.5
            trial[w] = zi[w] - t[w] * step[w]
            wa = tuple(a[w] if isinstance(a, np.ndarray) else a for a in sub_args)
            fw, dfw = fun(trial[w], *wa)[:2]
            ft[w], dft[w], rt[w] = fw, dfw, np.abs(fw)
        z[idx], f[idx], df[idx], res[idx] = trial, ft, dft, rt
        its[idx] += 1
        if centre is not None:
            out = act & (np.abs(z - centre) >= radius)
            status[out] = 2
            act &= ~out
    # one polishing step for converged entries, kept only if it helps
    idx = np.flatnonzero(status == 0)
    if idx.size:
        sub_args = tuple(a[idx] if isinstance(a, np.ndarray) else a for a in args)
        trial = z[idx] - f[idx] / df[idx]
        rt = np.abs(fun(trial, *sub_args)[0])
        better = rt < res[idx]
        if centre is not None:
            better &= np.abs(trial - centre[idx]) < np.broadcast_to(radius, z.shape)[idx]
        z[idx[better]] = trial[better]
        res[idx[better]] = rt[better]
    return z, res, its, status


@dataclass
class ModeBatch:
    """Columns of a solved batch of modes (internal)."""

    ell: np.ndarray
    j: np.ndarray
    nu: np.ndarray
    m0: np.ndarray
    m1: np.ndarray
    m: np.ndarray
    k: np.ndarray
    lam: np.ndarray
    aux_res: np.ndarray
    res: np.ndarray
    its1: np.ndarray
    its2: np.ndarray
    status: np.ndarray   # string codes


def solve_batch(nu, j, h, ell=None) -> ModeBatch:
    """Run the three stages for arrays of (nu, j) at coupling h."""
    nu = np.asarray(nu, dtype=float).ravel()
    j = np.asarray(j, dtype=float).ravel()
    nu, j = np.broadcast_arrays(nu, j)
    nu, j = nu.copy(), j.copy()
    ell = np.zeros(nu.shape, dtype=np.int64) if ell is None else np.asarray(ell).ravel()
    status = np.array(["ok"] * nu.size, dtype=object)
    m0 = initial_guess(nu, j, h) * np.ones(nu.size)
    with np.errstate(all="ignore"):
        m1, r1, i1, s1 = _newton(_aux, m0, (nu, j, h), AUX_TOL, centre=m0, radius=nu)
        status[s1 == 1] = "aux_no_convergence"
        status[s1 == 2] = "aux_escaped"
        status[s1 == 3] = "aux_nonfinite"
        m = np.full(nu.shape, np.nan + 0j)
        r2 = np.full(nu.shape, np.inf)
        i2 = np.zeros(nu.shape, dtype=np.int64)
        go = np.flatnonzero(s1 == 0)
        if go.size:
            mm, rr, ii, ss = _newton(_char, m1[go], (nu[go], h), CHAR_TOL,
                                     centre=m1[go], radius=2.0)
            m[go], r2[go], i2[go] = mm, rr, ii
            sub = status[go]
            sub[ss == 1] = "no_convergence"
            sub[ss == 2] = "escaped"
            sub[ss == 3] = "nonfinite"
            ok = ss == 0
            if ok.any():
                _, _, _, pj, ph = _char(mm, nu[go], h)
                pole = ok & ((pj < 1e-12) | (ph < 1e-12))
                sub[pole] = "pole"
            status[go] = sub
        k = _kk(m, h)
        lam = 1j * h + m * m
        inadm = (status == "ok") & ~((m.real > 0) & (k.imag > 0) & (lam.imag > 0))
        status[inadm] = "inadmissible"
    return ModeBatch(ell, j.astype(np.int64), nu, m0, m1, m, k, lam, r1, r2, i1, i2, status)


# ---------------------------------------------------------------------------
# scalar interface

def aux_zero(nu, j, h, guess=None) -> complex:
    """m1: the zero of f_{nu,j} near m0 (Newton from `guess`)."""
    nu_a = np.array([float(nu)])
    j_a = np.array([float(j)])
    m0 = initial_guess(nu_a, j_a, h)
    z0 = m0 if guess is None else np.array([complex(guess)])
    with np.errstate(all="ignore"):
        z, res, _, st = _newton(_aux, z0, (nu_a, j_a, h), AUX_TOL, centre=m0, radius=nu_a)
    if st[0] == 2:
        raise EscapedBall(f"aux Newton left B_nu(m0) for nu={nu}, j={j}")
    if st[0] != 0:
        raise NoConvergence(f"aux Newton failed (|f|={res[0]:.3g}) for nu={nu}, j={j}")
    return complex(z[0])


def aux_residual(z, nu, j, h) -> complex:
    f, _ = _aux(np.array([complex(z)]), np.array([float(nu)]), np.array([float(j)]), h)
    return complex(f[0])


def char_residual(m, nu, h) -> complex:
    """k/m - [J'(m)/J(m)] [H(k)/H'(k)] with k the principal sqrt(i h + m^2)."""
    m = complex(m)
    if m == 0:
        raise ConfigError("m must be nonzero")
    if abs(m) > 1e7:
        raise RegimeUnsupported("|m| beyond supported range")
    with np.errstate(all="ignore"):
        F, _, _, pj, ph = _char(np.array([m]), np.array([float(nu)]), h)
    if pj[0] < 1e-12:
        raise PoleProximity(f"J_nu(m) vanishes to working precision at m={m}")
    if ph[0] < 1e-12:
        raise PoleProximity(f"H'_nu(k) vanishes to working precision at m={m}")
    return complex(F[0])


def _record(b: ModeBatch, i: int, h: float, d: int, weight=None, count=1) -> EigenvalueRecord:
    ell = int(b.ell[i])
    mult = multiplicity(ell, d)
    return EigenvalueRecord(
        mode=ModeIndex(ell, int(b.j[i]), float(b.nu[i])),
        m0=complex(b.m0[i]), m1=complex(b.m1[i]), m=complex(b.m[i]), k=complex(b.k[i]),
        lam=complex(b.lam[i]), multiplicity=mult, residual=float(b.res[i]),
        admissible=b.status[i] == "ok", status=str(b.status[i]), h=float(h), d=int(d),
        aux_residual=float(b.aux_res[i]),
        half_ball=bool(abs(b.m1[i] - b.m0[i]) < b.nu[i] / 2),
        weight=mult if weight is None else int(weight), count=int(count),
        iterations=(int(b.its1[i]), int(b.its2[i])))


def solve_mode(nu, j, h, d: int = 2) -> EigenvalueRecord:
    """Solve one mode; stage failures raise, inadmissible roots are flagged."""
    if not H_FLOOR / 10 <= h <= H_CAP:
        raise RegimeUnsupported(f"h={h} outside the supported range")
    ell = round(nu - d / 2 + 1)
    b = solve_batch([nu], [j], h, ell=[ell])
    st = b.status[0]
    if st == "aux_escaped":
        raise EscapedBall(f"stage-2 iterate left B_nu(m0) (nu={nu}, j={j})")
    if st.startswith("aux"):
        raise NoConvergence(f"stage-2 Newton failed: {st} (nu={nu}, j={j})")
    if st in ("no_convergence", "nonfinite"):
        raise NoConvergence(f"stage-3 Newton failed (nu={nu}, j={j}, |F|={b.res[0]:.3g})")
    if st == "pole":
        raise PoleProximity(f"root sits on a pole of the ratio forms (nu={nu}, j={j})")
    return _record(b, 0, h, d)


def bound_check(rec: EigenvalueRecord, h: float) -> bool:
    lam, j = rec.lam, rec.j
    ok_im = h / 2 <= lam.imag <= h
    ok_abs = (math.pi * j) ** 2 <= abs(lam) <= (4 * math.pi * j) ** 2
    return bool(ok_im and ok_abs)


def diagnostics_xi_err(m, nu, j, h):
    """(xi_nu(m), err_{nu,j}(m)) at a point m near the root."""
    m = complex(m)
    ma = np.array([m])
    nua = np.array([float(nu)])
    k = _kk(ma, h)
    RJ, L, _ = _bessel_ratios(nua, ma, k)
    R = complex(RJ[0] / L[0])
    p = specfun.debye_parts(nua, ma)
    theta = complex(specfun.theta_debye(p)[0][0])
    c = np.cos(theta)
    xi = np.sin(theta) ** 2 + R * R * c * c
    err = -1 + (m / (4 * np.pi * j)) * (np.exp(1j * theta) / c) * np.sqrt(1 - xi)
    return complex(xi), complex(err)


def xi_err_scales(h: float, windows: ParameterWindows):
    """Reference sizes h^(gamma-1/2) + g^2 and h^(-2 alpha) + g."""
    a = float(windows.alpha_of_h(h))
    g = float(windows.g_of_h(h))
    return h ** (windows.gamma - 0.5) + g * g, h ** (-2 * a) + g


# ---------------------------------------------------------------------------
# enumeration

def _cap_ratio(j_cap_policy):
    if isinstance(j_cap_policy, str):
        if j_cap_policy not in J_CAPS:
            raise ConfigError(f"unknown j-cap policy {j_cap_policy!r}")
        return J_CAPS[j_cap_policy]
    return None if j_cap_policy is None else float(j_cap_policy)


def mode_table(config: SchrodingerConfig, windows: ParameterWindows, j_cap_policy="lam_safe",
               layout: str = "standard"):
    """Per-ell j ranges (ell, jlo, jhi) with jhi >= jlo, after the j cap."""
    sets = index_sets(config.h, windows)
    h = config.h
    if layout == "standard":
        ell = np.arange(sets.L.start, sets.L.stop, dtype=np.int64)
        top = int(_floor(h ** (windows.gamma + 0.5)))
    elif layout == "sharp":
        hi = int(_floor(sets.g / 2 * h ** (windows.beta + 0.5)))
        ell = np.arange(sets.L.start, max(sets.L.start, hi + 1), dtype=np.int64)
        top = int(_floor(h ** (windows.beta + 0.5)))
    else:
        raise ConfigError(f"unknown layout {layout!r}")
    if ell.size == 0:
        return ell, ell.copy(), ell.copy()
    jlo = _ceil(ell / sets.g)
    jhi = np.full(ell.shape, top, dtype=np.int64)
    c = _cap_ratio(j_cap_policy)
    if c is not None:
        jhi = np.minimum(jhi, j_cap(nu_of(ell, config.d), config.h, c))
    keep = jhi >= jlo
    return ell[keep], jlo[keep], jhi[keep]


def mode_count(config, windows, j_cap_policy="lam_safe", layout="standard") -> int:
    ell, jlo, jhi = mode_table(config, windows, j_cap_policy, layout)
    return int(np.sum(jhi - jlo + 1))


def _geometric_edges(lo: int, hi: int, q: float):
    """Integer block edges [e_k, e_{k+1}) covering [lo, hi] with ratio ~q."""
    edges = [lo]
    while edges[-1] <= hi:
        edges.append(max(edges[-1] + 1, int(math.floor(edges[-1] * q))))
    edges[-1] = hi + 1
    return edges


def _blocks(ell, jlo, jhi, q, d, corner="high"):
    """Block representatives: rows (ell_rep, j_rep, weight, count).

    corner='high' picks the largest ell and j present in the block, 'low'
    the smallest ones.  Within an ell block j runs up to the smallest j cap
    of its members, so modes above that are left out (a lower bound).
    """
    rows = []
    if ell.size == 0:
        return rows
    le = _geometric_edges(int(ell[0]), int(ell[-1]), q)
    pos = {int(v): i for i, v in enumerate(ell)}
    for a, b in zip(le[:-1], le[1:]):
        idx = [pos[v] for v in range(a, b) if v in pos]
        if not idx:
            continue
        idx = np.array(idx)
        ls, lo, hi = ell[idx], jlo[idx], jhi[idx]
        top = int(hi.min())
        bot = int(lo.min())
        if top < bot:
            continue
        mult = np.array([multiplicity(int(v), d) for v in ls])
        je = _geometric_edges(bot, top, q)
        for ja, jb1 in zip(je[:-1], je[1:]):
            jb = jb1 - 1
            n = np.clip(jb - np.maximum(ja, lo) + 1, 0, None)
            if n.sum() == 0:
                continue
            present = np.flatnonzero(n > 0)
            if corner == "high":
                rep = (int(ls[present[-1]]), jb)
            else:
                first = present[0]
                rep = (int(ls[first]), int(max(ja, lo[first])))
            rows.append(rep + (int(np.sum(n * mult)), int(n.sum())))
    return rows


def enumerate_spectrum(config: SchrodingerConfig, windows: ParameterWindows | None = None,
                       j_cap_policy="lam_safe", max_modes: int | None = None,
                       workers: int = 1, chunk: int = 20000, corner: str = "high",
                       layout: str = "standard") -> list[EigenvalueRecord]:
    """Attempt every mode of the window and return one record per mode.

    j_cap_policy limits j per ell by the predicted Im lambda / h (threshold
    0.55 for 'lam_safe', 0.05 for 'admissible', none for 'none', or a float).

    If `max_modes` is set and the window has more modes, the window is cut
    into geometric (ell, j) blocks and only one corner of each block is
    solved: the one with the largest ell and j (corner='high') or the
    smallest (corner='low').  Its record carries the block's total
    multiplicity in `weight` and its mode count in `count`.  For a summand
    that decreases in ell and j, weight * summand(high corner) bounds the
    block sum from below; for an increasing one the low corner does.

    layout='sharp' uses the cone-sharpness window: ell up to
    (g/2) h^(beta+1/2) and j up to h^(beta+1/2).
    """
    windows = windows or ParameterWindows()
    h = config.h
    if h < H_FLOOR:
        raise ConfigError(f"h={h} below the enumeration floor {H_FLOOR}")
    if h > H_CAP:
        raise RegimeUnsupported(f"h={h} above {H_CAP}")
    ell, jlo, jhi = mode_table(config, windows, j_cap_policy, layout)
    total = int(np.sum(jhi - jlo + 1)) if ell.size else 0
    if total == 0:
        return []
    if max_modes is None or total <= max_modes:
        counts = jhi - jlo + 1
        L = np.repeat(ell, counts)
        off = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        J = np.repeat(jlo, counts) + off
        W = None
    else:
        # pick the block ratio so that the block count fits the budget
        qlo, qhi = 1.0 + 1e-9, 4.0
        for _ in range(14):
            q = math.sqrt(qlo * qhi)
            if len(_blocks(ell, jlo, jhi, q, config.d, corner)) > max_modes:
                qlo = q
            else:
                qhi = q
        rows = _blocks(ell, jlo, jhi, qhi, config.d, corner)
        L = np.array([r[0] for r in rows], dtype=np.int64)
        J = np.array([r[1] for r in rows], dtype=np.int64)
        W = np.array([r[2] for r in rows], dtype=np.int64)
        C = np.array([r[3] for r in rows], dtype=np.int64)
    nu = nu_of(L, config.d).astype(float)
    pieces = [slice(s, min(s + chunk, L.size)) for s in range(0, L.size, chunk)]

    def run(sl):
        return solve_batch(nu[sl], J[sl], h, ell=L[sl])

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            batches = list(ex.map(run, pieces))
    else:
        batches = [run(sl) for sl in pieces]
    out = []
    for sl, b in zip(pieces, batches):
        for i in range(b.nu.size):
            if W is None:
                out.append(_record(b, i, h, config.d))
            else:
                out.append(_record(b, i, h, config.d, W[sl.start + i], C[sl.start + i]))
    return _mark_duplicates(out)


def _mark_duplicates(records):
    """Flag an accepted root that coincides with an earlier one of the same ell."""
    seen = {}
    out = []
    for r in records:
        if r.admissible:
            key = r.ell
            prev = seen.setdefault(key, [])
            if any(abs(r.m - q) < 1e-6 * (1 + abs(q)) for q in prev[-3:]):
                r = replace(r, admissible=False, status="duplicate")
            else:
                prev.append(r.m)
        out.append(r)
    return out


def smallest_valid_h(windows: ParameterWindows, hs, d: int = 2, j_cap_policy="lam_safe",
                     max_modes: int = 2000):
    """Smallest h in `hs` from which on every accepted mode passes bound_check."""
    best = None
    for h in sorted(hs, reverse=True):
        recs = enumerate_spectrum(SchrodingerConfig(d=d, h=h), windows, j_cap_policy, max_modes)
        acc = [r for r in recs if r.admissible]
        if acc and all(bound_check(r, h) for r in acc):
            best = h
        else:
            break
    return best
