"""Eigenvalues of the discrete Schrodinger operator with an imaginary step.

The potential is b_k = i n^(-2/3) on k = 1..n.  Eigenvalues are
lambda = i n^(-2/3) + z + 1/z with z a root of

    i n^(-2/3) (z^(n+1) - 1)(z^(n-1) - 1) = z^(n-2) (z^2 - 1)^2

inside the thin annular sector D_j around angle x_j = (4j - 1) pi / (2n).
Two independent oracles are provided: a colleague-matrix root finder for the
same equation and dense eigenvalues of a finite truncation of the operator.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev
from scipy import linalg

from .errors import ConfigError, NoConvergence, OracleTooLarge

log = logging.getLogger(__name__)

ORACLE_CAP = 4000
TRUNC_CAP = 6000
RESID_TOL = 1e-10
MAX_IT = 60


class GFunction:
    """g(n) >= 1 from a spec string.

    kinds: const:c, loglog (max(1, log log n)), log:c (c log n), pow:c,e.
    """

    def __init__(self, spec: str):
        kind, _, rest = spec.partition(":")
        try:
            args = tuple(float(a) for a in rest.split(",")) if rest else ()
        except ValueError:
            raise ConfigError(f"bad g spec {spec!r}") from None
        nargs = {"const": 1, "loglog": 0, "log": 1, "pow": 2}
        if kind not in nargs or len(args) != nargs[kind]:
            raise ConfigError(f"bad g spec {spec!r}")
        self.kind, self.args, self.spec = kind, args, spec

    def __call__(self, n):
        a = self.args
        n = np.asarray(n, dtype=float)
        if self.kind == "const":
            out = np.full(n.shape, a[0])
        elif self.kind == "loglog":
            out = np.maximum(1.0, np.log(np.log(np.maximum(n, 3.0))))
        elif self.kind == "log":
            out = a[0] * np.log(n)
        else:
            out = a[0] * n ** a[1]
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"GFunction({self.spec!r})"


default_g = GFunction("loglog")


def _as_g(g) -> Callable:
    if isinstance(g, str):
        return GFunction(g)
    if isinstance(g, (int, float)):
        return GFunction(f"const:{float(g)!r}")
    return g


@dataclass
class JacobiConfig:
    n: int
    p: float = 1.0
    gamma: float = 0.8
    g_of_n: Callable = field(default_factory=lambda: default_g)

    def __post_init__(self):
        self.g_of_n = _as_g(self.g_of_n)
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError("n must be an integer >= 2")
        self.n = int(self.n)
        if not self.p >= 1:
            raise ConfigError("p must be >= 1")
        if not 2 / 3 < self.gamma < 1:
            raise ConfigError("gamma must lie in (2/3, 1)")
        if not self.g(self.n) >= 1:
            raise ConfigError("g(n) must be >= 1")

    def g(self, n=None) -> float:
        return float(self.g_of_n(self.n if n is None else n))

    @property
    def c(self) -> float:
        return self.n ** (-2 / 3)

    def potential(self) -> np.ndarray:
        """b_1..b_n (zero elsewhere)."""
        return np.full(self.n, 1j * self.c)

    def norm_p(self) -> float:
        """||b||_p^p = n^(1 - 2p/3)."""
        return self.n ** (1 - 2 * self.p / 3)


@dataclass
class JacobiRootRecord:
    j: int
    z: complex
    lam: complex
    phi: float
    r: float
    residual: float
    kj_abs: float
    admissible: bool
    n: int = 0
    in_D: bool = False
    eigenvalue: bool = False    # genuine eigenvalue, whether or not z lies in D_j
    iterations: int = 0
    status: str = "ok"

    @property
    def lambda_(self) -> complex:
        return self.lam


@dataclass(frozen=True)
class SectorD:
    """D_j: |phi - x_j| <= pi/n and R1 <= r <= R2."""
    j: int
    n: int
    x: float
    R1: float
    R2: float

    def contains_wide(self, z: complex) -> bool:
        """Same angular range, radius in [1 - 1/sqrt(n), 1)."""
        z = complex(z)
        r, phi = abs(z), math.atan2(z.imag, z.real)
        return abs(phi - self.x) <= math.pi / self.n and 1 - self.n ** -0.5 <= r < 1

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        z = complex(z)
        r, phi = abs(z), math.atan2(z.imag, z.real)
        return (abs(phi - self.x) <= math.pi / self.n * (1 + slack)
                and self.R1 * (1 - slack) <= r <= self.R2 * (1 + slack) + slack)


@dataclass
class ModeWindow:
    n: int
    gamma: float
    g: float
    j_lo: int
    j_hi: int

    @property
    def J(self) -> range:
        return range(self.j_lo, self.j_hi + 1)

    @property
    def empty(self) -> bool:
        return self.j_hi < self.j_lo

    def D_of(self, j: int) -> SectorD:
        n = self.n
        return SectorD(j, n, x_j(j, n), 1 - n ** (-self.gamma), 1 - math.log(self.g) / n)


def x_j(j, n):
    return (4 * np.asarray(j) - 1) * np.pi / (2 * n)


def _ceil(x):
    return math.ceil(x - 1e-12 * max(1.0, abs(x)))


def _floor(x):
    return math.floor(x + 1e-12 * max(1.0, abs(x)))


def mode_window(n: int, gamma: float, g) -> ModeWindow:
    """J(n) = [ceil(n^(2/3) g / 2 + 3/4), floor(n/8 - 1/4)] and the sectors D_j."""
    gv = float(_as_g(g)(n)) if not isinstance(g, (int, float)) else float(g)
    lo = _ceil(0.5 * n ** (2 / 3) * gv + 0.75)
    hi = _floor(n / 8 - 0.25)
    w = ModeWindow(n, gamma, gv, lo, hi)
    if w.empty:
        log.info("empty Jacobi window at n=%d: [%d, %d]", n, lo, hi)
    return w


# ---------------------------------------------------------------------------
# characteristic equation

def _powers(w, n):
    """z^k for k in (n-3, n-2, n-1, n, n+1) from w = log z."""
    return {k: np.exp(k * w) for k in (n - 3, n - 2, n - 1, n, n + 1)}


def _char_w(w, n, c):
    z = np.exp(w)
    P = _powers(w, n)
    A = P[n + 1] - 1
    B = P[n - 1] - 1
    S = z * z - 1
    F = 1j * c * A * B - P[n - 2] * S * S
    dF = (1j * c * ((n + 1) * P[n] * B + (n - 1) * P[n - 2] * A)
          - ((n - 2) * P[n - 3] * S * S + 4 * P[n - 2] * z * S))
    return F, dF * z


def char_poly_residual(z, n: int) -> complex:
    """LHS - RHS of the characteristic equation, powers via exp(k log z)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ConfigError("z must be nonzero")
    F, _ = _char_w(np.log(z), n, n ** (-2 / 3))
    return complex(F) if F.ndim == 0 else F


def initial_guess_jacobi(j, n):
    x = x_j(j, n)
    r = np.exp(np.log(n ** (-2 / 3) / (4 * np.sin(x) ** 2)) / n)
    out = r * np.exp(1j * x)
    return complex(out) if np.ndim(out) == 0 else out


def k_of(z, n):
    z = complex(z)
    return (1 - z ** (n + 1)) / (z - z ** n)


def _admissible(z, n):
    z = complex(z)
    zn1 = np.exp((n + 1) * np.log(z))
    zn = np.exp(n * np.log(z))
    ineq = abs(zn1 - 1) < abs(zn - z)
    kj = abs((1 - zn1) / (z - zn))
    return bool(abs(z) < 1 and z.imag > 0 and ineq), kj, ineq


def _newton_w(w, n, c, tol=4e-16):
    w = np.array(w, dtype=complex)
    act = np.ones(w.shape, bool)
    its = np.zeros(w.shape, int)
    for _ in range(MAX_IT):
        if not act.any():
            break
        F, dF = _char_w(w[act], n, c)
        step = F / dF
        idx = np.flatnonzero(act)
        w[idx] -= step
        its[idx] += 1
        done = np.abs(step) <= tol * np.maximum(1.0, np.abs(w[idx]))
        act[idx[done]] = False
    # one polishing step
    F, dF = _char_w(w, n, c)
    w = w - F / dF
    return w, act, its


def _make_record(j, z, n, D: SectorD | None, its, status="ok"):
    c = n ** (-2 / 3)
    lam = 1j * c + z + 1 / z
    res = abs(char_poly_residual(z, n))
    adm, kj, _ = _admissible(z, n)
    in_D = D.contains(z) if D is not None else False
    eig = adm and kj < 1 and res <= RESID_TOL and status == "ok"
    ok = eig and in_D
    if status == "ok" and not ok:
        status = "outside_D" if eig else "inadmissible"
    return JacobiRootRecord(int(j), complex(z), complex(lam), math.atan2(z.imag, z.real), abs(z),
                            float(res), float(kj), bool(ok), n, bool(in_D), bool(eig), int(its),
                            status)


def solve_mode_jacobi(j: int, n: int, gamma: float = 0.8, g=2.0) -> JacobiRootRecord:
    """Newton in log z from the explicit guess; raises NoConvergence."""
    win = mode_window(n, gamma, g)
    w0 = np.log(initial_guess_jacobi(j, n))
    w, act, its = _newton_w(np.array([w0]), n, n ** (-2 / 3))
    if act[0] or not np.isfinite(w[0]):
        raise NoConvergence(f"Jacobi Newton failed for j={j}, n={n}")
    return _make_record(j, np.exp(w[0]), n, win.D_of(j), its[0])


def solve_window(config: JacobiConfig) -> list:
    """All j in J(n), vectorised; failures are flagged, not raised."""
    n = config.n
    win = mode_window(n, config.gamma, config.g_of_n)
    if win.empty:
        return []
    js = np.arange(win.j_lo, win.j_hi + 1)
    w, act, its = _newton_w(np.log(initial_guess_jacobi(js, n)), n, config.c)
    out = []
    for k, j in enumerate(js):
        st = "no_convergence" if act[k] or not np.isfinite(w[k]) else "ok"
        z = np.exp(w[k]) if np.isfinite(w[k]) else complex(np.nan, np.nan)
        if st != "ok":
            out.append(JacobiRootRecord(int(j), z, complex(np.nan), np.nan, np.nan, np.inf,
                                        np.nan, False, n, False, False, int(its[k]), st))
            continue
        out.append(_make_record(j, z, n, win.D_of(int(j)), its[k]))
    return out


# ---------------------------------------------------------------------------
# oracles

def characteristic_chebyshev(n: int) -> np.ndarray:
    """Chebyshev coefficients in x = u/2, u = z + 1/z, of the equation / z^n.

    (z^(n+1)-1)(z^(n-1)-1)/z^n = 2 T_n(x) - 2x and (z^2-1)^2/z^2 = 4x^2 - 4, so
    the equation reads 2ic T_n - 2ic T_1 - 2 T_2 + 2 T_0 = 0.
    """
    c = n ** (-2 / 3)
    coef = np.zeros(n + 1, dtype=complex)
    coef[n] += 2j * c
    coef[1] += -2j * c
    coef[2] += -2
    coef[0] += 2
    return coef


def _z_from_u(u):
    u = np.asarray(u, dtype=complex)
    s = np.sqrt(u * u - 4)
    z1, z2 = (u + s) / 2, (u - s) / 2
    return np.where(np.abs(z1) < np.abs(z2), z1, z2)


def companion_oracle(n: int, cap: int = ORACLE_CAP, filtered: bool = True):
    """Roots z of the characteristic equation from the colleague matrix.

    Every root pair (z, 1/z) maps to one u = z + 1/z, so the degree-2n
    equation becomes degree n in u.  The colleague matrix of the Chebyshev
    series is diagonalised and each u is mapped back to the root with |z| < 1.
    With `filtered`, only roots with |z| < 1, Im z > 0 and
    |z^(n+1) - 1| < |z^n - z| are returned.
    """
    if n > cap:
        raise OracleTooLarge(f"companion oracle capped at n={cap}")
    M = chebyshev.chebcompanion(characteristic_chebyshev(n))
    x = linalg.eigvals(M, check_finite=False)
    z = _z_from_u(2 * x)
    if not filtered:
        return z
    keep = []
    for zz in z:
        if abs(zz) < 1 and zz.imag > 0 and _admissible(zz, n)[2]:
            keep.append(complex(zz))
    return keep


def match_oracle(records, oracle_roots, windows: ModeWindow):
    """Per record: (j, distance to nearest oracle root, roots in D_j, roots in the wide sector)."""
    zo = np.asarray(oracle_roots, dtype=complex)
    out = []
    for r in records:
        D = windows.D_of(r.j)
        dist = float(np.min(np.abs(zo - r.z))) if zo.size else math.inf
        cnt = sum(D.contains(z) for z in zo)
        wide = sum(D.contains_wide(z) for z in zo)
        out.append((r.j, dist, cnt, wide))
    return out


def _tridiag_eigvals(diag, off=1.0):
    M = diag.size
    A = np.diag(diag.astype(complex))
    if M > 1:
        A += np.diag(np.full(M - 1, off), 1) + np.diag(np.full(M - 1, off), -1)
    return linalg.eigvals(A, overwrite_a=True, check_finite=False)


def _folded_eigvals(bsym):
    """Eigenvalues of a tridiagonal (unit off-diagonal) with mirror-symmetric diagonal.

    Even and odd eigenvectors give two half-size blocks.
    """
    M = bsym.size
    h = M // 2
    if M % 2 == 0:
        d = bsym[h:].astype(complex)
        out = []
        for s in (1.0, -1.0):
            dd = d.copy()
            dd[0] += s
            out.append(_tridiag_eigvals(dd))
        return np.concatenate(out)
    d = bsym[h:].astype(complex)
    A = np.diag(d)
    A += np.diag(np.ones(h), 1) + np.diag(np.ones(h), -1)
    A[0, 1] = A[1, 0] = math.sqrt(2)
    even = linalg.eigvals(A, overwrite_a=True, check_finite=False)
    odd = _tridiag_eigvals(d[1:])
    return np.concatenate([even, odd])


def pollution_floor(n: int, N: int) -> float:
    return 3 * n ** (-2 / 3) * N ** (-0.25)


def truncated_matrix_oracle(n: int, N: int, b=None, cap: int = TRUNC_CAP,
                            layout: str = "auto", trusted_only: bool = True):
    """Eigenvalues of a (2N+1)-site truncation of the operator.

    b defaults to the step potential on sites 1..n; an arbitrary finitely
    supported b (array for sites 1..len(b)) is accepted.  With layout
    'literal' the window is sites -N..N.  With 'centred' it is the
    (2N+1)-site window centred on the support, which is mirror symmetric
    for a symmetric b and splits into two half-size blocks.  'auto' picks
    'centred' when b is mirror symmetric.  With `trusted_only`, only
    eigenvalues with dist(lam, [-2, 2]) > 3 n^(-2/3) N^(-1/4) are returned.
    """
    if b is None:
        if N < 4 * n:
            raise ConfigError("truncated oracle needs N >= 4n")
        b = np.full(n, 1j * n ** (-2 / 3))
    b = np.asarray(b, dtype=complex)
    m = b.size
    if 2 * N + 1 > cap:
        raise OracleTooLarge(f"truncated oracle capped at {cap} sites")
    if 2 * N + 1 < m:
        raise ConfigError("truncation narrower than the support")
    sym = np.array_equal(b, b[::-1])
    if layout == "auto":
        layout = "centred" if sym else "literal"
    if layout == "centred":
        if not sym:
            raise ConfigError("centred folding needs a mirror-symmetric b")
        M = 2 * N + 1
        if (M - m) % 2:
            M -= 1              # keep the support exactly centred
        pad = (M - m) // 2
        diag = np.concatenate([np.zeros(pad), b, np.zeros(pad)])
        ev = _folded_eigvals(diag)
    elif layout == "literal":
        diag = np.zeros(2 * N + 1, dtype=complex)
        diag[N + 1:N + 1 + m] = b
        ev = _tridiag_eigvals(diag)
    else:
        raise ConfigError(f"unknown layout {layout!r}")
    if not trusted_only:
        return ev
    return trusted(ev, n if n else m, N)


def dist_segment(lam):
    lam = np.asarray(lam, dtype=complex)
    return np.abs(lam - np.clip(lam.real, -2, 2))


def trusted(ev, n, N):
    ev = np.asarray(ev, dtype=complex)
    return ev[dist_segment(ev) > pollution_floor(n, N)]


# ---------------------------------------------------------------------------
# asymptotics

@dataclass
class AsymptoticReport:
    j: int
    n: int
    g: float
    end_exact: float          # |lam - 2|
    end_pred: float           # 2 (1 - cos phi)
    end_dev: float            # relative deviation
    seg_exact: float          # |lam^2 - 4|
    seg_pred: float           # 4 sin^2 phi
    seg_dev: float
    K_g: float                # max deviation * g^2
    lam_dev: float            # |lam - 2 cos phi - i n^(-2/3)|
    K_gamma: float            # lam_dev * n^gamma
    im_ratio: float           # Im lam / n^(-2/3)


def asymptotic_report(rec: JacobiRootRecord, n: int, gamma: float, g) -> AsymptoticReport:
    gv = float(_as_g(g)(n)) if not isinstance(g, (int, float)) else float(g)
    lam, phi = rec.lam, rec.phi
    e_ex, e_pr = abs(lam - 2), 2 * (1 - math.cos(phi))
    s_ex, s_pr = abs(lam * lam - 4), 4 * math.sin(phi) ** 2
    e_dev = abs(e_ex - e_pr) / e_pr
    s_dev = abs(s_ex - s_pr) / s_pr
    c = n ** (-2 / 3)
    ld = abs(lam - 2 * math.cos(phi) - 1j * c)
    return AsymptoticReport(rec.j, n, gv, e_ex, e_pr, e_dev, s_ex, s_pr, s_dev,
                            max(e_dev, s_dev) * gv * gv, ld, ld * n ** gamma, lam.imag / c)
