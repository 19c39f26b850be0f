"""Bessel and Hankel functions of real order and complex argument.

Values are returned as ``SpecialValue`` objects, ``value * exp(log_scale)``,
so that magnitudes far outside the double range stay representable.

Crossover rule (checked in this order):

1. ``|z| <= 40``: the Amos algorithm from ``scipy.special`` (power series,
   Miller recurrence and Wronskian normalisation internally).  Exponentially
   scaled variants are used so nothing overflows.
2. ``Re z > 0`` and ``|z| > nu``: the Debye expansion of the Hankel functions,
   written in ``w = sqrt(z^2 - nu^2)``.  It is truncated at its smallest term,
   and that term is the truncation estimate.  It is accepted when the estimate
   is below ``DEBYE_TOL``.  This covers large order together with large
   argument, where Hankel's fixed-order series diverges before it becomes
   useful.
3. Otherwise the unscaled Amos routines, which are allowed while
   ``|Im z| <= 600``.
4. Anything else raises ``RegimeUnsupported``.

The solver does not go through the public functions above.  It uses the
vectorised, scale-free helpers at the bottom of this module
(``debye_parts``, ``log_derivatives``, ``theta_debye``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.special as sc

from .errors import (BranchAmbiguity, DomainError, OutsideRegion,
                     OutsideRegionWarning, RegimeUnsupported)

EPS = float(np.finfo(float).eps)
AMOS_RADIUS = 40.0
DEBYE_TOL = 1e-14
Z_CAP = 1e7
NU_CAP = 1e6
KMAX = 30


@dataclass(frozen=True)
class SpecialValue:
    """value * exp(log_scale) with a relative error estimate."""

    value: complex
    log_scale: float
    est_err: float
    method: str = ""

    def to_complex(self) -> complex:
        if self.value == 0:
            return 0j
        mag = math.log(abs(self.value)) + self.log_scale
        if mag > 709.0:
            raise OverflowError("value exceeds double range; use log_scale")
        return complex(self.value * math.exp(self.log_scale))

    def log(self) -> complex:
        """Principal log of the value (imaginary part in (-pi, pi])."""
        return complex(np.log(self.value)) + self.log_scale


def _combine(a: SpecialValue, ca: complex, b: SpecialValue, cb: complex,
             method: str) -> SpecialValue:
    """ca*a + cb*b for two scaled values."""
    s = max(a.log_scale, b.log_scale)
    v = ca * a.value * math.exp(a.log_scale - s) + cb * b.value * math.exp(b.log_scale - s)
    err = max(a.est_err, b.est_err)
    # cancellation between the two parts inflates the relative error
    big = max(abs(ca * a.value) * math.exp(a.log_scale - s),
              abs(cb * b.value) * math.exp(b.log_scale - s))
    if v != 0:
        err *= max(1.0, big / abs(v))
    return SpecialValue(complex(v), s, err, method)


# ---------------------------------------------------------------------------
# Debye polynomials u_k(t) = sum_m c[k][m] t^(k+2m)

def _debye_coefficients(kmax: int):
    us = [{0: Fraction(1)}]
    for _ in range(kmax):
        u = us[-1]
        nxt: dict[int, Fraction] = {}
        for p, c in u.items():
            if p:
                nxt[p + 1] = nxt.get(p + 1, 0) + Fraction(p, 2) * c
                nxt[p + 3] = nxt.get(p + 3, 0) - Fraction(p, 2) * c
            nxt[p + 1] = nxt.get(p + 1, 0) + c / (8 * (p + 1))
            nxt[p + 3] = nxt.get(p + 3, 0) - 5 * c / (8 * (p + 3))
        us.append(nxt)
    cs, ds = [], []
    for k, u in enumerate(us):
        c = np.array([float(u.get(k + 2 * m, 0)) for m in range(k + 1)])
        cs.append(c)
        ds.append(c * (k + 2 * np.arange(k + 1)))
    return cs, ds


_C, _D = _debye_coefficients(KMAX)


def _horner(coef, x):
    acc = np.zeros_like(x) + coef[-1]
    for c in coef[-2::-1]:
        acc = acc * x + c
    return acc


def _debye_sum(base, mq):
    """S = sum_k base^k P_k(mq) truncated at the smallest term.

    Returns S, sum_k base^k Q_k(mq) (derivative bookkeeping) and the
    magnitude of the last included term.
    """
    S = np.ones_like(base)
    T = np.zeros_like(base)
    pw = np.ones_like(base)
    prev = np.full(base.shape, np.inf)
    last = np.zeros(base.shape)
    active = np.ones(base.shape, dtype=bool)
    for k in range(1, KMAX + 1):
        pw = pw * base
        t = pw * _horner(_C[k], mq)
        mag = np.abs(t)
        active &= (mag <= prev) & (prev > 1e-18)
        if not active.any():
            break
        S = S + np.where(active, t, 0)
        T = T + np.where(active, pw * _horner(_D[k], mq), 0)
        last = np.where(active, mag, last)
        prev = np.where(active, mag, prev)
    return S, T, last


@dataclass
class DebyeParts:
    """Pieces of H1 = sqrt(2/(pi w)) e^{i(z + xs)} S1 and H2 = conj form."""

    nu: np.ndarray
    z: np.ndarray
    w: np.ndarray
    xs: np.ndarray       # xi - z, exact branch (no 2pi reduction)
    xs_red: np.ndarray   # same, with the (2nu+1)pi/4 constant reduced mod 2pi
    S1: np.ndarray
    dS1: np.ndarray
    S2: np.ndarray
    dS2: np.ndarray
    err: np.ndarray      # relative truncation estimate (max of both series)


def debye_parts(nu, z) -> DebyeParts:
    nu, z = np.broadcast_arrays(np.asarray(nu, dtype=float), np.asarray(z, dtype=complex))
    nu = nu.astype(float)
    z = z.astype(complex)
    rho = nu / z
    root = np.sqrt(1 - rho * rho)
    w = z * root
    dw = -nu * rho / (1 + root)                # w - z without cancellation
    tail = dw + nu * np.arcsin(rho)            # xi - z + (2nu+1)pi/4
    c = 2 * nu + 1
    xs = tail - c * (np.pi / 4)
    xs_red = tail - np.fmod(c, 8.0) * (np.pi / 4)
    y = 1 / w
    mq = -(nu * y) ** 2
    S1, T1, e1 = _debye_sum(-1j * y, mq)
    S2, T2, e2 = _debye_sum(1j * y, mq)
    fac = -z * y * y
    err = np.maximum(e1 / np.abs(S1), e2 / np.abs(S2))
    return DebyeParts(nu, z, w, xs, xs_red, S1, fac * T1, S2, fac * T2, err)


def _debye_round(parts: DebyeParts):
    # rounding in the phase grows with the non-trivial part of xi
    return EPS * (8 + 2 * np.abs(parts.xs_red) + np.abs(parts.z) * 1e-3)


def log_derivatives(parts: DebyeParts):
    """H1'/H1, H2'/H2 and rho = H2/H1, all free of exponential scales."""
    z, w = parts.z, parts.w
    common = -z / (2 * w * w)
    L1 = 1j * w / z + common + parts.dS1 / parts.S1
    L2 = -1j * w / z + common + parts.dS2 / parts.S2
    logrho = -2j * z - 2j * parts.xs_red + np.log(parts.S2 / parts.S1)
    rho = np.exp(np.clip(logrho.real, -745.0, 700.0)) * np.exp(1j * logrho.imag)
    return L1, L2, rho


def theta_debye(parts: DebyeParts):
    """Phase theta_nu(z) and its derivative from the Debye pieces."""
    theta = parts.z + parts.xs + np.log(parts.S1 / parts.S2) / 2j
    dtheta = parts.w / (parts.z * parts.S1 * parts.S2)
    return theta, dtheta


# ---------------------------------------------------------------------------
# scalar public interface

def _check(nu, z):
    nu = float(nu)
    z = complex(z)
    if not (nu >= 0) or not math.isfinite(nu):
        raise DomainError(f"order must be real and >= 0, got {nu}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("argument must be finite")
    if nu < 1e-300:
        nu = 0.0        # the Amos routines return nan for subnormal orders
    if abs(z) > Z_CAP or nu > NU_CAP:
        raise RegimeUnsupported(f"|z|={abs(z):.3g}, nu={nu:.3g} beyond supported caps")
    return nu, z


def _amos_err(z):
    return 64 * EPS * (1 + abs(z))


def _debye_values(nu, z):
    """(H1, H2) as SpecialValues, or None when the expansion is not accurate."""
    if not (z.real > 0 and abs(z) > nu):
        return None
    p = debye_parts(nu, z)
    err = float(p.err) + float(_debye_round(p))
    if float(p.err) > DEBYE_TOL:
        return None
    amp = np.sqrt(2 / (np.pi * p.w))
    xr = complex(p.xs_red)
    h1 = complex(amp * p.S1) * np.exp(1j * z.real) * np.exp(1j * xr.real)
    h2 = complex(amp * p.S2) * np.exp(-1j * z.real) * np.exp(-1j * xr.real)
    s1 = -z.imag - xr.imag
    return (SpecialValue(complex(h1), s1, err, "debye"),
            SpecialValue(complex(h2), -s1, err, "debye"),
            p)


def _amos_scaled(kind, nu, z):
    if kind == "j":
        v, s = sc.jve(nu, z), abs(z.imag)
    elif kind == "y":
        v, s = sc.yve(nu, z), abs(z.imag)
    elif kind == "h1":
        v = sc.hankel1e(nu, z) * np.exp(1j * z.real)
        s = -z.imag
    else:
        v = sc.hankel2e(nu, z) * np.exp(-1j * z.real)
        s = z.imag
    return complex(v), float(s)


def _amos(kind, nu, z):
    if abs(z) <= AMOS_RADIUS:
        v, s = _amos_scaled(kind, nu, z)
    elif abs(z.imag) <= 600:
        f = {"j": sc.jv, "y": sc.yv, "h1": sc.hankel1, "h2": sc.hankel2}[kind]
        v, s = complex(f(nu, z)), 0.0
    else:
        raise RegimeUnsupported(f"no method for nu={nu}, z={z}")
    if not (np.isfinite(v.real) and np.isfinite(v.imag)) or v == 0:
        raise RegimeUnsupported(f"Amos evaluation failed for nu={nu}, z={z}")
    return SpecialValue(v, s, _amos_err(z), "amos")


def _evaluate(kind, nu, z, method="auto"):
    if method in ("auto", "debye") and abs(z) > AMOS_RADIUS or method == "debye":
        d = _debye_values(nu, z)
        if d is not None:
            h1, h2, _ = d
            if kind == "h1":
                return h1
            if kind == "h2":
                return h2
            if kind == "j":
                return _combine(h1, 0.5, h2, 0.5, "debye")
            return _combine(h1, -0.5j, h2, 0.5j, "debye")
        if method == "debye":
            raise RegimeUnsupported(f"Debye expansion not accurate at nu={nu}, z={z}")
    return _amos(kind, nu, z)


def _zero_arg(kind, nu):
    if kind == "j":
        if nu == int(nu):
            return SpecialValue(1.0 + 0j if nu == 0 else 0j, 0.0, 0.0, "exact")
        raise DomainError("z = 0 with non-integer order")
    raise DomainError("function is singular at z = 0")


def bessel_j(nu, z, method: str = "auto") -> SpecialValue:
    """J_nu(z), principal branch."""
    nu, z = _check(nu, z)
    if z == 0:
        return _zero_arg("j", nu)
    return _evaluate("j", nu, z, method)


def bessel_y(nu, z, method: str = "auto") -> SpecialValue:
    nu, z = _check(nu, z)
    if z == 0:
        return _zero_arg("y", nu)
    return _evaluate("y", nu, z, method)


def hankel1(nu, z, method: str = "auto") -> SpecialValue:
    """H^(1)_nu(z); log_scale carries the factor exp(-Im z) for large |z|."""
    nu, z = _check(nu, z)
    if z == 0:
        return _zero_arg("h1", nu)
    return _evaluate("h1", nu, z, method)


def hankel2(nu, z, method: str = "auto") -> SpecialValue:
    nu, z = _check(nu, z)
    if z == 0:
        return _zero_arg("h2", nu)
    return _evaluate("h2", nu, z, method)


def _derivative(kind, nu, z, method):
    nu, z = _check(nu, z)
    if z == 0:
        raise DomainError("derivative not evaluated at z = 0")
    if method in ("auto", "debye") and abs(z) > AMOS_RADIUS or method == "debye":
        d = _debye_values(nu, z)
        if d is not None:
            h1, h2, p = d
            L1, L2, _ = log_derivatives(p)
            d1 = SpecialValue(h1.value * complex(L1), h1.log_scale, h1.est_err, "debye")
            d2 = SpecialValue(h2.value * complex(L2), h2.log_scale, h2.est_err, "debye")
            if kind == "h1":
                return d1
            if kind == "h2":
                return d2
            if kind == "j":
                return _combine(d1, 0.5, d2, 0.5, "debye")
            return _combine(d1, -0.5j, d2, 0.5j, "debye")
        if method == "debye":
            raise RegimeUnsupported(f"Debye expansion not accurate at nu={nu}, z={z}")
    # C' = (C_{nu-1} - C_{nu+1}) / 2; the Amos routines accept negative order
    a = _amos(kind, nu - 1, z)
    b = _amos(kind, nu + 1, z)
    return _combine(a, 0.5, b, -0.5, "amos")


def d_bessel_j(nu, z, method: str = "auto") -> SpecialValue:
    return _derivative("j", nu, z, method)


def d_bessel_y(nu, z, method: str = "auto") -> SpecialValue:
    return _derivative("y", nu, z, method)


def d_hankel1(nu, z, method: str = "auto") -> SpecialValue:
    return _derivative("h1", nu, z, method)


# ---------------------------------------------------------------------------
# phase function

def in_region(nu, z, A: float = 3.0) -> bool:
    """Membership in {A nu < Re z, |z| < 2 Re z}."""
    z = complex(z)
    return A * nu < z.real and abs(z) < 2 * z.real


def _raw_phase(nu, x):
    """theta modulo pi from H1/H2, using the general evaluators."""
    h1 = _amos("h1", nu, x)
    h2 = _amos("h2", nu, x)
    return (h1.log() - h2.log()) / 2j


def _theta_anchor(nu, x0):
    p = debye_parts(nu, x0)
    if float(p.err) > 1e-10:
        raise BranchAmbiguity(f"cannot anchor phase at x0={x0}")
    th, _ = theta_debye(p)
    return complex(th)


def phase_theta_tracked(nu, z, step: float = 0.5, max_depth: int = 30) -> complex:
    """theta_nu(z) by continuation along the segment from a real anchor.

    The segment starts as a grid with spacing `step` (theta' is close to 1,
    so increments stay well below pi/4) and is bisected wherever consecutive
    values still differ by pi/4 or more.
    """
    nu, z = _check(nu, z)
    x0 = max(10 * nu, 50.0)
    theta = _theta_anchor(nu, x0)
    a, b = complex(x0), z
    nseg = max(1, math.ceil(abs(b - a) / step))
    stack = [(k / nseg, (k + 1) / nseg, 0) for k in range(nseg - 1, -1, -1)]
    while stack:
        t0, t1, depth = stack.pop()
        raw = _raw_phase(nu, a + (b - a) * t1)
        n = round((theta - raw).real / math.pi)
        cand = raw + n * math.pi
        jump = abs(cand - theta)
        if jump >= math.pi / 4:
            if depth >= max_depth or jump > math.pi / 2 and depth >= max_depth // 2:
                raise BranchAmbiguity(f"phase jump {jump:.3g} near t={t1}")
            mid = 0.5 * (t0 + t1)
            stack.append((mid, t1, depth + 1))
            stack.append((t0, mid, depth + 1))
            continue
        theta = cand
    return complex(theta)


def phase_theta(nu, z, region_A: float = 3.0, on_outside: str = "warn",
                method: str = "auto") -> complex:
    """Branch of arctan(Y_nu/J_nu) continued from theta(0+) = -pi/2.

    `method`: 'debye' uses the expansion phase directly (no branch
    ambiguity where it converges); 'track' follows a path from the real
    anchor x0 = max(10 nu, 50); 'auto' prefers 'debye'.
    """
    nu, z = _check(nu, z)
    if not in_region(nu, z, region_A):
        msg = f"z={z} outside region (A={region_A}) for nu={nu}"
        if on_outside == "raise":
            raise OutsideRegion(msg)
        if on_outside == "warn":
            warnings.warn(msg, OutsideRegionWarning, stacklevel=2)
    if method in ("auto", "debye") and z.real > 0 and abs(z) > nu:
        p = debye_parts(nu, z)
        if float(p.err) <= DEBYE_TOL:
            return complex(theta_debye(p)[0])
        if method == "debye":
            raise RegimeUnsupported("Debye phase not accurate here")
    return phase_theta_tracked(nu, z)


def d_phase_theta(nu, z) -> complex:
    """theta'(z) = 2 / (pi z H1(z) H2(z))."""
    nu, z = _check(nu, z)
    h1 = hankel1(nu, z)
    h2 = hankel2(nu, z)
    prod = h1.value * h2.value * math.exp(h1.log_scale + h2.log_scale)
    return complex(2 / (math.pi * z * prod))
