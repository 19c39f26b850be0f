import math

import numpy as np
import pytest

import oracle as O
from artifact import schrodinger as S
from artifact import specfun
from artifact.errors import ConfigError, WindowInvalid


def mid_mode(h, windows=None):
    """A mode from the middle of the lam_safe window."""
    windows = windows or S.ParameterWindows()
    ell, jlo, jhi = S.mode_table(S.SchrodingerConfig(h=h), windows)
    i = ell.size // 2
    return S.nu_of(int(ell[i]), 2), int((jlo[i] + jhi[i]) // 2)


# --- elementary pieces ------------------------------------------------------

def test_nu_and_multiplicity():
    assert S.nu_of(0, 2) == 0
    assert S.nu_of(3, 3) == 3.5
    assert [S.multiplicity(l, 2) for l in range(4)] == [1, 2, 2, 2]
    assert [S.multiplicity(l, 3) for l in range(4)] == [1, 3, 5, 7]


def test_config_validation():
    with pytest.raises(ConfigError):
        S.SchrodingerConfig(d=2, p=1.0)
    with pytest.raises(ConfigError):
        S.SchrodingerConfig(d=3, p=1.2)
    with pytest.raises(ConfigError):
        S.SchrodingerConfig(h=-1)


def test_index_sets_match_brute_force():
    h = 1e4
    w = S.ParameterWindows(alpha_of_h=0.05, beta=0.2, gamma=0.4, g_of_h=0.5)
    sets = S.index_sets(h, w)
    L = [l for l in range(1, 2000) if h ** 0.55 <= l <= h ** 0.7]
    assert list(sets.L) == L
    for ell in (L[0], L[len(L) // 2], L[-1]):
        J = [j for j in range(1, 20000) if ell <= 0.5 * j <= 0.5 * h ** 0.9]
        assert list(sets.J_of(ell)) == J
    Jt = [j for j in range(1, 20000) if 8 * h ** 0.55 <= 0.5 * j <= h ** 0.7]
    assert list(sets.Jtilde) == Jt == []
    for j in (400, 1000, 5000):
        assert list(sets.Ltilde_of(j)) == [l for l in range(1, 5000) if h ** 0.55 <= l <= 0.5 * j]


def test_tilde_sets_inside_index_sets():
    h = 1e8
    w = S.ParameterWindows(alpha_of_h=0.05, beta=0.2, gamma=0.4, g_of_h=0.5)
    sets = S.index_sets(h, w)
    Jt = sets.Jtilde
    assert len(Jt) > 0
    for j in np.linspace(Jt.start, Jt.stop - 1, 7).astype(int):
        Lt = sets.Ltilde_of(int(j))
        assert len(Lt) > 0
        for ell in (Lt.start, (Lt.start + Lt.stop) // 2, Lt.stop - 1):
            assert ell in sets.L and j in sets.J_of(ell)


def test_degenerate_and_invalid_windows():
    h = 1e6
    edge = S.ParameterWindows(alpha_of_h=0.05, beta=0.2, gamma=0.4,
                              g_of_h=2 * h ** (0.2 - 0.4))
    S.index_sets(h, edge)
    with pytest.raises(WindowInvalid):
        S.index_sets(h, S.ParameterWindows(alpha_of_h=0.05, g_of_h=0.1))
    with pytest.raises(WindowInvalid):
        S.ParameterWindows(beta=0.3, gamma=0.2)


def test_initial_guess_formula():
    m0 = S.initial_guess(2, 10, 1e6)
    assert abs(m0 - (21.5 * math.pi + 1j * math.log(1000 / (40 * math.pi)))) < 1e-12
    # the digits 70.6858 correspond to nu = 4
    assert abs(S.initial_guess(4, 10, 1e6).real - 70.6858) < 1e-4
    h = (4 * math.pi * 7) ** 2
    assert abs(S.initial_guess(1, 7, h).imag) < 1e-12


def test_initial_guess_imag_negative_in_window():
    h = 1e6
    sets = S.index_sets(h, S.ParameterWindows())
    for ell in (sets.L.start, sets.L.stop - 1):
        J = sets.J_of(ell)
        js = np.array([J.start, J.stop - 1])
        assert np.all(np.imag(S.initial_guess(S.nu_of(ell, 2), js, h)) < 0)


# --- stage 2 ----------------------------------------------------------------

def test_aux_zero_large_mode():
    h = 1e6
    sets = S.index_sets(h, S.ParameterWindows())
    ell = sets.L.start
    nu = S.nu_of(ell, 2)
    j = sets.J_of(ell).start
    m1 = S.aux_zero(nu, j, h)
    assert abs(S.aux_residual(m1, nu, j, h)) <= 1e-10
    assert abs(m1 - S.initial_guess(nu, j, h)) < nu / 2


def test_aux_zero_separation():
    h = 1e6
    sets = S.index_sets(h, S.ParameterWindows())
    ell = sets.L.start
    nu = S.nu_of(ell, 2)
    J = sets.J_of(ell)
    roots = [S.aux_zero(nu, j, h) for j in range(J.start, J.start + 6)]
    gaps = [abs(a - b) for a in roots for b in roots if a is not b]
    assert min(gaps) > 4


def test_linear_proxy_newton_one_step():
    nu, j, h = 3.0, 40, 1e6

    def proxy(z, nu, j, h):
        f = z - nu * np.pi / 2 - np.pi / 2 - 2 * np.pi * j \
            - 1j * np.log(np.sqrt(h) / (4 * np.pi * j))
        return f, np.ones_like(z)

    m0 = S.initial_guess(nu, j, h)
    z0 = np.array([m0 + 0.7 - 0.3j])
    z, res, its, st = S._newton(proxy, z0, (np.array([nu]), np.array([float(j)]), h), 1e-10)
    assert st[0] == 0 and its[0] == 1
    assert abs(z[0] - m0) <= 1e-12 * abs(m0)


# --- characteristic residual ------------------------------------------------

def test_char_residual_matches_oracle():
    h = 1e5
    nu, j = mid_mode(h)
    rec = S.solve_mode(nu, j, h)
    assert abs(S.char_residual(rec.m, nu, h)) <= 1e-9
    ref, drift = O.char_residual_checked(rec.m, nu, h)
    assert abs(complex(ref)) <= 1e-8
    assert drift < 1e-6           # relative to a residual near 1e-15
    # away from the root both evaluations agree
    z = rec.m + 0.5
    ours = S.char_residual(z, nu, h)
    ref, _ = O.char_residual_checked(z, nu, h)
    assert abs(ours - complex(ref)) <= 1e-9 * max(1.0, abs(complex(ref)))


def test_char_residual_nu_zero_finite():
    h = 1e5
    m0 = S.initial_guess(0.0, 100, h)
    assert O.finite(S.char_residual(m0, 0.0, h))
    assert O.finite(S.char_residual(m0.conjugate(), 0.0, h))


def test_char_residual_rejects_zero():
    with pytest.raises(ConfigError):
        S.char_residual(0, 1.0, 1e4)


# --- stage 3 ----------------------------------------------------------------

def test_solve_mode_bounds_and_balls():
    h = 1e5
    nu, j = mid_mode(h)
    recs = [S.solve_mode(nu, jj, h) for jj in range(j, j + 5)]
    for r in recs:
        assert r.admissible and r.status == "ok"
        assert S.bound_check(r, h)
        assert abs(r.m - r.m1) < 2
        assert abs(r.lam - (1j * h + r.m * r.m)) <= 1e-12 * abs(r.lam)
    ms = [r.m for r in recs]
    assert min(abs(a - b) for a in ms for b in ms if a is not b) > 4


def test_bound_check_mid_window_and_fabricated():
    h = 1e6
    nu, j = mid_mode(h)
    assert S.bound_check(S.solve_mode(nu, j, h), h)

    def fake(lam, j=100):
        return S.EigenvalueRecord(mode=S.ModeIndex(1, j, 1.0), m0=0j, m1=0j, m=0j, k=0j,
                                  lam=lam, multiplicity=2, residual=0.0, admissible=True)

    j = 400
    assert not S.bound_check(fake(1j * h / 4, j), h)
    big = (5 * math.pi * j) ** 2
    assert not S.bound_check(fake(math.sqrt(big ** 2 - (0.9 * h) ** 2) + 0.9j * h, j), h)
    ok = (2 * math.pi * j) ** 2
    assert S.bound_check(fake(math.sqrt(ok ** 2 - (0.9 * h) ** 2) + 0.9j * h, j), h)


def test_diagnostics_at_root():
    h = 1e6
    nu, j = mid_mode(h)
    rec = S.solve_mode(nu, j, h)
    xi, err = S.diagnostics_xi_err(rec.m, nu, j, h)
    assert abs(xi) < 0.1
    assert abs(err) < 0.5
    th = specfun.phase_theta(nu, rec.m, on_outside="ignore")
    lhs = 1j * (th - math.pi / 4 - 2 * math.pi * j)
    rhs = np.log(4 * math.pi * j / math.sqrt(h)) + np.log(1 + err)
    d = lhs - rhs
    d -= 2j * math.pi * round(d.imag / (2 * math.pi))
    assert abs(d) <= 1e-8
    sx, se = S.xi_err_scales(h, S.ParameterWindows())
    assert sx > 0 and se > 0


# --- enumeration ------------------------------------------------------------

def test_enumerate_permissive_window():
    h = 1e4
    recs = S.enumerate_spectrum(S.SchrodingerConfig(h=h))
    acc = [r for r in recs if r.admissible]
    assert acc
    assert all(S.bound_check(r, h) for r in acc)
    keys = [(r.ell, r.j) for r in recs]
    assert keys == sorted(keys)


def test_enumerate_empty_window():
    # alpha = beta: h^(alpha+1/2) = 10^2.8 is not an integer, so L is empty
    w = S.ParameterWindows(alpha_of_h=0.2, beta=0.2, gamma=0.4, g_of_h=1.0)
    assert len(S.index_sets(1e4, w).L) == 0
    assert S.enumerate_spectrum(S.SchrodingerConfig(h=1e4), w) == []


def test_window_count_grows():
    w = S.ParameterWindows()
    c4 = S.mode_count(S.SchrodingerConfig(h=1e4), w)
    c6 = S.mode_count(S.SchrodingerConfig(h=1e6), w)
    assert c6 > c4 > 0


def test_enumerate_deterministic_and_blocked():
    cfg = S.SchrodingerConfig(h=1e5)
    a = S.enumerate_spectrum(cfg, max_modes=300)
    b = S.enumerate_spectrum(cfg, max_modes=300)
    assert [r.m for r in a] == [r.m for r in b]
    assert len(a) <= 300
    total = S.mode_count(cfg, S.ParameterWindows())
    # blocks tile a sub-rectangle per ell group, so a few capped modes are skipped
    covered = sum(r.count for r in a)
    assert 0.95 * total <= covered <= total


def test_invariants_on_accepted_records():
    h = 1e5
    recs = [r for r in S.enumerate_spectrum(S.SchrodingerConfig(h=h), max_modes=400)
            if r.admissible]
    assert recs
    for r in recs:
        assert abs(r.lam - (1j * h + r.m * r.m)) <= 1e-12 * abs(r.lam)
        assert r.lam.real >= 0 and h / 2 <= r.lam.imag <= h
        assert (math.pi * r.j) ** 2 <= abs(r.lam) <= (4 * math.pi * r.j) ** 2
        assert abs(r.m - r.m1) < 2
        if r.nu >= 4:
            assert r.half_ball
    by_ell = {}
    for r in recs:
        by_ell.setdefault(r.ell, []).append(r.lam)
    for lams in by_ell.values():
        assert len(set(lams)) == len(lams)


@pytest.mark.parametrize("idx", [0, 7, 15])
def test_oracle_residual_on_enumerated(idx):
    h = 1e4
    recs = [r for r in S.enumerate_spectrum(S.SchrodingerConfig(h=h)) if r.admissible]
    r = recs[min(idx, len(recs) - 1)]
    ref, _ = O.char_residual_checked(r.m, r.nu, h)
    assert abs(complex(ref)) <= 1e-8


def test_continued_fraction_oracle_matches_direct():
    # the large-argument oracle route against direct mpmath series
    h = 1e4
    recs = [r for r in S.enumerate_spectrum(S.SchrodingerConfig(h=h)) if r.admissible]
    for r in (recs[0], recs[-1]):
        z = r.m + 0.3
        direct, _ = O.char_residual_checked(z, r.nu, h)
        cf, _ = O.char_residual_cf_checked(z, r.nu, h)
        assert abs(complex(direct) - complex(cf)) <= 1e-20 * max(1.0, abs(complex(direct)))
