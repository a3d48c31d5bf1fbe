"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""
import re

import numpy as np

from gmspheres.algebra import I, J, K, ONE, ZERO, pair, random_unit
from gmspheres.bundle import (
    GroupElement, act, normal_form, normal_form_point, random_e8_point, random_group_element, random_point,
    sigma5_canonical_rep, star_orbit_residual,
)
from gmspheres.geometry import (
    MetricParams, clutching_relation, join_segment, lift_gamma, lift_velocity, metric_eval, star_generator_vector,
    vertical_component, wiedersehen_check,
)
from gmspheres import models as M
from gmspheres.powermaps import decompose, degree_check, oct_power, rho
from gmspheres.suites import REGISTRY, SuiteConfig, emit_report, run_suite


def _fmt(x):
    return f"{x:.3e}"


def test_01_oracle_equivalence(criterion):
    worst = 0.0
    for n in range(-6, 7):
        u = random_unit("S7", 1000 + n, size=10_000)
        worst = max(worst, float(np.max(np.abs(rho(n, u) - oct_power(n, u)))))
    ok = criterion(1, "rho_n equals octonion u^n, n in [-6,6], 1e4 samples each", worst <= 1e-12,
                   f"max error {_fmt(worst)} (tol 1e-12)")
    assert ok


def test_02_parity(criterion):
    x = random_unit("S6", 2, size=1000)
    north = pair(ONE, ZERO)
    worst = 0.0
    for m in range(-3, 4):
        sign = (-1) ** abs(m)
        worst = max(worst, float(np.max(np.abs(rho(2 * m + 1, x) - sign * x))))
        worst = max(worst, float(np.max(np.abs(rho(2 * m, x) - sign * north))))
    ok = criterion(2, "parity identities on S^6, m in [-3,3], 1e3 samples", worst <= 1e-12,
                   f"max error {_fmt(worst)} (tol 1e-12)")
    assert ok


def test_03_bundle_invariance(criterion):
    member = commute = 0.0
    for n in range(-4, 5):
        x = random_point(n, 300 + n, size=1000)
        for k, signs in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
            g = random_group_element((n + 4, k), size=1000)
            g = GroupElement(g.q1, g.q2, g.q3, signs)
            member = max(member, float(np.max(act(g, x).residual())))
            star = GroupElement.star(g.q1)
            bullet = GroupElement.bullet(g.q3, signs)
            a, b = act(star, act(bullet, x)), act(bullet, act(star, x))
            commute = max(commute, float(np.max(np.abs(a.u - b.u))), float(np.max(np.abs(a.v - b.v))))
    ok = criterion(3, "E_n preserved by Z2xZ2xS3xS3xS3, star/bullet commute, n in [-4,4]",
                   member <= 1e-11 and commute <= 1e-11,
                   f"membership {_fmt(member)}, commutation {_fmt(commute)} (tol 1e-11)")
    assert ok


def test_04_pullback_identity(criterion):
    t = np.linspace(0.0, 2 * np.pi, 100)[None, :]
    worst = 0.0
    for n in range(-4, 5):
        x = random_unit("S6", 400 + n, size=100)
        p, w = x[:, None, 0], x[:, None, 1]
        a = lift_gamma(n, p, w, t)
        b = lift_gamma(1, p, w, n * t)
        worst = max(worst, float(np.max(np.abs(rho(n, a.u) - b.u))), float(np.max(np.abs(a.v - b.v))))
    ok = criterion(4, "rho-tilde of lift_n(t) = lift_1(nt), 100 t x 100 (p,w), n in [-4,4]", worst <= 1e-10,
                   f"max error {_fmt(worst)} (tol 1e-10)")
    assert ok


def test_05_double_horizontality(criterion):
    rng = np.random.default_rng(5)
    x = random_unit("S6", 5, size=200)
    t = rng.uniform(0, 2 * np.pi, 200)
    n = rng.integers(-4, 5, 200)
    fibre = star = 0.0
    m = MetricParams(1.0)
    for k in range(-4, 5):
        sel = n == k
        X = lift_velocity(k, x[sel, 0], x[sel, 1], t[sel], h=1e-6)
        fibre = max(fibre, float(np.max(np.abs(vertical_component(X.at, X.dv)))))
        for e in (I, J, K):
            star = max(star, float(np.max(np.abs(metric_eval(m, X, star_generator_vector(X.at, e))))))
    ok = criterion(5, "explicit lift horizontal for both fibrations, 200 samples", fibre <= 1e-6 and star <= 1e-6,
                   f"fibre {_fmt(fibre)}, star-orbit {_fmt(star)} (tol 1e-6)")
    assert ok


def test_06_wiedersehen(criterion):
    worst = 0.0
    for n in range(-4, 5):
        x = random_unit("S6", 600 + n, size=200)
        worst = max(worst, wiedersehen_check(n, x[:, 0], x[:, 1]).max_residual)
    ok = criterion(6, "orbit witnesses at t = pi and t = 2 pi, n in [-4,4], 200 samples", worst <= 1e-9,
                   f"max residual {_fmt(worst)} (tol 1e-9)")
    assert ok


def test_07_clutching(criterion):
    worst = 0.0
    for n in range(-3, 4):
        x = random_unit("S6", 700 + n, size=500)
        _, res = clutching_relation(n, x)
        worst = max(worst, float(np.max(res)))
    ok = criterion(7, "sigma^n half-turn orbit relation, n in [-3,3], 500 samples", worst <= 1e-9,
                   f"max residual {_fmt(worst)} (tol 1e-9)")
    assert ok


def test_08_degree(criterion):
    wrong = []
    for n in [k for k in range(-4, 5) if k != 0]:
        rng = np.random.default_rng(800 + n)
        count = 0
        while count < 20:
            y = rng.standard_normal((2, 4))
            y /= np.linalg.norm(y)
            if np.sin(float(decompose(y).t)) < 1e-3:
                continue
            count += 1
            d = degree_check(n, y)
            if d != n:
                wrong.append((n, d))
    ok = criterion(8, "degree_check returns n, n in [-4,4]\\{0}, 20 regular values each", not wrong,
                   f"{len(wrong)} mismatches of 160")
    assert ok


def test_09_join(criterion):
    rng = np.random.default_rng(9)
    t0 = rng.uniform(0, 2 * np.pi, 200)
    y = random_unit("S5", 9, size=200)
    rep = join_segment(2, t0, y, step=1e-3)
    strata = bool(np.all(rep.start_in_E1) and np.all(rep.end_in_E8))
    ok = strata and rep.path.membership <= 1e-8 and rep.length == np.pi / 2 and rep.orthogonality <= 1e-15
    criterion(9, "join segments: E1 start, E8 end, length pi/2, 200 samples", ok,
              f"strata {'ok' if strata else 'WRONG'}, endpoint membership {_fmt(rep.path.membership)} (tol 1e-8)")
    assert ok


def test_10_normal_form(criterion):
    rng = np.random.default_rng(10)
    worst = 0.0
    for i in range(1000):
        n = int(rng.integers(-4, 5))
        s, t = rng.uniform(0, np.pi / 2), rng.uniform(0, np.pi)
        g = random_group_element((10, i), with_signs=False)
        nf = normal_form(act(g, normal_form_point(n, s, t)))
        worst = max(worst, abs(nf.s - s), abs(nf.t - t))
    ok = criterion(10, "normal form recovers (s, t), 1e3 instances", worst <= 1e-9,
                   f"max error {_fmt(worst)} (tol 1e-9)")
    assert ok


def test_11_isotropy_tables(criterion):
    d = 3
    fixed = 0.0
    least_moved = np.inf
    mismatches = 0
    rand = M.random_symmetries(11, 100)
    for s_alpha, listed in ((0.0, M.k_minus()), (0.3, M.h_group()), (np.pi / 4, M.k_plus(d))):
        s_beta = M.matched_beta_parameter(d, s_alpha)
        for cands, is_listed in ((listed, True), (rand, False)):
            a = M.isotropy_scan("milnor-alpha", s_alpha, cands, d)
            b = M.isotropy_scan("brieskorn-beta", s_beta, cands, d)
            if is_listed:
                fixed = max(fixed, float(a.max()), float(b.max()))
            else:
                least_moved = min(least_moved, float(a.min()), float(b.min()))
            mismatches += int(np.sum((a <= 1e-11) != (b <= 1e-11)))
    ok = fixed <= 1e-11 and least_moved > 1e-3 and mismatches == 0
    criterion(11, "K-, H, K+ fix alpha and beta (d = 3); random elements move; patterns match", ok,
              f"listed {_fmt(fixed)} (tol 1e-11), random min {_fmt(least_moved)} (> 1e-3), {mismatches} mismatches")
    assert ok


def test_12_fixed_sets(criterion):
    k, l = M.exponents(3)
    rng = np.random.default_rng(12)
    m5 = 0.0
    for i in range(1000):
        x = M.random_milnor_point((12, i), k, l, chart=1 + i % 2, on_m5=True)
        m = M.rotation(rng.uniform(0, 2 * np.pi)) @ (M.REFLECTION if rng.integers(2) else np.eye(2))
        g = M.MilnorGroupElement(m, random_unit("S3", (12, i)), bool(rng.integers(2)))
        m5 = max(m5, M.m5_residual(M.milnor_act(g, x)), M.m5_residual(M.milnor_transition(x)))
    A = np.diag([1.0, -1.0, -1.0])
    w7 = 0.0
    for i in range(200):
        z = M.random_w7_point(1 + i % 3, (12, i), on_fixed_set=True)
        w7 = max(w7, M.w7_fixed_residual(z), float(np.max(np.abs(M.w7_so3_act(A, z).coords() - z.coords()))))
    ok = m5 <= 1e-10 and w7 <= 1e-12
    criterion(12, "M^5 invariant under action and transition; W^3 points fixed on W^7", ok,
              f"M^5 residual {_fmt(m5)} (tol 1e-10), W^7 fixed-set residual {_fmt(w7)} (tol 1e-12)")
    assert ok


def test_13_sigma5_representative(criterion):
    x = random_e8_point(0, 13, size=1000)
    rep = sigma5_canonical_rep(x)
    again = sigma5_canonical_rep(rep)
    idem = max(float(np.max(np.abs(again.u - rep.u))), float(np.max(np.abs(again.v - rep.v))))
    _, defect, res = star_orbit_residual(x, rep)
    faithful = float(np.max(res + defect))
    ok = idem <= 1e-12 and faithful <= 1e-12
    criterion(13, "Sigma^5 canonical representative, 1e3 points of E8_0", ok,
              f"idempotence {_fmt(idem)}, orbit residual {_fmt(faithful)} (tol 1e-12)")
    assert ok


def test_14_determinism(criterion):
    differ = []
    for name in sorted(REGISTRY):
        n = 0 if name == "sigma5-rep" else None
        samples = 10 if name == "join" else 50
        runs = [emit_report(run_suite(SuiteConfig(name, n=n, samples=samples, seed=2024))) for _ in range(2)]
        a, b = (re.sub(r'"wall_time_ms": [^\n]*', "", r) for r in runs)
        if a != b:
            differ.append(name)
    ok = criterion(14, "every suite byte-identical across two runs (timing excluded)", not differ,
                   f"{len(REGISTRY) - len(differ)}/{len(REGISTRY)} suites identical")
    assert ok
