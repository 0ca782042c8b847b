"""Acceptance suite: the eleven desk-scale criteria, one test each.

Every test prints one un-captured PASS/FAIL line with the measured
numbers, then asserts at the stated tolerance.  Two criteria fail
honestly at desk scale and are left failing rather than weakened:

  criterion 6   1.9 T < phi(T) needs T >~ 6.7e3 on this grid; at
                T = 500 the ratio is only 1.857 (the bound is
                asymptotic, and desk-scale T is not asymptotic).

  criterion 8   the prime-proxy relative error is not monotone over
                {1e3, 3e3, 1e4}: the T = 1e3 ladder point runs low
                (Z^2 fluctuation), making the proxy accidentally good
                there (6.8%) before settling to 9.3% -> 8.8%.
"""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from ladderlab import asymptotics, ladder, quadrature, zeta
from ladderlab.constants import default_constants

from test_quadrature import gl16_weighted

SEED = 1729


def report(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {num:>2}] {'PASS' if ok else 'FAIL'}  {detail}",
              flush=True)


@pytest.fixture(scope="module")
def mu7():
    return ladder.MuSpec.k_log()


@pytest.fixture(scope="module")
def lad(mu7, checkpoints, engine, phi_model):
    return ladder.build_ladder(mu7, checkpoints, engine=engine,
                               model=phi_model)


@pytest.fixture(scope="module")
def fitted(lad, checkpoints):
    c0, unc = asymptotics.estimate_c0(lad, checkpoints)
    return default_constants(c0=c0, c0_uncertainty=unc)


def test_criterion_01_z_engine_oracle(capsys, oracles):
    import mpmath
    mpmath.mp.dps = 30
    rng = np.random.default_rng(SEED)
    ts = rng.uniform(10.0, 1e5, 100)
    worst_z = max(abs(zeta.z(float(t)).value
                      - float(mpmath.siegelz(float(t)))) for t in ts)
    zeros = zeta.find_zeros(5.0, 50.5)
    worst_g = max(abs(z.gamma - float(oracles["zeta_zeros"][str(i)]))
                  for i, z in enumerate(zeros[:10], start=1))
    ok = worst_z <= 1e-8 and len(zeros) >= 10 and worst_g <= 1e-8
    report(capsys, 1, ok,
           f"max |Z - oracle| = {worst_z:.3e} (cap 1e-8) over 100 random "
           f"t in [10, 1e5]; first 10 zeros off by <= {worst_g:.3e}")
    assert worst_z <= 1e-8
    assert worst_g <= 1e-8


def test_criterion_02_quadrature_oracle(capsys, checkpoints):
    rng = np.random.default_rng(SEED)
    ts = rng.uniform(10.0, 2000.0, 10)
    worst = 0.0
    for t in ts:
        t = float(t)
        direct = gl16_weighted(t, 0.5, None)
        finer = gl16_weighted(t, 0.25, None)
        assert abs(direct - finer) <= 1e-9 * direct
        got = quadrature.hl_integral(t, checkpoints)
        worst = max(worst, abs(got - direct) / direct)
    ok = worst <= 1e-7
    report(capsys, 2, ok,
           f"max rel deviation from one-shot quadrature = {worst:.3e} "
           f"(cap 1e-7) at 10 random T <= 2000")
    assert worst <= 1e-7


def test_criterion_03_ladder_defining_equation(capsys, mu7, checkpoints,
                                               engine):
    ys = np.geomspace(200.0, 2e4, 40)
    t0 = ladder.solve_M(mu7.y0, mu7, checkpoints, engine)
    worst_eq, worst_inv = 0.0, 0.0
    for y in ys:
        y = float(y)
        m = ladder.solve_M(y, mu7, checkpoints, engine)
        target = quadrature.weighted_integral(y, mu7, engine).value
        worst_eq = max(worst_eq,
                       abs(quadrature.hl_integral(m, checkpoints) - target)
                       / target)
        back = ladder.phi(m, mu7, checkpoints, engine, t0=t0)
        worst_inv = max(worst_inv, abs(back - y) / y)
    ok = worst_eq <= 1e-8 and worst_inv <= 1e-9
    report(capsys, 3, ok,
           f"40-point grid y in [200, 2e4]: max |I(M)-Phi|/Phi = "
           f"{worst_eq:.3e} (cap 1e-8), max |phi(M(y))-y|/y = "
           f"{worst_inv:.3e} (cap 1e-9)")
    assert worst_eq <= 1e-8
    assert worst_inv <= 1e-9


def test_criterion_04_theorem_a(capsys, lad, checkpoints, fitted, phi_model):
    scaled = []
    for t in (1e3, 2e3, 4e3, 8e3):
        r = asymptotics.remainder(t, lad, checkpoints, fitted, phi_model)
        y = float(ladder.phi_fast(t, lad.mu, checkpoints, phi_model))
        scaled.append(abs(r) * y / math.log(y))
    top = lad.Ts[lad.Ts >= lad.Ts[-1] / 10.0]
    worst_f = max(abs(asymptotics.remainder(float(t), lad, checkpoints,
                                            fitted, phi_model)) for t in top)
    worst_b = max(abs(quadrature.hl_integral(float(t), checkpoints)
                      - asymptotics.balasubramanian(float(t), fitted))
                  for t in top)
    ok = max(scaled) <= 3.0 and worst_f < worst_b
    report(capsys, 4, ok,
           f"|I-F(phi)| phi/ln(phi) <= {max(scaled):.3f} across anchors "
           f"(one constant, cap 3.0); top decade max |I-F| = {worst_f:.2e} "
           f"vs max |I-reference| = {worst_b:.2f}")
    assert max(scaled) <= 3.0
    assert worst_f < worst_b


def test_criterion_05_theorems_b_c(capsys, mu7, checkpoints, engine,
                                   phi_model):
    t_grid = [500.0, 1000.0, 2000.0, 4000.0]
    mu9 = ladder.MuSpec.k_log(9.0)
    pair = [abs(ladder.ladder_gap(mu7, mu9, t, checkpoints, engine)) * t
            for t in t_grid]
    beam = ladder.beam_experiment(
        [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)],
        y_grid=np.linspace(150.0, 400.0, 6), T_grid=t_grid,
        table=checkpoints, engine=engine, model=phi_model)
    prods = beam["spread_times_T"]
    floor = 1e-6   # resolution floor: both series vanish to solver noise
    ok = (max(pair) <= 2.0 * max(pair[0], floor)
          and max(prods) <= 2.0 * max(prods[0], floor))
    report(capsys, 5, ok,
           f"|phi_7 - phi_9| * T <= {max(pair):.3g}, beam spread * T <= "
           f"{max(prods):.3g} across T in {{500..4000}} (no 2x growth)")
    assert max(pair) <= 2.0 * max(pair[0], floor)
    assert max(prods) <= 2.0 * max(prods[0], floor)


def test_criterion_06_sandwich(capsys, lad):
    sel = lad.Ts >= 500.0
    ts, ys = lad.Ts[sel], lad.phis[sel]
    lower_ok = bool(np.all(1.9 * ts < ys))
    upper_ok = bool(np.all(ys < 2.0 * ts))
    gap = 2.0 * ts - ys
    fitted_b = float(np.max(gap * np.log(ys) / ys))
    b_ok = bool(np.all(gap > 0)) and fitted_b < 1.0
    worst_i = int(np.argmin(ys / ts))
    ok = lower_ok and upper_ok and b_ok
    report(capsys, 6, ok,
           f"1.9T < phi first holds from grid T = {lad.threshold_1_9:.1f}; "
           f"phi/T = {ys[worst_i] / ts[worst_i]:.4f} at T = "
           f"{ts[worst_i]:.0f} (asymptotic bound, not yet reached); "
           f"0 < 2T - phi < B' phi/ln phi holds with B' = {fitted_b:.3f}")
    assert upper_ok
    assert b_ok
    assert lower_ok, (
        f"1.9T < phi(T) fails for grid T in [500, {lad.threshold_1_9:.1f})"
    )


def test_criterion_07_exact_series(capsys, fitted):
    a = asymptotics.expansion_A(5)
    b = asymptotics.expansion_B(3, fitted)
    a_ok = (a.entry(1) == {0: {1: Fr(1)}}
            and a.entry(2) == {}
            and a.entry(3) == {0: {2: Fr(1, 2)}}
            and a.entry(4) == {0: {3: Fr(1, 6)}}
            and a.entry(5) == {0: {3: Fr(1, 2), 4: Fr(1, 12)}})
    b_ok = (b.entry(2) == {1: {1: Fr(1)}}
            and b.entry(3) == {2: {1: Fr(1)}, 0: {2: Fr(1, 2)}})
    ok = a_ok and b_ok
    report(capsys, 7, ok,
           "A_1..A_5 match the printed rationals exactly; "
           "B_2 = a A_1 and B_3 = a^2 A_1 + A_3 exactly")
    assert a_ok
    assert b_ok


def test_criterion_08_primes(capsys, lad, checkpoints, fitted, phi_model):
    errs = []
    for t in (1e3, 3e3, 1e4):
        y = float(ladder.phi_fast(t, lad.mu, checkpoints, phi_model))
        approx = asymptotics.pi_approx(t, y, fitted)
        exact = asymptotics.sieve_pi(t)
        errs.append(abs(approx - exact) / exact)
    decreasing = errs[0] > errs[1] > errs[2]
    small = errs[-1] < 0.12
    ok = decreasing and small
    report(capsys, 8, ok,
           f"rel err = {errs[0]:.4f} -> {errs[1]:.4f} -> {errs[2]:.4f} "
           f"over T = 1e3, 3e3, 1e4 (< 0.12 at 1e4: "
           f"{'yes' if small else 'no'}; monotone decrease: "
           f"{'yes' if decreasing else 'no'})")
    assert small
    assert decreasing, (
        "relative error is not monotone: the T=1e3 point is accidentally "
        "good because phi(1e3) runs low on this Z^2 realization"
    )


def test_criterion_09_zeros_are_critical_points(capsys, lad, mu7,
                                                checkpoints, engine,
                                                phi_model):
    zeros = zeta.find_zeros(lad.T0, 5000.0)
    worst = 0.0
    for z in zeros:
        d = ladder.phi_derivative(z.gamma, mu7, checkpoints, engine,
                                  model=phi_model)
        worst = max(worst, d)
    ok = worst < 1e-6 and len(zeros) > 4000
    report(capsys, 9, ok,
           f"phi'(gamma) <= {worst:.3e} (cap 1e-6) over all "
           f"{len(zeros)} zeros in (T0, 5000]")
    assert worst < 1e-6
    assert len(zeros) > 4000


def test_criterion_10_tka_truncation(capsys, fitted, engine):
    ratios = []
    for d in (1 / 500, 1 / 1000, 1 / 2000, 1 / 4000, 1 / 8000):
        r = quadrature.tka_truncated_check(d, fitted, engine)
        ratios.append(abs(r) / (d * math.log(1.0 / d)))
    ok = max(ratios) <= 0.25
    report(capsys, 10, ok,
           f"|residual| / (delta ln(1/delta)) <= {max(ratios):.3f} "
           f"(one constant, cap 0.25) as delta halves 1/500 .. 1/8000")
    assert max(ratios) <= 0.25


def test_criterion_11_tangent_law(capsys, lad, checkpoints, fitted,
                                  phi_model):
    t = 1e4
    u = t ** (1.0 / 3.0)
    res = asymptotics.tangent_law_residual(t, u, lad, checkpoints, fitted,
                                           phi_model)
    slope_u = asymptotics.tangent_alpha(t, u, lad, checkpoints, phi_model,
                                        fitted)
    y = float(ladder.phi_fast(t, lad.mu, checkpoints, phi_model))
    ratio = abs(res / (u * (math.log(0.5 * y) - fitted.a) * slope_u))

    u0 = t ** (1.0 / 3.0 + 2.0 * fitted.eps0)
    slope0 = asymptotics.tangent_alpha(t, u0, lad, checkpoints, phi_model,
                                       fitted)

    rng = np.random.default_rng(SEED)
    window = t ** (1.0 / 3.0 + fitted.eps0)
    sub_worst = 0.0
    for _ in range(10):
        width = float(rng.uniform(0.2, 0.9))
        a = t + float(rng.uniform(1e-3, window - width - 1e-3))
        r = asymptotics.short_interval_residual(a, a + width, t, fitted)
        sub_worst = max(sub_worst, abs(r) / width)

    ok = ratio <= 0.05 and abs(slope0 - 1.0) <= 0.2 and sub_worst <= 25.0
    report(capsys, 11, ok,
           f"main-term ratio err = {ratio:.2e} (cap 5%); tan(alpha_0) = "
           f"{slope0:.4f} (within 0.2 of 1); sub-interval residual/(b-a) "
           f"<= {sub_worst:.2f} (cap 25) over 10 seeded windows")
    assert ratio <= 0.05
    assert abs(slope0 - 1.0) <= 0.2
    assert sub_worst <= 25.0
