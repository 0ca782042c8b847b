"""Calibration / validation sweep for the Z engine against mpmath.

Measures per-regime errors, locates where the main-sum form crosses the
accuracy target (fixes T_RS_MIN), and fits the error-model coefficient.
Dev tool only; results are frozen as constants in zeta.py.
"""

import sys
import time

import mpmath as mp
import numpy as np

sys.path.insert(0, "src")
from ladderlab import zeta  # noqa: E402

mp.mp.dps = 30

rng = np.random.default_rng(20260815)


def oracle_z(t):
    return float(mp.siegelz(t))


def oracle_theta(t):
    return mp.siegeltheta(t)


def sweep(name, ts):
    vals, bounds = zeta.z_many(np.array(ts))
    errs = []
    t0 = time.time()
    for t, v in zip(ts, vals):
        errs.append(abs(v - oracle_z(t)))
    dt = time.time() - t0
    errs = np.array(errs)
    viol = np.sum(errs > bounds)
    print(f"{name:28s} n={len(ts):4d} max={errs.max():.3e} "
          f"med={np.median(errs):.3e}  bound_viol={viol}  "
          f"oracle_time={dt:.1f}s")
    return errs, np.array(bounds)


# --- theta check ---
print("== theta ==")
for t in [0.5, 5.0, 9.99, 10.0, 10.01, 50.0, 500.0, 5000.0, 1e5, 1e6]:
    tv = zeta.theta(t)
    err = abs(float(mp.mpf(repr(float(tv.value))) +
                    (mp.mpf(0))) - 0)  # placeholder
    ref = oracle_theta(t)
    err = abs(float(mp.mpf(str(tv.value)) - ref))
    ok = err <= tv.abs_err_bound
    print(f"  t={t:10g} err={err:.3e} bound={tv.abs_err_bound:.3e} "
          f"{'OK' if ok else 'VIOLATION'}")

# --- regime sweeps ---
print("== Z regimes ==")
sweep("alt (t<30)", list(rng.uniform(0.0, 30.0, 60)))
sweep("em low (30..300)", list(rng.uniform(30.0, 300.0, 40)))
sweep("em high (300..1300)", list(rng.uniform(300.0, 1300.0, 40)))
sweep("rs near switch", list(rng.uniform(1300.0, 2000.0, 40)))
sweep("rs mid (1e4)", list(rng.uniform(9e3, 1.1e4, 30)))
sweep("rs high (1e5)", list(rng.uniform(0.9e5, 1.1e5, 20)))
sweep("rs top (1e6)", list(rng.uniform(0.9e6, 1.0e6, 15)))

# --- where does the main-sum form reach 2e-9? ---
print("== main-sum error vs t (for T_RS_MIN) ==")
for t_lo, t_hi in [(600, 800), (800, 1000), (1000, 1200), (1200, 1400),
                   (1400, 1700), (1700, 2100)]:
    ts = np.sort(rng.uniform(t_lo, t_hi, 25))
    vals, _ = zeta._rs_z_many(ts)
    errs = np.array([abs(v - oracle_z(t)) for t, v in zip(ts, vals)])
    scaled = errs / (ts / zeta.TWO_PI) ** (-11.0 / 4.0)
    print(f"  [{t_lo:5d},{t_hi:5d}]  max={errs.max():.3e}   "
          f"max scaled coeff={scaled.max():.4f}")

# --- EM regime upper reach (used up to T_RS_MIN) ---
print("== EM high-t stress ==")
ts = np.sort(rng.uniform(1200.0, 1300.0, 15))
vals, bounds = zeta._em_zeta_many(ts)
zv, zb = zeta._zeta_to_z(ts, vals, bounds)
errs = np.array([abs(v - oracle_z(t)) for t, v in zip(ts, zv)])
print(f"  max={errs.max():.3e}  med={np.median(errs):.3e} "
      f"bound_viol={np.sum(errs > zb)}")

# --- cross-regime continuity at the switch points ---
print("== continuity at switches ==")
for t0 in [zeta.T_ALT_MAX, zeta.T_RS_MIN]:
    eps = 1e-6
    za = zeta.z(t0 - eps).value
    zb_ = zeta.z(t0 + eps).value
    print(f"  t={t0}: |jump| = {abs(za - zb_):.3e}")

# --- throughput ---
print("== throughput ==")
ts = np.sort(rng.uniform(1e4, 2e4, 200000))
t0 = time.time()
zeta.z_many(ts)
print(f"  rs z_many 200k pts in [1e4,2e4]: {time.time()-t0:.2f}s")
ts = np.sort(rng.uniform(2e5, 4.2e5, 200000))
t0 = time.time()
zeta.z_many(ts)
print(f"  rs z_many 200k pts in [2e5,4.2e5]: {time.time()-t0:.2f}s")
