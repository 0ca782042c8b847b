"""Evaluation of theta(t), Z(t), Z^2(t) and zero localization.

Z(t) = e^{i theta(t)} zeta(1/2 + it) is real on the critical line;
theta(t) = -(t/2) ln(pi) + Im ln Gamma(1/4 + it/2).

Three evaluation regimes for Z, dispatched on t:

  t <  T_ALT_MAX   accelerated alternating series for zeta(1/2+it)
                   (exact integer acceleration coefficients; the
                   asymptotic main-sum form is useless here);
  t <  T_RS_MIN    Euler-Maclaurin evaluation of zeta(1/2+it) with an
                   explicit truncation bound (the alternating series
                   would need overflow-prone coefficients here, and the
                   main-sum correction terms are still too inaccurate);
  t >= T_RS_MIN    main sum of floor(sqrt(t/2pi)) cosine terms plus the
                   C0..C4 correction terms (tables in rs_coeffs).

T_RS_MIN is calibrated so the measured error of the main-sum form stays
below 2e-9 there (see the error-model notes next to the constant).

Accuracy at large t hinges on the phases theta(t) - t ln(n), whose
magnitude reaches ~5.5e6 at t = 1e6 while we need them to ~1e-12
absolute.  Doubles carry only ~16 significant digits, so phases (and
theta itself) are computed in extended precision (np.longdouble, 64-bit
mantissa on x86) and reduced before the double-precision cosine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from scipy import special as _sc

from . import rs_coeffs
from .errors import DomainError

__all__ = [
    "ThetaValue", "ZValue", "ZeroRecord",
    "theta", "theta_many", "z", "z_many",
    "z_squared", "z_squared_many",
    "find_zeros", "zero_count_estimate",
    "T_ALT_MAX", "T_RS_MIN", "DEFAULT_Z_TOL",
]

LD = np.longdouble
TWO_PI_LD = LD("6.283185307179586476925286766559005768394")
PI_LD = LD("3.141592653589793238462643383279502884197")
LN_PI_LD = LD("1.144729885849400174143427351353058711647")
PI_OVER_8_LD = LD("0.3926990816987241548078304229099378605246")

TWO_PI = float(TWO_PI_LD)

#: upper end of the alternating-series regime
T_ALT_MAX = 30.0

#: lower end of the main-sum regime.  Calibrated against an
#: arbitrary-precision oracle: with the C0..C4 corrections the measured
#: error is 0.035 (t/2pi)^(-11/4) at worst (4.6e-9 at t = 2000, decaying
#: fast), so the 1e-8 target holds from 2000 up; between 30 and 2000 the
#: Euler-Maclaurin path is ~1e-12 accurate and still fast.
T_RS_MIN = 2000.0

#: |Z| below this classifies a point as "at a zero"
DEFAULT_Z_TOL = 1e-7

# |B_2n| for n = 1..16 (classical table; cross-checked against sympy in
# the test suite).
_BERNOULLI_ABS = [
    Fraction(1, 6), Fraction(1, 30), Fraction(1, 42), Fraction(1, 30),
    Fraction(5, 66), Fraction(691, 2730), Fraction(7, 6),
    Fraction(3617, 510), Fraction(43867, 798), Fraction(174611, 330),
    Fraction(854513, 138), Fraction(236364091, 2730),
    Fraction(8553103, 6), Fraction(23749461029, 870),
    Fraction(8615841276005, 14322), Fraction(7709321041217, 510),
]

# signed B_2n / (2n)! as floats, for the Euler-Maclaurin tail
_B2N_OVER_FACT = [
    float(((-1) ** (n + 1)) * _BERNOULLI_ABS[n - 1] /
          math.factorial(2 * n))
    for n in range(1, 17)
]

# Stirling-series coefficients of theta: a_n = (1-2^{1-2n}) |B_2n| /
# (4n(2n-1)), term a_n / t^{2n-1}
_THETA_A = [
    float((1 - Fraction(1, 2 ** (2 * n - 1))) * _BERNOULLI_ABS[n - 1] /
          (4 * n * (2 * n - 1)))
    for n in range(1, 10)
]
_THETA_MAX_ORDER = 8
_THETA_SMALL_MAX = 13.0


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class ThetaValue:
    """theta(t) with a conservative absolute error bound.

    value is an np.longdouble: at t ~ 1e6 the value is ~5.5e6 and a
    double could not even represent it to the promised 1e-10.
    """

    t: float
    value: np.longdouble
    abs_err_bound: float


@dataclass(frozen=True)
class ZValue:
    t: float
    value: float
    abs_err_bound: float


@dataclass(frozen=True)
class ZeroRecord:
    """A localized sign change (or flagged tangential candidate) of Z."""

    index: int
    gamma: float
    bracket_width: float
    z_residual: float
    tangential: bool = False


# ---------------------------------------------------------------------------
# theta

def _theta_small_many(ts: np.ndarray) -> np.ndarray:
    s = 0.25 + 0.5j * ts
    return _sc.loggamma(s).imag - 0.5 * ts * float(LN_PI_LD)


def _theta_asym_many_ld(ts_ld: np.ndarray, order: int) -> np.ndarray:
    half_t = ts_ld * LD(0.5)
    out = half_t * (np.log(ts_ld) - np.log(TWO_PI_LD)) - half_t \
        - PI_OVER_8_LD
    if order > 0:
        inv2 = LD(1.0) / (ts_ld * ts_ld)
        corr = np.zeros_like(ts_ld)
        for a in reversed(_THETA_A[:order]):
            corr = (corr + LD(a)) * inv2
        out = out + corr * ts_ld
    return out


def _theta_bound_many(ts: np.ndarray, values_abs: np.ndarray,
                      order: int) -> np.ndarray:
    # truncation: 4x the first omitted Stirling term (the asymptotic
    # error slightly exceeds the next term near the switch point);
    # rounding: a few extended-precision ulps of the value
    ts = np.asarray(ts, dtype=float)
    bound = np.full(ts.shape, 1e-14)
    big = ts >= _THETA_SMALL_MAX
    if np.any(big):
        t_big = ts[big]
        nxt = _THETA_A[min(order, len(_THETA_A) - 1)]
        trunc = 4.0 * nxt / t_big ** (2 * min(order + 1, len(_THETA_A)) - 1)
        rounding = 8.0 * np.finfo(LD).eps * np.maximum(values_abs[big], 1.0)
        bound[big] = trunc + rounding + 1e-17
    return bound


def theta_many(ts: Sequence[float], order: int = 5) -> np.ndarray:
    """theta at many ordinates; returns an np.longdouble array."""
    if not 1 <= order <= _THETA_MAX_ORDER:
        raise DomainError(f"theta order must be in [1, {_THETA_MAX_ORDER}]")
    ts = np.asarray(ts, dtype=float)
    if ts.size and (not np.all(np.isfinite(ts)) or np.any(ts < 0)):
        raise DomainError("theta requires finite t >= 0")
    out = np.empty(ts.shape, dtype=LD)
    small = ts < _THETA_SMALL_MAX
    if np.any(small):
        out[small] = _theta_small_many(ts[small])
    if np.any(~small):
        out[~small] = _theta_asym_many_ld(ts[~small].astype(LD), order)
    return out


def theta(t: float, order: int = 5) -> ThetaValue:
    """Phase theta(t); |error| <= abs_err_bound (<= 1e-10 on [0, 1e6])."""
    tf = float(t)
    if not math.isfinite(tf) or tf < 0:
        raise DomainError("theta requires finite t >= 0")
    val = theta_many(np.array([tf]), order=order)[0]
    bound = float(_theta_bound_many(np.array([tf]),
                                    np.array([abs(float(val))]), order)[0])
    return ThetaValue(t=tf, value=val, abs_err_bound=bound)


def zero_count_estimate(T: float) -> float:
    """Mean-count estimate theta(T)/pi + 1 for zeros in (0, T]."""
    if T <= 0:
        return 0.0
    return float(theta(T).value / PI_LD + 1.0)


# ---------------------------------------------------------------------------
# regime 1: accelerated alternating series (t < T_ALT_MAX)

_N_ALT = 52


def _alt_coeffs(n: int) -> np.ndarray:
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), exact integers
    d = []
    term = Fraction(1, n)
    acc = term
    d.append(n * acc)
    for i in range(1, n + 1):
        term = term * Fraction((n + i - 1) * (n - i + 1) * 4,
                               (2 * i) * (2 * i - 1))
        acc += term
        d.append(n * acc)
    return np.array([float(x) for x in d])


_ALT_D = _alt_coeffs(_N_ALT)
_ALT_K = np.arange(1.0, _N_ALT + 1.0)
_ALT_LOGK = np.log(_ALT_K)
_ALT_AMP = ((-1.0) ** np.arange(_N_ALT)) * (_ALT_D[:_N_ALT] - _ALT_D[_N_ALT]) \
    / np.sqrt(_ALT_K)
_LN2 = math.log(2.0)


def _alt_zeta_many(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """zeta(1/2+it) for t < ~35 via the accelerated alternating series."""
    ph = np.outer(ts, _ALT_LOGK)
    re = np.cos(ph) @ _ALT_AMP
    im = np.sin(ph) @ _ALT_AMP
    eta = (-1.0 / _ALT_D[_N_ALT]) * (re - 1j * im)
    denom = 1.0 - np.exp(_LN2 * (0.5 - 1j * ts))
    zeta = eta / denom
    series_err = (3.0 / (3.0 + math.sqrt(8.0)) ** _N_ALT) \
        * (1.0 + 2.0 * np.abs(ts)) * np.exp(math.pi * np.abs(ts) / 2.0)
    bound = series_err / np.abs(denom) + 1e-13 * (1.0 + np.abs(zeta))
    return zeta, bound


# ---------------------------------------------------------------------------
# regime 2: Euler-Maclaurin (T_ALT_MAX <= t < T_RS_MIN)

_EM_J = 14


def _em_zeta_block(ts: np.ndarray, n_terms: int) -> tuple[np.ndarray,
                                                          np.ndarray]:
    """zeta(1/2+it) by Euler-Maclaurin with N = n_terms for every t."""
    n = np.arange(1.0, n_terms)
    ph = np.outer(ts, np.log(n))
    amp = 1.0 / np.sqrt(n)
    re = np.cos(ph) @ amp
    im = np.sin(ph) @ amp
    s = 0.5 + 1j * ts
    big_n = float(n_terms)
    n_pow = np.exp((-s) * math.log(big_n))          # N^{-s}
    val = (re - 1j * im) + 0.5 * n_pow + n_pow * big_n / (s - 1.0)
    term = _B2N_OVER_FACT[0] * s * n_pow / big_n    # j = 1
    val = val + term
    for j in range(1, _EM_J):
        ratio = _B2N_OVER_FACT[j] / _B2N_OVER_FACT[j - 1]
        term = term * ratio * (s + (2 * j - 1)) * (s + 2 * j) / big_n ** 2
        val = val + term
    nxt = np.abs(term) * np.abs(s + 2 * _EM_J) * np.abs(s + 2 * _EM_J + 1) \
        / big_n ** 2 * abs(_B2N_OVER_FACT[min(_EM_J, 15)]
                           / _B2N_OVER_FACT[_EM_J - 1])
    # last addend: phase rounding; phases t ln n carry ~eps relative
    # error and the per-term errors accumulate roughly like sqrt(H_N)
    lnn = math.log(big_n)
    bound = nxt * (np.abs(s) + 2 * _EM_J + 1) / (0.5 + 2 * _EM_J + 1) \
        + 1e-13 * (1.0 + np.abs(val)) \
        + 3e-16 * ts * lnn * math.sqrt(lnn + 1.0)
    return val, bound


def _em_n_terms(t_hi: float) -> int:
    # N ~ (t+30)/2.2 keeps |s+2J|/(2 pi N) < ~0.36; rounded up to a
    # multiple of 32 so nearby ordinates share one block
    n = int(math.ceil((t_hi + 30.0) / 2.2))
    return max(64, 32 * int(math.ceil(n / 32)))


def _em_zeta_many(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals = np.empty(ts.shape, dtype=complex)
    bounds = np.empty(ts.shape, dtype=float)
    order = np.argsort(ts, kind="stable")
    sorted_ts = ts[order]
    lo = 0
    while lo < sorted_ts.size:
        n_terms = _em_n_terms(float(sorted_ts[lo]))
        hi = int(np.searchsorted(sorted_ts, 2.2 * n_terms - 30.0,
                                 side="right"))
        hi = max(hi, lo + 1)
        idx = order[lo:hi]
        vals[idx], bounds[idx] = _em_zeta_block(sorted_ts[lo:hi], n_terms)
        lo = hi
    return vals, bounds


def _zeta_to_z(ts: np.ndarray, zeta: np.ndarray,
               zeta_bound: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    th = theta_many(ts)
    th_red = np.mod(th, TWO_PI_LD).astype(float)
    rot = np.exp(1j * th_red) * zeta
    # the imaginary part of e^{i theta} zeta should vanish; fold any
    # leak into the bound rather than hiding it
    bound = zeta_bound + np.abs(rot.imag) + 1e-15 * np.abs(rot.real)
    return rot.real, bound


# ---------------------------------------------------------------------------
# regime 3: main sum + C0..C4 corrections (t >= T_RS_MIN)

def _poly_w(coeffs: Sequence[float], w: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(w)
    for c in reversed(coeffs):
        acc = acc * w + c
    return acc


def _rs_correction(ts_ld: np.ndarray, n_main: int) -> np.ndarray:
    a_ld = np.sqrt(ts_ld / TWO_PI_LD)
    p = (a_ld - LD(n_main)).astype(float)
    u = p - 0.5
    w = u * u
    c0 = _poly_w(rs_coeffs.C0_W, w)
    c1 = _poly_w(rs_coeffs.C1_W, w) * u
    c2 = _poly_w(rs_coeffs.C2_W, w)
    c3 = _poly_w(rs_coeffs.C3_W, w) * u
    c4 = _poly_w(rs_coeffs.C4_W, w)
    a = a_ld.astype(float)
    b = 1.0 / a
    series = c0 + b * (c1 + b * (c2 + b * (c3 + b * c4)))
    sign = 1.0 if (n_main - 1) % 2 == 0 else -1.0
    return sign * series / np.sqrt(a)


_RS_CHUNK = 4096
_RS_SPAN = 32.0


def _rs_z_run(ts: np.ndarray, n_main: int) -> tuple[np.ndarray, np.ndarray]:
    """Z on an ascending slice where floor(sqrt(t/2pi)) == n_main."""
    ts_ld = ts.astype(LD)
    th_ld = _theta_asym_many_ld(ts_ld, order=5)
    nn = np.arange(1.0, n_main + 1.0)
    ln_n = np.log(nn)
    ln_n_ld = np.log(nn.astype(LD))
    coef = 2.0 / np.sqrt(nn)
    main = np.empty(ts.shape, dtype=float)
    lo = 0
    while lo < ts.size:
        hi = min(ts.size, lo + _RS_CHUNK)
        hi = min(hi, int(np.searchsorted(ts, ts[lo] + _RS_SPAN,
                                         side="right")))
        hi = max(hi, lo + 1)
        t0_ld = ts_ld[lo]
        anchor = np.mod(th_ld[lo] - t0_ld * ln_n_ld, TWO_PI_LD).astype(float)
        dtheta = (th_ld[lo:hi] - th_ld[lo]).astype(float)
        dt = (ts_ld[lo:hi] - t0_ld).astype(float)
        phases = anchor[None, :] + (dtheta[:, None]
                                    - dt[:, None] * ln_n[None, :])
        np.cos(phases, out=phases)
        main[lo:hi] = phases @ coef
        lo = hi
    z_vals = main + _rs_correction(ts_ld, n_main)
    # measured error model: worst observed coefficient is 0.035, the
    # 0.06 envelope leaves ~1.7x margin; the floor covers phase rounding
    bound = 0.06 * (ts / TWO_PI) ** (-11.0 / 4.0) + 2e-10
    return z_vals, bound


def _rs_z_many(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(ts, kind="stable")
    sorted_ts = ts[order]
    a = np.sqrt(sorted_ts.astype(LD) / TWO_PI_LD)
    n_arr = np.floor(a).astype(np.int64)
    vals = np.empty(ts.shape, dtype=float)
    bounds = np.empty(ts.shape, dtype=float)
    lo = 0
    while lo < sorted_ts.size:
        hi = int(np.searchsorted(n_arr, n_arr[lo], side="right"))
        idx = order[lo:hi]
        v, b = _rs_z_run(sorted_ts[lo:hi], int(n_arr[lo]))
        vals[idx] = v
        bounds[idx] = b
        lo = hi
    return vals, bounds


# ---------------------------------------------------------------------------
# public Z interface

def z_many(ts: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Z(t) and absolute error bounds for an array of ordinates."""
    ts = np.asarray(ts, dtype=float)
    if ts.size and (not np.all(np.isfinite(ts)) or np.any(ts < 0)):
        raise DomainError("z requires finite t >= 0")
    vals = np.empty(ts.shape, dtype=float)
    bounds = np.empty(ts.shape, dtype=float)
    alt = ts < T_ALT_MAX
    em = (~alt) & (ts < T_RS_MIN)
    rs = ts >= T_RS_MIN
    if np.any(alt):
        zeta, zb = _alt_zeta_many(ts[alt])
        vals[alt], bounds[alt] = _zeta_to_z(ts[alt], zeta, zb)
    if np.any(em):
        zeta, zb = _em_zeta_many(ts[em])
        vals[em], bounds[em] = _zeta_to_z(ts[em], zeta, zb)
    if np.any(rs):
        vals[rs], bounds[rs] = _rs_z_many(ts[rs])
    return vals, bounds


def z(t: float) -> ZValue:
    """Z(t) with |error| <= abs_err_bound (<= 1e-8 on [0, 1e6])."""
    tf = float(t)
    if not math.isfinite(tf) or tf < 0:
        raise DomainError("z requires finite t >= 0")
    vals, bounds = z_many(np.array([tf]))
    return ZValue(t=tf, value=float(vals[0]), abs_err_bound=float(bounds[0]))


def z_squared(t: float) -> float:
    """Z(t)^2, the integrand of the second-moment integral."""
    return z(t).value ** 2


def z_squared_many(ts: Sequence[float]) -> np.ndarray:
    vals, _ = z_many(ts)
    return vals * vals


# ---------------------------------------------------------------------------
# zero scan

def _scan_grid(t_lo: float, t_hi: float, frac: float = 0.05) -> np.ndarray:
    """Deterministic scan grid with step = frac * local mean zero gap."""
    pts: List[np.ndarray] = []
    t = t_lo
    while t < t_hi:
        step = frac * TWO_PI / max(math.log(max(t, 1.0) / TWO_PI), 1.0)
        seg_end = min(t_hi, t + 512 * step)
        count = max(2, int(math.ceil((seg_end - t) / step)) + 1)
        pts.append(np.linspace(t, seg_end, count)[:-1])
        t = seg_end
    pts.append(np.array([t_hi]))
    return np.concatenate(pts)


def _bisect_batch(lo: np.ndarray, hi: np.ndarray, f_lo: np.ndarray,
                  width: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sign-change bisection; returns midpoints and |Z| there."""
    while np.max(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        f_mid, _ = z_many(mid)
        left = f_lo * f_mid <= 0.0
        hi = np.where(left, mid, hi)
        f_lo_new = np.where(left, f_lo, f_mid)
        lo = np.where(left, lo, mid)
        f_lo = f_lo_new
    mid = 0.5 * (lo + hi)
    f_mid, _ = z_many(mid)
    return mid, np.abs(f_mid)


def _count_sign_changes(t_lo: float, t_hi: float) -> int:
    if t_hi <= max(t_lo, 1e-12):
        return 0
    grid = _scan_grid(max(t_lo, 0.0), t_hi)
    vals, _ = z_many(grid)
    sign = np.sign(vals)
    return int(np.sum(sign[:-1] * sign[1:] < 0))


def find_zeros(t_lo: float, t_hi: float,
               z_tol: float = DEFAULT_Z_TOL) -> List[ZeroRecord]:
    """All sign changes of Z on [t_lo, t_hi], bisected to width <= 1e-9.

    Local minima of |Z| below z_tol without a sign change are emitted as
    tangential candidates (flagged, never silently accepted).  Indices
    count zeros from t = 0; for t_lo > 0 the offset is obtained by a
    coarse counting scan of [0, t_lo].
    """
    if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or t_lo < 0:
        raise DomainError("find_zeros requires finite 0 <= t_lo < t_hi")
    if t_hi <= t_lo:
        raise DomainError("find_zeros requires t_hi > t_lo")

    grid = _scan_grid(t_lo, t_hi)
    vals, _ = z_many(grid)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]

    records: List[ZeroRecord] = []
    offset = _count_sign_changes(0.0, t_lo) if t_lo > 0 else 0

    if flips.size:
        lo = grid[flips]
        hi = grid[flips + 1]
        gam, resid = _bisect_batch(lo, hi, vals[flips], 1e-9)
        half = 5e-10
        for k in range(gam.size):
            records.append(ZeroRecord(
                index=offset + k + 1,
                gamma=float(gam[k]),
                bracket_width=half,
                z_residual=float(resid[k]),
            ))

    # tangential candidates: interior |Z| minima below z_tol that are
    # not adjacent to a detected sign change
    absv = np.abs(vals)
    small = np.nonzero((absv[1:-1] < z_tol)
                       & (absv[1:-1] <= absv[:-2])
                       & (absv[1:-1] <= absv[2:]))[0] + 1
    flip_set = set(flips.tolist()) | set((flips + 1).tolist())
    for i in small:
        if i in flip_set or (i - 1) in flip_set:
            continue
        records.append(ZeroRecord(
            index=0,
            gamma=float(grid[i]),
            bracket_width=float(grid[i + 1] - grid[i - 1]) / 2.0,
            z_residual=float(absv[i]),
            tangential=True,
        ))

    records.sort(key=lambda r: r.gamma)
    return records
