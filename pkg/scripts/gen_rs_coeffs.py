#!/usr/bin/env python3
"""Generate src/ladderlab/rs_coeffs.py.

The asymptotic correction terms of the critical-line Z expansion are

    C0 = Psi
    C1 = -Psi'''/(96 pi^2)
    C2 = Psi''/(64 pi^2) + Psi^(6)/(18432 pi^4)
    C3 = -Psi'/(64 pi^2) - Psi^(5)/(3840 pi^4) - Psi^(9)/(5308416 pi^6)
    C4 = Psi/(128 pi^2) + Psi^(4)/(3072 pi^4) + Psi^(8)/(5898240 pi^6)
         + Psi^(12)/(2038431744 pi^8)

with Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).  Psi is entire
(the cosine zeros cancel) and symmetric about p = 1/2, so with
u = p - 1/2 it has an even Taylor series

    Psi(1/2 + u) = -cos(2 pi u^2 - 5 pi/8) / cos(2 pi u).

This script builds that series by exact series division at 80-digit
precision, differentiates it for the combinations above, and writes the
(pure even or pure odd) coefficient tables in the variable w = u^2 as
float64 literals, together with self-check values.

Run from the repository root:  python3 scripts/gen_rs_coeffs.py
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 80

DEG = 120          # working degree in u for the base series
KEEP_TOL = mp.mpf("1e-26")   # drop tail coefficients below this at |u|=1/2


def cos_series(alpha, deg):
    """Taylor coefficients of cos(alpha * u^2) in u up to degree deg."""
    out = [mp.mpf(0)] * (deg + 1)
    k = 0
    while 4 * k <= deg:
        out[4 * k] = (-1) ** k * alpha ** (2 * k) / mp.factorial(2 * k)
        k += 1
    return out


def sin_series(alpha, deg):
    """Taylor coefficients of sin(alpha * u^2) in u up to degree deg."""
    out = [mp.mpf(0)] * (deg + 1)
    k = 0
    while 4 * k + 2 <= deg:
        out[4 * k + 2] = ((-1) ** k * alpha ** (2 * k + 1)
                          / mp.factorial(2 * k + 1))
        k += 1
    return out


def cos_u_series(alpha, deg):
    """Taylor coefficients of cos(alpha * u) in u up to degree deg."""
    out = [mp.mpf(0)] * (deg + 1)
    k = 0
    while 2 * k <= deg:
        out[2 * k] = (-1) ** k * alpha ** (2 * k) / mp.factorial(2 * k)
        k += 1
    return out


def series_div(num, den, deg):
    """Coefficients of num/den (den[0] != 0) up to degree deg."""
    q = [mp.mpf(0)] * (deg + 1)
    for n in range(deg + 1):
        s = num[n] if n < len(num) else mp.mpf(0)
        for j in range(1, n + 1):
            if j < len(den):
                s -= den[j] * q[n - j]
        q[n] = s / den[0]
    return q


def derive(coeffs, j):
    """Differentiate a Taylor series j times."""
    out = list(coeffs)
    for _ in range(j):
        out = [out[k] * k for k in range(1, len(out))]
        out.append(mp.mpf(0))
    return out


def build_psi_series():
    two_pi = 2 * mp.pi
    num_c = cos_series(two_pi, DEG)
    num_s = sin_series(two_pi, DEG)
    ca = mp.cos(5 * mp.pi / 8)
    sa = mp.sin(5 * mp.pi / 8)
    # -cos(2 pi u^2 - 5 pi/8) = -(cos(2 pi u^2) ca + sin(2 pi u^2) sa)
    num = [-(num_c[k] * ca + num_s[k] * sa) for k in range(DEG + 1)]
    den = cos_u_series(two_pi, DEG)
    return series_div(num, den, DEG)


def combine(psi, terms):
    """Sum of factor * Psi^(j) for (j, factor) pairs."""
    out = [mp.mpf(0)] * (DEG + 1)
    for j, factor in terms:
        d = derive(psi, j)
        for k in range(DEG + 1):
            out[k] += factor * d[k]
    return out


def compress(coeffs):
    """Split an even or odd series in u into (parity, coeffs in w=u^2)."""
    even = [c for k, c in enumerate(coeffs) if k % 2 == 0]
    odd = [c for k, c in enumerate(coeffs) if k % 2 == 1]
    even_mag = max(abs(c) for c in even)
    odd_mag = max(abs(c) for c in odd)
    if even_mag > 0 and odd_mag / max(even_mag, mp.mpf(1)) > mp.mpf("1e-60"):
        raise RuntimeError("series has mixed parity; expected pure parity")
    parity = "even" if even_mag >= odd_mag else "odd"
    ws = even if parity == "even" else odd
    # truncate where the tail no longer matters at |u| = 1/2 (w = 1/4)
    keep = len(ws)
    while keep > 1 and abs(ws[keep - 1]) * mp.mpf(0.25) ** (keep - 1) < KEEP_TOL:
        keep -= 1
    return parity, ws[:keep]


def main():
    pi = mp.pi
    psi = build_psi_series()

    combos = {
        "C0": [(0, mp.mpf(1))],
        "C1": [(3, -1 / (96 * pi ** 2))],
        "C2": [(2, 1 / (64 * pi ** 2)), (6, 1 / (18432 * pi ** 4))],
        "C3": [(1, -1 / (64 * pi ** 2)), (5, -1 / (3840 * pi ** 4)),
               (9, -1 / (5308416 * pi ** 6))],
        "C4": [(0, 1 / (128 * pi ** 2)), (4, 1 / (3072 * pi ** 4)),
               (8, 1 / (5898240 * pi ** 6)),
               (12, 1 / (2038431744 * pi ** 8))],
    }

    tables = {}
    for name, terms in combos.items():
        series = combine(psi, terms)
        parity, ws = compress(series)
        tables[name] = (parity, ws)

    # self-check: evaluate each table at a few u and compare with direct
    # high-precision evaluation of the derivative combination
    def psi_fn(p):
        return (mp.cos(2 * pi * (p * p - p - mp.mpf(1) / 16))
                / mp.cos(2 * pi * p))

    checks = []
    for name, terms in combos.items():
        parity, ws = tables[name]
        for u in (mp.mpf("-0.49"), mp.mpf("-0.17"), mp.mpf("0.03"),
                  mp.mpf("0.31"), mp.mpf("0.5")):
            w = u * u
            acc = mp.mpf(0)
            for c in reversed(ws):
                acc = acc * w + c
            if parity == "odd":
                acc *= u
            direct = mp.mpf(0)
            for j, factor in terms:
                direct += factor * mp.diff(psi_fn, mp.mpf("0.5") + u, j)
            err = abs(acc - direct)
            checks.append((name, float(u), float(err)))
            if err > mp.mpf("1e-24"):
                raise RuntimeError(f"self-check failed for {name} at u={u}: "
                                   f"err={mp.nstr(err, 5)}")

    lines = []
    lines.append('"""Taylor tables for the asymptotic correction terms '
                 'C0..C4 of Z(t).')
    lines.append("")
    lines.append("Generated by scripts/gen_rs_coeffs.py; do not edit by "
                 "hand.")
    lines.append("")
    lines.append("Each table holds the coefficients of C_k(1/2 + u) in the")
    lines.append('variable w = u^2; tables marked "odd" carry an overall')
    lines.append("factor u.  Valid for u in [-1/2, 1/2]; the truncation")
    lines.append("error of every table is below 1e-24 there.")
    lines.append('"""')
    lines.append("")
    lines.append("PARITY = {")
    for name, (parity, _) in tables.items():
        lines.append(f'    "{name}": "{parity}",')
    lines.append("}")
    lines.append("")
    for name, (parity, ws) in tables.items():
        lines.append(f"{name}_W = (")
        for c in ws:
            lines.append(f"    {float(c)!r},")
        lines.append(")")
        lines.append("")

    with open("src/ladderlab/rs_coeffs.py", "w") as fh:
        fh.write("\n".join(lines))

    worst = max(err for _, _, err in checks)
    sizes = {name: len(ws) for name, (_, ws) in tables.items()}
    print(f"wrote rs_coeffs.py; table sizes {sizes}; worst check err "
          f"{worst:.3e}")


if __name__ == "__main__":
    main()
