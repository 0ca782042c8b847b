"""Regenerate oracles.json from mpmath (arbitrary precision).

Run once and commit the output; the test suite loads the frozen values
so ordinary test runs never depend on oracle regeneration.

    python3 tests/_oracles/generate_oracles.py
"""

import json
import pathlib

import mpmath as mp

OUT = pathlib.Path(__file__).with_name("oracles.json")


def s(x, dps=30):
    return mp.nstr(x, dps, strip_zeros=False)


def main():
    mp.mp.dps = 40
    data = {}

    data["zeta_zeros"] = {
        str(k): s(mp.zetazero(k).imag) for k in range(1, 11)
    }
    data["zeta_zeros"]["100"] = s(mp.zetazero(100).imag)

    data["theta"] = {
        str(t): s(mp.siegeltheta(t))
        for t in [0.5, 5.0, 13.0, 50.0, 500.0, 5000.0, 1e5, 1e6]
    }

    data["z"] = {
        str(t): s(mp.siegelz(t))
        for t in [2.5, 17.5, 100.25, 1234.5625, 25000.75, 123456.7890625,
                  999999.5]
    }

    data["zeta_half"] = s(mp.zeta(mp.mpf("0.5")))

    # short second-moment integrals, split at internal zeros of Z
    mp.mp.dps = 25

    def z2(u):
        return mp.siegelz(u) ** 2

    def seg_integral(a, b, pieces):
        knots = mp.linspace(a, b, pieces + 1)
        return mp.fsum(mp.quad(z2, [knots[i], knots[i + 1]])
                       for i in range(pieces))

    data["z2_integrals"] = {
        "0_10": s(seg_integral(0, 10, 4), 25),
        "0_25": s(seg_integral(0, 25, 12), 25),
        "100_101": s(seg_integral(100, 101, 2), 25),
        "1000_1001": s(seg_integral(1000, 1001, 4), 25),
    }

    OUT.write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
