"""Fixed real constants of the asymptotic machinery.

Euler's constant is hard-coded to 50 decimal digits and every derived
constant is computed from it in double precision.  The derived values
satisfy two exact algebraic identities that the test suite pins down:

    E - D = ln 2        (E = c - ln 2pi, D = c - ln 4pi)
    a = -E - 1          (a = ln 2pi - 1 - c)

c0 is the constant term of the truncated Laplace-weighted expansion.
It is not a known closed form; it is fitted from data (see
asymptotics.estimate_c0) and carried here together with its spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import StateError

# Euler-Mascheroni constant, 50 decimal digits.
EULER_50 = "0.57721566490153286060651209008240243104215933593992"

#: 1/108, the fixed epsilon of the short-interval machinery.
EPS0 = 1.0 / 108.0


@dataclass(frozen=True)
class Constants:
    """Bundle of the fixed constants plus the optional fitted c0."""

    c: float
    E: float
    D: float
    a: float
    eps0: float
    c0: Optional[float] = None
    c0_uncertainty: Optional[float] = None

    def require_c0(self) -> float:
        if self.c0 is None:
            raise StateError(
                "c0 has not been fitted; run the c0 fit first "
                "(asymptotics.estimate_c0 or the c0-fit command)")
        return self.c0

    def with_c0(self, c0: float,
                uncertainty: Optional[float] = None) -> "Constants":
        unc = None if uncertainty is None else float(uncertainty)
        return replace(self, c0=float(c0), c0_uncertainty=unc)


def default_constants(c0: Optional[float] = None,
                      c0_uncertainty: Optional[float] = None) -> Constants:
    c = float(EULER_50)
    ln2pi = math.log(2.0 * math.pi)
    ln4pi = math.log(4.0 * math.pi)
    return Constants(
        c=c,
        E=c - ln2pi,
        D=c - ln4pi,
        a=ln2pi - 1.0 - c,
        eps0=EPS0,
        c0=c0,
        c0_uncertainty=c0_uncertainty,
    )
