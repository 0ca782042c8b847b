"""Solving the reparameterization equation and building ladders.

For an admissible cutoff mu the equation

    Phi(y) = integral_0^{mu(y)} Z^2 e^{-2t/y} dt = I(T)

has a unique increasing solution y = phi(T) because I is strictly
increasing (a repeated value would force the integral of Z^2 over a
positive-length interval to vanish) and Phi' > 0.  solve_M finds
M(y) = I^{-1}(Phi(y)); phi inverts it.

The derivative along the ladder is

    phi'(T) = Z^2(T) / Phi'(phi(T)),
    Phi'(y) = (2/y^2) integral_0^{mu(y)} t Z^2 e^{-2t/y} dt
              + Z^2(mu(y)) e^{-2 mu(y)/y} mu'(y),

so phi' vanishes to first order at every zero of Z.  The boundary term
carries e^{-2 mu(y)/y} <= y^{-14} for admissible mu and underflows to
exactly 0.0 at this scale; it is still evaluated (in log space) rather
than dropped.

Root finding uses a bracketed superlinear method (Brent) at tolerances
far inside tol_eq / tol_inv, since the inverse round trip divides
residuals by Phi' and must survive at 1e-9 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize as _opt

from . import quadrature, zeta
from .errors import BracketError, DomainError, PreconditionError, RangeError

__all__ = [
    "MuSpec", "LadderTable",
    "solve_M", "phi", "phi_fast", "phi_derivative",
    "ladder_gap", "beam_experiment", "build_ladder",
    "save_ladder_csv", "load_ladder_csv",
    "TOL_EQ_SCALE", "TOL_INV_SCALE", "DEFAULT_Y0", "DEFAULT_K",
]

TOL_EQ_SCALE = 1e-8     # tol_eq = 1e-8 * max(1, Phi(y))
TOL_INV_SCALE = 1e-9    # tol_inv = 1e-9 * y
DEFAULT_Y0 = 100.0
DEFAULT_K = 7.0
_MIN_K = 7.0
_XTOL_SCALE = 1e-12     # solver works two orders inside tol_inv


# ---------------------------------------------------------------------------
# the mu class

@dataclass(frozen=True)
class MuSpec:
    """An admissible cutoff mu on [validity_from, infinity).

    families:
      k_log   mu(y) = K y ln y, params = (K,), K >= 7
      beam    mu(y) = y^2 [1 + rho (y - y0)^n], params = (rho, n)
    """

    family: str
    params: tuple
    y0: float = DEFAULT_Y0
    validity_from: float = field(default=0.0)

    def __post_init__(self):
        if self.family == "k_log":
            if len(self.params) != 1:
                raise PreconditionError("k_log takes params (K,)")
            if self.params[0] < _MIN_K:
                raise PreconditionError(
                    f"k_log requires K >= {_MIN_K:g}, got {self.params[0]!r}")
        elif self.family == "beam":
            if len(self.params) != 2:
                raise PreconditionError("beam takes params (rho, n)")
            rho, n = self.params
            if rho < 0 or n < 1:
                raise PreconditionError(
                    f"beam requires rho >= 0 and n >= 1, got {self.params!r}")
        else:
            raise PreconditionError(f"unknown mu family {self.family!r}")
        if not (self.y0 > math.e):
            raise PreconditionError("mu domain must start above e")
        if self.validity_from == 0.0:
            object.__setattr__(self, "validity_from", self.y0)
        self._validate_numerically()

    # -- family formulas ------------------------------------------------

    def mu_at(self, y):
        y = np.asarray(y, dtype=float) if np.ndim(y) else float(y)
        if self.family == "k_log":
            return self.params[0] * y * np.log(y)
        rho, n = self.params
        return y * y * (1.0 + rho * np.maximum(y - self.y0, 0.0) ** n)

    def dmu_at(self, y):
        y = np.asarray(y, dtype=float) if np.ndim(y) else float(y)
        if self.family == "k_log":
            return self.params[0] * (np.log(y) + 1.0)
        rho, n = self.params
        d = np.maximum(y - self.y0, 0.0)
        return 2.0 * y * (1.0 + rho * d ** n) \
            + y * y * rho * n * d ** (n - 1.0)

    def label(self) -> str:
        if self.family == "k_log":
            return f"k_log(K={self.params[0]:g})"
        return f"beam(rho={self.params[0]:g}, n={self.params[1]:g})"

    # -- admissibility ---------------------------------------------------

    def _validate_numerically(self):
        # floor mu >= 7 y ln y and strict growth, on a grid + endpoints
        lo = self.validity_from
        ys = np.geomspace(lo, lo * 256.0, 64)
        mu = np.asarray(self.mu_at(ys), dtype=float)
        floor = quadrature.MU_FACTOR * ys * np.log(ys)
        if np.any(mu < floor * (1 - 1e-12)):
            bad = float(ys[np.argmax(mu < floor)])
            raise PreconditionError(
                f"{self.label()} violates mu(y) >= 7 y ln y near y={bad:g}")
        if np.any(np.diff(mu) <= 0):
            raise PreconditionError(
                f"{self.label()} is not strictly increasing")

    @classmethod
    def k_log(cls, K: float = DEFAULT_K, y0: float = DEFAULT_Y0) -> "MuSpec":
        return cls(family="k_log", params=(float(K),), y0=y0)

    @classmethod
    def beam(cls, rho: float, n: float = 1.0,
             y0: float = DEFAULT_Y0) -> "MuSpec":
        return cls(family="beam", params=(float(rho), float(n)), y0=y0)


@dataclass(frozen=True)
class LadderTable:
    """Computed ladder points (T, phi(T), residual) for one cutoff."""

    mu: MuSpec
    T0: float
    points: np.ndarray        # shape (N, 3): T, phi, residual
    threshold_1_9: float      # least grid T from which 1.9 T < phi holds

    @property
    def Ts(self):
        return self.points[:, 0]

    @property
    def phis(self):
        return self.points[:, 1]

    @property
    def residuals(self):
        return self.points[:, 2]


# ---------------------------------------------------------------------------
# solvers

def _brent(g, lo, hi, xtol):
    return float(_opt.brentq(g, lo, hi, xtol=xtol, rtol=8.9e-16,
                             maxiter=200))


def solve_M(y: float, mu: MuSpec, table: quadrature.CumulativeTable,
            engine=None) -> float:
    """The unique M with I(M) = Phi(y), bracketed in [y/2, y]."""
    y = float(y)
    if not math.isfinite(y) or y < max(mu.y0, mu.validity_from):
        raise DomainError(
            f"solve_M requires y >= {max(mu.y0, mu.validity_from):g}")
    if y > table.t_max:
        raise RangeError(
            f"bracket [y/2, y] with y={y:g} exceeds table t_max="
            f"{table.t_max:g}; rebuild checkpoints", limit=table.t_max)
    phi_y = quadrature.weighted_integral(y, mu, engine).value

    def g(m):
        return quadrature.hl_integral(m, table) - phi_y

    lo, hi = 0.5 * y, y
    g_lo, g_hi = g(lo), g(hi)
    if g_lo > 0.0 or g_hi < 0.0:
        raise BracketError("solve_M bracket does not straddle the root",
                           lo=lo, hi=hi, f_lo=g_lo, f_hi=g_hi)
    return _brent(g, lo, hi, xtol=_XTOL_SCALE * max(y, 1.0))


def _phi_from_target(i_target: float, mu: MuSpec, t_scale: float,
                     engine=None) -> float:
    def g(y):
        return quadrature.weighted_integral(y, mu, engine).value - i_target

    eng = engine or quadrature.default_engine()
    lo = mu.y0
    # phi < 2T, so 2.2 T brackets the root with slack; cap at the
    # largest y the engine can still truncate
    hi = min(2.2 * max(t_scale, mu.y0), eng.y_cap())
    g_lo, g_hi = g(lo), g(hi)
    if g_hi < 0.0:
        raise RangeError(
            f"phi target exceeds Phi({hi:g}); rebuild the engine with a "
            "larger t_max", limit=hi)
    if g_lo > 0.0:
        raise BracketError("phi bracket does not straddle the root",
                           lo=lo, hi=hi, f_lo=g_lo, f_hi=g_hi)
    return _brent(g, lo, hi, xtol=_XTOL_SCALE * max(t_scale, 1.0))


def phi(T: float, mu: MuSpec, table: quadrature.CumulativeTable,
        engine=None, t0: Optional[float] = None) -> float:
    """The ladder value y = phi(T) solving Phi(y) = I(T).

    t0 (= M(mu.y0)) may be passed to skip recomputing the domain edge.
    """
    T = float(T)
    if not math.isfinite(T):
        raise DomainError("phi requires finite T")
    T0 = solve_M(mu.y0, mu, table, engine) if t0 is None else t0
    if T < T0 - 1e-9:
        raise DomainError(f"T={T:g} below ladder start T0={T0:.6f}", t0=T0)
    return _phi_from_target(quadrature.hl_integral(T, table), mu,
                            max(T, mu.y0), engine)


def phi_fast(T, mu: MuSpec, table: quadrature.CumulativeTable,
             model: Optional[quadrature.PhiModel] = None):
    """phi via the smooth interpolant of Phi (~1e-10 relative).

    Accepts a scalar or an array of T; intended for dense grids where
    a full weighted integral per Brent step would be wasteful.
    """
    model = model or quadrature.phi_model()
    scalar = np.ndim(T) == 0
    Ts = np.atleast_1d(np.asarray(T, dtype=float))
    lo_ln, hi_ln = math.log(model.y_lo), math.log(model.y_hi)
    out = np.empty(Ts.shape)
    for i, t in enumerate(Ts):
        target = math.log(quadrature.hl_integral(float(t), table))

        def g(x):
            return float(np.polynomial.chebyshev.chebval(
                x, model.phi_coef)) - target

        lo_x = float(model._x(model.y_lo * 1.0001))
        hi_x = float(model._x(min(2.2 * max(float(t), mu.y0), model.y_hi)))
        x_root = _brent(g, lo_x, hi_x, xtol=1e-14)
        out[i] = math.exp(0.5 * (x_root * (hi_ln - lo_ln) + lo_ln + hi_ln))
    return float(out[0]) if scalar else out


def phi_derivative(T: float, mu: MuSpec,
                   table: Optional[quadrature.CumulativeTable] = None,
                   engine=None,
                   model: Optional[quadrature.PhiModel] = None,
                   y: Optional[float] = None) -> float:
    """phi'(T) = Z^2(T) / Phi'(phi(T)), nonnegative.

    With a model, Phi' uses the smooth moment interpolant; otherwise
    the moment integral is quadratured directly.  Passing y = phi(T)
    skips the inner solve.
    """
    table = table or quadrature.default_checkpoints()
    if y is None:
        y = phi(T, mu, table, engine)
    if model is not None:
        moment = float(model.moment_w(y))
    else:
        moment = quadrature.weighted_moment(y, mu, engine).value
    dphi = 2.0 * moment / (y * y) + _boundary_term(y, mu)
    return zeta.z_squared(T) / dphi


def _boundary_term(y: float, mu: MuSpec) -> float:
    # Z^2(mu) e^{-2 mu/y} mu'(y); the exponent is <= -14 ln y for
    # admissible mu, so compute it first and skip the Z evaluation
    # once the factor has underflowed
    mu_y = float(mu.mu_at(y))
    expo = -2.0 * mu_y / y
    if expo < -700.0:
        return 0.0
    return zeta.z_squared(mu_y) * math.exp(expo) * float(mu.dmu_at(y))


def ladder_gap(mu1: MuSpec, mu2: MuSpec, T: float,
               table: Optional[quadrature.CumulativeTable] = None,
               engine=None) -> float:
    """phi_1(T) - phi_2(T) for two admissible cutoffs."""
    table = table or quadrature.default_checkpoints()
    return phi(T, mu1, table, engine) - phi(T, mu2, table, engine)


# ---------------------------------------------------------------------------
# ladder tables and beams

def _default_t_grid(T0: float, t_hi: float = 1e4, n: int = 40) -> np.ndarray:
    lo = max(T0 * 1.02, 60.0)
    return np.geomspace(lo, t_hi, n)


def build_ladder(mu: MuSpec, table: quadrature.CumulativeTable,
                 T_grid: Optional[Sequence[float]] = None,
                 engine=None, fast: bool = True,
                 model: Optional[quadrature.PhiModel] = None) -> LadderTable:
    """Solve phi on a T grid and record defining-equation residuals.

    With fast=True roots come from the Phi interpolant and each point's
    residual is then verified against the directly quadratured Phi, so
    speed never silently degrades the recorded accuracy.
    """
    T0 = solve_M(mu.y0, mu, table, engine)
    Ts = np.asarray(T_grid if T_grid is not None else _default_t_grid(T0),
                    dtype=float)
    if np.any(np.diff(Ts) <= 0) or Ts.size < 2:
        raise DomainError("T grid must be strictly increasing")
    if Ts[0] < T0:
        raise DomainError(f"T grid starts below T0={T0:.6f}")

    if fast:
        ys = phi_fast(Ts, mu, table, model)
    else:
        ys = np.array([phi(float(t), mu, table, engine, t0=T0)
                       for t in Ts])
    rows = np.empty((Ts.size, 3))
    for i, (t, yv) in enumerate(zip(Ts, ys)):
        resid = quadrature.weighted_integral(float(yv), mu, engine).value \
            - quadrature.hl_integral(float(t), table)
        rows[i] = (t, yv, abs(resid))

    ok = (1.9 * rows[:, 0] < rows[:, 1]) & (rows[:, 1] < 2.0 * rows[:, 0])
    threshold = math.inf
    for i in range(Ts.size):
        if np.all(ok[i:]):
            threshold = float(rows[i, 0])
            break
    return LadderTable(mu=mu, T0=T0, points=rows, threshold_1_9=threshold)


def save_ladder_csv(ladder: LadderTable, path) -> None:
    import pathlib
    with pathlib.Path(path).open("w") as fh:
        fh.write("T,phi,residual\n")
        for t, y, r in ladder.points:
            fh.write(f"{t:.17g},{y:.17g},{r:.17g}\n")


def load_ladder_csv(path):
    import pathlib
    with pathlib.Path(path).open() as fh:
        header = fh.readline().strip()
        if header != "T,phi,residual":
            raise DomainError(f"bad ladder header {header!r}")
        return np.loadtxt(fh, delimiter=",", ndmin=2)


def beam_experiment(family_params: Sequence, y_grid: Sequence[float],
                    T_grid: Sequence[float],
                    table: Optional[quadrature.CumulativeTable] = None,
                    engine=None, y0: float = DEFAULT_Y0,
                    model: Optional[quadrature.PhiModel] = None) -> dict:
    """Divergent input beams, focusing output ladders.

    family_params lists (rho, n) pairs for the beam family.  The report
    carries the input divergence Delta(y) = y (y-y0)^n / sqrt(1+(y-y0)^2)
    per member, the output spread S(T) = max_ij |phi_i - phi_j|, and
    the products S(T) * T.
    """
    if not family_params:
        raise PreconditionError("beam experiment needs at least one member")
    members = []
    for entry in family_params:
        rho, n = (entry["rho"], entry.get("n", 1.0)) \
            if isinstance(entry, dict) else entry
        try:
            members.append(MuSpec.beam(rho, n, y0=y0))
        except PreconditionError as exc:
            raise PreconditionError(
                f"beam member (rho={rho!r}, n={n!r}) invalid: {exc}")

    table = table or quadrature.default_checkpoints()
    y_grid = np.asarray(y_grid, dtype=float)
    T_grid = np.asarray(T_grid, dtype=float)

    delta = {}
    for m in members:
        _, n = m.params
        d = y_grid - y0
        delta[m.label()] = (y_grid * np.maximum(d, 0.0) ** n
                            / np.sqrt(1.0 + d * d)).tolist()

    t0s = [solve_M(m.y0, m, table, engine) for m in members]
    if np.min(T_grid) < max(t0s):
        raise DomainError(
            f"T grid starts below max member T0 = {max(t0s):.6f}")

    phis = np.empty((len(members), T_grid.size))
    for i, m in enumerate(members):
        phis[i] = phi_fast(T_grid, m, table, model) if model is not None \
            else [phi(float(t), m, table, engine, t0=t0s[i])
                  for t in T_grid]
    spread = (phis.max(axis=0) - phis.min(axis=0))
    return {
        "members": [m.label() for m in members],
        "T0": max(t0s),
        "y_grid": y_grid.tolist(),
        "delta": delta,
        "T_grid": T_grid.tolist(),
        "spread": spread.tolist(),
        "spread_times_T": (spread * T_grid).tolist(),
    }
