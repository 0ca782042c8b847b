"""Checkpointed quadrature of Z^2: I(T), Phi(y), short intervals.

Everything here integrates the nonnegative oscillatory density Z(t)^2.
Panels are Clenshaw-Curtis with 17 nodes, their width capped at half
the local mean zero spacing pi / ln(t/2pi), so no panel sees more than
about half an oscillation of Z^2.  Each panel carries an error estimate
from the tail of its Chebyshev expansion; panels whose estimate exceeds
the local tolerance budget are split (with default tolerances the
estimates sit orders of magnitude below the budget).

Two persistent structures:

  CumulativeTable   checkpoints of I(T) on a modest grid (CSV + manifest
                    on disk); hl_integral answers queries from the
                    nearest checkpoint below plus a few fresh panels.

  weighted-integral engine
                    one shared node cache of (t_j, w_j Z(t_j)^2) up to
                    T_QUAD_MAX, from which Phi(y) and the moment
                    integral are single masked dot products with
                    exp(-2t/y).  Building it costs a few minutes of Z
                    evaluations, so it is cached on disk under
                    LADDERLAB_CACHE_DIR (default ~/.cache/ladderlab).

The integral Phi(y) runs up to mu(y), but the integrand dies like
e^{-2t/y} long before any admissible cutoff (mu(y) >= 7y ln y) is
reached: integration stops at the first panel boundary t* where

    B e^{-2 t*/y} (t*)^{3/2} (y/2) < abs_tol,

with B = A^2 / sqrt(2e) and |Z(t)| < A t^{1/4} calibrated on the cache.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import pathlib
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import zeta
from .errors import (DomainError, PreconditionError, RangeError, StateError)

__all__ = [
    "CumulativeTable", "WeightedIntegralResult", "PhiModel",
    "build_checkpoints", "hl_integral", "interval_integral",
    "weighted_integral", "weighted_moment", "tka_truncated_check",
    "save_checkpoints_csv", "load_checkpoints_csv",
    "default_engine", "set_default_engine", "phi_model",
    "cache_dir", "effective_threads",
    "REL_TOL", "DELTA0", "T_QUAD_MAX", "DEFAULT_TABLE_T_MAX",
]

ENGINE_VERSION = "ladderlab-quad-1"

REL_TOL = 1e-9
DELTA0 = 1.0 / 100.0
FINE_STEP = 1.0
COARSE_STEP = 5.0
FINE_T_MAX = 1000.0
DEFAULT_TABLE_T_MAX = 21000.0
T_QUAD_MAX = 480000.0
MU_FACTOR = 7.0          # admissibility floor mu(y) >= 7 y ln y

_PHI_Y_LO = 90.0
_PHI_Y_HI = 24000.0
_PHI_DEG = 384

_TWO_PI = float(zeta.TWO_PI_LD)


# ---------------------------------------------------------------------------
# Clenshaw-Curtis panel machinery

_CC_N = 16  # 17 nodes, order > 15


def _cc_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(n + 1)
    x = -np.cos(np.pi * j / n)
    w = np.empty(n + 1)
    for i in range(n + 1):
        acc = 1.0
        for k in range(1, n // 2 + 1):
            b = 1.0 if 2 * k == n else 2.0
            acc -= b * math.cos(2.0 * k * i * math.pi / n) \
                / (4.0 * k * k - 1.0)
        w[i] = 2.0 * acc / n
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


_CC_X, _CC_W = _cc_rule(_CC_N)

# rows computing the last three Chebyshev coefficients of the panel
# interpolant (DCT-I); their size estimates the panel error
_EST_ROWS = np.array([
    [(2.0 / _CC_N) * (0.5 if j in (0, _CC_N) else 1.0)
     * math.cos(k * (_CC_N - j) * math.pi / _CC_N)
     * (0.5 if k == _CC_N else 1.0)
     for j in range(_CC_N + 1)]
    for k in (_CC_N - 2, _CC_N - 1, _CC_N)
])


def _local_wavelength_cap(t: float) -> float:
    # half the mean zero spacing 2pi/ln(t/2pi)
    return math.pi / max(math.log(max(t, 1.0) / _TWO_PI), 1.0)


def _panel_count(lo: float, hi: float) -> int:
    return max(1, int(math.ceil((hi - lo) / _local_wavelength_cap(hi))))


def _eval_panels(lo: np.ndarray, hi: np.ndarray,
                 weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Panel integrals of Z^2 (optionally times weight) over [lo, hi].

    Returns (values, error estimates, flat nodes, flat w*f) with 17
    nodes per panel.
    """
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    nodes = c[:, None] + h[:, None] * _CC_X[None, :]
    f = zeta.z_squared_many(nodes.ravel()).reshape(nodes.shape)
    if weight is not None:
        f = f * weight(nodes)
    vals = (f @ _CC_W) * h
    # conservative by ~2 orders against exact tail integration, which
    # divides the coefficients by k^2 - 1
    est = (np.abs(f @ _EST_ROWS.T).sum(axis=1)) * h / 32.0
    wf = f * _CC_W[None, :] * h[:, None]
    return vals, est, nodes.ravel(), wf.ravel()


def _refine_interval(lo: float, hi: float, rel_tol: float,
                     weight=None, depth: int = 0) -> float:
    m = _panel_count(lo, hi)
    edges = np.linspace(lo, hi, m + 1)
    vals, est, _, _ = _eval_panels(edges[:-1], edges[1:], weight)
    total = 0.0
    for p in range(m):
        ell = max(math.log(max(edges[p + 1], 1.0) / _TWO_PI), 1.0)
        budget = rel_tol * (abs(vals[p]) + (edges[p + 1] - edges[p]) * ell)
        if est[p] > budget and depth < 4:
            half = 0.5 * (edges[p] + edges[p + 1])
            total += _refine_interval(edges[p], half, rel_tol, weight,
                                      depth + 1)
            total += _refine_interval(half, edges[p + 1], rel_tol, weight,
                                      depth + 1)
        else:
            total += vals[p]
    return total


def _panel_budget(lo: np.ndarray, hi: np.ndarray,
                  vals: np.ndarray) -> np.ndarray:
    ell = np.maximum(np.log(np.maximum(hi, 1.0) / _TWO_PI), 1.0)
    return REL_TOL * (np.abs(vals) + (hi - lo) * ell)


def _refine_panel_nodes(lo: float, hi: float, depth: int = 0):
    """Split a panel in two, recursing while estimates exceed budget.

    Returns parallel lists (lo, hi, val, est, nodes, wf), one entry per
    final 17-node panel.
    """
    mid = 0.5 * (lo + hi)
    pair_lo = np.array([lo, mid])
    pair_hi = np.array([mid, hi])
    vals, est, nodes, wf = _eval_panels(pair_lo, pair_hi)
    out = ([], [], [], [], [], [])
    npp = _CC_N + 1
    budget = _panel_budget(pair_lo, pair_hi, vals)
    for k in range(2):
        if est[k] > budget[k] and depth < 4:
            sub = _refine_panel_nodes(pair_lo[k], pair_hi[k], depth + 1)
            for dst, src in zip(out, sub):
                dst.extend(src)
        else:
            out[0].append(pair_lo[k])
            out[1].append(pair_hi[k])
            out[2].append(vals[k])
            out[3].append(est[k])
            out[4].append(nodes[k * npp:(k + 1) * npp])
            out[5].append(wf[k * npp:(k + 1) * npp])
    return out


def _split_flagged(lo, hi, vals, est, node_t, node_wf, flagged):
    """Replace flagged panels by their refined pieces (array splice)."""
    npp = _CC_N + 1
    parts = {i: _refine_panel_nodes(float(lo[i]), float(hi[i]))
             for i in flagged}
    seg_scalar = {key: [] for key in ("lo", "hi", "vals", "est")}
    seg_nodes, seg_wf = [], []
    prev = 0
    for i in sorted(parts):
        seg_scalar["lo"].append(lo[prev:i])
        seg_scalar["hi"].append(hi[prev:i])
        seg_scalar["vals"].append(vals[prev:i])
        seg_scalar["est"].append(est[prev:i])
        seg_nodes.append(node_t[prev * npp:i * npp])
        seg_wf.append(node_wf[prev * npp:i * npp])
        p_lo, p_hi, p_val, p_est, p_nodes, p_wf = parts[i]
        seg_scalar["lo"].append(np.array(p_lo))
        seg_scalar["hi"].append(np.array(p_hi))
        seg_scalar["vals"].append(np.array(p_val))
        seg_scalar["est"].append(np.array(p_est))
        seg_nodes.extend(p_nodes)
        seg_wf.extend(p_wf)
        prev = i + 1
    seg_scalar["lo"].append(lo[prev:])
    seg_scalar["hi"].append(hi[prev:])
    seg_scalar["vals"].append(vals[prev:])
    seg_scalar["est"].append(est[prev:])
    seg_nodes.append(node_t[prev * npp:])
    seg_wf.append(node_wf[prev * npp:])
    return (np.concatenate(seg_scalar["lo"]),
            np.concatenate(seg_scalar["hi"]),
            np.concatenate(seg_scalar["vals"]),
            np.concatenate(seg_scalar["est"]),
            np.concatenate(seg_nodes),
            np.concatenate(seg_wf))


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class CumulativeTable:
    """Checkpoints (t, I(t)) with t strictly increasing from 0."""

    knots: np.ndarray          # shape (K, 2): columns t, I
    rel_tol: float
    abs_tol: float
    t_max: float
    engine_version: str
    max_step: float

    def __post_init__(self):
        k = self.knots
        if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
            raise StateError("checkpoint table needs >= 2 rows of (t, I)")
        if k[0, 0] != 0.0 or k[0, 1] != 0.0:
            raise StateError("checkpoint table must start at (0, 0)")
        dt = np.diff(k[:, 0])
        if np.any(dt <= 0):
            raise StateError("checkpoint ordinates must strictly increase")
        if np.any(np.diff(k[:, 1]) < 0):
            raise StateError("cumulative integral must be nondecreasing")
        if np.max(dt) > self.max_step * (1 + 1e-12):
            raise StateError("checkpoint spacing exceeds max_step")


@dataclass(frozen=True)
class WeightedIntegralResult:
    y: float
    mu_of_y: float
    value: float
    truncation_point: float
    truncation_err_bound: float


# ---------------------------------------------------------------------------
# checkpoint table

def _knot_grid(t_max: float, fine_step: float, coarse_step: float
               ) -> np.ndarray:
    fine_end = min(t_max, FINE_T_MAX)
    n_fine = int(round(fine_end / fine_step))
    knots = [np.linspace(0.0, fine_end, n_fine + 1)]
    if t_max > fine_end:
        n_coarse = int(math.ceil((t_max - fine_end) / coarse_step))
        knots.append(np.linspace(fine_end, t_max, n_coarse + 1)[1:])
    return np.concatenate(knots)


def build_checkpoints(t_max: float = DEFAULT_TABLE_T_MAX,
                      max_step: Optional[float] = None,
                      rel_tol: float = REL_TOL) -> CumulativeTable:
    """Integrate Z^2 from 0 to t_max and checkpoint the running value."""
    if not (t_max > 0 and math.isfinite(t_max)):
        raise DomainError("build_checkpoints requires t_max > 0")
    if rel_tol <= 0:
        raise DomainError("build_checkpoints requires rel_tol > 0")
    fine = min(max_step, FINE_STEP) if max_step is not None else FINE_STEP
    coarse = max_step if max_step is not None else COARSE_STEP
    knots = _knot_grid(t_max, fine, coarse)

    sums = np.empty(knots.size - 1)
    for i in range(knots.size - 1):
        sums[i] = _refine_interval(float(knots[i]), float(knots[i + 1]),
                                   rel_tol)
    values = np.concatenate([[0.0], np.cumsum(sums.astype(np.longdouble))
                             .astype(float)])
    return CumulativeTable(
        knots=np.column_stack([knots, values]),
        rel_tol=rel_tol,
        abs_tol=1e-10 * max(1.0, float(values[-1])),
        t_max=float(knots[-1]),
        engine_version=ENGINE_VERSION,
        max_step=float(np.max(np.diff(knots))),
    )


def hl_integral(T: float, table: CumulativeTable) -> float:
    """I(T), the cumulative integral of Z^2 over [0, T]."""
    T = float(T)
    if not math.isfinite(T) or T < 0:
        raise DomainError("hl_integral requires finite T >= 0")
    if T > table.t_max * (1 + 1e-12):
        raise RangeError(
            f"T={T:g} beyond table t_max={table.t_max:g}; rebuild "
            "checkpoints with a larger t_max", limit=table.t_max)
    ts = table.knots[:, 0]
    i = int(np.searchsorted(ts, T, side="right")) - 1
    i = min(i, ts.size - 1)
    base = float(table.knots[i, 1])
    t0 = float(ts[i])
    if T <= t0:
        return base
    return base + _refine_interval(t0, T, table.rel_tol)


def interval_integral(a: float, b: float,
                      rel_tol: float = REL_TOL) -> float:
    """Integral of Z^2 over [a, b] by fresh panels (no table needed)."""
    if not (math.isfinite(a) and math.isfinite(b)) or a < 0:
        raise DomainError("interval_integral requires finite 0 <= a < b")
    if a >= b:
        raise DomainError("interval_integral requires a < b")
    total = 0.0
    t = a
    while t < b:
        seg = min(b, t + COARSE_STEP)
        total += _refine_interval(t, seg, rel_tol)
        t = seg
    return total


# ---------------------------------------------------------------------------
# CSV + manifest round trip

def save_checkpoints_csv(table: CumulativeTable, path) -> None:
    path = pathlib.Path(path)
    with path.open("w") as fh:
        fh.write("t,I\n")
        for t, v in table.knots:
            fh.write(f"{t:.17g},{v:.17g}\n")
    manifest = path.with_suffix(path.suffix + ".manifest")
    with manifest.open("w") as fh:
        fh.write(f"t_max={table.t_max:.17g}\n")
        fh.write(f"max_step={table.max_step:.17g}\n")
        fh.write(f"rel_tol={table.rel_tol:.17g}\n")
        fh.write(f"abs_tol={table.abs_tol:.17g}\n")
        fh.write(f"engine_version={table.engine_version}\n")


def load_checkpoints_csv(path) -> CumulativeTable:
    path = pathlib.Path(path)
    manifest = path.with_suffix(path.suffix + ".manifest")
    if not manifest.exists():
        raise StateError(f"missing manifest {manifest}")
    meta = {}
    for line in manifest.read_text().splitlines():
        if line.strip():
            key, _, val = line.partition("=")
            meta[key.strip()] = val.strip()
    try:
        rel_tol = float(meta["rel_tol"])
        abs_tol = float(meta["abs_tol"])
        t_max = float(meta["t_max"])
        max_step = float(meta["max_step"])
        version = meta["engine_version"]
    except KeyError as missing:
        raise StateError(f"manifest {manifest} lacks field {missing}")
    with path.open() as fh:
        header = fh.readline().strip()
        if header != "t,I":
            raise StateError(f"bad checkpoint header {header!r} in {path}")
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    return CumulativeTable(knots=rows, rel_tol=rel_tol, abs_tol=abs_tol,
                           t_max=t_max, engine_version=version,
                           max_step=max_step)


# ---------------------------------------------------------------------------
# weighted-integral engine (node cache)

def cache_dir() -> pathlib.Path:
    root = os.environ.get("LADDERLAB_CACHE_DIR")
    if root:
        path = pathlib.Path(root)
    else:
        path = pathlib.Path.home() / ".cache" / "ladderlab"
    path.mkdir(parents=True, exist_ok=True)
    return path


def effective_threads() -> int:
    raw = os.environ.get("LADDERLAB_THREADS", "1")
    try:
        return max(1, min(64, int(raw)))
    except ValueError:
        return 1


_Z_BLOCK = 1 << 19


def _z2_blocks(ts: np.ndarray) -> np.ndarray:
    """Z^2 over fixed-size blocks; block layout is independent of the
    thread count, so results are bit-identical for any parallelism."""
    blocks = [ts[i:i + _Z_BLOCK] for i in range(0, ts.size, _Z_BLOCK)]
    workers = effective_threads()
    if workers == 1 or len(blocks) == 1:
        parts = [zeta.z_squared_many(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(zeta.z_squared_many, blocks))
    return np.concatenate(parts)


class WeightedEngine:
    """Node cache (t_j, w_j Z^2(t_j)) for weighted integrals of Z^2.

    Phi(y) and the first-moment integral reduce to masked dot products
    against exp(-2 t / y).  Nodes ascend; every panel owns exactly 17
    consecutive entries.
    """

    NODES_PER_PANEL = _CC_N + 1

    def __init__(self, node_t, node_wf, panel_end, panel_val, panel_est,
                 panel_prefix, meta):
        self.node_t = node_t
        self.node_wf = node_wf
        self.panel_end = panel_end
        self.panel_val = panel_val
        self.panel_est = panel_est
        self.panel_prefix = panel_prefix
        self.meta = meta
        self.t_max = float(meta["t_max"])
        self.a_env = float(meta["a_env"])
        self.b_env = self.a_env ** 2 / math.sqrt(2.0 * math.e)
        self._phi_model: Optional["PhiModel"] = None
        self._y_cap: Optional[float] = None

    # -- construction ------------------------------------------------

    @staticmethod
    def _params(t_max: float) -> dict:
        return {
            "engine_version": ENGINE_VERSION,
            "t_max": t_max,
            "fine_step": FINE_STEP,
            "coarse_step": COARSE_STEP,
            "fine_t_max": FINE_T_MAX,
            "cc_n": _CC_N,
            "rel_tol": REL_TOL,
        }

    @classmethod
    def build(cls, t_max: float = T_QUAD_MAX) -> "WeightedEngine":
        knots = _knot_grid(t_max, FINE_STEP, COARSE_STEP)
        counts = np.array([_panel_count(float(a), float(b))
                           for a, b in zip(knots[:-1], knots[1:])])
        lo_list = []
        hi_list = []
        for i in range(knots.size - 1):
            edges = np.linspace(knots[i], knots[i + 1], counts[i] + 1)
            lo_list.append(edges[:-1])
            hi_list.append(edges[1:])
        lo = np.concatenate(lo_list)
        hi = np.concatenate(hi_list)

        npp = cls.NODES_PER_PANEL
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        node_t = (c[:, None] + h[:, None] * _CC_X[None, :]).ravel()
        f = _z2_blocks(node_t).reshape(-1, npp)

        with np.errstate(divide="ignore"):
            scaled = f / np.sqrt(np.maximum(node_t.reshape(-1, npp), 1e-30))
        mask = node_t.reshape(-1, npp) >= 10.0
        a_env = math.sqrt(float(np.max(np.where(mask, scaled, 0.0))))
        del scaled, mask

        panel_val = (f @ _CC_W) * h
        panel_est = (np.abs(f @ _EST_ROWS.T).sum(axis=1)) * h / 32.0
        node_wf = (f * _CC_W[None, :] * h[:, None]).ravel()
        del f

        flagged = np.nonzero(panel_est > _panel_budget(lo, hi, panel_val))[0]
        if flagged.size:
            lo, hi, panel_val, panel_est, node_t, node_wf = \
                _split_flagged(lo, hi, panel_val, panel_est,
                               node_t, node_wf, flagged)
        prefix = np.cumsum(panel_val.astype(np.longdouble)).astype(float)

        budget = _panel_budget(lo, hi, panel_val)
        n_over = int(np.sum(panel_est > budget))
        meta = dict(cls._params(t_max))
        meta.update({
            "a_env": a_env,
            "n_panels": int(panel_val.size),
            "n_nodes": int(node_t.size),
            "n_split": int(flagged.size),
            "est_over_budget": n_over,
            "max_est_ratio": float(np.max(panel_est / budget)),
        })
        return cls(node_t, node_wf, hi, panel_val, panel_est, prefix, meta)

    # -- persistence ---------------------------------------------------

    @classmethod
    def _cache_path(cls, t_max: float) -> pathlib.Path:
        params = cls._params(t_max)
        key = hashlib.sha256(
            json.dumps(params, sort_keys=True).encode()).hexdigest()[:12]
        return cache_dir() / f"engine-{key}.npz"

    def save(self) -> pathlib.Path:
        path = self._cache_path(self.t_max)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, node_t=self.node_t, node_wf=self.node_wf,
                 panel_end=self.panel_end, panel_val=self.panel_val,
                 panel_est=self.panel_est, panel_prefix=self.panel_prefix,
                 meta=json.dumps(self.meta))
        tmp.replace(path)
        return path

    @classmethod
    def load_or_build(cls, t_max: float = T_QUAD_MAX) -> "WeightedEngine":
        path = cls._cache_path(t_max)
        if path.exists():
            with np.load(path, allow_pickle=False) as data:
                meta = json.loads(str(data["meta"]))
                eng = cls(data["node_t"], data["node_wf"],
                          data["panel_end"], data["panel_val"],
                          data["panel_est"], data["panel_prefix"], meta)
            return eng
        eng = cls.build(t_max)
        eng.save()
        return eng

    # -- weighted integrals --------------------------------------------

    def _tail_start(self, y: float, abs_tol: float, power: float) -> float:
        """Smallest t with B e^{-2t/y} t^power (y/2) < abs_tol."""
        target = math.log(self.b_env * y / (2.0 * abs_tol))
        t = max(y, 10.0)
        for _ in range(64):
            t_new = max(0.5 * y * (target + power * math.log(t)), 1.0)
            if abs(t_new - t) < 1e-9 * t:
                t = t_new
                break
            t = t_new
        return t

    def y_cap(self) -> float:
        """Largest y whose tail truncation fits inside t_max.

        Both the plain weighted integral and the first moment must
        truncate before the node cache runs out; beyond this y the
        engine raises RangeError.
        """
        if self._y_cap is not None:
            return self._y_cap

        def t_star(y: float) -> float:
            worst = 0.0
            for power, with_t in ((1.5, False), (2.5, True)):
                scale = max(1.0, 0.5 * y * math.log(max(0.5 * y, 2.0)))
                if with_t:
                    scale *= 0.5 * y
                worst = max(worst,
                            self._tail_start(y, 1e-10 * scale, power))
            return worst

        lo, hi = 10.0, self.t_max
        if t_star(lo) > self.t_max:
            self._y_cap = 0.0
        elif t_star(hi) <= self.t_max:
            self._y_cap = hi
        else:
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if t_star(mid) <= self.t_max:
                    lo = mid
                else:
                    hi = mid
            self._y_cap = lo
        return self._y_cap

    def _masked_dot(self, y: float, cut_idx: int, with_t: bool) -> float:
        total = np.longdouble(0.0)
        step = 1 << 21
        for s in range(0, cut_idx, step):
            e = min(cut_idx, s + step)
            w = np.exp(self.node_t[s:e] * (-2.0 / y))
            if with_t:
                w *= self.node_t[s:e]
            total += np.longdouble(np.dot(self.node_wf[s:e], w))
        return float(total)

    def weighted(self, y: float, mu_at: Callable[[float], float],
                 power: float = 1.5, with_t: bool = False,
                 ) -> WeightedIntegralResult:
        mu_y = float(mu_at(y))
        scale = max(1.0, 0.5 * y * math.log(max(0.5 * y, 2.0)))
        if with_t:
            scale *= 0.5 * y
        abs_tol = 1e-10 * scale
        t_star = self._tail_start(y, abs_tol, power)

        if t_star >= mu_y:
            # integrate exactly up to the cutoff; the last partial
            # panel is evaluated fresh
            if mu_y > self.t_max:
                raise RangeError(
                    f"mu(y)={mu_y:g} beyond engine t_max={self.t_max:g}; "
                    "rebuild the engine with a larger t_max",
                    limit=self.t_max)
            p = int(np.searchsorted(self.panel_end, mu_y, side="right"))
            cut_idx = p * self.NODES_PER_PANEL
            value = self._masked_dot(y, cut_idx, with_t)
            t_lo = float(self.panel_end[p - 1]) if p > 0 else 0.0
            if mu_y > t_lo:
                m = _panel_count(t_lo, mu_y)
                edges = np.linspace(t_lo, mu_y, m + 1)

                def wfun(ts):
                    w = np.exp(ts * (-2.0 / y))
                    return w * ts if with_t else w

                vals, _, _, _ = _eval_panels(edges[:-1], edges[1:], wfun)
                value += float(np.sum(vals))
            return WeightedIntegralResult(
                y=y, mu_of_y=mu_y, value=value,
                truncation_point=mu_y, truncation_err_bound=0.0)

        if t_star > self.t_max:
            raise RangeError(
                f"truncation point {t_star:g} for y={y:g} exceeds engine "
                f"t_max={self.t_max:g}; rebuild with a larger t_max",
                limit=self.t_max)
        p = int(np.searchsorted(self.panel_end, t_star, side="left"))
        t_cut = float(self.panel_end[p])
        cut_idx = (p + 1) * self.NODES_PER_PANEL
        value = self._masked_dot(y, cut_idx, with_t)
        bound = self.b_env * math.exp(-2.0 * t_cut / y) \
            * t_cut ** power * 0.5 * y
        return WeightedIntegralResult(
            y=y, mu_of_y=mu_y, value=value,
            truncation_point=t_cut, truncation_err_bound=bound)


_default_engine: Optional[WeightedEngine] = None
_default_table: Optional[CumulativeTable] = None
_engine_lock = threading.Lock()


def default_engine() -> WeightedEngine:
    global _default_engine
    with _engine_lock:
        if _default_engine is None:
            _default_engine = WeightedEngine.load_or_build()
        return _default_engine


def set_default_engine(engine: Optional[WeightedEngine]) -> None:
    global _default_engine
    with _engine_lock:
        _default_engine = engine


def default_checkpoints() -> CumulativeTable:
    """Shared checkpoint table to DEFAULT_TABLE_T_MAX (built on first use)."""
    global _default_table
    with _engine_lock:
        if _default_table is None:
            _default_table = build_checkpoints()
        return _default_table


def _mu_callable(mu) -> Callable[[float], float]:
    if hasattr(mu, "mu_at"):
        return mu.mu_at
    if callable(mu):
        return mu
    raise DomainError("mu must be a MuSpec or a callable y -> mu(y)")


def _check_mu_valid(y: float, mu_at: Callable[[float], float]) -> None:
    floor = MU_FACTOR * y * math.log(y)
    if mu_at(y) < floor * (1 - 1e-12):
        raise PreconditionError(
            f"mu({y:g})={mu_at(y):g} below admissibility floor "
            f"7 y ln y = {floor:g}")


def weighted_integral(y: float, mu,
                      engine: Optional[WeightedEngine] = None,
                      ) -> WeightedIntegralResult:
    """Phi(y) = integral of Z^2 e^{-2t/y} over [0, mu(y)]."""
    y = float(y)
    if not math.isfinite(y) or y <= 1.0:
        raise DomainError("weighted_integral requires finite y > 1")
    mu_at = _mu_callable(mu)
    _check_mu_valid(y, mu_at)
    eng = engine or default_engine()
    return eng.weighted(y, mu_at, power=1.5, with_t=False)


def weighted_moment(y: float, mu,
                    engine: Optional[WeightedEngine] = None,
                    ) -> WeightedIntegralResult:
    """Integral of t Z^2 e^{-2t/y} over [0, mu(y)] (drives Phi')."""
    y = float(y)
    if not math.isfinite(y) or y <= 1.0:
        raise DomainError("weighted_moment requires finite y > 1")
    mu_at = _mu_callable(mu)
    _check_mu_valid(y, mu_at)
    eng = engine or default_engine()
    return eng.weighted(y, mu_at, power=2.5, with_t=True)


def tka_truncated_check(delta: float, constants,
                        engine: Optional[WeightedEngine] = None) -> float:
    """Residual of the truncated mean-value identity at delta = 1/y.

    lhs is Phi(1/delta) with the canonical cutoff 7 y ln y; rhs is
    (1/2delta) ln(1/delta) + D/(2delta) + c0 with the fitted c0.  The
    residual is expected to be O(delta ln(1/delta)).
    """
    if not (0.0 < delta <= DELTA0):
        raise DomainError(f"delta must lie in (0, {DELTA0:g}]")
    y = 1.0 / delta
    lhs = weighted_integral(
        y, lambda v: MU_FACTOR * v * math.log(v), engine).value
    rhs = (0.5 / delta) * math.log(1.0 / delta) \
        + constants.D / (2.0 * delta) + constants.require_c0()
    return lhs - rhs


# ---------------------------------------------------------------------------
# smooth interpolants of Phi and its moment (fast solver path)

class PhiModel:
    """Chebyshev models of ln Phi~ and ln M~ against ln y.

    Phi~ / M~ are the weighted integrals truncated by the engine's tail
    rule tightened 100x, which makes them smooth functions of y within
    ~1e-12 relative; interpolation error is recorded at build time.
    Phi~' (2/y^2) M~ is an exact identity for the untruncated
    integrals, so the derivative needs no numerical differentiation.
    """

    def __init__(self, phi_coef, mom_coef, meta):
        self.phi_coef = phi_coef
        self.mom_coef = mom_coef
        self.meta = meta
        self.y_lo = float(meta["y_lo"])
        self.y_hi = float(meta["y_hi"])

    def _x(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < self.y_lo * (1 - 1e-12)) \
                or np.any(y > self.y_hi * (1 + 1e-12)):
            raise RangeError(
                f"y outside model domain [{self.y_lo:g}, {self.y_hi:g}]",
                limit=self.y_hi)
        lo, hi = math.log(self.y_lo), math.log(self.y_hi)
        return (2.0 * np.log(y) - (lo + hi)) / (hi - lo)

    def phi_w(self, y):
        return np.exp(np.polynomial.chebyshev.chebval(self._x(y),
                                                      self.phi_coef))

    def moment_w(self, y):
        return np.exp(np.polynomial.chebyshev.chebval(self._x(y),
                                                      self.mom_coef))

    def dphi(self, y):
        y = np.asarray(y, dtype=float)
        return 2.0 * self.moment_w(y) / (y * y)


def _phi_model_cache_path(engine: WeightedEngine) -> pathlib.Path:
    key = hashlib.sha256(json.dumps(
        [engine.meta["engine_version"], engine.meta["t_max"],
         _PHI_Y_LO, _PHI_Y_HI, _PHI_DEG], sort_keys=True
    ).encode()).hexdigest()[:12]
    return cache_dir() / f"phimodel-{key}.npz"


def _build_phi_model(engine: WeightedEngine) -> PhiModel:
    lo, hi = math.log(_PHI_Y_LO), math.log(_PHI_Y_HI)
    k = np.arange(_PHI_DEG + 1)
    x = np.cos(np.pi * (2.0 * k + 1.0) / (2.0 * (_PHI_DEG + 1)))
    ys = np.exp(0.5 * ((hi - lo) * x + (hi + lo)))

    ln_phi = np.empty(ys.size)
    ln_mom = np.empty(ys.size)
    npp = engine.NODES_PER_PANEL
    for i, y in enumerate(ys):
        # 100x tighter cut than production queries, so the model is
        # smooth at below the level production tolerances can see
        scale = max(1.0, 0.5 * y * math.log(max(0.5 * y, 2.0)))
        t_star = engine._tail_start(y, 1e-12 * scale, 2.5)
        p = min(int(np.searchsorted(engine.panel_end, t_star, side="left")),
                engine.panel_end.size - 1)
        cut = (p + 1) * npp
        t = engine.node_t[:cut]
        w = np.exp(t * (-2.0 / y))
        base = engine.node_wf[:cut] * w
        ln_phi[i] = math.log(float(np.sum(base.astype(np.longdouble))))
        ln_mom[i] = math.log(float(np.sum((base * t)
                                          .astype(np.longdouble))))

    phi_coef = _cheb_fit_from_samples(ln_phi)
    mom_coef = _cheb_fit_from_samples(ln_mom)
    model = PhiModel(phi_coef, mom_coef, {
        "y_lo": _PHI_Y_LO, "y_hi": _PHI_Y_HI, "deg": _PHI_DEG,
        "engine_version": engine.meta["engine_version"],
    })

    # record self-validation against direct dots at random off-node y
    rng = np.random.default_rng(7)
    ys_chk = np.exp(rng.uniform(lo, hi, 24))
    worst = 0.0
    for y in ys_chk:
        direct = engine.weighted(
            y, lambda v: MU_FACTOR * v * math.log(v)).value
        worst = max(worst, abs(model.phi_w(y) / direct - 1.0))
    model.meta["max_rel_err_checked"] = worst
    return model


def _cheb_fit_from_samples(samples: np.ndarray) -> np.ndarray:
    # exact interpolation at first-kind Chebyshev points
    n = samples.size
    k = np.arange(n)
    x = np.cos(np.pi * (2.0 * k + 1.0) / (2.0 * n))
    van = np.polynomial.chebyshev.chebvander(x, n - 1)
    coef, *_ = np.linalg.lstsq(van, samples, rcond=None)
    return coef


def phi_model(engine: Optional[WeightedEngine] = None) -> PhiModel:
    eng = engine or default_engine()
    if eng._phi_model is not None:
        return eng._phi_model
    path = _phi_model_cache_path(eng)
    if path.exists():
        with np.load(path, allow_pickle=False) as data:
            model = PhiModel(data["phi_coef"], data["mom_coef"],
                             json.loads(str(data["meta"])))
    else:
        model = _build_phi_model(eng)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, phi_coef=model.phi_coef, mom_coef=model.mom_coef,
                 meta=json.dumps(model.meta))
        tmp.replace(path)
    eng._phi_model = model
    return model
