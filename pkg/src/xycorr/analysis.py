"""Parameter sweeps and feature detection on measure-versus-field curves."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import measures as M
from .errors import UsageError, XYCorrError
from .xy import GTable, XYParams, factorization_field, single_spin_state, two_spin_state

CRITICAL_FIELD = 1.0
DEFAULT_CP_GRID = (0.8, 1.3, 501)
DEFAULT_JUMP_THRESHOLD = 10.0
_JUMP_WINDOW = 6

_TWO_SPIN = {
    "MIN": lambda rho: M.min_measure(rho).value,
    "WYSIM": lambda rho: M.wysim_total(rho).value,
    "OMQC": lambda rho: M.omqc(rho).value,
    "GMQD": lambda rho: M.gmqd(rho).value,
    "concurrence": lambda rho: M.concurrence(rho).value,
    "discord": lambda rho: M.quantum_discord(rho).value,
    "MI": lambda rho: M.mutual_information(rho).value,
    "LQU": lambda rho: M.lqu(rho).value,
}
_LQC = re.compile(r"^(LQC1?)(_lower)?\(([xyz])\)$", re.IGNORECASE)


def measure_names():
    """Every accepted measure name (``LQC`` variants listed per axis)."""
    names = list(_TWO_SPIN)
    for base in ("LQC", "LQC1"):
        for suffix in ("", "_lower"):
            names += [f"{base}{suffix}({a})" for a in "xyz"]
    return names


@dataclass(frozen=True)
class Measure:
    """A named scalar measure evaluated on the chain at one parameter point.

    ``single_spin`` measures act on the one-spin state, all others on the
    two-spin state at separation ``r``.
    """

    name: str
    on_state: object
    single_spin: bool = False

    def __call__(self, p, table=None):
        if self.single_spin:
            return self.on_state(single_spin_state(p, table))
        return self.on_state(two_spin_state(p, table))


def resolve_measure(name):
    """Look up a measure by (case-insensitive) name."""
    for key, fn in _TWO_SPIN.items():
        if key.lower() == name.strip().lower():
            return Measure(key, fn)
    m = _LQC.match(name.strip())
    if m:
        single = m.group(1).upper() == "LQC1"
        lower = m.group(2) is not None
        axis = m.group(3).lower()
        canon = f"{'LQC1' if single else 'LQC'}{'_lower' if lower else ''}({axis})"
        f = M.wysi_lower if lower else M.wysi
        local = not single
        return Measure(canon, lambda rho: f(rho, axis, local=local).value, single)
    raise UsageError(f"unknown measure {name!r}; valid: {', '.join(measure_names())}")


@dataclass
class SweepSeries:
    """Samples of one measure along a strictly increasing parameter grid."""

    parameter: str
    grid: np.ndarray
    values: np.ndarray
    measure: str
    base: XYParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise UsageError("grid and values must be 1-D arrays of equal length")
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise UsageError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise XYCorrError(f"non-finite values in {self.measure} series")

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])


@dataclass
class FeatureReport:
    """A located feature of a series: extremum, jump, zero-crossing or optimizer-switch."""

    kind: str
    location: float
    magnitude: float
    uncertainty: float
    meta: dict = field(default_factory=dict)
    found: bool = True


class PointError(XYCorrError):
    """Numerical failure at one parameter point of a sweep."""

    def __init__(self, params, cause):
        super().__init__(f"numerical failure at {params}: {cause}")
        self.params = params
        self.cause = cause


def parse_grid(text):
    """``"min:max:count"`` (both ends inclusive) to an array."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"grid {text!r} is not of the form min:max:count") from None
    if n < 1 or (n > 1 and hi <= lo):
        raise UsageError(f"grid {text!r} must be non-empty and increasing")
    return np.linspace(lo, hi, n)


def sweep_many(names, base, grid):
    """Evaluate several measures on one field grid, sharing the ``G_r`` integrals."""
    ms = [resolve_measure(n) for n in names]
    if not ms:
        raise UsageError("no measures requested")
    grid = np.asarray(grid, dtype=float)
    out = {m.name: np.empty(grid.size) for m in ms}
    for i, lam in enumerate(grid):
        p = base.with_(lam=float(lam))
        try:
            table = GTable(p)
            for m in ms:
                out[m.name][i] = m(p, table)
        except XYCorrError as exc:
            raise PointError(p, exc) from exc
    return {m.name: SweepSeries("lambda", grid, out[m.name], m.name, base) for m in ms}


def sweep(measure, base, grid):
    """One measure along ``lambda``; the other parameters come from ``base``."""
    return next(iter(sweep_many([measure], base, grid).values()))


def numeric_derivative(s, order=1):
    """Finite-difference derivative on a uniform grid.

    Second-order central differences inside, second-order one-sided stencils
    at both ends; ``order=2`` applies the same stencil to the first derivative.
    """
    if order not in (1, 2):
        raise UsageError(f"derivative order must be 1 or 2, got {order}")
    if s.grid.size < 5:
        raise UsageError("need at least 5 grid points for a derivative")
    d = np.diff(s.grid)
    if np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
        raise UsageError("derivative requires a uniform grid")
    vals = s.values
    for _ in range(order):
        vals = np.gradient(vals, d[0], edge_order=2)
    meta = dict(s.meta, derivative_order=s.meta.get("derivative_order", 0) + order)
    return SweepSeries(s.parameter, s.grid, vals, s.measure, s.base, meta)


def estimate_cp(s, center=CRITICAL_FIELD):
    """Finite-temperature critical point from an extremum of the first derivative.

    Extrema are the interior grid points where the discrete second derivative
    changes sign; the one closest to ``center`` wins and the number of
    candidates is recorded in ``meta['candidates']``.
    """
    if s.base.zero_temperature:
        raise UsageError("estimate_cp needs kT > 0; at T = 0 the derivative diverges, "
                         "refine the grid around the divergence instead")
    d1 = numeric_derivative(s).values
    dd = np.diff(d1)
    cand = np.flatnonzero(dd[:-1] * dd[1:] < 0) + 1
    h = s.step
    if cand.size == 0:
        return FeatureReport("extremum", math.nan, math.nan, h / 2,
                             {"candidates": 0, "measure": s.measure}, found=False)
    i = int(cand[np.argmin(np.abs(s.grid[cand] - center))])
    return FeatureReport("extremum", float(s.grid[i]), float(d1[i]), h / 2,
                         {"candidates": int(cand.size), "measure": s.measure})


def _second_differences(v):
    return np.abs(v[2:] - 2 * v[1:-1] + v[:-2])


def detect_jump(s, threshold=DEFAULT_JUMP_THRESHOLD):
    """Locate discontinuities of a uniformly sampled series.

    At each interior point the mismatch between forward and backward slopes
    (times the step) is compared with the median mismatch over the
    surrounding window, excluding the point's immediate neighbours and the
    two outermost interior points. Points
    exceeding ``threshold`` times that local scale are flagged; adjacent
    flags merge into one report located at their mismatch-weighted centroid.
    """
    v = s.values
    n = v.size
    if n < 2 * _JUMP_WINDOW + 3:
        raise UsageError("series too short for jump detection")
    m = np.zeros(n)
    m[1:-1] = _second_differences(v)
    floor = 1e-12 * max(float(np.max(np.abs(v))), 1e-300)
    scale = np.full(n, np.inf)
    for i in range(1, n - 1):
        lo, hi = max(1, i - _JUMP_WINDOW), min(n - 1, i + _JUMP_WINDOW + 1)
        ref = [m[k] for k in range(lo, hi) if abs(k - i) > 1]
        scale[i] = max(float(np.median(ref)), floor)
    # the outermost interior points lean on endpoint values, which one-sided
    # derivative stencils make inconsistent with the interior
    scale[1] = scale[n - 2] = np.inf
    flagged = np.flatnonzero(m > threshold * scale)
    groups = []
    for i in flagged:
        if groups and i - groups[-1][-1] <= 2:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    reports = []
    h = s.step
    for g in groups:
        idx = np.array(g)
        w = m[idx]
        loc = float(np.sum(s.grid[idx] * w) / np.sum(w))
        lo, hi = max(idx[0] - 1, 0), min(idx[-1] + 1, n - 1)
        reports.append(FeatureReport("jump", loc, float(v[hi] - v[lo]), h / 2,
                                     {"measure": s.measure, "points": len(g),
                                      "ratio": float(np.max(w / scale[idx]))}))
    return reports


def zero_crossings(s, atol=1e-8):
    """Points where the series touches or crosses zero."""
    v = s.values
    h = s.step if s.grid.size > 1 else 0.0
    out = []
    for i in range(v.size):
        if abs(v[i]) <= atol:
            out.append(FeatureReport("zero-crossing", float(s.grid[i]), float(v[i]), h / 2,
                                     {"measure": s.measure}))
        elif i + 1 < v.size and v[i] * v[i + 1] < 0:
            t = v[i] / (v[i] - v[i + 1])
            out.append(FeatureReport("zero-crossing", float(s.grid[i] + t * h), 0.0, h / 2,
                                     {"measure": s.measure}))
    return out


@dataclass
class LQUTrack:
    """Optimizer switches of the LQU minimisation along a field grid."""

    switches: list
    jumps: list
    labels: list
    series: SweepSeries

    def __iter__(self):
        return iter(self.switches)

    def __len__(self):
        return len(self.switches)


def optimizer_switches(grid, labels):
    """Report every grid interval where the optimizing-axis label changes."""
    out = []
    for i in range(len(labels) - 1):
        if labels[i] != labels[i + 1]:
            h = float(grid[i + 1] - grid[i])
            out.append(FeatureReport("optimizer-switch", 0.5 * float(grid[i] + grid[i + 1]),
                                     0.0, h / 2, {"from": labels[i], "to": labels[i + 1]}))
    return out


def track_lqu_optimizer(base, grid, threshold=DEFAULT_JUMP_THRESHOLD):
    """Follow the LQU minimising observable and match switches to derivative jumps."""
    grid = np.asarray(grid, dtype=float)
    labels, values = [], []
    for lam in grid:
        p = base.with_(lam=float(lam))
        try:
            res = M.lqu(two_spin_state(p))
        except XYCorrError as exc:
            raise PointError(p, exc) from exc
        labels.append(res.metadata["label"])
        values.append(res.value)
    series = SweepSeries("lambda", grid, values, "LQU", base)
    switches = optimizer_switches(grid, labels)
    jumps = detect_jump(numeric_derivative(series), threshold) if grid.size >= 15 else []
    h = series.step if grid.size > 1 else 0.0
    for sw in switches:
        near = [j.location for j in jumps if abs(j.location - sw.location) <= h + 1e-12]
        sw.meta["derivative_jump"] = near[0] if near else None
    for j in jumps:
        near = [sw.location for sw in switches if abs(j.location - sw.location) <= h + 1e-12]
        j.meta["switch"] = near[0] if near else None
    return LQUTrack(switches, jumps, labels, series)


def known_special_points(gamma):
    """Critical field and, for ``0 < gamma < 1``, the factorization field."""
    pts = [CRITICAL_FIELD]
    if 0 < gamma < 1:
        pts.append(factorization_field(gamma))
    return pts


def long_range_scan(base, r_max, names):
    """Each measure at separations ``1..r_max`` for fixed ``(lam, gamma, beta)``."""
    ms = [resolve_measure(n) for n in names]
    if not ms:
        raise UsageError("no measures requested")
    try:
        table = GTable(base, rmax=r_max)
    except XYCorrError as exc:
        raise PointError(base, exc) from exc
    rs = np.arange(1, r_max + 1)
    out = {m.name: np.empty(rs.size) for m in ms}
    for k, r in enumerate(rs):
        p = base.with_(r=int(r))
        try:
            for m in ms:
                out[m.name][k] = m(p, table)
        except XYCorrError as exc:
            raise PointError(p, exc) from exc
    return {m.name: SweepSeries("r", rs.astype(float), out[m.name], m.name, base) for m in ms}


def detect_factorization(gamma, base, grid, threshold=DEFAULT_JUMP_THRESHOLD):
    """Factorization signatures along ``lambda``.

    Returns zero-crossings (touches) of the concurrence and derivative jumps of
    WYSIM, two-spin ``LQC(x)`` and its square-root-free bound ``LQC_lower(x)``.
    """
    series = sweep_many(["concurrence", "WYSIM", "LQC(x)", "LQC_lower(x)"],
                        base.with_(gamma=gamma), grid)
    conc = series["concurrence"]
    reports = []
    # concurrence touches zero (V-shaped) at an isolated field inside the ordered
    # phase; refine every isolated local minimum between its neighbours
    conc_at = resolve_measure("concurrence")
    v = conc.values
    for i in range(1, v.size - 1):
        if v[i] < v[i - 1] and v[i] <= v[i + 1] and v[i] < 1e-2 * max(v[i - 1], v[i + 1]) + 1e-3:
            a, b = float(conc.grid[i - 1]), float(conc.grid[i + 1])
            f = lambda lam: conc_at(conc.base.with_(lam=lam))
            res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
            if res.fun <= 1e-8:
                reports.append(FeatureReport("zero-crossing", float(res.x), float(res.fun),
                                             conc.step / 2, {"measure": "concurrence"}))
    for name in ("WYSIM", "LQC(x)", "LQC_lower(x)"):
        reports += detect_jump(numeric_derivative(series[name]), threshold)
    return reports, series
