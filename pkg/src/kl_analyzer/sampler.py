"""Brute-force sampling oracle for KL moduli, empirical exponents and
directional subderivative estimates.

The modulus estimator realizes the liminf characterization directly: it
draws points in shrinking annuli around xbar, keeps those whose value
exceeds f(xbar), and reports the smallest observed ratio

    (1 - theta) * d(0, dF(x)) / (f(x) - f(xbar))^theta

over the two innermost populated annuli.  The estimate is a statistical
upper bound on the true liminf: thin worst-case regions can be missed,
which is why a directed mode (sampling along a named ray) exists for
fixtures whose worst direction is known.

All randomness flows through the counter-based generator with an
explicit seed, so every estimate is reproducible bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import numerics, subdiff
from ._parallel import run_ordered
from .errors import DomainError, EmptyBudget, InsufficientSamples
from .model import LpLeastSquares, MaxOfSmooth, as_point, evaluate

CAP_INF = 1e12
TOL_POS = 1e-9

CLASS_NONPOSITIVE = "nonpositive"
CLASS_FINITE_POSITIVE = "finite-positive"
CLASS_DIVERGENT = "divergent"


@dataclass(frozen=True)
class SampleBudget:
    """Sampling plan: annulus ladder eps * 2^-k for k = 0..num_levels,
    samples per annulus, seed, and an optional ray direction."""

    radius_eps: float = 0.1
    num_levels: int = 10
    samples_per_level: int = 2000
    seed: int = 0
    direction: object = None

    def __post_init__(self):
        if self.samples_per_level <= 0 or self.num_levels < 0 or not self.radius_eps > 0:
            raise EmptyBudget("budget must draw at least one sample")
        if self.direction is not None:
            d = np.asarray(self.direction, dtype=np.float64).reshape(-1)
            norm = float(np.sqrt(d @ d))
            if norm <= 0:
                raise EmptyBudget("direction must be nonzero")
            d = d / norm
            d.setflags(write=False)
            object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class SampleRecord:
    """One oracle sample: the point, its value gap, subgradient
    distance, KL ratio and distance from xbar."""

    x: np.ndarray
    gap: float
    dist: float
    ratio: float
    radius: float


def _annulus_radii(eps, k):
    return eps * 2.0 ** (-(k + 1)), eps * 2.0 ** (-k)


def _directed_points(xbar, direction, n_samples, r_lo, r_hi):
    pts = []
    if n_samples == 1:
        return [xbar + r_hi * direction]
    ratio = r_lo / r_hi
    for j in range(n_samples):
        r = r_hi * ratio ** (j / (n_samples - 1.0))
        pts.append(xbar + r * direction)
    return pts


def _sample_annulus(f, xbar, f_base, theta, nu, budget, level, margin_reject):
    """Records for one annulus, in draw order."""
    n = xbar.shape[0]
    r_lo, r_hi = _annulus_radii(budget.radius_eps, level)
    records = []
    rejected = 0
    if budget.direction is not None:
        points = _directed_points(xbar, budget.direction, budget.samples_per_level, r_lo, r_hi)
    else:
        stream_base = level << 32
        offsets = numerics.annulus_offsets(
            budget.seed, stream_base, budget.samples_per_level, n, r_lo, r_hi
        )
        points = []
        mask_start = 2 * ((n + 1) // 2) + 1
        for j in range(budget.samples_per_level):
            off = np.array(offsets[j])
            if isinstance(f, LpLeastSquares):
                # explicit support patterns so the off-support branch of
                # the subdifferential is exercised
                mask = numerics.uniforms(budget.seed, stream_base + j, mask_start, n)
                radius = float(np.sqrt(off @ off))
                for i in range(n):
                    if mask[i] < 0.5:
                        off[i] = 0.0
                norm = float(np.sqrt(off @ off))
                if norm <= 0.0:
                    continue
                off *= radius / norm
            points.append(xbar + off)
    for x in points:
        try:
            gap = evaluate(f, x) - f_base
        except DomainError:
            continue
        if not (0.0 < gap < nu):
            continue
        if margin_reject is not None:
            margin = subdiff.activity_margin(f, x)
            if margin < margin_reject(x):
                rejected += 1
                continue
        try:
            dist = subdiff.subgrad_distance(f, x)
        except DomainError:
            continue
        ratio = (1.0 - theta) * dist / gap**theta
        d = x - xbar
        records.append(SampleRecord(x, float(gap), float(dist), float(ratio), float(np.sqrt(d @ d))))
    return records, rejected


def estimate_modulus(query, budget=None):
    """Empirical KL modulus: (estimate, records).

    The estimate is the minimum ratio over the two innermost annuli
    containing valid samples, +inf when no sample anywhere has a
    positive gap below the level window.
    """
    if budget is None:
        budget = SampleBudget(radius_eps=query.radius_eps)
    f = query.function
    xbar = query.xbar.coords
    theta = query.theta
    nu = query.level_nu
    f_base = evaluate(f, xbar)

    margin_reject = None
    if isinstance(f, MaxOfSmooth):

        def margin_reject(x):
            return 10.0 * subdiff.activity_tolerance(evaluate(f, x))

    def one_level(level):
        return _sample_annulus(f, xbar, f_base, theta, nu, budget, level, margin_reject)

    per_level = run_ordered(one_level, range(budget.num_levels + 1))
    records = []
    for recs, _rej in per_level:
        records.extend(recs)

    populated = [k for k in range(budget.num_levels + 1) if per_level[k][0]]
    if not populated:
        return math.inf, records
    innermost = populated[-2:]
    estimate = math.inf
    for k in innermost:
        for rec in per_level[k][0]:
            if rec.ratio < estimate:
                estimate = rec.ratio
    return estimate, records


def estimate_exponent(f, xbar, budget=None, records=None, bins=50):
    """Log-log regression of the subgradient distance against the value
    gap over the lower envelope of the samples.

    Returns (theta_hat, r_squared).  If the KL inequality holds with a
    sharp exponent theta, the envelope slope estimates theta.
    """
    xbar = as_point(xbar).coords
    if records is None:
        from .model import KLQuery

        query = KLQuery(f, xbar)
        if budget is None:
            budget = SampleBudget()
        _, records = estimate_modulus(query, budget)
    f_base = evaluate(f, xbar)
    gap_floor = 1e-11 * (1.0 + abs(f_base))
    pts = [(math.log(r.gap), math.log(r.dist)) for r in records if r.gap > gap_floor and r.dist > 0.0]
    if len(pts) < 20:
        raise InsufficientSamples("only %d usable records" % len(pts))
    lo = min(p[0] for p in pts)
    hi = max(p[0] for p in pts)
    if hi - lo < 1e-9:
        raise InsufficientSamples("gap range too narrow for a regression")
    width = (hi - lo) / bins
    envelope = {}
    for lg, ld in pts:
        b = min(int((lg - lo) / width), bins - 1)
        if b not in envelope or ld < envelope[b][1]:
            envelope[b] = (lg, ld)
    sel = sorted(envelope.values())
    if len(sel) < 3:
        raise InsufficientSamples("only %d populated gap bins" % len(sel))
    xs = np.array([p[0] for p in sel])
    ys = np.array([p[1] for p in sel])
    xm = float(np.mean(xs))
    ym = float(np.mean(ys))
    sxx = float(np.sum((xs - xm) ** 2))
    sxy = float(np.sum((xs - xm) * (ys - ym)))
    slope = sxy / sxx
    fit = ym + slope * (xs - xm)
    ss_res = float(np.sum((ys - fit) ** 2))
    ss_tot = float(np.sum((ys - ym) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return slope, r2


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid for directional difference quotients: decreasing
    tau ladder, direction-ball radius delta with num_directions probe
    directions, and the RNG seed for the probes."""

    taus: tuple = tuple(0.1 * (0.01 ** (k / 9.0)) for k in range(10))
    delta: float = 1e-3
    num_directions: int = 8
    seed: int = 0

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus or any(t <= 0 for t in taus):
            raise EmptyBudget("tau grid must be positive")
        if any(t2 >= t1 for t1, t2 in zip(taus, taus[1:])):
            raise EmptyBudget("tau grid must decrease")
        object.__setattr__(self, "taus", taus)


@dataclass(frozen=True)
class SubderivativeEstimate:
    """Difference-quotient table for one direction.

    quotients[t, d] = (f(xbar + tau_t w_d) - f(xbar)) / ((1-theta) *
    tau_t^(1/(1-theta))) over probe directions w_d around w (the first
    probe is w itself).  liminf_estimate is the minimum over the two
    smallest taus, rescaled by homogeneity when the input direction was
    not unit length.
    """

    w: np.ndarray
    theta: float
    tau_grid: tuple
    quotients: np.ndarray
    liminf_estimate: float
    per_tau_min: tuple
    classification: str


def _classify_quotients(per_tau_min, estimate):
    if not math.isfinite(estimate) or estimate > CAP_INF:
        return CLASS_DIVERGENT
    finite = [m for m in per_tau_min if math.isfinite(m)]
    if len(finite) >= 4 and finite[-1] > 0:
        base = max(abs(finite[0]), TOL_POS)
        increasing = all(m2 > m1 for m1, m2 in zip(finite[-4:], finite[-3:]))
        if increasing and finite[-1] > 50.0 * base:
            return CLASS_DIVERGENT
    if estimate <= TOL_POS:
        return CLASS_NONPOSITIVE
    return CLASS_FINITE_POSITIVE


def estimate_theta_subderivative(f, xbar, w, theta, grid=None):
    """Estimate the 1/(1-theta)-order directional subderivative of f at
    xbar along w from difference quotients on a (tau, direction) grid.

    The direction is normalized first; the estimate is rescaled by
    ||w||^(1/(1-theta)) afterwards (the quotient limit is positively
    homogeneous of that degree).
    """
    if grid is None:
        grid = GridSpec()
    xbar = as_point(xbar).coords
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    scale = float(np.sqrt(w @ w))
    if scale <= 0:
        raise DomainError("direction must be nonzero")
    w_unit = w / scale
    n = xbar.shape[0]
    degree = 1.0 / (1.0 - theta)

    probes = [w_unit]
    for j in range(grid.num_directions):
        g = numerics.gaussians(grid.seed, (7 << 48) + j, 0, n)
        norm = float(np.sqrt(g @ g))
        if norm < 1e-12:
            continue
        u = numerics.uniforms(grid.seed, (7 << 48) + j, 2 * ((n + 1) // 2), 1)[0]
        radial = u ** (1.0 / n)
        probes.append(w_unit + grid.delta * radial * np.asarray(g) / norm)

    f_base = evaluate(f, xbar)
    quotients = np.empty((len(grid.taus), len(probes)))
    for t, tau in enumerate(grid.taus):
        denom = (1.0 - theta) * tau**degree
        for d, wp in enumerate(probes):
            quotients[t, d] = (evaluate(f, xbar + tau * wp) - f_base) / denom
    per_tau_min = tuple(float(np.min(quotients[t, :])) for t in range(len(grid.taus)))
    tail = per_tau_min[-2:] if len(per_tau_min) >= 2 else per_tau_min
    unit_estimate = min(tail)
    estimate = unit_estimate * scale**degree
    cls = _classify_quotients(per_tau_min, unit_estimate)
    return SubderivativeEstimate(
        w=np.array(w),
        theta=float(theta),
        tau_grid=grid.taus,
        quotients=quotients,
        liminf_estimate=float(estimate),
        per_tau_min=per_tau_min,
        classification=cls,
    )


def check_W_nonempty(f, xbar, theta, candidates, grid=None):
    """First candidate direction whose quotient estimate is finite and
    positive, as (direction, estimate); None when no witness is found
    (absence of evidence only)."""
    for w in candidates:
        est = estimate_theta_subderivative(f, xbar, w, theta, grid)
        if est.classification == CLASS_FINITE_POSITIVE:
            return np.asarray(w, dtype=np.float64), est.liminf_estimate
    return None


def records_to_csv_rows(records):
    """Fixed-layout CSV rows for a record list: header then one row per
    sample with 17-significant-digit floats."""
    rows = ["radius,gap,dist,ratio"]
    for r in records:
        rows.append(
            "%s,%s,%s,%s"
            % (
                format(r.radius, ".17g"),
                format(r.gap, ".17g"),
                format(r.dist, ".17g"),
                format(r.ratio, ".17g"),
            )
        )
    return rows
