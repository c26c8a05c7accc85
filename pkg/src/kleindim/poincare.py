"""Truncated orbital series, counting functions, and exponent estimators.

The series term for an orbit point w is ((1-|w|)/(1+|w|))^s, the radial
form of exp(-s * distance from the ball center).  Shell partial sums group
the terms by the dyadic shell of 1-|w|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InsufficientDataError, UsageError
from .geometry import apply_interior_radial, hyperbolic_distance, translation_to_origin
from .group import enumerate_orbit

_LN2 = math.log(2.0)


@dataclass
class SeriesEvaluation:
    """Value and per-shell breakdown of a truncated orbital series."""

    s: float
    truncation_word_length: int
    value: float
    shell_partials: list  # (shell index, partial sum), ascending shells
    unshelled: float      # terms of elements with no shell index

    def partial_for(self, k):
        for kk, v in self.shell_partials:
            if kk == k:
                return v
        return 0.0


def _series_terms(orbit, s, reference=None):
    """Per-element series terms, optionally referenced to a point z'.

    With no reference the radial form uses the stored stable gaps.  With a
    reference point the orbit is pushed through the isometry sending the
    reference to the ball center first, so the terms equal
    exp(-s * d(z', g(z))) without touching the distance formula.
    """
    if reference is None:
        gaps = orbit.gaps
        return (gaps / (2.0 - gaps)) ** s
    mover = translation_to_origin(reference)
    terms = np.empty(len(orbit))
    for i, el in enumerate(orbit.elements):
        pt, one_minus_sq = apply_interior_radial(mover, el.orbit_point)
        gap = one_minus_sq / (1.0 + pt.norm)
        terms[i] = (gap / (2.0 - gap)) ** s
    return terms


def truncated_series(orbit, s, reference=None):
    """Exact truncated series over the enumerated elements.

    Parameters
    ----------
    orbit : OrbitSet
    s : exponent, s >= 0.
    reference : optional InteriorPoint; default is the ball center.

    Returns
    -------
    SeriesEvaluation whose value equals the sum of the shell partial sums
    plus the unshelled remainder (elements whose orbit point is the ball
    center itself).
    """
    s = float(s)
    if s < 0.0:
        raise UsageError(f"series exponent must be nonnegative, got {s}")
    terms = _series_terms(orbit, s, reference)
    shells = orbit.shells
    partials = []
    for k in np.unique(shells[shells > 0]):
        partials.append((int(k), float(terms[shells == k].sum())))
    unshelled = float(terms[shells == 0].sum())
    return SeriesEvaluation(
        s=s,
        truncation_word_length=orbit.max_word_length,
        value=float(terms.sum()),
        shell_partials=partials,
        unshelled=unshelled,
    )


@dataclass
class CountingFunction:
    """N(T) = number of enumerated g with d(z, g(z)) <= T, on a uniform grid."""

    bin_width: float
    counts: list  # (T, N(T)) pairs, T = i * bin_width

    def thresholds(self):
        return np.array([t for t, _ in self.counts])

    def values(self):
        return np.array([n for _, n in self.counts])


def counting_function(orbit, bin_width=0.5):
    """Orbital counting function on bins of the displacement range."""
    bin_width = float(bin_width)
    if bin_width <= 0.0:
        raise UsageError("bin width must be positive")
    disp = np.sort(orbit.displacements)
    t_max = float(disp[-1])
    n_bins = int(math.ceil(t_max / bin_width))
    counts = []
    for i in range(n_bins + 1):
        t = i * bin_width
        counts.append((t, int(np.searchsorted(disp, t, side="right"))))
    return CountingFunction(bin_width=bin_width, counts=counts)


@dataclass
class ExponentEstimate:
    """A growth-exponent estimate with its fit window and diagnostics."""

    delta_est: float
    fit_window: tuple
    slope_stderr: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def _clamp_delta(value, model, diagnostics):
    cap = model - 0.5
    if value < 0.0:
        diagnostics["clamped"] = "below zero"
        return 0.0
    if value > cap:
        diagnostics["clamped"] = f"above sanity cap {cap}"
        return cap
    return value


def _counting_fit(orbit, bin_width):
    cf = counting_function(orbit, bin_width)
    t_max = float(orbit.displacements.max())
    lo, hi = 0.2 * t_max, 0.8 * t_max
    ts, ns = cf.thresholds(), cf.values()
    mask = (ts >= lo) & (ts <= hi) & (ns > 0)
    if int(mask.sum()) < 5:
        raise InsufficientDataError(
            f"counting fit window [{lo:.3g}, {hi:.3g}] holds {int(mask.sum())} bins; need 5"
        )
    fit = stats.linregress(ts[mask], np.log(ns[mask]))
    diagnostics = {
        "t_max": t_max,
        "bins_used": int(mask.sum()),
        "r_value": float(fit.rvalue),
        "intercept": float(fit.intercept),
    }
    delta = _clamp_delta(float(fit.slope), orbit.model, diagnostics)
    return ExponentEstimate(
        delta_est=delta,
        fit_window=(lo, hi),
        slope_stderr=float(fit.stderr),
        method="counting_fit",
        diagnostics=diagnostics,
    )


def _available_shells(orbit, diagnostics):
    """Nonempty shells untouched by the enumeration horizon.

    Elements at the final word length mark the horizon: shells dyadically
    deeper than the shallowest of them are incompletely enumerated and
    would masquerade as convergence.
    """
    counts = orbit.shell_counts()
    if not counts:
        raise InsufficientDataError("orbit has no shelled elements")
    all_ks = sorted(counts)
    at_horizon = orbit.word_lengths == orbit.max_word_length
    if np.any(at_horizon):
        gap_horizon = float(orbit.gaps[at_horizon].max())
        d_horizon = math.log((2.0 - gap_horizon) / gap_horizon)
        k_cut = int(math.floor(d_horizon / _LN2)) - 1
        ks = [k for k in all_ks if k <= k_cut]
        if len(ks) >= 5:
            diagnostics["horizon_shell_cut"] = k_cut
            return ks
        diagnostics["horizon_fallback"] = True
    if len(all_ks) < 5:
        raise InsufficientDataError(f"{len(all_ks)} nonempty shells; need 5")
    return all_ks


def _diverges(orbit, s, shells_ks):
    gaps = orbit.gaps
    partials = []
    terms = (gaps / (2.0 - gaps)) ** s
    for k in shells_ks:
        partials.append(float(terms[orbit.shells == k].sum()))
    # Equal-length windows: comparing windows of different sizes would bias
    # the ratio by the count difference alone.
    w = max(1, len(partials) // 3)
    middle = partials[-2 * w: -w]
    last = partials[-w:]
    return (sum(last) / sum(middle)) > 1.05


def _divergence_scan(orbit):
    diagnostics = {}
    ks = _available_shells(orbit, diagnostics)
    diagnostics["shells_used"] = (ks[0], ks[-1])
    lo, hi = 0.0, float(orbit.model)
    if not _diverges(orbit, lo, ks):
        return ExponentEstimate(
            delta_est=0.0,
            fit_window=(0.0, 0.02),
            slope_stderr=0.01,
            method="divergence_scan",
            diagnostics={**diagnostics, "converges_at_zero": True},
        )
    while hi - lo > 0.02:
        mid = 0.5 * (lo + hi)
        if _diverges(orbit, mid, ks):
            lo = mid
        else:
            hi = mid
    delta = _clamp_delta(0.5 * (lo + hi), orbit.model, diagnostics)
    return ExponentEstimate(
        delta_est=delta,
        fit_window=(lo, hi),
        slope_stderr=0.5 * (hi - lo),
        method="divergence_scan",
        diagnostics=diagnostics,
    )


def exponent_estimate(orbit, method="counting_fit", bin_width=0.5):
    """Estimate the series' critical exponent from one enumerated orbit.

    method "counting_fit": least-squares slope of log N(T) over the middle
    of the displacement range (the top 20% is dropped as horizon-starved).
    method "divergence_scan": bisection on s, classifying divergence by the
    growth of shell partial sums (last third vs middle third > 1.05).
    """
    if method == "counting_fit":
        return _counting_fit(orbit, bin_width)
    if method == "divergence_scan":
        return _divergence_scan(orbit)
    raise UsageError(f"unknown exponent method {method!r}")


@dataclass
class BasepointIndependenceReport:
    """Exponent estimates from two basepoints plus the termwise ratio bound.

    The triangle inequality forces every term ratio
    exp(-d(0, g z1)) / exp(-d(0, g z2)) into [exp(-d12), exp(+d12)] where
    d12 = d(z1, z2); within_bounds records that check across all elements
    enumerated from both basepoints.
    """

    estimate_1: ExponentEstimate
    estimate_2: ExponentEstimate
    estimate_gap: float
    separation: float
    ratio_low: float
    ratio_high: float
    within_bounds: bool
    n_elements: int


def basepoint_independence_check(presentation, z1, z2, depth, method="counting_fit"):
    """Run the exponent pipeline from two basepoints and compare.

    Enumerates the group twice (dedup is matrix-level, so the element sets
    coincide), estimates the exponent from each orbit, and checks the
    termwise triangle-inequality ratio bound element by element.
    """
    orbit1 = enumerate_orbit(presentation, z1, depth)
    orbit2 = enumerate_orbit(presentation, z2, depth)
    est1 = exponent_estimate(orbit1, method)
    est2 = exponent_estimate(orbit2, method)

    words1 = {el.word: i for i, el in enumerate(orbit1.elements)}
    common = [(i, j) for j, el in enumerate(orbit2.elements)
              if (i := words1.get(el.word)) is not None]
    if not common:
        raise UsageError("enumerations share no words; inconsistent inputs")
    idx1 = np.array([i for i, _ in common])
    idx2 = np.array([j for _, j in common])
    # exp(-d(0, w)) = gap / (2 - gap) in the radial form
    r1 = orbit1.gaps[idx1] / (2.0 - orbit1.gaps[idx1])
    r2 = orbit2.gaps[idx2] / (2.0 - orbit2.gaps[idx2])
    ratios = r1 / r2
    separation = hyperbolic_distance(z1, z2)
    bound = math.exp(separation)
    slack = 1.0 + 1e-12
    within = bool(np.all(ratios <= bound * slack) and np.all(ratios >= 1.0 / (bound * slack)))
    return BasepointIndependenceReport(
        estimate_1=est1,
        estimate_2=est2,
        estimate_gap=abs(est1.delta_est - est2.delta_est),
        separation=separation,
        ratio_low=float(ratios.min()),
        ratio_high=float(ratios.max()),
        within_bounds=within,
        n_elements=len(common),
    )
