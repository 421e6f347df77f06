"""Error norms, convergence rates and wave-field diagnostics.

All diagnostics operate on the spline representation of a computed field,
never on raw nodal samples: norms use per-element Gauss quadrature, crest
locations are refined on the spline itself, and the reflected-wave rule
integrates the spline over a superlevel set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ErrorTriple",
    "GaugeSeries",
    "ReflectionMetrics",
    "error_norms",
    "convergence_rates",
    "crest_metrics",
    "count_crests",
    "reflected_wave_metrics",
    "reflection_estimate",
    "greens_law",
    "shoaling_track",
    "conserved_mass",
    "runup_max",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ErrorTriple:
    """L2, max and H1-seminorm sizes of one error field."""

    L2: float
    Linf: float
    H1semi: float

    def __iter__(self):
        return iter((self.L2, self.Linf, self.H1semi))


@dataclass(frozen=True)
class GaugeSeries:
    """Time series of the surface elevation (and velocity) at one station."""

    x: float
    t: np.ndarray
    zeta: np.ndarray
    u: np.ndarray | None = None

    def __post_init__(self):
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("gauge sample times must be strictly increasing")


@dataclass(frozen=True)
class ReflectionMetrics:
    """Size measures of a reflected wave over a measurement window.

    ``amplitude`` is the refined crest height and ``mean_height`` the average
    of zeta over the superlevel set I = {x : zeta > theta * amplitude}, i.e.
    the level of the wave's plateau; ``support`` is the measure of I.  The
    ``wavelength`` is the width of the wave at the fraction ``width_theta``
    of the crest height (the measure of {x : zeta > width_theta * amplitude}).
    """

    amplitude: float
    wavelength: float
    mean_height: float
    support: float
    theta: float
    width_theta: float


def error_norms(space, coeffs, exact, dexact) -> ErrorTriple:
    """Distance of a spline field from a smooth reference.

    L2 and H1-seminorm by 5-point per-element Gauss quadrature; the max norm
    is the largest pointwise difference over those quadrature points.
    """
    tab = space.tables(5)
    diff = space.eval_at_tables(coeffs, tab, 0) - exact(tab.xq)
    ddiff = space.eval_at_tables(coeffs, tab, 1) - dexact(tab.xq)
    l2 = np.sqrt(np.sum(tab.wq * diff**2))
    h1 = np.sqrt(np.sum(tab.wq * ddiff**2))
    return ErrorTriple(L2=float(l2), Linf=float(np.max(np.abs(diff))), H1semi=float(h1))


def convergence_rates(errors):
    """Rate table from a doubling-N error sequence.

    ``errors`` is a list of (N, ErrorTriple); the rate column entries are
    log2 ratios of successive errors, absent (None) on the first row and
    wherever an error vanishes.
    """
    rows = []
    prev = None
    for n, triple in errors:
        row = {"N": n, "L2": triple.L2, "Linf": triple.Linf, "H1": triple.H1semi}
        for key in ("L2", "Linf", "H1"):
            rate = None
            if prev is not None and prev[key] > 0.0 and row[key] > 0.0:
                rate = np.log2(prev[key] / row[key])
            row[key + "_rate"] = rate
        rows.append(row)
        prev = row
    return rows


def _golden_max(f, lo, hi, iters=80):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    x = c if fc >= fd else d
    return x, f(x)


def crest_metrics(space, zc, window=None):
    """Refined maximum of the spline field and its location.

    A coarse scan over the 5-point quadrature grid brackets the crest; a
    golden-section search on the spline refines it.  Ties in the coarse scan
    resolve to the leftmost quadrature point, and the coarse point is kept
    whenever refinement fails to strictly improve on it (e.g. a flat state).
    """
    tab = space.tables(5)
    vals = space.eval_at_tables(zc, tab, 0)
    xq = tab.xq
    if window is not None:
        lo, hi = window
        masked = np.where((xq >= lo) & (xq <= hi), vals, -np.inf)
        if not np.any(np.isfinite(masked)):
            raise ValueError("measurement window contains no quadrature points")
    else:
        lo, hi = space.partition.a, space.partition.b
        masked = vals
    flat = int(np.argmax(masked))
    e, q = divmod(flat, tab.nq)
    x0, z0 = float(xq[e, q]), float(masked[e, q])

    h = space.partition.h
    bracket = (max(lo, x0 - h), min(hi, x0 + h))
    xs = np.linspace(bracket[0], bracket[1], 41)
    sub = space.eval(zc, xs)
    j = int(np.argmax(sub))
    a = xs[max(j - 1, 0)]
    b = xs[min(j + 1, xs.size - 1)]
    xr, zr = _golden_max(lambda x: float(space.eval(zc, np.array([x]))[0]), a, b)
    if zr > z0 or float(sub[j]) > z0:
        if float(sub[j]) > zr:
            xr, zr = float(xs[j]), float(sub[j])
        return zr, xr
    return z0, x0


def count_crests(space, zc, threshold_frac=0.25, samples_per_element=8):
    """Number of local maxima of the spline above a fraction of its peak."""
    part = space.partition
    xs = np.linspace(part.a, part.b, part.n_elements * samples_per_element + 1)
    vals = space.eval(zc, xs)
    level = threshold_frac * vals.max()
    interior = vals[1:-1]
    is_peak = (interior > vals[:-2]) & (interior >= vals[2:]) & (interior > level)
    return int(np.count_nonzero(is_peak))


def _superlevel_integrals(xs, vals, level):
    """Measure of {vals > level} and the integral of vals over it, with the
    crossing points placed by linear interpolation."""
    above = vals > level
    measure = 0.0
    integral = 0.0
    for i in range(xs.size - 1):
        x0, x1 = xs[i], xs[i + 1]
        v0, v1 = vals[i], vals[i + 1]
        if above[i] and above[i + 1]:
            measure += x1 - x0
            integral += 0.5 * (v0 + v1) * (x1 - x0)
        elif above[i] != above[i + 1]:
            xc = x0 + (level - v0) / (v1 - v0) * (x1 - x0)
            if above[i]:
                measure += xc - x0
                integral += 0.5 * (v0 + level) * (xc - x0)
            else:
                measure += x1 - xc
                integral += 0.5 * (level + v1) * (x1 - xc)
    return measure, integral


def reflected_wave_metrics(
    space, zc, window, theta=0.8, width_theta=0.5
) -> ReflectionMetrics:
    """Reflected-wave size over a window away from the main pulse.

    All quantities come from a dense 2001-point sample of the spline over
    the window, with crossing points placed by linear interpolation.  The
    plateau level is the mean of zeta over {zeta > theta * crest}; the
    length is the width of {zeta > width_theta * crest}, so a flat-topped
    wave of height H and length W reports mean height H and wavelength W.
    """
    amp, _ = crest_metrics(space, zc, window=window)
    lo, hi = window
    xs = np.linspace(lo, hi, 2001)
    vals = space.eval(zc, xs)
    level = theta * amp
    if not np.any(vals > level):
        raise ValueError("no samples above the threshold level in the window")
    measure, integral = _superlevel_integrals(xs, vals, level)
    width, _ = _superlevel_integrals(xs, vals, width_theta * amp)
    return ReflectionMetrics(
        amplitude=float(amp),
        wavelength=float(width),
        mean_height=float(integral / measure),
        support=float(measure),
        theta=float(theta),
        width_theta=float(width_theta),
    )


def reflection_estimate(alpha, a0):
    """Closed-form estimate of the amplitude reflected by a uniform slope."""
    if alpha <= 0 or a0 < 0:
        raise ValueError("slope must be positive and amplitude nonnegative")
    return 0.5 * alpha * np.sqrt(a0 / 3.0)


def greens_law(eta_b):
    """Linear-theory shoaling curve: amplitude growth factor at depth eta_b."""
    eta_b = np.asarray(eta_b, dtype=float)
    if np.any(eta_b <= 0):
        raise ValueError("depth must be positive")
    out = eta_b ** (-0.25)
    return float(out) if out.ndim == 0 else out


def shoaling_track(run, bathy, a0, stop_ratio, x_start):
    """Crest-amplitude curve against local depth from a recorded run.

    Consumes observer samples of the form (crest height, crest position,
    max of zeta/eta_b); the curve starts once the crest passes ``x_start``
    and ends at the first sample where the steepness ratio reaches
    ``stop_ratio``.  Returns (depths at crest, crest height / a0).
    """
    depths, amps = [], []
    for _, payload in run.observed:
        zmax, xcrest, ratio = payload
        if xcrest < x_start:
            continue
        if ratio >= stop_ratio:
            break
        depths.append(bathy.depth(xcrest))
        amps.append(zmax / a0)
    return np.array(depths), np.array(amps)


def conserved_mass(space, zc):
    """Integral of the spline field, exact via the basis integrals."""
    return float(space.basis_integrals() @ space.embed(zc))


def runup_max(run, wall_position):
    """Largest elevation recorded at the wall gauge over the whole run."""
    series = run.gauge(wall_position)
    return float(series.zeta.max())
