"""Closed-form bottom profiles and the undisturbed water depth.

A profile is a chain of analytic pieces (constant, linear, or a half-cosine
bridge) covering an interval ``[x_lo, x_hi]``.  The primary evaluators return
the undisturbed depth ``eta_b`` and its first two derivatives; the scaled
bottom excursion ``b`` with ``eta_b = 1 - beta*b`` is available for profiles
that are naturally parameterized that way.  At a breakpoint the evaluators
return the right-limit, matching the half-open element convention of
:mod:`bousfem.splines`.

Depth must stay positive: construction rejects profiles that touch zero
anywhere except exactly at a domain endpoint (a beach shoreline).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Bathymetry",
    "make_profile",
    "eval_depth",
    "flat",
    "uniform_slope",
    "shelf_ramp",
    "sine_bed",
    "sine_shelf",
    "beach_wall",
    "hump",
    "depression_step",
]

_ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class _Piece:
    """One analytic span ``[x_lo, x_hi)`` of the depth function."""

    x_lo: float
    x_hi: float
    kind: str  # "const" | "linear" | "bridge" | "sine"
    d0: float  # depth at x_lo (sine: base level)
    d1: float  # depth at x_hi (sine: oscillation amplitude)
    freq: float = 0.0  # angular frequency, "sine" pieces only

    def depth(self, x: np.ndarray, der: int = 0) -> np.ndarray:
        w = self.x_hi - self.x_lo
        if self.kind == "const":
            return np.full_like(x, self.d0 if der == 0 else 0.0)
        if self.kind == "linear":
            s = (self.d1 - self.d0) / w
            if der == 0:
                return self.d0 + s * (x - self.x_lo)
            return np.full_like(x, s if der == 1 else 0.0)
        if self.kind == "sine":
            # d0 - d1*sin(freq*(x - x_lo))
            t = self.freq * (x - self.x_lo)
            if der == 0:
                return self.d0 - self.d1 * np.sin(t)
            if der == 1:
                return -self.d1 * self.freq * np.cos(t)
            return self.d1 * self.freq**2 * np.sin(t)
        # Half-cosine bridge: d0 + (d1-d0)*(1 - cos(pi*s))/2 with s in [0,1].
        # C^1 at both ends (zero slope), second derivative jumps there.
        t = np.pi * (x - self.x_lo) / w
        amp = 0.5 * (self.d1 - self.d0)
        if der == 0:
            return self.d0 + amp * (1.0 - np.cos(t))
        if der == 1:
            return amp * (np.pi / w) * np.sin(t)
        return amp * (np.pi / w) ** 2 * np.cos(t)


@dataclass(frozen=True)
class Bathymetry:
    """Piecewise-analytic depth profile on ``[x_lo, x_hi]``.

    ``breakpoints`` lists the interior piece joins; ``smooth_joins`` is the
    subset where the profile is C^1 (bridge-smoothed), the rest are genuine
    slope corners.  ``beta`` and the ``bottom*`` evaluators expose the scaled
    form ``eta_b = 1 - beta*b``; profiles defined directly through the depth
    use ``beta = 1``.
    """

    kind: str
    params: dict
    pieces: tuple
    beta: float = 1.0
    _edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.array([p.x_lo for p in self.pieces[1:]])
        object.__setattr__(self, "_edges", edges)
        self._validate_positive()

    # -- geometry ---------------------------------------------------------

    @property
    def x_lo(self) -> float:
        return self.pieces[0].x_lo

    @property
    def x_hi(self) -> float:
        return self.pieces[-1].x_hi

    @property
    def breakpoints(self) -> tuple:
        return tuple(self._edges)

    @property
    def smooth_joins(self) -> tuple:
        """Interior joins at which the depth is C^1."""
        out = []
        for xb, left, right in zip(self._edges, self.pieces[:-1], self.pieces[1:]):
            sl = float(left.depth(np.array([xb]), 1)[0])
            sr = float(right.depth(np.array([xb]), 1)[0])
            if abs(sl - sr) < 1e-12:
                out.append(xb)
        return tuple(out)

    @property
    def is_flat(self) -> bool:
        return all(p.kind == "const" and p.d0 == self.pieces[0].d0 for p in self.pieces)

    def edge_piece(self, side: str) -> _Piece:
        """The piece adjacent to the Left or Right domain endpoint."""
        return self.pieces[0] if side == "Left" else self.pieces[-1]

    # -- evaluation -------------------------------------------------------

    def _eval(self, x, der: int):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        flat_x = xa.ravel()
        idx = np.searchsorted(self._edges, flat_x, side="right")
        out = np.empty_like(flat_x)
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = piece.depth(flat_x[sel], der)
        out = out.reshape(xa.shape)
        if np.ndim(x) == 0:
            return float(out[()])
        return out

    def depth(self, x):
        """Undisturbed depth eta_b(x); right-limit at breakpoints."""
        return self._eval(x, 0)

    def depth_x(self, x):
        return self._eval(x, 1)

    def depth_xx(self, x):
        return self._eval(x, 2)

    def bottom(self, x):
        """Scaled bottom excursion b(x) with eta_b = 1 - beta*b."""
        if self.beta == 0.0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return (1.0 - self.depth(x)) / self.beta

    def bottom_x(self, x):
        if self.beta == 0.0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return -self.depth_x(x) / self.beta

    def bottom_xx(self, x):
        if self.beta == 0.0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return -self.depth_xx(x) / self.beta

    def sample_pieces(self, n: int = 2001):
        """Closed per-piece sampling exposing one-sided limits at the joins.

        Returns ``(xs, depth, depth_xx)`` with roughly ``n`` points spread
        over the pieces in proportion to their length.
        """
        total = self.x_hi - self.x_lo
        xs, d0, d2 = [], [], []
        for piece in self.pieces:
            m = max(8, int(round(n * (piece.x_hi - piece.x_lo) / total)))
            xp = np.linspace(piece.x_lo, piece.x_hi, m)
            xs.append(xp)
            d0.append(piece.depth(xp, 0))
            d2.append(piece.depth(xp, 2))
        return np.concatenate(xs), np.concatenate(d0), np.concatenate(d2)

    # -- validation -------------------------------------------------------

    def _validate_positive(self):
        xs, d, _ = self.sample_pieces(4001)
        bad = d < -_ENDPOINT_TOL
        interior = (np.abs(xs - self.x_lo) > _ENDPOINT_TOL) & (
            np.abs(xs - self.x_hi) > _ENDPOINT_TOL
        )
        bad |= (d < _ENDPOINT_TOL) & interior
        if np.any(bad):
            j = int(np.argmin(d))
            raise ValueError(
                f"depth must stay positive: {self.kind} profile reaches "
                f"eta_b={d[j]:.3e} at x={xs[j]:.6g}"
            )


def _chain(kind: str, params: dict, pieces, beta: float = 1.0) -> Bathymetry:
    return Bathymetry(kind=kind, params=dict(params), pieces=tuple(pieces), beta=beta)


# -- named constructors ---------------------------------------------------


def flat(x_lo: float = 0.0, x_hi: float = 1.0, depth: float = 1.0) -> Bathymetry:
    """Horizontal bottom of constant depth."""
    return _chain(
        "Flat",
        {"x_lo": x_lo, "x_hi": x_hi, "depth": depth},
        [_Piece(x_lo, x_hi, "const", depth, depth)],
        beta=0.0,
    )


def uniform_slope(alpha: float, x_hi: float) -> Bathymetry:
    """Plane beach eta_b = alpha*x on [0, x_hi]; shoreline at the origin."""
    if alpha <= 0:
        raise ValueError("slope alpha must be positive")
    return _chain(
        "UniformSlope",
        {"alpha": alpha, "x_hi": x_hi},
        [_Piece(0.0, x_hi, "linear", 0.0, alpha * x_hi)],
    )


def shelf_ramp(
    x_B: float, alpha: float, h1: float, x_lo: float = 0.0, x_hi: float = 150.0
) -> Bathymetry:
    """Depth 1, then a linear ramp of slope alpha up to a shelf of depth h1.

    The ramp spans ``[x_B, x_B + (1-h1)/alpha]``; both corners are genuine
    slope discontinuities.
    """
    if not 0.0 < h1 < 1.0:
        raise ValueError("shelf depth h1 must lie in (0, 1)")
    x_top = x_B + (1.0 - h1) / alpha
    if not x_lo < x_B < x_top < x_hi:
        raise ValueError("ramp does not fit inside the domain")
    return _chain(
        "ShelfRamp",
        {"x_B": x_B, "alpha": alpha, "h1": h1, "x_lo": x_lo, "x_hi": x_hi},
        [
            _Piece(x_lo, x_B, "const", 1.0, 1.0),
            _Piece(x_B, x_top, "linear", 1.0, h1),
            _Piece(x_top, x_hi, "const", h1, h1),
        ],
    )


def sine_bed(beta: float, x_lo: float = 0.0, x_hi: float = 1.0) -> Bathymetry:
    """Smooth oscillatory bed eta_b = 1 - beta*sin(pi*(x - x_lo))."""
    if beta == 0.0:
        return flat(x_lo, x_hi)
    return _chain(
        "SineBed",
        {"beta": beta, "x_lo": x_lo, "x_hi": x_hi},
        [_Piece(x_lo, x_hi, "sine", 1.0, beta, np.pi)],
        beta=beta,
    )


def sine_shelf(L: float, beta: float, x_lo: float = 0.0, x_hi: float = 140.0) -> Bathymetry:
    """C^1 shelf: b bridges 0 to 1 over [L - 3/2, L + 3/2], eta_b = 1 - beta*b."""
    if not x_lo < L - 1.5 < L + 1.5 < x_hi:
        raise ValueError("bridge does not fit inside the domain")
    return _chain(
        "SineShelf",
        {"L": L, "beta": beta, "x_lo": x_lo, "x_hi": x_hi},
        [
            _Piece(x_lo, L - 1.5, "const", 1.0, 1.0),
            _Piece(L - 1.5, L + 1.5, "bridge", 1.0, 1.0 - beta),
            _Piece(L + 1.5, x_hi, "const", 1.0 - beta, 1.0 - beta),
        ],
        beta=beta,
    )


def beach_wall(x_B: float = 50.0, slope: float = 0.02, h0: float = 0.7) -> Bathymetry:
    """Wall-terminated channel of the dimensional runup study, nondimensionalized.

    Dimensional geometry: horizontal bottom of depth ``h0`` meters out to
    ``x_B`` meters, then an upslope of the given grade to a vertical wall at
    ``x = 70`` m.  Lengths are rescaled by ``h0`` so the horizontal part has
    depth 1; the wall depth follows from the geometry.
    """
    wall = 70.0
    d_wall = (h0 - slope * (wall - x_B)) / h0
    if d_wall <= 0:
        raise ValueError("slope reaches the surface before the wall")
    return _chain(
        "BeachWall",
        {"x_B": x_B, "slope": slope, "h0": h0},
        [
            _Piece(0.0, x_B / h0, "const", 1.0, 1.0),
            _Piece(x_B / h0, wall / h0, "linear", 1.0, d_wall),
        ],
    )


def hump(
    x_B: float = 60.0,
    width: float = 10.0,
    plateau: float = 10.0,
    d_top: float = 0.5,
    x_lo: float = 0.0,
    x_hi: float = 150.0,
) -> Bathymetry:
    """Raised obstacle: depth 1 -> d_top -> 1 with bridge-smoothed flanks."""
    x1, x2, x3 = x_B + width, x_B + width + plateau, x_B + 2 * width + plateau
    if not x_lo < x_B < x3 < x_hi:
        raise ValueError("hump does not fit inside the domain")
    return _chain(
        "Hump",
        {"x_B": x_B, "width": width, "plateau": plateau, "d_top": d_top},
        [
            _Piece(x_lo, x_B, "const", 1.0, 1.0),
            _Piece(x_B, x1, "bridge", 1.0, d_top),
            _Piece(x1, x2, "const", d_top, d_top),
            _Piece(x2, x3, "bridge", d_top, 1.0),
            _Piece(x3, x_hi, "const", 1.0, 1.0),
        ],
    )


def depression_step(
    x_B: float = 60.0,
    width: float = 10.0,
    d_deep: float = 1.5,
    x_lo: float = 0.0,
    x_hi: float = 150.0,
) -> Bathymetry:
    """Bottom drops to deeper water (depth 1 -> d_deep) over one smooth bridge."""
    if not x_lo < x_B < x_B + width < x_hi:
        raise ValueError("step does not fit inside the domain")
    return _chain(
        "DepressionStep",
        {"x_B": x_B, "width": width, "d_deep": d_deep},
        [
            _Piece(x_lo, x_B, "const", 1.0, 1.0),
            _Piece(x_B, x_B + width, "bridge", 1.0, d_deep),
            _Piece(x_B + width, x_hi, "const", d_deep, d_deep),
        ],
    )


_KINDS: dict[str, Callable] = {
    "Flat": flat,
    "UniformSlope": uniform_slope,
    "ShelfRamp": shelf_ramp,
    "SineBed": sine_bed,
    "SineShelf": sine_shelf,
    "BeachWall": beach_wall,
    "Hump": hump,
    "DepressionStep": depression_step,
}


def make_profile(kind: str, **params) -> Bathymetry:
    """Build a profile by kind name; see the named constructors for parameters."""
    try:
        ctor = _KINDS[kind]
    except KeyError:
        known = ", ".join(sorted(_KINDS))
        raise ValueError(f"unknown bathymetry kind {kind!r} (known: {known})") from None
    return ctor(**params)


def profile_kinds() -> tuple:
    """Registered profile names, alphabetically."""
    return tuple(sorted(_KINDS))


def profile_constructor(kind: str) -> Callable:
    """The named constructor behind a registered profile kind."""
    return _KINDS[kind]


def eval_depth(bathy: Bathymetry, x, deriv: int = 0):
    """Evaluate eta_b or one of its first two derivatives."""
    if deriv == 0:
        return bathy.depth(x)
    if deriv == 1:
        return bathy.depth_x(x)
    if deriv == 2:
        return bathy.depth_xx(x)
    raise ValueError("deriv must be 0, 1 or 2")
