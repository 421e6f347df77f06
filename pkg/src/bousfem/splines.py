"""Clamped B-spline spaces on uniform partitions.

Provides the two finite element spaces used by the wave solvers: the full
spline space of order ``r`` and smoothness ``C^k`` on a uniform partition of
``[a, b]`` (clamped, i.e. open knot vector), and its subspace of splines
vanishing at both endpoints.  Basis functions are evaluated with the de Boor
recursion; per-element tables of basis values at Gauss points are cached for
fast assembly and field evaluation.

Conventions
-----------
Elements are the half-open intervals ``[x_i, x_{i+1})``; the last element is
closed.  Values of piecewise quantities at a breakpoint are therefore the
right-sided limits, except at ``b`` where the left limit is used.

With an open knot vector the first (last) basis function is the only one not
vanishing at ``a`` (``b``), and it takes the value 1 there, so the endpoint
values of a spline are its first and last coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Partition:
    """Uniform partition of ``[a, b]`` into ``n_elements`` cells."""

    a: float
    b: float
    n_elements: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        if self.n_elements < 1:
            raise ValueError("need at least one element")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_elements

    @property
    def breakpoints(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_elements + 1)

    def element_of(self, x):
        """Element index for each point, half-open convention."""
        e = np.floor((np.asarray(x, dtype=float) - self.a) / self.h).astype(int)
        return np.clip(e, 0, self.n_elements - 1)


@lru_cache(maxsize=None)
def gauss_rule(n: int):
    """n-point Gauss-Legendre rule on the reference element [0, 1].

    Returns ``(points, weights)`` with positive weights summing to 1.
    Exact for polynomials of degree <= 2n - 1.
    """
    if n < 1:
        raise ValueError("quadrature order must be >= 1")
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (t + 1.0), 0.5 * w


@dataclass(frozen=True)
class BasisTables:
    """Per-element basis data at mapped quadrature points.

    ``xq`` and ``wq`` have shape (n_elements, nq); ``vals[d]`` has shape
    (n_elements, nq, r) and holds the d-th derivative of the r local basis
    functions.  ``conn[e, j] = e*step + j`` is the global index of local
    function j on element e.
    """

    xq: np.ndarray
    wq: np.ndarray
    vals: tuple
    step: int

    @property
    def nq(self) -> int:
        return self.xq.shape[1]


class SplineSpace:
    """Space of C^k splines of order r (degree r-1) on a uniform partition.

    Parameters
    ----------
    partition : Partition
    order : int
        Spline order r; piecewise polynomials of degree r - 1.  Cubic
        splines are ``order=4``.
    smoothness : int, optional
        Global continuity class k, ``0 <= k <= r - 2``.  Defaults to the
        maximal ``r - 2``.
    bc : str
        ``"free"`` for the full space, ``"zero"`` for the subspace with
        zero endpoint values (first and last basis functions dropped).
    """

    def __init__(self, partition: Partition, order: int = 4,
                 smoothness: int | None = None, bc: str = "free"):
        if order < 2:
            raise ValueError("order must be >= 2")
        if smoothness is None:
            smoothness = order - 2
        if not 0 <= smoothness <= order - 2:
            raise ValueError(f"smoothness {smoothness} out of range for order {order}")
        if bc not in ("free", "zero"):
            raise ValueError(f"unknown bc {bc!r}")
        self.partition = partition
        self.order = order
        self.degree = order - 1
        self.smoothness = smoothness
        self.bc = bc
        # interior knot multiplicity; local-to-global index stride per element
        self.step = self.degree - smoothness

        p, N = self.degree, partition.n_elements
        interior = np.repeat(partition.breakpoints[1:-1], self.step)
        self.knots = np.concatenate([
            np.full(p + 1, partition.a), interior, np.full(p + 1, partition.b)])
        self.free_dim = len(self.knots) - p - 1
        self._tables: dict = {}

    @property
    def dim(self) -> int:
        return self.free_dim - 2 if self.bc == "zero" else self.free_dim

    def __repr__(self):
        part = self.partition
        return (f"SplineSpace(order={self.order}, C^{self.smoothness}, "
                f"N={part.n_elements}, [{part.a}, {part.b}], bc={self.bc!r}, "
                f"dim={self.dim})")

    # -- coefficient embedding for the zero-endpoint subspace ---------------

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients of this space written in the free space basis."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim} coefficients, got {coeffs.shape[-1]}")
        if self.bc == "free":
            return coeffs
        out = np.zeros(coeffs.shape[:-1] + (self.free_dim,))
        out[..., 1:-1] = coeffs
        return out

    def restrict(self, free_coeffs: np.ndarray) -> np.ndarray:
        """Drop the endpoint coefficients (inverse of embed up to the bc)."""
        if self.bc == "free":
            return free_coeffs
        return free_coeffs[..., 1:-1]

    # -- basis evaluation ---------------------------------------------------

    def basis_all_ders(self, x, nders: int = 2):
        """Nonzero basis functions and derivatives at the given points.

        Returns ``(elements, ders)`` where ``elements`` has shape (npts,)
        and ``ders`` has shape (npts, nders + 1, r):  ``ders[m, d, j]`` is
        the d-th derivative of basis function ``conn[e_m, j]`` at ``x_m``.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        p = self.degree
        elems = self.partition.element_of(x)
        spans = p + elems * self.step
        ders = _deboor_all_ders(self.knots, p, x, spans, nders)
        return elems, ders

    def global_indices(self, elements) -> np.ndarray:
        """Global indices (free numbering) of the r local functions."""
        return elements[..., None] * self.step + np.arange(self.order)

    def eval(self, coeffs, x, der: int = 0):
        """Evaluate the spline (or a derivative) at arbitrary points."""
        cfree = self.embed(np.asarray(coeffs, dtype=float))
        xarr = np.asarray(x, dtype=float)
        elems, ders = self.basis_all_ders(xarr, nders=der)
        idx = self.global_indices(elems)
        out = np.einsum("mj,mj->m", ders[:, der, :], cfree[idx])
        return out[0] if xarr.ndim == 0 else out.reshape(xarr.shape)

    # -- cached element tables ---------------------------------------------

    def tables(self, quad: int, nders: int = 2) -> BasisTables:
        """Per-element basis/quadrature tables for an n-point Gauss rule."""
        key = (quad, nders)
        if key not in self._tables:
            part = self.partition
            tq, wq_ref = gauss_rule(quad)
            left = part.breakpoints[:-1]
            xq = left[:, None] + part.h * tq[None, :]
            wq = np.broadcast_to(part.h * wq_ref, xq.shape).copy()
            elems = np.repeat(np.arange(part.n_elements), quad)
            spans = self.degree + elems * self.step
            ders = _deboor_all_ders(self.knots, self.degree, xq.ravel(), spans, nders)
            vals = tuple(
                ders[:, d, :].reshape(part.n_elements, quad, self.order)
                for d in range(nders + 1))
            self._tables[key] = BasisTables(xq=xq, wq=wq, vals=vals, step=self.step)
        return self._tables[key]

    def coeff_windows(self, free_coeffs: np.ndarray) -> np.ndarray:
        """View of shape (n_elements, r): coefficients active on each element."""
        w = np.lib.stride_tricks.sliding_window_view(free_coeffs, self.order)
        return w[:: self.step]

    def eval_at_tables(self, free_coeffs: np.ndarray, tables: BasisTables,
                       der: int = 0) -> np.ndarray:
        """Field values at the table's quadrature points, shape (nel, nq)."""
        win = self.coeff_windows(free_coeffs)
        return np.einsum("eqj,ej->eq", tables.vals[der], win)

    def scatter(self, contrib: np.ndarray) -> np.ndarray:
        """Accumulate per-element, per-local-function values into a global vector.

        ``contrib`` has shape (n_elements, r); entry (e, j) is added to global
        index ``e*step + j``.
        """
        nel = self.partition.n_elements
        out = np.zeros(self.free_dim)
        for j in range(self.order):
            out[j:: self.step][:nel] += contrib[:, j]
        return out

    # -- misc ---------------------------------------------------------------

    def basis_integrals(self) -> np.ndarray:
        """Exact integrals of the free basis functions: (t_{i+r} - t_i)/r."""
        r = self.order
        return (self.knots[r:] - self.knots[:-r]) / r

    def greville(self) -> np.ndarray:
        """Greville abscissae (knot averages) of the free basis."""
        p = self.degree
        win = np.lib.stride_tricks.sliding_window_view(self.knots[1:-1], p)
        return win.mean(axis=1)


def _deboor_all_ders(knots, p, x, spans, nders):
    """de Boor basis values and derivatives, vectorized over points.

    ``x`` is flat of length m, ``spans[i]`` is the knot span of ``x[i]``.
    Returns array of shape (m, nders + 1, p + 1).
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    nd = min(nders, p)

    # Triangular table of the nonzero basis functions of degrees 0..p,
    # plus the left/right knot differences needed for the derivative pass.
    ndu = np.zeros((m, p + 1, p + 1))
    ndu[:, 0, 0] = 1.0
    left = np.zeros((m, p + 1))
    right = np.zeros((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = x - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - x
        saved = np.zeros(m)
        for rr in range(j):
            ndu[:, j, rr] = right[:, rr + 1] + left[:, j - rr]
            with np.errstate(divide="ignore", invalid="ignore"):
                temp = np.where(ndu[:, j, rr] != 0.0,
                                ndu[:, rr, j - 1] / ndu[:, j, rr], 0.0)
            ndu[:, rr, j] = saved + right[:, rr + 1] * temp
            saved = left[:, j - rr] * temp
        ndu[:, j, j] = saved

    ders = np.zeros((m, nders + 1, p + 1))
    ders[:, 0, :] = ndu[:, :, p]

    # Derivative recursion (band of alternating difference quotients).
    a = np.zeros((m, 2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[:, 0, :] = 0.0
        a[:, 0, 0] = 1.0
        for kk in range(1, nd + 1):
            d = np.zeros(m)
            rk = r - kk
            pk = p - kk
            if r >= kk:
                with np.errstate(divide="ignore", invalid="ignore"):
                    a[:, s2, 0] = np.where(ndu[:, pk + 1, rk] != 0.0,
                                           a[:, s1, 0] / ndu[:, pk + 1, rk], 0.0)
                d = a[:, s2, 0] * ndu[:, rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = kk - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                with np.errstate(divide="ignore", invalid="ignore"):
                    a[:, s2, j] = np.where(
                        ndu[:, pk + 1, rk + j] != 0.0,
                        (a[:, s1, j] - a[:, s1, j - 1]) / ndu[:, pk + 1, rk + j],
                        0.0)
                d = d + a[:, s2, j] * ndu[:, rk + j, pk]
            if r <= pk:
                with np.errstate(divide="ignore", invalid="ignore"):
                    a[:, s2, kk] = np.where(ndu[:, pk + 1, r] != 0.0,
                                            -a[:, s1, kk - 1] / ndu[:, pk + 1, r],
                                            0.0)
                d = d + a[:, s2, kk] * ndu[:, r, pk]
            ders[:, kk, r] = d
            s1, s2 = s2, s1

    fac = float(p)
    for kk in range(1, nd + 1):
        ders[:, kk, :] *= fac
        fac *= p - kk
    return ders
