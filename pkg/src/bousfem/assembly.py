"""Banded assembly of spline Galerkin forms and projections.

All system matrices arising here are symmetric positive definite with
half-bandwidth ``r - 1`` (maximal-smoothness splines), so they are stored in
the upper-banded layout used by :func:`scipy.linalg.cholesky_banded` and
factored without pivoting; a failed factorization is how loss of positive
definiteness (e.g. a coercivity violation) surfaces.

The weighted forms are

* ``gram``:      (w v, w')           with w >= 0,
* ``a``-form:    (v, w') + mu/3 (v', w''),
* ``A``-form:    ((eta_b - mu/2 eta_b^2 eta_b'') v, w') + mu/3 (eta_b^3 v', w''),

the latter two being the u-part mass operators of the weak and strong
variable-bottom systems.  Quadrature is n-point Gauss per element (default 3,
matching the flux assembly used in the time stepping; configurable where
higher exactness is wanted).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .splines import SplineSpace


class NotPositiveDefiniteError(Exception):
    """Cholesky hit a nonpositive pivot: the form lost positive definiteness."""


@dataclass
class BandedMatrix:
    """Symmetric banded matrix in scipy upper-banded storage.

    ``ab[u + i - j, j]`` holds entry (i, j) for ``j - u <= i <= j`` where
    ``u`` is the half-bandwidth.  Only the upper triangle is stored.
    """

    ab: np.ndarray
    _chol: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.ab.shape[1]

    @property
    def u(self) -> int:
        return self.ab.shape[0] - 1

    @classmethod
    def zeros(cls, n: int, u: int) -> "BandedMatrix":
        return cls(np.zeros((u + 1, n)))

    def to_dense(self) -> np.ndarray:
        n, u = self.n, self.u
        a = np.zeros((n, n))
        for d in range(u + 1):
            diag = self.ab[u - d, d:]
            idx = np.arange(n - d)
            a[idx, idx + d] = diag
            a[idx + d, idx] = diag
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n, u = self.n, self.u
        y = self.ab[u] * x
        for d in range(1, u + 1):
            diag = self.ab[u - d, d:]
            y[: n - d] += diag * x[d:]
            y[d:] += diag * x[: n - d]
        return y

    def column(self, j: int) -> np.ndarray:
        """Full column j as a dense vector."""
        n, u = self.n, self.u
        col = np.zeros(n)
        for i in range(max(0, j - u), min(n, j + u + 1)):
            if i <= j:
                col[i] = self.ab[u + i - j, j]
            else:
                col[i] = self.ab[u + j - i, i]
        return col

    def interior(self) -> "BandedMatrix":
        """Principal submatrix with first and last row/column removed."""
        n, u = self.n, self.u
        ab = self.ab[:, 1 : n - 1].copy()
        m = ab.shape[1]
        # zero stored entries that referenced the removed first row
        for d in range(1, u + 1):
            for j in range(ab.shape[1]):
                if j - d < 0 and j < d:
                    ab[u - d, j] = 0.0
        return BandedMatrix(ab[:, :m])

    def factor(self) -> None:
        try:
            self._chol = cholesky_banded(self.ab, lower=False)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._chol is None:
            self.factor()
        return cho_solve_banded((self._chol, False), rhs)


def assemble_form(space: SplineSpace, w0=None, w1=None, quad: int = 3) -> BandedMatrix:
    """Assemble ``int w0 phi_i phi_j + w1 phi_i' phi_j'`` on the free space.

    ``w0`` and ``w1`` may be None (omitted), scalars, or arrays of weight
    values at the table quadrature points with shape (n_elements, nq).
    """
    tab = space.tables(quad)
    nel = space.partition.n_elements
    r = space.order
    elem = np.zeros((nel, r, r))
    for d, w in enumerate((w0, w1)):
        if w is None:
            continue
        wq = tab.wq * w if np.ndim(w) else tab.wq * float(w)
        B = tab.vals[d]
        elem += np.einsum("eq,eqi,eqj->eij", wq, B, B)

    u = r - 1
    mat = BandedMatrix.zeros(space.free_dim, u)
    step = space.step
    for jl in range(r):
        for jr in range(jl, r):
            d = jr - jl
            row = mat.ab[u - d]
            row[jr:: step][:nel] += elem[:, jl, jr]
    return mat


def gram_matrix(space: SplineSpace, weight=None, quad: int = 3) -> BandedMatrix:
    """Weighted mass matrix ``(w phi_i, phi_j)`` on the free space.

    ``weight`` is a callable evaluated at the quadrature points, an array of
    values there, a scalar, or None for the plain Gram matrix.
    """
    tab = space.tables(quad)
    w0 = weight(tab.xq) if callable(weight) else weight
    return assemble_form(space, w0=1.0 if w0 is None else w0, quad=quad)


def weighted_mass_a(space: SplineSpace, mu: float, quad: int = 3) -> BandedMatrix:
    """a-form ``(v, w) + mu/3 (v', w')`` of the weak-topography system."""
    return assemble_form(space, w0=1.0, w1=mu / 3.0, quad=quad)


def weighted_mass_A(space: SplineSpace, bathy, mu: float, quad: int = 3) -> BandedMatrix:
    """A-form of the strong-topography system.

    ``bathy`` provides ``depth``, ``depth_x`` and ``depth_xx`` (see
    :mod:`bousfem.bathymetry`).  Positive definiteness requires the depth
    coercivity conditions; the caller is expected to have run
    :func:`coercivity_check`.
    """
    tab = space.tables(quad)
    eb = bathy.depth(tab.xq)
    ebxx = bathy.depth_xx(tab.xq)
    w0 = eb - 0.5 * mu * eb**2 * ebxx
    w1 = (mu / 3.0) * eb**3
    return assemble_form(space, w0=w0, w1=w1, quad=quad)


def load_vector(space: SplineSpace, f, quad: int = 3) -> np.ndarray:
    """Load ``(f, phi_i)`` on the free space; f callable or values at quad points."""
    tab = space.tables(quad)
    fq = f(tab.xq) if callable(f) else np.broadcast_to(f, tab.xq.shape)
    return space.scatter(np.einsum("eq,eq,eqj->ej", tab.wq, fq, tab.vals[0]))


def l2_project(space: SplineSpace, f, quad: int = 3,
               gram: BandedMatrix | None = None) -> np.ndarray:
    """L2 projection onto the space (its bc included), as coefficients.

    A prefactored free-space Gram matrix may be passed to amortize repeated
    projections; for bc="zero" it must be the zero-space (interior) matrix.
    """
    rhs = load_vector(space, f, quad=quad)
    if space.bc == "zero":
        rhs = rhs[1:-1]
        if gram is None:
            gram = assemble_form(space, w0=1.0, quad=quad).interior()
    elif gram is None:
        gram = assemble_form(space, w0=1.0, quad=quad)
    return gram.solve(rhs)


def elliptic_project(space: SplineSpace, f, df, form: BandedMatrix,
                     w0, w1, quad: int = 3) -> np.ndarray:
    """Projection defined by a weighted H1 form: find v_h with B(v_h, chi) = B(f, chi).

    The right-hand side ``int w0 f chi + w1 f' chi'`` needs both ``f`` and its
    derivative ``df``.  ``form`` is the assembled (and factorable) matrix of
    the same bilinear form on the space, with matching weights ``w0``/``w1``
    given as scalars or arrays at the quadrature points of ``space.tables(quad)``.
    """
    tab = space.tables(quad)
    fq = f(tab.xq) if callable(f) else f
    dfq = df(tab.xq) if callable(df) else df
    rhs = space.scatter(
        np.einsum("eq,eq,eqj->ej", tab.wq * np.broadcast_to(w0, tab.xq.shape), fq, tab.vals[0])
        + np.einsum("eq,eq,eqj->ej", tab.wq * np.broadcast_to(w1, tab.xq.shape), dfq, tab.vals[1]))
    if space.bc == "zero":
        rhs = rhs[1:-1]
    return form.solve(rhs)


@dataclass(frozen=True)
class CoercivityReport:
    """Depth-dependent coercivity constants of the strong-topography form.

    ``c1 = min eta_b``, ``c2 = min(eta_b - mu/2 eta_b^2 eta_b'')``,
    ``c_mu = min(c2, mu c1^3 / 3)``.  The form is positive definite iff
    c1 > 0 and c2 > 0.
    """

    c1: float
    c2: float
    c_mu: float
    satisfied: bool
    argmin_c1: float
    argmin_c2: float


def coercivity_check(bathy, mu: float, n_samples: int = 2001) -> CoercivityReport:
    """Sample the coercivity quantities densely, piece by piece.

    Each smooth piece of the bathymetry is sampled on a closed grid so that
    one-sided limits at breakpoints are seen; the global dense grid has at
    least ``n_samples`` points.
    """
    xs, eb, ebxx = bathy.sample_pieces(n_samples)
    q1 = eb
    q2 = eb - 0.5 * mu * eb**2 * ebxx
    i1 = int(np.argmin(q1))
    i2 = int(np.argmin(q2))
    c1 = float(q1[i1])
    c2 = float(q2[i2])
    c_mu = min(c2, mu * c1**3 / 3.0)
    return CoercivityReport(c1=c1, c2=c2, c_mu=c_mu,
                            satisfied=(c1 > 0.0 and c2 > 0.0),
                            argmin_c1=float(xs[i1]), argmin_c2=float(xs[i2]))
