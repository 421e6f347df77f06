"""Semidiscrete spline-Galerkin systems for long-wave models over topography.

Four model kinds share one right-hand side:

``SW``
    Non-dispersive shallow water; both mass matrices are plain Gram matrices.
``CB`` / ``CBw``
    Classical Boussinesq; the velocity equation carries the flat-bottom
    dispersive operator ``(v, w) + (mu/3)(v', w')``.  ``CB`` is the
    conventional name on a flat bottom, ``CBw`` the weak-topography variant;
    they are the same discrete system.
``CBs``
    Strong-topography system: depth-weighted velocity equation with the
    dispersive operator ``((eta_b - (mu/2) eta_b^2 eta_b'') v, w)
    + (mu/3)(eta_b^3 v', w')``, positive definite under the depth coercivity
    conditions.

Space semantics: surface elevation lives in the full spline space; velocity
uses the same coefficient vector with its two endpoint coefficients slaved to
the boundary conditions (zero for a reflective wall, a characteristic outflow
relation for an absorbing end).  Interior velocity rows are solved with the
endpoint columns moved to the right-hand side, so the factored matrices stay
symmetric positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
import sympy as sp

from . import assembly
from .assembly import BandedMatrix
from .splines import SplineSpace

__all__ = [
    "KINDS",
    "DepthPositivityError",
    "ModelParams",
    "State",
    "SemidiscreteSystem",
    "build_system",
    "semidiscrete_rhs",
    "absorbing_bc_values",
    "absorbing_bc_rates",
    "manufactured_forcing",
    "manufactured_solution",
]

KINDS = ("SW", "CB", "CBw", "CBs")


class DepthPositivityError(RuntimeError):
    """Total water depth reached zero; the model is no longer valid there."""

    def __init__(self, x: float, t: float, depth: float):
        self.x = x
        self.t = t
        self.depth = depth
        super().__init__(
            f"total depth {depth:.3e} <= 0 at x={x:.6g}, t={t:.6g} "
            "(wave too large for the model; aborting instead of clipping)"
        )


@dataclass(frozen=True)
class ModelParams:
    """Model kind with the nonlinearity and dispersion scales."""

    kind: str
    eps: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r} (choose from {KINDS})")
        if self.kind == "SW" and self.mu != 0.0:
            raise ValueError("SW is the mu=0 model; pass mu=0")
        if self.eps < 0 or self.mu < 0:
            raise ValueError("eps and mu must be nonnegative")

    @property
    def dispersive(self) -> bool:
        return self.kind != "SW" and self.mu > 0


class State(NamedTuple):
    """Time plus spline coefficients of elevation and velocity."""

    t: float
    zc: np.ndarray
    uc: np.ndarray


# -- characteristic outflow relations -------------------------------------


def _check_side(side: str) -> str:
    if side not in ("Left", "Right"):
        raise ValueError("side must be 'Left' or 'Right'")
    return side


def absorbing_bc_values(eps: float, zeta, side: str, depth: float = 1.0):
    """Outflow velocity matching an undisturbed far field of the given depth.

    A right-going disturbance leaves through the right end when
    ``u = (2/eps)(sqrt(depth + eps*zeta) - sqrt(depth))`` there; the left end
    takes the opposite sign.
    """
    _check_side(side)
    z = np.asarray(zeta, dtype=float)
    total = depth + eps * z
    if np.any(total <= 0):
        raise DepthPositivityError(float("nan"), float("nan"), float(np.min(total)))
    if eps == 0.0:
        out = z / np.sqrt(depth)
    else:
        out = (2.0 / eps) * (np.sqrt(total) - np.sqrt(depth))
    out = out if side == "Right" else -out
    return float(out) if np.ndim(zeta) == 0 else out


def absorbing_bc_rates(eps: float, zeta, zeta_dot, side: str, depth: float = 1.0):
    """Time derivative of :func:`absorbing_bc_values` along a path zeta(t)."""
    _check_side(side)
    z = np.asarray(zeta, dtype=float)
    total = depth + eps * z
    if np.any(total <= 0):
        raise DepthPositivityError(float("nan"), float("nan"), float(np.min(total)))
    out = np.asarray(zeta_dot, dtype=float) / np.sqrt(total)
    out = out if side == "Right" else -out
    return float(out) if np.ndim(zeta) == 0 else out


# -- manufactured forcing --------------------------------------------------


@lru_cache(maxsize=8)
def _manufactured_lambdas(kind: str, eps: float, mu: float, beta: float):
    x, t = sp.symbols("x t", real=True)
    zeta = sp.exp(2 * t) * (sp.cos(sp.pi * x) + x + 2)
    u = sp.exp(x * t) * (sp.sin(sp.pi * x) + x**3 - x**2)
    eb = 1 - beta * sp.sin(sp.pi * x)

    f_zeta = sp.diff(zeta, t) + sp.diff((eb + eps * zeta) * u, x)
    transport = sp.diff(u, t) + sp.diff(zeta, x) + eps * u * sp.diff(u, x)
    if kind == "CBw":
        f_u = transport - (mu / 3) * sp.diff(u, x, x, t)
    elif kind == "CBs":
        utx = sp.diff(u, x, t)
        f_u = transport + (
            -(mu / 3) * sp.diff(eb**3 * utx, x)
            - (mu / 2) * eb**2 * sp.diff(eb, x, x) * sp.diff(u, t)
        ) / eb
    else:
        raise ValueError("manufactured forcing covers the CBw and CBs kinds")

    subs = {"zeta": zeta, "u": u,
            "zeta_x": sp.diff(zeta, x), "u_x": sp.diff(u, x),
            "f_zeta": f_zeta, "f_u": f_u}
    return {k: sp.lambdify((x, t), v, "numpy") for k, v in subs.items()}


def manufactured_forcing(params: ModelParams, bathy) -> tuple[Callable, Callable]:
    """Closed-form forcing pair making a fixed smooth field pair exact.

    The target fields are ``zeta = e^{2t}(cos(pi x) + x + 2)`` and
    ``u = e^{xt}(sin(pi x) + x^3 - x^2)`` over the oscillatory bed
    ``eta_b = 1 - beta sin(pi x)`` on [0, 1]; ``u`` vanishes at both ends for
    all time, so the zero-velocity boundary condition is compatible.
    """
    beta = _manufactured_beta(bathy)
    kind = "CBw" if params.kind in ("CB", "CBw") else params.kind
    lam = _manufactured_lambdas(kind, params.eps, params.mu, beta)
    return lam["f_zeta"], lam["f_u"]


def manufactured_solution(bathy) -> dict:
    """The exact fields of the forced test problem: zeta, u, zeta_x, u_x."""
    beta = _manufactured_beta(bathy)
    lam = _manufactured_lambdas("CBw", 1.0, 0.1, beta)
    return {k: lam[k] for k in ("zeta", "u", "zeta_x", "u_x")}


def _manufactured_beta(bathy) -> float:
    if bathy.kind == "SineBed":
        return float(bathy.params["beta"])
    if bathy.is_flat:
        return 0.0
    raise ValueError("manufactured forcing is defined over the SineBed profile")


# -- the semidiscrete system ----------------------------------------------


def _normalize_bc(bc) -> tuple[str, str]:
    if isinstance(bc, str):
        bc = (bc, bc)
    out = []
    for side in bc:
        name = side.capitalize()
        if name not in ("Reflective", "Absorbing"):
            raise ValueError(f"unknown boundary condition {side!r}")
        out.append(name)
    return tuple(out)


class SemidiscreteSystem:
    """Assembled Galerkin operator: everything needed to evaluate the rhs.

    Immutable after construction; ``rhs`` is pure, so independent states may
    be advanced concurrently against one shared system.
    """

    def __init__(
        self,
        space: SplineSpace,
        params: ModelParams,
        bathy,
        bc="Reflective",
        quad: int = 3,
        forcing=None,
        far_depth=("auto", "auto"),
        allow_sloping_outflow: bool = False,
    ):
        if space.bc != "free":
            raise ValueError("pass the free spline space; endpoint handling is internal")
        self.space = space
        self.params = params
        self.bathy = bathy
        self.bc = _normalize_bc(bc)
        self.quad = quad
        part = space.partition
        if not (
            abs(part.a - bathy.x_lo) < 1e-10 and abs(part.b - bathy.x_hi) < 1e-10
        ):
            raise ValueError("mesh interval and bathymetry interval disagree")

        kind = "CBw" if params.kind in ("CB", "CBw") else params.kind
        self._kind = kind
        self.tab = space.tables(quad)
        self.eb_q = bathy.depth(self.tab.xq)
        self._eb_ends = (float(bathy.depth(bathy.x_lo)), float(bathy.depth(bathy.x_hi)))
        if np.min(self.eb_q) <= 0.0:
            j = np.unravel_index(np.argmin(self.eb_q), self.eb_q.shape)
            raise ValueError(
                f"undisturbed depth nonpositive at quadrature node x={self.tab.xq[j]:.6g}"
            )

        self.coercivity = None
        if kind == "CBs":
            self.coercivity = assembly.coercivity_check(bathy, params.mu)
            if not self.coercivity.satisfied:
                # A shoreline endpoint may take the sampled minimum to zero
                # while every quadrature node stays strictly positive; the
                # Cholesky factorization below is the decisive gate.
                q2 = self.eb_q - 0.5 * params.mu * self.eb_q**2 * bathy.depth_xx(self.tab.xq)
                if np.min(q2) <= 0.0 or np.min(self.eb_q) <= 0.0:
                    raise assembly.NotPositiveDefiniteError(
                        "depth coercivity fails for the strong-topography form: "
                        f"c1={self.coercivity.c1:.3e} at x={self.coercivity.argmin_c1:.6g}, "
                        f"c2={self.coercivity.c2:.3e} at x={self.coercivity.argmin_c2:.6g}"
                    )

        # zeta equation: free-space Gram matrix.
        self.gram = assembly.gram_matrix(space, quad=quad)
        self.gram.factor()
        self._gram_int = self.gram.interior()
        self._gram_int.factor()
        self._gcol_l = self.gram.column(0)[1:-1]
        self._gcol_r = self.gram.column(space.free_dim - 1)[1:-1]

        # velocity equation: kind-dependent mass operator.
        if kind == "SW":
            self._uw0, self._uw1 = 1.0, 0.0
            umass = assembly.gram_matrix(space, quad=quad)
        elif kind == "CBw":
            self._uw0, self._uw1 = 1.0, params.mu / 3.0
            umass = assembly.weighted_mass_a(space, params.mu, quad=quad)
        else:
            ebxx_q = bathy.depth_xx(self.tab.xq)
            self._uw0 = self.eb_q - 0.5 * params.mu * self.eb_q**2 * ebxx_q
            self._uw1 = (params.mu / 3.0) * self.eb_q**3
            umass = assembly.weighted_mass_A(space, bathy, params.mu, quad=quad)
        self.umass = umass
        self._umass_int = umass.interior()
        self._umass_int.factor()
        self._ucol_l = umass.column(0)[1:-1]
        self._ucol_r = umass.column(space.free_dim - 1)[1:-1]

        # weight of the velocity load: depth for CBs, one otherwise.
        self._wload_u = self.tab.wq * self.eb_q if kind == "CBs" else self.tab.wq

        self.far_depth = self._resolve_far_depth(far_depth, allow_sloping_outflow)

        if forcing == "manufactured":
            forcing = manufactured_forcing(params, bathy)
        if forcing is not None:
            fz, fu = forcing
            if not (callable(fz) and callable(fu)):
                raise TypeError("forcing must be 'manufactured' or a pair of callables")
        self.forcing = forcing

    # -- construction helpers --------------------------------------------

    def _resolve_far_depth(self, far_depth, allow_sloping: bool) -> tuple:
        if not isinstance(far_depth, (tuple, list)):
            far_depth = (far_depth, far_depth)
        resolved = []
        for side, spec_d in zip(("Left", "Right"), far_depth):
            if self.bc[0 if side == "Left" else 1] != "Absorbing":
                resolved.append(None)
                continue
            piece = self.bathy.edge_piece(side)
            local = piece.d0 if side == "Left" else piece.d1
            if piece.kind != "const" and not allow_sloping:
                raise ValueError(
                    f"absorbing outflow at the {side.lower()} end sits over a "
                    "sloping bottom; the far-field relation assumes locally "
                    "constant depth (pass allow_sloping_outflow=True to force)"
                )
            if spec_d == "auto" or spec_d is None:
                resolved.append(float(local))
                continue
            d = float(spec_d)
            if piece.kind == "const" and abs(d - local) > 1e-10:
                raise ValueError(
                    f"declared far-field depth {d} does not match the bottom "
                    f"depth {local} at the {side.lower()} end"
                )
            resolved.append(d)
        return tuple(resolved)

    # -- boundary coefficient handling ------------------------------------

    def slave_boundary(self, zc: np.ndarray, uc: np.ndarray) -> np.ndarray:
        """Velocity coefficients with both endpoint values re-imposed."""
        out = uc.copy()
        eps = self.params.eps
        for i, side in ((0, "Left"), (-1, "Right")):
            if self.bc[0 if side == "Left" else 1] == "Reflective":
                out[i] = 0.0
            else:
                d = self.far_depth[0 if side == "Left" else 1]
                out[i] = absorbing_bc_values(eps, float(zc[i]), side, depth=d)
        return out

    def _boundary_rates(self, zc, zdot) -> tuple[float, float]:
        eps = self.params.eps
        rates = []
        for i, side in ((0, "Left"), (-1, "Right")):
            if self.bc[0 if side == "Left" else 1] == "Reflective":
                rates.append(0.0)
            else:
                d = self.far_depth[0 if side == "Left" else 1]
                rates.append(
                    absorbing_bc_rates(eps, float(zc[i]), float(zdot[i]), side, depth=d)
                )
        return tuple(rates)

    # -- right-hand side ---------------------------------------------------

    def rhs(self, t: float, zc: np.ndarray, uc: np.ndarray):
        """Coefficient rates (zdot, udot) of the semidiscrete system."""
        space, tab, eps = self.space, self.tab, self.params.eps
        z_q = space.eval_at_tables(zc, tab, 0)
        zx_q = space.eval_at_tables(zc, tab, 1)
        u_q = space.eval_at_tables(uc, tab, 0)
        ux_q = space.eval_at_tables(uc, tab, 1)

        eta_q = self.eb_q + eps * z_q
        m = np.min(eta_q)
        if m <= 0.0:
            j = np.unravel_index(np.argmin(eta_q), eta_q.shape)
            raise DepthPositivityError(float(tab.xq[j]), t, float(m))

        # The mass-flux term is integrated against the test-function
        # derivative.  Summing the basis derivatives to zero then makes the
        # discrete mass balance exact for any bathymetry and quadrature; the
        # endpoint flux survives only where the boundary velocity is nonzero.
        flux_q = eta_q * u_q
        integrand_u = -(zx_q + eps * u_q * ux_q)
        load_z = space.scatter(
            np.einsum("eq,eq,eqj->ej", tab.wq, flux_q, tab.vals[1])
        )
        if self.forcing is not None:
            fz, fu = self.forcing
            load_z += space.scatter(
                np.einsum("eq,eq,eqj->ej", tab.wq, fz(tab.xq, t), tab.vals[0])
            )
            integrand_u = integrand_u + fu(tab.xq, t)
        if self.bc[0] == "Absorbing":
            load_z[0] += (self._eb_ends[0] + eps * zc[0]) * uc[0]
        if self.bc[1] == "Absorbing":
            load_z[-1] -= (self._eb_ends[1] + eps * zc[-1]) * uc[-1]
        zdot = self.gram.solve(load_z)

        load_u = space.scatter(
            np.einsum("eq,eq,eqj->ej", self._wload_u, integrand_u, tab.vals[0])
        )
        rl, rr = self._boundary_rates(zc, zdot)
        rhs_int = load_u[1:-1]
        if rl != 0.0:
            rhs_int = rhs_int - rl * self._ucol_l
        if rr != 0.0:
            rhs_int = rhs_int - rr * self._ucol_r
        udot = np.empty_like(uc)
        udot[0] = rl
        udot[-1] = rr
        udot[1:-1] = self._umass_int.solve(rhs_int)
        return zdot, udot

    # -- projections and initial data --------------------------------------

    def project_zeta(self, f) -> np.ndarray:
        """L2 projection of an elevation profile onto the full space."""
        load = assembly.load_vector(self.space, f, quad=self.quad)
        return self.gram.solve(load)

    def project_u(self, f, df=None, method: str = "l2", zc=None) -> np.ndarray:
        """Projection of a velocity profile onto the boundary-slaved subspace.

        ``method="l2"`` needs only ``f``; ``method="elliptic"`` projects in
        the velocity mass form and needs the derivative ``df`` as well.
        Endpoint coefficients come from the boundary conditions (zero at a
        reflective end; from the elevation coefficients ``zc`` at an
        absorbing end, undisturbed if ``zc`` is omitted).
        """
        space, tab = self.space, self.tab
        n = space.free_dim
        zz = np.zeros(n) if zc is None else zc
        bvals = self.slave_boundary(zz, np.zeros(n))
        bl, br = float(bvals[0]), float(bvals[-1])

        if method == "l2":
            load = assembly.load_vector(space, f, quad=self.quad)
            rhs = load[1:-1] - bl * self._gcol_l - br * self._gcol_r
            interior = self._gram_int.solve(rhs)
        elif method == "elliptic":
            if df is None:
                raise ValueError("elliptic projection needs the derivative df")
            fq = f(tab.xq) if callable(f) else f
            dfq = df(tab.xq) if callable(df) else df
            load = space.scatter(
                np.einsum("eq,eq,eqj->ej",
                          tab.wq * np.broadcast_to(self._uw0, tab.xq.shape),
                          fq, tab.vals[0])
                + np.einsum("eq,eq,eqj->ej",
                            tab.wq * np.broadcast_to(self._uw1, tab.xq.shape),
                            dfq, tab.vals[1])
            )
            rhs = load[1:-1] - bl * self._ucol_l - br * self._ucol_r
            interior = self._umass_int.solve(rhs)
        else:
            raise ValueError("method must be 'l2' or 'elliptic'")
        return np.concatenate(([bl], interior, [br]))

    def initial_state(self, zeta0=None, u0=None, du0=None,
                      t0: float = 0.0, u_method: str = "l2") -> State:
        """Project initial fields and return a boundary-consistent state."""
        n = self.space.free_dim
        zc = np.zeros(n) if zeta0 is None else self.project_zeta(zeta0)
        if u0 is None:
            uc = self.slave_boundary(zc, np.zeros(n))
        else:
            uc = self.project_u(u0, du0, method=u_method, zc=zc)
        return State(t=t0, zc=zc, uc=uc)


def build_system(space, params, bathy, **kwargs) -> SemidiscreteSystem:
    """Assemble and factor a semidiscrete system; see SemidiscreteSystem."""
    return SemidiscreteSystem(space, params, bathy, **kwargs)


def semidiscrete_rhs(sys: SemidiscreteSystem, state: State):
    """Rhs of the coefficient ODE at the given state."""
    return sys.rhs(state.t, state.zc, state.uc)
