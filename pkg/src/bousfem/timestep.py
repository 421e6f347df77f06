"""Fixed-step RK4 marching with gauge, snapshot and mass-trace plumbing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import GaugeSeries
from .models import DepthPositivityError, State

__all__ = ["RunConfig", "RunRecord", "rk4_step", "integrate"]


@dataclass(frozen=True)
class RunConfig:
    """Marching schedule: final time, step control and sampling cadences.

    The step is ``k = courant * h`` reduced minimally so that ``T/k`` is an
    integer; an explicit ``steps`` count overrides the Courant ratio.  Gauges
    are sampled every ``gauge_stride`` steps, the observer callback every
    ``observer_stride`` steps (0 disables it), and the mass trace every step.
    """

    T: float
    courant: float | None = 0.5
    steps: int | None = None
    gauges: tuple = ()
    gauge_stride: int = 1
    snapshot_times: tuple = ()
    observer_stride: int = 0
    trace_mass: bool = True

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("final time must be nonnegative")
        if self.steps is None:
            if self.courant is None or not 0.0 < self.courant <= 0.5:
                raise ValueError("courant ratio must lie in (0, 1/2]")
        elif self.steps < 0:
            raise ValueError("step count must be nonnegative")
        if self.gauge_stride < 1:
            raise ValueError("gauge_stride must be >= 1")

    def resolve_steps(self, h: float) -> int:
        """Number of steps for mesh width h; T/k is exactly this integer."""
        if self.T == 0.0:
            return 0
        if self.steps is not None:
            return self.steps
        return max(1, math.ceil(self.T / (self.courant * h) - 1e-12))


@dataclass
class RunRecord:
    """Everything retained from a march: final state, samples, diagnostics."""

    final: State
    k: float
    n_steps: int
    gauge_x: np.ndarray
    gauge_t: np.ndarray
    gauge_z: np.ndarray
    gauge_u: np.ndarray
    snapshots: list = field(default_factory=list)
    mass_t: np.ndarray = None
    mass: np.ndarray = None
    observed: list = field(default_factory=list)
    stopped_early: bool = False
    aborted: str | None = None
    abort_step: int | None = None

    def gauge(self, x: float) -> GaugeSeries:
        """Series recorded at the gauge nearest to x (within half a mesh)."""
        if self.gauge_x.size == 0:
            raise ValueError("run recorded no gauges")
        j = int(np.argmin(np.abs(self.gauge_x - x)))
        return GaugeSeries(
            x=float(self.gauge_x[j]),
            t=self.gauge_t,
            zeta=self.gauge_z[:, j],
            u=self.gauge_u[:, j],
        )


def rk4_step(sys, state: State, k: float) -> State:
    """One classical four-stage step; boundary-slaved velocity coefficients
    are refreshed at every stage from the stage elevation."""
    if k <= 0.0:
        raise ValueError("step length must be positive")
    t, z0, u0 = state
    z1, u1 = sys.rhs(t, z0, u0)
    za = z0 + 0.5 * k * z1
    ua = sys.slave_boundary(za, u0 + 0.5 * k * u1)
    z2, u2 = sys.rhs(t + 0.5 * k, za, ua)
    zb = z0 + 0.5 * k * z2
    ub = sys.slave_boundary(zb, u0 + 0.5 * k * u2)
    z3, u3 = sys.rhs(t + 0.5 * k, zb, ub)
    zd = z0 + k * z3
    ud = sys.slave_boundary(zd, u0 + k * u3)
    z4, u4 = sys.rhs(t + k, zd, ud)
    z_new = z0 + (k / 6.0) * (z1 + 2.0 * z2 + 2.0 * z3 + z4)
    u_new = sys.slave_boundary(z_new, u0 + (k / 6.0) * (u1 + 2.0 * u2 + 2.0 * u3 + u4))
    return State(t=t + k, zc=z_new, uc=u_new)


def integrate(sys, initial: State, cfg: RunConfig, observer=None, stop=None) -> RunRecord:
    """March ``initial`` to ``cfg.T`` in fixed steps.

    ``observer(state)`` is evaluated at the configured cadence and its return
    values collected; ``stop(state)``, checked at the same cadence, ends the
    march early when it returns true.  A depth-positivity failure aborts the
    march and is recorded on the returned RunRecord instead of propagating.
    """
    h = sys.space.partition.h
    n_steps = cfg.resolve_steps(h)
    k = cfg.T / n_steps if n_steps > 0 else 0.0

    gauge_x = np.asarray(cfg.gauges, dtype=float)
    gauge_t, gauge_z, gauge_u = [], [], []
    mass_t, mass = [], []
    snapshots = []
    observed = []
    snap_steps = {}
    for ts in cfg.snapshot_times:
        idx = min(max(int(round(ts / k)), 0), n_steps) if k > 0 else 0
        snap_steps.setdefault(idx, ts)

    ivals = sys.space.basis_integrals()
    state = initial
    stopped = False
    aborted = None
    abort_step = None

    def sample(n: int, st: State) -> bool:
        if gauge_x.size and n % cfg.gauge_stride == 0:
            gauge_t.append(st.t)
            gauge_z.append(sys.space.eval(st.zc, gauge_x))
            gauge_u.append(sys.space.eval(st.uc, gauge_x))
        if cfg.trace_mass:
            mass_t.append(st.t)
            mass.append(float(ivals @ st.zc))
        if n in snap_steps:
            snapshots.append(st)
        if cfg.observer_stride and n % cfg.observer_stride == 0:
            if observer is not None:
                observed.append((st.t, observer(st)))
            if stop is not None and stop(st):
                return True
        return False

    sample(0, state)
    for n in range(1, n_steps + 1):
        try:
            state = rk4_step(sys, state, k)
        except DepthPositivityError as exc:
            aborted = str(exc)
            abort_step = n
            break
        if sample(n, state):
            stopped = True
            break

    def stack(rows, width):
        if rows:
            return np.array(rows)
        return np.empty((0, width))

    return RunRecord(
        final=state,
        k=k,
        n_steps=n_steps,
        gauge_x=gauge_x,
        gauge_t=np.array(gauge_t),
        gauge_z=stack(gauge_z, gauge_x.size),
        gauge_u=stack(gauge_u, gauge_x.size),
        snapshots=snapshots,
        mass_t=np.array(mass_t),
        mass=np.array(mass),
        observed=observed,
        stopped_early=stopped,
        aborted=aborted,
        abort_step=abort_step,
    )
