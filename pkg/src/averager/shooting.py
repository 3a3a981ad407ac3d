"""Locating true periodic orbits of the jerk system by section shooting.

The predictions of the averaged analysis are (r, w) roots; mapped through
the coordinate pipeline at theta = 0 they give points on the plane section
{z = 0, y > 0}, crossed with dz/dt < 0. Newton iteration on the first
return map of that section turns each prediction into an actual periodic
orbit of the full nonlinear system, and the variational flow along one
period yields the Floquet multipliers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .closed_form import HypothesisViolated, OrbitCount, predicted_roots
from .jerk import SystemParams, jacobian_at, vector_field
from .normal_form import UnfoldingParams, unfold

logger = logging.getLogger(__name__)

#: default bound on |eps| accepted by the shooter
MAX_EPS = 0.2

#: default residual bound on the return-map displacement
SHOOT_TOL = 1e-10

#: the refined crossing must satisfy |z| below this
CROSSING_TOL = 1e-12


class StepLimitExceeded(RuntimeError):
    """The integrator used more steps than IntegratorSpec.max_steps allows."""


class StepUnderflow(RuntimeError):
    """The integrator reduced the step below what double precision resolves."""


class NoReturn(RuntimeError):
    """The trajectory never re-crossed the section within the time budget."""


class ShootingDiverged(RuntimeError):
    """Newton on the return map failed from every candidate seed."""


class SeedInvalid(ValueError):
    """The averaged seed is unusable (r <= 0 or not finite)."""


class IntegratorMethod(Enum):
    RK4_FIXED = "rk4"
    RK45_ADAPTIVE = "rk45"


@dataclass(frozen=True)
class IntegratorSpec:
    method: IntegratorMethod = IntegratorMethod.RK45_ADAPTIVE
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    max_step: float = math.inf
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("integrator tolerances must be positive")


@dataclass(frozen=True)
class PeriodicOrbitRecord:
    """One located periodic orbit of the full system."""

    eps: float
    section_point: np.ndarray
    period: float
    residual: float
    floquet: np.ndarray
    seed: tuple


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory with dense evaluation between samples."""

    t: np.ndarray
    states: np.ndarray
    _dense: Callable = field(repr=False)

    def at(self, t):
        """State at time t; rows for array input."""
        return self._dense(t)


def _rhs(p: SystemParams) -> Callable:
    a, b, c = p.a, p.b, p.c

    def rhs(t, s):
        x, y, z = s
        return (y, z, -a * z - b * x + c * y + x * y * y - x ** 3)

    return rhs


def _augmented_rhs(p: SystemParams) -> Callable:
    def rhs(t, s):
        state = s[:3]
        phi = s[3:].reshape(3, 3)
        return np.concatenate(
            [vector_field(p, state), (jacobian_at(p, state) @ phi).ravel()]
        )

    return rhs


def _solve_adaptive(fun, s0, t_end, spec, events=None):
    sol = solve_ivp(
        fun,
        (0.0, float(t_end)),
        np.asarray(s0, dtype=float),
        method="RK45",
        rtol=spec.rel_tol,
        atol=spec.abs_tol,
        max_step=spec.max_step,
        dense_output=True,
        events=events,
    )
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    if len(sol.t) - 1 > spec.max_steps:
        raise StepLimitExceeded(
            f"{len(sol.t) - 1} steps exceed the limit {spec.max_steps}"
        )
    return sol


def _solve_rk4(fun, s0, t_end, spec):
    """Classic fixed-step RK4 with a cubic Hermite dense output."""
    s0 = np.asarray(s0, dtype=float)
    h_target = spec.max_step if math.isfinite(spec.max_step) else t_end / 1024.0
    n_steps = max(1, int(np.ceil(t_end / h_target)))
    if n_steps > spec.max_steps:
        raise StepLimitExceeded(f"{n_steps} steps exceed the limit {spec.max_steps}")
    h = t_end / n_steps
    if h < 1e-14 * max(1.0, t_end):
        raise StepUnderflow(f"fixed step {h:.3e} below resolvable size")
    t = np.linspace(0.0, t_end, n_steps + 1)
    states = np.empty((n_steps + 1, len(s0)))
    derivs = np.empty_like(states)
    states[0] = s0
    derivs[0] = fun(0.0, s0)
    s = s0
    for i in range(n_steps):
        ti = t[i]
        k1 = np.asarray(fun(ti, s))
        k2 = np.asarray(fun(ti + h / 2.0, s + h / 2.0 * k1))
        k3 = np.asarray(fun(ti + h / 2.0, s + h / 2.0 * k2))
        k4 = np.asarray(fun(ti + h, s + h * k3))
        s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[i + 1] = s
        derivs[i + 1] = fun(t[i + 1], s)
    return t, states, CubicHermiteSpline(t, states, derivs, axis=0)


def integrate(p: SystemParams, s0, t_end: float, spec: IntegratorSpec) -> Trajectory:
    """Numerical flow of the jerk system from s0 over [0, t_end].

    Raises
    ------
    StepLimitExceeded, StepUnderflow on integrator budget failures.
    """
    if t_end <= 0.0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    fun = _rhs(p)
    if spec.method is IntegratorMethod.RK45_ADAPTIVE:
        sol = _solve_adaptive(fun, s0, t_end, spec)
        dense = sol.sol
        return Trajectory(
            t=sol.t, states=sol.y.T,
            _dense=lambda tt: np.asarray(dense(tt)).T,
        )
    t, states, spline = _solve_rk4(fun, s0, t_end, spec)
    return Trajectory(t=t, states=states, _dense=spline)


def _polish_crossing(fun, dense, t_cross, t_lo, t_hi):
    """Newton in time on the dense output until |z| < CROSSING_TOL."""
    for _ in range(8):
        state = np.asarray(dense(t_cross), dtype=float)
        if abs(state[2]) < CROSSING_TOL:
            break
        zdot = fun(t_cross, state)[2]
        if zdot == 0.0:
            break
        t_cross = min(max(t_cross - state[2] / zdot, t_lo), t_hi)
    return t_cross, np.asarray(dense(t_cross), dtype=float)


def _first_crossing(p: SystemParams, s0, spec: IntegratorSpec,
                    direction: int, t_max: float):
    """First z = 0 crossing with sign(dz/dt) = direction, or None.

    A start exactly on the section does not count as a crossing.
    Returns (t_cross, state_cross).
    """
    fun = _rhs(p)
    if spec.method is IntegratorMethod.RK45_ADAPTIVE:
        event = lambda t, s: s[2]
        event.terminal = True
        event.direction = float(direction)
        sol = _solve_adaptive(fun, s0, t_max, spec, events=[event])
        if len(sol.t_events[0]) == 0:
            return None
        t_cross = float(sol.t_events[0][0])
        t_cross, state = _polish_crossing(fun, sol.sol, t_cross, 0.0, sol.t[-1])
        return t_cross, state
    t, states, spline = _solve_rk4(fun, s0, t_max, spec)
    z = states[:, 2]
    for i in range(len(t) - 1):
        lo, hi = z[i], z[i + 1]
        if direction < 0 and not (lo > 0.0 > hi):
            continue
        if direction > 0 and not (lo < 0.0 < hi):
            continue
        t_cross = brentq(lambda tt: spline(tt)[2], t[i], t[i + 1], xtol=1e-14)
        t_cross, state = _polish_crossing(fun, spline, t_cross, t[i], t[i + 1])
        return t_cross, state
    return None


def poincare_return(p: SystemParams, q, spec: IntegratorSpec,
                    orientation: int = -1, t_max: float = 100.0):
    """First return to the section {z = 0} with the chosen orientation.

    The default orientation -1 is the section {z = 0, y > 0} crossed with
    dz/dt < 0; orientation +1 is its mirror image {z = 0, y < 0} crossed
    upward, which the odd symmetry of the field maps onto the default one.

    Parameters
    ----------
    q : (x, y) coordinates on the section
    spec : integrator budget
    t_max : total flight-time budget before giving up

    Returns
    -------
    ((x', y'), flight_time) at the next same-orientation crossing with the
    correct y sign, refined to |z| < 1e-12.

    Raises
    ------
    NoReturn when the budget is exhausted without an admissible crossing.
    """
    state = np.array([q[0], q[1], 0.0])
    elapsed = 0.0
    for _ in range(8):
        half = _first_crossing(p, state, spec, -orientation, t_max - elapsed)
        if half is None:
            raise NoReturn(f"no {-orientation:+d} crossing within t_max={t_max}")
        elapsed += half[0]
        full = _first_crossing(p, half[1], spec, orientation, t_max - elapsed)
        if full is None:
            raise NoReturn(f"no {orientation:+d} crossing within t_max={t_max}")
        elapsed += full[0]
        state = full[1]
        if state[1] * orientation < 0.0:  # y > 0 for orientation -1
            return np.array([state[0], state[1]]), elapsed
    raise NoReturn(f"no admissible section point after {elapsed:.3f} time units")


def monodromy(p: SystemParams, s0, period: float, spec: IntegratorSpec) -> np.ndarray:
    """Fundamental matrix over one period from the variational equations."""
    aug0 = np.concatenate([np.asarray(s0, dtype=float), np.eye(3).ravel()])
    fun = _augmented_rhs(p)
    if spec.method is IntegratorMethod.RK45_ADAPTIVE:
        sol = _solve_adaptive(fun, aug0, period, spec)
        return sol.y[3:, -1].reshape(3, 3)
    _, states, _ = _solve_rk4(fun, aug0, period, spec)
    return states[-1, 3:].reshape(3, 3)


def _nontrivial_multipliers(mono: np.ndarray):
    """(two nontrivial multipliers, trivial multiplier closest to 1)."""
    mults = np.linalg.eigvals(mono)
    i0 = int(np.argmin(np.abs(mults - 1.0)))
    rest = np.delete(mults, i0)
    order = np.lexsort((rest.imag, rest.real))
    return rest[order], mults[i0]


def _newton_return(p, q0, spec, shoot_tol, max_iter):
    """Newton on P(q) - q; returns the fixed point or None."""
    q = np.array(q0, dtype=float)
    try:
        res_vec = poincare_return(p, q, spec)[0] - q
    except NoReturn:
        return None
    res = float(np.linalg.norm(res_vec))
    for _ in range(max_iter):
        if res < shoot_tol:
            return q
        h = 1e-7 * (1.0 + float(np.linalg.norm(q)))
        jac = np.empty((2, 2))
        try:
            for j in range(2):
                dq = np.zeros(2)
                dq[j] = h
                hi = poincare_return(p, q + dq, spec)[0] - (q + dq)
                lo = poincare_return(p, q - dq, spec)[0] - (q - dq)
                jac[:, j] = (hi - lo) / (2.0 * h)
            step = np.linalg.solve(jac, -res_vec)
            lam = 1.0
            for _ in range(12):
                q_new = q + lam * step
                new_vec = poincare_return(p, q_new, spec)[0] - q_new
                new_res = float(np.linalg.norm(new_vec))
                if new_res < res or new_res < shoot_tol:
                    break
                lam *= 0.5
            else:
                return None
        except (NoReturn, np.linalg.LinAlgError):
            return None
        q, res_vec, res = q_new, new_vec, new_res
    return q if res < shoot_tol else None


def shoot_orbit(
    u: UnfoldingParams,
    eps: float,
    seed,
    spec: Optional[IntegratorSpec] = None,
    shoot_tol: float = SHOOT_TOL,
    max_iter: int = 25,
    max_eps: float = MAX_EPS,
    initial_point=None,
) -> PeriodicOrbitRecord:
    """Locate the periodic orbit predicted by the averaged root (r, w).

    Two candidate section seeds are tried in turn: eps*(w, r), which is the
    theta = 0 image of the root under the coordinate pipeline, and the
    alternate reading eps*(w + r/delta, r); their discrepancy is logged.
    An explicit initial_point, e.g. a warm start from a nearby eps, takes
    precedence over both.

    Returns
    -------
    PeriodicOrbitRecord with the converged section point, the period (the
    return flight time), the residual of the return displacement and the
    two nontrivial Floquet multipliers.

    Raises
    ------
    SeedInvalid for r <= 0 or non-finite seeds; ShootingDiverged when no
    candidate converges; ValueError for |eps| beyond max_eps.
    """
    spec = spec or IntegratorSpec()
    r, w = float(seed[0]), float(seed[1])
    if not (np.isfinite(r) and np.isfinite(w)) or r <= 0.0:
        raise SeedInvalid(f"seed (r, w) = ({r}, {w}) needs finite values, r > 0")
    if not (0.0 < eps <= max_eps):
        raise ValueError(f"eps = {eps} outside the shooting range (0, {max_eps}]")
    p = unfold(u, eps)
    q_section = np.array([eps * w, eps * r])
    q_alternate = np.array([eps * (w + r / u.delta), eps * r])
    candidates = [("section-image", q_section), ("alternate", q_alternate)]
    if initial_point is not None:
        candidates.insert(0, ("warm-start", np.asarray(initial_point, dtype=float)))

    fixed = None
    for tag, q0 in candidates:
        fixed = _newton_return(p, q0, spec, shoot_tol, max_iter)
        if fixed is not None:
            logger.info(
                "seed (r=%.6g, w=%.6g) eps=%.6g: converged from %s start; "
                "fixed point at %.3e from eps*(w, r), %.3e from the alternate",
                r, w, eps, tag,
                float(np.linalg.norm(fixed - q_section)),
                float(np.linalg.norm(fixed - q_alternate)),
            )
            break
    if fixed is None:
        raise ShootingDiverged(
            f"no candidate seed converged for (r, w) = ({r}, {w}) at eps = {eps}"
        )

    returned, period = poincare_return(p, fixed, spec)
    residual = float(np.linalg.norm(returned - fixed))
    mono = monodromy(p, np.array([fixed[0], fixed[1], 0.0]), period, spec)
    floq, trivial = _nontrivial_multipliers(mono)
    logger.debug(
        "orbit at eps=%.6g: period=%.12g, trivial multiplier defect %.3e",
        eps, period, abs(trivial - 1.0),
    )
    return PeriodicOrbitRecord(
        eps=eps,
        section_point=fixed,
        period=period,
        residual=residual,
        floquet=floq,
        seed=(r, w),
    )


def period_trace(p: SystemParams, section_point, period: float,
                 spec: IntegratorSpec, n_samples: int = 512):
    """(times, states) sampled uniformly over one period from the section."""
    s0 = np.array([section_point[0], section_point[1], 0.0])
    traj = integrate(p, s0, period, spec)
    t = np.linspace(0.0, period, n_samples)
    return t, np.asarray(traj.at(t), dtype=float)


@dataclass(frozen=True)
class SweepEntry:
    eps: float
    records: dict
    failures: dict


@dataclass(frozen=True)
class SweepResult:
    """Sweep records plus emanation diagnostics.

    amp_slopes and seed_error_slopes are log-log fits against eps, one per
    root index; max_coords[i][k] is the largest coordinate magnitude along
    orbit i at the k-th eps; monotone says whether every orbit's extent
    shrank strictly at each step of the sweep.
    """

    roots: list
    entries: list
    amp_slopes: dict
    seed_error_slopes: dict
    max_coords: dict
    monotone: bool


def sweep_epsilon(
    u: UnfoldingParams,
    eps_list,
    spec: Optional[IntegratorSpec] = None,
    shoot_tol: float = SHOOT_TOL,
) -> SweepResult:
    """Shoot all predicted orbits for each eps in a decreasing list.

    Later eps values warm-start from the previous fixed point scaled by the
    eps ratio. Shooting failures are recorded per entry without aborting
    the sweep.
    """
    spec = spec or IntegratorSpec()
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0.0 for e in eps_list):
        raise ValueError("eps_list must contain positive values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    prediction = predicted_roots(u.a2, u.b2, u.delta)
    if prediction.count is OrbitCount.DEGENERATE:
        raise HypothesisViolated(prediction.degenerate_reason)

    entries = []
    warm: dict[int, np.ndarray] = {}
    prev_eps: Optional[float] = None
    max_coords: dict[int, list] = {i: [] for i in range(len(prediction.roots))}
    for eps in eps_list:
        records: dict[int, PeriodicOrbitRecord] = {}
        failures: dict[int, str] = {}
        for i, root in enumerate(prediction.roots):
            start = None
            if i in warm and prev_eps is not None:
                start = warm[i] * (eps / prev_eps)
            try:
                rec = shoot_orbit(
                    u, eps, root, spec, shoot_tol=shoot_tol, initial_point=start
                )
            except (ShootingDiverged, NoReturn, SeedInvalid,
                    StepLimitExceeded, StepUnderflow) as exc:
                failures[i] = f"{type(exc).__name__}: {exc}"
                warm.pop(i, None)
                max_coords[i].append(math.nan)
                continue
            records[i] = rec
            warm[i] = rec.section_point
            _, states = period_trace(unfold(u, eps), rec.section_point,
                                     rec.period, spec)
            max_coords[i].append(float(np.max(np.abs(states))))
        entries.append(SweepEntry(eps=eps, records=records, failures=failures))
        prev_eps = eps

    amp_slopes = {}
    seed_error_slopes = {}
    monotone = True
    for i, root in enumerate(prediction.roots):
        eps_ok, amps, errs = [], [], []
        for entry in entries:
            rec = entry.records.get(i)
            if rec is None:
                continue
            eps_ok.append(entry.eps)
            amps.append(float(np.linalg.norm(rec.section_point)))
            target = entry.eps * np.array([root[1], root[0]])
            errs.append(float(np.linalg.norm(rec.section_point - target)))
        if len(eps_ok) >= 2:
            log_eps = np.log(eps_ok)
            amp_slopes[i] = float(np.polyfit(log_eps, np.log(amps), 1)[0])
            safe = np.maximum(errs, 1e-300)
            seed_error_slopes[i] = float(np.polyfit(log_eps, np.log(safe), 1)[0])
        coords = [mc for mc in max_coords[i] if not math.isnan(mc)]
        if any(b >= a for a, b in zip(coords, coords[1:])):
            monotone = False
    return SweepResult(
        roots=list(prediction.roots),
        entries=entries,
        amp_slopes=amp_slopes,
        seed_error_slopes=seed_error_slopes,
        max_coords=max_coords,
        monotone=monotone,
    )
