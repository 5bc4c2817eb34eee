"""
Flows — RK4 integration of the τ-flows and the verification harness
====================================================================

Integration runs in symmetric coordinates (Q, P), where the vector field

    Q̇ = ∂Ham/∂P / ħ,   Ṗ = −∂Ham/∂Q / ħ

is polynomial, so trajectories pass through collisions of the apparent
singularities.  Darboux points are rebuilt afterwards for reporting.

Checks:
    verify_zero_curvature          ħ∂_τL̃ − [Ã, L̃] − ħ∂_λÃ along a τ-flow
    verify_zero_curvature_general  L_α[L̃] − [Ã, L̃] − ħ∂_λÃ for any α
    verify_painleve1               ħ²q̈ = 24q² + 16τ at g = 1
    verify_flow_commutativity      τ_j then τ_k versus τ_k then τ_j
    verify_energy_balance          dHam/dτ_k = ∂Ham/∂τ_k along a trajectory
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from p1lab.algebra import Dual, Mat2, Poly, der, partials, val
from p1lab.central_config import config
from p1lab.errors import P1LabError, PoleCollision, StepFailure, WrongGenus
from p1lab.ham import (
    evolution_reduced,
    from_symmetric,
    symmetric_hamiltonian_fn,
    to_symmetric,
)
from p1lab.lax import (
    DarbouxPoint,
    SymmetricPoint,
    build_Atilde_symmetric,
    build_Ltilde_symmetric,
    flow_data,
    on_curve_residual,
)
from p1lab.times import DeformationVector, IrregularTimes, ReducedTimes

logger = logging.getLogger(__name__)

# q̃ = 2^{−2/5}q, p̃ = 2^{2/5}p, t = 2^{6/5}τ
SCALE_Q = 2.0 ** (-2 / 5)
SCALE_P = 2.0 ** (2 / 5)
SCALE_T = 2.0 ** (6 / 5)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the τ_k flow: ``states[i]`` sits at τ_k = ``grid[i]``."""

    k: int
    grid: tuple
    states: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.grid) != len(self.states):
            raise ValueError("grid and states must have the same length")
        if not self.grid:
            raise ValueError("a trajectory needs at least one point")
        steps = [complex(b) - complex(a) for a, b in zip(self.grid, self.grid[1:])]
        if steps:
            ref = steps[0]
            if ref == 0 or any((s * ref.conjugate()).real <= 0 for s in steps):
                raise ValueError("trajectory grid must be strictly monotone")

    @property
    def genus(self) -> int:
        return self.states[0].genus

    @property
    def final(self) -> SymmetricPoint:
        return self.states[-1]

    def darboux_states(self) -> list:
        """Darboux points per grid value; ``None`` where the roots collide."""
        out = []
        for spt in self.states:
            try:
                out.append(from_symmetric(spt))
            except PoleCollision:
                out.append(None)
        return out


# ── State helpers ───────────────────────────────────────────────────────


def _pack(spt: SymmetricPoint) -> np.ndarray:
    return np.array([val(x) for x in spt.Q + spt.P], dtype=complex)


def _unpack(y: np.ndarray, g: int) -> SymmetricPoint:
    return SymmetricPoint(
        tuple(complex(x) for x in y[:g]), tuple(complex(x) for x in y[g:])
    )


def _as_symmetric(state) -> SymmetricPoint:
    if isinstance(state, DarbouxPoint):
        return to_symmetric(state)
    return state


def _at_tau(rt: ReducedTimes, k: int, value) -> ReducedTimes:
    tau = list(rt.tau)
    tau[k - 1] = value
    return rt.with_tau(tau)


def _check_state(rt, spt: SymmetricPoint) -> None:
    if spt.genus != rt.genus:
        raise ValueError(f"expected a genus-{rt.genus} state, got {spt.genus}")


# ── Vector field ────────────────────────────────────────────────────────


def _hamilton_field(ham: Callable, spt: SymmetricPoint, hbar) -> SymmetricPoint:
    g = spt.genus
    grads = partials(lambda xs: ham(xs[:g], xs[g:]).value, list(spt.Q + spt.P))
    return SymmetricPoint(
        tuple(x / hbar for x in grads[g:]), tuple(-x / hbar for x in grads[:g])
    )


def _darboux_field(k: int, rt: ReducedTimes, spt: SymmetricPoint) -> SymmetricPoint:
    pt = from_symmetric(spt)
    ev = evolution_reduced(k, rt, pt)
    hbar = rt.hbar
    seeded = DarbouxPoint(
        tuple(Dual(q, d / hbar) for q, d in zip(pt.q, ev.dq)),
        tuple(Dual(p, d / hbar) for p, d in zip(pt.p, ev.dp)),
    )
    moved = to_symmetric(seeded)
    return SymmetricPoint(
        tuple(der(x) for x in moved.Q), tuple(der(x) for x in moved.P)
    )


def vector_field(
    k: int, rt: ReducedTimes, state, route: str = "symmetric"
) -> SymmetricPoint:
    """(Q̇, Ṗ) of the τ_k flow, returned in a SymmetricPoint.

    ``route="darboux"`` goes through the roots and the explicit Darboux
    evolution instead; it raises PoleCollision where the roots coincide.
    """
    spt = _as_symmetric(state)
    if spt.genus == 0:
        return SymmetricPoint((), ())
    _check_state(rt, spt)
    if route == "darboux":
        return _darboux_field(k, rt, spt)
    if route != "symmetric":
        raise ValueError(f"unknown route '{route}'")
    return _hamilton_field(symmetric_hamiltonian_fn(k, rt), spt, rt.hbar)


# ── Integration ─────────────────────────────────────────────────────────


def _rk4_step(f: Callable, tau, y: np.ndarray, h) -> np.ndarray:
    k1 = f(tau, y)
    k2 = f(tau + h / 2, y + h / 2 * k1)
    k3 = f(tau + h / 2, y + h / 2 * k2)
    k4 = f(tau + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _blown_up(y: np.ndarray) -> bool:
    return not np.all(np.isfinite(y)) or np.linalg.norm(y) > config.BLOWUP_NORM


def integrate(
    k: int, rt0: ReducedTimes, state0, tau_end, n_steps: int
) -> Trajectory:
    """Fixed-step RK4 along τ_k from ``rt0.tau[k−1]`` to ``tau_end``.

    Steps are taken in pairs; one 2h step over each pair gives the Richardson
    estimate |y_{h,h} − y_{2h}|/15, recorded for both steps of the pair.  A
    trailing odd step is compared against two half steps instead.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be ≥ 1")
    flow_data(k, rt0)
    spt0 = _as_symmetric(state0)
    _check_state(rt0, spt0)
    g = spt0.genus
    tau0 = complex(rt0.tau[k - 1])
    h = (complex(tau_end) - tau0) / n_steps
    if h == 0:
        raise ValueError("tau_end must differ from the starting τ")

    evaluations = 0

    def f(tau, y: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        evaluations += 1
        return _pack(vector_field(k, _at_tau(rt0, k, tau), _unpack(y, g)))

    logger.debug("integrate τ_%d: %s → %s in %d steps", k, tau0, tau_end, n_steps)
    grid, states, estimates = [tau0], [spt0], []
    y = _pack(spt0)
    i = 0
    while i < n_steps:
        tau = tau0 + i * h
        try:
            if i + 1 < n_steps:
                mid = _rk4_step(f, tau, y, h)
                two = _rk4_step(f, tau + h, mid, h)
                big = _rk4_step(f, tau, y, 2 * h)
                est = float(np.linalg.norm(two - big)) / 15
                taken = [mid, two]
            else:
                one = _rk4_step(f, tau, y, h)
                half = _rk4_step(f, tau, y, h / 2)
                half = _rk4_step(f, tau + h / 2, half, h / 2)
                est = 16 * float(np.linalg.norm(half - one)) / 15
                taken = [one]
        except (OverflowError, ZeroDivisionError, P1LabError) as e:
            raise StepFailure(
                f"τ_{k} flow failed near τ = {tau}: {e}", tau=grid[-1], state=states[-1]
            ) from e
        for y_new in taken:
            if _blown_up(y_new) or not np.isfinite(est):
                raise StepFailure(
                    f"state norm exceeded {config.BLOWUP_NORM:.0e} after τ = "
                    f"{grid[-1]} (pole of the transcendent)",
                    tau=grid[-1],
                    state=states[-1],
                )
            i += 1
            grid.append(tau0 + i * h)
            states.append(_unpack(y_new, g))
            estimates.append(est)
            y = y_new

    meta = {
        "flow": k,
        "steps": n_steps,
        "h": h,
        "evaluations": evaluations,
        "richardson": estimates,
        "max_richardson": max(estimates),
        "error_estimate": float(sum(estimates)),
    }
    logger.debug("integrate τ_%d done: error estimate %.3e", k, meta["error_estimate"])
    return Trajectory(k, tuple(grid), tuple(states), meta)


def trajectory_curve_residual(traj: Trajectory, rt: ReducedTimes) -> dict:
    """max |on_curve_residual| over the reconstructable states of ``traj``."""
    worst, skipped = 0.0, 0
    for tau, spt in zip(traj.grid, traj.states):
        try:
            pt = from_symmetric(spt)
        except PoleCollision:
            skipped += 1
            continue
        Lt = build_Ltilde_symmetric(_at_tau(rt, traj.k, tau), spt)
        worst = max([worst] + [abs(x) for x in on_curve_residual(pt, Lt)])
    return {"residual": worst, "skipped": skipped}


# ── Zero curvature ──────────────────────────────────────────────────────


def zero_curvature_residual(dL: Mat2, L: Mat2, A: Mat2, hbar) -> float:
    """max coefficient of dL − [A, L] − ħ∂_λA."""
    R = dL - A.commutator(L) - A.diff().scale(hbar)
    return R.max_abs()


def _split(Lt: Mat2) -> tuple[Mat2, Mat2]:
    """(values, dual parts) of a Mat2 with dual coefficients."""
    return Lt.map(lambda e: Poly(tuple(e.values()))), Lt.derivatives()


def ltilde_tau_derivative(
    k: int, rt: ReducedTimes, state
) -> tuple[Mat2, Mat2]:
    """(L̃, ħ dL̃/dτ_k) with the flow and the explicit τ_k dependence seeded."""
    spt = _as_symmetric(state)
    d = vector_field(k, rt, spt)
    seeded = SymmetricPoint(
        tuple(Dual(val(x), dx) for x, dx in zip(spt.Q, d.Q)),
        tuple(Dual(val(x), dx) for x, dx in zip(spt.P, d.P)),
    )
    rt_d = _at_tau(rt, k, Dual(val(rt.tau[k - 1]), 1.0))
    L, dL = _split(build_Ltilde_symmetric(rt_d, seeded))
    return L, dL.scale(rt.hbar)


def verify_zero_curvature(k: int, rt: ReducedTimes, state) -> float:
    spt = _as_symmetric(state)
    L, dL = ltilde_tau_derivative(k, rt, spt)
    A = build_Atilde_symmetric(k, rt, spt)
    return zero_curvature_residual(dL, L, A, rt.hbar)


def verify_zero_curvature_general(
    alpha: DeformationVector, times, spt: SymmetricPoint
) -> float:
    """Residual of L_α[L̃] − [Ã_α, L̃] − ħ∂_λÃ_α at arbitrary times.

    The explicit time dependence is seeded as ħα; Q and P move by
    (∂Ham/∂P, −∂Ham/∂Q).
    """
    alpha, t = flow_data(alpha, times)
    g = spt.genus
    hbar = val(t.hbar)
    ham = symmetric_hamiltonian_fn(alpha, t)
    grads = partials(lambda xs: ham(xs[:g], xs[g:]).value, list(spt.Q + spt.P))
    seeded = SymmetricPoint(
        tuple(Dual(val(x), dx) for x, dx in zip(spt.Q, grads[g:])),
        tuple(Dual(val(x), -dx) for x, dx in zip(spt.P, grads[:g])),
    )
    t_d = IrregularTimes(
        t.r_inf,
        tuple(Dual(val(x), hbar * val(a)) for x, a in zip(t.t, alpha.alpha)),
        t.hbar,
    )
    L, dL = _split(build_Ltilde_symmetric(t_d, seeded))
    A = build_Atilde_symmetric(alpha, t, spt)
    return zero_curvature_residual(dL, L, A, hbar)


# ── Painlevé 1 ──────────────────────────────────────────────────────────


def _require_genus_one(traj: Trajectory) -> None:
    if traj.genus != 1:
        raise WrongGenus(f"Painlevé 1 needs a genus-1 trajectory (got {traj.genus})")


def painleve_rescale(traj: Trajectory) -> Trajectory:
    """t = 2^{6/5}τ, q̃ = 2^{−2/5}q, p̃ = 2^{2/5}p."""
    _require_genus_one(traj)
    return Trajectory(
        traj.k,
        tuple(SCALE_T * complex(x) for x in traj.grid),
        tuple(
            SymmetricPoint((SCALE_Q * s.Q[0],), (SCALE_P * s.P[0],))
            for s in traj.states
        ),
        {**traj.meta, "rescaled": True},
    )


def _p_gradient(ham: Callable, Q: Sequence, P: Sequence) -> list:
    """∂Ham/∂P by central differences of unit size; exact since Ham is quadratic in P."""
    out = []
    for i in range(len(P)):
        up = [x + (1.0 if j == i else 0.0) for j, x in enumerate(P)]
        down = [x - (1.0 if j == i else 0.0) for j, x in enumerate(P)]
        out.append((ham(Q, up).value - ham(Q, down).value) / 2)
    return out


def _qddot(rt: ReducedTimes, spt: SymmetricPoint):
    """q̈ along τ₁ by one dual pass through q̇ = ∂Ham/∂P / ħ."""
    d = vector_field(1, rt, spt)
    rt_d = _at_tau(rt, 1, Dual(val(rt.tau[0]), 1.0))
    ham = symmetric_hamiltonian_fn(1, rt_d)
    Q = [Dual(val(spt.Q[0]), d.Q[0])]
    P = [Dual(val(spt.P[0]), d.P[0])]
    return der(_p_gradient(ham, Q, P)[0]) / rt.hbar


def verify_painleve1(
    traj: Trajectory, hbar, route: str = "numeric", normalized: bool = False
) -> float:
    """max |ħ²q̈ − 24q² − 16τ|, or |ħ²q̃'' − 6q̃² − t| when ``normalized``.

    ``route="exact"`` differentiates the flow field at every grid point;
    ``route="numeric"`` takes central second differences over interior points.
    """
    _require_genus_one(traj)
    a, b = (6.0, 1.0) if normalized else (24.0, 16.0)
    if route == "exact":
        worst = 0.0
        for tau, spt in zip(traj.grid, traj.states):
            rt = ReducedTimes.canonical((complex(tau),), hbar)
            q, qdd = complex(spt.Q[0]), _qddot(rt, spt)
            x = complex(tau)
            if normalized:
                q, qdd, x = SCALE_Q * q, SCALE_Q / SCALE_T**2 * qdd, SCALE_T * x
            worst = max(worst, abs(hbar * hbar * qdd - a * q * q - b * x))
        return worst
    if route != "numeric":
        raise ValueError(f"unknown route '{route}'")
    if len(traj.grid) < 3:
        raise ValueError("the numeric route needs at least three grid points")
    src = painleve_rescale(traj) if normalized else traj
    x = [complex(v) for v in src.grid]
    q = [complex(s.Q[0]) for s in src.states]
    worst = 0.0
    for i in range(1, len(x) - 1):
        h = x[i + 1] - x[i]
        qdd = (q[i + 1] - 2 * q[i] + q[i - 1]) / (h * h)
        worst = max(worst, abs(hbar * hbar * qdd - a * q[i] * q[i] - b * x[i]))
    return worst


# ── Cross-checks ────────────────────────────────────────────────────────


def _advance(k: int, rt: ReducedTimes, spt: SymmetricPoint, dt, substeps: int):
    end = complex(rt.tau[k - 1]) + dt
    traj = integrate(k, rt, spt, end, substeps)
    return _at_tau(rt, k, traj.grid[-1]), traj.final


def verify_flow_commutativity(
    j: int, k: int, rt: ReducedTimes, state, dt, substeps: int = 4
) -> float:
    """max |(τ_j then τ_k) − (τ_k then τ_j)| over the symmetric coordinates."""
    if j == k:
        return 0.0
    spt = _as_symmetric(state)
    if spt.genus < 2:
        raise WrongGenus("two distinct flows need genus ≥ 2")
    rt_a, a = _advance(j, rt, spt, dt, substeps)
    _, ab = _advance(k, rt_a, a, dt, substeps)
    rt_b, b = _advance(k, rt, spt, dt, substeps)
    _, ba = _advance(j, rt_b, b, dt, substeps)
    return float(np.max(np.abs(_pack(ab) - _pack(ba))))


def _ham_value(k: int, rt: ReducedTimes, tau, spt: SymmetricPoint):
    ham = symmetric_hamiltonian_fn(k, _at_tau(rt, k, tau))
    return ham(list(spt.Q), list(spt.P)).value


def verify_energy_balance(traj: Trajectory, rt: ReducedTimes) -> float:
    """max |dHam/dτ_k − ∂Ham/∂τ_k| at the interior points of a trajectory.

    The total derivative is the five-point central difference of Ham along the
    stored states; the explicit one differentiates Ham in τ_k with (Q, P) held
    fixed.  The stencil error is O(h⁴), so a trajectory that does not solve the
    flow shows up at the level of its defect divided by h.  ``rt`` supplies the
    times other than τ_k, which is read from the grid.
    """
    n = len(traj.grid)
    if n < 5:
        raise ValueError("the energy balance needs at least five grid points")
    k = traj.k
    grid = [complex(t) for t in traj.grid]
    h = grid[1] - grid[0]
    spacing = max(abs((b - a) - h) for a, b in zip(grid, grid[1:]))
    if spacing > 1e-9 * abs(h):
        raise ValueError("the energy balance needs a uniform grid")
    energy = [
        complex(val(_ham_value(k, rt, tau, spt))) for tau, spt in zip(grid, traj.states)
    ]
    worst = 0.0
    for i in range(2, n - 2):
        total = (
            -energy[i + 2] + 8 * energy[i + 1] - 8 * energy[i - 1] + energy[i - 2]
        ) / (12 * h)
        explicit = der(_ham_value(k, rt, Dual(grid[i], 1.0), traj.states[i]))
        worst = max(worst, abs(total - explicit))
    logger.debug("energy balance over %d interior points: %.3e", n - 4, worst)
    return worst
