"""
Test Suite — τ-Flows, Zero Curvature and Painlevé 1
===================================================

RK4 trajectories in symmetric coordinates, the compatibility equation,
the genus-one reduction to Painlevé 1 and the flow cross-checks.

Run:  python -m pytest tests/test_flow.py -v
"""

import numpy as np
import pytest

from p1lab.algebra import Mat2, Poly
from p1lab.errors import StepFailure, WrongGenus
from p1lab.ham import to_symmetric
from p1lab.lax import DarbouxPoint, SymmetricPoint, build_Atilde_symmetric
from p1lab.flow import (
    Trajectory,
    integrate,
    ltilde_tau_derivative,
    painleve_rescale,
    trajectory_curve_residual,
    vector_field,
    verify_energy_balance,
    verify_flow_commutativity,
    verify_painleve1,
    verify_zero_curvature,
    verify_zero_curvature_general,
    zero_curvature_residual,
)
from p1lab.times import DeformationVector, IrregularTimes, ReducedTimes


# ── Helpers ──────────────────────────────────────────────────────────────


P1_START = ReducedTimes.canonical((0j,))
P1_STATE = SymmetricPoint((1.0 + 0j,), (0j,))
# q₁ = q₂ = 0: the Darboux chart is singular here
COLLISION = SymmetricPoint((0j, 0j), (0.3 + 0j, -0.2 + 0j))
COLLISION_TIMES = ReducedTimes.canonical((0.1 + 0j, -0.05 + 0j))


def rand_c(rng: np.random.Generator, n: int, scale: float = 0.5) -> tuple:
    return tuple(scale * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)))


def rand_state(rng: np.random.Generator, g: int) -> SymmetricPoint:
    angles = 2 * np.pi * (np.arange(g) + 0.2 * rng.uniform(-1, 1, g)) / g
    return to_symmetric(DarbouxPoint(tuple(np.exp(1j * angles)), rand_c(rng, g)))


# ── Trajectory ───────────────────────────────────────────────────────────


class TestTrajectory:
    def test_needs_points(self):
        with pytest.raises(ValueError):
            Trajectory(1, (), ())

    def test_lengths_must_match(self):
        with pytest.raises(ValueError):
            Trajectory(1, (0.0, 0.1), (P1_STATE,))

    def test_grid_must_be_monotone(self):
        with pytest.raises(ValueError):
            Trajectory(1, (0.0, 0.1, 0.05), (P1_STATE,) * 3)

    def test_darboux_states(self):
        traj = Trajectory(1, (0.0,), (SymmetricPoint((5.0, 6.0), (0.0, 1.0)),))
        (pt,) = traj.darboux_states()
        assert np.allclose(pt.q, (2.0, 3.0))


# ── Integration ──────────────────────────────────────────────────────────


class TestIntegrate:
    def test_grid_and_meta(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 10)
        assert len(traj.grid) == 11
        assert traj.grid[-1] == pytest.approx(0.1)
        assert traj.meta["steps"] == 10
        assert len(traj.meta["richardson"]) == 10
        assert traj.meta["error_estimate"] < 1e-6

    def test_odd_step_count(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 7)
        assert len(traj.states) == 8
        assert len(traj.meta["richardson"]) == 7

    def test_backward_integration_returns(self):
        fwd = integrate(1, P1_START, P1_STATE, 0.2, 40)
        back = integrate(1, P1_START.with_tau((0.2,)), fwd.final, 0.0, 40)
        assert back.final.Q[0] == pytest.approx(1.0, abs=1e-8)
        assert back.final.P[0] == pytest.approx(0.0, abs=1e-8)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            integrate(1, P1_START, P1_STATE, 0.1, 0)
        with pytest.raises(ValueError):
            integrate(1, P1_START, P1_STATE, 0.0, 10)

    def test_pole_raises_step_failure(self):
        with pytest.raises(StepFailure) as info:
            integrate(1, P1_START, P1_STATE, 2.0, 200)
        assert info.value.tau is not None
        assert isinstance(info.value.state, SymmetricPoint)

    @pytest.mark.parametrize("g", [2, 3])
    def test_routes_give_the_same_field(self, g):
        rng = np.random.default_rng(10 + g)
        rt = ReducedTimes.canonical(rand_c(rng, g, 0.3))
        spt = rand_state(rng, g)
        for k in range(1, g + 1):
            a = vector_field(k, rt, spt)
            b = vector_field(k, rt, spt, route="darboux")
            assert np.allclose(a.Q + a.P, b.Q + b.P, atol=1e-9)

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            vector_field(1, P1_START, P1_STATE, route="euler")

    def test_curve_residual_along_trajectory(self):
        rng = np.random.default_rng(20)
        rt = ReducedTimes.canonical(rand_c(rng, 2, 0.3))
        traj = integrate(2, rt, rand_state(rng, 2), rt.tau[1] + 0.05, 5)
        out = trajectory_curve_residual(traj, rt)
        assert out["residual"] < 1e-8
        assert out["skipped"] == 0

    def test_fourth_order_convergence(self):
        ref = integrate(1, P1_START, P1_STATE, 0.1, 640).final

        def err(n):
            end = integrate(1, P1_START, P1_STATE, 0.1, n).final
            return abs(end.Q[0] - ref.Q[0]) + abs(end.P[0] - ref.P[0])

        ratio = err(10) / err(20)
        assert 12 < ratio < 20


# ── Zero curvature ───────────────────────────────────────────────────────


class TestZeroCurvature:
    @pytest.mark.parametrize("g", [1, 2, 3, 4])
    def test_tau_flows(self, g):
        rng = np.random.default_rng(30 + g)
        rt = ReducedTimes.canonical(rand_c(rng, g, 0.3))
        spt = rand_state(rng, g)
        for k in range(1, g + 1):
            assert verify_zero_curvature(k, rt, spt) < 1e-8

    @pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
    def test_many_random_states(self, g):
        rng = np.random.default_rng(90 + g)
        worst = 0.0
        for _ in range(100 if g <= 2 else 25):
            rt = ReducedTimes.canonical(rand_c(rng, g, 0.3))
            spt = rand_state(rng, g)
            k = int(rng.integers(1, g + 1))
            worst = max(worst, verify_zero_curvature(k, rt, spt))
        assert worst < 1e-8

    def test_residual_is_linear_in_a_perturbation(self):
        rng = np.random.default_rng(35)
        rt = ReducedTimes.canonical(rand_c(rng, 2, 0.3))
        spt = rand_state(rng, 2)
        L, dL = ltilde_tau_derivative(1, rt, spt)
        A = build_Atilde_symmetric(1, rt, spt)
        bump = Mat2(Poly((0.3, 1.0)), 0.0, 0.5, Poly((-0.3,)))

        def residual(eps):
            return zero_curvature_residual(dL, L, A + bump.scale(eps), rt.hbar)

        assert residual(0.0) < 1e-8
        assert residual(1e-6) > 1e-8
        assert residual(2e-6) / residual(1e-6) == pytest.approx(2.0, rel=1e-3)

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_general_deformation(self, g):
        rng = np.random.default_rng(40 + g)
        r = g + 3
        t = list(rand_c(rng, 2 * r - 2, 0.4))
        t[2 * r - 4] = 2.0 + rand_c(rng, 1, 0.3)[0]
        alpha = DeformationVector(rand_c(rng, 2 * r - 2))
        residual = verify_zero_curvature_general(
            alpha, IrregularTimes(r, tuple(t)), rand_state(rng, g)
        )
        assert residual < 1e-8


# ── Painlevé 1 ───────────────────────────────────────────────────────────


class TestPainleve:
    def test_exact_route(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 20)
        assert verify_painleve1(traj, 1.0, route="exact") < 1e-10

    def test_numeric_route(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 400)
        assert verify_painleve1(traj, 1.0, route="numeric") < 1e-4

    def test_normalized_form(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 20)
        assert verify_painleve1(traj, 1.0, route="exact", normalized=True) < 1e-10
        long = integrate(1, P1_START, P1_STATE, 0.1, 400)
        assert verify_painleve1(long, 1.0, route="numeric", normalized=True) < 1e-4

    def test_rescale(self):
        traj = painleve_rescale(integrate(1, P1_START, P1_STATE, 0.1, 4))
        assert traj.meta["rescaled"]
        assert traj.grid[-1] == pytest.approx(2 ** 1.2 * 0.1)
        assert traj.states[0].Q[0] == pytest.approx(2 ** -0.4)

    def test_numeric_route_needs_three_points(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 1)
        with pytest.raises(ValueError):
            verify_painleve1(traj, 1.0, route="numeric")

    def test_unknown_route(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 4)
        with pytest.raises(ValueError):
            verify_painleve1(traj, 1.0, route="spline")

    def test_needs_genus_one(self):
        traj = Trajectory(1, (0.0,), (SymmetricPoint((5.0, 6.0), (0.0, 1.0)),))
        with pytest.raises(WrongGenus):
            verify_painleve1(traj, 1.0)
        with pytest.raises(WrongGenus):
            painleve_rescale(traj)


# ── Cross-checks ─────────────────────────────────────────────────────────


class TestCrossChecks:
    def test_flows_commute(self):
        rng = np.random.default_rng(50)
        rt = ReducedTimes.canonical(rand_c(rng, 2, 0.3))
        assert verify_flow_commutativity(1, 2, rt, rand_state(rng, 2), 1e-3) < 1e-8

    def test_same_flow_trivially_commutes(self):
        assert verify_flow_commutativity(1, 1, P1_START, P1_STATE, 1e-3) == 0.0

    def test_commutativity_needs_two_flows(self):
        with pytest.raises(WrongGenus):
            verify_flow_commutativity(1, 2, P1_START, P1_STATE, 1e-3)

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_energy_balance(self, g):
        rng = np.random.default_rng(60 + g)
        rt = ReducedTimes.canonical(rand_c(rng, g, 0.3))
        traj = integrate(1, rt, rand_state(rng, g), rt.tau[0] + 0.05, 20)
        assert verify_energy_balance(traj, rt) < 1e-7

    @pytest.mark.parametrize("g", [2, 3])
    def test_energy_balance_detects_a_perturbed_state(self, g):
        rng = np.random.default_rng(70 + g)
        rt = ReducedTimes.canonical(rand_c(rng, g, 0.3))
        traj = integrate(1, rt, rand_state(rng, g), rt.tau[0] + 0.05, 20)
        states = list(traj.states)
        bumped = states[10]
        states[10] = SymmetricPoint((bumped.Q[0] + 1e-3,) + bumped.Q[1:], bumped.P)
        broken = Trajectory(1, traj.grid, tuple(states), traj.meta)
        assert verify_energy_balance(broken, rt) > 1e-3
        assert verify_energy_balance(broken, rt) > 1e3 * verify_energy_balance(traj, rt)

    def test_energy_balance_rejects_unrelated_states(self):
        rng = np.random.default_rng(80)
        rt = ReducedTimes.canonical(rand_c(rng, 2, 0.3))
        grid = tuple(rt.tau[0] + 0.01 * i for i in range(6))
        traj = Trajectory(1, grid, tuple(rand_state(rng, 2) for _ in grid))
        assert verify_energy_balance(traj, rt) > 1e-2

    def test_energy_balance_needs_five_points(self):
        traj = integrate(1, P1_START, P1_STATE, 0.1, 3)
        with pytest.raises(ValueError, match="five"):
            verify_energy_balance(traj, P1_START)

    def test_energy_balance_needs_uniform_grid(self):
        grid = (0.0, 0.01, 0.02, 0.04, 0.05)
        traj = Trajectory(1, grid, (P1_STATE,) * 5)
        with pytest.raises(ValueError, match="uniform"):
            verify_energy_balance(traj, P1_START)

    def test_commutativity_defect_shrinks_with_the_step(self):
        rng = np.random.default_rng(51)
        rt = ReducedTimes.canonical(rand_c(rng, 2, 0.3))
        spt = rand_state(rng, 2)
        coarse = verify_flow_commutativity(1, 2, rt, spt, 0.1)
        fine = verify_flow_commutativity(1, 2, rt, spt, 0.05)
        # an O(dt²) defect would only drop by 4
        assert coarse / fine > 12


# ── Collisions ───────────────────────────────────────────────────────────


class TestCollisions:
    """Symmetric coordinates stay regular where two q_i coincide."""

    def test_start_on_a_collision(self):
        rt = COLLISION_TIMES
        traj = integrate(1, rt, COLLISION, rt.tau[0] + 0.05, 10)
        pts = traj.darboux_states()
        assert pts[0] is None
        assert all(pt is not None for pt in pts[1:])
        assert traj.meta["max_richardson"] < 1e-8
        out = trajectory_curve_residual(traj, rt)
        assert out["skipped"] == 1
        assert out["residual"] < 1e-6

    def test_trajectory_through_a_collision(self):
        rt = COLLISION_TIMES
        tau0 = rt.tau[0]
        back = integrate(1, rt, COLLISION, tau0 - 0.05, 10)
        start = rt.with_tau((back.grid[-1], rt.tau[1]))
        traj = integrate(1, start, back.final, tau0 + 0.05, 20)
        assert traj.grid[10] == pytest.approx(tau0, abs=1e-14)
        assert traj.meta["max_richardson"] < 1e-8

        def disc(spt):
            return abs(spt.Q[0] ** 2 - 4 * spt.Q[1])

        middle = traj.states[10]
        assert np.allclose(middle.Q + middle.P, COLLISION.Q + COLLISION.P, atol=1e-9)
        assert disc(traj.states[0]) > 100 * disc(middle)
        assert disc(traj.states[-1]) > 100 * disc(middle)
        direct = integrate(1, rt, COLLISION, tau0 + 0.05, 10)
        assert np.allclose(
            traj.final.Q + traj.final.P, direct.final.Q + direct.final.P, atol=1e-8
        )
