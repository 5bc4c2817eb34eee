"""
Test Suite — Lax Matrices and Gauges
====================================

L, Ľ, L̃ and A, Ǎ, Ã by the Darboux route and by the symmetric route,
against the canonical closed forms at genus 0 through 3.

Run:  python -m pytest tests/test_lax.py -v
"""

import numpy as np
import pytest

from p1lab.algebra import Mat2, Poly
from p1lab.errors import NotCanonical, PoleCollision
from p1lab.ham import to_symmetric
from p1lab.lax import (
    DarbouxPoint,
    SymmetricPoint,
    build_A,
    build_Atilde_symmetric,
    build_L,
    build_Ltilde_symmetric,
    classical_curve_residual,
    darboux_pipeline,
    flow_data,
    gauge_matrices,
    lcheck_pole_leak,
    on_curve_residual,
    point_from_json,
    spectral_curve,
    trace_law,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    tau_tangent_vector,
)


# ── Helpers ──────────────────────────────────────────────────────────────


def rand_c(rng: np.random.Generator, n: int, scale: float = 0.5) -> tuple:
    return tuple(scale * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)))


def rand_point(rng: np.random.Generator, g: int) -> DarbouxPoint:
    angles = 2 * np.pi * (np.arange(g) + 0.2 * rng.uniform(-1, 1, g)) / max(g, 1)
    return DarbouxPoint(tuple(np.exp(1j * angles)), rand_c(rng, g))


def rand_times(rng: np.random.Generator, g: int) -> IrregularTimes:
    r = g + 3
    t = list(rand_c(rng, 2 * r - 2, 0.4))
    t[2 * r - 4] = 2.0 + rand_c(rng, 1, 0.3)[0]
    return IrregularTimes(r, tuple(t))


# ── Points ───────────────────────────────────────────────────────────────


class TestPoints:
    def test_darboux_from_json(self):
        pt = point_from_json({"q": [[0.5, 0], [-0.5, 0]], "p": [0.1, [0, 1]]})
        assert isinstance(pt, DarbouxPoint)
        assert pt.p == (0.1 + 0j, 1j)

    def test_symmetric_from_json(self):
        spt = point_from_json({"Q": [1], "P": [2]})
        assert isinstance(spt, SymmetricPoint)
        assert spt.genus == 1

    @pytest.mark.parametrize(
        "bad", [[1, 2], {"q": [1]}, {"Q": [1], "p": [2]}, {"q": [1, 2], "p": [1]}]
    )
    def test_malformed(self, bad):
        with pytest.raises(ValueError):
            point_from_json(bad)

    def test_colliding_singularities(self):
        with pytest.raises(PoleCollision):
            DarbouxPoint((0.3, 0.3), (1.0, 2.0))


# ── Airy (g = 0) ─────────────────────────────────────────────────────────


class TestAiry:
    def test_companion_matrix(self):
        t = IrregularTimes.canonical(())
        L = build_L(t, DarbouxPoint((), ())).to_poly()
        assert L.distance(Mat2(0.0, 1.0, Poly((0, 1)), 0.0)) < 1e-14

    def test_curve(self):
        P1, P2 = spectral_curve(IrregularTimes.canonical(()), DarbouxPoint((), ()))
        assert P1.is_zero
        assert P2.distance(Poly((0, -1))) < 1e-14


# ── Canonical closed forms ───────────────────────────────────────────────


class TestGenusOne:
    tau, q, p = 0.3, 0.7, -0.4

    def expected_Ltilde(self) -> Mat2:
        q, p, tau = self.q, self.p, self.tau
        return Mat2(p, Poly((-q, 1)), Poly((q * q + 2 * tau, q, 1)), -p)

    def test_darboux_route(self):
        t = IrregularTimes.canonical((self.tau,))
        mats = darboux_pipeline(t, DarbouxPoint((self.q,), (self.p,)))
        assert mats["Ltilde"].distance(self.expected_Ltilde()) < 1e-12
        # G₁ is the identity at canonical times
        assert mats["Lcheck"].distance(mats["Ltilde"]) < 1e-12

    def test_symmetric_route(self):
        rt = ReducedTimes.canonical((self.tau,))
        Lt = build_Ltilde_symmetric(rt, SymmetricPoint((self.q,), (self.p,)))
        assert Lt.distance(self.expected_Ltilde()) < 1e-12

    def test_L_pole_parts(self):
        t = IrregularTimes.canonical((self.tau,))
        L = build_L(t, DarbouxPoint((self.q,), (self.p,)))
        assert L.a22.residue(self.q) == pytest.approx(1.0)
        assert L.a21.residue(self.q) == pytest.approx(-self.p)
        expected = Poly((self.p**2 - self.q**3 - 2 * self.tau * self.q, 2 * self.tau, 0, 1))
        assert L.a21.poly.distance(expected) < 1e-12

    def test_Atilde_both_routes(self):
        rt = ReducedTimes.canonical((self.tau,))
        expected = Mat2(0.0, 2.0, Poly((4 * self.q, 2)), 0.0)
        spt = SymmetricPoint((self.q,), (self.p,))
        assert build_Atilde_symmetric(1, rt, spt).distance(expected) < 1e-12
        mats = darboux_pipeline(
            irregular_from_reduced(rt),
            DarbouxPoint((self.q,), (self.p,)),
            tau_tangent_vector(1, rt),
        )
        assert mats["Atilde"].distance(expected) < 1e-10

    def test_gauge_is_identity(self):
        t = IrregularTimes.canonical((self.tau,))
        G1, _ = gauge_matrices(t, DarbouxPoint((self.q,), (self.p,)))
        assert G1.distance(Mat2.identity()) < 1e-15


class TestGenusTwo:
    tau = (0.2, -0.1)
    Q = (0.5, -0.3)
    P = (0.25, 0.6)

    def test_Ltilde(self):
        (t1, t2), (Q1, Q2), (P1, P2) = self.tau, self.Q, self.P
        Lt = build_Ltilde_symmetric(
            ReducedTimes.canonical(self.tau), SymmetricPoint(self.Q, self.P)
        )
        L11 = Poly((P1 + Q1 * P2, -P2))
        L12 = Poly((Q2, -Q1, 1))
        L21 = Poly(
            (
                -P2**2 + Q1 * (Q1**2 - 2 * Q2) + 2 * Q1 * t1 + 2 * t2,
                Q1**2 - Q2 + 2 * t1,
                Q1,
                1,
            )
        )
        assert Lt.distance(Mat2(L11, L12, L21, -L11)) < 1e-12

    def test_Atilde_tau2(self):
        Q1 = self.Q[0]
        At = build_Atilde_symmetric(
            2, ReducedTimes.canonical(self.tau), SymmetricPoint(self.Q, self.P)
        )
        assert At.distance(Mat2(0.0, 2.0, Poly((4 * Q1, 2)), 0.0)) < 1e-12

    def test_A12_residues(self):
        rt = ReducedTimes.canonical(self.tau)
        pt = DarbouxPoint((0.6 + 0.2j, -0.5 + 0.1j), (0.3, -0.2))
        A = build_A(tau_tangent_vector(2, rt), irregular_from_reduced(rt), pt)
        d = pt.q[0] - pt.q[1]
        assert A.a12.poly.is_zero
        assert A.a12.residue(pt.q[0]) == pytest.approx(2 / d)
        assert A.a12.residue(pt.q[1]) == pytest.approx(-2 / d)


class TestGenusThree:
    tau = (0.1, 0.2, -0.15)
    Q = (0.4, -0.2, 0.1)
    P = (0.3, -0.5, 0.2)

    def test_Ltilde(self):
        (t1, t2, t3), (Q1, Q2, Q3), (P1, P2, P3) = self.tau, self.Q, self.P
        Lt = build_Ltilde_symmetric(
            ReducedTimes.canonical(self.tau), SymmetricPoint(self.Q, self.P)
        )
        L11 = Poly((P1 + Q2 * P3 + Q1 * P2, -(P2 + Q1 * P3), P3))
        L12 = Poly((-Q3, Q2, -Q1, 1))
        L21 = Poly(
            (
                2 * P2 * P3 + Q1 * P3**2 + Q1**4 - 3 * Q2 * Q1**2 + 2 * Q3 * Q1
                + Q2**2 + t1**2 + 2 * (Q1**2 - Q2) * t1 + 2 * Q1 * t2 + 2 * t3,
                -P3**2 + Q1**3 + Q3 - 2 * Q1 * Q2 + 2 * Q1 * t1 + 2 * t2,
                Q1**2 - Q2 + 2 * t1,
                Q1,
                1,
            )
        )
        assert Lt.distance(Mat2(L11, L12, L21, -L11)) < 1e-12

    def test_Atilde_tau3(self):
        At = build_Atilde_symmetric(
            3, ReducedTimes.canonical(self.tau), SymmetricPoint(self.Q, self.P)
        )
        assert At.distance(Mat2(0.0, 2.0, Poly((4 * self.Q[0], 2)), 0.0)) < 1e-12


# ── General times ────────────────────────────────────────────────────────


class TestGeneralTimes:
    @pytest.mark.parametrize("g", [1, 2, 3, 4])
    def test_routes_agree(self, g):
        rng = np.random.default_rng(100 + g)
        t, pt = rand_times(rng, g), rand_point(rng, g)
        alpha = DeformationVector(rand_c(rng, 2 * g + 4))
        mats = darboux_pipeline(t, pt, alpha)
        spt = to_symmetric(pt)
        assert mats["Ltilde"].distance(build_Ltilde_symmetric(t, spt)) < 1e-8
        assert mats["Atilde"].distance(build_Atilde_symmetric(alpha, t, spt)) < 1e-8

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_trace_law(self, g):
        rng = np.random.default_rng(200 + g)
        t, pt = rand_times(rng, g), rand_point(rng, g)
        alpha = DeformationVector(rand_c(rng, 2 * g + 4))
        At = darboux_pipeline(t, pt, alpha)["Atilde"]
        assert At.trace().distance(trace_law(alpha, t, pt)) < 1e-8

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_points_lie_on_the_curve(self, g):
        rng = np.random.default_rng(300 + g)
        t, pt = rand_times(rng, g), rand_point(rng, g)
        Lt = darboux_pipeline(t, pt)["Ltilde"]
        assert max(abs(x) for x in on_curve_residual(pt, Lt)) < 1e-8
        t0 = IrregularTimes(t.r_inf, t.t, 0j)
        assert max(abs(x) for x in classical_curve_residual(t0, pt)) < 1e-10

    def test_gauge_removes_every_pole(self):
        rng = np.random.default_rng(400)
        t, pt = rand_times(rng, 3), rand_point(rng, 3)
        assert lcheck_pole_leak(build_L(t, pt), pt, t.hbar) < 1e-9


# ── Flow resolution ──────────────────────────────────────────────────────


class TestFlowData:
    def test_index_needs_reduced_times(self):
        with pytest.raises(NotCanonical):
            flow_data(1, IrregularTimes.canonical((0.1,)))

    def test_index_needs_canonical_times(self):
        rt = ReducedTimes(4, (0.1, 0, 0), 0, 1, (0.2,))
        with pytest.raises(NotCanonical):
            flow_data(1, rt)

    def test_vector_passes_through(self):
        alpha = DeformationVector((0, 0, 0, 0, 1, 0))
        rt = ReducedTimes.canonical((0.2,))
        got, t = flow_data(alpha, rt)
        assert got is alpha
        assert t.r_inf == 4

    def test_genus_mismatch(self):
        with pytest.raises(ValueError):
            build_Ltilde_symmetric(
                ReducedTimes.canonical((0.1,)), SymmetricPoint((1, 2), (0, 0))
            )
