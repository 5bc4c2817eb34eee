"""
Test Suite — Deformation Coefficients and Isospectral Hamiltonians
===================================================================

ν, μ, c from the linear systems, their canonical closed forms, and the
isospectral Hamiltonians by every route.

Run:  python -m pytest tests/test_coeffs.py -v
"""

import numpy as np
import pytest

from p1lab.coeffs import (
    F_poly,
    H_closed_form,
    H_symmetric,
    extend_nu,
    lu_solve,
    mu_closed_form,
    nu_reduced,
    solve_c,
    solve_H,
    solve_mu,
    solve_nu,
    tau_toeplitz_inverse,
    toeplitz_M,
)
from p1lab.errors import DegenerateTimes, IllConditioned, IndexOutOfRange, NotCanonical
from p1lab.symfun import elem_from_roots, momenta_from_symmetric
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    tau_tangent_vector,
)


# ── Helpers ──────────────────────────────────────────────────────────────


def rand_c(seed: int, n: int, scale: float = 1.0) -> tuple:
    rng = np.random.default_rng(seed)
    return tuple(scale * (rng.normal(size=n) + 1j * rng.normal(size=n)))


def general_times(seed: int, g: int) -> IrregularTimes:
    r = g + 3
    T_inf, (T1, dT2) = rand_c(seed, r - 1, 0.3), rand_c(seed + 1, 2, 0.2)
    return irregular_from_reduced(
        ReducedTimes(r, T_inf, T1, 1.0 + dT2, rand_c(seed + 2, g, 0.3))
    )


# ── ν ────────────────────────────────────────────────────────────────────


class TestNu:
    def test_genus_two_canonical(self):
        rt = ReducedTimes.canonical((0.2, -0.1))
        t = irregular_from_reduced(rt)
        nu1 = solve_nu(tau_tangent_vector(1, rt), t)
        nu2 = solve_nu(tau_tangent_vector(2, rt), t)
        assert np.allclose(nu1, [0, 0, 2 / 3, 0], atol=1e-14)
        assert np.allclose(nu2, [0, 0, 0, 2], atol=1e-14)

    def test_genus_three_tau1(self):
        tau = (0.1, 0.2, -0.15)
        rt = ReducedTimes.canonical(tau)
        nu = solve_nu(tau_tangent_vector(1, rt), irregular_from_reduced(rt))
        assert nu[2] == pytest.approx(2 / 5)
        assert nu[4] == pytest.approx(-2 / 5 * tau[0])

    @pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
    def test_reduced_form_matches_solve(self, g):
        rt = ReducedTimes.canonical(rand_c(g, g, 0.5))
        t = irregular_from_reduced(rt)
        for j in range(1, g + 1):
            nu = solve_nu(tau_tangent_vector(j, rt), t)
            for k in range(1, g + 1):
                assert abs(nu_reduced(j, k, rt) - nu[k + 1]) < 1e-10

    def test_reduced_form_needs_canonical(self):
        rt = ReducedTimes(5, (0.1, 0, 0, 0), 0, 1, (0.2, 0.3))
        with pytest.raises(NotCanonical):
            nu_reduced(1, 1, rt)

    def test_reduced_form_index_range(self):
        rt = ReducedTimes.canonical((0.2, 0.3))
        with pytest.raises(IndexOutOfRange):
            nu_reduced(3, 1, rt)
        with pytest.raises(IndexOutOfRange):
            nu_reduced(1, 0, rt)

    def test_degenerate_toeplitz(self):
        with pytest.raises(DegenerateTimes):
            IrregularTimes(4, (0.1, 0, 0.2, 0, 0, 0))

    def test_extension_continues_power_sums(self):
        # Σ_j μ_j q_j^{m−1} = ν_m holds past m = g
        q = rand_c(7, 3)
        rt = ReducedTimes.canonical(rand_c(8, 3, 0.4))
        nu = solve_nu(tau_tangent_vector(2, rt), irregular_from_reduced(rt))
        mu = solve_mu(nu, q)
        for m, value in enumerate(extend_nu(nu, q, 3), start=4):
            assert abs(sum(mj * qj ** (m - 1) for mj, qj in zip(mu, q)) - value) < 1e-9


# ── F-polynomials and the τ-Toeplitz inverse ────────────────────────────


class TestFPolynomials:
    def test_low_orders(self):
        tau = (0.3, -0.2, 0.5)
        assert F_poly(1, tau) == pytest.approx(-0.3)
        assert F_poly(2, tau) == pytest.approx(0.2)
        assert F_poly(3, tau) == pytest.approx(0.09 - 0.5)

    def test_generating_function(self):
        tau = rand_c(9, 5, 0.5)
        # series of 1/(1 + Σ τ_j x^{j+1}) by long division
        den = [1.0 + 0j, 0j] + list(tau)
        inv = [1.0 + 0j]
        for n in range(1, 7):
            inv.append(-sum(den[m] * inv[n - m] for m in range(1, min(n, len(den) - 1) + 1)))
        for i in range(1, 6):
            assert abs(F_poly(i, tau) - inv[i + 1]) < 1e-12

    def test_index_must_be_positive(self):
        with pytest.raises(IndexOutOfRange):
            F_poly(0, (0.1,))

    def test_needs_enough_times(self):
        with pytest.raises(IndexOutOfRange, match="τ₁..τ_3"):
            F_poly(3, (0.3, -0.2))
        assert F_poly(2, (0.3, -0.2)) == pytest.approx(0.2)

    @pytest.mark.parametrize("g", [1, 3, 6])
    def test_toeplitz_inverse(self, g):
        rt = ReducedTimes.canonical(rand_c(g + 10, g, 0.5))
        M = np.array(toeplitz_M(irregular_from_reduced(rt)), dtype=complex)
        Minv = np.array(tau_toeplitz_inverse(rt), dtype=complex)
        assert np.allclose(M @ Minv, np.eye(g + 2), atol=1e-12)


# ── μ and c ──────────────────────────────────────────────────────────────


class TestMuAndC:
    def test_genus_two_closed_values(self):
        rt = ReducedTimes.canonical((0.2, -0.1))
        q = (0.7 + 0.1j, -0.4 + 0.3j)
        d = q[0] - q[1]
        assert mu_closed_form(2, 1, rt, q) == pytest.approx(2 / d)
        assert mu_closed_form(2, 2, rt, q) == pytest.approx(-2 / d)
        assert mu_closed_form(1, 1, rt, q) == pytest.approx(-2 * q[1] / (3 * d))
        assert mu_closed_form(1, 2, rt, q) == pytest.approx(2 * q[0] / (3 * d))

    @pytest.mark.parametrize("g", [2, 3, 4])
    def test_closed_form_matches_solve(self, g):
        rt = ReducedTimes.canonical(rand_c(g + 20, g, 0.4))
        t = irregular_from_reduced(rt)
        q = rand_c(g + 30, g)
        for k in range(1, g + 1):
            mu = solve_mu(solve_nu(tau_tangent_vector(k, rt), t), q)
            for i in range(1, g + 1):
                assert abs(mu_closed_form(k, i, rt, q) - mu[i - 1]) < 1e-9

    def test_c_vanishes_along_tau_at_canonical_times(self):
        rt = ReducedTimes.canonical((0.2, -0.1, 0.05))
        t = irregular_from_reduced(rt)
        for k in range(1, 4):
            assert np.allclose(solve_c(tau_tangent_vector(k, rt), t), 0, atol=1e-14)

    def test_lu_solve(self):
        A = [[2, 1], [1, 3]]
        assert np.allclose(lu_solve(A, [3, 5]), [0.8, 1.4])

    def test_lu_solve_ill_conditioned(self):
        with pytest.raises(IllConditioned):
            lu_solve([[1, 1], [1, 1 + 1e-15]], [1, 2])


# ── Isospectral Hamiltonians ─────────────────────────────────────────────


class TestHamiltonians:
    def test_genus_one(self):
        tau, q, p = 0.3, 0.7 + 0.2j, -0.4 + 0.1j
        H = solve_H(IrregularTimes.canonical((tau,)), (q,), (p,))
        assert H.H[0] == pytest.approx(p**2 - q**3 - 2 * tau * q)

    def test_genus_two(self):
        t1, t2 = 0.2, -0.1
        q1, q2 = 0.7 + 0.1j, -0.4 + 0.3j
        p1, p2 = 0.3 - 0.2j, 0.5 + 0.4j
        H = solve_H(IrregularTimes.canonical((t1, t2)), (q1, q2), (p1, p2))
        d = q1 - q2
        H0 = (
            (q1 * p2**2 - q2 * p1**2) / d
            - (p1 - p2) / d
            + (q1 + q2) * q1 * q2 * (q1**2 + q2**2 + 2 * t1)
            + 2 * t2 * q1 * q2
        )
        assert H.H[0] == pytest.approx(H0)

    @pytest.mark.parametrize("g", [1, 2, 3, 5])
    def test_closed_form_matches_solve(self, g):
        t = general_times(g + 40, g)
        q, p = rand_c(g + 50, g), rand_c(g + 60, g)
        H = solve_H(t, q, p)
        for i in range(1, g + 1):
            assert abs(H_closed_form(i, t, q, p) - H.H[i - 1]) < 1e-8

    @pytest.mark.parametrize("g", [1, 2, 3, 4])
    def test_symmetric_matches_darboux(self, g):
        t = general_times(g + 70, g)
        q, P = rand_c(g + 80, g), rand_c(g + 90, g)
        Q = elem_from_roots(q).e[1:]
        p = momenta_from_symmetric(Q, P, q)
        assert np.allclose(H_symmetric(t, Q, P).H, solve_H(t, q, p).H, atol=1e-8)

    def test_airy_has_no_hamiltonians(self):
        t = IrregularTimes.canonical(())
        assert solve_H(t, (), ()).H == ()
        assert H_symmetric(t, (), ()).H == ()

    def test_wrong_number_of_points(self):
        with pytest.raises(ValueError):
            solve_H(IrregularTimes.canonical((0.1, 0.2)), (0.5,), (0.1,))
