"""
Test Suite — Exact Algebra Kernel
=================================

Dual numbers, dense polynomials, pole expansions and 2×2 matrices:
the arithmetic every Lax construction is built on.

Run:  python -m pytest tests/test_algebra.py -v
"""

import numpy as np
import pytest

from p1lab.algebra import (
    Dual,
    Mat2,
    PoleExpansion,
    Poly,
    complex_from_json,
    complex_to_json,
    mat2_from_json,
    mat2_to_json,
    partials,
    poly_diff,
    poly_eval,
    poly_mul,
    polypart_mul,
    reciprocal_monic,
)
from p1lab.errors import PoleCollision, ResidueMismatch


# ── Helpers ──────────────────────────────────────────────────────────────


def rand_c(rng: np.random.Generator, n: int) -> list[complex]:
    return list(rng.normal(size=n) + 1j * rng.normal(size=n))


# ── Dual numbers ─────────────────────────────────────────────────────────


class TestDual:
    """Forward-mode derivatives through +, −, ×, ÷ and powers."""

    def test_cube_derivative(self):
        x = Dual(2.0, 1.0)
        y = x**3
        assert y.val == pytest.approx(8.0)
        assert y.der == pytest.approx(12.0)

    def test_quotient_rule(self):
        x = Dual(3.0, 1.0)
        y = (x + 1) / (x - 1)
        # d/dx (x+1)/(x−1) = −2/(x−1)²
        assert y.der == pytest.approx(-0.5)

    def test_negative_power(self):
        y = Dual(2.0, 1.0) ** -2
        assert y.val == pytest.approx(0.25)
        assert y.der == pytest.approx(-0.25)

    def test_fractional_power(self):
        y = Dual(4.0, 1.0) ** 0.5
        assert y.val == pytest.approx(2.0)
        assert y.der == pytest.approx(0.25)

    def test_reflected_operations(self):
        x = Dual(2.0, 1.0)
        assert (1 - x).der == pytest.approx(-1.0)
        assert (1 / x).der == pytest.approx(-0.25)
        assert (3 * x).der == pytest.approx(3.0)

    def test_nested_dual_rejected(self):
        with pytest.raises(TypeError):
            Dual(Dual(1.0, 1.0))

    def test_dual_exponent_rejected(self):
        with pytest.raises(TypeError):
            Dual(2.0) ** Dual(1.0, 1.0)

    def test_partials_of_monomial(self):
        # f(x, y) = x²y at (2, 3)
        grads = partials(lambda a: a[0] ** 2 * a[1], [2.0, 3.0])
        assert grads[0] == pytest.approx(12.0)
        assert grads[1] == pytest.approx(4.0)


# ── Polynomials ──────────────────────────────────────────────────────────


class TestPoly:
    """Ascending coefficients, trailing zeros trimmed."""

    def test_trailing_zeros_trimmed(self):
        assert Poly((1, 2, 0, 0)).coeffs == (1 + 0j, 2 + 0j)

    def test_zero_polynomial(self):
        z = Poly((0, 0))
        assert z.coeffs == ()
        assert z.is_zero
        assert z.degree < 0

    def test_from_roots_vanishes_at_roots(self):
        rng = np.random.default_rng(1)
        roots = rand_c(rng, 4)
        p = Poly.from_roots(roots)
        assert p.degree == 4
        assert p.coeff(4) == pytest.approx(1.0)
        for r in roots:
            assert abs(p(r)) < 1e-10

    def test_product_evaluates_pointwise(self):
        rng = np.random.default_rng(2)
        p, q = Poly(tuple(rand_c(rng, 4))), Poly(tuple(rand_c(rng, 3)))
        x = rand_c(rng, 1)[0]
        assert abs((p * q)(x) - p(x) * q(x)) < 1e-10
        assert abs((p - q)(x) - (p(x) - q(x))) < 1e-12

    def test_functional_forms(self):
        assert poly_eval(Poly(()), 5) == 0
        assert poly_eval(Poly((6, 11, 6, 1)), -1) == 0
        assert poly_mul(Poly((-2, 1)), Poly((-3, 1))).distance(Poly((6, -5, 1))) < 1e-15
        assert poly_mul(Poly((1, 1)), Poly(())).is_zero
        # d/dλ of −λ³ − 2τλ at τ = 1
        assert poly_diff(Poly((0, -2, 0, -1))).distance(Poly((-2, 0, -3))) < 1e-15

    def test_power(self):
        p = Poly((1, 1))
        assert (p**3).distance(Poly((1, 3, 3, 1))) < 1e-14

    def test_diff(self):
        assert Poly((5, 3, 0, 2)).diff().distance(Poly((3, 0, 6))) < 1e-14

    def test_shift(self):
        assert Poly((1, 2)).shift(2).coeffs == (0j, 0j, 1 + 0j, 2 + 0j)

    def test_divmod_by_monic(self):
        rng = np.random.default_rng(3)
        p = Poly(tuple(rand_c(rng, 6)))
        d = Poly.from_roots(rand_c(rng, 2))
        q, r = p.divmod(d)
        assert r.degree <= 1
        assert (q * d + r).distance(p) < 1e-10

    def test_divmod_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            Poly((1, 2)).divmod(Poly(()))

    def test_taylor_coefficients(self):
        # (λ)³ around a = 2: 8 + 12x + 6x² + x³
        t = Poly((0, 0, 0, 1)).taylor(2.0, 5)
        assert np.allclose(t, [8, 12, 6, 1, 0])

    def test_polypart_mul(self):
        # (λ² + 1)(1 + 2/λ + 3/λ²) → λ² + 2λ + 4
        out = polypart_mul(Poly((1, 0, 1)), [1, 2, 3], 0)
        assert out.distance(Poly((4, 2, 1))) < 1e-14

    def test_dual_coefficients_carry_derivatives(self):
        p = Poly((Dual(1.0, 2.0), 3.0))
        assert p.derivatives().distance(Poly((2.0,))) < 1e-14
        assert p.values() == [1 + 0j, 3 + 0j]


# ── Pole expansions ──────────────────────────────────────────────────────


class TestPoleExpansion:
    """Exact partial fractions with finite poles."""

    def test_simple_evaluation(self):
        f = PoleExpansion.simple(Poly((1,)), [(2.0, 3.0)])
        assert f(4.0) == pytest.approx(1 + 3 / 2)

    def test_product_of_distinct_poles(self):
        a, b = 0.5 + 0.2j, -1.0 + 0.3j
        f = PoleExpansion.simple(Poly(()), [(a, 1.0)])
        g = PoleExpansion.simple(Poly(()), [(b, 1.0)])
        x = 2.0 - 1.0j
        assert abs((f * g)(x) - 1 / ((x - a) * (x - b))) < 1e-12

    def test_square_gives_double_pole(self):
        a = 0.7
        f = PoleExpansion.simple(Poly((1,)), [(a, 2.0)])
        sq = f * f
        assert sq.principal(a)[1] == pytest.approx(4.0)
        x = 1.9 + 0.4j
        assert abs(sq(x) - f(x) ** 2) < 1e-12

    def test_polynomial_times_pole(self):
        # λ · 1/(λ − a) = 1 + a/(λ − a)
        a = 1.5
        f = PoleExpansion.simple(Poly(()), [(a, 1.0)]) * Poly((0, 1))
        assert f.poly.distance(Poly((1,))) < 1e-14
        assert f.residue(a) == pytest.approx(a)

    def test_diff_raises_order(self):
        a = 0.3
        f = PoleExpansion.simple(Poly((0, 0, 1)), [(a, 2.0)])
        df = f.diff()
        assert df.poly.distance(Poly((0, 2))) < 1e-14
        assert df.principal(a)[1] == pytest.approx(-2.0)

    def test_merges_repeated_locations(self):
        f = PoleExpansion(Poly(()), ((1.0, (1.0,)), (1.0, (2.0,))))
        assert len(f.poles) == 1
        assert f.residue(1.0) == pytest.approx(3.0)

    def test_collision_raises(self):
        with pytest.raises(PoleCollision):
            PoleExpansion.simple(Poly(()), [(1.0, 1.0), (1.0 + 1e-14, 1.0)])

    def test_to_poly_rejects_leftover_pole(self):
        f = PoleExpansion.simple(Poly((1,)), [(0.0, 1e-3)])
        with pytest.raises(ResidueMismatch):
            f.to_poly("test")

    def test_to_poly_after_cancellation(self):
        f = PoleExpansion.simple(Poly((1,)), [(0.5, 1.0)])
        assert (f - f + Poly((2,))).to_poly().distance(Poly((2,))) < 1e-14

    def test_reciprocal_monic(self):
        rng = np.random.default_rng(4)
        roots = rand_c(rng, 3)
        recip = reciprocal_monic(roots)
        x = 3.0 + 2.0j
        assert abs(recip(x) * Poly.from_roots(roots)(x) - 1) < 1e-12

    def test_reciprocal_monic_empty(self):
        assert reciprocal_monic([])(5.0) == pytest.approx(1.0)

    def test_reciprocal_times_product_is_one(self):
        roots = [0.4, -1.1, 2.0j]
        one = (reciprocal_monic(roots) * Poly.from_roots(roots)).to_poly()
        assert one.distance(Poly((1,))) < 1e-12


# ── 2×2 matrices ─────────────────────────────────────────────────────────


class TestMat2:
    def test_scalar_entries_lift_to_poly(self):
        m = Mat2(1.0, 0.0, Poly((0, 1)), 1.0)
        assert m.kind is Poly
        assert m.a11.distance(Poly((1,))) < 1e-14

    def test_mixed_entries_lift_to_pole(self):
        m = Mat2(1.0, PoleExpansion.simple(Poly(()), [(0.0, 1.0)]), 0.0, 1.0)
        assert m.kind is PoleExpansion

    def test_unsupported_entry(self):
        with pytest.raises(TypeError):
            Mat2("a", 0.0, 0.0, 1.0)

    def test_identity_product(self):
        m = Mat2(Poly((1, 2)), Poly((3,)), Poly((0, 0, 1)), Poly((-1,)))
        assert (Mat2.identity() @ m).distance(m) < 1e-14
        assert (m @ Mat2.identity()).distance(m) < 1e-14

    def test_commutator_is_traceless(self):
        rng = np.random.default_rng(5)
        A = Mat2(*(Poly(tuple(rand_c(rng, 3))) for _ in range(4)))
        B = Mat2(*(Poly(tuple(rand_c(rng, 2))) for _ in range(4)))
        assert A.commutator(B).trace().max_abs() < 1e-12

    def test_det(self):
        # [[λ, 1], [λ², λ]] has det 0
        m = Mat2(Poly((0, 1)), 1.0, Poly((0, 0, 1)), Poly((0, 1)))
        assert m.det().is_zero

    def test_evaluation(self):
        m = Mat2(Poly((0, 1)), 1.0, 2.0, Poly((1, 1)))
        assert m(3.0) == (3, 1, 2, 4)

    def test_json_codec(self):
        m = Mat2(Poly((1, 2j)), 0.0, Poly((0, 0, 1)), Poly((-1,)))
        assert mat2_from_json(mat2_to_json(m)).distance(m) < 1e-15


class TestComplexJson:
    def test_pair(self):
        assert complex_from_json([1, 2]) == 1 + 2j
        assert complex_to_json(3 - 4j) == [3.0, -4.0]

    def test_real_number(self):
        assert complex_from_json(2.5) == 2.5 + 0j

    @pytest.mark.parametrize("bad", ["1+2j", [1, 2, 3], [True, 0], None, {"re": 1}])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            complex_from_json(bad)

    @pytest.mark.parametrize(
        "bad", [float("nan"), float("inf"), [0.0, float("-inf")], [float("nan"), 1.0]]
    )
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError, match="finite"):
            complex_from_json(bad)

    def test_rejects_out_of_range_integer(self):
        with pytest.raises(ValueError):
            complex_from_json([10**400, 0])
