"""
Verification Battery — residual checks grouped by module
=========================================================

Each group draws its random data from ``numpy.random.default_rng([seed, i])``
(i = position of the group in ``GROUPS``), so a group gives the same rows
whether it runs alone, inside ``all``, or on a worker thread.

Row schema: name, anchor (short label of the identity), residual, threshold,
pass.  A check that raises instead of returning is reported as a failing row
with ``residual = None`` and the error in ``detail``.
"""

from __future__ import annotations

import cmath
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from p1lab.algebra import Dual, Poly, PoleExpansion, der, partials
from p1lab.central_config import Tolerances, config
from p1lab.coeffs import (
    H_closed_form,
    mu_closed_form,
    nu_reduced,
    solve_H,
    solve_mu,
    solve_nu,
    tau_toeplitz_inverse,
    toeplitz_M,
)
from p1lab.errors import IndexOutOfRange, P1LabError
from p1lab.flow import (
    integrate,
    verify_energy_balance,
    verify_flow_commutativity,
    verify_painleve1,
    verify_zero_curvature,
    verify_zero_curvature_general,
)
from p1lab.ham import (
    evolution_general,
    evolution_reduced,
    from_symmetric,
    general_hamiltonian,
    hamiltonian_mu_form,
    reduced_hamiltonian,
    reduced_symmetric_hamiltonian,
    shifted_map,
    symmetric_hamiltonian,
    symmetric_map,
    symplectic_jacobian_check,
    to_symmetric,
    trivial_direction_residual,
)
from p1lab.lax import (
    DarbouxPoint,
    SymmetricPoint,
    build_Atilde_symmetric,
    build_L,
    build_Ltilde_symmetric,
    classical_curve_residual,
    darboux_pipeline,
    lcheck_pole_leak,
    on_curve_residual,
    trace_law,
)
from p1lab.symfun import (
    bell_power_sums,
    elem_deleted,
    elem_from_roots,
    homog_from_elem,
    lagrange_form,
    power_sums,
    vandermonde_power_closed,
    vandermonde_power_identity,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    p2_poly,
    p2_poly_reduced,
    reduced_from_irregular,
    tau_by_substitution,
    tau_tangent_vector,
    trivial_times_table,
    trivial_vector_u,
    trivial_vector_w,
)

GROUPS = ("algebra", "symfun", "times", "coeffs", "lax", "ham", "flow")
FLOW_SAMPLES = 4

Check = tuple[str, str, Callable[[], float]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    residual: float | None
    threshold: float
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "residual": self.residual,
            "threshold": self.threshold,
            "pass": self.passed,
        }


# ── Random data ─────────────────────────────────────────────────────────


def random_complex(rng: np.random.Generator, n: int, scale: float = 0.5) -> list:
    re = rng.uniform(-scale, scale, n)
    im = rng.uniform(-scale, scale, n)
    return [complex(a, b) for a, b in zip(re, im)]


def random_roots(rng: np.random.Generator, n: int, radius: float = 1.0) -> list:
    """n points near a circle, jittered but well separated."""
    out = []
    for j in range(n):
        angle = 2 * np.pi * (j + 0.25 * rng.uniform(-1, 1)) / n
        rad = radius * (1 + 0.1 * rng.uniform(-1, 1))
        out.append(complex(rad * cmath.exp(1j * angle)))
    return out


def random_times(rng: np.random.Generator, g: int) -> IrregularTimes:
    r = g + 3
    t = random_complex(rng, 2 * r - 2, 0.4)
    t[2 * r - 4] = 2.0 + random_complex(rng, 1, 0.3)[0]
    return IrregularTimes(r, tuple(t))


def random_canonical(rng: np.random.Generator, g: int) -> ReducedTimes:
    return ReducedTimes.canonical(tuple(random_complex(rng, g, 0.3)))


def random_alpha(rng: np.random.Generator, g: int) -> DeformationVector:
    return DeformationVector(tuple(random_complex(rng, 2 * g + 4, 0.5)))


def random_point(rng: np.random.Generator, g: int) -> DarbouxPoint:
    return DarbouxPoint(tuple(random_roots(rng, g)), tuple(random_complex(rng, g)))


def _rel(diff, ref) -> float:
    return abs(diff) / max(1.0, abs(ref))


def _max(values) -> float:
    return float(max(values, default=0.0))


# ── algebra ─────────────────────────────────────────────────────────────


def _algebra_checks(g: int, rng: np.random.Generator) -> list[Check]:
    a = Poly(tuple(random_complex(rng, g + 3)))
    b = Poly(tuple(random_complex(rng, g + 2)))
    poles = random_roots(rng, g + 1)
    E = PoleExpansion.simple(a, list(zip(poles, random_complex(rng, g + 1))))
    F = PoleExpansion.simple(b, list(zip(poles, random_complex(rng, g + 1))))
    x = 1.7 + 0.4j

    def poly_mul_eval() -> float:
        return _rel((a * b)(x) - a(x) * b(x), a(x) * b(x))

    def pole_eval() -> float:
        return _rel((E * F)(x) - E(x) * F(x), E(x) * F(x))

    def dual_vs_fd() -> float:
        def f(z):
            return E(z) * a(z)

        h = 1e-5
        exact = der(f(Dual(x, 1.0)))
        fd = (f(x + h) - f(x - h)) / (2 * h)
        return _rel(exact - fd, exact)

    return [
        ("poly_mul_eval", "(ab)(x) = a(x)b(x)", poly_mul_eval),
        ("dual_vs_fd", "dual derivative = central difference", dual_vs_fd),
        ("pole_eval", "pole-part product evaluates pointwise", pole_eval),
    ]


# ── symfun ──────────────────────────────────────────────────────────────


def _symfun_checks(g: int, rng: np.random.Generator) -> list[Check]:
    n = min(g + 3, 8)
    x = random_roots(rng, n, 0.9)
    p = random_complex(rng, n)
    b = elem_from_roots(x)

    def newton_identity() -> float:
        S = power_sums(b, 2 * n)
        return _max(
            _rel(S[k] - sum(xj**k for xj in x), S[k]) for k in range(2 * n + 1)
        )

    def eh_orthogonality() -> float:
        h = homog_from_elem(b, 2 * n)
        worst = []
        for k in range(1, 2 * n + 1):
            acc = sum(
                (-1) ** i * b.e[i] * h[k - i] for i in range(0, min(k, n) + 1)
            )
            worst.append(abs(acc))
        return _max(worst)

    def bell() -> float:
        S = power_sums(b, n + 2)
        return _max(_rel(bell_power_sums(b, m) - S[m], S[m]) for m in range(1, n + 3))

    def deleted() -> float:
        worst = []
        for j, xj in enumerate(x):
            rest = elem_from_roots([xm for m, xm in enumerate(x) if m != j])
            for i in range(1, n + 1):
                worst.append(abs(elem_deleted(b, xj, i) - rest.at(n - i)))
        return _max(worst)

    def vandermonde_column() -> float:
        return _max(
            _rel(
                vandermonde_power_identity(x, i, M) - vandermonde_power_closed(x, i, M),
                vandermonde_power_closed(x, i, M),
            )
            for i in range(1, n + 1)
            for M in range(0, n + 3)
        )

    def lagrange() -> float:
        L = lagrange_form(x, p)
        return _max(abs(L(xi) + pi) for xi, pi in zip(x, p))

    return [
        ("newton_identity", "S_k from e by Newton = Σx^k", newton_identity),
        ("eh_orthogonality", "Σ(−1)^i e_i h_{k−i} = 0", eh_orthogonality),
        ("bell_power_sums", "multinomial S_m = Newton S_m", bell),
        ("elem_deleted", "e_{n−i}(x∖x_j) two ways", deleted),
        ("vandermonde_column", "Vandermonde column identity = e·h form", vandermonde_column),
        ("lagrange_interpolation", "Q(q_i) = −p_i", lagrange),
    ]


# ── times ───────────────────────────────────────────────────────────────


def _times_checks(g: int, rng: np.random.Generator) -> list[Check]:
    t = random_times(rng, g)
    rt = random_canonical(rng, g)

    def round_trip() -> float:
        back = irregular_from_reduced(reduced_from_irregular(t))
        return _max(_rel(u - v, v) for u, v in zip(back.t, t.t))

    def table() -> float:
        return _max(abs(r["computed"] - r["expected"]) for r in trivial_times_table(t))

    def duality() -> float:
        tau = reduced_from_irregular(t).tau
        return _max(abs(u - v) for u, v in zip(tau_by_substitution(t), tau))

    def p2_reduced() -> float:
        return p2_poly_reduced(rt).distance(p2_poly(irregular_from_reduced(rt)))

    return [
        ("time_round_trip", "t → (T, τ) → t", round_trip),
        ("trivial_times_table", "∂(T, τ) along w_k, u₋₁, u₀, α^{τ_k}", table),
        ("tau_duality", "τ by closed form = τ by substitution", duality),
        ("p2_reduced", "canonical P̃₂ in τ = P̃₂ ∘ t(τ)", p2_reduced),
    ]


# ── coeffs ──────────────────────────────────────────────────────────────


def _coeffs_checks(g: int, rng: np.random.Generator) -> list[Check]:
    t = random_times(rng, g)
    alpha = random_alpha(rng, g)
    rt = random_canonical(rng, g)
    tc = irregular_from_reduced(rt)
    pt = random_point(rng, g)
    q, p = pt.q, pt.p
    r = t.r_inf

    def toeplitz() -> float:
        nu = solve_nu(alpha, t)
        M = np.array(toeplitz_M(t), dtype=complex)
        rhs = np.array(
            [2 * alpha.at(2 * r - 3 - 2 * i) / (2 * r - 3 - 2 * i) for i in range(r - 1)]
        )
        solve = float(np.max(np.abs(M @ np.array(nu) - rhs)))
        Mc = np.array(toeplitz_M(tc), dtype=complex)
        inv = np.array(tau_toeplitz_inverse(rt), dtype=complex)
        return max(solve, float(np.max(np.abs(inv @ Mc - np.eye(r - 1)))))

    def closed_forms() -> float:
        worst = []
        for k in range(1, g + 1):
            nu = solve_nu(tau_tangent_vector(k, rt), tc)
            mu = solve_mu(nu, q)
            for i in range(1, g + 1):
                worst.append(_rel(mu_closed_form(k, i, rt, q) - mu[i - 1], mu[i - 1]))
        H = solve_H(t, q, p).H
        for i in range(1, g + 1):
            worst.append(_rel(H_closed_form(i, t, q, p) - H[i - 1], H[i - 1]))
        return _max(worst)

    def reduction() -> float:
        worst = []
        for j in range(1, g + 1):
            nu = solve_nu(tau_tangent_vector(j, rt), tc)
            for k in range(1, g + 1):
                worst.append(abs(nu_reduced(j, k, rt) - nu[k + 1]))
            worst.extend(abs(x) for x in nu[:2])
        return _max(worst)

    return [
        ("toeplitz_residual", "M∞ν = rhs; F-inverse of canonical M∞", toeplitz),
        ("closed_forms", "deleted-e μ and H = Vandermonde solves", closed_forms),
        ("reduction_table", "ν^{τ_j} table = Toeplitz solve", reduction),
    ]


# ── lax ─────────────────────────────────────────────────────────────────


def normalization_residual(t: IrregularTimes, Lt) -> float:
    """Leading blocks of L̃ and the top of det L̃ against the times."""
    g, r = t.genus, t.r_inf
    top, odd, even = t.at(2 * r - 2), t.at(2 * r - 3), t.at(2 * r - 4)
    det = Lt.det()
    diffs = [
        Lt.a11.coeff(g + 1) + 0.5 * top,
        Lt.a22.coeff(g + 1) + 0.5 * top,
        Lt.a21.coeff(g + 1) - 0.25 * odd * odd,
        Lt.a12.coeff(g + 1),
        Lt.a12.coeff(g) - 1.0,
        det.coeff(2 * r - 4) - 0.25 * top * top,
        det.coeff(2 * r - 5) - (0.5 * top * even - 0.25 * odd * odd),
    ]
    diffs += [e.coeff(k) for e in Lt.entries for k in range(g + 2, len(e.coeffs))]
    return _max(abs(d) for d in diffs)


def _lax_checks(g: int, rng: np.random.Generator) -> list[Check]:
    t = random_times(rng, g)
    alpha = random_alpha(rng, g)
    pt = random_point(rng, g)
    t0 = IrregularTimes(t.r_inf, t.t, 0j)

    def polynomiality() -> float:
        darboux_pipeline(t, pt, alpha)
        return lcheck_pole_leak(build_L(t, pt), pt, t.hbar)

    def trace() -> float:
        At = darboux_pipeline(t, pt, alpha)["Atilde"]
        return At.trace().distance(trace_law(alpha, t, pt))

    def normalization() -> float:
        return normalization_residual(t, darboux_pipeline(t, pt)["Ltilde"])

    def symmetric() -> float:
        mats = darboux_pipeline(t, pt, alpha)
        spt = to_symmetric(pt)
        return max(
            mats["Ltilde"].distance(build_Ltilde_symmetric(t, spt)),
            mats["Atilde"].distance(build_Atilde_symmetric(alpha, t, spt)),
        )

    def on_curve() -> float:
        Lt = darboux_pipeline(t, pt)["Ltilde"]
        quantum = _max(abs(x) for x in on_curve_residual(pt, Lt))
        classical = _max(abs(x) for x in classical_curve_residual(t0, pt))
        return max(quantum, classical)

    return [
        ("check_polynomiality", "J L J⁻¹ + ħJ′J⁻¹ has no pole part", polynomiality),
        ("trace_law", "Tr Ã from α, t and ν", trace),
        ("normalization", "leading blocks of L̃ and det L̃", normalization),
        ("symmetric_pipeline", "Darboux route = symmetric route for L̃, Ã", symmetric),
        ("on_curve", "(q_i, p_i) on the curve of L̃", on_curve),
    ]


# ── ham ─────────────────────────────────────────────────────────────────


def _ham_checks(g: int, rng: np.random.Generator) -> list[Check]:
    t = random_times(rng, g)
    alpha = random_alpha(rng, g)
    pt = random_point(rng, g)
    rt = random_canonical(rng, g)
    tc = irregular_from_reduced(rt)

    def gradient() -> float:
        def ham(xs: Sequence):
            return general_hamiltonian(alpha, t, DarbouxPoint(xs[:g], xs[g:])).value

        grads = partials(ham, list(pt.q + pt.p))
        ev = evolution_general(alpha, t, pt)
        worst = [_rel(grads[g + j] - ev.dq[j], ev.dq[j]) for j in range(g)]
        worst += [_rel(-grads[j] - ev.dp[j], ev.dp[j]) for j in range(g)]
        return _max(worst)

    def two_forms() -> float:
        spt = to_symmetric(pt)
        worst = [
            _rel(
                general_hamiltonian(alpha, t, pt).value
                - hamiltonian_mu_form(alpha, t, pt),
                general_hamiltonian(alpha, t, pt).value,
            )
        ]
        for k in range(1, g + 1):
            ref = general_hamiltonian(tau_tangent_vector(k, rt), tc, pt).value
            worst.append(_rel(reduced_hamiltonian(k, rt, pt) - ref, ref))
            worst.append(_rel(reduced_symmetric_hamiltonian(k, rt, spt) - ref, ref))
            ev = evolution_general(tau_tangent_vector(k, rt), tc, pt)
            red = evolution_reduced(k, rt, pt)
            worst += [_rel(u - v, v) for u, v in zip(red.dq + red.dp, ev.dq + ev.dp)]
        return _max(worst)

    def invariance() -> float:
        vectors = [trivial_vector_w(k, t) for k in range(1, t.r_inf)]
        vectors += [trivial_vector_u(-1, t), trivial_vector_u(0, t)]
        return _max(trivial_direction_residual(v, t, pt) for v in vectors)

    def symplectic() -> float:
        shifted = shifted_map(reduced_from_irregular(t), t)
        return max(
            symplectic_jacobian_check(symmetric_map, pt),
            symplectic_jacobian_check(shifted, pt),
        )

    def symmetric() -> float:
        spt = to_symmetric(pt)
        ref = general_hamiltonian(alpha, t, pt).value
        back = from_symmetric(spt)
        order = sorted(range(g), key=lambda i: (pt.q[i].real, pt.q[i].imag))
        roundtrip = _max(
            abs(back.q[n] - pt.q[i]) + abs(back.p[n] - pt.p[i])
            for n, i in enumerate(order)
        )
        return max(_rel(symmetric_hamiltonian(alpha, t, spt).value - ref, ref), roundtrip)

    return [
        ("hamilton_gradient", "∂Ham/∂p = L_α[q], −∂Ham/∂q = L_α[p]", gradient),
        ("ham_two_forms", "Ham: H-form = μ-form = reduced forms", two_forms),
        ("trivial_invariance", "L_α[q̌] = L_α[p̌] = 0 along w_k, u₋₁, u₀", invariance),
        ("symplectic", "MᵀΩM = Ω for (Q, P) and (q̌, p̌)", symplectic),
        ("ham_symmetric", "Ham(Q, P) = Ham(q, p)", symmetric),
    ]


# ── flow ────────────────────────────────────────────────────────────────


def _flow_checks(g: int, rng: np.random.Generator) -> list[Check]:
    samples = [
        (random_canonical(rng, g), to_symmetric(random_point(rng, g)))
        for _ in range(FLOW_SAMPLES)
    ]
    rt, spt = samples[0]
    general = [
        (random_alpha(rng, g), random_times(rng, g), to_symmetric(random_point(rng, g)))
        for _ in range(FLOW_SAMPLES)
    ]
    gc = max(g, 2)
    rt2 = random_canonical(rng, gc)
    spt2 = to_symmetric(random_point(rng, gc))
    p1_start = ReducedTimes.canonical((0j,))
    p1_state = SymmetricPoint((1.0 + 0j,), (0j,))

    def zero_curvature() -> float:
        worst = [
            verify_zero_curvature(k, r, s) for r, s in samples for k in range(1, g + 1)
        ]
        worst += [verify_zero_curvature_general(a, t, s) for a, t, s in general]
        return _max(worst)

    def painleve_exact() -> float:
        traj = integrate(1, p1_start, p1_state, 0.1, 20)
        return verify_painleve1(traj, 1.0, route="exact")

    def painleve_numeric() -> float:
        traj = integrate(1, p1_start, p1_state, 0.1, 400)
        return verify_painleve1(traj, 1.0, route="numeric")

    def commutativity() -> float:
        return verify_flow_commutativity(1, 2, rt2, spt2, 1e-3)

    def energy() -> float:
        end = rt.tau[0] + 0.05
        return verify_energy_balance(integrate(1, rt, spt, end, 20), rt)

    return [
        ("zero_curvature", "ħ∂L̃ = [Ã, L̃] + ħ∂_λÃ", zero_curvature),
        ("painleve_exact", "ħ²q̈ = 24q² + 16τ through the flow field", painleve_exact),
        ("painleve_numeric", "ħ²q̈ = 24q² + 16τ by second differences", painleve_numeric),
        ("flow_commutativity", "τ₁∘τ₂ = τ₂∘τ₁", commutativity),
        ("energy_balance", "dHam/dτ = ∂Ham/∂τ", energy),
    ]


_BUILDERS = {
    "algebra": _algebra_checks,
    "symfun": _symfun_checks,
    "times": _times_checks,
    "coeffs": _coeffs_checks,
    "lax": _lax_checks,
    "ham": _ham_checks,
    "flow": _flow_checks,
}


# ── Execution ───────────────────────────────────────────────────────────


def _measure(check: Check, tol: Tolerances) -> CheckResult:
    name, anchor, fn = check
    threshold = tol.threshold(name)
    try:
        residual = float(fn())
    except (P1LabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        return CheckResult(name, anchor, None, threshold, False, f"{type(e).__name__}: {e}")
    passed = bool(np.isfinite(residual)) and residual <= threshold
    return CheckResult(name, anchor, residual, threshold, passed)


def run_group(
    group: str, g: int, seed: int = config.DEFAULT_SEED, tol: Tolerances | None = None
) -> list[CheckResult]:
    if group not in _BUILDERS:
        raise ValueError(f"unknown group '{group}'")
    if not 1 <= g <= config.MAX_GENUS:
        raise IndexOutOfRange(f"battery genus must lie in 1..{config.MAX_GENUS}")
    tol = tol or config
    rng = np.random.default_rng([seed, GROUPS.index(group)])
    return [_measure(check, tol) for check in _BUILDERS[group](g, rng)]


def run_battery(
    group: str,
    g: int,
    seed: int = config.DEFAULT_SEED,
    jobs: int = 1,
    tol: Tolerances | None = None,
) -> list[CheckResult]:
    """Rows for ``group`` (or every group for ``"all"``), in GROUPS order."""
    groups = list(GROUPS) if group == "all" else [group]
    if jobs <= 1 or len(groups) == 1:
        return [row for grp in groups for row in run_group(grp, g, seed, tol)]
    slots: list = [None] * len(groups)
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        fut = {ex.submit(run_group, grp, g, seed, tol): i for i, grp in enumerate(groups)}
        for ft in as_completed(fut):
            slots[fut[ft]] = ft.result()
    return [row for rows in slots for row in rows]
