"""
Lax Matrices — L, Ľ, L̃, A_α, Ǎ_α, Ã_α and the classical spectral curve
=========================================================================

Two construction routes:

  Darboux route    build_L → build_Lcheck → build_Ltilde
                   build_A → build_Acheck → build_Atilde
                   Gauge products are assembled literally on PoleExpansion
                   entries and their polynomiality is asserted
                   (ResidueMismatch otherwise).

  Symmetric route  build_Ltilde_symmetric, build_Atilde_symmetric
                   Polynomial in (Q, P); no division by q_i − q_j, so these
                   keep working where the apparent singularities collide.

Gauges: J = [[1, 0], [Q/Π, 1/Π]] with Π = ∏(λ−q_j) and Q the Lagrange
interpolant of −p_j at q_j;  G₁ = [[1, 0], [γ, 1]] with
γ = ½t_{2r−2}λ + ½t_{2r−4} + ½t_{2r−2}Q₁.
"""

from __future__ import annotations

from dataclasses import dataclass

from p1lab.algebra import (
    Dual,
    Mat2,
    PoleExpansion,
    Poly,
    check_separation,
    complex_from_json,
    complex_to_json,
    polypart_mul,
    reciprocal_monic,
    val,
)
from p1lab.coeffs import (
    deformation_coeffs,
    extend_nu_from_elem,
    solve_c,
    solve_H,
    solve_nu,
)
from p1lab.errors import NotCanonical
from p1lab.symfun import (
    SymBasis,
    elem_from_roots,
    lagrange_form,
    monic_from_elementary,
    q_poly_from_symmetric,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    p1_poly,
    p2_poly,
    tau_tangent_vector,
)


# ── Points ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class DarbouxPoint:
    """Apparent singularities q and their dual coordinates p."""

    q: tuple
    p: tuple

    def __post_init__(self):
        if len(self.q) != len(self.p):
            raise ValueError("q and p must have the same length")
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "p", tuple(self.p))
        check_separation(list(self.q), "apparent singularities")

    @property
    def genus(self) -> int:
        return len(self.q)

    def values(self) -> "DarbouxPoint":
        """Copy with dual parts dropped."""
        return DarbouxPoint(
            tuple(val(x) for x in self.q), tuple(val(x) for x in self.p)
        )

    def to_json(self) -> dict:
        return {
            "q": [complex_to_json(x) for x in self.q],
            "p": [complex_to_json(x) for x in self.p],
        }


@dataclass(frozen=True)
class SymmetricPoint:
    """Q_i = e_i(q) and the conjugate momenta P_i."""

    Q: tuple
    P: tuple

    def __post_init__(self):
        if len(self.Q) != len(self.P):
            raise ValueError("Q and P must have the same length")
        object.__setattr__(self, "Q", tuple(self.Q))
        object.__setattr__(self, "P", tuple(self.P))

    @property
    def genus(self) -> int:
        return len(self.Q)

    def to_json(self) -> dict:
        return {
            "Q": [complex_to_json(x) for x in self.Q],
            "P": [complex_to_json(x) for x in self.P],
        }


def point_from_json(payload) -> DarbouxPoint | SymmetricPoint:
    """{"q": [...], "p": [...]} or {"Q": [...], "P": [...]}; entries [re, im]."""
    if not isinstance(payload, dict):
        raise ValueError("point payload must be a JSON object")
    if "q" in payload and "p" in payload:
        return DarbouxPoint(
            tuple(complex_from_json(x) for x in payload["q"]),
            tuple(complex_from_json(x) for x in payload["p"]),
        )
    if "Q" in payload and "P" in payload:
        return SymmetricPoint(
            tuple(complex_from_json(x) for x in payload["Q"]),
            tuple(complex_from_json(x) for x in payload["P"]),
        )
    raise ValueError("point payload needs keys q/p or Q/P")


def _irregular(times) -> IrregularTimes:
    if isinstance(times, ReducedTimes):
        return irregular_from_reduced(times)
    return times


# ── L and its gauges (Darboux route) ────────────────────────────────────


def build_L(t: IrregularTimes, pt: DarbouxPoint) -> Mat2:
    """L₁₁ = 0, L₁₂ = 1, L₂₂ = P̃₁ + Σħ/(λ−q_j), L₂₁ = −P̃₂ + ΣH_kλ^k − Σħp_j/(λ−q_j)."""
    hbar = t.hbar
    H = solve_H(t, pt.q, pt.p, hbar)
    L22 = PoleExpansion.simple(p1_poly(t), [(qj, hbar) for qj in pt.q])
    L21 = PoleExpansion.simple(
        -p2_poly(t) + H.poly(),
        [(qj, -hbar * pj) for qj, pj in zip(pt.q, pt.p)],
    )
    return Mat2(0.0, 1.0, L21, L22)


def _darboux_J(pt: DarbouxPoint) -> tuple[Mat2, Mat2]:
    """J and its polynomial inverse J⁻¹ = [[1, 0], [−Q, Π]]."""
    Pi = Poly.from_roots(pt.q)
    Qp = lagrange_form(pt.q, pt.p)
    recip = reciprocal_monic(pt.q)
    J = Mat2(1.0, 0.0, Qp * recip, recip)
    J_inv = Mat2(1.0, 0.0, -Qp, Pi)
    return J, J_inv


def gauge_gamma(t: IrregularTimes, Q1) -> Poly:
    """Lower-left entry of G₁."""
    r = t.r_inf
    top = t.at(2 * r - 2)
    return Poly((0.5 * t.at(2 * r - 4) + 0.5 * top * Q1, 0.5 * top))


def gauge_matrices(t: IrregularTimes, pt: DarbouxPoint) -> tuple[Mat2, Mat2]:
    """(G₁, J)."""
    Q1 = sum(pt.q, 0j)
    G1 = Mat2(1.0, 0.0, gauge_gamma(t, Q1), 1.0)
    J, _ = _darboux_J(pt)
    return G1, J


def _lcheck_raw(L: Mat2, pt: DarbouxPoint, hbar) -> Mat2:
    J, J_inv = _darboux_J(pt)
    return J @ L @ J_inv + (J.diff() @ J_inv).scale(hbar)


def build_Lcheck(L: Mat2, pt: DarbouxPoint, hbar) -> Mat2:
    """Ľ = J L J⁻¹ + ħ ∂_λJ J⁻¹, asserted polynomial."""
    return _lcheck_raw(L, pt, hbar).to_poly("Ľ")


def lcheck_pole_leak(L: Mat2, pt: DarbouxPoint, hbar) -> float:
    """Largest principal-part coefficient left in J L J⁻¹ + ħ∂_λJ J⁻¹, relative."""
    raw = _lcheck_raw(L, pt, hbar)
    scale = max([1.0] + [e.poly.max_abs() for e in raw.entries])
    return max(e.pole_size() for e in raw.entries) / scale


def _g1_conjugate(M: Mat2, gamma: Poly) -> Mat2:
    """G₁ M G₁⁻¹ for G₁ = [[1, 0], [γ, 1]]."""
    return Mat2(
        M.a11 - gamma * M.a12,
        M.a12,
        M.a21 + gamma * (M.a11 - M.a22) - gamma * gamma * M.a12,
        M.a22 + gamma * M.a12,
    )


def _Q1_from_Pi(Pi: Poly):
    g = len(Pi.coeffs) - 1
    return -Pi.coeff(g - 1) if g >= 1 else 0j


def build_Ltilde(Lcheck: Mat2, t: IrregularTimes) -> Mat2:
    """L̃ = G₁ Ľ G₁⁻¹ + ħ ∂_λG₁ G₁⁻¹."""
    r = t.r_inf
    gamma = gauge_gamma(t, _Q1_from_Pi(Lcheck.a12))
    shift = Mat2(0.0, 0.0, 0.5 * t.hbar * t.at(2 * r - 2), 0.0)
    return _g1_conjugate(Lcheck, gamma) + shift


# ── A_α and its gauges (Darboux route) ──────────────────────────────────


def build_A(
    alpha: DeformationVector,
    t: IrregularTimes,
    pt: DarbouxPoint,
    L: Mat2 | None = None,
) -> Mat2:
    """First row from the ν/μ/c data; second row from

    A₂₁ = ħ∂_λA₁₁ + A₁₂L₂₁,   A₂₂ = ħ∂_λA₁₂ + A₁₁ + A₁₂L₂₂.
    """
    hbar = t.hbar
    L = build_L(t, pt) if L is None else L
    co = deformation_coeffs(alpha, t, pt.q)
    A12 = PoleExpansion.simple(
        Poly((co.nu_at(0), co.nu_at(-1))), list(zip(pt.q, co.mu))
    )
    A11 = PoleExpansion.simple(
        Poly((co.c0,) + co.c), list(zip(pt.q, co.rho(pt.p)))
    )
    A21 = A11.diff() * hbar + A12 * L.a21
    A22 = A12.diff() * hbar + A11 + A12 * L.a22
    return Mat2(A11, A12, A21, A22)


def _seeded_point(alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint):
    """Darboux point whose dual parts hold L_α[q_j], L_α[p_j]."""
    from p1lab.ham import evolution_general

    flow = evolution_general(alpha, t, pt)
    q = tuple(Dual(val(x), d) for x, d in zip(pt.q, flow.dq))
    p = tuple(Dual(val(x), d) for x, d in zip(pt.p, flow.dp))
    return q, p, flow


def build_Acheck(
    A: Mat2, alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
) -> Mat2:
    """Ǎ = J A J⁻¹ + L_α[J] J⁻¹ with L_α[J]J⁻¹ = [[0, 0], [L_α[Q]/Π, −L_α[Π]/Π]]."""
    J, J_inv = _darboux_J(pt)
    q, p, _ = _seeded_point(alpha, t, pt)
    LQ = lagrange_form(q, p).derivatives()
    LPi = Poly.from_roots(q).derivatives()
    recip = reciprocal_monic(pt.q)
    time_part = Mat2(0.0, 0.0, LQ * recip, -(LPi * recip))
    return (J @ A @ J_inv + time_part).to_poly("Ǎ")


def build_Atilde(
    Acheck: Mat2, alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
) -> Mat2:
    """Ã = G₁ǍG₁⁻¹ + [[0, 0], [L_α[γ], 0]]."""
    _, _, flow = _seeded_point(alpha, t, pt)
    Q1 = sum(pt.q, 0j)
    LQ1 = sum(flow.dq, 0j)
    L_gamma = _gamma_derivative(alpha, t, Q1, LQ1)
    gamma = gauge_gamma(t, Q1)
    return _g1_conjugate(Acheck, gamma) + Mat2(0.0, 0.0, L_gamma, 0.0)


def _gamma_derivative(alpha: DeformationVector, t: IrregularTimes, Q1, LQ1) -> Poly:
    """L_α[γ] = ħ(½α_{2r−2}λ + ½α_{2r−4} + ½α_{2r−2}Q₁) + ½t_{2r−2}L_α[Q₁]."""
    r = t.r_inf
    hbar = t.hbar
    a_top = alpha.at(2 * r - 2)
    const = hbar * (0.5 * alpha.at(2 * r - 4) + 0.5 * a_top * Q1)
    const = const + 0.5 * t.at(2 * r - 2) * LQ1
    return Poly((const, hbar * 0.5 * a_top))


def darboux_pipeline(
    t: IrregularTimes, pt: DarbouxPoint, alpha: DeformationVector | None = None
) -> dict[str, Mat2]:
    """Every matrix of the Darboux route, keyed by name."""
    L = build_L(t, pt)
    Lcheck = build_Lcheck(L, pt, t.hbar)
    out = {"L": L, "Lcheck": Lcheck, "Ltilde": build_Ltilde(Lcheck, t)}
    if alpha is not None:
        A = build_A(alpha, t, pt, L)
        Acheck = build_Acheck(A, alpha, t, pt)
        out.update(A=A, Acheck=Acheck, Atilde=build_Atilde(Acheck, alpha, t, pt))
    return out


# ── Symmetric route ─────────────────────────────────────────────────────


def _lcheck_symmetric(t: IrregularTimes, spt: SymmetricPoint) -> Mat2:
    Pi = monic_from_elementary(spt.Q)
    Qp = q_poly_from_symmetric(spt.Q, spt.P)
    P1 = p1_poly(t)
    L21, _ = (-p2_poly(t) - P1 * Qp - Qp * Qp).divmod(Pi)
    return Mat2(-Qp, Pi, L21, P1 + Qp)


def build_Ltilde_symmetric(times, spt: SymmetricPoint) -> Mat2:
    """L̃ as polynomials in (Q, P); ``times`` is ReducedTimes or IrregularTimes.

    Ľ₁₁ = −Q(λ), Ľ₁₂ = Π, Ľ₂₂ = P̃₁ + Q(λ), Ľ₂₁ = quot(−P̃₂ − P̃₁Q − Q², Π),
    followed by the G₁ gauge.
    """
    t = _irregular(times)
    if spt.genus != t.genus:
        raise ValueError(f"expected a genus-{t.genus} point, got {spt.genus}")
    Q1 = spt.Q[0] if spt.genus else 0j
    shift = Mat2(0.0, 0.0, 0.5 * t.hbar * t.at(2 * t.r_inf - 2), 0.0)
    return _g1_conjugate(_lcheck_symmetric(t, spt), gauge_gamma(t, Q1)) + shift


def flow_data(flow, times) -> tuple[DeformationVector, IrregularTimes]:
    """Resolve a τ-flow index or a general deformation vector against times."""
    if isinstance(flow, DeformationVector):
        return flow, _irregular(times)
    if not isinstance(times, ReducedTimes):
        raise NotCanonical("a flow index needs canonical ReducedTimes")
    times.require_canonical(f"flow τ_{flow}")
    return tau_tangent_vector(flow, times), irregular_from_reduced(times)


def build_Atilde_symmetric(flow, times, spt: SymmetricPoint) -> Mat2:
    """Ã_α as polynomials in (Q, P).

    ``flow`` is a τ-flow index k (with canonical ReducedTimes) or a general
    DeformationVector (with IrregularTimes or ReducedTimes).

    With the series A₁₂ ~ ν₋₁λ + ν₀ + Σ_{k≥1} ν_kλ^{−k} and C = Σc_iλ^i:
      Ǎ₁₂ = [Π·A₁₂]₊,  Ǎ₁₁ = C − [Q·A₁₂]₊,
      Ǎ₂₂ = C + [Q·A₁₂]₊ + [P̃₁·A₁₂]₊ + ħ(g+1)ν₋₁,
      Ǎ₂₁ = [Ľ₂₁·A₁₂]₊ + ħ quot(∂_λǍ₁₁, Π)
    followed by the G₁ gauge and its time derivative.
    """
    alpha, t = flow_data(flow, times)
    g = t.genus
    if spt.genus != g:
        raise ValueError(f"expected a genus-{g} point, got {spt.genus}")
    hbar = t.hbar
    Q, P = spt.Q, spt.P
    nu = list(solve_nu(alpha, t))
    nu += extend_nu_from_elem(nu, SymBasis.from_elementary(Q), 3)
    c = solve_c(alpha, t)
    C = Poly((0j,) + tuple(c))

    Lc = _lcheck_symmetric(t, spt)
    Pi, Qp, L21 = Lc.a12, -Lc.a11, Lc.a21
    P1 = p1_poly(t)

    def plus(p: Poly) -> Poly:
        return polypart_mul(p, nu, 1)

    A12 = plus(Pi)
    A11 = C - plus(Qp)
    A22 = C + plus(Qp) + plus(P1) + (g + 1) * hbar * nu[0]
    quot, _ = A11.diff().divmod(Pi)
    A21 = plus(L21) + quot * hbar
    Acheck = Mat2(A11, A12, A21, A22)

    # L_α[Q₁] in symmetric coordinates
    Q1 = Q[0] if g else 0j
    e = (1.0 + 0j,) + tuple(Q)
    LQ1 = 0j
    for k in range(1, g + 1):
        inner = 0j
        for i in range(k):
            term = e[k - 1 - i] * nu[i + 2]
            inner = inner + term if i % 2 == 0 else inner - term
        LQ1 = LQ1 + 2 * P[k - 1] * inner
    for k, coef in enumerate(P1.coeffs):
        LQ1 = LQ1 - coef * nu[k + 2]
    LQ1 = LQ1 - g * hbar * nu[1] - hbar * nu[0] * Q1

    gamma = gauge_gamma(t, Q1)
    L_gamma = _gamma_derivative(alpha, t, Q1, LQ1)
    return _g1_conjugate(Acheck, gamma) + Mat2(0.0, 0.0, L_gamma, 0.0)


def trace_law(alpha: DeformationVector, times, point) -> Poly:
    """Tr Ã_α from the deformation data alone:

    −Σ_{s≥1} α_{2s}λ^s/s + 2c₀ + ħ(g+1)ν₋₁ − Σ_{j=0}^{r−2} t_{2j+2}ν_j
    """
    t = _irregular(times)
    r, g, hbar = t.r_inf, t.genus, t.hbar
    basis = (
        SymBasis.from_elementary(point.Q)
        if isinstance(point, SymmetricPoint)
        else elem_from_roots(point.q)
    )
    nu = list(solve_nu(alpha, t))
    nu += extend_nu_from_elem(nu, basis, 1)
    const = (g + 1) * hbar * nu[0]
    for j in range(r - 1):
        const = const - t.at(2 * j + 2) * nu[j + 1]
    cs = [const] + [-alpha.at(2 * s) / s for s in range(1, r)]
    return Poly(tuple(cs))


# ── Spectral curve ──────────────────────────────────────────────────────


def spectral_curve(t: IrregularTimes, pt: DarbouxPoint) -> tuple[Poly, Poly]:
    """(P̃₁, P̂₂) of y² − P̃₁y + P̂₂ = 0 at ħ = 0, with P̂₂ = P̃₂ − ΣH_kλ^k."""
    H = solve_H(t, pt.q, pt.p, 0j)
    return p1_poly(t), p2_poly(t) - H.poly()


def classical_curve_residual(t: IrregularTimes, pt: DarbouxPoint) -> list:
    """p_i² − P̃₁(q_i)p_i + P̂₂(q_i) for every i."""
    P1, P2 = spectral_curve(t, pt)
    return [pi * pi - P1(qi) * pi + P2(qi) for qi, pi in zip(pt.q, pt.p)]


def on_curve_residual(pt: DarbouxPoint, Lt: Mat2) -> list:
    """(L̃₁₂(q_i), L̃₁₁(q_i) − p_i, det(p_iI − L̃(q_i))) for each i, flattened."""
    out = []
    for qi, pi in zip(pt.q, pt.p):
        a11, a12, a21, a22 = Lt(qi)
        out.append(a12)
        out.append(a11 - pi)
        out.append((pi - a11) * (pi - a22) - a12 * a21)
    return out

