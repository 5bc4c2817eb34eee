"""
Deformation Coefficients — ν, μ, c and the isospectral Hamiltonians
====================================================================

Every linear-algebraic determination behind A_α and the Hamiltonians:

  M∞ ν = (2α_{2r−3}/(2r−3), 2α_{2r−5}/(2r−5), …, 2α₁)ᵀ       Toeplitz, forward substitution
  V∞ μ = (ν₁, …, ν_g)ᵀ                                      Vandermonde, pivoted LU
  M∞ (c_{r−1}, …, c₁)ᵀ = rhs(α, t)                           Toeplitz, forward substitution
  V∞ᵀ H = (p_j² − P̃₁(q_j)p_j + P̃₂(q_j) + ħΣ_{i≠j}(p_i−p_j)/(q_j−q_i))_j

The closed forms (deleted-e inverses of V∞, F-polynomial inverse of the
τ-Toeplitz matrix) are shipped next to the solves and cross-checked by the
verification battery.

ν vectors are stored from index −1: ``nu[0]`` is ν₋₁, ``nu[j + 1]`` is ν_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from p1lab.algebra import Poly, check_separation, mag, val
from p1lab.central_config import config
from p1lab.errors import IllConditioned, IndexOutOfRange
from p1lab.symfun import (
    SymBasis,
    compositions,
    elem_deleted,
    elem_from_roots,
    monic_from_elementary,
    power_sums,
    q_poly_from_symmetric,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    p1_poly,
    p2_poly,
)


# ── Value types ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class DeformationCoeffs:
    """ν₋₁..ν_{r−3}, μ₁..μ_g, c₁..c_{r−1} and the conventional c₀ = 0."""

    nu: tuple
    mu: tuple
    c: tuple
    c0: object = 0j

    def nu_at(self, j: int):
        if -1 <= j <= len(self.nu) - 2:
            return self.nu[j + 1]
        return 0j

    def c_at(self, k: int):
        if k == 0:
            return self.c0
        if 1 <= k <= len(self.c):
            return self.c[k - 1]
        return 0j

    def rho(self, p: Sequence) -> tuple:
        """Residues of A₁₁: ρ_j = −μ_j p_j."""
        return tuple(-m * pj for m, pj in zip(self.mu, p))


@dataclass(frozen=True)
class IsoHamiltonians:
    """H_{∞,0..g−1}."""

    H: tuple

    def poly(self) -> Poly:
        return Poly(tuple(self.H))


# ── Dense solvers ───────────────────────────────────────────────────────


def toeplitz_column(t: IrregularTimes) -> list:
    """First column of M∞: t_{2r−3}, t_{2r−5}, …, t₁."""
    r = t.r_inf
    return [t.at(2 * r - 3 - 2 * i) for i in range(r - 1)]


def toeplitz_M(t: IrregularTimes) -> list[list]:
    col = toeplitz_column(t)
    n = len(col)
    return [[col[i - j] if i >= j else 0j for j in range(n)] for i in range(n)]


def forward_substitution(col: Sequence, rhs: Sequence) -> list:
    """Solve the lower-triangular Toeplitz system with first column ``col``."""
    x: list = []
    for i, b in enumerate(rhs):
        acc = b
        for j in range(i):
            acc = acc - col[i - j] * x[j]
        x.append(acc / col[0])
    return x


def _check_condition(A: Sequence[Sequence], what: str) -> None:
    values = np.array([[val(x) for x in row] for row in A], dtype=complex)
    if values.size == 0:
        return
    cond = np.linalg.cond(values)
    if not np.isfinite(cond) or cond > config.MAX_CONDITION:
        raise IllConditioned(
            f"{what}: condition number {cond:.3e} exceeds {config.MAX_CONDITION:.0e}"
        )


def lu_solve(A: Sequence[Sequence], b: Sequence, what: str = "system") -> list:
    """Gaussian elimination with partial pivoting; entries may be dual numbers."""
    _check_condition(A, what)
    n = len(b)
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(val(M[i][col])))
        if mag(M[piv][col]) == 0:
            raise IllConditioned(f"{what}: singular matrix")
        M[col], M[piv] = M[piv], M[col]
        for i in range(col + 1, n):
            f = M[i][col] / M[col][col]
            for j in range(col, n + 1):
                M[i][j] = M[i][j] - f * M[col][j]
    x: list = [0j] * n
    for i in range(n - 1, -1, -1):
        acc = M[i][n]
        for j in range(i + 1, n):
            acc = acc - M[i][j] * x[j]
        x[i] = acc / M[i][i]
    return x


def vandermonde(q: Sequence) -> list[list]:
    """V∞[i][j] = q_j^i, i = 0..g−1."""
    g = len(q)
    return [[qj**i for qj in q] for i in range(g)]


# ── ν ───────────────────────────────────────────────────────────────────


def solve_nu(alpha: DeformationVector, t: IrregularTimes) -> tuple:
    """ν₋₁..ν_{r−3} from M∞ν = (2α_{2r−3−2i}/(2r−3−2i))_i."""
    r = t.r_inf
    col = toeplitz_column(t)
    rhs = [2 * alpha.at(2 * r - 3 - 2 * i) / (2 * r - 3 - 2 * i) for i in range(r - 1)]
    return tuple(forward_substitution(col, rhs))


def extend_nu_from_elem(nu: Sequence, b: SymBasis, mmax: int) -> list:
    """ν_{g+1..g+mmax}: ν_{g+m} = Σ_{k=m}^{g+m−1} (−1)^{g+m−1−k} ν_k e_{g+m−k}."""
    g = b.n
    full = list(nu)  # full[j + 1] = ν_j
    for m in range(1, mmax + 1):
        acc = 0j
        for k in range(m, g + m):
            term = full[k + 1] * b.at(g + m - k)
            acc = acc + term if (g + m - 1 - k) % 2 == 0 else acc - term
        full.append(acc)
    return full[g + 2 :]


def extend_nu(nu: Sequence, q: Sequence, mmax: int) -> list:
    return extend_nu_from_elem(nu, elem_from_roots(q), mmax)


# ── μ ───────────────────────────────────────────────────────────────────


def solve_mu(nu: Sequence, q: Sequence) -> tuple:
    g = len(q)
    if g == 0:
        return ()
    check_separation(list(q), "q")
    rhs = [nu[j + 1] for j in range(1, g + 1)]
    return tuple(lu_solve(vandermonde(q), rhs, "Vandermonde V∞"))


def _vandermonde_denominator(q: Sequence, i: int):
    den = 1.0 + 0j
    for m, qm in enumerate(q):
        if m != i:
            den = den * (q[i] - qm)
    return den


def mu_closed_form(k: int, i: int, rt: ReducedTimes, q: Sequence):
    """μ_i along α^{τ_k} at canonical times (1-based k and i).

    μ_i = 2/(2r−2k−5) / ∏_{m≠i}(q_i−q_m)
          · [(−1)^{g−k} e_{g−k}(q∖q_i) + Σ_{l=k+2}^{g} (−1)^{g−l} e_{g−l}(q∖q_i) F_{l−k−1}]
    """
    rt.require_canonical("mu_closed_form")
    g = rt.genus
    _check_flow_index(k, g)
    if not 1 <= i <= g:
        raise IndexOutOfRange(f"μ index must lie in 1..{g} (got {i})")
    check_separation(list(q), "q")
    b = elem_from_roots(q)
    qi = q[i - 1]
    acc = elem_deleted(b, qi, k)
    acc = -acc if (g - k) % 2 else acc
    for ell in range(k + 2, g + 1):
        term = elem_deleted(b, qi, ell) * F_poly(ell - k - 1, rt.tau)
        acc = acc - term if (g - ell) % 2 else acc + term
    pref = 2 / (2 * rt.r_inf - 2 * k - 5)
    return pref * acc / _vandermonde_denominator(q, i - 1)


# ── c ───────────────────────────────────────────────────────────────────


def solve_c(alpha: DeformationVector, t: IrregularTimes) -> tuple:
    """c₁..c_{r−1}.  Row i of the Toeplitz system belongs to c_{r−1−i}:

    rhs_k = Σ_{m=k}^{r−1} ( α_{2k+2r−2m−3}/(2k+2r−2m−3) · t_{2m}
                          − α_{2k+2r−2m−2}/(2k+2r−2m−2) · t_{2m−1} )
    """
    r = t.r_inf
    col = toeplitz_column(t)
    rhs = []
    for i in range(r - 1):
        k = r - 1 - i
        acc = 0j
        for m in range(k, r):
            odd = 2 * k + 2 * r - 2 * m - 3
            even = odd + 1
            acc = acc + alpha.at(odd) / odd * t.at(2 * m)
            acc = acc - alpha.at(even) / even * t.at(2 * m - 1)
        rhs.append(acc)
    desc = forward_substitution(col, rhs)
    return tuple(reversed(desc))


def deformation_coeffs(
    alpha: DeformationVector, t: IrregularTimes, q: Sequence
) -> DeformationCoeffs:
    if alpha.r_inf != t.r_inf:
        raise ValueError("deformation vector and times disagree on r_inf")
    nu = solve_nu(alpha, t)
    return DeformationCoeffs(nu, solve_mu(nu, q), solve_c(alpha, t))


# ── Isospectral Hamiltonians ────────────────────────────────────────────


def _h_rhs(t: IrregularTimes, q: Sequence, p: Sequence, hbar) -> list:
    P1 = p1_poly(t)
    P2 = p2_poly(t)
    out = []
    for j, (qj, pj) in enumerate(zip(q, p)):
        acc = pj * pj - P1(qj) * pj + P2(qj)
        for i, (qi, pi) in enumerate(zip(q, p)):
            if i != j:
                acc = acc + hbar * (pi - pj) / (qj - qi)
        out.append(acc)
    return out


def solve_H(
    t: IrregularTimes, q: Sequence, p: Sequence, hbar=None
) -> IsoHamiltonians:
    hbar = t.hbar if hbar is None else hbar
    g = len(q)
    if g != t.genus:
        raise ValueError(f"expected {t.genus} apparent singularities, got {g}")
    if g == 0:
        return IsoHamiltonians(())
    check_separation(list(q), "q")
    VT = [[qj**k for k in range(g)] for qj in q]
    return IsoHamiltonians(tuple(lu_solve(VT, _h_rhs(t, q, p, hbar), "V∞ᵀ")))


def H_closed_form(i: int, t: IrregularTimes, q: Sequence, p: Sequence, hbar=None):
    """H_{i−1} = Σ_m (−1)^{g−i} e_{g−i}(q∖q_m) / ∏_{r≠m}(q_m−q_r) · RHS_m."""
    hbar = t.hbar if hbar is None else hbar
    g = len(q)
    if not 1 <= i <= g:
        raise IndexOutOfRange(f"H index must lie in 1..{g} (got {i})")
    check_separation(list(q), "q")
    b = elem_from_roots(q)
    rhs = _h_rhs(t, q, p, hbar)
    acc = 0j
    for m, qm in enumerate(q):
        acc = acc + elem_deleted(b, qm, i) * rhs[m] / _vandermonde_denominator(q, m)
    return -acc if (g - i) % 2 else acc


def H_symmetric(
    t: IrregularTimes, Q: Sequence, P: Sequence, hbar=None
) -> IsoHamiltonians:
    """Isospectral Hamiltonians as polynomials in (Q, P).

    H(λ) = rem(P̃₂ + P̃₁Q + Q², Π) − ħQ′ + ħ Σ_n a_n Σ_{s<n} S_{n−1−s} λ^s
    with Π = ∏(λ−q_j), Q(λ) = Σ a_n λ^n and S the power sums of the roots.
    """
    hbar = t.hbar if hbar is None else hbar
    g = len(Q)
    if g == 0:
        return IsoHamiltonians(())
    Pi = monic_from_elementary(Q)
    Qp = q_poly_from_symmetric(Q, P)
    _, rem = (p2_poly(t) + p1_poly(t) * Qp + Qp * Qp).divmod(Pi)
    S = power_sums(SymBasis.from_elementary(Q), g)
    corr: list = [0j] * g
    for n in range(g):
        a_n = Qp.coeff(n)
        for s in range(n):
            corr[s] = corr[s] + a_n * S[n - 1 - s]
    H = rem - Qp.diff() * hbar + Poly(tuple(corr)) * hbar
    return IsoHamiltonians(tuple(H.coeff(k) for k in range(g)))


# ── Reduced (canonical) closed forms ────────────────────────────────────


def _check_flow_index(k: int, g: int) -> None:
    if not 1 <= k <= g:
        raise IndexOutOfRange(f"flow index must lie in 1..{g} (got {k})")


def F_poly(i: int, tau: Sequence):
    """F_i(τ₁, …, τ_i): Σ over (b_j) with Σ(j+1)b_j = i+1 of
    (Σb)!/∏b_j! · (−1)^{Σb} · ∏τ_j^{b_j}.

    Equivalently the coefficient of x^{i+1} in 1/(1 + Σ_j τ_j x^{j+1}).
    """
    if i < 1:
        raise IndexOutOfRange(f"F_i needs i ≥ 1 (got {i})")
    if i > len(tau):
        raise IndexOutOfRange(f"F_{i} needs τ₁..τ_{i}, got {len(tau)} value(s)")
    total = 0j
    for comp in compositions(i + 1, i + 1):
        if 1 in comp:
            continue
        n_parts = sum(comp.values())
        coef = factorial(n_parts)
        term: complex = 1.0 + 0j
        for part, bj in comp.items():
            coef //= factorial(bj)
            term = term * tau[part - 2] ** bj
        total = total + (-coef if n_parts % 2 else coef) * term
    return total


def tau_toeplitz_inverse(rt: ReducedTimes) -> list[list]:
    """Inverse of the canonical M∞ = 2(I + Σ_j τ_j N^{j+1}) via F-polynomials."""
    rt.require_canonical("tau_toeplitz_inverse")
    n = rt.r_inf - 1
    col = [0.5 + 0j, 0j] + [0.5 * F_poly(d - 1, rt.tau) for d in range(2, n)]
    return [[col[i - j] if i >= j else 0j for j in range(n)] for i in range(n)]


def nu_reduced(j: int, k: int, rt: ReducedTimes):
    """ν_k along α^{τ_j} at canonical times.

    (2/(2r−2j−5)) · (δ_{jk} + F_{k−j−1}(τ) for k ≥ j+2)
    """
    rt.require_canonical("nu_reduced")
    g = rt.genus
    _check_flow_index(j, g)
    if not 1 <= k <= g:
        raise IndexOutOfRange(f"ν index must lie in 1..{g} (got {k})")
    pref = 2 / (2 * rt.r_inf - 2 * j - 5)
    if k == j:
        return pref + 0j
    if k >= j + 2:
        return pref * F_poly(k - j - 1, rt.tau)
    return 0j
