"""
Hamiltonians — general, symmetric and reduced forms, evolutions, coordinates
=============================================================================

    Ham^{(α)} = Σ_k ν_{k+1} H_k − ħΣ_jΣ_k c_k q_j^k − ħν₀Σ_j p_j − ħν₋₁Σ_j q_j p_j

is Hamiltonian for the deformation L_α = ħΣ_k α_k ∂_{t_k}:

    ∂Ham/∂p_j = L_α[q_j],   −∂Ham/∂q_j = L_α[p_j].

Evolution values are returned as L_α[·], i.e. with the ħ already applied;
along α^{τ_k} at canonical times they equal ħ∂_{τ_k}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from p1lab.algebra import Dual, check_separation, der, val
from p1lab.coeffs import (
    H_symmetric,
    deformation_coeffs,
    lu_solve,
    mu_closed_form,
    nu_reduced,
    solve_c,
    solve_H,
    solve_nu,
)
from p1lab.errors import IllConditioned
from p1lab.lax import DarbouxPoint, SymmetricPoint, flow_data
from p1lab.symfun import (
    SymBasis,
    elem_from_roots,
    elem_partial,
    homog_from_elem,
    momenta_from_symmetric,
    power_sums,
)
from p1lab.times import (
    DeformationVector,
    IrregularTimes,
    ReducedTimes,
    irregular_from_reduced,
    p1_poly,
    p2_poly,
    p2_poly_reduced,
    reduced_from_irregular,
)


@dataclass(frozen=True)
class HamiltonianValue:
    """Ham value with its named breakdown; ``value == sum(parts.values())``."""

    value: object
    parts: dict = field(default_factory=dict)

    @classmethod
    def from_parts(cls, **parts) -> "HamiltonianValue":
        total = 0j
        for v in parts.values():
            total = total + v
        return cls(total, dict(parts))


@dataclass(frozen=True)
class FlowDerivatives:
    """L_α[q_j] and L_α[p_j]."""

    dq: tuple
    dp: tuple


# ── Darboux coordinates ─────────────────────────────────────────────────


def general_hamiltonian(
    alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
) -> HamiltonianValue:
    hbar = t.hbar
    co = deformation_coeffs(alpha, t, pt.q)
    H = solve_H(t, pt.q, pt.p, hbar)
    iso = 0j
    for k, Hk in enumerate(H.H):
        iso = iso + co.nu_at(k + 1) * Hk
    c_part = 0j
    for qj in pt.q:
        for k in range(len(co.c) + 1):
            c_part = c_part - hbar * co.c_at(k) * qj**k
    sum_p = sum(pt.p, 0j)
    sum_qp = sum((qj * pj for qj, pj in zip(pt.q, pt.p)), 0j)
    return HamiltonianValue.from_parts(
        isospectral=iso,
        c=c_part,
        nu0=-hbar * co.nu_at(0) * sum_p,
        nu_minus1=-hbar * co.nu_at(-1) * sum_qp,
    )


def hamiltonian_mu_form(
    alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
):
    """Same Hamiltonian written with μ instead of the isospectral H_k.

    −(ħ/2)Σ_{i≠j}(μ_i+μ_j)(p_i−p_j)/(q_i−q_j) − ħΣ_j(ν₀p_j + ν₋₁q_jp_j)
      + Σ_j μ_j (p_j² − P̃₁(q_j)p_j + P̃₂(q_j)) − ħΣ_jΣ_k c_k q_j^k
    """
    hbar = t.hbar
    co = deformation_coeffs(alpha, t, pt.q)
    P1, P2 = p1_poly(t), p2_poly(t)
    q, p, mu = pt.q, pt.p, co.mu
    total = 0j
    for j in range(len(q)):
        for i in range(len(q)):
            if i != j:
                pair = (mu[i] + mu[j]) * (p[i] - p[j]) / (q[i] - q[j])
                total = total - 0.5 * hbar * pair
        total = total - hbar * (co.nu_at(0) * p[j] + co.nu_at(-1) * q[j] * p[j])
        total = total + mu[j] * (p[j] * p[j] - P1(q[j]) * p[j] + P2(q[j]))
        for k in range(len(co.c) + 1):
            total = total - hbar * co.c_at(k) * q[j] ** k
    return total


def evolution_general(
    alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
) -> FlowDerivatives:
    """L_α[q_j], L_α[p_j] from the explicit μ/ν/c formulas."""
    hbar = t.hbar
    co = deformation_coeffs(alpha, t, pt.q)
    H = solve_H(t, pt.q, pt.p, hbar)
    P1, P2 = p1_poly(t), p2_poly(t)
    dP1, dP2 = P1.diff(), P2.diff()
    q, p, mu = pt.q, pt.p, co.mu
    g = len(q)
    dq, dp = [], []
    for j in range(g):
        a = 2 * mu[j] * (p[j] - 0.5 * P1(q[j]))
        a = a - hbar * co.nu_at(0) - hbar * co.nu_at(-1) * q[j]
        b = 0j
        for i in range(g):
            if i == j:
                continue
            a = a - hbar * (mu[j] + mu[i]) / (q[j] - q[i])
            b = b + hbar * (mu[i] + mu[j]) * (p[i] - p[j]) / (q[j] - q[i]) ** 2
        inner = p[j] * dP1(q[j]) - dP2(q[j])
        for k in range(1, g):
            inner = inner + k * H.H[k] * q[j] ** (k - 1)
        b = b + mu[j] * inner + hbar * co.nu_at(-1) * p[j]
        for k in range(1, len(co.c) + 1):
            b = b + hbar * k * co.c_at(k) * q[j] ** (k - 1)
        dq.append(a)
        dp.append(b)
    return FlowDerivatives(tuple(dq), tuple(dp))


def _reduced_mu(k: int, rt: ReducedTimes, q: Sequence) -> list:
    return [mu_closed_form(k, i, rt, q) for i in range(1, len(q) + 1)]


def evolution_reduced(k: int, rt: ReducedTimes, pt: DarbouxPoint) -> FlowDerivatives:
    """ħ∂_{τ_k}(q̌_m, p̌_m) at canonical times.

    ħ∂q̌_m = 2μ_m p̌_m − ħΣ_{i≠m}(μ_m+μ_i)/(q̌_m−q̌_i)
    ħ∂p̌_m = ħΣ_{i≠m}(μ_i+μ_m)(p̌_i−p̌_m)/(q̌_m−q̌_i)²
             + μ_m(−P̃₂′(q̌_m) + Σ_{l=1}^{g−1} l H_l q̌_m^{l−1})
    """
    rt.require_canonical("evolution_reduced")
    hbar = rt.hbar
    q, p = pt.q, pt.p
    g = len(q)
    mu = _reduced_mu(k, rt, q)
    H = solve_H(irregular_from_reduced(rt), q, p, hbar)
    dP2 = p2_poly_reduced(rt).diff()
    dq, dp = [], []
    for m in range(g):
        a = 2 * mu[m] * p[m]
        b = 0j
        for i in range(g):
            if i == m:
                continue
            a = a - hbar * (mu[m] + mu[i]) / (q[m] - q[i])
            b = b + hbar * (mu[i] + mu[m]) * (p[i] - p[m]) / (q[m] - q[i]) ** 2
        inner = -dP2(q[m])
        for ell in range(1, g):
            inner = inner + ell * H.H[ell] * q[m] ** (ell - 1)
        dq.append(a)
        dp.append(b + mu[m] * inner)
    return FlowDerivatives(tuple(dq), tuple(dp))


def reduced_hamiltonian(k: int, rt: ReducedTimes, pt: DarbouxPoint):
    """Σ_i ν^{(α^{τ_k})}_i H_{i−1} at canonical times."""
    rt.require_canonical("reduced_hamiltonian")
    H = solve_H(irregular_from_reduced(rt), pt.q, pt.p, rt.hbar)
    total = 0j
    for i in range(1, rt.genus + 1):
        total = total + nu_reduced(k, i, rt) * H.H[i - 1]
    return total


# ── Symmetric coordinates ───────────────────────────────────────────────


def symmetric_hamiltonian(flow, times, spt: SymmetricPoint) -> HamiltonianValue:
    """Ham as a polynomial in (Q, P).

    ``flow`` is a τ-flow index (canonical ReducedTimes) or a DeformationVector.

    Σ_i ν_i H_{i−1} − ħν₀Σ_k (g−k)Q_kP_{k+1} − ħν₋₁Σ_k kQ_kP_k − ħΣ_k c_k S_k
    """
    return symmetric_hamiltonian_fn(flow, times)(spt.Q, spt.P)


def symmetric_hamiltonian_fn(
    flow, times
) -> Callable[[Sequence, Sequence], HamiltonianValue]:
    """(Q, P) ↦ Ham with the ν and c solves done once."""
    alpha, t = flow_data(flow, times)
    hbar = t.hbar
    nu = solve_nu(alpha, t)
    c = solve_c(alpha, t)

    def ham(Q: Sequence, P: Sequence) -> HamiltonianValue:
        g = len(Q)
        H = H_symmetric(t, Q, P, hbar)
        e = (1.0 + 0j,) + tuple(Q)
        S = power_sums(SymBasis.from_elementary(Q), len(c))
        iso = 0j
        for i in range(1, g + 1):
            iso = iso + nu[i + 1] * H.H[i - 1]
        sum_p = 0j
        sum_qp = 0j
        for k in range(g):
            sum_p = sum_p + (g - k) * e[k] * P[k]
        for k in range(1, g + 1):
            sum_qp = sum_qp + k * e[k] * P[k - 1]
        c_part = 0j
        for k, ck in enumerate(c, start=1):
            c_part = c_part - hbar * ck * S[k]
        return HamiltonianValue.from_parts(
            isospectral=iso,
            c=c_part,
            nu0=-hbar * nu[1] * sum_p,
            nu_minus1=-hbar * nu[0] * sum_qp,
        )

    return ham


def reduced_symmetric_hamiltonian(k: int, rt: ReducedTimes, spt: SymmetricPoint):
    """Explicit canonical polynomial: ħ-linear S-term, P-quadratic h-term, P̃₂-term."""
    rt.require_canonical("reduced_symmetric_hamiltonian")
    hbar = rt.hbar
    Q, P = spt.Q, spt.P
    g = len(Q)
    e = (1.0 + 0j,) + tuple(Q)
    basis = SymBasis.from_elementary(Q)
    h = homog_from_elem(basis, 2 * g + 2)
    S = power_sums(basis, g)
    P2 = p2_poly_reduced(rt)
    nu = [nu_reduced(k, i, rt) for i in range(1, g + 1)]

    def sgn(n: int) -> int:
        return -1 if n % 2 else 1

    def tail(i: int, shift: int):
        """Σ_{m=i}^{g} (−1)^{g−m} Q_{g−m} h_{shift+m−i−g+1}."""
        acc = 0j
        for m in range(i, g + 1):
            acc = acc + sgn(g - m) * e[g - m] * h[shift + m - i - g + 1]
        return acc

    total = 0j
    for i in range(1, g + 1):
        T1 = 0j
        for kk in range(i + 1, g + 1):
            acc = sgn(i) * (g - i) * e[kk - 1 - i]
            for m in range(i + 1, kk):
                acc = acc + sgn(m) * e[kk - 1 - m] * S[m - i]
            T1 = T1 + P[kk - 1] * acc
        T2 = 0j
        for k1 in range(1, g + 1):
            for k2 in range(1, g + 1):
                acc = 0j
                for r1 in range(max(0, i - k2), min(k1 - 1, i - 1) + 1):
                    acc = acc + sgn(i - 1) * e[k1 - 1 - r1] * e[k2 - i + r1]
                for r1 in range(k1):
                    for r2 in range(k2):
                        if r1 + r2 < g:
                            continue
                        acc = acc + (
                            sgn(r1 + r2)
                            * e[k1 - 1 - r1]
                            * e[k2 - 1 - r2]
                            * tail(i, r1 + r2)
                        )
                T2 = T2 + P[k1 - 1] * P[k2 - 1] * acc
        T3 = 0j
        for rho in range(g, len(P2.coeffs)):
            T3 = T3 + P2.coeff(rho) * tail(i, rho)
        total = total + nu[i - 1] * (-hbar * T1 + T2 + T3)
    return total


def to_symmetric(pt: DarbouxPoint) -> SymmetricPoint:
    """Q_i = e_i(q); P from p_i = Σ_k P_k ∂e_k/∂q_i."""
    q = pt.q
    g = len(q)
    if g == 0:
        return SymmetricPoint((), ())
    check_separation(list(q), "q")
    b = elem_from_roots(q)
    jac = [[elem_partial(b, k, qi) for k in range(1, g + 1)] for qi in q]
    P = lu_solve(jac, list(pt.p), "symmetric-coordinate Jacobian")
    return SymmetricPoint(tuple(b.e[1:]), tuple(P))


def _polish_root(coeffs: Sequence[complex], x: complex) -> complex:
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    for _ in range(2):
        d = dpoly(x)
        if d == 0:
            break
        x = x - poly(x) / d
    return complex(x)


def from_symmetric(spt: SymmetricPoint) -> DarbouxPoint:
    """Roots of λ^g − Q₁λ^{g−1} + Q₂λ^{g−2} − … by companion eigenvalues.

    Roots are sorted by (real, imag); PoleCollision if two coincide.
    """
    g = spt.genus
    if g == 0:
        return DarbouxPoint((), ())
    coeffs = [1.0 + 0j] + [
        (-val(Qk) if k % 2 else val(Qk)) for k, Qk in enumerate(spt.Q, start=1)
    ]
    roots = [_polish_root(coeffs, complex(x)) for x in np.roots(coeffs)]
    roots.sort(key=lambda z: (z.real, z.imag))
    check_separation(roots, "recovered roots")
    p = momenta_from_symmetric(spt.Q, spt.P, roots)
    return DarbouxPoint(tuple(roots), tuple(p))


def shifted_coordinates(
    pt: DarbouxPoint, rt: ReducedTimes, t: IrregularTimes
) -> DarbouxPoint:
    """q̌ = T₂q + T₁,  p̌ = (p − ½P̃₁(q))/T₂."""
    P1 = p1_poly(t)
    q = tuple(rt.T2 * qj + rt.T1 for qj in pt.q)
    p = tuple((pj - 0.5 * P1(qj)) / rt.T2 for qj, pj in zip(pt.q, pt.p))
    return DarbouxPoint(q, p)


# ── Symplectic checks ───────────────────────────────────────────────────


CoordinateMap = Callable[[Sequence, Sequence], tuple[Sequence, Sequence]]


def symmetric_map(q: Sequence, p: Sequence) -> tuple[Sequence, Sequence]:
    spt = to_symmetric(DarbouxPoint(tuple(q), tuple(p)))
    return spt.Q, spt.P


def shifted_map(rt: ReducedTimes, t: IrregularTimes) -> CoordinateMap:
    def mapping(q: Sequence, p: Sequence) -> tuple[Sequence, Sequence]:
        out = shifted_coordinates(DarbouxPoint(tuple(q), tuple(p)), rt, t)
        return out.q, out.p

    return mapping


def jacobian(mapping: CoordinateMap, pt: DarbouxPoint) -> np.ndarray:
    """∂(new q, new p)/∂(q, p) by one dual pass per coordinate."""
    g = pt.genus
    base = [val(x) for x in pt.q] + [val(x) for x in pt.p]
    M = np.zeros((2 * g, 2 * g), dtype=complex)
    for col in range(2 * g):
        seeded = [Dual(b, 1.0 if i == col else 0.0) for i, b in enumerate(base)]
        new_q, new_p = mapping(seeded[:g], seeded[g:])
        for row, x in enumerate(list(new_q) + list(new_p)):
            M[row, col] = der(x)
    if not np.all(np.isfinite(M)):
        raise IllConditioned("coordinate Jacobian has non-finite entries")
    return M


def symplectic_jacobian_check(mapping: CoordinateMap, pt: DarbouxPoint) -> float:
    """‖MᵀΩM − Ω‖∞ with Ω = [[0, I], [−I, 0]]."""
    g = pt.genus
    if g == 0:
        return 0.0
    M = jacobian(mapping, pt)
    omega = np.block(
        [[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]]
    )
    return float(np.max(np.abs(M.T @ omega @ M - omega)))


def trivial_direction_residual(
    alpha: DeformationVector, t: IrregularTimes, pt: DarbouxPoint
) -> float:
    """max |L_α[q̌_j]|, |L_α[p̌_j]| by the chain rule through the time maps."""
    hbar = val(t.hbar)
    flow = evolution_general(alpha, t, pt)
    seeded_t = IrregularTimes(
        t.r_inf,
        tuple(Dual(val(x), hbar * val(a)) for x, a in zip(t.t, alpha.alpha)),
        t.hbar,
    )
    seeded_pt = DarbouxPoint(
        tuple(Dual(val(x), d) for x, d in zip(pt.q, flow.dq)),
        tuple(Dual(val(x), d) for x, d in zip(pt.p, flow.dp)),
    )
    moved = shifted_coordinates(
        seeded_pt, reduced_from_irregular(seeded_t), seeded_t
    )
    return max((abs(der(x)) for x in moved.q + moved.p), default=0.0)
