"""
Symmetric Functions — elementary, complete homogeneous and power-sum bases
===========================================================================

For variables x₁..x_n:

    ∏(λ − x_j) = Σ_k (−1)^k e_k λ^{n−k}
    Σ_{i=0..k} (−1)^i e_i h_{k−i} = δ_{k,0}
    S_k = Σ_j x_j^k,  S₀ = n            (Newton recurrences)

Index conventions: e, h and S lists are 0-based in the power (``e[0] = 1``);
flow and coordinate indices taken from the 1-based ranges (P₁..P_g,
deleted-variable index i) are passed through unchanged and translated here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterator, Sequence

from p1lab.algebra import Poly, check_separation


@dataclass(frozen=True)
class SymBasis:
    """Elementary symmetric polynomials e₀..e_n of n variables."""

    n: int
    e: tuple

    def __post_init__(self):
        if len(self.e) != self.n + 1:
            raise ValueError("SymBasis needs e₀..e_n")

    @classmethod
    def from_elementary(cls, Q: Sequence) -> "SymBasis":
        """Basis from symmetric coordinates (Q₁..Q_g) = (e₁..e_g)."""
        return cls(len(Q), (1.0 + 0j,) + tuple(Q))

    def at(self, k: int):
        """e_k with e_k = 0 outside 0..n."""
        return self.e[k] if 0 <= k <= self.n else 0j


def elem_from_roots(x: Sequence) -> SymBasis:
    e: list = [1.0 + 0j]
    for xj in x:
        nxt = e + [0j]
        for k in range(len(e), 0, -1):
            nxt[k] = nxt[k] + xj * e[k - 1]
        e = nxt
    return SymBasis(len(x), tuple(e))


def homog_from_elem(b: SymBasis, kmax: int) -> list:
    """h₀..h_kmax by the e·h convolution recursion."""
    h: list = [1.0 + 0j]
    for k in range(1, kmax + 1):
        acc = 0j
        for i in range(1, min(k, b.n) + 1):
            term = b.e[i] * h[k - i]
            acc = acc + term if i % 2 else acc - term
        h.append(acc)
    return h


def power_sums(b: SymBasis, kmax: int) -> list:
    """S₀..S_kmax from Newton's identities."""
    S: list = [complex(b.n)]
    for k in range(1, kmax + 1):
        acc = 0j
        for i in range(1, k):
            term = b.at(i) * S[k - i]
            acc = acc + term if i % 2 else acc - term
        last = k * b.at(k)
        acc = acc + last if k % 2 else acc - last
        S.append(acc)
    return S


def compositions(m: int, top: int) -> Iterator[dict]:
    """Multiplicity maps {j: b_j} with Σ j·b_j = m, parts ≤ top."""
    if m == 0:
        yield {}
        return
    for j in range(min(m, top), 0, -1):
        for b in range(m // j, 0, -1):
            for rest in compositions(m - j * b, j - 1):
                out = dict(rest)
                out[j] = b
                yield out


def bell_power_sums(b: SymBasis, m: int) -> complex:
    """S_m via the multinomial (ordinary Bell) expansion in the e's.

    S_m = −m Σ_b (−1)^{|b|−1} (|b|−1)!/∏b_j! · ∏((−1)^j e_j)^{b_j}
    """
    if m < 1:
        raise ValueError("m must be ≥ 1")
    total = 0j
    for comp in compositions(m, min(m, b.n)):
        n_parts = sum(comp.values())
        coef = factorial(n_parts - 1)
        term: complex = 1.0 + 0j
        for j, bj in comp.items():
            term = term * ((-1) ** j * b.at(j)) ** bj
        denom = 1
        for bj in comp.values():
            denom *= factorial(bj)
        sign = -1 if (n_parts - 1) % 2 else 1
        total = total + sign * (coef / denom) * term
    return -m * total


def elem_deleted(b: SymBasis, xj, i: int):
    """e_{n−i}({x} ∖ {x_j}) = Σ_{m=i..n} (−1)^{m−i} e_{n−m} x_j^{m−i}."""
    acc = 0j
    power = 1.0 + 0j
    for m in range(i, b.n + 1):
        term = b.e[b.n - m] * power
        acc = acc + term if (m - i) % 2 == 0 else acc - term
        power = power * xj
    return acc


def elem_partial(b: SymBasis, i: int, xm):
    """∂e_i/∂x_m = Σ_{j=0..i−1} (−1)^j e_{i−1−j} x_m^j."""
    acc = 0j
    power = 1.0 + 0j
    for j in range(i):
        term = b.at(i - 1 - j) * power
        acc = acc + term if j % 2 == 0 else acc - term
        power = power * xm
    return acc


def momenta_from_symmetric(Q: Sequence, P: Sequence, q: Sequence) -> list:
    """p_i = Σ_k P_k ∂e_k/∂q_i, with e taken from Q."""
    b = SymBasis.from_elementary(Q)
    out = []
    for qi in q:
        acc = 0j
        for k in range(1, len(P) + 1):
            acc = acc + P[k - 1] * elem_partial(b, k, qi)
        out.append(acc)
    return out


def monic_from_elementary(Q: Sequence) -> Poly:
    """∏(λ − q_j) = Σ_k (−1)^k Q_k λ^{g−k}."""
    g = len(Q)
    cs = [0j] * (g + 1)
    cs[g] = 1.0 + 0j
    for k in range(1, g + 1):
        cs[g - k] = Q[k - 1] if k % 2 == 0 else -Q[k - 1]
    return Poly(tuple(cs))


def q_poly_from_symmetric(Q: Sequence, P: Sequence) -> Poly:
    """Q(λ) of degree ≤ g−1 from symmetric coordinates.

    a_j = (−1)^{j+1} Σ_{i=j+1..g} P_i Q_{i−j−1}   (Q₀ = 1)
    """
    g = len(Q)
    e = (1.0 + 0j,) + tuple(Q)
    cs = []
    for j in range(g):
        acc = 0j
        for i in range(j + 1, g + 1):
            acc = acc + P[i - 1] * e[i - j - 1]
        cs.append(acc if j % 2 else -acc)
    return Poly(tuple(cs))


def lagrange_Q(q: Sequence, P: Sequence) -> Poly:
    if len(q) != len(P):
        raise ValueError("q and P must have the same length")
    check_separation(list(q), "q")
    Q = elem_from_roots(q).e[1:]
    return q_poly_from_symmetric(Q, P)


def lagrange_form(q: Sequence, p: Sequence) -> Poly:
    """−Σ_i p_i ∏_{j≠i}(λ−q_j)/(q_i−q_j)."""
    check_separation(list(q), "q")
    out = Poly(())
    for i, qi in enumerate(q):
        others = [qj for j, qj in enumerate(q) if j != i]
        den = 1.0 + 0j
        for qj in others:
            den = den * (qi - qj)
        out = out + Poly.from_roots(others) * (-p[i] / den)
    return out


def vandermonde_power_identity(x: Sequence, i: int, M: int):
    """Σ_j (−1)^{n−i} e_{n−i}(x∖x_j) x_j^M / ∏_{m≠j}(x_j − x_m)."""
    check_separation(list(x), "x")
    n = len(x)
    b = elem_from_roots(x)
    sign = -1 if (n - i) % 2 else 1
    total = 0j
    for j, xj in enumerate(x):
        den = 1.0 + 0j
        for m, xm in enumerate(x):
            if m != j:
                den = den * (xj - xm)
        total = total + elem_deleted(b, xj, i) * xj**M / den
    return sign * total


def vandermonde_power_closed(x: Sequence, i: int, M: int):
    """Same sum as an e·h contraction:
    (−1)^{n−i} Σ_{m=i..n} (−1)^{m−i} e_{n−m} h_{M+m−i−n+1}.
    """
    n = len(x)
    b = elem_from_roots(x)
    h = homog_from_elem(b, max(M - i + 1, 0))
    total = 0j
    for m in range(max(i, 0), n + 1):
        k = M + m - i - n + 1
        if k < 0:
            continue
        term = b.e[n - m] * h[k]
        total = total + term if (m - i) % 2 == 0 else total - term
    return -total if (n - i) % 2 else total
