"""
Deformation Base — irregular times, trivial/isomonodromic times, tangent vectors
=================================================================================

Coordinates on the (2g+4)-dimensional base of the ramified pole at infinity
of order r = r_inf = g + 3:

  IrregularTimes   t_1 .. t_{2r−2}, ħ
  ReducedTimes     T_{∞,1..r−1} (= even times), T₁, T₂, τ_1..τ_g, ħ

The canonical choice of trivial times is T_{∞,k} = 0, T₁ = 0, T₂ = 1, i.e.
t_{2r−3} = 2, t_{2r−5} = 0, even times 0 and t_{2k−1} = 2τ_{r−k−2}.

Fractional powers use the principal branch throughout; irregular_from_reduced
inverts reduced_from_irregular on the principal sheet only.

Polynomials built here:
  P̃₁(λ) = −Σ_{j=0..r−2} t_{2j+2} λ^j
  P̃₂(λ) = Σ_{k=r−3..2r−4} P̃₂,k λ^k   (quadratic in the odd and even times)
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

from p1lab.algebra import (
    Dual,
    Poly,
    complex_from_json,
    complex_to_json,
    cpow,
    der,
    val,
)
from p1lab.central_config import config
from p1lab.errors import DegenerateTimes, IndexOutOfRange, NotCanonical


def _check_genus(r_inf: int) -> None:
    if r_inf < 3:
        raise IndexOutOfRange(f"r_inf must be ≥ 3 (got {r_inf})")
    if r_inf - 3 > config.MAX_GENUS:
        raise IndexOutOfRange(
            f"genus {r_inf - 3} exceeds the supported maximum {config.MAX_GENUS}"
        )


def _is_zero(x) -> bool:
    return val(x) == 0 and der(x) == 0


# ── Value types ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class IrregularTimes:
    """t_{∞,1..2r−2} and ħ.  ``t[k−1]`` holds t_{∞,k}."""

    r_inf: int
    t: tuple
    hbar: object = config.DEFAULT_HBAR

    def __post_init__(self):
        _check_genus(self.r_inf)
        if len(self.t) != 2 * self.r_inf - 2:
            raise ValueError(
                f"r_inf = {self.r_inf} needs {2 * self.r_inf - 2} irregular times"
            )
        if val(self.t[2 * self.r_inf - 4]) == 0:
            raise DegenerateTimes("t_{∞,2r−3} = 0: the times are degenerate")
        object.__setattr__(self, "t", tuple(self.t))

    @property
    def genus(self) -> int:
        return self.r_inf - 3

    def at(self, k: int):
        """t_{∞,k}, zero outside 1..2r−2."""
        if 1 <= k <= 2 * self.r_inf - 2:
            return self.t[k - 1]
        return 0j

    @classmethod
    def canonical(cls, tau: Sequence, hbar=None) -> "IrregularTimes":
        """Canonical trivial times carrying the given isomonodromic times."""
        g = len(tau)
        r = g + 3
        t: list = [0j] * (2 * r - 2)
        t[2 * r - 4] = 2.0 + 0j
        for k in range(1, r - 2):
            t[2 * k - 2] = 2 * tau[r - k - 3]
        return cls(r, tuple(t), config.DEFAULT_HBAR if hbar is None else hbar)


@dataclass(frozen=True)
class ReducedTimes:
    """T_{∞,1..r−1}, T₁, T₂, τ_{1..g} and ħ."""

    r_inf: int
    T_inf: tuple
    T1: object
    T2: object
    tau: tuple
    hbar: object = config.DEFAULT_HBAR

    def __post_init__(self):
        _check_genus(self.r_inf)
        if len(self.T_inf) != self.r_inf - 1:
            raise ValueError(f"T_inf must hold {self.r_inf - 1} entries")
        if len(self.tau) != self.r_inf - 3:
            raise ValueError(f"tau must hold {self.r_inf - 3} entries")
        if val(self.T2) == 0:
            raise DegenerateTimes("T₂ = 0: the times are degenerate")
        object.__setattr__(self, "T_inf", tuple(self.T_inf))
        object.__setattr__(self, "tau", tuple(self.tau))

    @property
    def genus(self) -> int:
        return self.r_inf - 3

    @property
    def is_canonical(self) -> bool:
        return (
            all(_is_zero(x) for x in self.T_inf)
            and _is_zero(self.T1)
            and val(self.T2) == 1
            and der(self.T2) == 0
        )

    def require_canonical(self, what: str) -> None:
        if not self.is_canonical:
            raise NotCanonical(f"{what} needs the canonical choice of trivial times")

    def with_tau(self, tau: Sequence) -> "ReducedTimes":
        return ReducedTimes(
            self.r_inf, self.T_inf, self.T1, self.T2, tuple(tau), self.hbar
        )

    @classmethod
    def canonical(cls, tau: Sequence, hbar=None) -> "ReducedTimes":
        r = len(tau) + 3
        return cls(
            r,
            (0j,) * (r - 1),
            0j,
            1.0 + 0j,
            tuple(tau),
            config.DEFAULT_HBAR if hbar is None else hbar,
        )


@dataclass(frozen=True)
class DeformationVector:
    """α_{∞,1..2r−2}; ``alpha[k−1]`` holds α_{∞,k}."""

    alpha: tuple

    def __post_init__(self):
        if len(self.alpha) < 4 or len(self.alpha) % 2:
            raise ValueError("a deformation vector has 2g+4 entries")
        object.__setattr__(self, "alpha", tuple(self.alpha))

    @property
    def r_inf(self) -> int:
        return len(self.alpha) // 2 + 1

    def at(self, k: int):
        if 1 <= k <= len(self.alpha):
            return self.alpha[k - 1]
        return 0j

    def __add__(self, other: "DeformationVector") -> "DeformationVector":
        return DeformationVector(tuple(a + b for a, b in zip(self.alpha, other.alpha)))

    def scale(self, c) -> "DeformationVector":
        return DeformationVector(tuple(a * c for a in self.alpha))


# ── Time maps ───────────────────────────────────────────────────────────


def _prod(values) -> float:
    out = 1.0
    for v in values:
        out *= v
    return out


def reduced_from_irregular(t: IrregularTimes) -> ReducedTimes:
    """Trivial and isomonodromic times from the irregular times.

    With a = ½t_{2r−3} and b = ½t_{2r−5}:
      T₂ = a^{2/(2r−3)},  T₁ = t_{2r−5}/(2r−5) · a^{−(2r−5)/(2r−3)}
      τ_k = Σ_{i<k} (−1)^i ∏_{s≤i}(2r−2k+2s−7) b^i a^{−((2r−3)i+2r−5−2k)/(2r−3)}
                      · ½t_{2r−5−2k+2i} / (i!(2r−5)^i)
            + (−1)^k ∏_{s≤k}(2r−2k+2s−7) b^{k+1} a^{−(k+1)(2r−5)/(2r−3)}
                      / ((k+1)(k−1)!(2r−5)^k)
    """
    r = t.r_inf
    g = t.genus
    a = t.at(2 * r - 3) * 0.5
    b = t.at(2 * r - 5) * 0.5
    n = 2 * r - 3
    T_inf = tuple(t.at(2 * k) for k in range(1, r))
    T2 = cpow(a, 2 / n)
    T1 = t.at(2 * r - 5) / (2 * r - 5) * cpow(a, -(2 * r - 5) / n)
    tau = []
    for k in range(1, g + 1):
        acc = 0j
        for i in range(k):
            coef = (-1) ** i * _prod(2 * r - 2 * k + 2 * s - 7 for s in range(1, i + 1))
            coef /= factorial(i) * (2 * r - 5) ** i
            expo = -((2 * r - 3) * i + 2 * r - 5 - 2 * k) / n
            half_t = 0.5 * t.at(2 * r - 5 - 2 * k + 2 * i)
            acc = acc + coef * b**i * cpow(a, expo) * half_t
        coef = (-1) ** k * _prod(2 * r - 2 * k + 2 * s - 7 for s in range(1, k + 1))
        coef /= (k + 1) * factorial(k - 1) * (2 * r - 5) ** k
        acc = acc + coef * b ** (k + 1) * cpow(a, -(k + 1) * (2 * r - 5) / n)
        tau.append(acc)
    return ReducedTimes(r, T_inf, T1, T2, tuple(tau), t.hbar)


def _odd_time_coefficients(r: int, k: int) -> tuple[list, float]:
    """Coefficients of t_{2k−1} / (2T₂^{(2k−1)/2}) in τ_p T₁^{r−k−p−2} and T₁^{r−1−k}."""
    coefs = []
    for p in range(1, r - k - 1):
        num = _prod(2 * r - 2 * m - 5 for m in range(p + 1, r - k - 1))
        den = 2 ** (r - k - p - 2) * factorial(r - k - p - 2)
        coefs.append(num / den)
    num = _prod(2 * r - 2 * m - 5 for m in range(0, r - k - 1))
    den = 2 ** (r - 1 - k) * factorial(r - 1 - k)
    return coefs, num / den


def irregular_from_reduced(rt: ReducedTimes) -> IrregularTimes:
    """Inverse map on the principal sheet.

    t_{2r−3} = 2T₂^{(2r−3)/2},  t_{2r−5} = (2r−5)T₁T₂^{(2r−5)/2},  t_{2i} = T_{∞,i},
    t_{2k−1} = 2T₂^{(2k−1)/2} (Σ_p C_{k,p} T₁^{r−k−p−2} τ_p + D_k T₁^{r−1−k}).
    """
    r = rt.r_inf
    t: list = [0j] * (2 * r - 2)
    for i in range(1, r):
        t[2 * i - 1] = rt.T_inf[i - 1]
    t[2 * r - 4] = 2 * cpow(rt.T2, (2 * r - 3) / 2)
    t[2 * r - 6] = (2 * r - 5) * rt.T1 * cpow(rt.T2, (2 * r - 5) / 2)
    for k in range(1, r - 2):
        coefs, tail = _odd_time_coefficients(r, k)
        acc = tail * rt.T1 ** (r - 1 - k)
        for p, c in enumerate(coefs, start=1):
            acc = acc + c * rt.T1 ** (r - k - p - 2) * rt.tau[p - 1]
        t[2 * k - 2] = 2 * cpow(rt.T2, (2 * k - 1) / 2) * acc
    return IrregularTimes(r, tuple(t), rt.hbar)


def tau_by_substitution(t: IrregularTimes) -> tuple:
    """τ from the odd times by forward substitution in the inverse map.

    The inverse map is unit lower-triangular in τ (τ_{r−k−2} enters t_{2k−1}
    with coefficient one), so this is an independent route to the τ_k.
    """
    base = reduced_from_irregular(t)
    r = t.r_inf
    T1, T2 = base.T1, base.T2
    tau: list = [0j] * t.genus
    for p_top in range(1, t.genus + 1):
        k = r - p_top - 2
        coefs, tail = _odd_time_coefficients(r, k)
        acc = t.at(2 * k - 1) / (2 * cpow(T2, (2 * k - 1) / 2))
        acc = acc - tail * T1 ** (r - 1 - k)
        for p, c in enumerate(coefs[:-1], start=1):
            acc = acc - c * T1 ** (r - k - p - 2) * tau[p - 1]
        tau[p_top - 1] = acc
    return tuple(tau)


# ── Tangent vectors ─────────────────────────────────────────────────────


def trivial_vector_w(k: int, t: IrregularTimes) -> DeformationVector:
    """w_k = e_{2k}."""
    r = t.r_inf
    if not 1 <= k <= r - 1:
        raise IndexOutOfRange(f"w_k needs 1 ≤ k ≤ {r - 1} (got {k})")
    alpha: list = [0j] * (2 * r - 2)
    alpha[2 * k - 1] = 1.0 + 0j
    return DeformationVector(tuple(alpha))


def trivial_vector_u(k: int, t: IrregularTimes) -> DeformationVector:
    """u_k = ½ Σ_{s=1..2r−2k−4} s · t_{s+2k+2} e_s."""
    r = t.r_inf
    if not -1 <= k <= r - 3:
        raise IndexOutOfRange(f"u_k needs −1 ≤ k ≤ {r - 3} (got {k})")
    alpha: list = [0j] * (2 * r - 2)
    for s in range(1, 2 * r - 2 * k - 3):
        alpha[s - 1] = 0.5 * s * t.at(s + 2 * k + 2)
    return DeformationVector(tuple(alpha))


def tau_tangent_vector(k: int, rt: ReducedTimes) -> DeformationVector:
    """α^{τ_k}: the irregular-time direction of ∂/∂τ_k."""
    r = rt.r_inf
    g = rt.genus
    if not 1 <= k <= g:
        raise IndexOutOfRange(f"τ_k needs 1 ≤ k ≤ {g} (got {k})")
    alpha: list = [0j] * (2 * r - 2)
    for i in range(1, r - k - 1):
        e = r - i - k - 2
        num = _prod(2 * r - 2 * m - 5 for m in range(k + 1, r - i - 1))
        coef = 2 * num / (2**e * factorial(e))
        alpha[2 * i - 2] = coef * rt.T1**e * cpow(rt.T2, (2 * i - 1) / 2)
    return DeformationVector(tuple(alpha))


# ── Polynomials P̃₁, P̃₂ ─────────────────────────────────────────────────


def p1_poly(t: IrregularTimes) -> Poly:
    r = t.r_inf
    return Poly(tuple(-t.at(2 * j + 2) for j in range(r - 1)))


def p2_poly(t: IrregularTimes) -> Poly:
    """P̃₂ with P̃₂,k = ¼Σ_{j=2k−2r+6}^{2r−2}(−1)^j t_j t_{2k−j+4} for k ≥ r−2
    and P̃₂,{r−3} = ¼Σ_{j=1}^{2r−3}(−1)^j t_j t_{2r−j−2}.
    """
    r = t.r_inf
    cs: list = [0j] * (2 * r - 3)
    for k in range(r - 2, 2 * r - 3):
        acc = 0j
        for j in range(2 * k - 2 * r + 6, 2 * r - 1):
            term = t.at(j) * t.at(2 * k - j + 4)
            acc = acc + term if j % 2 == 0 else acc - term
        cs[k] = 0.25 * acc
    acc = 0j
    for j in range(1, 2 * r - 2):
        term = t.at(j) * t.at(2 * r - j - 2)
        acc = acc + term if j % 2 == 0 else acc - term
    cs[r - 3] = 0.25 * acc
    return Poly(tuple(cs))


def p2_poly_reduced(rt: ReducedTimes) -> Poly:
    """τ-only form of P̃₂ at canonical trivial times.

    −λ^{2r−5} − Σ_{k=r−3}^{2r−7} (2τ_{2r−k−6} + Σ_{u+v=2r−k−7} τ_u τ_v) λ^k
    """
    rt.require_canonical("p2_poly_reduced")
    r = rt.r_inf
    tau = rt.tau
    cs: list = [0j] * (2 * r - 4)
    cs[2 * r - 5] = -1.0 + 0j
    for k in range(r - 3, 2 * r - 6):
        acc = 2 * tau[2 * r - k - 7]
        s = 2 * r - k - 7
        for u in range(1, s):
            acc = acc + tau[u - 1] * tau[s - u - 1]
        cs[k] = -acc
    return Poly(tuple(cs))


# ── Directional derivatives of the time maps ───────────────────────────


def directional_times(t: IrregularTimes, direction: DeformationVector) -> ReducedTimes:
    """Reduced times whose dual parts hold the derivative along ``direction``."""
    seeded = IrregularTimes(
        t.r_inf,
        tuple(Dual(val(x), val(d)) for x, d in zip(t.t, direction.alpha)),
        t.hbar,
    )
    return reduced_from_irregular(seeded)


def trivial_times_table(t: IrregularTimes) -> list[dict]:
    """Derivatives of T_{∞,j}, T₁, T₂, τ_m along ħw_k, ħu₋₁, ħu₀.

    Each row: {"direction", "quantity", "computed", "expected"}.
    """
    hbar = val(t.hbar)
    r = t.r_inf
    base = reduced_from_irregular(t)
    rows = []
    directions = [(f"w{k}", trivial_vector_w(k, t), ("w", k)) for k in range(1, r)]
    directions.append(("u-1", trivial_vector_u(-1, t), ("u", -1)))
    directions.append(("u0", trivial_vector_u(0, t), ("u", 0)))
    for name, vec, (kind, k) in directions:
        moved = directional_times(t, vec.scale(hbar))
        for j in range(1, r):
            if kind == "w":
                expected = hbar if j == k else 0j
            elif k == -1:
                expected = hbar * j * val(t.at(2 * j))
            else:
                expected = hbar * j * val(t.at(2 * j + 2))
            rows.append(_row(name, f"T_inf{j}", der(moved.T_inf[j - 1]), expected))
        exp_T2 = hbar * val(base.T2) if (kind, k) == ("u", -1) else 0j
        exp_T1 = hbar * val(base.T2) if (kind, k) == ("u", 0) else 0j
        rows.append(_row(name, "T2", der(moved.T2), exp_T2))
        rows.append(_row(name, "T1", der(moved.T1), exp_T1))
        for m in range(1, t.genus + 1):
            rows.append(_row(name, f"tau{m}", der(moved.tau[m - 1]), 0j))
    for k in range(1, t.genus + 1):
        name = f"tau{k}"
        moved = directional_times(t, tau_tangent_vector(k, base).scale(hbar))
        for j in range(1, r):
            rows.append(_row(name, f"T_inf{j}", der(moved.T_inf[j - 1]), 0j))
        rows.append(_row(name, "T2", der(moved.T2), 0j))
        rows.append(_row(name, "T1", der(moved.T1), 0j))
        for m in range(1, t.genus + 1):
            expected = hbar if m == k else 0j
            rows.append(_row(name, f"tau{m}", der(moved.tau[m - 1]), expected))
    return rows


def _row(direction: str, quantity: str, computed, expected) -> dict:
    return {
        "direction": direction,
        "quantity": quantity,
        "computed": complex(computed),
        "expected": complex(expected),
    }


# ── JSON ────────────────────────────────────────────────────────────────


def times_to_json(t: IrregularTimes) -> dict:
    return {
        "r_inf": t.r_inf,
        "hbar": complex_to_json(t.hbar),
        "t": [complex_to_json(x) for x in t.t],
    }


def reduced_to_json(rt: ReducedTimes) -> dict:
    return {
        "r_inf": rt.r_inf,
        "hbar": complex_to_json(rt.hbar),
        "T_inf": [complex_to_json(x) for x in rt.T_inf],
        "T1": complex_to_json(rt.T1),
        "T2": complex_to_json(rt.T2),
        "tau": [complex_to_json(x) for x in rt.tau],
    }


def times_from_json(payload: dict) -> IrregularTimes:
    """Accepts the irregular form ({"r_inf","t"}) or the reduced form ({"r_inf","T2",…})."""
    if not isinstance(payload, dict) or "r_inf" not in payload:
        raise ValueError("times payload must be an object with 'r_inf'")
    r = payload["r_inf"]
    if isinstance(r, bool) or not isinstance(r, int):
        raise ValueError("'r_inf' must be an integer")
    hbar = complex_from_json(payload.get("hbar", [1.0, 0.0]))
    if "t" in payload:
        t = tuple(complex_from_json(x) for x in payload["t"])
        return IrregularTimes(r, t, hbar)
    rt = ReducedTimes(
        r,
        tuple(complex_from_json(x) for x in payload.get("T_inf", [[0, 0]] * (r - 1))),
        complex_from_json(payload.get("T1", [0.0, 0.0])),
        complex_from_json(payload.get("T2", [1.0, 0.0])),
        tuple(complex_from_json(x) for x in payload.get("tau", [[0, 0]] * (r - 3))),
        hbar,
    )
    return irregular_from_reduced(rt)
