"""
Numeric Kernels — dual numbers, polynomials, pole expansions, 2×2 matrices
==========================================================================

Scalars are Python ``complex`` values.  ``Dual`` carries one extra derivative
slot and mixes freely with ``int``/``float``/``complex``, so every routine in
the package can be differentiated by seeding one input.

Representations:
  - ``Poly``           dense ascending coefficients, trailing entries trimmed
  - ``PoleExpansion``  Poly + principal parts  Σ_m c_m/(λ−a)^m  at distinct a
  - ``Mat2``           2×2 matrix whose entries share one representation

JSON: complex → [re, im];  Poly → ascending list of pairs;
Mat2 → {"a11", "a12", "a21", "a22"}.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb, isfinite
from typing import Callable, Iterable, Sequence

from p1lab.central_config import config
from p1lab.errors import PoleCollision, ResidueMismatch

NEG_INF_DEGREE = float("-inf")


# ── Dual numbers ────────────────────────────────────────────────────────


class Dual:
    """a + b·ε with ε² = 0.  ``der`` is the derivative along one seed."""

    __slots__ = ("val", "der")

    def __init__(self, val, der=0.0):
        if isinstance(val, Dual):
            raise TypeError("nested dual numbers are not supported")
        self.val = complex(val)
        self.der = complex(der)

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.der!r})"

    @staticmethod
    def _lift(other):
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, float, complex)):
            return Dual(other, 0.0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.val + o.val, self.der + o.der)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.val - o.val, self.der - o.der)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.val * o.val, self.val * o.der + self.der * o.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        inv = 1.0 / o.val
        return Dual(self.val * inv, (self.der * o.val - self.val * o.der) * inv * inv)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent):
        if isinstance(exponent, Dual):
            raise TypeError("dual exponents are not supported")
        if isinstance(exponent, int):
            if exponent == 0:
                return Dual(1.0, 0.0)
            if exponent < 0:
                return 1.0 / (self ** (-exponent))
            result, base, n = Dual(1.0, 0.0), self, exponent
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        # principal branch for fractional / complex exponents
        e = complex(exponent)
        v = self.val**e
        return Dual(v, e * v / self.val * self.der)


Scalar = complex
Number = complex | Dual


def val(x) -> complex:
    """Value part (plain numbers pass through as complex)."""
    return x.val if isinstance(x, Dual) else complex(x)


def der(x) -> complex:
    """Derivative part (0 for plain numbers)."""
    return x.der if isinstance(x, Dual) else 0j


def mag(x) -> float:
    """Magnitude used for trimming and pivoting; sees both dual slots."""
    if isinstance(x, Dual):
        return abs(x.val) + abs(x.der)
    return abs(x)


def cpow(x, e):
    """Principal-branch power for plain or dual bases."""
    if isinstance(x, Dual):
        return x**e
    return complex(x) ** e


def csqrt(x):
    if isinstance(x, Dual):
        return x**0.5
    return cmath.sqrt(x)


def partials(f: Callable[[Sequence], object], args: Sequence) -> list:
    """∂f/∂args[i] for every i, one forward pass per seed.

    ``f`` takes the argument list and returns a number (or Dual).
    """
    base = [val(a) for a in args]
    out = []
    for i in range(len(base)):
        seeded = [Dual(b, 1.0 if j == i else 0.0) for j, b in enumerate(base)]
        out.append(der(f(seeded)))
    return out


def _coerce(c):
    return c if isinstance(c, Dual) else complex(c)


# ── Polynomials ─────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Poly:
    """Dense univariate polynomial, index k = coefficient of λ^k.

    Trailing coefficients below ``TRIM × max|c|`` are dropped on construction;
    the zero polynomial has an empty coefficient tuple.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [_coerce(c) for c in self.coeffs]
        scale = max((mag(c) for c in cs), default=0.0)
        cut = config.TRIM * scale
        while cs and (mag(cs[-1]) <= cut or mag(cs[-1]) == 0.0):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # construction helpers

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "Poly":
        return cls((0j,) * k + (c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Poly":
        """∏(λ − r)."""
        out: list = [1.0 + 0j]
        for r in roots:
            nxt = [0j] * (len(out) + 1)
            for k, c in enumerate(out):
                nxt[k + 1] = nxt[k + 1] + c
                nxt[k] = nxt[k] - r * c
            out = nxt
        return cls(tuple(out))

    # inspection

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0j

    def values(self) -> list[complex]:
        return [val(c) for c in self.coeffs]

    def derivatives(self) -> "Poly":
        """Polynomial of the dual parts of the coefficients."""
        return Poly(tuple(der(c) for c in self.coeffs))

    def max_abs(self) -> float:
        return max((abs(val(c)) for c in self.coeffs), default=0.0)

    def distance(self, other: "Poly") -> float:
        n = max(len(self.coeffs), len(other.coeffs))
        return max(
            (abs(val(self.coeff(k)) - val(other.coeff(k))) for k in range(n)),
            default=0.0,
        )

    def __repr__(self) -> str:
        return f"Poly({list(self.values())})"

    # arithmetic

    def __add__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(tuple(self.coeff(k) + o.coeff(k) for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Dual)):
            return Poly(tuple(c * other for c in self.coeffs))
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Poly(())
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def diff(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def shift(self, k: int) -> "Poly":
        """Multiply by λ^k (k ≥ 0)."""
        if self.is_zero:
            return self
        return Poly((0j,) * k + self.coeffs)

    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Long division; exact when ``divisor`` is monic."""
        if divisor.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        d = list(divisor.coeffs)
        n = len(d) - 1
        rem = list(self.coeffs)
        if len(rem) <= n:
            return Poly(()), self
        lead = d[-1]
        monic = not isinstance(lead, Dual) and lead == 1
        quot = [0j] * (len(rem) - n)
        for i in range(len(rem) - 1, n - 1, -1):
            f = rem[i] if monic else rem[i] / lead
            quot[i - n] = f
            for j in range(n + 1):
                rem[i - n + j] = rem[i - n + j] - f * d[j]
        return Poly(tuple(quot)), Poly(tuple(rem[:n]))

    def taylor(self, a, n: int) -> list:
        """First ``n`` Taylor coefficients at λ = a (repeated synthetic division)."""
        cs = list(self.coeffs)
        out = []
        for _ in range(n):
            if not cs:
                out.append(0j)
                continue
            acc = 0j
            nxt = [0j] * (len(cs) - 1)
            for k in range(len(cs) - 1, -1, -1):
                acc = acc * a + cs[k]
                if k:
                    nxt[k - 1] = acc
            out.append(acc)
            cs = nxt
        return out


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, float, complex, Dual)):
        return Poly.const(x)
    return None


def poly_eval(p: Poly, x):
    """Horner evaluation of Σ c_k x^k."""
    return p(x)


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_diff(p: Poly) -> Poly:
    return p.diff()


def polypart_mul(p: Poly, series: Sequence, top: int) -> Poly:
    """Polynomial part of  p(λ) · Σ_i series[i] λ^{top−i}.

    ``series`` is a truncated Laurent expansion at infinity; it must reach far
    enough down (top − len + 1 ≤ −deg p) for the result to be exact.
    """
    if p.is_zero:
        return Poly(())
    deg = len(p.coeffs) - 1
    out = []
    for j in range(deg + top + 1):
        acc = 0j
        for i, s in enumerate(series):
            k = j - (top - i)
            if 0 <= k <= deg:
                acc = acc + s * p.coeffs[k]
        out.append(acc)
    return Poly(tuple(out))


# ── Pole expansions ─────────────────────────────────────────────────────


def _same_point(a, b) -> bool:
    if isinstance(a, Dual) or isinstance(b, Dual):
        return val(a) == val(b) and der(a) == der(b)
    return a == b


def check_separation(points: Sequence, what: str = "poles") -> None:
    """PoleCollision if two points are closer than the collision tolerance."""
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(val(points[i]) - val(points[j])) <= config.COLLISION:
                raise PoleCollision(
                    f"{what} {i + 1} and {j + 1} collide "
                    f"(|Δ| = {abs(val(points[i]) - val(points[j])):.3e})"
                )


@dataclass(frozen=True, eq=False)
class PoleExpansion:
    """Rational function  poly(λ) + Σ_a Σ_m c_{a,m}/(λ−a)^m.

    ``poles`` is a tuple of ``(a, (c_1, …, c_M))``; locations are distinct.
    """

    poly: Poly = Poly(())
    poles: tuple = ()

    def __post_init__(self):
        merged: list[tuple] = []
        for a, cs in self.poles:
            cs = [_coerce(c) for c in cs]
            for idx, (b, ds) in enumerate(merged):
                if _same_point(a, b):
                    n = max(len(cs), len(ds))
                    ds = [
                        (ds[m] if m < len(ds) else 0j) + (cs[m] if m < len(cs) else 0j)
                        for m in range(n)
                    ]
                    merged[idx] = (b, ds)
                    break
            else:
                merged.append((a, cs))
        check_separation([a for a, _ in merged])
        object.__setattr__(
            self, "poles", tuple((a, tuple(cs)) for a, cs in merged)
        )

    @classmethod
    def simple(cls, poly: Poly, residues: Sequence[tuple]) -> "PoleExpansion":
        """From (location, residue) pairs."""
        return cls(poly, tuple((a, (r,)) for a, r in residues))

    @property
    def locations(self) -> list:
        return [a for a, _ in self.poles]

    def residue(self, a):
        for b, cs in self.poles:
            if _same_point(a, b):
                return cs[0] if cs else 0j
        return 0j

    def principal(self, a) -> tuple:
        for b, cs in self.poles:
            if _same_point(a, b):
                return cs
        return ()

    def __repr__(self) -> str:
        return f"PoleExpansion({self.poly!r}, {len(self.poles)} poles)"

    # arithmetic

    def __add__(self, other):
        o = _as_pole(other)
        if o is None:
            return NotImplemented
        return PoleExpansion(self.poly + o.poly, self.poles + o.poles)

    __radd__ = __add__

    def __neg__(self):
        return PoleExpansion(
            -self.poly, tuple((a, tuple(-c for c in cs)) for a, cs in self.poles)
        )

    def __sub__(self, other):
        o = _as_pole(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_pole(other)
        if o is None:
            return NotImplemented
        return o - self

    def _regular_taylor(self, a, n: int) -> list:
        """Taylor coefficients at a of everything except the pole at a."""
        out = self.poly.taylor(a, n)
        for b, cs in self.poles:
            if _same_point(a, b):
                continue
            d = a - b
            for m, c in enumerate(cs, start=1):
                if isinstance(c, complex) and c == 0:
                    continue
                inv = 1.0 / d
                base = c * inv**m
                for k in range(n):
                    # (x + d)^{-m} = Σ_k C(−m, k) d^{−m−k} x^k
                    coef = (-1) ** k * comb(m + k - 1, k)
                    out[k] = out[k] + coef * base * inv**k
        return out

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Dual)):
            return PoleExpansion(
                self.poly * other,
                tuple((a, tuple(c * other for c in cs)) for a, cs in self.poles),
            )
        o = _as_pole(other)
        if o is None:
            return NotImplemented
        poly = self.poly * o.poly
        for a, cs in o.poles:
            poly = poly + _polypart_over_power(self.poly, a, cs)
        for a, cs in self.poles:
            poly = poly + _polypart_over_power(o.poly, a, cs)
        locs: list = []
        for a in self.locations + o.locations:
            if not any(_same_point(a, b) for b in locs):
                locs.append(a)
        poles = []
        for a in locs:
            f = self.principal(a)
            g = o.principal(a)
            order = len(f) + len(g)
            if order == 0:
                continue
            fr = self._regular_taylor(a, len(g))
            gr = o._regular_taylor(a, len(f))
            pp = [0j] * order
            # f_a · regular(o)
            for m, c in enumerate(f, start=1):
                for k, t in enumerate(gr):
                    if k < m:
                        pp[m - k - 1] = pp[m - k - 1] + c * t
            for m, c in enumerate(g, start=1):
                for k, t in enumerate(fr):
                    if k < m:
                        pp[m - k - 1] = pp[m - k - 1] + c * t
            for m, c in enumerate(f, start=1):
                for n, d in enumerate(g, start=1):
                    pp[m + n - 1] = pp[m + n - 1] + c * d
            poles.append((a, tuple(pp)))
        return PoleExpansion(poly, tuple(poles))

    __rmul__ = __mul__

    def __call__(self, x):
        acc = self.poly(x)
        for a, cs in self.poles:
            inv = 1.0 / (x - a)
            for m, c in enumerate(cs, start=1):
                acc = acc + c * inv**m
        return acc

    def diff(self) -> "PoleExpansion":
        poles = []
        for a, cs in self.poles:
            ds = [0j] * (len(cs) + 1)
            for m, c in enumerate(cs, start=1):
                ds[m] = -m * c
            poles.append((a, tuple(ds)))
        return PoleExpansion(self.poly.diff(), tuple(poles))

    def pole_size(self) -> float:
        return max(
            (abs(val(c)) for _, cs in self.poles for c in cs), default=0.0
        )

    def to_poly(self, what: str = "entry") -> Poly:
        """Polynomial part, asserting every principal part has cancelled."""
        scale = max(1.0, self.poly.max_abs())
        leak = self.pole_size()
        if leak > config.RESIDUE * scale:
            raise ResidueMismatch(
                f"{what} kept a pole part of size {leak:.3e} (scale {scale:.3e})"
            )
        return self.poly


def _polypart_over_power(p: Poly, a, cs: Sequence) -> Poly:
    """Polynomial part of p(λ) · Σ_m c_m (λ−a)^{−m}."""
    out = Poly(())
    power = Poly.const(1.0)
    lin = Poly((-a, 1.0))
    for c in cs:
        power = power * lin
        q, _ = p.divmod(power)
        out = out + q * c
    return out


def _as_pole(x):
    if isinstance(x, PoleExpansion):
        return x
    p = _as_poly(x)
    return PoleExpansion(p, ()) if p is not None else None


def reciprocal_monic(roots: Sequence) -> PoleExpansion:
    """1/∏(λ−r_j) as Σ_j [1/∏_{i≠j}(r_j−r_i)] / (λ−r_j)."""
    check_separation(list(roots))
    if len(roots) == 0:
        return PoleExpansion(Poly.const(1.0), ())
    terms = []
    for j, r in enumerate(roots):
        den = 1.0 + 0j
        for i, s in enumerate(roots):
            if i != j:
                den = den * (r - s)
        terms.append((r, 1.0 / den))
    return PoleExpansion.simple(Poly(()), terms)


# ── 2×2 matrices ────────────────────────────────────────────────────────


def _lift_entry(x, kind):
    if kind is PoleExpansion:
        return _as_pole(x)
    return _as_poly(x)


@dataclass(frozen=True, eq=False)
class Mat2:
    """2×2 matrix; all four entries are Poly or all are PoleExpansion."""

    a11: object
    a12: object
    a21: object
    a22: object

    def __post_init__(self):
        entries = (self.a11, self.a12, self.a21, self.a22)
        kind = (
            PoleExpansion
            if any(isinstance(e, PoleExpansion) for e in entries)
            else Poly
        )
        for name, e in zip(("a11", "a12", "a21", "a22"), entries):
            lifted = _lift_entry(e, kind)
            if lifted is None:
                raise TypeError(f"unsupported Mat2 entry type {type(e).__name__}")
            object.__setattr__(self, name, lifted)

    @property
    def kind(self):
        return type(self.a11)

    @property
    def entries(self) -> tuple:
        return (self.a11, self.a12, self.a21, self.a22)

    def map(self, f: Callable) -> "Mat2":
        return Mat2(*(f(e) for e in self.entries))

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat2":
        return self.map(lambda e: -e)

    def scale(self, c) -> "Mat2":
        return self.map(lambda e: e * c)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def commutator(self, other: "Mat2") -> "Mat2":
        return self @ other - other @ self

    def diff(self) -> "Mat2":
        return self.map(lambda e: e.diff())

    def trace(self):
        return self.a11 + self.a22

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def __call__(self, x) -> tuple:
        return tuple(e(x) for e in self.entries)

    def to_poly(self, what: str = "matrix") -> "Mat2":
        if self.kind is Poly:
            return self
        names = ("11", "12", "21", "22")
        return Mat2(
            *(e.to_poly(f"{what}[{n}]") for e, n in zip(self.entries, names))
        )

    def distance(self, other: "Mat2") -> float:
        return max(a.distance(b) for a, b in zip(self.entries, other.entries))

    def max_abs(self) -> float:
        return max(e.max_abs() for e in self.entries)

    def derivatives(self) -> "Mat2":
        return self.map(lambda e: e.derivatives())

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)


# ── JSON codecs ─────────────────────────────────────────────────────────


def complex_to_json(z) -> list[float]:
    z = val(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _is_real_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def complex_from_json(x) -> complex:
    """A real number or an ``[re, im]`` pair; NaN and infinities are rejected."""
    if _is_real_number(x):
        parts = [x, 0.0]
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(map(_is_real_number, x)):
        parts = list(x)
    else:
        raise ValueError(f"expected [re, im], got {x!r}")
    try:
        re, im = float(parts[0]), float(parts[1])
    except OverflowError as e:
        raise ValueError(f"complex value out of range: {x!r}") from e
    if not (isfinite(re) and isfinite(im)):
        raise ValueError(f"complex value must be finite, got {x!r}")
    return complex(re, im)


def poly_to_json(p: Poly) -> list:
    return [complex_to_json(c) for c in p.coeffs]


def poly_from_json(x) -> Poly:
    return Poly(tuple(complex_from_json(c) for c in x))


def entry_to_json(e):
    if isinstance(e, Poly):
        return poly_to_json(e)
    return {
        "poly": poly_to_json(e.poly),
        "poles": [
            {"at": complex_to_json(a), "coeffs": [complex_to_json(c) for c in cs]}
            for a, cs in e.poles
        ],
    }


def mat2_to_json(m: Mat2) -> dict:
    return {
        "a11": entry_to_json(m.a11),
        "a12": entry_to_json(m.a12),
        "a21": entry_to_json(m.a21),
        "a22": entry_to_json(m.a22),
    }


def mat2_from_json(x: dict) -> Mat2:
    return Mat2(*(poly_from_json(x[k]) for k in ("a11", "a12", "a21", "a22")))
