"""Exact truncated power series in eps over Laurent polynomials.

Coefficients live in Q[n][x^±, y^±, y0^±, y1]: Laurent monomials in the
state symbols with exact rational coefficients, ``n`` kept symbolic.
Everything here is immutable and exact; no floats ever enter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    Rational = Fraction

SYMBOLS = ("x", "y", "y0", "y1", "n")
_INDEX = {s: i for i, s in enumerate(SYMBOLS)}
# symbols that may carry negative exponents
LAURENT = frozenset({"x", "y", "y0"})

NUMBERS = (int, Fraction, type(Rational(0)))
Scalar = Union[int, Fraction]
_Q0 = Rational(0)


class SeriesError(ArithmeticError):
    """Raised when an exact-series precondition is violated."""


@dataclass(frozen=True, order=True)
class Monomial:
    exponents: tuple[int, ...] = (0,) * len(SYMBOLS)

    def __post_init__(self):
        if len(self.exponents) != len(SYMBOLS):
            raise ValueError(f"expected {len(SYMBOLS)} exponents, got {len(self.exponents)}")
        for sym, e in zip(SYMBOLS, self.exponents):
            if e < 0 and sym not in LAURENT:
                raise SeriesError(f"negative exponent {e} on non-Laurent symbol {sym}")

    @classmethod
    def of(cls, **powers: int) -> "Monomial":
        exps = [0] * len(SYMBOLS)
        for sym, e in powers.items():
            exps[_INDEX[sym]] = e
        return cls(tuple(exps))

    def __mul__(self, other: "Monomial") -> "Monomial":
        # sums of valid exponents stay valid
        return _mono(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self, e: int) -> "Monomial":
        return Monomial(tuple(a * e for a in self.exponents))

    def degree(self, symbol: str) -> int:
        return self.exponents[_INDEX[symbol]]

    def without(self, symbol: str) -> "Monomial":
        exps = list(self.exponents)
        exps[_INDEX[symbol]] = 0
        return Monomial(tuple(exps))

    def is_one(self) -> bool:
        return not any(self.exponents)

    def render(self) -> str:
        parts = []
        for sym, e in zip(SYMBOLS, self.exponents):
            if e == 1:
                parts.append(sym)
            elif e:
                parts.append(f"{sym}^{e}")
        return "*".join(parts)


def _mono(exps: tuple[int, ...]) -> Monomial:
    m = object.__new__(Monomial)
    object.__setattr__(m, "exponents", exps)
    return m


ONE_MONO = Monomial()


def _term_key(m: Monomial):
    # lexicographic by symbol, higher exponent first
    return tuple(-e for e in m.exponents)


class Polynomial:
    """Canonical sparse Laurent polynomial: zero coefficients never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Rational] = {}
        for mono, c in items:
            acc[mono] = acc.get(mono, _Q0) + Rational(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict) -> "Polynomial":
        """Wrap an accumulator whose values are already Rationals."""
        p = object.__new__(cls)
        p._terms = {m: c for m, c in acc.items() if c != 0}
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        return cls({ONE_MONO: c})

    @classmethod
    def var(cls, symbol: str, power: int = 1, coeff: Scalar = 1) -> "Polynomial":
        return cls({Monomial.of(**{symbol: power}): coeff})

    @classmethod
    def term(cls, coeff: Scalar = 1, **powers: int) -> "Polynomial":
        return cls({Monomial.of(**powers): coeff})

    @property
    def terms(self) -> Mapping[Monomial, Rational]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda t: _term_key(t[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {ONE_MONO: 1}

    def single_term(self) -> tuple[Monomial, Rational] | None:
        if len(self._terms) == 1:
            return next(iter(self._terms.items()))
        return None

    def symbols(self) -> set[str]:
        out = set()
        for m in self._terms:
            out.update(s for s, e in zip(SYMBOLS, m.exponents) if e)
        return out

    # arithmetic
    def __add__(self, other):
        other = _as_poly(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, _Q0) + c
        return Polynomial._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        acc: dict[Monomial, Rational] = {}
        for m1, c1 in self._terms.items():
            e1 = m1.exponents
            for m2, c2 in other._terms.items():
                m = _mono(tuple(a + b for a, b in zip(e1, m2.exponents)))
                acc[m] = acc.get(m, _Q0) + c1 * c2
        return Polynomial._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            t = self.single_term()
            if t is None:
                raise SeriesError("negative power of a multi-term polynomial")
            mono, c = t
            return Polynomial({mono ** e: Rational(1) / c ** (-e)})
        out = Polynomial.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, c: Scalar) -> "Polynomial":
        c = Rational(c)
        return Polynomial._raw({m: v * c for m, v in self._terms.items()})

    def subs(self, symbol: str, value: Scalar) -> "Polynomial":
        """Substitute an exact number for ``symbol``."""
        value = Rational(value)
        acc: dict[Monomial, Rational] = {}
        for m, c in self._terms.items():
            e = m.degree(symbol)
            if e < 0 and value == 0:
                raise ZeroDivisionError(f"{symbol}=0 in a negative power")
            key = m.without(symbol)
            acc[key] = acc.get(key, _Q0) + c * value ** e
        return Polynomial._raw(acc)

    def __eq__(self, other):
        if isinstance(other, NUMBERS):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def render(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            coeff = f"{a.numerator}" if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
            body = m.render()
            if body:
                text = body if a == 1 else f"{coeff}*{body}"
            else:
                text = coeff
            if i == 0:
                out.append(f"-{text}" if sign == "-" else text)
            else:
                out.append(f" {sign} {text}")
        return "".join(out)

    __str__ = render

    def __repr__(self):
        return f"Polynomial({self.render()!r})"


ZERO = Polynomial()
ONE = Polynomial.const(1)


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, NUMBERS):
        return Polynomial.const(value)
    raise TypeError(f"cannot treat {type(value).__name__} as a Polynomial")


def poly_arith(lhs: Polynomial, rhs: Polynomial, kind: str) -> Polynomial:
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class AffineExponent:
    """The exponent ``a*n + b``."""

    n_coefficient: int
    offset: int

    def as_poly(self) -> Polynomial:
        return Polynomial.term(self.n_coefficient, n=1) + self.offset

    def __str__(self):
        if self.n_coefficient == 0:
            return str(self.offset)
        head = "n" if self.n_coefficient == 1 else f"{self.n_coefficient}*n"
        if self.offset == 0:
            return head
        return f"{head} {'+' if self.offset > 0 else '-'} {abs(self.offset)}"


def generalized_binomial(m: AffineExponent, k: int) -> Polynomial:
    """Falling factorial m(m-1)...(m-k+1)/k! as a polynomial in n."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    base = m.as_poly()
    out = ONE
    for i in range(k):
        out = out * (base - i)
    fact = 1
    for i in range(2, k + 1):
        fact *= i
    return out.scale(Rational(1, fact))


class EpsSeries:
    """sum_{j<=order} coeffs[j] eps^j; everything above ``order`` is dropped."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable[Polynomial | Scalar], order: int | None = None):
        cs = [_as_poly(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = cs[: order + 1] + [ZERO] * (order + 1 - len(cs))
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, c: Polynomial | Scalar, order: int) -> "EpsSeries":
        return cls([c], order)

    def truncate(self, order: int) -> "EpsSeries":
        return EpsSeries(self.coeffs, order)

    def shift(self, k: int) -> "EpsSeries":
        """Multiply by eps^k. Negative k requires the dropped coefficients to be zero."""
        if k >= 0:
            return EpsSeries([ZERO] * k + list(self.coeffs), self.order)
        dropped = self.coeffs[: -k]
        if any(not c.is_zero() for c in dropped):
            raise SeriesError(f"cannot divide by eps^{-k}: low-order coefficients are nonzero")
        return EpsSeries(self.coeffs[-k:], self.order + k)

    def map(self, fn) -> "EpsSeries":
        return EpsSeries([fn(c) for c in self.coeffs], self.order)

    def _align(self, other) -> tuple["EpsSeries", "EpsSeries"]:
        if not isinstance(other, EpsSeries):
            other = EpsSeries.constant(other, self.order)
        o = min(self.order, other.order)
        return self.truncate(o), other.truncate(o)

    def __add__(self, other):
        a, b = self._align(other)
        return EpsSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        a, b = self._align(other)
        return EpsSeries([x - y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Polynomial,) + NUMBERS):
            p = _as_poly(other)
            return self.map(lambda c: c * p)
        a, b = self._align(other)
        out = []
        for j in range(a.order + 1):
            acc = ZERO
            for i in range(j + 1):
                if a.coeffs[i].is_zero() or b.coeffs[j - i].is_zero():
                    continue
                acc = acc + a.coeffs[i] * b.coeffs[j - i]
            out.append(acc)
        return EpsSeries(out, a.order)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "EpsSeries":
        if e < 0:
            return geometric_invert_general(self) ** (-e)
        out = EpsSeries.constant(ONE, self.order)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, EpsSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def render(self) -> str:
        parts = []
        for j, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            tag = "" if j == 0 else ("eps" if j == 1 else f"eps^{j}")
            parts.append(f"({c.render()})" + (f"*{tag}" if tag else ""))
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(eps^{self.order + 1})"

    __str__ = render

    def __repr__(self):
        return f"EpsSeries({self.render()!r})"


def series_arith(lhs: EpsSeries, rhs: EpsSeries, kind: str) -> EpsSeries:
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown kind {kind!r}")


def binomial_expand(m: AffineExponent, u: Polynomial, order: int) -> EpsSeries:
    """(1 + eps*u)^m truncated at eps^order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    coeffs = []
    upow = ONE
    for j in range(order + 1):
        coeffs.append(generalized_binomial(m, j) * upow)
        upow = upow * u
    return EpsSeries(coeffs, order)


def geometric_invert(s: EpsSeries) -> EpsSeries:
    """1/s for s = 1 + eps*q(eps), by the recurrence b_j = -sum_{i>=1} a_i b_{j-i}."""
    if not s.coeffs[0].is_one():
        raise SeriesError(f"geometric_invert needs constant term 1, got {s.coeffs[0].render()}")
    b = [ONE]
    for j in range(1, s.order + 1):
        acc = ZERO
        for i in range(1, j + 1):
            if not s.coeffs[i].is_zero():
                acc = acc - s.coeffs[i] * b[j - i]
        b.append(acc)
    return EpsSeries(b, s.order)


def geometric_invert_general(s: EpsSeries) -> EpsSeries:
    """1/s when the eps^0 coefficient is a single (invertible) term."""
    lead = s.coeffs[0]
    if lead.is_zero():
        raise SeriesError("division by a series with zero leading coefficient")
    if lead.single_term() is None:
        raise SeriesError(f"leading coefficient {lead.render()} is not a monomial")
    inv_lead = lead ** -1
    return geometric_invert(s * inv_lead) * inv_lead


def substitute(s: EpsSeries, target: str, replacement: EpsSeries) -> EpsSeries:
    """Replace every ``target^e`` in ``s`` by the e-th truncated power of ``replacement``."""
    order = min(s.order, replacement.order)
    rep = replacement.truncate(order)
    powers: dict[int, EpsSeries] = {0: EpsSeries.constant(ONE, order)}

    def power(e: int) -> EpsSeries:
        if e not in powers:
            if e > 0:
                powers[e] = power(e - 1) * rep
            else:
                if -1 not in powers:
                    powers[-1] = geometric_invert_general(rep)
                powers[e] = power(e + 1) * powers[-1]
        return powers[e]

    out = EpsSeries.constant(ZERO, order)
    for j in range(order + 1):
        for mono, c in s.coeffs[j].items():
            e = mono.degree(target)
            rest = Polynomial({mono.without(target): c})
            if e == 0:
                out = out + EpsSeries.constant(rest, order).shift(j)
            else:
                out = out + (power(e) * rest).shift(j)
    return out


def extract_order(s: EpsSeries, j: int) -> Polynomial:
    if not 0 <= j <= s.order:
        raise IndexError(f"order {j} outside 0..{s.order}")
    return s.coeffs[j]


def poly_div_linear_n(p: Polynomial, c: int) -> Polynomial:
    """Exact quotient p / (n - c); a nonzero remainder raises SeriesError."""
    groups: dict[Monomial, dict[int, Rational]] = {}
    for m, coef in p.items():
        groups.setdefault(m.without("n"), {})[m.degree("n")] = coef
    out: dict[Monomial, Rational] = {}
    for rest, by_deg in groups.items():
        deg = max(by_deg)
        # synthetic division, highest degree first
        carry = _Q0
        for d in range(deg, -1, -1):
            carry = by_deg.get(d, _Q0) + carry * c
            if d == 0:
                if carry != 0:
                    raise SeriesError(
                        f"{p.render()} is not divisible by (n - {c}); remainder {carry} at {rest.render() or '1'}"
                    )
            else:
                out[rest * Monomial.of(n=d - 1)] = carry
    return Polynomial(out)
