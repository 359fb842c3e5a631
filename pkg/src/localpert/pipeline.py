"""Symbolic replay of the eps-expansion around the singular point (p, p).

All work is done at p = 1; the model is homogeneous so p is restored by
scaling downstream.  Every stage is checked against its closed form by
exact structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import (
    ONE,
    AffineExponent,
    EpsSeries,
    Monomial,
    Polynomial,
    SeriesError,
    binomial_expand,
    extract_order,
    geometric_invert,
    poly_div_linear_n,
    substitute,
)

x = Polynomial.var("x")
y = Polynomial.var("y")
y0 = Polynomial.var("y0")
y1 = Polynomial.var("y1")
n = Polynomial.var("n")


class IdentityError(AssertionError):
    """A derived expression differs from its closed form."""

    def __init__(self, what: str, got: Polynomial, expected: Polynomial):
        self.what = what
        self.got = got
        self.expected = expected
        diff = got - expected
        super().__init__(
            f"{what}: mismatch\n  got:      {got.render()}\n  expected: {expected.render()}\n  diff:     {diff.render()}"
        )


def _check(what: str, got: Polynomial, expected: Polynomial) -> None:
    if got != expected:
        raise IdentityError(what, got, expected)


# closed forms at p = 1
LEADING_NUMERATOR = y * y - x * x
FIRST_NUMERATOR = ((3 - n) * (y - x) ** 2 * (2 * x + y)).scale(Fraction(1, 3))
Y_SQUARED = Monomial.of(y=2)


@dataclass(frozen=True)
class OrderEquations:
    """y0' + eps*y1' = leading_numerator/y^2 + eps*first_numerator/y^2."""

    leading_numerator: Polynomial
    leading_denominator: Monomial
    first_numerator: Polynomial
    first_denominator: Monomial

    def leading(self) -> Polynomial:
        return self.leading_numerator * Polynomial({self.leading_denominator: 1}) ** -1

    def first(self) -> Polynomial:
        return self.first_numerator * Polynomial({self.first_denominator: 1}) ** -1

    def as_series(self) -> EpsSeries:
        return EpsSeries([self.leading(), self.first()], 1)


@dataclass(frozen=True)
class PerturbationSplit:
    """y1' = forcing + gain*y1."""

    forcing: Polynomial
    gain: Polynomial
    leading: Polynomial


def build_rhs_series(order: int = 3) -> EpsSeries:
    """Right-hand side of the rescaled equation at p = 1 as a series in eps.

    [(1+eps x)^(n-2) - (1+eps y)^(n-2)]/(n-2) - [(1+eps x)^(n-1) - (1+eps y)^(n-1)]/(n-1)
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    m2 = AffineExponent(1, -2)
    m1 = AffineExponent(1, -1)
    first = binomial_expand(m2, x, order) - binomial_expand(m2, y, order)
    second = binomial_expand(m1, x, order) - binomial_expand(m1, y, order)
    first = first.map(lambda c: poly_div_linear_n(c, 2))
    second = second.map(lambda c: poly_div_linear_n(c, 1))
    return first - second


def _denominator_inverse(order: int, faithful: bool) -> EpsSeries:
    """1/(1 + eps*y)^(n-3); ``faithful`` keeps only the first two terms."""
    d = binomial_expand(AffineExponent(1, -3), y, order)
    inv = geometric_invert(d)
    if faithful:
        inv = EpsSeries(inv.coeffs[:2], order)
    return inv


def derive_order_equations(order: int = 3, faithful_truncation: bool = False) -> OrderEquations:
    """Divide the rhs series by (1/2) eps^2 y^2 (1 + eps y)^(n-3) and keep eps^0, eps^1."""
    if order < 3:
        raise ValueError("order must be >= 3")
    rhs = build_rhs_series(order)
    try:
        shifted = rhs.shift(-2)
    except SeriesError as exc:
        raise IdentityError("eps^0/eps^1 cancellation", rhs.coeffs[0] + rhs.coeffs[1], Polynomial()) from exc
    quotient = (shifted * _denominator_inverse(order - 2, faithful_truncation)) * (2 * y ** -2)
    quotient = quotient.truncate(1)

    y2 = Polynomial({Y_SQUARED: 1})
    lead = extract_order(quotient, 0) * y2
    first = extract_order(quotient, 1) * y2
    _check("leading order", lead, LEADING_NUMERATOR)
    _check("first order", first, FIRST_NUMERATOR)
    return OrderEquations(lead, Y_SQUARED, first, Y_SQUARED)


def split_perturbation(eqs: OrderEquations | None = None) -> PerturbationSplit:
    """Substitute y -> y0 + eps*y1 and isolate the linear eps^1 balance."""
    if eqs is None:
        eqs = derive_order_equations()
    rep = EpsSeries([y0, y1], 1)
    sub = substitute(eqs.as_series(), "y", rep)

    leading = extract_order(sub, 0)
    if "y1" in leading.symbols():
        raise IdentityError("eps^0 balance free of y1", leading, leading.subs("y1", 0))

    forcing: dict[Monomial, Fraction] = {}
    gain: dict[Monomial, Fraction] = {}
    for mono, c in extract_order(sub, 1).items():
        d = mono.degree("y1")
        if d == 0:
            forcing[mono] = c
        elif d == 1:
            gain[mono.without("y1")] = c
        else:
            raise IdentityError("linearity in y1", Polynomial({mono: c}), Polynomial())
    split = PerturbationSplit(Polynomial(forcing), Polynomial(gain), leading)

    _check("eps^0 balance", split.leading, (y0 * y0 - x * x) * y0 ** -2)
    _check("gain", split.gain, 2 * x * x * y0 ** -3)
    expected_forcing = (
        (6 - 2 * n) * x ** 3 * y0 + (3 * n - 9) * x ** 2 * y0 ** 2 + (3 - n) * y0 ** 4
    ) * Polynomial.term(Fraction(1, 3), y0=-3)
    _check("forcing", split.forcing, expected_forcing)
    return split


def derivation_report(order: int = 3) -> tuple[list[str], bool]:
    """Staged text rendering plus overall PASS flag; used by the CLI."""
    lines: list[str] = []
    ok = True
    rhs = build_rhs_series(order)
    lines.append(f"Eq (9)  rhs series at p=1, order {order}:")
    lines.append(f"  {rhs.render()}")
    expected9 = EpsSeries(
        [0, 0, (y * y - x * x).scale(Fraction(1, 2)), ((n - 3) * (y ** 3 - x ** 3)).scale(Fraction(1, 3))], 3
    ).truncate(min(order, 3))
    good = rhs.truncate(min(order, 3)) == expected9
    ok &= good
    lines.append(f"Eq (9) identity: {'PASS' if good else 'FAIL'}")

    try:
        eqs = derive_order_equations(order)
        lines.append("Eq (14) y0' + eps*y1' =")
        lines.append(f"  eps^0: ({eqs.leading_numerator.render()}) / ({eqs.leading_denominator.render()})")
        lines.append(f"  eps^1: ({eqs.first_numerator.render()}) / ({eqs.first_denominator.render()})")
        lines.append("Eq (14) identity: PASS")
        faithful = derive_order_equations(order, faithful_truncation=True)
        same = faithful == eqs
        ok &= same
        lines.append(f"Eq (11) two-term truncation agrees: {'PASS' if same else 'FAIL'}")
    except IdentityError as exc:
        lines.append("Eq (14) identity: FAIL")
        lines.extend("  " + s for s in str(exc).splitlines())
        return lines, False

    try:
        split = split_perturbation(eqs)
        lines.append("Eq (20) y1' = forcing + gain*y1")
        lines.append(f"  forcing: {split.forcing.render()}")
        lines.append(f"  gain:    {split.gain.render()}")
        lines.append("Eq (20) identity: PASS")
    except IdentityError as exc:
        lines.append("Eq (20) identity: FAIL")
        lines.extend("  " + s for s in str(exc).splitlines())
        ok = False
    return lines, ok
