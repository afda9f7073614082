"""
Exact rational weights.

Weights are ``fractions.Fraction`` values: arbitrary-precision, always stored in
lowest terms with a positive denominator, and hashable, so two equal weights are
always the same key when states are merged.
"""

import logging
from decimal import Context, Decimal
from fractions import Fraction
from typing import Union

from .errors import FormatError

logger = logging.getLogger(__name__)

BigRational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

Number = Union[int, Fraction]


def rat_make(num: int, den: int = 1) -> Fraction:
    """Build a normalized rational. Raises ZeroDivisionError for ``den == 0``."""
    return Fraction(int(num), int(den))


def rat_add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def rat_mul(a: Fraction, b: Fraction) -> Fraction:
    return a * b


def rat_div(a: Fraction, b: Fraction) -> Fraction:
    """Exact quotient. Raises ZeroDivisionError when ``b`` is zero."""
    if b == 0:
        raise ZeroDivisionError(f"division of {format_rational(a)} by zero")
    return Fraction(a) / b


def format_rational(value: Number) -> str:
    """Render as ``num/den``, e.g. ``-3/7`` or ``1/1``."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``num/den`` (a bare integer is accepted as ``num/1``)."""
    token = text.strip()
    num, sep, den = token.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        return rat_make(int(num), int(den))
    except ValueError:
        raise FormatError(f"not a rational number: {text!r}") from None
    except ZeroDivisionError:
        raise FormatError(f"zero denominator in {text!r}") from None


def to_decimal(value: Number, digits: int = 12) -> str:
    """Display-only decimal rendering with ``digits`` significant digits."""
    value = Fraction(value)
    ctx = Context(prec=digits)
    quotient = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(quotient.normalize(ctx), "f")


def quantize(value: Number, max_denominator: int) -> Fraction:
    """
    Round to the closest rational whose denominator is at most ``max_denominator``.

    Opt-in only: nothing in the engine calls this implicitly.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be at least 1")
    return Fraction(value).limit_denominator(max_denominator)


def digit_size(value: Number) -> int:
    """Decimal digits of numerator plus denominator."""
    value = Fraction(value)
    return len(str(abs(value.numerator))) + len(str(value.denominator))


# Weights larger than this many digits are reported; the CLI sets it from config.
DIGITS_WARNING = 200


def report_digits(digits: int, what: str) -> None:
    """Log weight-size telemetry, warning when rationals grow past DIGITS_WARNING."""
    if digits > DIGITS_WARNING:
        logger.warning("%s: rational weights grew to %d digits", what, digits)
    else:
        logger.debug("%s: largest rational weight has %d digits", what, digits)
