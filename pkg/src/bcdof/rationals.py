"""Formatting and parsing of exact rationals for CLI output and files."""

from fractions import Fraction
from math import lcm


def format_rational(x: Fraction) -> str:
    """Render a Fraction as ``num/den``, or just ``num`` for integers."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``num/den``, plain integers, or decimal strings exactly."""
    return Fraction(text.strip())


def format_decimal(x: Fraction, digits: int = 12) -> str:
    """Fixed-point decimal rendering, for plotting-tool consumption."""
    return f"{float(x):.{digits}g}"


def common_denominator(values) -> int:
    """lcm of the denominators of an iterable of Fractions."""
    return lcm(*(Fraction(v).denominator for v in values)) if values else 1
