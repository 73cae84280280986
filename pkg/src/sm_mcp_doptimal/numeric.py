"""Exact-rational and floating-point arithmetic backends."""

from collections.abc import Iterable, Sequence
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError

Number = float | Fraction


class Mode(str, Enum):
    """Numeric backend selector."""

    FLOAT = "float"
    RATIONAL = "rational"

    @classmethod
    def infer(cls, values: Iterable[object]) -> "Mode":
        """RATIONAL when every value is an int or a Fraction, else FLOAT."""
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
                return cls.FLOAT
        return cls.RATIONAL


def coerce(value: object, mode: Mode) -> Number:
    """Convert a value into the arithmetic of the given backend.

    Strings such as "1/3" or "0.25" are accepted so that JSON problem files can
    carry exact values.
    """
    if isinstance(value, str):
        try:
            value = Fraction(value)
        except ValueError as e:
            raise InvalidInputError(f"Not a number: {value!r}") from e
    if mode is Mode.RATIONAL:
        if isinstance(value, float) and not np.isfinite(value):
            raise InvalidInputError(f"Non-finite value in rational mode: {value}")
        return Fraction(value)
    return float(value)


def coerce_all(values: Iterable[object], mode: Mode) -> tuple[Number, ...]:
    return tuple(coerce(v, mode) for v in values)


def is_zero(value: Number, mode: Mode, tol: float) -> bool:
    """Exact zero test in rational mode, |value| < tol in float mode."""
    if mode is Mode.RATIONAL:
        return value == 0
    return abs(value) < tol


def to_json(value: Number) -> float | str:
    """Render a number for JSON output; fractions keep their exact text."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else str(value.numerator)
    return float(value)


def det_bareiss(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination with row swaps."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    a = [[Fraction(x) for x in row] for row in rows]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det(rows: Sequence[Sequence[Number]], mode: Mode) -> Number:
    """Determinant in the selected backend.

    Rational mode is exact (Bareiss); float mode uses numpy's partial-pivot LU.
    """
    if len(rows) == 0:
        return Fraction(1) if mode is Mode.RATIONAL else 1.0
    if mode is Mode.RATIONAL:
        return det_bareiss(rows)
    return float(np.linalg.det(np.asarray(rows, dtype=float)))
