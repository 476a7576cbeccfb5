"""Scalar helpers shared by the exact (``Fraction``) and float code paths.

Values are either :class:`fractions.Fraction` (exact mode) or ``float``.
Python's mixed arithmetic already promotes ``Fraction op float`` to float,
so most code is written once and simply inherits the mode of its inputs.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Union

Num = Union[Fraction, float]

FLOAT_SIGN_TOL = 1e-9


def parse_num(value: Any) -> Num:
    """Parse a JSON scalar: ``"p/q"`` strings and ints are exact, floats are not."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except ValueError:
            return float(text)
    raise TypeError(f"cannot interpret {value!r} as a number")


def dump_num(value: Num) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return float(value)


def is_exact(values: Iterable[Any]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def to_float(value: Num) -> float:
    return float(value)


def to_mode(value: Any, exact: bool) -> Num:
    if exact:
        if isinstance(value, float):
            return Fraction(value)
        return Fraction(value)
    return float(value)


def sign(value: Num, tol: float = FLOAT_SIGN_TOL) -> int | None:
    """Sign of ``value``; ``None`` for floats inside the indeterminate band."""
    if isinstance(value, (Fraction, int)):
        return (value > 0) - (value < 0)
    if abs(value) <= tol:
        return None
    return 1 if value > 0 else -1


class ToleranceError(RuntimeError):
    """A float computation landed between the accept and reject thresholds."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (residual {achieved:.3e})")
        self.achieved = achieved
