"""Natural numbers extended with an explicit infinity.

Population-size arithmetic runs over naturals plus a top element INF.
The extra cases are: n + INF = INF + n = INF, n * INF = INF * n = INF
(including n = 0, kept deliberately), min(n, INF) = min(INF, n) = n,
and n < INF for every natural n.
"""

from __future__ import annotations

from typing import Union


class Infinity:
    """Top element of the size lattice. Use the INF singleton."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "∞"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Infinity)

    def __hash__(self) -> int:
        return hash("exemplar-infinity")

    # ordering: INF is strictly above every natural
    def __lt__(self, other: object) -> bool:
        self._check(other)
        return False

    def __le__(self, other: object) -> bool:
        self._check(other)
        return isinstance(other, Infinity)

    def __gt__(self, other: object) -> bool:
        self._check(other)
        return not isinstance(other, Infinity)

    def __ge__(self, other: object) -> bool:
        self._check(other)
        return True

    def __add__(self, other: object) -> "Infinity":
        self._check(other)
        return self

    __radd__ = __add__

    def __mul__(self, other: object) -> "Infinity":
        self._check(other)
        return self

    __rmul__ = __mul__

    @staticmethod
    def _check(other: object) -> None:
        if not isinstance(other, (int, Infinity)):
            raise TypeError(f"cannot combine Infinity with {type(other).__name__}")


INF = Infinity()

ExtNat = Union[int, Infinity]


def is_finite(x: ExtNat) -> bool:
    return isinstance(x, int)


def ext_add(a: ExtNat, b: ExtNat) -> ExtNat:
    return a + b


def ext_mul(a: ExtNat, b: ExtNat) -> ExtNat:
    return a * b


def ext_min(a: ExtNat, b: ExtNat) -> ExtNat:
    return a if ext_less(a, b) else b


def ext_less(a: ExtNat, b: ExtNat) -> bool:
    return a < b


def ext_str(x: ExtNat) -> str:
    """Render a size for tables: finite values as decimals, INF as '∞'."""
    return str(x)


def ext_json(x: ExtNat) -> "int | str":
    """JSON encoding: finite values stay numbers, INF becomes the string 'inf'."""
    return "inf" if isinstance(x, Infinity) else x
