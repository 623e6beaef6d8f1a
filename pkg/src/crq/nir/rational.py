"""Exact rational tensors.

A :class:`QArray` stores an integer numerator array together with one
positive common denominator.  Matrix products are exact: they run through
float64 BLAS when a magnitude bound proves every partial sum is an exactly
representable integer, through int64 when the bound fits in 63 bits, and
through Python integers otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

_FLOAT_EXACT = 1 << 53
_INT64_SAFE = 1 << 62


class PrecisionError(ArithmeticError):
    """Raised when a tracked value exceeds the configured bit budget."""


def _absmax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def _shrink(a: np.ndarray) -> np.ndarray:
    """Return an int64 copy of an object array when every entry fits."""
    if a.dtype != object:
        return a
    if _absmax(a) < _INT64_SAFE:
        return a.astype(np.int64)
    return a


def _widen(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def int_matmul(a: np.ndarray, b: np.ndarray, amax: int | None = None, bmax: int | None = None,
               af: np.ndarray | None = None, bf: np.ndarray | None = None) -> np.ndarray:
    """Exact integer matrix product of two integer arrays.

    Optional precomputed magnitudes and float64 copies skip repeated work.
    """
    k = a.shape[-1]
    amax = _absmax(a) if amax is None else amax
    bmax = _absmax(b) if bmax is None else bmax
    bound = amax * bmax * max(k, 1)
    if bound < _FLOAT_EXACT:
        af = a.astype(np.float64) if af is None else af
        bf = b.astype(np.float64) if bf is None else bf
        return (af @ bf).astype(np.int64)
    if bound < _INT64_SAFE and a.dtype != object and b.dtype != object:
        return a @ b
    return _shrink(_widen(a) @ _widen(b))


def _array_gcd(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return reduce(gcd, (int(v) for v in a.flat), 0)
    return int(np.gcd.reduce(np.abs(a).ravel()))


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (str, Rational)):
        return Fraction(v)
    raise TypeError(f"not an exact rational: {v!r}")


class QArray:
    """Integer numerators over a shared positive denominator."""

    __slots__ = ("num", "den", "_amax", "_f64")

    def __init__(self, num, den: int = 1, *, reduce_: bool = True):
        num = np.asarray(num)
        if num.dtype != object and not np.issubdtype(num.dtype, np.integer):
            raise TypeError(f"numerators must be integers, got {num.dtype}")
        if num.dtype != object:
            num = num.astype(np.int64, copy=False)
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = den
        self._amax = None
        self._f64 = None
        if reduce_:
            self._reduce()

    def _reduce(self) -> None:
        if self.den == 1:
            self.num = _shrink(self.num)
            return
        g = gcd(_array_gcd(self.num), self.den)
        if g > 1:
            self.num = self.num // g
            self.den //= g
        self.num = _shrink(self.num)

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, shape) -> "QArray":
        return cls(np.zeros(shape, dtype=np.int64))

    @classmethod
    def of(cls, values) -> "QArray":
        """Build from nested sequences of ints, Fractions or rational strings."""
        arr = np.asarray(values, dtype=object)
        flat = [_to_fraction(v) for v in arr.flat]
        den = reduce(lcm, (f.denominator for f in flat), 1)
        nums = [f.numerator * (den // f.denominator) for f in flat]
        num = np.array(nums, dtype=object).reshape(arr.shape)
        return cls(_shrink(num), den)

    @classmethod
    def from_sparse(cls, shape, entries: Iterable[tuple[tuple[int, ...], Fraction]]) -> "QArray":
        entries = [(i, v if isinstance(v, Fraction) else Fraction(v)) for i, v in entries]
        den = reduce(lcm, {v.denominator for _, v in entries}, 1)
        vals = [(i, v.numerator * (den // v.denominator)) for i, v in entries]
        big = any(abs(x) >= _INT64_SAFE for _, x in vals)
        num = np.zeros(shape, dtype=object if big else np.int64)
        for idx, x in vals:
            num[idx] = x
        return cls(num, den)

    # -- views ------------------------------------------------------------

    @property
    def shape(self):
        return self.num.shape

    def __len__(self) -> int:
        return len(self.num)

    def __getitem__(self, idx) -> "QArray":
        return QArray(self.num[idx], self.den, reduce_=False)

    def copy(self) -> "QArray":
        return QArray(self.num.copy(), self.den, reduce_=False)

    def to_fractions(self):
        def conv(x):
            if isinstance(x, np.ndarray):
                return [conv(y) for y in x]
            return Fraction(int(x), self.den)

        return conv(self.num)

    def to_ints(self) -> list:
        """Return plain Python ints; fails if any entry is fractional."""
        if self.den != 1:
            raise ValueError("array has non-integer entries")
        return np.asarray(self.num, dtype=object).tolist()

    def is_integral(self) -> bool:
        return self.den == 1

    def max_bits(self) -> int:
        """Largest bit length over the numerators and the shared denominator."""
        return max(_absmax(self.num).bit_length(), self.den.bit_length())

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, other: "QArray"):
        den = lcm(self.den, other.den)
        a = self.num if den == self.den else _scale(self.num, den // self.den)
        b = other.num if den == other.den else _scale(other.num, den // other.den)
        return a, b, den

    def __add__(self, other: "QArray") -> "QArray":
        a, b, den = self._aligned(_coerce(other))
        return QArray(_safe_add(a, b), den)

    def __sub__(self, other: "QArray") -> "QArray":
        a, b, den = self._aligned(_coerce(other))
        return QArray(_safe_add(a, _neg(b)), den)

    def __neg__(self) -> "QArray":
        return QArray(_neg(self.num), self.den, reduce_=False)

    def absmax(self) -> int:
        if self._amax is None:
            self._amax = _absmax(self.num)
        return self._amax

    def as_float(self) -> np.ndarray:
        """Float64 copy of the numerators (cached; only exact below 2**53)."""
        if self._f64 is None:
            self._f64 = self.num.astype(np.float64)
        return self._f64

    def __matmul__(self, other: "QArray") -> "QArray":
        small = self.absmax() < _FLOAT_EXACT and other.absmax() < _FLOAT_EXACT
        out = int_matmul(self.num, other.num, self.absmax(), other.absmax(),
                         self.as_float() if small else None, other.as_float() if small else None)
        return QArray(out, self.den * other.den)

    def scale(self, k) -> "QArray":
        k = _to_fraction(k)
        return QArray(_scale(self.num, k.numerator), self.den * k.denominator)

    @property
    def T(self) -> "QArray":
        out = QArray(self.num.T, self.den, reduce_=False)
        out._amax = self._amax
        if self._f64 is not None:
            out._f64 = self._f64.T
        return out

    def relu(self) -> "QArray":
        if self.num.dtype == object:
            out = np.array([max(int(v), 0) for v in self.num.flat], dtype=object)
            return QArray(out.reshape(self.num.shape), self.den)
        return QArray(np.maximum(self.num, 0), self.den)

    def argmax_rows(self) -> np.ndarray:
        """Row-wise argmax; the lowest index wins ties."""
        return np.argmax(self.num, axis=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QArray):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a = _scale(self.num, other.den)
        b = _scale(other.num, self.den)
        return bool(np.all(a == b))

    __hash__ = None

    def __repr__(self) -> str:
        return f"QArray(shape={self.shape}, den={self.den})"


def _coerce(x) -> QArray:
    return x if isinstance(x, QArray) else QArray.of(x)


def _scale(a: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return a
    if _absmax(a) * abs(k) >= _INT64_SAFE:
        return _widen(a) * k
    return a * k


def _neg(a: np.ndarray) -> np.ndarray:
    return -a


def _safe_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if _absmax(a) + _absmax(b) >= _INT64_SAFE:
        return _widen(a) + _widen(b)
    return a + b


def _aligned_parts(arrays: Sequence[QArray]):
    den = reduce(lcm, (a.den for a in arrays), 1)
    parts = [_scale(a.num, den // a.den) for a in arrays]
    if any(p.dtype == object for p in parts):
        parts = [_widen(p) for p in parts]
    return parts, den


def stack_rows(rows: Sequence[QArray]) -> QArray:
    """Stack 1-d arrays into a matrix, aligning denominators."""
    parts, den = _aligned_parts(rows)
    return QArray(np.stack(parts), den)


def concat(arrays: Sequence[QArray], axis: int = 0) -> QArray:
    parts, den = _aligned_parts(arrays)
    return QArray(np.concatenate(parts, axis=axis), den)


class BitTracker:
    """Records the widest value seen; optionally enforces a budget."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.widest = 0

    def see(self, arr: QArray, where: str = "") -> None:
        bits = arr.max_bits()
        if bits > self.widest:
            self.widest = bits
        if self.limit is not None and bits > self.limit:
            raise PrecisionError(f"{where}: {bits} bits exceeds limit {self.limit}")
