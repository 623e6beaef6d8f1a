"""Products and inner products from one layer of ReLUs.

``x*y = (sq(x+y) - sq(x-y)) / 4`` where ``sq`` is the piecewise-linear
interpolant of ``t**2`` with knots every ``1/q``.  The interpolation error
of ``sq`` is at most ``h**2 / 4`` with ``h = 1/q``, so the product error is
at most ``h**2 / 8``.  Knots include every integer, so integer inputs give
exact products.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, isqrt

from ..nir.mlp import Lin, MlpBuilder, MlpProgram, Stage


def knots_per_unit(eps) -> int:
    """Smallest q with (1/q)**2 / 8 <= eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    # need q**2 >= 1 / (8 eps)
    target = 1 / (8 * eps)
    q = max(1, isqrt(ceil(target)))
    while q * q < target:
        q += 1
    return q


def _half_square(st: Stage, s: Lin, reach: int, q: int) -> Lin:
    """Interpolant of s**2 for 0 <= s <= reach, zero for s <= 0."""
    h = Fraction(1, q)
    out = st.relu(s) * h
    for k in range(1, reach * q):
        out = out + st.relu(s - k * h) * (2 * h)
    return out


def square(st: Stage, t: Lin, reach: int, q: int) -> Lin:
    return _half_square(st, t, reach, q) + _half_square(st, -t, reach, q)


def product(st: Stage, a: Lin, b: Lin, R: int, q: int) -> Lin:
    """Approximate ``a*b`` for |a|, |b| <= R using ``8*R*q`` units."""
    return (square(st, a + b, 2 * R, q) - square(st, a - b, 2 * R, q)) * Fraction(1, 4)


def inner_product(st: Stage, xs, ys, R: int, eps) -> Lin:
    """Sum of per-coordinate products, each accurate to ``eps / len(xs)``."""
    q = knots_per_unit(Fraction(eps) / len(xs))
    total = Lin()
    for a, b in zip(xs, ys):
        total = total + product(st, a, b, R, q)
    return total


def mult_gadget(R: int, eps=Fraction(1, 4)) -> MlpProgram:
    """Two inputs, one output, one hidden layer: |out - x*y| <= eps on [-R, R]^2."""
    if R < 1:
        raise ValueError("R must be >= 1")
    b = MlpBuilder(2)
    x, y = b.inputs()
    st = Stage(b)
    out = product(st, x, y, R, knots_per_unit(eps))
    st.commit()
    return b.finish([out])


def inner_product_gadget(d: int, R: int, eps=Fraction(1, 4)) -> MlpProgram:
    """Inputs ``x ++ y`` (2d values), output approximately <x, y>."""
    b = MlpBuilder(2 * d)
    v = b.inputs()
    st = Stage(b)
    out = inner_product(st, v[:d], v[d:], R, eps)
    st.commit()
    return b.finish([out])
