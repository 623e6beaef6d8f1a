"""Reusable ReLU gadgets expressed with the MLP builder.

All gadgets assume integer-valued flags in {0, 1}; ``bound`` must dominate
the absolute value of anything being routed.
"""

from __future__ import annotations

from fractions import Fraction

from ..nir.mlp import Lin, MlpBuilder, MlpProgram, Stage


def at_least(st: Stage, z: Lin) -> Lin:
    """1 if the integer z >= 0, else 0."""
    return st.relu(z + 1) - st.relu(z)


def zero_parts(st: Stage, z: Lin) -> tuple[Lin, Lin]:
    """First half of the zero detector: |z| as two units."""
    return st.relu(z), st.relu(-z)


def zero_finish(st: Stage, parts: tuple[Lin, Lin]) -> Lin:
    """Second half: 1 iff the integer behind ``parts`` was 0."""
    return st.relu(1 - parts[0] - parts[1])


def gated(st: Stage, value: Lin, off: Lin, bound) -> Lin:
    """One unit equal to ``value + bound`` when ``off`` is 0 and 0 when ``off`` >= 1.

    Summing gated units whose ``off`` terms leave exactly one of them live,
    then subtracting ``bound``, selects that unit's value.
    """
    return st.relu(value + bound - 2 * bound * off)


def select(st: Stage, when_zero: Lin, when_one: Lin, flag: Lin, bound) -> Lin:
    """``when_one`` if flag is 1, else ``when_zero``."""
    return gated(st, when_zero, flag, bound) + gated(st, when_one, 1 - flag, bound) - bound


def zero_detector() -> MlpProgram:
    b = MlpBuilder(1)
    (z,) = b.inputs()
    st = Stage(b)
    parts = zero_parts(st, z)
    st.commit()
    st = Stage(b)
    out = zero_finish(st, parts)
    st.commit()
    return b.finish([out])


def comparator(gap=Fraction(1, 2)) -> MlpProgram:
    """Inputs (a, b); 1 when a - b >= gap/2, 0 when a - b <= 0."""
    gap = Fraction(gap)
    b = MlpBuilder(2)
    x, y = b.inputs()
    st = Stage(b)
    h1 = st.relu(x - y)
    h2 = st.relu(x - y - gap / 2)
    st.commit()
    return b.finish([(h1 - h2) * (2 / gap)])
