"""ReLU networks over exact rationals, plus a small builder for wiring them.

The builder tracks named quantities as affine forms over the units of the
most recent layer.  Each call to :meth:`MlpBuilder.layer` turns a list of
requested pre-activations into a new ReLU layer and hands back forms over
that layer, so gadgets compose by ordinary arithmetic on :class:`Lin`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .rational import BitTracker, QArray


class WidthError(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    weight: QArray  # (out, in)
    bias: QArray  # (out,)
    relu: bool = True

    @property
    def n_in(self) -> int:
        return self.weight.shape[1]

    @property
    def n_out(self) -> int:
        return self.weight.shape[0]

    @cached_property
    def weight_t(self) -> QArray:
        return self.weight.T

    def apply(self, x: QArray) -> QArray:
        y = x @ self.weight_t + self.bias
        return y.relu() if self.relu else y


@dataclass(frozen=True)
class MlpProgram:
    layers: tuple[Affine, ...]

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if a.n_out != b.n_in:
                raise WidthError(f"layer widths {a.n_out} -> {b.n_in} do not chain")

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    @property
    def hidden_widths(self) -> list[int]:
        return [a.n_out for a in self.layers[:-1]]

    def param_count(self) -> int:
        return sum(a.n_out * a.n_in + a.n_out for a in self.layers)


def mlp_forward(program: MlpProgram, x: QArray, tracker: BitTracker | None = None) -> QArray:
    """Apply the network to a vector, or row-wise to a matrix."""
    if x.shape[-1] != program.n_in:
        raise WidthError(f"input width {x.shape[-1]} != {program.n_in}")
    for layer in program.layers:
        x = layer.apply(x)
        if tracker is not None:
            tracker.see(x, "mlp")
    return x


class Lin:
    """Affine form ``const + sum(coef[i] * unit[i])`` with exact coefficients."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[int, Fraction] | None = None, const=0):
        self.terms = terms or {}
        self.const = Fraction(const)

    @staticmethod
    def unit(i: int) -> "Lin":
        return Lin({i: Fraction(1)})

    def __add__(self, other) -> "Lin":
        if not isinstance(other, Lin):
            return Lin(dict(self.terms), self.const + Fraction(other))
        terms = dict(self.terms)
        for k, v in other.terms.items():
            s = terms.get(k, 0) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return Lin(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Lin":
        return Lin({k: -v for k, v in self.terms.items()}, -self.const)

    def __sub__(self, other) -> "Lin":
        return self + (-other)

    def __rsub__(self, other) -> "Lin":
        return (-self) + other

    def __mul__(self, k) -> "Lin":
        k = Fraction(k)
        if not k:
            return Lin()
        return Lin({i: v * k for i, v in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Lin({self.terms}, {self.const})"


def _affine_from(forms: Sequence[Lin], n_in: int, relu: bool) -> Affine:
    w = QArray.from_sparse((len(forms), n_in),
                           (((r, c), v) for r, f in enumerate(forms) for c, v in f.terms.items()))
    b = QArray.from_sparse((len(forms),), (((r,), f.const) for r, f in enumerate(forms) if f.const))
    return Affine(w, b, relu)


class MlpBuilder:
    """Accumulates ReLU layers from affine forms.

    >>> b = MlpBuilder(1)
    >>> (x,) = b.inputs()
    >>> h = b.layer([x, -x])
    >>> prog = b.finish([h[0] - h[1]])
    >>> mlp_forward(prog, QArray.of([-3])).to_ints()
    [-3]
    """

    def __init__(self, n_in: int):
        self.n_in = n_in
        self._width = n_in
        self._layers: list[Affine] = []

    def inputs(self) -> list[Lin]:
        if self._layers:
            raise RuntimeError("inputs are only addressable before the first layer")
        return [Lin.unit(i) for i in range(self.n_in)]

    def layer(self, pre: Iterable[Lin]) -> list[Lin]:
        pre = list(pre)
        self._layers.append(_affine_from(pre, self._width, relu=True))
        self._width = len(pre)
        return [Lin.unit(i) for i in range(len(pre))]

    def finish(self, outputs: Sequence[Lin]) -> MlpProgram:
        self._layers.append(_affine_from(list(outputs), self._width, relu=False))
        return MlpProgram(tuple(self._layers))


@dataclass
class Stage:
    """Collects the pre-activations of one ReLU layer.

    Methods return forms over the *new* layer; they become meaningful once
    :meth:`commit` has pushed the layer onto the builder.
    """

    builder: MlpBuilder
    pre: list[Lin] = field(default_factory=list)

    def relu(self, e: Lin) -> Lin:
        self.pre.append(e if isinstance(e, Lin) else Lin(const=e))
        return Lin.unit(len(self.pre) - 1)

    def signed(self, e: Lin) -> Lin:
        """Pass a value of either sign through the layer unchanged."""
        return self.relu(e) - self.relu(-e)

    def nonneg(self, e: Lin) -> Lin:
        """Pass a value known to be >= 0 through the layer."""
        return self.relu(e)

    def commit(self) -> None:
        self.builder.layer(self.pre)


def identity_program(width: int) -> MlpProgram:
    """Exact identity via the ``relu(z) - relu(-z)`` pairing."""
    b = MlpBuilder(width)
    st = Stage(b)
    outs = [st.signed(x) for x in b.inputs()]
    st.commit()
    return b.finish(outs)
