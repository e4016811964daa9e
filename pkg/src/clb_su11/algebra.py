"""Normal-ordered polynomials in the ladder operators of two bosonic modes.

Every expression is stored as a map from a monomial key ``(p, q, s, t)`` to a
complex coefficient, where the key stands for the normal-ordered product

    ad^p a^q bd^s b^t

(``ad`` is the creation operator of mode a, ``bd`` that of mode b). Products
are brought back to normal order with the closed-form single-mode rule

    (ad^p a^q)(ad^r a^s) = sum_k C(q, k) C(r, k) k! ad^(p+r-k) a^(q+s-k)

applied independently to each mode, since the two modes commute.
"""

from __future__ import annotations

from functools import reduce
from math import comb, factorial
from typing import TYPE_CHECKING, Mapping, NamedTuple

import numpy as np

if TYPE_CHECKING:
    from .interferometer import ModeTransform

__all__ = [
    "MAX_DEGREE",
    "PRUNE_RELATIVE",
    "DegreeError",
    "LadderMonomial",
    "LadderExpr",
    "multiply",
    "adjoint",
    "substitute_modes",
    "substitute_modes_derivative",
    "displace",
    "coherent_expectation",
    "vacuum_expectation",
    "a",
    "ad",
    "b",
    "bd",
    "identity",
    "number_operator",
]

MAX_DEGREE = 8
PRUNE_RELATIVE = 1e-14


class DegreeError(ValueError):
    """Raised when a product would exceed :data:`MAX_DEGREE`."""


class LadderMonomial(NamedTuple):
    """Exponents of the normal-ordered product ``ad^p a^q bd^s b^t``."""

    p: int
    q: int
    s: int
    t: int

    @property
    def degree(self) -> int:
        return self.p + self.q + self.s + self.t


def _prune(terms: dict) -> dict:
    """Drop exact zeros and floating-point dust relative to the largest term."""
    if not terms:
        return terms
    biggest = max(abs(c) for c in terms.values())
    cut = PRUNE_RELATIVE * biggest
    return {k: c for k, c in terms.items() if c != 0 and abs(c) >= cut}


class LadderExpr:
    """Canonical two-mode ladder polynomial.

    Instances are immutable. Arithmetic operators return new canonical
    expressions; ``x * y`` is the operator product (see :func:`multiply`).
    Two expressions are ``==`` iff their canonical term maps are identical.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, complex] | None = None):
        acc: dict[LadderMonomial, complex] = {}
        for key, coef in (terms or {}).items():
            mono = LadderMonomial(*(int(k) for k in key))
            if min(mono) < 0:
                raise ValueError(f"negative exponent in {tuple(key)}")
            acc[mono] = acc.get(mono, 0j) + complex(coef)
        self._terms = _prune(acc)

    @classmethod
    def _raw(cls, terms: dict) -> LadderExpr:
        # terms already keyed by LadderMonomial with merged coefficients
        obj = cls.__new__(cls)
        obj._terms = _prune(terms)
        return obj

    @property
    def terms(self) -> Mapping[LadderMonomial, complex]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def constant(self) -> complex:
        return self._terms.get(LadderMonomial(0, 0, 0, 0), 0j)

    def canonicalize(self) -> LadderExpr:
        return LadderExpr._raw(dict(self._terms))

    def is_zero(self) -> bool:
        return not self._terms

    def adjoint(self) -> LadderExpr:
        return adjoint(self)

    def isclose(self, other: LadderExpr, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        keys = set(self._terms) | set(other._terms)
        scale = max([abs(c) for c in self._terms.values()] + [abs(c) for c in other._terms.values()] + [0.0])
        for k in keys:
            diff = abs(self._terms.get(k, 0j) - other._terms.get(k, 0j))
            if diff > atol + rtol * scale:
                return False
        return True

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = identity(other)
        if not isinstance(other, LadderExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = identity(other)
        if not isinstance(other, LadderExpr):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0j) + c
        return LadderExpr._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return LadderExpr._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return LadderExpr._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, LadderExpr):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return LadderExpr._raw({k: other * c for k, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        return reduce(multiply, [self] * n, identity())

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (p, q, s, t) in sorted(self._terms):
            c = self._terms[(p, q, s, t)]
            parts.append(f"({_fmt_complex(c)})·ad^{p} a^{q} bd^{s} b^{t}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LadderExpr({str(self)})"


def _fmt_complex(c: complex) -> str:
    re, im = c.real, c.imag
    sign = "-" if im < 0 or (im == 0 and str(im).startswith("-")) else "+"
    return f"{re:.17g}{sign}{abs(im):.17g}i"


def _mode_product(p: int, q: int, r: int, s: int):
    """Normal-order ``(ad^p a^q)(ad^r a^s)`` for one mode: yields (weight, p', q')."""
    for k in range(min(q, r) + 1):
        yield comb(q, k) * comb(r, k) * factorial(k), p + r - k, q + s - k


def multiply(x: LadderExpr, y: LadderExpr) -> LadderExpr:
    """Normal-ordered operator product ``x·y``.

    Raises
    ------
    DegreeError
        If a resulting monomial exceeds :data:`MAX_DEGREE`.
    """
    if x.degree + y.degree > MAX_DEGREE:
        raise DegreeError(f"product degree {x.degree + y.degree} exceeds {MAX_DEGREE}")
    acc: dict[LadderMonomial, complex] = {}
    for (p1, q1, s1, t1), c1 in x._terms.items():
        for (p2, q2, s2, t2), c2 in y._terms.items():
            c = c1 * c2
            a_part = list(_mode_product(p1, q1, p2, q2))
            b_part = list(_mode_product(s1, t1, s2, t2))
            for wa, pa, qa in a_part:
                for wb, sb, tb in b_part:
                    key = LadderMonomial(pa, qa, sb, tb)
                    acc[key] = acc.get(key, 0j) + (wa * wb) * c
    return LadderExpr._raw(acc)


def adjoint(x: LadderExpr) -> LadderExpr:
    # (ad^p a^q bd^s b^t)^dagger = ad^q a^p bd^t b^s, already normal-ordered
    return LadderExpr._raw({LadderMonomial(q, p, t, s): c.conjugate() for (p, q, s, t), c in x._terms.items()})


def identity(c: complex = 1.0) -> LadderExpr:
    return LadderExpr({(0, 0, 0, 0): c})


def a() -> LadderExpr:
    return LadderExpr({(0, 1, 0, 0): 1})


def ad() -> LadderExpr:
    return LadderExpr({(1, 0, 0, 0): 1})


def b() -> LadderExpr:
    return LadderExpr({(0, 0, 0, 1): 1})


def bd() -> LadderExpr:
    return LadderExpr({(0, 0, 1, 0): 1})


def number_operator() -> LadderExpr:
    """Total photon number ``ad a + bd b``."""
    return LadderExpr({(1, 1, 0, 0): 1, (0, 0, 1, 1): 1})


# column order of a ModeTransform row: (a, ad, b, bd)
_BASIS_KEYS = (
    LadderMonomial(0, 1, 0, 0),
    LadderMonomial(1, 0, 0, 0),
    LadderMonomial(0, 0, 0, 1),
    LadderMonomial(0, 0, 1, 0),
)


def _linear(row) -> LadderExpr:
    return LadderExpr._raw({k: complex(c) for k, c in zip(_BASIS_KEYS, row)})


def _images(matrix) -> tuple:
    """Linear images of (ad, a, bd, b), the factor order of a monomial key."""
    rows = [_linear(row) for row in np.asarray(matrix)]
    return rows[1], rows[0], rows[3], rows[2]


def _substitute_rows(x: LadderExpr, matrix) -> LadderExpr:
    images = _images(matrix)
    powers: dict[tuple[int, int], LadderExpr] = {}

    def power(slot: int, n: int) -> LadderExpr:
        if (slot, n) not in powers:
            powers[slot, n] = identity() if n == 0 else multiply(power(slot, n - 1), images[slot])
        return powers[slot, n]

    acc: dict[LadderMonomial, complex] = {}
    for key, c in x._terms.items():
        term = reduce(multiply, (power(i, n) for i, n in enumerate(key) if n), identity())
        for k, v in term._terms.items():
            acc[k] = acc.get(k, 0j) + c * v
    return LadderExpr._raw(acc)


def substitute_modes(x: LadderExpr, m: ModeTransform) -> LadderExpr:
    """Replace each ladder operator by its image under the mode transform ``m``.

    Row ``i`` of ``m.matrix`` expresses output operator ``i`` of the basis
    ``(a, ad, b, bd)`` as a combination of the input operators, so the result
    is ``x`` written in terms of the input modes (Heisenberg propagation).

    Raises
    ------
    ValueError
        If ``m`` does not preserve the canonical commutation relations.
    """
    m.check()
    return _substitute_rows(x, m.matrix)


def substitute_modes_derivative(x: LadderExpr, m: ModeTransform, dm) -> LadderExpr:
    """Directional derivative of ``substitute_modes(x, m + eps*dm)`` at ``eps = 0``.

    ``dm`` is an arbitrary 4x4 tangent matrix, so no commutation check is made
    on it. Computed by forward-mode product rule over each monomial's factors.
    """
    m.check()
    values = _images(m.matrix)
    tangents = _images(dm)
    zero = LadderExpr()

    acc = LadderExpr()
    for key, c in x._terms.items():
        val, tan = identity(), zero
        for slot, n in enumerate(key):
            for _ in range(n):
                val, tan = multiply(val, values[slot]), multiply(val, tangents[slot]) + multiply(tan, values[slot])
        acc = acc + c * tan
    return acc


def displace(x: LadderExpr, alpha: complex, beta: complex) -> LadderExpr:
    """Shift ``a -> a + alpha`` and ``b -> b + beta`` (adjoints conjugated).

    Normal order survives the shift, so each monomial expands binomially.
    The vacuum expectation of the result equals the coherent-state
    expectation of ``x`` at ``(alpha, beta)``.
    """
    ac, bc = np.conj(alpha), np.conj(beta)
    acc: dict[LadderMonomial, complex] = {}
    for (p, q, s, t), c in x._terms.items():
        for i in range(p + 1):
            for j in range(q + 1):
                wa = comb(p, i) * comb(q, j) * ac ** (p - i) * alpha ** (q - j)
                for k in range(s + 1):
                    for l in range(t + 1):
                        w = wa * comb(s, k) * comb(t, l) * bc ** (s - k) * beta ** (t - l)
                        key = LadderMonomial(i, j, k, l)
                        acc[key] = acc.get(key, 0j) + c * w
    return LadderExpr._raw(acc)


def coherent_expectation(x: LadderExpr, inp) -> complex:
    """Expectation of ``x`` in the product coherent state ``|alpha>|beta>``.

    ``inp`` is anything with complex ``alpha`` and ``beta`` attributes,
    normally a :class:`~clb_su11.sensitivity.CoherentInput`.
    """
    alpha, beta = complex(inp.alpha), complex(inp.beta)
    ac, bc = alpha.conjugate(), beta.conjugate()
    return complex(sum(c * ac**p * alpha**q * bc**s * beta**t for (p, q, s, t), c in x._terms.items()))


def vacuum_expectation(x: LadderExpr) -> complex:
    return x.constant()
