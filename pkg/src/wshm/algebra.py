"""Exact scalars, multi-index combinatorics, and graded polynomials.

Scalars are Gaussian rationals: complex numbers whose real and imaginary
parts are `fractions.Fraction` values.  All arithmetic is exact; there is no
rounding anywhere in this module.

Monomials are exponent tuples ``alpha = (a_1, ..., a_m)`` and polynomials are
sparse maps from exponent tuple to coefficient (zero coefficients are never
stored).  A single deterministic monomial order -- graded lexicographic, with
the higher power of the earlier variable first inside each degree -- is used
everywhere so that matrices, bases and reports are bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import ArityError, DimensionError

MultiIndex = tuple[int, ...]
WeightVector = tuple[int, ...]

ScalarLike = Union["GaussianRational", Fraction, int]


@dataclass(frozen=True, slots=True, eq=False)
class GaussianRational:
    """A complex number with rational real and imaginary parts.

    Closed under +, -, *, and / by a nonzero element.  Equality and hashing
    are exact and agree with Fraction/int on real values, so these can key
    dictionaries and be compared for bit-for-bit identity in tests.
    """

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    @staticmethod
    def of(value: ScalarLike) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(Fraction(value))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> "GaussianRational":
        return self + (-GaussianRational.of(other))

    def __rsub__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.of(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        n2 = o.abs2()
        if not n2:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n2,
            (self.im * o.re - self.re * o.im) / n2,
        )

    def __rtruediv__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.of(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, an exact nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        im = f"{abs(self.im)}i" if abs(self.im) != 1 else "i"
        sign = "-" if self.im < 0 else "+"
        if not self.re:
            return im if sign == "+" else f"-{im}"
        return f"{self.re}{sign}{im}"


G_ZERO = GaussianRational()
G_ONE = GaussianRational(Fraction(1))
G_I = GaussianRational(Fraction(0), Fraction(1))


def check_multiindex(alpha: Iterable[int], m: int) -> MultiIndex:
    a = tuple(int(x) for x in alpha)
    if len(a) != m:
        raise DimensionError(f"multi-index length {len(a)} != variable count {m}")
    if any(x < 0 for x in a):
        raise DimensionError(f"multi-index entries must be >= 0, got {a}")
    return a


def check_weight_vector(n: Iterable[int], m: int) -> WeightVector:
    w = tuple(int(x) for x in n)
    if len(w) != m:
        raise DimensionError(f"weight vector length {len(w)} != variable count {m}")
    if any(x < 1 for x in w):
        raise DimensionError(f"weight vector entries must be >= 1, got {w}")
    return w


def grlex_key(alpha: MultiIndex) -> tuple:
    """Sort key realizing the graded lexicographic order used everywhere."""
    return (sum(alpha), tuple(-a for a in alpha))


def level_dimension(m: int, k: int) -> int:
    """Number of monomials of total degree k in m variables: C(m+k-1, k)."""
    if m < 1:
        raise ArityError(f"variable count must be >= 1, got {m}")
    if k < 0:
        return 0
    return math.comb(m + k - 1, k)


def enumerate_level(m: int, k: int) -> list[MultiIndex]:
    """All degree-k exponent tuples in m variables, in graded-lex order.

    The order is identical across runs: the first variable carries the
    highest power first, e.g. (2,2) -> [(2,0), (1,1), (0,2)].
    """
    if m < 1:
        raise ArityError(f"variable count must be >= 1, got {m}")
    if k < 0:
        return []

    def rec(vars_left: int, budget: int) -> Iterator[tuple[int, ...]]:
        if vars_left == 1:
            yield (budget,)
            return
        for e in range(budget, -1, -1):
            for rest in rec(vars_left - 1, budget - e):
                yield (e,) + rest

    return list(rec(m, k))


def enumerate_weighted_level(m: int, n: WeightVector, ell: int) -> list[MultiIndex]:
    """All exponent tuples with weighted degree sum(n_i * a_i) = ell.

    Deterministic order: earlier variables take higher exponents first,
    consistent with :func:`enumerate_level` (which is the n = (1,...,1) case).
    """
    n = check_weight_vector(n, m)
    if ell < 0:
        return []

    def rec(i: int, budget: int) -> Iterator[tuple[int, ...]]:
        if i == m - 1:
            if budget % n[i] == 0:
                yield (budget // n[i],)
            return
        for e in range(budget // n[i], -1, -1):
            for rest in rec(i + 1, budget - e * n[i]):
                yield (e,) + rest

    return list(rec(0, ell))


def weighted_degree(alpha: MultiIndex, n: WeightVector) -> int:
    """The weighted degree sum(n_i * alpha_i) of a monomial exponent."""
    if len(alpha) != len(n):
        raise DimensionError(
            f"multi-index length {len(alpha)} != weight length {len(n)}"
        )
    return sum(a * w for a, w in zip(alpha, n))


def residue_of(alpha: MultiIndex, n: WeightVector) -> MultiIndex:
    """Componentwise residue (alpha_i mod n_i); lies in the box 0 <= r < n."""
    if len(alpha) != len(n):
        raise DimensionError(
            f"multi-index length {len(alpha)} != weight length {len(n)}"
        )
    return tuple(a % w for a, w in zip(alpha, n))


def add_index(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def sub_index(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex | None:
    """alpha - beta componentwise, or None if any entry would go negative."""
    out = tuple(a - b for a, b in zip(alpha, beta))
    if any(x < 0 for x in out):
        return None
    return out


def unit_index(m: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(m))


class GradedPolynomial:
    """A sparse polynomial with exact Gaussian-rational coefficients.

    Immutable once constructed; no zero coefficient is ever stored, so
    equality of term maps is equality of polynomials.
    """

    __slots__ = ("m", "_terms", "_degree")

    def __init__(self, m: int, terms: Mapping[MultiIndex, ScalarLike] | None = None):
        if m < 1:
            raise ArityError(f"variable count must be >= 1, got {m}")
        clean: dict[MultiIndex, GaussianRational] = {}
        if terms:
            for alpha, c in terms.items():
                a = check_multiindex(alpha, m)
                g = GaussianRational.of(c)
                if g:
                    acc = clean.get(a)
                    g = acc + g if acc is not None else g
                    if g:
                        clean[a] = g
                    elif a in clean:
                        del clean[a]
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(
            self, "_degree", max((sum(a) for a in clean), default=None)
        )

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GradedPolynomial is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(m: int) -> "GradedPolynomial":
        return GradedPolynomial(m, {})

    @staticmethod
    def constant(m: int, value: ScalarLike) -> "GradedPolynomial":
        return GradedPolynomial(m, {(0,) * m: value})

    @staticmethod
    def variable(m: int, i: int) -> "GradedPolynomial":
        if not 0 <= i < m:
            raise DimensionError(f"variable index {i} out of range for m={m}")
        return GradedPolynomial(m, {unit_index(m, i): 1})

    @staticmethod
    def monomial(m: int, alpha: MultiIndex, coeff: ScalarLike = 1) -> "GradedPolynomial":
        return GradedPolynomial(m, {tuple(alpha): coeff})

    # -- inspection ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int | None:
        """Total degree, or None for the zero polynomial."""
        return self._degree

    def coefficient(self, alpha: MultiIndex) -> GaussianRational:
        return self._terms.get(tuple(alpha), G_ZERO)

    def terms(self) -> Iterator[tuple[MultiIndex, GaussianRational]]:
        """Terms in graded-lex order (deterministic)."""
        for alpha in sorted(self._terms, key=grlex_key):
            yield alpha, self._terms[alpha]

    def support(self) -> list[MultiIndex]:
        return sorted(self._terms, key=grlex_key)

    @property
    def is_homogeneous(self) -> bool:
        degs = {sum(a) for a in self._terms}
        return len(degs) <= 1

    def weighted_degree(self, n: WeightVector) -> int | None:
        """Max weighted degree over the support, or None for zero."""
        n = check_weight_vector(n, self.m)
        return max((weighted_degree(a, n) for a in self._terms), default=None)

    def is_quasi_homogeneous(self, n: WeightVector) -> bool:
        n = check_weight_vector(n, self.m)
        degs = {weighted_degree(a, n) for a in self._terms}
        return len(degs) <= 1

    # -- arithmetic ----------------------------------------------------

    def _require_same_ring(self, other: "GradedPolynomial") -> None:
        if self.m != other.m:
            raise DimensionError(
                f"polynomials over different variable counts: {self.m} vs {other.m}"
            )

    def __add__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        self._require_same_ring(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            s = out.get(a, G_ZERO) + c
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        return GradedPolynomial(self.m, out)

    def __neg__(self) -> "GradedPolynomial":
        return GradedPolynomial(self.m, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "GradedPolynomial":
        if isinstance(other, GradedPolynomial):
            self._require_same_ring(other)
            out: dict[MultiIndex, GaussianRational] = {}
            for a, ca in self._terms.items():
                for b, cb in other._terms.items():
                    key = add_index(a, b)
                    s = out.get(key, G_ZERO) + ca * cb
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            return GradedPolynomial(self.m, out)
        return self.scale(other)

    def __rmul__(self, other) -> "GradedPolynomial":
        return self.scale(other)

    def scale(self, c: ScalarLike) -> "GradedPolynomial":
        g = GaussianRational.of(c)
        if not g:
            return GradedPolynomial.zero(self.m)
        return GradedPolynomial(self.m, {a: v * g for a, v in self._terms.items()})

    def times_monomial(self, beta: MultiIndex) -> "GradedPolynomial":
        b = check_multiindex(beta, self.m)
        return GradedPolynomial(
            self.m, {add_index(a, b): c for a, c in self._terms.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedPolynomial)
            and self.m == other.m
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.m, frozenset(self._terms.items())))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for alpha, c in self.terms():
            mono = "*".join(
                f"z{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(alpha)
                if e > 0
            )
            if not mono:
                parts.append(str(c))
            elif c == G_ONE:
                parts.append(mono)
            elif c == -G_ONE:
                parts.append(f"-{mono}")
            elif c.is_real():
                parts.append(f"{c}*{mono}")
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"GradedPolynomial({self})"
