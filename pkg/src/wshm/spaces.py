"""Weighted shift Hilbert modules given by their monomial weight function.

A space is determined by the exact rational weight ``omega(alpha) =
||z^alpha||^2 > 0`` on exponent tuples; monomials of distinct exponents are
orthogonal.  Built-in weights:

    drury-arveson   omega(alpha) = alpha! / |alpha|!
    hardy-ball      omega(alpha) = alpha! (m-1)! / (|alpha|+m-1)!
    bergman-ball    omega(alpha) = alpha! m! / (|alpha|+m)!
    polydisk-hardy  omega(alpha) = scale2^|alpha|   (scale2 = 1 by default)

``polydisk-hardy`` takes a rational ``scale2`` parameter, the squared scale
of the generator tuple: only squared quantities enter any computation, so the
1/sqrt(m)-scaled tuple stays in exact rational arithmetic via scale2 = 1/m.

Built-ins also carry a closed-form successor ratio omega(alpha+e_i) /
omega(alpha); this keeps the diagonal defect data cheap at high degree, where
the raw factorial weights would be enormous integers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable

from .algebra import (
    MultiIndex,
    WeightVector,
    add_index,
    check_multiindex,
    check_weight_vector,
    enumerate_level,
    level_dimension,
    residue_of,
    unit_index,
)
from .errors import ArityError, DimensionError, WshmError

WeightFn = Callable[[MultiIndex], Fraction]
RatioFn = Callable[[MultiIndex, int], Fraction]

BUILTIN_KINDS = ("drury-arveson", "hardy-ball", "bergman-ball", "polydisk-hardy", "custom")

_ALIASES = {
    "da": "drury-arveson",
    "drury-arveson": "drury-arveson",
    "hardy": "hardy-ball",
    "hardy-ball": "hardy-ball",
    "bergman": "bergman-ball",
    "bergman-ball": "bergman-ball",
    "polydisk": "polydisk-hardy",
    "polydisk-hardy": "polydisk-hardy",
    "custom": "custom",
}


class WeightedShiftSpace:
    """Immutable weighted shift Hilbert module.

    The weight cache fills idempotently (same key always maps to the same
    value), so concurrent readers never need coordination.
    """

    def __init__(
        self,
        kind: str,
        m: int,
        weight_fn: WeightFn,
        params: dict | None = None,
        ratio_fn: RatioFn | None = None,
    ):
        if m < 1:
            raise ArityError(f"variable count must be >= 1, got {m}")
        self.kind = kind
        self.m = m
        self.params = dict(params or {})
        self._weight_fn = weight_fn
        self._ratio_fn = ratio_fn
        self._cache: dict[MultiIndex, Fraction] = {}

    def weight(self, alpha: Iterable[int]) -> Fraction:
        """omega(alpha) = ||z^alpha||^2, exact and positive."""
        a = check_multiindex(alpha, self.m)
        w = self._cache.get(a)
        if w is None:
            w = Fraction(self._weight_fn(a))
            if w <= 0:
                raise WshmError(f"weight must be positive, got {w} at {a}")
            self._cache[a] = w
        return w

    def shift_ratio(self, alpha: Iterable[int], i: int) -> Fraction:
        """omega(alpha + e_i) / omega(alpha) = ||z_i z^alpha||^2 / ||z^alpha||^2."""
        a = check_multiindex(alpha, self.m)
        if not 0 <= i < self.m:
            raise DimensionError(f"variable index {i} out of range for m={self.m}")
        if self._ratio_fn is not None:
            return self._ratio_fn(a, i)
        return self.weight(add_index(a, unit_index(self.m, i))) / self.weight(a)

    def spherical_defect(self, alpha: Iterable[int]) -> Fraction:
        """Eigenvalue of I - sum_i M_{z_i}* M_{z_i} at z^alpha (exact).

        The operator is diagonal in the monomial basis because monomials of
        distinct exponents are orthogonal.
        """
        a = check_multiindex(alpha, self.m)
        return 1 - sum(self.shift_ratio(a, i) for i in range(self.m))

    def describe(self, preview_degree: int = 3) -> dict:
        """JSON-ready descriptor with a weight table up to preview_degree."""
        sample = []
        for k in range(preview_degree + 1):
            for a in enumerate_level(self.m, k):
                sample.append({"alpha": list(a), "omega": str(self.weight(a))})
        return {
            "kind": self.kind,
            "m": self.m,
            "params": {k: str(v) for k, v in self.params.items()},
            "sample_weights": sample,
        }

    def __repr__(self) -> str:
        return f"WeightedShiftSpace({self.kind}, m={self.m}, params={self.params})"


def _factorial_weights(m: int, shift: int) -> tuple[WeightFn, RatioFn]:
    """Weights alpha! (shift-1)! / (|alpha|+shift-1)! and their ratios.

    shift = 1 gives Drury-Arveson, shift = m the Hardy ball, shift = m+1 the
    Bergman ball (these are the kernel powers of the respective spaces).
    """

    def weight(alpha: MultiIndex) -> Fraction:
        num = math.prod(math.factorial(a) for a in alpha) * math.factorial(shift - 1)
        return Fraction(num, math.factorial(sum(alpha) + shift - 1))

    def ratio(alpha: MultiIndex, i: int) -> Fraction:
        return Fraction(alpha[i] + 1, sum(alpha) + shift)

    return weight, ratio


def builtin_space(kind: str, m: int, params: dict | None = None) -> WeightedShiftSpace:
    """Construct one of the built-in spaces (or a custom one) by name."""
    canonical = _ALIASES.get(str(kind).lower())
    if canonical is None:
        raise WshmError(f"unknown space kind {kind!r}; expected one of {BUILTIN_KINDS}")
    if m < 1:
        raise ArityError(f"variable count must be >= 1, got {m}")
    params = dict(params or {})

    if canonical == "drury-arveson":
        w, r = _factorial_weights(m, 1)
        return WeightedShiftSpace(canonical, m, w, params={}, ratio_fn=r)
    if canonical == "hardy-ball":
        w, r = _factorial_weights(m, m)
        return WeightedShiftSpace(canonical, m, w, params={}, ratio_fn=r)
    if canonical == "bergman-ball":
        w, r = _factorial_weights(m, m + 1)
        return WeightedShiftSpace(canonical, m, w, params={}, ratio_fn=r)
    if canonical == "polydisk-hardy":
        scale2 = params.get("scale2", 1)
        if isinstance(scale2, str):
            scale2 = Fraction(1, m) if scale2 == "1/m" else Fraction(scale2)
        scale2 = Fraction(scale2)
        if scale2 <= 0:
            raise WshmError(f"scale2 must be positive, got {scale2}")

        def w(alpha: MultiIndex, _s=scale2) -> Fraction:
            return _s ** sum(alpha)

        def r(alpha: MultiIndex, i: int, _s=scale2) -> Fraction:
            return _s

        return WeightedShiftSpace(canonical, m, w, params={"scale2": scale2}, ratio_fn=r)

    # custom: params must supply a weight table or callable
    fn = params.get("weight")
    table = params.get("table")
    if fn is None and table is None:
        raise WshmError("custom space needs params['weight'] (callable) or params['table']")
    if fn is None:
        tbl = {tuple(k) if not isinstance(k, tuple) else k: Fraction(v) for k, v in table.items()}

        def fn(alpha: MultiIndex, _t=tbl) -> Fraction:
            if alpha not in _t:
                raise WshmError(f"custom weight table has no entry for {alpha}")
            return _t[alpha]

        params = {"table": "inline"}
    else:
        params = {"weight": getattr(fn, "__name__", "callable")}
    return WeightedShiftSpace("custom", m, fn, params=params)


def weighted_piece(
    space: WeightedShiftSpace, n: WeightVector, alpha: MultiIndex
) -> WeightedShiftSpace:
    """The residue piece H^n(alpha) as a module in its own right.

    Its weight is omega_hat(beta) = omega(alpha + n*beta) (componentwise
    product), the module action being multiplication by z_i^{n_i}.  The
    residue class representative must satisfy 0 <= alpha < n.
    """
    n = check_weight_vector(n, space.m)
    a = check_multiindex(alpha, space.m)
    if residue_of(a, n) != a:
        raise DimensionError(f"residue representative {a} not in the box 0 <= alpha < {n}")

    def w(beta: MultiIndex) -> Fraction:
        return space.weight(tuple(x + ni * b for x, ni, b in zip(a, n, beta)))

    def r(beta: MultiIndex, i: int) -> Fraction:
        # n_i single steps of the underlying ratio, avoiding huge raw weights
        base = list(x + ni * b for x, ni, b in zip(a, n, beta))
        out = Fraction(1)
        for _ in range(n[i]):
            out *= space.shift_ratio(tuple(base), i)
            base[i] += 1
        return out

    return WeightedShiftSpace(
        f"{space.kind}^piece",
        space.m,
        w,
        params={"n": n, "alpha": a, "base": space.kind, **space.params},
        ratio_fn=r,
    )


def piece_partition_check(space: WeightedShiftSpace, n: WeightVector, K: int) -> dict:
    """Verify residue classes partition the monomials of degree <= K.

    Returns per-class counts, the total, and a ``balanced`` flag asserting
    the counts sum to sum_{k<=K} dim H_k.
    """
    n = check_weight_vector(n, space.m)
    if K < 0:
        raise DimensionError(f"K must be >= 0, got {K}")
    counts: dict[MultiIndex, int] = {}
    total = 0
    for k in range(K + 1):
        for a in enumerate_level(space.m, k):
            counts[residue_of(a, n)] = counts.get(residue_of(a, n), 0) + 1
            total += 1
    expected = sum(level_dimension(space.m, k) for k in range(K + 1))
    return {
        "n": list(n),
        "K": K,
        "class_sizes": {",".join(map(str, cls)): c for cls, c in sorted(counts.items())},
        "total": total,
        "expected_total": expected,
        "balanced": total == expected,
    }
