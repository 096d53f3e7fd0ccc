"""Positive regular polynomials and the modules they generate.

A positive regular polynomial in m variables is

    P(z) = sum_{i<=m} a_i z_i + sum_{j} a_{m+j} z^{alpha_j},

with a_i > 0 for the linear terms, a_{m+j} >= 0 and |alpha_j| >= 2.  Its
Hilbert module H_P has monomial weights ||z^beta||^2 = 1 / delta_beta, where
delta is the coefficient table of the series (1 - sum of all terms)^{-1},
computed by the exact recurrence

    delta_0 = 1,
    delta_beta = sum_i a_i delta_{beta - e_i} + sum_j a_{m+j} delta_{beta - alpha_j}

(terms with a negative index dropped).  All-minus signs are used inside the
inverted series: with a plus on the higher-order part the deltas go
nonpositive and the rank-one projection identity fails, which is surfaced as
a SignConventionError rather than silently accepted.

The comparison module lives in the Drury-Arveson space on m + K variables
(one variable Z_i per term of P), graded by the weight

    n = (1, ..., 1, |alpha_{m+1}|, ..., |alpha_{m+K}|),

and the comparison map sends Z^beta to sqrt(a)^beta z^{sigma(beta)} where
sigma replaces each higher variable by its exponent pattern.  The associated
ideal is generated by Q_j = Z_{m+j} - lambda_j Z^{alpha_j} with lambda_j^2 =
a_{m+j} / prod_t a_t^{alpha_{j,t}} always rational even when lambda_j is not.
Level dimensions of the ideal are computed on the rescaled generators
Z_{m+j} -> lambda_j Z_{m+j} (a diagonal, grading-preserving change of
variables, so every weighted level dimension is unchanged), and kernel
membership is checked on squared coefficient data; both paths are exact
rational arithmetic, no radicals needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    GradedPolynomial,
    MultiIndex,
    WeightVector,
    add_index,
    enumerate_level,
    enumerate_weighted_level,
    grlex_key,
    sub_index,
    unit_index,
)
from .errors import SignConventionError, WshmError
from .exact_linalg import fraction_sqrt
from .ideals import GradedIdeal, ideal_level_dimension
from .spaces import WeightedShiftSpace


@dataclass(frozen=True)
class PositiveRegularPoly:
    """Exact data of a positive regular polynomial."""

    m: int
    linear: tuple[Fraction, ...]
    higher: tuple[tuple[Fraction, MultiIndex], ...]

    def __post_init__(self):
        if self.m < 1 or len(self.linear) != self.m:
            raise WshmError("need one positive linear coefficient per variable")
        if any(a <= 0 for a in self.linear):
            raise WshmError(f"linear coefficients must be positive, got {self.linear}")
        seen = set()
        for a, alpha in self.higher:
            if a < 0:
                raise WshmError(f"higher coefficients must be >= 0, got {a}")
            if len(alpha) != self.m or sum(alpha) < 2:
                raise WshmError(f"higher multi-index must have degree >= 2, got {alpha}")
            if alpha in seen:
                raise WshmError(f"duplicate higher multi-index {alpha}")
            seen.add(alpha)

    @property
    def num_higher(self) -> int:
        return len(self.higher)

    @staticmethod
    def from_polynomial(p: GradedPolynomial) -> "PositiveRegularPoly":
        """Build from a parsed polynomial with rational coefficients."""
        linear = [None] * p.m
        higher = []
        for alpha, c in p.terms():
            if not c.is_real():
                raise WshmError(f"coefficients must be real rationals, got {c}")
            a = c.re
            deg = sum(alpha)
            if deg == 1:
                linear[alpha.index(1)] = a
            elif deg >= 2:
                higher.append((a, alpha))
            else:
                raise WshmError("constant terms are not allowed")
        if any(v is None for v in linear):
            raise WshmError("every variable needs a positive linear term")
        return PositiveRegularPoly(p.m, tuple(linear), tuple(sorted(higher, key=lambda t: grlex_key(t[1]))))

    def __str__(self) -> str:
        parts = [f"{a}*z{i + 1}" for i, a in enumerate(self.linear)]
        for a, alpha in self.higher:
            mono = "*".join(
                f"z{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(alpha)
                if e
            )
            parts.append(f"{a}*{mono}")
        return " + ".join(parts)


class DeltaTable:
    """Lazy exact table of the kernel coefficients delta_beta."""

    def __init__(self, poly: PositiveRegularPoly):
        self.poly = poly
        self._delta: dict[MultiIndex, Fraction] = {(0,) * poly.m: Fraction(1)}
        self._level = 0

    def ensure(self, degree: int) -> None:
        m = self.poly.m
        while self._level < degree:
            k = self._level + 1
            for beta in enumerate_level(m, k):
                acc = Fraction(0)
                for i, a in enumerate(self.poly.linear):
                    prev = sub_index(beta, unit_index(m, i))
                    if prev is not None:
                        acc += a * self._delta[prev]
                for a, alpha in self.poly.higher:
                    if not a:
                        continue
                    prev = sub_index(beta, alpha)
                    if prev is not None:
                        acc += a * self._delta[prev]
                if acc <= 0:
                    raise SignConventionError(
                        f"delta_{beta} = {acc} <= 0: kernel coefficient positivity "
                        "failed (sign convention violation)"
                    )
                self._delta[beta] = acc
            self._level = k

    def delta(self, beta: MultiIndex) -> Fraction:
        self.ensure(sum(beta))
        return self._delta[beta]

    def table(self, degree: int) -> dict[MultiIndex, Fraction]:
        self.ensure(degree)
        return {
            b: self._delta[b]
            for k in range(degree + 1)
            for b in enumerate_level(self.poly.m, k)
        }


def delta_coefficients(poly: PositiveRegularPoly, degree: int) -> dict[MultiIndex, Fraction]:
    """The exact table beta -> delta_beta for |beta| <= degree."""
    return DeltaTable(poly).table(degree)


def hp_space(poly: PositiveRegularPoly, degree_hint: int = 0) -> WeightedShiftSpace:
    """The module H_P with weights omega(beta) = 1/delta_beta.

    The table grows on demand, so the space answers weight queries beyond
    ``degree_hint``; the hint just pre-fills the recurrence.
    """
    table = DeltaTable(poly)
    if degree_hint:
        table.ensure(degree_hint)

    def weight(beta: MultiIndex) -> Fraction:
        return 1 / table.delta(beta)

    return WeightedShiftSpace(
        "positive-regular", poly.m, weight, params={"poly": str(poly)}
    )


@dataclass
class ProjectionCheck:
    """Outcome of the rank-one defect identity test on H_P."""

    degree: int
    passed: bool
    failures: list[tuple[MultiIndex, Fraction]]

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "passed": self.passed,
            "failures": [
                {"beta": list(b), "value": str(v)} for b, v in self.failures
            ],
        }


def defect_projection_check(poly: PositiveRegularPoly, degree: int) -> ProjectionCheck:
    """Verify I - sum_i a_i M_i M_i^* - sum_j a_j M^{alpha_j} M^{*alpha_j} = P_0.

    The operator is diagonal in the monomial basis; the eigenvalue at z^beta
    is checked exactly via weight ratios: 1 on the constant, 0 for every
    0 < |beta| <= degree.
    """
    space = hp_space(poly, degree)
    m = poly.m
    failures: list[tuple[MultiIndex, Fraction]] = []
    for k in range(degree + 1):
        for beta in enumerate_level(m, k):
            val = Fraction(1)
            for i, a in enumerate(poly.linear):
                prev = sub_index(beta, unit_index(m, i))
                if prev is not None:
                    val -= a * (space.weight(beta) / space.weight(prev))
            for a, alpha in poly.higher:
                prev = sub_index(beta, alpha)
                if a and prev is not None:
                    val -= a * (space.weight(beta) / space.weight(prev))
            expected = Fraction(1) if k == 0 else Fraction(0)
            if val != expected:
                failures.append((beta, val))
    return ProjectionCheck(degree, not failures, failures)


@dataclass
class JPData:
    """Generators and weight of the comparison ideal J_P.

    ``lambda_sq`` is always exact; ``lambda_exact`` holds the rational square
    root when one exists (None otherwise).  ``generators`` are the literal
    Q_j when every lambda is rational; ``rescaled_generators`` (Z_{m+j} -
    Z^{alpha_j}) span an ideal with identical weighted level dimensions and
    are what the exact row reduction consumes.
    """

    poly: PositiveRegularPoly
    total_vars: int
    weight: WeightVector
    lambda_sq: tuple[Fraction, ...]
    lambda_exact: tuple[Fraction | None, ...]
    rescaled_generators: tuple[GradedPolynomial, ...]
    generators: tuple[GradedPolynomial, ...] | None

    def rescaled_ideal(self) -> GradedIdeal:
        return GradedIdeal(self.total_vars, self.rescaled_generators, weight=self.weight)

    def to_json_dict(self) -> dict:
        return {
            "total_vars": self.total_vars,
            "weight": list(self.weight),
            "lambda_sq": [str(x) for x in self.lambda_sq],
            "lambda": [str(x) if x is not None else None for x in self.lambda_exact],
            "generators": [str(g) for g in self.generators]
            if self.generators is not None
            else [f"Z{self.poly.m + 1 + j} - lambda*Z^{list(a)}" for j, (_, a) in enumerate(self.poly.higher)],
        }


def _embed(alpha: MultiIndex, total: int) -> MultiIndex:
    return tuple(alpha) + (0,) * (total - len(alpha))


def jp_data(poly: PositiveRegularPoly) -> JPData:
    """Generators Q_j = Z_{m+j} - lambda_j Z^{alpha_j} and the ideal weight."""
    m, kk = poly.m, poly.num_higher
    total = m + kk
    weight = tuple([1] * m + [sum(alpha) for _, alpha in poly.higher])
    lam_sq = []
    lam = []
    resc = []
    literal: list[GradedPolynomial] | None = []
    for j, (a, alpha) in enumerate(poly.higher):
        denom = Fraction(1)
        for t, e in enumerate(alpha):
            denom *= poly.linear[t] ** e
        l2 = a / denom
        lam_sq.append(l2)
        root = fraction_sqrt(l2)
        lam.append(root)
        var = unit_index(total, m + j)
        emb = _embed(alpha, total)
        gen = GradedPolynomial(total, {var: 1, emb: -1})
        if not gen.is_quasi_homogeneous(weight):
            raise WshmError(f"generator for term {alpha} is not quasi-homogeneous")
        resc.append(gen)
        if literal is not None and root is not None:
            literal.append(GradedPolynomial(total, {var: 1, emb: -root}))
        else:
            literal = None
    return JPData(
        poly,
        total,
        weight,
        tuple(lam_sq),
        tuple(lam),
        tuple(resc),
        tuple(literal) if literal is not None else None,
    )


def _sqrt_coeff_sq(poly: PositiveRegularPoly, beta: MultiIndex) -> Fraction:
    """Squared magnitude prod a^beta of the comparison map on Z^beta."""
    acc = Fraction(1)
    for i, a in enumerate(poly.linear):
        if beta[i]:
            acc *= a ** beta[i]
    for j, (a, _) in enumerate(poly.higher):
        e = beta[poly.m + j]
        if e:
            acc *= a**e
    return acc


def _sigma(poly: PositiveRegularPoly, beta: MultiIndex) -> MultiIndex:
    """Image exponent: higher variables expand to their exponent patterns."""
    out = list(beta[: poly.m])
    for j, (_, alpha) in enumerate(poly.higher):
        e = beta[poly.m + j]
        if e:
            for t, at in enumerate(alpha):
                out[t] += e * at
    return tuple(out)


def _da_weight(beta: MultiIndex) -> Fraction:
    import math

    return Fraction(
        math.prod(math.factorial(b) for b in beta), math.factorial(sum(beta))
    )


@dataclass
class XpLevel:
    """One weighted level of the comparison map in orthonormal coordinates."""

    ell: int
    domain: list[MultiIndex]
    images: list[MultiIndex]
    entry_sq: list[Fraction]
    singular_sq: list[Fraction]
    singular_values: list[float]
    rank: int

    @property
    def kernel_dim(self) -> int:
        return len(self.domain) - self.rank


def xp_blocks(poly: PositiveRegularPoly, ell_max: int) -> list[XpLevel]:
    """Per-weighted-level matrices of the comparison map.

    Each domain monomial maps to a single image monomial, so the squared
    singular values are the per-image column sums of the squared entries --
    exact rationals; the float tier only takes their square roots.
    """
    data = jp_data(poly)
    table = DeltaTable(poly)
    table.ensure(ell_max)
    out = []
    for ell in range(ell_max + 1):
        domain = enumerate_weighted_level(data.total_vars, data.weight, ell)
        images = []
        entry_sq = []
        col_sums: dict[MultiIndex, Fraction] = {}
        for beta in domain:
            gamma = _sigma(poly, beta)
            csq = _sqrt_coeff_sq(poly, beta)
            if csq:
                esq = csq / (_da_weight(beta) * table.delta(gamma))
                col_sums[gamma] = col_sums.get(gamma, Fraction(0)) + esq
            else:
                esq = Fraction(0)
            images.append(gamma)
            entry_sq.append(esq)
        targets = sorted(col_sums, key=grlex_key)
        singular_sq = [col_sums[g] for g in targets]
        svals = sorted((float(s) ** 0.5 for s in singular_sq), reverse=True)
        svals += [0.0] * (len(domain) - len(svals))
        out.append(
            XpLevel(ell, domain, images, entry_sq, singular_sq, svals, len(targets))
        )
    return out


@dataclass
class KernelLevel:
    ell: int
    dim_kernel: int
    dim_ideal: int
    equal: bool
    containment_ok: bool
    witness: str | None

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ell,
            "dim_kernel": self.dim_kernel,
            "dim_ideal": self.dim_ideal,
            "equal": self.equal,
            "containment_ok": self.containment_ok,
            "witness": self.witness,
        }


def kernel_vs_ideal(
    poly: PositiveRegularPoly,
    ell_max: int,
    data: JPData | None = None,
) -> list[KernelLevel]:
    """Compare ker(comparison map) with the ideal level by weighted level.

    Kernel dimension: exact, as (level dimension) - (number of distinct image
    monomials hit with a nonzero coefficient).  Ideal dimension: exact row
    reduction of the rescaled generators.  Containment of the ideal level in
    the kernel is verified element-wise on squared coefficient data: each
    spanning element Z^beta Q_j maps both its terms to the same image
    monomial, and membership says the squared magnitudes cancel.
    """
    if data is None:
        data = jp_data(poly)
    ideal = data.rescaled_ideal()
    levels = xp_blocks(poly, ell_max)
    m = poly.m
    out = []
    for ell in range(ell_max + 1):
        xl = levels[ell]
        dim_ker = xl.kernel_dim
        dim_ideal = ideal_level_dimension(ideal, ell)
        ok = True
        witness = None
        for j, (_, alpha) in enumerate(poly.higher):
            wgen = data.weight[m + j]
            rem = ell - wgen
            if rem < 0:
                continue
            for beta in enumerate_weighted_level(data.total_vars, data.weight, rem):
                b1 = add_index(beta, unit_index(data.total_vars, m + j))
                b2 = add_index(beta, _embed(alpha, data.total_vars))
                t1, t2 = _sigma(poly, b1), _sigma(poly, b2)
                c1 = _sqrt_coeff_sq(poly, b1)
                c2 = data.lambda_sq[j] * _sqrt_coeff_sq(poly, b2)
                if t1 != t2 or c1 != c2:
                    ok = False
                    witness = (
                        f"Z^{list(beta)} * Q_{m + j + 1}: targets {t1} vs {t2}, "
                        f"squared coefficients {c1} vs {c2}"
                    )
                    break
            if not ok:
                break
        out.append(KernelLevel(ell, dim_ker, dim_ideal, dim_ker == dim_ideal, ok, witness))
    return out


@dataclass
class ModuleMapCheck:
    passed: bool
    witness: str | None


def xp_module_map_check(poly: PositiveRegularPoly, ell_max: int) -> ModuleMapCheck:
    """Verify the comparison map intertwines multiplication, exactly.

    For every variable Z_i and every domain monomial, the image of Z_i Z^beta
    must equal (image of Z_i) * (image of Z^beta) both in target exponent and
    in squared coefficient.
    """
    data = jp_data(poly)
    total = data.total_vars
    for i in range(total):
        wi = data.weight[i]
        gen_sigma = _sigma(poly, unit_index(total, i))
        gen_sq = _sqrt_coeff_sq(poly, unit_index(total, i))
        for ell in range(ell_max - wi + 1):
            for beta in enumerate_weighted_level(total, data.weight, ell):
                lifted = add_index(beta, unit_index(total, i))
                lhs = (_sigma(poly, lifted), _sqrt_coeff_sq(poly, lifted))
                rhs = (
                    add_index(_sigma(poly, beta), gen_sigma),
                    _sqrt_coeff_sq(poly, beta) * gen_sq,
                )
                if lhs != rhs:
                    return ModuleMapCheck(
                        False,
                        f"Z{i + 1} * Z^{list(beta)}: {lhs} vs {rhs}",
                    )
    return ModuleMapCheck(True, None)
