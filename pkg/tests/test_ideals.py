from fractions import Fraction

import numpy as np
import pytest

from wshm.algebra import G_I, GradedPolynomial, enumerate_level, level_dimension
from wshm.errors import ModeError, WshmError
from wshm.ideals import (
    GradedIdeal,
    graded_basis,
    hilbert_function,
    hilbert_samuel_fit,
    ideal_level_dimension,
    reduce_polynomial,
    residue_decompose,
    weighted_graded_basis,
)
from wshm.parsing import parse_polynomial


def z(i, m=2):
    return GradedPolynomial.variable(m, i)


def span_matrix(ideal, k):
    """Float snapshot of the level-k spanning set (for the rank cross-check)."""
    monomials = enumerate_level(ideal.m, k)
    col = {a: j for j, a in enumerate(monomials)}
    rows = []
    for g in ideal.generators:
        d = g.degree
        if d > k:
            continue
        for beta in enumerate_level(ideal.m, k - d):
            shifted = g.times_monomial(beta)
            row = np.zeros(len(monomials), dtype=complex)
            for a, c in shifted.terms():
                row[col[a]] = complex(c)
            rows.append(row)
    return np.array(rows) if rows else np.zeros((0, len(monomials)))


def test_graded_basis_examples():
    b = graded_basis(GradedIdeal(2, [z(0)]), 2)
    assert {str(p) for p in b} == {"z1^2", "z1*z2"}
    b2 = graded_basis(GradedIdeal(2, [z(0) + z(1)]), 1)
    assert [str(p) for p in b2] == ["z1 + z2"]
    msq = GradedIdeal(2, [z(0) * z(0), z(0) * z(1), z(1) * z(1)])
    assert len(graded_basis(msq, 3)) == 4 == level_dimension(2, 3)


def test_graded_basis_mode_error():
    with pytest.raises(ModeError):
        GradedIdeal(2, [z(0) + z(1) * z(1)])


def test_graded_basis_deterministic_and_span_closed():
    ideal = GradedIdeal(2, [z(0) * z(0) - z(0) * z(1), z(1) * z(1)])
    for k in range(2, 8):
        b1 = graded_basis(ideal, k)
        assert b1 == graded_basis(ideal, k)
        for p in b1:
            for i in range(2):
                assert reduce_polynomial(ideal, z(i) * p).is_zero


def test_exact_rank_agrees_with_float_rank_oracle():
    ideals = [
        GradedIdeal(2, [z(0) + z(1)]),
        GradedIdeal(2, [z(0) * z(0), z(0) * z(1), z(1) * z(1)]),
        GradedIdeal(2, [z(0) * z(0) - z(1) * z(1), z(0) * z(1)]),
    ]
    for ideal in ideals:
        for k in range(7):
            m = span_matrix(ideal, k)
            oracle = np.linalg.matrix_rank(m) if m.size else 0
            assert ideal_level_dimension(ideal, k) == oracle


def test_hilbert_function_examples():
    for alpha in (1, G_I * 2, GradedPolynomial.constant(2, Fraction(-3, 7)).coefficient((0, 0))):
        ideal = GradedIdeal(2, [z(0) + z(1).scale(alpha)])
        for k in range(30):
            assert hilbert_function(ideal, k) == 1
    zero = GradedIdeal(2, [])
    for k in range(8):
        assert hilbert_function(zero, k) == k + 1
    msq = GradedIdeal(2, [z(0) * z(0), z(0) * z(1), z(1) * z(1)])
    assert [hilbert_function(msq, k) for k in range(5)] == [1, 2, 0, 0, 0]


def test_hilbert_dimension_identity():
    ideal = GradedIdeal(2, [z(0) * z(0) - z(1) * z(1)])
    for k in range(10):
        assert ideal_level_dimension(ideal, k) + hilbert_function(ideal, k) == level_dimension(2, k)


def test_hilbert_samuel_constant_one():
    for alpha in (1, G_I * 2, Fraction(-3, 7)):
        ideal = GradedIdeal(2, [z(0) + z(1).scale(alpha)])
        data = hilbert_samuel_fit(ideal, 12)
        assert data.stabilized and data.coefficients == (Fraction(1),)
        assert data.stabilization_degree <= 1
        assert data.bounded_dimension == 1


def test_hilbert_samuel_zero_ideal_linear():
    data = hilbert_samuel_fit(GradedIdeal(2, []), 11)
    assert data.stabilized and data.coefficients == (Fraction(1), Fraction(1))
    assert data.degree == 1 and data.bounded_dimension is None


def test_hilbert_samuel_z1_squared():
    data = hilbert_samuel_fit(GradedIdeal(2, [z(0) * z(0)]), 13)
    assert data.stabilized and data.coefficients == (Fraction(2),)
    assert data.stabilization_degree == 1
    # dim I_k = k-1 for k >= 2 (frozen from direct monomial count)
    assert [r[1] for r in data.table[:6]] == [0, 0, 1, 2, 3, 4]


def test_hilbert_samuel_window_precondition():
    with pytest.raises(WshmError):
        hilbert_samuel_fit(GradedIdeal(2, [z(0) * z(0)]), 8)


def test_hilbert_samuel_not_stabilized_is_reported():
    # <z1^6, z2^6>: dim S_k^perp is 11-k on 6 <= k <= 10, then 0.  At
    # k_max=16 the transient overlaps the confirmation window, so the
    # double-window check must refuse the fit rather than extrapolate.
    gens = [parse_polynomial("z1^6", 2), parse_polynomial("z2^6", 2)]
    ideal = GradedIdeal(2, gens)
    data = hilbert_samuel_fit(ideal, 16)
    assert not data.stabilized and data.coefficients is None
    deeper = hilbert_samuel_fit(ideal, 21)
    assert deeper.stabilized and deeper.coefficients == (Fraction(0),)
    assert deeper.stabilization_degree == 11


def test_residue_decompose_single_variable():
    g = parse_polynomial("z1^2", 1)
    ideal = GradedIdeal(1, [g], weight=(2,))
    dec = residue_decompose(ideal, 12)
    assert all(lv.defect == 0 for lv in dec.levels)
    # weighted level 2t holds z^t; in the ideal iff t >= 2
    for lv in dec.levels:
        if lv.ell % 2 == 0 and lv.ell >= 4:
            assert lv.dim_total == 1
        else:
            assert lv.dim_total == 0


def test_residue_decompose_zero_ideal():
    ideal = GradedIdeal(2, [], weight=(1, 2))
    dec = residue_decompose(ideal, 6)
    assert all(lv.dim_total == 0 and lv.defect == 0 for lv in dec.levels)


def test_residue_decompose_straddling_generator():
    g = parse_polynomial("z2 - z1^2", 2)
    ideal = GradedIdeal(2, [g], weight=(1, 2))
    dec = residue_decompose(ideal, 8)
    lv2 = dec.levels[2]
    assert lv2.dim_total == 1
    assert all(d == 0 for d in lv2.class_dims.values())
    assert lv2.defect == 1
    assert all(lv.defect >= 0 for lv in dec.levels)


def test_residue_decompose_mode_error():
    ideal = GradedIdeal(2, [z(0) + z(1)])
    with pytest.raises(ModeError):
        residue_decompose(ideal, 3)
    with pytest.raises(ModeError):
        GradedIdeal(2, [parse_polynomial("z2 - z1^2", 2)], weight=(1, 3))


def test_weighted_graded_basis_examples():
    g = parse_polynomial("z2 - z1^2", 2)
    ideal = GradedIdeal(2, [g], weight=(1, 2))
    b3 = weighted_graded_basis(ideal, 3)
    assert len(b3) == 1
    expected = parse_polynomial("z1*z2 - z1^3", 2)
    # same one-dimensional span
    assert b3[0].scale(-1) == expected or b3[0] == expected

    assert weighted_graded_basis(ideal, 1) == []

    lin = GradedIdeal(2, [z(0) + z(1)], weight=(1, 1))
    plain = GradedIdeal(2, [z(0) + z(1)])
    for k in range(6):
        assert weighted_graded_basis(lin, k) == graded_basis(plain, k)


def test_weighted_graded_basis_mode_error():
    with pytest.raises(ModeError):
        weighted_graded_basis(GradedIdeal(2, [z(0)]), 2)
    with pytest.raises(ModeError):
        graded_basis(GradedIdeal(2, [z(0)], weight=(1, 2)), 2)
