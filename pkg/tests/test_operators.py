from fractions import Fraction

import numpy as np
import pytest

import wshm.exact_linalg as ela
from wshm.algebra import G_ZERO, GradedPolynomial, enumerate_level, level_dimension
from wshm.errors import ModeError, WindowError, WshmError
from wshm.ideals import GradedIdeal
from wshm.operators import (
    adjoint_blocks,
    block_shift_data,
    codefect_blocks,
    commutator_blocks,
    compose,
    defect_blocks,
    full_realization,
    identity_blocks,
    mult_blocks,
    op_add,
    op_sub,
    pn_split,
    quotient_realization,
    schatten_partial,
)
from wshm.parsing import parse_polynomial
from wshm.spaces import builtin_space


def z(i, m=2):
    return GradedPolynomial.variable(m, i)


def exact_inner(space, u, v, level_monos):
    """<u, v> in coordinates, the defining sesquilinear form."""
    acc = G_ZERO
    for g, mono in enumerate(level_monos):
        acc = acc + u[g] * v[g].conjugate() * space.weight(mono)
    return acc


# -- realizations ----------------------------------------------------------


def test_full_realization_dims():
    da = builtin_space("da", 2)
    r = full_realization(da, 6)
    for k in range(7):
        assert r.comp_dim(k) == level_dimension(2, k)
    assert r.comp_dim(-1) == 0
    with pytest.raises(WindowError):
        r.comp_dim(7)


def test_quotient_realization_examples():
    hb = builtin_space("hardy-ball", 2)
    zero = quotient_realization(hb, GradedIdeal(2, []), 5)
    for k in range(6):
        assert zero.comp_dim(k) == level_dimension(2, k)

    lin = quotient_realization(hb, GradedIdeal(2, [z(0) + z(1)]), 8)
    for k in range(9):
        assert lin.comp_dim(k) == 1

    msq = GradedIdeal(2, [z(0) * z(0), z(0) * z(1), z(1) * z(1)])
    q = quotient_realization(hb, msq, 6)
    assert [q.comp_dim(k) for k in range(5)] == [1, 2, 0, 0, 0]


def test_realization_dim_split_and_gram():
    hb = builtin_space("hardy-ball", 2)
    ideal = GradedIdeal(2, [z(0) * z(0) - z(1) * z(1)])
    r = quotient_realization(hb, ideal, 7)
    for k in range(8):
        assert r.ideal_dim(k) + r.comp_dim(k) == level_dimension(2, k)
        lv = r.level(k)
        if lv.gram is not None:
            n = len(lv.gram)
            for s in range(n):
                for t in range(n):
                    assert lv.gram[s][t] == lv.gram[t][s].conjugate()
            # positive definite: float Cholesky succeeds
            np.linalg.cholesky(ela.to_complex_array(lv.gram))
        # complement orthogonal to the ideal rows, exactly
        monos = lv.monomials
        for w in lv.comp_rows:
            for u_row in lv.ideal_rows:
                u = [G_ZERO] * len(monos)
                for c, val in u_row.items():
                    u[c] = val
                assert not exact_inner(hb, w, u, monos)


def test_realization_requires_plain_mode():
    hb = builtin_space("hardy-ball", 2)
    quasi = GradedIdeal(2, [parse_polynomial("z2 - z1^2", 2)], weight=(1, 2))
    with pytest.raises(ModeError):
        quotient_realization(hb, quasi, 4)


# -- multiplication blocks ---------------------------------------------------


def test_mult_blocks_da_normalized_entry():
    da = builtin_space("da", 2)
    r = full_realization(da, 4)
    op = mult_blocks(r, z(1), 3)
    onb = op.onb_block(1)
    src = enumerate_level(2, 1).index((1, 0))
    tgt = enumerate_level(2, 2).index((1, 1))
    assert abs(abs(onb[tgt, src]) ** 2 - 0.5) < 1e-13


def test_mult_blocks_polydisk_unit_entries():
    pd = builtin_space("polydisk-hardy", 2)
    r = full_realization(pd, 4)
    op = mult_blocks(r, z(0), 3)
    for k in range(4):
        block = op.block(k)
        entries = {str(x) for row in block for x in row}
        assert entries <= {"0", "1"}
        assert sum(1 for row in block for x in row if x) == level_dimension(2, k)


def test_mult_blocks_identity_multiplier():
    da = builtin_space("da", 2)
    r = full_realization(da, 3)
    op = mult_blocks(r, GradedPolynomial.constant(2, 1), 3)
    for k in range(4):
        assert op.block(k) == ela.identity(level_dimension(2, k))


def test_mult_blocks_errors():
    da = builtin_space("da", 2)
    r = full_realization(da, 3)
    with pytest.raises(ModeError):
        mult_blocks(r, z(0) + z(0) * z(0), 2)
    with pytest.raises(WindowError):
        mult_blocks(r, z(0), 3)  # needs level 4


# -- adjoints ---------------------------------------------------------------


def test_adjoint_full_space_formula():
    bb = builtin_space("bergman-ball", 2)
    r = full_realization(bb, 5)
    op = mult_blocks(r, z(0), 4)
    adj = adjoint_blocks(op)
    for j in range(1, 5):
        block = adj.block(j)  # level j -> j-1
        src_level = enumerate_level(2, j)
        tgt_level = enumerate_level(2, j - 1)
        for col, alpha in enumerate(src_level):
            for row, beta in enumerate(tgt_level):
                expected = G_ZERO
                if alpha[0] >= 1 and tuple(a - b for a, b in zip(alpha, (1, 0))) == beta:
                    expected = ela.G_ONE * bb.shift_ratio(beta, 0)
                assert block[row][col] == expected
    # adjoint kills the constants
    assert adj.block(0) == []


def test_adjoint_of_identity():
    da = builtin_space("da", 2)
    r = full_realization(da, 3)
    ident = identity_blocks(r, 3)
    adj = adjoint_blocks(ident)
    for k in range(4):
        assert adj.block(k) == ela.identity(level_dimension(2, k))


def test_adjoint_pairing_exact_on_quotient():
    hb = builtin_space("hardy-ball", 2)
    ideal = GradedIdeal(2, [z(0) * z(0) - z(1) * z(1)])
    r = quotient_realization(hb, ideal, 7)
    op = mult_blocks(r, z(0), 5)
    adj = adjoint_blocks(op)
    # <B u, v>_{k+1} = <u, B* v>_k holds exactly in Gram form:
    # G_{k+1} B == (G_k B*)^dagger
    for k in range(5):
        lhs = r.gram_apply(k + 1, op.block(k))
        rhs = ela.conj_transpose(
            r.gram_apply(k, adj.block(k + 1)), ncols=r.comp_dim(k + 1)
        )
        assert lhs == rhs


# -- commutators -------------------------------------------------------------


def test_commutator_unilateral_shift():
    disk = builtin_space("polydisk-hardy", 1)
    r = full_realization(disk, 12)
    comm = commutator_blocks(r, z(0, 1), z(0, 1), 11)
    assert [[str(x) for x in row] for row in comm.block(0)] == [["1"]]
    for k in range(1, 11):
        assert all(not x for row in comm.block(k) for x in row)


def test_commutator_scaled_polydisk_constant_half():
    pd = builtin_space("polydisk-hardy", 2, {"scale2": Fraction(1, 2)})
    r = full_realization(pd, 14)
    comm = commutator_blocks(r, z(0), z(0), 13)
    for k in range(13):
        t = comm.trace(k)
        assert t.re == Fraction(1, 2) and not t.im
        assert abs(comm.norm(k) - 0.5) < 1e-12


def test_commutator_hardy_norms_decreasing():
    hb = builtin_space("hardy-ball", 2)
    r = full_realization(hb, 32)
    comm = commutator_blocks(r, z(0), z(0), 31)
    norms = [comm.norm(k) for k in range(31)]
    assert all(norms[k + 1] < norms[k] for k in range(30))
    assert norms[30] < 0.04  # 1/(k+2) at k=30


def test_commutator_hermitian_when_f_equals_g():
    da = builtin_space("da", 2)
    r = full_realization(da, 8)
    comm = commutator_blocks(r, z(0), z(0), 7)
    for k in range(7):
        b = comm.block(k)
        assert b == ela.conj_transpose(b, ncols=len(b))


def test_commutator_adjoint_symmetry():
    # C(f,g)^* = C(g,f) blockwise, via the weighted adjoint
    da = builtin_space("da", 2)
    r = full_realization(da, 8)
    f, g = z(0), z(1)
    cfg = commutator_blocks(r, f, g, 7)
    cgf = commutator_blocks(r, g, f, 7)
    adj = adjoint_blocks(cfg)
    for k in range(6):
        assert adj.block(k) == cgf.block(k)


def test_commutator_mixed_degrees():
    # f = z1^2, g = z2: degree shift +1, window K - max(2, 1)
    da = builtin_space("da", 2)
    r = full_realization(da, 10)
    f = z(0) * z(0)
    comm = commutator_blocks(r, f, z(1), 8)
    assert comm.shift == 1 and comm.k_valid == 6
    for k in range(7):
        nr, nc = comm.block_shape(k)
        assert nr == level_dimension(2, k + 1) and nc == level_dimension(2, k)
        assert len(comm.block(k)) == nr
    # the adjoint symmetry survives the degree shift: C(f,g)^* = C(g,f)
    cgf = commutator_blocks(r, z(1), f, 8)
    adj = adjoint_blocks(comm)
    for k in range(6):
        assert adj.block(k) == cgf.block(k)


def test_commutator_window_semantics():
    da = builtin_space("da", 2)
    r = full_realization(da, 6)
    with pytest.raises(WindowError):
        commutator_blocks(r, z(0), z(0), 6)  # needs level 7
    comm = commutator_blocks(r, z(0), z(0), 5)
    assert comm.k_valid == 4
    with pytest.raises(WindowError):
        comm.block(5)


def test_defect_identity_blockwise():
    # (I - sum M M*) - (I - sum M* M) = sum [M*, M], exactly per block
    da = builtin_space("da", 2)
    r = full_realization(da, 9)
    K = 7
    dd = defect_blocks(r, K)
    cd = codefect_blocks(r, K)
    total = None
    for i in range(2):
        ci = commutator_blocks(r, z(i), z(i), K + 1)
        total = ci if total is None else op_add(total, ci)
    for k in range(K):
        assert ela.mat_sub(cd.block(k), dd.block(k)) == total.block(k)


def test_defect_blocks_match_diagonal():
    da = builtin_space("da", 2)
    r = full_realization(da, 7)
    dd = defect_blocks(r, 6)
    for k in range(7):
        block = dd.block(k)
        for j, alpha in enumerate(enumerate_level(2, k)):
            expected = da.spherical_defect(alpha)
            for i in range(len(block)):
                assert block[i][j] == (ela.G_ONE * expected if i == j else G_ZERO)


def test_quotient_compressions_commute():
    hb = builtin_space("hardy-ball", 2)
    ideal = GradedIdeal(2, [z(0) + z(1)])
    r = quotient_realization(hb, ideal, 9)
    m1 = mult_blocks(r, z(0), 7)
    m2 = mult_blocks(r, z(1), 7)
    ab = compose(m1, m2)
    ba = compose(m2, m1)
    for k in range(6):
        assert ab.block(k) == ba.block(k)


# -- block shift data ---------------------------------------------------------


def test_block_shift_data_full_one_variable():
    disk = builtin_space("polydisk-hardy", 1)
    r = full_realization(disk, 6)
    for k in range(5):
        a = block_shift_data(r, 0, k)
        assert a == [[ela.G_ONE]]


def test_block_shift_data_linear_ideal_one_dimensional():
    hb = builtin_space("hardy-ball", 2)
    r = quotient_realization(hb, GradedIdeal(2, [z(0) + z(1)]), 8)
    for k in range(7):
        a = block_shift_data(r, 0, k)
        assert len(a) == 1 and len(a[0]) == 1
        assert a == mult_blocks(r, z(0), k).block(k)


def test_block_shift_data_z1_ideal_gives_z2_shift():
    hb = builtin_space("hardy-ball", 2)
    r = quotient_realization(hb, GradedIdeal(2, [z(0)]), 8)
    op2 = mult_blocks(r, z(1), 6)
    for k in range(6):
        a1 = block_shift_data(r, 0, k)
        assert all(not x for row in a1 for x in row)
        # modulus^2 of the z2 block equals the one-variable hardy ratio
        onb = op2.onb_block(k)
        ratio = hb.shift_ratio((0, k), 1)
        assert abs(abs(onb[0, 0]) ** 2 - float(ratio)) < 1e-13


# -- pn split -----------------------------------------------------------------


def test_pn_split_examples():
    p, n = pn_split(np.diag([0.5, -0.25]).astype(complex))
    assert np.allclose(p, np.diag([0.5, 0.0]))
    assert np.allclose(n, np.diag([0.0, 0.25]))
    pos = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
    p2, n2 = pn_split(pos)
    assert np.allclose(p2, pos) and np.allclose(n2, 0.0)


def test_pn_split_invariants():
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        h = (a + a.conj().T) / 2
        p, n = pn_split(h)
        scale = np.linalg.norm(h, 2)
        assert np.linalg.norm(p - n - h, 2) <= 1e-9 * max(scale, 1.0)
        assert np.linalg.eigvalsh(p).min() >= -1e-9
        assert np.linalg.eigvalsh(n).min() >= -1e-9
        assert np.linalg.norm(p @ n, 2) <= 1e-8 * max(scale, 1.0) ** 2


def test_pn_split_rejects_non_hermitian():
    with pytest.raises(WshmError):
        pn_split(np.array([[0.0, 1.0], [0.0, 0.0]]))


# -- schatten -----------------------------------------------------------------


def test_schatten_da_defect_p1_diverges_linearly():
    da = builtin_space("da", 2)
    r = full_realization(da, 21)
    dd = defect_blocks(r, 20)
    sp = schatten_partial(dd, 1, 20)
    assert abs(sp.total - 21.0) < 1e-9  # each level contributes exactly 1


def test_schatten_da_defect_p3_cauchy():
    # level terms are (k+1)^{-2}; the tail beyond K is tiny
    da = builtin_space("da", 2)
    r = full_realization(da, 41)
    dd = defect_blocks(r, 40)
    sp = schatten_partial(dd, 3, 40)
    for k in range(41):
        assert abs(sp.terms[k] - (k + 1) ** (-2.0)) < 1e-10
    assert sp.partial_sums[40] - sp.partial_sums[20] < 0.025


def test_schatten_zero_operator():
    hb = builtin_space("hardy-ball", 2)
    r = full_realization(hb, 6)
    dd = defect_blocks(r, 5)  # hardy defect is identically zero
    sp = schatten_partial(dd, 2, 5)
    assert sp.total == 0.0


def test_schatten_window_and_exponent_errors():
    da = builtin_space("da", 2)
    r = full_realization(da, 5)
    dd = defect_blocks(r, 4)
    with pytest.raises(WindowError):
        schatten_partial(dd, 2, 5)
    with pytest.raises(WshmError):
        schatten_partial(dd, 0.5, 3)


def test_compose_window_shrinks():
    da = builtin_space("da", 2)
    r = full_realization(da, 6)
    m1 = mult_blocks(r, z(0), 5)
    sq = compose(m1, m1)
    assert sq.shift == 2 and sq.k_valid == 4
    assert op_sub(sq, sq).block(3) == ela.zeros(level_dimension(2, 5), level_dimension(2, 3))


def test_block_exports():
    from wshm.operators import export_block_csv, export_block_json

    da = builtin_space("da", 2)
    r = full_realization(da, 4)
    comm = commutator_blocks(r, z(0), z(0), 3)
    doc = export_block_json(comm, 1)
    assert doc["shape"] == [2, 2] and doc["shift"] == 0
    flat = [x for row in doc["entries"] for x in row]
    assert all(isinstance(x, str) for x in flat)

    op = mult_blocks(r, parse_polynomial("z1 + (1/2)i*z2", 2), 3)
    doc2 = export_block_json(op, 1)
    joined = " ".join(x for row in doc2["entries"] for x in row)
    assert " i" in joined  # complex exact entries rendered as 'a/b+c/d i'
    csv = export_block_csv(op, 1)
    assert ";" in csv
