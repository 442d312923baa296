import random

import pytest

from blocklin import (
    GF,
    LOWER,
    QQ,
    QQ_I,
    QUAT,
    UPPER,
    AllBlocksSingular,
    BlockMatrix,
    DepthMismatch,
    OpCounter,
    PermutationTrace,
    PivotBlockSingular,
    RandomnessExhausted,
    RatFun,
    SingularDiagonal,
    SingularMatrix,
    TriangularMatrix,
    apply_permutation,
    block_pivot,
    from_dense,
    identity,
    ldu,
    lu_decompose,
    mul,
    randomized_lu,
    to_dense,
    tri_invert,
    tri_mul,
    zero_matrix,
)
from blocklin import lu as lu_mod
from blocklin.complexity import (
    recurrence_T_lu,
    recurrence_T_triinv,
    recurrence_T_trimul,
)
from blocklin.dense import dense_determinant, dense_mul
from blocklin.sampling import (
    random_all_blocks_singular,
    random_dense,
    random_matrix,
    random_triangular,
)

from conftest import grid, ring_mat, stable_seed, witness_all_blocks_singular


def random_invertible_block(ring, depth, rng):
    while True:
        dense = random_dense(ring, 1 << depth, rng)
        if not dense_determinant(dense).is_zero():
            return from_dense(dense)


# -- block_pivot -----------------------------------------------------------------


def test_block_pivot_keeps_invertible_leading_block():
    m = ring_mat(QQ, [[1, 2], [3, 4]])
    assert block_pivot(m) == (False, False, m)


def test_block_pivot_row_swap():
    m = ring_mat(QQ, [[0, 1], [1, 0]])
    assert block_pivot(m) == (True, False, identity(1, QQ))


def test_block_pivot_precedence_prefers_row_swap():
    # A singular; B, C, D all invertible: the row swap (C) wins
    m = ring_mat(QQ, [[0, 1], [1, 1]])
    swaps = block_pivot(m)[:2]
    assert swaps == (True, False)


def test_block_pivot_column_then_both():
    col = ring_mat(QQ, [[0, 1], [0, 1]])
    assert block_pivot(col)[:2] == (False, True)
    both = ring_mat(QQ, [[0, 0], [0, 1]])
    assert block_pivot(both)[:2] == (True, True)


def test_block_pivot_all_blocks_singular():
    with pytest.raises(AllBlocksSingular):
        block_pivot(witness_all_blocks_singular())


# -- tri_mul ----------------------------------------------------------------------


def test_tri_mul_example():
    lower = TriangularMatrix(ring_mat(QQ, [[1, 0], [2, 1]]), LOWER, True)
    g = ring_mat(QQ, [[1, 1], [1, 1]])
    assert grid(tri_mul(lower, g, "left")) == [["1", "1"], ["3", "3"]]


def test_tri_mul_identity_counts_six():
    eye = TriangularMatrix(identity(1, QQ), LOWER, True)
    g = ring_mat(QQ, [[5, 6], [7, 8]])
    counter = OpCounter()
    assert tri_mul(eye, g, "left", counter) == g
    assert counter.muldiv == 6


@pytest.mark.parametrize("n, expect", [(2, 6), (4, 40), (8, 288), (16, 2176)])
def test_tri_mul_count_law(n, expect, rng):
    assert recurrence_T_trimul(n) == expect == (n ** 3 + n ** 2) // 2
    tm = random_triangular(QQ, n.bit_length() - 1, rng, LOWER)
    g = random_matrix(QQ, n.bit_length() - 1, rng)
    counter = OpCounter()
    tri_mul(tm, g, "left", counter)
    assert counter.muldiv == expect


@pytest.mark.parametrize("orientation", [LOWER, UPPER])
@pytest.mark.parametrize("side", ["left", "right"])
def test_tri_mul_all_variants_match_general_product(orientation, side, rng):
    for depth in (1, 2, 3):
        tm = random_triangular(QQ, depth, rng, orientation)
        g = random_matrix(QQ, depth, rng)
        expected = mul(tm.body, g) if side == "left" else mul(g, tm.body)
        assert tri_mul(tm, g, side) == expected


def test_tri_mul_depth_mismatch():
    tm = TriangularMatrix(identity(1, QQ), LOWER, True)
    with pytest.raises(DepthMismatch):
        tri_mul(tm, identity(2, QQ), "left")


# -- tri_invert --------------------------------------------------------------------


def test_tri_invert_identity_and_unit_example():
    eye = TriangularMatrix(identity(2, QQ), LOWER, True)
    assert tri_invert(eye).body == identity(2, QQ)
    unit = TriangularMatrix(ring_mat(QQ, [[1, 0], [2, 1]]), LOWER, True)
    assert grid(tri_invert(unit).body) == [["1", "0"], ["-2", "1"]]


@pytest.mark.parametrize("n, expect", [(2, 4), (4, 20), (8, 120)])
def test_tri_invert_count_law(n, expect, rng):
    assert recurrence_T_triinv(n) == expect
    tm = random_triangular(QQ, n.bit_length() - 1, rng, LOWER)
    counter = OpCounter()
    inv = tri_invert(tm, counter)
    assert counter.muldiv == expect
    assert mul(tm.body, inv.body) == identity(tm.depth, QQ)


@pytest.mark.parametrize("orientation", [LOWER, UPPER])
def test_tri_invert_structure_and_round_trip(orientation, rng):
    for depth in (1, 2, 3):
        tm = random_triangular(QQ, depth, rng, orientation)
        inv = tri_invert(tm)
        assert inv.orientation == orientation
        assert inv.is_structurally_valid()
        assert mul(inv.body, tm.body) == identity(depth, QQ)


def test_tri_invert_singular_diagonal():
    tm = TriangularMatrix(ring_mat(QQ, [[1, 0], [2, 0]]), LOWER, False)
    with pytest.raises(SingularDiagonal) as info:
        tri_invert(tm)
    assert info.value.path == ("D",)


# -- ldu ----------------------------------------------------------------------------


def test_ldu_example():
    lb, db, ub = ldu(ring_mat(QQ, [[1, 2], [3, 4]]))
    assert grid(lb) == [["1", "0"], ["3", "1"]]
    assert grid(db) == [["1", "0"], ["0", "-2"]]
    assert grid(ub) == [["1", "2"], ["0", "1"]]


def test_ldu_diagonal_input():
    m = ring_mat(QQ, [[2, 0], [0, 3]])
    lb, db, ub = ldu(m)
    assert lb == identity(1, QQ) and ub == identity(1, QQ)
    assert db == m


def test_ldu_pivot_failure():
    with pytest.raises(PivotBlockSingular):
        ldu(ring_mat(QQ, [[0, 1], [1, 0]]))


def test_ldu_reconstruction(rng):
    for depth in (1, 2, 3):
        m = random_invertible_block(QQ, depth, rng)
        try:
            lb, db, ub = ldu(m)
        except PivotBlockSingular:
            continue
        assert mul(mul(lb, db), ub) == m


# -- permutation traces ----------------------------------------------------------


def test_apply_identity_trace(rng):
    m = random_matrix(QQ, 2, rng)
    assert apply_permutation(PermutationTrace.identity(2), m, "rows") == m


def test_single_swap_semantics(rng):
    m = random_matrix(QQ, 2, rng)
    swap = PermutationTrace(2, swap=True)
    swapped = apply_permutation(swap, m, "rows")
    assert swapped.a == m.c and swapped.b == m.d
    assert swapped.c == m.a and swapped.d == m.b
    # each recorded swap is an involution
    assert apply_permutation(swap, swapped, "rows") == m
    cols = apply_permutation(swap, m, "cols")
    assert cols.a == m.b and cols.c == m.d


def test_trace_vector_matches_application(rng):
    trace = PermutationTrace(
        2,
        swap=True,
        children=(PermutationTrace(1, swap=True), PermutationTrace(1)),
    )
    vec = trace.to_vector()
    m = random_matrix(QQ, 2, rng)
    dense = to_dense(m)
    permuted = to_dense(apply_permutation(trace, m, "rows"))
    for i in range(4):
        assert permuted.rows[i] == dense.rows[vec[i]]
    cols = to_dense(apply_permutation(trace, m, "cols"))
    for j in range(4):
        for i in range(4):
            assert cols.rows[i][j] == dense.rows[i][vec[j]]


def test_inverse_application_round_trip(rng):
    trace = PermutationTrace(
        2,
        swap=True,
        children=(PermutationTrace(1, swap=True), PermutationTrace(1, swap=True)),
    )
    m = random_matrix(QQ, 2, rng)
    for side in ("rows", "cols"):
        forward = apply_permutation(trace, m, side)
        assert apply_permutation(trace, forward, side, inverse=True) == m


def test_apply_depth_mismatch():
    with pytest.raises(DepthMismatch):
        apply_permutation(PermutationTrace.identity(1), identity(2, QQ), "rows")


# -- lu_decompose -----------------------------------------------------------------


def test_lu_example():
    res = lu_decompose(ring_mat(QQ, [[1, 2], [3, 4]]))
    assert res.p.is_identity and res.q.is_identity
    assert grid(res.l.body) == [["1", "0"], ["3", "1"]]
    assert grid(res.u.body) == [["1", "2"], ["0", "-2"]]


def test_lu_row_swap_example():
    res = lu_decompose(ring_mat(QQ, [[0, 1], [1, 0]]))
    assert res.l.body == identity(1, QQ)
    assert res.u.body == identity(1, QQ)
    assert res.p.to_vector() == [1, 0]
    assert res.q.is_identity


def test_lu_identity_any_depth():
    for depth in (1, 2, 3):
        res = lu_decompose(identity(depth, QQ))
        assert res.p.is_identity and res.q.is_identity
        assert res.l.body == identity(depth, QQ)
        assert res.u.body == identity(depth, QQ)


def test_lu_singular_input():
    with pytest.raises((SingularMatrix, RandomnessExhausted)):
        lu_decompose(ring_mat(QQ, [[1, 2], [2, 4]]))
    with pytest.raises(SingularMatrix):
        lu_decompose(zero_matrix(1, QQ))


@pytest.mark.parametrize(
    "ring, per_depth",
    [
        (QQ, {1: 40, 2: 30, 3: 20, 4: 10}),
        (GF(7), {1: 40, 2: 30, 3: 20, 4: 10}),
    ],
    ids=lambda v: getattr(v, "spec", "sizes"),
)
def test_lu_reconstruction_100_per_ring(ring, per_depth):
    rng = random.Random(stable_seed("lu-100", ring.spec))
    for depth, count in per_depth.items():
        for _ in range(count):
            m = random_invertible_block(ring, depth, rng)
            res = lu_decompose(m)
            assert res.reconstruct() == m
            assert res.l.unit_diagonal and res.l.orientation == LOWER
            assert res.u.orientation == UPPER
            assert res.l.is_structurally_valid()
            assert res.u.is_structurally_valid()


@pytest.mark.parametrize("ring", [QQ_I, QUAT, RatFun(GF(7))], ids=lambda r: r.spec)
def test_lu_reconstruction_other_rings(ring, rng):
    for depth in (1, 2):
        for _ in range(5):
            m = random_matrix(ring, depth, rng)
            try:
                res = lu_decompose(m)
            except (SingularMatrix, PivotBlockSingular, RandomnessExhausted):
                continue
            assert res.reconstruct() == m


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_lu_count_law(n, rng):
    m = random_invertible_block(QQ, n.bit_length() - 1, rng)
    counter = OpCounter()
    lu_decompose(m, counter)
    assert counter.muldiv == recurrence_T_lu(n, leaf_cost=0)


def test_lu_counts_unchanged_by_pivoting():
    plain = OpCounter()
    lu_decompose(ring_mat(QQ, [[1, 2], [3, 4]]), plain)
    swapped = OpCounter()
    lu_decompose(ring_mat(QQ, [[0, 1], [1, 2]]), swapped)
    assert plain.muldiv == swapped.muldiv


def test_permutation_vectors_reconstruct_dense(rng):
    m = random_invertible_block(QQ, 2, rng)
    res = lu_decompose(m)
    pvec, qvec = res.permutation_vectors()
    product = to_dense(mul(res.l.body, res.u.body))
    dense = to_dense(m)
    for i in range(4):
        for j in range(4):
            assert dense.rows[i][j] == product.rows[pvec[i]][qvec[j]]


# -- randomized_lu -----------------------------------------------------------------


def lu_able_matrix(ring, depth, rng):
    low = random_triangular(ring, depth, rng, LOWER, unit_diagonal=True)
    up = random_triangular(ring, depth, rng, UPPER)
    return mul(low.body, up.body)


def test_randomized_deterministic_and_exact(rng):
    m = lu_able_matrix(QQ, 2, rng)
    first = randomized_lu(m, seed=9)
    second = randomized_lu(m, seed=9)
    assert first[0].body == second[0].body and first[1].body == second[1].body
    low, up = first
    assert mul(low.body, up.body) == m
    assert low.unit_diagonal and low.is_structurally_valid()
    assert up.is_structurally_valid()
    other = randomized_lu(m, seed=10)
    assert mul(other[0].body, other[1].body) == m


def test_randomized_identity_with_stubbed_sampling(monkeypatch):
    def identity_preconditioner(ring, depth, orientation, rng, sample):
        return TriangularMatrix(identity(depth, ring), orientation, True)

    monkeypatch.setattr(lu_mod, "_random_unit_triangular", identity_preconditioner)
    eye = identity(2, QQ)
    low, up = randomized_lu(eye, seed=1)
    assert low.body == eye and up.body == eye


def test_randomized_gf2_lifts_through_ratfun(rng):
    m = lu_able_matrix(GF(2), 2, rng)
    low, up = randomized_lu(m, seed=4)
    assert low.body.ring.spec == "gf:2"
    assert mul(low.body, up.body) == m


def test_randomized_small_odd_prime_lift(rng):
    # p = 3 < 2 n^2 forces the polynomial sampling set as well
    m = lu_able_matrix(GF(3), 2, rng)
    low, up = randomized_lu(m, seed=2)
    assert low.body.ring.spec == "gf:3"
    assert mul(low.body, up.body) == m
    assert low.is_structurally_valid() and up.is_structurally_valid()


def test_randomized_zero_is_singular():
    with pytest.raises(SingularMatrix):
        randomized_lu(zero_matrix(1, QQ), seed=1)


def test_randomized_exhausts_on_singular_leading_minor():
    # unit-triangular preconditioning preserves every leading minor of the
    # input, so a singular leading half-block can never be repaired and no
    # permutation-free triangular factorization exists
    m4 = witness_all_blocks_singular()
    stats = {}
    with pytest.raises(RandomnessExhausted):
        randomized_lu(m4, seed=1, max_retries=8, stats=stats)
    assert stats["attempts"] == 8


def test_structural_zeros_hold_after_factor_products(rng):
    m = random_invertible_block(QQ, 3, rng)
    res = lu_decompose(m)
    dense_l = to_dense(res.l.body)
    dense_u = to_dense(res.u.body)
    n = dense_l.n
    for i in range(n):
        assert dense_l.rows[i][i] == QQ.one()
        for j in range(i + 1, n):
            assert dense_l.rows[i][j].is_zero()
            assert dense_u.rows[j][i].is_zero()
        assert not dense_u.rows[i][i].is_zero()
