"""Acceptance suite: one test per criterion, one printed pass/fail line each.

All assertions are exact; no tolerances exist anywhere (exact arithmetic).
Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import random
import time
from contextlib import contextmanager

import pytest

from blocklin import (
    GF,
    LOWER,
    QQ,
    QQ_I,
    QUAT,
    UPPER,
    ConjugationKind,
    GramMatrix,
    OpCounter,
    PivotBlockSingular,
    RandomnessExhausted,
    RatFun,
    adjoint,
    auto_invert,
    circ_conjugate,
    from_dense,
    gauss_jordan_inverse,
    hermitian_invert,
    identity,
    invert_gram_gv,
    invert_gram_transpose,
    is_invertible,
    lift_to_ratfun,
    lu_decompose,
    mul,
    randomized_lu,
    schur_invert,
    to_dense,
    transpose,
    tri_invert,
    tri_mul,
)
from blocklin.complexity import (
    closed_form_T_inv,
    closed_form_T_lu,
    closed_form_T_triinv,
    closed_form_T_trimul,
    recurrence_T_inv,
    recurrence_T_lu,
    verify_counts,
)
from blocklin.dense import dense_determinant
from blocklin.sampling import (
    random_all_blocks_singular,
    random_dense,
    random_matrix,
    random_triangular,
)

from conftest import stable_seed, witness_all_blocks_singular


@contextmanager
def criterion(number, name):
    try:
        yield
    except BaseException:
        print(f"criterion {number:2d} ({name}): FAIL")
        raise
    print(f"criterion {number:2d} ({name}): PASS")


def invertible_dense(ring, n, rng):
    while True:
        dense = random_dense(ring, n, rng)
        if not dense_determinant(dense).is_zero():
            return dense


def assert_exact_inverse(m, inv):
    eye = identity(m.depth, m.ring)
    assert mul(m, inv) == eye
    assert mul(inv, m) == eye


def test_criterion_01_inversion_matches_dense_oracle():
    sizes = {2: 45, 4: 30, 8: 20, 16: 5}
    rings = [QQ, GF(7), GF(2), QQ_I]
    start = time.monotonic()
    with criterion(1, "inversion equals Gauss-Jordan oracle, 100 per ring"):
        for ring in rings:
            rng = random.Random(stable_seed("acceptance-1", ring.spec))
            for n, count in sizes.items():
                for _ in range(count):
                    dense = invertible_dense(ring, n, rng)
                    inv = auto_invert(from_dense(dense))
                    assert to_dense(inv) == gauss_jordan_inverse(dense)
        assert time.monotonic() - start < 60.0


def test_criterion_02_all_singular_blocks_stress():
    sizes = {4: 9, 8: 8, 16: 8}
    with criterion(2, "all-blocks-singular: transpose Gram succeeds, direct path fails"):
        rng = random.Random(0xB10C)
        for n, count in sizes.items():
            for _ in range(count):
                m = random_all_blocks_singular(QQ, n.bit_length() - 1, rng)
                inv = invert_gram_transpose(m)
                assert_exact_inverse(m, inv)
                with pytest.raises(PivotBlockSingular):
                    schur_invert(m)


def test_criterion_03_base_field_lift_end_to_end():
    sizes = {2: 10, 4: 10, 8: 5}
    with criterion(3, "K(t)-lift inversion exact with constant residues"):
        for field in (GF(2), GF(7)):
            rng = random.Random(stable_seed("acceptance-3", field.spec))
            for n, count in sizes.items():
                for _ in range(count):
                    dense = invertible_dense(field, n, rng)
                    m = from_dense(dense)
                    inv = invert_gram_gv(m)
                    assert to_dense(inv) == gauss_jordan_inverse(dense)
                    # pre-projection entries must already be degree-0
                    lifted = lift_to_ratfun(m)
                    conj = circ_conjugate(lifted)
                    gram = GramMatrix(mul(conj, lifted), ConjugationKind.CIRC)
                    pre = mul(hermitian_invert(gram), conj)
                    for row in to_dense(pre).rows:
                        for entry in row:
                            assert entry.den.degree() == 0
                            assert entry.num.degree() <= 0


def test_criterion_04_inversion_count_law():
    expected = {2: 22, 4: 204, 8: 1688}
    with criterion(4, "inversion counts match recurrence and closed form"):
        rng = random.Random(0xC0417)
        for n, value in expected.items():
            assert recurrence_T_inv(n) == value
            assert closed_form_T_inv(n) == value
            counter = OpCounter()
            invert_gram_transpose(from_dense(invertible_dense(QQ, n, rng)), counter)
            assert counter.muldiv == value


def test_criterion_05_triangular_product_count_law():
    expected = {2: 6, 4: 40, 8: 288, 16: 2176}
    with criterion(5, "triangular-general product counts (n^3+n^2)/2"):
        rng = random.Random(0xC0517)
        for n, value in expected.items():
            assert value == (n ** 3 + n ** 2) // 2
            assert closed_form_T_trimul(n) == value
            counter = OpCounter()
            depth = n.bit_length() - 1
            tri_mul(
                random_triangular(QQ, depth, rng, LOWER),
                random_matrix(QQ, depth, rng),
                "left",
                counter,
            )
            assert counter.muldiv == value


def test_criterion_06_factorization_count_recurrence():
    sizes = (2, 4, 8, 16)
    with criterion(6, "factorization counts satisfy the kernel recurrence"):
        rng = random.Random(0xC0617)

        def measured_kernel_costs(m):
            depth = m.bit_length() - 1
            c_inv, c_mul = OpCounter(), OpCounter()
            tri_invert(random_triangular(QQ, depth, rng, LOWER), c_inv)
            tri = OpCounter()
            tri_mul(
                random_triangular(QQ, depth, rng, UPPER),
                random_matrix(QQ, depth, rng),
                "right",
                tri,
            )
            mul(random_matrix(QQ, depth, rng), random_matrix(QQ, depth, rng), c_mul)
            return c_inv.muldiv, tri.muldiv, c_mul.muldiv

        leaf = OpCounter()
        lu_decompose(from_dense(invertible_dense(QQ, 1, rng)), leaf)
        predicted = {1: leaf.muldiv}
        for n in sizes:
            h = n // 2
            t_inv, t_tri, t_mul = measured_kernel_costs(h)
            predicted[n] = 2 * predicted[h] + 2 * t_inv + t_mul + 2 * t_tri
        frozen = {2: 5, 4: 38, 8: 260, 16: 1848}
        for n in sizes:
            counter = OpCounter()
            lu_decompose(from_dense(invertible_dense(QQ, n, rng)), counter)
            assert counter.muldiv == predicted[n] == frozen[n]
            assert counter.muldiv == recurrence_T_lu(n, leaf_cost=0)
        # the report prints the diverging closed-form and quadratic
        # triangular-inverse figures as an annotation, not a failure
        reports = verify_counts("lu", list(sizes))
        assert [r.closed_form for r in reports] == [
            closed_form_T_lu(n) for n in sizes
        ] == [7, 40, 244, 1648]
        for report in reports:
            assert report.match
            assert "documented mismatch" in report.note
            assert str(closed_form_T_triinv(report.n)) in report.note


def test_criterion_07_pluq_reconstruction_200_cases():
    plan = [
        (QQ, {1: 10, 2: 10, 3: 10, 4: 5, 5: 2}),
        (GF(7), {1: 15, 2: 15, 3: 10, 4: 8, 5: 2}),
        (GF(2), {1: 20, 2: 15, 3: 10}),
        (QQ_I, {1: 15, 2: 10, 3: 5}),
        (QUAT, {1: 10, 2: 10}),
        (RatFun(QQ), {1: 10, 2: 8}),
    ]
    assert sum(c for _, sizes in plan for c in sizes.values()) == 200
    with criterion(7, "PLUQ reconstruction on 200 matrices up to 32"):
        for ring, sizes in plan:
            rng = random.Random(stable_seed("acceptance-7", ring.spec))
            for depth, count in sizes.items():
                done = 0
                while done < count:
                    m = random_matrix(ring, depth, rng)
                    if ring.commutative:
                        if dense_determinant(to_dense(m)).is_zero():
                            continue
                    elif not is_invertible(m):
                        continue
                    try:
                        res = lu_decompose(m)
                    except RandomnessExhausted:
                        # needs the randomized fallback, which criterion 8
                        # exercises separately; this one tests the pivoted path
                        continue
                    assert res.reconstruct() == m
                    assert res.l.orientation == LOWER and res.l.unit_diagonal
                    assert res.u.orientation == UPPER
                    assert res.l.is_structurally_valid()
                    assert res.u.is_structurally_valid()
                    done += 1


def test_criterion_08_randomized_fallback():
    with criterion(8, "randomized factorization of all-singular-block inputs"):
        rng = random.Random(0xC0817)
        cases = [witness_all_blocks_singular()]
        for n, count in ((4, 5), (8, 5)):
            for _ in range(count):
                cases.append(random_all_blocks_singular(QQ, n.bit_length() - 1, rng))
        for m in cases:
            for seed in range(1, 9):
                low, up = randomized_lu(m, seed=seed, max_retries=8)
                assert mul(low.body, up.body) == m
                again = randomized_lu(m, seed=seed, max_retries=8)
                assert again[0].body == low.body and again[1].body == up.body


def test_criterion_09_gram_symmetries():
    with criterion(9, "conjugation symmetries hold entrywise, 100 per kind"):
        rng = random.Random(0xC0917)
        # transpose kind over the rationals
        for n, count in ((2, 50), (4, 30), (8, 20)):
            for _ in range(count):
                m = random_matrix(QQ, n.bit_length() - 1, rng)
                gram = to_dense(mul(transpose(m), m))
                for i in range(n):
                    for j in range(n):
                        assert gram.rows[j][i] == gram.rows[i][j]
        # involution kind over Gaussian rationals and quaternions
        for ring in (QQ_I, QUAT):
            for n, count in ((2, 30), (4, 20)):
                for _ in range(count):
                    m = random_matrix(ring, n.bit_length() - 1, rng)
                    gram = to_dense(mul(adjoint(m), m))
                    for i in range(n):
                        for j in range(n):
                            assert gram.rows[j][i] == gram.rows[i][j].star()
        # t-power kind over prime fields lifted into K(t)
        for field in (GF(2), GF(7)):
            ratfun = RatFun(field)
            for n, count in ((2, 25), (4, 15), (8, 10)):
                for _ in range(count):
                    m = lift_to_ratfun(random_matrix(field, n.bit_length() - 1, rng))
                    gram = to_dense(mul(circ_conjugate(m), m))
                    for i in range(n):
                        for j in range(i, n):
                            assert gram.rows[j][i] == ratfun.t_power(i - j) * gram.rows[i][j]


def test_criterion_10_noncommutative_inversion():
    with criterion(10, "quaternion inversion exact on both sides, 25 cases"):
        rng = random.Random(0xC1017)
        for n, count in ((2, 15), (4, 10)):
            done = 0
            while done < count:
                m = random_matrix(QUAT, n.bit_length() - 1, rng)
                if not is_invertible(m):
                    continue
                inv = auto_invert(m)
                assert_exact_inverse(m, inv)
                done += 1
