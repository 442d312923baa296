"""Recursive block triangular decomposition.

The factorization produced here is M = P * L * U * Q with block-swap
permutations P and Q, unit-lower-triangular L, and upper-triangular U.
Nothing in this module reads or writes a matrix row: pivoting swaps whole
blocks, and the randomized fallback preconditions with unit triangular
matrices.

Triangular matrices carry structural zero blocks (the whole upper-right or
lower-left quadrant, recursively), so the specialized kernels
:func:`tri_mul` and :func:`tri_invert` cost measurably less than their
general counterparts; their exact operation counts are part of the tested
contract.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import ceil, log

from . import blockmat as bm
from .blockmat import BlockMatrix, OpCounter
from .errors import (
    AllBlocksSingular,
    DepthMismatch,
    PivotBlockSingular,
    RandomnessExhausted,
    SingularDiagonal,
    SingularMatrix,
)
from .inversion import auto_invert, is_invertible, project_to_base
from .rings import Polynomial, RatFun, ratfun_reduce

__all__ = [
    "LOWER",
    "UPPER",
    "TriangularMatrix",
    "PermutationTrace",
    "LUResult",
    "block_pivot",
    "tri_mul",
    "tri_invert",
    "ldu",
    "lu_decompose",
    "randomized_lu",
    "apply_permutation",
]

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class TriangularMatrix:
    """A block matrix tagged lower or upper, with structural zero blocks.

    For LOWER the top-right block is zero at every node, for UPPER the
    bottom-left.  ``unit_diagonal`` asserts every diagonal leaf equals 1.
    """

    body: BlockMatrix
    orientation: str
    unit_diagonal: bool = False

    @property
    def depth(self) -> int:
        return self.body.depth

    @property
    def dimension(self) -> int:
        return self.body.dimension

    def _split(self):
        body = self.body
        if self.orientation == LOWER:
            diag1 = TriangularMatrix(body.a, LOWER, self.unit_diagonal)
            diag2 = TriangularMatrix(body.d, LOWER, self.unit_diagonal)
            return diag1, diag2, body.c
        diag1 = TriangularMatrix(body.a, UPPER, self.unit_diagonal)
        diag2 = TriangularMatrix(body.d, UPPER, self.unit_diagonal)
        return diag1, diag2, body.b

    def is_structurally_valid(self) -> bool:
        """Structural zeros hold recursively; unit diagonal when claimed."""

        def zero(node):
            if node.is_leaf:
                return node.scalar.is_zero()
            return all(zero(child) for child in node.blocks)

        def walk(node):
            if node.is_leaf:
                if node.scalar.is_zero():
                    return False
                return not self.unit_diagonal or node.scalar == node.scalar.ring.one()
            off = node.b if self.orientation == LOWER else node.c
            return zero(off) and walk(node.a) and walk(node.d)

        return walk(self.body)


class PermutationTrace:
    """Recursive record of the block swaps applied at each quadtree node.

    The node swap exchanges the two half-size block rows (or columns); the
    two children record the permutations of the leading-block and
    Schur-complement subproblems.  Application order is children first,
    then the node swap, matching the product P = T_swap * diag(P_A, P_S).
    Every recorded swap is an involution.  ``children=None`` denotes an
    identity subtree.
    """

    __slots__ = ("depth", "swap", "children")

    def __init__(self, depth: int, swap: bool = False, children=None):
        if depth == 0 and (swap or children):
            raise ValueError("a 1x1 matrix admits no swaps")
        if children is not None:
            first, second = children
            if first.depth != depth - 1 or second.depth != depth - 1:
                raise DepthMismatch("trace children must have depth - 1")
        self.depth = depth
        self.swap = swap
        self.children = children

    @classmethod
    def identity(cls, depth: int) -> "PermutationTrace":
        return cls(depth)

    @property
    def is_identity(self) -> bool:
        if self.swap:
            return False
        if self.children is None:
            return True
        return self.children[0].is_identity and self.children[1].is_identity

    def to_vector(self) -> list[int]:
        """Source index per position: applying the trace to any matrix puts
        original row (or column) ``vec[i]`` at position ``i``."""
        if self.depth == 0:
            return [0]
        half = 1 << (self.depth - 1)
        if self.children is None:
            top = list(range(half))
            bottom = list(range(half, 2 * half))
        else:
            top = self.children[0].to_vector()
            bottom = [x + half for x in self.children[1].to_vector()]
        return bottom + top if self.swap else top + bottom

    def __eq__(self, other):
        return (
            isinstance(other, PermutationTrace)
            and self.depth == other.depth
            and self.to_vector() == other.to_vector()
        )

    def __repr__(self):
        return f"PermutationTrace(depth={self.depth}, vector={self.to_vector()})"


def apply_permutation(
    trace: PermutationTrace, m: BlockMatrix, side: str, *, inverse: bool = False
) -> BlockMatrix:
    """Apply the recorded block swaps to rows or columns of m.

    Swaps act on whole blocks only.  With ``inverse=True`` the reverse
    permutation is applied (swap first, then inverted children).
    """
    if side not in ("rows", "cols"):
        raise ValueError("side must be 'rows' or 'cols'")
    if trace.depth != m.depth:
        raise DepthMismatch(f"trace depth {trace.depth} vs matrix depth {m.depth}")
    return _apply(trace, m, side == "rows", inverse)


def _apply(trace, m, rows, inverse):
    if m.is_leaf or (not trace.swap and trace.children is None):
        return m
    a, b, c, d = m.blocks
    if inverse and trace.swap:
        a, b, c, d = (c, d, a, b) if rows else (b, a, d, c)
    if trace.children is not None:
        first, second = trace.children
        if rows:
            a = _apply(first, a, rows, inverse)
            b = _apply(first, b, rows, inverse)
            c = _apply(second, c, rows, inverse)
            d = _apply(second, d, rows, inverse)
        else:
            a = _apply(first, a, rows, inverse)
            c = _apply(first, c, rows, inverse)
            b = _apply(second, b, rows, inverse)
            d = _apply(second, d, rows, inverse)
    if not inverse and trace.swap:
        a, b, c, d = (c, d, a, b) if rows else (b, a, d, c)
    return BlockMatrix.quad(a, b, c, d)


@dataclass(frozen=True)
class LUResult:
    """M = P * L * U * Q with L unit lower triangular and U upper."""

    p: PermutationTrace
    l: TriangularMatrix
    u: TriangularMatrix
    q: PermutationTrace

    def permutation_vectors(self) -> tuple[list[int], list[int]]:
        return self.p.to_vector(), self.q.to_vector()

    def reconstruct(self, counter: OpCounter | None = None) -> BlockMatrix:
        product = bm.mul(self.l.body, self.u.body, counter)
        return apply_permutation(
            self.q, apply_permutation(self.p, product, "rows"), "cols"
        )


# ---------------------------------------------------------------------------
# pivoting


def block_pivot(m: BlockMatrix) -> tuple[bool, bool, BlockMatrix]:
    """Swap block rows/columns so the leading block is invertible.

    Fixed precedence: A (no swap), C (row swap), B (column swap), D (both).
    Invertibility is decided by :func:`blocklin.inversion.is_invertible`,
    never by row elimination.
    """
    if m.is_leaf:
        raise ValueError("block pivoting needs depth >= 1")
    a, b, c, d = m.blocks
    if is_invertible(a):
        return False, False, m
    if is_invertible(c):
        return True, False, BlockMatrix.quad(c, d, a, b)
    if is_invertible(b):
        return False, True, BlockMatrix.quad(b, a, d, c)
    if is_invertible(d):
        return True, True, BlockMatrix.quad(d, c, b, a)
    raise AllBlocksSingular("no invertible half-size block")


# ---------------------------------------------------------------------------
# triangular kernels


def tri_mul(
    tm: TriangularMatrix,
    g: BlockMatrix,
    side: str,
    counter: OpCounter | None = None,
) -> BlockMatrix:
    """Triangular times general product: tm*g for side 'left', g*tm for 'right'.

    Each node costs 4 recursive triangular-general products plus 2 general
    products, so the multiplication count is (n**3 + n**2) / 2 under the
    naive strategy.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    counter = counter if counter is not None else OpCounter()
    if tm.depth != g.depth:
        raise DepthMismatch(f"depth {tm.depth} vs {g.depth}")
    return _tri_mul(tm, g, side == "left", counter)


def _tri_mul(tm, g, tri_left, counter):
    body = tm.body
    if body.is_leaf:
        counter.mul_count += 1
        if tri_left:
            return BlockMatrix.leaf(body.scalar * g.scalar)
        return BlockMatrix.leaf(g.scalar * body.scalar)
    diag1, diag2, off = tm._split()
    g1, g2, g3, g4 = g.blocks
    lower = tm.orientation == LOWER
    if tri_left and lower:
        # [[L1,0],[X,L2]] * [[G1,G2],[G3,G4]]
        return BlockMatrix.quad(
            _tri_mul(diag1, g1, True, counter),
            _tri_mul(diag1, g2, True, counter),
            bm.add(bm.mul(off, g1, counter), _tri_mul(diag2, g3, True, counter), counter),
            bm.add(bm.mul(off, g2, counter), _tri_mul(diag2, g4, True, counter), counter),
        )
    if tri_left:
        # [[U1,Y],[0,U2]] * [[G1,G2],[G3,G4]]
        return BlockMatrix.quad(
            bm.add(_tri_mul(diag1, g1, True, counter), bm.mul(off, g3, counter), counter),
            bm.add(_tri_mul(diag1, g2, True, counter), bm.mul(off, g4, counter), counter),
            _tri_mul(diag2, g3, True, counter),
            _tri_mul(diag2, g4, True, counter),
        )
    if lower:
        # [[G1,G2],[G3,G4]] * [[L1,0],[X,L2]]
        return BlockMatrix.quad(
            bm.add(_tri_mul(diag1, g1, False, counter), bm.mul(g2, off, counter), counter),
            _tri_mul(diag2, g2, False, counter),
            bm.add(_tri_mul(diag1, g3, False, counter), bm.mul(g4, off, counter), counter),
            _tri_mul(diag2, g4, False, counter),
        )
    # [[G1,G2],[G3,G4]] * [[U1,Y],[0,U2]]
    return BlockMatrix.quad(
        _tri_mul(diag1, g1, False, counter),
        bm.add(bm.mul(g1, off, counter), _tri_mul(diag2, g2, False, counter), counter),
        _tri_mul(diag1, g3, False, counter),
        bm.add(bm.mul(g3, off, counter), _tri_mul(diag2, g4, False, counter), counter),
    )


def tri_invert(tm: TriangularMatrix, counter: OpCounter | None = None) -> TriangularMatrix:
    """Invert a triangular matrix with invertible diagonal leaves.

    Per node: two recursive triangular inversions and two triangular-general
    products; orientation and the unit-diagonal flag are preserved.
    """
    counter = counter if counter is not None else OpCounter()
    body = _tri_invert(tm, counter, ())
    return TriangularMatrix(body, tm.orientation, tm.unit_diagonal)


def _tri_invert(tm, counter, path):
    body = tm.body
    if body.is_leaf:
        inv = body.scalar.try_invert()
        if inv is None:
            raise SingularDiagonal(path)
        counter.div_count += 1
        return BlockMatrix.leaf(inv)
    diag1, diag2, off = tm._split()
    inv1 = TriangularMatrix(_tri_invert(diag1, counter, path + ("A",)), tm.orientation, tm.unit_diagonal)
    inv2 = TriangularMatrix(_tri_invert(diag2, counter, path + ("D",)), tm.orientation, tm.unit_diagonal)
    zero = bm.zero_matrix(body.depth - 1, body.ring)
    if tm.orientation == LOWER:
        # [[A,0],[C,D]]^-1 = [[A^-1, 0], [-D^-1 (C A^-1), D^-1]]
        c_ainv = tri_mul(inv1, off, "right", counter)
        corner = bm.negate(tri_mul(inv2, c_ainv, "left", counter))
        return BlockMatrix.quad(inv1.body, zero, corner, inv2.body)
    # [[A,B],[0,D]]^-1 = [[A^-1, -A^-1 (B D^-1)], [0, D^-1]]
    b_dinv = tri_mul(inv2, off, "right", counter)
    corner = bm.negate(tri_mul(inv1, b_dinv, "left", counter))
    return BlockMatrix.quad(inv1.body, corner, zero, inv2.body)


# ---------------------------------------------------------------------------
# single-level block LDU


def ldu(m: BlockMatrix, counter: OpCounter | None = None):
    """One-level factorization M = Lb * Db * Ub.

    Lb = [[I,0],[C A^-1, I]], Db = [[A,0],[0, D - C A^-1 B]],
    Ub = [[I, A^-1 B],[0, I]].  Only the leading block is inverted; the
    factors multiply back to M exactly.
    """
    if m.is_leaf:
        raise ValueError("block factorization needs depth >= 1")
    counter = counter if counter is not None else OpCounter()
    a, b, c, d = m.blocks
    scratch = OpCounter()
    try:
        a_inv = auto_invert(a, scratch)
    except (SingularMatrix, PivotBlockSingular):
        raise PivotBlockSingular(("A",)) from None
    counter.merge(scratch)
    c_ainv = bm.mul(c, a_inv, counter)
    ainv_b = bm.mul(a_inv, b, counter)
    complement = bm.sub(d, bm.mul(c_ainv, b, counter), counter)
    ring = m.ring
    eye = bm.identity(m.depth - 1, ring)
    zero = bm.zero_matrix(m.depth - 1, ring)
    lb = BlockMatrix.quad(eye, zero, c_ainv, eye)
    db = BlockMatrix.quad(a, zero, zero, complement)
    ub = BlockMatrix.quad(eye, ainv_b, zero, eye)
    return lb, db, ub


# ---------------------------------------------------------------------------
# recursive decomposition


@dataclass
class _LuConfig:
    pivot: bool
    rng: random.Random | None = None
    max_retries: int = 8


def _leaf_result(scalar) -> LUResult:
    one = scalar.ring.one()
    return LUResult(
        PermutationTrace.identity(0),
        TriangularMatrix(BlockMatrix.leaf(one), LOWER, True),
        TriangularMatrix(BlockMatrix.leaf(scalar), UPPER, False),
        PermutationTrace.identity(0),
    )


def _lu_node(m, counter, cfg, path):
    if m.is_leaf:
        if m.scalar.is_zero():
            if cfg.pivot:
                raise SingularMatrix(f"zero pivot at node {'/'.join(path) or '<root>'}")
            raise PivotBlockSingular(path)
        return _leaf_result(m.scalar)
    if cfg.pivot:
        try:
            swap_rows, swap_cols, arranged = block_pivot(m)
        except AllBlocksSingular:
            if cfg.rng is None:
                raise
            seed = cfg.rng.getrandbits(63)
            low, up = randomized_lu(m, seed, cfg.max_retries, counter)
            eye = PermutationTrace.identity(m.depth)
            return LUResult(eye, low, up, eye)
    else:
        swap_rows = swap_cols = False
        arranged = m
    a, b, c, d = arranged.blocks
    res_a = _lu_node(a, counter, cfg, path + ("A",))
    u1_inv = tri_invert(res_a.u, counter)
    l1_inv = tri_invert(res_a.l, counter)
    c_cols = apply_permutation(res_a.q, c, "cols", inverse=True)
    x_raw = tri_mul(u1_inv, c_cols, "right", counter)
    b_rows = apply_permutation(res_a.p, b, "rows", inverse=True)
    y_raw = tri_mul(l1_inv, b_rows, "left", counter)
    complement = bm.sub(d, bm.mul(x_raw, y_raw, counter), counter)
    res_s = _lu_node(complement, counter, cfg, path + ("S",))
    x = apply_permutation(res_s.p, x_raw, "rows", inverse=True)
    y = apply_permutation(res_s.q, y_raw, "cols", inverse=True)
    zero = bm.zero_matrix(m.depth - 1, m.ring)
    low = TriangularMatrix(
        BlockMatrix.quad(res_a.l.body, zero, x, res_s.l.body), LOWER, True
    )
    up = TriangularMatrix(
        BlockMatrix.quad(res_a.u.body, y, zero, res_s.u.body), UPPER, False
    )
    p = PermutationTrace(m.depth, swap_rows, (res_a.p, res_s.p))
    q = PermutationTrace(m.depth, swap_cols, (res_a.q, res_s.q))
    return LUResult(p, low, up, q)


def lu_decompose(
    m: BlockMatrix,
    counter: OpCounter | None = None,
    *,
    seed: int = 0,
    max_retries: int = 8,
) -> LUResult:
    """Factor an invertible matrix as P * L * U * Q.

    Per node: block-pivot, recursively factor the leading block, obtain the
    off-diagonal factors through explicit triangular inversion, then factor
    the Schur complement.  The unit-lower-diagonal convention is applied
    identically at every level.  A node whose four blocks are all singular
    delegates that subproblem to :func:`randomized_lu`, seeded
    deterministically from ``seed``.
    """
    counter = counter if counter is not None else OpCounter()
    cfg = _LuConfig(pivot=True, rng=random.Random(seed), max_retries=max_retries)
    return _lu_node(m, counter, cfg, ())


# ---------------------------------------------------------------------------
# randomized preconditioning


def _sampler(ring, n: int):
    """Entry sampler with a sampling set of at least 2*n*n values."""
    spec = ring.spec
    floor = 2 * n * n
    if spec.startswith("gf:"):
        p = ring.p
        if p >= floor:
            return ring, lambda rng: ring.random_element(rng)
        # lift to GF(p)(t) and sample low-degree polynomials instead
        lifted = RatFun(ring)
        degree = max(1, ceil(log(floor, p))) if p > 1 else 1
        while p ** (degree + 1) < floor:
            degree += 1

        def sample(rng, _lifted=lifted, _degree=degree, _p=p):
            coeffs = [rng.randrange(_p) for _ in range(_degree + 1)]
            return ratfun_reduce(
                Polynomial(coeffs, _lifted.base), Polynomial.one(_lifted.base)
            )

        return lifted, sample
    return ring, lambda rng: ring.from_int(rng.randint(1, floor))


def _random_unit_triangular(ring, depth, orientation, rng, sample):
    """Unit-triangular matrix with sampled off-diagonal entries."""

    def full(d):
        if d == 0:
            return BlockMatrix.leaf(sample(rng))
        return BlockMatrix.quad(full(d - 1), full(d - 1), full(d - 1), full(d - 1))

    def build(d):
        if d == 0:
            return BlockMatrix.leaf(ring.one())
        zero = bm.zero_matrix(d - 1, ring)
        if orientation == LOWER:
            return BlockMatrix.quad(build(d - 1), zero, full(d - 1), build(d - 1))
        return BlockMatrix.quad(build(d - 1), full(d - 1), zero, build(d - 1))

    return TriangularMatrix(build(depth), orientation, True)


def randomized_lu(
    m: BlockMatrix,
    seed: int,
    max_retries: int = 8,
    counter: OpCounter | None = None,
    stats: dict | None = None,
):
    """Attempt a permutation-free factorization of R_L * M * R_U.

    Unit lower R_L and unit upper R_U are drawn from a deterministic
    64-bit-seeded generator, the product is factored by the direct
    leading-pivot recursion (no block pivoting), and on success the
    preconditioners are peeled off through triangular inversion, giving
    L * U = M with no permutations.  Identical seeds reproduce identical
    factors.  After ``max_retries`` failures the matrix is certified: a
    Gram inversion failure means SingularMatrix, otherwise
    RandomnessExhausted.
    """
    counter = counter if counter is not None else OpCounter()
    rng = random.Random(seed)
    ring = m.ring
    n = m.dimension
    work_ring, sample = _sampler(ring, n)
    lifted = work_ring is not ring
    work = bm.map_leaves(m, work_ring.lift) if lifted else m
    cfg = _LuConfig(pivot=False)
    for attempt in range(1, max_retries + 1):
        r_low = _random_unit_triangular(work_ring, m.depth, LOWER, rng, sample)
        r_up = _random_unit_triangular(work_ring, m.depth, UPPER, rng, sample)
        product = bm.mul(bm.mul(r_low.body, work, counter), r_up.body, counter)
        try:
            inner = _lu_node(product, counter, cfg, ())
        except (PivotBlockSingular, SingularDiagonal):
            continue
        low_body = tri_mul(tri_invert(r_low, counter), inner.l.body, "left", counter)
        up_body = tri_mul(tri_invert(r_up, counter), inner.u.body, "right", counter)
        if lifted:
            low_body = project_to_base(low_body, ring)
            up_body = project_to_base(up_body, ring)
        if stats is not None:
            stats["attempts"] = attempt
        return (
            TriangularMatrix(low_body, LOWER, True),
            TriangularMatrix(up_body, UPPER, False),
        )
    if stats is not None:
        stats["attempts"] = max_retries
    if not is_invertible(m):
        raise SingularMatrix("input certified singular by Gram inversion")
    raise RandomnessExhausted(max_retries)
