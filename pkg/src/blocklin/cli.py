"""Batch command-line front end.

Subcommands: gen, mul, invert, lu, ldu, check, verify-counts.  Every run is
reproducible byte for byte given identical flags and files; randomness
enters only through explicit --seed flags feeding a 64-bit-seeded
deterministic generator (mt19937), which is recorded in generated file
headers.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 singular input, 4 pivot-block failure, 5 randomness exhausted.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import blockmat as bm
from . import complexity, matio, sampling
from .dense import DenseMatrix, dense_determinant, dense_identity, dense_mul
from .errors import (
    AllBlocksSingular,
    BlocklinError,
    GramSingular,
    MatrixFormatError,
    PivotBlockSingular,
    RandomnessExhausted,
    SingularMatrix,
)
from .inversion import (
    auto_invert,
    invert_gram_gv,
    invert_gram_star,
    invert_gram_transpose,
    schur_invert,
)
from .lu import ldu as ldu_factor
from .lu import lu_decompose, randomized_lu
from .rings import ring_from_spec

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3
EXIT_PIVOT = 4
EXIT_RANDOMNESS = 5


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _load(path: str) -> DenseMatrix:
    return matio.parse_matrix(_read_text(path))


def _counter_summary(counter: bm.OpCounter) -> str:
    return (
        f"# ops {counter.label or 'run'}: mul={counter.mul_count} div={counter.div_count} "
        f"add={counter.add_count} scaling={counter.scaling_count}"
    )


def _to_block(dense: DenseMatrix) -> bm.BlockMatrix:
    n = dense.n
    if n & (n - 1):
        return bm.embed(dense)
    return bm.from_dense(dense)


def _project_like(block: bm.BlockMatrix, n: int) -> DenseMatrix:
    full = bm.to_dense(block)
    if full.n == n:
        return full
    rows = [row[:n] for row in full.rows[:n]]
    return DenseMatrix(n, rows, full.ring)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    try:
        ring = ring_from_spec(args.ring)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    n = args.size
    if not 1 <= n <= 256:
        print("error: size must be in 1..256", file=sys.stderr)
        return EXIT_USAGE
    rng = random.Random(args.seed)
    comments = [f"generator mt19937 seed {args.seed}"]
    if args.all_blocks_singular:
        if n < 4 or n & (n - 1):
            print(
                "error: --all-blocks-singular needs a power-of-two size >= 4",
                file=sys.stderr,
            )
            return EXIT_USAGE
        try:
            block = sampling.random_all_blocks_singular(ring, n.bit_length() - 1, rng)
        except sampling.GenerationFailed as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        dense = bm.to_dense(block)
        comments.append("all four half-size blocks singular; determinant nonzero")
    elif args.invertible:
        # the identity-summand embedding preserves invertibility, so the
        # same block-level check covers every size
        from .inversion import is_invertible

        for _ in range(500):
            dense = sampling.random_dense(ring, n, rng)
            if is_invertible(bm.embed(dense) if n & (n - 1) else bm.from_dense(dense)):
                break
        else:
            print("error: no invertible draw found", file=sys.stderr)
            return EXIT_USAGE
    else:
        dense = sampling.random_dense(ring, n, rng)
    _write_text(args.output, matio.format_matrix(dense, comments=comments))
    return EXIT_OK


def _cmd_mul(args) -> int:
    left = _load(args.left)
    right = _load(args.right)
    if left.ring.spec != right.ring.spec or left.n != right.n:
        print("error: operands must share ring and size", file=sys.stderr)
        return EXIT_USAGE
    counter = bm.OpCounter(label="mul")
    product = bm.mul(_to_block(left), _to_block(right), counter, strategy=args.strategy)
    _write_text(args.output, matio.format_matrix(_project_like(product, left.n)))
    print(_counter_summary(counter), file=sys.stderr)
    return EXIT_OK


_METHODS = {
    "schur": ("any", schur_invert),
    "gram": ("formally-real-or-star", None),
    "gv": ("base-field", invert_gram_gv),
    "auto": ("any", auto_invert),
}


def _gram_for_spec(spec: str):
    if spec in ("q", "ratfun:q"):
        return invert_gram_transpose
    if spec in ("qi", "quat"):
        return invert_gram_star
    return None


def _cmd_invert(args) -> int:
    dense = _load(args.input)
    spec = dense.ring.spec
    if args.method == "gram":
        fn = _gram_for_spec(spec)
        if fn is None:
            print(f"error: method gram is not applicable to ring {spec}", file=sys.stderr)
            return EXIT_USAGE
    elif args.method == "gv":
        if not (spec == "q" or spec.startswith("gf:")):
            print(f"error: method gv is not applicable to ring {spec}", file=sys.stderr)
            return EXIT_USAGE
        fn = invert_gram_gv
    else:
        fn = _METHODS[args.method][1]
    counter = bm.OpCounter(label=f"invert-{args.method}")
    result = fn(_to_block(dense), counter)
    _write_text(args.output, matio.format_matrix(_project_like(result, dense.n)))
    print(_counter_summary(counter), file=sys.stderr)
    return EXIT_OK


def _cmd_lu(args) -> int:
    dense = _load(args.input)
    block = _to_block(dense)
    counter = bm.OpCounter(label="lu")
    if args.randomized:
        stats: dict = {}
        low, up = randomized_lu(block, args.seed, args.max_retries, counter, stats=stats)
        n = low.dimension
        pvec = list(range(n))
        qvec = list(range(n))
        print(f"# randomized path: yes (attempts {stats['attempts']})", file=sys.stderr)
        l_body, u_body = low.body, up.body
    else:
        result = lu_decompose(block, counter, seed=args.seed, max_retries=args.max_retries)
        pvec, qvec = result.permutation_vectors()
        print("# randomized path: no", file=sys.stderr)
        l_body, u_body = result.l.body, result.u.body
    prefix = args.out_prefix
    _write_text(f"{prefix}.L.mat", matio.format_matrix(bm.to_dense(l_body)))
    _write_text(f"{prefix}.U.mat", matio.format_matrix(bm.to_dense(u_body)))
    _write_text(f"{prefix}.perms", matio.format_permutations(pvec, qvec))
    print(_counter_summary(counter), file=sys.stderr)
    return EXIT_OK


def _cmd_ldu(args) -> int:
    dense = _load(args.input)
    counter = bm.OpCounter(label="ldu")
    lb, db, ub = ldu_factor(_to_block(dense), counter)
    prefix = args.out_prefix
    _write_text(f"{prefix}.Lb.mat", matio.format_matrix(bm.to_dense(lb)))
    _write_text(f"{prefix}.Db.mat", matio.format_matrix(bm.to_dense(db)))
    _write_text(f"{prefix}.Ub.mat", matio.format_matrix(bm.to_dense(ub)))
    print(_counter_summary(counter), file=sys.stderr)
    return EXIT_OK


def _first_mismatch(got: DenseMatrix, expected: DenseMatrix):
    for i in range(got.n):
        for j in range(got.n):
            if got.rows[i][j] != expected.rows[i][j]:
                return i, j
    return None


def _report_mismatch(kind: str, got, expected, where) -> int:
    i, j = where
    ring = got.ring
    print(
        f"check {kind} failed at entry ({i + 1}, {j + 1}): "
        f"expected {ring.format(expected.rows[i][j])}, got {ring.format(got.rows[i][j])}"
    )
    return EXIT_CHECK_FAILED


def _cmd_check(args) -> int:
    if args.kind == "inverse":
        m, inv = _load(args.files[0]), _load(args.files[1])
        if m.n != inv.n or m.ring.spec != inv.ring.spec:
            print("error: dimension or ring mismatch", file=sys.stderr)
            return EXIT_USAGE
        eye = dense_identity(m.n, m.ring)
        for left, right in ((m, inv), (inv, m)):
            product = dense_mul(left, right)
            where = _first_mismatch(product, eye)
            if where:
                return _report_mismatch("inverse", product, eye, where)
        print("check inverse ok")
        return EXIT_OK
    if args.kind == "pluq":
        m, low, up = (_load(p) for p in args.files[:3])
        pvec, qvec = matio.parse_permutations(_read_text(args.files[3]))
        if not (m.n <= low.n == up.n == len(pvec) == len(qvec)):
            print("error: dimension mismatch across inputs", file=sys.stderr)
            return EXIT_USAGE
        embedded = bm.to_dense(_to_block(m))
        product = dense_mul(low, up)
        n = embedded.n
        permuted = DenseMatrix(
            n, [[product.rows[pvec[i]][qvec[j]] for j in range(n)] for i in range(n)], m.ring
        )
        where = _first_mismatch(permuted, embedded)
        if where:
            return _report_mismatch("pluq", permuted, embedded, where)
        print("check pluq ok")
        return EXIT_OK
    m, lb, db, ub = (_load(p) for p in args.files[:4])
    product = dense_mul(dense_mul(lb, db), ub)
    embedded = bm.to_dense(_to_block(m))
    if product.n != embedded.n:
        print("error: dimension mismatch across inputs", file=sys.stderr)
        return EXIT_USAGE
    where = _first_mismatch(product, embedded)
    if where:
        return _report_mismatch("ldu", product, embedded, where)
    print("check ldu ok")
    return EXIT_OK


def _cmd_verify_counts(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        print("error: --sizes wants a comma-separated list of integers", file=sys.stderr)
        return EXIT_USAGE
    reports = complexity.verify_counts(args.op, sizes, seed=args.seed)
    if args.machine:
        sys.stdout.write(complexity.render_machine(reports))
    else:
        sys.stdout.write(complexity.render_table(reports))
    return EXIT_OK if all(r.match for r in reports) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocklin", description="Exact block-matrix algebra, batch interface"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random matrix file")
    gen.add_argument("--ring", required=True)
    gen.add_argument("--size", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--invertible", action="store_true")
    gen.add_argument("--all-blocks-singular", action="store_true")
    gen.add_argument("-o", "--output", default="-")
    gen.set_defaults(handler=_cmd_gen)

    mul = sub.add_parser("mul", help="multiply two matrix files")
    mul.add_argument("left")
    mul.add_argument("right")
    mul.add_argument("--strategy", choices=["naive", "strassen"], default="naive")
    mul.add_argument("-o", "--output", default="-")
    mul.set_defaults(handler=_cmd_mul)

    inv = sub.add_parser("invert", help="invert a matrix file")
    inv.add_argument("input")
    inv.add_argument("--method", choices=["schur", "gram", "gv", "auto"], default="auto")
    inv.add_argument("-o", "--output", default="-")
    inv.set_defaults(handler=_cmd_invert)

    lu_cmd = sub.add_parser("lu", help="factor as P L U Q")
    lu_cmd.add_argument("input")
    lu_cmd.add_argument("--randomized", action="store_true")
    lu_cmd.add_argument("--seed", type=int, default=0)
    lu_cmd.add_argument("--max-retries", type=int, default=8)
    lu_cmd.add_argument("--out-prefix", default="out")
    lu_cmd.set_defaults(handler=_cmd_lu)

    ldu_cmd = sub.add_parser("ldu", help="one-level block LDU factorization")
    ldu_cmd.add_argument("input")
    ldu_cmd.add_argument("--out-prefix", default="out")
    ldu_cmd.set_defaults(handler=_cmd_ldu)

    chk = sub.add_parser("check", help="verify an inverse or factorization exactly")
    chk.add_argument("--kind", choices=["inverse", "pluq", "ldu"], required=True)
    chk.add_argument("files", nargs="+")
    chk.set_defaults(handler=_cmd_check)

    vc = sub.add_parser("verify-counts", help="compare measured counts with predictions")
    vc.add_argument("--op", choices=["mul", "tri_mul", "tri_inv", "gram_inv", "lu"], required=True)
    vc.add_argument("--sizes", required=True)
    vc.add_argument("--seed", type=int, default=0)
    vc.add_argument("--machine", action="store_true")
    vc.set_defaults(handler=_cmd_verify_counts)

    return parser


_EXPECTED_FILES = {"inverse": 2, "pluq": 4, "ldu": 4}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.command == "check" and len(args.files) != _EXPECTED_FILES[args.kind]:
        print(
            f"error: check --kind {args.kind} expects {_EXPECTED_FILES[args.kind]} files",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        return args.handler(args)
    except (MatrixFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularMatrix, GramSingular) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (PivotBlockSingular, AllBlocksSingular) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIVOT
    except RandomnessExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANDOMNESS
    except BlocklinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
