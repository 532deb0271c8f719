"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction

import numpy as np

from capax import capacity as cap
import capax.integral as ch
from capax import psym as ps_mod
from capax.config import get_tolerance
from capax.errors import CapaxError, GuardExceeded, NotBelief, NotSymmetric, ZeroBlockMeasure
from capax.generators import random_psym
from capax.io import MeasureFile, ParseError, dumps_measure, read_measure, read_scores, write_measure
from capax.setcore import Partition, enumerate_paths, path_count

DENSIFY_LIMIT = 16

FORMULAS = {
    ("dense", "capacity", "mobius"): "alternating subset sum over subsets (Moebius transform)",
    ("dense", "mobius", "capacity"): "subset sum (Zeta transform)",
    ("dense", "mobius", "interaction"): "superset sum weighted 1/(|B|+1)",
    ("dense", "interaction", "mobius"): "superset sum weighted by Bernoulli numbers",
    ("psym", "capacity", "mobius"): "signed binomial sum over compositions",
    ("psym", "mobius", "capacity"): "binomial sum over compositions",
    ("psym", "mobius", "interaction"): "graded binomial superset sum weighted 1/(c-b+1)",
    ("psym", "interaction", "mobius"): "graded binomial superset sum weighted by Bernoulli numbers",
}

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(CapaxError):
    pass


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return f"{float(x):.12g}"


def _line(key: str, value) -> None:
    print(f"{key}: {value}")


def _load(path) -> MeasureFile:
    if not path:
        raise UsageError("--input is required")
    return read_measure(path)


def _parse_partition(text: str, ground) -> Partition:
    """``"M1,M2|P1,P2"`` -> partition by labels."""
    blocks = [[lab.strip() for lab in part.split(",") if lab.strip()] for part in text.split("|")]
    try:
        return Partition.from_labels(ground, blocks)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad --partition {text!r}: {exc}") from None


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"block sizes must be integers: {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError(f"block sizes must be positive: {text!r}")
    return sizes


def _to_kind(obj, target: str):
    """Convert a dense representation object to ``target``."""
    if isinstance(obj, cap.SetFunction):
        kind = "capacity"
    elif isinstance(obj, cap.MobiusRepr):
        kind = "mobius"
    else:
        kind = "interaction"
    if kind == target:
        return obj
    m = obj
    if kind == "capacity":
        m = cap.mobius_from_capacity(obj)
    elif kind == "interaction":
        m = cap.mobius_from_interaction(obj)
    if target == "mobius":
        return m
    if target == "capacity":
        return cap.capacity_from_mobius(m)
    return cap.interaction_from_mobius(m)


def _rationalize(obj):
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        return obj.to_rational()
    if isinstance(obj, cap.SetFunction):
        return obj.to_rational()
    arr = cap.as_array(obj.coeffs, rational=True)
    return type(obj)(obj.ground, arr)


def _dense_capacity(mf: MeasureFile, densify: bool, tol: float) -> cap.Capacity:
    obj = mf.to_object()
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        if obj.n > DENSIFY_LIMIT and not densify:
            raise UsageError(f"refusing to densify a compressed measure with n = {obj.n} > {DENSIFY_LIMIT}; pass --densify")
        obj = ps_mod.convert(obj, "capacity")
        return ps_mod.expand(obj)
    return cap.validate_capacity(_to_kind(obj, "capacity"), tol=tol)


def cmd_transform(args) -> int:
    mf = _load(args.input)
    obj = mf.to_object()
    if args.rational:
        obj = _rationalize(obj)
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        out = ps_mod.convert(obj, args.to)
    else:
        out = _to_kind(obj, args.to)
        if args.to == "mobius" and mf.representation != "mobius":
            ok, witness = cap.is_valid_mobius(out, args.tolerance)
            if not ok:
                print(f"warning: result is not the Moebius transform of a capacity (witness {witness})", file=sys.stderr)
    src, dst = mf.representation, args.to
    if src == dst:
        formula = "identity"
    elif (mf.storage, src, dst) in FORMULAS:
        formula = FORMULAS[(mf.storage, src, dst)]
    else:
        formula = f"{FORMULAS[(mf.storage, src, 'mobius')]}, then {FORMULAS[(mf.storage, 'mobius', dst)]}"
    meta = dict(mf.metadata)
    meta.update({"transformed_from": src, "formula": formula})
    result = MeasureFile.from_object(out, meta)
    if args.output:
        write_measure(args.output, result)
        _line("wrote", args.output)
    else:
        sys.stdout.write(dumps_measure(result))
    return EXIT_OK


def cmd_detect(args) -> int:
    mf = _load(args.input)
    mu = _dense_capacity(mf, args.densify, args.tolerance)
    partition = ps_mod.coarsest_partition(mu, args.tolerance)
    n = mu.n
    _line("n", n)
    _line("p", partition.p)
    _line("blocks", " | ".join(",".join(b) for b in partition.labels(mu.ground)))
    _line("matrix_entries", math.prod(partition.extents))
    _line("compressed_free_values", ps_mod.storage_count(partition))
    _line("dense_entries", 1 << n)
    _line("dense_free_values", (1 << n) - 2)
    if args.output:
        compressed = ps_mod.compress(mu, partition, args.tolerance)
        write_measure(args.output, MeasureFile.from_object(compressed, {"detected_p": partition.p}))
        _line("wrote", args.output)
    return EXIT_OK


def cmd_compress(args) -> int:
    mf = _load(args.input)
    mu = _dense_capacity(mf, args.densify, args.tolerance)
    partition = _parse_partition(args.partition, mu.ground) if args.partition else None
    compressed = ps_mod.compress(mu, partition, args.tolerance)
    _line("p", compressed.p)
    if compressed.coarsest_p is not None:
        _line("note", f"supplied partition is finer than the coarsest (p = {compressed.coarsest_p})")
    _line("free_values", ps_mod.storage_count(compressed.partition))
    meta = {"coarsest_p": compressed.coarsest_p} if compressed.coarsest_p else {}
    if args.output:
        write_measure(args.output, MeasureFile.from_object(compressed, meta))
        _line("wrote", args.output)
    return EXIT_OK


def cmd_expand(args) -> int:
    mf = _load(args.input)
    obj = mf.to_object()
    if not isinstance(obj, ps_mod.PSymmetricCapacity):
        raise UsageError("expand needs a psym-storage file")
    if obj.n > DENSIFY_LIMIT and not args.densify:
        raise UsageError(f"refusing to densify n = {obj.n} > {DENSIFY_LIMIT}; pass --densify")
    if obj.kind == "capacity":
        out = ps_mod.expand(obj)
    else:
        vals = ps_mod.dense_values(obj)
        out = cap.MobiusRepr(obj.ground, vals) if obj.kind == "mobius" else cap.InteractionRepr(obj.ground, vals)
    write_measure(args.output, MeasureFile.from_object(out, mf.metadata))
    _line("wrote", args.output)
    return EXIT_OK


def cmd_dual(args) -> int:
    mf = _load(args.input)
    obj = mf.to_object()
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        out = ps_mod.dual_psym(ps_mod.convert(obj, "capacity"))
    else:
        out = cap.dual(cap.validate_capacity(_to_kind(obj, "capacity"), tol=args.tolerance))
    write_measure(args.output, MeasureFile.from_object(out, {"dual_of": args.input}))
    _line("wrote", args.output)
    return EXIT_OK


def cmd_integrate(args) -> int:
    mf = _load(args.input)
    if not args.scores:
        raise UsageError("--scores is required")
    obj = mf.to_object()
    f = read_scores(args.scores, mf.ground)
    tol = args.tolerance
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        compressed = ps_mod.convert(obj, "capacity")
        total = ch.choquet_psym(compressed, f)
    else:
        mu = cap.validate_capacity(_to_kind(obj, "capacity"), tol=tol)
        total = ch.choquet(mu, f, tol)
        compressed = None
        if args.decompose or mu.n > 1:
            compressed = ps_mod.compress(mu, None, tol)
    _line("integral", _fmt(total))
    status = EXIT_OK
    if compressed is not None and compressed.p == 1:
        _line("owa_weights", " ".join(_fmt(w) for w in ch.capacity_to_owa(compressed)))
    if args.decompose:
        _line("p", compressed.p)
        _line("blocks", " | ".join(",".join(b) for b in compressed.partition.labels(compressed.ground)))
        belief = ps_mod.is_belief_psym(compressed, tol)
        res = ch.belief_decompose(compressed, f, tol) if belief else ch.decompose(compressed, f, tol)
        for k, (term, mass) in enumerate(zip(res.block_terms, res.block_masses)):
            _line(f"block_{k + 1}_measure", _fmt(mass))
            _line(f"block_{k + 1}_term", _fmt(term))
        _line("residual", _fmt(res.residual))
        _line("belief", str(belief).lower())
        if belief:
            _line("interaction_degree", _fmt(res.degree))
        else:
            _line("interaction_degree_diagnostic", _fmt(ch.interaction_degree(compressed, diagnostic=True)))
        _line("identity_gap", f"{res.identity_gap:.3g}")
        _line("identity_check", "pass" if res.identity_gap <= tol else "fail")
        if res.identity_gap > tol:
            status = EXIT_FAIL
    return status


def cmd_verify(args) -> int:
    mf = _load(args.input)
    tol = args.tolerance
    obj = mf.to_object()
    failed = False
    _line("representation", f"{mf.representation}/{mf.storage}")
    if isinstance(obj, ps_mod.PSymmetricCapacity):
        # construction already enforces the matrix invariants
        compressed = ps_mod.convert(obj, "capacity")
        _line("valid_capacity", "true")
        m = ps_mod.psym_mobius(compressed).matrix
        belief = bool(np.all(m >= -tol))
        _line("belief", str(belief).lower())
        if not belief:
            at = tuple(int(x) for x in np.unravel_index(np.argmin(m.astype(float)), m.shape))
            _line("belief_witness", f"composition {at} has Moebius coefficient {_fmt(m[at])}")
        _line("partition_p", compressed.p)
        if compressed.n <= DENSIFY_LIMIT or args.densify:
            mu = ps_mod.expand(compressed)
            _line("coarsest_p", ps_mod.coarsest_partition(mu, tol).p)
        if ps_mod.is_interadditive_psym(compressed, tol):
            _line("interadditive", "true")
        return EXIT_OK

    values = _to_kind(obj, "capacity")
    m = _to_kind(obj, "mobius")
    ok, witness = cap.is_valid_mobius(m, tol)
    if not ok:
        if isinstance(witness, tuple):
            a, i = witness
            witness = f"A = {{{','.join(mf.ground.names(a))}}}, element {mf.labels[i]}"
        _line("valid_mobius", f"false ({witness})")
    else:
        _line("valid_mobius", "true")
    try:
        mu = cap.validate_capacity(values, tol=tol)
    except CapaxError as exc:
        _line("valid_capacity", f"false ({exc})")
        return EXIT_FAIL
    _line("valid_capacity", "true")
    belief = cap.is_belief(mu, tol)
    _line("belief", str(belief).lower())
    if not belief:
        negative = [a for a in range(1 << mu.n) if m.coeffs[a] < -tol]
        first = min(negative, key=lambda a: (bin(a).count("1"), a))
        _line("belief_witness", f"m({','.join(mf.ground.names(first))}) = {_fmt(m.coeffs[first])}")
    coarsest = ps_mod.coarsest_partition(mu, tol)
    _line("p", coarsest.p)
    _line("blocks", " | ".join(",".join(b) for b in coarsest.labels(mu.ground)))
    _line("symmetric", str(coarsest.p == 1).lower())
    if args.partition:
        part = _parse_partition(args.partition, mu.ground)
        for k, block in enumerate(part.blocks):
            good = cap.is_set_of_indifference(mu, block, tol)
            _line(f"block_{k + 1}_indifference", str(good).lower())
            failed |= not good
        inter = cap.is_interadditive(mu, part, tol)
        _line("interadditive", str(inter).lower())
        failed |= not inter
    return EXIT_FAIL if failed else EXIT_OK


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.blocks)
    n = sum(sizes)
    if args.n is not None and args.n != n:
        raise UsageError(f"--n {args.n} does not match block sizes summing to {n}")
    partition = Partition.from_sizes(sizes)
    if math.prod(partition.extents) > ps_mod.COMPRESSED_GUARD:
        raise GuardExceeded("compressed matrix exceeds the guard")
    rng = np.random.default_rng(args.seed)
    dense_free = (1 << n) - 2
    free = ps_mod.storage_count(partition)
    _line("n", n)
    _line("blocks", ",".join(str(s) for s in sizes))
    _line("dense_coefficients", f"{dense_free:,}")
    _line("compressed_coefficients", f"{free:,}")
    _line("ratio", f"{dense_free / free:.6g}")
    measure = random_psym(sizes, rng)
    scores = rng.random((args.batch, n))
    t0 = time.perf_counter()
    results = ch.choquet_psym_batch(measure, scores)
    t_comp = time.perf_counter() - t0
    _line("batch", args.batch)
    _line("compressed_seconds", f"{t_comp:.4f}")
    _line("mean_integral", _fmt(results.mean()))
    if n <= DENSIFY_LIMIT or (args.densify and n <= 24):
        dense = ps_mod.expand(measure)
        t0 = time.perf_counter()
        dense_results = [ch.choquet(dense, row) for row in scores]
        t_dense = time.perf_counter() - t0
        _line("dense_seconds", f"{t_dense:.4f}")
        _line("max_abs_difference", f"{np.max(np.abs(results - dense_results)):.3g}")
    else:
        _line("dense_seconds", "skipped (pass --densify to time the dense route)")
    return EXIT_OK


def cmd_paths(args) -> int:
    sizes = _parse_sizes(args.blocks)
    partition = Partition.from_sizes(sizes)
    count = path_count(partition)
    _line("multinomial", count)
    if count <= args.guard:
        _line("enumerated", len(enumerate_paths(partition, args.guard)))
    if len(sizes) == 2 and min(sizes) == 1:
        _line(
            "note",
            f"with one singleton block there are n = {partition.n} paths; a count of n+1 = {partition.n + 1} would be wrong",
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capax", description="Capacities, p-symmetric compression and Choquet integrals.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="equality tolerance (default: $CAPAX_TOLERANCE or 1e-9)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--densify", action="store_true", help=f"allow expanding compressed measures past n = {DENSIFY_LIMIT}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", parents=[common], help="change representation")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--to", required=True, choices=ps_mod.KINDS)
    p.add_argument("--rational", action="store_true", help="exact rational arithmetic")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("detect", parents=[common], help="find the coarsest partition into sets of indifference")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="write the compressed measure here")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("compress", parents=[common], help="dense capacity -> p-symmetric matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--partition", help='blocks as labels, e.g. "M1,M2|P1,P2"')
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("expand", parents=[common], help="p-symmetric matrix -> dense")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("dual", parents=[common], help="conjugate measure")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("integrate", parents=[common], help="Choquet integral of a score file")
    p.add_argument("--input", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--decompose", action="store_true")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("verify", parents=[common], help="validity, belief and symmetry checks")
    p.add_argument("--input", required=True)
    p.add_argument("--partition", help='blocks as labels, e.g. "M1,M2|P1,P2"')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="compressed vs dense storage and timing")
    p.add_argument("--n", type=int)
    p.add_argument("--blocks", required=True, help="block sizes, e.g. 10,10")
    p.add_argument("--batch", type=int, default=1000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("paths", parents=[common], help="count lattice paths for block sizes")
    p.add_argument("--blocks", required=True)
    p.add_argument("--guard", type=int, default=10**5)
    p.set_defaults(func=cmd_paths)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        args.tolerance = get_tolerance(args.tolerance)
        return args.func(args)
    except (ParseError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ZeroBlockMeasure, NotBelief, NotSymmetric, GuardExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CapaxError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
