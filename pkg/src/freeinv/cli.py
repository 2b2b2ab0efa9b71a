"""Command-line interface: counting, basis construction, rewriting, and the
verification battery, with JSON input/output and seeded reproducibility.

Exit codes: 0 on success, 1 when a verification check fails, 2 on input
errors (bad flags, unparsable files, non-invariant rewrite input).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import basis as basis_mod
from . import counting, evaluate
from .freepoly import FreePoly, ParseError, format_poly, parse_poly
from .rewrite import RewriteError, expand, rewrite as rewrite_poly
from .groups import (
    GroupError,
    UnitaryRep,
    cyclic_group,
    dihedral_group,
    make_group,
    symmetric_group,
    trivial_group,
)

_INPUT_ERRORS = (
    GroupError,
    ParseError,
    basis_mod.BuildError,
    counting.CountingError,
    RewriteError,
    evaluate.EvaluationError,
    ValueError,
    OSError,
    json.JSONDecodeError,
    KeyError,
)

_BUILTIN_RE = re.compile(
    r"^(?:sym(?P<sym>\d+)-natural|cyclic(?P<cyc>\d+)-natural|"
    r"dihedral(?P<dih>\d+)-natural|even2|trivial(?P<triv>\d+))$"
)

# Sub-stream tags so every random draw is determined by (--seed, purpose, trial).
_ROUND_TRIP_STREAM = 1
_DILATION_STREAM = 2


def resolve_group(source: str) -> tuple[UnitaryRep, str]:
    """Turn a built-in name or a JSON file path into a verified representation."""
    match = _BUILTIN_RE.match(source)
    if match:
        if match.group("sym"):
            group, perms = symmetric_group(int(match.group("sym")))
            return UnitaryRep.from_permutations(group, perms), source
        if match.group("cyc"):
            group, perms = cyclic_group(int(match.group("cyc")))
            return UnitaryRep.from_permutations(group, perms), source
        if match.group("dih"):
            group, perms = dihedral_group(int(match.group("dih")))
            return UnitaryRep.from_permutations(group, perms), source
        if match.group("triv"):
            d = int(match.group("triv"))
            group = trivial_group()
            return UnitaryRep.from_matrices(group, [np.eye(d)]), source
        # even functions in two letters: the order-2 group acting by -I
        group, _ = cyclic_group(2)
        return UnitaryRep.from_diagonals(group, [[1, 1], [-1, -1]]), source
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            return rep_from_json_dict(json.load(fh)), source
    raise GroupError(
        f"unknown group {source!r}: expected sym<d>-natural, cyclic<n>-natural, "
        "dihedral<n>-natural, even2, trivial<d>, or a path to a JSON file"
    )


def _complex_from_pair(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def rep_from_json_dict(data: dict) -> UnitaryRep:
    """Group/representation JSON schema:

    {"group": {"kind": "symmetric"|"cyclic"|"dihedral"|"table", ...},
     "rep": {"kind": "permutation"|"diagonal"|"matrices", "dim": d, "data": ...}}

    Complex entries are [re, im] pairs; matrices are row-major nested lists.
    """
    group_spec = dict(data["group"])
    kind = group_spec.pop("kind")
    group, perms = make_group(kind, **group_spec)

    rep_spec = data["rep"]
    rep_kind = rep_spec["kind"]
    declared_dim = rep_spec.get("dim")

    def check_dim(rep: UnitaryRep) -> UnitaryRep:
        if declared_dim is not None and rep.dim != int(declared_dim):
            raise GroupError(
                f"rep data has dimension {rep.dim} but the file declares {declared_dim}"
            )
        return rep

    if rep_kind == "permutation":
        images = rep_spec.get("data")
        if images is None:
            if perms is None:
                raise GroupError("permutation rep on a table group needs explicit data")
            images = perms
        return check_dim(UnitaryRep.from_permutations(group, [tuple(img) for img in images]))
    if rep_kind == "diagonal":
        diagonals = [
            [_complex_from_pair(entry) for entry in diag] for diag in rep_spec["data"]
        ]
        return check_dim(UnitaryRep.from_diagonals(group, diagonals))
    if rep_kind == "matrices":
        mats = [
            np.array([[_complex_from_pair(entry) for entry in row] for row in mat])
            for mat in rep_spec["data"]
        ]
        return check_dim(UnitaryRep.from_matrices(group, mats))
    raise GroupError(f"unknown rep kind {rep_kind!r}")


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _random_poly(rng: np.random.Generator, d: int, max_degree: int, n_terms: int = 6) -> FreePoly:
    terms = {}
    for _ in range(n_terms):
        degree = int(rng.integers(0, max_degree + 1))
        word = tuple(int(k) for k in rng.integers(1, d + 1, size=degree))
        terms[word] = complex(rng.standard_normal(), rng.standard_normal())
    return FreePoly(d, terms)


# -- commands ------------------------------------------------------------------


def cmd_count(args) -> int:
    rep, name = resolve_group(args.group)
    report = counting.count_report(rep.character(), args.max_degree)
    payload = {"group": name, "max_degree": args.max_degree}
    payload.update(report.to_json_dict())
    _emit(payload, args.out)
    return 0


def _build_basis(rep: UnitaryRep, args) -> basis_mod.SuperorthoBasis:
    return basis_mod.build(rep, args.max_degree, method=args.method)


def cmd_basis(args) -> int:
    rep, name = resolve_group(args.group)
    built = _build_basis(rep, args)
    payload = built.to_json_dict()
    payload["group"] = name
    _emit(payload, args.out)
    return 0


def cmd_rewrite(args) -> int:
    rep, name = resolve_group(args.group)
    if args.poly_file:
        with open(args.poly_file, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.poly
    p = parse_poly(text, alphabet_size=rep.dim)
    built = _build_basis(rep, args)
    residual = (rep.reynolds(p) - p).norm()
    if residual > args.tol * max(1.0, p.norm()):
        raise RewriteError(
            f"polynomial is not invariant under {name}: averaging residual {residual:.6e}"
        )
    hat = rewrite_poly(p, built, tol=args.tol)
    round_trip = (expand(hat, built) - p).norm()
    payload = {
        "group": name,
        "hat": hat.format(),
        "residual_norm": round_trip,
        "basis_fingerprint": built.fingerprint,
    }
    _emit(payload, args.out)
    return 0


def _verify_checks(
    rep: UnitaryRep, built: basis_mod.SuperorthoBasis, name: str, args
) -> tuple[list[dict], dict]:
    checks: list[dict] = []
    extras: dict = {}

    def record(check_name: str, ok: bool, detail: str) -> None:
        checks.append({"name": check_name, "pass": bool(ok), "detail": detail})

    expected_fp = basis_mod.basis_fingerprint(rep, built.max_degree)
    record(
        "fingerprint",
        built.fingerprint == expected_fp,
        f"stored {built.fingerprint}, recomputed {expected_fp}",
    )

    report = counting.count_report(rep.character(), built.max_degree)
    counts = built.degree_counts()
    mismatches = [
        (n, counts.get(n, 0), report.g[n])
        for n in range(1, built.max_degree + 1)
        if counts.get(n, 0) != report.g[n]
    ]
    record(
        "generator-counts",
        not mismatches,
        "per-degree counts match g_n" if not mismatches else f"mismatches {mismatches}",
    )

    bad_norm = [e.index for e in built.elements if abs(e.poly.norm() - 1.0) > 1e-10]
    record(
        "element-normalization",
        not bad_norm,
        "all generators unit norm" if not bad_norm else f"indices {bad_norm}",
    )

    not_invariant = [
        e.index for e in built.elements if not rep.is_invariant(e.poly, 1e-10)
    ]
    record(
        "element-invariance",
        not not_invariant,
        "all generators invariant" if not not_invariant else f"indices {not_invariant}",
    )

    ortho = basis_mod.check_superorthogonality(built, max_pad=args.pad, tol=1e-10)
    record(
        "superorthogonality",
        ortho.ok,
        f"max violation {ortho.max_violation:.3e} over {ortho.checked_values} values",
    )

    sizes = args.sizes
    gaps = []
    for trial in range(args.trials):
        rng = np.random.default_rng((args.seed, trial))
        x = evaluate.sample_row_contraction(rep.dim, sizes[trial % len(sizes)], 0.1, rng)
        ball = evaluate.check_partial_row_ball(built, x)
        gaps.append(ball.psd_gap)
    worst_gap = min(gaps) if gaps else 0.0
    extras["psd_gap"] = worst_gap
    record(
        "row-ball-containment",
        worst_gap >= -1e-10,
        f"worst PSD gap {worst_gap:.3e} over {args.trials} samples",
    )

    worst_round_trip = 0.0
    rng = np.random.default_rng((args.seed, _ROUND_TRIP_STREAM))
    try:
        for _ in range(args.trials):
            p = rep.reynolds(_random_poly(rng, rep.dim, min(4, built.max_degree)))
            if p.is_zero():
                continue
            hat = rewrite_poly(p, built, tol=args.tol)
            err = (expand(hat, built) - p).norm() / max(1.0, p.norm())
            worst_round_trip = max(worst_round_trip, err)
        record(
            "rewrite-round-trip",
            worst_round_trip <= 1e-9,
            f"worst relative error {worst_round_trip:.3e}",
        )
    except RewriteError as exc:
        record("rewrite-round-trip", False, str(exc))

    if name == "even2":
        try:
            worst_block = 0.0
            p = parse_poly("1 + 3*x1*x2 - 7*x1*x1 - x2*x1*x2*x2", alphabet_size=2)
            # the example polynomial has degree 4; factor it over a basis
            # deep enough regardless of the verified basis's truncation
            quartic_basis = built if built.max_degree >= 4 else basis_mod.build(rep, 4)
            hat = rewrite_poly(p, quartic_basis, tol=args.tol)
            for trial in range(args.trials):
                rng = np.random.default_rng((args.seed, _DILATION_STREAM, trial))
                u = evaluate.sample_row_contraction(4, sizes[trial % len(sizes)], 0.1, rng)
                x = evaluate.even_dilation(u)
                lifted = evaluate.eval_poly(p, x)
                corner = evaluate.top_left_block(lifted, u.size)
                direct = evaluate.eval_hat(hat, u)
                worst_block = max(worst_block, float(np.max(np.abs(corner - direct))))
            record(
                "dilation-blocks",
                worst_block <= 1e-10,
                f"worst corner mismatch {worst_block:.3e}",
            )
            envelope = evaluate.sup_norm_experiment(
                p,
                hat,
                quartic_basis,
                trials=min(args.trials, 10),
                sizes=sizes,
                seed=args.seed,
            )
            extras["sup_norm"] = envelope.to_json_dict()
            record(
                "norm-envelope",
                envelope.ok,
                f"sup_p={envelope.sup_p_est:.6g}, sup_hat={envelope.sup_hat_est:.6g}, "
                f"shift estimate {envelope.fock_upper_est:.6g}",
            )
        except RewriteError as exc:
            record("dilation-blocks", False, str(exc))

    return checks, extras


def cmd_verify(args) -> int:
    rep, name = resolve_group(args.group)
    if args.basis:
        with open(args.basis, "r", encoding="utf-8") as fh:
            built = basis_mod.basis_from_json_dict(json.load(fh), rep)
    else:
        built = _build_basis(rep, args)
    checks, extras = _verify_checks(rep, built, name, args)
    ok = all(check["pass"] for check in checks)
    payload = {
        "group": name,
        "max_degree": built.max_degree,
        "seed": args.seed,
        "trials": args.trials,
        "pass": ok,
        "violations": [check["name"] for check in checks if not check["pass"]],
        "checks": checks,
    }
    payload.update(extras)
    _emit(payload, args.out)
    return 0 if ok else 1


def cmd_demo(args) -> int:
    rep, name = resolve_group(args.group or "cyclic3-natural")
    n = args.max_degree
    lines = [f"Invariant free polynomials for {name} (alphabet size {rep.dim})", ""]

    report = counting.count_report(rep.character(), n)
    lines.append(f"invariant dimensions f_0..f_{n}:  {' '.join(str(v) for v in report.f)}")
    lines.append(f"generator counts    g_0..g_{n}:  {' '.join(str(v) for v in report.g)}")

    built = basis_mod.build(rep, n, method=args.method)
    lines.append("")
    lines.append(f"superorthonormal generators through degree {n}:")
    for e in built.elements:
        lines.append(f"  u{e.index} (degree {e.degree}) = {format_poly(e.poly)}")

    letters_sum = FreePoly.zero(rep.dim)
    for i in range(1, rep.dim + 1):
        letters_sum = letters_sum + FreePoly.letter(rep.dim, i)
    demo_poly = rep.reynolds(letters_sum + letters_sum * letters_sum)
    hat = rewrite_poly(demo_poly, built, tol=args.tol)
    lines.append("")
    lines.append(f"example invariant   p = {format_poly(demo_poly)}")
    lines.append(f"factored form   hat(p) = {hat.format()}")
    back = expand(hat, built)
    lines.append(f"round-trip residual    = {(back - demo_poly).norm():.3e}")

    ortho = basis_mod.check_superorthogonality(built, max_pad=2, tol=1e-10)
    lines.append(f"superorthogonality violation = {ortho.max_violation:.3e}")

    envelope = evaluate.sup_norm_experiment(
        demo_poly, hat, built, trials=4, sizes=(2, 3), seed=args.seed
    )
    lines.append(
        f"norm envelope: sampled sup|p| = {envelope.sup_p_est:.6g}, "
        f"sampled sup|hat(p)| = {envelope.sup_hat_est:.6g}, "
        f"shift-operator estimate = {envelope.fock_upper_est:.6g}"
    )

    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- argument plumbing ---------------------------------------------------------


def _sizes(text: str) -> tuple:
    try:
        values = tuple(int(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sizes list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"sizes must be positive integers, got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freeinv",
        description="Superorthogonal bases for rings of invariant free polynomials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group_required=True):
        p.add_argument(
            "--group",
            required=group_required,
            default=None,
            help="built-in name (sym<d>-natural, cyclic<n>-natural, "
            "dihedral<n>-natural, even2, trivial<d>) or a JSON file path",
        )
        p.add_argument("--max-degree", type=int, default=4)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--sizes", type=_sizes, default=(2, 3, 4))
        p.add_argument("--method", choices=("auto", "general", "abelian"), default="auto")
        p.add_argument("--out", default=None, help="write output here instead of stdout")

    p_count = sub.add_parser("count", help="generator and dimension series")
    common(p_count)
    p_count.set_defaults(func=cmd_count)

    p_basis = sub.add_parser("basis", help="construct and export a basis")
    common(p_basis)
    p_basis.set_defaults(func=cmd_basis)

    p_rewrite = sub.add_parser("rewrite", help="factor an invariant polynomial")
    common(p_rewrite)
    source = p_rewrite.add_mutually_exclusive_group(required=True)
    source.add_argument("--poly", help="polynomial text in the x<k> grammar")
    source.add_argument("--poly-file", help="file containing polynomial text")
    p_rewrite.set_defaults(func=cmd_rewrite)

    p_verify = sub.add_parser("verify", help="run the verification battery")
    common(p_verify)
    p_verify.add_argument("--pad", type=int, default=2)
    p_verify.add_argument("--basis", default=None, help="verify this exported basis JSON")
    p_verify.set_defaults(func=cmd_verify)

    p_demo = sub.add_parser("demo", help="walk through the cyclic-group example")
    common(p_demo, group_required=False)
    p_demo.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_degree < 1:
        parser.error("--max-degree must be >= 1")
    if args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"freeinv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
