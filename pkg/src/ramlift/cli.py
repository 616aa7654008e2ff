"""Command-line front end: ``ramlift enumerate | stabilizer | classify | build-cover | verify``.

Exit codes: 0 pass, 2 usage, 3 oracle mismatch, 4 construction failure,
5 verification failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import classify as cls_mod
from .bsgroup import AffineMap
from .circle import INF
from .covers import RamifiedCover, build_cover, signature_of
from .errors import (
    ConstructionFailed,
    HomConstraintViolated,
    MalformedInput,
    MismatchDetected,
    NotAdmissible,
    PropertyOneViolation,
    PropertyTwoViolation,
    RamliftError,
)
from .lifts import (
    DEFAULT_BITS,
    LiftedMap,
    LiftedRep,
    fiber_derivative_report,
    grid,
    inner_spectral_radius,
    precision_bits,
    relation_residual,
    rotation_distance,
    rotation_number,
    schwarzian_check,
    square_residual,
)
from .signatures import DihedralElement, SignatureVector, describe_subgroup, enumerate_canonical, stabilizer_report

EXIT_OK, EXIT_USAGE, EXIT_ORACLE, EXIT_CONSTRUCTION, EXIT_VERIFY = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, check, payload=None):
        self.check = check
        self.payload = payload
        super().__init__(check)


# -- argument types ------------------------------------------------------------------
def _positive_int(lo):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}, got {v}")
        return v

    return conv


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {v}")
    return v


def _signature(text):
    try:
        return SignatureVector.parse(text)
    except (PropertyOneViolation, PropertyTwoViolation, MalformedInput) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _base(text):
    t = text.strip().lower()
    if t in ("inf", "oo", "infinity"):
        return INF
    if t == "0":
        return Fraction(0)
    raise argparse.ArgumentTypeError(f"base must be 0 or inf, got {text!r}")


# -- output ----------------------------------------------------------------------------
def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2)


def _sig_str(sig):
    return ",".join(str(v) for v in sig.as_tuple())


# -- commands ----------------------------------------------------------------------------
def cmd_enumerate(args):
    sigs = enumerate_canonical(args.d, args.max_s, args.group)
    if args.format == "json":
        text = _dumps({"d": args.d, "max_s": args.max_s, "group": args.group, "count": len(sigs),
                       "signatures": [s.to_json() for s in sigs]})
    elif args.format == "csv":
        text = _csv_text(["index", "signature"], [(i, _sig_str(s)) for i, s in enumerate(sigs)])
    else:
        lines = [f"{len(sigs)} canonical signatures (d={args.d}, max_s={args.max_s}, group {args.group})"]
        lines += [str(s) for s in sigs]
        text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def cmd_stabilizer(args):
    rep = stabilizer_report(args.sig)
    if args.format == "json":
        text = _dumps(rep.to_json())
    else:
        rows = [
            ("Stab_C", rep.stab_C),
            ("Stab_D", rep.stab_D),
            ("Stab_C_hash", rep.stab_C_hash),
            ("Stab_D_hash", rep.stab_D_hash),
        ]
        if args.format == "csv":
            text = _csv_text(
                ["subgroup", "generators", "order", "elements"],
                [(name, describe_subgroup(els), len(els), " ".join(str(z) for z in els)) for name, els in rows],
            )
        else:
            lines = [f"signature {args.sig}"]
            lines += [f"  {name:<12} {describe_subgroup(els):<14} order {len(els)}" for name, els in rows]
            delta = ", ".join(f"{z}->{v}" for z, v in rep.delta_table())
            lines.append(f"  Delta_s      {delta}  (image size {rep.delta_image_size})")
            text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def cmd_classify(args):
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    which = ["full", "orientation_preserving"] if args.orientation == "both" else [args.orientation]
    tables = {}
    for oc in which:
        quotient = True if oc == "full" else not args.no_quotient_plus
        tables[oc] = cls_mod.enumerate_classes(args.n, args.d, args.max_s, oc, quotient=quotient)
    oracle = {}
    if args.oracle:
        for oc in which:
            try:
                res = cls_mod.cross_check(args.n, args.d, args.max_s, oc)
            except MismatchDetected as exc:
                sys.stderr.write(f"oracle mismatch ({oc}): {exc}\n")
                return EXIT_ORACLE
            oracle[oc] = {"classifier": res.classifier_count, "oracle": res.oracle_count, "match": res.match}
    counts = {oc: len(t) for oc, t in tables.items()}
    if args.format == "json":
        lines = [json.dumps(desc.to_json()) for oc in which for desc in tables[oc]]
        if oracle:
            lines.append(json.dumps({"oracle": oracle}))
        text = "\n".join(lines)
    elif args.format == "csv":
        text = _csv_text(
            ["n", "d", "max_s", "#classes_full", "#classes_plus"],
            [(args.n, args.d, args.max_s, counts.get("full", ""), counts.get("orientation_preserving", ""))],
        )
    else:
        lines = []
        for oc in which:
            lines.append(f"{oc}: {counts[oc]} classes (n={args.n}, d={args.d}, max_s={args.max_s})")
            for desc in tables[oc]:
                A, B = desc.hom
                lines.append(f"  {str(desc.signature):<28} a -> {str(A):<8} b -> {B}")
        for oc, r in oracle.items():
            lines.append(f"oracle {oc}: {r['oracle']} classes, match")
        text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def cmd_build_cover(args):
    try:
        cover = build_cover(args.sig, args.base, n_cap=args.n_cap, eps_cap=args.eps_cap)
    except ConstructionFailed as exc:
        sys.stderr.write(f"construction failed: {exc}\n")
        sys.stderr.write(json.dumps({"trace": exc.trace}) + "\n")
        return EXIT_CONSTRUCTION
    obj = cover.to_json()
    if args.format == "json":
        text = _dumps(obj)
    elif args.format == "csv":
        text = _csv_text(["q", "s", "o"], [(json.dumps(r["q"]), r["s"], r["o"]) for r in obj["ram"]])
    else:
        lines = [f"pi(x) = ({cover.map.num}) / ({cover.map.den})", f"base {obj['base']}, certified {cover.certified}"]
        lines += [f"  q = {q}  s = {q.order}  o = {o:+d}" for q, o in zip(cover.fiber, cover.orientations)]
        lines.append(f"signature {signature_of(cover)}")
        text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def _load_cover(args):
    if args.cover:
        try:
            with open(args.cover, encoding="utf-8") as fh:
                cover = RamifiedCover.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read cover file: {exc}") from exc
        if cover.base is not INF:
            raise UsageError("lifted BS(1,n) actions need a cover over infinity")
        return cover
    if args.sig is None:
        raise UsageError("give --sig or --cover")
    return build_cover(args.sig, INF, n_cap=args.n_cap, eps_cap=args.eps_cap)


def _verify_report(args, cover, bits):
    d = cover.d
    za = DihedralElement.parse(args.hom_a, d)
    zb = DihedralElement.parse(args.hom_b, d)
    try:
        R = LiftedRep(args.n, cover, za, zb, bits)
    except (NotAdmissible, HomConstraintViolated) as exc:
        raise VerificationFailed("admissibility", str(exc)) from exc
    ts = grid(args.grid, args.seed)
    checks = []
    report = {
        "header": {
            "n": args.n,
            "signature": signature_of(cover).to_json(),
            "hom": {"a": str(za), "b": str(zb)},
            "precision_bits": bits,
            "grid": args.grid,
            "seed": args.seed,
            "rotation_iterations": args.rotation_iterations,
            "tolerances": {
                "relation": args.tol_relation,
                "square": args.tol_square,
                "derivative": args.tol_derivative,
                "sigma": args.tol_sigma,
                "rotation": args.tol_rotation,
                "schwarzian": args.tol_schwarzian,
            },
        }
    }
    rel = float(relation_residual(R, ts))
    report["relation_residual"] = rel
    checks.append(("relation", rel < args.tol_relation))
    sq = max(float(square_residual(R.lift_a, ts)), float(square_residual(R.lift_b, ts)))
    report["square_residual"] = sq
    checks.append(("square", sq < args.tol_square))
    rows = fiber_derivative_report(R.lift_a)
    report["fiber_derivatives"] = [{"q": r["q"], "expected": r["expected"], "got": r["got"]} for r in rows]
    if za.is_identity:
        worst = max(abs(r["got"] - r["expected"]) for r in rows)
        checks.append(("fiber_derivatives", worst < args.tol_derivative))
    closed, numeric = inner_spectral_radius(R)
    report["sigma"] = {"closed_form": closed, "numeric": numeric}
    if not za.is_identity:
        report["sigma"]["candidate_set"] = "fiber points and one preimage of 0 per edge; completeness asserted, not proved"
    checks.append(("sigma", numeric is not None and abs(numeric - closed) < args.tol_sigma))
    if zb.flip:
        report["rotation"] = None
    else:
        comb = rotation_number(R.lift_b)
        num = rotation_number(R.lift_b, "numeric", iterations=args.rotation_iterations)
        report["rotation"] = {"comb": f"{(-zb.rot) % d}/{d}", "numeric": num}
        checks.append(("rotation", rotation_distance(comb, num) < args.tol_rotation))
    trans = LiftedMap(cover, AffineMap(Fraction(1), Fraction(1)), DihedralElement.identity(d), bits)
    sch = max(schwarzian_check(trans, i) for i in range(d))
    report["schwarzian_max"] = sch
    checks.append(("schwarzian", sch < args.tol_schwarzian))
    report["checks"] = {name: ok for name, ok in checks}
    failed = [name for name, ok in checks if not ok]
    report["passed"] = not failed
    return report, failed


def cmd_verify(args):
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    bits = args.bits if args.bits is not None else precision_bits()
    try:
        cover = _load_cover(args)
    except ConstructionFailed as exc:
        sys.stderr.write(f"construction failed: {exc}\n")
        return EXIT_CONSTRUCTION
    try:
        report, failed = _verify_report(args, cover, bits)
    except VerificationFailed as exc:
        sys.stderr.write(f"verification failed: {exc.check}: {exc.payload}\n")
        _emit(args, _dumps({"passed": False, "failed": exc.check, "detail": exc.payload}))
        return EXIT_VERIFY
    if args.format == "json":
        text = _dumps(report)
    elif args.format == "csv":
        rows = [
            ("relation_residual", report["relation_residual"], args.tol_relation),
            ("square_residual", report["square_residual"], args.tol_square),
            ("sigma_closed_form", report["sigma"]["closed_form"], ""),
            ("sigma_numeric", report["sigma"]["numeric"], args.tol_sigma),
            ("schwarzian_max", report["schwarzian_max"], args.tol_schwarzian),
        ]
        if report["rotation"]:
            rows.append(("rotation_numeric", report["rotation"]["numeric"], args.tol_rotation))
        text = _csv_text(["quantity", "value", "tolerance"], rows)
    else:
        lines = [f"n={args.n} signature {signature_of(cover)} hom a->{report['header']['hom']['a']} "
                 f"b->{report['header']['hom']['b']}"]
        lines.append(f"  relation residual   {report['relation_residual']:.3e}")
        lines.append(f"  square residual     {report['square_residual']:.3e}")
        for r in report["fiber_derivatives"]:
            lines.append(f"  f'(q={r['q']})  {r['got']:.12f}  expected {r['expected']}")
        lines.append(f"  sigma               {report['sigma']['numeric']:.12f}  closed {report['sigma']['closed_form']:.12f}")
        if report["rotation"]:
            lines.append(f"  rotation            {report['rotation']['comb']}  numeric {report['rotation']['numeric']:.6f}")
        lines.append(f"  schwarzian max      {report['schwarzian_max']:.3e}")
        lines.append("PASS" if not failed else "FAIL: " + ", ".join(failed))
        text = "\n".join(lines)
    _emit(args, text)
    if failed:
        sys.stderr.write(f"verification failed: {failed[0]}\n")
        return EXIT_VERIFY
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    caps = argparse.ArgumentParser(add_help=False)
    caps.add_argument("--n-cap", type=_positive_int(1), default=64, help="largest exponent N tried (default 64)")
    caps.add_argument("--eps-cap", type=_positive_int(1), default=128, help="largest j in eps = 2^-j (default 128)")

    p = argparse.ArgumentParser(prog="ramlift", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="canonical signatures")
    e.add_argument("--d", type=_positive_int(1), required=True)
    e.add_argument("--max-s", type=_positive_int(1), required=True)
    e.add_argument("--group", choices=("C", "D"), default="D")
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("stabilizer", parents=[common], help="stabilizers and Delta_s of a signature")
    s.add_argument("--sig", type=_signature, required=True, help="s_1,..,s_d,o_1,..,o_d")
    s.set_defaults(func=cmd_stabilizer)

    c = sub.add_parser("classify", parents=[common], help="class descriptors (s, [h])")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=_positive_int(1), required=True)
    c.add_argument("--max-s", type=_positive_int(1), required=True)
    c.add_argument("--orientation", choices=("full", "orientation_preserving", "both"), default="both")
    c.add_argument("--oracle", action="store_true", help="cross-check against the brute-force oracle")
    c.add_argument("--no-quotient-plus", action="store_true",
                   help="list every orientation-preserving hom instead of conjugacy classes")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("build-cover", parents=[common, caps], help="certified rational cover")
    b.add_argument("--sig", type=_signature, required=True)
    b.add_argument("--base", type=_base, default=Fraction(0), help="0 or inf (default 0)")
    b.set_defaults(func=cmd_build_cover)

    v = sub.add_parser("verify", parents=[common, caps], help="verify a lifted BS(1,n) action")
    v.add_argument("--n", type=int, required=True)
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--sig", type=_signature)
    src.add_argument("--cover", metavar="FILE", help="cover JSON over infinity")
    v.add_argument("--hom-a", default="id", help="image of a as a word in a, b (default id)")
    v.add_argument("--hom-b", default="id", help="image of b (default id)")
    v.add_argument("--grid", type=_positive_int(16), default=512)
    v.add_argument("--seed", type=int, default=None, help="sample the grid at random with this seed")
    v.add_argument("--bits", type=_positive_int(24), default=None,
                   help=f"working precision (default $RAMLIFT_PRECISION_BITS or {DEFAULT_BITS})")
    v.add_argument("--rotation-iterations", type=_positive_int(1), default=100_000)
    v.add_argument("--tol-relation", type=_positive_float, default=1e-8)
    v.add_argument("--tol-square", type=_positive_float, default=1e-9)
    v.add_argument("--tol-derivative", type=_positive_float, default=1e-6)
    v.add_argument("--tol-sigma", type=_positive_float, default=1e-6)
    v.add_argument("--tol-rotation", type=_positive_float, default=1e-3)
    v.add_argument("--tol-schwarzian", type=_positive_float, default=1e-4)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if "RAMLIFT_PRECISION_BITS" in os.environ:
            precision_bits()
        return args.func(args)
    except (UsageError, ValueError, MalformedInput) as exc:
        sys.stderr.write(f"ramlift {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except RamliftError as exc:
        sys.stderr.write(f"ramlift {args.command}: verification failed: {exc}\n")
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
