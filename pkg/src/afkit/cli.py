"""Command-line front end.

Every subcommand is a thin adapter around one library call: it decodes JSON
from a file (or stdin, written as "-" or omitted), invokes the call, and
prints the canonical JSON of the result. Verdict-shaped commands exit 0 for
ok, 1 for refuted, 2 for unknown-at-depth/budget, 3 for malformed input;
conversions exit 0 or 3. Nothing unbounded runs by default: depth defaults to
8 and search budgets to 100000 nodes.
"""

from __future__ import annotations

import argparse
import json
import sys
from . import bratteli, dimgroup, elliott, findim, jsonio, perturb

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_INPUT_ERROR = 3

DEFAULT_DEPTH = 8
DEFAULT_BUDGET = 100_000


class _InputError(Exception):
    pass


def _read_payload(path: str):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _InputError(
            f"malformed JSON in {path or 'stdin'} at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _emit(obj) -> None:
    sys.stdout.write(jsonio.canonical_dumps(obj))


def _parse_ints(text: str, flag: str) -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError as exc:
        raise _InputError(f"{flag} expects comma-separated integers, got {text!r}") from exc


def _parse_vertex(text: str, flag: str) -> tuple:
    parts = _parse_ints(text, flag)
    if len(parts) != 2:
        raise _InputError(f"{flag} expects LEVEL,INDEX, got {text!r}")
    return parts


def _parse_table(text: str) -> dict:
    table = {}
    for i, part in enumerate(text.split(",")):
        part = part.strip()
        if part in ("-", "_", "x", ""):
            table[i] = None
        else:
            try:
                table[i] = int(part)
            except ValueError as exc:
                raise _InputError(f"--table entries must be ints or '-', got {part!r}") from exc
    return table


# -- handlers ----------------------------------------------------------------


def cmd_validate(args) -> int:
    payload = _read_payload(args.file)
    kind = jsonio.detect_kind(payload)
    if kind == "diagram":
        diagram = jsonio.diagram_from_obj(payload)
        bad = bratteli.consistency_violation(diagram)
        if bad is None:
            _emit({"status": "ok", "kind": kind, "depth": diagram.depth})
            return EXIT_OK
        _emit({"status": "refuted", "kind": kind, "vertex": list(bad[0]), "reason": bad[1]})
        return EXIT_REFUTED
    if kind == "sequence":
        seq = jsonio.sequence_from_obj(payload)
        bad = findim.af_sequence_violation(seq)
        if bad is None:
            _emit({"status": "ok", "kind": kind, "depth": seq.depth})
            return EXIT_OK
        _emit({"status": "refuted", "kind": kind, "stage": bad[0], "reason": bad[1]})
        return EXIT_REFUTED
    if kind == "certificate":
        raw = dict(payload)
        claims_unital = bool(raw.get("unital", False))
        raw["unital"] = False
        cert = jsonio.certificate_from_obj(raw)
        if claims_unital:
            try:
                dimgroup.DimCertificate(cert.stages, cert.bonds, unital=True)
            except ValueError as exc:
                _emit({"status": "refuted", "kind": kind, "reason": str(exc)})
                return EXIT_REFUTED
        _emit({"status": "ok", "kind": kind, "depth": cert.depth})
        return EXIT_OK
    if kind == "algebra":
        jsonio.algebra_from_obj(payload)
        _emit({"status": "ok", "kind": kind})
        return EXIT_OK
    _emit({"status": "ok", "kind": kind})
    return EXIT_OK


def cmd_k0(args) -> int:
    algebra = jsonio.algebra_from_obj(_read_payload(args.file))
    group = findim.k0(algebra)
    _emit({"rank": group.rank, "unit": list(group.unit)})
    return EXIT_OK


def cmd_path_count(args) -> int:
    diagram = jsonio.diagram_from_obj(_read_payload(args.file))
    u = _parse_vertex(getattr(args, "from"), "--from")
    v = _parse_vertex(args.to, "--to")
    _emit(bratteli.path_count(diagram, u, v))
    return EXIT_OK


def cmd_telescope(args) -> int:
    diagram = jsonio.diagram_from_obj(_read_payload(args.file))
    stages = _parse_ints(args.stages, "--stages")
    _emit(jsonio.diagram_to_obj(bratteli.telescope(diagram, stages)))
    return EXIT_OK


def cmd_simple(args) -> int:
    diagram = jsonio.diagram_from_obj(_read_payload(args.file))
    verdict = bratteli.simplicity_window(diagram)
    if verdict.witnessed:
        _emit({"status": "ok", "witnessed": True, "depth": verdict.depth})
        return EXIT_OK
    _emit(
        {
            "status": "unknown",
            "witnessed": False,
            "depth": verdict.depth,
            "blocked": list(verdict.blocked),
        }
    )
    return EXIT_UNKNOWN


def cmd_supernatural(args) -> int:
    diagram = jsonio.diagram_from_obj(_read_payload(args.file))
    factors = bratteli.supernatural_prefix(diagram, depth=args.depth)
    _emit({str(p): e for p, e in sorted(factors.items())})
    return EXIT_OK


def cmd_af_to_diagram(args) -> int:
    seq = jsonio.sequence_from_obj(_read_payload(args.file))
    _emit(jsonio.diagram_to_obj(bratteli.diagram_of_af_sequence(seq)))
    return EXIT_OK


def cmd_diagram_to_af(args) -> int:
    diagram = jsonio.diagram_from_obj(_read_payload(args.file))
    _emit(jsonio.sequence_to_obj(bratteli.af_sequence_of_diagram(diagram)))
    return EXIT_OK


def cmd_af_to_cert(args) -> int:
    seq = jsonio.sequence_from_obj(_read_payload(args.file))
    _emit(jsonio.certificate_to_obj(dimgroup.certificate_of_af(seq)))
    return EXIT_OK


def cmd_cert_to_af(args) -> int:
    cert = jsonio.certificate_from_obj(_read_payload(args.file))
    _emit(jsonio.sequence_to_obj(dimgroup.af_of_certificate(cert)))
    return EXIT_OK


def cmd_unitalize(args) -> int:
    cert = jsonio.certificate_from_obj(_read_payload(args.file))
    _emit(jsonio.certificate_to_obj(dimgroup.unitalize(cert)))
    return EXIT_OK


def cmd_shen(args) -> int:
    payload = _read_payload(args.file)
    if not isinstance(payload, dict) or "cert" not in payload:
        raise jsonio.SchemaError("input", "shen expects an object with cert, theta, alpha")
    cert = jsonio.certificate_from_obj(payload.get("cert"))
    theta = jsonio.limit_hom_from_obj(payload.get("theta"), "theta")
    alpha = jsonio.int_vector_from_obj(payload.get("alpha"), "alpha")
    try:
        phi, theta_prime = dimgroup.shen_factor(cert, theta, alpha)
    except dimgroup.KernelWitnessNotFound as exc:
        _emit({"status": "unknown", "depth": cert.depth, "reason": str(exc)})
        return EXIT_UNKNOWN
    _emit(
        {
            "status": "ok",
            "phi": jsonio.matrix_to_obj(phi),
            "thetaPrime": jsonio.limit_hom_to_obj(theta_prime),
        }
    )
    return EXIT_OK


def cmd_equiv(args) -> int:
    d1 = jsonio.diagram_from_obj(_read_payload(args.left))
    d2 = jsonio.diagram_from_obj(_read_payload(args.right))
    witness = bratteli.equivalence_search(d1, d2, budget=args.budget)
    if witness is None:
        _emit({"status": "unknown", "budget": args.budget})
        return EXIT_UNKNOWN
    _emit({"status": "ok", "witness": jsonio.equivalence_to_obj(witness)})
    return EXIT_OK


def cmd_zigzag(args) -> int:
    certA = jsonio.certificate_from_obj(_read_payload(args.left))
    certB = jsonio.certificate_from_obj(_read_payload(args.right))
    try:
        witness = elliott.build_zigzag(certA, certB, depth=args.depth, budget=args.budget)
    except elliott.SeedNotFound as exc:
        _emit({"status": "unknown", "reason": str(exc)})
        return EXIT_UNKNOWN
    payload = jsonio.zigzag_to_obj(witness) if witness is not None else None
    if witness is not None and witness.depth == args.depth:
        _emit({"status": "ok", "witness": payload})
        return EXIT_OK
    _emit(
        {
            "status": "unknown",
            "requested": args.depth,
            "achieved": witness.depth if witness is not None else None,
            "witness": payload,
        }
    )
    return EXIT_UNKNOWN


def cmd_verify_zigzag(args) -> int:
    witness = jsonio.zigzag_from_obj(_read_payload(args.witness))
    certA = jsonio.certificate_from_obj(_read_payload(args.left))
    certB = jsonio.certificate_from_obj(_read_payload(args.right))
    violation = elliott.zigzag_violation(witness, certA, certB)
    if violation is None:
        _emit({"status": "ok", "depth": witness.depth})
        return EXIT_OK
    _emit({"status": "refuted", "violation": violation})
    return EXIT_REFUTED


def cmd_gen(args) -> int:
    if args.kind == "car":
        _emit(jsonio.diagram_to_obj(bratteli.gen_car(args.depth)))
        return EXIT_OK
    table = _parse_table(args.table) if args.table is not None else {}
    _emit(jsonio.diagram_to_obj(bratteli.gen_trace_diagram(table, args.depth)))
    return EXIT_OK


def cmd_moduli(args) -> int:
    eps = jsonio.rational_from_str(args.eps)
    n, k = args.n, args.k
    if not 0 < eps < 1:
        raise _InputError(f"--eps must lie in (0,1), got {eps}")
    out = {
        "eps": jsonio.rational_to_str(eps),
        "n": n,
        "k": k,
        "delta0": jsonio.rational_to_str(perturb.delta0(eps, n)),
        "delta1": jsonio.rational_to_str(perturb.delta1(eps, n)),
        "delta2": jsonio.rational_to_str(perturb.delta2(eps, n)),
        "Delta1": perturb.Delta1(n, k),
        "Delta2": perturb.Delta2(n, k),
        "Delta3": perturb.Delta3(n, k),
        "Delta4": perturb.Delta4(n, k),
        "DeltaGlimm": perturb.DeltaGlimm(n, k),
        "squarePartitions": [list(p) for p in perturb.square_partitions(n)],
    }
    _emit(out)
    return EXIT_OK


def cmd_perturb_demo(args) -> int:
    sizes = _parse_ints(args.sizes, "--sizes")
    d = args.d if args.d is not None else max(2 * args.n, 4)
    report = {
        "exchange": perturb.exchange_demo(args.n, args.k, d, args.seed),
        "glimm": perturb.glimm_demo(sizes, args.k, args.seed),
    }
    report["pass"] = report["exchange"]["pass"] and report["glimm"]["pass"]
    _emit(report)
    return EXIT_OK if report["pass"] else EXIT_REFUTED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afkit",
        description="Exact finite-depth toolkit for AF-algebra classification data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        return p

    p = add("validate", cmd_validate, help="validate a diagram/sequence/certificate file")
    p.add_argument("file", nargs="?", default="-")

    p = add("k0", cmd_k0, help="scaled K0 group of a finite-dimensional algebra")
    p.add_argument("file", nargs="?", default="-")

    p = add("path-count", cmd_path_count, help="count paths between two vertices")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--from", required=True, help="source vertex LEVEL,INDEX")
    p.add_argument("--to", required=True, help="target vertex LEVEL,INDEX")

    p = add("telescope", cmd_telescope, help="telescope a diagram to selected levels")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--stages", required=True, help="comma-separated level selection, starting 0")

    p = add("simple", cmd_simple, help="full-connectivity window check")
    p.add_argument("file", nargs="?", default="-")

    p = add("supernatural", cmd_supernatural, help="prime-exponent prefix of a single-vertex diagram")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--depth", type=int, default=None)

    p = add("af-to-diagram", cmd_af_to_diagram, help="standard diagram of an AF sequence")
    p.add_argument("file", nargs="?", default="-")

    p = add("diagram-to-af", cmd_diagram_to_af, help="AF sequence of a unital diagram")
    p.add_argument("file", nargs="?", default="-")

    p = add("af-to-cert", cmd_af_to_cert, help="K0 certificate of an AF sequence")
    p.add_argument("file", nargs="?", default="-")

    p = add("cert-to-af", cmd_cert_to_af, help="AF sequence of a certificate")
    p.add_argument("file", nargs="?", default="-")

    p = add("unitalize", cmd_unitalize, help="restrict a unit-carrying certificate to its convex subgroups")
    p.add_argument("file", nargs="?", default="-")

    p = add("shen", cmd_shen, help="factor a positive limit hom through a kernel-killing stage")
    p.add_argument("file", nargs="?", default="-")

    p = add("equiv", cmd_equiv, help="search for an equivalence witness between two diagrams")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="accepted for symmetry; the search always targets full depth")

    p = add("zigzag", cmd_zigzag, help="build an intertwining witness between two certificates")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("verify-zigzag", cmd_verify_zigzag, help="recheck a zigzag witness")
    p.add_argument("witness")
    p.add_argument("left")
    p.add_argument("right")

    p = add("gen", cmd_gen, help="generate an example diagram")
    p.add_argument("kind", choices=["car", "trace"])
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--table", default=None, help="halting table for trace: steps or '-' per input, comma-separated")

    p = add("moduli", cmd_moduli, help="print the exact perturbation moduli")
    p.add_argument("--eps", default="1/2", help="rational in (0,1), e.g. 1/2")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=1)

    p = add("perturb-demo", cmd_perturb_demo, help="seeded numeric exchange/conjugation demo")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="2", help="block sizes for the conjugation demo, e.g. 1,2")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (_InputError, jsonio.SchemaError) as exc:
        _emit({"status": "input-error", "error": str(exc)})
        return EXIT_INPUT_ERROR
    except bratteli.ConsistencyError as exc:
        _emit({"status": "refuted", "vertex": list(exc.vertex), "error": str(exc)})
        return EXIT_REFUTED
    except (elliott.LiftNotFound, elliott.DefectNotKilled, dimgroup.KernelWitnessNotFound) as exc:
        _emit({"status": "unknown", "reason": str(exc)})
        return EXIT_UNKNOWN
    except ValueError as exc:
        _emit({"status": "refuted", "error": str(exc)})
        return EXIT_REFUTED


if __name__ == "__main__":
    sys.exit(main())
