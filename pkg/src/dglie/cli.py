"""Command-line front door.

Subcommands parse JSON documents, dispatch the library, and emit either a
human-readable summary or (with --json) a machine-readable result document.
JSON output is byte-deterministic for identical inputs: it carries the
command echo, sha256 digests of the inputs, the result body, and validity
annotations, but no timing.  Exit codes: 0 success, 1 mathematical
failure or axiom violation, 2 I/O, schema, or parse failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import ce as ce_mod
from . import documents
from . import envelope as env_mod
from . import moduli as moduli_mod
from .core import homology, is_quasi_iso
from .dgla import cone, free_dgla, is_fibration, is_weak_equivalence, validate_dgla
from .documents import format_rational, load_document
from .errors import DglieError, MalformedInput

EXIT_OK = 0
EXIT_MATH = 1
EXIT_PARSE = 2


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _result_document(args, inputs: list[str], result: dict) -> dict:
    return {
        "schema_version": documents.SCHEMA_VERSION,
        "command": [args.command] + [str(p) for p in inputs],
        "inputs": [{"path": str(p), "sha256": _digest(p)} for p in inputs],
        "result": result,
    }


def _emit(args, inputs, result: dict, human_lines: list[str], started: float) -> None:
    if args.json:
        doc = _result_document(args, inputs, result)
        sys.stdout.write(
            json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        )
    else:
        for line in human_lines:
            print(line)
        print(f"elapsed: {time.perf_counter() - started:.3f}s")


def _violations_body(violations):
    return [
        {
            "axiom": v.axiom,
            "witness": list(v.witness),
            "defect": {k: format_rational(c) for k, c in v.defect.items()},
        }
        for v in violations
    ]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    if doc.kind == "dgla":
        g, _ = documents.to_dgla(doc)
        report = validate_dgla(g)
        ok, violations = report.ok, report.violations
    elif doc.kind == "artin_algebra":
        R = documents.to_artin(doc)
        report = moduli_mod.validate_artin(R)
        ok, violations = report.ok, report.violations
    elif doc.kind == "dg_algebra":
        A, _ = documents.to_dg_algebra(doc)
        report = env_mod.validate_dg_algebra(A)
        ok, violations = report.ok, report.violations
    elif doc.kind == "morphism":
        documents.to_morphism(doc)  # constructor validates
        ok, violations = True, []
    elif doc.kind == "presentation":
        documents.to_presentation(doc)
        ok, violations = True, []
    else:  # pragma: no cover - schema forbids
        raise MalformedInput(f"unknown kind {doc.kind}")
    result = {"kind": doc.kind, "ok": ok, "violations": _violations_body(violations)}
    lines = [f"{args.file}: {'ok' if ok else 'INVALID'} ({doc.kind})"]
    for v in violations:
        lines.append(f"  {v.axiom} at ({', '.join(v.witness)}): defect {v.defect}")
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK if ok else EXIT_MATH


def cmd_homology(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    g, _ = documents.to_dgla(doc)
    result: dict = {"input": doc.name or args.file}
    lines = []
    if args.ce:
        cutoff = args.cutoff
        complex_obj = ce_mod.ce_chain_complex(g, cutoff)
        degrees = (
            sorted(complex_obj.space.support)
            if args.all
            else [args.degree]
        )
        rows = []
        for n in degrees:
            dim, validity = ce_mod.ce_homology(g, n, cutoff)
            rows.append({"degree": n, "dimension": dim, "validity": validity})
            lines.append(f"H_{n} = {dim}  [{validity}]")
        result["ce"] = True
        result["cutoff"] = cutoff
        result["homology"] = rows
    else:
        degrees = (
            sorted(
                set(g.space.support)
                | {n + 1 for n in g.space.support}
                | {n - 1 for n in g.space.support}
            )
            if args.all
            else [args.degree]
        )
        rows = []
        for n in degrees:
            dim, reps = homology(g.complex, n)
            row = {"degree": n, "dimension": dim, "validity": "exact"}
            if args.witnesses:
                row["representatives"] = [
                    [format_rational(x) for x in rep] for rep in reps
                ]
            rows.append(row)
            lines.append(f"H_{n} = {dim}  [exact]")
        result["ce"] = False
        result["homology"] = rows
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK


def cmd_cone(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    g, _ = documents.to_dgla(doc)
    cn, _inclusion = cone(g)
    report = validate_dgla(cn)
    if not report.ok:  # pragma: no cover - construction guarantees validity
        raise DglieError("cone failed validation")
    payload = documents.dgla_to_payload(cn)
    out_doc = documents.document_dict(
        "dgla", f"cone({doc.name or 'g'})", payload
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out_doc, fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")
    dims = {str(k): v for k, v in cn.space.dims().items()}
    result = {
        "dimensions": dims,
        "valid": True,
        "written": bool(args.out),
        "document": None if args.out else out_doc,
    }
    lines = [f"cone dimensions: {dims}"]
    if args.out:
        lines.append(f"wrote {args.out}")
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK


def cmd_env(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    g, _ = documents.to_dgla(doc)
    envelope = env_mod.universal_enveloping(g, args.cutoff)
    pbw = env_mod.sym_vs_gr_check(g, args.cutoff)
    result = {
        "cutoff": args.cutoff,
        "filtration_dims": envelope.filtration_dims(),
        "graded_dims": [
            {str(k): v for k, v in env_mod.associated_graded(envelope, m).dims().items()}
            for m in range(args.cutoff + 1)
        ],
        "pbw_dimension_check": pbw.ok,
    }
    lines = [
        f"filtration dims (cumulative): {envelope.filtration_dims()}",
        f"PBW dimension check: {'ok' if pbw.ok else 'FAILED'}",
    ]
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK if pbw.ok else EXIT_MATH


def cmd_free(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    g, _ = documents.to_dgla(doc)
    if not g.is_abelian():
        raise MalformedInput("generator documents must have an empty bracket")
    pres = free_dgla(g.complex, args.cutoff)
    weight_dims = pres.weight_dims()
    result = {
        "cutoff": args.cutoff,
        "weight_dims": {str(k): v for k, v in sorted(weight_dims.items())},
        "total_dims": {str(k): v for k, v in pres.realized.space.dims().items()},
    }
    lines = [f"weight dims: {dict(sorted(weight_dims.items()))}",
             f"degree dims: {pres.realized.space.dims()}"]
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK


def cmd_mc(args) -> int:
    started = time.perf_counter()
    lie_doc = load_document(args.lie_file)
    artin_doc = load_document(args.artin_file)
    g, _ = documents.to_dgla(lie_doc)
    R = documents.to_artin(artin_doc)
    solved = moduli_mod.mc_elements(R, g, convention=args.convention)
    value = moduli_mod.gauge_quotient(solved)
    stages = [
        {
            "order": s.order,
            "new_parameters": s.new_params,
            "constraints": [str(c) for c in s.constraints],
            "obstruction_classes": {
                str(j): [str(p) for p in classes]
                for j, classes in s.obstruction_classes.items()
            },
        }
        for s in solved.stages
    ]
    result = {
        "convention": solved.convention,
        "variables": solved.variables,
        "solution": {v: str(p) for v, p in sorted(solved.solution.items())},
        "parameters": solved.parameters,
        "full_lift_tree": solved.is_full,
        "stages": stages,
        "gauge": {
            "kind": value.gauge_orbits.kind,
            "dimension": value.gauge_orbits.dimension,
        },
        "tangent_dimension": value.tangent_dimension,
    }
    lines = [
        f"MC solutions: {len(solved.parameters)}-parameter family "
        f"({'full' if solved.is_full else 'obstructed'} lift tree)",
        f"gauge orbits: {value.gauge_orbits.kind}, "
        f"tangent dimension {value.tangent_dimension}",
    ]
    for s in solved.stages:
        if s.constraints:
            lines.append(
                f"  order {s.order} constraints: {[str(c) for c in s.constraints]}"
            )
    _emit(args, [args.lie_file, args.artin_file], result, lines, started)
    return EXIT_OK


def cmd_tangent(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    g, _ = documents.to_dgla(doc)
    dim = moduli_mod.tangent_space(g)
    result = {"tangent_dimension": dim, "routes_agree": True}
    _emit(args, [args.file], result, [f"tangent dimension: {dim}"], started)
    return EXIT_OK


def cmd_small(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    R = documents.to_artin(doc)
    cert = moduli_mod.smallness_certificate(R)
    verified = cert.verify()
    chain = [
        {
            "source_dimension": step.surjection.source.dimension,
            "target_dimension": step.surjection.target.dimension,
            "kernel_vector": [format_rational(x) for x in step.kernel_vector],
        }
        for step in cert.steps
    ]
    result = {"chain_length": len(cert.steps), "verified": verified, "steps": chain}
    lines = [
        f"chain of {len(cert.steps)} elementary quotients "
        f"({'verified' if verified else 'FAILED'})"
    ]
    for step in cert.steps:
        lines.append(
            f"  dim {step.surjection.source.dimension} -> "
            f"{step.surjection.target.dimension}"
        )
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK if verified else EXIT_MATH


def cmd_spec(args) -> int:
    started = time.perf_counter()
    pres_doc = load_document(args.presentation_file)
    artin_doc = load_document(args.artin_file)
    pres = documents.to_presentation(pres_doc)
    R = documents.to_artin(artin_doc)
    res = moduli_mod.spec_points(pres, R)
    result = {
        "kind": res.kind,
        "variables": res.variables,
        "parameter_dimension": res.parameter_dimension,
        "equations": [str(p) for p in res.equations],
        "parametrization": {v: str(p) for v, p in sorted(res.parametrization.items())},
        "residual_equations": [str(p) for p in res.residual_equations],
    }
    lines = [
        f"maps into the maximal ideal: {res.kind}"
        + (
            f", {res.parameter_dimension}-parameter family"
            if res.parameter_dimension is not None
            else ""
        )
    ]
    _emit(args, [args.presentation_file, args.artin_file], result, lines, started)
    return EXIT_OK


def cmd_qiso(args) -> int:
    started = time.perf_counter()
    doc = load_document(args.file)
    f = documents.to_morphism(doc)
    weak = is_weak_equivalence(f)
    ok_qiso, failures = is_quasi_iso(f.chain_map)
    fib, fib_witness = is_fibration(f)
    result = {
        "weak_equivalence": weak,
        "failing_degrees": failures,
        "fibration": fib,
        "fibration_witness": fib_witness,
    }
    lines = [
        f"weak equivalence: {weak}"
        + (f" (fails at degrees {failures})" if failures else ""),
        f"fibration: {fib}"
        + (f" (witness degree {fib_witness})" if fib_witness is not None else ""),
    ]
    _emit(args, [args.file], result, lines, started)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dglie",
        description="Exact computations with differential graded Lie algebras over Q",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, "check the axioms of a document")
    p.add_argument("file")

    p = add("homology", cmd_homology, "homology of a dg-Lie algebra")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--degree", type=int)
    group.add_argument("--all", action="store_true")
    p.add_argument("--ce", action="store_true", help="Chevalley-Eilenberg homology")
    p.add_argument("--cutoff", type=int, default=4, help="CE weight cutoff")
    p.add_argument("--witnesses", action="store_true")

    p = add("cone", cmd_cone, "emit the cone of a dg-Lie algebra")
    p.add_argument("file")
    p.add_argument("--out")

    p = add("env", cmd_env, "truncated universal enveloping algebra")
    p.add_argument("file")
    p.add_argument("--cutoff", type=int, required=True)

    p = add("free", cmd_free, "free dg-Lie algebra on a generator complex")
    p.add_argument("file")
    p.add_argument("--cutoff", type=int, required=True)

    p = add("mc", cmd_mc, "Maurer-Cartan solutions and gauge orbits")
    p.add_argument("lie_file")
    p.add_argument("artin_file")
    p.add_argument(
        "--convention",
        choices=["standard", "paper-literal"],
        default="standard",
    )

    p = add("tangent", cmd_tangent, "deformation tangent dimension")
    p.add_argument("file")

    p = add("small", cmd_small, "smallness certificate of an artinian algebra")
    p.add_argument("file")

    p = add("spec", cmd_spec, "augmented maps of a presented algebra into R")
    p.add_argument("presentation_file")
    p.add_argument("artin_file")

    p = add("qiso", cmd_qiso, "weak equivalence / fibration test of a morphism")
    p.add_argument("file")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DglieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
