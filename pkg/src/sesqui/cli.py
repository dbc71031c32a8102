"""Batch command-line surface: every verb reads JSON documents and writes one
deterministic JSON report (or value document) to stdout or ``--out``.

Exit codes: 0 success / property holds, 1 property violated (a counterexample
is part of the report), 2 usage or input error, 3 operation budget exceeded.
Diagnostics go to stderr.  ``--budget`` bounds the elementary matrix
operations a command may spend (default 10^7, or the SESQUI_BUDGET
environment variable); ``--threads`` is accepted for interface stability --
the current engines are sequential, so reports never depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import serialize
from .algebra import validate_algebra
from .budget import DEFAULT_LIMIT, Budget
from .double_arrow import (
    find_isometry as find_da_isometry,
    is_isometry,
    roundtrip_isometry,
    to_hermitian,
    to_sesquilinear,
)
from .errors import (
    BudgetExceededError,
    EvenDegreeError,
    NotInvertibleError,
    SesquiError,
)
from .extension import (
    FieldExtension,
    default_extension,
    extend_algebra,
    extend_system,
    restriction_check,
    springer_check,
)
from .forms import (
    System,
    classify_isometry_classes,
    find_isometry,
    hermitian_unimodular_predicate,
    orthogonal_sum,
    transform,
)
from .serialize import dumps_report, load_json_file
from .transfer import (
    enumerate_symmetric_unit_classes,
    module_endomorphism_ring,
    transfer_form,
    unit_class_bijection_report,
)
from .witt import (
    HyperbolicSpec,
    build_witt_table,
    cancellation_check,
    find_hyperbolic_structure,
    hyperbolic_system,
    standard_hyperbolic,
    symmetric_rational_invariants,
)

SCHEMA_VERSION = serialize.SCHEMA_VERSION


class _UsageError(Exception):
    pass


def _load_system(path: str) -> System:
    return serialize.system_from_json(load_json_file(path), os.path.dirname(path))


def _load_algebra(path: str):
    return serialize.algebra_from_json(load_json_file(path))


def _load_da_form(path: str):
    return serialize.da_form_from_json(load_json_file(path), os.path.dirname(path))


def _budget(args) -> Budget:
    return Budget(args.budget)


def _emit(args, payload) -> None:
    payload.setdefault("schema_version", SCHEMA_VERSION)
    text = dumps_report(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _maybe_matrix(mat):
    return None if mat is None else serialize.matrix_to_json(mat)


def _extension_from_args(args, algebra) -> FieldExtension:
    if getattr(args, "ext", None):
        return serialize.extension_from_json(load_json_file(args.ext))
    if getattr(args, "degree", None):
        if getattr(args, "modulus", None):
            K = algebra.field
            coeffs = [
                serialize.element_from_json(K, c) for c in json.loads(args.modulus)
            ]
            return FieldExtension(K, coeffs)
        return default_extension(algebra.field, args.degree)
    raise _UsageError("an extension is required: pass --ext FILE or --degree N")


# -- verb implementations (each returns the exit code) -----------------------------


def _cmd_validate_algebra(args) -> int:
    report = validate_algebra(_load_algebra(args.algebra))
    _emit(args, {"verb": "validate-algebra", **report.as_json()})
    return 0 if report.ok else 1


def _cmd_adjoints(args) -> int:
    form = _load_system(args.form)
    indices = [args.index] if args.index is not None else range(form.num_forms)
    _emit(
        args,
        {
            "verb": "adjoints",
            "adjoints": [
                {
                    "index": i,
                    "left": serialize.matrix_to_json(form.left_adjoint(i).matrix),
                    "right": serialize.matrix_to_json(form.right_adjoint(i).matrix),
                }
                for i in indices
            ],
        },
    )
    return 0


def _cmd_hermitian_check(args) -> int:
    form = _load_system(args.form)
    ok = form.is_epsilon_hermitian(args.epsilon)
    _emit(args, {"verb": "hermitian-check", "epsilon": args.epsilon, "hermitian": ok})
    return 0 if ok else 1


def _cmd_sum(args) -> int:
    total = orthogonal_sum(_load_system(args.left), _load_system(args.right))
    _emit(args, serialize.system_to_json(total))
    return 0


def _cmd_transform(args) -> int:
    form = _load_system(args.form)
    obj = load_json_file(args.matrix)
    grid = obj["matrix"] if isinstance(obj, dict) else obj
    p = serialize.matrix_from_json(form.algebra, grid, form.rank, form.rank)
    try:
        out = transform(form, p)
    except NotInvertibleError as exc:
        raise _UsageError(str(exc)) from exc
    _emit(args, serialize.system_to_json(out))
    return 0


def _cmd_isometric(args) -> int:
    a = _load_system(args.left)
    b = _load_system(args.right)
    witness = find_isometry(a, b, _budget(args))
    _emit(
        args,
        {
            "verb": "isometric",
            "isometric": witness is not None,
            "witness": _maybe_matrix(witness),
        },
    )
    return 0


def _cmd_hyperbolic(args) -> int:
    if args.spec:
        spec = serialize.hyperbolic_spec_from_json(
            load_json_file(args.spec), os.path.dirname(args.spec)
        )
        form = hyperbolic_system(spec)
    else:
        if args.standard is None or not args.algebra:
            raise _UsageError("pass --spec FILE, or --standard M with an algebra file")
        form = standard_hyperbolic(_load_algebra(args.algebra), args.standard, args.epsilon)
    _emit(args, serialize.system_to_json(form))
    return 0


def _cmd_is_hyperbolic(args) -> int:
    form = _load_system(args.form)
    limit = args.bound if args.bound is not None else args.budget
    found = find_hyperbolic_structure(form, Budget(limit))
    payload = {"verb": "is-hyperbolic", "hyperbolic": found is not None}
    if found is not None:
        spec, witness = found
        payload["structure"] = serialize.hyperbolic_spec_to_json(spec)
        payload["witness"] = serialize.matrix_to_json(witness)
    _emit(args, payload)
    return 0


def _cmd_witt_table(args) -> int:
    algebra = _load_algebra(args.algebra)
    predicate = None
    if args.unimodular or args.epsilon is not None:
        predicate = hermitian_unimodular_predicate(
            args.epsilon if args.epsilon is not None else 1
        )
    table = build_witt_table(
        algebra, args.rank_bound, args.num_forms, predicate, _budget(args)
    )
    _emit(args, serialize.witt_table_to_json(table))
    return 0


def _cmd_f_functor(args) -> int:
    _emit(args, serialize.da_form_to_json(to_hermitian(_load_system(args.form))))
    return 0


def _cmd_g_functor(args) -> int:
    h = _load_da_form(args.form)
    issues = h.validity_report()
    if issues:
        raise _UsageError("invalid hermitian form: " + "; ".join(issues))
    _emit(args, serialize.system_to_json(to_sesquilinear(h)))
    return 0


def _cmd_roundtrip_check(args) -> int:
    doc = load_json_file(args.form)
    if "xi" in doc:
        h = serialize.da_form_from_json(doc, os.path.dirname(args.form))
        issues = h.validity_report()
        if issues:
            raise _UsageError("invalid hermitian form: " + "; ".join(issues))
        phi, psi = roundtrip_isometry(h)
        back = to_hermitian(to_sesquilinear(h))
        ok = is_isometry(back, h, phi, psi)
        _emit(
            args,
            {
                "verb": "roundtrip-check",
                "direction": "through-sesquilinear",
                "ok": ok,
                "witness": [serialize.matrix_to_json(phi), serialize.matrix_to_json(psi)],
            },
        )
        return 0 if ok else 1
    form = serialize.system_from_json(doc, os.path.dirname(args.form))
    back = to_sesquilinear(to_hermitian(form))
    ok = back == form
    _emit(args, {"verb": "roundtrip-check", "direction": "through-hermitian", "ok": ok})
    return 0 if ok else 1


def _cmd_transfer(args) -> int:
    h0_doc = load_json_file(args.h0)
    form_doc = load_json_file(args.form)
    if "xi" in h0_doc:
        h0 = serialize.da_form_from_json(h0_doc, os.path.dirname(args.h0))
        h = serialize.da_form_from_json(form_doc, os.path.dirname(args.form))
        from .transfer import endomorphism_ring

        ring = endomorphism_ring(h0.obj).with_involution(h0)
    else:
        h0 = serialize.system_from_json(h0_doc, os.path.dirname(args.h0))
        h = serialize.system_from_json(form_doc, os.path.dirname(args.form))
        if h0.num_forms != 1 or h.num_forms != 1:
            raise _UsageError("transfer expects single forms")
        ring = module_endomorphism_ring(h0.algebra, h0.rank).with_involution(h0)
    transferred = transfer_form(ring, h)
    _emit(args, serialize.system_to_json(transferred))
    return 0


def _cmd_enumerate_h(args) -> int:
    algebra = _load_algebra(args.algebra)
    reps = enumerate_symmetric_unit_classes(algebra, _budget(args))
    _emit(
        args,
        {
            "verb": "enumerate-h",
            "classes": [serialize.algebra_element_to_json(algebra, r) for r in reps],
        },
    )
    return 0


def _cmd_verify_5_1_2(args) -> int:
    form = _load_system(args.form)
    report = unit_class_bijection_report(form, _budget(args))
    _emit(args, {"verb": "verify-5-1-2", **report.as_json_summary()})
    return 0 if report.bijection and report.theta_independent else 1


def _cmd_extend(args) -> int:
    doc = load_json_file(args.input)
    if "structure_constants" in doc:
        algebra = serialize.algebra_from_json(doc)
        ext = _extension_from_args(args, algebra)
        _emit(args, serialize.algebra_to_json(extend_algebra(algebra, ext)))
        return 0
    if "grams" in doc:
        form = serialize.system_from_json(doc, os.path.dirname(args.input))
        ext = _extension_from_args(args, form.algebra)
        _emit(args, serialize.system_to_json(extend_system(ext, form)))
        return 0
    raise _UsageError("input must be an algebra or a form document")


def _cmd_springer_check(args) -> int:
    algebra = _load_algebra(args.algebra)
    ext = _extension_from_args(args, algebra)
    report = springer_check(
        algebra, ext, args.rank_bound, args.num_forms, _budget(args)
    )
    _emit(
        args,
        {
            "verb": "springer-check",
            "degree": report.degree,
            "rank_bound": report.rank_bound,
            "num_forms": report.num_forms,
            "classes_by_rank": [list(x) for x in report.classes_by_rank],
            "pairs_checked": report.pairs_checked,
            "counterexamples": [
                {
                    "rank": c.rank,
                    "left": serialize.system_to_json(c.left),
                    "right": serialize.system_to_json(c.right),
                    "extension_witness": serialize.matrix_to_json(c.witness),
                }
                for c in report.collapses
            ],
        },
    )
    return 0 if report.descent_holds else 1


def _cmd_restriction_check(args) -> int:
    algebra = _load_algebra(args.algebra)
    ext = _extension_from_args(args, algebra)
    report = restriction_check(
        algebra, ext, args.rank_bound, args.epsilon, _budget(args)
    )
    _emit(
        args,
        {
            "verb": "restriction-check",
            "degree": report.degree,
            "rank_bound": report.rank_bound,
            "epsilon": report.epsilon,
            "classes_checked": report.classes_checked,
            "hyperbolicity_violations": [
                serialize.system_to_json(v) for v in report.hyperbolicity_violations
            ],
            "square_instances": report.square_instances,
            "square_failures": len(report.square_failures),
        },
    )
    return 0 if report.ok else 1


def _cmd_cancellation_check(args) -> int:
    v1 = _load_system(args.v1)
    v2 = _load_system(args.v2)
    w = _load_system(args.w)
    report = cancellation_check(v1, v2, w, _budget(args))
    payload = {
        "verb": "cancellation-check",
        "premise": report["premise"],
        "conclusion": report["conclusion"],
        "consistent": report["consistent"],
    }
    if report.get("premise_witness") is not None:
        payload["premise_witness"] = serialize.matrix_to_json(report["premise_witness"])
    if report.get("conclusion_witness") is not None:
        payload["conclusion_witness"] = serialize.matrix_to_json(
            report["conclusion_witness"]
        )
    _emit(args, payload)
    return 0 if report["consistent"] else 1


def _cmd_invariants(args) -> int:
    form = _load_system(args.form)
    try:
        inv = symmetric_rational_invariants(form)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    _emit(
        args,
        {
            "verb": "invariants",
            "rank": inv.rank,
            "determinant_class": inv.determinant_class,
            "signature": inv.signature,
        },
    )
    return 0


def _cmd_classify(args) -> int:
    algebra = _load_algebra(args.algebra)
    predicate = None
    if args.unimodular or args.epsilon is not None:
        predicate = hermitian_unimodular_predicate(
            args.epsilon if args.epsilon is not None else 1
        )
    reps = classify_isometry_classes(
        algebra, args.rank, args.num_forms, predicate, _budget(args)
    )
    _emit(
        args,
        {
            "verb": "classify",
            "rank": args.rank,
            "num_forms": args.num_forms,
            "classes": [
                [serialize.matrix_to_json(g) for g in rep.grams] for rep in reps
            ],
        },
    )
    return 0


# -- argument parsing ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sesqui",
        description="Exact sesquilinear/hermitian form computations over algebras with involution.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, fn, configure):
        p = sub.add_parser(name)
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument(
            "--budget",
            type=int,
            default=int(os.environ.get("SESQUI_BUDGET", DEFAULT_LIMIT)),
            help="elementary-operation budget (default 10^7 or $SESQUI_BUDGET)",
        )
        p.add_argument("--threads", type=int, default=1, help="accepted; output never depends on it")
        configure(p)
        p.set_defaults(func=fn)
        return p

    add("validate-algebra", _cmd_validate_algebra, lambda p: p.add_argument("algebra"))
    add(
        "adjoints",
        _cmd_adjoints,
        lambda p: (p.add_argument("form"), p.add_argument("--index", type=int)),
    )
    add(
        "hermitian-check",
        _cmd_hermitian_check,
        lambda p: (
            p.add_argument("--epsilon", type=int, choices=(1, -1), required=True),
            p.add_argument("form"),
        ),
    )
    add("sum", _cmd_sum, lambda p: (p.add_argument("left"), p.add_argument("right")))
    add(
        "transform",
        _cmd_transform,
        lambda p: (p.add_argument("form"), p.add_argument("matrix")),
    )
    add(
        "isometric",
        _cmd_isometric,
        lambda p: (p.add_argument("left"), p.add_argument("right")),
    )
    add(
        "hyperbolic",
        _cmd_hyperbolic,
        lambda p: (
            p.add_argument("--spec"),
            p.add_argument("--standard", type=int),
            p.add_argument("--epsilon", type=int, choices=(1, -1), default=1),
            p.add_argument("algebra", nargs="?"),
        ),
    )
    add(
        "is-hyperbolic",
        _cmd_is_hyperbolic,
        lambda p: (
            p.add_argument("--bound", type=int, help="search budget for this command"),
            p.add_argument("form"),
        ),
    )
    add(
        "witt-table",
        _cmd_witt_table,
        lambda p: (
            p.add_argument("--rank-bound", type=int, required=True),
            p.add_argument("--num-forms", type=int, default=1),
            p.add_argument("--epsilon", type=int, choices=(1, -1)),
            p.add_argument("--unimodular", action="store_true"),
            p.add_argument("algebra"),
        ),
    )
    add("f-functor", _cmd_f_functor, lambda p: p.add_argument("form"))
    add("g-functor", _cmd_g_functor, lambda p: p.add_argument("form"))
    add("roundtrip-check", _cmd_roundtrip_check, lambda p: p.add_argument("form"))
    add(
        "transfer",
        _cmd_transfer,
        lambda p: (p.add_argument("--h0", required=True), p.add_argument("form")),
    )
    add("enumerate-h", _cmd_enumerate_h, lambda p: p.add_argument("algebra"))
    add("verify-5-1-2", _cmd_verify_5_1_2, lambda p: p.add_argument("form"))
    add(
        "extend",
        _cmd_extend,
        lambda p: (
            p.add_argument("--ext"),
            p.add_argument("--degree", type=int),
            p.add_argument("--modulus", help="JSON list of base-field coefficients"),
            p.add_argument("input"),
        ),
    )
    add(
        "springer-check",
        _cmd_springer_check,
        lambda p: (
            p.add_argument("--ext"),
            p.add_argument("--degree", type=int),
            p.add_argument("--modulus"),
            p.add_argument("--rank-bound", type=int, required=True),
            p.add_argument("--num-forms", type=int, default=1),
            p.add_argument("algebra"),
        ),
    )
    add(
        "restriction-check",
        _cmd_restriction_check,
        lambda p: (
            p.add_argument("--ext"),
            p.add_argument("--degree", type=int),
            p.add_argument("--modulus"),
            p.add_argument("--rank-bound", type=int, required=True),
            p.add_argument("--epsilon", type=int, choices=(1, -1), default=1),
            p.add_argument("algebra"),
        ),
    )
    add(
        "cancellation-check",
        _cmd_cancellation_check,
        lambda p: (
            p.add_argument("v1"),
            p.add_argument("v2"),
            p.add_argument("w"),
        ),
    )
    add("invariants", _cmd_invariants, lambda p: p.add_argument("form"))
    add(
        "classify",
        _cmd_classify,
        lambda p: (
            p.add_argument("--rank", type=int, required=True),
            p.add_argument("--num-forms", type=int, default=1),
            p.add_argument("--epsilon", type=int, choices=(1, -1)),
            p.add_argument("--unimodular", action="store_true"),
            p.add_argument("algebra"),
        ),
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (EvenDegreeError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SesquiError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
