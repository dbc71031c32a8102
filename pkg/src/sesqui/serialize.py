"""JSON-based structured-text formats for every value the CLI consumes.

Field elements serialize by field kind: ints for prime fields, coefficient
lists (ascending) for extensions, exact "num/den" strings for rationals.
Matrices over an algebra are nested arrays of coefficient vectors; shapes come
from the enclosing document (rank, dims), so zero-sized matrices round-trip.

Documents:

* algebra   {"base", "dim", "structure_constants", "unit", "involution"}
* system    {"algebra" (inline object or path string), "rank", "grams"}
* DA object {"algebra", "m", "n", "arrows": [[F, G], ...]}
* DA form   object fields plus {"xi": [xi1, xi2], "epsilon"}
* extension {"base", "degree", "modulus"}
* hyperbolic structure {"algebra", "m", "n", "arrows": [[F, G], ...]}
* witt table / reports: plain JSON with "schema_version"

``dumps_report`` renders deterministically (sorted keys) so identical inputs
produce byte-identical reports.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

from .algebra import Algebra, Mat
from .double_arrow import DAForm, DAObject
from .errors import DimensionMismatch
from .extension import FieldExtension
from .fields import (
    BaseField,
    ExtensionField,
    PrimeField,
    Rationals,
    quadratic_rationals,
)
from .forms import System
from .witt import HyperbolicSpec, WittClassTable

SCHEMA_VERSION = 1


# -- fields -------------------------------------------------------------------


def field_to_json(field: BaseField):
    if isinstance(field, Rationals):
        return {"kind": "rationals"}
    if isinstance(field, PrimeField):
        return {"kind": "prime", "p": field.p}
    if isinstance(field, ExtensionField):
        base = field.base
        if isinstance(base, PrimeField):
            return {
                "kind": "finite",
                "p": base.p,
                "e": field.degree,
                "modulus": [int(c) for c in field.modulus],
            }
        if isinstance(base, Rationals):
            b, c = field.modulus[1], field.modulus[0]
            if b == 0:
                return {"kind": "quadratic", "d": _fraction_to_str(-c)}
            return {
                "kind": "extension",
                "base": field_to_json(base),
                "modulus": [element_to_json(base, x) for x in field.modulus],
            }
        return {
            "kind": "extension",
            "base": field_to_json(base),
            "modulus": [element_to_json(base, x) for x in field.modulus],
        }
    raise ValueError(f"unknown field {field!r}")


def field_from_json(obj) -> BaseField:
    kind = obj["kind"]
    if kind == "rationals":
        return Rationals()
    if kind == "prime":
        return PrimeField(obj["p"])
    if kind == "finite":
        p, e = obj["p"], obj["e"]
        if e == 1:
            return PrimeField(p)
        return ExtensionField(PrimeField(p), [c % p for c in obj["modulus"]])
    if kind == "quadratic":
        return quadratic_rationals(_fraction_from_json(obj["d"]))
    if kind == "extension":
        base = field_from_json(obj["base"])
        return ExtensionField(base, [element_from_json(base, c) for c in obj["modulus"]])
    raise ValueError(f"unknown field kind {kind!r}")


# -- field elements -------------------------------------------------------------


def _fraction_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _fraction_from_json(obj) -> Fraction:
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    raise ValueError(f"cannot read a rational from {obj!r}")


def element_to_json(field: BaseField, a):
    if isinstance(field, Rationals):
        return _fraction_to_str(a)
    if isinstance(field, PrimeField):
        return int(a)
    if isinstance(field, ExtensionField):
        return [element_to_json(field.base, c) for c in a]
    raise ValueError(f"unknown field {field!r}")


def element_from_json(field: BaseField, obj):
    if isinstance(field, Rationals):
        return _fraction_from_json(obj)
    if isinstance(field, PrimeField):
        if not isinstance(obj, int):
            raise ValueError(f"prime-field element must be an int, got {obj!r}")
        return obj % field.p
    if isinstance(field, ExtensionField):
        if not isinstance(obj, list) or len(obj) != field.degree:
            raise ValueError("extension element must be a coefficient list")
        return tuple(element_from_json(field.base, c) for c in obj)
    raise ValueError(f"unknown field {field!r}")


# -- algebra elements and matrices ------------------------------------------------


def algebra_element_to_json(algebra: Algebra, a):
    return [element_to_json(algebra.field, c) for c in a]


def algebra_element_from_json(algebra: Algebra, obj):
    if not isinstance(obj, list) or len(obj) != algebra.dim:
        raise DimensionMismatch("element coefficient vector has the wrong length")
    return tuple(element_from_json(algebra.field, c) for c in obj)


def matrix_to_json(mat: Mat):
    return [
        [algebra_element_to_json(mat.algebra, e) for e in row] for row in mat.entries
    ]


def matrix_from_json(algebra: Algebra, obj, rows: int, cols: int) -> Mat:
    if not isinstance(obj, list) or len(obj) != rows:
        raise DimensionMismatch(f"expected {rows} matrix rows")
    entries = []
    for row in obj:
        if not isinstance(row, list) or len(row) != cols:
            raise DimensionMismatch(f"expected {cols} matrix columns")
        entries.append(
            tuple(algebra_element_from_json(algebra, e) for e in row)
        )
    return Mat(algebra, rows, cols, tuple(entries))


# -- algebras -------------------------------------------------------------------


def algebra_to_json(algebra: Algebra):
    K = algebra.field
    return {
        "base": field_to_json(K),
        "dim": algebra.dim,
        "structure_constants": [
            [[element_to_json(K, c) for c in entry] for entry in row]
            for row in algebra.sc
        ],
        "unit": [element_to_json(K, c) for c in algebra.unit],
        "involution": [[element_to_json(K, c) for c in row] for row in algebra.invol],
    }


def algebra_from_json(obj) -> Algebra:
    K = field_from_json(obj["base"])
    m = obj["dim"]
    sc = [
        [[element_from_json(K, c) for c in entry] for entry in row]
        for row in obj["structure_constants"]
    ]
    unit = [element_from_json(K, c) for c in obj["unit"]]
    invol = [[element_from_json(K, c) for c in row] for row in obj["involution"]]
    if len(sc) != m:
        raise DimensionMismatch("structure constants do not match the dimension")
    return Algebra(K, sc, unit, invol)


# -- systems --------------------------------------------------------------------


def system_to_json(form: System):
    return {
        "algebra": algebra_to_json(form.algebra),
        "rank": form.rank,
        "grams": [matrix_to_json(g) for g in form.grams],
    }


def _resolve_algebra_field(obj, base_dir: str | None) -> Algebra:
    spec = obj["algebra"]
    if isinstance(spec, str):
        path = spec if os.path.isabs(spec) or base_dir is None else os.path.join(base_dir, spec)
        with open(path, "r", encoding="utf-8") as fh:
            return algebra_from_json(json.load(fh))
    if isinstance(spec, dict) and "file" in spec:
        path = spec["file"]
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path, "r", encoding="utf-8") as fh:
            return algebra_from_json(json.load(fh))
    return algebra_from_json(spec)


def system_from_json(obj, base_dir: str | None = None) -> System:
    algebra = _resolve_algebra_field(obj, base_dir)
    rank = obj["rank"]
    grams = [matrix_from_json(algebra, g, rank, rank) for g in obj["grams"]]
    return System(algebra, rank, grams)


# -- double-arrow objects and forms --------------------------------------------------


def da_object_to_json(obj: DAObject):
    return {
        "algebra": algebra_to_json(obj.algebra),
        "m": obj.source_rank,
        "n": obj.target_rank,
        "arrows": [[matrix_to_json(f), matrix_to_json(g)] for f, g in obj.arrows],
    }


def da_object_from_json(obj, base_dir: str | None = None) -> DAObject:
    algebra = _resolve_algebra_field(obj, base_dir)
    m, n = obj["m"], obj["n"]
    arrows = [
        (
            matrix_from_json(algebra, pair[0], n, m),
            matrix_from_json(algebra, pair[1], n, m),
        )
        for pair in obj["arrows"]
    ]
    return DAObject(algebra, m, n, arrows)


def da_form_to_json(h: DAForm):
    out = da_object_to_json(h.obj)
    out["xi"] = [matrix_to_json(h.xi1), matrix_to_json(h.xi2)]
    out["epsilon"] = h.epsilon
    return out


def da_form_from_json(obj, base_dir: str | None = None) -> DAForm:
    da_obj = da_object_from_json(obj, base_dir)
    m, n = da_obj.source_rank, da_obj.target_rank
    xi1 = matrix_from_json(da_obj.algebra, obj["xi"][0], n, m)
    xi2 = matrix_from_json(da_obj.algebra, obj["xi"][1], m, n)
    return DAForm(da_obj, xi1, xi2, obj.get("epsilon", 1))


# -- hyperbolic structures ------------------------------------------------------------


def hyperbolic_spec_to_json(spec: HyperbolicSpec):
    return {
        "algebra": algebra_to_json(spec.algebra),
        "m": spec.source_rank,
        "n": spec.target_rank,
        "arrows": [[matrix_to_json(f), matrix_to_json(g)] for f, g in spec.arrows],
    }


def hyperbolic_spec_from_json(obj, base_dir: str | None = None) -> HyperbolicSpec:
    algebra = _resolve_algebra_field(obj, base_dir)
    m, n = obj["m"], obj["n"]
    arrows = [
        (
            matrix_from_json(algebra, pair[0], n, m),
            matrix_from_json(algebra, pair[1], n, m),
        )
        for pair in obj["arrows"]
    ]
    return HyperbolicSpec(arrows)


# -- field extensions -------------------------------------------------------------------


def extension_to_json(ext: FieldExtension):
    return {
        "base": field_to_json(ext.base),
        "degree": ext.degree,
        "modulus": [element_to_json(ext.base, c) for c in ext.modulus],
    }


def extension_from_json(obj) -> FieldExtension:
    base = field_from_json(obj["base"])
    modulus = [element_from_json(base, c) for c in obj["modulus"]]
    ext = FieldExtension(base, modulus)
    if "degree" in obj and obj["degree"] != ext.degree:
        raise DimensionMismatch("declared degree does not match the modulus")
    return ext


# -- witt tables ---------------------------------------------------------------------------


def witt_table_to_json(table: WittClassTable):
    return {
        "schema_version": SCHEMA_VERSION,
        "algebra": algebra_to_json(table.algebra),
        "rank_bound": table.rank_bound,
        "num_forms": table.num_forms,
        "filter": table.filter_description,
        "witt_class_count": table.witt_class_count,
        "sum_law_consistent": table.sum_law_consistent,
        "classes": [
            {
                "rank": e.rank,
                "grams": [matrix_to_json(g) for g in e.representative.grams],
                "is_hyperbolic": e.is_hyperbolic,
                "witt_class_id": e.witt_class_id,
            }
            for e in table.entries
        ],
        "sum_law": [
            {"left": k[0], "right": k[1], "sum": v} for k, v in table.sum_law
        ],
    }


# -- report rendering ----------------------------------------------------------------------


def dumps_report(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
