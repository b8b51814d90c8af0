"""JSON documents for complexes, MPL functions and degeneration specs.

Numbers are JSON integers, or ``"p/q"`` strings when not integral.  Output is
deterministic: keys are sorted and lists follow the construction order of the
objects, with identifications and fan correspondences sorted.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from .affine_complex import AffineComplex, ComplexSpec, FanStructure, Identification, build_complex
from .degeneration import Component, DegenerationSpec, ZeroStratum
from .errors import SpecError
from .exact import normalize
from .fans import Fan
from .mpl import DegenerationTriple, MPLFunction

VERSION = "1"

_number = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_vector = {"type": "array", "items": _number}
_int_vector = {"type": "array", "items": {"type": "integer"}}
_index_list = {"type": "array", "items": {"type": "integer", "minimum": 0}}

COMPLEX_SCHEMA = {
    "type": "object",
    "required": ["version", "kind", "ambient_dim", "cells", "identifications", "fan_structures"],
    "properties": {
        "version": {"type": "string"},
        "kind": {"enum": ["complex", "triple"]},
        "ambient_dim": {"type": "integer", "minimum": 1, "maximum": 3},
        "allow_boundary": {"type": "boolean"},
        "cells": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "vertices"],
                "properties": {
                    "id": {"type": "string"},
                    "vertices": {"type": "array", "minItems": 1, "items": _int_vector},
                    "vertex_labels": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "identifications": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cell_a", "face_a", "cell_b", "face_b"],
                "properties": {
                    "cell_a": {"type": "string"},
                    "face_a": _index_list,
                    "cell_b": {"type": "string"},
                    "face_b": _index_list,
                    "matrix": {"type": ["array", "null"], "items": _vector},
                    "translation": {"type": ["array", "null"], "items": _number},
                },
            },
        },
        "fan_structures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["vertex", "rays", "cones", "correspondence"],
                "properties": {
                    "vertex": {"type": "string"},
                    "rays": {"type": "array", "items": _int_vector},
                    "cones": {"type": "array", "items": _index_list},
                    "correspondence": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["cell", "corner", "neighbour", "ray"],
                            "properties": {
                                "cell": {"type": "string"},
                                "corner": {"type": "integer", "minimum": 0},
                                "neighbour": {"type": "integer", "minimum": 0},
                                "ray": {"type": "integer", "minimum": 0},
                            },
                        },
                    },
                },
            },
        },
        "face_labels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cell", "face", "label"],
                "properties": {"cell": {"type": "string"}, "face": _index_list, "label": {"type": "string"}},
            },
        },
        "mpl": {
            "type": "object",
            "required": ["slopes"],
            "properties": {
                "slopes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["cell", "corner", "slope"],
                        "properties": {
                            "cell": {"type": "string"},
                            "corner": {"type": "integer", "minimum": 0},
                            "slope": _vector,
                        },
                    },
                }
            },
        },
    },
}

DEGENERATION_SCHEMA = {
    "type": "object",
    "required": ["version", "kind", "zero_strata", "components"],
    "properties": {
        "version": {"type": "string"},
        "kind": {"const": "degeneration"},
        "name": {"type": "string"},
        "zero_strata": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "rays", "rho", "ray_components"],
                "properties": {
                    "id": {"type": "string"},
                    "rays": {"type": "array", "items": _int_vector},
                    "rho": _int_vector,
                    "ray_components": {"type": "array", "items": {"type": "string"}},
                    "face_labels": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["face", "label"],
                            "properties": {"face": _index_list, "label": {"type": "string"}},
                        },
                    },
                },
            },
        },
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "rays", "ray_labels", "cones"],
                "properties": {
                    "id": {"type": "string"},
                    "rays": {"type": "array", "items": _int_vector},
                    "ray_labels": {"type": "array", "items": {"type": "string"}},
                    "cones": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["rays", "stratum"],
                            "properties": {"rays": _index_list, "stratum": {"type": "string"}},
                        },
                    },
                },
            },
        },
        "polarization": {
            "type": "object",
            "additionalProperties": {"type": "object", "additionalProperties": _int_vector},
        },
    },
}


def _num(x) -> int | str:
    x = normalize(x)
    return x if isinstance(x, int) else f"{x.numerator}/{x.denominator}"


def _vec(v) -> list:
    return [_num(x) for x in v]


def _parse_num(x):
    if isinstance(x, int):
        return x
    return normalize(Fraction(x))


def _validate(doc: Any, schema: dict):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise SpecError(f"{pointer}: {exc.message}") from None


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ----------------------------------------------------------------------
# complexes
# ----------------------------------------------------------------------

def complex_to_doc(b: AffineComplex, phi: MPLFunction | None = None) -> dict:
    spec = b.spec
    ids = b.cell_ids
    cells = []
    for c, cell in enumerate(b.cells):
        cells.append({
            "id": ids[c],
            "vertices": [list(v) for v in cell.vertices],
            "vertex_labels": b.cell_vertex_labels(c),
        })
    # canonical order: by sorted vertex tuples, ties by id; vertex order inside a cell is kept
    cells.sort(key=lambda e: (sorted(e["vertices"]), e["id"]))
    idents = []
    for ident in spec.identifications:
        entry = {
            "cell_a": ids[ident.cell_a],
            "face_a": list(ident.face_a),
            "cell_b": ids[ident.cell_b],
            "face_b": list(ident.face_b),
        }
        if ident.matrix is not None:
            entry["matrix"] = [_vec(r) for r in ident.matrix]
        if ident.translation is not None:
            entry["translation"] = _vec(ident.translation)
        idents.append(entry)
    idents.sort(key=lambda e: (e["cell_a"], e["face_a"], e["cell_b"], e["face_b"]))
    fans = []
    for v in b.vertex_ids:
        fs = b.fan_structures[v]
        corr = [
            {"cell": ids[c], "corner": i, "neighbour": j, "ray": r}
            for (c, i, j), r in fs.edge_rays.items()
        ]
        corr.sort(key=lambda e: (e["cell"], e["corner"], e["neighbour"]))
        fans.append({
            "vertex": v,
            "rays": [list(r) for r in fs.fan.rays],
            "cones": [sorted(cone) for cone in fs.fan.maximal_cones],
            "correspondence": corr,
        })
    labels = []
    for k, lab in b.face_labels.items():
        c, f = b.classes[k].rep
        labels.append({"cell": ids[c], "face": sorted(f), "label": lab})
    labels.sort(key=lambda e: (e["cell"], len(e["face"]), e["face"]))
    doc = {
        "version": VERSION,
        "kind": "complex" if phi is None else "triple",
        "ambient_dim": b.dim,
        "allow_boundary": bool(b.allow_boundary),
        "cells": cells,
        "identifications": idents,
        "fan_structures": fans,
        "face_labels": labels,
    }
    if phi is not None:
        slopes = [
            {"cell": ids[c], "corner": i, "slope": _vec(s)}
            for (c, i), s in phi.slopes.items()
        ]
        slopes.sort(key=lambda e: (e["cell"], e["corner"]))
        doc["mpl"] = {"slopes": slopes}
    return doc


def complex_from_doc(doc: dict) -> tuple[AffineComplex, MPLFunction | None]:
    _validate(doc, COMPLEX_SCHEMA)
    ids = [c["id"] for c in doc["cells"]]
    index = {cid: k for k, cid in enumerate(ids)}

    def cell_of(name, where):
        if name not in index:
            raise SpecError(f"{where}: unknown cell {name!r}")
        return index[name]

    n = doc["ambient_dim"]
    cells = []
    for k, c in enumerate(doc["cells"]):
        if any(len(v) != n for v in c["vertices"]):
            raise SpecError(f"/cells/{k}/vertices: every vertex needs {n} coordinates")
        cells.append([tuple(v) for v in c["vertices"]])
    labels = [c.get("vertex_labels") for c in doc["cells"]]
    vertex_labels = labels if all(lab is not None for lab in labels) else None
    idents = []
    for k, e in enumerate(doc["identifications"]):
        where = f"/identifications/{k}"
        mtx = e.get("matrix")
        if mtx is not None and (len(mtx) != n or any(len(r) != n for r in mtx)):
            raise SpecError(f"{where}/matrix: must be {n} x {n}")
        idents.append(Identification(
            cell_of(e["cell_a"], where + "/cell_a"), tuple(e["face_a"]),
            cell_of(e["cell_b"], where + "/cell_b"), tuple(e["face_b"]),
            tuple(tuple(_parse_num(x) for x in r) for r in mtx) if mtx is not None else None,
            tuple(_parse_num(x) for x in e["translation"]) if e.get("translation") is not None else None,
        ))
    spec = ComplexSpec(cells, idents, cell_ids=ids, vertex_labels=vertex_labels)
    fan_structures = []
    for k, f in enumerate(doc["fan_structures"]):
        fan = Fan([tuple(r) for r in f["rays"]], f["cones"], dim=n)
        edge_rays = {}
        for t, e in enumerate(f["correspondence"]):
            where = f"/fan_structures/{k}/correspondence/{t}"
            edge_rays[(cell_of(e["cell"], where + "/cell"), e["corner"], e["neighbour"])] = e["ray"]
        fan_structures.append(FanStructure(f["vertex"], fan, edge_rays))
    b = build_complex(spec, fan_structures, allow_boundary=doc.get("allow_boundary", False))
    for k, e in enumerate(doc.get("face_labels", [])):
        key = (cell_of(e["cell"], f"/face_labels/{k}/cell"), frozenset(e["face"]))
        if key not in b.class_of:
            raise SpecError(f"/face_labels/{k}/face: not a face of {e['cell']}")
        b.face_labels[b.class_of[key]] = e["label"]
    phi = None
    if "mpl" in doc:
        slopes = {}
        for k, e in enumerate(doc["mpl"]["slopes"]):
            slopes[(cell_of(e["cell"], f"/mpl/slopes/{k}/cell"), e["corner"])] = tuple(_parse_num(x) for x in e["slope"])
        phi = MPLFunction(b, slopes)
    return b, phi


def triple_to_doc(t: DegenerationTriple) -> dict:
    return complex_to_doc(t.b, t.phi)


# ----------------------------------------------------------------------
# degeneration specs
# ----------------------------------------------------------------------

def spec_to_doc(d: DegenerationSpec, polarization: dict | None = None) -> dict:
    strata = []
    for z in d.zero_strata:
        entry = {
            "id": z.id,
            "rays": [list(r) for r in z.rays],
            "rho": list(z.rho),
            "ray_components": list(z.ray_components),
        }
        if z.face_labels:
            entry["face_labels"] = sorted(
                ({"face": sorted(f), "label": lab} for f, lab in z.face_labels.items()),
                key=lambda e: (len(e["face"]), e["face"]),
            )
        strata.append(entry)
    comps = [
        {
            "id": c.id,
            "rays": [list(r) for r in c.rays],
            "ray_labels": list(c.ray_labels),
            "cones": [{"rays": list(rs), "stratum": x} for rs, x in c.cones],
        }
        for c in d.components
    ]
    doc = {"version": VERSION, "kind": "degeneration", "name": d.name, "zero_strata": strata, "components": comps}
    if polarization is not None:
        doc["polarization"] = {c: {x: list(v) for x, v in sorted(m.items())} for c, m in sorted(polarization.items())}
    return doc


def spec_from_doc(doc: dict) -> tuple[DegenerationSpec, dict | None]:
    _validate(doc, DEGENERATION_SCHEMA)
    strata = [
        ZeroStratum(
            z["id"],
            [tuple(r) for r in z["rays"]],
            tuple(z["rho"]),
            list(z["ray_components"]),
            {frozenset(e["face"]): e["label"] for e in z.get("face_labels", [])},
        )
        for z in doc["zero_strata"]
    ]
    comps = [
        Component(c["id"], [tuple(r) for r in c["rays"]], list(c["ray_labels"]), [(tuple(e["rays"]), e["stratum"]) for e in c["cones"]])
        for c in doc["components"]
    ]
    pol = doc.get("polarization")
    if pol is not None:
        pol = {c: {x: tuple(v) for x, v in m.items()} for c, m in pol.items()}
    return DegenerationSpec(strata, comps, name=doc.get("name", "")), pol


def load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError("/: expected an object with a 'kind' field")
    return doc
