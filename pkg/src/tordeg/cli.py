"""Command line front end.

Every command reads one JSON document (``--input`` or stdin) and writes either
a document (``corpus``, ``legendre``, ``dual-complex``, ``intersection-complex``)
or a report.  Exit status: 0 success, 1 invalid input, 2 a mathematical
property failed.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Any

from . import corpus as corpus_mod
from . import io
from .affine_complex import AffineComplex, find_isomorphism
from .degeneration import (
    DegenerationSpec,
    central_fiber,
    dual_intersection_complex,
    intersection_complex,
    local_model,
    polarization_to_mpl,
)
from .errors import NotConvex, NotToricDecomposition, SpecError, TordegError
from .exact import fmt_matrix, fmt_scalar, fmt_vector, shear_normal_form
from .fibration import family_monodromy, holonomy_duality_check
from .mpl import DegenerationTriple, MPLFunction, discrete_legendre, legendre_involution_check, mpl_from_kinks, triples_isomorphic

PROPERTY_ERRORS = (NotConvex, NotToricDecomposition)


class PropertyFailure(Exception):
    """Raised after a report is written when a checked property fails."""


# ----------------------------------------------------------------------
# input handling
# ----------------------------------------------------------------------

def _read(args) -> dict:
    """Parse the input document once; stdin can only be consumed a single time."""
    doc = getattr(args, "doc", None)
    if doc is None:
        if getattr(args, "input", None) and args.input != "-":
            with open(args.input, encoding="utf-8") as fh:
                doc = io.load(fh.read())
        else:
            doc = io.load(sys.stdin.read())
        args.doc = doc
    return doc


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"expected comma separated integers, got {text!r}") from None


def _polarization(d: DegenerationSpec, doc_pol, args):
    params = {}
    if getattr(args, "degrees", None):
        params["degrees"] = _ints(args.degrees)
    if getattr(args, "degree", None) is not None:
        params["degree"] = args.degree
    if params or doc_pol is None:
        return corpus_mod.polarization_for(d, **params)
    return doc_pol


def _load_complex(doc: dict, args, need_mpl: bool = False):
    """Return (complex, mpl or None, spec or None, polarization or None)."""
    allow = getattr(args, "allow_boundary", False)
    if doc["kind"] == "degeneration":
        d, pol = io.spec_from_doc(doc)
        b = dual_intersection_complex(d, allow_boundary=allow)
        phi = None
        if need_mpl or getattr(args, "degrees", None) or getattr(args, "degree", None) is not None or pol is not None:
            if not getattr(args, "kinks", None):
                try:
                    pol = _polarization(d, pol, args)
                    phi = polarization_to_mpl(b, pol)
                except SpecError:
                    if need_mpl:
                        raise
        if getattr(args, "kinks", None):
            phi = _kinks_mpl(b, args.kinks)
        return b, phi, d, pol
    b, phi = io.complex_from_doc(doc)
    if getattr(args, "kinks", None):
        phi = _kinks_mpl(b, args.kinks)
    if need_mpl and phi is None:
        raise SpecError("this command needs an MPL function: give a triple document or --kinks")
    return b, phi, None, None


def _kinks_mpl(b: AffineComplex, text: str) -> MPLFunction:
    text = text.strip()
    if "=" not in text:
        k = int(text)
        return mpl_from_kinks(b, {fc.id: k for fc in b.classes_of_dim(b.dim - 1)})
    kinks = {}
    for part in text.split(","):
        name, _, val = part.partition("=")
        kinks[name.strip()] = int(val)
    return mpl_from_kinks(b, kinks)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_corpus(args) -> dict:
    params: dict[str, Any] = {}
    for key in ("lengths", "degrees", "size", "lattice"):
        val = getattr(args, key)
        if val is not None:
            params[key] = _ints(val)
    if args.dim is not None:
        params["n"] = args.dim
    if args.n is not None:
        params["n"] = args.n
    if args.degree is not None:
        params["degree"] = args.degree
    if args.kinks is not None:
        params["kinks"] = int(args.kinks)
    obj = corpus_mod.example_corpus(args.name, **params)
    if isinstance(obj, DegenerationSpec):
        try:
            pol = corpus_mod.polarization_for(obj, **{k: v for k, v in params.items() if k in ("degrees", "degree")})
        except SpecError:
            pol = None
        return io.spec_to_doc(obj, pol)
    if isinstance(obj, DegenerationTriple):
        return io.triple_to_doc(obj)
    return io.complex_to_doc(obj)


def _simplices(b: AffineComplex, simplices) -> list[dict]:
    return [
        {"simplex": b.describe_simplex(s), "dim": s.dim, "points": [fmt_vector(p) for p in b.bar_simplex_points(s)]}
        for s in simplices
    ]


def cmd_build(args) -> dict:
    b, phi, _, _ = _load_complex(_read(args), args)
    toric = b.check_toric() if not b.allow_boundary else {}
    out = {
        "dim": b.dim,
        "f_vector": b.f_vector,
        "vertices": list(b.vertex_ids),
        "delta_prime": _simplices(b, b.delta_prime) if not b.allow_boundary else [],
        "discriminant": _simplices(b, b.minimal_discriminant()) if not b.allow_boundary else [],
        "toric": all(r["ok"] for r in toric.values()),
        "toric_failures": sorted(k for k, r in toric.items() if not r["ok"]),
    }
    if phi is not None:
        out["mpl"] = _mpl_report(b, phi)
    return out


def _mpl_report(b, phi) -> dict:
    rep = phi.validate()
    kinks = {}
    if rep["compatible"]:
        kinks = {b.class_name(k): fmt_scalar(v) for k, v in sorted(phi.kinks().items())}
    return {
        "compatible": rep["compatible"],
        "strictly_convex": rep["strictly_convex"],
        "integral": rep["integral"],
        "kinks": kinks,
        "failures": rep["failures"],
    }


def cmd_legendre(args) -> dict:
    b, phi, _, _ = _load_complex(_read(args), args, need_mpl=True)
    res = discrete_legendre(DegenerationTriple(b, phi))
    return io.triple_to_doc(res.triple)


def cmd_involution(args) -> dict:
    b, phi, _, _ = _load_complex(_read(args), args, need_mpl=True)
    ok, iso = legendre_involution_check(DegenerationTriple(b, phi))
    out = {"involution": ok}
    if iso is not None:
        out["isomorphism"] = iso.as_dict(b, b)
    if not ok:
        raise PropertyFailure(out)
    return out


def cmd_dual_complex(args) -> dict:
    doc = _read(args)
    if doc["kind"] != "degeneration":
        raise SpecError("/kind: dual-complex needs a degeneration document")
    d, _ = io.spec_from_doc(doc)
    return io.complex_to_doc(dual_intersection_complex(d, allow_boundary=args.allow_boundary))


def cmd_intersection_complex(args) -> dict:
    doc = _read(args)
    if doc["kind"] != "degeneration":
        raise SpecError("/kind: intersection-complex needs a degeneration document")
    d, pol = io.spec_from_doc(doc)
    pol = _polarization(d, pol, args)
    return io.complex_to_doc(intersection_complex(d, pol))


def cmd_central_fiber(args) -> dict:
    b, _, _, _ = _load_complex(_read(args), args)
    cf = central_fiber(b)
    comps = {}
    for v, data in cf.components.items():
        fan = data["fan"]
        comps[v] = {
            "rays": [list(r) for r in fan.rays],
            "ray_labels": data["ray_labels"],
            "cones": [{"rays": sorted(c), "stratum": lab} for c, lab in zip(fan.maximal_cones, data["cone_labels"])],
        }
    gluings = [
        {**g, "quotient_map": fmt_matrix(g["quotient_map"]) if g["quotient_map"] else []}
        for g in cf.gluings
    ]
    return {"components": comps, "gluings": gluings, "strata": cf.strata}


def cmd_local_model(args) -> dict:
    b, _, _, _ = _load_complex(_read(args), args)
    out = {}
    cells = range(len(b.cells)) if args.cell is None else [b.cell_index(args.cell)]
    for c in cells:
        lm = local_model(b.cells[c])
        out[b.cell_ids[c]] = {
            "cone_rays": [list(r) for r in lm.cone.rays],
            "monomial": list(lm.monomial),
            "generators": [list(g) for g in lm.generators],
            "relations": [{"lhs": list(lhs), "rhs": list(rhs)} for lhs, rhs in lm.relations],
            "equations": lm.relation_strings(),
            "certified": lm.certified,
            "degree_bound": lm.degree_bound,
        }
    return out


def _affine_report(h) -> dict:
    out = {"linear": fmt_matrix(h.linear), "translation": fmt_vector(h.translation)}
    nf = shear_normal_form(h.linear)
    if nf is not None:
        out["normal_form"] = fmt_matrix(nf[0])
        out["conjugator"] = fmt_matrix(nf[1])
    return out


def cmd_holonomy(args) -> dict:
    b, _, _, _ = _load_complex(_read(args), args)
    out = {"loop": args.loop, **_affine_report(b.holonomy(args.loop))}
    return out


def cmd_monodromy(args) -> dict:
    b, _, _, _ = _load_complex(_read(args), args)
    fm = family_monodromy(b.holonomy(args.loop), allow_scaling=args.scale)
    return {"loop": args.loop, "matrix": fmt_matrix(fm.matrix), "scale": fm.scale, "unipotent": fm.is_unipotent()}


def cmd_duality_check(args) -> dict:
    b, phi, _, _ = _load_complex(_read(args), args, need_mpl=True)
    res = discrete_legendre(DegenerationTriple(b, phi))
    rows = holonomy_duality_check(b, res, args.loop, args.dual_loop or None)
    out = {
        "pairs": [
            {
                "loop": r["loop"],
                "dual_loop": r["dual_loop"],
                "linear": fmt_matrix(r["linear"]),
                "dual_linear": fmt_matrix(r["dual_linear"]),
                "translation": fmt_vector(r["translation"]),
                "dual_translation": fmt_vector(r["dual_translation"]),
                "natural_ok": r["natural_ok"],
                "conjugate_ok": r["conjugate_ok"],
                "conjugator": fmt_matrix(r["conjugator"]) if r["conjugator"] is not None else None,
            }
            for r in rows
        ]
    }
    out["ok"] = all(r["ok"] for r in rows)
    if not out["ok"]:
        raise PropertyFailure(out)
    return out


def cmd_check(args) -> dict:
    b, phi, _, _ = _load_complex(_read(args), args)
    checks = {"manifold": True}
    if not b.allow_boundary:
        checks["toric"] = b.is_toric()
    if phi is not None:
        rep = phi.validate()
        checks["mpl_compatible"] = rep["compatible"]
        checks["mpl_strictly_convex"] = rep["strictly_convex"]
        if rep["strictly_convex"]:
            checks["legendre_involution"] = legendre_involution_check(DegenerationTriple(b, phi))[0]
    if args.isomorphic_to:
        with open(args.isomorphic_to, encoding="utf-8") as fh:
            other_doc = io.load(fh.read())
        other, other_phi, _, _ = _load_complex(other_doc, argparse.Namespace(allow_boundary=args.allow_boundary))
        if phi is not None and other_phi is not None:
            checks["isomorphic"] = triples_isomorphic(DegenerationTriple(b, phi), DegenerationTriple(other, other_phi)) is not None
        else:
            checks["isomorphic"] = find_isomorphism(b, other) is not None
    out = {"checks": checks, "ok": all(checks.values())}
    if not out["ok"]:
        raise PropertyFailure(out)
    return out


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------

def plot_data(b: AffineComplex) -> dict:
    """Cell outlines in their own coordinates plus discriminant points, for plotting."""
    cells = []
    for c, cell in enumerate(b.cells):
        pts = list(cell.vertices)
        if b.dim == 2:
            cx = sum(p[0] for p in pts) / len(pts)
            cy = sum(p[1] for p in pts) / len(pts)
            order = sorted(range(len(pts)), key=lambda i: math.atan2(pts[i][1] - cy, pts[i][0] - cx))
        else:
            order = sorted(range(len(pts)), key=lambda i: pts[i])
        cells.append({
            "id": b.cell_ids[c],
            "outline": [list(pts[i]) for i in order],
            "labels": [b.corner_vertex[(c, i)] for i in order],
        })
    disc = []
    if not b.allow_boundary:
        for s in b.minimal_discriminant():
            disc.append({"cell": b.cell_ids[s.cell], "points": [fmt_vector(p) for p in b.bar_simplex_points(s)]})
    return {"dim": b.dim, "cells": cells, "discriminant": disc}


def render_svg(data: dict) -> str:
    unit, pad = 60, 30
    boxes = []
    x0 = pad
    parts = []
    for cell in data["cells"]:
        pts = [(p + [0])[:2] for p in cell["outline"]]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        w, h = (max(xs) - min(xs)) * unit, (max(ys) - min(ys)) * unit
        ox, oy = x0 - min(xs) * unit, pad + max(ys) * unit

        def tr(p, ox=ox, oy=oy):
            return ox + float(p[0]) * unit, oy - float(p[1]) * unit

        coords = " ".join(f"{a:.1f},{b:.1f}" for a, b in map(tr, pts))
        tag = "polyline" if data["dim"] == 1 else "polygon"
        parts.append(f'<{tag} points="{coords}" fill="#eef" stroke="#223" stroke-width="2"/>')
        for p, lab in zip(pts, cell["labels"]):
            a, b = tr(p)
            parts.append(f'<text x="{a + 3:.1f}" y="{b - 3:.1f}" font-size="11">{lab}</text>')
        cx = sum(tr(p)[0] for p in pts) / len(pts)
        cy = sum(tr(p)[1] for p in pts) / len(pts)
        parts.append(f'<text x="{cx:.1f}" y="{cy:.1f}" font-size="12" fill="#666">{cell["id"]}</text>')
        for dset in data["discriminant"]:
            if dset["cell"] != cell["id"]:
                continue
            for q in dset["points"]:
                qq = [float(_frac(t)) for t in (q + [0])[:2]]
                a, b = tr(qq)
                parts.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="4" fill="#c22"/>')
        boxes.append((w, h))
        x0 += w + pad * 2
    width = int(x0)
    height = int(max((h for _, h in boxes), default=0) + 2 * pad)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        + "".join(parts)
        + "</svg>\n"
    )


def _frac(t):
    from fractions import Fraction

    return Fraction(t) if isinstance(t, str) else t


def render_text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(obj)}")
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, dict) for x in v) and all(
            not isinstance(x, list) or all(not isinstance(y, (list, dict)) for y in x) for x in v
        )
    return False


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


COMMANDS = {
    "corpus": cmd_corpus,
    "build": cmd_build,
    "legendre": cmd_legendre,
    "involution": cmd_involution,
    "dual-complex": cmd_dual_complex,
    "intersection-complex": cmd_intersection_complex,
    "central-fiber": cmd_central_fiber,
    "local-model": cmd_local_model,
    "holonomy": cmd_holonomy,
    "monodromy": cmd_monodromy,
    "duality-check": cmd_duality_check,
    "check": cmd_check,
}

DOCUMENT_COMMANDS = {"corpus", "legendre", "dual-complex", "intersection-complex"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input document (default: stdin)")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "text", "svg"), default="json")
    common.add_argument("--emit-plot", metavar="PATH", help="also write plot data of the complex as JSON")
    common.add_argument("--allow-boundary", action="store_true", help="accept incomplete fans at boundary vertices")

    p = argparse.ArgumentParser(prog="tordeg", description="Affine manifolds with singularities from toric degenerations.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("corpus", parents=[common], help="emit a built-in example")
    c.add_argument("name")
    for flag in ("--lengths", "--degrees", "--size", "--lattice", "--kinks"):
        c.add_argument(flag)
    c.add_argument("--dim", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--degree", type=int)

    helps = {
        "build": "validate a document and report its cells, discriminant and toric check",
        "legendre": "discrete Legendre transform of a polarized complex",
        "involution": "transform twice and search an isomorphism back",
        "central-fiber": "components and gluings of the central fiber",
        "check": "run all consistency checks (exit 2 on failure)",
        "duality-check": "compare holonomy of loops and their dual loops",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--degrees")
        sp.add_argument("--degree", type=int)
        sp.add_argument("--kinks", help="one integer for every wall, or name=value pairs")
        if name == "check":
            sp.add_argument("--isomorphic-to", metavar="FILE")
        if name == "duality-check":
            sp.add_argument("--loop", action="append", required=True)
            sp.add_argument("--dual-loop", action="append")

    sub.add_parser("dual-complex", parents=[common], help="dual intersection complex of a degeneration")
    ic = sub.add_parser("intersection-complex", parents=[common], help="intersection complex of a polarized degeneration")
    ic.add_argument("--degrees")
    ic.add_argument("--degree", type=int)
    lm = sub.add_parser("local-model", parents=[common], help="toric local model over the cone on a cell")
    lm.add_argument("--cell")
    h = sub.add_parser("holonomy", parents=[common], help="affine holonomy of a loop")
    h.add_argument("--loop", required=True)
    m = sub.add_parser("monodromy", parents=[common], help="monodromy matrix of the torus fibration around a loop")
    m.add_argument("--loop", required=True)
    m.add_argument("--scale", action="store_true", help="clear denominators of rational translations")
    return p


def _emit(text: str, path: str | None):
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _output(args, result: Any):
    if args.format == "svg":
        _emit(render_svg(plot_data(_complex_of_result(args, result))), args.output)
    elif args.command in DOCUMENT_COMMANDS:
        _emit(io.dumps(result), args.output)
    elif args.format == "json":
        _emit(io.dumps({"command": args.command, "results": result}), args.output)
    else:
        _emit(render_text({"command": args.command, "results": result}) + "\n", args.output)


def _complex_of_result(args, result):
    if args.command in DOCUMENT_COMMANDS and isinstance(result, dict) and result.get("kind") in ("complex", "triple"):
        return io.complex_from_doc(result)[0]
    if args.command in DOCUMENT_COMMANDS and isinstance(result, dict) and result.get("kind") == "degeneration":
        d, _ = io.spec_from_doc(result)
        return dual_intersection_complex(d, allow_boundary=args.allow_boundary)
    return _load_complex(_read(args), args)[0]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    status = 0
    try:
        result = COMMANDS[args.command](args)
    except PropertyFailure as pf:
        result = pf.args[0]
        status = 2
    except PROPERTY_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TordegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        _output(args, result)
        if args.emit_plot:
            b = _complex_of_result(args, result)
            _emit(io.dumps(plot_data(b)), args.emit_plot)
    except TordegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
