"""Instance files: the JSON-shaped on-disk format for structure instances.

A file is a single self-describing document of coordinate names and tensor
components given as expression strings in the scalar grammar.  Parsing
produces a StructureInstance; failures carry the field path and the position
inside the offending expression.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path as FsPath

from .scalar import ParseError, Patch, PolyScalar, parse_poly
from .structures import AdaptedFrame, StructureInstance
from .tensor import DiffForm, Endomorphism, Multivector


class InstanceFormatError(ValueError):
    """Malformed instance document; message carries the field path."""


def _ctx_parse(text, patch, where: str) -> PolyScalar:
    if not isinstance(text, str):
        raise InstanceFormatError(f"{where}: expected an expression string, got {type(text).__name__}")
    try:
        return parse_poly(text, patch)
    except ParseError as e:
        raise InstanceFormatError(f"{where}: {e}") from None


def _parse_matrix(rows, patch, where: str) -> Endomorphism:
    n = patch.dim
    if not isinstance(rows, list) or len(rows) != n \
            or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InstanceFormatError(f"{where}: expected a {n}x{n} matrix of expressions")
    return Endomorphism(patch, [[_ctx_parse(e, patch, f"{where}[{i}][{j}]")
                                 for j, e in enumerate(row)]
                                for i, row in enumerate(rows)])


def _parse_vector(comps, patch, where: str) -> Multivector:
    if not isinstance(comps, list) or len(comps) != patch.dim:
        raise InstanceFormatError(f"{where}: expected {patch.dim} component expressions")
    return Multivector.from_components(
        patch, [_ctx_parse(e, patch, f"{where}[{i}]") for i, e in enumerate(comps)])


def _parse_covector(comps, patch, where: str) -> DiffForm:
    if not isinstance(comps, list) or len(comps) != patch.dim:
        raise InstanceFormatError(f"{where}: expected {patch.dim} component expressions")
    return DiffForm.from_components(
        patch, [_ctx_parse(e, patch, f"{where}[{i}]") for i, e in enumerate(comps)])


def _parse_bivector(entries, patch, where: str) -> Multivector:
    comps = {}
    if not isinstance(entries, list):
        raise InstanceFormatError(f"{where}: expected a list of [i, j, expression] triples")
    for t, item in enumerate(entries):
        if not isinstance(item, list) or len(item) != 3:
            raise InstanceFormatError(f"{where}[{t}]: expected [i, j, expression]")
        i, j, expr = item
        if not isinstance(i, int) or not isinstance(j, int) \
                or not 0 <= i < patch.dim or not 0 <= j < patch.dim or i == j:
            raise InstanceFormatError(f"{where}[{t}]: bad index pair ({i},{j})")
        c = _ctx_parse(expr, patch, f"{where}[{t}]")
        key, sign = (i, j), 1
        if i > j:
            key, sign = (j, i), -1
        prev = comps.get(key, PolyScalar.zero(patch))
        comps[key] = prev + (c if sign == 1 else -c)
    return Multivector(patch, 2, comps)


def _parse_point(values, patch, where: str) -> tuple:
    if not isinstance(values, list) or len(values) != patch.dim:
        raise InstanceFormatError(f"{where}: expected {patch.dim} rational entries")
    out = []
    for i, v in enumerate(values):
        try:
            out.append(Fraction(str(v)))
        except (ValueError, ZeroDivisionError):
            raise InstanceFormatError(f"{where}[{i}]: not a rational number: {v!r}") from None
    return tuple(out)


_KNOWN_KEYS = {"name", "coordinates", "A", "pi", "P", "contact", "frames",
               "base_point", "vectors", "forms"}


def parse_instance(doc: dict) -> StructureInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise InstanceFormatError(f"unknown fields: {sorted(unknown)}")
    coords = doc.get("coordinates")
    if not isinstance(coords, list) or not coords \
            or any(not isinstance(c, str) for c in coords):
        raise InstanceFormatError("coordinates: expected a nonempty list of names")
    try:
        patch = Patch(tuple(coords))
    except ValueError as e:
        raise InstanceFormatError(f"coordinates: {e}") from None

    a = _parse_matrix(doc["A"], patch, "A") if "A" in doc else None
    pi = _parse_bivector(doc["pi"], patch, "pi") if "pi" in doc else None
    p_proj = _parse_matrix(doc["P"], patch, "P") if "P" in doc else None

    contact = []
    for t, item in enumerate(doc.get("contact", [])):
        if not isinstance(item, dict) or set(item) != {"Z", "xi"}:
            raise InstanceFormatError(f"contact[{t}]: expected an object with Z and xi")
        z = _parse_vector(item["Z"], patch, f"contact[{t}].Z")
        xi = _parse_covector(item["xi"], patch, f"contact[{t}].xi")
        contact.append((z, xi))

    frames = None
    if "frames" in doc:
        fr = doc["frames"]
        if not isinstance(fr, dict) or not {"h", "q", "kappa"} >= set(fr) \
                or "h" not in fr or "kappa" not in fr:
            raise InstanceFormatError("frames: expected an object with h, kappa and optional q")
        h = [_parse_vector(v, patch, f"frames.h[{i}]") for i, v in enumerate(fr["h"])]
        q = [_parse_vector(v, patch, f"frames.q[{i}]") for i, v in enumerate(fr.get("q", []))]
        kappa = [_parse_covector(v, patch, f"frames.kappa[{i}]")
                 for i, v in enumerate(fr["kappa"])]
        if len(kappa) != len(h):
            raise InstanceFormatError("frames: kappa must pair off with h")
        frames = AdaptedFrame(h=h, q=q, kappa=kappa)

    base_point = _parse_point(doc["base_point"], patch, "base_point") \
        if "base_point" in doc else None

    vectors = {}
    for name, comps in doc.get("vectors", {}).items():
        vectors[name] = _parse_vector(comps, patch, f"vectors.{name}")
    forms = {}
    for name, comps in doc.get("forms", {}).items():
        forms[name] = _parse_covector(comps, patch, f"forms.{name}")

    return StructureInstance(patch=patch, a=a, pi=pi, contact=contact,
                             frames=frames, p_proj=p_proj, base_point=base_point,
                             vectors=vectors, forms=forms,
                             name=str(doc.get("name", "")))


def load_instance(path) -> StructureInstance:
    text = FsPath(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{path}: not valid JSON: {e}") from None
    return parse_instance(doc)


def normalize_document(doc: dict) -> dict:
    """Round-trip the document through the parser and canonical printing.

    normalize(normalize(doc)) == normalize(doc), which is the format
    idempotence contract.
    """
    inst = parse_instance(doc)
    return dump_instance(inst)


def dump_instance(inst: StructureInstance) -> dict:
    patch = inst.patch
    doc: dict = {"coordinates": list(patch.coords)}
    if inst.name:
        doc["name"] = inst.name
    if inst.a is not None:
        doc["A"] = [[str(inst.a.entry(i, j)) for j in range(patch.dim)]
                    for i in range(patch.dim)]
    if inst.pi is not None:
        doc["pi"] = [[i, j, str(c)] for (i, j), c in sorted(inst.pi.comps.items())]
    if inst.p_proj is not None:
        doc["P"] = [[str(inst.p_proj.entry(i, j)) for j in range(patch.dim)]
                    for i in range(patch.dim)]
    if inst.contact:
        doc["contact"] = [{"Z": _vec_strings(z), "xi": _form_strings(xi)}
                          for z, xi in inst.contact]
    if inst.frames is not None:
        doc["frames"] = {
            "h": [_vec_strings(v) for v in inst.frames.h],
            "q": [_vec_strings(v) for v in inst.frames.q],
            "kappa": [_form_strings(v) for v in inst.frames.kappa],
        }
    if inst.base_point is not None:
        doc["base_point"] = [str(x) for x in inst.base_point]
    if inst.vectors:
        doc["vectors"] = {k: _vec_strings(v) for k, v in sorted(inst.vectors.items())}
    if inst.forms:
        doc["forms"] = {k: _form_strings(v) for k, v in sorted(inst.forms.items())}
    return doc


def _vec_strings(v: Multivector) -> list[str]:
    return [str(v.component((i,))) for i in range(v.patch.dim)]


def _form_strings(v: DiffForm) -> list[str]:
    return [str(v.component((i,))) for i in range(v.patch.dim)]


def instance_digest(inst: StructureInstance) -> str:
    """Stable digest of the normalized document."""
    blob = json.dumps(dump_instance(inst), sort_keys=True,
                      separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
