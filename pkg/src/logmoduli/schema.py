"""The JSON document format shared by the CLI and the fixtures.

Numbers that live in Q(i) are strings ("a/b" or "a/b+c/d*i"); "inf" is the
reserved infinity token.  Serialization is canonical: keys sorted, elements
ordered by id, so parse-then-serialize is a fixed point byte for byte.
"""

from __future__ import annotations

import json
from typing import Optional

from .errors import StructuralError
from .graphs import DecoratedDualGraph, Edge, Leg, Vertex
from .obstruction import Characters, CurveData
from .positivity import CurveFamily, GeometryProfile
from .qi import qi_parse, qi_str
from .sections import P1Point, RationalSection

SCHEMA_VERSION = "1"


def _req(obj, key, where):
    if key not in obj:
        raise StructuralError(f"{where}: missing field {key!r}")
    return obj[key]


def parse_document(doc: dict):
    """Parse a graph document into (graph, data, profile, characters, expect)."""
    if not isinstance(doc, dict):
        raise StructuralError("document must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise StructuralError(f"unsupported schema_version {version!r}")
    N = int(_req(doc, "N", "document"))
    n = int(_req(doc, "n", "document"))

    vertices = []
    for item in doc.get("vertices", []):
        vertices.append(
            Vertex(
                id=str(_req(item, "id", "vertex")),
                genus=int(item.get("genus", 0)),
                stratum=frozenset(item.get("stratum", [])),
                c1_log=int(item.get("c1_log", 0)),
                degrees=tuple(item.get("degrees", [0] * N)),
                kind=item.get("kind", "principal"),
                image_label=item.get("image_label"),
                cover_degree=item.get("cover_degree"),
                base_degrees=tuple(item["base_degrees"]) if item.get("base_degrees") else None,
                base_c1_log=item.get("base_c1_log"),
            )
        )

    edges = []
    positions = {}
    eta = {}
    for item in doc.get("edges", []):
        eid = str(_req(item, "id", "edge"))
        ends = tuple(str(x) for x in _req(item, "ends", f"edge {eid}"))
        contact = item.get("contact")
        contacts = item.get("contacts")
        labels = item.get("image_labels")
        if labels is not None:
            labels = tuple(labels.get(str(i)) for i in range(len(ends)))
        edges.append(
            Edge(
                eid,
                ends,
                stratum=frozenset(item.get("stratum", [])),
                contact=tuple(contact) if contact is not None else None,
                contacts=tuple(tuple(c) for c in contacts) if contacts is not None else None,
                into=tuple(item["into"]) if item.get("into") is not None else None,
                image_labels=labels,
            )
        )
        for key, val in (item.get("positions") or {}).items():
            positions[(eid, int(key))] = P1Point.parse(val)
        for end_key, per_i in (item.get("eta") or {}).items():
            for i_key, val in per_i.items():
                eta[(eid, int(end_key), int(i_key))] = qi_parse(val)

    legs = []
    leg_positions = {}
    for item in doc.get("legs", []):
        lid = str(_req(item, "id", "leg"))
        legs.append(
            Leg(
                lid,
                str(_req(item, "vertex", f"leg {lid}")),
                contact=tuple(item.get("contact", [0] * N)),
                position=item.get("position"),
                image_label=item.get("image_label"),
            )
        )
        if item.get("position") is not None:
            leg_positions[lid] = P1Point.parse(item["position"])

    sections = {}
    for vid, per_i in (doc.get("sections") or {}).items():
        out = {}
        for i_key, item in per_i.items():
            divisor = [
                (P1Point.parse(str(pt)), int(order)) for pt, order in item.get("divisor", [])
            ]
            out[int(i_key)] = RationalSection(
                int(item.get("degree", 0)),
                qi_parse(item.get("scale", "1")),
                divisor,
            )
        sections[str(vid)] = out

    graph = DecoratedDualGraph(N, n, vertices, edges, legs)
    data = CurveData(positions, leg_positions, sections, eta)

    profile = None
    if doc.get("profile"):
        profile = parse_profile(doc["profile"])

    characters = None
    if doc.get("characters"):
        index = []
        for e in graph.edges:
            if e.is_multinode:
                index.extend((e.id, j, i) for j in range(len(e.ends)) for i in sorted(e.stratum))
            else:
                index.extend((e.id, i) for i in sorted(e.stratum))
        rows = doc["characters"]
        for row in rows:
            if len(row) != len(index):
                raise StructuralError(
                    f"character row length {len(row)} != node coordinate count {len(index)}"
                )
        characters = Characters(rows, index)

    return graph, data, profile, characters, doc.get("expect")


def parse_profile(payload: dict) -> GeometryProfile:
    fams = []
    for f in _req(payload, "families", "profile"):
        delta = f.get("delta")
        if isinstance(delta, dict):
            delta = ("linear", int(delta["linear"]))
        fams.append(
            CurveFamily(
                label=str(_req(f, "label", "family")),
                stratum=frozenset(f.get("stratum", [])),
                c1_tx=int(_req(f, "c1_tx", "family")),
                dot=tuple(_req(f, "dot", "family")),
                effective=bool(f.get("effective", True)),
                multiplicity="all" if f.get("multiplicity", "all") == "all" else tuple(f["multiplicity"]),
                delta=delta,
            )
        )
    return GeometryProfile(int(_req(payload, "n", "profile")), int(_req(payload, "N", "profile")), tuple(fams))


def serialize_document(graph: DecoratedDualGraph, data: Optional[CurveData] = None,
                       profile: Optional[dict] = None, characters=None,
                       expect: Optional[dict] = None) -> dict:
    data = data or CurveData()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "N": graph.N,
        "n": graph.n,
        "vertices": [],
        "edges": [],
        "legs": [],
    }
    for v in graph.vertices:
        item = {
            "id": v.id,
            "genus": v.genus,
            "stratum": sorted(v.stratum),
            "c1_log": v.c1_log,
            "degrees": list(v.degrees),
            "kind": v.kind,
        }
        if v.image_label is not None:
            item["image_label"] = v.image_label
        if v.cover_degree is not None:
            item["cover_degree"] = v.cover_degree
        if v.base_degrees is not None:
            item["base_degrees"] = list(v.base_degrees)
        if v.base_c1_log is not None:
            item["base_c1_log"] = v.base_c1_log
        doc["vertices"].append(item)
    for e in graph.edges:
        item = {"id": e.id, "ends": list(e.ends), "stratum": sorted(e.stratum)}
        if e.contact is not None:
            item["contact"] = list(e.contact)
        if e.contacts is not None:
            item["contacts"] = [list(c) for c in e.contacts]
        if e.into is not None:
            item["into"] = list(e.into)
        if e.image_labels is not None:
            item["image_labels"] = {
                str(i): lab for i, lab in enumerate(e.image_labels) if lab is not None
            }
        pos = {
            str(idx): str(p)
            for (eid, idx), p in sorted(data.positions.items(), key=lambda kv: (kv[0][0], kv[0][1]))
            if eid == e.id
        }
        if pos:
            item["positions"] = pos
        per_end = {}
        for (eid, idx, i), val in sorted(data.eta.items()):
            if eid == e.id:
                per_end.setdefault(str(idx), {})[str(i)] = qi_str(val)
        if per_end:
            item["eta"] = per_end
        doc["edges"].append(item)
    for l in graph.legs:
        item = {"id": l.id, "vertex": l.vertex, "contact": list(l.contact)}
        pos = data.leg_positions.get(l.id)
        if pos is not None:
            item["position"] = str(pos)
        elif l.position is not None:
            item["position"] = l.position
        if l.image_label is not None:
            item["image_label"] = l.image_label
        doc["legs"].append(item)
    if data.sections:
        doc["sections"] = {
            vid: {
                str(i): {
                    "degree": sec.degree,
                    "scale": qi_str(sec.scale),
                    "divisor": [[str(p), m] for p, m in sorted(
                        sec.divisor().items(), key=lambda kv: str(kv[0])
                    )],
                }
                for i, sec in sorted(per_i.items())
            }
            for vid, per_i in sorted(data.sections.items())
        }
    if profile is not None:
        doc["profile"] = profile
    if characters is not None:
        doc["characters"] = [list(r) for r in characters.rows]
    if expect is not None:
        doc["expect"] = expect
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON: {exc}") from exc
    return parse_document(doc)
