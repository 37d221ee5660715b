"""YAML file formats for automorphisms, graphs, maps, marked graphs and witnesses.

Graph section (shared by the other formats)::

    graph:
      vertices: 2
      edges:                      # positive edges; ids are 0, 2, 4, ...
        - {id: 0, name: x, o: 0, t: 0}
        - {id: 2, name: y, o: 1, t: 1}
        - {id: 4, name: e, o: 0, t: 1}

Paths are whitespace-separated edge names with ``-`` marking the
reversed edge (``"e y e-"``).  Subgraphs are lists of names or ids.
"""

from __future__ import annotations

import datetime as _dt
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from .freegroup import NAMES, FreeMap, Word
from .graph import Graph
from .outerspace import MarkedMetricGraph
from .trainmap import TopRep


class FormatError(ValueError):
    pass


def load_yaml(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as err:
        raise FormatError(f"{path}: {err}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a mapping at top level")
    return data


def dump_yaml(data: dict, header: bool = True) -> str:
    body = yaml.safe_dump(data, sort_keys=False, allow_unicode=True, width=100)
    if not header:
        return body
    stamp = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    return f"# generated: {stamp}\n{body}"


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise FormatError(f"{where}: missing field {key!r}")
    return data[key]


# -- automorphisms -----------------------------------------------------------

def parse_automorphism(data: dict) -> FreeMap:
    rank = _require(data, "rank", "automorphism")
    images = _require(data, "images", "automorphism")
    if not isinstance(rank, int) or rank < 2:
        raise FormatError("automorphism: rank must be an integer >= 2")

    def words(mapping, field):
        if not isinstance(mapping, dict):
            raise FormatError(f"automorphism: {field} must map generators to words")
        keys = list(NAMES[:rank])
        if sorted(mapping) != sorted(keys):
            raise FormatError(f"automorphism: {field} must list exactly {keys}")
        try:
            return [Word.parse(str(mapping[k]), rank) for k in keys]
        except ValueError as err:
            raise FormatError(f"automorphism: {field}: {err}") from None

    imgs = words(images, "images")
    inv = words(data["inverse_images"], "inverse_images") if data.get("inverse_images") else None
    return FreeMap(imgs, inv)


def load_automorphism(path: str | Path) -> FreeMap:
    return parse_automorphism(load_yaml(path))


def automorphism_to_dict(phi: FreeMap) -> dict:
    out: dict[str, Any] = {
        "rank": phi.rank,
        "images": {NAMES[i]: w.format() for i, w in enumerate(phi.images)},
    }
    if phi.inverse_images is not None:
        out["inverse_images"] = {NAMES[i]: w.format() for i, w in enumerate(phi.inverse_images)}
    return out


# -- graphs ------------------------------------------------------------------

def parse_graph(data: dict) -> Graph:
    nv = _require(data, "vertices", "graph")
    edges = _require(data, "edges", "graph")
    if not isinstance(nv, int) or nv < 1:
        raise FormatError("graph: vertices must be a positive integer")
    pairs, names = [], []
    for k, e in enumerate(edges):
        if isinstance(e, dict):
            eid = e.get("id", 2 * k)
            o, t = _require(e, "o", "graph edge"), _require(e, "t", "graph edge")
            name = str(e.get("name", f"e{k}"))
        else:
            eid, o, t = e
            name = f"e{k}"
        if eid != 2 * k:
            raise FormatError(f"graph: edge ids must be 0, 2, 4, ... (got {eid} at position {k})")
        for v in (o, t):
            if not (isinstance(v, int) and 0 <= v < nv):
                raise FormatError(f"graph: edge {name} has endpoint {v} outside 0..{nv - 1}")
        pairs.append((o, t))
        names.append(name)
    if len(set(names)) != len(names):
        raise FormatError("graph: edge names must be distinct")
    return Graph.from_edges(nv, pairs, names)


def graph_to_dict(g: Graph) -> dict:
    return {
        "vertices": g.n_vertices,
        "edges": [
            {"id": e, "name": g.names[e // 2], "o": g.o(e), "t": g.t(e)} for e in g.positive_edges
        ],
    }


def parse_subgraph(g: Graph, items) -> list[int]:
    out = []
    for x in items:
        out.append(g.positive(int(x)) if isinstance(x, int) else g.edge_id(str(x)))
    return out


def parse_path(g: Graph, text) -> tuple[int, ...]:
    try:
        return g.parse_path(str(text))
    except ValueError as err:
        raise FormatError(str(err)) from None


# -- topological representatives --------------------------------------------

def parse_toprep(data: dict) -> TopRep:
    g = parse_graph(_require(data, "graph", "toprep"))
    images = _require(data, "images", "toprep")
    if sorted(images) != sorted(g.names):
        raise FormatError("toprep: images must list every edge exactly once")
    imgs = [parse_path(g, images[name]) for name in g.names]
    filt = data.get("filtration")
    filtration = [parse_subgraph(g, level) for level in filt] if filt else None
    try:
        return TopRep(g, imgs, filtration, data.get("vertex_map"))
    except ValueError as err:
        raise FormatError(f"toprep: {err}") from None


def load_toprep(path: str | Path) -> tuple[TopRep, bool]:
    """The representative and whether the file supplied a filtration."""
    data = load_yaml(path)
    return parse_toprep(data), bool(data.get("filtration"))


def toprep_to_dict(f: TopRep) -> dict:
    g = f.graph
    return {
        "graph": graph_to_dict(g),
        "images": {g.names[e // 2]: g.format_path(f.image(e)) for e in g.positive_edges},
        "filtration": [[g.names[e // 2] for e in sorted(G)] for G in f.filtration],
        "vertex_map": list(f.vertex_map),
    }


# -- marked metric graphs ------------------------------------------------------

def parse_marked_graph(data: dict) -> MarkedMetricGraph:
    g = parse_graph(_require(data, "graph", "marked graph"))
    marking = _require(data, "marking", "marked graph")
    lengths = _require(data, "lengths", "marked graph")
    rank = len(marking)
    keys = list(NAMES[:rank])
    if sorted(marking) != keys:
        raise FormatError(f"marked graph: marking must list exactly {keys}")
    if sorted(lengths) != sorted(g.names):
        raise FormatError("marked graph: lengths must list every edge exactly once")
    try:
        ls = [Fraction(str(lengths[n])) for n in g.names]
        return MarkedMetricGraph(
            g, [parse_path(g, marking[k]) for k in keys], ls,
            base=int(data.get("base", 0)), name=str(data.get("name", "")),
        )
    except (ValueError, ZeroDivisionError) as err:
        raise FormatError(f"marked graph: {err}") from None


def load_marked_graph(path: str | Path) -> MarkedMetricGraph:
    return parse_marked_graph(load_yaml(path))


def marked_graph_to_dict(T: MarkedMetricGraph) -> dict:
    g = T.graph
    out: dict[str, Any] = {}
    if T.name:
        out["name"] = T.name
    out["graph"] = graph_to_dict(g)
    out["base"] = T.base
    out["marking"] = {NAMES[i]: g.format_path(p) for i, p in enumerate(T.marking)}
    out["lengths"] = {g.names[k]: str(x) for k, x in enumerate(T.lengths)}
    return out
