"""
Text formats: graph files, DOT, gluing-data JSON, polynomial lines, CSV and
run manifests. Every writer goes through a temp file and os.replace.
"""

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from src import __version__
from src.core.errors import InvalidArgumentError
from src.core.gluing import ConnectingGraph, GluingData, HyperEdge
from src.core.graph import MarkedGraph, MultiGraph

PathLike = Union[str, Path]


# ------------------------------------------------------------------ files

def atomic_write_text(path: PathLike, text: str):
    """Write to a sibling temp file then rename over the target"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def digest(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ------------------------------------------------------------------ graph text

def graph_to_text(g: MarkedGraph) -> str:
    lines = [f"n {g.vertex_count} k {g.k}"]
    lines.extend(f"e {a} {b}" for a, b in g.graph.edges)
    lines.append("marks " + " ".join(str(v) for v in g.marks))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> MarkedGraph:
    n = k = None
    edges, marks = [], None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if tokens[0] == "n":
                if len(tokens) != 4 or tokens[2] != "k":
                    raise ValueError("expected 'n <count> k <marks>'")
                n, k = int(tokens[1]), int(tokens[3])
            elif tokens[0] == "e":
                if len(tokens) != 3:
                    raise ValueError("expected 'e a b'")
                edges.append((int(tokens[1]), int(tokens[2])))
            elif tokens[0] == "marks":
                marks = tuple(int(t) for t in tokens[1:])
            else:
                raise ValueError(f"unknown record '{tokens[0]}'")
        except ValueError as e:
            raise InvalidArgumentError(f"Graph text line {number}: {e}") from None
    if n is None or marks is None:
        raise InvalidArgumentError("Graph text needs an 'n ... k ...' header and a 'marks' line")
    if len(marks) != k:
        raise InvalidArgumentError(f"Header announces {k} marks, found {len(marks)}")
    return MarkedGraph(MultiGraph(n, tuple(edges)), marks)


def graph_to_dot(g: MarkedGraph, name: str = "G") -> str:
    label_of = {v: j + 1 for j, v in enumerate(g.marks)}
    lines = [f"graph {name} {{"]
    for v in range(g.vertex_count):
        if v in label_of:
            lines.append(f'  {v} [label="{label_of[v]}", shape=doublecircle];')
        else:
            lines.append(f"  {v};")
    for a, b in g.graph.edges:
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ gluing JSON

def gluing_to_dict(d: GluingData) -> Dict[str, Any]:
    return {
        "m": d.m,
        "k": d.k,
        "edges": [{"id": e.id, "members": list(e.members), "label": e.label} for e in d.edges],
        "connecting": {
            eid: {
                "vertices": conn.sigma.vertex_count,
                "edges": [list(edge) for edge in conn.sigma.edges],
                "root": conn.root,
            }
            for eid, conn in d.connecting.items()
        },
        "attach": {eid: {str(i): v for i, v in a.items()} for eid, a in d.attach.items()},
        "phi": {str(j): eid for j, eid in d.phi.items()},
    }


def gluing_from_dict(raw: Dict[str, Any]) -> GluingData:
    try:
        edges = tuple(HyperEdge(str(e["id"]), tuple(int(i) for i in e["members"]), int(e["label"]))
                      for e in raw["edges"])
        connecting = {
            str(eid): ConnectingGraph(
                MultiGraph(int(c["vertices"]), tuple((int(a), int(b)) for a, b in c.get("edges", []))),
                int(c.get("root", 0)),
            )
            for eid, c in raw["connecting"].items()
        }
        attach = {str(eid): {int(i): int(v) for i, v in a.items()} for eid, a in raw["attach"].items()}
        phi = {int(j): str(eid) for j, eid in raw["phi"].items()}
        return GluingData(int(raw["m"]), int(raw["k"]), edges, connecting, attach, phi)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArgumentError(f"Malformed gluing data document: {e!r}") from None


def gluing_to_json(d: GluingData) -> str:
    return dumps_json(gluing_to_dict(d))


def gluing_from_json(text: str) -> GluingData:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"Gluing data is not valid JSON: {e}") from None
    return gluing_from_dict(raw)


# ------------------------------------------------------------------ tables

def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ------------------------------------------------------------------ manifests

def build_manifest(subcommand: str, inputs: Dict[str, str], settings: Dict[str, Any],
                   outputs: Optional[List[str]] = None) -> Dict[str, Any]:
    """inputs maps a role (data, start) to the content digest of what was read"""
    return {
        "subcommand": subcommand,
        "inputs": dict(sorted(inputs.items())),
        "configuration": settings,
        "outputs": sorted(outputs or []),
        "tool_version": __version__,
    }


def write_manifest(output: PathLike, manifest: Dict[str, Any]) -> Path:
    target = Path(f"{output}.manifest.json")
    atomic_write_text(target, dumps_json(manifest))
    return target
