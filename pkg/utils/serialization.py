import json
from typing import Dict, List, Sequence

from polytopes.polyhedron import Polyhedron, ValidationReport, Vertex
from utils.errors import InvalidSpec, ParseError, ShapeError
from utils.exactla import format_rational


def dumps(payload) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e}") from e


def vector_to_json(v: Sequence) -> List[str]:
    return [format_rational(a) for a in v]


def matrix_to_json(M: Sequence[Sequence]) -> List[List[str]]:
    return [vector_to_json(row) for row in M]


def polyhedron_to_dict(P: Polyhedron) -> Dict:
    return {
        "n": P.n,
        "A": matrix_to_json(P.A),
        "b": vector_to_json(P.b),
        "B": matrix_to_json(P.B),
        "d": vector_to_json(P.d),
        "name": P.name or "",
    }


def polyhedron_from_dict(data: Dict) -> Polyhedron:
    """Read the Polyhedron JSON shape; rationals may be ints or "p/q" strings."""
    if not isinstance(data, dict) or "n" not in data:
        raise InvalidSpec("Polyhedron JSON needs at least the key 'n'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InvalidSpec(f"'n' must be a natural number, got {n!r}")
    for key in ("A", "B"):
        rows = data.get(key, [])
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ShapeError(f"'{key}' must be a list of rows")
    return Polyhedron.from_rows(
        n,
        A=data.get("A", []),
        b=data.get("b", []),
        B=data.get("B", []),
        d=data.get("d", []),
        name=data.get("name") or None,
    )


def vertex_to_dict(v: Vertex) -> Dict:
    return {"point": vector_to_json(v.point), "tight_rows": sorted(v.tight_rows)}


def circuit_to_json(circuit) -> List[str]:
    return vector_to_json(circuit.g)


def walk_to_json(trace) -> List[Dict]:
    """One entry per point; entries after the first carry the step that reached them."""
    entries = [{"point": vector_to_json(trace.points[0]), "circuit": None, "alpha": None}]
    for point, step in zip(trace.points[1:], trace.steps):
        entries.append({
            "point": vector_to_json(point),
            "circuit": vector_to_json(step.direction),
            "alpha": format_rational(step.alpha),
        })
    return entries


def hierarchy_to_dict(result) -> Dict:
    witness = {}
    if result.witness_point is not None:
        witness["point"] = vector_to_json(result.witness_point)
    if result.witness_walk is not None:
        witness["walk"] = walk_to_json(result.witness_walk)
    if result.certificates:
        witness["vertices"] = [
            {
                "vertex": vector_to_json(cert.vertex),
                "steps": [{"circuit": vector_to_json(g), "lands_on": vector_to_json(y)} for g, y in cert.landings],
            }
            for cert in result.certificates
        ]
    if result.max_points is not None:
        witness["max_points"] = result.max_points
    return {"level": result.level.value, "witness": witness}


def validation_to_dict(report: ValidationReport) -> Dict:
    return {
        "n": report.n,
        "equality_rows": report.equality_rows,
        "inequality_rows": report.inequality_rows,
        "empty": report.empty,
        "bounded": report.bounded,
        "pointed": report.pointed,
    }


def clustering_to_dict(y) -> Dict:
    return {"k": y.k, "assignment": {str(j): i for j, i in enumerate(y.assignment)}}


def clustering_from_dict(data: Dict, spec):
    from analysis.cdg import Clustering, check_clustering

    try:
        mapping = data["assignment"]
        assignment = tuple(int(mapping[str(j)]) for j in range(spec.n_items))
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidSpec(f"Clustering JSON needs an assignment for every item: {e}") from e
    y = Clustering(assignment, spec.k)
    check_clustering(spec, y)
    return y


def cdg_to_dict(cdg) -> Dict:
    return {
        "nodes": [{"cluster": i, "status": s.value} for i, s in enumerate(cdg.statuses)],
        "edges": [{"from": i, "to": l, "item": j} for i, l, j in cdg.edges],
    }


def recognition_to_dict(result) -> Dict:
    payload = {"is_ndp": result.is_ndp, "d": result.d}
    if result.reason:
        payload["reason"] = result.reason
    if result.counterexample:
        payload["counterexample"] = [vector_to_json(p) for p in result.counterexample]
    if result.certificate:
        payload["certificate"] = [
            {
                "vertex": vector_to_json(c.vertex),
                "partner": vector_to_json(c.partner),
                "face_rows": list(c.face_rows),
                "face_vertices": [vector_to_json(p) for p in c.face_vertices],
            }
            for c in result.certificate
        ]
    return payload


def distances_to_dict(report) -> Dict:
    return {
        "kind": report.kind,
        "vertices": [vector_to_json(p) for p in report.vertices],
        "matrix": [list(row) for row in report.matrix],
        "diameter": report.diameter,
    }


