"""polywalk command line: generate polytopes, enumerate circuits, walk, classify."""
import argparse
import logging
import random
import sys
from fractions import Fraction
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

import config
from analysis import cdg as cdg_tools
from analysis import ecw, walks
from polytopes import families
from polytopes.circuits import circuits_rank_method, circuits_support_oracle
from polytopes.polyhedron import AffineMap, enumerate_vertices, subset_limit, validate
from utils import serialization
from utils.errors import InvalidSpec, PolywalkError
from utils.exactla import as_vector, format_rational, is_totally_unimodular

logger = logging.getLogger("polywalk")
console = Console(stderr=True)


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _edge_list(text: str):
    edges = []
    for part in text.split(";"):
        if part.strip():
            u, v = _int_list(part)
            edges.append((u, v))
    return edges


def _vectors(text: str):
    return [as_vector(part.split(",")) for part in text.split(";") if part.strip()]


def _read_input(path: Optional[str]) -> str:
    if path and path != "-":
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    return sys.stdin.read()


def _write_output(payload, path: Optional[str]) -> None:
    text = serialization.dumps(payload)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _load_polyhedron(args):
    P = serialization.polyhedron_from_dict(serialization.loads(_read_input(args.input)))
    report = validate(P)
    logger.debug("Loaded %s", serialization.validation_to_dict(report))
    return P


def _generate(args):
    family = args.family
    if family == "fig2":
        return families.fig2(args.which)
    if family == "fig3":
        return families.fig3_polytope()
    if family == "transportation":
        spec = families.build_spec(families.TransportationSpec, supplies=args.u, demands=args.v)
        return families.transportation(spec)
    if family == "partition-bounded":
        spec = families.partition_spec(args.n_items, args.k, args.lower, args.upper)
        return families.partition_bounded(spec)
    if family == "partition-fixed":
        return families.partition_fixed(families.fixed_partition_spec(args.kappa))
    if family == "matroid":
        if args.graphic:
            spec = families.graphic_matroid(args.graphic)
        else:
            spec = families.uniform_matroid(args.ground_size, args.uniform)
        return families.matroid_polytope(spec)
    if family == "nd-parallelotope":
        transform = None
        if args.skew:
            rows = _vectors(args.skew)
            if len(rows) != args.n or any(len(r) != args.n for r in rows):
                raise InvalidSpec(f"--skew must be an {args.n}x{args.n} matrix")
            columns = tuple(tuple(r[i] for r in rows) for i in range(args.n))
            offset = tuple(Fraction(0) for _ in range(args.n))
            transform = AffineMap(offset, columns)
        return families.nd_parallelotope(args.n, args.d, transform)
    if family == "cube":
        return families.hypercube(args.n)
    if family == "simplex":
        return families.standard_simplex(args.n)
    if family == "random-simple":
        seed = args.seed if args.seed is not None else config.SEED
        return families.random_simple_polytope(random.Random(seed))
    raise PolywalkError(f"Unknown family {family}")


def cmd_gen(args):
    return serialization.polyhedron_to_dict(_generate(args)), config.EXIT_OK


def cmd_validate(args):
    P = serialization.polyhedron_from_dict(serialization.loads(_read_input(args.input)))
    return serialization.validation_to_dict(validate(P)), config.EXIT_OK


def cmd_vertices(args):
    P = _load_polyhedron(args)
    vertices = enumerate_vertices(P, method=args.method)
    return {"vertices": [serialization.vertex_to_dict(v) for v in vertices]}, config.EXIT_OK


def cmd_circuits(args):
    P = _load_polyhedron(args)
    found = circuits_support_oracle(P) if args.method == "oracle" else circuits_rank_method(P)
    return {"method": args.method, "circuits": [serialization.circuit_to_json(c) for c in found]}, config.EXIT_OK


def cmd_walk(args):
    P = _load_polyhedron(args)
    vertices = enumerate_vertices(P)
    if not 0 <= args.start < len(vertices):
        raise PolywalkError(f"--start {args.start} is not a vertex index (0..{len(vertices) - 1})")
    if args.greedy_to is not None:
        directives = walks.AdjacencyGreedy(args.greedy_to)
    else:
        directives = [(v, 1) for v in _vectors(args.dirs or "")]
    trace = walks.walk(P, vertices[args.start], directives)
    return {"walk": serialization.walk_to_json(trace)}, config.EXIT_OK


def cmd_classify(args):
    P = _load_polyhedron(args)
    result = walks.classify_hierarchy(P, budget=args.budget_points)
    code = config.EXIT_UNSUPPORTED if result.level is walks.Level.UNKNOWN else config.EXIT_OK
    return serialization.hierarchy_to_dict(result), code


def cmd_check_tu(args):
    P = _load_polyhedron(args)
    unimodular, witness = is_totally_unimodular(P.constraint_matrix)
    payload = {"totally_unimodular": unimodular, "witness": None}
    if witness is not None:
        payload["witness"] = {
            "rows": list(witness.rows),
            "cols": list(witness.cols),
            "det": format_rational(witness.value),
        }
    return payload, config.EXIT_OK


def cmd_check_ecw(args):
    P = _load_polyhedron(args)
    payload = {}
    if args.via in ("elementary", "all"):
        ok, witness = ecw.elementary_cone_condition(P)
        payload["elementary"] = {
            "holds": ok,
            "witness": None if witness is None else {
                "vertex": serialization.vector_to_json(witness[0]), "row": witness[1],
            },
        }
    if args.via in ("symmetric", "all"):
        ok, pair = ecw.symmetric_inner_cone_condition(P)
        payload["symmetric"] = {
            "holds": ok,
            "witness": None if pair is None else [serialization.vector_to_json(p) for p in pair],
        }
    if args.via in ("recognize", "all"):
        payload["recognize"] = serialization.recognition_to_dict(ecw.recognize_nd_parallelotope(P))
    if args.via == "all":
        verdicts = {payload["elementary"]["holds"], payload["symmetric"]["holds"], payload["recognize"]["is_ndp"]}
        payload["agree"] = len(verdicts) == 1
    return payload, config.EXIT_OK


def cmd_diameter(args):
    P = _load_polyhedron(args)
    report = walks.distances_and_diameters(P, kind=args.kind, budget=args.budget_points)
    return serialization.distances_to_dict(report), config.EXIT_OK


def cmd_cdg(args):
    raw = serialization.loads(_read_input(args.spec))
    if not isinstance(raw, dict):
        raise PolywalkError("Partition spec JSON must be an object")
    spec = families.build_spec(families.PartitionSpec, **raw)
    y1 = serialization.clustering_from_dict(serialization.loads(_read_input(args.y1)), spec)
    y2 = serialization.clustering_from_dict(serialization.loads(_read_input(args.y2)), spec)
    graph = cdg_tools.build_cdg(spec, y1, y2)
    payload = {"cdg": serialization.cdg_to_dict(graph)}
    if args.test == "edge":
        if spec.is_fixed_size:
            payload["edge"] = cdg_tools.pp_fixed_edge_test(spec, y1, y2)
        else:
            payload["edge"] = cdg_tools.pp_bounded_edge_test(spec, y1, y2)
    else:
        g = [int(b - a) for a, b in zip(y1.vector(), y2.vector())]
        payload["g"] = [str(a) for a in g]
        payload["circuit"] = cdg_tools.pp_bounded_circuit_test(spec, g)
    return payload, config.EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polywalk", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--max-subsets", type=int, default=None, help="row-subset guard for enumeration")

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("-o", "--output", help="write JSON here instead of stdout")
    source = argparse.ArgumentParser(add_help=False, parents=[io])
    source.add_argument("-i", "--input", help="Polyhedron JSON file (default: stdin)")
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--budget-points", type=int, default=config.BUDGET_POINTS)

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[io], help="generate a polytope family")
    gen.set_defaults(handler=cmd_gen)
    fam = gen.add_subparsers(dest="family", required=True)
    p = fam.add_parser("fig2")
    p.add_argument("--which", choices=["a", "b", "c", "d"], required=True)
    fam.add_parser("fig3")
    p = fam.add_parser("transportation")
    p.add_argument("--u", type=_int_list, required=True)
    p.add_argument("--v", type=_int_list, required=True)
    p = fam.add_parser("partition-bounded")
    p.add_argument("--n-items", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lower", type=_int_list, required=True)
    p.add_argument("--upper", type=_int_list, required=True)
    p = fam.add_parser("partition-fixed")
    p.add_argument("--kappa", type=_int_list, required=True)
    p = fam.add_parser("matroid")
    p.add_argument("--ground-size", type=int)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--uniform", type=int, metavar="R")
    group.add_argument("--graphic", type=_edge_list, metavar="EDGES", help='e.g. "0,1;1,2;0,2"')
    p = fam.add_parser("nd-parallelotope")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--skew", help='matrix rows, e.g. "1,1,0;0,1,0;0,0,1"')
    p = fam.add_parser("cube")
    p.add_argument("--n", type=int, required=True)
    p = fam.add_parser("simplex")
    p.add_argument("--n", type=int, required=True)
    p = fam.add_parser("random-simple")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("validate", parents=[source], help="shape, emptiness and boundedness report")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("vertices", parents=[source])
    p.add_argument("--method", choices=["auto", "basis", "dd"], default="auto")
    p.set_defaults(handler=cmd_vertices)

    p = sub.add_parser("circuits", parents=[source])
    p.add_argument("--method", choices=["rank", "oracle"], default="rank")
    p.set_defaults(handler=cmd_circuits)

    p = sub.add_parser("walk", parents=[source])
    p.add_argument("--start", type=int, required=True, help="vertex index in sorted order")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--dirs", help='directions, e.g. "1,0;-1,1"')
    group.add_argument("--greedy-to", type=int, help="follow an edge path to this vertex index")
    p.set_defaults(handler=cmd_walk)

    p = sub.add_parser("classify", parents=[source, budget])
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("check-tu", parents=[source])
    p.set_defaults(handler=cmd_check_tu)

    p = sub.add_parser("check-ecw", parents=[source])
    p.add_argument("--via", choices=["elementary", "symmetric", "recognize", "all"], default="all")
    p.set_defaults(handler=cmd_check_ecw)

    p = sub.add_parser("diameter", parents=[source, budget])
    p.add_argument("--kind", choices=["combinatorial", "circuit"], default="combinatorial")
    p.set_defaults(handler=cmd_diameter)

    p = sub.add_parser("cdg", parents=[io])
    p.add_argument("--spec", required=True, help="partition spec JSON")
    p.add_argument("--y1", required=True, help="source clustering JSON")
    p.add_argument("--y2", required=True, help="target clustering JSON")
    p.add_argument("--test", choices=["edge", "circuit"], default="edge")
    p.set_defaults(handler=cmd_cdg)
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def run(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return config.EXIT_INVALID_INPUT if e.code else config.EXIT_OK
    configure_logging(args.verbose)
    if getattr(args, "budget_points", 1) <= 0:
        console.print("[red]error:[/red] --budget-points must be positive")
        return config.EXIT_INVALID_INPUT

    try:
        with subset_limit(args.max_subsets):
            payload, code = args.handler(args)
    except PolywalkError as e:
        logger.debug("%s failed", args.command, exc_info=True)
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        return e.exit_code
    except OSError as e:
        console.print(f"[red]error:[/red] {e}")
        return config.EXIT_INVALID_INPUT
    _write_output(payload, args.output)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
