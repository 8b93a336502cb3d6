"""Command-line front end.

Exit codes: 0 success, 1 internal consistency failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import canforms, complexes, graphs, quadforms, torelli

CACHE_ENV = "ARTIFACT_PERFECT_CACHE"
LONG_GENUS = 5


class UsageError(Exception):
    pass


class ConsistencyError(Exception):
    pass


def _emit(obj, fmt: str = "json") -> None:
    if isinstance(obj, str):
        sys.stdout.write(obj)
    else:
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc
    if v <= 0 or v != int(v):
        raise argparse.ArgumentTypeError(f"not a positive integer: {text}")
    return int(v)


def _genus(g: int, minimum: int = 2) -> int:
    if g < minimum:
        raise UsageError(f"genus must be at least {minimum}")
    return g


# --------------------------------------------------------------- perfect forms


def _form_to_json(Q) -> list[list[str]]:
    return [[str(Fraction(x)) for x in r] for r in Q]


def perfect_forms(g: int) -> list:
    """Perfect forms for genus g, read from and written to the cache directory when one is set."""
    cache = os.environ.get(CACHE_ENV)
    path = Path(cache) / f"perfect_g{g}.json" if cache else None
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        return [tuple(tuple(Fraction(x) for x in r) for r in Q) for Q in data["forms"]]
    forms = quadforms.enumerate_perfect_forms(g)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"schema": "v1", "g": g, "forms": [_form_to_json(Q) for Q in forms]}))
    return forms


def cmd_graphs_enumerate(args) -> int:
    g = _genus(args.genus)
    found = graphs.enumerate_stable_graphs(g, max_edges=args.max_edges, weight_zero_only=args.weight_zero)
    _emit({"schema": "v1", "genus": g, "count": len(found), "graphs": [G.to_json() for G in found]})
    return 0


def _build_complex(variant: str, g: int, max_edges):
    if variant == "gc0":
        return complexes.gc0_complex(g, max_edges)
    if variant == "gc0B":
        return complexes.gc0B_complex(g, max_edges)
    if variant == "relative":
        return complexes.relative_graph_face_complex(g, max_edges)
    if variant == "face":
        return complexes.face_complex(
            quadforms.assemble_perfect_complex(g, forms=perfect_forms(g), strictly_positive_only=True).cells
        )
    raise UsageError(f"unknown variant {variant}")


def cmd_gc_homology(args) -> int:
    g = _genus(args.genus)
    C = _build_complex(args.variant, g, args.max_edges)
    if args.check_d2:
        try:
            C.check_d2()
        except complexes.D2Error as exc:
            raise ConsistencyError(str(exc)) from exc
        sys.stderr.write("d^2 = 0 verified\n")
    b = C.betti(prime=args.prime) if args.prime else C.betti()
    if args.dump:
        Path(args.dump).write_text(json.dumps(C.to_json()))
    if args.format == "csv":
        _emit(complexes.betti_csv(b))
    else:
        _emit({"schema": "v1", "genus": g, "variant": args.variant, "betti": {str(k): v for k, v in sorted(b.items())}})
    return 0


def cmd_perfect(args) -> int:
    g = _genus(args.g)
    if g >= LONG_GENUS and not args.long:
        raise UsageError(f"genus {g} needs --long")
    forms = perfect_forms(g)
    if args.action == "enumerate":
        out = []
        for Q in forms:
            m, vecs = quadforms.minimal_vectors(Q)
            out.append({"Q": _form_to_json(Q), "min": str(m), "num_minimal_vectors": len(vecs)})
        _emit({"schema": "v1", "g": g, "count": len(forms), "forms": out})
    elif args.action == "complex":
        _emit(quadforms.assemble_perfect_complex(g, forms=forms).to_json())
    else:
        out = []
        for Q in forms:
            cone = quadforms.cone_of_form(Q)
            faces = quadforms.cone_faces(cone, max_dim=64)
            out.append(
                {
                    "cone": cone.to_json(),
                    "faces": [{"generators": list(f), "dim": quadforms.face_dim(cone, f)} for f in faces],
                }
            )
        _emit({"schema": "v1", "g": g, "cones": out})
    return 0


def _load_cone(source: str) -> quadforms.Cone:
    if os.path.exists(source):
        return quadforms.Cone.from_json(json.loads(Path(source).read_text()))
    try:
        return quadforms.named_cone(source)
    except KeyError as exc:
        raise UsageError(f"unknown cone {source!r}") from exc


def cmd_integrate(args) -> int:
    if args.input:
        req = json.loads(Path(args.input).read_text())
        form = canforms.parse_form(req["form"])
        cone = req["cone"] if isinstance(req["cone"], str) else None
        cone = _load_cone(cone) if cone else quadforms.Cone.from_json(req["cone"])
        n, seed = int(float(req["n"])), req.get("seed")
    else:
        if not args.cone or not args.form:
            raise UsageError("--cone and --form are required")
        form, cone, n, seed = canforms.parse_form(args.form), _load_cone(args.cone), args.n, args.seed
    if seed is None:
        raise UsageError("a seed is required for Monte-Carlo integration")
    try:
        est = canforms.integrate_cone(form, cone, n, int(seed), threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = est.to_json()
    out["form"] = str(form)
    out["n"] = n
    out["threads_independent"] = True
    if cone.g == 3 and form == canforms.parse_form("w5"):
        ref = 60 * canforms.zeta(3)
        out["reference_60_zeta3"] = ref
        out["ratio_to_zeta3"] = est.value / canforms.zeta(3)
    _emit(out)
    return 0


_DEFAULT_STOKES_CONE = {2: "a2", 3: "q3", 4: "d4"}


def cmd_stokes(args) -> int:
    g = _genus(args.g)
    if args.seed is None:
        raise UsageError("a seed is required for Monte-Carlo integration")
    name = args.cone or _DEFAULT_STOKES_CONE.get(g)
    if name is None:
        raise UsageError(f"no default cone for genus {g}; pass --cone")
    cone = _load_cone(name)
    if cone.g != g:
        raise UsageError("cone genus differs from --g")
    form = canforms.parse_form(args.form)
    faces = canforms.strictly_positive_faces(cone, args.dim)
    if not faces:
        raise UsageError(f"no strictly positive face of dimension {args.dim}")
    if not 0 <= args.face < len(faces):
        raise UsageError(f"face index out of range (0..{len(faces) - 1})")
    try:
        rep = canforms.stokes_residual(form, cone, args.n, args.seed, threads=args.threads, face=faces[args.face])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(rep.to_json())
    if not rep.within:
        raise ConsistencyError("Stokes residual exceeds 3 standard errors")
    return 0


def cmd_torelli(args) -> int:
    G = _load_graph(args.graph)
    inj = torelli.torelli_injective(G)
    out = {"schema": "v1", "graph": G.to_json(), "injective": inj.injective, "rank": inj.rank}
    if inj.injective:
        basis = torelli.WHEEL_BASIS if args.graph == "w3" else None
        rep = torelli.torelli_face_map_check(G, basis)
        out["faces"] = rep.to_json()["faces"]
        _emit(out)
        if not rep.all_matched:
            raise ConsistencyError("face correspondence failed")
    else:
        out["kernel"] = [list(v) for v in inj.kernel]
        _emit(out)
    return 0


def _load_graph(source: str) -> graphs.WeightedGraph:
    if os.path.exists(source):
        return graphs.WeightedGraph.from_json(json.loads(Path(source).read_text()))
    try:
        return graphs.named_graph(source)
    except KeyError as exc:
        raise UsageError(f"unknown graph {source!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Tropical moduli, graph complexes and canonical forms.")
    sub = p.add_subparsers(dest="command", required=True)

    gp = sub.add_parser("graphs", help="stable graph enumeration")
    gsub = gp.add_subparsers(dest="action", required=True)
    ge = gsub.add_parser("enumerate")
    ge.add_argument("--genus", type=int, required=True)
    ge.add_argument("--max-edges", type=int)
    ge.add_argument("--weight-zero", action="store_true", help="only graphs with all weights zero")
    ge.set_defaults(func=cmd_graphs_enumerate)

    cp = sub.add_parser("gc", help="graph and face complexes")
    csub = cp.add_subparsers(dest="action", required=True)
    ch = csub.add_parser("homology")
    ch.add_argument("--genus", type=int, required=True)
    ch.add_argument("--variant", choices=["gc0", "gc0B", "face", "relative"], required=True)
    ch.add_argument("--max-edges", type=int)
    ch.add_argument("--check-d2", action="store_true")
    ch.add_argument("--prime", type=int, help="compute ranks over Z/p instead of Q")
    ch.add_argument("--format", choices=["csv", "json"], default="csv")
    ch.add_argument("--dump", help="write the complex (generators and boundary triplets) as JSON")
    ch.set_defaults(func=cmd_gc_homology)

    pp = sub.add_parser("perfect", help="perfect forms and the perfect cone complex")
    pp.add_argument("action", choices=["enumerate", "complex", "faces"])
    pp.add_argument("--g", type=int, required=True)
    pp.add_argument("--long", action="store_true", help=f"allow genus {LONG_GENUS} and above")
    pp.set_defaults(func=cmd_perfect)

    ip = sub.add_parser("integrate", help="Monte-Carlo integral of a canonical form over a cone")
    ip.add_argument("--cone", help="named cone (w3, a2, q3, d4) or cone JSON path")
    ip.add_argument("--form", help="e.g. w5 or w5^1*w9^1")
    ip.add_argument("--n", type=_count, default=10**6)
    ip.add_argument("--seed", type=int)
    ip.add_argument("--threads", type=int, default=1)
    ip.add_argument("--input", help="request JSON with form, cone, n and seed")
    ip.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("stokes", help="Stokes residual on a strictly positive face")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--form", default="w5")
    sp.add_argument("--cone", help="named cone or cone JSON path (default by genus)")
    sp.add_argument("--face", type=int, default=0, help="index among strictly positive faces of that dimension")
    sp.add_argument("--n", type=_count, default=10**6)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_stokes)

    tp = sub.add_parser("torelli", help="injectivity and face correspondence of the Torelli map")
    tp.add_argument("--graph", required=True, help="named graph or graph JSON path")
    tp.set_defaults(func=cmd_torelli)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"artifact: error: {exc}\n")
        return 2
    except (ConsistencyError, complexes.D2Error, torelli.TorelliConsistencyError) as exc:
        sys.stderr.write(f"artifact: consistency failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
