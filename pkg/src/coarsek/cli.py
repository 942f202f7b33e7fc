"""Command line front end.

Subcommands: ``homology`` (chain-level invariants of a graph), ``k0-map``
and ``k1-map`` (run the degree-0/degree-1 constructions with their full
verification suites), ``verify`` (the built-in scenario runner).  Reports go
to stdout, human readable by default or as JSON with --json.  Exit codes:
0 all checks passed, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .chains import (
    BandedZChain,
    Chain0,
    Chain1,
    ChainError,
    banded_cycle_value,
    boundary,
    chain_from_json,
    homology_finite,
    solve_boundary_finite,
    solve_boundary_on_z,
    uf_class_on_z,
    uniform_bound,
)
from .graphs import GraphError, OrientedGraph, graph_from_json
from .k0_map import (
    boundary_witness,
    build_projection_pair,
    k0_signature,
    slot_ceiling,
    uniform_corner_holds,
    witness_report_json,
)
from .k1_map import (
    NonCycleError,
    canonical_matching,
    compress_to_uniform,
    cycle_unitary,
    line_cycle_unitary,
    permuted_matching,
    verify_matching_independence,
)
from .operators import (
    MarginError,
    OperatorError,
    Window,
    dump_lines,
    index_pairing,
    is_unitary_on,
    operator_to_json,
)
from .scenarios import SCENARIOS, CheckResult, Report, run_all

log = logging.getLogger("coarsek")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _load_json_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _load_graph(path: str):
    try:
        return graph_from_json(_load_json_file(path))
    except (GraphError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: bad graph file: {exc}")


def _load_chain(path: str, graph=None):
    try:
        return chain_from_json(_load_json_file(path), graph)
    except (ChainError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: bad chain file: {exc}")


def _dump_operators(directory: str, named_ops: dict) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, op in named_ops.items():
        (out / f"{name}.txt").write_text("\n".join(dump_lines(op)) + "\n")
        (out / f"{name}.json").write_text(
            json.dumps(operator_to_json(op), indent=1, sort_keys=True)
        )
    log.info("dumped %d operators to %s", len(named_ops), directory)


def _emit(report: Report, as_json: bool) -> int:
    if as_json:
        print(json.dumps(report.to_json(), indent=1, sort_keys=True))
    else:
        print("\n".join(report.render()))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# homology


def cmd_homology(args) -> int:
    g = _load_graph(args.graph)
    if isinstance(g, OrientedGraph):
        res = homology_finite(g)
        payload = {
            "h0": str(res.h0),
            "h0_torsion": list(res.h0.torsion),
            "h0_free_rank": res.h0.free_rank,
            "h1_rank": res.h1_rank,
            "h1_basis": [
                {str(k): v for k, v in b.coeffs.items()} for b in res.h1_basis
            ],
        }
        if args.json:
            print(json.dumps(payload, indent=1, sort_keys=True))
        else:
            print(f"H0 = {res.h0}")
            print(f"H1 rank = {res.h1_rank}")
            for i, b in enumerate(res.h1_basis):
                print(f"  basis[{i}] = {b.coeffs}")
        return EXIT_OK
    if g.is_edgeless:
        payload = {
            "graph": "edgeless line",
            "h1": "0 (there are no 1-chains)",
            "h0_bounded": "the group of bounded chains; nothing bounds",
            "note": "the degree-0 map into operator classes is a proper quotient",
        }
    elif g.is_pure_line:
        payload = {
            "graph": "line",
            "h1": "Z (a banded 1-cycle is constant; its value is the class)",
            "h0_unbounded": "0 (every banded 0-chain bounds, witness may be unbounded)",
            "h0_bounded": "classified by the tail pair of the chain",
        }
    else:
        raise InputError(
            "homology for banded graphs is implemented for the plain line "
            "and the edgeless line only"
        )
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for key, val in payload.items():
            print(f"{key}: {val}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# degree-0 map


def cmd_k0(args) -> int:
    g = _load_graph(args.graph)
    chain = _load_chain(args.chain, g if isinstance(g, OrientedGraph) else None)
    report = Report(name="k0-map")
    dumps = {}
    if isinstance(g, OrientedGraph):
        if not isinstance(chain, Chain0):
            raise InputError("the degree-0 map needs a degree-0 chain")
        pair = build_projection_pair(chain)
        f, gg = pair.f, pair.g
        report.checks.append(
            CheckResult(
                "projections are idempotent, selfadjoint and orthogonal",
                f.compose(f) == f
                and gg.compose(gg) == gg
                and f.adjoint() == f
                and gg.adjoint() == gg
                and f.compose(gg).is_zero(),
            )
        )
        sig = k0_signature(pair)
        report.checks.append(
            CheckResult(
                "signature equals coefficient sum",
                sig == chain.total(),
                {"signature": sig, "sum": chain.total()},
                verbose=True,
            )
        )
        gamma = solve_boundary_finite(g, chain)
        if gamma is None:
            report.checks.append(
                CheckResult(
                    "chain does not bound (signature is the obstruction witness)",
                    True,
                    {"signature": sig},
                )
            )
        else:
            w = boundary_witness(gamma)
            report.checks.append(
                CheckResult(
                    "boundary witness identities",
                    w.ok and sig == 0,
                    witness_report_json(w),
                )
            )
            dumps["witness_v"] = w.v
        dumps["f"] = f
        dumps["g"] = gg
    else:
        if not isinstance(chain, BandedZChain) or chain.degree != 0:
            raise InputError("banded graphs need a banded degree-0 chain")
        if not g.is_pure_line and not g.is_edgeless:
            raise InputError("banded degree-0 map: plain or edgeless line only")
        window = Window(radius=args.window, margin=args.margin)
        pair = build_projection_pair(chain, window)
        report.checks.append(
            CheckResult(
                "pair confined to the corner below the uniform bound",
                uniform_corner_holds(chain, pair),
                {"slot_ceiling": slot_ceiling(pair), "strict_bound": uniform_bound(chain)},
            )
        )
        report.checks.append(
            CheckResult(
                "bounded-class invariant",
                True,
                {"tail_pair": uf_class_on_z(chain)},
                verbose=True,
            )
        )
        if g.is_pure_line:
            sol = solve_boundary_on_z(chain)
            details = {
                "bounded": sol.bounded,
                "slope_left": sol.slope_left,
                "slope_right": sol.slope_right,
            }
            ok = True
            if sol.bounded:
                ok = sol.gamma is not None and boundary(sol.gamma) == chain
            report.checks.append(
                CheckResult("boundary solution on the line", ok, details, verbose=True)
            )
        dumps["f"] = pair.f
        dumps["g"] = pair.g
    if args.dump:
        _dump_operators(args.dump, dumps)
    return _emit(report, args.json)


# ---------------------------------------------------------------------------
# degree-1 map


def _named_noncycle_vertex(chain: BandedZChain) -> int:
    d = boundary(chain)
    for i in range(d.window_start, d.window_end):
        if d.value(i):
            return i
    return d.window_start


def cmd_k1(args) -> int:
    g = _load_graph(args.graph)
    chain = _load_chain(args.chain, g if isinstance(g, OrientedGraph) else None)
    report = Report(name="k1-map")
    dumps = {}
    if isinstance(g, OrientedGraph):
        if not isinstance(chain, Chain1):
            raise InputError("the degree-1 map needs a degree-1 chain")
        try:
            cu = cycle_unitary(chain)
        except NonCycleError as exc:
            raise InputError(str(exc))
        ex = cu.expanded
        report.checks.append(
            CheckResult("cycle unitary is exactly unitary", is_unitary_on(cu.u))
        )
        defect = cu.u.defect()
        report.checks.append(
            CheckResult(
                "entries join adjacent vertices only",
                all(
                    r.vertex == c.vertex or ex.adjacent(r.vertex, c.vertex)
                    for (r, c) in defect.entries
                ),
            )
        )
        if ex.edges:
            comp = compress_to_uniform(cu)
            report.checks.append(
                CheckResult(
                    "compression into the ordinal corner",
                    comp.round_trip_ok and comp.confinement_ok,
                    {"corner": comp.n, "max_valence": comp.max_valence},
                )
            )
            dumps["u_tilde"] = comp.u_tilde
        if args.matching:
            data = _load_json_file(args.matching)
            lookup = {str(v): v for v in g.vertices}
            try:
                positions = {
                    lookup[key]: tuple(val)
                    for key, val in data.get("positions", {}).items()
                }
                beta = permuted_matching(ex, positions)
            except (KeyError, ValueError, NonCycleError) as exc:
                raise InputError(f"{args.matching}: bad matching override: {exc}")
            rep = verify_matching_independence(chain, canonical_matching(ex), beta)
            report.checks.append(
                CheckResult(
                    "matching independence (product identity)",
                    rep.content_ok,
                    rep.to_json(),
                )
            )
            report.checks.append(
                CheckResult(
                    "matching independence (two-conjugation route)",
                    rep.literal_route_ok,
                    rep.to_json(),
                    advisory=not args.strict_matching,
                )
            )
        dumps["u"] = cu.u
    else:
        if not isinstance(chain, BandedZChain) or chain.degree != 1:
            raise InputError("banded graphs need a banded degree-1 chain")
        if not g.is_pure_line:
            raise InputError("banded degree-1 map: plain line only")
        k = banded_cycle_value(chain)
        if k is None:
            raise InputError(
                f"not a cycle: the boundary is nonzero at vertex "
                f"{_named_noncycle_vertex(chain)}"
            )
        window = Window(radius=args.window, margin=args.margin)
        cu = line_cycle_unitary(k, window)
        idx = index_pairing(cu.u, window)
        double = Window(radius=2 * args.window, margin=args.margin)
        idx2 = index_pairing(line_cycle_unitary(k, double).u, double)
        report.checks.append(
            CheckResult(
                "index pairing stable under window doubling",
                idx == idx2,
                {"class": k, "index": idx, "index_doubled_window": idx2},
                verbose=True,
            )
        )
        dumps["u"] = cu.u
    if args.dump:
        _dump_operators(args.dump, dumps)
    return _emit(report, args.json)


# ---------------------------------------------------------------------------
# scenario runner


def cmd_verify(args) -> int:
    if args.scenario is not None and args.scenario not in SCENARIOS:
        raise InputError(
            f"unknown scenario {args.scenario!r}; choose from {sorted(SCENARIOS)}"
        )
    reports = run_all(
        seed=args.seed, scenario=args.scenario, strict_matching=args.strict_matching
    )
    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=1, sort_keys=True))
    else:
        for r in reports:
            print("\n".join(r.render()))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coarsek",
        description="exact maps from graph homology to operator K-theory classes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_hom = sub.add_parser("homology", help="homology of a graph file")
    p_hom.add_argument("--graph", required=True)
    p_hom.add_argument("--json", action="store_true")
    p_hom.set_defaults(fn=cmd_homology)

    for name, fn in (("k0-map", cmd_k0), ("k1-map", cmd_k1)):
        p = sub.add_parser(name, help=f"run the {name} construction and checks")
        p.add_argument("--graph", required=True)
        p.add_argument("--chain", required=True)
        p.add_argument("--window", type=int, default=16, help="central radius")
        p.add_argument("--margin", type=int, default=8)
        p.add_argument("--dump", metavar="DIR", help="write operator dumps")
        p.add_argument("--json", action="store_true")
        p.add_argument("--strict-matching", action="store_true")
        if name == "k1-map":
            p.add_argument("--matching", help="matching override file")
        p.set_defaults(fn=fn)

    p_ver = sub.add_parser("verify", help="run the built-in scenario suite")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--scenario", choices=sorted(SCENARIOS), default=None)
    p_ver.add_argument(
        "--strict-matching",
        action="store_true",
        help="count the two-conjugation route as a hard failure",
    )
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("COARSEK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        from .scenarios import DEFAULT_SEED

        args.seed = DEFAULT_SEED
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GraphError, ChainError, MarginError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OperatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
