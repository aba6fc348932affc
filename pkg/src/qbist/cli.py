"""Command-line interface.

Exit status: 0 on success / no violation, 1 on a failed verification,
2 on unparsable input, 3 when a search is infeasible or does not converge.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import geometry as geo
from .fileio import FormatError, read_povm, read_probs, read_sic, read_state, write_fiducial, write_sic
from .report import render
from .representation import (
    as_probability_vector,
    born_rule,
    conditional_matrix,
    positivity_check,
    probs_to_state,
    state_to_probs,
    total_probability,
)
from .reproduce import CLAIMS, OPT_IN_CLAIMS, run_claim
from .search import InfeasibleSearch, distant_clique_search, orthogonal_complement_state, subspace_dependence_search
from .sic_core import MAX_SEARCH_DIM, SearchFailure, known_fiducial, orbit, search_fiducial, verify_sic

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INFEASIBLE = 0, 1, 2, 3


class Failure(Exception):
    """Verification failed; carries the partial report."""

    def __init__(self, report):
        super().__init__("verification failed")
        self.report = report


def _complex_rows(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _search(args, d):
    if d > MAX_SEARCH_DIM:
        raise InfeasibleSearch(f"fiducial search is capped at d <= {MAX_SEARCH_DIM}, got d={d}")
    return search_fiducial(d, seed=args.seed, restarts=args.restarts)


def _load_sic(args):
    if getattr(args, "sic", None):
        return read_sic(args.sic), {"source": args.sic}
    if getattr(args, "dim", None) is None:
        raise FormatError("a SIC is required: pass --sic FILE or --dim D")
    d = args.dim
    if d <= 3 and not getattr(args, "search", False):
        return orbit(known_fiducial(d, args.t)), {"source": "analytic", "t": args.t if d == 3 else None}
    fid = _search(args, d)
    return orbit(fid), {"source": "search", "seed": args.seed, "restarts": args.restarts}


def _gram_block(rep):
    return {
        "max_offdiag_error": rep.max_offdiag_error,
        "max_idempotency_error": rep.max_idempotency_error,
        "resolution_error": rep.resolution_error,
        "max_trace_error": rep.max_trace_error,
        "worst_pair": list(rep.worst_pair),
        "accepted": rep.accepted,
    }


def cmd_build_sic(args):
    d = args.dim
    if d <= 3 and not args.search:
        fid = known_fiducial(d, args.t)
        source = "analytic"
    else:
        fid = _search(args, d)
        source = "search"
    sic = orbit(fid)
    rep = verify_sic(sic, args.tol, args.idem_tol)
    if args.out:
        write_sic(args.out, sic)
    if args.fiducial_out:
        write_fiducial(args.fiducial_out, fid)
    out = {"d": d, "source": source, "fiducial": [[float(z.real), float(z.imag)] for z in fid.amplitudes],
           "gram": _gram_block(rep)}
    if not rep.accepted:
        raise Failure(out)
    return out


def cmd_verify_sic(args):
    sic = read_sic(args.sic)
    rep = verify_sic(sic, args.tol, args.idem_tol)
    out = {"d": sic.d, "tol": args.tol, "idempotency_tol": args.idem_tol, "gram": _gram_block(rep)}
    if not rep.accepted:
        out["offending_pair"] = list(rep.worst_pair)
        raise Failure(out)
    return out


def _sphere_block(p, tol):
    pos = geo.sphere_membership(p, tol)
    return {"norm2_centered": pos.norm2_centered, "radius2": geo.circumscribed_radius2(geo._dim_of(p)),
            "on_sphere": pos.on_sphere, "inside": pos.inside}


def cmd_represent(args):
    sic, meta = _load_sic(args)
    rho = read_state(args.state)
    p = state_to_probs(sic, rho)
    return {"d": sic.d, "sic": meta, "probabilities": p.tolist(), "sum_p2": float(p @ p),
            "sphere": _sphere_block(p, args.tol), "max_component": float(p.max()),
            "zero_count": geo.zero_count(p)}


def cmd_reconstruct(args):
    sic, meta = _load_sic(args)
    p = as_probability_vector(read_probs(args.probs), sic.d)
    m = probs_to_state(sic, p)
    pos = positivity_check(m, args.tol)
    out = {"d": sic.d, "sic": meta, "matrix": _complex_rows(m), "min_eigenvalue": pos.min_eigenvalue,
           "is_state": pos.is_state}
    if not pos.is_state:
        raise Failure(out)
    return out


def cmd_born(args):
    sic, meta = _load_sic(args)
    F = read_povm(args.povm)
    r = conditional_matrix(sic, F)
    out = {"d": sic.d, "sic": meta, "outcomes": len(F)}
    if args.state:
        rho = read_state(args.state)
        p = state_to_probs(sic, rho)
        out["direct"] = np.einsum("ab,jba->j", rho, F).real.tolist()
    elif args.probs:
        p = as_probability_vector(read_probs(args.probs), sic.d)
    else:
        raise FormatError("born needs --state or --probs")
    out["born"] = born_rule(sic.d, p, r).tolist()
    out["total_probability"] = total_probability(p, r).tolist()
    return out


def cmd_geometry(args):
    vectors = [as_probability_vector(read_probs(f)) for f in args.probs]
    if len({v.size for v in vectors}) != 1:
        raise FormatError("probability files have different lengths")
    rep = geo.consistency_report(np.array(vectors), args.tol)
    out = {
        "d": rep.d,
        "count": len(vectors),
        "lower_bound": geo.lower_bound(rep.d),
        "upper_bound": geo.upper_bound(rep.d),
        "pair_products": rep.pair_products.tolist(),
        "lower_violations": [list(x) for x in rep.lower_violations],
        "upper_violations": [list(x) for x in rep.upper_violations],
        "at_lower": [list(x) for x in rep.at_lower],
        "at_upper": [list(x) for x in rep.at_upper],
        "on_sphere": rep.on_sphere,
        "max_components": rep.max_components,
        "zero_counts": rep.zero_counts,
        "consistent": rep.consistent,
    }
    if not rep.consistent:
        raise Failure(out)
    return out


def cmd_basis(args):
    d = args.dim
    n = geo.zero_bound(d)
    return {"d": d, "basis_distributions": geo.basis_distributions(d).tolist(),
            "lower_bound": geo.lower_bound(d), "upper_bound": geo.upper_bound(d),
            "radius2": geo.circumscribed_radius2(d), "zero_bound": n,
            "face_distance2_at_zero_bound": geo.face_distance2(d, n),
            "max_zero_value": geo.max_zero_value(d)}


def cmd_search_distant(args):
    res = distant_clique_search(args.dim)
    witness = [sorted(set(range(args.dim ** 2)) - set(i for i in range(args.dim ** 2) if s >> i & 1))
               for s in res.witness]
    return {"d": args.dim, "support_size": res.support_size, "candidates": res.candidates,
            "max_clique_size": res.max_clique_size, "bound_m": args.dim, "witness_zero_positions": witness}


def cmd_search_subspace(args):
    sic, meta = _load_sic(args)
    cap = float("inf") if args.exhaustive else args.budget
    hits = subspace_dependence_search(sic, args.size, max_subsets=cap)
    return {"d": sic.d, "sic": meta, "size": args.size, "hits": len(hits),
            "subsets": [list(h.subset) for h in hits],
            "smallest_singular_values": [list(h.smallest_singular_values) for h in hits]}


def cmd_complement(args):
    sic, meta = _load_sic(args)
    try:
        idx = [int(x) for x in args.indices.split(",") if x.strip()]
    except ValueError:
        raise FormatError(f"--indices must be comma-separated integers, got {args.indices!r}") from None
    if any(not 0 <= i < sic.size for i in idx):
        raise FormatError(f"indices must lie in [0, {sic.size})")
    try:
        rho = orthogonal_complement_state(sic, idx)
    except ValueError as exc:
        raise Failure({"d": sic.d, "indices": idx, "error": str(exc)}) from None
    p = state_to_probs(sic, rho)
    return {"d": sic.d, "sic": meta, "indices": idx, "state": _complex_rows(rho),
            "probabilities": p.tolist(), "zero_count": geo.zero_count(p),
            "max_zero_at_indices": float(p[idx].max())}


def cmd_reproduce(args):
    if args.list:
        return {"claims": list(CLAIMS), "opt_in": list(OPT_IN_CLAIMS)}
    names = list(CLAIMS) if args.claim == "all" else [args.claim]
    out, ok = {}, True
    for name in names:
        try:
            res = run_claim(name, args.seed)
        except KeyError:
            raise FormatError(f"unknown claim {name!r}; use --list") from None
        measured = {k: v for k, v in res.measured.items() if args.timings or not k.endswith("seconds")}
        out[name] = {"status": "PASS" if res.passed else "FAIL", "title": res.title, **measured}
        ok &= res.passed
    if not ok:
        raise Failure(out)
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--tol", type=float, default=None, help="verification tolerance")
    common.add_argument("--seed", type=int, default=0)

    sic_src = argparse.ArgumentParser(add_help=False)
    sic_src.add_argument("--sic", help="SIC file")
    sic_src.add_argument("--dim", type=int, help="build a SIC for this dimension instead of reading one")
    sic_src.add_argument("--t", type=float, default=0.0, help="qutrit family parameter")
    sic_src.add_argument("--restarts", type=int, default=20)
    sic_src.add_argument("--search", action="store_true", help="search numerically even for d <= 3")

    parser = argparse.ArgumentParser(prog="qbist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-sic", parents=[common], help="construct and verify a SIC")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--search", action="store_true")
    p.add_argument("--idem-tol", type=float, default=1e-10)
    p.add_argument("--out", help="write the SIC file here")
    p.add_argument("--fiducial-out", help="write the fiducial file here")
    p.set_defaults(func=cmd_build_sic, default_tol=1e-9)

    p = sub.add_parser("verify-sic", parents=[common], help="verify a SIC file")
    p.add_argument("--sic", required=True)
    p.add_argument("--idem-tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify_sic, default_tol=1e-9)

    p = sub.add_parser("represent", parents=[common, sic_src], help="state file -> SIC probabilities")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_represent, default_tol=1e-10)

    p = sub.add_parser("reconstruct", parents=[common, sic_src], help="probability file -> operator")
    p.add_argument("--probs", required=True)
    p.set_defaults(func=cmd_reconstruct, default_tol=1e-10)

    p = sub.add_parser("born", parents=[common, sic_src], help="outcome probabilities of a POVM")
    p.add_argument("--povm", required=True)
    p.add_argument("--state")
    p.add_argument("--probs")
    p.set_defaults(func=cmd_born, default_tol=1e-10)

    p = sub.add_parser("geometry", parents=[common], help="consistency report for probability files")
    p.add_argument("--probs", nargs="+", required=True)
    p.set_defaults(func=cmd_geometry, default_tol=1e-10)

    p = sub.add_parser("basis", parents=[common], help="basis distributions and sphere data")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_basis, default_tol=1e-10)

    p = sub.add_parser("search-distant", parents=[common], help="maximally distant max-zero cliques")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_search_distant, default_tol=0.0)

    p = sub.add_parser("search-subspace", parents=[common, sic_src], help="SIC vectors in a hyperplane")
    p.add_argument("--size", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_search_subspace, default_tol=1e-8)

    p = sub.add_parser("complement", parents=[common, sic_src], help="pure state orthogonal to SIC vectors")
    p.add_argument("--indices", required=True, help="comma-separated 0-based SIC indices")
    p.set_defaults(func=cmd_complement, default_tol=1e-10)

    p = sub.add_parser("reproduce", parents=[common], help="run a named reproduction check")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--claim", help="claim id, or 'all'")
    g.add_argument("--list", action="store_true")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (not deterministic)")
    p.set_defaults(func=cmd_reproduce, default_tol=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = args.default_tol
    elif args.tol <= 0:
        parser.error("--tol must be positive")
    fmt = args.format
    try:
        report = args.func(args)
        status = EXIT_OK
    except Failure as exc:
        report, status = exc.report, EXIT_FAIL
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (InfeasibleSearch, SearchFailure) as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    report = {"command": args.command, "status": "ok" if status == EXIT_OK else "fail", **report}
    sys.stdout.write(render(report, fmt))
    return status


if __name__ == "__main__":
    sys.exit(main())
