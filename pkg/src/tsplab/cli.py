"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a check failed or a violation was found,
2 an inconclusive verdict, 3 malformed flags or unparseable input files.
The default seed comes from TSPLAB_SEED when set.  ``verify-paper`` streams
one JSON line per claim and, unless told otherwise, writes a delimited
summary plus rendered figures next to it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .epsfield import EpsRational
from .hypermat import (
    BipartiteDims,
    EpsMatrix,
    load_matrix,
    partial_transpose,
    psd_check,
    save_matrix,
)
from .choi import (
    MapDecomposition,
    apply_map,
    choi_from_decomposition,
    choi_tensor_power,
    decomposition_from_choi,
    ChoiMatrix,
    eb_witness_check,
    is_cocp,
    is_cp,
    load_map,
    save_map,
)
from .claims import ClaimContext, run_all_claims
from .constructions import (
    counterexample_map,
    perturbed_choi,
    rho_eta_pipeline,
    seed_choi,
    symmetrization_map,
)
from .mamu import (
    bounded_positive_mpo,
    bounded_tsp_mamu,
    load_mpo,
    mamu_projector,
    tau_n,
    verify_reduction,
    load_mpo as _load_mpo,
)
from .layers import (
    classify,
    from_json_scalar,
    inner_product_counterexample,
    l2_tsp_witness,
    ring_order_axioms,
)
from .positivity import SearchBudget

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _default_seed() -> int:
    return int(os.environ.get("TSPLAB_SEED", "7"))


def _emit(obj: dict, human: bool) -> None:
    if human:
        parts = [f"{k}={v}" for k, v in obj.items() if not isinstance(v, (dict, list))]
        print("  ".join(parts))
    else:
        print(json.dumps(obj))


def _load_json_file(path: str, loader):
    try:
        return loader(path)
    except json.JSONDecodeError as exc:
        print(f"error: {path}: line {exc.lineno} column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_verify_paper(args) -> int:
    ctx = ClaimContext(seed=args.seed, restarts=args.restarts, n_max=args.n_max,
                       max_dim=args.max_dim)
    outdir = args.out
    stream = None
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        stream = open(os.path.join(outdir, "report.jsonl"), "w")

    def emit(report):
        line = report.to_json()
        if stream is not None:
            stream.write(json.dumps(line) + "\n")
            stream.flush()
        if args.human:
            print(f"[{report.verdict.upper():4s}] {report.claim} "
                  f"({report.runtime_ms} ms)")
        else:
            print(json.dumps(line))

    selected = None
    if args.claim:
        from .claims import CLAIMS
        known = {spec.claim for spec in CLAIMS}
        for name in args.claim:
            if name not in known:
                print(f"error: unknown claim {name!r}", file=sys.stderr)
                return EXIT_USAGE
        selected = set(args.claim)
    reports = run_all_claims(ctx, emit, only=selected)
    if stream is not None:
        stream.close()
    if outdir:
        from .reporting import render_figures, write_csv
        write_csv(reports, os.path.join(outdir, "claims.csv"))
        if not args.no_figures:
            render_figures(os.path.join(outdir, "figures"), seed=args.seed)
    failed = [r for r in reports if r.verdict == "fail"]
    inconclusive = [r for r in reports if r.verdict == "inconclusive"]
    if args.human:
        print(f"{len(reports) - len(failed) - len(inconclusive)}/{len(reports)} claims pass")
        for r in failed:
            print(f"  failed: {r.claim}")
    if failed:
        return EXIT_FAIL
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_psd(args) -> int:
    m = _load_json_file(args.file, load_matrix)
    if args.dims:
        dims = BipartiteDims(args.dims[0], args.dims[1])
        if args.partial_transpose:
            m = partial_transpose(m, dims)
    verdict = psd_check(m)
    _emit(verdict.to_json(), args.human)
    return EXIT_OK if verdict.is_psd else EXIT_FAIL


def cmd_choi(args) -> int:
    if args.choi_action == "from-map":
        p = _load_json_file(args.map, load_map)
        c = choi_from_decomposition(p)
        save_matrix(c.matrix, args.out)
        _emit({"rows": c.matrix.rows, "d_out": c.d_out, "d_in": c.d_in,
               "out": args.out}, args.human)
        return EXIT_OK
    if args.choi_action == "apply":
        p = _load_json_file(args.map, load_map)
        x = _load_json_file(args.input, load_matrix)
        y = apply_map(p, x)
        if args.out:
            save_matrix(y, args.out)
        _emit({"rows": y.rows, "out": args.out}, args.human)
        return EXIT_OK
    if args.choi_action == "power":
        p = _load_json_file(args.map, load_map)
        c = choi_tensor_power(p, args.n, max_dim=args.max_dim)
        save_matrix(c.matrix, args.out)
        _emit({"rows": c.matrix.rows, "out": args.out}, args.human)
        return EXIT_OK
    if args.choi_action == "check":
        p = _load_json_file(args.map, load_map)
        cp = is_cp(p)
        cocp = is_cocp(p)
        eb = eb_witness_check(p)
        _emit({"cp": cp.status, "cocp": cocp.status,
               "eb_witnessed": eb}, args.human)
        return EXIT_OK
    return EXIT_USAGE


def cmd_construct(args) -> int:
    if args.what == "seed-choi":
        c = seed_choi(args.d1, args.d2)
        save_matrix(c.matrix, args.out)
        _emit({"out": args.out, "rows": c.matrix.rows}, args.human)
        return EXIT_OK
    if args.what == "perturbed-choi":
        c = perturbed_choi(seed_choi(args.d1, args.d2))
        save_matrix(c.matrix, args.out)
        _emit({"out": args.out, "rows": c.matrix.rows}, args.human)
        return EXIT_OK
    if args.what == "rho-eta":
        rep = rho_eta_pipeline()
        if args.out:
            save_matrix(rep.rho_computed, args.out)
        _emit(rep.to_json() | {"out": args.out}, args.human)
        ok = (rep.trace_one and rep.psd.is_psd and not rep.npt.is_psd
              and rep.shadow_ppt.is_psd)
        return EXIT_OK if ok else EXIT_FAIL
    if args.what == "counterexample":
        save_map(counterexample_map(args.d), args.out)
        _emit({"out": args.out}, args.human)
        return EXIT_OK
    if args.what == "symmetrizer":
        save_map(symmetrization_map(args.d), args.out)
        _emit({"out": args.out}, args.human)
        return EXIT_OK
    return EXIT_USAGE


def cmd_mamu(args) -> int:
    if args.mamu_action == "decide":
        p = _load_json_file(args.map, load_map)
        verdict = bounded_tsp_mamu(p, args.n_max, max_dense_dim=args.max_dim)
        _emit(verdict.to_json(), args.human)
        return EXIT_FAIL if verdict.violated else EXIT_OK
    if args.mamu_action == "verify-reduction":
        if args.mpo:
            tensor = _load_json_file(args.mpo, _load_mpo)
            check = verify_reduction(tensor, args.n_max)
            _emit({"ok": check.ok, "first_mismatch": check.first_mismatch}, args.human)
            return EXIT_OK if check.ok else EXIT_FAIL
        from .mamu import random_mpo
        results = {}
        ok = True
        for k in range(args.tensors):
            tensor = random_mpo(9, 9, seed=args.seed + k)
            check = verify_reduction(tensor, args.n_max)
            results[f"seed_{args.seed + k}"] = check.ok
            ok = ok and check.ok
        _emit({"ok": ok, "tensors": results, "n_max": args.n_max}, args.human)
        return EXIT_OK if ok else EXIT_FAIL
    if args.mamu_action == "project":
        m = mamu_projector(args.d, args.n, max_dim=args.max_dim)
        save_matrix(m, args.out)
        _emit({"out": args.out, "rows": m.rows}, args.human)
        return EXIT_OK
    return EXIT_USAGE


def cmd_mpo(args) -> int:
    if args.mpo_action == "decide":
        tensor = _load_json_file(args.mpo, load_mpo)
        verdict = bounded_positive_mpo(tensor, args.n_max)
        _emit(verdict.to_json(), args.human)
        return EXIT_FAIL if verdict.violated else EXIT_OK
    if args.mpo_action == "tau":
        tensor = _load_json_file(args.mpo, load_mpo)
        diag = tau_n(tensor, args.n)
        payload = diag.to_json()
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(payload, fh)
        else:
            _emit(payload, args.human)
        return EXIT_OK
    return EXIT_USAGE


def cmd_layers(args) -> int:
    if args.layers_action == "classify":
        with open(args.file) as fh:
            obj = json.load(fh)
        scalar = from_json_scalar(obj)
        kind = classify(scalar)
        _emit({"classification": kind}, args.human)
        return EXIT_OK if kind != "undetermined" else EXIT_INCONCLUSIVE
    if args.layers_action == "inner-counterexample":
        rep = inner_product_counterexample(args.eps, args.cutoff)
        _emit(rep.to_json(), args.human)
        return EXIT_OK if rep.disagreement else EXIT_FAIL
    if args.layers_action == "ring-axioms":
        rep = ring_order_axioms(args.samples, seed=args.seed)
        _emit(rep.to_json(), args.human)
        return EXIT_OK if rep.all_pass else EXIT_FAIL
    if args.layers_action == "witness":
        rep = l2_tsp_witness(args.m_max, (args.window[0], args.window[1]),
                             SearchBudget(restarts=args.restarts, seed=args.seed))
        _emit(rep.to_json(), args.human)
        return EXIT_OK if rep.all_pass else EXIT_FAIL
    return EXIT_USAGE


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tsplab",
                     description="exact toolkit for tensor stable positivity")
    parser.add_argument("--human", action="store_true",
                        help="human-readable output instead of JSON")
    parser.add_argument("--json", dest="human", action="store_false",
                        help="JSON output (default)")
    sub = parser.add_subparsers(dest="command", required=True)

    vp = sub.add_parser("verify-paper", help="run the full claim suite")
    vp.add_argument("--seed", type=int, default=_default_seed())
    vp.add_argument("--restarts", "--budget", type=int, default=1000,
                    help="restarts for the heavy block-positivity searches")
    vp.add_argument("--n-max", type=int, default=3)
    vp.add_argument("--max-dim", type=int, default=2000)
    vp.add_argument("--out", help="directory for report.jsonl, claims.csv, figures/")
    vp.add_argument("--no-figures", action="store_true")
    vp.add_argument("--claim", action="append",
                    help="run only the named claim (repeatable)")
    vp.set_defaults(fn=cmd_verify_paper)

    psd = sub.add_parser("psd", help="exact psd check of a matrix file")
    psd.add_argument("--file", required=True)
    psd.add_argument("--dims", type=int, nargs=2, metavar=("DA", "DB"))
    psd.add_argument("--partial-transpose", action="store_true",
                     help="check the input-transposed matrix (needs --dims)")
    psd.set_defaults(fn=cmd_psd)

    choi = sub.add_parser("choi", help="Choi-matrix operations")
    choi_sub = choi.add_subparsers(dest="choi_action", required=True)
    cfm = choi_sub.add_parser("from-map")
    cfm.add_argument("--map", required=True)
    cfm.add_argument("--out", required=True)
    cap = choi_sub.add_parser("apply")
    cap.add_argument("--map", required=True)
    cap.add_argument("--input", required=True)
    cap.add_argument("--out")
    cpw = choi_sub.add_parser("power")
    cpw.add_argument("--map", required=True)
    cpw.add_argument("--n", type=int, required=True)
    cpw.add_argument("--out", required=True)
    cpw.add_argument("--max-dim", type=int, default=2000)
    cck = choi_sub.add_parser("check")
    cck.add_argument("--map", required=True)
    for p in (cfm, cap, cpw, cck):
        p.set_defaults(fn=cmd_choi)

    con = sub.add_parser("construct", help="build the named objects")
    con_sub = con.add_subparsers(dest="what", required=True)
    sc = con_sub.add_parser("seed-choi")
    sc.add_argument("--d1", type=int, default=3)
    sc.add_argument("--d2", type=int, default=3)
    sc.add_argument("--out", required=True)
    pc = con_sub.add_parser("perturbed-choi")
    pc.add_argument("--d1", type=int, default=3)
    pc.add_argument("--d2", type=int, default=3)
    pc.add_argument("--out", required=True)
    re_ = con_sub.add_parser("rho-eta")
    re_.add_argument("--out")
    ce = con_sub.add_parser("counterexample")
    ce.add_argument("--d", type=int, default=3)
    ce.add_argument("--out", required=True)
    sy = con_sub.add_parser("symmetrizer")
    sy.add_argument("--d", type=int, default=2)
    sy.add_argument("--out", required=True)
    for p in (sc, pc, re_, ce, sy):
        p.set_defaults(fn=cmd_construct)

    mam = sub.add_parser("mamu", help="projector-restricted decision loops")
    mam_sub = mam.add_subparsers(dest="mamu_action", required=True)
    md = mam_sub.add_parser("decide")
    md.add_argument("--map", required=True)
    md.add_argument("--n-max", type=int, required=True)
    md.add_argument("--max-dim", type=int, default=2000)
    mv = mam_sub.add_parser("verify-reduction")
    mv.add_argument("--mpo", help="tensor file; omitted -> seeded random tensors")
    mv.add_argument("--n-max", type=int, default=3)
    mv.add_argument("--seed", type=int, default=_default_seed())
    mv.add_argument("--tensors", type=int, default=5)
    mp = mam_sub.add_parser("project")
    mp.add_argument("--d", type=int, required=True)
    mp.add_argument("--n", type=int, required=True)
    mp.add_argument("--out", required=True)
    mp.add_argument("--max-dim", type=int, default=2000)
    for p in (md, mv, mp):
        p.set_defaults(fn=cmd_mamu)

    mpo = sub.add_parser("mpo", help="MPO diagonal decision loops")
    mpo_sub = mpo.add_subparsers(dest="mpo_action", required=True)
    pd = mpo_sub.add_parser("decide")
    pd.add_argument("--mpo", required=True)
    pd.add_argument("--n-max", type=int, required=True)
    pt = mpo_sub.add_parser("tau")
    pt.add_argument("--mpo", required=True)
    pt.add_argument("--n", type=int, required=True)
    pt.add_argument("--out")
    for p in (pd, pt):
        p.set_defaults(fn=cmd_mpo)

    lay = sub.add_parser("layers", help="sequence-space checks")
    lay_sub = lay.add_subparsers(dest="layers_action", required=True)
    lc = lay_sub.add_parser("classify")
    lc.add_argument("--file", required=True)
    li = lay_sub.add_parser("inner-counterexample")
    li.add_argument("--eps", type=_frac, default=Fraction(1, 10))
    li.add_argument("--cutoff", type=int, default=10 ** 4)
    lr = lay_sub.add_parser("ring-axioms")
    lr.add_argument("--samples", type=int, default=200)
    lr.add_argument("--seed", type=int, default=_default_seed())
    lw = lay_sub.add_parser("witness")
    lw.add_argument("--m-max", type=int, default=2)
    lw.add_argument("--window", type=int, nargs=2, default=(2, 5))
    lw.add_argument("--restarts", type=int, default=200)
    lw.add_argument("--seed", type=int, default=_default_seed())
    for p in (lc, li, lr, lw):
        p.set_defaults(fn=cmd_layers)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
