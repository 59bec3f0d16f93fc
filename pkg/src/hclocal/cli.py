"""Command-line surface.

Subcommands: kernel, build, random-tree, search, eval, check, bench, plus an
undocumented ``oracle`` group for debugging at toy sizes. Exit codes: 0
success, 1 validation error, 2 I/O error, 3 internal invariant violation.
``HC_SEED`` supplies the default seed when ``--seed`` is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import oracle
from .bench import parse_config, run_bench
from .errors import (DataIOError, InputError, InternalInvariantError)
from .interchange import EPSILON, certify_local_optimality
from .linkage import LINKAGE_KINDS, build_linkage
from .localsearch import GREEDY, RANDOM, SearchConfig, search
from .objective import score
from .similarity import (AUTO, gaussian_similarity, load_dataset, load_matrix,
                         save_matrix)
from .tree import HcTree, parse


def _default_seed():
    return int(os.environ.get("HC_SEED", "0"))


def _read_tree(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise DataIOError(f"cannot read tree {path}: {exc}") from exc


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc


def _load_inputs(args, need_sim=True):
    sim = load_matrix(args.sim) if getattr(args, "sim", None) else None
    data = None
    if getattr(args, "data", None):
        delim = getattr(args, "delimiter", ",")
        data = load_dataset(args.data,
                            delimiter=None if delim == "ws" else delim,
                            header=getattr(args, "header", False),
                            label_column=getattr(args, "label_column", None))
    if need_sim and sim is None:
        raise InputError("a similarity matrix (--sim) is required")
    return sim, data


def _add_dataset_flags(p):
    p.add_argument("--delimiter", default=",",
                   help="cell delimiter; use 'ws' for any whitespace")
    p.add_argument("--header", action="store_true",
                   help="skip the first non-empty line")
    p.add_argument("--label-column", type=int, default=None,
                   help="0-based column to drop (kept as row labels)")


def cmd_kernel(args):
    delimiter = None if args.delimiter == "ws" else args.delimiter
    data = load_dataset(args.input, delimiter=delimiter, header=args.header,
                        label_column=args.label_column)
    if args.normalize:
        data = data.zscored()
    sigma = AUTO if args.sigma.lower() == AUTO else float(args.sigma)
    w, chosen = gaussian_similarity(data, sigma)
    save_matrix(w, args.output)
    print(json.dumps({"n": w.n, "sigma": chosen,
                      "total_weight": float(w.total_weight),
                      "output": args.output}))
    return 0


def cmd_build(args):
    if args.kind == "ward":
        if not args.data:
            raise InputError("ward linkage requires --data (raw features)")
        sim, data = _load_inputs(args, need_sim=False)
        t = build_linkage("ward", data=data)
    else:
        sim, _ = _load_inputs(args, need_sim=True)
        t = build_linkage(args.kind, similarity=sim)
    _write_text(args.out, t.serialize())
    msg = {"kind": args.kind, "n": t.n, "out": args.out}
    if args.sim:
        sim = sim or load_matrix(args.sim)
        msg.update(score(t, sim).to_dict())
    print(json.dumps(msg))
    return 0


def cmd_random_tree(args):
    t = HcTree.random(args.n, args.seed)
    _write_text(args.out, t.serialize())
    print(json.dumps({"n": t.n, "seed": args.seed, "out": args.out}))
    return 0


def cmd_search(args):
    sim, _ = _load_inputs(args)
    if args.init == "random":
        t0 = HcTree.random(sim.n, args.seed)
    else:
        t0 = _read_tree(args.init)
    cfg = SearchConfig(variant=args.variant, seed=args.seed,
                       max_steps=args.max_steps, tolerance=args.tolerance)
    log_fh = open(args.log, "w", encoding="utf-8") if args.log else None
    try:
        if log_fh:
            log_fh.write("step\tnode_x\tvariant\tgain\trevenue\n")

            def log_fn(step, x, variant, gain, rev):
                log_fh.write(f"{step}\t{x}\t{variant}\t{float(gain):.12g}"
                             f"\t{float(rev):.12g}\n")
        else:
            log_fn = None
        t, report = search(t0, sim, cfg, log_fn=log_fn)
    finally:
        if log_fh:
            log_fh.close()
    if args.out:
        _write_text(args.out, t.serialize())
    payload = report.to_dict()
    if args.report:
        _write_text(args.report, json.dumps(payload, indent=2))
    brief = {k: payload[k] for k in
             ("variant", "seed", "steps", "converged", "initial_revenue",
              "final_revenue", "final_normalized", "wall_time")}
    print(json.dumps(brief))
    return 0


def cmd_eval(args):
    sim, _ = _load_inputs(args)
    t = _read_tree(args.tree)
    print(json.dumps(score(t, sim).to_dict()))
    return 0


def cmd_check(args):
    sim, _ = _load_inputs(args)
    t = _read_tree(args.tree)
    cert = certify_local_optimality(t, sim, args.tolerance)
    print(json.dumps(cert.to_dict()))
    return 0


def cmd_bench(args):
    cfg = parse_config(args.config)
    if args.out_dir:
        cfg.output = args.out_dir
    _, md = run_bench(cfg)
    print(md)
    return 0


def cmd_oracle(args):
    if args.oracle_cmd == "enumerate":
        space = oracle.enumerate_trees(args.n)
        print(json.dumps({"n": space.n, "count": len(space)}))
        if args.list:
            for text in space.trees:
                print(text)
    elif args.oracle_cmd == "optimum":
        sim = load_matrix(args.sim)
        t, rev = oracle.exact_optimum(sim)
        print(json.dumps({"tree": t.serialize(), "revenue": float(rev)}))
    elif args.oracle_cmd == "idist":
        t1, t2 = _read_tree(args.tree1), _read_tree(args.tree2)
        print(json.dumps({"idist": oracle.idist_exact(t1, t2)}))
    else:
        raise InputError(f"unknown oracle command {args.oracle_cmd!r}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="hcls",
        description="Interchange local search for hierarchical clustering")
    sub = ap.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("kernel",
                       help="build a Gaussian similarity matrix from a dataset")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--sigma", default=AUTO,
                   help="bandwidth, or 'auto' for the mean pairwise distance")
    p.add_argument("--normalize", action="store_true",
                   help="z-score features before the kernel")
    _add_dataset_flags(p)
    p.set_defaults(fn=cmd_kernel)

    p = sub.add_parser("build", help="agglomerative baseline tree")
    p.add_argument("--sim", help="similarity matrix file")
    p.add_argument("--data", help="raw feature file (required for ward)")
    p.add_argument("--kind", required=True, choices=LINKAGE_KINDS)
    p.add_argument("--out", required=True)
    _add_dataset_flags(p)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("random-tree", help="seeded random agglomeration tree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_random_tree)

    p = sub.add_parser("search", help="run local search")
    p.add_argument("--sim", required=True)
    p.add_argument("--init", default="random",
                   help="initial tree file, or 'random'")
    p.add_argument("--variant", choices=(GREEDY, RANDOM), default=GREEDY)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=EPSILON)
    p.add_argument("--out", help="write the final tree here")
    p.add_argument("--report", help="write the full JSON report here")
    p.add_argument("--log", help="write the per-step TSV log here")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("eval", help="score a tree against a matrix")
    p.add_argument("--sim", required=True)
    p.add_argument("--tree", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("check", help="certify local optimality")
    p.add_argument("--sim", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--tolerance", type=float, default=EPSILON)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("bench", help="run the table-reproduction harness")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(fn=cmd_bench)

    # debugging aid at toy sizes; intentionally absent from --help text
    p = sub.add_parser("oracle")
    osub = p.add_subparsers(dest="oracle_cmd")
    q = osub.add_parser("enumerate")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--list", action="store_true")
    q = osub.add_parser("optimum")
    q.add_argument("--sim", required=True)
    q = osub.add_parser("idist")
    q.add_argument("--tree1", required=True)
    q.add_argument("--tree2", required=True)
    p.set_defaults(fn=cmd_oracle)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "fn", None):
        ap.print_help()
        return 1
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    try:
        return args.fn(args)
    except InternalInvariantError as exc:
        _fail("internal", exc)
        return 3
    except InputError as exc:
        _fail("validation", exc)
        return 1
    except (DataIOError, OSError) as exc:
        _fail("io", exc)
        return 2


def _fail(kind, exc):
    sys.stderr.write(json.dumps({"error": str(exc), "kind": kind}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
