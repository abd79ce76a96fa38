"""Command-line entry point.

Every subcommand prints ``{"manifest": ..., "result": ...}`` as JSON. The
manifest records the resolved configuration, seed, worker count, input
digests and timing; ``result`` is the payload and does not depend on the
worker count. Exit codes: 0 success, 2 invalid input, 3 UNKNOWN-dominated
result under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, bounds, ermsim, shattering
from .core import DEFAULT_CONFIG, HypothesisClass, QueryFile, Status
from .errors import ContrastiveError
from .parallel import ENV_THREADS, resolve_workers
from .realizability import realize

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNKNOWN = 3


class CLIError(Exception):
    def __init__(self, message: str, kind: str = "validation_error"):
        super().__init__(message)
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message, "usage_error")


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path: str, digests: dict):
    p = Path(path)
    if not p.is_file():
        raise CLIError(f"file not found: {path}", "file_not_found")
    raw = p.read_bytes()
    digests[str(path)] = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CLIError(f"invalid JSON in {path}: {exc}") from None
    if isinstance(data, dict) and "manifest" in data and "result" in data:
        sub = data["manifest"].get("subcommand") if isinstance(data["manifest"], dict) else None
        raise CLIError(f"{path} is a report produced by '{sub}', not an input file")
    return data


def _load_queries(path: str, digests: dict) -> QueryFile:
    qf = QueryFile.from_dict(_load_json(path, digests))
    if qf.hclass is None:
        raise CLIError(f"{path} does not name a hypothesis class")
    return qf


def _hclass(args) -> HypothesisClass:
    return HypothesisClass.from_dict({k: v for k, v in
                                      (("variant", args.hclass), ("p", args.p), ("d", args.d),
                                       ("alpha", args.alpha)) if v is not None})


# ---------------------------------------------------------------------------
# subcommands; each returns (result, unknown_dominated)


def cmd_realize(args, ctx):
    qf = _load_queries(args.input, ctx["digests"])
    if qf.labels is None:
        raise CLIError(f"{args.input} has no labels to realize")
    config = replace(DEFAULT_CONFIG, seed=args.seed, workers=ctx["workers"],
                     restarts=args.restarts if args.restarts is not None else DEFAULT_CONFIG.restarts)
    ctx["config"] = {"restarts": config.restarts, "exact_odd_p": args.exact_odd_p}
    verdict = realize(qf.queries, qf.labels, qf.hclass, config, exact_odd_p=args.exact_odd_p)
    return verdict.to_dict(), verdict.status == Status.UNKNOWN


def cmd_shatter(args, ctx):
    qf = _load_queries(args.input, ctx["digests"])
    config = replace(DEFAULT_CONFIG, seed=args.seed, workers=ctx["workers"])
    policy = args.accept_unknown
    if policy is None and shattering.may_be_unknown(qf.hclass, args.exact_odd_p):
        policy = shattering.REFUTED
    ctx["config"] = {"accept_unknown": policy, "exact_odd_p": args.exact_odd_p}
    report = shattering.is_shattered(qf.queries, qf.hclass, policy, config=config,
                                     exact_odd_p=args.exact_odd_p)
    return report.to_dict(), report.refuter_status == Status.UNKNOWN


def cmd_vcdim(args, ctx):
    hclass = _hclass(args)
    config = replace(DEFAULT_CONFIG, seed=args.seed, workers=ctx["workers"])
    ctx["config"] = {"class": hclass.to_dict(), "budget": args.budget,
                     "max_queries": args.max_queries, "kind": args.kind}
    res = shattering.vc_search(args.n, hclass, args.max_queries, args.budget, args.seed,
                               args.kind, config)
    return res.to_dict(), False


def cmd_construct(args, ctx):
    c = shattering.construct(args.family, args.n, args.d, args.p)
    ctx["config"] = {"family": args.family, "n": args.n, "d": args.d, "p": args.p,
                     "verify": args.verify}
    out = {"family": args.family, "params": c.params, "queries": len(c.queries),
           "query_list": [list(q) for q in c.queries]}
    if args.verify:
        out["labelings_verified"] = shattering.verify_construction(c)
    return out, False


def cmd_bounds(args, ctx):
    ctx["config"] = {"setting": args.setting, "n": args.n, "d": args.d, "p": args.p,
                     "k": args.k, "eps": args.eps, "delta": args.delta,
                     "agnostic": args.agnostic, "alpha": args.alpha}
    report = bounds.bound_report(args.setting, args.n, args.d, args.p, args.k, args.eps,
                                 args.delta, args.agnostic, args.alpha)
    return report.to_dict(), False


def cmd_wendel(args, ctx):
    if args.vectors:
        vecs = np.asarray(_load_json(args.vectors, ctx["digests"]), dtype=float)
        if vecs.ndim != 2:
            raise CLIError("vectors file must hold a list of equal-length lists")
    else:
        if args.dim is None or args.m is None:
            raise CLIError("give --dim and --m, or --vectors")
        rng = np.random.default_rng([args.seed, args.dim, args.m])
        vecs = rng.standard_normal((args.m, args.dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    dim, m = vecs.shape[1], vecs.shape[0]
    ctx["config"] = {"dim": dim, "m": m, "trials": args.trials,
                     "vectors": "file" if args.vectors else "gaussian_unit"}
    mc = bounds.hemisphere_monte_carlo(vecs, args.trials, args.seed)
    bound = bounds.hemisphere_bound(dim, m)
    out = mc.to_dict()
    out.update({"bound": str(bound), "bound_float": float(bound),
                "within_bound": mc.miss_probability <= float(bound) + mc.half_width})
    return out, False


def cmd_jl(args, ctx):
    pts = np.asarray(_load_json(args.points, ctx["digests"]), dtype=float)
    if pts.ndim != 2:
        raise CLIError("points file must hold a list of equal-length lists")
    d1 = args.d1 if args.d1 is not None else bounds.jl_min_dimension(len(pts), args.beta)
    ctx["config"] = {"beta": args.beta, "d1": d1}
    return bounds.jl_check(pts, args.beta, d1, args.seed).to_dict(), False


def cmd_simulate(args, ctx):
    data = _load_json(args.config, ctx["digests"])
    if not isinstance(data, dict):
        raise CLIError("simulation config must be a JSON object")
    data.setdefault("seeds", [args.seed])
    cfg = ermsim.SimConfig.from_dict(data)
    ctx["config"] = cfg.to_dict()
    res = ermsim.run_sim(cfg, ctx["workers"])
    if args.out:
        ctx["csv"] = list(res.csv_rows())
    return res.to_dict(), False


COMMANDS = {
    "realize": cmd_realize,
    "shatter": cmd_shatter,
    "vcdim": cmd_vcdim,
    "construct": cmd_construct,
    "bounds": cmd_bounds,
    "wendel": cmd_wendel,
    "jl-check": cmd_jl,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes (default: all cores; {ENV_THREADS} overrides)")
    common.add_argument("--strict", action="store_true",
                        help="exit 3 when the result is dominated by UNKNOWN verdicts")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = _Parser(prog="contrastive-vc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("realize", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--exact-odd-p", action="store_true")
    p.add_argument("--restarts", type=int, default=None)

    p = sub.add_parser("shatter", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--exact-odd-p", action="store_true")
    p.add_argument("--accept-unknown", choices=[shattering.REFUTED, shattering.ABORT])

    p = sub.add_parser("vcdim", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="hclass", required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--budget", type=int, default=4)
    p.add_argument("--max-queries", type=int)
    p.add_argument("--kind", default="triplet", choices=["triplet", "quadruplet"])

    p = sub.add_parser("construct", parents=[common])
    p.add_argument("--family", required=True, choices=["lp", "cosine", "arbitrary", "class"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("bounds", parents=[common])
    p.add_argument("--setting", required=True, choices=bounds.SETTINGS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--alpha", type=float)
    p.add_argument("--agnostic", action="store_true")

    p = sub.add_parser("wendel", parents=[common])
    p.add_argument("--dim", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--vectors", help="JSON list of vectors (default: random unit vectors)")

    p = sub.add_parser("jl-check", parents=[common])
    p.add_argument("--points", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d1", type=int)

    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("--config", required=True)
    return parser


def _emit(text: str, out: str | None, stdout):
    if out:
        Path(out).write_text(text)
    else:
        stdout.write(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ctx = {"digests": {}, "workers": resolve_workers(args.threads), "config": {}}
        start = time.perf_counter()
        result, unknown = COMMANDS[args.command](args, ctx)
        manifest = {"subcommand": args.command, "version": __version__, "seed": args.seed,
                    "workers": ctx["workers"], "config": ctx["config"],
                    "input_digests": ctx["digests"],
                    "duration_s": round(time.perf_counter() - start, 6)}
        if "csv" in ctx:
            buf = io.StringIO()
            buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
            writer = csv.DictWriter(buf, fieldnames=ermsim.CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(ctx["csv"])
            _emit(buf.getvalue(), args.out, stdout)
            stdout.write(json.dumps({"manifest": manifest, "result": result}, sort_keys=True) + "\n")
        else:
            _emit(json.dumps({"manifest": manifest, "result": result}, sort_keys=True) + "\n",
                  args.out, stdout)
    except CLIError as exc:
        stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return EXIT_INVALID
    except (ContrastiveError, KeyError, TypeError) as exc:
        stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_INVALID
    if args.strict and unknown:
        return EXIT_UNKNOWN
    return EXIT_OK
