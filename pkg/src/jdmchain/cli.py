"""Command-line entry point.

Exit codes: 0 success, 1 a theorem check failed (``verify``), 2 the JDM is
not graphical, 3 usage or input-format error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .chain import Sampler
from .construct import construct_balanced
from .enumeration import DEFAULT_BFS_CAP, brute_force_realizations, enumerate_balanced
from .errors import CapExceeded, FormatError, NonIntegralClassSize, NotGraphical, TooLarge
from .formats import format_realization, format_realizations, read_jdm, read_realization
from .jdm_core import is_graphical
from .pipeline import run_instance, verification_passed
from .spectra import EXACT_CAP, tv_decay, tv_decay_empirical

SCHEMA_VERSION = 1

EXIT_OK, EXIT_VIOLATION, EXIT_NOT_GRAPHICAL, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _exact_cap(args) -> int:
    if args.exact_cap is not None:
        return args.exact_cap
    env = os.environ.get("JDM_EXACT_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"JDM_EXACT_CAP must be an integer, got {env!r}") from None
    return EXACT_CAP


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args, result: dict, seed=None, params=None) -> dict:
    m = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "version": __version__,
        "instance_digest": _digest(args.jdm),
        "seed": seed,
        "params": params or {},
        "result": result,
    }
    if args.timing:
        m["wall_clock_seconds"] = round(time.perf_counter() - args._t0, 6)
    return m


def _emit(args, manifest: dict) -> None:
    if getattr(args, "format", "json") == "text":
        for key, value in manifest["result"].items():
            print(f"{key}: {json.dumps(value) if isinstance(value, (dict, list)) else value}")
    else:
        print(json.dumps(manifest, indent=2, sort_keys=True))


def cmd_check(args) -> int:
    J = read_jdm(args.jdm)
    rep = is_graphical(J)
    result = {"graphical": rep.graphical, "violations": list(rep.violations)}
    if rep.graphical:
        result["class_sizes"] = list(rep.sizes)
        result["n"] = sum(rep.sizes)
    _emit(args, _manifest(args, result))
    return EXIT_OK if rep.graphical else EXIT_NOT_GRAPHICAL


def cmd_construct(args) -> int:
    J = read_jdm(args.jdm)
    G = construct_balanced(J)
    text = format_realization(G)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit(args, _manifest(args, {"n": G.num_vertices, "edges": len(G.edges), "out": args.out}))
    elif args.format == "json":
        result = {"class_of": list(G.class_of), "edges": [list(e) for e in G.key]}
        _emit(args, _manifest(args, result))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sample(args) -> int:
    J = read_jdm(args.jdm)
    init = read_realization(args.init, J.degrees) if args.init else None
    sampler = Sampler(J, args.seed, init)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    stream = hashlib.sha256()
    distinct = set()
    count = 0
    for G in sampler.run(args.steps, args.burnin, args.thin):
        text = format_realization(G)
        stream.update(text.encode())
        distinct.add(G.key)
        if out:
            (out / f"sample_{count:06d}.txt").write_text(text, encoding="utf-8")
        count += 1
    counters = {k: int(v) for k, v in sorted(sampler.counters.items())}
    result = {
        "samples": count,
        "distinct_states": len(distinct),
        "acceptance_rate": sampler.acceptance_rate,
        "counters": counters,
        "stream_sha256": stream.hexdigest(),
    }
    params = {"steps": args.steps, "burnin": args.burnin, "thin": args.thin, "init": args.init}
    manifest = _manifest(args, result, seed=args.seed, params=params)
    if out:
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(args, manifest)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    J = read_jdm(args.jdm)
    if args.brute_force:
        rep = is_graphical(J)
        if not rep:
            raise NotGraphical(rep.violations)
        graphs = brute_force_realizations(J, balanced_only=True)
    else:
        graphs = [s.realization for s in enumerate_balanced(J, cap=args.cap)]
    if args.out:
        Path(args.out).write_text(format_realizations(graphs), encoding="utf-8")
    result = {"count": len(graphs), "method": "brute_force" if args.brute_force else "bfs"}
    _emit(args, _manifest(args, result, params={"cap": args.cap, "brute_force": args.brute_force}))
    return EXIT_OK


def _tv(args, res) -> list:
    start, horizon = args.tv
    if not 0 <= start < len(res.states):
        raise UsageError(f"start index {start} out of range for {len(res.states)} states")
    try:
        curve, label = tv_decay(res.analysis, start, horizon), "exact"
    except TooLarge:
        curve, label = tv_decay_empirical(res.states, start, horizon), "empirical_heuristic"
    if args.tv_out:
        with open(args.tv_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "tv"])
            w.writerows(curve)
    return [label, curve]


def cmd_analyze(args) -> int:
    J = read_jdm(args.jdm)
    res = run_instance(J, exact_cap=_exact_cap(args), bfs_cap=args.cap)
    result = dict(res.report)
    if args.tv:
        label, curve = _tv(args, res)
        result["tv_mode"] = label
        result["tv"] = [[t, v] for t, v in curve]
    params = {"exact_cap": _exact_cap(args), "tv": args.tv}
    _emit(args, _manifest(args, result, params=params))
    return EXIT_OK


def cmd_verify(args) -> int:
    J = read_jdm(args.jdm)
    res = run_instance(J, exact_cap=_exact_cap(args), bfs_cap=args.cap, full=True)
    result = dict(res.report)
    result["passed"] = verification_passed(result)
    _emit(args, _manifest(args, result, params={"exact_cap": _exact_cap(args)}))
    return EXIT_OK if result["passed"] else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jdmchain", description="Balanced JDM realizations: sampling and chain verification.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("jdm", help="JDM text file")
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("--timing", action="store_true", help="add wall-clock seconds to the manifest")
        sp.set_defaults(func=fn)
        return sp

    add("check", cmd_check, "graphicality test")
    sp = add("construct", cmd_construct, "build one balanced realization")
    sp.add_argument("--out")
    sp = add("sample", cmd_sample, "run the swap chain")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--burnin", type=int, default=0)
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--init", help="starting realization file (must be balanced)")
    sp.add_argument("--out", help="directory for sample files and manifest.json")
    sp = add("enumerate", cmd_enumerate, "list balanced realizations")
    sp.add_argument("--brute-force", action="store_true")
    sp.add_argument("--cap", type=int, default=DEFAULT_BFS_CAP)
    sp.add_argument("--out")
    for name, fn, help in (("analyze", cmd_analyze, "spectral report"), ("verify", cmd_verify, "run every theorem check")):
        sp = add(name, fn, help)
        sp.add_argument("--exact-cap", type=int, default=None)
        sp.add_argument("--cap", type=int, default=DEFAULT_BFS_CAP)
        if name == "analyze":
            sp.add_argument("--tv", type=int, nargs=2, metavar=("START", "T_MAX"))
            sp.add_argument("--tv-out", help="CSV file for the (t, TV) curve")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
        parser.error("--steps must be non-negative")
    try:
        return args.func(args)
    except (NotGraphical, NonIntegralClassSize) as exc:
        violations = getattr(exc, "violations", [str(exc)])
        print(json.dumps({"error": "not_graphical", "violations": violations}, indent=2))
        return EXIT_NOT_GRAPHICAL
    except (FormatError, UsageError, OSError, CapExceeded, TooLarge, ValueError) as exc:
        print(f"jdmchain {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
