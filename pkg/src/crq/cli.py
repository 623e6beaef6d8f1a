"""Command-line front end: ``crq <command> ...``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .compilers.cot import compile_cot_transformer, run_cot
from .compilers.deep import compile_deep_transformer, run_deep
from .compilers.resources import resource_report
from .compilers.rnn import compile_rnn_instance, run_rnn
from .core.binary import to_binary
from .core.evaluate import evaluate
from .core.gcrq import evaluate_gcrq, gcrq_from_dict, is_gcrq_body
from .core.generate import GenerationError, gen_random
from .core.orderings import memory_rank_sort, reverse_bfs_order
from .core.serialize import FormatError, deserialize, load, serialize
from .core.tree import TreeError
from .harness import BACKENDS, CorpusError, bench_rows, to_csv, verify_corpus
from .nir.dump import dumps
from .reductions.bfep import bfep_to_crq
from .reductions.disjointness import disjointness_family
from .reductions.formula import FormulaSyntaxError, parse_formula
from .reductions.mr_family import mr_family

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def parse_gamma(text: str) -> list[int]:
    """``-9..9`` or a comma-separated list."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x]


def _emit(args, text: str, name: str | None = None) -> None:
    out = getattr(args, "out", None)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if name is not None:
        path.mkdir(parents=True, exist_ok=True)
        path = path / name
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def cmd_gen(args) -> int:
    shape = {"height": args.depth} if args.depth is not None else {"n": args.n}
    multi = args.count > 1
    if multi and args.out is None:
        raise CorpusError("--count > 1 needs --out DIR")
    for i in range(args.count):
        tree = gen_random(**shape, d=args.d, gamma=parse_gamma(args.gamma), seed=args.seed + i,
                          tie_free=args.tie_free, max_degree=args.max_degree)
        text = serialize(tree)
        if multi:
            _emit(args, text, f"inst-{i:05d}.json")
        else:
            _emit(args, text)
    return EXIT_OK


def cmd_eval(args) -> int:
    body = json.loads(Path(args.file).read_text(encoding="utf-8"))
    if is_gcrq_body(body):
        value = evaluate_gcrq(gcrq_from_dict(body))
        _emit(args, _json({"value": [str(v) for v in value]}))
        return EXIT_OK
    tree, _ = deserialize(json.dumps(body))
    ans = evaluate(tree)
    _emit(args, _json({"value": list(ans.value), "witness": [list(p) for p in ans.witness],
                       "chain": ans.chain(tree.root)}))
    return EXIT_OK


def cmd_sort(args) -> int:
    tree, _ = load(args.file)
    order = memory_rank_sort(tree) if args.kind == "mr-sort" else reverse_bfs_order(tree)
    _emit(args, serialize(tree, order))
    return EXIT_OK


COMPILERS = {
    "deep": (compile_deep_transformer, run_deep),
    "cot": (compile_cot_transformer, run_cot),
}


def _compile(backend: str, tree, seed: int):
    if backend == "rnn":
        work = tree if tree.is_binary() else to_binary(tree)
        return compile_rnn_instance(work, memory_rank_sort(work)), run_rnn
    comp, runner = COMPILERS[backend]
    return comp(tree, seed=seed), runner


def cmd_compile(args) -> int:
    tree, _ = load(args.file)
    ci, _ = _compile(args.backend, tree, args.seed)
    meta = {k: v for k, v in ci.meta.items()}
    _emit(args, dumps(ci.program, header=meta) + "\n")
    return EXIT_OK


def cmd_run(args) -> int:
    tree, _ = load(args.file)
    ci, runner = _compile(args.backend, tree, args.seed)
    run = runner(ci)
    res = resource_report(ci, run).as_dict()
    oracle = list(evaluate(tree).value)
    _emit(args, _json({"answer": list(run.answer), "oracle": oracle,
                       "match": list(run.answer) == oracle, "resources": res}))
    return EXIT_OK if list(run.answer) == oracle else EXIT_MISMATCH


def cmd_verify(args) -> int:
    backends = [b for b in args.backends.split(",") if b]
    for b in backends:
        if b not in BACKENDS:
            raise CorpusError(f"unknown backend {b!r}")
    if args.inject_fault and args.inject_fault not in backends:
        raise CorpusError(f"--inject-fault {args.inject_fault} is not among the backends")
    records = verify_corpus(args.corpus, backends, args.seed, args.inject_fault, args.timing, args.jobs)
    _emit(args, "".join(_json(r) for r in records))
    bad = [r["id"] for r in records if not r["ok"]]
    summary = f"{len(records) - len(bad)}/{len(records)} instances agree"
    print(summary + (f"; mismatches: {', '.join(bad)}" if bad else ""), file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_reduce(args) -> int:
    if args.kind == "bfep":
        lines = ([args.formula] if args.formula else
                 Path(args.file).read_text(encoding="utf-8").splitlines())
        lines = [ln.strip() for ln in lines if ln.strip()]
        for i, line in enumerate(lines):
            text = serialize(bfep_to_crq(parse_formula(line)))
            _emit(args, text, f"bfep-{i:05d}.json" if len(lines) > 1 else None)
    elif args.kind == "disjointness":
        a = [int(c) for c in args.a]
        b = [int(c) for c in args.b]
        tree, order = disjointness_family(a, b)
        _emit(args, serialize(tree, order))
    else:
        shape, _ = load(args.file)
        fam = mr_family(shape)
        for i, (_, tree) in enumerate(fam.sample(args.count, args.seed)):
            _emit(args, serialize(tree, memory_rank_sort(tree)),
                  f"mr-{i:05d}.json" if args.count > 1 else None)
    return EXIT_OK


def cmd_bench(args) -> int:
    trees = []
    if args.corpus:
        from .harness import corpus_files
        for f in corpus_files(args.corpus):
            trees.append((f.stem, load(f)[0]))
    else:
        lo, hi = (int(x) for x in args.heights.split(".."))
        rng = random.Random(args.seed)
        for h in range(lo, hi + 1):
            trees.append((f"balanced-{h}", gen_random(height=h, d=args.d, seed=rng.randrange(2**31),
                                                      tie_free=True)))
    rows = bench_rows(trees, args.seed)
    if args.format == "json":
        _emit(args, "".join(_json(r) for r in rows))
    else:
        _emit(args, to_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="crq", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file or directory")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate random instances")
    g.add_argument("--n", type=int, default=15)
    g.add_argument("--depth", type=int, default=None, help="complete binary tree of this height")
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--gamma", default="-9..9")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--tie-free", action="store_true")
    g.add_argument("--max-degree", type=int, default=2)
    g.set_defaults(fn=cmd_gen)

    e = sub.add_parser("eval", parents=[common], help="reference answer of a CRQ or GCRQ file")
    e.add_argument("file")
    e.set_defaults(fn=cmd_eval)

    s = sub.add_parser("sort", parents=[common], help="attach an ordering to an instance")
    s.add_argument("file")
    s.add_argument("--kind", choices=("mr-sort", "reverse-bfs"), default="mr-sort")
    s.set_defaults(fn=cmd_sort)

    c = sub.add_parser("compile", parents=[common], help="dump a compiled program")
    c.add_argument("backend", choices=("deep", "cot", "rnn"))
    c.add_argument("file")
    c.set_defaults(fn=cmd_compile)

    r = sub.add_parser("run", parents=[common], help="compile and execute one backend")
    r.add_argument("backend", choices=("deep", "cot", "rnn"))
    r.add_argument("file")
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("verify", parents=[common], help="check backends against the oracle")
    v.add_argument("corpus", nargs="*")
    v.add_argument("--backends", default=",".join(BACKENDS))
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--inject-fault", metavar="BACKEND", default=None,
                   help="corrupt this backend's program (negative control)")
    v.add_argument("--timing", action="store_true", help="add wall-clock times to the report")
    v.set_defaults(fn=cmd_verify)

    rd = sub.add_parser("reduce", parents=[common], help="build reduction instances")
    rsub = rd.add_subparsers(dest="kind", required=True)
    rb = rsub.add_parser("bfep", parents=[common])
    src = rb.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula")
    src.add_argument("--file")
    rdj = rsub.add_parser("disjointness", parents=[common])
    rdj.add_argument("--a", required=True, help="bit string, e.g. 1010")
    rdj.add_argument("--b", required=True)
    rm = rsub.add_parser("mr-family", parents=[common])
    rm.add_argument("file", help="binary tree whose shape is reused")
    rm.add_argument("--count", type=int, default=1)
    rd.set_defaults(fn=cmd_reduce)

    b = sub.add_parser("bench", parents=[common], help="resource table as CSV")
    b.add_argument("corpus", nargs="*")
    b.add_argument("--heights", default="2..7", help="complete binary trees of these heights")
    b.add_argument("--d", type=int, default=2)
    b.set_defaults(fn=cmd_bench, format="csv")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not args.corpus:
        print("crq: error: corpus is empty", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.fn(args)
    except (FormatError, TreeError, CorpusError, FormulaSyntaxError, GenerationError,
            ValueError, OSError) as exc:
        print(f"crq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
