"""Cross-backend verification and resource benchmarking."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

from .compilers.cot import compile_cot_transformer, run_cot
from .compilers.deep import attention_pattern_violations, compile_deep_transformer, run_deep
from .compilers.resources import resource_report
from .compilers.rnn import compile_rnn_instance, run_rnn
from .compilers.stack import semantic_stack_machine
from .core.binary import to_binary
from .core.evaluate import evaluate
from .core.orderings import memory_rank, memory_rank_sort
from .core.serialize import load
from .core.tree import CrqTree, clog2
from .nir.mlp import Affine, MlpProgram
from .nir.rational import QArray
from .nir.rnn import RnnProgram
from .nir.transformer import Block, TransformerProgram

BACKENDS = ("oracle", "deep", "cot", "rnn")


class CorpusError(ValueError):
    pass


def _bump_output(mlp: MlpProgram) -> MlpProgram:
    last = mlp.layers[-1]
    bias = last.bias + QArray.of([1] + [0] * (last.n_out - 1))
    return MlpProgram(mlp.layers[:-1] + (Affine(last.weight, bias, last.relu),))


def corrupt(ci):
    """Copy of a compiled instance whose last MLP adds 1 to its first output."""
    prog = ci.program
    if isinstance(prog, TransformerProgram):
        blocks = list(prog.blocks)
        if blocks:
            blocks[-1] = Block(blocks[-1].attention, _bump_output(blocks[-1].mlp))
        prog = TransformerProgram(prog.width, tuple(blocks), prog.out_dim)
    elif isinstance(prog, RnnProgram):
        prog = replace(prog, cell=_bump_output(prog.cell))
    return replace(ci, program=prog)


def run_backend(name: str, tree: CrqTree, seed: int = 0, faulty: bool = False) -> dict:
    """Compile and run one backend; returns answer, resources and checks."""
    rec: dict = {}
    if name == "deep":
        ci = compile_deep_transformer(tree, seed=seed)
        ci = corrupt(ci) if faulty else ci
        run = run_deep(ci)
        rec["blocks"] = len(ci.program.blocks)
        rec["pattern_ok"] = not attention_pattern_violations(tree, ci, run.trace)
        rec["scales_raised"] = ci.meta["scales_raised"]
    elif name == "cot":
        ci = compile_cot_transformer(tree, seed=seed)
        ci = corrupt(ci) if faulty else ci
        run = run_cot(ci)
        rec["scales_raised"] = ci.meta["scales_raised"]
    elif name == "rnn":
        work = tree if tree.is_binary() else to_binary(tree)
        order = memory_rank_sort(work)
        ci = compile_rnn_instance(work, order)
        ci = corrupt(ci) if faulty else ci
        run = run_rnn(ci)
        ref = semantic_stack_machine(work, order)
        slots = ci.program.slot_count
        rec["converted"] = work is not tree
        rec["stack_match"] = all(run.states[i].to_ints() == ref.padded(i, slots, work.d)
                                 for i in range(work.n))
        rec["occupancy_bound"] = memory_rank(work)[work.root] + 1
    else:
        raise ValueError(f"unknown backend {name!r}")
    res = resource_report(ci, run)
    rec = {"answer": list(run.answer), **{k: v for k, v in res.as_dict().items() if k != "backend"},
           "widest_bits": run.widest_bits, **rec}
    return rec


def verify_instance(tree: CrqTree, instance_id: str, backends: Sequence[str] = BACKENDS,
                    seed: int = 0, fault: str | None = None, timing: bool = False) -> dict:
    start = time.perf_counter()
    oracle = list(evaluate(tree).value)
    record = {
        "id": instance_id, "n": tree.n, "d": tree.d, "L": tree.height,
        "mr": memory_rank(tree)[tree.root], "seed": seed, "oracle": oracle, "backends": {},
    }
    ok = True
    for name in backends:
        if name == "oracle":
            record["backends"]["oracle"] = {"answer": oracle, "match": True}
            continue
        rec = run_backend(name, tree, seed, faulty=(fault == name))
        rec["match"] = rec["answer"] == oracle
        checks = [rec["match"], rec.get("pattern_ok", True), rec.get("stack_match", True)]
        if "occupancy_bound" in rec:
            checks.append(rec["max_occupancy"] <= rec["occupancy_bound"])
        rec["ok"] = all(checks)
        ok &= rec["ok"]
        record["backends"][name] = rec
    record["ok"] = ok
    if timing:
        record["wall_ms"] = round(1000 * (time.perf_counter() - start), 3)
    return record


def corpus_files(paths: Iterable[str | Path]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise CorpusError(f"{p}: no such file or directory")
    return sorted(files, key=lambda f: (f.stem, str(f)))


def _verify_file(args) -> dict:
    path, backends, seed, fault, timing = args
    tree, _ = load(path)
    return verify_instance(tree, Path(path).stem, backends, seed, fault, timing)


def verify_corpus(paths: Iterable[str | Path], backends: Sequence[str] = BACKENDS, seed: int = 0,
                  fault: str | None = None, timing: bool = False, jobs: int = 1) -> list[dict]:
    """Records in instance-id order regardless of ``jobs``.

    Every file is parsed before any backend runs, so invalid input fails fast.
    """
    files = corpus_files(paths)
    if not files:
        raise CorpusError("corpus is empty")
    for f in files:
        load(f)
    tasks = [(str(f), tuple(backends), seed, fault, timing) for f in files]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_verify_file, tasks))
    return [_verify_file(t) for t in tasks]


# -- benchmarking -----------------------------------------------------------

BENCH_COLUMNS = [
    "id", "n", "d", "L", "mr",
    "deep_params", "deep_width", "deep_sequential", "deep_parallel",
    "cot_params", "cot_width", "cot_tokens", "cot_parallel",
    "rnn_params", "rnn_width", "rnn_sequential", "rnn_parallel", "rnn_max_occupancy",
]


def bench_rows(trees: Iterable[tuple[str, CrqTree]], seed: int = 0) -> list[dict]:
    rows = []
    for name, tree in trees:
        rec = verify_instance(tree, name, ("deep", "cot", "rnn"), seed)
        deep, cot, rnn = (rec["backends"][b] for b in ("deep", "cot", "rnn"))
        rows.append({
            "id": name, "n": tree.n, "d": tree.d, "L": tree.height, "mr": rec["mr"],
            "deep_params": deep["params"], "deep_width": deep["width"],
            "deep_sequential": deep["sequential_steps"], "deep_parallel": deep["parallel_steps"],
            "cot_params": cot["params"], "cot_width": cot["width"], "cot_tokens": cot["cot_tokens"],
            "cot_parallel": cot["parallel_steps"],
            "rnn_params": rnn["params"], "rnn_width": rnn["width"],
            "rnn_sequential": rnn["sequential_steps"], "rnn_parallel": rnn["parallel_steps"],
            "rnn_max_occupancy": rnn["max_occupancy"],
        })
    return rows


def to_csv(rows: Sequence[dict], columns: Sequence[str] = BENCH_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r[c] for c in columns})
    return buf.getvalue()


def envelope_fit(rows: Sequence[dict], key: str = "deep_params") -> tuple[float, list[float]]:
    """Fit ``params ~ k * (d + clog2 n)**2`` by the geometric mean of the ratios.

    Returns k and every row's ratio; the fit holds within a factor of two
    when every ratio lies in [k/2, 2k].
    """
    ratios = [r[key] / (r["d"] + clog2(r["n"])) ** 2 for r in rows]
    k = math.exp(sum(math.log(x) for x in ratios) / len(ratios))
    return k, ratios
