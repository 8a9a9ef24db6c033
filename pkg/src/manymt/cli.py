"""Single entry point exposing every pipeline stage as a subcommand.

Subcommands: preprocess, train-tokenizer, sample, augment, route, train-toy,
decode, evaluate, run. ``run`` executes a JSON manifest of stages, records
content hashes and tallies per stage, and derives per-stage seeds from the
manifest seed, so a replay over unchanged inputs is hash-identical.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import __version__
from .augmentation import AugmentationSpec, back_translate, identity_translator, self_train
from .corpus import CorpusManifest, FilterPolicy, run_preprocess
from .decoding import beam_search, load_model
from .detect import CharFreqDetector
from .errors import DataError, ManymtError, UsageError
from .metrics import evaluate_directions
from .routing import GroupTable, ModelRegistry, route
from .sampling import DROConfig, dro_worst_case, sample_schedule, temperature_distribution
from .tokenizer import SubwordModel, train_subword
from .trainer import TaskSuite, TrainConfig, average_checkpoints, train, write_history_csv


@dataclass
class StageResult:
    inputs: list[Path] = field(default_factory=list)
    outputs: list[Path] = field(default_factory=list)
    tallies: dict = field(default_factory=dict)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_path(path: Path) -> str:
    if path.is_dir():
        h = hashlib.sha256()
        for sub in sorted(p for p in path.rglob("*") if p.is_file()):
            h.update(sub.relative_to(path).as_posix().encode())
            h.update(bytes.fromhex(_sha256_file(sub)))
        return h.hexdigest()
    return _sha256_file(path)


def _resolve(base: Path, rel) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base / p


# -- stage implementations ----------------------------------------------------


def stage_preprocess(args: dict, base: Path, quiet: bool = True) -> StageResult:
    in_dir = _resolve(base, args["in"])
    manifest_path = _resolve(base, args["manifest"])
    policy_path = _resolve(base, args["policy"])
    out_dir = _resolve(base, args["out"])
    with open(policy_path, "r", encoding="utf-8") as f:
        policy_blob = json.load(f)
    policy = FilterPolicy.from_dict(policy_blob)
    inputs = [in_dir, manifest_path, policy_path]
    detector = None
    if policy_blob.get("detector"):
        det_path = _resolve(base, policy_blob["detector"])
        detector = CharFreqDetector.load(det_path)
        inputs.append(det_path)
    tokenizer = None
    if policy_blob.get("tokenizer"):
        tok_path = _resolve(base, policy_blob["tokenizer"])
        tokenizer = SubwordModel.load(tok_path)
        inputs.append(tok_path)
    _, tally = run_preprocess(
        in_dir, manifest_path, policy, out_dir, detector=detector, tokenizer=tokenizer
    )
    tallies = {
        key: tally.get(key, 0)
        for key in ("reformat_dropped", "duplicate_dropped", "language_dropped", "length_dropped")
    }
    if not quiet:
        print("preprocess:", " ".join(f"{k}={v}" for k, v in tallies.items()))
    return StageResult(inputs=inputs, outputs=[out_dir], tallies=tallies)


def stage_train_tokenizer(args: dict, base: Path, quiet: bool = True) -> StageResult:
    manifest_path = _resolve(base, args["manifest"])
    with open(manifest_path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    langs = blob.get("languages")
    if not langs:
        raise DataError(f"{manifest_path}: tokenizer manifest needs a 'languages' map")
    corpora: dict[str, list[str]] = {}
    sizes: dict[str, int] = {}
    inputs = [manifest_path]
    for lang, rec in langs.items():
        lines: list[str] = []
        for rel in rec["files"]:
            path = _resolve(base, rel)
            inputs.append(path)
            with open(path, "r", encoding="utf-8") as f:
                lines.extend(f.read().splitlines())
        corpora[lang] = lines
        sizes[lang] = rec.get("size", len(lines))
    model = train_subword(
        corpora,
        alpha=float(args["alpha"]),
        vocab_size=int(args["vocab_size"]),
        sizes=sizes,
    )
    out = _resolve(base, args["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    model.save(out)
    if not quiet:
        print(f"tokenizer: {model.size} tokens -> {out}")
    return StageResult(inputs=inputs, outputs=[out], tallies={"vocab_size": model.size})


def _load_direction_values(path: Path, directions: list[str], what: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    missing = [d for d in directions if d not in blob]
    if missing:
        raise DataError(f"{path}: {what} missing for directions {missing[:5]}")
    return np.array([float(blob[d]) for d in directions])


def stage_sample(args: dict, base: Path, quiet: bool = True) -> StageResult:
    manifest_path = _resolve(base, args["manifest"])
    manifest = CorpusManifest.load(manifest_path)
    directions = sorted(d for d, e in manifest.directions.items() if e.size > 0)
    if not directions:
        raise DataError("manifest has no directions with positive size")
    sizes = [manifest.directions[d].size for d in directions]
    tau_raw = args.get("tau", 1.0 / 0.3)
    tau = math.inf if str(tau_raw) == "inf" else float(tau_raw)
    mode = args.get("mode", "temperature")
    inputs = [manifest_path]
    extra: dict = {}
    if mode == "temperature":
        dist = temperature_distribution(sizes, tau, directions=directions)
        probs = dist.probs
    elif mode == "dro":
        if not args.get("losses"):
            raise UsageError("dro sampling needs --losses (per-direction current losses)")
        losses_path = _resolve(base, args["losses"])
        inputs.append(losses_path)
        losses = _load_direction_values(losses_path, directions, "losses")
        if args.get("baselines"):
            baselines_path = _resolve(base, args["baselines"])
            inputs.append(baselines_path)
            baselines = _load_direction_values(baselines_path, directions, "baselines")
        else:
            baselines = np.zeros(len(directions))
        p_train = temperature_distribution(sizes, tau).probs
        weights = dro_worst_case(
            losses - baselines, DROConfig(rho=float(args.get("rho", 0.1)), p_train=p_train)
        )
        probs = weights.q
        extra = {
            "rho": float(args.get("rho", 0.1)),
            "divergence": weights.divergence,
            "active_support": sorted(weights.active_support),
        }
    else:
        raise UsageError(f"unknown sampling mode {mode!r}")

    out = _resolve(base, args["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        record = {
            "type": "weights", "mode": mode, "tau": "inf" if math.isinf(tau) else tau,
            "directions": directions, "probs": probs.tolist(),
        }
        record.update(extra)
        f.write(json.dumps(record) + "\n")
        batches = int(args.get("batches", 0) or 0)
        if batches:
            carrier = SimpleNamespace(probs=probs, directions=directions)
            for i, d in enumerate(sample_schedule(carrier, batches, int(args.get("seed", 0)))):
                f.write(json.dumps({"type": "draw", "batch": i, "direction": d}) + "\n")
    if not quiet:
        print(f"sample: {mode} weights over {len(directions)} directions -> {out}")
    return StageResult(inputs=inputs, outputs=[out], tallies={"directions": len(directions)})


def _make_translator(spec: str, base: Path):
    if spec == "identity":
        return identity_translator, []
    if spec.startswith("toy-model:"):
        path = _resolve(base, spec.split(":", 1)[1])
        model = load_model(path)
        if not hasattr(model, "encode_source"):
            raise DataError(f"{path}: translator model must be a word_lexicon model")

        def translate(text: str, src: str, tgt: str) -> str:
            ids = model.encode_source(text)
            return model.decode_target([model._inner.mapping.get(i, 0) for i in ids])

        return translate, [path]
    raise UsageError(f"unknown translator {spec!r} (use identity or toy-model:<path>)")


def stage_augment(args: dict, base: Path, quiet: bool = True) -> StageResult:
    mode = args["mode"]
    if mode not in ("bt", "st"):
        raise UsageError("augment mode must be bt or st")
    mono_path = _resolve(base, args["mono"])
    src, tgt = args["src"], args["tgt"]
    translator, extra_inputs = _make_translator(args.get("translator", "identity"), base)
    spec = AugmentationSpec(seed=int(args.get("seed", 0)))
    cap = int(args["cap"]) if args.get("cap") else None
    with open(mono_path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]
    tally: Counter = Counter()
    mono_lang = tgt if mode == "bt" else src
    mono = [(line, mono_lang) for line in lines]
    if mode == "bt":
        pairs = back_translate(mono, src, translator, spec, cap=cap, tally=tally)
    else:
        pairs = self_train(mono, tgt, translator, spec, cap=cap, tally=tally)
    out = _resolve(base, args["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(out, "w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(pair.to_json() + "\n")
            n += 1
    tallies = {"emitted": n, "empty_translation_dropped": tally.get("empty_translation_dropped", 0)}
    if not quiet:
        print(f"augment {mode}: {n} pairs -> {out}")
    return StageResult(inputs=[mono_path] + extra_inputs, outputs=[out], tallies=tallies)


def stage_route(args: dict, base: Path, quiet: bool = True) -> StageResult:
    registry_path = _resolve(base, args["registry"])
    registry = ModelRegistry.load(registry_path)
    inputs = [registry_path]
    table = GroupTable()
    if args.get("table"):
        table_path = _resolve(base, args["table"])
        table = GroupTable.load(table_path)
        inputs.append(table_path)
    model = route(args["target"], registry, table)
    outputs = []
    if args.get("out"):
        out = _resolve(base, args["out"])
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            json.dump({"target": args["target"], "model": model}, f)
            f.write("\n")
        outputs.append(out)
    if not quiet:
        print(model)
    return StageResult(inputs=inputs, outputs=outputs, tallies={"model": model})


def stage_train_toy(args: dict, base: Path, quiet: bool = True) -> StageResult:
    suite_path = _resolve(base, args["suite"])
    suite = TaskSuite.load(suite_path)
    mode = {"erm": "erm_temperature", "dro": "dro"}.get(args.get("mode", "erm"))
    if mode is None:
        raise UsageError("train-toy mode must be erm or dro")
    config = TrainConfig(
        mode=mode,
        tau=float(args.get("tau", 1.0 / 0.3)),
        rho=float(args.get("rho", 0.1)),
        steps=int(args.get("steps", 100)),
        lr=float(args.get("lr", 0.05)),
        seed=int(args.get("seed", 0)),
        checkpoint_every=int(args.get("checkpoint_every", 10)),
    )
    inputs = [suite_path]
    baselines = None
    if args.get("baselines"):
        b_path = _resolve(base, args["baselines"])
        inputs.append(b_path)
        baselines = _load_direction_values(b_path, [t.direction for t in suite.tasks], "baselines")
    checkpoints: list = []
    final, history = train(suite, config, baselines=baselines, checkpoints=checkpoints)
    out_dir = _resolve(base, args["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    directions = [t.direction for t in suite.tasks]
    write_history_csv(out_dir / "history.csv", history, directions)
    final.save(out_dir / "checkpoint.json")
    if checkpoints:
        k = min(10, len(checkpoints))
        average_checkpoints(checkpoints, k).save(out_dir / "checkpoint_avg.json")
    tallies = {
        "steps": config.steps,
        "final_max_loss": float(np.max(final.per_task_loss)),
        "final_mean_loss": float(np.mean(final.per_task_loss)),
    }
    if not quiet:
        print(f"train-toy {args.get('mode')}: max task loss {tallies['final_max_loss']:.6g}")
    return StageResult(inputs=inputs, outputs=[out_dir], tallies=tallies)


def stage_decode(args: dict, base: Path, quiet: bool = True) -> StageResult:
    model_path = _resolve(base, args["model"])
    input_path = _resolve(base, args["input"])
    model = load_model(model_path)
    inputs = [model_path, input_path]
    tokenizer = None
    if args.get("tokenizer"):
        tok_path = _resolve(base, args["tokenizer"])
        tokenizer = SubwordModel.load(tok_path)
        inputs.append(tok_path)
    beam = int(args.get("beam", 4))
    lenpen = float(args.get("lenpen", 1.0))
    max_len = int(args.get("max_len", 64))
    out = _resolve(base, args["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    n_lines = 0
    n_empty = 0
    with open(input_path, "r", encoding="utf-8") as fin, open(out, "w", encoding="utf-8") as fout:
        for line in fin:
            line = line.rstrip("\n")
            if not line:
                continue
            n_lines += 1
            if tokenizer is not None:
                source = tokenizer.encode(line)
            elif hasattr(model, "encode_source"):
                source = model.encode_source(line)
            else:
                source = [int(x) for x in line.split()]
            hyps = beam_search(model, source, beam=beam, lenpen=lenpen, max_len=max_len)
            if not hyps:
                n_empty += 1
                fout.write("\n")
                continue
            tokens = list(hyps[0].tokens)
            while tokens and tokens[-1] == model.eos_id:
                tokens.pop()
            if tokenizer is not None:
                text = tokenizer.decode(tokens)
            elif hasattr(model, "decode_target"):
                text = model.decode_target(tokens)
            else:
                text = " ".join(map(str, tokens))
            fout.write(text + "\n")
    if not quiet:
        print(f"decode: {n_lines} lines -> {out}")
    return StageResult(inputs=inputs, outputs=[out],
                       tallies={"lines": n_lines, "empty": n_empty})


def stage_evaluate(args: dict, base: Path, quiet: bool = True, threads: int = 1) -> StageResult:
    tok_path = _resolve(base, args["tokenizer"])
    tokenizer = SubwordModel.load(tok_path)
    directions_path = _resolve(base, args["directions"])
    inputs = [tok_path, directions_path]
    units: list[tuple[str, list[str], list[str]]] = []
    if args.get("hyp"):
        hyp_path = _resolve(base, args["hyp"])
        ref_path = _resolve(base, args["ref"])
        inputs += [hyp_path, ref_path]
        hyps = hyp_path.read_text(encoding="utf-8").splitlines()
        refs = ref_path.read_text(encoding="utf-8").splitlines()
        labels = directions_path.read_text(encoding="utf-8").split()
        if not (len(hyps) == len(refs) == len(labels)):
            raise DataError("hyp, ref and directions line counts differ")
        grouped: dict[str, tuple[list[str], list[str]]] = {}
        for h, r, d in zip(hyps, refs, labels):
            grouped.setdefault(d, ([], []))
            grouped[d][0].append(h)
            grouped[d][1].append(r)
        units = [(d, h, r) for d, (h, r) in grouped.items()]
    else:
        with open(directions_path, "r", encoding="utf-8") as f:
            recs = json.load(f)
        for rec in recs:
            hyp_path = _resolve(base, rec["hyp"])
            ref_path = _resolve(base, rec["ref"])
            inputs += [hyp_path, ref_path]
            units.append(
                (
                    rec["direction"],
                    hyp_path.read_text(encoding="utf-8").splitlines(),
                    ref_path.read_text(encoding="utf-8").splitlines(),
                )
            )
    report = evaluate_directions(units, tokenizer, threads=threads)
    out = _resolve(base, args["report"])
    out.parent.mkdir(parents=True, exist_ok=True)
    report.save(out)
    tallies = {
        f"{cat}": [round(b, 4), round(c, 4)]
        for cat, (b, c) in report.category_means.items()
    }
    if not quiet:
        for cat, (b, c) in report.category_means.items():
            print(f"{cat:>6}: BLEU {b:6.2f}  ChrF++ {c:6.2f}")
    return StageResult(inputs=inputs, outputs=[out], tallies=tallies)


STAGE_FUNCS = {
    "preprocess": stage_preprocess,
    "train-tokenizer": stage_train_tokenizer,
    "sample": stage_sample,
    "augment": stage_augment,
    "route": stage_route,
    "train-toy": stage_train_toy,
    "decode": stage_decode,
    "evaluate": stage_evaluate,
}

SEEDED_STAGES = ("sample", "augment", "train-toy")


def derive_stage_seed(manifest_seed: int, index: int, subcommand: str) -> int:
    digest = hashlib.sha256(f"{manifest_seed}:{index}:{subcommand}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def run_pipeline(manifest_path: str | Path, quiet: bool = True, threads: int = 1) -> dict:
    """Execute a run manifest; returns the completed manifest with hashes."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise DataError(f"run manifest not found: {manifest_path}")
    with open(manifest_path, "r", encoding="utf-8") as f:
        blob = json.load(f)
    base = manifest_path.parent
    seed = int(blob.get("seed", 0))
    result = {"seed": seed, "stages": []}
    for index, stage in enumerate(blob.get("stages", [])):
        name = stage.get("name", f"stage{index}")
        sub = stage.get("subcommand")
        if sub not in STAGE_FUNCS:
            raise DataError(f"stage '{name}': unknown subcommand {sub!r}")
        args = dict(stage.get("args", {}))
        if sub in SEEDED_STAGES and "seed" not in args:
            args["seed"] = derive_stage_seed(seed, index, sub)
        if not quiet:
            print(f"[{index + 1}] {name} ({sub})")
        try:
            if sub == "evaluate":
                res = STAGE_FUNCS[sub](args, base, quiet=quiet, threads=threads)
            else:
                res = STAGE_FUNCS[sub](args, base, quiet=quiet)
        except ManymtError as e:
            raise type(e)(f"stage '{name}' ({sub}) failed: {e}") from e
        record = {
            "name": name,
            "subcommand": sub,
            "args": args,
            "input_hashes": {str(p): _sha256_path(p) for p in res.inputs},
            "output_hashes": {str(p): _sha256_path(p) for p in res.outputs},
            "tallies": res.tallies,
        }
        result["stages"].append(record)
    return result


def report_run(manifest: dict) -> str:
    """Human-readable per-stage tally summary plus the metric table."""
    lines = [f"run summary (seed {manifest.get('seed')}):"]
    metric_tallies = None
    for record in manifest.get("stages", []):
        tallies = record.get("tallies", {})
        shown = " ".join(f"{k}={v}" for k, v in tallies.items())
        lines.append(f"  {record['name']} [{record['subcommand']}]: {shown or 'ok'}")
        if record["subcommand"] == "evaluate":
            metric_tallies = tallies
    if metric_tallies:
        lines.append("metrics:")
        lines.append(f"  {'category':>8}  {'BLEU':>7}  {'ChrF++':>7}")
        for cat in ("X-Eng", "Eng-X", "X-Fra", "Fra-X", "X-X", "All"):
            if cat in metric_tallies:
                b, c = metric_tallies[cat]
                lines.append(f"  {cat:>8}  {b:7.2f}  {c:7.2f}")
    else:
        lines.append("metrics: not run")
    return "\n".join(lines)


# -- argument parsing -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="manymt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"manymt {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="default seed for seeded stages")
    parser.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="reformat, dedup, language/length filter")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train-tokenizer", help="train the shared subword model")
    p.add_argument("--manifest", required=True)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="temperature or DRO direction weights")
    p.add_argument("--manifest", required=True)
    p.add_argument("--mode", choices=("temperature", "dro"), default="temperature")
    p.add_argument("--tau", default=str(1.0 / 0.3))
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--baselines")
    p.add_argument("--losses")
    p.add_argument("--batches", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("augment", help="tagged back-translation / self-training")
    p.add_argument("--mode", choices=("bt", "st"), required=True)
    p.add_argument("--mono", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--translator", default="identity")
    p.add_argument("--cap", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("route", help="pick the model for a target language")
    p.add_argument("--target", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--table")
    p.add_argument("--out")

    p = sub.add_parser("train-toy", help="toy multi-task trainer (erm/dro)")
    p.add_argument("--suite", required=True)
    p.add_argument("--mode", choices=("erm", "dro"), default="erm")
    p.add_argument("--tau", type=float, default=1.0 / 0.3)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--checkpoint-every", type=int, default=10)
    p.add_argument("--baselines")
    p.add_argument("--out", required=True)

    p = sub.add_parser("decode", help="beam-search decode a text file")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--beam", type=int, default=4)
    p.add_argument("--lenpen", type=float, default=1.0)
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--tokenizer")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="spBLEU + ChrF++ report by direction")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--directions", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--report", required=True)

    p = sub.add_parser("run", help="execute a run manifest end to end")
    p.add_argument("manifest")
    p.add_argument("--report")
    return parser


_ARG_KEYS = {
    "preprocess": {"in_dir": "in", "manifest": "manifest", "policy": "policy", "out": "out"},
    "train-tokenizer": {"manifest": "manifest", "alpha": "alpha",
                        "vocab_size": "vocab_size", "out": "out"},
    "sample": {"manifest": "manifest", "mode": "mode", "tau": "tau", "rho": "rho",
               "baselines": "baselines", "losses": "losses", "batches": "batches",
               "out": "out", "seed": "seed"},
    "augment": {"mode": "mode", "mono": "mono", "src": "src", "tgt": "tgt",
                "translator": "translator", "cap": "cap", "out": "out", "seed": "seed"},
    "route": {"target": "target", "registry": "registry", "table": "table", "out": "out"},
    "train-toy": {"suite": "suite", "mode": "mode", "tau": "tau", "rho": "rho",
                  "steps": "steps", "lr": "lr", "checkpoint_every": "checkpoint_every",
                  "baselines": "baselines", "out": "out", "seed": "seed"},
    "decode": {"model": "model", "input": "input", "beam": "beam", "lenpen": "lenpen",
               "max_len": "max_len", "tokenizer": "tokenizer", "out": "out"},
    "evaluate": {"hyp": "hyp", "ref": "ref", "directions": "directions",
                 "tokenizer": "tokenizer", "report": "report"},
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command == "run":
            result = run_pipeline(ns.manifest, quiet=ns.quiet, threads=ns.threads)
            report_path = ns.report or (Path(ns.manifest).with_suffix("") .as_posix() + ".result.json")
            with open(report_path, "w", encoding="utf-8") as f:
                json.dump(result, f, indent=2)
                f.write("\n")
            if not ns.quiet:
                print(report_run(result))
            return 0
        args = {}
        for attr, key in _ARG_KEYS[ns.command].items():
            value = getattr(ns, attr, None)
            if value is not None:
                args[key] = value
        if ns.command in SEEDED_STAGES:
            args.setdefault("seed", ns.seed)
        if ns.command == "evaluate":
            STAGE_FUNCS[ns.command](args, Path.cwd(), quiet=ns.quiet, threads=ns.threads)
        else:
            STAGE_FUNCS[ns.command](args, Path.cwd(), quiet=ns.quiet)
        return 0
    except ManymtError as e:
        print(f"manymt: error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit:
        raise
    except Exception as e:  # unexpected: treat as data error, keep traceback short
        print(f"manymt: unexpected error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
