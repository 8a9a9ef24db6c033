"""Deterministic 6-language synthetic fixture for demos and tests.

Six of the task languages are given disjoint synthetic scripts (Latin,
accented Latin, Ethiopic, Greek, Cyrillic, Devanagari) and a shared word
inventory indexed by meaning, so exact parallel data, language detection,
and word-level "translation" are all constructible by seed. The demo
workspace wires raw corpora, monolingual text, a detector profile, eval
sets, word-lexicon decode models, a toy task suite, and a run manifest into
one directory.

Run ``python -m manymt.synthdata --out DIR [--seed N]`` to materialize it.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

import numpy as np

from .detect import CharFreqDetector
from .decoding import WordLexiconModel, save_model
from .trainer import LeastSquaresTask, TaskSuite

DEMO_LANGS = ("eng", "fra", "amh", "swh", "hau", "zul")

ALPHABETS = {
    "eng": "abcdefghijklmnopqrstuvwxyz",
    "fra": "àâäéèêëîïôöùûüçœ",
    "amh": "".join(chr(0x1200 + i) for i in range(48)),
    "swh": "αβγδεζηθικλμνξοπρστυφχψω",
    "hau": "".join(chr(0x0430 + i) for i in range(32)),
    "zul": "".join(chr(0x0915 + i) for i in range(34)),
}

WORDS_PER_LANG = 90
DEMO_PAIRS = (("amh", "eng"), ("fra", "swh"), ("amh", "swh"), ("hau", "zul"))
DEMO_EVAL_DIRECTIONS = (
    ("amh", "eng"), ("eng", "amh"), ("swh", "fra"),
    ("fra", "swh"), ("amh", "swh"), ("hau", "zul"),
)


def word_list(lang: str, n_words: int = WORDS_PER_LANG) -> list[str]:
    """Deterministic per-language word inventory; index = shared meaning."""
    alphabet = ALPHABETS[lang]
    rng = random.Random(f"words:{lang}")
    words: list[str] = []
    seen = set()
    while len(words) < n_words:
        w = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 5)))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def render(lang: str, indices: list[int], words: dict[str, list[str]] | None = None) -> str:
    table = (words or {}).get(lang) or word_list(lang)
    return " ".join(table[i] for i in indices)


def random_sentence(rng: random.Random, lo: int = 4, hi: int = 11) -> list[int]:
    return [rng.randrange(WORDS_PER_LANG) for _ in range(rng.randint(lo, hi))]


def make_noisy_pair_lines(
    src: str,
    tgt: str,
    n: int,
    seed: int,
    dup_rate: float = 0.1,
    wrong_lang_rate: float = 0.05,
    short_rate: float = 0.03,
    long_rate: float = 0.02,
    ratio_rate: float = 0.03,
) -> list[bytes]:
    """Raw TSV lines with planted duplicates and filter violations."""
    rng = random.Random(seed)
    words = {lang: word_list(lang) for lang in DEMO_LANGS}
    other = [lang for lang in DEMO_LANGS if lang not in (src, tgt)]
    lines: list[bytes] = []
    clean: list[bytes] = []
    for _ in range(n):
        r = rng.random()
        if clean and r < dup_rate:
            lines.append(clean[rng.randrange(len(clean))])
            continue
        if r < dup_rate + wrong_lang_rate:
            idx = random_sentence(rng)
            bad = rng.choice(other)
            line = f"{render(bad, idx, words)}\t{render(tgt, idx, words)}".encode()
        elif r < dup_rate + wrong_lang_rate + short_rate:
            idx = random_sentence(rng, 1, 1)
            line = f"{render(src, idx, words)}\t{render(tgt, idx, words)}".encode()
        elif r < dup_rate + wrong_lang_rate + short_rate + long_rate:
            idx = random_sentence(rng, 600, 650)
            line = f"{render(src, idx, words)}\t{render(tgt, idx, words)}".encode()
        elif r < dup_rate + wrong_lang_rate + short_rate + long_rate + ratio_rate:
            idx = random_sentence(rng, 4, 5)
            long_idx = random_sentence(rng, 40, 45)
            line = f"{render(src, idx, words)}\t{render(tgt, long_idx, words)}".encode()
        else:
            idx = random_sentence(rng)
            line = f"{render(src, idx, words)}\t{render(tgt, idx, words)}".encode()
            clean.append(line)
        lines.append(line)
    return lines


# -- toy task suites -------------------------------------------------------------


def make_imbalanced_suite(seed: int = 0, n_tasks: int = 6, dim: int = 8, rows: int = 40) -> TaskSuite:
    """Six least-squares tasks with 100x size imbalance and drifting optima.

    Large tasks share a nearby optimum; the rarer a task, the further its own
    optimum sits, so size-proportional weighting starves exactly the tasks
    DRO is supposed to rescue.
    """
    rng = np.random.default_rng(seed)
    sizes = [10000, 5000, 2000, 500, 200, 100]
    base = rng.normal(0.0, 1.0, dim)
    tasks = []
    for i in range(n_tasks):
        A = rng.normal(0.0, 1.0, (rows, dim)) / np.sqrt(dim)
        pull = 0.2 + 1.8 * i / (n_tasks - 1)
        theta_star = base + pull * rng.normal(0.0, 1.0, dim)
        y = A @ theta_star
        tasks.append(LeastSquaresTask(direction=f"dir{i}", A=A, y=y, size=sizes[i]))
    return TaskSuite(tasks=tasks, shared_dim=dim)


def make_staged_suites(seed: int = 0, dim: int = 6, rows: int = 30):
    """(noisy_large, clean, eval) suites for the pretrain/finetune recipe.

    The clean tasks share one true optimum with light label noise; the noisy
    suite reuses their designs but corrupts the targets and appends junk
    tasks, so training on it alone cannot reach the clean optimum.
    """
    rng = np.random.default_rng(seed)
    theta_star = rng.normal(0.0, 1.0, dim)
    clean_tasks = []
    noisy_tasks = []
    for i in range(4):
        A = rng.normal(0.0, 1.0, (rows, dim)) / np.sqrt(dim)
        y = A @ theta_star + 0.01 * rng.normal(0.0, 1.0, rows)
        clean_tasks.append(LeastSquaresTask(direction=f"clean{i}", A=A, y=y, size=1000))
        y_noisy = y + 0.8 * rng.normal(0.0, 1.0, rows)
        noisy_tasks.append(LeastSquaresTask(direction=f"clean{i}", A=A, y=y_noisy, size=1000))
    for j in range(2):
        A = rng.normal(0.0, 1.0, (rows, dim)) / np.sqrt(dim)
        junk_theta = theta_star + 3.0 * rng.normal(0.0, 1.0, dim)
        y = A @ junk_theta
        noisy_tasks.append(LeastSquaresTask(direction=f"junk{j}", A=A, y=y, size=500))
    clean = TaskSuite(tasks=clean_tasks, shared_dim=dim)
    noisy = TaskSuite(tasks=noisy_tasks, shared_dim=dim)
    return noisy, clean, clean


# -- demo workspace ----------------------------------------------------------------


def _lexicon_for(src: str, tgt: str, seed: int, error_rate: float = 0.12) -> WordLexiconModel:
    src_words = word_list(src)
    tgt_words = word_list(tgt)
    rng = random.Random(f"lexicon:{src}:{tgt}:{seed}")
    mapping = {}
    for i in range(len(src_words)):
        if rng.random() < error_rate:
            mapping[i + 1] = rng.randrange(1, len(tgt_words) + 1)
        else:
            mapping[i + 1] = i + 1
    return WordLexiconModel(
        source_vocab={w: i + 1 for i, w in enumerate(src_words)},
        target_words=tgt_words,
        mapping=mapping,
        eps=1e-4,
    )


def make_demo_workspace(out_dir: str | Path, seed: int = 2022) -> Path:
    """Materialize the full desk-scale demo under out_dir; returns its path."""
    out = Path(out_dir)
    for sub in ("raw", "mono", "eval", "models", "suites", "artifacts", "aug", "out", "run"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    words = {lang: word_list(lang) for lang in DEMO_LANGS}
    rng = random.Random(seed)

    # monolingual text (also the detector and tokenizer training data)
    mono_sentences: dict[str, list[str]] = {}
    for lang in DEMO_LANGS:
        lines = [render(lang, random_sentence(rng), words) for _ in range(300)]
        mono_sentences[lang] = lines
        (out / "mono" / f"{lang}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    detector = CharFreqDetector.train(mono_sentences)
    detector.save(out / "artifacts" / "detector.json")

    # raw parallel data in three formats, with planted noise
    pair_sizes = (420, 260, 160, 120)
    formats = ("tsv", "jsonl", "html_like", "tsv")
    input_files = []
    for k, ((src, tgt), size) in enumerate(zip(DEMO_PAIRS, pair_sizes)):
        lines = make_noisy_pair_lines(src, tgt, size, seed=rng.randrange(1 << 30))
        fmt = formats[k % len(formats)]
        name = f"{src}-{tgt}.{'tsv' if fmt == 'tsv' else fmt}"
        path = out / "raw" / name
        if fmt == "tsv":
            path.write_bytes(b"\n".join(lines) + b"\n")
        elif fmt == "jsonl":
            with open(path, "w", encoding="utf-8") as f:
                for line in lines:
                    s, t = line.decode().split("\t")
                    f.write(json.dumps({"src": s, "tgt": t, "src_lang": src, "tgt_lang": tgt},
                                       ensure_ascii=False) + "\n")
        else:
            with open(path, "w", encoding="utf-8") as f:
                for line in lines:
                    s, t = line.decode().split("\t")
                    f.write(f"<seg id=1>{s}</seg><seg id=2>{t}</seg>\n")
        input_files.append({"path": name, "format": fmt, "src_lang": src, "tgt_lang": tgt})
    with open(out / "raw" / "inputs.json", "w", encoding="utf-8") as f:
        json.dump({"files": input_files}, f, indent=2)

    # policy: all four steps active once the tokenizer stage has run
    policy = {
        "min_tokens": 4,
        "max_tokens": 512,
        "max_len_ratio": 3.0,
        "detector": "artifacts/detector.json",
        "tokenizer": "artifacts/tokenizer.json",
    }
    with open(out / "policy.json", "w", encoding="utf-8") as f:
        json.dump(policy, f, indent=2)

    # tokenizer training corpora
    tok_manifest = {
        "languages": {
            lang: {"files": [f"mono/{lang}.txt"], "size": len(mono_sentences[lang])}
            for lang in DEMO_LANGS
        }
    }
    with open(out / "tokenizer_corpora.json", "w", encoding="utf-8") as f:
        json.dump(tok_manifest, f, indent=2)

    # eval sets + decode models + evaluation units
    units = []
    for src, tgt in DEMO_EVAL_DIRECTIONS:
        direction = f"{src}-{tgt}"
        idx_lines = [random_sentence(rng, 4, 9) for _ in range(40)]
        src_path = out / "eval" / f"src.{direction}.txt"
        ref_path = out / "eval" / f"ref.{direction}.txt"
        src_path.write_text(
            "\n".join(render(src, idx, words) for idx in idx_lines) + "\n", encoding="utf-8"
        )
        ref_path.write_text(
            "\n".join(render(tgt, idx, words) for idx in idx_lines) + "\n", encoding="utf-8"
        )
        model = _lexicon_for(src, tgt, seed)
        save_model(model, out / "models" / f"lex.{direction}.json")
        units.append(
            {
                "direction": direction,
                "hyp": f"out/hyp.{direction}.txt",
                "ref": f"eval/ref.{direction}.txt",
            }
        )
    with open(out / "eval" / "units.json", "w", encoding="utf-8") as f:
        json.dump(units, f, indent=2)

    make_imbalanced_suite(seed=seed).save(out / "suites" / "demo_suite.json")

    with open(out / "registry.json", "w", encoding="utf-8") as f:
        json.dump({str(g): f"model-group-{g}" for g in range(1, 6)}, f, indent=2)

    stages = [
        {"name": "tokenizer", "subcommand": "train-tokenizer",
         "args": {"manifest": "tokenizer_corpora.json", "alpha": 0.3,
                  "vocab_size": 700, "out": "artifacts/tokenizer.json"}},
        {"name": "preprocess", "subcommand": "preprocess",
         "args": {"in": "raw", "manifest": "raw/inputs.json",
                  "policy": "policy.json", "out": "clean"}},
        {"name": "sample", "subcommand": "sample",
         "args": {"manifest": "clean/corpus_manifest.json", "mode": "temperature",
                  "tau": 1.0 / 0.3, "batches": 100, "out": "artifacts/schedule.jsonl"}},
        {"name": "augment-bt", "subcommand": "augment",
         "args": {"mode": "bt", "mono": "mono/amh.txt", "src": "eng", "tgt": "amh",
                  "translator": "identity", "cap": 150, "out": "aug/bt.eng-amh.jsonl"}},
        {"name": "augment-st", "subcommand": "augment",
         "args": {"mode": "st", "mono": "mono/eng.txt", "src": "eng", "tgt": "amh",
                  "translator": "identity", "cap": 150, "out": "aug/st.eng-amh.jsonl"}},
        {"name": "train-toy", "subcommand": "train-toy",
         "args": {"suite": "suites/demo_suite.json", "mode": "dro", "rho": 0.1,
                  "steps": 120, "lr": 0.05, "out": "run"}},
        {"name": "route", "subcommand": "route",
         "args": {"target": "swh", "registry": "registry.json",
                  "out": "artifacts/route.json"}},
    ]
    for src, tgt in DEMO_EVAL_DIRECTIONS:
        direction = f"{src}-{tgt}"
        stages.append(
            {"name": f"decode-{direction}", "subcommand": "decode",
             "args": {"model": f"models/lex.{direction}.json",
                      "input": f"eval/src.{direction}.txt", "beam": 4, "lenpen": 1.0,
                      "max_len": 16, "out": f"out/hyp.{direction}.txt"}}
        )
    stages.append(
        {"name": "evaluate", "subcommand": "evaluate",
         "args": {"directions": "eval/units.json", "tokenizer": "artifacts/tokenizer.json",
                  "report": "report.json"}}
    )
    with open(out / "run_manifest.json", "w", encoding="utf-8") as f:
        json.dump({"seed": seed, "stages": stages}, f, indent=2)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description="Generate the synthetic demo workspace.")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=2022)
    args = parser.parse_args(argv)
    path = make_demo_workspace(args.out, args.seed)
    print(f"demo workspace written to {path}")


if __name__ == "__main__":
    main()
