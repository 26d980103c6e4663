"""Command-line front end wiring the toolkit into four workflows.

Subcommands:

* ``train`` -- produce a model under one of the three regimes;
* ``tag``   -- annotate text with the most probable tags;
* ``eval``  -- score a prediction against gold and print the profile report;
* ``synth`` -- write a seeded synthetic benchmark (generator model, tagged
               and untagged corpora, matching tag set and lexicon).

Every subcommand echoes a run manifest for reproducibility.  Exit codes:
0 success, 1 usage problem, 2 data problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import synth as synthmod
from .corpusio import read_pretokenized, read_tagged, tokenize_raw
from .decoder import tag_text
from .errors import DataError, TaggerError
from .evaluation import load_major_classes, profile_report
from .lexicon import ClassStore, classify, load_guesser_rules, load_lexicon
from .model import BiasSet, load_biases, load_model, save_model
from .tagset import load_tagset
from .training import (
    REGIME_BIAS,
    REGIME_COUNTED,
    REGIME_COUNTED_ONLY,
    REGIMES,
    TrainingConfig,
    counted_init,
    train_regime,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(TaggerError):
    """Bad flags or unreadable inputs; maps to exit code 1."""


@dataclass
class RunManifest:
    """Everything needed to rerun a subcommand byte-for-byte."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "subcommand": self.subcommand,
                "inputs": self.inputs,
                "outputs": self.outputs,
                "options": self.options,
            },
            sort_keys=True,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


def _resolve_inputs(**paths) -> dict:
    """Resolve and existence-check input paths before any work starts."""
    resolved = {}
    for name, path in paths.items():
        if path is None:
            continue
        full = os.path.abspath(path)
        if not os.path.isfile(full):
            raise UsageError(f"--{name.replace('_', '-')}: no such file: {path}")
        resolved[name] = full
    return resolved


def _load_resources(inputs, need_lexicon=True):
    ts = load_tagset(inputs["tagset"])
    store = ClassStore()
    lex = rules = None
    if need_lexicon:
        lex = load_lexicon(inputs["lexicon"], ts, store)
        rules = load_guesser_rules(inputs["rules"], ts, store)
    return ts, store, lex, rules


def _class_sequences(path, lex, rules):
    """Materialize a pretokenized corpus as class-id sequences.

    Tokens themselves are not kept; multi-pass training only needs the
    compact class ids.
    """
    return [
        np.array([classify(lex, rules, tok.surface) for tok in sentence], dtype=np.intp)
        for sentence in read_pretokenized(path)
    ]


def _tagged_pairs(path, ts, lex, rules):
    return [
        [(tt.gold, classify(lex, rules, tt.token.surface)) for tt in sentence]
        for sentence in read_tagged(path, ts)
    ]


def cmd_train(args) -> int:
    inputs = _resolve_inputs(tagset=args.tagset, lexicon=args.lexicon, rules=args.rules,
                             biases=args.biases, tagged=args.tagged, corpus=args.corpus)
    if args.regime == REGIME_BIAS and "corpus" not in inputs:
        raise UsageError("--regime bias requires --corpus")
    if args.regime == REGIME_COUNTED and not {"tagged", "corpus"} <= inputs.keys():
        raise UsageError("--regime counted requires --tagged and --corpus")
    if args.regime == REGIME_COUNTED_ONLY:
        if "tagged" not in inputs:
            raise UsageError("--regime counted-only requires --tagged")
        if args.iters is not None:
            raise UsageError("--iters is meaningless with --regime counted-only "
                             "(no re-estimation takes place)")
    iters = args.iters if args.iters is not None else (20 if args.regime == REGIME_BIAS else 1)

    log_path = args.log or args.out + ".log"
    manifest = RunManifest(
        "train",
        inputs=inputs,
        outputs={"model": os.path.abspath(args.out), "log": os.path.abspath(log_path)},
        options={"regime": args.regime, "iters": iters, "smoothing": args.smoothing,
                 "skip_impossible": args.skip_impossible},
    )
    print(f"manifest {manifest.to_json()}")

    ts, store, lex, rules = _load_resources(inputs)
    tagged = _tagged_pairs(inputs["tagged"], ts, lex, rules) if "tagged" in inputs else None
    corpus = _class_sequences(inputs["corpus"], lex, rules) if "corpus" in inputs else None

    if args.regime == REGIME_COUNTED_ONLY:
        model, trajectory = counted_init(tagged, ts, store, args.smoothing), []
    else:
        biases = load_biases(inputs["biases"], ts) if "biases" in inputs else BiasSet.empty()
        config = TrainingConfig(iterations=iters, smoothing_floor=args.smoothing)
        model, trajectory = train_regime(
            args.regime, ts, store, corpus=corpus, tagged=tagged, biases=biases,
            config=config, skip_impossible=args.skip_impossible,
        )
        skipped = getattr(model, "skipped_sentences", 0)
        if skipped:
            print(f"warning: skipped {skipped} impossible sentence(s)", file=sys.stderr)

    save_model(model, args.out)
    with open(log_path, "w", encoding="utf-8") as log:
        log.write(f"# manifest {manifest.to_json()}\n")
        log.write("# iteration\tlog_likelihood\n")
        for i, ll in enumerate(trajectory):
            log.write(f"{i}\t{ll:.6f}\n")
    for i, ll in enumerate(trajectory):
        print(f"iteration {i}: log-likelihood {ll:.4f}")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_tag(args) -> int:
    inputs = _resolve_inputs(model=args.model, tagset=args.tagset,
                             lexicon=args.lexicon, rules=args.rules, input=args.input)
    manifest = RunManifest(
        "tag",
        inputs=inputs,
        outputs={"tagged": os.path.abspath(args.output)},
        options={"pretokenized": args.pretokenized, "with_class": args.with_class,
                 "skip_impossible": args.skip_impossible},
    )
    print(f"manifest {manifest.to_json()}")

    ts = load_tagset(inputs["tagset"])
    model = load_model(inputs["model"], ts)
    store = ClassStore.from_members(model.class_members)
    lex = load_lexicon(inputs["lexicon"], ts, store)
    rules = load_guesser_rules(inputs["rules"], ts, store)

    reader = read_pretokenized if args.pretokenized else tokenize_raw
    skipped = 0
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        for index, sentence in enumerate(reader(inputs["input"])):
            surfaces = [tok.surface for tok in sentence]
            try:
                decoding, classes = tag_text(model, lex, rules, surfaces)
            except DataError as exc:
                if args.skip_impossible:
                    skipped += 1
                    print(f"warning: sentence {index} skipped: {exc}", file=sys.stderr)
                    continue
                raise DataError(f"sentence {index}: {exc}") from None
            for i, surface in enumerate(surfaces):
                line = f"{surface}\t{ts.label(decoding.tags[i])}"
                if args.with_class:
                    signature = "+".join(ts.label(t) for t in store.members(classes[i]))
                    line += f"\t{signature}"
                out.write(line + "\n")
            out.write("\n")
    if skipped:
        print(f"warning: {skipped} sentence(s) skipped", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    inputs = _resolve_inputs(pred=args.pred, gold=args.gold, tagset=args.tagset,
                             lexicon=args.lexicon, rules=args.rules,
                             major_classes=args.major_classes)
    manifest = RunManifest(
        "eval",
        inputs=inputs,
        outputs={"json": os.path.abspath(args.json)} if args.json else {},
        options={"top_k": args.top_k},
    )
    print(f"manifest {manifest.to_json()}")

    ts, store, lex, rules = _load_resources(inputs)
    major = load_major_classes(inputs["major_classes"], ts)
    pred_sents = list(read_tagged(inputs["pred"], ts))
    gold_sents = list(read_tagged(inputs["gold"], ts))
    _check_surfaces(pred_sents, gold_sents)

    pred = [[tt.gold for tt in s] for s in pred_sents]
    gold = [[tt.gold for tt in s] for s in gold_sents]
    classes = [
        [classify(lex, rules, tt.token.surface) for tt in s] for s in gold_sents
    ]
    report = profile_report(pred, gold, classes, store, ts, major, top_k=args.top_k)
    sys.stdout.write(report.render_text())
    if args.json:
        doc = report.to_dict()
        doc["manifest"] = json.loads(manifest.to_json())
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=2, ensure_ascii=False)
            f.write("\n")
    return EXIT_OK


def _check_surfaces(pred_sents, gold_sents):
    from .errors import AlignmentError

    if len(pred_sents) != len(gold_sents):
        raise AlignmentError(
            f"prediction has {len(pred_sents)} sentences, gold has {len(gold_sents)}"
        )
    for i, (p, g) in enumerate(zip(pred_sents, gold_sents)):
        if len(p) != len(g):
            raise AlignmentError(
                f"sentence {i}: prediction has {len(p)} tokens, gold has {len(g)}",
                sentence_index=i,
            )
        for j, (pt, gt) in enumerate(zip(p, g)):
            if pt.token.surface != gt.token.surface:
                raise AlignmentError(
                    f"sentence {i} token {j}: surface {pt.token.surface!r} != {gt.token.surface!r}",
                    sentence_index=i,
                )


def cmd_synth(args) -> int:
    if args.tags < 1:
        raise UsageError("--tags must be >= 1")
    if args.classes < args.tags:
        raise UsageError(f"--classes must be >= --tags ({args.tags}): "
                         "every tag needs a class to appear in")
    if args.tokens < 1:
        raise UsageError("--tokens must be >= 1")
    prefix = args.out_prefix
    outputs = {name: os.path.abspath(f"{prefix}.{ext}") for name, ext in
               (("tagset", "tags"), ("lexicon", "lex"), ("rules", "rules"),
                ("model", "model"), ("gold", "gold"), ("untagged", "txt"))}
    manifest = RunManifest(
        "synth",
        outputs=outputs,
        options={"tags": args.tags, "classes": args.classes, "tokens": args.tokens,
                 "seed": args.seed, "ambiguity": args.ambiguity,
                 "max_class_size": args.max_class_size},
    )
    print(f"manifest {manifest.to_json()}")

    rng = np.random.default_rng(args.seed)
    ts = synthmod.synthetic_tagset(args.tags)
    members = synthmod.sample_class_inventory(rng, args.tags, args.classes,
                                              args.max_class_size)
    generator = synthmod.sample_generator_model(rng, ts, members, args.ambiguity)
    corpus = synthmod.sample_corpus(rng, generator, args.tokens)

    with open(outputs["tagset"], "w", encoding="utf-8", newline="\n") as f:
        for t in ts:
            f.write(f"{t.label}\t{t.description}\n")
        f.write("!sentence_delim T00\n")
    vocab = {c: [f"w{c:03d}{suffix}" for suffix in "abc"] for c in range(len(members))}
    with open(outputs["lexicon"], "w", encoding="utf-8", newline="\n") as f:
        for c, mem in enumerate(members):
            labels = " ".join(ts.label(t) for t in mem)
            for word in vocab[c]:
                f.write(f"{word}\t{labels}\n")
    with open(outputs["rules"], "w", encoding="utf-8", newline="\n") as f:
        f.write("DEFAULT U T00\nDEFAULT L T00\n")
    save_model(generator, outputs["model"])
    with open(outputs["gold"], "w", encoding="utf-8", newline="\n") as fg, \
            open(outputs["untagged"], "w", encoding="utf-8", newline="\n") as fu:
        for sentence in corpus:
            for tag, c in sentence:
                word = vocab[c][int(rng.integers(len(vocab[c])))]
                fg.write(f"{word}\t{ts.label(tag)}\n")
                fu.write(word + "\n")
            fg.write("\n")
            fu.write("\n")
    print(f"benchmark written with prefix {prefix}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="hmmtagger",
                     description="Class-based HMM part-of-speech tagging toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="train a model under one of three regimes")
    p.add_argument("--regime", required=True, choices=REGIMES)
    p.add_argument("--tagset", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--biases")
    p.add_argument("--tagged")
    p.add_argument("--corpus")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--smoothing", type=float, default=1e-6)
    p.add_argument("--skip-impossible", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag text with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--pretokenized", action="store_true",
                   help="input is one token per line, blank line between sentences")
    p.add_argument("--with-class", action="store_true",
                   help="append each token's equivalence-class signature column")
    p.add_argument("--skip-impossible", action="store_true")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="score predictions against gold and print the profile")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--major-classes", required=True)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--json", help="also write the structured report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a seeded synthetic benchmark")
    p.add_argument("--tags", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--tokens", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--ambiguity", type=float, default=1.5)
    p.add_argument("--max-class-size", type=int, default=4)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TaggerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
