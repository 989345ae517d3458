"""``nbestgec`` command line: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional

from . import cw, decision, features, lm as lmmod, m2
from . import pipeline as P
from .align import extract_edits, serialize_edit_list
from .corpus import FormatError, serialize_sentences

log = logging.getLogger("nbestgec")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared loading


def _config(args) -> P.PipelineConfig:
    path = getattr(args, "config", None) or os.environ.get(P.CONFIG_ENV)
    cfg = P.PipelineConfig.load(path) if path else P.PipelineConfig()
    for key in ("output", "jobs", "tau", "tune_seed", "sig_seed", "sig_samples", "groups"):
        value = getattr(args, key, None)
        if value is not None:
            cfg.set(key, value)
    return cfg


def _scorer(args):
    model = cw.parse_model(P.read_text(args.model, "classifier model"))
    dictionary = features.parse_dictionary(P.read_text(args.dictionary, "feature dictionary"))
    lm = P.load_lm(args.lm) if "lm" in dictionary.groups else None
    extractor = features.FeatureExtractor(lm, P.load_provider(args.annotations), dictionary.groups)
    return model, decision.EditScorer(model, dictionary, extractor)


def _dev(args):
    gold = P.load_gold(args.gold)
    lists = P.load_nbest(args.nbest, [g.source for g in gold])
    P._check_aligned(lists, gold)
    return lists, gold


def _lists_from_source(args):
    return P.load_nbest(args.nbest, P.load_sources(args.source))


def _hypotheses(path: str, gold) -> List[tuple]:
    hyps = P.parse_sentences(P.read_text(path, "hypothesis"))
    if len(hyps) != len(gold):
        raise UsageError(f"{path}: {len(hyps)} sentences for {len(gold)} gold sentences")
    return hyps


def _evaluate_file(path: str, gold) -> m2.EvalResult:
    hyps = _hypotheses(path, gold)
    return m2.evaluate((g, extract_edits(g.source, h)) for g, h in zip(gold, hyps))


# ---------------------------------------------------------------------------
# subcommands


def cmd_train_lm(args, out: P.Outputs):
    model = P.train_language_model(args.corpus, args.order)
    out.add(args.out, lmmod.serialize_lm(model))


def cmd_extract_edits(args, out: P.Outputs):
    lists = _lists_from_source(args)
    rows = [(nb.source_id, e) for nb in lists for e in features.collect_edits(nb, args.n)]
    out.add(args.out, serialize_edit_list(rows))


def cmd_featurize(args, out: P.Outputs):
    lists, gold = _dev(args)
    groups = features.normalize_groups(args.groups.split(","))
    lm = P.load_lm(args.lm) if "lm" in groups else None
    extractor = features.FeatureExtractor(lm, P.load_provider(args.annotations), groups)
    examples = P.label_all(lists, gold, extractor, args.jobs)
    out.add(args.out, features.serialize_examples(examples))
    if args.dictionary_out:
        dictionary = features.build_dictionary(examples, args.min_count, groups)
        out.add(args.dictionary_out, features.serialize_dictionary(dictionary))


def cmd_train_classifier(args, out: P.Outputs):
    examples = features.parse_examples(P.read_text(args.examples, "examples"))
    dictionary = features.parse_dictionary(P.read_text(args.dictionary, "feature dictionary"))
    data = [(features.vectorize(ex.vector.restrict(dictionary.groups), dictionary), ex.valid) for ex in examples]
    cfg = cw.CWTrainConfig(args.epochs, args.eta, args.variance, args.seed)
    out.add(args.out, cw.serialize_model(cw.cw_train(data, dictionary.dim, cfg)))


def cmd_tune_threshold(args, out: P.Outputs):
    model, scorer = _scorer(args)
    lists, gold = _dev(args)
    pools = P.pools_for(lists, scorer, args.jobs)
    model.tau = P.tune_tau(lists, gold, pools, args.n)
    print(f"tau {model.tau}")
    out.add(args.out, cw.serialize_model(model))


def cmd_tune_weights(args, out: P.Outputs):
    _, scorer = _scorer(args)
    lists, gold = _dev(args)
    if args.init:
        init = decision.parse_weights(P.read_text(args.init, "weights"))
    else:
        init = decision.infer_decoder_weights(lists)
    init.setdefault(decision.EDIT_FEATURE, 0.0)
    pools = P.pools_for(lists, scorer, args.jobs)
    weights = decision.tune_weights(list(zip(lists, gold)), scorer, init, args.seed, args.n, pools=pools)
    out.add(args.out, decision.serialize_weights(weights))


def cmd_rerank(args, out: P.Outputs):
    weights = decision.parse_weights(P.read_text(args.weights, "weights"))
    lists = _lists_from_source(args)
    scorer = None
    pools = [None] * len(lists)
    if weights.get(decision.EDIT_FEATURE, 0.0) != 0.0:
        _, scorer = _scorer(args)
        pools = P.pools_for(lists, scorer, args.jobs)
    cfg = decision.DecisionConfig("rerank", args.n)
    hyps = [decision.correct(nb, cfg, weights, scorer, pool)[0] for nb, pool in zip(lists, pools)]
    out.add(args.out, serialize_sentences(hyps))


def cmd_select(args, out: P.Outputs):
    model, scorer = _scorer(args)
    lists = _lists_from_source(args)
    tau = model.tau if args.tau is None else args.tau
    pools = P.pools_for(lists, scorer, args.jobs)
    cfg = decision.DecisionConfig("select", args.n, tau)
    hyps = [decision.correct(nb, cfg, None, scorer, pool)[0] for nb, pool in zip(lists, pools)]
    out.add(args.out, serialize_sentences(hyps))


def cmd_evaluate(args, out: P.Outputs):
    result = _evaluate_file(args.hyp, P.load_gold(args.gold))
    sys.stdout.write(result.report())
    if args.tsv:
        out.add(args.tsv, result.tsv())


def cmd_significance(args, out: P.Outputs):
    gold = P.load_gold(args.gold)
    a = _evaluate_file(args.a, gold)
    b = _evaluate_file(args.b, gold)
    sys.stdout.write(m2.sign_test(a.per_sentence, b.per_sentence, args.samples, args.seed).report())


def cmd_ablate(args, out: P.Outputs):
    cfg = _config(args)
    rows = P.run_ablation(cfg, out)
    sys.stdout.write(P.format_ablation(rows))


def cmd_synth(args, out: P.Outputs):
    P.synthesize(args.out_dir, args.seed, args.train, args.dev, args.test, args.n,
                 args.lm_sentences, args.grammar_size, out)


def cmd_pipeline(args, out: P.Outputs):
    cfg = _config(args)
    exp = P.run_pipeline(cfg, out)
    sys.stdout.write(exp.report)


# ---------------------------------------------------------------------------
# parser


def _scoring_args(p):
    p.add_argument("--model", required=True, help="classifier model file")
    p.add_argument("--dictionary", required=True, help="feature dictionary file")
    p.add_argument("--lm", default="", help="language model file")
    p.add_argument("--annotations", default="", help="precomputed annotation file (default: builtin tagger)")


def _jobs(p):
    p.add_argument("--jobs", type=int, default=1, help="worker processes for per-sentence work")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbestgec", description="Edit classification over GEC n-best lists.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-lm", help="train an n-gram language model")
    p.add_argument("--corpus", required=True, help="tokenized text, one sentence per line")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("extract-edits", help="list the distinct edits of each n-best list")
    p.add_argument("--nbest", required=True)
    p.add_argument("--source", required=True, help="annotated file or tokenized sources")
    p.add_argument("--n", type=int, default=None, help="only the top n hypotheses")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract_edits)

    p = sub.add_parser("featurize", help="extract labelled edit features")
    p.add_argument("--nbest", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--lm", default="")
    p.add_argument("--annotations", default="")
    p.add_argument("--groups", default=",".join(features.GROUPS))
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--out", required=True, help="examples file")
    p.add_argument("--dictionary-out", default="", help="also build a feature dictionary")
    _jobs(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train-classifier", help="train the confidence-weighted edit classifier")
    p.add_argument("--examples", required=True)
    p.add_argument("--dictionary", required=True)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--eta", type=float, default=0.9)
    p.add_argument("--variance", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_classifier)

    p = sub.add_parser("tune-threshold", help="pick the selection threshold on a dev set")
    _scoring_args(p)
    p.add_argument("--nbest", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True, help="model file with the tuned threshold")
    _jobs(p)
    p.set_defaults(func=cmd_tune_threshold)

    p = sub.add_parser("tune-weights", help="tune log-linear reranking weights on a dev set")
    _scoring_args(p)
    p.add_argument("--nbest", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--init", default="", help="initial weights (default: fitted decoder weights)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _jobs(p)
    p.set_defaults(func=cmd_tune_weights)

    p = sub.add_parser("rerank", help="rerank n-best lists with the edit feature")
    p.add_argument("--model", default="")
    p.add_argument("--dictionary", default="")
    p.add_argument("--lm", default="")
    p.add_argument("--annotations", default="")
    p.add_argument("--nbest", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True)
    _jobs(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("select", help="greedy edit selection over n-best lists")
    _scoring_args(p)
    p.add_argument("--nbest", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tau", type=float, default=None, help="override the model's threshold")
    p.add_argument("--out", required=True)
    _jobs(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("evaluate", help="precision, recall and F0.5 against gold edits")
    p.add_argument("--hyp", required=True, help="system output, one tokenized sentence per line")
    p.add_argument("--gold", required=True)
    p.add_argument("--tsv", default="", help="also write a tab-separated record")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("significance", help="bootstrap sign test: does system A beat system B?")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_significance)

    for name, func, help_text in (
        ("pipeline", cmd_pipeline, "run every stage and report all systems"),
        ("ablate", cmd_ablate, "classifier accuracy with each feature group removed"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help=f"key=value config (default: ${P.CONFIG_ENV})")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--groups", default=None)
        p.add_argument("--tau", default=None, help="fixed threshold instead of tuning")
        p.add_argument("--tune-seed", dest="tune_seed", default=None)
        p.add_argument("--sig-seed", dest="sig_seed", default=None)
        p.add_argument("--sig-samples", dest="sig_samples", default=None)
        p.add_argument("--jobs", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="write a synthetic corpus with simulated n-best lists")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--train", type=int, default=2000)
    p.add_argument("--dev", type=int, default=300)
    p.add_argument("--test", type=int, default=300)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--lm-sentences", type=int, default=5000)
    p.add_argument("--grammar-size", type=int, default=12)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    out = P.Outputs()
    try:
        args.func(args, out)
        out.commit()
    except (FileNotFoundError, FormatError, ValueError, KeyError, UsageError) as exc:
        print(f"nbestgec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
