"""Stage functions behind the command line: configuration, file loading,
parallel per-sentence work, the full experiment and its reports.

Outputs of a stage are staged in memory and only written, atomically, once
the stage has succeeded, so a failure never leaves partial files behind.
"""

from __future__ import annotations

import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import cw, decision, features, lm as lmmod, m2
from .align import extract_edits
from .annotate import BuiltinAnnotator, FileAnnotator
from .corpus import (
    AnnotatedSentence,
    NBestList,
    Sentence,
    parse_annotated,
    parse_nbest,
    parse_sentences,
    serialize_sentences,
)

log = logging.getLogger("nbestgec")

CONFIG_ENV = "NBESTGEC_CONFIG"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class PipelineConfig:
    train: str = ""
    dev: str = ""
    test: str = ""
    train_nbest: str = ""
    dev_nbest: str = ""
    test_nbest: str = ""
    lm_corpus: str = ""
    annotations: str = ""
    weights: str = ""
    output: str = "out"
    lm_order: int = 5
    cw_epochs: int = 5
    cw_eta: float = 0.9
    cw_variance: float = 1.0
    cw_seed: int = 0
    min_count: int = 1
    groups: str = "smt,lexical_pos,context,lm"
    n: int = 5
    tau: Optional[float] = None
    rerank_n: str = "5,10"
    select_n: str = "1,2,3,4,5"
    tune_seed: int = 0
    restarts: int = 3
    sig_samples: int = 100
    sig_seed: int = 1
    jobs: int = 1

    PATH_KEYS = ("train", "dev", "test", "train_nbest", "dev_nbest", "test_nbest",
                 "lm_corpus", "annotations", "weights", "output")

    @classmethod
    def from_text(cls, text: str, base: Optional[Path] = None) -> "PipelineConfig":
        """Parse flat ``key = value`` lines; relative paths resolve against ``base``."""
        cfg = cls()
        types = {f.name: f.type for f in fields(cls)}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep:
                raise ValueError(f"config line {lineno}: expected key=value")
            if key not in types:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            if key in cls.PATH_KEYS and value and base is not None and not os.path.isabs(value):
                value = str(base / value)
            cfg.set(key, value)
        return cfg

    @classmethod
    def load(cls, path: str) -> "PipelineConfig":
        p = Path(path)
        return cls.from_text(p.read_text(encoding="utf-8"), p.parent)

    def set(self, key: str, value) -> None:
        current = {f.name: f.type for f in fields(self)}[key]
        if isinstance(value, str):
            if "int" in str(current):
                value = int(value)
            elif "float" in str(current):
                value = None if value.lower() in ("", "none") else float(value)
        setattr(self, key, value)

    @property
    def group_list(self) -> Tuple[str, ...]:
        return features.normalize_groups(g for g in self.groups.split(",") if g)


def int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# files


def read_text(path: str, what: str = "input") -> str:
    if not path:
        raise FileNotFoundError(f"no {what} file given")
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return p.read_text(encoding="utf-8")


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _stage_file(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_umask())
    except BaseException:
        os.unlink(tmp)
        raise
    return tmp


def write_atomic(path: str, text: str) -> None:
    os.replace(_stage_file(Path(path), text), path)


class Outputs:
    """Collects a stage's output files; :meth:`commit` writes them all."""

    def __init__(self):
        self.files: Dict[str, str] = {}

    def add(self, path, text: str) -> None:
        self.files[str(path)] = text

    def commit(self) -> None:
        """Write every file to a temporary sibling first, then rename them
        into place, so a failed write leaves no target touched."""
        staged = []
        try:
            for path, text in self.files.items():
                staged.append((_stage_file(Path(path), text), path))
        except BaseException:
            for tmp, _ in staged:
                os.unlink(tmp)
            raise
        for tmp, path in staged:
            os.replace(tmp, path)
            log.info("wrote %s", path)


def load_sources(path: str) -> List[Sentence]:
    """Source sentences from an annotated file or plain tokenized text."""
    text = read_text(path, "source")
    if text.lstrip().startswith("S "):
        return [s.source for s in parse_annotated(text)]
    return parse_sentences(text)


def load_gold(path: str) -> List[AnnotatedSentence]:
    return parse_annotated(read_text(path, "gold"))


def load_nbest(path: str, sources: Sequence[Sentence]) -> List[NBestList]:
    return parse_nbest(read_text(path, "n-best"), sources)


def load_provider(path: str = ""):
    if path:
        return FileAnnotator.from_text(read_text(path, "annotation"))
    return BuiltinAnnotator()


def load_lm(path: str) -> lmmod.NGramModel:
    return lmmod.parse_lm(read_text(path, "language model"))


# ---------------------------------------------------------------------------
# per-sentence parallelism

_WORKER_CONTEXT = None


def _init_worker(context):
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = context


def _call_worker(args):
    func, item = args
    return func(_WORKER_CONTEXT, item)


def parallel_map(func: Callable, context, items: Sequence, jobs: int = 1) -> list:
    """``[func(context, x) for x in items]``, fanned out over ``jobs``
    processes; results come back in input order."""
    if jobs <= 1 or len(items) < 2:
        return [func(context, x) for x in items]
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(context,)) as pool:
        return list(pool.map(_call_worker, [(func, x) for x in items], chunksize=chunk))


def _label_one(extractor, pair):
    nb, gold = pair
    return features.label_edits(nb, gold, extractor)


def _pool_one(scorer, nb):
    return decision.scored_pool(nb, scorer)


def label_all(lists, gold, extractor, jobs=1) -> List[features.LabeledExample]:
    _check_aligned(lists, gold)
    chunks = parallel_map(_label_one, extractor, list(zip(lists, gold)), jobs)
    return [ex for chunk in chunks for ex in chunk]


def pools_for(lists, scorer, jobs=1) -> List[decision.Pool]:
    return parallel_map(_pool_one, scorer, list(lists), jobs)


def _check_aligned(lists, gold):
    if len(lists) != len(gold):
        raise ValueError(f"{len(lists)} n-best lists for {len(gold)} annotated sentences")
    for nb, g in zip(lists, gold):
        if tuple(nb.source) != tuple(g.source):
            raise ValueError(f"n-best list {nb.source_id} does not match its annotated source")


# ---------------------------------------------------------------------------
# stages


def train_language_model(corpus_path: str, order: int) -> lmmod.NGramModel:
    return lmmod.train_lm(parse_sentences(read_text(corpus_path, "LM corpus")), order)


def build_training_set(examples, groups, min_count=1):
    vectors = [ex.vector.restrict(groups) for ex in examples]
    dictionary = features.build_dictionary(vectors, min_count, groups)
    data = [(features.vectorize(v, dictionary), ex.valid) for v, ex in zip(vectors, examples)]
    return dictionary, data


def train_classifier(examples, groups, cfg: PipelineConfig):
    dictionary, data = build_training_set(examples, groups, cfg.min_count)
    train_cfg = cw.CWTrainConfig(cfg.cw_epochs, cfg.cw_eta, cfg.cw_variance, cfg.cw_seed)
    return dictionary, cw.cw_train(data, dictionary.dim, train_cfg)


def tune_tau(dev_lists, dev_gold, pools, n: Optional[int]) -> float:
    objective = decision.threshold_objective(list(zip(dev_lists, dev_gold)), None, n, pools)
    return cw.tune_threshold(objective)


def initial_weights(cfg: PipelineConfig, lists: Sequence[NBestList]) -> Dict[str, float]:
    if cfg.weights:
        weights = decision.parse_weights(read_text(cfg.weights, "weights"))
    else:
        weights = decision.infer_decoder_weights(lists)
    weights.setdefault(decision.EDIT_FEATURE, 0.0)
    return weights


def system_edits(lists, gold, outputs):
    return [extract_edits(g.source, hyp) for g, hyp in zip(gold, outputs)]


@dataclass
class SystemRow:
    name: str
    result: m2.EvalResult
    outputs: List[Sentence] = field(repr=False, default_factory=list)
    significance: Optional[m2.SignificanceResult] = None


def _pct(x: float) -> str:
    return f"{100 * x:.2f}"


def format_results_table(rows: Sequence[SystemRow], threshold: float = 0.01) -> str:
    width = max(len("system"), *(len(r.name) for r in rows))
    lines = [f"{'system':<{width}}  {'P':>6}  {'R':>6}  {'F0.5':>6}"]
    for r in rows:
        mark = " *" if r.significance is not None and r.significance.p_value < threshold else ""
        res = r.result
        lines.append(f"{r.name:<{width}}  {_pct(res.precision):>6}  {_pct(res.recall):>6}  {_pct(res.f05):>6}{mark}")
    lines.append(f"* significantly better than the baseline (bootstrap sign test, p < {threshold})")
    return "\n".join(lines) + "\n"


def format_results_tsv(rows: Sequence[SystemRow]) -> str:
    lines = ["system\tprecision\trecall\tf05\tmatched\tproposed\tgold\tp_value"]
    for r in rows:
        res = r.result
        p = "NA" if r.significance is None else repr(r.significance.p_value)
        lines.append(
            f"{r.name}\t{res.precision!r}\t{res.recall!r}\t{res.f05!r}\t"
            f"{res.matched}\t{res.proposed}\t{res.gold_count}\t{p}"
        )
    return "\n".join(lines) + "\n"


@dataclass
class Experiment:
    """Everything :func:`run_pipeline` produced, for callers and tests."""

    rows: List[SystemRow]
    tau: float
    weights: Dict[int, Dict[str, float]]
    report: str
    tsv: str


def _load_split(cfg: PipelineConfig, split: str):
    gold = load_gold(getattr(cfg, split))
    lists = load_nbest(getattr(cfg, f"{split}_nbest"), [g.source for g in gold])
    _check_aligned(lists, gold)
    return lists, gold


def _evaluate(name, gold, outputs, baseline=None, cfg=None) -> SystemRow:
    result = m2.evaluate(zip(gold, (extract_edits(g.source, h) for g, h in zip(gold, outputs))))
    row = SystemRow(name, result, list(outputs))
    if baseline is not None:
        row.significance = m2.sign_test(result.per_sentence, baseline.result.per_sentence,
                                        cfg.sig_samples, cfg.sig_seed)
    return row


def run_pipeline(cfg: PipelineConfig, out: Optional[Outputs] = None) -> Experiment:
    """train-lm, featurize, train-classifier, tune-threshold, tune-weights,
    rerank/select and evaluate; returns the report rows."""
    out = out if out is not None else Outputs()
    outdir = Path(cfg.output)
    groups = cfg.group_list

    log.info("training %d-gram language model", cfg.lm_order)
    model_lm = train_language_model(cfg.lm_corpus, cfg.lm_order)
    out.add(outdir / "lm.txt", lmmod.serialize_lm(model_lm))

    train_lists, train_gold = _load_split(cfg, "train")
    dev_lists, dev_gold = _load_split(cfg, "dev")
    test_lists, test_gold = _load_split(cfg, "test")
    provider = load_provider(cfg.annotations)
    extractor = features.FeatureExtractor(model_lm, provider, groups)

    log.info("featurizing %d training lists", len(train_lists))
    examples = label_all(train_lists, train_gold, extractor, cfg.jobs)
    out.add(outdir / "train.examples", features.serialize_examples(examples))

    log.info("training classifier on %d edits", len(examples))
    dictionary, model = train_classifier(examples, groups, cfg)
    out.add(outdir / "features.dict", features.serialize_dictionary(dictionary))
    scorer = decision.EditScorer(model, dictionary, extractor)

    dev_pools = pools_for(dev_lists, scorer, cfg.jobs)
    test_pools = pools_for(test_lists, scorer, cfg.jobs)

    select_ns = int_list(cfg.select_n)
    rerank_ns = int_list(cfg.rerank_n)
    if cfg.tau is None:
        model.tau = tune_tau(dev_lists, dev_gold, dev_pools, max(select_ns) if select_ns else cfg.n)
        log.info("tuned threshold %.2f", model.tau)
    else:
        model.tau = cfg.tau
    out.add(outdir / "classifier.model", cw.serialize_model(model))

    dev = list(zip(dev_lists, dev_gold))
    init = initial_weights(cfg, dev_lists)
    tuned: Dict[int, Dict[str, float]] = {}
    for n in rerank_ns:
        log.info("tuning reranking weights for %d-best", n)
        tuned[n] = decision.tune_weights(dev, scorer, init, cfg.tune_seed, n, cfg.restarts, dev_pools)
        out.add(outdir / f"weights.rerank{n}", decision.serialize_weights(tuned[n]))

    baseline = _evaluate("baseline 1-best", test_gold, [nb.entries[0].hypothesis for nb in test_lists])
    rows = [baseline]
    for n in rerank_ns:
        hyps = [decision.rescore(nb, tuned[n], scorer, n, pool)[0][0].hypothesis
                for nb, pool in zip(test_lists, test_pools)]
        rows.append(_evaluate(f"rerank {n}-best", test_gold, hyps, baseline, cfg))
    for n in select_ns:
        hyps = [decision.correct(nb, decision.DecisionConfig("select", n, model.tau), None, scorer, pool)[0]
                for nb, pool in zip(test_lists, test_pools)]
        rows.append(_evaluate(f"select {n}-best", test_gold, hyps, baseline, cfg))

    for row in rows:
        slug = row.name.replace(" ", "_")
        out.add(outdir / "systems" / f"{slug}.txt", serialize_sentences(row.outputs))
    report = format_results_table(rows)
    tsv = format_results_tsv(rows)
    out.add(outdir / "report.txt", report)
    out.add(outdir / "report.tsv", tsv)
    return Experiment(rows, model.tau, tuned, report, tsv)


# ---------------------------------------------------------------------------
# ablation

ABLATION_ROWS = ("all",) + tuple(f"-{g}" for g in features.GROUPS)


@dataclass
class AblationRow:
    name: str
    accuracy: float
    correct: int
    total: int


def run_ablation(cfg: PipelineConfig, out: Optional[Outputs] = None) -> List[AblationRow]:
    """Classifier accuracy on the test edits with every feature group, then
    with each group left out in turn."""
    out = out if out is not None else Outputs()
    model_lm = train_language_model(cfg.lm_corpus, cfg.lm_order)
    train_lists, train_gold = _load_split(cfg, "train")
    test_lists, test_gold = _load_split(cfg, "test")
    extractor = features.FeatureExtractor(model_lm, load_provider(cfg.annotations), features.GROUPS)
    train_ex = label_all(train_lists, train_gold, extractor, cfg.jobs)
    test_ex = label_all(test_lists, test_gold, extractor, cfg.jobs)
    rows = []
    for name in ABLATION_ROWS:
        groups = features.GROUPS if name == "all" else tuple(g for g in features.GROUPS if g != name[1:])
        dictionary, model = train_classifier(train_ex, groups, cfg)
        data = [(features.vectorize(ex.vector.restrict(groups), dictionary), ex.valid) for ex in test_ex]
        acc = cw.accuracy(model, data)
        rows.append(AblationRow(name, acc, round(acc * len(data)), len(data)))
        log.info("ablation %s: accuracy %.4f", name, acc)
    out.add(Path(cfg.output) / "ablation.txt", format_ablation(rows))
    out.add(Path(cfg.output) / "ablation.tsv", format_ablation_tsv(rows))
    return rows


def format_ablation(rows: Sequence[AblationRow]) -> str:
    width = max(len("features"), *(len(r.name) for r in rows))
    lines = [f"{'features':<{width}}  {'accuracy':>8}"]
    lines += [f"{r.name:<{width}}  {_pct(r.accuracy):>8}" for r in rows]
    return "\n".join(lines) + "\n"


def format_ablation_tsv(rows: Sequence[AblationRow]) -> str:
    lines = ["features\taccuracy\tcorrect\ttotal"]
    lines += [f"{r.name}\t{r.accuracy!r}\t{r.correct}\t{r.total}" for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# synthetic data


def synthesize(outdir: str, seed: int = 42, train: int = 2000, dev: int = 300, test: int = 300,
               n: int = 5, lm_sentences: int = 5000, grammar_size: int = 12,
               out: Optional[Outputs] = None) -> Outputs:
    """Annotated splits, simulated n-best lists, an LM corpus and a config
    that ties them together."""
    from . import synth
    from .corpus import serialize_annotated, serialize_nbest

    out = out if out is not None else Outputs()
    root = Path(outdir)
    dataset, clean = synth.generate_corpus(grammar_size, train + dev + test, synth.ErrorModel(seed=seed))
    corrector = synth.SimulatedCorrector(n=n, seed=seed)
    splits = {"train": (0, train), "dev": (train, train + dev), "test": (train + dev, train + dev + test)}
    for name, (a, b) in splits.items():
        part = dataset[a:b]
        out.add(root / f"{name}.m2", serialize_annotated(part))
        out.add(root / f"{name}.nbest", serialize_nbest(synth.simulate_lists(part, corrector)))
    # the LM sees clean training text plus unrelated clean sentences, never dev/test
    _, extra = synth.generate_corpus(grammar_size, lm_sentences, synth.ErrorModel((), seed + 1))
    out.add(root / "lm_corpus.txt", serialize_sentences(clean[:train] + extra))
    out.add(root / "demo.cfg", "".join(
        f"{k} = {v}\n" for k, v in (
            ("train", "train.m2"), ("dev", "dev.m2"), ("test", "test.m2"),
            ("train_nbest", "train.nbest"), ("dev_nbest", "dev.nbest"), ("test_nbest", "test.nbest"),
            ("lm_corpus", "lm_corpus.txt"), ("output", "out"), ("lm_order", 5),
            ("rerank_n", "5,10"), ("select_n", "1,2,3,4,5"), ("tune_seed", 0), ("sig_seed", 1),
        )
    ))
    return out
