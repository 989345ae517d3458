import os
import subprocess
import sys

import pytest

from nbestgec.cli import main
from nbestgec.corpus import parse_annotated, serialize_sentences
from nbestgec.align import apply_edits

from conftest import DEMO, GOLDEN


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    d = tmp_path_factory.mktemp("small")
    assert main(["synth", "--out-dir", str(d), "--seed", "3", "--train", "300", "--dev", "80",
                 "--test", "80", "--lm-sentences", "500"]) == 0
    return d


def run(*argv):
    return main([str(a) for a in argv])


def test_stage_by_stage(small, tmp_path, capsys):
    d, o = small, tmp_path
    assert run("train-lm", "--corpus", d / "lm_corpus.txt", "--order", 3, "--out", o / "lm.txt") == 0
    assert run("extract-edits", "--nbest", d / "dev.nbest", "--source", d / "dev.m2", "--out", o / "edits.txt") == 0
    assert (o / "edits.txt").read_text().strip()
    assert run("featurize", "--nbest", d / "train.nbest", "--gold", d / "train.m2", "--lm", o / "lm.txt",
               "--out", o / "train.examples", "--dictionary-out", o / "features.dict", "--jobs", 2) == 0
    assert run("train-classifier", "--examples", o / "train.examples", "--dictionary", o / "features.dict",
               "--out", o / "cw.model") == 0
    scoring = ["--model", o / "cw.model", "--dictionary", o / "features.dict", "--lm", o / "lm.txt"]
    assert run("tune-threshold", *scoring, "--nbest", d / "dev.nbest", "--gold", d / "dev.m2",
               "--out", o / "tuned.model") == 0
    assert capsys.readouterr().out.startswith("tau ")
    assert run("tune-weights", *scoring, "--nbest", d / "dev.nbest", "--gold", d / "dev.m2",
               "--out", o / "weights.txt") == 0
    assert "edit_classifier_avg=" in (o / "weights.txt").read_text()
    assert run("rerank", *scoring, "--nbest", d / "test.nbest", "--source", d / "test.m2",
               "--weights", o / "weights.txt", "--out", o / "rerank.txt") == 0
    tuned = ["--model", o / "tuned.model", "--dictionary", o / "features.dict", "--lm", o / "lm.txt"]
    assert run("select", *tuned, "--nbest", d / "test.nbest", "--source", d / "test.m2", "--n", 5,
               "--out", o / "select.txt") == 0
    capsys.readouterr()
    assert run("evaluate", "--hyp", o / "select.txt", "--gold", d / "test.m2", "--tsv", o / "eval.tsv") == 0
    report = capsys.readouterr().out
    assert report.splitlines()[2].startswith("F0.5 ")
    assert len((o / "eval.tsv").read_text().split("\t")) == 6


def test_evaluate_reference(small, tmp_path, capsys):
    gold = parse_annotated((small / "test.m2").read_text())
    (tmp_path / "ref.txt").write_text(serialize_sentences([apply_edits(g.source, g.gold(0)) for g in gold]))
    assert run("evaluate", "--hyp", tmp_path / "ref.txt", "--gold", small / "test.m2") == 0
    out = capsys.readouterr().out
    assert "F0.5 1.0000" in out


def test_evaluate_length_mismatch(small, tmp_path, capsys):
    (tmp_path / "short.txt").write_text("a b .\n")
    assert run("evaluate", "--hyp", tmp_path / "short.txt", "--gold", small / "test.m2") == 1
    assert "error" in capsys.readouterr().err


def test_significance_marks_winner(small, tmp_path, capsys):
    gold = parse_annotated((small / "test.m2").read_text())
    (tmp_path / "ref.txt").write_text(serialize_sentences([apply_edits(g.source, g.gold(0)) for g in gold]))
    (tmp_path / "src.txt").write_text(serialize_sentences([g.source for g in gold]))
    assert run("significance", "--a", tmp_path / "ref.txt", "--b", tmp_path / "src.txt", "--gold",
               small / "test.m2", "--samples", 100, "--seed", 1) == 0
    out = capsys.readouterr().out
    assert out.startswith("p 0.0099 *")
    assert run("significance", "--a", tmp_path / "src.txt", "--b", tmp_path / "src.txt", "--gold",
               small / "test.m2") == 0
    assert capsys.readouterr().out.startswith("p 1.0000\n")


def test_missing_input_leaves_nothing(small, tmp_path, capsys):
    out_dir = tmp_path / "out"
    cfg = tmp_path / "broken.cfg"
    names = ("dev", "test", "train_nbest", "dev_nbest", "test_nbest", "lm_corpus")
    files = ("dev.m2", "test.m2", "train.nbest", "dev.nbest", "test.nbest", "lm_corpus.txt")
    lines = [f"{k} = {small / f}" for k, f in zip(names, files)]
    lines += [f"train = {tmp_path / 'nope.m2'}", f"output = {out_dir}"]
    cfg.write_text("\n".join(lines) + "\n")
    assert run("pipeline", "--config", cfg) == 1
    assert "nope.m2" in capsys.readouterr().err
    assert not out_dir.exists()
    assert run("train-lm", "--corpus", tmp_path / "missing.txt", "--out", tmp_path / "lm.txt") == 1
    assert list(tmp_path.iterdir()) == [cfg]


def test_failure_midway_writes_no_outputs(small, tmp_path, capsys):
    """A bad stage after several good ones must not leave earlier artifacts."""
    cfg = tmp_path / "late.cfg"
    text = (small / "demo.cfg").read_text().replace("output = out", f"output = {tmp_path / 'out'}")
    cfg.write_text(text.replace("test_nbest = test.nbest", "test_nbest = dev.nbest"))
    assert run("pipeline", "--config", cfg) == 1
    assert not (tmp_path / "out").exists()


def test_config_from_environment(small, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NBESTGEC_CONFIG", str(small / "demo.cfg"))
    assert run("pipeline", "--output", tmp_path / "env") == 0
    report = (tmp_path / "env" / "report.txt").read_text()
    assert len(report.splitlines()) == 10
    assert capsys.readouterr().out == report


def test_demo_report_golden(tmp_path, capsys):
    assert run("pipeline", "--config", DEMO / "demo.cfg", "--output", tmp_path / "demo") == 0
    assert (tmp_path / "demo" / "report.txt").read_text() == (GOLDEN / "demo_report.txt").read_text()
    assert (tmp_path / "demo" / "report.tsv").read_text() == (GOLDEN / "demo_report.tsv").read_text()


def test_synth_matches_shipped_demo(tmp_path):
    assert run("synth", "--out-dir", tmp_path) == 0
    for name in ("train.m2", "dev.m2", "test.m2", "train.nbest", "dev.nbest", "test.nbest", "lm_corpus.txt", "demo.cfg"):
        assert (tmp_path / name).read_bytes() == (DEMO / name).read_bytes(), name


def test_help_and_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nbestgec", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for name in ("train-lm", "featurize", "tune-weights", "select", "significance", "ablate", "pipeline"):
        assert name in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "nbestgec", "rerank"], capture_output=True, text=True)
    assert proc.returncode != 0
