"""Exercises every CLI command through main(argv) and checks both the
stdout JSON contract and the files dropped into the run directory."""

import json
from pathlib import Path

import pytest

from termreader.cli import main

from conftest import EMB_DIM, write_config


@pytest.fixture(scope="module")
def cli_world(world, tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = write_config(
        root / "run.cfg",
        corpus=world["corpus"], embeddings=world["embeddings"],
        relations=world["relations"], dataset=world["questions"],
        annotations=world["annotations"],
        index_path=root / "corpus.idx", cache_path=root / "cache.jsonl",
        checkpoint_dir=root / "ckpt", run_dir=root / "runs",
        emb_dim=EMB_DIM, pos_dim=4, ner_dim=3, rel_dim=3, hidden=8,
        epochs=2, batch_size=4, k=3,
        split_train=0.6, split_dev=0.2, split_test=0.2,
        max_question_len=32, max_passage_len=60, seed=3)
    return {"root": root, "config": str(cfg)}


def _run(capsys, *argv):
    assert main(list(argv)) == 0
    return capsys.readouterr().out


def _run_json(capsys, *argv):
    return json.loads(_run(capsys, *argv))


def test_index_build_and_inspect(cli_world, capsys):
    out = _run_json(capsys, "index", "build", "--config", cli_world["config"])
    assert out["sentences"] == 10
    assert out["terms"] > 20
    assert Path(out["path"]).exists()

    info = _run_json(capsys, "index", "inspect", "--config",
                     cli_world["config"], "--term", "magnets",
                     "--term", "zebra")
    assert info["sentences"] == 10
    assert info["term"]["magnets"]["df"] == 2
    assert info["term"]["magnets"]["idf"] > 0
    assert len(info["term"]["magnets"]["postings"]) == 2
    assert info["term"]["zebra"]["df"] == 0


def test_cache_build(cli_world, capsys):
    out = _run_json(capsys, "cache", "build", "--config", cli_world["config"])
    assert out["questions"] == 10
    assert out["entries"] > 0
    assert out["strategy"] == "ESSENTIAL"
    assert Path(out["path"]).exists()


def test_selector_train_eval_predict(cli_world, capsys):
    out = _run_json(capsys, "selector", "train", "--config",
                    cli_world["config"])
    assert out["kind"] == "selector-train"
    assert "wall_clock_sec" in out
    assert set(out["metrics"]) == {"precision", "recall", "f1"}
    ckpt = str(Path(cli_world["root"]) / "ckpt" / "selector.ckpt")
    assert Path(ckpt).exists()

    run_dirs = list((Path(cli_world["root"]) / "runs").glob("selector-train-*"))
    assert len(run_dirs) == 1
    names = {p.name for p in run_dirs[0].iterdir()}
    assert {"metrics.json", "timing.txt", "history.tsv",
            "training_curve.png", "metrics.png"} <= names
    saved = json.loads((run_dirs[0] / "metrics.json").read_text())
    assert "wall_clock_sec" not in saved
    assert saved["metrics"] == out["metrics"]
    history = (run_dirs[0] / "history.tsv").read_text().splitlines()
    assert history[0].split("\t") == ["epoch", "train_loss", "dev_f1"]
    assert len(history) == 3

    out = _run_json(capsys, "selector", "eval", "--config",
                    cli_world["config"], "--checkpoint", ckpt,
                    "--split", "dev")
    assert out["kind"] == "selector-eval"
    assert out["split"] == "dev"

    text = _run(capsys, "selector", "predict", "--config",
                cli_world["config"], "--checkpoint", ckpt)
    rows = [json.loads(line) for line in text.splitlines()]
    assert len(rows) == 10
    assert all(set(r) == {"question_id", "tokens", "probabilities", "mask"}
               for r in rows)

    out_path = Path(cli_world["root"]) / "masks.jsonl"
    _run(capsys, "selector", "predict", "--config", cli_world["config"],
         "--checkpoint", ckpt, "--output", str(out_path))
    assert len(out_path.read_text().splitlines()) == 10


def test_reader_train_eval_pipeline(cli_world, capsys):
    out = _run_json(capsys, "reader", "train", "--config",
                    cli_world["config"])
    assert out["kind"] == "reader-train"
    assert 0.0 <= out["metrics"]["accuracy"] <= 1.0
    ckpt = str(Path(cli_world["root"]) / "ckpt" / "reader.ckpt")
    assert Path(ckpt).exists()

    run_dirs = list((Path(cli_world["root"]) / "runs").glob("reader-train-*"))
    assert len(run_dirs) == 1
    names = {p.name for p in run_dirs[0].iterdir()}
    assert {"metrics.json", "timing.txt", "predictions.tsv", "history.tsv",
            "training_curve.png", "metrics.png"} <= names
    preds = (run_dirs[0] / "predictions.tsv").read_text().splitlines()
    assert preds[0].split("\t") == ["id", "label", "predicted", "correct",
                                    "scores"]
    assert len(preds) == 3  # header plus the two test questions

    out = _run_json(capsys, "reader", "eval", "--config",
                    cli_world["config"], "--checkpoint", ckpt)
    assert out["kind"] == "reader-eval"
    assert out["split"] == "test"

    out = _run_json(capsys, "reader", "eval", "--config", cli_world["config"],
                    "--checkpoint", ckpt, "--grid", "--split", "dev")
    assert out["kind"] == "reader-grid"
    assert len(out["rows"]) == 9
    assert out["best"]["accuracy"] == max(r["accuracy"] for r in out["rows"])
    grid_dir = Path(out["run_dir"])
    names = {p.name for p in grid_dir.iterdir()}
    assert {"grid.tsv", "grid.png"} <= names
    assert len([n for n in names if n.startswith("metrics-")]) == 9
    grid_rows = (grid_dir / "grid.tsv").read_text().splitlines()
    assert grid_rows[0].split("\t") == ["strategy", "k", "split", "accuracy"]
    assert len(grid_rows) == 10

    out = _run_json(capsys, "pipeline", "run", "--config",
                    cli_world["config"], "--checkpoint", ckpt,
                    "--trace-limit", "1")
    assert out["kind"] == "pipeline-run"
    assert out["metrics"]["n_questions"] == 2
    run_dir = next((Path(cli_world["root"]) / "runs").glob("pipeline-test-*"))
    traces = [json.loads(line) for line in
              (run_dir / "trace.jsonl").read_text().splitlines()]
    assert len(traces) == 1
    assert {"question_id", "essential_terms", "choices",
            "scores"} <= set(traces[0])

    out = _run_json(capsys, "pipeline", "trace", "--config",
                    cli_world["config"], "--checkpoint", ckpt,
                    "--question", "q01")
    assert out["question_id"] == "q01"
    assert out["essential_terms"] == ["magnets", "attract"]

    with pytest.raises(SystemExit, match="no question with id"):
        main(["pipeline", "trace", "--config", cli_world["config"],
              "--checkpoint", ckpt, "--question", "zzz"])


def test_overrides_reach_the_report(cli_world, capsys):
    ckpt = str(Path(cli_world["root"]) / "ckpt" / "reader.ckpt")
    out = _run_json(capsys, "reader", "eval", "--config", cli_world["config"],
                    "--checkpoint", ckpt, "--k", "2",
                    "--strategy", "CONCAT")
    assert out["extra"]["k"] == 2
    assert out["extra"]["strategy"] == "CONCAT"


def test_bad_strategy_flag_rejected(cli_world, capsys):
    with pytest.raises(SystemExit):
        main(["reader", "eval", "--config", cli_world["config"],
              "--checkpoint", "x", "--strategy", "RANDOM"])
    assert "invalid choice" in capsys.readouterr().err


def test_missing_index_path_message(world, tmp_path, capsys):
    cfg = write_config(tmp_path / "run.cfg", corpus=world["corpus"],
                       embeddings=world["embeddings"], emb_dim=EMB_DIM)
    with pytest.raises(SystemExit, match="set index_path"):
        main(["index", "build", "--config", str(cfg)])
