"""End-to-end tests for training, evaluation, and tracing on the small
world fixture.  Both models train once per module; the tests then poke
at the artifacts from every angle."""

from pathlib import Path
from types import SimpleNamespace

import pytest

from termreader.retrieval import RetrievalCache
from termreader.pipeline import (
    CheckpointError,
    Config,
    DatasetError,
    evaluate_accuracy,
    evaluate_grid,
    evaluate_selector,
    load_dataset,
    load_reader_context,
    pick_split,
    reader_from_checkpoint,
    run_pipeline,
    selector_from_checkpoint,
    selector_predictions,
    trace_question,
    train_reader,
    train_selector,
)

from conftest import EMB_DIM, QUESTIONS, write_questions


@pytest.fixture(scope="module")
def pipe(world, tmp_path_factory):
    root = tmp_path_factory.mktemp("pipe")
    config = Config(
        corpus=str(world["corpus"]), embeddings=str(world["embeddings"]),
        relations=str(world["relations"]), dataset=str(world["questions"]),
        annotations=str(world["annotations"]),
        checkpoint_dir=str(root / "ckpt"), run_dir=str(root / "runs"),
        cache_path=str(root / "cache.jsonl"),
        emb_dim=EMB_DIM, pos_dim=4, ner_dim=3, rel_dim=3, hidden=8,
        epochs=2, batch_size=4, k=3,
        split_train=0.6, split_dev=0.2, split_test=0.2,
        max_question_len=32, max_passage_len=60, seed=3).validate()
    sel = train_selector(config)
    rdr = train_reader(config)
    return SimpleNamespace(config=config, sel=sel, rdr=rdr, root=root)


def test_selector_training_artifacts(pipe):
    assert Path(pipe.sel.checkpoint_path).exists()
    assert len(pipe.sel.history) == 2
    assert set(pipe.sel.history[0]) == {"epoch", "train_loss", "dev_f1"}
    report = pipe.sel.report
    assert report.kind == "selector-train"
    assert report.split == "test"
    assert set(report.metrics) == {"precision", "recall", "f1"}
    assert all(0.0 <= v <= 1.0 for v in report.metrics.values())
    assert report.extra["n_train"] == 6
    assert report.extra["n_dev"] == 2
    assert report.extra["n_test"] == 2


def test_selector_loss_decreases(pipe):
    losses = [row["train_loss"] for row in pipe.sel.history]
    assert losses[-1] < losses[0]


def test_selector_checkpoint_reproduces_metrics(pipe):
    report = evaluate_selector(pipe.config, pipe.sel.checkpoint_path,
                               split="test")
    assert report.kind == "selector-eval"
    assert report.metrics == pipe.sel.report.metrics


def test_selector_predictions_rows(pipe, world):
    rows = selector_predictions(pipe.config, pipe.sel.checkpoint_path,
                                input_path=str(world["questions"]))
    assert [r["question_id"] for r in rows] == [q["id"] for q in QUESTIONS]
    for row in rows:
        n = len(row["tokens"])
        assert len(row["probabilities"]) == n and len(row["mask"]) == n
        assert all(0.0 <= p <= 1.0 for p in row["probabilities"])
        assert set(row["mask"]) <= {0, 1}
        # punctuation can never be selected
        if row["tokens"][-1] == "?":
            assert row["mask"][-1] == 0


def test_reader_training_artifacts(pipe):
    assert Path(pipe.rdr.checkpoint_path).exists()
    assert len(pipe.rdr.history) == 2
    assert set(pipe.rdr.history[0]) == {"epoch", "train_loss",
                                        "train_accuracy", "dev_accuracy"}
    report = pipe.rdr.report
    assert report.kind == "reader-train"
    assert report.split == "test"
    assert 0.0 <= report.metrics["accuracy"] <= 1.0
    assert len(report.predictions) == 2
    for row in report.predictions:
        assert set(row) == {"id", "label", "predicted", "correct", "scores"}
        assert len(row["scores"].split(";")) >= 2


def test_reader_checkpoint_reproduces_metrics(pipe):
    report = evaluate_accuracy(pipe.config, pipe.rdr.checkpoint_path,
                               split="test")
    assert report.kind == "reader-eval"
    assert report.metrics["accuracy"] == pipe.rdr.report.metrics["accuracy"]
    assert report.predictions == pipe.rdr.report.predictions


def test_checkpoint_kind_guard(pipe):
    with pytest.raises(CheckpointError, match="not a selector checkpoint"):
        selector_from_checkpoint(pipe.rdr.checkpoint_path, pipe.config)
    with pytest.raises(CheckpointError, match="not a reader checkpoint"):
        reader_from_checkpoint(pipe.sel.checkpoint_path, pipe.config)


def test_retrieval_cache_written_and_reused(pipe):
    cache = RetrievalCache.load(pipe.config.cache_path)
    assert len(cache) > 0
    first = evaluate_accuracy(pipe.config, pipe.rdr.checkpoint_path,
                              split="test")
    second = evaluate_accuracy(pipe.config, pipe.rdr.checkpoint_path,
                               split="test")
    assert first.metrics == second.metrics
    assert first.predictions == second.predictions


def test_grid_covers_every_cell(pipe):
    rows, reports = evaluate_grid(pipe.config, pipe.rdr.checkpoint_path,
                                  split="test", depths=(2, 3))
    assert len(rows) == 3 * 2
    assert {r["strategy"] for r in rows} == {"ESSENTIAL", "CONCAT", "TFIDF30"}
    assert {r["k"] for r in rows} == {2, 3}
    assert all(0.0 <= r["accuracy"] <= 1.0 for r in rows)
    assert len(reports) == len(rows)
    assert all(rep.kind == "reader-grid" for rep in reports)
    for row, rep in zip(rows, reports):
        assert rep.extra["strategy"] == row["strategy"]
        assert rep.extra["k"] == row["k"]
        assert rep.metrics["accuracy"] == row["accuracy"]


def test_run_pipeline_report_and_traces(pipe):
    report, traces = run_pipeline(pipe.config, pipe.rdr.checkpoint_path,
                                  split="test", trace_limit=1)
    assert report.kind == "pipeline-run"
    assert report.metrics["n_questions"] == 2
    assert "accuracy" in report.metrics
    assert report.extra["n_labelled"] == 2
    assert len(report.predictions) == 2
    assert len(traces) == 1


def test_trace_explains_one_question(pipe):
    ctx = load_reader_context(pipe.config, pipe.rdr.checkpoint_path)
    q01 = next(ex for ex in load_dataset(pipe.config.dataset)
               if ex.id == "q01")
    trace = trace_question(ctx, pipe.config, q01)
    assert trace["question_id"] == "q01"
    assert trace["strategy"] == "ESSENTIAL"
    assert trace["k"] == 3
    # annotator majority marks exactly these two terms
    assert trace["essential_terms"] == ["magnets", "attract"]
    assert trace["essential_mask"] == [0, 0, 1, 1, 0]
    assert len(trace["choices"]) == 4
    assert len(trace["scores"]) == 4
    assert trace["label"] == 0
    assert trace["predicted"] in range(4)
    for choice in trace["choices"]:
        assert choice["query_terms"]
        assert choice["fallback"] is False
        assert 1 <= len(choice["sentences"]) <= 3
        for sentence in choice["sentences"]:
            assert set(sentence) == {"sentence_id", "line", "score", "text"}
    # the magnet sentence is in the evidence for the gold choice
    texts = " ".join(s["text"] for s in trace["choices"][0]["sentences"])
    assert "Magnets attract iron" in texts


def test_reader_trains_from_selector_masks(pipe, tmp_path):
    config = pipe.config.with_overrides(checkpoint_dir=str(tmp_path / "ckpt"),
                                        cache_path="", epochs=1)
    result = train_reader(config, selector_checkpoint=pipe.sel.checkpoint_path)
    assert Path(result.checkpoint_path).exists()
    assert result.report.kind == "reader-train"


def test_training_is_bit_reproducible(pipe):
    again = train_selector(pipe.config)
    first = Path(pipe.sel.checkpoint_path).read_bytes()
    second = Path(again.checkpoint_path).read_bytes()
    assert first == second
    assert again.report.metrics == pipe.sel.report.metrics
    assert again.history == pipe.sel.history


def test_pick_split_names(pipe):
    examples = load_dataset(pipe.config.dataset)
    assert len(pick_split(examples, pipe.config, "all")) == 10
    assert len(pick_split(examples, pipe.config, "train")) == 6
    assert len(pick_split(examples, pipe.config, "dev")) == 2
    assert len(pick_split(examples, pipe.config, "test")) == 2
    with pytest.raises(DatasetError, match="unknown split"):
        pick_split(examples, pipe.config, "validation")


def test_reader_training_requires_labels(pipe, tmp_path):
    bare = write_questions(tmp_path / "unlabelled.jsonl", QUESTIONS,
                           with_labels=False)
    config = pipe.config.with_overrides(dataset=str(bare), cache_path="",
                                        checkpoint_dir=str(tmp_path / "c"))
    with pytest.raises(DatasetError, match="no gold label"):
        train_reader(config)
