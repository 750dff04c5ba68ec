"""Shared fixtures: a small science-flavoured world (corpus, embeddings,
relations, questions) plus generators for the synthetic datasets the
training tests use."""

from __future__ import annotations

import json

import numpy as np
import pytest

EMB_DIM = 10

CORPUS_SENTENCES = [
    "Magnets attract iron and steel objects.",
    "A compass needle points north because it is a small magnet.",
    "Iron filings line up along magnetic field lines.",
    "Copper and aluminum are not attracted by magnets.",
    "Plants use sunlight to make food by photosynthesis.",
    "The moon orbits the earth about once a month.",
    "Water boils at one hundred degrees celsius at sea level.",
    "Sound travels faster in water than in air.",
    "A lever is a simple machine that moves loads with less force.",
    "Friction slows moving objects and produces heat.",
]

RELATION_ROWS = [
    ("magnet", "iron", "attracts"),
    ("magnet", "steel", "attracts"),
    ("compass", "north", "points"),
    ("plant", "sunlight", "uses"),
    ("lever", "force", "reduces"),
    ("friction", "heat", "produces"),
]

# Ten labelled questions grounded in the corpus, each with annotator
# counts over its exact token sequence (5 annotators).
QUESTIONS = [
    {"id": "q01", "question": "What do magnets attract ?",
     "choices": ["iron and steel", "copper wires", "plastic cups", "dry leaves"],
     "label": 0,
     "tokens": ["What", "do", "magnets", "attract", "?"],
     "counts": [0, 0, 5, 4, 0]},
    {"id": "q02", "question": "Why does a compass needle point north ?",
     "choices": ["it is a small magnet", "wind pushes it", "it is heavy"],
     "label": 0,
     "tokens": ["Why", "does", "a", "compass", "needle", "point", "north", "?"],
     "counts": [0, 0, 0, 5, 4, 3, 5, 0]},
    {"id": "q03", "question": "What do plants need to make food ?",
     "choices": ["sunlight", "sand", "smoke", "gravel"],
     "label": 0,
     "tokens": ["What", "do", "plants", "need", "to", "make", "food", "?"],
     "counts": [0, 0, 5, 2, 0, 3, 5, 0]},
    {"id": "q04", "question": "What orbits the earth about once a month ?",
     "choices": ["the moon", "the sun", "a comet"],
     "label": 0,
     "tokens": ["What", "orbits", "the", "earth", "about", "once", "a",
                "month", "?"],
     "counts": [0, 5, 0, 5, 0, 2, 0, 4, 0]},
    {"id": "q05", "question": "At what temperature does water boil at sea level ?",
     "choices": ["one hundred degrees celsius", "ten degrees", "fifty degrees"],
     "label": 0,
     "tokens": ["At", "what", "temperature", "does", "water", "boil", "at",
                "sea", "level", "?"],
     "counts": [0, 0, 4, 0, 5, 5, 0, 3, 3, 0]},
    {"id": "q06", "question": "Where does sound travel faster than in air ?",
     "choices": ["in water", "in space", "nowhere"],
     "label": 0,
     "tokens": ["Where", "does", "sound", "travel", "faster", "than", "in",
                "air", "?"],
     "counts": [0, 0, 5, 4, 4, 0, 0, 3, 0]},
    {"id": "q07", "question": "What kind of machine is a lever ?",
     "choices": ["a simple machine", "an engine", "a pump", "a battery"],
     "label": 0,
     "tokens": ["What", "kind", "of", "machine", "is", "a", "lever", "?"],
     "counts": [0, 1, 0, 4, 0, 0, 5, 0]},
    {"id": "q08", "question": "What does friction produce ?",
     "choices": ["heat", "light", "sound waves"],
     "label": 0,
     "tokens": ["What", "does", "friction", "produce", "?"],
     "counts": [0, 0, 5, 4, 0]},
    {"id": "q09", "question": "Which metals are not attracted by magnets ?",
     "choices": ["copper and aluminum", "iron and steel", "nickel bars"],
     "label": 0,
     "tokens": ["Which", "metals", "are", "not", "attracted", "by",
                "magnets", "?"],
     "counts": [0, 3, 0, 4, 5, 0, 5, 0]},
    {"id": "q10", "question": "What lines up along magnetic field lines ?",
     "choices": ["iron filings", "wood shavings", "glass beads"],
     "label": 0,
     "tokens": ["What", "lines", "up", "along", "magnetic", "field",
                "lines", "?"],
     "counts": [0, 2, 0, 0, 5, 4, 2, 0]},
]


def _world_tokens():
    words = set()
    for s in CORPUS_SENTENCES:
        for w in s.replace(".", " ").replace(",", " ").split():
            words.add(w.lower())
    for q in QUESTIONS:
        for w in q["tokens"]:
            words.add(w.lower())
        for c in q["choices"]:
            for w in c.split():
                words.add(w.lower())
    # leave a couple of corpus words out of the table to exercise the
    # deterministic out-of-vocabulary path
    words -= {"photosynthesis", "aluminum"}
    return sorted(words)


def write_embeddings(path, words=None, dim=EMB_DIM, seed=7):
    rng = np.random.default_rng(seed)
    words = list(words) if words is not None else _world_tokens()
    with open(path, "w", encoding="utf-8") as fh:
        for word in words:
            vec = rng.uniform(-0.5, 0.5, size=dim)
            fh.write(word + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")
    return path


def write_corpus(path, sentences=CORPUS_SENTENCES):
    path.write_text("\n".join(sentences) + "\n", encoding="utf-8")
    return path


def write_relations(path, rows=RELATION_ROWS):
    path.write_text("".join(f"{head}\t{rel}\t{tail}\n"
                            for head, tail, rel in rows), encoding="utf-8")
    return path


def write_questions(path, questions=QUESTIONS, with_annotations=True,
                    with_labels=True):
    with open(path, "w", encoding="utf-8") as fh:
        for q in questions:
            row = {"id": q["id"], "question": q["question"],
                   "choices": q["choices"]}
            if with_labels and q.get("label") is not None:
                row["label"] = q["label"]
            if with_annotations and "tokens" in q:
                row["annotations"] = {"tokens": q["tokens"],
                                      "counts": q["counts"],
                                      "num_annotators": 5}
            fh.write(json.dumps(row) + "\n")
    return path


def write_flat_annotations(path, questions=QUESTIONS):
    """The flat pre-tokenized format used for selector training files."""
    with open(path, "w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(json.dumps({"question": q["question"],
                                 "choices": q["choices"],
                                 "tokens": q["tokens"],
                                 "counts": q["counts"],
                                 "num_annotators": 5}) + "\n")
    return path


def write_config(path, **values):
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()),
                    encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def world(tmp_path_factory):
    """Session-wide data files: corpus, embeddings, relations, questions."""
    root = tmp_path_factory.mktemp("world")
    return {
        "root": root,
        "corpus": write_corpus(root / "corpus.txt"),
        "embeddings": write_embeddings(root / "embeddings.txt"),
        "relations": write_relations(root / "relations.tsv"),
        "questions": write_questions(root / "questions.jsonl"),
        "annotations": write_flat_annotations(root / "annotated.jsonl"),
    }


@pytest.fixture
def small_config(world, tmp_path):
    """A config pointed at the session world, scratch dirs per test."""
    from termreader.pipeline import Config

    path = write_config(
        tmp_path / "run.cfg",
        corpus=world["corpus"], embeddings=world["embeddings"],
        relations=world["relations"], dataset=world["questions"],
        annotations=world["annotations"],
        checkpoint_dir=tmp_path / "ckpt", run_dir=tmp_path / "runs",
        emb_dim=EMB_DIM, pos_dim=4, ner_dim=3, rel_dim=3, hidden=8,
        epochs=2, batch_size=4, k=3,
        split_train=0.6, split_dev=0.2, split_test=0.2,
        max_question_len=32, max_passage_len=60, seed=3)
    return Config.load(path)


# -- synthetic worlds for the training criteria ------------------------------

_POOL = ["amber", "basalt", "cedar", "dune", "ember", "fjord", "gale",
         "heron", "inlet", "jade", "krill", "lichen", "mesa", "nectar",
         "onyx", "pumice", "quartz", "reef", "slate", "tundra", "umber",
         "vale", "willow", "xenon", "yarrow", "zephyr"]


def synthetic_selector_rows(n, seed=11):
    """Flat annotated questions where a token is essential exactly when
    it also appears in one of the choices."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        q_len = int(rng.integers(5, 9))
        q_tokens = [str(w) for w in rng.choice(_POOL, size=q_len,
                                               replace=False)]
        n_choices = int(rng.integers(2, 5))
        choices = []
        for _ in range(n_choices):
            words = []
            if rng.random() < 0.8:
                words.append(q_tokens[int(rng.integers(0, q_len))])
            extra = str(rng.choice(_POOL))
            if extra not in words:
                words.append(extra)
            rng.shuffle(words)
            choices.append(" ".join(words))
        choice_words = {w for c in choices for w in c.split()}
        counts = [5 if t in choice_words else 0 for t in q_tokens]
        rows.append({"question": " ".join(q_tokens) + " ?",
                     "choices": choices,
                     "tokens": q_tokens + ["?"],
                     "counts": counts + [0],
                     "num_annotators": 5})
    return rows


def write_synthetic_selector(path, n, seed=11):
    with open(path, "w", encoding="utf-8") as fh:
        for row in synthetic_selector_rows(n, seed):
            fh.write(json.dumps(row) + "\n")
    return path


def planted_reader_world(n=50, seed=5):
    """Questions whose evidence is planted in a synthetic corpus.

    Question i asks about a unique cue word; the corpus sentence for i
    links the cue to the correct choice's word, so retrieval with the
    cue plus reading the match signal solves it.
    """
    rng = np.random.default_rng(seed)
    sentences, questions = [], []
    for i in range(n):
        cue, good, bad = f"cue{i:02d}", f"good{i:02d}", f"bad{i:02d}"
        sentences.append(f"{cue} goes together with {good} every time.")
        label = int(rng.integers(0, 2))
        choices = [good, bad] if label == 0 else [bad, good]
        tokens = ["which", "item", "matches", cue, "?"]
        questions.append({"id": f"p{i:02d}",
                          "question": " ".join(tokens),
                          "choices": choices, "label": label,
                          "tokens": tokens, "counts": [0, 0, 0, 5, 0]})
    return sentences, questions


def write_planted_world(root, n=50, seed=5):
    sentences, questions = planted_reader_world(n, seed)
    corpus = write_corpus(root / "planted_corpus.txt", sentences)
    dataset = write_questions(root / "planted_questions.jsonl", questions)
    emb = write_embeddings(root / "planted_embeddings.txt",
                           words=["which", "item", "matches", "goes",
                                  "together", "with", "every", "time"])
    return corpus, dataset, emb
