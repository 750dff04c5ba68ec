"""Question datasets.

The main format is JSON lines with one question per line:

    {"id": "q1", "question": "...", "choices": ["...", ...],
     "label": 0,
     "annotations": {"tokens": [...], "counts": [...],
                     "num_annotators": 5}}

``label`` and ``annotations`` are optional.  A second, flat format
carries pre-tokenized annotated questions only (no ids, no labels):

    {"question": "...", "choices": [...], "tokens": [...],
     "counts": [...], "num_annotators": 5}

Annotation counts binarize into gold masks by annotator majority:
essential when count / num_annotators clears the threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


class DatasetError(ValueError):
    pass


MIN_CHOICES = 2
MAX_CHOICES = 8


@dataclass
class Annotations:
    tokens: list
    counts: list
    num_annotators: int


@dataclass
class Example:
    id: str
    question: str
    choices: list
    label: int | None = None
    annotations: Annotations | None = None


def _parse_annotations(raw, where):
    tokens = raw.get("tokens")
    counts = raw.get("counts")
    num = raw.get("num_annotators")
    if not isinstance(tokens, list) or not isinstance(counts, list):
        raise DatasetError(f"{where}: annotations need token and count lists")
    if len(tokens) != len(counts):
        raise DatasetError(f"{where}: {len(tokens)} tokens vs {len(counts)} counts")
    if not isinstance(num, int) or num < 1:
        raise DatasetError(f"{where}: num_annotators must be a positive integer")
    if any(not isinstance(c, int) or c < 0 or c > num for c in counts):
        raise DatasetError(f"{where}: counts must lie in [0, num_annotators]")
    return Annotations(tokens=[str(t) for t in tokens], counts=list(counts),
                       num_annotators=num)


def _validate(example, where):
    if not example.question.strip():
        raise DatasetError(f"{where}: empty question")
    n = len(example.choices)
    if not MIN_CHOICES <= n <= MAX_CHOICES:
        raise DatasetError(
            f"{where}: {n} choices outside [{MIN_CHOICES}, {MAX_CHOICES}]")
    if any(not str(c).strip() for c in example.choices):
        raise DatasetError(f"{where}: empty choice text")
    if example.label is not None and not 0 <= example.label < n:
        raise DatasetError(
            f"{where}: label {example.label} out of range for {n} choices")


def load_dataset(path):
    examples = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}: line {lineno}"
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON ({exc.msg})") from exc
            if "id" not in row or "question" not in row or "choices" not in row:
                raise DatasetError(f"{where}: need id, question, and choices")
            ann = (_parse_annotations(row["annotations"], where)
                   if row.get("annotations") else None)
            label = row.get("label")
            if label is not None and not isinstance(label, int):
                raise DatasetError(f"{where}: label must be an integer")
            ex = Example(id=str(row["id"]), question=str(row["question"]),
                         choices=[str(c) for c in row["choices"]],
                         label=label, annotations=ann)
            _validate(ex, where)
            if ex.id in seen_ids:
                raise DatasetError(f"{where}: duplicate id '{ex.id}'")
            seen_ids.add(ex.id)
            examples.append(ex)
    if not examples:
        raise DatasetError(f"{path}: no examples")
    return examples


def load_annotated(path):
    """Read either format, keeping only examples with annotations."""
    with open(path, encoding="utf-8") as fh:
        first = ""
        for line in fh:
            if line.strip():
                first = line
                break
    if not first:
        raise DatasetError(f"{path}: no examples")
    if "annotations" in json.loads(first) or "id" in json.loads(first):
        examples = [ex for ex in load_dataset(path) if ex.annotations]
        if not examples:
            raise DatasetError(f"{path}: no annotated examples")
        return examples
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}: line {lineno}"
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON ({exc.msg})") from exc
            for field in ("question", "choices", "tokens", "counts",
                          "num_annotators"):
                if field not in row:
                    raise DatasetError(f"{where}: missing field '{field}'")
            ann = _parse_annotations(row, where)
            ex = Example(id=f"ann-{lineno:06d}", question=str(row["question"]),
                         choices=[str(c) for c in row["choices"]],
                         annotations=ann)
            _validate(ex, where)
            examples.append(ex)
    if not examples:
        raise DatasetError(f"{path}: no examples")
    return examples


def split_dataset(examples, ratios, seed):
    """Shuffle once with the given seed, then cut contiguously.  Sizes
    are floor(ratio * n) for every split except the last, which takes
    the remainder."""
    if len(ratios) < 2:
        raise ValueError("need at least two split ratios")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios sum to {sum(ratios)}, expected 1")
    active = sum(1 for r in ratios if r > 0)
    if len(examples) < active:
        raise ValueError(
            f"cannot split {len(examples)} examples {active} ways")
    order = np.random.default_rng(seed).permutation(len(examples))
    shuffled = [examples[i] for i in order]
    splits = []
    start = 0
    for ratio in ratios[:-1]:
        size = math.floor(ratio * len(examples))
        splits.append(shuffled[start:start + size])
        start += size
    splits.append(shuffled[start:])
    return tuple(splits)


def gold_mask(annotations, threshold=0.5):
    counts = np.asarray(annotations.counts, dtype=np.float64)
    return (counts / annotations.num_annotators >= threshold).astype(np.float64)
