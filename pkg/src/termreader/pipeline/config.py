"""Flat key = value run configuration.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Unknown keys and unparseable values are errors, not warnings: a typo in
a config should never silently train a different model.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass

from ..retrieval.queries import STRATEGIES


@dataclass
class Config:
    # resource paths
    corpus: str = ""
    embeddings: str = ""
    relations: str = ""
    dataset: str = ""
    annotations: str = ""        # annotated questions for selector training
    index_path: str = ""
    cache_path: str = ""
    checkpoint_dir: str = "checkpoints"
    run_dir: str = "runs"
    # representation sizes
    emb_dim: int = 300
    pos_dim: int = 16
    ner_dim: int = 16
    rel_dim: int = 10
    hidden: int = 96             # per direction; BiLSTM states are 2x
    # optimization
    lr: float = 0.02
    batch_size: int = 32
    epochs: int = 100
    dropout: float = 0.4
    seed: int = 0
    train_word_embeddings: bool = False
    # retrieval
    k: int = 10
    strategy: str = "ESSENTIAL"
    # sequence limits
    max_question_len: int = 128
    max_passage_len: int = 400
    # data handling
    annotation_threshold: float = 0.5
    split_train: float = 0.8
    split_dev: float = 0.1
    split_test: float = 0.1
    # reader structure switches
    use_passage_question_attention: bool = True
    use_question_choice_attention: bool = True
    use_passage_choice_attention: bool = True
    use_choice_interaction: bool = True

    def validate(self):
        for name in ("emb_dim", "pos_dim", "ner_dim", "rel_dim", "hidden",
                     "batch_size", "epochs", "k", "max_question_len",
                     "max_passage_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"config: {name} must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("config: dropout must lie in [0, 1)")
        if self.lr <= 0:
            raise ValueError("config: lr must be positive")
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"config: strategy '{self.strategy}' not one of {STRATEGIES}")
        if abs(self.split_train + self.split_dev + self.split_test - 1.0) > 1e-9:
            raise ValueError("config: split ratios must sum to 1")
        if not 0.0 < self.annotation_threshold <= 1.0:
            raise ValueError("config: annotation_threshold must be in (0, 1]")
        return self

    @property
    def split_ratios(self):
        return (self.split_train, self.split_dev, self.split_test)

    @classmethod
    def load(cls, path):
        fields = {f.name: f for f in dataclasses.fields(cls)}
        values = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ValueError(
                        f"{path}: line {lineno}: expected 'key = value'")
                key, raw = (part.strip() for part in text.split("=", 1))
                if key not in fields:
                    raise ValueError(f"{path}: line {lineno}: unknown key '{key}'")
                values[key] = _coerce(fields[key].type, key, raw,
                                      f"{path}: line {lineno}")
        return cls(**values).validate()

    def with_overrides(self, **overrides):
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes).validate()

    def to_dict(self):
        return dataclasses.asdict(self)

    def hash(self):
        text = "\n".join(f"{k}={self.to_dict()[k]}" for k in sorted(self.to_dict()))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def _coerce(type_name, key, raw, where):
    try:
        if type_name == "int":
            return int(raw)
        if type_name == "float":
            return float(raw)
        if type_name == "bool":
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: '{raw}'")
        return raw
    except ValueError as exc:
        raise ValueError(f"{where}: bad value for '{key}': {exc}") from exc
