"""Materialized retrieval results keyed by question, choice, strategy, k.

Stored as JSON lines so partial caches are inspectable and appendable:

    {"question_id": ..., "choice_index": ..., "strategy": ...,
     "k": ..., "sentence_ids": [...], "scores": [...]}

Scores round-trip exactly: JSON serializes the shortest decimal that
parses back to the same double.
"""

from __future__ import annotations

import json


class RetrievalCache:
    def __init__(self):
        self._entries = {}

    @staticmethod
    def key(question_id, choice_index, strategy, k):
        return (str(question_id), int(choice_index), str(strategy), int(k))

    def get(self, question_id, choice_index, strategy, k):
        return self._entries.get(self.key(question_id, choice_index, strategy, k))

    def put(self, question_id, choice_index, strategy, k, sentence_ids, scores):
        self._entries[self.key(question_id, choice_index, strategy, k)] = (
            [int(s) for s in sentence_ids], [float(s) for s in scores])

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def save(self, path):
        """Entries are written key-sorted, so equal contents mean equal
        bytes regardless of insertion order."""
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(self._entries):
                qid, choice_index, strategy, k = key
                ids, scores = self._entries[key]
                fh.write(json.dumps({
                    "question_id": qid,
                    "choice_index": choice_index,
                    "strategy": strategy,
                    "k": k,
                    "sentence_ids": ids,
                    "scores": scores,
                }, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path):
        cache = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                    cache.put(row["question_id"], row["choice_index"],
                              row["strategy"], row["k"],
                              row["sentence_ids"], row["scores"])
                except (KeyError, ValueError) as exc:
                    raise ValueError(f"{path}: line {lineno}: {exc}") from exc
        return cache
