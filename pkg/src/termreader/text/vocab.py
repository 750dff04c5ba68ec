"""Token id assignment over lowercased forms."""

from __future__ import annotations

from collections import Counter


class Vocab:
    PAD = 0
    UNK = 1
    PAD_TOKEN = "<pad>"
    UNK_TOKEN = "<unk>"

    def __init__(self, tokens):
        """``tokens`` is the full id-ordered list, reserved entries first."""
        if tokens[:2] != [self.PAD_TOKEN, self.UNK_TOKEN]:
            raise ValueError("vocab must start with the reserved pad/unk entries")
        self._tokens = list(tokens)
        self._ids = {t: i for i, t in enumerate(self._tokens)}
        if len(self._ids) != len(self._tokens):
            raise ValueError("duplicate token in vocab")

    @classmethod
    def from_counts(cls, counts: Counter):
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls([cls.PAD_TOKEN, cls.UNK_TOKEN] + [t for t, _ in ranked])

    @classmethod
    def build(cls, token_iterables):
        counts = Counter()
        for seq in token_iterables:
            counts.update(seq)
        counts.pop(cls.PAD_TOKEN, None)
        counts.pop(cls.UNK_TOKEN, None)
        return cls.from_counts(counts)

    def id(self, token):
        return self._ids.get(token, self.UNK)

    def token(self, idx):
        return self._tokens[idx]

    def tokens(self):
        return list(self._tokens)

    def __contains__(self, token):
        return token in self._ids

    def __len__(self):
        return len(self._tokens)
