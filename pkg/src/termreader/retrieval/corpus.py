"""Sentence corpus: one sentence per line of a UTF-8 text file."""

from __future__ import annotations

from dataclasses import dataclass

from ..text.tokenize import tokenize


@dataclass
class Corpus:
    raw: list            # original line text, id-ordered
    tokens: list         # lowercased token strings per sentence (punct kept)
    line_numbers: list   # 1-based source line of each stored sentence

    @classmethod
    def load(cls, path):
        """Blank lines are skipped, so sentence ids stay dense; the
        original line number of each sentence is kept for audit output."""
        raw, toks, lines = [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.rstrip("\n")
                if not text.strip():
                    continue
                raw.append(text)
                toks.append([t.lower for t in tokenize(text)])
                lines.append(lineno)
        return cls(raw=raw, tokens=toks, line_numbers=lines)

    def __len__(self):
        return len(self.raw)

    def passage_tokens(self, sentence_ids):
        """Tokens of the given sentences concatenated in the given order."""
        out = []
        for sid in sentence_ids:
            out.extend(self.tokens[sid])
        return out

    def passage_text(self, sentence_ids):
        return " ".join(self.raw[sid] for sid in sentence_ids)
