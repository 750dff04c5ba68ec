"""Whitespace tokenization with punctuation splitting and light lemmas.

Leading and trailing punctuation marks become their own tokens; interior
punctuation (hyphens, apostrophes) stays put.  Lemmas come from a small
suffix-stripping rule set with an exceptions table, which is all the
downstream match features need.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    lemma: str

    @property
    def is_punct(self):
        return _all_punct(self.surface)


@lru_cache(maxsize=4096)
def _is_punct_char(ch):
    return unicodedata.category(ch).startswith("P")


def _all_punct(s):
    return bool(s) and all(_is_punct_char(ch) for ch in s)


# Irregular forms plus words a naive suffix strip would mangle.
_LEMMA_EXCEPTIONS = {
    "is": "be", "was": "be", "are": "be", "were": "be", "been": "be",
    "being": "be", "am": "be",
    "has": "have", "had": "have", "having": "have",
    "does": "do", "did": "do", "done": "do",
    "goes": "go", "went": "go", "said": "say",
    "made": "make", "making": "make",
    "used": "use", "using": "use",
    "this": "this", "his": "his", "its": "its", "thus": "thus",
    "during": "during", "thing": "thing", "something": "something",
    "nothing": "nothing", "anything": "anything", "everything": "everything",
    "morning": "morning", "evening": "evening", "spring": "spring",
    "string": "string", "wing": "wing", "lightning": "lightning",
    "children": "child", "feet": "foot", "teeth": "tooth",
    "mice": "mouse", "geese": "goose", "men": "man", "women": "woman",
    "people": "person",
    "gas": "gas", "bus": "bus", "yes": "yes", "lens": "lens",
    "species": "species", "series": "series",
}


def lemma_of(word):
    """Lemma of a lowercased word form."""
    w = word
    if w in _LEMMA_EXCEPTIONS:
        return _LEMMA_EXCEPTIONS[w]
    if not w.isalpha():
        return w
    n = len(w)
    if w.endswith("ies") and n >= 5:
        return w[:-3] + "y"
    if w.endswith("es") and n >= 5 and (
            w[-3] in "sxzo" or w[-4:-2] in ("ch", "sh")):
        return w[:-2]
    if w.endswith("s") and n >= 4 and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    if w.endswith("ing") and n >= 6:
        return _undouble(w[:-3])
    if w.endswith("ed") and n >= 5:
        return _undouble(w[:-2])
    return w


def _undouble(stem):
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
        return stem[:-1]
    return stem


def _make_token(surface):
    low = surface.lower()
    return Token(surface, low, surface if _all_punct(surface) else lemma_of(low))


def tokenize(text):
    """Split text into Tokens; never returns empty-string tokens."""
    out = []
    for chunk in text.split():
        lead = []
        while chunk and _is_punct_char(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and _is_punct_char(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(_make_token(ch) for ch in lead)
        if chunk:
            out.append(_make_token(chunk))
        out.extend(_make_token(ch) for ch in reversed(trail))
    return out


def tokens_from_surfaces(words):
    """Wrap pre-split words (e.g. annotated data) without re-splitting."""
    return [_make_token(w) for w in words]


def surfaces(tokens):
    return [t.surface for t in tokens]


def lowers(tokens):
    return [t.lower for t in tokens]
