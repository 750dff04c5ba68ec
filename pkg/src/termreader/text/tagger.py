"""Coarse part-of-speech and entity tags.

The tag inventories are fixed and shipped here; id 0 is the unknown tag
in both.  The built-in tagger is rule-based and deliberately rough: the
downstream models only consume these as low-dimensional embedded hints.
Datasets that carry their own tag annotations bypass it entirely.
"""

from __future__ import annotations

POS_TAGS = ("<unk>", "ADJ", "ADP", "ADV", "CONJ", "DET", "NOUN", "NUM",
            "PART", "PRON", "PROPN", "PUNCT", "VERB", "X")
NER_TAGS = ("<unk>", "O", "PERSON", "LOCATION", "ORGANIZATION", "MISC",
            "NUMBER", "DATE")


class TagVocab:
    UNK = 0

    def __init__(self, labels):
        self.labels = tuple(labels)
        self._ids = {l: i for i, l in enumerate(self.labels)}
        self.unknown_count = 0

    def id(self, label):
        idx = self._ids.get(label)
        if idx is None:
            self.unknown_count += 1
            return self.UNK
        return idx

    def __len__(self):
        return len(self.labels)


_DET = {"the", "a", "an", "this", "that", "these", "those", "which", "what",
        "each", "every", "some", "any", "no", "all", "both", "most", "many"}
_PRON = {"i", "you", "he", "she", "it", "we", "they", "who", "whom", "whose",
         "him", "her", "them", "me", "us", "its", "his", "their", "your"}
_ADP = {"of", "in", "on", "at", "to", "from", "by", "with", "about", "into",
        "through", "during", "between", "among", "under", "over", "after",
        "before", "above", "below", "for", "near", "across"}
_CONJ = {"and", "or", "but", "nor", "because", "although", "while", "if",
         "when", "than", "so"}
_PART = {"not", "n't"}
_VERB = {"is", "are", "was", "were", "be", "been", "being", "has", "have",
         "had", "do", "does", "did", "can", "could", "will", "would",
         "should", "may", "might", "must", "shall"}

_ADJ_SUFFIX = ("ous", "ful", "ive", "able", "ible", "al", "ic", "est")
_NOUN_SUFFIX = ("tion", "sion", "ment", "ness", "ity", "ism")


def _pos_rule(token, position):
    if token.is_punct:
        return "PUNCT"
    s = token.surface
    if any(ch.isdigit() for ch in s):
        return "NUM"
    if position > 0 and s[:1].isupper():
        return "PROPN"
    w = token.lower
    if w in _DET:
        return "DET"
    if w in _PRON:
        return "PRON"
    if w in _ADP:
        return "ADP"
    if w in _CONJ:
        return "CONJ"
    if w in _PART:
        return "PART"
    if w in _VERB:
        return "VERB"
    if w.endswith("ly"):
        return "ADV"
    if w.endswith(("ing", "ed")):
        return "VERB"
    if w.endswith(_ADJ_SUFFIX):
        return "ADJ"
    if w.endswith(_NOUN_SUFFIX):
        return "NOUN"
    return "NOUN"


def _ner_rule(token, position):
    s = token.surface
    if any(ch.isdigit() for ch in s):
        return "NUMBER"
    if position > 0 and s[:1].isupper():
        return "MISC"
    return "O"


class RuleTagger:
    def tag(self, tokens):
        pos = [_pos_rule(t, i) for i, t in enumerate(tokens)]
        ner = [_ner_rule(t, i) for i, t in enumerate(tokens)]
        return pos, ner
