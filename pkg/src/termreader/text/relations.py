"""Directed word-pair relations loaded from a tab-separated file."""

from __future__ import annotations

import numpy as np

NO_RELATION = 0
NO_RELATION_LABEL = "<none>"


class RelationTable:
    """(head, tail) -> relation ids.  Pairs are directed: the file has to
    list both directions explicitly if a relation is symmetric."""

    def __init__(self, relations, pairs):
        self.relations = tuple(relations)
        if self.relations[0] != NO_RELATION_LABEL:
            raise ValueError("relation id 0 must be the no-relation entry")
        self.pairs = pairs

    @classmethod
    def load(cls, path, relation_names=None):
        """Parse head<TAB>relation<TAB>tail lines, lowercasing everything.

        ``relation_names`` pins the id assignment (used when restoring a
        trained model); rows naming relations outside it are dropped.
        Otherwise ids follow the sorted set of names seen in the file.
        """
        rows = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise ValueError(
                        f"{path}: line {lineno}: expected 3 tab-separated fields")
                rows.append(tuple(p.strip().lower() for p in parts))
        if relation_names is None:
            names = sorted({rel for _, rel, _ in rows})
            relations = (NO_RELATION_LABEL,) + tuple(names)
        else:
            relations = tuple(relation_names)
        ids = {name: i for i, name in enumerate(relations)}
        pairs: dict[tuple[str, str], set[int]] = {}
        for head, rel, tail in rows:
            rid = ids.get(rel)
            if rid is None or rid == NO_RELATION:
                continue
            pairs.setdefault((head, tail), set()).add(rid)
        frozen = {k: tuple(sorted(v)) for k, v in pairs.items()}
        return cls(relations, frozen)

    @classmethod
    def empty(cls):
        return cls((NO_RELATION_LABEL,), {})

    def ids_for(self, head, tail):
        return self.pairs.get((head, tail), ())

    def __len__(self):
        return len(self.relations)


def relation_ids(tokens, other_tokens, table, rng):
    """Per-token relation id against any token of the other sequence.

    Tokens with no related counterpart get NO_RELATION; when several
    relations apply, one is drawn from the supplied generator so the
    choice is reproducible for a fixed seed.
    """
    others = [t.lower for t in other_tokens]
    out = np.zeros(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        found = set()
        for other in others:
            found.update(table.ids_for(tok.lower, other))
        if not found:
            continue
        candidates = sorted(found)
        out[i] = candidates[0] if len(candidates) == 1 else int(
            rng.choice(candidates))
    return out
