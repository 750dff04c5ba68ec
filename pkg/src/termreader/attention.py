"""Word-level cross attention between two token sequences.

Both sides are projected into the word-embedding space, their dot
products row-softmaxed, and the target's projected rows averaged under
those weights:

    scores = (U_seq @ u_proj) @ (V_seq @ v_proj)^T
    attended = softmax_rows(scores) @ (V_seq @ v_proj)

Row i of the result summarizes the target sequence from token i's point
of view; each weight row is a distribution, so attended values stay in
the convex hull of the projected target rows.
"""

from __future__ import annotations

from .nn import softmax_rows


def word_attention(u_seq, v_seq, u_proj, v_proj):
    if v_seq.shape[0] == 0:
        raise ValueError("empty attention target")
    projected_v = v_seq @ v_proj
    scores = (u_seq @ u_proj) @ projected_v.T
    weights = softmax_rows(scores)
    return weights @ projected_v, weights
