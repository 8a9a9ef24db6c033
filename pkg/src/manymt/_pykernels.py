"""Pure-Python byte-pair-merge kernels.

These are the hot loops of subword training and encoding. The compiled
extension ``manymt._speedups`` implements the same two functions with the
same arithmetic order; both backends must produce bit-identical models
(covered by tests), so any change here must be mirrored there.
"""

from __future__ import annotations

BACKEND = "python"


def train_merges(words, weights, max_merges, next_id):
    """Greedy weighted BPE merge learning.

    words: list of symbol-id lists (mutated in place as merges apply).
    weights: per-word float weights (upsampled counts).
    Returns a list of (left, right, new_id) merge rules, at most max_merges.
    Ties on weight break toward the lexicographically smallest pair. Pair
    occurrence counts are tracked as exact integers so exhausted pairs retire
    deterministically regardless of float residue.
    """
    pair_weight = {}
    pair_occ = {}
    pair_words = {}
    for wi, w in enumerate(words):
        wt = weights[wi]
        for j in range(len(w) - 1):
            p = (w[j], w[j + 1])
            pair_weight[p] = pair_weight.get(p, 0.0) + wt
            pair_occ[p] = pair_occ.get(p, 0) + 1
            s = pair_words.get(p)
            if s is None:
                pair_words[p] = s = set()
            s.add(wi)

    merges = []
    while len(merges) < max_merges:
        best = None
        best_w = 0.0
        for p, pw in pair_weight.items():
            if best is None or pw > best_w or (pw == best_w and p < best):
                best = p
                best_w = pw
        if best is None:
            break
        a, b = best
        new_id = next_id
        for wi in sorted(pair_words.get(best, ())):
            w = words[wi]
            n = len(w)
            found = False
            for j in range(n - 1):
                if w[j] == a and w[j + 1] == b:
                    found = True
                    break
            if not found:
                continue
            wt = weights[wi]
            for j in range(n - 1):
                p = (w[j], w[j + 1])
                occ = pair_occ[p] - 1
                if occ == 0:
                    del pair_occ[p]
                    del pair_weight[p]
                    pair_words.pop(p, None)
                else:
                    pair_occ[p] = occ
                    pair_weight[p] -= wt
            out = []
            j = 0
            while j < n:
                if j < n - 1 and w[j] == a and w[j + 1] == b:
                    out.append(new_id)
                    j += 2
                else:
                    out.append(w[j])
                    j += 1
            words[wi] = out
            m = len(out)
            for j in range(m - 1):
                p = (out[j], out[j + 1])
                pair_weight[p] = pair_weight.get(p, 0.0) + wt
                pair_occ[p] = pair_occ.get(p, 0) + 1
                s = pair_words.get(p)
                if s is None:
                    pair_words[p] = s = set()
                s.add(wi)
        pair_weight.pop(best, None)
        pair_occ.pop(best, None)
        pair_words.pop(best, None)
        merges.append((a, b, new_id))
        next_id += 1
    return merges


def apply_merges(symbols, merge_rank):
    """Segment one symbol sequence by replaying merges in rank order.

    merge_rank: dict mapping (left, right) -> (rank, new_id). At each round
    the lowest-ranked pair present is merged left-to-right, matching the
    order the trainer created the rules in.
    """
    syms = list(symbols)
    if len(syms) < 2:
        return syms
    while True:
        best_rank = -1
        best_a = best_b = best_new = 0
        for j in range(len(syms) - 1):
            r = merge_rank.get((syms[j], syms[j + 1]))
            if r is not None and (best_rank < 0 or r[0] < best_rank):
                best_rank = r[0]
                best_a = syms[j]
                best_b = syms[j + 1]
                best_new = r[1]
        if best_rank < 0:
            return syms
        out = []
        j = 0
        n = len(syms)
        while j < n:
            if j < n - 1 and syms[j] == best_a and syms[j + 1] == best_b:
                out.append(best_new)
                j += 2
            else:
                out.append(syms[j])
                j += 1
        syms = out
        if len(syms) < 2:
            return syms
