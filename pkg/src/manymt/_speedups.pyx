# cython: language_level=3, boundscheck=False, wraparound=False
"""Cython byte-pair-merge kernels.

Compiled twin of manymt._pykernels: same algorithms, same arithmetic order,
bit-identical output (enforced by tests). Keep the two files in sync.
"""

BACKEND = "cython"


def train_merges(list words, list weights, Py_ssize_t max_merges, long next_id):
    cdef dict pair_weight = {}
    cdef dict pair_occ = {}
    cdef dict pair_words = {}
    cdef Py_ssize_t wi, j, n, m, n_words
    cdef long a, b, new_id
    cdef double wt
    cdef list w, out, merges
    cdef tuple p, best
    cdef object s, r
    cdef double pw, best_w
    cdef long occ

    n_words = len(words)
    for wi in range(n_words):
        w = <list>words[wi]
        wt = <double>weights[wi]
        n = len(w)
        for j in range(n - 1):
            p = (w[j], w[j + 1])
            pair_weight[p] = pair_weight.get(p, 0.0) + wt
            pair_occ[p] = pair_occ.get(p, 0) + 1
            s = pair_words.get(p)
            if s is None:
                s = set()
                pair_words[p] = s
            (<set>s).add(wi)

    merges = []
    while len(merges) < max_merges:
        best = None
        best_w = 0.0
        for p, pw_obj in pair_weight.items():
            pw = <double>pw_obj
            if best is None or pw > best_w or (pw == best_w and p < best):
                best = p
                best_w = pw
        if best is None:
            break
        a = <long>best[0]
        b = <long>best[1]
        new_id = next_id
        for wi in sorted(pair_words.get(best, ())):
            w = <list>words[wi]
            n = len(w)
            found = False
            for j in range(n - 1):
                if <long>w[j] == a and <long>w[j + 1] == b:
                    found = True
                    break
            if not found:
                continue
            wt = <double>weights[wi]
            for j in range(n - 1):
                p = (w[j], w[j + 1])
                occ = <long>pair_occ[p] - 1
                if occ == 0:
                    del pair_occ[p]
                    del pair_weight[p]
                    pair_words.pop(p, None)
                else:
                    pair_occ[p] = occ
                    pair_weight[p] = <double>pair_weight[p] - wt
            out = []
            j = 0
            while j < n:
                if j < n - 1 and <long>w[j] == a and <long>w[j + 1] == b:
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
                    s = set()
                    pair_words[p] = s
                (<set>s).add(wi)
        pair_weight.pop(best, None)
        pair_occ.pop(best, None)
        pair_words.pop(best, None)
        merges.append((a, b, new_id))
        next_id += 1
    return merges


def apply_merges(symbols, dict merge_rank):
    cdef list syms = list(symbols)
    cdef list out
    cdef Py_ssize_t j, n
    cdef long best_rank, best_a, best_b, best_new
    cdef object r

    if len(syms) < 2:
        return syms
    while True:
        best_rank = -1
        best_a = best_b = best_new = 0
        n = len(syms)
        for j in range(n - 1):
            r = merge_rank.get((syms[j], syms[j + 1]))
            if r is not None and (best_rank < 0 or <long>(<tuple>r)[0] < best_rank):
                best_rank = <long>(<tuple>r)[0]
                best_a = <long>syms[j]
                best_b = <long>syms[j + 1]
                best_new = <long>(<tuple>r)[1]
        if best_rank < 0:
            return syms
        out = []
        j = 0
        while j < n:
            if j < n - 1 and <long>syms[j] == best_a and <long>syms[j + 1] == best_b:
                out.append(best_new)
                j += 2
            else:
                out.append(syms[j])
                j += 1
        syms = out
        if len(syms) < 2:
            return syms
