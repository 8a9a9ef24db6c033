"""Independent brute-force oracles used by unit and acceptance tests.

None of these share code with the implementations they check: the DRO oracle
enumerates a simplex grid, the beam oracle scores every terminated sequence,
and the n-gram helpers recount from scratch.
"""

import itertools
import math

import numpy as np

_GRID_CACHE: dict = {}


def simplex_grid(n: int, step: float = 0.005) -> np.ndarray:
    """All points of the n-simplex with coordinates on a step lattice."""
    key = (n, step)
    if key not in _GRID_CACHE:
        m = round(1.0 / step)
        if n == 2:
            a = np.arange(m + 1)
            grid = np.stack([a, m - a], axis=1)
        elif n == 3:
            rows = [(i, j, m - i - j) for i in range(m + 1) for j in range(m - i + 1)]
            grid = np.array(rows)
        elif n == 4:
            rows = [
                (i, j, k, m - i - j - k)
                for i in range(m + 1)
                for j in range(m - i + 1)
                for k in range(m - i - j + 1)
            ]
            grid = np.array(rows)
        else:
            raise ValueError("grid oracle supports n <= 4")
        _GRID_CACHE[key] = grid / m
    return _GRID_CACHE[key]


def dro_grid_oracle(e: np.ndarray, p: np.ndarray, rho: float, step: float = 0.005):
    """Best feasible grid point of max_q q.e s.t. chi2(q||p) <= rho."""
    grid = simplex_grid(len(p), step)
    d = grid - p
    div = 0.5 * np.sum(d * d / p, axis=1)
    feasible = grid[div <= rho]
    objs = feasible @ e
    best = int(np.argmax(objs))
    return feasible[best], float(objs[best])


def exhaustive_hypotheses(model, lenpen: float, max_len: int):
    """Every sequence of <= max_len tokens ending in EOS, scored and sorted."""
    out = []
    for length in range(max_len):
        for prefix in itertools.product(
            *([t for t in range(model.vocab_size) if t != model.eos_id],) * length
        ):
            lp = 0.0
            dead = False
            for i in range(length):
                lp += float(model.score(prefix[:i], [])[prefix[i]])
                if lp == -math.inf:
                    dead = True
                    break
            if dead:
                continue
            lp += float(model.score(prefix, [])[model.eos_id])
            if lp == -math.inf:
                continue
            seq = prefix + (model.eos_id,)
            out.append((seq, lp, lp / len(seq) ** lenpen))
    out.sort(key=lambda h: (-h[2], h[0]))
    return out


def ngram_multiset(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def clipped_matches(hyp_tokens, ref_tokens, n):
    """Modified n-gram matches counted by hand (no Counter intersection)."""
    hyp = ngram_multiset(hyp_tokens, n)
    ref = ngram_multiset(ref_tokens, n)
    matches = 0
    remaining = list(ref)
    for g in hyp:
        if g in remaining:
            remaining.remove(g)
            matches += 1
    return matches, len(hyp)
