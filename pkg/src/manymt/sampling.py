"""Data-balancing mathematics: temperature sampling and chi-square DRO.

temperature_distribution evaluates p_i = |D_i|^(1/tau) / sum_j |D_j|^(1/tau).
dro_worst_case maximizes the weighted excess loss over the chi-square ball
{q : 0.5 * sum_i (q_i - p_i)^2 / p_i <= rho} intersected with the simplex,
via the closed-form KKT solution with active-set clipping for negative
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError

UNIFORM_TAU = math.inf


@dataclass
class SamplingDistribution:
    directions: list
    probs: np.ndarray
    tau: float

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if len(self.directions) != self.probs.shape[0]:
            raise DataError("directions and probs length mismatch")
        if np.any(self.probs < 0):
            raise DataError("negative probability")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise DataError("probabilities do not sum to 1")


@dataclass
class DROConfig:
    rho: float
    p_train: np.ndarray
    baselines: np.ndarray | None = None

    def __post_init__(self):
        if self.rho < 0:
            raise DataError("rho must be >= 0")
        self.p_train = np.asarray(self.p_train, dtype=float)
        if np.any(self.p_train <= 0):
            raise DataError("p_train must be strictly positive")
        if abs(float(self.p_train.sum()) - 1.0) > 1e-9:
            raise DataError("p_train must sum to 1")
        if self.baselines is None:
            self.baselines = np.zeros_like(self.p_train)
        else:
            self.baselines = np.asarray(self.baselines, dtype=float)
            if self.baselines.shape != self.p_train.shape:
                raise DataError("baselines shape mismatch")
            if not np.all(np.isfinite(self.baselines)):
                raise DataError("baselines must be finite")


@dataclass
class DROWeights:
    q: np.ndarray
    divergence: float
    dual: dict = field(default_factory=dict)
    active_support: frozenset[int] = frozenset()

    @property
    def probs(self) -> np.ndarray:
        return self.q


def temperature_distribution(sizes, tau: float, directions: list | None = None) -> SamplingDistribution:
    """Smoothed sampling distribution over direction sizes with exponent 1/tau.

    tau=1 reproduces the raw data proportions, tau=inf the uniform
    distribution. Intermediate values are evaluated in log space so large
    sizes with small tau cannot overflow.
    """
    sizes = np.asarray(sizes, dtype=float)
    if sizes.ndim != 1 or sizes.shape[0] == 0:
        raise DataError("sizes must be a non-empty vector")
    if np.any(sizes <= 0) or not np.all(np.isfinite(sizes)):
        raise DataError("all sizes must be positive and finite")
    if directions is None:
        directions = list(range(sizes.shape[0]))
    n = sizes.shape[0]
    if math.isinf(tau):
        probs = np.full(n, 1.0 / n)
    elif tau == 1.0:
        probs = sizes / sizes.sum()
    elif tau > 0:
        logw = np.log(sizes) / tau
        w = np.exp(logw - logw.max())
        probs = w / w.sum()
    else:
        raise DataError("tau must be positive (or inf for uniform)")
    return SamplingDistribution(directions=list(directions), probs=probs, tau=tau)


def chi2_divergence(q, p) -> float:
    """D(q || p) = 0.5 * sum_i (q_i - p_i)^2 / p_i."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape or q.ndim != 1:
        raise DataError("q and p must be vectors of equal length")
    if np.any(p <= 0):
        raise DataError("p must be strictly positive")
    if np.any(q < 0) or abs(float(q.sum()) - 1.0) > 1e-9 or abs(float(p.sum()) - 1.0) > 1e-9:
        raise DataError("q and p must be valid distributions")
    d = q - p
    return float(0.5 * np.sum(d * d / p))


def _chi2_raw(q: np.ndarray, p: np.ndarray) -> float:
    d = q - p
    return float(0.5 * np.sum(d * d / p))


def dro_worst_case(excess_losses, config: DROConfig) -> DROWeights:
    """argmax_{q in simplex, D(q||p)<=rho} sum_i q_i * e_i.

    The unclipped stationary point is q = p * (1 + lam * (e - mean_p(e)))
    with lam = sqrt(2 rho / Var_p(e)). Negative coordinates are zeroed and
    the problem re-solved on the remaining support, charging the zeroed
    coordinates' divergence cost 0.5 * sum p_i against rho, so the result
    stays inside the original ball. rho = 0 and constant excess losses both
    return p_train unchanged.
    """
    e = np.asarray(excess_losses, dtype=float)
    p = config.p_train
    if e.shape != p.shape:
        raise DataError("excess losses length does not match p_train")
    if not np.all(np.isfinite(e)):
        raise NumericError("non-finite excess losses")
    n = e.shape[0]
    full = frozenset(range(n))
    if config.rho == 0.0:
        return DROWeights(q=p.copy(), divergence=0.0, dual={"lambda": 0.0},
                          active_support=full)
    if float(e.max() - e.min()) == 0.0:
        return DROWeights(q=p.copy(), divergence=0.0, dual={"lambda": 0.0},
                          active_support=full)

    rho = config.rho
    support = np.ones(n, dtype=bool)
    iterations = 0
    lam = 0.0
    q = p.copy()
    while True:
        iterations += 1
        if iterations > n + 1:
            raise NumericError("active-set loop failed to converge")
        idx = np.flatnonzero(support)
        ps = p[idx]
        es = e[idx]
        p_mass = float(ps.sum())
        delta = 1.0 - p_mass
        ebar = float(np.dot(ps, es)) / p_mass
        var = float(np.dot(ps, (es - ebar) ** 2))
        # relative threshold: cancellation can leave a denormal-size residue
        # where the support losses are equal, which would blow up 1/gamma
        var_scale = max(float(np.dot(ps, es * es)), 1e-300)
        rad_sq = 2.0 * (rho - 0.5 * delta) - delta * delta / p_mass
        if idx.shape[0] == 1 or var <= 1e-24 * var_scale or rad_sq <= 0.0:
            # Constant losses on the support (or no slack left): put the
            # renormalized support mass as far toward the support as the ball
            # allows; objective never drops below the p_train value.
            q_ext = np.zeros(n)
            q_ext[idx] = ps / p_mass
            d_full = _chi2_raw(q_ext, p)
            t = 1.0 if d_full <= rho else math.sqrt(rho / d_full)
            q = p + t * (q_ext - p)
            lam = math.inf
            break
        gamma = math.sqrt(var / rad_sq)
        qs = ps * (1.0 + delta / p_mass + (es - ebar) / gamma)
        if qs.min() >= 0.0:
            q = np.zeros(n)
            q[idx] = qs
            lam = 1.0 / gamma
            break
        drop = idx[qs < 0.0]
        support[drop] = False
        if not support.any():
            raise NumericError("active-set loop emptied the support")

    q = np.maximum(q, 0.0)
    q = q / q.sum()
    divergence = _chi2_raw(q, p)
    return DROWeights(
        q=q,
        divergence=divergence,
        dual={"lambda": lam, "iterations": iterations},
        active_support=frozenset(int(i) for i in np.flatnonzero(q > 0.0)),
    )


def sample_schedule(dist, batch_count: int, seed: int) -> list:
    """Draw a deterministic direction schedule from a distribution.

    Accepts a SamplingDistribution or DROWeights (anything with .probs);
    direction labels default to indices when the carrier has none.
    """
    if batch_count < 0:
        raise DataError("batch_count must be >= 0")
    probs = np.asarray(dist.probs, dtype=float)
    directions = getattr(dist, "directions", None)
    if directions is None:
        directions = list(range(probs.shape[0]))
    if batch_count == 0:
        return []
    rng = np.random.default_rng(seed)
    idx = rng.choice(probs.shape[0], size=batch_count, p=probs / probs.sum())
    return [directions[int(i)] for i in idx]
