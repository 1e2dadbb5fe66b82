"""Seeded outcome sampling and exact binomial interval probabilities.

One PRNG is fixed for the whole package: numpy's PCG64 as wired up by
numpy.random.default_rng(seed). Outcome draws always go through the
inverse CDF of the target distribution, so published seeds reproduce
every count table bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .correlations import CorrelationTable, make_table
from .operators import ProbVector, _freeze

SAMPLING_MODES = ("blocked", "per-trial-random")


@dataclass(frozen=True)
class OutcomeCounts:
    """Counts per outcome label from n_trials seeded draws."""

    counts: np.ndarray
    n_trials: int
    seed: int

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_trials


@dataclass(frozen=True)
class DataTable:
    """Per-setting joint outcome counts d(x, y | a, b).

    counts maps a setting pair to an (n_x, n_y) integer block; n_trials
    maps it to that setting's realized trial count (constant in blocked
    mode, multinomial in per-trial-random mode).
    """

    settings_a: Tuple
    settings_b: Tuple
    counts: Dict[Tuple, np.ndarray]
    n_trials: Dict[Tuple, int]
    sampling_mode: str
    seed: int

    def empirical_table(self) -> CorrelationTable:
        """Relative frequencies as a correlation table.

        Raises ValueError when a setting has no realized trials (possible
        in per-trial-random mode with small trial counts).
        """
        probs = {}
        for key, block in self.counts.items():
            n = self.n_trials[key]
            if n == 0:
                raise ValueError(f"setting {key!r} received no trials")
            probs[key] = block / n
        return make_table(self.settings_a, self.settings_b, probs)


def _draw_counts(probs: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """n inverse-CDF draws from a categorical distribution, as counts."""
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    draws = np.searchsorted(cdf, rng.random(n), side="right")
    return np.bincount(draws, minlength=probs.shape[0])


def sample_outcomes(q, n: int, seed: int) -> OutcomeCounts:
    """n independent seeded draws from the distribution q."""
    if n < 1:
        raise ValueError(f"need at least one trial, got {n}")
    probs = q.values if isinstance(q, ProbVector) else np.asarray(q, dtype=float)
    rng = np.random.default_rng(seed)
    counts = _draw_counts(probs, n, rng)
    return OutcomeCounts(counts=_freeze(counts), n_trials=n, seed=seed)


def binomial_interval_prob(n: int, p: float, lo: int, hi: int) -> float:
    """Exact P(lo <= K <= hi) for K ~ Binomial(n, p), summed in log space."""
    if not 0 <= lo <= hi <= n:
        raise ValueError(f"need 0 <= lo <= hi <= n, got lo={lo} hi={hi} n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    if p == 0.0:
        return 1.0 if lo == 0 else 0.0
    if p == 1.0:
        return 1.0 if hi == n else 0.0
    k = np.arange(lo, hi + 1, dtype=float)
    lg = math.lgamma
    log_terms = (
        lg(n + 1)
        - np.array([lg(x + 1) + lg(n - x + 1) for x in k])
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    peak = log_terms.max()
    return float(np.exp(peak) * np.sum(np.exp(log_terms - peak)))


def data_table_sim(
    table: CorrelationTable,
    n_per_setting: int,
    seed: int,
    mode: str = "blocked",
) -> DataTable:
    """Sample a data table from a correlation table.

    blocked: every setting pair gets exactly n_per_setting trials, sampled
    in row-major setting order from a single seeded stream. per-trial-random:
    the total n_per_setting * n_settings trials each draw their setting
    uniformly first; counts are per realized setting.
    """
    if n_per_setting < 1:
        raise ValueError(f"need at least one trial per setting, got {n_per_setting}")
    if mode not in SAMPLING_MODES:
        raise ValueError(f"mode must be one of {SAMPLING_MODES}, got {mode!r}")
    keys = [(a, b) for a in table.settings_a for b in table.settings_b]
    rng = np.random.default_rng(seed)

    if mode == "blocked":
        trials = {key: n_per_setting for key in keys}
    else:
        total = n_per_setting * len(keys)
        drawn = rng.integers(0, len(keys), size=total)
        realized = np.bincount(drawn, minlength=len(keys))
        trials = {key: int(realized[i]) for i, key in enumerate(keys)}

    counts = {}
    for key in keys:
        block = table.block(*key)
        n = trials[key]
        if n == 0:
            flat = np.zeros(block.size, dtype=int)
        else:
            flat = _draw_counts(block.reshape(-1), n, rng)
        counts[key] = _freeze(flat.reshape(block.shape))
    return DataTable(
        settings_a=table.settings_a,
        settings_b=table.settings_b,
        counts=counts,
        n_trials=trials,
        sampling_mode=mode,
        seed=seed,
    )
