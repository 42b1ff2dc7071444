"""Randomized mixing algorithms interpolating fairness and welfare.

Both algorithms flip an ``alpha``-biased coin.  On heads they run the
high-welfare mechanism.  On tails they fall back toward the fair prior:

* :func:`simple_mix` returns a single draw from the prior, giving the
  closed-form output lottery ``alpha * point_mass(A) + (1 - alpha) * prior``.
* :func:`epsilon_mix` draws a batch of prior samples, sorts them by value
  (descending, deterministic tie-break), removes an ``alpha`` fraction of
  the sample weight from the low-value tail, and picks one sample in
  proportion to the surviving weights.  The batch size grows like
  ``1 / ((1 - alpha) * epsilon**2)`` and controls how much of the optimal
  constrained welfare is preserved (a ``(1 - epsilon)`` factor).

Either way the output lottery stays within total-variation ``alpha`` of the
prior; for :func:`epsilon_mix` this holds for *any* sample count, so the
``n_samples`` override trades welfare, never fairness.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import numpy as np

from .core import (
    Distribution,
    InterpolationInstance,
    ParameterError,
    canonical_key,
)

__all__ = [
    "sample_size",
    "trim_weights",
    "epsilon_mix",
    "epsilon_mix_many",
    "simple_mix",
    "simple_mix_many",
    "simple_mix_distribution",
]


def _check_epsilon(epsilon: float) -> float:
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return float(epsilon)


def sample_size(alpha: float, epsilon: float) -> int:
    """Prior-sample batch size used by :func:`epsilon_mix` on tails.

    ``ceil(8 / ((1 - alpha) * epsilon**2) * ln(2 / epsilon))``, which is the
    count needed for the empirical sample batch to represent the prior well
    enough that trimming loses at most an ``epsilon`` fraction of welfare.

    >>> sample_size(0.0, 0.1)
    2397
    >>> sample_size(0.5, 0.1)
    4794
    >>> sample_size(0.0, 0.05)
    11805
    """
    epsilon = _check_epsilon(epsilon)
    if not 0.0 <= alpha < 1.0:
        raise ParameterError(f"alpha must lie in [0, 1) to size samples, got {alpha!r}")
    return math.ceil(8.0 / ((1.0 - alpha) * epsilon**2) * math.log(2.0 / epsilon))


def trim_weights(s: int, alpha: float) -> np.ndarray:
    """Weights over ``s`` value-sorted samples after removing ``alpha * s`` mass.

    Samples are assumed sorted by value descending.  Mass is removed from the
    tail: the lowest-valued samples get weight 0, at most one boundary sample
    keeps a fractional weight, and the rest keep weight 1.  The surviving
    total is ``(1 - alpha) * s``.

    >>> trim_weights(4, 0.5)
    array([1., 1., 0., 0.])
    >>> trim_weights(5, 0.3)
    array([1. , 1. , 1. , 0.5, 0. ])
    """
    if s < 1:
        raise ParameterError(f"sample count must be >= 1, got {s!r}")
    if not 0.0 <= alpha < 1.0:
        raise ParameterError(f"alpha must lie in [0, 1) to trim, got {alpha!r}")
    remove = alpha * s
    k_zero = int(math.floor(remove))
    w = np.ones(s, dtype=float)
    if k_zero > 0:
        w[s - k_zero:] = 0.0
    if k_zero < s:
        w[s - 1 - k_zero] = 1.0 - (remove - k_zero)
    return w


def _values_of(instance: InterpolationInstance, samples: Sequence[Any]) -> np.ndarray:
    value = instance.value
    if value.values is not None and isinstance(samples, np.ndarray):
        return value.values[samples]
    return np.array([value(s) for s in samples], dtype=float)


def _sorted_order(values: np.ndarray, samples: Sequence[Any]) -> np.ndarray:
    """Indices sorting samples by value descending, canonical key ascending."""
    if isinstance(samples, np.ndarray) and samples.dtype.kind in "iu":
        return np.lexsort((samples, -values))
    order = np.argsort(-values, kind="stable")
    sorted_vals = values[order]
    # Stable sort leaves equal-value runs in draw order; re-sort each run by
    # the samples' canonical keys so the outcome is draw-order independent.
    boundaries = np.flatnonzero(sorted_vals[1:] != sorted_vals[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [order.size]))
    for r in np.flatnonzero(ends - starts > 1):
        lo, hi = int(starts[r]), int(ends[r])
        order[lo:hi] = sorted(order[lo:hi], key=lambda j: canonical_key(samples[j]))
    return order


def _pick_trimmed(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    u = rng.random() * cum[-1]
    return int(np.searchsorted(cum, u, side="right"))


def epsilon_mix(
    instance: InterpolationInstance,
    epsilon: float,
    rng: np.random.Generator,
    n_samples: int | None = None,
) -> Any:
    """One run of the sample-trim-and-pick mixing algorithm.

    With probability ``alpha`` returns the mechanism's output.  Otherwise
    draws ``sample_size(alpha, epsilon)`` prior samples (or ``n_samples``
    if given), trims an ``alpha`` fraction of their weight from the
    low-value end, and returns one sample drawn in proportion to the
    surviving weights.
    """
    _check_epsilon(epsilon)
    if n_samples is not None and n_samples < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples!r}")
    alpha = instance.alpha
    if rng.random() < alpha:
        return instance.mechanism.run(rng)
    s = n_samples if n_samples is not None else sample_size(alpha, epsilon)
    samples = instance.prior.sample_many(rng, s)
    values = _values_of(instance, samples)
    order = _sorted_order(values, samples)
    weights = trim_weights(s, alpha)
    picked = _pick_trimmed(weights, rng)
    out = samples[int(order[picked])]
    return int(out) if isinstance(out, np.integer) else out


def simple_mix(instance: InterpolationInstance, rng: np.random.Generator) -> Any:
    """One run of the single-draw mixing algorithm.

    With probability ``alpha`` returns the mechanism's output, otherwise a
    single prior sample.
    """
    if rng.random() < instance.alpha:
        return instance.mechanism.run(rng)
    return instance.prior.sample(rng)


def simple_mix_distribution(prior: Distribution, a: int, alpha: float) -> Distribution:
    """Closed-form output lottery of :func:`simple_mix`.

    ``alpha`` mass on the mechanism output ``a`` plus ``(1 - alpha)`` times
    the prior.

    >>> simple_mix_distribution(Distribution({0: 0.2, 1: 0.8}), 0, 0.5)
    Distribution({0: 0.6, 1: 0.4})
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha!r}")
    out = {sid: (1.0 - alpha) * p for sid, p in prior.items()}
    out[a] = out.get(a, 0.0) + alpha
    return Distribution(out)


# ---------------------------------------------------------------------------
# batched runs (for Monte Carlo estimation)


def simple_mix_many(
    instance: InterpolationInstance, n: int, rng: np.random.Generator
) -> list[Any]:
    """``n`` independent runs of :func:`simple_mix`."""
    heads = rng.random(n) < instance.alpha
    n_tails = int(n - heads.sum())
    tails = instance.prior.sample_many(rng, n_tails)
    out: list[Any] = []
    t = 0
    for h in heads:
        if h:
            out.append(instance.mechanism.run(rng))
        else:
            drawn = tails[t]
            out.append(int(drawn) if isinstance(drawn, np.integer) else drawn)
            t += 1
    return out


def epsilon_mix_many(
    instance: InterpolationInstance,
    epsilon: float,
    n: int,
    rng: np.random.Generator,
    n_samples: int | None = None,
) -> list[Any]:
    """``n`` independent runs of :func:`epsilon_mix`.

    When the prior is explicit, the tails are simulated through multinomial
    sample *counts* instead of materialized sample vectors, which gives the
    same output law at a small fraction of the cost.  Otherwise this simply
    loops over :func:`epsilon_mix`.
    """
    _check_epsilon(epsilon)
    if instance.prior.explicit is None:
        return [epsilon_mix(instance, epsilon, rng, n_samples=n_samples) for _ in range(n)]

    alpha = instance.alpha
    heads = rng.random(n) < alpha
    m = int(n - heads.sum())
    tail_ids = np.empty(0, dtype=np.int64)
    if m > 0:
        tail_ids = _epsilon_mix_tails_by_counts(instance, epsilon, m, rng, n_samples)
    out: list[Any] = []
    t = 0
    for h in heads:
        if h:
            out.append(instance.mechanism.run(rng))
        else:
            out.append(int(tail_ids[t]))
            t += 1
    return out


def _epsilon_mix_tails_by_counts(
    instance: InterpolationInstance,
    epsilon: float,
    m: int,
    rng: np.random.Generator,
    n_samples: int | None,
) -> np.ndarray:
    """Tail outcomes for ``m`` runs via per-solution multinomial counts.

    For a single run, the sorted sample vector groups into consecutive
    blocks, one per distinct support solution in (value desc, id asc)
    order, whose lengths are multinomial counts.  The trimmed weight kept
    among the first ``t`` sorted samples is a piecewise-linear function
    ``W(t)``, so each block's selection probability is proportional to
    ``W`` evaluated across the block's cumulative-count boundaries.
    """
    alpha = instance.alpha
    s = n_samples if n_samples is not None else sample_size(alpha, epsilon)
    explicit = instance.prior.explicit
    ids = np.array(explicit.support, dtype=np.int64)
    probs = np.array([explicit[int(i)] for i in ids], dtype=float)
    probs = probs / probs.sum()
    values = np.array([instance.value(int(i)) for i in ids], dtype=float)
    order = np.lexsort((ids, -values))
    ids, probs = ids[order], probs[order]

    remove = alpha * s
    k_zero = int(math.floor(remove))
    frac_keep = 1.0 - (remove - k_zero)
    n_ones = s - 1 - k_zero  # count of full-weight entries before the boundary

    counts = rng.multinomial(s, probs, size=m)
    cum = np.cumsum(counts, axis=1).astype(float)
    kept = np.minimum(cum, n_ones) + frac_keep * np.clip(cum - n_ones, 0.0, 1.0)
    total = kept[:, -1]  # == (1 - alpha) * s up to rounding
    u = rng.random(m) * total
    picked = (kept <= u[:, None]).sum(axis=1)
    return ids[picked]
