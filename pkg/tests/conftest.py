"""Shared builders for the test suite.

Every test seeds its own generator, so the suite is reproducible run to run
without global state.
"""

from __future__ import annotations

import numpy as np

from fairmix.core import (
    Distribution,
    FairPrior,
    InterpolationInstance,
    ValueFunction,
    WelfareMechanism,
)


def make_instance(
    values,
    probs,
    alpha: float,
    lam: float | None = None,
    a: int | None = None,
) -> InterpolationInstance:
    """Explicit-prior instance over ``len(values)`` integer solutions.

    ``a`` defaults to the argmax (an exact mechanism); ``lam`` defaults to
    the true ratio V(a)/V(Opt), so the declared guarantee is honest.
    """
    value = ValueFunction.from_array(values)
    dist = Distribution.from_array(probs)
    if a is None:
        a = value.argmax()
    if lam is None:
        lam = value(a) / value.max_value() if value.max_value() > 0 else 1.0
    mechanism = WelfareMechanism.constant(a, lam=lam)
    return InterpolationInstance(
        value=value,
        prior=FairPrior.from_distribution(dist),
        mechanism=mechanism,
        alpha=alpha,
    )


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random full-support probability vector."""
    w = rng.random(n) + 1e-3
    return w / w.sum()


def dyadic_probs(rng: np.random.Generator, n: int, denom_log2: int = 10) -> np.ndarray:
    """Random probabilities that are exact binary fractions (sum exactly 1)."""
    counts = rng.multinomial(2**denom_log2, np.full(n, 1.0 / n))
    return counts / float(2**denom_log2)


def random_instance(
    rng: np.random.Generator,
    n_max: int = 10,
    alpha: float | None = None,
    exact_mechanism: bool = True,
    dyadic: bool = False,
) -> InterpolationInstance:
    """Random enumerable instance with positive max value."""
    n = int(rng.integers(2, n_max + 1))
    values = rng.random(n) * float(rng.choice([1.0, 10.0]))
    values[int(rng.integers(n))] += 0.5  # ensure a clearly positive optimum
    probs = dyadic_probs(rng, n) if dyadic else random_simplex(rng, n)
    if alpha is None:
        alpha = float(rng.uniform(0.05, 0.95))
    if exact_mechanism:
        a = None
    else:
        positive = [i for i, v in enumerate(values) if v > 0]
        a = int(rng.choice(positive))
    return make_instance(values, probs, alpha, a=a)
