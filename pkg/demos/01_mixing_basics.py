"""Single-draw and sample-trim mixing on a tiny explicit instance.

Builds a five-solution instance whose fair prior ignores the best
solution, then shows how both algorithms shift probability toward it
while the output law stays within total-variation ``alpha`` of the prior.
"""

import numpy as np

from fairmix.core import (
    Distribution,
    FairPrior,
    InterpolationInstance,
    ValueFunction,
    WelfareMechanism,
    expected_value,
    tv_distance,
)
from fairmix.mix import epsilon_mix_many, sample_size, simple_mix_distribution, simple_mix_many


def empirical_law(outputs, n_solutions: int) -> Distribution:
    counts = np.bincount(np.asarray(outputs), minlength=n_solutions)
    return Distribution.from_array(counts / counts.sum())


def main() -> None:
    value = ValueFunction.from_array([10.0, 6.0, 5.0, 2.0, 1.0])
    prior = Distribution({1: 0.3, 2: 0.3, 3: 0.2, 4: 0.2})  # never picks solution 0
    alpha = 0.3
    instance = InterpolationInstance(
        value=value,
        prior=FairPrior.from_distribution(prior),
        mechanism=WelfareMechanism.constant(value.argmax()),
        alpha=alpha,
    )

    print(f"prior law            : {dict(prior.items())}")
    print(f"prior expected value : {expected_value(prior, value):.3f}")
    print(f"fairness budget alpha: {alpha}")

    rng = np.random.default_rng(1)
    n_runs = 20_000

    closed = simple_mix_distribution(prior, value.argmax(), alpha)
    outs = simple_mix_many(instance, n_runs, rng)
    law = empirical_law(outs, 5)
    print("\nsingle-draw mixing")
    print(f"  closed-form law    : { {i: round(p, 3) for i, p in closed.items()} }")
    print(f"  empirical law      : { {i: round(p, 3) for i, p in law.items()} }")
    print(f"  expected value     : {expected_value(closed, value):.3f}")
    print(f"  tv(law, prior)     : {tv_distance(closed, prior):.3f} <= {alpha}")

    epsilon = 0.1
    outs = epsilon_mix_many(instance, epsilon, n_runs, rng)
    law = empirical_law(outs, 5)
    print("\nsample-trim mixing")
    print(f"  default sample size: {sample_size(alpha, epsilon)} (epsilon={epsilon})")
    print(f"  empirical law      : { {i: round(p, 3) for i, p in law.items()} }")
    print(f"  empirical value    : {expected_value(law, value):.3f}")
    print(f"  tv(law, prior)     : {tv_distance(law, prior):.3f} (budget {alpha} + noise)")


if __name__ == "__main__":
    main()
