"""Exact oracles: the optimal constrained lottery and guarantee checking.

Constructs the best lottery within a total-variation budget of a prior,
shows its mass decomposition, tabulates the single-draw welfare bound,
and runs the Monte Carlo guarantee checker on a small instance.
"""

import numpy as np

from fairmix.core import (
    Distribution,
    FairPrior,
    InterpolationInstance,
    ValueFunction,
    WelfareMechanism,
)
from fairmix.oracle import build_p_opt, check_guarantees, smix_lower_bound, v_p_opt


def main() -> None:
    prior = Distribution({0: 0.6, 1: 0.3, 2: 0.1})
    value = ValueFunction.from_array([1.0, 2.0, 5.0])
    alpha = 0.3

    decomp = build_p_opt(prior, value, alpha)
    print(f"prior                 : {dict(prior.items())}")
    print(f"values                : {value.values.tolist()}")
    print(f"alpha                 : {alpha}")
    print(f"optimal lottery       : { {i: round(p, 3) for i, p in decomp.p_opt.items()} }")
    print(f"  moves {alpha} mass from the cheapest prior solutions onto id {decomp.opt}")
    print(f"  value               : {v_p_opt(decomp, value):.3f}")
    print(f"  kept part (scaled)  : { {i: round(p, 3) for i, p in decomp.p_alpha.items()} }")
    print(f"  removed part (scaled): { {i: round(p, 3) for i, p in decomp.p_alpha_tilde.items()} }")

    print("\nsingle-draw welfare bound factor min{lam, alpha*lam + (1-alpha)^2}:")
    for lam in (0.5, 0.8, 1.0):
        row = ", ".join(
            f"a={a:.2f}: {smix_lower_bound(lam, a):.3f}" for a in (0.1, 0.5, 0.9)
        )
        print(f"  lam={lam:.1f} -> {row}")

    instance = InterpolationInstance(
        value=value,
        prior=FairPrior.from_distribution(prior),
        mechanism=WelfareMechanism.constant(2),
        alpha=alpha,
    )
    report = check_guarantees(instance, n_runs=20_000, rng=np.random.default_rng(2))
    print("\nguarantee check (single-draw, 20000 runs):")
    for line in report.lines():
        print(f"  {line}")
    print(f"  passed: {report.passed}")


if __name__ == "__main__":
    main()
