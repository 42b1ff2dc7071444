"""Reviewer-paper matching from a bid CSV.

Parses the bundled bid sheet, turns ordinal bids into edge weights, and
compares the exact max-weight review assignment against the greedy one.
"""

import collections

from fairmix.assignment import greedy_matching, max_matching, solution_value
from fairmix.experiments import bundled_data_path
from fairmix.ingest import bids_to_instance, parse_bids


def main() -> None:
    path = bundled_data_path("mini_bids.csv")
    corpus = parse_bids(path)
    print(f"bid sheet      : {path}")
    print(f"reviewers      : {len(corpus.reviewers)}")
    print(f"papers         : {len(corpus.papers)}")
    levels = collections.Counter(corpus.labels.values())
    print(f"bid levels     : {dict(sorted(levels.items()))}")

    instance = bids_to_instance(corpus, demand=3)
    print(f"\neach paper needs {instance.demand} reviews; "
          f"each reviewer takes at most {instance.load_cap}")

    best = max_matching(instance)
    greedy = greedy_matching(instance)
    print(f"max-weight total bid weight: {solution_value(instance, best):.1f}")
    print(f"greedy total bid weight    : {solution_value(instance, greedy):.1f}")

    by_paper: dict[int, list[str]] = {}
    for a, j in best.edges:
        by_paper.setdefault(j, []).append(corpus.reviewers[a])
    print("\nmax-weight panel per paper:")
    for j, names in sorted(by_paper.items()):
        print(f"  {corpus.papers[j]}: {', '.join(sorted(names))}")


if __name__ == "__main__":
    main()
