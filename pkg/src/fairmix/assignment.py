"""Weighted bipartite assignment with demands and load caps.

Left nodes are *agents* (reviewers, claimants), right nodes are *items*
(papers, goods).  A complete assignment gives every item exactly
``demand`` distinct agents while no agent carries more than ``load_cap``
items.  Edge weights are non-negative affinities; the utilitarian value
of an assignment is its total edge weight.

The module provides a deterministic greedy heuristic, an exact
maximum-weight solver (min-cost flow, for oracle-scale instances), and a
randomized round-robin mechanism whose output lottery serves as a fair
prior: agents take turns in a fresh uniformly random order each pass,
each picking their favorite item with remaining demand.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable

import networkx as nx
import numpy as np

from .core import ParameterError, ScaleError, ValueFunction

#: Fixed-point scale used to express float edge weights as integer flow costs.
_COST_SCALE = 10**9

#: Largest ``n_left + n_right`` the exact flow solver accepts.
_MAX_FLOW_NODES = 500


class InfeasibleError(ValueError):
    """No complete assignment exists (or a heuristic failed to find one)."""


@dataclasses.dataclass(frozen=True, eq=False)
class BipartiteInstance:
    """A weighted bipartite assignment problem.

    Attributes
    ----------
    weights : ndarray of shape (n_left, n_right)
        Non-negative affinity of each agent for each item.
    demand : int
        Number of distinct agents each item must receive.
    load_cap : int
        Maximum number of items per agent.
    """

    weights: np.ndarray
    demand: int = 1
    load_cap: int = 1

    def __post_init__(self) -> None:
        arr = np.asarray(self.weights, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ParameterError("weights must be a non-empty 2-d matrix")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ParameterError("weights must be finite and non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)
        if int(self.demand) < 1 or int(self.load_cap) < 1:
            raise ParameterError("demand and load_cap must be >= 1")
        object.__setattr__(self, "demand", int(self.demand))
        object.__setattr__(self, "load_cap", int(self.load_cap))
        if self.demand > self.n_left:
            raise InfeasibleError(
                f"items need {self.demand} distinct agents but only {self.n_left} exist"
            )
        if self.n_left * self.load_cap < self.n_right * self.demand:
            raise InfeasibleError(
                f"total load capacity {self.n_left * self.load_cap} cannot cover "
                f"total demand {self.n_right * self.demand}"
            )

    @property
    def n_left(self) -> int:
        return self.weights.shape[0]

    @property
    def n_right(self) -> int:
        return self.weights.shape[1]


@dataclasses.dataclass(frozen=True)
class AssignmentSolution:
    """A complete assignment, as a frozen set of ``(agent, item)`` edges."""

    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]]) -> "AssignmentSolution":
        return cls(frozenset((int(a), int(j)) for a, j in edges))

    def sort_key(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def validate(self, instance: BipartiteInstance) -> None:
        """Raise unless this is a complete, cap-respecting assignment."""
        load = np.zeros(instance.n_left, dtype=int)
        fill = np.zeros(instance.n_right, dtype=int)
        for a, j in self.edges:
            if not (0 <= a < instance.n_left and 0 <= j < instance.n_right):
                raise ParameterError(f"edge ({a}, {j}) out of range")
            load[a] += 1
            fill[j] += 1
        if np.any(load > instance.load_cap):
            raise InfeasibleError("an agent exceeds the load cap")
        if np.any(fill != instance.demand):
            raise InfeasibleError("an item does not meet its demand exactly")


def solution_value(instance: BipartiteInstance, solution: AssignmentSolution) -> float:
    """Utilitarian value: total weight of the assignment's edges."""
    w = instance.weights
    return float(sum(w[a, j] for a, j in solution.edges))


def agent_utilities(instance: BipartiteInstance, solution: AssignmentSolution) -> np.ndarray:
    """Per-agent utility: total weight of each agent's assigned edges."""
    out = np.zeros(instance.n_left, dtype=float)
    for a, j in solution.edges:
        out[a] += instance.weights[a, j]
    return out


def nash_welfare(utils: np.ndarray) -> float:
    """Geometric mean of a utility vector (0 if any utility is 0).

    >>> nash_welfare([1.0, 4.0])
    2.0
    >>> nash_welfare([0.0, 9.0])
    0.0
    """
    utils = np.asarray(utils, dtype=float)
    if np.any(utils < 0.0):
        raise ParameterError("utilities must be non-negative")
    if np.any(utils == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(utils))))


def utilitarian_value(instance: BipartiteInstance) -> ValueFunction:
    """Value function mapping an assignment to its total edge weight."""
    return ValueFunction(lambda sol: solution_value(instance, sol))


def nash_value(utilities: np.ndarray) -> ValueFunction:
    """Value function over solution ids from a per-agent utility table.

    ``utilities[a, i]`` is agent ``a``'s utility under solution ``i``; the
    value of solution ``i`` is the geometric mean of column ``i``.
    """
    table = np.asarray(utilities, dtype=float)
    if table.ndim != 2 or table.size == 0:
        raise ParameterError("utilities must be a non-empty agents x solutions table")
    return ValueFunction.from_array([nash_welfare(table[:, i]) for i in range(table.shape[1])])


def synthetic_instance(
    n_left: int, n_right: int, rng: np.random.Generator
) -> BipartiteInstance:
    """Goods-division instance: i.i.d. uniform ``[0, 1)`` affinities, unit
    demand and unit load cap."""
    weights = rng.random((n_left, n_right))
    return BipartiteInstance(weights=weights, demand=1, load_cap=1)


# ---------------------------------------------------------------------------
# solvers


def greedy_matching(instance: BipartiteInstance) -> AssignmentSolution:
    """Deterministic greedy assignment by descending edge weight.

    Edges are scanned by weight descending with ties broken by agent then
    item index ascending; an edge is taken whenever both endpoints still
    have room.  Raises :class:`InfeasibleError` if the scan strands an
    item (impossible when caps are slack, possible in tight corner cases).
    """
    L, R = instance.n_left, instance.n_right
    agents, items = np.divmod(np.arange(L * R), R)
    order = np.lexsort((items, agents, -instance.weights.ravel()))
    load = np.zeros(L, dtype=int)
    fill = np.zeros(R, dtype=int)
    edges: list[tuple[int, int]] = []
    needed = R * instance.demand
    for e in order:
        a, j = int(agents[e]), int(items[e])
        if load[a] < instance.load_cap and fill[j] < instance.demand:
            load[a] += 1
            fill[j] += 1
            edges.append((a, j))
            if len(edges) == needed:
                break
    solution = AssignmentSolution.from_edges(edges)
    try:
        solution.validate(instance)
    except InfeasibleError as exc:
        raise InfeasibleError(f"greedy scan stranded an item: {exc}") from exc
    return solution


def max_matching(instance: BipartiteInstance) -> AssignmentSolution:
    """Exact maximum-weight complete assignment via min-cost flow.

    Weights are scaled to integers (9 decimal digits) because the flow
    solver requires integral costs.  Limited to oracle-scale instances.
    """
    L, R = instance.n_left, instance.n_right
    if L + R > _MAX_FLOW_NODES:
        raise ScaleError(
            f"exact assignment supports at most {_MAX_FLOW_NODES} nodes, got {L + R}"
        )
    G = nx.DiGraph()
    for a in range(L):
        G.add_edge("s", ("a", a), capacity=instance.load_cap, weight=0)
        for j in range(R):
            cost = -int(round(instance.weights[a, j] * _COST_SCALE))
            G.add_edge(("a", a), ("p", j), capacity=1, weight=cost)
    for j in range(R):
        G.add_edge(("p", j), "t", capacity=instance.demand, weight=0)
    flow = nx.max_flow_min_cost(G, "s", "t")
    edges = [
        (a, j)
        for a in range(L)
        for j in range(R)
        if flow[("a", a)].get(("p", j), 0) > 0
    ]
    solution = AssignmentSolution.from_edges(edges)
    solution.validate(instance)
    return solution


# ---------------------------------------------------------------------------
# randomized round-robin mechanism (fair prior)


class RoundRobinSampler:
    """Samples complete assignments by randomized round robin.

    Each pass draws a fresh uniformly random agent order; each agent in
    turn takes its favorite item (highest affinity, ties to the lowest
    item index) that still has remaining demand and that the agent does
    not already hold.  Passes repeat until all demand is met.
    """

    def __init__(self, instance: BipartiteInstance):
        self.instance = instance
        # Row a lists items by agent a's affinity descending, index ascending.
        self.pref = np.argsort(-instance.weights, axis=1, kind="stable")

    def sample(self, rng: np.random.Generator) -> AssignmentSolution:
        inst = self.instance
        if inst.demand == 1 and inst.load_cap == 1:
            return self._sample_unit(rng)
        L, R = inst.n_left, inst.n_right
        remaining = np.full(R, inst.demand, dtype=int)
        load = np.zeros(L, dtype=int)
        held: list[set[int]] = [set() for _ in range(L)]
        edges: list[tuple[int, int]] = []
        needed = R * inst.demand
        while len(edges) < needed:
            progressed = False
            for a in rng.permutation(L):
                if load[a] >= inst.load_cap:
                    continue
                for j in self.pref[a]:
                    if remaining[j] > 0 and j not in held[a]:
                        remaining[j] -= 1
                        load[a] += 1
                        held[a].add(int(j))
                        edges.append((int(a), int(j)))
                        progressed = True
                        break
                if len(edges) == needed:
                    break
            if not progressed:
                raise InfeasibleError("round robin deadlocked before meeting demand")
        return AssignmentSolution.from_edges(edges)

    def _sample_unit(self, rng: np.random.Generator) -> AssignmentSolution:
        # Unit demand and cap: a single pass suffices, and only the first
        # n_right agents in the random order ever receive an item.
        inst = self.instance
        taken = np.zeros(inst.n_right, dtype=bool)
        edges: list[tuple[int, int]] = []
        for a in rng.permutation(inst.n_left):
            for j in self.pref[a]:
                if not taken[j]:
                    taken[j] = True
                    edges.append((int(a), int(j)))
                    break
            if len(edges) == inst.n_right:
                break
        return AssignmentSolution.from_edges(edges)


def round_robin_sample(
    instance: BipartiteInstance, rng: np.random.Generator
) -> AssignmentSolution:
    """One round-robin draw (convenience wrapper around the sampler).

    For repeated sampling construct a :class:`RoundRobinSampler` once; it
    caches the per-agent preference orders.
    """
    return RoundRobinSampler(instance).sample(rng)
