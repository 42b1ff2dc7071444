"""Bipartite assignment: instances, matchings, welfare, and the prior."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from fairmix.assignment import (
    AssignmentSolution,
    BipartiteInstance,
    InfeasibleError,
    RoundRobinSampler,
    agent_utilities,
    greedy_matching,
    max_matching,
    nash_value,
    nash_welfare,
    round_robin_sample,
    solution_value,
    synthetic_instance,
    utilitarian_value,
)
from fairmix.core import Distribution, ParameterError, ScaleError, tv_distance


def brute_force_max(instance: BipartiteInstance) -> float:
    """Exact optimum by enumerating per-item agent subsets."""
    n_left = instance.n_left
    per_item = [
        list(itertools.combinations(range(n_left), instance.demand))
        for _ in range(instance.n_right)
    ]
    best = -1.0
    for combo in itertools.product(*per_item):
        load = np.zeros(n_left, dtype=int)
        total = 0.0
        ok = True
        for item, agents in enumerate(combo):
            for agent in agents:
                load[agent] += 1
                if load[agent] > instance.load_cap:
                    ok = False
                    break
                total += instance.weights[agent, item]
            if not ok:
                break
        if ok and total > best:
            best = total
    return best


class TestBipartiteInstance:
    def test_negative_weight_rejected(self):
        with pytest.raises(ParameterError):
            BipartiteInstance(np.array([[1.0, -0.5]]))

    def test_demand_exceeding_agents_rejected(self):
        with pytest.raises(InfeasibleError):
            BipartiteInstance(np.ones((2, 3)), demand=3, load_cap=5)

    def test_counting_infeasibility_rejected(self):
        # 3 items x demand 2 = 6 slots > 2 agents x cap 2 = 4.
        with pytest.raises((ParameterError, InfeasibleError)):
            BipartiteInstance(np.ones((2, 3)), demand=2, load_cap=2)

    def test_weights_are_frozen(self):
        inst = BipartiteInstance(np.ones((2, 2)), demand=1, load_cap=1)
        with pytest.raises(ValueError):
            inst.weights[0, 0] = 5.0

    def test_shapes(self):
        inst = synthetic_instance(6, 3, np.random.default_rng(0))
        assert (inst.n_left, inst.n_right) == (6, 3)
        assert inst.weights.shape == (6, 3)
        assert np.all(inst.weights >= 0) and np.all(inst.weights < 1)


class TestAssignmentSolution:
    def test_from_edges_dedups(self):
        sol = AssignmentSolution.from_edges([(0, 0), (0, 0), (1, 0)])
        assert len(sol.edges) == 2

    def test_sort_key_sorted(self):
        sol = AssignmentSolution.from_edges([(1, 0), (0, 1), (0, 0)])
        assert sol.sort_key() == ((0, 0), (0, 1), (1, 0))

    def test_validate_catches_unmet_demand(self):
        inst = BipartiteInstance(np.ones((2, 2)), demand=1, load_cap=1)
        with pytest.raises(InfeasibleError):
            AssignmentSolution.from_edges([(0, 0)]).validate(inst)

    def test_validate_catches_cap_violation(self):
        inst = BipartiteInstance(np.ones((2, 2)), demand=1, load_cap=1)
        with pytest.raises(InfeasibleError):
            AssignmentSolution.from_edges([(0, 0), (0, 1)]).validate(inst)

    def test_validate_catches_out_of_range(self):
        inst = BipartiteInstance(np.ones((2, 2)), demand=1, load_cap=1)
        with pytest.raises(ParameterError):
            AssignmentSolution.from_edges([(0, 0), (2, 1)]).validate(inst)


class TestWelfare:
    def test_solution_value_and_utilities(self):
        inst = BipartiteInstance(np.array([[2.0, 1.0], [0.5, 3.0]]), 1, 1)
        sol = AssignmentSolution.from_edges([(0, 0), (1, 1)])
        assert solution_value(inst, sol) == pytest.approx(5.0)
        assert agent_utilities(inst, sol).tolist() == [2.0, 3.0]

    def test_nash_welfare_frozen(self):
        assert nash_welfare(np.array([5.0, 5.0])) == pytest.approx(5.0)
        assert nash_welfare(np.array([1.0, 4.0])) == pytest.approx(2.0)
        assert nash_welfare(np.array([0.0, 9.0])) == 0.0

    def test_value_functions_wrap(self):
        inst = BipartiteInstance(np.array([[2.0, 1.0], [0.5, 3.0]]), 1, 1)
        sol = AssignmentSolution.from_edges([(0, 0), (1, 1)])
        assert utilitarian_value(inst)(sol) == pytest.approx(5.0)
        table = np.array([[1.0, 4.0], [4.0, 1.0]])
        nv = nash_value(table)
        assert nv(0) == pytest.approx(2.0)
        assert nv.max_value() == pytest.approx(2.0)


class TestMatchings:
    def test_greedy_hand_case(self):
        inst = BipartiteInstance(np.array([[1.0, 0.9], [0.9, 0.0]]), 1, 1)
        greedy = greedy_matching(inst)
        assert solution_value(inst, greedy) == pytest.approx(1.0)
        best = max_matching(inst)
        assert solution_value(inst, best) == pytest.approx(1.8)

    def test_greedy_is_half_of_max(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            n_left = int(rng.integers(2, 7))
            inst = synthetic_instance(n_left, int(rng.integers(1, n_left + 1)), rng)
            g = solution_value(inst, greedy_matching(inst))
            m = solution_value(inst, max_matching(inst))
            assert m >= g - 1e-12
            assert g >= 0.5 * m - 1e-12

    def test_max_matches_brute_force_small(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            n_left = int(rng.integers(2, 5))
            n_right = int(rng.integers(1, 4))
            demand = int(rng.integers(1, min(n_left, 2) + 1))
            cap = int(rng.integers(1, 4))
            if demand * n_right > cap * n_left:
                continue
            inst = BipartiteInstance(rng.random((n_left, n_right)), demand, cap)
            got = solution_value(inst, max_matching(inst))
            assert got == pytest.approx(brute_force_max(inst), abs=1e-9)

    def test_greedy_strands_where_flow_succeeds(self):
        weights = np.array([[9.0, 9.0, 1.0], [8.0, 8.0, 1.0], [0.1, 0.1, 0.1]])
        inst = BipartiteInstance(weights, demand=2, load_cap=2)
        with pytest.raises(InfeasibleError):
            greedy_matching(inst)
        sol = max_matching(inst)
        sol.validate(inst)

    def test_max_matching_scale_cap(self):
        inst = BipartiteInstance(np.ones((600, 2)), demand=1, load_cap=1)
        with pytest.raises(ScaleError):
            max_matching(inst)


class TestRoundRobin:
    def test_samples_are_feasible(self):
        rng = np.random.default_rng(42)
        inst = BipartiteInstance(rng.random((5, 3)), demand=2, load_cap=2)
        sampler = RoundRobinSampler(inst)
        for _ in range(200):
            sampler.sample(rng).validate(inst)

    def test_unit_path_matches_permutation_law(self):
        # demand=1/cap=1: agents pick favorites in a uniformly random order.
        weights = np.array([[0.9, 0.1], [0.8, 0.7], [0.2, 0.6]])
        inst = BipartiteInstance(weights, demand=1, load_cap=1)
        # Enumerate the law over all 6 agent orders by hand simulation.
        law: dict[tuple, float] = {}
        for perm in itertools.permutations(range(3)):
            taken: set[int] = set()
            edges = []
            for agent in perm:
                if len(taken) == inst.n_right:
                    break
                prefs = np.argsort(-weights[agent], kind="stable")
                for item in prefs:
                    if int(item) not in taken:
                        taken.add(int(item))
                        edges.append((agent, int(item)))
                        break
            key = tuple(sorted(edges))
            law[key] = law.get(key, 0.0) + 1 / 6
        rng = np.random.default_rng(43)
        counts: dict[tuple, int] = {}
        n = 6000
        for _ in range(n):
            key = RoundRobinSampler(inst).sample(rng).sort_key()
            counts[key] = counts.get(key, 0) + 1
        assert set(counts) <= set(law)
        err = sum(abs(counts.get(k, 0) / n - p) for k, p in law.items()) / 2
        assert err < 0.03

    def test_demand_totals(self):
        rng = np.random.default_rng(44)
        inst = BipartiteInstance(rng.random((4, 3)), demand=2, load_cap=2)
        sol = round_robin_sample(inst, rng)
        items = [e[1] for e in sol.edges]
        assert sorted(items) == [0, 0, 1, 1, 2, 2]

    def test_symmetric_marginals_roughly_uniform(self):
        inst = BipartiteInstance(np.full((4, 2), 0.5), demand=1, load_cap=1)
        rng = np.random.default_rng(45)
        sampler = RoundRobinSampler(inst)
        hits = np.zeros(4)
        n = 8000
        for _ in range(n):
            for agent, _item in sampler.sample(rng).edges:
                hits[agent] += 1
        # Each agent receives one of 2 slots among 4 agents: marginal 1/2.
        assert np.allclose(hits / n, 0.5, atol=0.03)
