"""Core model: solution spaces, lotteries, value functions, and instances.

A *solution* is an outcome of some selection problem (an allocation, a
matching, a panel, ...).  Small enumerable problems identify solutions with
integer ids; structured scenarios may use richer hashable objects (tuples,
frozen dataclasses) as long as they expose a deterministic sort key via
:func:`canonical_key`.

A :class:`Distribution` is a sparse lottery over integer solution ids.  A
:class:`FairPrior` wraps sampling access to the lottery produced by some
baseline "fair" mechanism; an explicit :class:`Distribution` is optional and
only required by the exact oracles.  A :class:`WelfareMechanism` wraps the
competing high-welfare mechanism together with its multiplicative welfare
guarantee ``lam``.  An :class:`InterpolationInstance` bundles all of the
above with a fairness budget ``alpha``: the maximum total-variation distance
an output lottery may move away from the fair prior.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

#: Absolute tolerance for probability-mass bookkeeping (normalization checks,
#: fairness-budget comparisons, mass-removal arithmetic).
NORM_TOL = 1e-9


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class ScaleError(ParameterError):
    """An input is too large for an exact (enumerating) code path."""


# ---------------------------------------------------------------------------
# distributions


class Distribution:
    """A sparse probability distribution over integer solution ids.

    Entries with probability exactly zero are dropped on construction, all
    probabilities must be non-negative, and the total mass must equal one up
    to :data:`NORM_TOL`.  Instances are immutable.

    >>> d = Distribution({3: 0.25, 1: 0.75, 2: 0.0})
    >>> d.support
    (1, 3)
    >>> d[2]
    0.0
    """

    __slots__ = ("_probs",)

    def __init__(self, entries: Mapping[int, float]):
        probs: dict[int, float] = {}
        for sid, p in entries.items():
            p = float(p)
            if p < 0.0:
                raise ParameterError(f"negative probability {p!r} for solution {sid!r}")
            if p > 0.0:
                probs[int(sid)] = p
        total = sum(probs.values())
        if abs(total - 1.0) > NORM_TOL:
            raise ParameterError(f"probabilities sum to {total!r}, expected 1")
        self._probs = probs

    @classmethod
    def from_array(cls, probs: Sequence[float]) -> "Distribution":
        """Build a distribution over ids ``0..n-1`` from a dense vector."""
        return cls({i: float(p) for i, p in enumerate(probs)})

    @classmethod
    def point_mass(cls, sid: int) -> "Distribution":
        return cls({sid: 1.0})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._probs))

    def items(self) -> Iterator[tuple[int, float]]:
        return iter(sorted(self._probs.items()))

    def as_dict(self) -> dict[int, float]:
        return dict(self._probs)

    def __getitem__(self, sid: int) -> float:
        return self._probs.get(sid, 0.0)

    def __contains__(self, sid: int) -> bool:
        return sid in self._probs

    def __len__(self) -> int:
        return len(self._probs)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self._probs.items()))
        return f"Distribution({{{inner}}})"


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Total-variation distance ``0.5 * sum_i |p_i - q_i|``.

    >>> tv_distance(Distribution({0: 0.2, 1: 0.8}), Distribution({0: 0.6, 1: 0.4}))
    0.4
    """
    keys = set(p.as_dict()) | set(q.as_dict())
    return 0.5 * sum(abs(p[k] - q[k]) for k in keys)


def is_alpha_fair(p: Distribution, prior: Distribution, alpha: float) -> bool:
    """Whether ``p`` stays within total-variation ``alpha`` of ``prior``.

    The comparison allows :data:`NORM_TOL` of slack so that lotteries sitting
    exactly on the budget (a common boundary case) are accepted.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha!r}")
    return tv_distance(p, prior) <= alpha + NORM_TOL


# ---------------------------------------------------------------------------
# value functions


class ValueFunction:
    """Non-negative welfare value attached to each solution.

    Wraps a callable ``solution -> float``.  When the solution space is
    enumerable the ids ``0..n-1`` and their values can be given as a dense
    vector via :meth:`from_array`, which also enables vectorized lookups
    through :attr:`values` and exact maximization through :meth:`argmax`.
    """

    __slots__ = ("_fn", "domain", "values")

    def __init__(
        self,
        fn: Callable[[Any], float],
        domain: Sequence[int] | None = None,
        values: np.ndarray | None = None,
    ):
        self._fn = fn
        self.domain = tuple(domain) if domain is not None else None
        self.values = values

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ValueFunction":
        """Value function over ids ``0..n-1`` backed by a dense vector."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("values must be a non-empty 1-d vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ParameterError("values must be finite and non-negative")
        arr = arr.copy()
        arr.setflags(write=False)
        return cls(lambda sid: float(arr[sid]), domain=range(arr.size), values=arr)

    def __call__(self, solution: Any) -> float:
        v = float(self._fn(solution))
        if not v >= 0.0:
            raise ParameterError(f"value of {solution!r} is {v!r}, must be >= 0")
        return v

    def argmax(self) -> int:
        """Id of the highest-valued solution; ties go to the smallest id."""
        if self.values is None:
            raise ParameterError("argmax requires an enumerable (array-backed) value function")
        return int(np.argmax(self.values))  # np.argmax returns the first maximizer

    def max_value(self) -> float:
        return self(self.argmax())


def expected_value(dist: Distribution, value: ValueFunction | Callable[[int], float]) -> float:
    """Expected value of ``value`` under the lottery ``dist``.

    >>> expected_value(Distribution({0: 0.5, 1: 0.5}), ValueFunction.from_array([2.0, 4.0]))
    3.0
    """
    return sum(p * value(sid) for sid, p in dist.items())


# ---------------------------------------------------------------------------
# priors and mechanisms


class FairPrior:
    """Sampling access to the output lottery of a baseline fair mechanism.

    Only sampling is required in general; the exact oracles additionally
    need the lottery itself, supplied as ``explicit``.  ``sample_many``
    defaults to repeated single draws but may be overridden with a faster
    vectorized implementation.
    """

    __slots__ = ("_sample", "_sample_many", "explicit")

    def __init__(
        self,
        sampler: Callable[[np.random.Generator], Any],
        explicit: Distribution | None = None,
        sample_many: Callable[[np.random.Generator, int], Sequence[Any]] | None = None,
    ):
        self._sample = sampler
        self._sample_many = sample_many
        self.explicit = explicit

    @classmethod
    def from_distribution(cls, dist: Distribution) -> "FairPrior":
        """Prior with both sampling access and the explicit lottery."""
        ids = np.array(dist.support, dtype=np.int64)
        probs = np.array([dist[i] for i in ids], dtype=float)
        probs = probs / probs.sum()  # exact renormalization for the sampler

        def sample(rng: np.random.Generator) -> int:
            return int(ids[rng.choice(probs.size, p=probs)])

        def sample_many(rng: np.random.Generator, n: int) -> np.ndarray:
            return ids[rng.choice(probs.size, size=n, p=probs)]

        return cls(sample, explicit=dist, sample_many=sample_many)

    def sample(self, rng: np.random.Generator) -> Any:
        return self._sample(rng)

    def sample_many(self, rng: np.random.Generator, n: int) -> list[Any] | np.ndarray:
        if self._sample_many is not None:
            return self._sample_many(rng, n)
        return [self._sample(rng) for _ in range(n)]


class WelfareMechanism:
    """The competing high-welfare (possibly randomized) mechanism.

    ``lam`` is its multiplicative welfare guarantee: every output solution
    ``A`` satisfies ``value(A) >= lam * value(Opt)`` where ``Opt`` is a
    welfare-maximizing solution.  ``lam`` must lie in ``(0, 1]``.
    """

    __slots__ = ("_run", "lam")

    def __init__(self, run: Callable[[np.random.Generator], Any], lam: float = 1.0):
        if not 0.0 < lam <= 1.0:
            raise ParameterError(f"lam must lie in (0, 1], got {lam!r}")
        self._run = run
        self.lam = float(lam)

    @classmethod
    def constant(cls, solution: Any, lam: float = 1.0) -> "WelfareMechanism":
        """Deterministic mechanism that always outputs ``solution``."""
        return cls(lambda rng: solution, lam=lam)

    def run(self, rng: np.random.Generator) -> Any:
        return self._run(rng)


@dataclasses.dataclass(frozen=True)
class InterpolationInstance:
    """One fairness/welfare interpolation problem.

    Attributes
    ----------
    value : ValueFunction
        Welfare of each solution.
    prior : FairPrior
        The fair baseline lottery (sampling access, optionally explicit).
    mechanism : WelfareMechanism
        The high-welfare mechanism with guarantee ``lam``.
    alpha : float
        Fairness budget in ``[0, 1]``: output lotteries must stay within
        total-variation ``alpha`` of the prior.  ``alpha = 0`` forces the
        prior itself, ``alpha = 1`` allows the mechanism unchanged.
    """

    value: ValueFunction
    prior: FairPrior
    mechanism: WelfareMechanism
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha!r}")


# ---------------------------------------------------------------------------
# generic solution ordering


def canonical_key(solution: Any) -> Any:
    """Deterministic sort key used to break value ties between solutions.

    Integer ids order by value; structured solutions must either be tuples
    (ordered directly) or expose a ``sort_key()`` method returning one.
    """
    if isinstance(solution, (int, np.integer)):
        return int(solution)
    key_fn = getattr(solution, "sort_key", None)
    if key_fn is not None:
        return key_fn()
    if isinstance(solution, tuple):
        return solution
    raise TypeError(f"solution {solution!r} has no canonical ordering")
