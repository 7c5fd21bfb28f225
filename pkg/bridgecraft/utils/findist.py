"""Finite probability distributions, morphisms between them and fiber products.

Declared distributions use exact rational arithmetic. Anything estimated from
samples (``estimate_advantage``, ``GameReport``) is floating point.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable, Optional, Sequence, Tuple

from bridgecraft.errors import MorphismError, ParameterError
from bridgecraft.utils.streams import Rng, run_trials

logger = logging.getLogger("bridgecraft.utils.findist")

# ln(2 / 0.05): two-sided 95% Hoeffding constant
HOEFFDING_LOG_TERM = math.log(40)


@dataclass(frozen=True)
class FiniteDistribution:
    """Explicit support and exact probabilities."""

    support: Tuple[Hashable, ...]
    probs: Tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(self.support)
        probs = tuple(Fraction(p) for p in self.probs)
        if len(support) != len(probs):
            raise ParameterError(f"support has {len(support)} entries but probs has {len(probs)}")
        if not support:
            raise ParameterError("distribution support is empty")
        if len(set(support)) != len(support):
            raise ParameterError("support entries must be distinct")
        if any(p < 0 for p in probs):
            raise ParameterError("probabilities must be nonnegative")
        total = sum(probs, Fraction(0))
        if total != 1:
            raise ParameterError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, values: Iterable[Hashable]) -> "FiniteDistribution":
        values = tuple(values)
        if not values:
            raise ParameterError("uniform distribution needs at least one value")
        return cls(values, tuple(Fraction(1, len(values)) for _ in values))

    @classmethod
    def point(cls, value: Hashable) -> "FiniteDistribution":
        return cls((value,), (Fraction(1),))

    @classmethod
    def from_dict(cls, weights: Dict[Hashable, Any]) -> "FiniteDistribution":
        return cls(tuple(weights.keys()), tuple(Fraction(w) for w in weights.values()))

    def prob(self, value: Hashable) -> Fraction:
        try:
            return self.probs[self.support.index(value)]
        except ValueError:
            return Fraction(0)

    def as_dict(self) -> Dict[Hashable, Fraction]:
        return dict(zip(self.support, self.probs))

    def __contains__(self, value: object) -> bool:
        return value in self.support

    def __len__(self) -> int:
        return len(self.support)

    def sample(self, rng: Rng) -> Hashable:
        """Draw one value; exact over the common denominator of the probabilities."""
        denominator = math.lcm(*(p.denominator for p in self.probs))
        ticket = rng.randrange(denominator)
        acc = 0
        for value, p in zip(self.support, self.probs):
            acc += p.numerator * (denominator // p.denominator)
            if ticket < acc:
                return value
        return self.support[-1]


@dataclass(frozen=True)
class DistMorphism:
    """A map of sets from ``source``'s support into ``target``'s support."""

    source: FiniteDistribution
    target: FiniteDistribution
    map: Callable[[Hashable], Hashable]

    def __call__(self, value: Hashable) -> Hashable:
        return self.map(value)

    def image(self, value: Hashable) -> Hashable:
        x = self.map(value)
        if x not in self.target:
            raise MorphismError(f"{value!r} maps to {x!r}, which is outside the target support")
        return x


def check_morphism(m: DistMorphism) -> Tuple[bool, Optional[Hashable]]:
    """Check the fiber-sum law exactly.

    Returns:
        ``(True, None)`` when every target point's probability equals the mass of
        its preimage, otherwise ``(False, x)`` for the first offending point.
    """
    mass: Dict[Hashable, Fraction] = defaultdict(Fraction)
    for y, p in zip(m.source.support, m.source.probs):
        mass[m.image(y)] += p

    for x, px in zip(m.target.support, m.target.probs):
        if mass[x] != px:
            return False, x
    return True, None


@dataclass(frozen=True)
class FiberProduct:
    distribution: FiniteDistribution
    pr1: DistMorphism
    pr2: DistMorphism
    structural: DistMorphism


def fiber_product(m1: DistMorphism, m2: DistMorphism) -> FiberProduct:
    """Coupled distribution of pairs (y1, y2) with m1(y1) = m2(y2).

    A pair over x gets Pr{y1}·Pr{y2}/Pr{x}; pairs over a null point keep
    probability zero but stay in the support.
    """
    if m1.target != m2.target:
        raise MorphismError("fiber product needs both morphisms to share a target")
    for m in (m1, m2):
        ok, bad = check_morphism(m)
        if not ok:
            raise MorphismError(f"input is not a morphism: fiber-sum law fails at {bad!r}")

    base = m1.target
    support = []
    probs = []
    for y1, p1 in zip(m1.source.support, m1.source.probs):
        x = m1.image(y1)
        px = base.prob(x)
        for y2, p2 in zip(m2.source.support, m2.source.probs):
            if m2.image(y2) != x:
                continue
            support.append((y1, y2))
            probs.append(p1 * p2 / px if px > 0 else Fraction(0))

    dist = FiniteDistribution(tuple(support), tuple(probs))
    logger.debug(f"Fiber product has {len(dist)} pairs")
    return FiberProduct(
        distribution=dist,
        pr1=DistMorphism(dist, m1.source, lambda pair: pair[0]),
        pr2=DistMorphism(dist, m2.source, lambda pair: pair[1]),
        structural=DistMorphism(dist, base, lambda pair: m1(pair[0])),
    )


def fiber(m: DistMorphism, x: Hashable) -> FiniteDistribution:
    """Conditional distribution of the source given that its image is ``x``."""
    px = m.target.prob(x)
    if px == 0:
        raise MorphismError(f"cannot take the fiber over {x!r}: it has probability zero")
    pairs = [(y, p / px) for y, p in zip(m.source.support, m.source.probs) if m.image(y) == x]
    return FiniteDistribution(tuple(y for y, _ in pairs), tuple(p for _, p in pairs))


@dataclass(frozen=True)
class Sampler:
    """A randomized procedure producing values of some distribution.

    ``fiber`` is set when the sampler is constructible on fibers: given a value
    ``x`` of the base it draws from the fiber over ``x``.
    """

    draw: Callable[[Rng], Any]
    fiber: Optional[Callable[[Rng, Any], Any]] = None

    @classmethod
    def from_distribution(cls, dist: FiniteDistribution) -> "Sampler":
        return cls(draw=dist.sample)

    @property
    def fiber_constructible(self) -> bool:
        return self.fiber is not None

    def sample(self, rng: Rng) -> Any:
        return self.draw(rng)

    def sample_fiber(self, rng: Rng, x: Any) -> Any:
        if self.fiber is None:
            raise ParameterError("sampler is not constructible on fibers")
        return self.fiber(rng, x)


@dataclass(frozen=True)
class GameReport:
    """Outcome of a two-sided experiment.

    ``wins0``/``wins1`` count the runs of experiment 0/1 where the adversary
    (or distinguisher) output 1; each experiment ran ``trials`` times.
    """

    trials: int
    wins0: int
    wins1: int
    seed: int
    label: str = ""
    extra: Dict[str, Any] = field(default_factory=dict, compare=False)
    # per-trial outputs of experiments 0 and 1; not serialized
    outcomes: Tuple[Tuple[int, ...], Tuple[int, ...]] = field(default=((), ()), compare=False, repr=False)

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trials must be positive, got {self.trials}")
        for wins in (self.wins0, self.wins1):
            if not 0 <= wins <= self.trials:
                raise ParameterError(f"win count {wins} outside [0, {self.trials}]")

    @property
    def advantage(self) -> float:
        return abs(self.wins1 - self.wins0) / self.trials

    @property
    def half_width(self) -> float:
        return math.sqrt(HOEFFDING_LOG_TERM / self.trials)

    def within_band(self) -> bool:
        return self.advantage <= self.half_width

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "trials": self.trials,
            "wins0": self.wins0,
            "wins1": self.wins1,
            "advantage": self.advantage,
            "half_width": self.half_width,
            "seed": self.seed,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GameReport":
        known = {"label", "trials", "wins0", "wins1", "advantage", "half_width", "seed"}
        return cls(
            trials=int(data["trials"]),
            wins0=int(data["wins0"]),
            wins1=int(data["wins1"]),
            seed=int(data["seed"]),
            label=str(data.get("label", "")),
            extra={k: v for k, v in data.items() if k not in known},
        )


def count_ones(bits: Sequence[int]) -> int:
    return sum(1 for b in bits if b == 1)


def estimate_advantage(
    distinguisher: Callable[[Any], int],
    s0: Sampler,
    s1: Sampler,
    trials: int,
    rng: Rng,
    jobs: int = 1,
    label: str = "distinguish",
) -> GameReport:
    """Estimate |Pr[D(s1) = 1] - Pr[D(s0) = 1]| from ``trials`` samples of each side."""
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    seed = rng.getrandbits(64)

    def side(sampler: Sampler) -> Callable[[int, Rng], int]:
        return lambda _i, trial_rng: distinguisher(sampler.sample(trial_rng))

    outputs0 = run_trials(side(s0), trials, seed, f"{label}/0", jobs)
    outputs1 = run_trials(side(s1), trials, seed, f"{label}/1", jobs)
    report = GameReport(
        trials,
        count_ones(outputs0),
        count_ones(outputs1),
        seed,
        label,
        outcomes=(tuple(int(o) for o in outputs0), tuple(int(o) for o in outputs1)),
    )
    logger.info(f"{label}: advantage {report.advantage:.4f} +/- {report.half_width:.4f} over {trials} trials")
    return report
