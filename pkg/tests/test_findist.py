import random
from fractions import Fraction

import pytest

from bridgecraft.errors import MorphismError, ParameterError
from bridgecraft.utils.findist import (
    DistMorphism,
    FiniteDistribution,
    GameReport,
    Sampler,
    check_morphism,
    estimate_advantage,
    fiber,
    fiber_product,
)


def _random_distribution(rng, values):
    weights = [rng.randint(1, 9) for _ in values]
    total = sum(weights)
    return FiniteDistribution(tuple(values), tuple(Fraction(w, total) for w in weights))


def _pushforward(source, fn):
    mass = {}
    for y, p in zip(source.support, source.probs):
        mass[fn(y)] = mass.get(fn(y), Fraction(0)) + p
    return FiniteDistribution.from_dict(mass)


def test_validation():
    with pytest.raises(ParameterError):
        FiniteDistribution((0, 1), (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ParameterError):
        FiniteDistribution((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ParameterError):
        FiniteDistribution((0, 1), (Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(ParameterError):
        FiniteDistribution((), ())


def test_uniform_and_point():
    dist = FiniteDistribution.uniform(range(4))
    assert dist.prob(2) == Fraction(1, 4)
    assert dist.prob(9) == 0
    assert FiniteDistribution.point("x").prob("x") == 1


def test_check_morphism_detects_bad_maps():
    y = FiniteDistribution.uniform(range(4))
    x = FiniteDistribution.uniform((0, 1))
    assert check_morphism(DistMorphism(y, x, lambda v: v % 2)) == (True, None)
    ok, bad = check_morphism(DistMorphism(y, x, lambda v: int(v == 0)))
    assert not ok and bad in (0, 1)
    with pytest.raises(MorphismError):
        check_morphism(DistMorphism(y, x, lambda v: v))


def test_fiber_product_laws_on_random_cases():
    rng = random.Random(99)
    for _ in range(100):
        k = rng.randint(1, 3)
        y1 = _random_distribution(rng, [(i, 1) for i in range(rng.randint(1, 5))])
        f1 = lambda v, k=k: v[0] % k
        x = _pushforward(y1, f1)
        # refine every point of x into a few weighted pieces
        pieces = {}
        for xv, px in zip(x.support, x.probs):
            weights = [rng.randint(1, 5) for _ in range(rng.randint(1, 3))]
            for j, w in enumerate(weights):
                pieces[(xv, j)] = px * Fraction(w, sum(weights))
        y2 = FiniteDistribution.from_dict(pieces)
        product = fiber_product(DistMorphism(y1, x, f1), DistMorphism(y2, x, lambda v: v[0]))
        assert sum(product.distribution.probs, Fraction(0)) == 1
        for m in (product.pr1, product.pr2, product.structural):
            assert check_morphism(m) == (True, None)


def test_fiber_product_with_identity_recovers_the_other_factor():
    x = FiniteDistribution.from_dict({0: Fraction(1, 3), 1: Fraction(2, 3)})
    y = FiniteDistribution.from_dict({"a": Fraction(1, 6), "b": Fraction(1, 6), "c": Fraction(2, 3)})
    to_x = {"a": 0, "b": 0, "c": 1}
    product = fiber_product(DistMorphism(x, x, lambda v: v), DistMorphism(y, x, to_x.get))
    for (left, right), p in zip(product.distribution.support, product.distribution.probs):
        assert left == to_x[right]
        assert p == y.prob(right)


def test_fiber_product_needs_shared_target():
    x = FiniteDistribution.uniform((0, 1))
    z = FiniteDistribution.uniform((0, 1, 2))
    with pytest.raises(MorphismError):
        fiber_product(DistMorphism(x, x, lambda v: v), DistMorphism(z, z, lambda v: v))


def test_fiber_conditional():
    y = FiniteDistribution.uniform(range(6))
    x = FiniteDistribution.uniform((0, 1, 2))
    m = DistMorphism(y, x, lambda v: v % 3)
    assert fiber(m, 1).as_dict() == {1: Fraction(1, 2), 4: Fraction(1, 2)}
    with pytest.raises(MorphismError):
        fiber(DistMorphism(y, FiniteDistribution.from_dict({0: 1, 1: 0, 2: 0}), lambda v: 0), 1)


def test_sample_frequencies(rng):
    dist = FiniteDistribution.from_dict({"a": Fraction(1, 4), "b": Fraction(3, 4)})
    draws = [dist.sample(rng) for _ in range(4000)]
    assert abs(draws.count("a") - 1000) < 150


def test_sampler_fiber_access(rng):
    plain = Sampler.from_distribution(FiniteDistribution.uniform((0, 1)))
    assert not plain.fiber_constructible
    with pytest.raises(ParameterError):
        plain.sample_fiber(rng, 0)
    fibered = Sampler(draw=lambda r: (0, 0), fiber=lambda r, x: (x, 0))
    assert fibered.sample_fiber(rng, 5) == (5, 0)


def test_estimate_advantage_controls(rng):
    s0 = Sampler(draw=lambda r: 0)
    s1 = Sampler(draw=lambda r: 1)
    perfect = estimate_advantage(lambda v: v, s0, s1, 200, rng)
    assert perfect.advantage == 1.0
    coin = Sampler(draw=lambda r: r.getrandbits(1))
    blind = estimate_advantage(lambda v: v, coin, coin, 2000, rng)
    assert blind.within_band()


def test_estimate_advantage_is_reproducible():
    coin = Sampler(draw=lambda r: r.getrandbits(1))
    a = estimate_advantage(lambda v: v, coin, coin, 300, random.Random(5))
    b = estimate_advantage(lambda v: v, coin, coin, 300, random.Random(5), jobs=4)
    assert a == b
    assert a.outcomes == b.outcomes


def test_game_report_dict_round_trip():
    report = GameReport(100, 40, 60, seed=3, label="x", extra={"scheme": "gm"})
    assert report.advantage == pytest.approx(0.2)
    again = GameReport.from_dict(report.to_dict())
    assert again == report
    assert again.extra == {"scheme": "gm"}
    with pytest.raises(ParameterError):
        GameReport(10, 11, 0, seed=0)
