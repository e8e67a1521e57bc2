"""Shared generators for randomized (seeded) property tests."""
from __future__ import annotations

import random
from fractions import Fraction

from liquidbin.dynamics import BinConfig
from liquidbin.params import Params


def random_rational_params(
    rng: random.Random, n: int, max_num: int = 8, max_den: int = 4
) -> Params:
    """Strictly increasing thresholds and positive rates with small
    rational entries."""
    a = []
    acc = Fraction(0)
    for _ in range(n):
        acc += Fraction(rng.randint(1, max_num), rng.randint(1, max_den))
        a.append(acc)
    p = tuple(Fraction(rng.randint(1, max_num), rng.randint(1, max_den)) for _ in range(n))
    return Params(tuple(a), p)


def random_mild_params(rng: random.Random, n: int) -> Params:
    """Rational parameters with the first rate dominating, keeping the
    contraction factor at most 3/4."""
    a = []
    acc = Fraction(0)
    for _ in range(n):
        acc += Fraction(rng.randint(1, 6), rng.randint(1, 3))
        a.append(acc)
    rest = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n - 1)]
    p1 = sum(rest, Fraction(0)) / 3 + Fraction(rng.randint(1, 4), rng.randint(1, 3))
    return Params(tuple(a), (p1, *rest))


def random_bin_config(rng: random.Random, params: Params) -> BinConfig:
    """Admissible window: positive volumes cumulating past a_N."""
    volumes = []
    total = Fraction(0)
    while total < params.a[-1]:
        v = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        volumes.append(v)
        total += v
    return BinConfig(front=rng.randint(-3, 5), volumes=tuple(volumes))


def random_duration(rng: random.Random, max_units: int = 24) -> Fraction:
    return Fraction(rng.randint(0, max_units), rng.randint(1, 6))
