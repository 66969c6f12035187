"""Statistical-learning harness: i.i.d. sampling, empirical risk
minimization over enumerable classes, Monte-Carlo risk estimation, and
sample-size experiments.

Every stochastic operation takes a seed and replays bit-identically under
it.  Loss is 0-1 throughout.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np


def zero_one_loss(a, b) -> int:
    return 0 if a == b else 1


@dataclass(frozen=True)
class LabeledSample:
    entries: tuple[tuple[tuple, object], ...]

    def __post_init__(self):
        for s, _ in self.entries:
            if len(s) == 0:
                raise ValueError("sample strings must be non-empty")

    @property
    def strings(self) -> tuple[tuple, ...]:
        return tuple(s for s, _ in self.entries)

    @property
    def labels(self) -> tuple:
        return tuple(y for _, y in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class StringDistribution:
    """Strings drawn as: length from ``length_weights`` over 1..max_len
    (uniform by default), then i.i.d. letters from ``letter_weights``
    (uniform by default)."""

    alphabet: tuple
    max_len: int
    letter_weights: tuple[float, ...] | None = None
    length_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")
        if self.letter_weights is not None and len(self.letter_weights) != len(self.alphabet):
            raise ValueError("letter_weights must match the alphabet")
        if self.length_weights is not None and len(self.length_weights) != self.max_len:
            raise ValueError("length_weights must cover lengths 1..max_len")

    def sample(self, rng: random.Random) -> tuple:
        lengths = range(1, self.max_len + 1)
        length = rng.choices(lengths, weights=self.length_weights)[0]
        return tuple(
            rng.choices(self.alphabet, weights=self.letter_weights)[0]
            for _ in range(length)
        )

    def sample_many(self, n: int, rng: random.Random) -> list[tuple]:
        return [self.sample(rng) for _ in range(n)]


def draw_sample(dist: StringDistribution, target: Callable, n: int,
                seed: int = 0) -> LabeledSample:
    """n i.i.d. strings labelled by the target function."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    rng = random.Random(seed)
    strings = dist.sample_many(n, rng)
    return LabeledSample(tuple((s, target(s)) for s in strings))


def empirical_risk(fn: Callable, sample: LabeledSample) -> float:
    errors = sum(zero_one_loss(fn(s), y) for s, y in sample.entries)
    return errors / len(sample)


class ErmResult(NamedTuple):
    index: int
    function: object
    empirical_risk: float
    tie_count: int


def erm_select(functions, sample: LabeledSample) -> ErmResult:
    """The empirical-risk minimizer over an enumerable class.

    Ties break to the earliest member in canonical enumeration order; the
    number of tied minimizers is reported.  A class object exposing
    ``error_counts(strings, labels)`` (and ``member``) is scored through that
    fast path instead of one-by-one evaluation.
    """
    strings, labels = None, None
    if hasattr(functions, "error_counts"):
        strings = list(sample.strings)
        labels = list(sample.labels)
        counts = np.asarray(functions.error_counts(strings, labels))
        best = int(counts.min())
        index = int(counts.argmin())
        ties = int((counts == best).sum())
        return ErmResult(index, functions.member(index), best / len(sample), ties)
    best_index, best_fn, best_errors = -1, None, None
    ties = 0
    for i, fn in enumerate(functions):
        errors = sum(zero_one_loss(fn(s), y) for s, y in sample.entries)
        if best_errors is None or errors < best_errors:
            best_index, best_fn, best_errors = i, fn, errors
            ties = 1
        elif errors == best_errors:
            ties += 1
    if best_fn is None:
        raise ValueError("cannot select from an empty class")
    return ErmResult(best_index, best_fn, best_errors / len(sample), ties)


class RiskEstimate(NamedTuple):
    mean: float
    stderr: float
    n: int


def estimate_risk(fn: Callable, target: Callable, dist: StringDistribution,
                  n_mc: int, seed: int = 0) -> RiskEstimate:
    """Monte-Carlo estimate of the true risk against the target."""
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1")
    rng = random.Random(seed)
    losses = [
        zero_one_loss(fn(s), target(s)) for s in dist.sample_many(n_mc, rng)
    ]
    mean = sum(losses) / n_mc
    var = mean * (1 - mean)
    return RiskEstimate(mean, math.sqrt(var / n_mc), n_mc)


def class_min_risk(functions, target: Callable, dist: StringDistribution,
                   n_mc: int, seed: int = 0) -> float:
    """Exhaustive Monte-Carlo minimum risk over an enumerable class, sharing
    one string pool across members so comparisons are paired."""
    rng = random.Random(seed)
    pool = dist.sample_many(n_mc, rng)
    targets = [target(s) for s in pool]
    best = None
    for fn in functions:
        risk = sum(zero_one_loss(fn(s), y) for s, y in zip(pool, targets)) / n_mc
        if best is None or risk < best:
            best = risk
    if best is None:
        raise ValueError("cannot take a minimum over an empty class")
    return best


class CurvePoint(NamedTuple):
    sample_size: int
    trials: int
    successes: int
    mean_gap: float


def learning_curve(functions, target: Callable, dist: StringDistribution,
                   sample_sizes: Sequence[int], trials: int, epsilon: float,
                   seed: int = 0, n_mc: int = 2000,
                   baseline_risk: float | None = None) -> list[CurvePoint]:
    """Fraction of trials whose selected function lands within epsilon of the
    class-minimum risk, per sample size.

    ``baseline_risk`` is the minimum true risk over the class; pass 0.0 for a
    realizable target (the target's own risk is identically zero), otherwise
    it is estimated exhaustively once.
    """
    if baseline_risk is None:
        baseline_risk = class_min_risk(functions, target, dist, n_mc, seed=seed ^ 0x5EED)
    points = []
    for ell in sample_sizes:
        successes = 0
        gaps = []
        for t in range(trials):
            trial_seed = seed + 1_000_003 * t + 17 * ell
            sample = draw_sample(dist, target, ell, seed=trial_seed)
            chosen = erm_select(functions, sample)
            est = estimate_risk(chosen.function, target, dist, n_mc, seed=trial_seed ^ 0xA5A5)
            gap = max(0.0, est.mean - baseline_risk)
            gaps.append(gap)
            if gap <= epsilon:
                successes += 1
        points.append(CurvePoint(ell, trials, successes, sum(gaps) / len(gaps)))
    return points


def curve_to_csv(points: Sequence[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["sample_size", "trials", "successes", "mean_gap"])
    for p in points:
        writer.writerow([p.sample_size, p.trials, p.successes, f"{p.mean_gap:.6f}"])
    return buf.getvalue()
