"""Exact min-entropy, g- and Dalenius leakage of finite channels."""

import math
from fractions import Fraction
from itertools import combinations

import structlog

from flowwidth.app.constants import AnalysisDefaults
from flowwidth.app.exceptions import (
    ChannelValidationError,
    NotDeterministicError,
    UndefinedLeakageError,
)
from flowwidth.app.models import (
    ChannelMatrix,
    Distribution,
    GainFunction,
    InteractiveCapacity,
    InteractiveChannel,
    JointDistribution,
)

logger = structlog.get_logger(__name__)


def log2(value: Fraction | int) -> float:
    """Base-2 logarithm of a positive rational, exact up to the final float."""
    value = Fraction(value)
    if value <= 0:
        return -math.inf
    return math.log2(value.numerator) - math.log2(value.denominator)


def _check_prior(prior: Distribution, inputs: tuple[str, ...]) -> None:
    unknown = [x for x in prior.support if x not in set(inputs)]
    if unknown:
        raise ChannelValidationError(
            f"prior mentions labels outside the channel inputs: {' '.join(unknown)}"
        )


def prior_vulnerability(prior: Distribution) -> Fraction:
    """Probability of guessing the secret in one try before observing."""
    return max(prior.mass.values())


def posterior_vulnerability(prior: Distribution, channel: ChannelMatrix) -> Fraction:
    """
    Expected one-guess success probability after observing the output.

    Returns:
        Sum over outputs of the largest joint mass p(x) p(y|x)
    """
    _check_prior(prior, channel.inputs)
    return sum(
        (max(prior.p(x) * channel.rows[x][j] for x in channel.inputs) for j in range(len(channel.outputs))),
        Fraction(0),
    )


def min_entropy_leakage_ratio(prior: Distribution, channel: ChannelMatrix) -> Fraction:
    """Multiplicative increase in the single-guess success probability."""
    return posterior_vulnerability(prior, channel) / prior_vulnerability(prior)


def min_entropy_leakage(prior: Distribution, channel: ChannelMatrix) -> float:
    """
    Min-entropy leakage of ``channel`` under ``prior``, in bits.

    Returns:
        log2 of posterior over prior vulnerability
    """
    return log2(min_entropy_leakage_ratio(prior, channel))


def min_entropy_capacity_ratio(channel: ChannelMatrix) -> Fraction:
    """Sum of column maxima, attained by the uniform prior."""
    return sum((max(channel.column(j)) for j in range(len(channel.outputs))), Fraction(0))


def min_entropy_capacity(channel: ChannelMatrix) -> float:
    """Largest min-entropy leakage over all priors, in bits."""
    return log2(min_entropy_capacity_ratio(channel))


# g-leakage


def g_vulnerability(prior: Distribution, g: GainFunction) -> Fraction:
    """Expected gain of the best single guess before observing."""
    return max(sum((prior.p(x) * g.gain(w, x) for x in prior.support), Fraction(0)) for w in g.guesses)


def posterior_g_vulnerability(prior: Distribution, channel: ChannelMatrix, g: GainFunction) -> Fraction:
    """Expected gain of the best guess per output, summed over outputs."""
    total = Fraction(0)
    for j in range(len(channel.outputs)):
        total += max(
            sum((prior.p(x) * channel.rows[x][j] * g.gain(w, x) for x in channel.inputs), Fraction(0))
            for w in g.guesses
        )
    return total


def g_leakage_ratio(prior: Distribution, channel: ChannelMatrix, g: GainFunction) -> Fraction:
    """
    Multiplicative g-leakage.

    Raises UndefinedLeakageError when no guess has positive prior gain.
    """
    _check_prior(prior, channel.inputs)
    missing = [x for x in channel.inputs if x not in set(g.secrets)]
    if missing:
        raise ChannelValidationError(f"gain function is undefined on {' '.join(missing)}")
    before = g_vulnerability(prior, g)
    if before == 0:
        raise UndefinedLeakageError("prior g-vulnerability is zero; g-leakage is undefined")
    return posterior_g_vulnerability(prior, channel, g) / before


def g_leakage(prior: Distribution, channel: ChannelMatrix, g: GainFunction) -> float:
    """g-leakage in bits."""
    return log2(g_leakage_ratio(prior, channel, g))


# Dalenius leakage


def dalenius_leakage_ratio(joint: JointDistribution) -> Fraction:
    """Sum over supported outputs of the largest p(y|x) among supported inputs."""
    _, channel = joint.conditional()
    return min_entropy_capacity_ratio(channel)


def dalenius_leakage(joint: JointDistribution) -> float:
    """
    Leakage about any secret correlated with X, in bits.

    Returns:
        log2 of the Dalenius ratio; 0.0 when X and Y are independent
    """
    return log2(dalenius_leakage_ratio(joint))


def joint_from_channel(prior: Distribution, channel: ChannelMatrix) -> JointDistribution:
    """Joint distribution p(x) p(y|x)."""
    _check_prior(prior, channel.inputs)
    return JointDistribution(
        xs=channel.inputs,
        ys=channel.outputs,
        rows={x: tuple(prior.p(x) * p for p in channel.rows[x]) for x in channel.inputs},
    )


def dalenius_approximation(joint: JointDistribution, n: int) -> float:
    """
    Min-entropy leakage about a secret of 2**n equiprobable cells.

    Inputs take consecutive intervals of [0, 1) with lengths equal to their
    prior masses, in declaration order. Cell z receives the part of each
    interval that overlaps [z / 2**n, (z + 1) / 2**n).
    """
    if n < 0:
        raise ChannelValidationError("dyadic refinement level must be non-negative")
    px = joint.marginal_x()
    cells = 2**n
    intervals: list[tuple[Fraction, Fraction, str]] = []
    start = Fraction(0)
    for x in joint.xs:
        end = start + px.p(x)
        if end > start:
            intervals.append((start, end, x))
        start = end

    column_best = [Fraction(0)] * len(joint.ys)
    for z in range(cells):
        cell_lo, cell_hi = Fraction(z, cells), Fraction(z + 1, cells)
        masses = [Fraction(0)] * len(joint.ys)
        for lo, hi, x in intervals:
            overlap = min(hi, cell_hi) - max(lo, cell_lo)
            if overlap <= 0:
                continue
            for j, p in enumerate(joint.rows[x]):
                masses[j] += overlap * p / px.p(x)
        column_best = [max(best, m) for best, m in zip(column_best, masses)]
    return log2(sum(column_best, Fraction(0)) * cells)


# Interactive channels


def interactive_leakage_ratio(
    xa_prior: Distribution, xb_prior: Distribution, ch: InteractiveChannel
) -> Fraction:
    """Expected multiplicative leakage about Alice's input over Bob's input."""
    _check_prior(xa_prior, ch.alice_inputs)
    _check_prior(xb_prior, ch.bob_inputs)
    return sum(
        (
            xb_prior.p(xb) * min_entropy_leakage_ratio(xa_prior, ch.slice(xb))
            for xb in ch.bob_inputs
            if xb_prior.p(xb) > 0
        ),
        Fraction(0),
    )


def interactive_leakage(
    xa_prior: Distribution, xb_prior: Distribution, ch: InteractiveChannel
) -> float:
    """
    Min-entropy leakage about Alice's input when Bob's input follows ``xb_prior``.

    Returns:
        log2 of the expected slice leakage ratio
    """
    return log2(interactive_leakage_ratio(xa_prior, xb_prior, ch))


def mixture_leakage(
    xa_prior: Distribution, bob_mixture: Distribution, ch: InteractiveChannel
) -> float:
    """Leakage when Bob randomizes over his inputs according to ``bob_mixture``."""
    return interactive_leakage(xa_prior, bob_mixture, ch)


def interactive_capacity_pure_bob(ch: InteractiveChannel) -> InteractiveCapacity:
    """Capacity of the best slice; the first maximizing Bob input is the witness."""
    best: tuple[Fraction, str] | None = None
    for xb in ch.bob_inputs:
        ratio = min_entropy_capacity_ratio(ch.slice(xb))
        if best is None or ratio > best[0]:
            best = (ratio, xb)
    if best is None:
        raise ChannelValidationError("interactive channel has no bob inputs")
    ratio, witness = best
    logger.debug("pure_bob_capacity", witness=witness, ratio=str(ratio))
    return InteractiveCapacity(ratio=ratio, bits=log2(ratio), witness=witness)


def deterministic_interactive_capacity(ch: InteractiveChannel) -> InteractiveCapacity:
    """Largest number of distinct outputs Alice can force for a single Bob input."""
    if not ch.is_deterministic:
        raise NotDeterministicError("interactive channel has entries other than 0 and 1")
    best: tuple[int, str] | None = None
    for xb in ch.bob_inputs:
        reached = {
            j for row in ch.rows[xb].values() for j, p in enumerate(row) if p == 1
        }
        if best is None or len(reached) > best[0]:
            best = (len(reached), xb)
    if best is None:
        raise ChannelValidationError("interactive channel has no bob inputs")
    count, witness = best
    return InteractiveCapacity(ratio=Fraction(count), bits=log2(count), witness=witness)


# Capacity search oracle


def _weighted_leakage(channel: ChannelMatrix, weights: list[float]) -> float:
    """Leakage ratio of the prior proportional to ``weights`` (max weight is 1)."""
    top = max(weights)
    if top <= 0:
        return 0.0
    return (
        sum(
            max(w * float(channel.rows[x][j]) for w, x in zip(weights, channel.inputs))
            for j in range(len(channel.outputs))
        )
        / top
    )


def _simplex_grid(parts: int, granularity: int):
    """Compositions of ``granularity`` into ``parts`` non-negative integers."""
    for bars in combinations(range(granularity + parts - 1), parts - 1):
        previous = -1
        point = []
        for bar in bars:
            point.append(bar - previous - 1)
            previous = bar
        point.append(granularity + parts - 2 - previous)
        yield point


def capacity_by_search(
    channel: ChannelMatrix,
    granularity: int = AnalysisDefaults.CAPACITY_GRID,
    min_step: float = AnalysisDefaults.ASCENT_MIN_STEP,
) -> float:
    """
    Maximize min-entropy leakage over priors numerically.

    A simplex grid with spacing 1/granularity is followed by coordinate
    ascent on weights normalized so the largest is 1. Approaches the
    closed-form capacity from below.
    """
    best_ratio = 0.0
    best_weights: list[float] = []
    for point in _simplex_grid(len(channel.inputs), granularity):
        top = max(point)
        weights = [p / top for p in point]
        ratio = _weighted_leakage(channel, weights)
        if ratio > best_ratio:
            best_ratio, best_weights = ratio, weights

    step = 0.5
    while step >= min_step:
        improved = False
        for i in range(len(best_weights)):
            for candidate in (1.0, best_weights[i] + step, best_weights[i] - step):
                candidate = min(1.0, max(0.0, candidate))
                trial = list(best_weights)
                trial[i] = candidate
                ratio = _weighted_leakage(channel, trial)
                if ratio > best_ratio + 1e-15:
                    best_ratio, best_weights, improved = ratio, trial, True
        if not improved:
            step /= 2
    logger.debug("capacity_search_done", ratio=best_ratio, inputs=len(channel.inputs))
    return math.log2(best_ratio)
