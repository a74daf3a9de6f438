"""Scalar conjunction/disjunction/negation/implication on [-1, 1] scores.

Conjunction takes the geometric mean of the shifted scores when every
operand is strictly positive and otherwise averages the negative parts;
disjunction averages the positive parts when any operand is strictly
positive and otherwise takes the mirrored geometric mean.  The branch
tests are strict, so a zero operand routes conjunction and disjunction
to their falling branch.

The same n-ary combiners back the averaged trace semantics, which keeps
the two modules consistent to the bit.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def positive_part(x: float) -> float:
    """[x]+ : x when positive, else 0."""
    return x if x > 0.0 else 0.0


def negative_part(x: float) -> float:
    """[x]- : x when negative, else 0."""
    return x if x < 0.0 else 0.0


def _require_score(x: float) -> float:
    x = float(x)
    if math.isnan(x) or not -1.0 <= x <= 1.0:
        raise ValueError(f"score {x!r} outside [-1, 1]")
    return x


def _clip(value: float) -> float:
    # Guards against the last-ulp spill of exp/log round trips.
    if value < -1.0:
        return -1.0
    if value > 1.0:
        return 1.0
    return value


def _root1p(deltas: Sequence[float]) -> float:
    """m-th root of the product of (1 + d) factors, in log space.

    A factor of exactly 0 forces the root to 0; log space would turn it
    into -inf and back, but the short circuit keeps IEEE corner cases
    (and warnings) out of the picture.
    """
    m = len(deltas)
    if m == 2:
        f0, f1 = 1.0 + deltas[0], 1.0 + deltas[1]
        if f0 == 0.0 or f1 == 0.0:
            return 0.0
        return math.sqrt(f0 * f1)
    if any(1.0 + d == 0.0 for d in deltas):
        return 0.0
    return math.exp(math.fsum(math.log1p(d) for d in deltas) / m)


def _conj_raw(scores: Sequence[float]) -> float:
    first = scores[0]
    if all(s == first for s in scores):
        return first
    if all(s > 0.0 for s in scores):
        return _root1p(scores) - 1.0
    return sum(negative_part(s) for s in scores) / len(scores)


def _disj_raw(scores: Sequence[float]) -> float:
    first = scores[0]
    if all(s == first for s in scores):
        return first
    if any(s > 0.0 for s in scores):
        return sum(positive_part(s) for s in scores) / len(scores)
    return 1.0 - _root1p([-s for s in scores])


def _checked(scores: Iterable[float]) -> list[float]:
    xs = [_require_score(s) for s in scores]
    if not xs:
        raise ValueError("need at least one score")
    return xs


def conj_many(scores: Iterable[float]) -> float:
    """n-ary conjunction over scores in [-1, 1]."""
    return _clip(_conj_raw(_checked(scores)))


def disj_many(scores: Iterable[float]) -> float:
    """n-ary disjunction over scores in [-1, 1]."""
    return _clip(_disj_raw(_checked(scores)))


def conj(x: float, y: float) -> float:
    """sqrt((1+x)(1+y)) - 1 when both positive, else mean of [.]-."""
    return conj_many((x, y))


def disj(x: float, y: float) -> float:
    """Mean of [.]+ when either is positive, else 1 - sqrt((1-x)(1-y))."""
    return disj_many((x, y))


def neg(x: float) -> float:
    return -_require_score(x)


def implies(x: float, y: float) -> float:
    """Material implication: disj(-x, y)."""
    return disj(-_require_score(x), y)
