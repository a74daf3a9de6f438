"""Quantitative semantics over traces: traditional, smooth, and averaged.

Three evaluators share one recursion and differ only in how they score
predicates and combine child scores:

* :func:`traditional` uses min/max, so the verdict is decided by the
  single most critical subformula and time point.
* :func:`smooth` replaces min/max with log-sum-exp softenings whose
  error vanishes as ``beta`` grows.
* :func:`agm` scores predicates on a normalized [-1, 1] scale and
  aggregates with geometric means on the satisfying branch and
  arithmetic means of clipped parts otherwise, so every operand and
  every window point contributes.

All evaluators reject the ``U`` operator.  Scores are pure functions of
the (immutable) formula and trace, so evaluation is thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import logic_algebra as alg
from .formula import (And, Direction, Eventually, FalseFormula, Formula,
                      Globally, Not, Or, Predicate, TrueFormula, Until,
                      horizon)
from .signal import Trace, TraceError


class EvaluationError(ValueError):
    """Trace/formula combination that cannot be scored."""


class UnsupportedOperatorError(EvaluationError):
    """Raised for ``U``: only F and G carry quantitative semantics here."""


class Status(Enum):
    SAT = "sat"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SmoothConfig:
    """Sharpness of the log-sum-exp min/max approximation."""

    beta: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and positive, "
                             f"got {self.beta!r}")


@dataclass(frozen=True)
class Verdict:
    score: float
    status: Status
    semantics: str
    beta: float | None = None


def _status_of(score: float) -> Status:
    if score > 0.0:
        return Status.SAT
    if score < 0.0:
        return Status.VIOLATED
    return Status.INCONCLUSIVE


def _max_beta(scores, beta: float) -> float:
    # Shifted log-sum-exp; the shift keeps exp() from overflowing.
    top = max(scores)
    if math.isinf(top):
        return top
    total = math.fsum(math.exp(beta * (s - top)) for s in scores)
    return top + math.log(total) / beta


def _min_beta(scores, beta: float) -> float:
    return -_max_beta([-s for s in scores], beta)


class _Traditional:
    name = "traditional"
    beta = None

    def __init__(self, rho_top: float):
        if not rho_top > 0:
            raise ValueError(f"rho_top must be positive, got {rho_top!r}")
        self.rho_top = rho_top

    def const(self, positive: bool) -> float:
        return self.rho_top if positive else -self.rho_top

    def predicate(self, value: float, pred: Predicate) -> float:
        if pred.direction is Direction.GREATER:
            return value - pred.threshold
        return pred.threshold - value

    def all_of(self, scores) -> float:
        return min(scores)

    def any_of(self, scores) -> float:
        return max(scores)

    def check_trace(self, trace: Trace) -> None:
        pass


class _Smooth(_Traditional):
    name = "smooth"

    def __init__(self, beta: float, rho_top: float):
        super().__init__(rho_top)
        self.beta = beta

    def all_of(self, scores) -> float:
        return _min_beta(scores, self.beta)

    def any_of(self, scores) -> float:
        return _max_beta(scores, self.beta)


class _Agm:
    name = "agm"
    beta = None

    def __init__(self, scale: str):
        if scale not in ("half", "unit"):
            raise ValueError(f"scale must be 'half' or 'unit', got {scale!r}")
        self.scale = scale
        # "unit" reproduces worked figures computed on raw predicate
        # differences; scores may then leave [-1, 1], so the clipped
        # public combiners are bypassed.
        if scale == "half":
            self.all_of = alg.conj_many
            self.any_of = alg.disj_many
        else:
            self.all_of = alg._conj_raw
            self.any_of = alg._disj_raw

    def const(self, positive: bool) -> float:
        return 1.0 if positive else -1.0

    def predicate(self, value: float, pred: Predicate) -> float:
        diff = (value - pred.threshold if pred.direction is Direction.GREATER
                else pred.threshold - value)
        return diff / 2.0 if self.scale == "half" else diff

    def check_trace(self, trace: Trace) -> None:
        values = trace.values
        if not np.all((values >= -1.0) & (values <= 1.0)):
            t, j = np.argwhere(~((values >= -1.0) & (values <= 1.0)))[0]
            raise EvaluationError(
                f"channel {trace.channels[j]!r} value {values[t, j]} at "
                f"step {t} outside [-1, 1]; normalize the trace first")


def _score(phi: Formula, trace: Trace, t: int, sem) -> float:
    if t < 0:
        raise EvaluationError(f"time index {t} is negative")
    needed = t + horizon(phi)
    if needed >= trace.length:
        raise EvaluationError(
            f"evaluation at t={t} needs step {needed} but trace "
            f"has length {trace.length}")
    sem.check_trace(trace)

    values = trace.values
    columns = {name: j for j, name in enumerate(trace.channels)}
    memo: dict[tuple[int, int], float] = {}

    def go(node: Formula, at: int) -> float:
        key = (id(node), at)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Predicate):
            try:
                j = columns[node.channel]
            except KeyError:
                raise TraceError(
                    f"trace has no channel {node.channel!r}") from None
            result = sem.predicate(values[at, j], node)
        elif isinstance(node, Not):
            result = -go(node.sub, at)
        elif isinstance(node, And):
            result = sem.all_of([go(sub, at) for sub in node.subs])
        elif isinstance(node, Or):
            result = sem.any_of([go(sub, at) for sub in node.subs])
        elif isinstance(node, Globally):
            window = range(at + node.a, at + node.b + 1)
            result = sem.all_of([go(node.sub, k) for k in window])
        elif isinstance(node, Eventually):
            window = range(at + node.a, at + node.b + 1)
            result = sem.any_of([go(node.sub, k) for k in window])
        elif isinstance(node, TrueFormula):
            result = sem.const(True)
        elif isinstance(node, FalseFormula):
            result = sem.const(False)
        elif isinstance(node, Until):
            raise UnsupportedOperatorError(
                "the U operator has no quantitative semantics here; "
                "rewrite with F and G")
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = result
        return result

    return go(phi, t)


def traditional(phi: Formula, s: Trace, t: int = 0, *,
                rho_top: float = math.inf) -> Verdict:
    """Min/max recursion; ``rho_top`` is the score of the constant true."""
    score = _score(phi, s, t, _Traditional(rho_top))
    return Verdict(score, _status_of(score), "traditional")


def smooth(phi: Formula, s: Trace, t: int = 0,
           cfg: SmoothConfig | None = None, *,
           rho_top: float = math.inf) -> Verdict:
    """Log-sum-exp softened min/max recursion."""
    cfg = cfg or SmoothConfig()
    score = _score(phi, s, t, _Smooth(cfg.beta, rho_top))
    return Verdict(score, _status_of(score), "smooth", beta=cfg.beta)


def agm(phi: Formula, s: Trace, t: int = 0, *, scale: str = "half") -> Verdict:
    """Averaged semantics on a trace normalized to [-1, 1].

    With the default ``scale='half'`` a predicate scores half the
    threshold margin and the total stays in [-1, 1]; ``scale='unit'``
    keeps the raw margin.
    """
    score = _score(phi, s, t, _Agm(scale))
    return Verdict(score, _status_of(score), "agm")


def satisfies(phi: Formula, s: Trace, t: int = 0,
              semantics: str = "traditional", *,
              beta: float = 10.0, scale: str = "half",
              rho_top: float = math.inf) -> Status:
    """Three-valued satisfaction: the sign of the chosen score."""
    if semantics == "traditional":
        return traditional(phi, s, t, rho_top=rho_top).status
    if semantics == "smooth":
        return smooth(phi, s, t, SmoothConfig(beta), rho_top=rho_top).status
    if semantics == "agm":
        return agm(phi, s, t, scale=scale).status
    raise ValueError(f"unknown semantics {semantics!r}")
