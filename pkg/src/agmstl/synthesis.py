"""Robustness-maximizing control synthesis.

The optimizer runs projected gradient ascent on the chosen robustness
score of the rolled-out trajectory, with central finite-difference
gradients and a diminishing step schedule ``step0 / sqrt(i + 1)``.
Rollouts that leave the state box score ``-inf``; the optimizer never
steps onto such an iterate and recovers through fresh random restarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import robustness
from .dynamics import SimulationError, SystemModel, simulate, to_trace
from .formula import (And, Eventually, FalseFormula, Formula, Globally, Not,
                      Or, TrueFormula, Until, horizon)

NEG_INF = float("-inf")


def _walk(phi: Formula):
    yield phi
    if isinstance(phi, Not):
        yield from _walk(phi.sub)
    elif isinstance(phi, (And, Or)):
        for sub in phi.subs:
            yield from _walk(sub)
    elif isinstance(phi, (Globally, Eventually)):
        yield from _walk(phi.sub)
    elif isinstance(phi, Until):
        yield from _walk(phi.lhs)
        yield from _walk(phi.rhs)


def quadratic_cost(u: np.ndarray, q_next: np.ndarray) -> float:
    """Default input effort term: squared norm of the input."""
    return float(np.dot(u, u))


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-ascent knobs; defaults follow the case-study setup."""

    max_iters: int = 300
    step0: float | None = None
    fd_step: float = 1e-4
    restarts: int = 5
    seed: int = 0
    stall_tol: float = 1e-6
    stall_patience: int = 50
    init_resample: int = 200

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 0:
            raise ValueError("max_iters must be >= 1 and restarts >= 0")
        if self.step0 is not None and not self.step0 > 0:
            raise ValueError("step0 must be positive")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if not self.stall_tol > 0 or self.stall_patience < 1:
            raise ValueError("stall_tol/stall_patience must be positive")


@dataclass(frozen=True)
class SynthesisProblem:
    """What to control, what to satisfy, and how to score it."""

    model: SystemModel
    spec: Formula
    horizon: int
    lam: float = 0.0
    cost: Callable[[np.ndarray, np.ndarray], float] | None = None
    semantics: str = "agm"
    beta: float = 10.0
    scale: str = "half"

    def __post_init__(self):
        if self.semantics not in ("agm", "smooth", "traditional"):
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        needed = horizon(self.spec)
        if self.horizon < needed:
            raise ValueError(f"horizon {self.horizon} is shorter than the "
                             f"formula horizon {needed}")
        for node in _walk(self.spec):
            if isinstance(node, Until):
                raise ValueError("specification contains U, which no "
                                 "evaluator supports")
            if (self.semantics != "agm"
                    and isinstance(node, (TrueFormula, FalseFormula))):
                # true/false score +-inf under min/max semantics, which
                # would poison every finite-difference gradient.
                raise ValueError("true/false literals are not allowed in "
                                 f"{self.semantics} objectives")

    def trace_score(self, trace) -> float:
        if self.semantics == "agm":
            return robustness.agm(self.spec, trace, scale=self.scale).score
        if self.semantics == "smooth":
            cfg = robustness.SmoothConfig(self.beta)
            return robustness.smooth(self.spec, trace, cfg).score
        return robustness.traditional(self.spec, trace).score


@dataclass(frozen=True)
class SynthesisResult:
    u_star: np.ndarray
    trajectory: np.ndarray
    score: float
    score_history: list[float]
    feasible: bool
    iterations: int
    restarts_used: int
    seed: int


def objective(problem: SynthesisProblem, u_seq) -> float:
    """Robustness of the rollout minus the weighted input cost.

    Returns ``-inf`` when the rollout leaves the state box.
    """
    u_seq = np.asarray(u_seq, dtype=float)
    trajectory = simulate(problem.model, u_seq)
    try:
        trace = to_trace(problem.model, trajectory)
    except SimulationError:
        return NEG_INF
    score = problem.trace_score(trace)
    if problem.lam > 0.0:
        cost = problem.cost or quadratic_cost
        total = math.fsum(cost(u_seq[k], trajectory[k + 1])
                          for k in range(len(u_seq)))
        score -= problem.lam * total
    return score


def finite_difference_gradient(fun, u: np.ndarray, lo, hi,
                               h: float) -> np.ndarray:
    """Component-wise central differences of ``fun`` with box-projected
    probe points; ``-inf`` on one side degrades to a one-sided quotient.
    """
    u = np.asarray(u, dtype=float)
    grad = np.zeros_like(u)
    center = None
    flat_lo = np.broadcast_to(lo, u.shape)
    flat_hi = np.broadcast_to(hi, u.shape)
    for idx in np.ndindex(u.shape):
        base = u[idx]
        probe = u.copy()
        probe[idx] = min(base + h, flat_hi[idx])
        f_plus = fun(probe)
        probe[idx] = max(base - h, flat_lo[idx])
        f_minus = fun(probe)
        if f_plus > NEG_INF and f_minus > NEG_INF:
            grad[idx] = (f_plus - f_minus) / (2.0 * h)
            continue
        if center is None:
            center = fun(u)
        if center == NEG_INF:
            grad[idx] = 0.0
        elif f_plus > NEG_INF:
            grad[idx] = (f_plus - center) / h
        elif f_minus > NEG_INF:
            grad[idx] = (center - f_minus) / h
        else:
            grad[idx] = 0.0
    return grad


def fd_gradient(problem: SynthesisProblem, u_seq,
                h: float = 1e-4) -> np.ndarray:
    """Finite-difference gradient of :func:`objective` at ``u_seq``."""
    lo = problem.model.input_box[:, 0]
    hi = problem.model.input_box[:, 1]
    return finite_difference_gradient(lambda u: objective(problem, u),
                                      np.asarray(u_seq, dtype=float),
                                      lo, hi, h)


def gradient_ascent(problem: SynthesisProblem,
                    config: OptimizerConfig | None = None) -> SynthesisResult:
    """Maximize the objective over input sequences in the input box.

    Each attempt starts from a uniform random sequence, takes projected
    gradient steps with a diminishing step size, and keeps the best
    iterate seen.  Attempts that stall without a positive score are
    retried with a fresh start, up to ``config.restarts`` times; the
    result is the best over all attempts and is never an exception:
    ``feasible`` is simply False when no attempt went positive.
    """
    config = config or OptimizerConfig()
    model = problem.model
    lo = np.broadcast_to(model.input_box[:, 0],
                         (problem.horizon, model.input_dim))
    hi = np.broadcast_to(model.input_box[:, 1],
                         (problem.horizon, model.input_dim))
    step0 = (config.step0 if config.step0 is not None
             else 0.1 * (model.input_box[:, 1] - model.input_box[:, 0]) / 2.0)

    rng = np.random.default_rng(config.seed)

    def draw_start():
        u0 = rng.uniform(lo, hi)
        for _ in range(config.init_resample):
            if objective(problem, u0) > NEG_INF:
                break
            u0 = rng.uniform(lo, hi)
        return u0

    best_score = NEG_INF
    best_u = None
    history: list[float] = []
    iterations = 0
    restarts_used = 0

    for attempt in range(config.restarts + 1):
        if attempt > 0:
            restarts_used += 1
        u = draw_start()
        score = objective(problem, u)
        if score > best_score or best_u is None:
            best_score, best_u = score, u.copy()
        history.append(best_score)
        since_improvement = 0
        for i in range(config.max_iters):
            grad = fd_gradient(problem, u, config.fd_step)
            alpha = step0 / math.sqrt(i + 1)
            candidate = np.clip(u + alpha * grad, lo, hi)
            moved = not np.array_equal(candidate, u)
            cand_score = objective(problem, candidate)
            if cand_score > NEG_INF:
                # Infeasible candidates are skipped; the shrinking step
                # pulls later candidates back inside.
                u, score = candidate, cand_score
            iterations += 1
            if score > best_score + config.stall_tol:
                since_improvement = 0
            else:
                since_improvement += 1
            if score > best_score:
                best_score, best_u = score, u.copy()
            history.append(best_score)
            if not moved or since_improvement >= config.stall_patience:
                break
        if best_score > 0.0:
            break

    return SynthesisResult(
        u_star=best_u,
        trajectory=simulate(model, best_u),
        score=best_score,
        score_history=history,
        feasible=best_score > 0.0,
        iterations=iterations,
        restarts_used=restarts_used,
        seed=config.seed,
    )
