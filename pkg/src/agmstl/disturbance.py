"""Monte-Carlo policy robustness under Gaussian input noise.

A synthesized input sequence is perturbed i.i.d. per component,
projected back onto the input box, rolled out, and judged against the
specification with the traditional semantics (the ground truth for
satisfaction, whatever semantics trained the policy).  Runs draw from
per-run RNG streams derived from (seed, run index), so results do not
depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import robustness
from .dynamics import SimulationError, simulate, to_trace
from .synthesis import NEG_INF, SynthesisProblem


@dataclass(frozen=True)
class DisturbanceConfig:
    sigma: float
    n_runs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.n_runs < 1:
            raise ValueError("n_runs must be at least 1")


@dataclass(frozen=True)
class RunVerdict:
    run: int
    satisfied: bool
    score: float


@dataclass(frozen=True)
class DisturbanceResult:
    """Failure fraction plus the per-run outcomes behind it."""

    rate: float
    runs: tuple[RunVerdict, ...]


def default_sigmas(model) -> tuple[float, ...]:
    """Sweep levels: 5%, 10%, 20% of the mean input half-width."""
    half = float(np.mean(model.input_box[:, 1] - model.input_box[:, 0]) / 2.0)
    return (0.05 * half, 0.1 * half, 0.2 * half)


def perturb_policy(u_star, sigma: float, rng: np.random.Generator,
                   input_box) -> np.ndarray:
    """Add N(0, sigma^2) noise per component, then project onto the box."""
    u_star = np.asarray(u_star, dtype=float)
    box = np.asarray(input_box, dtype=float)
    noisy = u_star + rng.normal(0.0, sigma, size=u_star.shape)
    return np.clip(noisy, box[:, 0], box[:, 1])


def failure_rate(problem: SynthesisProblem, u_star,
                 cfg: DisturbanceConfig) -> DisturbanceResult:
    """Fraction of disturbed rollouts that fail the specification.

    A run fails when the traditional score is not strictly positive;
    rollouts that leave the state box count as failures with score
    ``-inf``.
    """
    u_star = np.asarray(u_star, dtype=float)
    if u_star.shape != (problem.horizon, problem.model.input_dim):
        raise ValueError(
            f"policy must be ({problem.horizon}, "
            f"{problem.model.input_dim}), got {u_star.shape}")
    runs = []
    failures = 0
    for run in range(cfg.n_runs):
        rng = np.random.default_rng([cfg.seed, run])
        disturbed = perturb_policy(u_star, cfg.sigma, rng,
                                   problem.model.input_box)
        trajectory = simulate(problem.model, disturbed)
        try:
            trace = to_trace(problem.model, trajectory)
            score = robustness.traditional(problem.spec, trace).score
        except SimulationError:
            score = NEG_INF
        satisfied = score > 0.0
        if not satisfied:
            failures += 1
        runs.append(RunVerdict(run, satisfied, score))
    return DisturbanceResult(failures / cfg.n_runs, tuple(runs))
