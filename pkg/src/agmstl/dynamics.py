"""Discrete-time dynamical systems and trajectory rollout.

A :class:`SystemModel` bundles a one-step transition function with the
state/input boxes, the initial state, and an output map telling which
state components become trace channels (and the physical range used to
normalize them).  Four case-study models ship as builders; custom
models are plain :class:`SystemModel` instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .signal import NormalizationMap, Trace, normalize

TWO_PI = 2.0 * math.pi


class SimulationError(ValueError):
    """Input or state leaving its declared box."""


@dataclass(frozen=True)
class OutputChannel:
    """One trace channel: a state component plus its physical range."""

    channel: str
    state_index: int
    phys_min: float
    phys_max: float


@dataclass(frozen=True)
class SystemModel:
    name: str
    step: Callable[[np.ndarray, np.ndarray], np.ndarray]
    state_names: tuple[str, ...]
    input_names: tuple[str, ...]
    state_box: np.ndarray
    input_box: np.ndarray
    initial_state: np.ndarray
    output_map: tuple[OutputChannel, ...]

    def __post_init__(self):
        object.__setattr__(self, "state_names", tuple(self.state_names))
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "output_map", tuple(self.output_map))
        state_box = np.asarray(self.state_box, dtype=float)
        input_box = np.asarray(self.input_box, dtype=float)
        q0 = np.asarray(self.initial_state, dtype=float)
        n, m = len(self.state_names), len(self.input_names)
        if state_box.shape != (n, 2) or input_box.shape != (m, 2):
            raise ValueError("state_box/input_box must be (dim, 2) arrays")
        if np.any(state_box[:, 0] >= state_box[:, 1]):
            raise ValueError("state_box rows must satisfy min < max")
        if np.any(input_box[:, 0] >= input_box[:, 1]):
            raise ValueError("input_box rows must satisfy min < max")
        if q0.shape != (n,):
            raise ValueError(f"initial state must have {n} components")
        if np.any(q0 < state_box[:, 0]) or np.any(q0 > state_box[:, 1]):
            raise ValueError("initial state outside the state box")
        channels = [out.channel for out in self.output_map]
        if len(set(channels)) != len(channels):
            raise ValueError("output channels must be distinct")
        for out in self.output_map:
            if not 0 <= out.state_index < n:
                raise ValueError(f"output {out.channel!r} maps to state "
                                 f"index {out.state_index}, model has {n}")
            if not out.phys_max > out.phys_min:
                raise ValueError(f"output {out.channel!r} has degenerate "
                                 "range")
        for array in (state_box, input_box, q0):
            array.flags.writeable = False
        object.__setattr__(self, "state_box", state_box)
        object.__setattr__(self, "input_box", input_box)
        object.__setattr__(self, "initial_state", q0)

    @property
    def state_dim(self) -> int:
        return len(self.state_names)

    @property
    def input_dim(self) -> int:
        return len(self.input_names)

    def normalization(self) -> NormalizationMap:
        return NormalizationMap({out.channel: (out.phys_min, out.phys_max)
                                 for out in self.output_map})


def _default_outputs(names: Sequence[str], state_names: Sequence[str],
                     state_box) -> tuple[OutputChannel, ...]:
    box = np.asarray(state_box, dtype=float)
    outs = []
    for name in names:
        idx = list(state_names).index(name)
        outs.append(OutputChannel(name, idx, box[idx, 0], box[idx, 1]))
    return tuple(outs)


def unicycle(q0=(0.5, 5.0, 0.0),
             state_box=((0.0, 10.0), (0.0, 10.0), (-TWO_PI, TWO_PI)),
             input_box=((-1.3, 1.3), (-1.3, 1.3)),
             outputs=("x", "y")) -> SystemModel:
    """Nonholonomic robot: forward speed v, heading rate w."""

    def step(q, u):
        x, y, theta = q
        v, w = u
        return np.array([x + math.cos(theta) * v,
                         y + math.sin(theta) * v,
                         theta + w])

    names = ("x", "y", "theta")
    return SystemModel("unicycle", step, names, ("v", "w"), state_box,
                       input_box, q0,
                       _default_outputs(outputs, names, state_box))


def curvature_unicycle(q0=(1.0, 1.0, 0.0),
                       state_box=((0.0, 10.0), (0.0, 10.0),
                                  (-TWO_PI, TWO_PI)),
                       input_box=((-2.0, 2.0), (-2.0, 2.0)),
                       outputs=("x", "y")) -> SystemModel:
    """Unicycle variant whose heading rate scales with speed (v * w)."""

    def step(q, u):
        x, y, theta = q
        v, w = u
        return np.array([x + math.cos(theta) * v,
                         y + math.sin(theta) * v,
                         theta + v * w])

    names = ("x", "y", "theta")
    return SystemModel("curvature_unicycle", step, names, ("v", "w"),
                       state_box, input_box, q0,
                       _default_outputs(outputs, names, state_box))


def double_integrator(q0=(0.5, 5.0, 0.0, 0.0),
                      state_box=((0.0, 10.0), (0.0, 10.0),
                                 (-2.0, 2.0), (-2.0, 2.0)),
                      input_box=((-1.0, 1.0), (-1.0, 1.0)),
                      outputs=("x", "y")) -> SystemModel:
    """Planar position/velocity chain driven by accelerations."""

    def step(q, u):
        x, y, vx, vy = q
        ax, ay = u
        return np.array([x + vx, y + vy, vx + ax, vy + ay])

    names = ("x", "y", "vx", "vy")
    return SystemModel("double_integrator", step, names, ("ax", "ay"),
                       state_box, input_box, q0,
                       _default_outputs(outputs, names, state_box))


def planar_integrator(q0=(0.0, 1.0),
                      state_box=((0.0, 6.0), (0.0, 6.0)),
                      input_box=((-1.5, 1.5), (-1.5, 1.5)),
                      outputs=("x", "y")) -> SystemModel:
    """Position driven directly by displacement inputs."""

    def step(q, u):
        return np.array([q[0] + u[0], q[1] + u[1]])

    names = ("x", "y")
    return SystemModel("planar_integrator", step, names, ("ux", "uy"),
                       state_box, input_box, q0,
                       _default_outputs(outputs, names, state_box))


MODEL_BUILDERS: dict[str, Callable[..., SystemModel]] = {
    "unicycle": unicycle,
    "curvature_unicycle": curvature_unicycle,
    "double_integrator": double_integrator,
    "planar_integrator": planar_integrator,
}


def simulate(model: SystemModel, u_seq) -> np.ndarray:
    """Roll the model forward; returns T+1 states in physical units.

    Inputs must lie in the input box.  States are not checked here:
    :func:`to_trace` reports box violations when the trajectory is
    turned into a trace.
    """
    u_seq = np.asarray(u_seq, dtype=float)
    if u_seq.ndim != 2 or u_seq.shape[1] != model.input_dim:
        raise SimulationError(
            f"input sequence must be (T, {model.input_dim}), "
            f"got {u_seq.shape}")
    lo, hi = model.input_box[:, 0], model.input_box[:, 1]
    for k, u in enumerate(u_seq):
        if np.any(u < lo) or np.any(u > hi):
            raise SimulationError(
                f"input at step {k} outside the input box: {u.tolist()}")
    trajectory = np.empty((len(u_seq) + 1, model.state_dim))
    trajectory[0] = model.initial_state
    for k, u in enumerate(u_seq):
        trajectory[k + 1] = model.step(trajectory[k], u)
    return trajectory


def check_state_box(model: SystemModel, trajectory: np.ndarray) -> None:
    """Raise if any state leaves the state box (inclusive bounds)."""
    lo, hi = model.state_box[:, 0], model.state_box[:, 1]
    outside = (trajectory < lo) | (trajectory > hi)
    if np.any(outside):
        k, i = np.argwhere(outside)[0]
        raise SimulationError(
            f"state {model.state_names[i]!r}={trajectory[k, i]} at step "
            f"{k} outside [{lo[i]}, {hi[i]}]")


def to_trace(model: SystemModel, trajectory) -> Trace:
    """Project mapped state components and normalize them to [-1, 1]."""
    trajectory = np.asarray(trajectory, dtype=float)
    if trajectory.ndim != 2 or trajectory.shape[1] != model.state_dim:
        raise SimulationError(
            f"trajectory must be (steps, {model.state_dim}), "
            f"got {trajectory.shape}")
    check_state_box(model, trajectory)
    channels = tuple(out.channel for out in model.output_map)
    raw = Trace(channels,
                trajectory[:, [out.state_index for out in model.output_map]])
    return normalize(raw, model.normalization())
