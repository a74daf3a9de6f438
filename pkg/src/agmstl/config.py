"""JSON problem configurations.

One document declares the model (name, boxes, initial state, output
map), a table of named rectangular regions in physical units, the
specification text, and optimizer/disturbance settings.  Region names
used in the specification expand at parse time into conjunctions of
axis-aligned predicates whose thresholds are converted to normalized
units once, here.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dynamics import MODEL_BUILDERS, OutputChannel, SystemModel
from .formula import And, Direction, Formula, ParseError, Predicate, horizon, parse
from .synthesis import OptimizerConfig, SynthesisProblem

CONFIG_DIR_ENV = "AGMSTL_CONFIG_DIR"

_SEMANTICS = ("agm", "smooth", "traditional")
_OPTIMIZER_KEYS = ("max_iters", "step0", "fd_step", "restarts", "seed",
                   "stall_tol", "stall_patience", "init_resample")


class ConfigError(ValueError):
    """Invalid or inconsistent problem configuration."""


@dataclass(frozen=True)
class DisturbanceSettings:
    sigmas: tuple[float, ...] | None = None
    n_runs: int = 100
    seed: int = 0


@dataclass(frozen=True)
class ProblemSetup:
    """A fully validated configuration, ready to run."""

    model: SystemModel
    spec: Formula
    spec_text: str
    regions: dict[str, dict[str, tuple[float, float]]]
    horizon: int
    lam: float
    semantics: str
    beta: float
    scale: str
    optimizer: OptimizerConfig
    disturbance: DisturbanceSettings

    def problem(self, semantics: str | None = None,
                beta: float | None = None) -> SynthesisProblem:
        return SynthesisProblem(
            model=self.model,
            spec=self.spec,
            horizon=self.horizon,
            lam=self.lam,
            semantics=semantics or self.semantics,
            beta=self.beta if beta is None else beta,
            scale=self.scale,
        )


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return data[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _pair(value, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected [low, high]")
    lo, hi = (_number(v, where) for v in value)
    if not hi > lo:
        raise ConfigError(f"{where}: low {lo} must be below high {hi}")
    return lo, hi


def _build_model(data, where: str) -> SystemModel:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    name = _require(data, "name", where)
    if name not in MODEL_BUILDERS:
        known = ", ".join(sorted(MODEL_BUILDERS))
        raise ConfigError(f"{where}: unknown model {name!r} (known: {known})")
    kwargs = dict(data.get("params", {}))
    for key in ("q0", "state_box", "input_box"):
        if key in data:
            kwargs[key] = data[key]
    try:
        model = MODEL_BUILDERS[name](**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if "output_map" in data:
        outs = []
        for i, entry in enumerate(data["output_map"]):
            sub = f"{where}.output_map[{i}]"
            channel = _require(entry, "channel", sub)
            state = _require(entry, "state", sub)
            if not isinstance(state, int):
                raise ConfigError(f"{sub}: state must be an integer index")
            if "range" in entry:
                lo, hi = _pair(entry["range"], f"{sub}.range")
            else:
                lo, hi = model.state_box[state]
            outs.append(OutputChannel(channel, state, lo, hi))
        try:
            model = dataclasses.replace(model, output_map=tuple(outs))
        except ValueError as exc:
            raise ConfigError(f"{where}.output_map: {exc}") from None
    return model


def region_atoms(regions: dict, model: SystemModel,
                 where: str = "regions") -> dict[str, Formula]:
    """Turn physical rectangles into normalized predicate conjunctions."""
    ranges = {out.channel: (out.phys_min, out.phys_max)
              for out in model.output_map}
    nmap = model.normalization()
    atoms: dict[str, Formula] = {}
    for name, rect in regions.items():
        sub_where = f"{where}.{name}"
        if not isinstance(rect, dict) or not rect:
            raise ConfigError(f"{sub_where}: expected "
                              "{channel: [low, high], ...}")
        preds = []
        for channel, bounds in rect.items():
            if channel not in ranges:
                raise ConfigError(f"{sub_where}: {channel!r} is not an "
                                  "output channel of the model")
            lo, hi = _pair(bounds, f"{sub_where}.{channel}")
            plo, phi = ranges[channel]
            if lo < plo or hi > phi:
                raise ConfigError(
                    f"{sub_where}: [{lo}, {hi}] leaves the channel range "
                    f"[{plo}, {phi}]")
            preds.append(Predicate(channel, Direction.GREATER,
                                   nmap.to_normalized(channel, lo)))
            preds.append(Predicate(channel, Direction.LESS,
                                   nmap.to_normalized(channel, hi)))
        atoms[name] = And(tuple(preds))
    return atoms


def parse_config(data: dict, source: str = "config") -> ProblemSetup:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    model = _build_model(_require(data, "model", source), f"{source}.model")

    regions_raw = data.get("regions", {})
    atoms = region_atoms(regions_raw, model, f"{source}.regions")
    regions = {name: {ch: _pair(b, "regions") for ch, b in rect.items()}
               for name, rect in regions_raw.items()}

    spec_text = _require(data, "spec", source)
    try:
        spec = parse(spec_text, atoms)
    except ParseError as exc:
        raise ConfigError(f"{source}.spec: {exc}") from None

    horizon_steps = _require(data, "horizon", source)
    if not isinstance(horizon_steps, int) or horizon_steps < 1:
        raise ConfigError(f"{source}.horizon: expected a positive integer")
    needed = horizon(spec)
    if horizon_steps < needed:
        raise ConfigError(f"{source}.horizon: {horizon_steps} is shorter "
                          f"than the formula horizon {needed}")

    lam = _number(data.get("lambda", 0.0), f"{source}.lambda")
    if lam < 0:
        raise ConfigError(f"{source}.lambda: must be nonnegative")
    semantics = data.get("semantics", "agm")
    if semantics not in _SEMANTICS:
        raise ConfigError(f"{source}.semantics: expected one of "
                          f"{_SEMANTICS}, got {semantics!r}")
    beta = _number(data.get("beta", 10.0), f"{source}.beta")
    if beta <= 0:
        raise ConfigError(f"{source}.beta: must be positive")
    scale = data.get("scale", "half")
    if scale not in ("half", "unit"):
        raise ConfigError(f"{source}.scale: expected 'half' or 'unit'")

    opt_raw = data.get("optimizer", {})
    unknown = set(opt_raw) - set(_OPTIMIZER_KEYS)
    if unknown:
        raise ConfigError(f"{source}.optimizer: unknown keys {sorted(unknown)}")
    try:
        optimizer = OptimizerConfig(**opt_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}.optimizer: {exc}") from None

    dist_raw = data.get("disturbance", {})
    unknown = set(dist_raw) - {"sigmas", "n_runs", "seed"}
    if unknown:
        raise ConfigError(f"{source}.disturbance: unknown keys "
                          f"{sorted(unknown)}")
    sigmas = dist_raw.get("sigmas")
    if sigmas is not None:
        sigmas = tuple(_number(s, f"{source}.disturbance.sigmas")
                       for s in sigmas)
        if any(s < 0 for s in sigmas):
            raise ConfigError(f"{source}.disturbance.sigmas: negative sigma")
    disturbance = DisturbanceSettings(
        sigmas=sigmas,
        n_runs=dist_raw.get("n_runs", 100),
        seed=dist_raw.get("seed", 0),
    )
    if disturbance.n_runs < 1:
        raise ConfigError(f"{source}.disturbance.n_runs: must be >= 1")

    return ProblemSetup(model=model, spec=spec, spec_text=spec_text,
                        regions=regions, horizon=horizon_steps, lam=lam,
                        semantics=semantics, beta=beta, scale=scale,
                        optimizer=optimizer, disturbance=disturbance)


def resolve_config_path(name: str) -> Path:
    """Find a config: literal path, then $AGMSTL_CONFIG_DIR, then the
    configs shipped inside the package."""
    path = Path(name)
    if path.exists():
        return path
    env_dir = os.environ.get(CONFIG_DIR_ENV)
    if env_dir and (Path(env_dir) / name).exists():
        return Path(env_dir) / name
    packaged = resources.files("agmstl").joinpath("configs", name)
    if packaged.is_file():
        return Path(str(packaged))
    raise ConfigError(f"config {name!r} not found")


def load_config(path) -> ProblemSetup:
    path = resolve_config_path(str(path))
    try:
        with open(path) as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(data, source=str(path))
