#!/usr/bin/env python3
"""
TOML experiment configuration.

Every section and key has a default, so an empty file is a valid
configuration. Unknown keys and out-of-range values raise ConfigError naming
the offending key.

UV Dependencies:
# Install UV if not available: curl -LsSf https://astral.sh/uv/install.sh | sh
# Run this script: uv run python experiment_config.py
"""

# /// script
# requires-python = ">=3.11"
# dependencies = [
#     "numpy>=1.26.0",
#     "scipy>=1.11.0",
# ]
# ///

import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 backport
    import tomli as tomllib

from bony import MAX_A0
from euler import EulerParams, Integrator
from grid_field import DEFAULT_LENGTH, Grid, GridError
from initial_data import DEFAULT_AMPLITUDE, DEFAULT_MODE, DataFamily
from littlewood_paley import (
    DEFAULT_N0,
    AdmissibleSequence,
    FrequencyPartition,
    SequenceError,
    example_sequence,
    validate_sequence,
)
from porous_medium import PorousParams

logger = logging.getLogger(__name__)

DEFAULT_EPS_SWEEP = (0.2, 0.1, 0.05, 0.025)
OUTPUT_FORMATS = ("csv", "json", "svg", "bin")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class GridConfig:
    d: int = 1
    n: int = 512
    length: float = DEFAULT_LENGTH


@dataclass(frozen=True)
class PhysicsConfig:
    gamma: float = 2.0
    A: float = 0.5
    eps: float = 0.1


@dataclass(frozen=True)
class PartitionConfig:
    k0: int = -3
    N0: int = DEFAULT_N0
    R: Union[int, str] = "auto"


@dataclass(frozen=True)
class SequenceConfig:
    p: float = 6.0
    ps: Union[str, Tuple[float, ...]] = "auto"


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 0.01
    T: float = 2.0
    family: str = DataFamily.WELL_PREPARED.value
    amplitude: float = DEFAULT_AMPLITUDE
    mode: int = DEFAULT_MODE
    seed: int = 0
    integrator: str = Integrator.ETD2.value
    resolve_layer: bool = True
    horizon: str = "decay"
    snapshot_every: int = 10


@dataclass(frozen=True)
class SweepConfig:
    eps: Tuple[float, ...] = DEFAULT_EPS_SWEEP
    delta: Tuple[float, ...] = (1.0, 0.5)
    r: Tuple[float, ...] = (1.0, 4.0 / 3.0, 2.0)
    damped_family: str = DataFamily.INITIAL_LAYER.value


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    formats: Tuple[str, ...] = OUTPUT_FORMATS


@dataclass(frozen=True)
class ConstantsConfig:
    eta: float = 1.0
    a0: float = 0.125
    lyapunov_eta: float = 0.25


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    sequence: SequenceConfig = field(default_factory=SequenceConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)

    def build_grid(self) -> Grid:
        return Grid(self.grid.d, self.grid.n, self.grid.length)

    def euler_params(self, eps: Optional[float] = None) -> EulerParams:
        return EulerParams(self.physics.gamma, self.physics.A, eps or self.physics.eps)

    def porous_params(self) -> PorousParams:
        return PorousParams(self.physics.gamma, self.physics.A)

    def admissible_sequence(self) -> AdmissibleSequence:
        if self.sequence.ps == "auto":
            return example_sequence(self.sequence.p, self.grid.d)
        return AdmissibleSequence(self.sequence.p, self.grid.d, tuple(self.sequence.ps))

    def frequency_partition(self, eps: Optional[float] = None) -> FrequencyPartition:
        return FrequencyPartition(
            eps or self.physics.eps,
            k0=self.partition.k0,
            n0=self.partition.N0,
            n_medium=self.admissible_sequence().n_medium,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, default=list)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


_SECTIONS = {
    "grid": GridConfig,
    "physics": PhysicsConfig,
    "partition": PartitionConfig,
    "sequence": SequenceConfig,
    "solver": SolverConfig,
    "sweep": SweepConfig,
    "output": OutputConfig,
    "constants": ConstantsConfig,
}


def _section(name: str, cls, raw: Dict[str, Any]):
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key {name}.{key}")
    values = {}
    for key, value in raw.items():
        values[key] = tuple(value) if isinstance(value, list) else value
    return cls(**values)


def _require(condition: bool, key: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{key}: {message}")


def validate(config: ExperimentConfig) -> ExperimentConfig:
    try:
        config.build_grid()
    except GridError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    _require(config.grid.d in (1, 2), "grid.d", "solvers ship d in {1, 2}")
    try:
        config.euler_params()
    except ValueError as exc:
        raise ConfigError(f"physics: {exc}") from exc

    try:
        seq = config.admissible_sequence()
    except SequenceError as exc:
        raise ConfigError(f"sequence.ps: {exc}") from exc
    if config.sequence.ps != "auto":
        verdict = validate_sequence(seq)
        _require(verdict.valid, "sequence.ps", "; ".join(verdict.reasons) or "inadmissible")
    if config.partition.R != "auto":
        _require(
            config.partition.R == seq.n_medium,
            "partition.R",
            f"R = {config.partition.R} but the sequence has {seq.n_medium} exponents",
        )
    _require(config.partition.N0 >= 1, "partition.N0", "must be >= 1")

    solver = config.solver
    _require(solver.dt > 0, "solver.dt", "must be positive")
    _require(solver.T > 0, "solver.T", "must be positive")
    _require(solver.snapshot_every >= 1, "solver.snapshot_every", "must be >= 1")
    _require(solver.horizon in ("fixed", "decay"), "solver.horizon", "fixed or decay")
    for key, enum in (("family", DataFamily), ("integrator", Integrator)):
        value = getattr(solver, key)
        _require(value in {e.value for e in enum}, f"solver.{key}", f"unknown value {value!r}")
    _require(
        config.sweep.damped_family in {e.value for e in DataFamily},
        "sweep.damped_family",
        f"unknown value {config.sweep.damped_family!r}",
    )

    eps = list(config.sweep.eps)
    _require(len(eps) >= 1 and all(e > 0 for e in eps), "sweep.eps", "must be positive")
    _require(eps == sorted(eps, reverse=True), "sweep.eps", "must be sorted descending")
    _require(all(0 < x <= 1 for x in config.sweep.delta), "sweep.delta", "must lie in (0, 1]")
    _require(all(x >= 1 for x in config.sweep.r), "sweep.r", "must be >= 1")

    for fmt in config.output.formats:
        _require(fmt in OUTPUT_FORMATS, "output.formats", f"unknown format {fmt!r}")
    a0 = config.constants.a0
    _require(0 < a0 < MAX_A0, "constants.a0", f"{a0} must lie in (0, 9/64)")
    _require(config.constants.eta > 0, "constants.eta", "must be positive")
    _require(config.constants.lyapunov_eta > 0, "constants.lyapunov_eta", "must be positive")
    return config


def parse_config(raw: Dict[str, Any]) -> ExperimentConfig:
    for name in raw:
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
    try:
        sections = {
            name: _section(name, cls, raw.get(name, {})) for name, cls in _SECTIONS.items()
        }
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return validate(ExperimentConfig(**sections))


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """Read a TOML file; None gives the defaults."""
    if path is None:
        return validate(ExperimentConfig())
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    config = parse_config(raw)
    logger.info("loaded %s (hash %s)", path, config.config_hash())
    return config


def with_overrides(config: ExperimentConfig, **sections: Dict[str, Any]) -> ExperimentConfig:
    """Copy of config with some keys replaced, validated again."""
    raw = config.to_dict()
    for name, values in sections.items():
        raw[name] = {**raw[name], **values}
    raw = {
        name: {k: list(v) if isinstance(v, tuple) else v for k, v in section.items()}
        for name, section in raw.items()
    }
    return parse_config(raw)


def eps_list(config: ExperimentConfig) -> List[float]:
    return [float(e) for e in config.sweep.eps]




def main():
    """Print a configuration file, or the defaults, with its hash."""
    import argparse

    parser = argparse.ArgumentParser(description="Show a hybesov experiment configuration")
    parser.add_argument("config", nargs="?", help="TOML file; the defaults when omitted")
    args = parser.parse_args()
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        parser.error(str(exc))
    print(json.dumps(config.to_dict(), indent=2, default=list))
    print(f"hash: {config.config_hash()}")


if __name__ == "__main__":
    main()
