"""Run configuration: a sectioned TOML file with a closed set of keys.

Every key is listed in ``docs/schemas.md``. Unknown sections or keys are
errors, since a silently ignored typo would corrupt an ablation.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli
import tomli_w

from .ansatz import canonical_family
from .errors import ConfigError
from .operators import BoundaryCondition

NAMED_SOURCES = ("ones", "alternating", "sine")


@dataclass(frozen=True)
class ProblemSection:
    qubits: int = 2
    bc: str = "dirichlet"
    source: str = "ones"
    grid_spacing: float = 1.0


@dataclass(frozen=True)
class AnsatzSection:
    family: str = "mps"
    layers: int = 1


@dataclass(frozen=True)
class OptimizerSection:
    method: str = "nelder-mead"
    max_evals: int = 2000
    restarts: int = 0
    scale: float = 0.5
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    seed: int | None = None


@dataclass(frozen=True)
class ExecutionSection:
    seed: int
    mode: str = "exact"
    shots: int = 1000


@dataclass(frozen=True)
class TranspileSection:
    coupling: str = "linear"


@dataclass(frozen=True)
class NoiseSection:
    profile: str = "ideal"
    eps_1q: float | None = None
    eps_2q: float | None = None
    eps_3q: float | None = None


@dataclass(frozen=True)
class OutputSection:
    directory: str | None = None
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    execution: ExecutionSection
    problem: ProblemSection = field(default_factory=ProblemSection)
    ansatz: AnsatzSection = field(default_factory=AnsatzSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    transpile: TranspileSection = field(default_factory=TranspileSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    output: OutputSection = field(default_factory=OutputSection)
    base_dir: str = field(default=".", compare=False)

    @property
    def optimizer_seed(self) -> int:
        s = self.optimizer.seed
        return self.execution.seed if s is None else s

    def to_dict(self) -> dict[str, dict[str, Any]]:
        """Plain nested dict; ``None`` values are omitted (TOML has no null)."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name == "base_dir":
                continue
            section = dataclasses.asdict(getattr(self, f.name))
            out[f.name] = {
                k: list(v) if isinstance(v, tuple) else v
                for k, v in section.items()
                if v is not None
            }
        return out

    def source_path(self) -> Path | None:
        if self.problem.source in NAMED_SOURCES:
            return None
        path = Path(self.problem.source)
        return path if path.is_absolute() else Path(self.base_dir) / path

    def config_hash(self) -> str:
        """SHA-256 over the canonical config (minus output directory) and any source file."""
        data = self.to_dict()
        data["output"].pop("directory", None)
        digest = hashlib.sha256(
            json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
        )
        path = self.source_path()
        if path is not None and path.exists():
            digest.update(path.read_bytes())
        return digest.hexdigest()


_SECTIONS = {
    "problem": ProblemSection,
    "ansatz": AnsatzSection,
    "optimizer": OptimizerSection,
    "execution": ExecutionSection,
    "transpile": TranspileSection,
    "noise": NoiseSection,
    "output": OutputSection,
}

_TYPES = {int: (int,), float: (int, float), str: (str,)}


def _coerce(section: str, key: str, value: Any, annotation: str) -> Any:
    where = f"{section}.{key}"
    if annotation.startswith("tuple"):
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{where} must be a list of strings")
        return tuple(value)
    base = annotation.split(" | ")[0]
    py = {"int": int, "float": float, "str": str}[base]
    if isinstance(value, bool) or not isinstance(value, _TYPES[py]):
        raise ConfigError(f"{where} must be {base}, got {type(value).__name__}")
    return py(value)


def from_dict(data: dict[str, Any], base_dir: str | Path = ".") -> RunConfig:
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"[{name}] must be a table")
        if name == "transpile" and "optimization_level" in raw:
            raise ConfigError("transpile.optimization_level is reserved and not supported")
        fields = {f.name: f for f in dataclasses.fields(cls)}
        bad = set(raw) - set(fields)
        if bad:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(bad))}")
        kwargs = {k: _coerce(name, k, v, str(fields[k].type)) for k, v in raw.items()}
        try:
            sections[name] = cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"[{name}] is incomplete: {exc}") from None
    if "execution" not in data or "seed" not in data["execution"]:
        raise ConfigError("execution.seed is mandatory")
    cfg = RunConfig(base_dir=str(base_dir), **sections)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    p = cfg.problem
    if not 1 <= p.qubits <= 10:
        raise ConfigError("problem.qubits must be in 1..10")
    try:
        BoundaryCondition(p.bc)
    except ValueError:
        raise ConfigError(f"problem.bc must be periodic, dirichlet or neumann, not {p.bc!r}") from None
    if p.grid_spacing <= 0:
        raise ConfigError("problem.grid_spacing must be positive")
    path = cfg.source_path()
    if path is not None and not path.exists():
        raise ConfigError(f"problem.source file {path} does not exist")
    try:
        canonical_family(cfg.ansatz.family)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.ansatz.layers < 1:
        raise ConfigError("ansatz.layers must be at least 1")
    o = cfg.optimizer
    if o.method not in ("nelder-mead", "powell"):
        raise ConfigError(f"optimizer.method must be nelder-mead or powell, not {o.method!r}")
    if o.max_evals < 1 or o.restarts < 0 or o.scale <= 0:
        raise ConfigError("optimizer needs max_evals >= 1, restarts >= 0, scale > 0")
    if o.x_tolerance <= 0 or o.f_tolerance <= 0:
        raise ConfigError("optimizer tolerances must be positive")
    e = cfg.execution
    if e.mode not in ("exact", "shots"):
        raise ConfigError(f"execution.mode must be exact or shots, not {e.mode!r}")
    if e.shots < 1:
        raise ConfigError("execution.shots must be positive")
    if cfg.transpile.coupling not in ("linear", "none"):
        raise ConfigError("transpile.coupling must be linear or none")
    if cfg.noise.profile not in ("ideal", "uniform-depolarizing", "osaka-like"):
        raise ConfigError(f"unknown noise profile {cfg.noise.profile!r}")
    if cfg.noise.profile == "uniform-depolarizing" and (
        cfg.noise.eps_1q is None or cfg.noise.eps_2q is None
    ):
        raise ConfigError("uniform-depolarizing needs noise.eps_1q and noise.eps_2q")


def loads(text: str, base_dir: str | Path = ".") -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return from_dict(data, base_dir)


def load(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return loads(text, path.parent)


def dumps(cfg: RunConfig) -> str:
    return tomli_w.dumps(cfg.to_dict())
