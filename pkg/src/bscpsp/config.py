"""Experiment configuration as flat ``section.key=value`` text.

Blank lines and ``#`` comments are ignored. Tuples are comma separated and
``none`` clears an optional value. :func:`dump_config` writes every key, so
parsing a dump reproduces the configuration exactly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class FringeSection:
    A: float = 0.5
    B: float = 0.4
    wavelength: float = 24.0
    width: int = 480
    height: int = 16


@dataclass
class MotionSection:
    v0: float = 0.25
    a: float = 0.01
    datum: float = 0.0


@dataclass
class CaptureSection:
    gamma: float = 1.15  # used by the gamma variant of the decay study
    gain: float = 0.0
    dark_signal: float = 0.0
    dark_variance: float = 0.0


@dataclass
class NoiseSection:
    gain: float = 0.02
    A: float = 0.4
    B: float = 0.4
    trials: int = 1_000_000
    phases: int = 8
    n_values: tuple = (4, 8, 12, 16, 20)
    workers: int = 1


@dataclass
class UnwrapSection:
    v0: float = 0.15
    a: float = 0.005
    width: int = 480
    height: int = 4
    k_max: int = 4


@dataclass
class BenchSection:
    width: int = 640
    height: int = 480
    repetitions: int = 100
    warmup: int = 2
    workers: int = 1
    k_max: int = 15


@dataclass
class StreamSection:
    frames: int = 100
    K: int = 4
    width: int = 160
    height: int = 120
    v0: float = 0.05
    a: float = 0.002
    dump_every: int = 1


@dataclass
class RunSection:
    seed: int = 0
    k_min: int = 0
    k_max: int = 8
    method: str | None = None


@dataclass
class ExperimentConfig:
    fringe: FringeSection = field(default_factory=FringeSection)
    motion: MotionSection = field(default_factory=MotionSection)
    capture: CaptureSection = field(default_factory=CaptureSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    unwrap: UnwrapSection = field(default_factory=UnwrapSection)
    bench: BenchSection = field(default_factory=BenchSection)
    stream: StreamSection = field(default_factory=StreamSection)
    run: RunSection = field(default_factory=RunSection)

    def sections(self):
        for f in dataclasses.fields(self):
            yield f.name, getattr(self, f.name)

    def set(self, key: str, raw: str) -> None:
        """Assign ``section.name`` from its text form."""
        section, _, name = key.partition(".")
        if not name or not hasattr(self, section):
            raise ConfigError(key, "unknown key")
        sec = getattr(self, section)
        if name not in {f.name for f in dataclasses.fields(sec)}:
            raise ConfigError(key, "unknown key")
        setattr(sec, name, _coerce(key, getattr(type(sec)(), name), raw))

    def validate(self) -> "ExperimentConfig":
        checks = [
            ("fringe.B", self.fringe.B >= 0 and self.fringe.A - self.fringe.B >= 0 and self.fringe.A + self.fringe.B <= 1, "need 0 <= B <= A and A + B <= 1"),
            ("fringe.wavelength", self.fringe.wavelength > 0, "must be positive"),
            ("fringe.width", self.fringe.width > 0 and self.fringe.height > 0, "image size must be positive"),
            ("capture.gamma", self.capture.gamma >= 1, "must be >= 1"),
            ("capture.gain", self.capture.gain >= 0, "must be >= 0"),
            ("noise.trials", self.noise.trials >= 100_000, "must be >= 100000"),
            ("noise.n_values", all(int(n) >= 4 for n in self.noise.n_values) and len(self.noise.n_values) > 0, "pattern counts must be >= 4"),
            ("run.k_min", 0 <= self.run.k_min <= self.run.k_max, "need 0 <= k_min <= k_max"),
            ("run.method", self.run.method in (None, "pbsc3", "pbsc4", "ibsc"), "must be pbsc3, pbsc4 or ibsc"),
            ("bench.repetitions", self.bench.repetitions >= 1, "must be >= 1"),
            ("stream.frames", self.stream.frames >= 1, "must be >= 1"),
            ("stream.K", self.stream.K >= 0, "must be >= 0"),
            ("stream.dump_every", self.stream.dump_every >= 0, "must be >= 0"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, msg)
        return self


def _coerce(key: str, default, raw: str):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {type(default).__name__}") from None
    if default is None or isinstance(default, str):
        return None if raw.lower() in ("", "none") else raw
    raise ConfigError(key, f"unsupported field type {type(default).__name__}")


def _render(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        cfg.set(key.strip(), raw)
    return cfg.validate()


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig().validate()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for name, sec in cfg.sections():
        for f in dataclasses.fields(sec):
            lines.append(f"{name}.{f.name}={_render(getattr(sec, f.name))}")
    return "\n".join(lines) + "\n"
