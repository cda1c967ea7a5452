"""Sweep configuration: flat ``key=value`` files merged with command-line overrides."""

from dataclasses import asdict, dataclass, fields

import numpy as np

from .states import visibility_for_concurrence

MODES = ("analytic", "tomographic")
FORMATS = ("csv", "json")

DEFAULT_FIDELITY = 0.97
DEFAULT_C0 = 0.975


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def fmt(x):
    """Locale-independent 12-significant-digit rendering."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        s = format(float(x), ".12g")
        return "0" if s == "-0" else s
    return str(x)


def parse_grid(text):
    """``start:stop:step`` (stop inclusive) or a comma separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise ConfigError("epsilon_grid", "step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            if n < 1:
                raise ConfigError("epsilon_grid", "empty grid")
            return tuple(round(start + k * step, 12) for k in range(n))
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("epsilon_grid", f"cannot parse {text!r}") from None


@dataclass(frozen=True)
class SweepConfig:
    epsilon_grid: tuple = parse_grid("0:0.5:0.01")
    fidelity: float = DEFAULT_FIDELITY
    visibility: float = visibility_for_concurrence(DEFAULT_C0)
    mode: str = "analytic"
    counts: int = 10_000
    reps: int = 200
    seed: int = 2024
    format: str = "csv"

    def __post_init__(self):
        grid = tuple(float(e) for e in self.epsilon_grid)
        object.__setattr__(self, "epsilon_grid", grid)
        if not grid:
            raise ConfigError("epsilon_grid", "empty grid")
        if any(not 0 <= e <= 0.5 for e in grid):
            raise ConfigError("epsilon_grid", "values must lie in [0, 0.5]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("epsilon_grid", "grid must be strictly increasing")
        if not 0 <= self.fidelity <= 1:
            raise ConfigError("fidelity", "must lie in [0, 1]")
        if not 0 <= self.visibility <= 1:
            raise ConfigError("visibility", "must lie in [0, 1]")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}")
        if self.counts < 1:
            raise ConfigError("counts", "must be at least 1")
        if self.reps < 2:
            raise ConfigError("reps", "must be at least 2")
        if self.seed < 0:
            raise ConfigError("seed", "must be non-negative")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}")

    def header(self):
        """One-line ``key=value`` rendering of the resolved configuration."""
        parts = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "epsilon_grid":
                v = ",".join(fmt(e) for e in v)
            else:
                v = fmt(v)
            parts.append(f"{f.name}={v}")
        return " ".join(parts)

    def as_dict(self):
        d = asdict(self)
        d["epsilon_grid"] = list(self.epsilon_grid)
        return d


_CASTS = {
    "fidelity": float,
    "visibility": float,
    "mode": str,
    "counts": int,
    "reps": int,
    "seed": int,
    "format": str,
}

# accepted aliases in config files
_ALIASES = {"F": "fidelity", "N": "counts", "repetitions": "reps", "output_format": "format"}


def read_config_file(path):
    """Parse a flat ``key=value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", f"expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[_ALIASES.get(key, key)] = value
    return out


def resolve(*layers):
    """Merge raw string/typed layers (later wins) into a :class:`SweepConfig`."""
    merged = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    kwargs = {}
    for key, value in merged.items():
        if key == "epsilon":
            kwargs["epsilon_grid"] = (float(value),)
        elif key == "epsilon_grid":
            kwargs["epsilon_grid"] = parse_grid(value) if isinstance(value, str) else tuple(value)
        elif key in _CASTS:
            try:
                kwargs[key] = _CASTS[key](value)
            except ValueError:
                raise ConfigError(key, f"cannot parse {value!r}") from None
        else:
            raise ConfigError(key, "unknown configuration key")
    return SweepConfig(**kwargs)
