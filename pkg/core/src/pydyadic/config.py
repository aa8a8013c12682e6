import dataclasses
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path

COMMANDS = ("verify", "norms", "shift-average", "hankel", "calibrate")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


def parse_scales(text):
    """
    "a:b" -> (a, b).
    """
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    first, sep, second = str(text).partition(":")
    if not sep:
        raise ConfigError(f"scales look like 'a:b', not {text!r}")
    try:
        return int(first), int(second)
    except ValueError:
        raise ConfigError(f"scales look like 'a:b' with integers, not {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    depth: int = 6
    seed: int = 1
    ensemble: int = 200
    Y: float = 1024.0
    samples_y: int = 256
    samples_lambda: int = 256
    scales: tuple = (-8, 12)
    functions: tuple = ("box", "bump", "ramp")
    symbols: tuple = ()
    band: int = 4
    budget: int = 16
    pairs: int = 10000
    p1: float = 4.0
    p2: float = 4.0
    power_iters: int = 500
    workers: int = 1
    out: str = None
    format: str = "json"

    def __post_init__(self):
        object.__setattr__(self, "scales", parse_scales(self.scales))
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "symbols", tuple(self.symbols))

    def validate(self):
        def need(condition, name, expected):
            if not condition:
                raise ConfigError(f"{name} must be {expected}, got {getattr(self, name)!r}")

        need(self.command in COMMANDS, "command", f"one of {COMMANDS}")
        need(self.depth >= 0, "depth", "nonnegative")
        need(self.seed >= 0, "seed", "nonnegative")
        for name in ("ensemble", "samples_y", "samples_lambda", "pairs", "power_iters", "workers"):
            need(getattr(self, name) >= 1, name, "positive")
        need(self.Y > 0, "Y", "positive")
        need(len(self.scales) == 2 and self.scales[0] <= self.scales[1], "scales", "a pair a <= b")
        need(self.band >= 0, "band", "nonnegative")
        need(self.budget >= self.band, "budget", f"at least the band {self.band}")
        need(self.p1 > 1 and self.p2 > 1, "p1", "above 1 (and so must p2)")
        need(self.format in FORMATS, "format", f"one of {FORMATS}")
        if self.command == "shift-average":
            need(len(self.functions) >= 2, "functions", "a list of at least two test functions")
        else:
            need(self.format == "json", "format", "json for every command but shift-average")
        if self.command == "norms":
            need(self.depth >= 1, "depth", "at least 1 for norm ensembles")
        return self

    def as_dict(self):
        """
        The configuration as echoed into reports. The worker count is left
        out: it must not change a report.
        """
        data = dataclasses.asdict(self)
        data.pop("workers")
        data["scales"] = list(self.scales)
        data["functions"] = list(self.functions)
        data["symbols"] = list(self.symbols)
        return data


def load_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file {path} does not exist")
    if path.suffix == ".toml":
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    elif path.suffix == ".json":
        data = json.loads(path.read_text())
    else:
        raise ConfigError(f"Config files are .json or .toml, not {path.name}")
    data = {key.replace("-", "_"): value for key, value in data.items()}
    unknown = set(data) - {f.name for f in dataclasses.fields(RunConfig)}
    if unknown:
        raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
    return data


def build_config(command, flags, path=None):
    """
    Defaults, then the config file, then the flags that were given (not None).
    """
    values = load_config(path) if path else {}
    values.update({k: v for k, v in flags.items() if v is not None})
    values["command"] = command
    try:
        config = RunConfig(**values)
    except TypeError as error:
        raise ConfigError(str(error)) from None
    return config.validate()
