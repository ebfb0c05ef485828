"""
Run configuration shared by the command-line subcommands.

A configuration is read from a line-oriented ``key = value`` file (``#`` starts a comment) or a
JSON object, then overridden by command-line flags. Together with the code version it fixes a
run completely.

"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from cross_modes.base import DEFAULT_SEED

_ALIASES = {"class": "sym"}


def parse_range(value, type_=float):
    """
    Parse a sequence given as ``start:stop[:step]`` or a comma-separated list.

    The stop value is inclusive when it lies on the step lattice.

    Parameters
    ----------
    value : str or Sequence
        Range expression, list expression, or an existing sequence.
    type_ : type, optional
        Element type, `float` or `int`.

    Returns
    -------
    list

    Examples
    --------
    >>> parse_range("80:200:40", int)
    [80, 120, 160, 200]
    >>> parse_range("1.0, 1.05,1.1")
    [1.0, 1.05, 1.1]

    """
    if not isinstance(value, str):
        return [type_(v) for v in value]

    value = value.strip()
    if ":" not in value:
        return [type_(v) for v in value.split(",") if v.strip()]

    parts = value.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"Range {value!r} must read start:stop[:step].")
    start, stop = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else 1.0
    if step <= 0.0:
        raise ValueError("Range step must be positive.")
    if stop < start:
        raise ValueError(f"Range {value!r} is not ascending.")

    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    out = start + step * np.arange(n)
    if type_ is int:
        return [int(round(v)) for v in out]
    # decimal steps accumulate rounding; keep 12 significant digits
    return [type_(float(f"{v:.12g}")) for v in out]


@dataclass
class RunConfig:
    """
    Parameters of one command-line run.

    Unset values (`None`) fall back to the defaults of the subcommand.

    """

    command: str = None
    sym: str = "ee"
    beta: float = None
    betas: str = None
    set: str = None
    L: float = None
    N: int = None
    Ns: str = None
    tol: float = 1e-9
    k: int = 1
    seed: int = DEFAULT_SEED
    scheme: str = "fd"
    full: bool = False
    output: str = None
    json: str = None
    field: str = None
    cut: str = None
    cut_at: str = None
    cache_dir: str = None
    no_cache: bool = False
    require_bound: bool = False
    compare: bool = False
    verify: bool = False
    method: str = "both"
    axis: str = None
    records: str = None
    window_x: str = None
    window_y: str = None
    jobs: int = 1
    log: str = None
    verbose: bool = False

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or f.type is str:
                continue
            if f.type is bool and isinstance(value, str):
                value = value.strip().lower() in ("1", "true", "yes", "on")
            setattr(self, f.name, f.type(value))

    @classmethod
    def from_file(cls, file):
        """
        Load a configuration file.

        Files whose content starts with ``{`` are read as JSON, others as ``key = value`` lines.
        Dashes in keys are read as underscores, so flag names may be used verbatim.

        """
        text = Path(file).read_text()
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            data = {}
            for n, line in enumerate(text.splitlines(), start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{file}:{n}: expected 'key = value', got {line!r}.")
                key, value = (s.strip() for s in line.split("=", 1))
                data[key] = value
        return cls().update(data)

    def update(self, data):
        """Override fields in place; `None` values leave a field unchanged."""
        names = {f.name for f in fields(self)}
        for key, value in data.items():
            key = key.replace("-", "_").lstrip("_")
            key = _ALIASES.get(key, key)
            if key not in names:
                raise ValueError(f"Unknown configuration key {key!r}.")
            if value is not None:
                setattr(self, key, value)
        self.__post_init__()
        return self

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    # Derived values
    def beta_values(self):
        if self.betas is not None:
            return parse_range(self.betas, float)
        elif self.beta is not None:
            return [self.beta]
        else:
            raise ValueError("No width ratio given; use --beta or --betas.")

    def grid_counts(self):
        if self.Ns is None:
            raise ValueError("No grid sequence given; use --Ns.")
        return parse_range(self.Ns, int)

    def window(self, axis):
        value = self.window_x if axis == "x" else self.window_y
        if value is None:
            return None
        window = parse_range(value.replace(":", ","), float)
        if len(window) != 2:
            raise ValueError(f"Window {value!r} must give two bounds.")
        return tuple(window)

    def cut_positions(self):
        if self.cut_at is None:
            return None
        cuts = parse_range(self.cut_at, float)
        if len(cuts) != 2:
            raise ValueError("Cut must give the two positions 'y0,x0'.")
        return tuple(cuts)
