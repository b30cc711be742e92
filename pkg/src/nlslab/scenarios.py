"""Run configurations: a named initial profile plus solver and check settings.

A scenario is a JSON object with the fields of Scenario below.  The bundled
files under scenarios/ drive the regression battery; every bound the checks
enforce lives in the file's tolerances block, so pinned constants can be
audited or tightened without touching code.

Profile kinds and their parameters:
  zero                                     u0 = 0
  constant    a                            u0 = a
  plane_wave  n, a                         u0 = a exp(2 pi i n x)
  mode_list   modes = [[n, re, im], ...]   finitely many prescribed modes
  highfreq    modes, L_values, epsilon, M, T, s
              the mode_list profile shifted to base mode L and rescaled to
              H^s norm M, one run per L

The seed field is reserved for randomized property tests; the pipelines
themselves are deterministic.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigError
from .field import SpectralGrid, StateField

PROFILE_KINDS = ("zero", "constant", "plane_wave", "mode_list", "highfreq")


@dataclass(frozen=True)
class Scenario:
    name: str
    profile: dict
    grid_points: int
    dt: float
    t_end: float
    stride: int
    K: int
    s_values: tuple
    tolerances: dict
    seed: int

    def tolerance(self, key: str) -> float:
        try:
            return float(self.tolerances[key])
        except KeyError:
            raise ConfigError(
                f"scenario '{self.name}' lacks tolerance '{key}'") from None


def _field(data: dict, key: str, kind, origin: str):
    if key not in data:
        raise ConfigError(f"{origin}: missing field '{key}'")
    value = data[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(
            f"{origin}: field '{key}' must be {kind.__name__}, "
            f"got {type(value).__name__}")
    return value


def _positive(value, key: str, origin: str):
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{origin}: field '{key}' must be positive and "
                          f"finite, got {value!r}")
    return value


def _mode_triples(raw, origin: str) -> list:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{origin}: 'modes' must be a non-empty list")
    out = []
    for i, item in enumerate(raw):
        if (not isinstance(item, list) or len(item) != 3
                or not all(isinstance(x, (int, float)) for x in item)):
            raise ConfigError(
                f"{origin}: modes[{i}] must be [n, re, im] numbers")
        n, re, im = item
        if int(n) != n:
            raise ConfigError(f"{origin}: modes[{i}] index must be integral")
        out.append((int(n), complex(float(re), float(im))))
    return out


def _check_profile(profile: dict, origin: str) -> None:
    kind = _field(profile, "kind", str, origin)
    if kind not in PROFILE_KINDS:
        raise ConfigError(f"{origin}: unknown profile kind {kind!r}; "
                          f"expected one of {', '.join(PROFILE_KINDS)}")
    if kind == "constant":
        _field(profile, "a", float, origin)
    elif kind == "plane_wave":
        _field(profile, "n", int, origin)
        _field(profile, "a", float, origin)
    elif kind in ("mode_list", "highfreq"):
        _mode_triples(profile.get("modes"), origin)
    if kind == "highfreq":
        ls = profile.get("L_values")
        if (not isinstance(ls, list) or not ls
                or any(not isinstance(x, int) or x < 1 for x in ls)
                or sorted(ls) != ls):
            raise ConfigError(f"{origin}: 'L_values' must be an ascending "
                              "list of integers >= 1")
        for key in ("epsilon", "M", "T", "s"):
            _positive(_field(profile, key, float, origin), key, origin)


def parse_scenario(data: dict, origin: str = "<dict>") -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError(f"{origin}: scenario must be a JSON object")
    name = _field(data, "name", str, origin)
    profile = _field(data, "profile", dict, origin)
    _check_profile(profile, origin)
    grid_points = _field(data, "grid_points", int, origin)
    if grid_points < 8 or grid_points % 2:
        raise ConfigError(f"{origin}: 'grid_points' must be even and >= 8")
    dt = _positive(_field(data, "dt", float, origin), "dt", origin)
    t_end = _field(data, "t_end", float, origin)
    if not np.isfinite(t_end) or t_end == 0:
        raise ConfigError(f"{origin}: 't_end' must be finite and nonzero")
    stride = _positive(_field(data, "stride", int, origin), "stride", origin)
    K = _positive(_field(data, "K", int, origin), "K", origin)
    s_raw = _field(data, "s_values", list, origin)
    if not s_raw or not all(isinstance(x, (int, float)) and not
                            isinstance(x, bool) for x in s_raw):
        raise ConfigError(f"{origin}: 's_values' must be a non-empty list "
                          "of numbers")
    tolerances = _field(data, "tolerances", dict, origin)
    for key, value in tolerances.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{origin}: tolerance '{key}' must be a number")
    seed = _field(data, "seed", int, origin)
    return Scenario(name=name, profile=dict(profile),
                    grid_points=grid_points, dt=dt, t_end=float(t_end),
                    stride=stride, K=K,
                    s_values=tuple(float(x) for x in s_raw),
                    tolerances=dict(tolerances), seed=seed)


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: malformed JSON at line {e.lineno} column {e.colno}: "
            f"{e.msg}") from None
    return parse_scenario(data, origin=str(path))


def initial_state(scenario: Scenario) -> StateField:
    """The unshifted profile on the scenario grid (highfreq shifts per L later)."""
    grid = SpectralGrid(scenario.grid_points)
    profile = scenario.profile
    kind = profile["kind"]
    if kind == "zero":
        return StateField.from_mode_dict(grid, {})
    if kind == "constant":
        return StateField.from_mode_dict(grid, {0: profile["a"]})
    if kind == "plane_wave":
        return StateField.from_mode_dict(grid, {profile["n"]: profile["a"]})
    modes = _mode_triples(profile["modes"], scenario.name)
    half = grid.point_count // 2
    for n, _ in modes:
        if not (-half <= n < half):
            raise ConfigError(f"scenario '{scenario.name}': mode {n} does "
                              f"not fit a {grid.point_count}-point grid")
    return StateField.from_mode_dict(grid, dict(modes))


def bundled_names() -> list:
    root = resources.files("nlslab") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_scenario(name: str) -> Scenario:
    root = resources.files("nlslab") / "scenarios"
    entry = root / f"{name}.json"
    try:
        text = entry.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"no bundled scenario named {name!r}; have "
                          f"{', '.join(bundled_names())}") from None
    return parse_scenario(json.loads(text), origin=f"bundled:{name}")
