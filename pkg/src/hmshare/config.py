"""Configuration: flat sectioned key-value text, defaults, builders.

The format is line oriented: `[section]` headers, `key = value` entries,
`#` comments.  Keys may repeat inside a section (weather CDF points, modcod
rows).  A full default configuration ships embedded so the CLI runs with no
external files.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .capacity import ModcodSpec, load_modcod_table
from .channel import AntennaModel, WeatherCdf
from .constellation import FAMILIES, HIERARCHICAL_PARAMS, \
    ConstellationParams, params_from_token, preset_id
from .ratevectors import EnumerationLimits
from .sim import Scenario


class ConfigError(ValueError):
    """Malformed configuration; message names the offending location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _fnum(v: float) -> str:
    """Shortest exact decimal form of a float (round-trip safe)."""
    return repr(float(v))


def parse_sections(text: str) -> dict[str, list[tuple[str, str]]]:
    """Parse sectioned key-value text into ordered (key, value) lists."""
    sections: dict[str, list[tuple[str, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, [])
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}", "entry before any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        sections[current].append((key, value))
    return sections


def dump_sections(sections: dict[str, list[tuple[str, str]]]) -> str:
    lines = []
    for name, entries in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {value}" for key, value in entries)
        lines.append("")
    return "\n".join(lines)


_STREAM_TOKENS = {"whole": None, "w": None, "1": 1, "2": 2}


@dataclass(frozen=True)
class ModcodRow:
    """One [modcods] row in plain-data form (round-trippable)."""

    family: str
    params_token: str
    stream: int | None
    code_rate: Fraction
    threshold_db: float | None   # None = derive

    def token(self) -> str:
        stream = "whole" if self.stream is None else str(self.stream)
        threshold = "derive" if self.threshold_db is None else _fnum(self.threshold_db)
        return f"{self.family} {self.params_token} {stream} {self.code_rate} {threshold}"


@dataclass(frozen=True)
class Config:
    """Plain-data mirror of every module input; see docs/config reference."""

    receivers: int = 50
    trials: int = 20
    snr_max_grid: tuple[float, ...] = tuple(float(v) for v in range(2, 22))
    master_seed: int = 12345
    pairing_strategy: str = "greedy"

    antenna_diameter_m: float = 1.5
    antenna_frequency_ghz: float = 20.0
    antenna_edge_attenuation_db: float = 4.0

    weather_points: tuple[tuple[float, float], ...] = (
        (0.0, 0.5), (1.0, 0.98), (4.0, 0.995), (10.0, 0.999), (20.0, 1.0))

    pair_snr_window_db: float = 16.0
    max_vectors_per_pair: int = 8
    max_total_vectors: int = 1_000_000

    margin_db: float | None = None      # None = calibrate
    modcod_rows: tuple[ModcodRow, ...] = ()

    weights: tuple[float, ...] | None = None

    # builders -----------------------------------------------------------

    def antenna(self) -> AntennaModel:
        return AntennaModel(self.antenna_diameter_m,
                            self.antenna_frequency_ghz * 1e9,
                            self.antenna_edge_attenuation_db)

    def weather(self) -> WeatherCdf:
        return WeatherCdf(self.weather_points)

    def limits(self) -> EnumerationLimits:
        return EnumerationLimits(self.pair_snr_window_db,
                                 self.max_vectors_per_pair,
                                 self.max_total_vectors)

    def modcod_specs(self) -> list[ModcodSpec]:
        specs = []
        for row in self.modcod_rows:
            params = params_from_token(row.family, row.params_token)
            specs.append(ModcodSpec(row.family, params, row.stream,
                                    row.code_rate, row.threshold_db))
        return specs

    def build_table(self):
        return load_modcod_table(self.modcod_specs(), margin_db=self.margin_db)

    def scenario(self, table=None) -> Scenario:
        table = self.build_table() if table is None else table
        return Scenario(self.receivers, self.snr_max_grid, self.trials,
                        self.master_seed, self.antenna(), self.weather(),
                        tuple(table), self.limits(), self.pairing_strategy)


def _get_scalar(entries, section, key, parse, default):
    values = [v for k, v in entries if k == key]
    if not values:
        return default
    if len(values) > 1:
        raise ConfigError(f"[{section}] {key}", "key given more than once")
    try:
        return parse(values[0])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] {key}", str(exc)) from None


def _parse_grid(token: str) -> tuple[float, ...]:
    """Grid spec a:b:step (inclusive) or a comma list of values."""
    if ":" in token:
        parts = token.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {token!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        if not out:
            raise ValueError("grid is empty")
        return tuple(out)
    return tuple(float(p) for p in token.replace(",", " ").split())


def _grid_token(grid: tuple[float, ...]) -> str:
    if len(grid) >= 2:
        step = grid[1] - grid[0]
        if step > 0 and all(abs(grid[i + 1] - grid[i] - step) < 1e-9
                            for i in range(len(grid) - 1)):
            return f"{_fnum(grid[0])}:{_fnum(grid[-1])}:{_fnum(step)}"
    return ", ".join(_fnum(v) for v in grid)


def _parse_modcod_row(value: str) -> ModcodRow:
    parts = value.split()
    if len(parts) != 5:
        raise ValueError(
            f"modcod row needs 'family params stream rate threshold', got {value!r}")
    family, params_token, stream_token, rate_token, threshold_token = parts
    family = family.lower()
    if family not in FAMILIES:
        raise ValueError(f"unknown constellation family {family!r}")
    params_from_token(family, params_token)  # validates early
    if stream_token not in _STREAM_TOKENS:
        raise ValueError(f"stream must be whole, 1 or 2, got {stream_token!r}")
    try:
        rate = Fraction(rate_token)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse code rate {rate_token!r}") from None
    threshold = None if threshold_token == "derive" else float(threshold_token)
    return ModcodRow(family, params_token, _STREAM_TOKENS[stream_token],
                     rate, threshold)


def loads(text: str) -> Config:
    """Parse configuration text into a Config, validating all fields."""
    sections = parse_sections(text)
    known = {"scenario", "antenna", "weather", "limits", "modcods", "weights"}
    for name in sections:
        if name not in known:
            raise ConfigError(f"[{name}]", "unknown section")
    cfg = Config()

    sc = sections.get("scenario", [])
    cfg = replace(
        cfg,
        receivers=_get_scalar(sc, "scenario", "receivers", int, cfg.receivers),
        trials=_get_scalar(sc, "scenario", "trials", int, cfg.trials),
        snr_max_grid=_get_scalar(sc, "scenario", "snr_max_grid", _parse_grid,
                                 cfg.snr_max_grid),
        master_seed=_get_scalar(sc, "scenario", "master_seed", int,
                                cfg.master_seed),
        pairing_strategy=_get_scalar(sc, "scenario", "pairing_strategy", str,
                                     cfg.pairing_strategy),
    )
    for key, _ in sc:
        if key not in ("receivers", "trials", "snr_max_grid", "master_seed",
                       "pairing_strategy"):
            raise ConfigError(f"[scenario] {key}", "unknown key")

    an = sections.get("antenna", [])
    cfg = replace(
        cfg,
        antenna_diameter_m=_get_scalar(an, "antenna", "diameter_m", float,
                                       cfg.antenna_diameter_m),
        antenna_frequency_ghz=_get_scalar(an, "antenna", "frequency_ghz", float,
                                          cfg.antenna_frequency_ghz),
        antenna_edge_attenuation_db=_get_scalar(
            an, "antenna", "edge_attenuation_db", float,
            cfg.antenna_edge_attenuation_db),
    )
    for key, _ in an:
        if key not in ("diameter_m", "frequency_ghz", "edge_attenuation_db"):
            raise ConfigError(f"[antenna] {key}", "unknown key")

    if "weather" in sections:
        points = []
        for key, value in sections["weather"]:
            if key != "point":
                raise ConfigError(f"[weather] {key}", "unknown key")
            parts = value.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError("[weather] point",
                                  f"expected 'attenuation_db probability', got {value!r}")
            try:
                points.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ConfigError("[weather] point",
                                  f"cannot parse {value!r}") from None
        if points:
            cfg = replace(cfg, weather_points=tuple(points))

    li = sections.get("limits", [])
    cfg = replace(
        cfg,
        pair_snr_window_db=_get_scalar(li, "limits", "pair_snr_window_db",
                                       float, cfg.pair_snr_window_db),
        max_vectors_per_pair=_get_scalar(li, "limits", "max_vectors_per_pair",
                                         int, cfg.max_vectors_per_pair),
        max_total_vectors=_get_scalar(li, "limits", "max_total_vectors", int,
                                      cfg.max_total_vectors),
    )
    for key, _ in li:
        if key not in ("pair_snr_window_db", "max_vectors_per_pair",
                       "max_total_vectors"):
            raise ConfigError(f"[limits] {key}", "unknown key")

    if "modcods" in sections:
        rows = []
        margin = None
        for key, value in sections["modcods"]:
            if key == "margin_db":
                margin = None if value == "calibrate" else float(value)
            elif key == "modcod":
                try:
                    rows.append(_parse_modcod_row(value))
                except ValueError as exc:
                    raise ConfigError("[modcods] modcod", str(exc)) from None
            elif key == "include_defaults":
                if value not in ("true", "false"):
                    raise ConfigError("[modcods] include_defaults",
                                      "expected true or false")
                if value == "true":
                    rows = default_modcod_rows() + rows
            else:
                raise ConfigError(f"[modcods] {key}", "unknown key")
        if not rows:
            raise ConfigError("[modcods]", "modcod table is empty")
        cfg = replace(cfg, modcod_rows=tuple(rows), margin_db=margin)
    else:
        cfg = replace(cfg, modcod_rows=tuple(default_modcod_rows()))

    if "weights" in sections:
        values = None
        for key, value in sections["weights"]:
            if key != "values":
                raise ConfigError(f"[weights] {key}", "unknown key")
            try:
                values = tuple(float(v) for v in value.replace(",", " ").split())
            except ValueError:
                raise ConfigError("[weights] values",
                                  f"cannot parse {value!r}") from None
        cfg = replace(cfg, weights=values)

    # re-validate through the builders so errors surface at load time
    try:
        cfg.antenna()
        cfg.weather()
        cfg.limits()
        cfg.modcod_specs()
        if cfg.receivers < 1 or cfg.trials < 1 or not cfg.snr_max_grid:
            raise ValueError("receivers, trials and grid must be non-empty")
        if cfg.pairing_strategy not in ("greedy", "optimal_matching"):
            raise ValueError(f"unknown pairing strategy {cfg.pairing_strategy!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("[config]", str(exc)) from None
    return cfg


def dumps(cfg: Config) -> str:
    """Serialise a Config back to text; loads(dumps(cfg)) == cfg."""
    sections: dict[str, list[tuple[str, str]]] = {
        "scenario": [
            ("receivers", str(cfg.receivers)),
            ("trials", str(cfg.trials)),
            ("snr_max_grid", _grid_token(cfg.snr_max_grid)),
            ("master_seed", str(cfg.master_seed)),
            ("pairing_strategy", cfg.pairing_strategy),
        ],
        "antenna": [
            ("diameter_m", _fnum(cfg.antenna_diameter_m)),
            ("frequency_ghz", _fnum(cfg.antenna_frequency_ghz)),
            ("edge_attenuation_db", _fnum(cfg.antenna_edge_attenuation_db)),
        ],
        "weather": [("point", f"{_fnum(a)} {_fnum(p)}") for a, p in cfg.weather_points],
        "limits": [
            ("pair_snr_window_db", _fnum(cfg.pair_snr_window_db)),
            ("max_vectors_per_pair", str(cfg.max_vectors_per_pair)),
            ("max_total_vectors", str(cfg.max_total_vectors)),
        ],
        "modcods": [("margin_db",
                     "calibrate" if cfg.margin_db is None else _fnum(cfg.margin_db))]
                   + [("modcod", row.token()) for row in cfg.modcod_rows],
    }
    if cfg.weights is not None:
        sections["weights"] = [("values", " ".join(_fnum(w) for w in cfg.weights))]
    return dump_sections(sections)


def load(path) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# DVB-S2 code-rate sets for the plain (whole-symbol) modcods
_WHOLE_RATES = {
    "qpsk": ("1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5", "5/6",
             "8/9", "9/10"),
    "8psk": ("3/5", "2/3", "3/4", "5/6", "8/9", "9/10"),
    "16apsk": ("2/3", "3/4", "4/5", "5/6", "8/9", "9/10"),
    "32apsk": ("3/4", "4/5", "5/6", "8/9", "9/10"),
}

# every DVB-S2 code rate is allowed on either stream of a hierarchical
# constellation; the Pareto pruning keeps the useful combinations
_STREAM_RATES = ("1/4", "1/3", "2/5", "1/2", "3/5", "2/3", "3/4", "4/5",
                 "5/6", "8/9", "9/10")


def _params_token(family: str, params: ConstellationParams) -> str:
    return preset_id(family, params)[len(family) + 1:].replace("-", ",")


def default_modcod_rows(families=FAMILIES) -> list[ModcodRow]:
    """The built-in table: plain DVB-S2 modcods plus every hierarchical
    preset on both streams, all thresholds derived."""
    rows = []
    for family in families:
        for rate in _WHOLE_RATES[family]:
            rows.append(ModcodRow(family, "uniform", None, Fraction(rate), None))
    for family in families:
        for params in HIERARCHICAL_PARAMS[family]:
            token = _params_token(family, params)
            for stream in (1, 2):
                for rate in _STREAM_RATES:
                    rows.append(ModcodRow(family, token, stream,
                                          Fraction(rate), None))
    return rows


DEFAULT_CONFIG_TEXT = dumps(Config(modcod_rows=tuple(default_modcod_rows())))


def default_config() -> Config:
    return loads(DEFAULT_CONFIG_TEXT)
