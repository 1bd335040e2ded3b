from fractions import Fraction

import pytest

from hmshare.config import (
    Config,
    ConfigError,
    ModcodRow,
    default_config,
    default_modcod_rows,
    dumps,
    loads,
)

MINI = """
# comment line
[scenario]
receivers = 6
trials = 2
snr_max_grid = 2:8:3
master_seed = 42

[antenna]
diameter_m = 1.2
frequency_ghz = 19.5
edge_attenuation_db = 3.5

[weather]
point = 0 0.6
point = 2.5 0.99
point = 15 1

[limits]
pair_snr_window_db = 12
max_vectors_per_pair = 4
max_total_vectors = 5000

[modcods]
margin_db = 1.25
modcod = qpsk uniform whole 1/4 -2.35
modcod = qpsk 30 1 1/2 derive
modcod = qpsk 30 2 1/2 derive
"""


class TestParsing:
    def test_mini_config(self):
        cfg = loads(MINI)
        assert cfg.receivers == 6
        assert cfg.snr_max_grid == (2.0, 5.0, 8.0)
        assert cfg.antenna_frequency_ghz == 19.5
        assert cfg.weather_points == ((0.0, 0.6), (2.5, 0.99), (15.0, 1.0))
        assert cfg.margin_db == 1.25
        assert cfg.modcod_rows[0] == ModcodRow("qpsk", "uniform", None,
                                               Fraction(1, 4), -2.35)
        assert cfg.modcod_rows[1].threshold_db is None

    def test_defaults_when_sections_missing(self):
        cfg = loads("[scenario]\nreceivers = 3\n")
        assert cfg.receivers == 3
        assert cfg.trials == Config().trials
        assert len(cfg.modcod_rows) == len(default_modcod_rows())

    def test_grid_comma_list(self):
        cfg = loads("[scenario]\nsnr_max_grid = 2, 7.5, 13\n")
        assert cfg.snr_max_grid == (2.0, 7.5, 13.0)

    def test_roundtrip_identity(self):
        for cfg in (default_config(), loads(MINI),
                    loads(MINI + "\n[weights]\nvalues = 1 2 1.5\n")):
            assert loads(dumps(cfg)) == cfg

    def test_weights_section(self):
        cfg = loads("[weights]\nvalues = 1 2 0.5\n")
        assert cfg.weights == (1.0, 2.0, 0.5)


class TestErrors:
    def test_unknown_section(self):
        with pytest.raises(ConfigError, match=r"\[nonsense\]"):
            loads("[nonsense]\nx = 1\n")

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            loads("[scenario]\nbogus_key = 1\n")

    def test_duplicate_scalar_key(self):
        with pytest.raises(ConfigError, match="more than once"):
            loads("[scenario]\nreceivers = 2\nreceivers = 3\n")

    def test_line_without_equals(self):
        with pytest.raises(ConfigError, match="key = value"):
            loads("[scenario]\nreceivers 2\n")

    def test_entry_before_section(self):
        with pytest.raises(ConfigError, match="before any"):
            loads("receivers = 2\n")

    def test_bad_modcod_row(self):
        with pytest.raises(ConfigError, match="code rate"):
            loads("[modcods]\nmodcod = qpsk uniform whole nonsense derive\n")

    def test_bad_family(self):
        with pytest.raises(ConfigError, match="family"):
            loads("[modcods]\nmodcod = 64apsk uniform whole 1/2 derive\n")

    def test_empty_modcod_table(self):
        with pytest.raises(ConfigError, match="empty"):
            loads("[modcods]\nmargin_db = calibrate\n")

    def test_bad_weather_point(self):
        with pytest.raises(ConfigError, match="point"):
            loads("[weather]\npoint = 1\n")

    def test_invalid_weather_cdf(self):
        with pytest.raises(ConfigError, match="probability 1"):
            loads("[weather]\npoint = 0 0.5\npoint = 1 0.9\n")

    def test_bad_grid(self):
        with pytest.raises(ConfigError, match="grid"):
            loads("[scenario]\nsnr_max_grid = 2:8\n")

    def test_bad_strategy(self):
        with pytest.raises(ConfigError, match="strategy"):
            loads("[scenario]\npairing_strategy = random\n")


class TestDefaults:
    def test_default_table_contents(self):
        rows = default_modcod_rows()
        whole = [r for r in rows if r.stream is None]
        hier = [r for r in rows if r.stream is not None]
        assert len(whole) == 11 + 6 + 6 + 5
        # 22 hierarchical geometries, two streams, eleven code rates
        assert len(hier) == 22 * 2 * 11
        assert all(r.threshold_db is None for r in rows)

    def test_default_config_parses(self):
        cfg = default_config()
        assert cfg.receivers == 50 and cfg.trials == 20
        assert cfg.snr_max_grid[0] == 2.0 and cfg.snr_max_grid[-1] == 21.0
        cfg.antenna()
        cfg.weather()
        cfg.limits()
        assert len(cfg.modcod_specs()) == len(cfg.modcod_rows)
