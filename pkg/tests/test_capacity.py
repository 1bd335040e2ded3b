import math
from fractions import Fraction

import numpy as np
import pytest

from hmshare.capacity import (
    ModcodSpec,
    calibrated_margin,
    decoding_threshold,
    load_modcod_table,
    stream_mutual_information,
)
from hmshare.constellation import (
    HIERARCHICAL_PARAMS,
    UNIFORM_PARAMS,
    ConstellationParams,
    get_constellation,
)


@pytest.fixture(scope="session")
def qpsk():
    return get_constellation("qpsk", UNIFORM_PARAMS["qpsk"])


@pytest.fixture(scope="session")
def margin():
    return calibrated_margin()


class TestMutualInformation:
    def test_high_snr_limit(self, qpsk):
        assert stream_mutual_information(qpsk, None, 40.0).value == pytest.approx(2.0, abs=1e-9)

    def test_low_snr_limit(self, qpsk):
        assert stream_mutual_information(qpsk, None, -50.0).value < 1e-4

    def test_quadrature_matches_monte_carlo(self, qpsk):
        quad = stream_mutual_information(qpsk, None, 0.0)
        mc = stream_mutual_information(qpsk, None, 0.0, "monte_carlo",
                                       samples=1_000_000,
                                       rng=np.random.default_rng(123))
        assert mc.std_error > 0
        assert abs(quad.value - mc.value) < 3.0 * mc.std_error

    @pytest.mark.parametrize("family", ["qpsk", "8psk", "16apsk", "32apsk"])
    def test_chain_rule(self, family):
        c = get_constellation(family, HIERARCHICAL_PARAMS[family][1])
        for snr in (-5.0, 3.0, 12.0):
            s1 = stream_mutual_information(c, 1, snr).value
            s2 = stream_mutual_information(c, 2, snr).value
            whole = stream_mutual_information(c, None, snr).value
            assert abs(s1 + s2 - whole) < 1e-6

    @pytest.mark.parametrize("stream", [1, 2, None])
    def test_bounds_and_monotone(self, stream):
        c = get_constellation("16apsk", HIERARCHICAL_PARAMS["16apsk"][0])
        bits = c.stream_bit_count(stream)
        values = [stream_mutual_information(c, stream, snr).value
                  for snr in np.arange(-10.0, 20.1, 0.5)]
        assert all(0.0 <= v <= bits for v in values)
        assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))

    def test_monte_carlo_chain_rule_within_sigma(self):
        c = get_constellation("qpsk", ConstellationParams(30.0))
        rngs = [np.random.default_rng(s) for s in (1, 2, 3)]
        s1 = stream_mutual_information(c, 1, 2.0, "monte_carlo",
                                       samples=400_000, rng=rngs[0])
        s2 = stream_mutual_information(c, 2, 2.0, "monte_carlo",
                                       samples=400_000, rng=rngs[1])
        whole = stream_mutual_information(c, None, 2.0, "monte_carlo",
                                          samples=400_000, rng=rngs[2])
        sigma = s1.std_error + s2.std_error + whole.std_error
        assert abs(s1.value + s2.value - whole.value) < 3.0 * sigma + 1e-6

    def test_rejects_bad_inputs(self, qpsk):
        with pytest.raises(ValueError):
            stream_mutual_information(qpsk, None, math.inf)
        with pytest.raises(ValueError):
            stream_mutual_information(qpsk, 3, 0.0)
        with pytest.raises(ValueError):
            stream_mutual_information(qpsk, None, 0.0, "monte_carlo")


class TestDecodingThreshold:
    def test_calibrated_qpsk_quarter(self, qpsk, margin):
        th = decoding_threshold(qpsk, None, Fraction(1, 4), margin)
        assert th == pytest.approx(-2.35, abs=1.5)
        # calibration pins it much tighter than the stated tolerance
        assert th == pytest.approx(-2.35, abs=0.02)

    def test_monotone_in_rate(self, qpsk):
        t_half = decoding_threshold(qpsk, None, Fraction(1, 2), 0.0)
        t_nine = decoding_threshold(qpsk, None, Fraction(9, 10), 0.0)
        assert t_nine > t_half

    def test_rate_one_unreachable(self, qpsk):
        with pytest.raises(ValueError, match="unreachable"):
            decoding_threshold(qpsk, None, Fraction(1, 1), 0.0)

    def test_bisection_agrees_with_grid_scan(self):
        c = get_constellation("qpsk", ConstellationParams(30.0))
        got = decoding_threshold(c, 1, Fraction(1, 2), 0.0)
        target = 0.5 * c.stream_bit_count(1)
        grid = np.arange(-5.0, 5.0, 0.01)
        hits = [s for s in grid
                if stream_mutual_information(c, 1, s).value >= target]
        assert hits, "grid scan found no decodable SNR"
        assert abs(got - hits[0]) <= 0.02

    def test_margin_shifts_threshold(self, qpsk):
        base = decoding_threshold(qpsk, None, Fraction(1, 2), 0.0)
        assert decoding_threshold(qpsk, None, Fraction(1, 2), 1.0) == \
            pytest.approx(base + 1.0, abs=1e-12)


class TestModcodTable:
    def test_explicit_row(self):
        table = load_modcod_table(
            [ModcodSpec("qpsk", UNIFORM_PARAMS["qpsk"], None,
                        Fraction(1, 4), -2.35)],
            margin_db=0.0)
        assert len(table) == 1
        assert table[0].spectral_efficiency == pytest.approx(0.5)
        assert table[0].threshold_db == -2.35
        assert table[0].key == "qpsk-45/w/1/4"

    def test_derived_matches_decoding_threshold(self, margin):
        c = get_constellation("8psk", ConstellationParams(27.0))
        table = load_modcod_table(
            [ModcodSpec("8psk", ConstellationParams(27.0), 2,
                        Fraction(1, 2), None)])
        assert table[0].threshold_db == pytest.approx(
            decoding_threshold(c, 2, Fraction(1, 2), margin), abs=1e-12)

    def test_duplicate_rejected(self):
        spec = ModcodSpec("qpsk", UNIFORM_PARAMS["qpsk"], None,
                          Fraction(1, 4), -2.35)
        with pytest.raises(ValueError, match="duplicate"):
            load_modcod_table([spec, spec], margin_db=0.0)

    def test_sorted_by_threshold(self):
        rows = [
            ModcodSpec("qpsk", UNIFORM_PARAMS["qpsk"], None, Fraction(1, 2), 1.0),
            ModcodSpec("qpsk", UNIFORM_PARAMS["qpsk"], None, Fraction(1, 4), -2.35),
            ModcodSpec("qpsk", UNIFORM_PARAMS["qpsk"], None, Fraction(9, 10), 6.4),
        ]
        table = load_modcod_table(rows, margin_db=0.0)
        assert [mc.threshold_db for mc in table] == sorted(
            mc.threshold_db for mc in table)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            load_modcod_table([], margin_db=0.0)

    def test_derived_thresholds_monotone_per_group(self, margin):
        rows = [ModcodSpec("qpsk", ConstellationParams(36.0), 1, r, None)
                for r in (Fraction(1, 4), Fraction(1, 2), Fraction(4, 5))]
        table = load_modcod_table(rows)
        by_rate = sorted(table, key=lambda mc: mc.code_rate)
        ths = [mc.threshold_db for mc in by_rate]
        assert ths == sorted(ths)
