import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hmshare.capacity import ModCod
from hmshare.channel import AntennaModel, Receiver, WeatherCdf


def mc(cid, stream, rate, se, th):
    return ModCod(cid, stream, Fraction(rate), se, th)


@pytest.fixture(scope="session")
def tiny_table():
    """Hand-built table with explicit thresholds (no derivation cost).

    The hierarchical qpsk-33 entries are generous enough that pairing a weak
    receiver with a strong one beats plain time sharing.
    """
    return [
        mc("qpsk-45", None, "1/4", 0.5, -2.35),
        mc("qpsk-45", None, "1/2", 1.0, 1.0),
        mc("qpsk-45", None, "4/5", 1.6, 4.7),
        mc("qpsk-45", None, "9/10", 1.8, 6.4),
        mc("16apsk-30-2.7", None, "3/4", 3.0, 10.2),
        mc("32apsk-33.75-2.64-4.64", None, "9/10", 4.5, 16.1),
        mc("qpsk-33", 1, "1/4", 0.25, -2.0),
        mc("qpsk-33", 1, "1/2", 0.5, -0.2),
        mc("qpsk-33", 1, "4/5", 0.8, 2.6),
        mc("qpsk-33", 2, "1/2", 0.5, 3.0),
        mc("qpsk-33", 2, "4/5", 0.8, 6.1),
        mc("16apsk-28.4-2.3", 1, "1/2", 1.0, 5.4),
        mc("16apsk-28.4-2.3", 2, "2/3", 1.3333333333333333, 11.1),
    ]


@pytest.fixture(scope="session")
def antenna():
    return AntennaModel(1.5, 20e9, 4.0)


@pytest.fixture(scope="session")
def weather():
    return WeatherCdf(((0.0, 0.5), (1.0, 0.98), (4.0, 0.995),
                       (10.0, 0.999), (20.0, 1.0)))


def rx(i, snr):
    return Receiver(i, snr, 0.0, 0.0)
