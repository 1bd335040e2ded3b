"""Spot-beam channel model: antenna pattern, weather fades, receiver SNRs.

Location attenuation follows the parabolic-antenna radiation pattern
(2 J1(u)/u)^2 with u = sin(theta) * pi * D / lambda; weather attenuation is
drawn from a configurable piecewise-linear empirical CDF.  A receiver's SNR
is the beam-centre SNR minus both attenuations.
"""

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0

_SERIES_CUTOFF = 12.0
_SERIES_TERMS = 36

# Hankel asymptotic coefficients a_k for order 1: a_0 = 1,
# a_k = a_{k-1} * (4 - (2k-1)^2) / (8k); 8 even + 8 odd terms used.
_ASYMPTOTIC_TERMS = 16
_A = [1.0]
for _k in range(1, _ASYMPTOTIC_TERMS):
    _A.append(_A[-1] * (4.0 - (2.0 * _k - 1.0) ** 2) / (8.0 * _k))


def bessel_j1(x):
    """First-order Bessel function of the first kind.

    Power series below |x| = 12, Hankel asymptotic expansion beyond;
    absolute error stays under 1e-10 for |x| <= 50.  Accepts scalars or
    arrays and matches the input shape.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)

    small = np.abs(arr) < _SERIES_CUTOFF
    if small.any():
        xs = arr[small]
        z = -0.25 * xs * xs
        term = np.ones_like(xs)
        acc = np.ones_like(xs)
        for k in range(1, _SERIES_TERMS):
            term = term * z / (k * (k + 1))
            acc += term
        out[small] = 0.5 * xs * acc

    big = ~small
    if big.any():
        xb = np.abs(arr[big])
        inv = 1.0 / xb
        p = np.zeros_like(xb)
        q = np.zeros_like(xb)
        for j in range(_ASYMPTOTIC_TERMS // 2 - 1, -1, -1):
            p = p * (inv * inv) + (-1.0) ** j * _A[2 * j]
            q = q * (inv * inv) + (-1.0) ** j * _A[2 * j + 1]
        omega = xb - 0.75 * math.pi
        val = np.sqrt(2.0 / (math.pi * xb)) * (p * np.cos(omega)
                                               - q * inv * np.sin(omega))
        out[big] = np.where(arr[big] < 0, -val, val)  # J1 is odd

    return float(out[0]) if scalar else out.reshape(np.shape(x))


def _j1_first_zero() -> float:
    lo, hi = 3.0, 4.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bessel_j1(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


J1_FIRST_ZERO = _j1_first_zero()


@dataclass(frozen=True)
class AntennaModel:
    """Parabolic antenna: diameter, carrier frequency, beam-edge definition."""

    diameter_m: float
    frequency_hz: float
    edge_attenuation_db: float

    def __post_init__(self):
        if self.diameter_m <= 0:
            raise ValueError("antenna diameter must be positive")
        if self.frequency_hz <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.edge_attenuation_db <= 0:
            raise ValueError("edge attenuation must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def aperture_factor(self) -> float:
        """pi * D / lambda, the u = sin(theta) scale of the pattern."""
        return math.pi * self.diameter_m / self.wavelength_m


def _pattern_db_from_u(u):
    """Attenuation in dB as a function of u = sin(theta) * pi * D / lambda."""
    u = np.asarray(u, dtype=float)
    gain = np.where(u == 0.0, 1.0, 2.0 * bessel_j1(np.where(u == 0.0, 1.0, u))
                    / np.where(u == 0.0, 1.0, u))
    return -20.0 * np.log10(gain)


def pattern_attenuation_db(antenna: AntennaModel, offaxis_deg: float) -> float:
    """Relative attenuation of the antenna pattern at an off-axis angle.

    Returns 0 at boresight (the 0/0 limit is taken analytically); raises
    ValueError outside [0, 90) or beyond the first null of the main lobe.
    """
    if not 0.0 <= offaxis_deg < 90.0:
        raise ValueError(f"off-axis angle must lie in [0, 90), got {offaxis_deg!r}")
    if offaxis_deg == 0.0:
        return 0.0
    u = math.sin(math.radians(offaxis_deg)) * antenna.aperture_factor
    if u >= J1_FIRST_ZERO:
        raise ValueError(
            f"angle {offaxis_deg} deg lies beyond the main lobe of the pattern")
    return float(_pattern_db_from_u(u))


def edge_angle(antenna: AntennaModel) -> float:
    """Off-axis angle (degrees) where the pattern reaches the edge attenuation.

    Bisection to 1e-6 degrees; raises ValueError when the requested edge
    attenuation is not reached inside the main lobe.
    """
    target = antenna.edge_attenuation_db
    if target == 0.0:
        return 0.0
    if target < 0.0:
        raise ValueError("edge attenuation must be non-negative")
    sin_null = J1_FIRST_ZERO / antenna.aperture_factor
    if sin_null < 1.0:
        hi = math.degrees(math.asin(sin_null)) * (1.0 - 1e-12)
    else:
        hi = 90.0 - 1e-9
    if pattern_attenuation_db(antenna, hi) < target:
        raise ValueError("edge attenuation not reached inside the main lobe")
    lo = 0.0
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if pattern_attenuation_db(antenna, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class WeatherCdf:
    """Piecewise-linear empirical CDF of weather attenuation in dB.

    points is a sequence of (attenuation_db, cumulative_probability) pairs
    with strictly increasing non-negative attenuations and non-decreasing
    probabilities ending at 1.  Probability mass below the first point is a
    point mass at that attenuation.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(a), float(p)) for a, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("weather CDF needs at least one point")
        atts = [a for a, _ in pts]
        probs = [p for _, p in pts]
        if any(a < 0 for a in atts):
            raise ValueError("weather attenuations must be non-negative")
        if any(b <= a for a, b in zip(atts, atts[1:])):
            raise ValueError("weather attenuations must be strictly increasing")
        if any(q < p for p, q in zip(probs, probs[1:])) or any(
                not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("weather probabilities must be non-decreasing in [0, 1]")
        if probs[-1] != 1.0:
            raise ValueError("weather CDF must end at probability 1")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF sampling of weather attenuation values."""
        atts = np.array([a for a, _ in self.points])
        probs = np.array([p for _, p in self.points])
        v = rng.random(size)
        out = np.empty(size)
        below = v <= probs[0]
        out[below] = atts[0]
        if (~below).any():
            out[~below] = np.interp(v[~below], probs, atts)
        return out

    def cdf(self, attenuation_db) -> np.ndarray:
        atts = np.array([a for a, _ in self.points])
        probs = np.array([p for _, p in self.points])
        return np.interp(np.asarray(attenuation_db, dtype=float), atts, probs,
                         left=0.0, right=1.0)


@dataclass(frozen=True)
class Receiver:
    """One terminal; snr_db = snr_max - location - weather attenuation."""

    id: int
    snr_db: float
    location_attenuation_db: float
    weather_attenuation_db: float


def sample_receivers(n: int, snr_max_db: float, antenna: AntennaModel,
                     weather: WeatherCdf,
                     rng: np.random.Generator) -> list[Receiver]:
    """Draw a receiver population inside the beam.

    Positions are uniform by area over the disk bounded by the beam edge
    (radius proportional to sqrt(u)); location attenuation comes from the
    antenna pattern at the position's off-axis angle, weather attenuation
    from the empirical CDF.  Draw order (positions first, then weather) is
    fixed so a seeded rng reproduces the population.
    """
    if n < 1:
        raise ValueError("need at least one receiver")
    theta_edge = edge_angle(antenna)
    radius = theta_edge * np.sqrt(rng.random(n))
    u = np.sin(np.radians(radius)) * antenna.aperture_factor
    loc = _pattern_db_from_u(u)
    wea = weather.sample(rng, n)
    return [
        Receiver(i, snr_max_db - loc[i] - wea[i], float(loc[i]), float(wea[i]))
        for i in range(n)
    ]
