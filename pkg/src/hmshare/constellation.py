"""Plain and hierarchical DVB-S2 constellation geometry.

Supports QPSK, 8-PSK, 16-APSK and 32-APSK, each with a non-uniform variant
controlled by a quadrant angle theta and, for the APSK families, ring-radius
ratios.  Every symbol carries two bit streams: stream 1 rides on the coarse
structure (sign / quadrant bits), stream 2 on the fine structure within a
quadrant.  All constellations are normalised to unit average symbol energy.
"""

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("qpsk", "8psk", "16apsk", "32apsk")

_BITS = {"qpsk": 2, "8psk": 3, "16apsk": 4, "32apsk": 5}

# number of leading label bits assigned to stream 1 (the protected layer)
_STREAM1_BITS = {"qpsk": 1, "8psk": 2, "16apsk": 2, "32apsk": 2}

# Gray code of the four quadrants, counter-clockwise from (+I, +Q)
_QUADRANT_GRAY = (0b00, 0b01, 0b11, 0b10)


@dataclass(frozen=True)
class ConstellationParams:
    """Geometry parameters: theta in degrees, ring ratios dimensionless."""

    theta_deg: float
    gamma: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None


def validate_params(family: str, params: ConstellationParams) -> str | None:
    """Check params against the family, returning an error string or None."""
    if family not in FAMILIES:
        return f"unknown constellation family {family!r}"
    t = params.theta_deg
    if not math.isfinite(t) or not 0.0 < t < 90.0:
        return f"theta must lie in (0, 90) degrees, got {t!r}"
    if family in ("qpsk", "8psk"):
        for name in ("gamma", "gamma1", "gamma2"):
            if getattr(params, name) is not None:
                return f"{name} not applicable to {family}"
    elif family == "16apsk":
        if params.gamma is None:
            return "16apsk requires gamma"
        if not math.isfinite(params.gamma) or params.gamma <= 1.0:
            return f"gamma must exceed 1, got {params.gamma!r}"
        for name in ("gamma1", "gamma2"):
            if getattr(params, name) is not None:
                return f"{name} not applicable to 16apsk"
    else:  # 32apsk
        if params.gamma is not None:
            return "gamma not applicable to 32apsk"
        g1, g2 = params.gamma1, params.gamma2
        if g1 is None or g2 is None:
            return "32apsk requires gamma1 and gamma2"
        if not math.isfinite(g1) or g1 <= 1.0:
            return f"gamma1 must exceed 1, got {g1!r}"
        if not math.isfinite(g2) or g2 <= g1:
            return f"gamma2 must exceed gamma1, got {g2!r}"
    return None


def stream_bits(family: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """1-based label bit positions carried by stream 1 and stream 2."""
    if family not in FAMILIES:
        raise ValueError(f"unknown constellation family {family!r}")
    m, m1 = _BITS[family], _STREAM1_BITS[family]
    return tuple(range(1, m1 + 1)), tuple(range(m1 + 1, m + 1))


def _fmt(x: float) -> str:
    return f"{x:g}"


def preset_id(family: str, params: ConstellationParams) -> str:
    """Canonical name for a (family, params) geometry, e.g. '16apsk-31.5-2.8'."""
    parts = [family, _fmt(params.theta_deg)]
    if family == "16apsk":
        parts.append(_fmt(params.gamma))
    elif family == "32apsk":
        parts += [_fmt(params.gamma1), _fmt(params.gamma2)]
    return "-".join(parts)


class Constellation:
    """An energy-normalised symbol set with per-symbol bit labels.

    Attributes:
        family: one of FAMILIES.
        params: the geometry parameters used to build it.
        symbols: complex ndarray of shape (M,), unit average energy.
        labels: int ndarray of shape (M,); labels[i] is the m-bit word mapped
            to symbols[i], first bit most significant.
        bits: m, bits per symbol.
        stream_split: 1-based bit positions of stream 1 and stream 2.
    """

    def __init__(self, family: str, params: ConstellationParams,
                 symbols: np.ndarray, labels: np.ndarray):
        self.family = family
        self.params = params
        self.symbols = np.asarray(symbols, dtype=complex)
        self.labels = np.asarray(labels, dtype=int)
        self.bits = _BITS[family]
        self.stream_split = stream_bits(family)
        self.id = preset_id(family, params)
        self.symbols.setflags(write=False)
        self.labels.setflags(write=False)
        self._check()

    def _check(self) -> None:
        m, n = self.bits, len(self.symbols)
        if n != 2 ** m or len(self.labels) != n:
            raise ValueError("symbol/label count does not match family size")
        if sorted(self.labels) != list(range(n)):
            raise ValueError("labels are not a bijection onto the m-bit words")
        energy = float(np.mean(np.abs(self.symbols) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"constellation not energy-normalised: {energy!r}")
        d = np.abs(self.symbols[:, None] - self.symbols[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() < 1e-9:
            raise ValueError("degenerate geometry: coincident symbols")

    @property
    def stream1_bits(self) -> int:
        return _STREAM1_BITS[self.family]

    @property
    def stream2_bits(self) -> int:
        return self.bits - _STREAM1_BITS[self.family]

    def stream_bit_count(self, stream: int | None) -> int:
        """Bits per symbol carried by a stream (None = whole symbol)."""
        if stream is None:
            return self.bits
        if stream == 1:
            return self.stream1_bits
        if stream == 2:
            return self.stream2_bits
        raise ValueError(f"unknown stream {stream!r}")

    def stream_codes(self, stream: int) -> np.ndarray:
        """Per-symbol value of the stream's label bits."""
        m2 = self.stream2_bits
        if stream == 1:
            return self.labels >> m2
        if stream == 2:
            return self.labels & ((1 << m2) - 1)
        raise ValueError(f"unknown stream {stream!r}")

    def __repr__(self) -> str:
        return f"Constellation({self.id})"


def _polar(radius: float, angle_deg: float) -> complex:
    a = math.radians(angle_deg)
    return complex(radius * math.cos(a), radius * math.sin(a))


def _qpsk_layout(theta: float) -> list[tuple[complex, int]]:
    # b1 selects the I sign, b2 the Q sign; 0 means positive.
    c, s = math.cos(math.radians(theta)), math.sin(math.radians(theta))
    out = []
    for b1 in (0, 1):
        for b2 in (0, 1):
            re = c if b1 == 0 else -c
            im = s if b2 == 0 else -s
            out.append((complex(re, im), (b1 << 1) | b2))
    return out


def _8psk_layout(theta: float) -> list[tuple[complex, int]]:
    # two unit-circle symbols per quadrant, at theta and 90-theta
    out = []
    for q, gray in enumerate(_QUADRANT_GRAY):
        for b3, rel in ((0, theta), (1, 90.0 - theta)):
            out.append((_polar(1.0, 90.0 * q + rel), (gray << 1) | b3))
    return out


def _16apsk_layout(theta: float, gamma: float) -> list[tuple[complex, int]]:
    # per quadrant: one diagonal inner-ring symbol, three outer at 45, 45±theta
    r1, r2 = 1.0, gamma
    cell = (
        (0b00, r1, 45.0),
        (0b01, r2, 45.0 - theta),
        (0b11, r2, 45.0),
        (0b10, r2, 45.0 + theta),
    )
    out = []
    for q, gray in enumerate(_QUADRANT_GRAY):
        for code, r, rel in cell:
            out.append((_polar(r, 90.0 * q + rel), (gray << 2) | code))
    return out


def _32apsk_layout(theta: float, gamma1: float, gamma2: float) -> list[tuple[complex, int]]:
    # per quadrant: diagonal inner symbol, middle ring at 45±30,
    # outer ring at 45±theta/3 and 45±theta
    r1, r2, r3 = 1.0, gamma1, gamma2
    cell = (
        (0b000, r1, 45.0),
        (0b001, r2, 15.0),
        (0b011, r2, 45.0),
        (0b010, r2, 75.0),
        (0b110, r3, 45.0 - theta),
        (0b111, r3, 45.0 - theta / 3.0),
        (0b101, r3, 45.0 + theta / 3.0),
        (0b100, r3, 45.0 + theta),
    )
    out = []
    for q, gray in enumerate(_QUADRANT_GRAY):
        for code, r, rel in cell:
            out.append((_polar(r, 90.0 * q + rel), (gray << 3) | code))
    return out


def build_constellation(family: str, params: ConstellationParams) -> Constellation:
    """Build the energy-normalised constellation for a family and parameters.

    Raises ValueError on parameters invalid for the family or on geometry
    that collapses symbols onto each other.
    """
    err = validate_params(family, params)
    if err is not None:
        raise ValueError(err)
    t = params.theta_deg
    if family == "qpsk":
        layout = _qpsk_layout(t)
    elif family == "8psk":
        layout = _8psk_layout(t)
    elif family == "16apsk":
        layout = _16apsk_layout(t, params.gamma)
    else:
        layout = _32apsk_layout(t, params.gamma1, params.gamma2)
    symbols = np.array([p for p, _ in layout], dtype=complex)
    labels = np.array([l for _, l in layout], dtype=int)
    symbols = symbols / math.sqrt(float(np.mean(np.abs(symbols) ** 2)))
    return Constellation(family, params, symbols, labels)


# Plain (non-hierarchical) geometries used for whole-symbol transmission.
# QPSK and 8-PSK recover the uniform layouts exactly; the APSK ring ratios
# are nominal DVB-S2 values.
UNIFORM_PARAMS = {
    "qpsk": ConstellationParams(45.0),
    "8psk": ConstellationParams(22.5),
    "16apsk": ConstellationParams(30.0, gamma=2.7),
    "32apsk": ConstellationParams(33.75, gamma1=2.64, gamma2=4.64),
}

# Built-in non-uniform parameter sets for the hierarchical variants.
HIERARCHICAL_PARAMS = {
    "qpsk": tuple(ConstellationParams(t)
                  for t in (45.0, 42.0, 39.0, 36.0, 33.0, 30.0, 27.0, 24.0, 18.0)),
    "8psk": tuple(ConstellationParams(t) for t in (30.0, 27.0, 24.0, 18.0)),
    "16apsk": (
        ConstellationParams(31.5, gamma=2.8),
        ConstellationParams(28.4, gamma=2.3),
        ConstellationParams(25.1, gamma=1.9),
        ConstellationParams(20.9, gamma=1.6),
    ),
    "32apsk": (
        ConstellationParams(32.3, gamma1=2.4, gamma2=5.0),
        ConstellationParams(30.2, gamma1=1.8, gamma2=3.4),
        ConstellationParams(28.4, gamma1=1.6, gamma2=2.6),
        ConstellationParams(25.6, gamma1=1.6, gamma2=2.2),
        ConstellationParams(17.4, gamma1=1.8, gamma2=2.4),
    ),
}


def params_from_token(family: str, token: str) -> ConstellationParams:
    """Parse a config parameter token: 'uniform', '30', '31.5,2.8', '32.3,2.4,5'."""
    if token == "uniform":
        return UNIFORM_PARAMS[family]
    try:
        values = [float(v) for v in token.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse constellation parameters {token!r}") from None
    expected = {"qpsk": 1, "8psk": 1, "16apsk": 2, "32apsk": 3}.get(family)
    if expected is None:
        raise ValueError(f"unknown constellation family {family!r}")
    if len(values) != expected:
        raise ValueError(
            f"{family} takes {expected} parameter(s), got {len(values)} in {token!r}")
    if family in ("qpsk", "8psk"):
        return ConstellationParams(values[0])
    if family == "16apsk":
        return ConstellationParams(values[0], gamma=values[1])
    return ConstellationParams(values[0], gamma1=values[1], gamma2=values[2])


_CACHE: dict[str, Constellation] = {}


def get_constellation(family: str, params: ConstellationParams) -> Constellation:
    """Cached build_constellation; constellations are immutable."""
    key = preset_id(family, params)
    c = _CACHE.get(key)
    if c is None:
        c = build_constellation(family, params)
        _CACHE[key] = c
    return c
