"""Per-stream AWGN mutual information and SNR decoding thresholds.

The channel is y = x + n with complex Gaussian noise and SNR = Es/N0 on a
per-symbol basis.  Stream 1 information is I(B1; Y) with the stream-2 bits
marginalised; stream 2 assumes successive decoding, I(B2; Y | B1); the whole
symbol gives I(X; Y).  Decoding thresholds are the smallest SNR at which the
stream information supports the code rate, plus a margin calibrated once so
the plain QPSK rate-1/4 threshold lands on the DVB-S2 value.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .constellation import Constellation, ConstellationParams, UNIFORM_PARAMS, \
    get_constellation

LN2 = math.log(2.0)

DEFAULT_QUAD_ORDER = 24

# DVB-S2 QPSK rate-1/4 decoding threshold (dB); anchors the margin calibration.
QPSK_QUARTER_THRESHOLD_DB = -2.35


@dataclass(frozen=True)
class MiEstimate:
    """Mutual information in bits/symbol; std_error is 0 for quadrature."""

    value: float
    std_error: float = 0.0


@lru_cache(maxsize=None)
def _gh_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = hermgauss(order)
    return t, w


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    amax = a.max(axis=axis, keepdims=True)
    out = np.log(np.sum(np.exp(a - amax), axis=axis))
    return out + np.squeeze(amax, axis=axis)


def _check_stream(stream: int | None) -> None:
    if stream not in (None, 1, 2):
        raise ValueError(f"unknown stream {stream!r}")


def _log_kernels(const: Constellation, stream: int | None,
                 noise: np.ndarray, n0: float) -> np.ndarray:
    """Per-(tx symbol, noise sample) log2 integrand of the MI estimator.

    Returns f of shape (M, K) with MI = bits - mean_i mean_noise f[i, k].
    """
    syms = const.symbols
    m_sym = len(syms)
    # real arithmetic: complex abs costs a hypot per entry
    sr, si = syms.real, syms.imag
    yr = sr[:, None] + noise.real[None, :]                  # (M, K)
    yi = si[:, None] + noise.imag[None, :]
    a = -((yr[:, :, None] - sr[None, None, :]) ** 2
          + (yi[:, :, None] - si[None, None, :]) ** 2) / n0  # (M, K, M)
    if stream is None:
        a_self = a[np.arange(m_sym), :, np.arange(m_sym)]
        f = _logsumexp(a, axis=2) - a_self
    else:
        codes = const.stream_codes(1)
        grp = np.empty(a.shape[:2])
        for g in np.unique(codes):
            idx = np.nonzero(codes == g)[0]
            grp[idx] = _logsumexp(a[idx][:, :, idx], axis=2)
        if stream == 1:
            f = _logsumexp(a, axis=2) - grp
        else:
            a_self = a[np.arange(m_sym), :, np.arange(m_sym)]
            f = grp - a_self
    return f / LN2


def stream_mutual_information(const: Constellation, stream: int | None,
                              snr_db: float, method: str = "quadrature", *,
                              quad_order: int = DEFAULT_QUAD_ORDER,
                              samples: int = 200_000,
                              rng: np.random.Generator | None = None) -> MiEstimate:
    """Mutual information of one stream (or the whole symbol) in bits/symbol.

    Args:
        const: the constellation.
        stream: 1, 2 or None for the whole symbol.
        snr_db: Es/N0 in dB; must be finite.
        method: "quadrature" (Gauss-Hermite, deterministic) or "monte_carlo".
        quad_order: nodes per noise axis for the quadrature method.
        samples: sample count for the Monte Carlo method.
        rng: seeded generator, required for Monte Carlo.
    """
    _check_stream(stream)
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db!r}")
    bits = const.stream_bit_count(stream)
    n0 = 10.0 ** (-snr_db / 10.0)

    if method == "quadrature":
        t, w = _gh_nodes(quad_order)
        noise = math.sqrt(n0) * (t[:, None] + 1j * t[None, :]).ravel()
        weight = (w[:, None] * w[None, :]).ravel() / math.pi
        f = _log_kernels(const, stream, noise, n0)
        value = bits - float(np.mean(f @ weight))
        return MiEstimate(min(max(value, 0.0), float(bits)), 0.0)

    if method == "monte_carlo":
        if rng is None:
            raise ValueError("monte_carlo requires an explicit seeded rng")
        syms = const.symbols
        m_sym = len(syms)
        codes1 = const.stream_codes(1)
        total, total_sq, n_done = 0.0, 0.0, 0
        chunk = 65536
        while n_done < samples:
            b = min(chunk, samples - n_done)
            idx = rng.integers(m_sym, size=b)
            noise = math.sqrt(n0 / 2.0) * (rng.standard_normal(b)
                                           + 1j * rng.standard_normal(b))
            y = syms[idx] + noise
            a = -(np.abs(y[:, None] - syms[None, :]) ** 2) / n0     # (b, M)
            if stream is None:
                f = _logsumexp(a, axis=1) - a[np.arange(b), idx]
            else:
                member = codes1[None, :] == codes1[idx][:, None]
                grp = _logsumexp(np.where(member, a, -np.inf), axis=1)
                if stream == 1:
                    f = _logsumexp(a, axis=1) - grp
                else:
                    f = grp - a[np.arange(b), idx]
            f = f / LN2
            total += float(f.sum())
            total_sq += float((f ** 2).sum())
            n_done += b
        mean = total / n_done
        var = max(total_sq / n_done - mean ** 2, 0.0)
        value = bits - mean
        std_error = math.sqrt(var / n_done)
        return MiEstimate(min(max(value, 0.0), float(bits)), std_error)

    raise ValueError(f"unknown method {method!r}")


def decoding_threshold(const: Constellation, stream: int | None,
                       code_rate: Fraction | float, margin_db: float, *,
                       method: str = "quadrature",
                       quad_order: int = DEFAULT_QUAD_ORDER,
                       tol_db: float = 0.01) -> float:
    """Smallest SNR (dB) whose stream MI supports the code rate, plus margin.

    Bisection to tol_db on the monotone MI curve.  Raises ValueError when the
    target information rate is not below the stream's bit count.
    """
    _check_stream(stream)
    rate = float(code_rate)
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"code_rate must lie in (0, 1], got {code_rate!r}")
    bits = const.stream_bit_count(stream)
    target = rate * bits
    if target >= bits:
        raise ValueError(
            f"target rate {target} bits unreachable for a {bits}-bit stream")

    def mi(snr: float) -> float:
        return stream_mutual_information(
            const, stream, snr, method, quad_order=quad_order).value

    lo = -40.0
    while mi(lo) >= target and lo > -120.0:
        lo -= 20.0
    hi = 0.0
    while mi(hi) < target:
        hi += 10.0
        if hi > 80.0:
            raise ValueError("target rate unreachable at any modelled SNR")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if mi(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi + margin_db


@lru_cache(maxsize=None)
def calibrated_margin(method: str = "quadrature",
                      quad_order: int = DEFAULT_QUAD_ORDER) -> float:
    """Margin (dB) pinning the plain QPSK rate-1/4 threshold to its DVB-S2 value.

    Applied uniformly to every derived threshold; stands in for the gap
    between constrained capacity and the near-capacity DVB-S2 codes.
    """
    qpsk = get_constellation("qpsk", UNIFORM_PARAMS["qpsk"])
    raw = decoding_threshold(qpsk, None, Fraction(1, 4), 0.0,
                             method=method, quad_order=quad_order)
    return QPSK_QUARTER_THRESHOLD_DB - raw


@dataclass(frozen=True)
class ModCod:
    """A decodable transmission option: constellation, stream, code rate."""

    constellation_id: str
    stream: int | None          # 1, 2, or None for the whole symbol
    code_rate: Fraction
    spectral_efficiency: float  # bits/symbol = stream bits x code rate
    threshold_db: float

    @property
    def is_hierarchical(self) -> bool:
        return self.stream is not None

    @property
    def key(self) -> str:
        s = "w" if self.stream is None else f"s{self.stream}"
        return f"{self.constellation_id}/{s}/{self.code_rate}"


@dataclass(frozen=True)
class ModcodSpec:
    """One modcod table row; threshold_db None means derive it."""

    family: str
    params: ConstellationParams
    stream: int | None
    code_rate: Fraction
    threshold_db: float | None = None


_DERIVED: dict[tuple, float] = {}


def _derive_threshold(const: Constellation, stream: int | None,
                      code_rate: Fraction, margin_db: float,
                      method: str, quad_order: int) -> float:
    key = (const.id, stream, str(code_rate), round(margin_db, 9), method, quad_order)
    if key not in _DERIVED:
        _DERIVED[key] = decoding_threshold(
            const, stream, code_rate, margin_db,
            method=method, quad_order=quad_order)
    return _DERIVED[key]


def load_modcod_table(specs, *, margin_db: float | None = None,
                      method: str = "quadrature",
                      quad_order: int = DEFAULT_QUAD_ORDER) -> list[ModCod]:
    """Build the modcod table from row specs, deriving missing thresholds.

    margin_db None selects the calibrated margin.  Raises ValueError on an
    empty spec list, a malformed row or a duplicate
    (constellation, stream, code_rate) key.  The result is sorted by
    threshold.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("modcod table is empty")
    margin = calibrated_margin(method, quad_order) if margin_db is None else margin_db
    out: list[ModCod] = []
    seen: set[tuple] = set()
    for spec in specs:
        const = get_constellation(spec.family, spec.params)
        _check_stream(spec.stream)
        rate = Fraction(spec.code_rate)
        if not 0 < rate <= 1:
            raise ValueError(f"code_rate must lie in (0, 1], got {rate}")
        dup_key = (const.id, spec.stream, rate)
        if dup_key in seen:
            raise ValueError(f"duplicate modcod entry {dup_key}")
        seen.add(dup_key)
        bits = const.stream_bit_count(spec.stream)
        if spec.threshold_db is None:
            threshold = _derive_threshold(const, spec.stream, rate, margin,
                                          method, quad_order)
        else:
            threshold = float(spec.threshold_db)
            if not math.isfinite(threshold):
                raise ValueError(f"threshold must be finite, got {threshold!r}")
        out.append(ModCod(const.id, spec.stream, rate,
                          bits * float(rate), threshold))
    out.sort(key=lambda mc: (mc.threshold_db, mc.key))
    return out
