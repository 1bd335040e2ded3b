"""Independent reference implementations the tests check against.

Everything here is deliberately brute force: exhaustive enumeration,
quadratic filters, fine grids and high-precision series, kept free of the
code paths they validate.
"""

import itertools

import mpmath as mp
import numpy as np

from hmshare.ratevectors import RateVector, make_vector


def j1_series(x: float, terms: int = 200) -> float:
    """200-term power series for J1 in 50-digit arithmetic."""
    with mp.workdps(50):
        xm = mp.mpf(x)
        z = -(xm / 2) ** 2
        term = mp.mpf(1)
        acc = mp.mpf(1)
        for k in range(1, terms):
            term = term * z / (k * (k + 1))
            acc += term
        return float(xm / 2 * acc)


def vertex_enumeration_optimum(a, b, c) -> float | None:
    """Best objective over all feasible basic solutions of max c'x, ax = b."""
    m, n = a.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        basis = a[:, cols]
        if abs(np.linalg.det(basis)) < 1e-12:
            continue
        x = np.linalg.solve(basis, b)
        if (x >= -1e-9).all():
            obj = float(c[list(cols)] @ x)
            if best is None or obj > best:
                best = obj
    return best


def quadratic_pareto_filter(vectors: list[RateVector]) -> set:
    """O(n^2) dominance filter with duplicate collapse, as entry tuples."""
    unique = {}
    for v in vectors:
        cur = unique.get(v.entries)
        if cur is None or v.provenance > cur.provenance:
            unique[v.entries] = v
    vecs = list(unique.values())

    def dominated(v):
        vr = [r for _, r in v.entries]
        for u in vecs:
            ur = [r for _, r in u.entries]
            if ur != vr and all(a >= b for a, b in zip(ur, vr)):
                return True
        return False

    return {v.entries for v in vecs if not dominated(v)}


def exhaustive_pair_vectors(rx_i, rx_j, table) -> set:
    """Full stream-rate cross product then quadratic pruning (entry tuples).

    Mirrors the contract: stream 1 to the weaker receiver, both thresholds
    inclusive, both orientations on an SNR tie.
    """
    if rx_i.snr_db == rx_j.snr_db:
        orientations = [(rx_i, rx_j), (rx_j, rx_i)]
    else:
        orientations = [sorted((rx_i, rx_j), key=lambda r: r.snr_db)]
    const_ids = sorted({mc.constellation_id for mc in table
                        if mc.stream is not None})
    cands = []
    for weak, strong in orientations:
        for cid in const_ids:
            s1 = [mc for mc in table if mc.constellation_id == cid
                  and mc.stream == 1 and weak.snr_db >= mc.threshold_db]
            s2 = [mc for mc in table if mc.constellation_id == cid
                  and mc.stream == 2 and strong.snr_db >= mc.threshold_db]
            for mc1 in s1:
                for mc2 in s2:
                    cands.append(make_vector(
                        {weak.id: mc1.spectral_efficiency,
                         strong.id: mc2.spectral_efficiency},
                        [(weak.id, mc1.key), (strong.id, mc2.key)]))
    return quadratic_pareto_filter(cands)


def exhaustive_single(rx, table):
    """Best whole-symbol spectral efficiency decodable at the receiver SNR."""
    usable = [mc.spectral_efficiency for mc in table
              if mc.stream is None and rx.snr_db >= mc.threshold_db]
    return max(usable) if usable else None


def grid_best_two_receiver_rate(points, step: float = 1e-4) -> float:
    """Best guaranteed common rate for two receivers by grid scanning.

    points are the (rate_a, rate_b) vectors available to the pair (singles
    have a zero coordinate).  With both single rates present, the optimum is
    a mix of at most two vectors; scan every pair of vectors over a fine
    time-share grid and take the best worst-coordinate value.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    ts = np.arange(0.0, 1.0 + step, step)[:, None]
    best = 0.0
    for u in pts:
        for v in pts:
            mix = ts * u + (1.0 - ts) * v
            best = max(best, float(mix.min(axis=1).max()))
    return best


def exhaustive_partitions(ids):
    """Every partition of ids into pairs and singletons."""
    ids = tuple(ids)
    if not ids:
        yield ()
        return
    first, rest = ids[0], ids[1:]
    for sub in exhaustive_partitions(rest):
        yield ((first,),) + sub
    for k, partner in enumerate(rest):
        for sub in exhaustive_partitions(rest[:k] + rest[k + 1:]):
            yield ((first, partner),) + sub
