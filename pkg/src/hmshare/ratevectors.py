"""Enumeration of achievable per-receiver rate vectors.

A plain modcod decodable by one receiver yields a vector with a single
non-zero rate; a hierarchical constellation serves a receiver pair, the
protected stream going to the lower-SNR receiver.  Pareto pruning keeps only
undominated vectors per pair so the downstream linear program stays small.
"""

import itertools
from bisect import bisect_right
from dataclasses import dataclass

from .capacity import ModCod
from .channel import Receiver


@dataclass(frozen=True)
class RateVector:
    """Sparse achievable rate vector with its modcod provenance.

    entries maps receiver index -> rate (bits/symbol) as a sorted tuple of
    pairs; provenance records (receiver index, modcod key) the same way.
    """

    entries: tuple[tuple[int, float], ...]
    provenance: tuple[tuple[int, str], ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def min_rate(self) -> float:
        return min(r for _, r in self.entries)

    def rate_for(self, receiver: int) -> float:
        for i, r in self.entries:
            if i == receiver:
                return r
        return 0.0


def make_vector(rates: dict[int, float], provenance) -> RateVector:
    entries = tuple(sorted(rates.items()))
    if not entries or any(r <= 0 for _, r in entries):
        raise ValueError("rate vector needs positive rates")
    return RateVector(entries, tuple(sorted(provenance)))


@dataclass(frozen=True)
class EnumerationLimits:
    """Caps on the enumerated vector set."""

    pair_snr_window_db: float = 16.0
    max_vectors_per_pair: int = 8
    max_total_vectors: int = 1_000_000

    def __post_init__(self):
        if (self.pair_snr_window_db <= 0 or self.max_vectors_per_pair <= 0
                or self.max_total_vectors <= 0):
            raise ValueError("enumeration limits must be positive")


class ModcodIndex:
    """Threshold-sorted lookups over a modcod table.

    For each group (whole-symbol, or one stream of one hierarchical
    constellation) the modcods are sorted by threshold with a running best
    spectral efficiency, so the best decodable option at a given SNR is a
    single bisect.  Threshold comparisons are inclusive: SNR equal to the
    threshold decodes.
    """

    def __init__(self, table):
        self._whole = self._prefix_best(
            [mc for mc in table if mc.stream is None])
        hier_ids = sorted({mc.constellation_id for mc in table
                           if mc.stream is not None})
        self._streams = {}
        for cid in hier_ids:
            s1 = self._prefix_best(
                [mc for mc in table if mc.constellation_id == cid and mc.stream == 1])
            s2 = self._prefix_best(
                [mc for mc in table if mc.constellation_id == cid and mc.stream == 2])
            if s1[0] and s2[0]:  # both streams must be present to pair
                self._streams[cid] = (s1, s2)
        self.hierarchical_ids = tuple(sorted(self._streams))

    @staticmethod
    def _prefix_best(modcods):
        modcods = sorted(modcods, key=lambda mc: (mc.threshold_db, mc.key))
        thresholds = [mc.threshold_db for mc in modcods]
        best: list[ModCod] = []
        for mc in modcods:
            if best and best[-1].spectral_efficiency >= mc.spectral_efficiency:
                best.append(best[-1])
            else:
                best.append(mc)
        return thresholds, best

    @staticmethod
    def _lookup(prefix, snr_db: float) -> ModCod | None:
        thresholds, best = prefix
        k = bisect_right(thresholds, snr_db)
        return best[k - 1] if k else None

    def best_whole(self, snr_db: float) -> ModCod | None:
        return self._lookup(self._whole, snr_db)

    def best_stream(self, constellation_id: str, stream: int,
                    snr_db: float) -> ModCod | None:
        prefix = self._streams[constellation_id]
        return self._lookup(prefix[stream - 1], snr_db)


def best_single_rate(rx: Receiver, table, index: ModcodIndex | None = None
                     ) -> RateVector | None:
    """Highest-efficiency whole-symbol vector the receiver can decode, if any."""
    index = index if index is not None else ModcodIndex(table)
    mc = index.best_whole(rx.snr_db)
    if mc is None:
        return None
    return make_vector({rx.id: mc.spectral_efficiency}, [(rx.id, mc.key)])


def pair_vectors(rx_i: Receiver, rx_j: Receiver, table,
                 index: ModcodIndex | None = None) -> list[RateVector]:
    """Undominated hierarchical rate vectors serving the receiver pair.

    For each hierarchical constellation, stream 1 goes to the lower-SNR
    receiver; every stream-rate combination both receivers can decode is a
    candidate, and dominated candidates are pruned.  (Within one
    constellation the best decodable rate per stream dominates the rest, so
    only that combination survives.)  Equal SNRs admit both orientations.
    """
    if rx_i.id == rx_j.id:
        raise ValueError("pair needs two distinct receivers")
    index = index if index is not None else ModcodIndex(table)
    if rx_i.snr_db == rx_j.snr_db:
        orientations = [(rx_i, rx_j), (rx_j, rx_i)]
    elif rx_i.snr_db < rx_j.snr_db:
        orientations = [(rx_i, rx_j)]
    else:
        orientations = [(rx_j, rx_i)]
    candidates = []
    for weak, strong in orientations:
        for cid in index.hierarchical_ids:
            mc1 = index.best_stream(cid, 1, weak.snr_db)
            mc2 = index.best_stream(cid, 2, strong.snr_db)
            if mc1 is None or mc2 is None:
                continue
            candidates.append(make_vector(
                {weak.id: mc1.spectral_efficiency,
                 strong.id: mc2.spectral_efficiency},
                [(weak.id, mc1.key), (strong.id, mc2.key)]))
    return pareto_prune(candidates) if candidates else []


def capped_pair_vectors(rx_a: Receiver, rx_b: Receiver, table,
                        index: ModcodIndex | None = None,
                        limits: EnumerationLimits | None = None
                        ) -> list[RateVector]:
    """pair_vectors filtered by the enumeration window and per-pair cap.

    Every consumer of pair vectors under limits (the big program and the
    pairing baseline) must select the same subset, or their feasible sets
    diverge; this is the single selection rule.  Vectors come back ordered
    by descending min-rate.
    """
    if limits is not None and \
            abs(rx_a.snr_db - rx_b.snr_db) > limits.pair_snr_window_db:
        return []
    pv = pair_vectors(rx_a, rx_b, table, index)
    pv.sort(key=lambda v: (-v.min_rate, v.entries))
    if limits is not None:
        pv = pv[:limits.max_vectors_per_pair]
    return pv


def pareto_prune(vectors: list[RateVector]) -> list[RateVector]:
    """Drop vectors dominated component-wise on their shared support.

    All inputs must share one support.  Exact duplicates collapse to the one
    with the lexicographically largest provenance.  Output is sorted by
    entries for determinism.
    """
    if not vectors:
        return []
    support = vectors[0].support
    if any(v.support != support for v in vectors):
        raise ValueError("pareto_prune requires vectors on one support")

    # duplicate rates: keep the largest provenance
    unique: dict[tuple, RateVector] = {}
    for v in vectors:
        cur = unique.get(v.entries)
        if cur is None or v.provenance > cur.provenance:
            unique[v.entries] = v
    vecs = list(unique.values())

    if len(support) == 1:
        best = max(vecs, key=lambda v: v.entries[0][1])
        return [best]
    if len(support) == 2:
        vecs.sort(key=lambda v: (-v.entries[0][1], -v.entries[1][1]))
        kept = []
        best_second = -1.0
        for v in vecs:
            if v.entries[1][1] > best_second:
                kept.append(v)
                best_second = v.entries[1][1]
    else:
        kept = [v for v in vecs if not any(_dominates(u, v) for u in vecs)]
    kept.sort(key=lambda v: v.entries)
    return kept


def _dominates(u: RateVector, v: RateVector) -> bool:
    ur = [r for _, r in u.entries]
    vr = [r for _, r in v.entries]
    return all(a >= b for a, b in zip(ur, vr)) and ur != vr


def enumerate_all(receivers, table, limits: EnumerationLimits | None = None
                  ) -> list[RateVector]:
    """All usable rate vectors: singles plus capped pair vectors.

    Receivers that cannot decode any whole-symbol modcod are excluded and
    appear in no vector.  Pairs are considered when the SNR difference is
    within the window; per-pair and global caps keep the highest min-rate
    vectors (singles are always kept).  Output ordering is deterministic:
    singles by receiver index, then pair vectors by pair index.
    """
    limits = limits if limits is not None else EnumerationLimits()
    index = ModcodIndex(table)
    ordered = sorted(receivers, key=lambda rx: rx.id)
    singles = []
    coverable = []
    for rx in ordered:
        v = best_single_rate(rx, table, index)
        if v is not None:
            singles.append(v)
            coverable.append(rx)
    if not coverable:
        raise ValueError("empty beam: no receiver decodes any modcod")

    pair_lists = []
    for rx_a, rx_b in itertools.combinations(coverable, 2):
        pv = capped_pair_vectors(rx_a, rx_b, table, index, limits)
        if pv:
            pair_lists.append(pv)

    budget = limits.max_total_vectors - len(singles)
    flat = [v for pv in pair_lists for v in pv]
    if budget <= 0:
        flat = []
    elif len(flat) > budget:
        ranked = sorted(flat, key=lambda v: (-v.min_rate, v.entries))
        selected = set(ranked[:budget])
        flat = [v for v in flat if v in selected]
    return singles + flat
