"""Baseline schemes: plain VCM time sharing and pair-then-equalize.

The reference scheme serves each receiver its best plain modcod and
equalizes the time-averaged rates (harmonic mean).  The pairing scheme
partitions receivers into pairs or singletons, gives each group its best
two-receiver rate (hierarchical modulation allowed within a pair) and then
equalizes across groups.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .lp import assemble, solve
from .ratevectors import ModcodIndex, best_single_rate, capped_pair_vectors, \
    make_vector

_EXHAUSTIVE_MATCHING_LIMIT = 12


@dataclass(frozen=True)
class GroupSchedule:
    """Equalized schedule over a partition into singletons and pairs.

    groups holds receiver-id tuples; group g transmits at group_rates[g]
    during its share, so every member's time-averaged rate equals rate.
    """

    rate: float
    groups: tuple[tuple[int, ...], ...]
    group_rates: tuple[float, ...]
    shares: tuple[float, ...]

    @property
    def covered_ids(self) -> tuple[int, ...]:
        return tuple(sorted(i for g in self.groups for i in g))


def equalize(group_rates) -> tuple[float, tuple[float, ...]]:
    """Time shares giving every group the same time-averaged rate.

    R = (sum 1/rho_g)^-1 and share_g = R / rho_g, so share_g * rho_g = R and
    the shares sum to one.
    """
    rates = list(group_rates)
    if not rates:
        raise ValueError("cannot equalize zero groups")
    if any(r <= 0 for r in rates):
        raise ValueError("group rates must be positive")
    r = 1.0 / sum(1.0 / rho for rho in rates)
    return r, tuple(r / rho for rho in rates)


def best_pair_rate(rx_i, rx_j, table, index: ModcodIndex | None = None,
                   limits=None) -> float:
    """Best common rate for two receivers, hierarchical modulation allowed.

    Solves the two-receiver program over both singles plus the pair's
    hierarchical vectors; never below the harmonic equalization of the two
    best singles.  When limits are given, the pair vectors are the same
    windowed and capped subset the full program would enumerate.
    """
    index = index if index is not None else ModcodIndex(table)
    singles = {}
    for rx in (rx_i, rx_j):
        mc = index.best_whole(rx.snr_db)
        if mc is None:
            raise ValueError(f"receiver {rx.id} cannot decode any modcod")
        singles[rx.id] = mc
    pos = {rx_i.id: 0, rx_j.id: 1}
    vectors = [make_vector({pos[i]: mc.spectral_efficiency}, [(pos[i], mc.key)])
               for i, mc in singles.items()]
    for v in capped_pair_vectors(rx_i, rx_j, table, index, limits):
        vectors.append(make_vector(
            {pos[i]: r for i, r in v.entries},
            [(pos[i], key) for i, key in v.provenance]))
    solution = solve(assemble(vectors, 2))
    if solution.status != "optimal":
        raise RuntimeError(f"pair LP failed: {solution.status}")
    return solution.objective


def reference_vcm(receivers, table) -> GroupSchedule:
    """Plain VCM baseline: each receiver alone, equalized singles."""
    index = ModcodIndex(table)
    groups, rates = [], []
    for rx in sorted(receivers, key=lambda rx: rx.id):
        v = best_single_rate(rx, table, index)
        if v is not None:
            groups.append((rx.id,))
            rates.append(v.entries[0][1])
    if not groups:
        raise ValueError("empty beam: no receiver decodes any modcod")
    r, shares = equalize(rates)
    return GroupSchedule(r, tuple(groups), tuple(rates), shares)


def pair_scheme(receivers, table, strategy: str = "greedy",
                limits=None) -> GroupSchedule:
    """Partition into pairs/singletons, best rate per group, equalize.

    greedy sorts by SNR and pairs adjacent receivers (odd one out stays
    single).  optimal_matching maximises the total pairing gain: exact by
    exhaustive search up to 12 coverable receivers, greedy plus 2-swap local
    search beyond.  limits, when given, restrict each pair's vectors exactly
    as the full program's enumeration would.
    """
    if strategy not in ("greedy", "optimal_matching"):
        raise ValueError(f"unknown pairing strategy {strategy!r}")
    index = ModcodIndex(table)
    coverable = []
    for rx in sorted(receivers, key=lambda rx: rx.id):
        if index.best_whole(rx.snr_db) is not None:
            coverable.append(rx)
    if not coverable:
        raise ValueError("empty beam: no receiver decodes any modcod")
    by_id = {rx.id: rx for rx in coverable}

    def single_rate(i):
        return index.best_whole(by_id[i].snr_db).spectral_efficiency

    @lru_cache(maxsize=None)
    def pair_rate(i, j):
        return best_pair_rate(by_id[i], by_id[j], table, index, limits)

    if strategy == "greedy":
        order = sorted(coverable, key=lambda rx: (rx.snr_db, rx.id))
        groups = [(order[k].id, order[k + 1].id)
                  for k in range(0, len(order) - 1, 2)]
        if len(order) % 2:
            groups.append((order[-1].id,))
    else:
        groups = _best_partition([rx.id for rx in coverable],
                                 single_rate, pair_rate)

    groups = tuple(tuple(sorted(g)) for g in groups)
    rates = tuple(single_rate(g[0]) if len(g) == 1 else pair_rate(*g)
                  for g in groups)
    r, shares = equalize(rates)
    return GroupSchedule(r, groups, rates, shares)


def _best_partition(ids, single_rate, pair_rate):
    """Partition minimising total inverse rate (maximum equalized rate)."""
    ids = sorted(ids)
    if len(ids) <= _EXHAUSTIVE_MATCHING_LIMIT:
        return _exhaustive_partition(tuple(ids), single_rate, pair_rate)
    return _local_search_partition(ids, single_rate, pair_rate)


def _exhaustive_partition(ids, single_rate, pair_rate):
    @lru_cache(maxsize=None)
    def rec(remaining):
        if not remaining:
            return 0.0, ()
        first, rest = remaining[0], remaining[1:]
        best_cost, best_groups = rec(rest)
        best_cost += 1.0 / single_rate(first)
        best_groups = ((first,),) + best_groups
        for idx, partner in enumerate(rest):
            sub_cost, sub_groups = rec(rest[:idx] + rest[idx + 1:])
            cost = 1.0 / pair_rate(first, partner) + sub_cost
            if cost < best_cost - 1e-15:
                best_cost = cost
                best_groups = ((first, partner),) + sub_groups
        return best_cost, best_groups

    return list(rec(tuple(ids)))[1]


def _local_search_partition(ids, single_rate, pair_rate):
    def cost(group):
        return (1.0 / single_rate(group[0]) if len(group) == 1
                else 1.0 / pair_rate(*group))

    # greedy seed: largest pairing gains first
    gains = []
    for i, j in itertools.combinations(ids, 2):
        gain = 1.0 / single_rate(i) + 1.0 / single_rate(j) - 1.0 / pair_rate(i, j)
        gains.append((gain, i, j))
    gains.sort(key=lambda t: (-t[0], t[1], t[2]))
    used = set()
    groups = []
    for gain, i, j in gains:
        if gain <= 0:
            break
        if i in used or j in used:
            continue
        groups.append((i, j))
        used.update((i, j))
    groups.extend((i,) for i in ids if i not in used)

    # 2-swap: re-partition every two groups until no improvement
    improved = True
    while improved:
        improved = False
        for ga, gb in itertools.combinations(range(len(groups)), 2):
            members = tuple(sorted(groups[ga] + groups[gb]))
            current = cost(groups[ga]) + cost(groups[gb])
            best_split, best_cost = None, current
            for split in _splits(members):
                c = sum(cost(g) for g in split)
                if c < best_cost - 1e-15:
                    best_cost, best_split = c, split
            if best_split is not None:
                rest = [g for idx, g in enumerate(groups) if idx not in (ga, gb)]
                groups = rest + list(best_split)
                improved = True
                break
    return groups


def _splits(members):
    """All partitions of up to four receivers into pairs and singletons."""
    if not members:
        yield ()
        return
    first, rest = members[0], members[1:]
    for sub in _splits(rest):
        yield ((first,),) + sub
    for idx, partner in enumerate(rest):
        for sub in _splits(rest[:idx] + rest[idx + 1:]):
            yield ((first, partner),) + sub
