"""Independent reference implementations used to cross-check the engine.

Everything here works on plain frozensets of proposition labels with naive
enumeration, deliberately sharing no code or representation with the
package internals.
"""

from __future__ import annotations

from collections import deque
from itertools import chain, combinations, product
from math import fsum, log2


def powerset(universe):
    items = sorted(universe)
    return map(
        frozenset,
        chain.from_iterable(combinations(items, r) for r in range(len(items) + 1)),
    )


def naive_bel(masses, a):
    return fsum(v for s, v in masses.items() if s and s <= a)


def naive_pl(masses, a):
    return fsum(v for s, v in masses.items() if s & a)


def naive_q(masses, a):
    return fsum(v for s, v in masses.items() if a <= s)


def naive_info(masses, universe):
    total = 0.0
    for a in powerset(universe):
        q = naive_q(masses, a)
        if q > 0.0:
            total -= log2(q)
    return total + 0.0


def naive_combine(mass_maps, normalize):
    """All-pairs conjunctive combination by explicit tuple enumeration.

    Returns (masses, conflict) where conflict is the product mass that fell
    on the empty set; normalized masses drop the empty set.
    """
    out: dict[frozenset, float] = {}
    item_lists = [sorted(m.items(), key=lambda kv: sorted(kv[0])) for m in mass_maps]
    for combo in product(*item_lists):
        inter = frozenset.intersection(*[s for s, _ in combo])
        weight = 1.0
        for _, v in combo:
            weight *= v
        out[inter] = out.get(inter, 0.0) + weight
    conflict = out.get(frozenset(), 0.0)
    if not normalize:
        return {s: v for s, v in out.items() if v > 0.0}, conflict
    survived = fsum(v for s, v in out.items() if s)
    if survived <= 0.0:
        raise ZeroDivisionError("total conflict")
    return {s: v / survived for s, v in out.items() if s and v > 0.0}, conflict


def naive_average(mass_maps):
    keys = set()
    for m in mass_maps:
        keys.update(m)
    n = len(mass_maps)
    return {k: fsum(m.get(k, 0.0) for m in mass_maps) / n for k in keys}


def naive_discount(masses, universe, rate):
    universe = frozenset(universe)
    out = {}
    for s, v in masses.items():
        if s != universe:
            out[s] = (1.0 - rate) * v
    out[universe] = (1.0 - rate) * masses.get(universe, 0.0) + rate
    return {s: v for s, v in out.items() if v > 0.0}


def mass_from_bel(bel_values, universe):
    """Recover masses from belief values by Moebius inversion over the full
    lattice (bel_values must cover every subset of the universe)."""
    out = {}
    for a in powerset(universe):
        total = 0.0
        for b in powerset(a):
            sign = -1.0 if (len(a) - len(b)) % 2 else 1.0
            total += sign * bel_values[b]
        if abs(total) > 1e-12:
            out[a] = total
    return out


def bfs_distance(adjacency, start, goal):
    """Edge-count distance in an undirected graph given as id -> set of ids;
    None when unreachable."""
    if start == goal:
        return 0
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        cur, d = queue.popleft()
        for nb in adjacency.get(cur, ()):
            if nb == goal:
                return d + 1
            if nb not in seen:
                seen.add(nb)
                queue.append((nb, d + 1))
    return None
