"""
Topology Census
Exhaustive and randomized generation of topologies on small carriers.

Two independent generators back every "for all topologies" check:
- brute:    every family of subsets is run through validate
- preorder: every transitive reflexive relation is mapped to its
            Alexandrov topology (opens = up-closed sets)
Neither is trusted alone; they must agree for n <= 4.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from topocheck.config import get_settings, log
from topocheck.errors import LimitExceededError, PreconditionError
from topocheck.setcore import Carrier, PointSet
from topocheck.topology import Topology, alexandrov_topology, generate_from_subbasis, validate_masks

Method = Literal["brute", "preorder"]

# Regression values frozen from the first oracle run (labeled topologies)
FROZEN_COUNTS: Dict[int, int] = {0: 1, 1: 1, 2: 4, 3: 29, 4: 355, 5: 6942}


class TopologyCensus:
    """Every labeled topology on n points, in canonical order."""

    def __init__(self, n: int, method: Method, topologies: Iterable[Topology]):
        self.n = n
        self.method = method
        self.topologies: Tuple[Topology, ...] = tuple(
            sorted(set(topologies), key=Topology.sort_key)
        )

    @property
    def count(self) -> int:
        return len(self.topologies)

    def __len__(self) -> int:
        return len(self.topologies)

    def __iter__(self) -> Iterator[Topology]:
        return iter(self.topologies)

    def __getitem__(self, index: int) -> Topology:
        return self.topologies[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, TopologyCensus) and other.n == self.n and other.topologies == self.topologies

    def __repr__(self) -> str:
        return f"TopologyCensus(n={self.n}, method={self.method}, count={self.count})"


# ============ BRUTE FORCE ============

def _brute_range(n: int, start: int, stop: int) -> List[Tuple[int, ...]]:
    """Opens of every valid family with index in [start, stop)."""
    size = 1 << n
    found = []
    for family in range(start, stop):
        masks = [m for m in range(size) if (family >> m) & 1]
        t, _ = validate_masks(n, masks)
        if t is not None:
            found.append(t.opens)
    return found


def enumerate_brute(n: int, workers: Optional[int] = None) -> TopologyCensus:
    """
    Test every subset-family of the powerset with validate.
    Family indices are split across `workers` processes; output is merged and sorted.
    """
    limit = get_settings().BRUTE_LIMIT
    if not 0 <= n <= limit:
        raise LimitExceededError(f"brute census is limited to n <= {limit} (2^(2^n) families), got n={n}; use the preorder method")
    workers = workers or get_settings().CENSUS_WORKERS
    if workers < 1:
        raise PreconditionError(f"workers must be at least 1, got {workers}")
    total = 1 << (1 << n)

    if workers == 1 or total < 1024:
        found = _brute_range(n, 0, total)
    else:
        step = -(-total // workers)
        bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
        log("CENSUS", f"brute n={n}: {total} families across {len(bounds)} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_brute_range, [n] * len(bounds), *zip(*bounds))
            found = [opens for part in parts for opens in part]

    carrier = Carrier(n)
    return TopologyCensus(n, "brute", (Topology(carrier, opens) for opens in found))


# ============ PREORDERS ============

def _preorder_rows(n: int) -> np.ndarray:
    """
    All preorders on n points as up-set rows, shape (count, n):
    row[x] = mask of every y with x <= y.
    """
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    rows = np.zeros((len(codes), n), dtype=np.int64)
    for x in range(n):
        rows[:, x] = 1 << x
    for bit, (x, y) in enumerate(pairs):
        rows[:, x] |= ((codes >> bit) & 1) << y

    transitive = np.ones(len(codes), dtype=bool)
    for x, y in pairs:
        related = ((rows[:, x] >> y) & 1).astype(bool)
        transitive &= ~related | ((rows[:, y] & ~rows[:, x]) == 0)
    return rows[transitive]


def enumerate_preorder(n: int) -> TopologyCensus:
    """Alexandrov topology of every preorder (specialization order correspondence)."""
    limit = get_settings().PREORDER_LIMIT
    if not 0 <= n <= limit:
        raise LimitExceededError(f"preorder census is limited to n <= {limit} (2^(n^2-n) relations), got n={n}")
    carrier = Carrier(n)
    rows = _preorder_rows(n)
    return TopologyCensus(n, "preorder", (alexandrov_topology(carrier, [int(v) for v in row]) for row in rows))


# ============ RANDOM ============

def random_topology(n: int, seed: int, k: Optional[int] = None) -> Topology:
    """
    Topology generated by k random subsets drawn from a seeded generator.
    k itself is drawn from the generator unless given. Same seed => same topology.
    """
    settings = get_settings()
    if seed < 0:
        raise PreconditionError(f"seed must be non-negative, got {seed}")
    if n > settings.MAX_CARRIER:
        raise LimitExceededError(f"random topologies are limited to n <= {settings.MAX_CARRIER}, got n={n}")
    carrier = Carrier(n)
    rng = np.random.default_rng(seed)
    if k is None:
        k = int(rng.integers(0, settings.RANDOM_MAX_SUBBASIS + 1))
    draws = rng.integers(0, carrier.subset_count, size=k)
    return generate_from_subbasis(carrier, [PointSet(carrier, int(m)) for m in draws])


# ============ CENSUS CACHE ============

class CensusCache:
    """
    Small in-memory cache of computed censuses keyed by (n, method).
    Evicts the oldest entry when full.
    """

    def __init__(self, max_size: int = 16):
        self._cache: Dict[Tuple[int, str], Tuple[TopologyCensus, float]] = {}
        self._max_size = max_size

    def get(self, n: int, method: str) -> Optional[TopologyCensus]:
        entry = self._cache.get((n, method))
        if entry is None:
            return None
        census, stored = entry
        log("CACHE HIT", f"census n={n} method={method} (age: {time.time() - stored:.1f}s)")
        return census

    def set(self, census: TopologyCensus) -> None:
        if len(self._cache) >= self._max_size:
            oldest_key = min(self._cache, key=lambda k: self._cache[k][1])
            del self._cache[oldest_key]
            log("CACHE EVICT", f"Removed census n={oldest_key[0]} method={oldest_key[1]}")
        self._cache[(census.n, census.method)] = (census, time.time())
        log("CACHE SET", f"Stored census n={census.n} method={census.method} (cache size: {len(self._cache)})")

    def clear(self) -> None:
        self._cache.clear()
        log("CACHE CLEAR", "All entries removed")

    def stats(self) -> dict:
        return {"size": len(self._cache), "max_size": self._max_size}


# Global cache instance (persists across sweeps)
census_cache = CensusCache(max_size=get_settings().CENSUS_CACHE_SIZE)


def get_census(n: int, method: Method = "brute", workers: Optional[int] = None) -> TopologyCensus:
    """Cached census lookup. `workers` only affects how a brute census is computed."""
    if method not in ("brute", "preorder"):
        raise PreconditionError(f"unknown census method {method!r}")
    cached = census_cache.get(n, method)
    if cached is not None:
        return cached
    started = time.perf_counter()
    census = enumerate_brute(n, workers) if method == "brute" else enumerate_preorder(n)
    log("CENSUS", f"n={n} method={method}: {census.count} topologies in {time.perf_counter() - started:.2f}s")
    census_cache.set(census)
    return census


def census_table(censuses: Sequence[TopologyCensus]) -> pd.DataFrame:
    """One row per census: n, method, count."""
    return pd.DataFrame(
        [{"n": c.n, "method": c.method, "count": c.count} for c in censuses],
        columns=["n", "method", "count"],
    )
