"""Classical root systems, Weyl orbits, weight multiplicities, dimensions.

Everything is exact: weights are doubled-integer rows, multiplicities are
ints, the Weyl dimension formula runs in big-integer arithmetic with a
divisibility assertion.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    IntegrityError,
    NonDominantError,
    NotIntegralError,
)
from .weights import (
    ReductiveType,
    Weight,
    dot2,
    factor_positive_roots2,
    factor_rho2,
    factor_simple_roots2,
    weyl_elements,
)

counters = {"factor_weight_system": 0}

_lock = threading.Lock()
_factor_cache: dict = {}
_dom_cache: dict = {}
_full_cache: dict = {}
_disk_cache = None


def install_disk_cache(cache) -> None:
    """Install (or remove, with None) an on-disk dominant-character cache."""
    global _disk_cache
    _disk_cache = cache


def clear_memory_caches() -> None:
    with _lock:
        _factor_cache.clear()
        _dom_cache.clear()
        _full_cache.clear()


@dataclass(frozen=True)
class RootSystem:
    """Root data of a reductive type (charges contribute no roots)."""

    rtype: ReductiveType
    simple_roots: tuple[Weight, ...]
    positive_roots: tuple[Weight, ...]
    rho: Weight
    # raw (uncanonicalized) doubled rows; A-roots keep their zero-sum gauge
    simple_rows: tuple[tuple[int, ...], ...] = field(repr=False)
    positive_rows: tuple[tuple[int, ...], ...] = field(repr=False)
    rho_row: tuple[int, ...] = field(repr=False)

    @property
    def gram(self) -> np.ndarray:
        """Bilinear form on weight coordinates (Euclidean in the eps basis)."""
        return np.eye(self.rtype.ncoords, dtype=np.int64)

    def pairing(self, w: Weight, root_row) -> int:
        """2<w, a>/<a, a> for a root given by its raw doubled row."""
        num = dot2(w.coords2, root_row)
        den = dot2(root_row, root_row)
        val = 2 * num
        if val % den:
            raise NotIntegralError(f"non-integral pairing for {w}")
        return val // den


_rs_cache: dict = {}


def build_root_system(rtype: ReductiveType) -> RootSystem:
    """Root system with the deterministic Bourbaki simple-root ordering."""
    if rtype in _rs_cache:
        return _rs_cache[rtype]
    nc = rtype.ncoords
    tot = rtype.total_dim

    def embed(block_start, vec):
        row = [0] * tot
        for j, x in enumerate(vec):
            row[block_start + j] = x
        return tuple(row)

    simple_rows, positive_rows = [], []
    rho_row = [0] * tot
    for f, (a, b) in zip(rtype.factors, rtype.blocks()):
        for r in factor_simple_roots2(f.family, f.rank):
            simple_rows.append(embed(a, r))
        for r in factor_positive_roots2(f.family, f.rank):
            positive_rows.append(embed(a, r))
        for j, x in enumerate(factor_rho2(f.family, f.rank)):
            rho_row[a + j] = x
    mk = lambda row: Weight(rtype.canonicalize2(row[:nc]), (0,) * rtype.torus_rank)
    rs = RootSystem(
        rtype=rtype,
        simple_roots=tuple(mk(r) for r in simple_rows),
        positive_roots=tuple(mk(r) for r in positive_rows),
        rho=mk(tuple(rho_row)),
        simple_rows=tuple(simple_rows),
        positive_rows=tuple(positive_rows),
        rho_row=tuple(rho_row),
    )
    _rs_cache[rtype] = rs
    return rs


def is_dominant(rs: RootSystem, w: Weight) -> bool:
    rs.rtype._check(w)
    return rs.rtype.is_dominant(w)


def check_dominant_integral(rs: RootSystem, lam: Weight) -> None:
    if not rs.rtype.is_integral(lam):
        raise NotIntegralError(f"{lam} is not integral for {rs.rtype}")
    if not rs.rtype.is_dominant(lam):
        raise NonDominantError(f"{lam} is not dominant for {rs.rtype}")


# ---------------------------------------------------------------------------
# Weyl orbits
# ---------------------------------------------------------------------------

def orbit_tables(rtype: ReductiveType):
    out = []
    for f, (a, b) in zip(rtype.factors, rtype.blocks()):
        P, S, _ = weyl_elements(f.family, f.rank)
        out.append((a, b, P, S))
    return out


def expand_rows(rtype: ReductiveType, rows, mults):
    """Orbit-expand dominant rows (charges ride along), canonicalized."""
    rows, mults = kernels.expand_orbit(rows, mults, orbit_tables(rtype))
    rows = rtype.canonicalize_rows(rows)
    order = kernels._lexsort_rows(rows)
    return rows[order], mults[order]


def weyl_orbit(rs: RootSystem, w: Weight) -> frozenset[Weight]:
    rs.rtype._check(w)
    row = rs.rtype.to_row(w)[None, :]
    rows, _ = expand_rows(rs.rtype, row, np.ones(1, dtype=np.int64))
    return frozenset(rs.rtype.from_row(r) for r in rows)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

class Character:
    """Finite multiset of weights with positive integer multiplicities."""

    __slots__ = ("rtype", "rows", "mults", "_map")

    def __init__(self, rtype: ReductiveType, rows, mults):
        self.rtype = rtype
        self.rows = np.asarray(rows, dtype=np.int64).reshape(-1, rtype.total_dim)
        self.mults = np.asarray(mults, dtype=np.int64)
        self._map = None

    def _ensure_map(self):
        if self._map is None:
            self._map = {
                tuple(int(x) for x in r): int(m)
                for r, m in zip(self.rows, self.mults)
            }
        return self._map

    def mult(self, w: Weight) -> int:
        return self._ensure_map().get(w.key(), 0)

    def mult_row(self, row) -> int:
        return self._ensure_map().get(tuple(int(x) for x in row), 0)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        for r, m in zip(self.rows, self.mults):
            yield self.rtype.from_row(r), int(m)

    def items(self):
        return iter(self)

    @property
    def total_mass(self) -> int:
        return int(self.mults.sum())

    def __eq__(self, other):
        return (
            isinstance(other, Character)
            and self.rtype == other.rtype
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows))
            and bool(np.array_equal(self.mults, other.mults))
        )

    def __repr__(self):
        return f"Character({self.rtype}, {len(self)} weights, mass {self.total_mass})"


def _factor_lambda_raw(f, lam: Weight, a, b):
    """Per-factor doubled coordinates of lam (A factors keep canonical gauge,
    which is a valid fixed-sum raw slice)."""
    return tuple(lam.coords2[a:b])


def _factor_dominant_system(f, lam_block):
    key = (f.family, f.rank, lam_block)
    with _lock:
        hit = _factor_cache.get(key)
    if hit is not None:
        return hit
    counters["factor_weight_system"] += 1
    rows, mults = kernels.factor_weight_system(
        f.family,
        f.rank,
        np.array(lam_block, dtype=np.int64),
        np.array(factor_simple_roots2(f.family, f.rank), dtype=np.int64),
        np.array(factor_positive_roots2(f.family, f.rank), dtype=np.int64),
        np.array(factor_rho2(f.family, f.rank), dtype=np.int64),
    )
    with _lock:
        _factor_cache[key] = (rows, mults)
    return rows, mults


def dominant_character(rs: RootSystem, lam: Weight) -> Character:
    """Dominant weights of V(lam) with Freudenthal multiplicities."""
    rt = rs.rtype
    rt._check(lam)
    check_dominant_integral(rs, lam)
    ck = (rt, lam.key())
    with _lock:
        hit = _dom_cache.get(ck)
    if hit is not None:
        return Character(rt, *hit)
    if _disk_cache is not None:
        got = _disk_cache.get(rt, lam)
        if got is not None:
            with _lock:
                _dom_cache[ck] = got
            return Character(rt, *got)
    # per-factor systems, then cartesian assembly
    rows = np.zeros((1, rt.total_dim), dtype=np.int64)
    mults = np.ones(1, dtype=np.int64)
    for f, (a, b) in zip(rt.factors, rt.blocks()):
        frows, fmults = _factor_dominant_system(f, _factor_lambda_raw(f, lam, a, b))
        n0, n1 = len(rows), len(frows)
        rows = np.repeat(rows, n1, axis=0)
        rows[:, a:b] = np.tile(frows, (n0, 1))
        mults = np.repeat(mults, n1) * np.tile(fmults, n0)
    for j, c in enumerate(lam.charges):
        rows[:, rt.ncoords + j] = 2 * c
    rows = rt.canonicalize_rows(rows)
    order = kernels._lexsort_rows(rows)
    rows, mults = rows[order], mults[order]
    with _lock:
        _dom_cache[ck] = (rows, mults)
    if _disk_cache is not None:
        _disk_cache.put(rt, lam, rows, mults)
    return Character(rt, rows, mults)


def freudenthal(rs: RootSystem, lam: Weight) -> Character:
    """Full weight multiset of the irreducible with highest weight lam."""
    rt = rs.rtype
    ck = (rt, lam.key())
    with _lock:
        hit = _full_cache.get(ck)
    if hit is not None:
        return Character(rt, *hit)
    dom = dominant_character(rs, lam)
    rows, mults = expand_rows(rt, dom.rows, dom.mults)
    with _lock:
        if len(_full_cache) > 4096:  # keep expanded characters bounded
            _full_cache.clear()
        _full_cache[ck] = (rows, mults)
    return Character(rt, rows, mults)


def weyl_dim(rs: RootSystem, lam: Weight) -> int:
    """Weyl dimension formula; exact integer."""
    rt = rs.rtype
    rt._check(lam)
    check_dominant_integral(rs, lam)
    num = 1
    den = 1
    lamrho = tuple(a + b for a, b in zip(lam.key(), rs.rho_row))
    for row in rs.positive_rows:
        num *= dot2(lamrho, row)
        den *= dot2(rs.rho_row, row)
    if num % den:
        raise IntegrityError("Weyl dimension formula did not divide exactly")
    return num // den


def character_from_weights(rtype: ReductiveType, weighted):
    """Character from an iterable of (Weight, mult); multiplicities add."""
    items = list(weighted)
    if not items:
        return Character(rtype, np.zeros((0, rtype.total_dim), np.int64), [])
    rows = np.array([rtype.to_row(w) for w, _ in items], dtype=np.int64)
    mults = np.array([m for _, m in items], dtype=np.int64)
    rows, mults = kernels.coalesce_rows(rows, mults)
    if np.any(mults <= 0):
        raise IntegrityError("character multiplicities must be positive")
    return Character(rtype, rows, mults)
