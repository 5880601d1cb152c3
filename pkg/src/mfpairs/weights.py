"""Reductive types and exact weights in the epsilon basis.

Coordinates are stored doubled (twice their rational value) so that every
weight of a classical group is an integer vector: denominators other than
1 or 2 never occur, and 2 only in spin coordinates of B/D factors.
A-factor weights are kept in the canonical gauge "last coordinate = 0"
(two vectors differing by a constant shift of a block are the same
SU-weight).  Central torus charges are plain integers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError, InvalidTypeError, NotIntegralError

FAMILIES = ("A", "B", "C", "D")

# minimal admissible rank per family (exceptional families are rejected)
_MIN_RANK = {"A": 1, "B": 1, "C": 1, "D": 2}


@dataclass(frozen=True)
class SimpleFactor:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidTypeError(
                f"unsupported factor family {self.family!r} (only classical A/B/C/D)"
            )
        if self.rank < _MIN_RANK[self.family]:
            raise InvalidTypeError(f"{self.family}{self.rank} is not admissible")

    @property
    def ncoords(self) -> int:
        return self.rank + 1 if self.family == "A" else self.rank

    @property
    def group_dim(self) -> int:
        r = self.rank
        if self.family == "A":
            return r * (r + 2)
        if self.family == "B":
            return r * (2 * r + 1)
        if self.family == "C":
            return r * (2 * r + 1)
        return r * (2 * r - 1)  # D

    @property
    def n_positive_roots(self) -> int:
        r = self.rank
        if self.family == "A":
            return r * (r + 1) // 2
        if self.family in ("B", "C"):
            return r * r
        return r * (r - 1)

    def __str__(self):
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class ReductiveType:
    """Product of classical simple factors plus a central torus."""

    factors: tuple[SimpleFactor, ...]
    torus_rank: int = 0

    def __post_init__(self):
        if self.torus_rank < 0:
            raise InvalidTypeError("torus_rank must be nonnegative")
        object.__setattr__(self, "factors", tuple(self.factors))

    # -- geometry of the coordinate vector -------------------------------
    @property
    def ncoords(self) -> int:
        return sum(f.ncoords for f in self.factors)

    @property
    def total_dim(self) -> int:
        """Length of the full (coords + charges) vector."""
        return self.ncoords + self.torus_rank

    @property
    def group_dim(self) -> int:
        return sum(f.group_dim for f in self.factors) + self.torus_rank

    @property
    def rank(self) -> int:
        return sum(f.rank for f in self.factors) + self.torus_rank

    def blocks(self):
        """Coordinate ranges (start, stop) per factor."""
        out, at = [], 0
        for f in self.factors:
            out.append((at, at + f.ncoords))
            at += f.ncoords
        return out

    def __str__(self):
        parts = [str(f) for f in self.factors] + ["U1"] * self.torus_rank
        return "x".join(parts) if parts else "U0"

    @staticmethod
    def parse(text: str) -> "ReductiveType":
        """Parse strings like ``A3xC2xU1``."""
        factors, torus = [], 0
        for tok in text.strip().split("x"):
            m = re.fullmatch(r"([A-DU])(\d+)", tok.strip())
            if not m:
                raise InvalidTypeError(f"cannot parse factor {tok!r}")
            fam, rk = m.group(1), int(m.group(2))
            if fam == "U":
                if rk != 1:
                    raise InvalidTypeError("central torus factors must be U1")
                torus += 1
            else:
                factors.append(SimpleFactor(fam, rk))
        return ReductiveType(tuple(factors), torus)

    # -- weight construction ---------------------------------------------
    def canonicalize2(self, coords2):
        """Canonical gauge for doubled coordinates (A blocks: last = 0)."""
        coords2 = list(coords2)
        for f, (a, b) in zip(self.factors, self.blocks()):
            if f.family == "A":
                shift = coords2[b - 1]
                if shift:
                    for i in range(a, b):
                        coords2[i] -= shift
        return tuple(coords2)

    def weight(self, coords, charges=()) -> "Weight":
        """Build a Weight from rational coordinates (halves allowed in B/D)."""
        coords = list(coords)
        if len(coords) != self.ncoords:
            raise DimensionMismatchError(
                f"{self}: expected {self.ncoords} coordinates, got {len(coords)}"
            )
        if len(charges) != self.torus_rank:
            raise DimensionMismatchError(
                f"{self}: expected {self.torus_rank} charges, got {len(charges)}"
            )
        coords2 = []
        for f, (a, b) in zip(self.factors, self.blocks()):
            for i in range(a, b):
                q = Fraction(coords[i])
                if q.denominator == 1:
                    coords2.append(2 * q.numerator)
                elif q.denominator == 2 and f.family in ("B", "D"):
                    coords2.append(q.numerator)
                else:
                    raise NotIntegralError(
                        f"coordinate {coords[i]} not allowed in factor {f}"
                    )
        return Weight(self.canonicalize2(coords2), tuple(int(c) for c in charges))

    def weight_from2(self, coords2, charges=()) -> "Weight":
        return Weight(self.canonicalize2(coords2), tuple(int(c) for c in charges))

    def zero_weight(self) -> "Weight":
        return Weight((0,) * self.ncoords, (0,) * self.torus_rank)

    # -- rows: the kernel-facing encoding (all entries doubled) ----------
    def to_row(self, w: "Weight") -> np.ndarray:
        self._check(w)
        return np.array(w.coords2 + tuple(2 * c for c in w.charges), dtype=np.int64)

    def from_row(self, row) -> "Weight":
        coords2 = tuple(int(x) for x in row[: self.ncoords])
        ch2 = [int(x) for x in row[self.ncoords:self.total_dim]]
        if any(c % 2 for c in ch2):
            raise NotIntegralError("charges must be integers")
        return Weight(self.canonicalize2(coords2), tuple(c // 2 for c in ch2))

    def canonicalize_rows(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized A-block canonicalization on a (N, total_dim) array."""
        rows = np.array(rows, dtype=np.int64, copy=True)
        for f, (a, b) in zip(self.factors, self.blocks()):
            if f.family == "A":
                rows[:, a:b] -= rows[:, b - 1:b]
        return rows

    def _check(self, w: "Weight"):
        if len(w.coords2) != self.ncoords or len(w.charges) != self.torus_rank:
            raise DimensionMismatchError(f"weight {w} does not live on {self}")

    # -- dominance / integrality / fundamental coefficients --------------
    def is_dominant(self, w: "Weight") -> bool:
        self._check(w)
        for f, (a, b) in zip(self.factors, self.blocks()):
            if not _factor_dominant(f.family, w.coords2[a:b]):
                return False
        return True

    def is_integral(self, w: "Weight") -> bool:
        self._check(w)
        for f, (a, b) in zip(self.factors, self.blocks()):
            v = w.coords2[a:b]
            if f.family in ("A", "C"):
                if any(x % 2 for x in v):
                    return False
            else:  # B, D: all coordinates in the same (Z or Z+1/2) class
                if len({x % 2 for x in v}) > 1:
                    return False
        return True

    def dominant(self, w: "Weight") -> "Weight":
        """Dominant Weyl-chamber representative."""
        self._check(w)
        out = []
        for f, (a, b) in zip(self.factors, self.blocks()):
            out.extend(_factor_dominantize(f.family, w.coords2[a:b]))
        return Weight(self.canonicalize2(out), w.charges)

    def fundamental_coefficients(self, w: "Weight"):
        """Coefficients of w over the fundamental weights, plus charges."""
        self._check(w)
        coeffs = []
        for f, (a, b) in zip(self.factors, self.blocks()):
            v = w.coords2[a:b]
            r = f.rank
            if f.family == "A":
                coeffs += [(v[i] - v[i + 1]) // 2 for i in range(r)]
            elif f.family == "B":
                coeffs += [(v[i] - v[i + 1]) // 2 for i in range(r - 1)] + [v[r - 1]]
            elif f.family == "C":
                coeffs += [(v[i] - v[i + 1]) // 2 for i in range(r - 1)] + [v[r - 1] // 2]
            else:  # D
                coeffs += [(v[i] - v[i + 1]) // 2 for i in range(r - 2)] if r > 2 else []
                if r >= 2:
                    coeffs += [(v[r - 2] - v[r - 1]) // 2, (v[r - 2] + v[r - 1]) // 2]
        return tuple(coeffs) + w.charges

    def weight_from_coefficients(self, coeffs) -> "Weight":
        """Inverse of fundamental_coefficients (charges appended)."""
        n_simple = sum(f.rank for f in self.factors)
        if len(coeffs) != n_simple + self.torus_rank:
            raise DimensionMismatchError(
                f"{self}: expected {n_simple}+{self.torus_rank} coefficients"
            )
        coords2, at = [], 0
        for f in self.factors:
            c = coeffs[at:at + f.rank]
            at += f.rank
            coords2.extend(_factor_weight_from_coeffs(f.family, f.rank, c))
        charges = tuple(int(c) for c in coeffs[at:])
        return Weight(self.canonicalize2(coords2), charges)

    def dominant_weights_by_height(self, bound: int):
        """All dominant integral weights with height <= bound.

        Height is the sum of |fundamental coefficients| plus |charges|.
        """
        n_simple = sum(f.rank for f in self.factors)
        out = []
        for total in range(bound + 1):
            for fc in _compositions(total, n_simple + self.torus_rank):
                base = fc[:n_simple]
                chs = fc[n_simple:]
                for signs in itertools.product(*[(1, -1) if c else (1,) for c in chs]):
                    coeffs = base + tuple(c * s for c, s in zip(chs, signs))
                    out.append(self.weight_from_coefficients(coeffs))
        return out


@dataclass(frozen=True)
class Weight:
    """Exact weight: doubled epsilon-coordinates plus integer central charges."""

    coords2: tuple[int, ...]
    charges: tuple[int, ...] = ()

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, 2) for c in self.coords2)

    def key(self) -> tuple[int, ...]:
        return self.coords2 + tuple(2 * c for c in self.charges)

    def __str__(self):
        cs = ",".join(str(c) for c in self.coords)
        if self.charges:
            return f"({cs};{','.join(map(str, self.charges))})"
        return f"({cs})"


# ---------------------------------------------------------------------------
# per-factor combinatorics on doubled coordinate tuples
# ---------------------------------------------------------------------------

def _factor_dominant(family, v) -> bool:
    if family == "A":
        return all(v[i] >= v[i + 1] for i in range(len(v) - 1))
    if family in ("B", "C"):
        return all(v[i] >= v[i + 1] for i in range(len(v) - 1)) and v[-1] >= 0
    # D: decreasing with |last| dominated
    if len(v) == 1:
        return True
    return all(v[i] >= v[i + 1] for i in range(len(v) - 2)) and v[-2] >= abs(v[-1])


def _factor_dominantize(family, v):
    if family == "A":
        return sorted(v, reverse=True)
    w = sorted((abs(x) for x in v), reverse=True)
    if family in ("B", "C"):
        return w
    negs = sum(1 for x in v if x < 0)
    if negs % 2:
        w[-1] = -w[-1]
    return w


def _factor_weight_from_coeffs(family, rank, c):
    """Doubled epsilon coordinates of sum(c_i * fundamental_i)."""
    if family == "A":
        # omega_l = e_1 + ... + e_l (canonical gauge has rank+1 coords)
        v = [0] * (rank + 1)
        for l, cl in enumerate(c, start=1):
            for i in range(l):
                v[i] += 2 * cl
        return v
    v = [0] * rank
    if family == "B":
        for l, cl in enumerate(c[:-1], start=1):
            for i in range(l):
                v[i] += 2 * cl
        for i in range(rank):
            v[i] += c[-1]  # spin weight (1/2,...,1/2)
        return v
    if family == "C":
        for l, cl in enumerate(c, start=1):
            for i in range(l):
                v[i] += 2 * cl
        return v
    # D
    for l, cl in enumerate(c[:-2], start=1):
        for i in range(l):
            v[i] += 2 * cl
    cm, cp = c[-2], c[-1]  # omega_{r-1} = (1,..,1,-1)/2, omega_r = (1,..,1)/2
    for i in range(rank):
        v[i] += cm + cp
    v[rank - 1] -= 2 * cm
    return v


def _compositions(total, parts):
    """Nonnegative integer tuples of given length summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# roots, rho, fundamental data (doubled, raw gauge: A roots sum to zero)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def factor_simple_roots2(family, rank):
    """Simple roots in Bourbaki order, doubled coordinates."""
    n = rank + 1 if family == "A" else rank
    roots = []
    for i in range(rank - 1 if family != "A" else rank):
        v = [0] * n
        v[i], v[i + 1] = 2, -2
        roots.append(tuple(v))
    if family == "A":
        pass
    elif family == "B":
        v = [0] * n
        v[-1] = 2
        roots.append(tuple(v))
    elif family == "C":
        v = [0] * n
        v[-1] = 4
        roots.append(tuple(v))
    else:  # D
        v = [0] * n
        v[-2], v[-1] = 2, 2
        roots.append(tuple(v))
    return tuple(roots)


@lru_cache(maxsize=None)
def factor_positive_roots2(family, rank):
    n = rank + 1 if family == "A" else rank
    roots = []

    def vec(pairs):
        v = [0] * n
        for i, x in pairs:
            v[i] = x
        return tuple(v)

    if family == "A":
        for i in range(n):
            for j in range(i + 1, n):
                roots.append(vec([(i, 2), (j, -2)]))
        return tuple(roots)
    for i in range(rank):
        for j in range(i + 1, rank):
            roots.append(vec([(i, 2), (j, -2)]))
            roots.append(vec([(i, 2), (j, 2)]))
    if family == "B":
        for i in range(rank):
            roots.append(vec([(i, 2)]))
    elif family == "C":
        for i in range(rank):
            roots.append(vec([(i, 4)]))
    return tuple(roots)


@lru_cache(maxsize=None)
def factor_rho2(family, rank):
    if family == "A":
        return tuple(2 * (rank - i) for i in range(rank + 1))
    if family == "B":
        return tuple(2 * (rank - i) - 1 for i in range(rank))
    if family == "C":
        return tuple(2 * (rank - i) for i in range(rank))
    return tuple(2 * (rank - 1 - i) for i in range(rank))


def dot2(u, v):
    """Dot product of doubled vectors: equals 4<u,v>."""
    return sum(int(a) * int(b) for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# Weyl group element tables (permutation, signs, determinant) per factor
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def weyl_elements(family, rank):
    """(perms, signs, dets) arrays describing the factor's Weyl group.

    Acting on a coordinate row v gives v[perm] * sign.
    """
    n = rank + 1 if family == "A" else rank
    perms = list(itertools.permutations(range(n)))
    if family == "A":
        sign_choices = [(1,) * n]
    elif family in ("B", "C"):
        sign_choices = list(itertools.product((1, -1), repeat=n))
    else:  # D: even number of sign flips
        sign_choices = [s for s in itertools.product((1, -1), repeat=n)
                        if s.count(-1) % 2 == 0]
    P = np.array([p for p in perms for _ in sign_choices], dtype=np.int64)
    S = np.array([s for _ in perms for s in sign_choices], dtype=np.int64)
    perm_sign = np.array(
        [_perm_sign(p) for p in perms for _ in sign_choices], dtype=np.int64
    )
    dets = perm_sign * np.prod(S, axis=1)
    return P, S, dets


def _perm_sign(p):
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def weyl_order(rtype: ReductiveType) -> int:
    out = 1
    for f in rtype.factors:
        P, _, _ = weyl_elements(f.family, f.rank)
        out *= len(P)
    return out
