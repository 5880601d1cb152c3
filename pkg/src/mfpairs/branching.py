"""Restriction of characters along torus embeddings and branching by peeling.

The branching algorithm follows the restriction + highest-weight-peeling
scheme: restrict the full weight multiset, then repeatedly remove the
character of the graded-lex maximal surviving weight.  A second,
independent route (the Weyl-group alternating sum) computes single
constituent multiplicities and serves as a cross-check oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    IntegrityError,
    NotIntegralError,
)
from .rootsys import (
    Character,
    RootSystem,
    build_root_system,
    check_dominant_integral,
    dominant_character,
    freudenthal,
    weyl_dim,
)
from .weights import ReductiveType, Weight, weyl_elements


@dataclass(frozen=True)
class EmbeddingMap:
    """Exact linear map between weight lattices (restriction direction).

    `matrix` has shape (target.total_dim, source.total_dim) and acts on
    (coords, charges) vectors; the same matrix acts on doubled rows.
    `charge_modulus[j] = k > 0` reduces target charge j modulo k (finite
    central factor of order k); 0 keeps the charge exact.
    """

    source: ReductiveType
    target: ReductiveType
    matrix: tuple
    charge_modulus: tuple = ()

    def __post_init__(self):
        M = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        if len(M) != self.target.total_dim or any(
            len(r) != self.source.total_dim for r in M
        ):
            raise DimensionMismatchError(
                f"matrix must be {self.target.total_dim} x {self.source.total_dim}"
            )
        object.__setattr__(self, "matrix", M)
        cm = tuple(self.charge_modulus) or (0,) * self.target.torus_rank
        if len(cm) != self.target.torus_rank or any(k < 0 for k in cm):
            raise DimensionMismatchError("bad charge_modulus")
        object.__setattr__(self, "charge_modulus", cm)

    @cached_property
    def _int_matrix(self):
        out = np.empty((self.target.total_dim, self.source.total_dim), np.int64)
        for i, row in enumerate(self.matrix):
            for j, x in enumerate(row):
                if x.denominator != 1:
                    return None
                out[i, j] = x.numerator
        return out

    @staticmethod
    def identity(rtype: ReductiveType) -> "EmbeddingMap":
        n = rtype.total_dim
        return EmbeddingMap(
            rtype, rtype, tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        )

    def compose(self, inner: "EmbeddingMap") -> "EmbeddingMap":
        """self o inner (inner restricts first)."""
        if inner.target != self.source:
            raise DimensionMismatchError("embedding maps do not compose")
        A = [
            [
                sum(self.matrix[i][k] * inner.matrix[k][j]
                    for k in range(self.source.total_dim))
                for j in range(inner.source.total_dim)
            ]
            for i in range(self.target.total_dim)
        ]
        return EmbeddingMap(inner.source, self.target, tuple(map(tuple, A)),
                            self.charge_modulus)

    # -- application ------------------------------------------------------
    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        M = self._int_matrix
        if M is not None:
            out = rows @ M.T
        else:
            out = np.empty((len(rows), self.target.total_dim), np.int64)
            for i, r in enumerate(rows):
                for t in range(self.target.total_dim):
                    v = sum(self.matrix[t][j] * int(r[j]) for j in range(len(r)))
                    if v.denominator != 1:
                        raise NotIntegralError("embedding map produced a non-integral weight")
                    out[i, t] = v.numerator
        out = self.target.canonicalize_rows(out)
        nc = self.target.ncoords
        for j, k in enumerate(self.charge_modulus):
            if k:
                out[:, nc + j] %= 2 * k
        return out

    def apply_weight(self, w: Weight) -> Weight:
        row = self.apply_rows(self.source.to_row(w)[None, :])[0]
        return self.target.from_row(row)

    def check_integral_generators(self) -> bool:
        """Images of source fundamental weights / charge units are integral."""
        gens = []
        n_simple = sum(f.rank for f in self.source.factors)
        for i in range(n_simple + self.source.torus_rank):
            coeffs = [0] * (n_simple + self.source.torus_rank)
            coeffs[i] = 1
            gens.append(self.source.weight_from_coefficients(coeffs))
        for g in gens:
            w = self.apply_weight(g)  # raises NotIntegralError on failure
            if not self.target.is_integral(w):
                return False
        return True


@dataclass(frozen=True)
class BranchingResult:
    """Decomposition of a restriction into subgroup irreducibles."""

    rtype: ReductiveType  # target (subgroup) type
    constituents: tuple  # ((Weight, mult), ...) sorted by descending peel order

    def multiplicity(self, w: Weight) -> int:
        for u, m in self.constituents:
            if u == w:
                return m
        return 0

    def as_dict(self):
        return {w: m for w, m in self.constituents}

    def __iter__(self):
        return iter(self.constituents)

    def __len__(self):
        return len(self.constituents)


def restrict_character(ch: Character, emb: EmbeddingMap) -> Character:
    """Pushforward of a weight multiset along the embedding."""
    if ch.rtype != emb.source:
        raise DimensionMismatchError(
            f"character lives on {ch.rtype}, embedding expects {emb.source}"
        )
    rows = emb.apply_rows(ch.rows)
    rows, mults = kernels.coalesce_rows(rows, ch.mults)
    return Character(emb.target, rows, mults)


def _grade_lex_order(rows: np.ndarray):
    """Ascending (grade, lex) order; iterate reversed for peeling."""
    grade = rows.sum(axis=1)
    keys = tuple(rows[:, j] for j in reversed(range(rows.shape[1]))) + (grade,)
    return np.lexsort(keys)


def _small_char_rows(small_rs: RootSystem, mu: Weight):
    ch = freudenthal(small_rs, mu)
    return ch.rows, ch.mults


def branch(
    big: RootSystem,
    lam: Weight,
    small: RootSystem,
    emb: EmbeddingMap,
) -> BranchingResult:
    """Decompose V(lam)|_K by restriction and highest-weight peeling."""
    if emb.source != big.rtype or emb.target != small.rtype:
        raise DimensionMismatchError("embedding does not match the given root systems")
    check_dominant_integral(big, lam)
    full = freudenthal(big, lam)
    restricted = restrict_character(full, emb)
    rows, mults = restricted.rows, np.array(restricted.mults, dtype=np.int64)
    rt = small.rtype

    order = _grade_lex_order(rows)
    rows_s = rows[order]
    cur = mults[order].copy()

    packed = kernels._try_pack(rows_s) if len(rows_s) else None
    if packed is not None:
        lo = int(rows_s.min())
        hi = int(rows_s.max())
        pows, lo64, _ = kernels.pack_bounds(lo, hi, rows_s.shape[1])
        keys = kernels.pack_rows(rows_s, pows, lo64)
        key_order = np.argsort(keys, kind="stable")
        keys_asc = keys[key_order]
        inv = np.empty(len(key_order), dtype=np.int64)
        inv[key_order] = np.arange(len(key_order))
        cur_k = cur[key_order]

        def lookup_positions(target_rows):
            if np.any((target_rows < lo) | (target_rows > hi)):
                return None
            tk = kernels.pack_rows(target_rows, pows, lo64)
            pos = np.searchsorted(keys_asc, tk)
            if np.any(pos >= len(keys_asc)) or np.any(keys_asc[pos] != tk):
                return None
            return pos

        constituents = []
        for i in range(len(rows_s) - 1, -1, -1):
            m = int(cur_k[inv[i]])
            if m == 0:
                continue
            if m < 0:
                raise IntegrityError("peeling drove a multiplicity negative")
            w = rt.from_row(rows_s[i])
            if not rt.is_dominant(w):
                raise IntegrityError(
                    f"peeling selected non-dominant maximal weight {w} "
                    "(broken embedding map)"
                )
            srows, smults = _small_char_rows(small, w)
            pos = lookup_positions(srows)
            if pos is None:
                raise IntegrityError(
                    f"constituent {w} has weights outside the restricted multiset"
                )
            cur_k[pos] -= m * smults
            constituents.append((w, m))
        if np.any(cur_k != 0):
            raise IntegrityError("peeling left a nonzero multiset")
    else:
        cur_map = {tuple(int(x) for x in r): int(c) for r, c in zip(rows_s, cur)}
        constituents = []
        for i in range(len(rows_s) - 1, -1, -1):
            key = tuple(int(x) for x in rows_s[i])
            m = cur_map[key]
            if m == 0:
                continue
            if m < 0:
                raise IntegrityError("peeling drove a multiplicity negative")
            w = rt.from_row(rows_s[i])
            if not rt.is_dominant(w):
                raise IntegrityError(
                    f"peeling selected non-dominant maximal weight {w} "
                    "(broken embedding map)"
                )
            srows, smults = _small_char_rows(small, w)
            for r, sm in zip(srows, smults):
                k2 = tuple(int(x) for x in r)
                if k2 not in cur_map:
                    raise IntegrityError(
                        f"constituent {w} has weights outside the restricted multiset"
                    )
                cur_map[k2] -= m * int(sm)
            constituents.append((w, m))
        if any(v != 0 for v in cur_map.values()):
            raise IntegrityError("peeling left a nonzero multiset")

    # dimension conservation (exact)
    total = sum(m * weyl_dim(small, w) for w, m in constituents)
    expect = weyl_dim(big, lam)
    if total != expect:
        raise IntegrityError(
            f"dimension conservation failed: {total} != {expect} for {lam}"
        )
    return BranchingResult(rt, tuple(constituents))


def fixed_vector_dim(
    big: RootSystem,
    lam: Weight,
    small: RootSystem,
    emb: EmbeddingMap,
) -> int:
    """Multiplicity of the trivial subgroup constituent (K-fixed vectors)."""
    res = branch(big, lam, small, emb)
    return res.multiplicity(small.rtype.zero_weight())


# ---------------------------------------------------------------------------
# independent route: alternating-sum constituent multiplicity
# ---------------------------------------------------------------------------

def _weyl_group_iter(rtype: ReductiveType):
    """Yield (blockwise (perm, sign) tables, det) over the full Weyl group."""
    per_factor = []
    for f, (a, b) in zip(rtype.factors, rtype.blocks()):
        P, S, D = weyl_elements(f.family, f.rank)
        per_factor.append([(a, P[i], S[i], int(D[i])) for i in range(len(P))])
    if not per_factor:
        yield (), 1
        return
    for combo in itertools.product(*per_factor):
        det = 1
        for _, _, _, d in combo:
            det *= d
        yield combo, det


def constituent_multiplicity_in(ch: Character, small: RootSystem, mu: Weight) -> int:
    """Multiplicity of the irreducible V(mu) inside an arbitrary character,
    by the Weyl-group alternating sum over w(mu+rho)-rho."""
    rt = small.rtype
    rt._check(mu)
    check_dominant_integral(small, mu)
    rho = np.array(small.rho_row, dtype=np.int64)  # full-length, zero on charges
    base = np.array(rt.to_row(mu), dtype=np.int64) + rho
    total = 0
    for combo, det in _weyl_group_iter(rt):
        img = base.copy()
        for a, P, S, _ in combo:
            img[a:a + len(P)] = base[a:a + len(P)][P] * S
        img -= rho
        img = rt.canonicalize_rows(img[None, :])[0]
        total += det * ch.mult_row(img)
    return total


def branch_multiplicity(
    big: RootSystem,
    lam: Weight,
    small: RootSystem,
    emb: EmbeddingMap,
    mu: Weight,
) -> int:
    """Multiplicity of V(mu) in V(lam)|_K without a full peel.

    Splits factor-block-diagonal embeddings and multiplies per-block
    results, so product groups avoid materializing product characters.
    """
    comps = split_components(emb)
    if comps is None or len(comps) <= 1:
        full = freudenthal(big, lam)
        restricted = restrict_character(full, emb)
        return constituent_multiplicity_in(restricted, small, mu)
    out = 1
    for sub in comps:
        lam_b = _project_weight(emb.source, lam, sub.src_cols)
        mu_b = _project_weight(emb.target, mu, sub.tgt_rows)
        out *= branch_multiplicity(
            build_root_system(sub.emb.source), lam_b,
            build_root_system(sub.emb.target), sub.emb, mu_b,
        )
        if out == 0:
            return 0
    return out


@dataclass(frozen=True)
class _EmbComponent:
    emb: EmbeddingMap
    src_cols: tuple
    tgt_rows: tuple


def _blocks_with_charges(rtype: ReductiveType):
    """Column groups: one per factor block, one per charge."""
    groups = [tuple(range(a, b)) for a, b in rtype.blocks()]
    groups += [(rtype.ncoords + j,) for j in range(rtype.torus_rank)]
    kinds = list(rtype.factors) + ["charge"] * rtype.torus_rank
    return groups, kinds


def split_components(emb: EmbeddingMap):
    """Partition of the embedding into independent factor-block components.

    Returns a list of _EmbComponent, or None if the matrix couples columns
    inside a source block to several target blocks in a non-separable way.
    """
    sgroups, skinds = _blocks_with_charges(emb.source)
    tgroups, tkinds = _blocks_with_charges(emb.target)
    M = emb._int_matrix
    if M is None:
        return None
    # union-find over source/target group indices
    parent = list(range(len(sgroups) + len(tgroups)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for ti, tg in enumerate(tgroups):
        for si, sg in enumerate(sgroups):
            if np.any(M[np.ix_(tg, sg)] != 0):
                union(len(sgroups) + ti, si)
    comps = {}
    for si in range(len(sgroups)):
        comps.setdefault(find(si), [[], []])[0].append(si)
    for ti in range(len(tgroups)):
        comps.setdefault(find(len(sgroups) + ti), [[], []])[1].append(ti)
    out = []
    for _, (sids, tids) in sorted(comps.items()):
        src_cols = [c for si in sids for c in sgroups[si]]
        tgt_rows = [r for ti in tids for r in tgroups[ti]]
        sfactors = [skinds[si] for si in sids if skinds[si] != "charge"]
        storus = sum(1 for si in sids if skinds[si] == "charge")
        tfactors = [tkinds[ti] for ti in tids if tkinds[ti] != "charge"]
        ttorus = sum(1 for ti in tids if tkinds[ti] == "charge")
        sub_src = ReductiveType(tuple(sfactors), storus)
        sub_tgt = ReductiveType(tuple(tfactors), ttorus)
        sub_matrix = tuple(
            tuple(emb.matrix[r][c] for c in src_cols) for r in tgt_rows
        )
        t_charge_rows = [ti for ti in tids if tkinds[ti] == "charge"]
        sub_mod = tuple(
            emb.charge_modulus[tgroups[ti][0] - emb.target.ncoords]
            for ti in t_charge_rows
        )
        out.append(
            _EmbComponent(
                EmbeddingMap(sub_src, sub_tgt, sub_matrix, sub_mod),
                tuple(src_cols),
                tuple(tgt_rows),
            )
        )
    return out


def _project_weight(rtype: ReductiveType, w: Weight, cols):
    row = rtype.to_row(w)
    nc = rtype.ncoords
    coords2 = [int(row[c]) for c in cols if c < nc]
    charges = [int(row[c]) // 2 for c in cols if c >= nc]
    return Weight(tuple(coords2), tuple(charges))
